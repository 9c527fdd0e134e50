//! Composite Newton–Cotes rules on uniform grids.

/// Integrates samples `f` taken at uniform spacing `h`.
///
/// Composite Simpson when the number of intervals is even; otherwise Simpson
/// on the leading intervals and the 3/8 rule on the last three. Two samples
/// fall back to the trapezoid rule. Fourth order for three or more intervals.
pub fn uniform(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (f[0] + f[1]),
        _ => {
            let intervals = n - 1;
            if intervals.is_multiple_of(2) {
                simpson(f, h)
            } else {
                let split = n - 4;
                let head = if split > 0 {
                    simpson(&f[..=split], h)
                } else {
                    0.0
                };
                let t = &f[split..];
                head + 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3])
            }
        }
    }
}

fn simpson(f: &[f64], h: f64) -> f64 {
    debug_assert!(f.len() % 2 == 1);
    let last = f.len() - 1;
    let interior: f64 = f[1..last]
        .iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 0 { 4.0 * v } else { 2.0 * v })
        .sum();
    h / 3.0 * (f[0] + interior + f[last])
}
