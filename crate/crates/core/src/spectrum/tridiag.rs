//! Symmetric tridiagonal eigenvalues by Sturm bisection, eigenvectors by
//! inverse iteration, and a partially pivoted tridiagonal solver.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1));
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut radius = 0.0;
            if i > 0 {
                radius += self.off[i - 1].abs();
            }
            if i + 1 < n {
                radius += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }

    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * self.norm_bound() * 1e-3);
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.len() {
            let coupling = if i > 0 {
                self.off[i - 1] * self.off[i - 1] / d
            } else {
                0.0
            };
            d = self.diag[i] - x - coupling;
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k` smallest eigenvalues, ascending.
    pub fn lowest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let (glo, ghi) = self.gershgorin();
        let pad = f64::EPSILON * self.norm_bound() * 4.0 + f64::MIN_POSITIVE;
        (0..k)
            .map(|j| {
                let (mut lo, mut hi) = (glo - pad, ghi + pad);
                // invariant: count_below(lo) <= j < count_below(hi)
                loop {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.count_below(mid) > j {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }

    /// Unit eigenvector for the (accurate) eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let norm = self.norm_bound().max(f64::MIN_POSITIVE);
        let shifted = Tridiagonal {
            sub: self.off.clone(),
            diag: self.diag.iter().map(|d| d - lambda).collect(),
            sup: self.off.clone(),
        };
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.25 * (i as f64 * 0.7548).sin())
            .collect();
        normalize(&mut x);
        for _ in 0..4 {
            x = shifted.solve_with_floor(&x, f64::EPSILON * norm);
            if !x.iter().all(|v| v.is_finite()) {
                return Err(Error::Numerical(format!(
                    "inverse iteration diverged at eigenvalue {lambda:e} (size {n})"
                )));
            }
            normalize(&mut x);
        }
        let residual = self
            .mul(&x)
            .iter()
            .zip(&x)
            .map(|(bx, xi)| (bx - lambda * xi).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual > 1e-8 * norm {
            return Err(Error::Numerical(format!(
                "inverse iteration did not converge at eigenvalue {lambda:e}: residual {residual:e}, norm {norm:e}, size {n}"
            )));
        }
        Ok(x)
    }
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

/// General tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    /// `sub[i]` is entry `(i + 1, i)`.
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    /// `sup[i]` is entry `(i, i + 1)`.
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    /// Gaussian elimination with partial pivoting. `None` on an exactly
    /// singular pivot.
    pub fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        self.eliminate(rhs, None)
    }

    /// As [`Tridiagonal::solve`], with vanishing pivots replaced by `floor`.
    fn solve_with_floor(&self, rhs: &[f64], floor: f64) -> Vec<f64> {
        self.eliminate(rhs, Some(floor))
            .expect("pivots are floored")
    }

    fn eliminate(&self, rhs: &[f64], floor: Option<f64>) -> Option<Vec<f64>> {
        let n = self.diag.len();
        assert_eq!(rhs.len(), n);
        if n == 0 {
            return Some(Vec::new());
        }
        let mut d = self.diag.clone();
        let mut du = self.sup.clone();
        // lower band, reused for the second superdiagonal created by pivoting
        let mut dl = self.sub.clone();
        let mut b = rhs.to_vec();
        let fix = |p: f64| -> Option<f64> {
            if p != 0.0 {
                Some(p)
            } else {
                floor
            }
        };
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                let piv = fix(d[i])?;
                d[i] = piv;
                let fact = dl[i] / piv;
                d[i + 1] -= fact * du[i];
                b[i + 1] -= fact * b[i];
                dl[i] = 0.0;
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                if i + 2 < n {
                    dl[i] = du[i + 1];
                    du[i + 1] = -fact * dl[i];
                } else {
                    dl[i] = 0.0;
                }
                du[i] = temp;
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - fact * b[i + 1];
            }
        }
        d[n - 1] = fix(d[n - 1])?;
        b[n - 1] /= d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
        }
        Some(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// second difference matrix, eigenvalues 2 − 2cos(jπ/(n+1))
    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn eigenvalues_of_second_difference() {
        let n = 50;
        let ev = laplacian(n).lowest_eigenvalues(5);
        for (j, l) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((j + 1) as f64 * PI / (n + 1) as f64).cos();
            assert!((l - exact).abs() < 1e-13, "{j}: {l} vs {exact}");
        }
    }

    #[test]
    fn eigenvectors_of_second_difference() {
        let n = 40;
        let a = laplacian(n);
        let ev = a.lowest_eigenvalues(3);
        for (j, &l) in ev.iter().enumerate() {
            let v = a.eigenvector(l).unwrap();
            let mut exact: Vec<f64> = (0..n)
                .map(|i| ((i + 1) as f64 * (j + 1) as f64 * PI / (n + 1) as f64).sin())
                .collect();
            normalize(&mut exact);
            let dot: f64 = v.iter().zip(&exact).map(|(a, b)| a * b).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn indefinite_solve_needs_pivoting() {
        // zero leading pivot
        let t = Tridiagonal {
            sub: vec![1.0, 1.0],
            diag: vec![0.0, 0.0, 1.0],
            sup: vec![1.0, 1.0],
        };
        let x = t.solve(&[1.0, 2.0, 3.0]).unwrap();
        // rows: x1 = 1, x0 + x2 = 2, x1 + x2 = 3
        assert!((x[1] - 1.0).abs() < 1e-15);
        assert!((x[2] - 2.0).abs() < 1e-15);
        assert!(x[0].abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn solve_residual_is_small(
            diag in prop::collection::vec(-5.0f64..5.0, 2..30),
            seed in 0u64..1000,
        ) {
            let n = diag.len();
            let sub: Vec<f64> = (0..n - 1).map(|i| ((i as u64 * 7 + seed) % 11) as f64 / 3.0 - 1.5).collect();
            let sup: Vec<f64> = (0..n - 1).map(|i| ((i as u64 * 5 + seed) % 13) as f64 / 4.0 - 1.0).collect();
            let t = Tridiagonal { sub: sub.clone(), diag: diag.clone(), sup: sup.clone() };
            let rhs: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
            if let Some(x) = t.solve(&rhs) {
                let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                for i in 0..n {
                    let mut r = diag[i] * x[i] - rhs[i];
                    if i > 0 { r += sub[i - 1] * x[i - 1]; }
                    if i + 1 < n { r += sup[i] * x[i + 1]; }
                    prop_assert!(r.abs() < 1e-9 * scale, "row {} residual {}", i, r);
                }
            }
        }

        #[test]
        fn sturm_count_matches_bisection(diag in prop::collection::vec(-3.0f64..3.0, 3..25)) {
            let n = diag.len();
            let a = SymTridiagonal::new(diag, vec![0.5; n - 1]);
            let ev = a.lowest_eigenvalues(n);
            prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
            let trace: f64 = a.diag.iter().sum();
            prop_assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-10);
        }
    }
}
