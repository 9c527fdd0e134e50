//! Closed-form area of the rotational CMC spheres as a function of the mean
//! curvature, its derivative, and the critical value `H₀` where the area is
//! maximal in `S²×R`.
//!
//! With `a = 4H² + κ` both spaces share the form
//!
//! ```text
//! A(H) = 8π [ 1/a + (a − κ) a^(−3/2) F(a) ]
//! ```
//!
//! where `F(a) = artanh(a^(−1/2))` for κ = +1 and `arctan(a^(−1/2))` for
//! κ = −1. Since `dF/da = −a^(−1/2) / (2(a − κ))`,
//!
//! ```text
//! dA/da = 4π [ −3/a² + (3κ − a) a^(−5/2) F(a) ],    dA/dH = 8H dA/da.
//! ```

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::geometry::SpaceForm;

/// Mean curvature above which the rotational spheres of `S²×R` bound
/// isoperimetric regions. Literature value, not computed here.
pub const ISOPERIMETRIC_THRESHOLD_S2XR: f64 = 0.33;

/// Bisection bracket and tolerance for [`find_h0`].
const H0_BRACKET: (f64, f64) = (1e-3, 1.0);
const H0_TOL: f64 = 1e-12;

/// CSV header of [`write_sweep_csv`].
pub const SWEEP_CSV_HEADER: &str = "H,A,dAdH,stable_flag";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaFunction {
    pub space: SpaceForm,
    /// Lower end of the open existence interval.
    pub domain_min: f64,
}

impl AreaFunction {
    pub fn new(space: SpaceForm) -> Self {
        Self {
            space,
            domain_min: space.existence_threshold(),
        }
    }

    pub fn area(&self, h: f64) -> Result<f64> {
        match self.space {
            SpaceForm::S2xR => area_s2r(h),
            SpaceForm::H2xR => area_h2r(h),
        }
    }

    pub fn derivative(&self, h: f64) -> Result<f64> {
        d_area_dh(self.space, h)
    }

    /// Analytic derivative cross-checked against a Richardson-extrapolated
    /// central difference.
    pub fn derivative_checked(&self, h: f64) -> Result<f64> {
        let analytic = self.derivative(h)?;
        let numeric = d_area_dh_numeric(self.space, h)?;
        let scale = analytic.abs().max(1e-6 * self.area(h)?);
        if (analytic - numeric).abs() > 1e-7 * scale {
            return Err(Error::Numerical(format!(
                "dA/dH self-check failed at H = {h}: analytic {analytic:e}, finite difference {numeric:e}"
            )));
        }
        Ok(analytic)
    }
}

fn check_domain(space: SpaceForm, h: f64) -> Result<()> {
    match space {
        SpaceForm::S2xR if h.is_finite() && !(h > 0.0) => Err(Error::InvalidArgument(format!(
            "area function of S2xR needs H > 0, got {h}"
        ))),
        _ => space.check_existence(h),
    }
}

/// `F(a)` for `a = 4H² + κ`, written to avoid cancellation at both ends.
fn angle_term(space: SpaceForm, h: f64) -> (f64, f64) {
    let a = 4.0 * h * h + space.kappa_f64();
    let root = a.sqrt();
    let f = match space {
        // artanh(1/√a) = ln((√a + 1)/(2H)), and √a − 2H = 1/(√a + 2H)
        SpaceForm::S2xR => ((1.0 + 1.0 / (root + 2.0 * h)) / (2.0 * h)).ln_1p(),
        SpaceForm::H2xR => (1.0 / root).atan(),
    };
    (a, f)
}

fn area_unchecked(space: SpaceForm, h: f64) -> f64 {
    let (a, f) = angle_term(space, h);
    8.0 * PI * (1.0 / a + 4.0 * h * h / (a * a.sqrt()) * f)
}

/// Area of the rotational CMC sphere of mean curvature `h` in `S²×R`.
pub fn area_s2r(h: f64) -> Result<f64> {
    check_domain(SpaceForm::S2xR, h)?;
    Ok(area_unchecked(SpaceForm::S2xR, h))
}

/// Area of the rotational CMC sphere of mean curvature `h` in `H²×R`.
pub fn area_h2r(h: f64) -> Result<f64> {
    check_domain(SpaceForm::H2xR, h)?;
    Ok(area_unchecked(SpaceForm::H2xR, h))
}

fn d_area_dh_unchecked(space: SpaceForm, h: f64) -> f64 {
    let (a, f) = angle_term(space, h);
    let kappa = space.kappa_f64();
    let da = 4.0 * PI * (-3.0 / (a * a) + (3.0 * kappa - a) * f / (a * a * a.sqrt()));
    8.0 * h * da
}

/// Analytic `dA/dH`.
pub fn d_area_dh(space: SpaceForm, h: f64) -> Result<f64> {
    check_domain(space, h)?;
    Ok(d_area_dh_unchecked(space, h))
}

/// Richardson-extrapolated central difference of the closed-form area.
pub fn d_area_dh_numeric(space: SpaceForm, h: f64) -> Result<f64> {
    check_domain(space, h)?;
    let mut delta = 1e-3 * h;
    if space == SpaceForm::H2xR {
        delta = delta.min(0.25 * (h - 0.5));
    }
    let central =
        |d: f64| (area_unchecked(space, h + d) - area_unchecked(space, h - d)) / (2.0 * d);
    Ok((4.0 * central(0.5 * delta) - central(delta)) / 3.0)
}

/// Counts sign changes of `dA/dH` in `S²×R` on a log grid over `[1e-4, 1e3]`.
pub fn s2r_derivative_sign_changes(points: usize) -> usize {
    let (lo, hi) = (1e-4f64.ln(), 1e3f64.ln());
    let signs: Vec<bool> = (0..points)
        .map(|i| {
            let h = (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp();
            d_area_dh_unchecked(SpaceForm::S2xR, h) > 0.0
        })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// The unique zero of `dA/dH` in `S²×R`, by bisection to `1e-12`.
pub fn find_h0() -> Result<f64> {
    if s2r_derivative_sign_changes(400) != 1 {
        return Err(Error::Internal(
            "dA/dH in S2xR does not have exactly one sign change".into(),
        ));
    }
    let d = |h| d_area_dh_unchecked(SpaceForm::S2xR, h);
    let (mut lo, mut hi) = H0_BRACKET;
    if !(d(lo) > 0.0 && d(hi) < 0.0) {
        return Err(Error::Internal(format!(
            "dA/dH does not change sign on [{lo}, {hi}]"
        )));
    }
    while hi - lo > H0_TOL {
        let mid = 0.5 * (lo + hi);
        if d(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaRow {
    pub h: f64,
    pub area: f64,
    pub d_area_dh: f64,
    /// Sign prediction: `dA/dH ≤ 0`.
    pub stable: bool,
}

pub fn closed_form_sweep(space: SpaceForm, grid: &[f64]) -> Result<Vec<AreaRow>> {
    let f = AreaFunction::new(space);
    grid.iter()
        .map(|&h| {
            let d = f.derivative(h)?;
            Ok(AreaRow {
                h,
                area: f.area(h)?,
                d_area_dh: d,
                stable: d <= 0.0,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[AreaRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{}",
            r.h,
            r.area,
            r.d_area_dh,
            u8::from(r.stable)
        )?;
    }
    Ok(())
}
