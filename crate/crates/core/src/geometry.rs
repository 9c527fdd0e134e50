//! Space-form trigonometry and ambient curvature of the product spaces
//! `S²×R` (κ = +1) and `H²×R` (κ = −1).
//!
//! For a surface of revolution whose generating curve makes angle `σ` with
//! the horizontal, the unit normal has horizontal part of length `|sin σ|`
//! and the tangent plane contains the horizontal parallel direction. In a
//! product `M²(κ)×R` this gives
//!
//! * `Ric(N) = κ sin²σ`
//! * `K_s(TΣ) = κ cos²σ`
//!
//! so that `Ric(N) + K_s = κ`, the (normalized) scalar curvature.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceForm {
    #[serde(rename = "s2xr")]
    S2xR,
    #[serde(rename = "h2xr")]
    H2xR,
}

impl SpaceForm {
    pub fn from_kappa(kappa: i32) -> Result<Self> {
        match kappa {
            1 => Ok(SpaceForm::S2xR),
            -1 => Ok(SpaceForm::H2xR),
            k => Err(Error::InvalidArgument(format!(
                "curvature sign must be +1 or -1, got {k}"
            ))),
        }
    }

    pub fn kappa(self) -> i32 {
        match self {
            SpaceForm::S2xR => 1,
            SpaceForm::H2xR => -1,
        }
    }

    pub fn kappa_f64(self) -> f64 {
        f64::from(self.kappa())
    }

    pub fn name(self) -> &'static str {
        match self {
            SpaceForm::S2xR => "S2xR",
            SpaceForm::H2xR => "H2xR",
        }
    }

    /// Infimum of the mean curvatures for which rotational CMC spheres exist.
    pub fn existence_threshold(self) -> f64 {
        match self {
            SpaceForm::S2xR => 0.0,
            SpaceForm::H2xR => 0.5,
        }
    }

    /// Checks that a rotational CMC sphere of mean curvature `h` exists.
    pub fn check_existence(self, h: f64) -> Result<()> {
        if !h.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "mean curvature must be finite, got {h}"
            )));
        }
        if h > self.existence_threshold() {
            Ok(())
        } else {
            Err(Error::NoSuchSphere {
                space: self.name(),
                h,
                threshold: match self {
                    SpaceForm::S2xR => "H > 0",
                    SpaceForm::H2xR => "H > 1/2",
                },
            })
        }
    }

    /// `sn_κ(r)` without domain checks.
    #[inline]
    pub(crate) fn sn(self, r: f64) -> f64 {
        match self {
            SpaceForm::S2xR => r.sin(),
            SpaceForm::H2xR => r.sinh(),
        }
    }

    /// `cs_κ(r) = sn_κ'(r)`.
    #[inline]
    pub(crate) fn cs(self, r: f64) -> f64 {
        match self {
            SpaceForm::S2xR => r.cos(),
            SpaceForm::H2xR => r.cosh(),
        }
    }

    /// `ct_κ(r) = cs_κ(r) / sn_κ(r)`, geodesic curvature of a circle of radius `r`.
    #[inline]
    pub(crate) fn ct(self, r: f64) -> f64 {
        self.cs(r) / self.sn(r)
    }

    /// Antiderivative of `sn_κ` vanishing at 0: `(1 − cs_κ(r)) / κ`.
    ///
    /// Written with half-angles to stay accurate for small `r`.
    #[inline]
    pub(crate) fn sn_antiderivative(self, r: f64) -> f64 {
        match self {
            SpaceForm::S2xR => 2.0 * (0.5 * r).sin().powi(2),
            SpaceForm::H2xR => 2.0 * (0.5 * r).sinh().powi(2),
        }
    }

    /// Area of the geodesic disk of radius `r` in the base surface.
    #[inline]
    pub(crate) fn disk_area(self, r: f64) -> f64 {
        2.0 * PI * self.sn_antiderivative(r)
    }
}

impl fmt::Display for SpaceForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `sn_κ(r)`: `sin r` on the sphere, `sinh r` on the hyperbolic plane.
pub fn sn_kappa(space: SpaceForm, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "geodesic radius must be nonnegative, got {r}"
        )));
    }
    if space == SpaceForm::S2xR && r > PI {
        return Err(Error::InvalidArgument(format!(
            "geodesic radius in S2 must not exceed pi, got {r}"
        )));
    }
    Ok(space.sn(r))
}

/// Ricci curvature of the ambient space on the unit normal of a rotational
/// surface whose profile has tangent angle `sigma`.
pub fn ricci_normal(space: SpaceForm, sigma: f64) -> f64 {
    space.kappa_f64() * sigma.sin().powi(2)
}

/// Sectional curvature of the ambient space on the tangent plane.
pub fn sectional_tangent(space: SpaceForm, sigma: f64) -> f64 {
    space.kappa_f64() * sigma.cos().powi(2)
}
