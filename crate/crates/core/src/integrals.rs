//! Integrals over a rotational surface, evaluated by quadrature along the
//! generating curve (`dA = 2π ρ ds`).

use std::f64::consts::PI;

use crate::geometry::sectional_tangent;
use crate::profile::ProfileCurve;
use crate::quadrature;

fn surface_integral(
    profile: &ProfileCurve,
    density: impl Fn(&crate::profile::ProfileSample) -> f64,
) -> f64 {
    let values: Vec<f64> = profile
        .samples
        .iter()
        .map(|p| 2.0 * PI * p.rho * density(p))
        .collect();
    quadrature::uniform(&values, profile.step())
}

pub fn area_quadrature(profile: &ProfileCurve) -> f64 {
    surface_integral(profile, |_| 1.0)
}

/// Enclosed volume, sliced into horizontal geodesic disks:
/// `V = ∫ D_κ(r) dt = ∫ D_κ(r(s)) sin σ(s) ds`.
pub fn volume_quadrature(profile: &ProfileCurve) -> f64 {
    let space = profile.space;
    let values: Vec<f64> = profile
        .samples
        .iter()
        .map(|p| space.disk_area(p.r) * p.sigma.sin())
        .collect();
    quadrature::uniform(&values, profile.step())
}

/// `∫ (H² + K_s) dA`.
pub fn willmore_integral(profile: &ProfileCurve) -> f64 {
    let h2 = profile.h * profile.h;
    let space = profile.space;
    surface_integral(profile, |p| h2 + sectional_tangent(space, p.sigma))
}

/// `∫ K_Σ dA` with intrinsic curvature `K_Σ = k₁k₂ + K_s`.
pub fn gauss_bonnet_integral(profile: &ProfileCurve) -> f64 {
    let space = profile.space;
    surface_integral(profile, |p| p.k1 * p.k2 + sectional_tangent(space, p.sigma))
}
