//! Low spectrum of the Jacobi operator `L = Δ + |σ|² + Ric(N)` on rotational
//! surfaces, by separation into Fourier modes.
//!
//! Eigenvalues follow the convention `L g + λ g = 0`, so they are the
//! stationary values of the second variation and a rotational CMC sphere has
//! `λ₁ < 0`, `λ₂ = 0`. Modes `m ≥ 1` contribute each eigenvalue twice
//! (`cos mθ` and `sin mθ`).

mod mode;
pub mod tridiag;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::SpaceForm;
use crate::profile::{ProfileCurve, ProfileKind};

pub use mode::{build_mode_problem, eigensolve, ModeEigen, ModeProblem};

pub const DEFAULT_M_MAX: u32 = 8;
pub const DEFAULT_K_PER_MODE: usize = 4;
pub const DEFAULT_ZERO_TOL_FACTOR: f64 = 50.0;

pub const EIGENVALUE_CONVENTION: &str = "L g + lambda g = 0";

/// How close to zero an eigenvalue must be to count as a kernel element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ZeroTolerance {
    /// A multiple of the eigenvalue's own Richardson error estimate, floored
    /// at the round-off level of the mode operator.
    ErrorMultiple(f64),
    Absolute(f64),
}

impl Default for ZeroTolerance {
    fn default() -> Self {
        ZeroTolerance::ErrorMultiple(DEFAULT_ZERO_TOL_FACTOR)
    }
}

impl ZeroTolerance {
    fn validate(self) -> Result<Self> {
        let v = match self {
            ZeroTolerance::ErrorMultiple(v) | ZeroTolerance::Absolute(v) => v,
        };
        if v > 0.0 && v.is_finite() {
            Ok(self)
        } else {
            Err(Error::InvalidArgument(format!(
                "zero tolerance must be positive, got {v}"
            )))
        }
    }

    /// Threshold for the `i`-th eigenvalue of a mode.
    pub fn threshold(self, mode: &ModeEigen, i: usize) -> f64 {
        match self {
            ZeroTolerance::Absolute(v) => v,
            ZeroTolerance::ErrorMultiple(c) => {
                let roundoff = 16.0 * f64::EPSILON * mode.operator_norm;
                c * mode.error_estimates[i].unwrap_or(0.0).max(roundoff)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    #[serde(skip)]
    pub space: SpaceForm,
    #[serde(rename = "H")]
    pub h: f64,
    pub kappa: i32,
    pub convention: &'static str,
    pub lambda1: f64,
    pub lambda2: f64,
    pub kernel_dim: usize,
    pub negative_count: usize,
    /// Kernel elements per mode, multiplicity included.
    pub kernel_by_mode: BTreeMap<u32, usize>,
    /// Set when a rotational sphere does not show the expected 3-dimensional kernel.
    pub kernel_anomaly: bool,
    pub per_mode: BTreeMap<u32, Vec<f64>>,
    pub error_estimates: BTreeMap<u32, Vec<Option<f64>>>,
    pub zero_tolerance: ZeroTolerance,
    pub m_max: u32,
    pub n_samples: usize,
    /// Lowest eigenvalue of the first omitted mode, which certifies `λ₂`.
    pub certification_eigenvalue: f64,
    /// Mode-0 eigenvectors spanning the axisymmetric part of the kernel.
    #[serde(skip)]
    pub mode0_kernel: Vec<Vec<f64>>,
    #[serde(skip)]
    pub modes: Vec<ModeEigen>,
}

impl SpectrumResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("spectrum serializes")
    }
}

pub fn assemble_spectrum(
    profile: &ProfileCurve,
    m_max: u32,
    k_per_mode: usize,
    zero_tol: ZeroTolerance,
) -> Result<SpectrumResult> {
    assemble_spectrum_with(profile, m_max, k_per_mode, zero_tol, Execution::default())
}

/// Solves modes `0..=m_max + 1` (the last one only certifies the cut-off)
/// and merges them into the global spectrum.
pub fn assemble_spectrum_with(
    profile: &ProfileCurve,
    m_max: u32,
    k_per_mode: usize,
    zero_tol: ZeroTolerance,
    exec: Execution,
) -> Result<SpectrumResult> {
    if m_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "m_max must be at least 2, got {m_max}"
        )));
    }
    if k_per_mode == 0 {
        return Err(Error::InvalidArgument(
            "k_per_mode must be at least 1".into(),
        ));
    }
    let zero_tol = zero_tol.validate()?;

    let ms: Vec<u32> = (0..=m_max + 1).collect();
    let mut modes = exec
        .map(&ms, |&m| {
            let k = if m == m_max + 1 { 1 } else { k_per_mode };
            eigensolve(&build_mode_problem(profile, m)?, k)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let certifier = modes.pop().expect("certification mode");
    let cert_value = certifier.eigenvalues[0];
    let cert_tol = zero_tol.threshold(&certifier, 0);
    if !(cert_value > cert_tol) {
        return Err(Error::Certification {
            m_max,
            lowest: cert_value,
            tolerance: cert_tol,
        });
    }

    let mut global = Vec::new();
    let mut kernel_by_mode = BTreeMap::new();
    let mut negative_count = 0;
    let mut kernel_dim = 0;
    let mut mode0_kernel = Vec::new();
    for mode in &modes {
        let mult = if mode.m == 0 { 1 } else { 2 };
        for (i, &l) in mode.eigenvalues.iter().enumerate() {
            let tol = zero_tol.threshold(mode, i);
            if l.abs() <= tol {
                kernel_dim += mult;
                *kernel_by_mode.entry(mode.m).or_insert(0) += mult;
                if mode.m == 0 {
                    mode0_kernel.push(mode.eigenvectors[i].clone());
                }
            } else if l < 0.0 {
                negative_count += mult;
            }
            global.extend(std::iter::repeat_n(l, mult));
        }
    }
    global.sort_by(f64::total_cmp);

    Ok(SpectrumResult {
        space: profile.space,
        h: profile.h,
        kappa: profile.space.kappa(),
        convention: EIGENVALUE_CONVENTION,
        lambda1: global[0],
        lambda2: global.get(1).copied().unwrap_or(f64::NAN),
        kernel_dim,
        negative_count,
        kernel_anomaly: profile.kind == ProfileKind::RotationalSphere && kernel_dim != 3,
        kernel_by_mode,
        per_mode: modes.iter().map(|m| (m.m, m.eigenvalues.clone())).collect(),
        error_estimates: modes
            .iter()
            .map(|m| (m.m, m.error_estimates.clone()))
            .collect(),
        zero_tolerance: zero_tol,
        m_max,
        n_samples: profile.len(),
        certification_eigenvalue: cert_value,
        mode0_kernel,
        modes,
    })
}
