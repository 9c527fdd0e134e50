//! One Fourier mode of the Jacobi operator on a surface of revolution.
//!
//! With `u = f(s) e^{imθ}` the eigenproblem `L u + λ u = 0` separates into
//!
//! ```text
//! −(ρ f')'/ρ + (m²/ρ²) f − q f = λ f
//! ```
//!
//! in the `ρ ds` weighted inner product. The unknowns sit on the interior
//! profile samples (poles excluded) and the fluxes `ρ f'` on the midpoints
//! between them. Each node carries the mass `ρ h`, which makes the stiffness
//! matrix symmetric; at a pole the flux vanishes for `m = 0` (reflected
//! ghost node) and the pole value is pinned to zero for `m ≥ 1`.

use crate::error::{Error, Result};
use crate::profile::ProfileCurve;

use super::tridiag::SymTridiagonal;

#[derive(Debug, Clone, PartialEq)]
pub struct ModeProblem {
    pub m: u32,
    /// Arclength of the interior nodes.
    pub s: Vec<f64>,
    pub step: f64,
    pub rho: Vec<f64>,
    pub q: Vec<f64>,
    /// `m² / ρ²` at the nodes.
    pub centrifugal: Vec<f64>,
    /// `ρ` on the `n + 1` faces; entries 0 and n neighbour the poles.
    pub face_rho: Vec<f64>,
    /// Quadrature weight `ρ h` per node.
    pub mass: Vec<f64>,
    coarse: Option<Box<ModeProblem>>,
}

/// Discretizes mode `m` on the profile, together with a half-resolution
/// companion used for error estimates.
pub fn build_mode_problem(profile: &ProfileCurve, m: u32) -> Result<ModeProblem> {
    let mut fine = ModeProblem::single(profile, m)?;
    if let Ok(coarse_profile) = profile.coarsened() {
        if coarse_profile.len() >= 5 {
            fine.coarse = Some(Box::new(ModeProblem::single(&coarse_profile, m)?));
        }
    }
    Ok(fine)
}

impl ModeProblem {
    fn single(profile: &ProfileCurve, m: u32) -> Result<Self> {
        let n = profile.len();
        if n < 4 {
            return Err(Error::InvalidArgument(format!(
                "mode problem needs at least 4 profile samples, got {n}"
            )));
        }
        let interior = &profile.samples[1..n - 1];
        if let Some(p) = interior.iter().find(|p| !(p.rho > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "parallel radius vanishes off the poles (s = {})",
                p.s
            )));
        }
        let step = profile.step();
        let m2 = f64::from(m * m);
        let face_rho = profile
            .samples
            .windows(2)
            .map(|w| 0.5 * (w[0].rho + w[1].rho))
            .collect();
        Ok(Self {
            m,
            s: interior.iter().map(|p| p.s).collect(),
            step,
            rho: interior.iter().map(|p| p.rho).collect(),
            q: interior.iter().map(|p| p.q).collect(),
            centrifugal: interior.iter().map(|p| m2 / (p.rho * p.rho)).collect(),
            face_rho,
            mass: interior.iter().map(|p| p.rho * step).collect(),
            coarse: None,
        })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn coarse(&self) -> Option<&ModeProblem> {
        self.coarse.as_deref()
    }

    /// Flux conductances `ρ_face / h` at the left and right of node `j`.
    fn conductances(&self, j: usize) -> (f64, f64) {
        let n = self.len();
        let pinned = self.m > 0;
        let left = if j > 0 || pinned {
            self.face_rho[j] / self.step
        } else {
            0.0
        };
        let right = if j + 1 < n || pinned {
            self.face_rho[j + 1] / self.step
        } else {
            0.0
        };
        (left, right)
    }

    /// Symmetric stiffness matrix `K`, with `K f = λ M f`.
    pub fn stiffness(&self) -> SymTridiagonal {
        let n = self.len();
        let diag = (0..n)
            .map(|j| {
                let (l, r) = self.conductances(j);
                l + r + self.mass[j] * (self.centrifugal[j] - self.q[j])
            })
            .collect();
        let off = (0..n - 1)
            .map(|j| -self.face_rho[j + 1] / self.step)
            .collect();
        SymTridiagonal::new(diag, off)
    }

    /// `M^{-1/2} K M^{-1/2}`, acting on `g = √(ρh) f`.
    pub fn symmetrized(&self) -> SymTridiagonal {
        let k = self.stiffness();
        let w: Vec<f64> = self.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
        SymTridiagonal::new(
            k.diag.iter().zip(&w).map(|(d, wi)| d * wi * wi).collect(),
            k.off
                .iter()
                .enumerate()
                .map(|(i, o)| o * w[i] * w[i + 1])
                .collect(),
        )
    }

    /// Discrete `−L_m f = −(ρ f')'/ρ + (m²/ρ²) f − q f` at the nodes.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let k = self.stiffness();
        k.mul(f)
            .iter()
            .zip(&self.mass)
            .map(|(v, m)| v / m)
            .collect()
    }

    /// `∫ f ρ ds` by the node weights.
    pub fn weighted_sum(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.mass).map(|(a, w)| a * w).sum()
    }

    /// `∫ f g ρ ds`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter()
            .zip(g)
            .zip(&self.mass)
            .map(|((a, b), w)| a * b * w)
            .sum()
    }
}

/// Eigenpairs of one mode, ascending, with eigenvectors normalized in the
/// `ρ`-weighted norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeEigen {
    pub m: u32,
    pub eigenvalues: Vec<f64>,
    /// Richardson estimate `|λ_h − λ_2h| / (r² − 1)`, when a coarse grid exists.
    pub error_estimates: Vec<Option<f64>>,
    pub eigenvectors: Vec<Vec<f64>>,
    /// Bound on `‖M^{-1/2} K M^{-1/2}‖`, sets the round-off level.
    pub operator_norm: f64,
}

fn solve_pairs(problem: &ModeProblem, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>, f64)> {
    let b = problem.symmetrized();
    let values = b.lowest_eigenvalues(k);
    let vectors = values
        .iter()
        .map(|&l| {
            let g = b.eigenvector(l).map_err(|e| match e {
                Error::Numerical(msg) => Error::Numerical(format!("mode {}: {msg}", problem.m)),
                other => other,
            })?;
            let mut f: Vec<f64> = g
                .iter()
                .zip(&problem.mass)
                .map(|(gi, w)| gi / w.sqrt())
                .collect();
            let pivot = f
                .iter()
                .copied()
                .fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
            if pivot < 0.0 {
                f.iter_mut().for_each(|v| *v = -*v);
            }
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((values, vectors, b.norm_bound()))
}

/// The `k` lowest eigenpairs of the mode problem.
pub fn eigensolve(problem: &ModeProblem, k: usize) -> Result<ModeEigen> {
    if k == 0 || k >= problem.len() {
        return Err(Error::InvalidArgument(format!(
            "requested {k} eigenvalues from a grid of {} nodes",
            problem.len()
        )));
    }
    let (eigenvalues, eigenvectors, operator_norm) = solve_pairs(problem, k)?;
    let error_estimates = match problem.coarse() {
        Some(coarse) if k < coarse.len() => {
            let values = coarse.symmetrized().lowest_eigenvalues(k);
            let ratio = coarse.step / problem.step;
            eigenvalues
                .iter()
                .zip(values)
                .map(|(f, c)| Some((f - c).abs() / (ratio * ratio - 1.0)))
                .collect()
        }
        _ => vec![None; k],
    };
    Ok(ModeEigen {
        m: problem.m,
        eigenvalues,
        error_estimates,
        eigenvectors,
        operator_norm,
    })
}
