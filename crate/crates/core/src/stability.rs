//! Volume-constrained stability of rotational CMC spheres by Koiso's
//! criterion.
//!
//! When the Jacobi operator has exactly one negative eigenvalue, `λ₂ = 0`,
//! and every kernel function has zero mean, the sphere is stable iff the
//! unique `u ⊥ ker L` with `L u = 1` has `∫ u dA ≥ 0`. The source `1` is
//! axisymmetric and `L` preserves Fourier modes, so `u` is found in the
//! `m = 0` sector, orthogonal to the `m = 0` part of the kernel; the `m = 1`
//! kernel pair is orthogonal to it automatically.
//!
//! Along the family of spheres, the normal speed `v` of `H ↦ Σ_H` satisfies
//! `L v = 2` and `dA/dH = −2H ∫ v`, which gives the cross-check
//! `∫ u dA = −(dA/dH) / (4H)` against the closed-form area.

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::Serialize;

use crate::closedform::d_area_dh;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::SpaceForm;
use crate::profile::{generate_profile, horizontal_slice, ProfileCurve};
use crate::spectrum::{
    self, assemble_spectrum_with, build_mode_problem, eigensolve, tridiag::Tridiagonal,
    ModeProblem, SpectrumResult, ZeroTolerance,
};

pub const DEFAULT_SAMPLES: usize = 2001;
pub const DEFAULT_VERDICT_FACTOR: f64 = 100.0;
/// Relative bound on `|∫ g dA| / (‖g‖ √A)` for kernel functions `g`.
pub const KERNEL_MEAN_TOL: f64 = 1e-6;

/// CSV header of [`write_sweep_csv`].
pub const SWEEP_CSV_HEADER: &str = "H,verdict,lambda1,lambda2,u_integral,dAdH,consistency_residual";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
    /// `|∫ u dA|` is below the numerical tolerance; the sign is not trusted.
    Marginal,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "Stable",
            Verdict::Unstable => "Unstable",
            Verdict::Marginal => "Marginal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KoisoConfig {
    pub n_samples: usize,
    pub m_max: u32,
    pub k_per_mode: usize,
    pub zero_tol: ZeroTolerance,
    /// The verdict tolerance is this multiple of the error estimate of `∫ u`.
    pub verdict_factor: f64,
    pub exec: Execution,
}

impl Default for KoisoConfig {
    fn default() -> Self {
        Self {
            n_samples: DEFAULT_SAMPLES,
            m_max: spectrum::DEFAULT_M_MAX,
            k_per_mode: spectrum::DEFAULT_K_PER_MODE,
            zero_tol: ZeroTolerance::default(),
            verdict_factor: DEFAULT_VERDICT_FACTOR,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub space: SpaceForm,
    pub kappa: i32,
    #[serde(rename = "H")]
    pub h: f64,
    pub verdict: Verdict,
    pub lambda1: f64,
    pub lambda2: f64,
    pub negative_count: usize,
    pub kernel_dim: usize,
    /// `∫ u dA`, Richardson-extrapolated over two grids.
    pub u_integral: Option<f64>,
    pub u_integral_error: Option<f64>,
    /// Threshold below which the verdict is `Marginal`.
    pub verdict_tolerance: Option<f64>,
    #[serde(rename = "dAdH")]
    pub d_area_dh: Option<f64>,
    /// `|∫ u dA + (dA/dH)/(4H)|`.
    pub consistency_residual: Option<f64>,
    /// `∫ g dA` for each axisymmetric kernel function, `g` of unit weighted norm.
    pub kernel_means: Vec<f64>,
    pub n_samples: usize,
}

impl StabilityVerdict {
    pub fn relative_consistency(&self) -> Option<f64> {
        let scale = (self.d_area_dh? / (4.0 * self.h)).abs();
        Some(self.consistency_residual? / scale)
    }
}

/// Solution of `L u = 1` in the axisymmetric sector.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisymmetricSolution {
    /// Arclength of the interior nodes carrying `values`.
    pub s: Vec<f64>,
    pub values: Vec<f64>,
    /// `∫ u dA`.
    pub integral: f64,
    /// Lagrange multipliers of the orthogonality constraints; `L u = 1 + Σ μᵢ gᵢ`.
    pub multipliers: Vec<f64>,
}

/// Solves `L u = 1` with `u` orthogonal to the axisymmetric kernel functions
/// supplied by the spectrum.
pub fn solve_lu_equals_one(
    profile: &ProfileCurve,
    spectrum: &SpectrumResult,
) -> Result<AxisymmetricSolution> {
    let problem = build_mode_problem(profile, 0)?;
    if spectrum.mode0_kernel.is_empty() {
        return Err(Error::Numerical(
            "spectrum has no axisymmetric kernel function to constrain against".into(),
        ));
    }
    if spectrum
        .mode0_kernel
        .iter()
        .any(|g| g.len() != problem.len())
    {
        return Err(Error::Numerical(
            "kernel basis was computed on a different grid".into(),
        ));
    }
    constrained_solve(&problem, &spectrum.mode0_kernel)
}

/// Saddle-point solve of `[K W; Wᵀ 0][u; μ] = [−M1; 0]` with `W = M G` by
/// block elimination.
fn constrained_solve(problem: &ModeProblem, kernel: &[Vec<f64>]) -> Result<AxisymmetricSolution> {
    let k = problem.stiffness();
    let system = Tridiagonal {
        sub: k.off.clone(),
        diag: k.diag.clone(),
        sup: k.off.clone(),
    };
    let singular = || Error::Numerical("axisymmetric Jacobi operator is exactly singular".into());
    let rhs: Vec<f64> = problem.mass.iter().map(|m| -m).collect();
    let base = system.solve(&rhs).ok_or_else(singular)?;
    let constraints: Vec<Vec<f64>> = kernel
        .iter()
        .map(|g| g.iter().zip(&problem.mass).map(|(a, m)| a * m).collect())
        .collect();
    let responses = constraints
        .iter()
        .map(|w| system.solve(w).ok_or_else(singular))
        .collect::<Result<Vec<_>>>()?;

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let p = kernel.len();
    let schur: Vec<Vec<f64>> = (0..p)
        .map(|i| {
            (0..p)
                .map(|j| dot(&constraints[i], &responses[j]))
                .collect()
        })
        .collect();
    let reduced: Vec<f64> = constraints.iter().map(|w| dot(w, &base)).collect();
    let multipliers = solve_dense(schur, reduced)
        .ok_or_else(|| Error::Numerical("singular constraint block in Lu = 1 solve".into()))?;

    let mut values = base;
    for (mu, x) in multipliers.iter().zip(&responses) {
        values.iter_mut().zip(x).for_each(|(u, xi)| *u -= mu * xi);
    }
    // strip round-off along the kernel
    for g in kernel {
        let c = problem.inner(g, &values) / problem.inner(g, g);
        values.iter_mut().zip(g).for_each(|(u, gi)| *u -= c * gi);
    }
    if !values.iter().all(|v| v.is_finite()) {
        return Err(Error::Numerical("non-finite solution of Lu = 1".into()));
    }
    Ok(AxisymmetricSolution {
        s: problem.s.clone(),
        integral: 2.0 * PI * problem.weighted_sum(&values),
        values,
        multipliers,
    })
}

/// Small dense solve by Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col].clone();
            a[row]
                .iter_mut()
                .zip(&pivot_row)
                .skip(col)
                .for_each(|(x, p)| *x -= f * p);
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// `∫ g dA / (‖g‖ √A)` for each axisymmetric kernel function.
fn kernel_means(problem: &ModeProblem, kernel: &[Vec<f64>]) -> Vec<f64> {
    let area = 2.0 * PI * problem.mass.iter().sum::<f64>();
    kernel
        .iter()
        .map(|g| {
            let mean = 2.0 * PI * problem.weighted_sum(g);
            let norm = (2.0 * PI * problem.inner(g, g)).sqrt();
            mean / (norm * area.sqrt())
        })
        .collect()
}

pub fn koiso_classify(space: SpaceForm, h: f64) -> Result<StabilityVerdict> {
    koiso_classify_with(space, h, &KoisoConfig::default())
}

pub fn koiso_classify_with(
    space: SpaceForm,
    h: f64,
    cfg: &KoisoConfig,
) -> Result<StabilityVerdict> {
    if space == SpaceForm::S2xR && h == 0.0 {
        return classify_slice(cfg);
    }
    let profile = generate_profile(space, h, cfg.n_samples)?;
    let spectrum =
        assemble_spectrum_with(&profile, cfg.m_max, cfg.k_per_mode, cfg.zero_tol, cfg.exec)?;

    if spectrum.negative_count != 1 || spectrum.kernel_dim == 0 {
        return Err(Error::HypothesisViolation {
            hypothesis: "i: lambda1 < 0 and lambda2 = 0",
            details: format!(
                "H = {h}: negative_count = {}, kernel_dim = {}, lambda1 = {:e}, lambda2 = {:e}",
                spectrum.negative_count, spectrum.kernel_dim, spectrum.lambda1, spectrum.lambda2
            ),
        });
    }

    let fine_problem = build_mode_problem(&profile, 0)?;
    let means = kernel_means(&fine_problem, &spectrum.mode0_kernel);
    if let Some(worst) = means.iter().copied().find(|m| m.abs() > KERNEL_MEAN_TOL) {
        return Err(Error::HypothesisViolation {
            hypothesis: "ii: kernel functions have zero mean",
            details: format!("H = {h}: normalized mean {worst:e} exceeds {KERNEL_MEAN_TOL:e}"),
        });
    }

    let fine = constrained_solve(&fine_problem, &spectrum.mode0_kernel)?;
    let coarse_problem = fine_problem
        .coarse()
        .ok_or_else(|| Error::Internal("no coarse grid for the error estimate".into()))?;
    let coarse_eigen = eigensolve(
        coarse_problem,
        cfg.k_per_mode.max(spectrum.mode0_kernel.len() + 1),
    )?;
    let mut order: Vec<usize> = (0..coarse_eigen.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        coarse_eigen.eigenvalues[a]
            .abs()
            .total_cmp(&coarse_eigen.eigenvalues[b].abs())
    });
    let coarse_kernel: Vec<Vec<f64>> = order[..spectrum.mode0_kernel.len()]
        .iter()
        .map(|&i| coarse_eigen.eigenvectors[i].clone())
        .collect();
    let coarse = constrained_solve(coarse_problem, &coarse_kernel)?;

    let ratio = coarse_problem.step / fine_problem.step;
    let correction = (fine.integral - coarse.integral) / (ratio * ratio - 1.0);
    let integral = fine.integral + correction;
    let error = correction.abs();
    let area = 2.0 * PI * fine_problem.mass.iter().sum::<f64>();
    let tolerance = (cfg.verdict_factor * error).max(1e-12 * area * area);

    let verdict = if integral >= tolerance {
        Verdict::Stable
    } else if integral <= -tolerance {
        Verdict::Unstable
    } else {
        Verdict::Marginal
    };
    let d_area = d_area_dh(space, h)?;

    Ok(StabilityVerdict {
        space,
        kappa: space.kappa(),
        h,
        verdict,
        lambda1: spectrum.lambda1,
        lambda2: spectrum.lambda2,
        negative_count: spectrum.negative_count,
        kernel_dim: spectrum.kernel_dim,
        u_integral: Some(integral),
        u_integral_error: Some(error),
        verdict_tolerance: Some(tolerance),
        d_area_dh: Some(d_area),
        consistency_residual: Some((integral + d_area / (4.0 * h)).abs()),
        kernel_means: means,
        n_samples: cfg.n_samples,
    })
}

/// Horizontal slices: `L = Δ` has `λ₁ = 0` and no negative direction, so
/// they are stable without any constraint.
fn classify_slice(cfg: &KoisoConfig) -> Result<StabilityVerdict> {
    let profile = horizontal_slice(cfg.n_samples)?;
    let spectrum =
        assemble_spectrum_with(&profile, cfg.m_max, cfg.k_per_mode, cfg.zero_tol, cfg.exec)?;
    if spectrum.negative_count != 0 {
        return Err(Error::Internal(format!(
            "horizontal slice shows {} negative eigenvalues",
            spectrum.negative_count
        )));
    }
    Ok(StabilityVerdict {
        space: SpaceForm::S2xR,
        kappa: 1,
        h: 0.0,
        verdict: Verdict::Stable,
        lambda1: spectrum.lambda1,
        lambda2: spectrum.lambda2,
        negative_count: 0,
        kernel_dim: spectrum.kernel_dim,
        u_integral: None,
        u_integral_error: None,
        verdict_tolerance: None,
        d_area_dh: None,
        consistency_residual: None,
        kernel_means: Vec::new(),
        n_samples: cfg.n_samples,
    })
}

/// Classifies every grid point; results are in grid order.
pub fn stability_sweep(space: SpaceForm, grid: &[f64]) -> Vec<Result<StabilityVerdict>> {
    stability_sweep_with(space, grid, &KoisoConfig::default())
}

pub fn stability_sweep_with(
    space: SpaceForm,
    grid: &[f64],
    cfg: &KoisoConfig,
) -> Vec<Result<StabilityVerdict>> {
    let inner = KoisoConfig {
        exec: Execution::Sequential,
        ..*cfg
    };
    cfg.exec
        .map(grid, |&h| koiso_classify_with(space, h, &inner))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    pub from: Verdict,
    pub to: Verdict,
    /// Grid points bracketing the change.
    pub bracket: (f64, f64),
}

/// Changes between consecutive decided verdicts; `Marginal` points are
/// absorbed into the bracket.
pub fn verdict_transitions(verdicts: &[StabilityVerdict]) -> Vec<Transition> {
    let decided: Vec<&StabilityVerdict> = verdicts
        .iter()
        .filter(|v| v.verdict != Verdict::Marginal)
        .collect();
    decided
        .windows(2)
        .filter(|w| w[0].verdict != w[1].verdict)
        .map(|w| Transition {
            from: w[0].verdict,
            to: w[1].verdict,
            bracket: (w[0].h, w[1].h),
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(verdicts: &[StabilityVerdict], mut out: W) -> io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for v in verdicts {
        writeln!(
            out,
            "{:.16e},{},{:.16e},{:.16e},{},{},{}",
            v.h,
            v.verdict.as_str(),
            v.lambda1,
            v.lambda2,
            opt(v.u_integral),
            opt(v.d_area_dh),
            opt(v.consistency_residual)
        )?;
    }
    Ok(())
}
