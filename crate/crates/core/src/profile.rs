//! Generating curves of rotational CMC spheres.
//!
//! The profile lives in a vertical geodesic plane `Γ×R`, which is flat, and is
//! parameterized by arclength `s` with state `(r, t, σ)`:
//!
//! ```text
//! r' = cos σ,   t' = sin σ,   σ' = k₁
//! ```
//!
//! where `r` is the distance to the rotation axis, `t` the height and `σ` the
//! tangent angle. The CMC condition `k₁ + k₂ = 2H` with `k₂ = sin σ ct_κ(r)` has
//! the first integral `sin σ sn_κ(r) = 2H (1 − cs_κ(r))/κ`, i.e.
//! `sin σ = 2H tn_κ(r/2)`. Eliminating `r` from `k₂` with it gives the regular
//! autonomous equation
//!
//! ```text
//! σ' = H + κ sin²σ / (4H)
//! ```
//!
//! which is what the integrator advances. It has no pole singularity, and its
//! period gives the total length `2π / √(4H² + κ)` in closed form. The
//! singular form `σ' = 2H − sin σ ct_κ(r)` and the first integral are kept as
//! drift monitors ([`ProfileCurve::cmc_residual`],
//! [`ProfileCurve::first_integral_drift`]).

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::geometry::SpaceForm;

pub const MIN_SAMPLES: usize = 16;

/// CSV header of [`ProfileCurve::write_csv`].
pub const CSV_HEADER: &str = "s,r,t,sigma,k1,k2,rho,q";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub s: f64,
    pub r: f64,
    pub t: f64,
    pub sigma: f64,
    /// Principal curvature along the profile.
    pub k1: f64,
    /// Principal curvature along the parallel.
    pub k2: f64,
    /// Radius of the parallel, `sn_κ(r)`.
    pub rho: f64,
    /// Jacobi potential `|σ|² + Ric(N)`.
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    RotationalSphere,
    HorizontalSlice,
    /// Built from caller-supplied samples; cannot be regenerated.
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub space: SpaceForm,
    pub h: f64,
    pub kind: ProfileKind,
    pub samples: Vec<ProfileSample>,
    pub total_length: f64,
}

/// Total arclength of the generating curve.
pub fn total_length(space: SpaceForm, h: f64) -> f64 {
    2.0 * PI / (4.0 * h * h + space.kappa_f64()).sqrt()
}

fn sigma_rate(kappa: f64, h: f64, sigma: f64) -> f64 {
    h + kappa * sigma.sin().powi(2) / (4.0 * h)
}

fn sample_at(space: SpaceForm, h: f64, s: f64, r: f64, t: f64, sigma: f64) -> ProfileSample {
    let kappa = space.kappa_f64();
    let k1 = sigma_rate(kappa, h, sigma);
    let k2 = 2.0 * h - k1;
    ProfileSample {
        s,
        r,
        t,
        sigma,
        k1,
        k2,
        rho: space.sn(r),
        q: k1 * k1 + k2 * k2 + kappa * sigma.sin().powi(2),
    }
}

/// Generates the profile of the rotational CMC sphere of mean curvature `h`
/// with `n_samples` uniformly spaced samples from the bottom pole to the top.
///
/// Fixed-step classical Runge–Kutta from the bottom pole; the height is
/// shifted afterwards so the equator sits at `t = 0`.
pub fn generate_profile(space: SpaceForm, h: f64, n_samples: usize) -> Result<ProfileCurve> {
    space.check_existence(h)?;
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "profile needs at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    let kappa = space.kappa_f64();
    let length = total_length(space, h);
    let step = length / (n_samples - 1) as f64;

    let rhs = |y: [f64; 3]| -> [f64; 3] {
        let (sin, cos) = y[2].sin_cos();
        [cos, sin, h + kappa * sin * sin / (4.0 * h)]
    };
    let axpy =
        |y: [f64; 3], a: f64, k: [f64; 3]| [y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2]];

    let mut states = Vec::with_capacity(n_samples);
    let mut y = [0.0; 3];
    states.push(y);
    for _ in 1..n_samples {
        let k1 = rhs(y);
        let k2 = rhs(axpy(y, 0.5 * step, k1));
        let k3 = rhs(axpy(y, 0.5 * step, k2));
        let k4 = rhs(axpy(y, step, k3));
        for i in 0..3 {
            y[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        states.push(y);
    }

    let t_shift = 0.5 * (states[0][1] + states[n_samples - 1][1]);
    let samples = states
        .iter()
        .enumerate()
        .map(|(i, st)| {
            // the top pole lands on r = 0 up to integration error
            let r = st[0].max(0.0);
            sample_at(space, h, i as f64 * step, r, st[1] - t_shift, st[2])
        })
        .collect();

    Ok(ProfileCurve {
        space,
        h,
        kind: ProfileKind::RotationalSphere,
        samples,
        total_length: length,
    })
}

/// A horizontal slice `S²×{0}` written as a surface of revolution: the
/// generating curve is a meridian from a point to its antipode.
pub fn horizontal_slice(n_samples: usize) -> Result<ProfileCurve> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "profile needs at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    let step = PI / (n_samples - 1) as f64;
    let samples = (0..n_samples)
        .map(|i| {
            let s = if i + 1 == n_samples {
                PI
            } else {
                i as f64 * step
            };
            ProfileSample {
                s,
                r: s,
                t: 0.0,
                sigma: 0.0,
                k1: 0.0,
                k2: 0.0,
                rho: if i + 1 == n_samples { 0.0 } else { s.sin() },
                q: 0.0,
            }
        })
        .collect();
    Ok(ProfileCurve {
        space: SpaceForm::S2xR,
        h: 0.0,
        kind: ProfileKind::HorizontalSlice,
        samples,
        total_length: PI,
    })
}

impl ProfileCurve {
    /// Wraps caller-supplied samples, which must be uniformly spaced in `s`
    /// starting at 0.
    pub fn from_samples(space: SpaceForm, h: f64, samples: Vec<ProfileSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidArgument(
                "a profile needs at least 2 samples".into(),
            ));
        }
        let total_length = samples[samples.len() - 1].s - samples[0].s;
        if samples[0].s != 0.0 || !(total_length > 0.0) {
            return Err(Error::InvalidArgument(
                "profile samples must start at s = 0 and increase".into(),
            ));
        }
        let step = total_length / (samples.len() - 1) as f64;
        for (i, p) in samples.iter().enumerate() {
            if (p.s - i as f64 * step).abs() > 1e-9 * total_length {
                return Err(Error::InvalidArgument(format!(
                    "profile samples must be uniformly spaced (sample {i} at s = {})",
                    p.s
                )));
            }
        }
        Ok(Self {
            space,
            h,
            kind: ProfileKind::Custom,
            samples,
            total_length,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Uniform arclength spacing.
    pub fn step(&self) -> f64 {
        self.total_length / (self.samples.len() - 1) as f64
    }

    pub fn r_max(&self) -> f64 {
        self.samples.iter().map(|p| p.r).fold(f64::MIN, f64::max)
    }

    /// Every other sample, when the number of intervals is even.
    pub fn subsampled(&self) -> Option<ProfileCurve> {
        let n = self.samples.len();
        if n < 3 || !(n - 1).is_multiple_of(2) {
            return None;
        }
        Some(ProfileCurve {
            samples: self.samples.iter().step_by(2).copied().collect(),
            ..self.clone()
        })
    }

    /// The same surface rebuilt with a different sample count.
    pub fn resampled(&self, n_samples: usize) -> Result<ProfileCurve> {
        match self.kind {
            ProfileKind::RotationalSphere => generate_profile(self.space, self.h, n_samples),
            ProfileKind::HorizontalSlice => horizontal_slice(n_samples),
            ProfileKind::Custom => Err(Error::InvalidArgument(
                "custom profiles cannot be resampled".into(),
            )),
        }
    }

    /// A grid with roughly half the resolution: exact subsampling when
    /// possible, regeneration otherwise.
    pub fn coarsened(&self) -> Result<ProfileCurve> {
        match self.subsampled() {
            Some(p) => Ok(p),
            None => self.resampled(self.samples.len().div_ceil(2)),
        }
    }

    /// Largest `|k₁ + sin σ ct_κ(r) − 2H|` over the samples off the poles,
    /// i.e. the residual of the singular form of the CMC equation.
    pub fn cmc_residual(&self) -> f64 {
        let n = self.samples.len();
        self.samples[1..n.saturating_sub(1)]
            .iter()
            .map(|p| (p.k1 + p.sigma.sin() * self.space.ct(p.r) - 2.0 * self.h).abs())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from `sin σ sn_κ(r) = 2H ∫₀ʳ sn_κ`.
    pub fn first_integral_drift(&self) -> f64 {
        self.samples
            .iter()
            .map(|p| {
                (p.sigma.sin() * self.space.sn(p.r)
                    - 2.0 * self.h * self.space.sn_antiderivative(p.r))
                .abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for p in &self.samples {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.s, p.r, p.t, p.sigma, p.k1, p.k2, p.rho, p.q
            )?;
        }
        Ok(())
    }
}

/// Error estimate of the integrator from one step halving: the largest
/// state difference at shared nodes, scaled by the fourth-order factor 1/15.
pub fn step_halving_estimate(space: SpaceForm, h: f64, n_samples: usize) -> Result<f64> {
    let coarse = generate_profile(space, h, n_samples)?;
    let fine = generate_profile(space, h, 2 * n_samples - 1)?;
    let diff = coarse
        .samples
        .iter()
        .zip(fine.samples.iter().step_by(2))
        .map(|(a, b)| {
            (a.r - b.r)
                .abs()
                .max((a.t - b.t).abs())
                .max((a.sigma - b.sigma).abs())
        })
        .fold(0.0, f64::max);
    Ok(diff / 15.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    /// Independent shooting oracle: integrates the singular CMC equation
    /// `σ' = 2H − sin σ ct_κ(r)` from a series start near the pole with many
    /// small RK4 steps, until σ crosses π/2. Returns r at the crossing.
    fn shooting_r_max(space: SpaceForm, h: f64) -> f64 {
        let f = |y: [f64; 2]| [y[1].cos(), 2.0 * h - y[1].sin() * space.ct(y[0])];
        let s0 = 1e-4;
        let mut y = [s0, h * s0];
        let ds = 1e-5;
        loop {
            let k1 = f(y);
            let k2 = f([y[0] + 0.5 * ds * k1[0], y[1] + 0.5 * ds * k1[1]]);
            let k3 = f([y[0] + 0.5 * ds * k2[0], y[1] + 0.5 * ds * k2[1]]);
            let k4 = f([y[0] + ds * k3[0], y[1] + ds * k3[1]]);
            let next = [
                y[0] + ds / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                y[1] + ds / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            ];
            if next[1] >= FRAC_PI_2 {
                // linear interpolation to the crossing
                let w = (FRAC_PI_2 - y[1]) / (next[1] - y[1]);
                return y[0] + w * (next[0] - y[0]);
            }
            y = next;
        }
    }

    #[test]
    fn shooting_oracle_values() {
        // frozen against closed forms 2 atan(1/2H) and 2 artanh(1/2H)
        assert!((shooting_r_max(SpaceForm::S2xR, 0.5) - FRAC_PI_2).abs() < 1e-6);
        assert!(
            (shooting_r_max(SpaceForm::H2xR, 0.5_f64.sqrt()) - 1.762_747_174_039_086).abs() < 1e-6
        );
    }

    #[test]
    fn r_max_examples() {
        let p = generate_profile(SpaceForm::S2xR, 0.5, 2001).unwrap();
        assert!((p.r_max() - FRAC_PI_2).abs() < 1e-9);
        let p = generate_profile(SpaceForm::H2xR, 0.5_f64.sqrt(), 2001).unwrap();
        assert!((p.r_max() - 1.762_747_174_039_086).abs() < 1e-9);
    }

    #[test]
    fn existence_errors() {
        let err = generate_profile(SpaceForm::H2xR, 0.4, 100).unwrap_err();
        assert!(matches!(err, Error::NoSuchSphere { .. }));
        assert!(err.to_string().contains("H > 1/2"));
        assert!(matches!(
            generate_profile(SpaceForm::S2xR, 0.0, 100),
            Err(Error::NoSuchSphere { .. })
        ));
        assert!(matches!(
            generate_profile(SpaceForm::S2xR, 0.5, 15),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn closes_at_poles() {
        for (space, h) in [
            (SpaceForm::S2xR, 0.1),
            (SpaceForm::S2xR, 2.0),
            (SpaceForm::H2xR, 0.6),
        ] {
            let p = generate_profile(space, h, 1001).unwrap();
            let last = p.samples.last().unwrap();
            assert!(last.r.abs() < 1e-8, "{space} {h}: r(S) = {}", last.r);
            assert!((last.sigma - PI).abs() < 1e-8);
            assert_eq!(p.samples[0].sigma, 0.0);
            assert!((p.samples[0].k1 - h).abs() < 1e-15);
            assert!((last.k2 - h).abs() < 1e-9);
        }
    }

    #[test]
    fn drift_monitors_are_small() {
        for (space, h) in [
            (SpaceForm::S2xR, 0.5),
            (SpaceForm::S2xR, 0.1),
            (SpaceForm::H2xR, 1.0),
        ] {
            let p = generate_profile(space, h, 2001).unwrap();
            assert!(
                p.cmc_residual() < 1e-10,
                "{space} {h}: {}",
                p.cmc_residual()
            );
            assert!(p.first_integral_drift() < 1e-11);
        }
    }

    #[test]
    fn single_maximum_of_r_at_equator() {
        let p = generate_profile(SpaceForm::S2xR, 0.3, 1001).unwrap();
        let imax = (0..p.len())
            .max_by(|&a, &b| p.samples[a].r.total_cmp(&p.samples[b].r))
            .unwrap();
        assert_eq!(imax, 500);
        assert!((p.samples[imax].sigma - FRAC_PI_2).abs() < 1e-10);
        assert!(p.samples[..=imax].windows(2).all(|w| w[1].r > w[0].r));
        assert!(p.samples[imax..].windows(2).all(|w| w[1].r < w[0].r));
    }

    #[test]
    fn integrator_is_fourth_order() {
        let e1 = step_halving_estimate(SpaceForm::S2xR, 0.5, 101).unwrap();
        let e2 = step_halving_estimate(SpaceForm::S2xR, 0.5, 201).unwrap();
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn slice_profile() {
        let p = horizontal_slice(101).unwrap();
        assert_eq!(p.h, 0.0);
        assert!(p.samples.iter().all(|s| s.q == 0.0 && s.k1 == 0.0));
        assert!((p.samples[50].rho - 1.0).abs() < 1e-15);
        assert!(horizontal_slice(8).is_err());
    }

    #[test]
    fn csv_format() {
        let p = generate_profile(SpaceForm::S2xR, 0.5, 16).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 17);
        let fields: Vec<f64> = lines[5].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(fields.len(), 8);
        assert_eq!(fields[1], p.samples[4].r);
        assert_eq!(fields[7], p.samples[4].q);
    }

    #[test]
    fn subsample_and_coarsen() {
        let p = generate_profile(SpaceForm::S2xR, 0.5, 101).unwrap();
        let c = p.coarsened().unwrap();
        assert_eq!(c.len(), 51);
        assert!((c.step() - 2.0 * p.step()).abs() < 1e-15);
        let p = generate_profile(SpaceForm::S2xR, 0.5, 100).unwrap();
        assert!(p.subsampled().is_none());
        assert_eq!(p.coarsened().unwrap().len(), 50);
    }

    #[test]
    fn custom_profile_validation() {
        let p = generate_profile(SpaceForm::S2xR, 0.5, 16).unwrap();
        let custom = ProfileCurve::from_samples(SpaceForm::S2xR, 0.5, p.samples.clone()).unwrap();
        assert_eq!(custom.kind, ProfileKind::Custom);
        assert!(custom.resampled(20).is_err());
        let mut bad = p.samples.clone();
        bad[3].s += 0.01;
        assert!(ProfileCurve::from_samples(SpaceForm::S2xR, 0.5, bad).is_err());
    }
}
