//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs as a plain binary under `cargo test` so the report is always shown.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rotcmc::closedform::{d_area_dh, find_h0, AreaFunction};
use rotcmc::integrals::{area_quadrature, willmore_integral};
use rotcmc::spectrum::{assemble_spectrum_with, ZeroTolerance};
use rotcmc::stability::{stability_sweep_with, KoisoConfig, StabilityVerdict, Verdict};
use rotcmc::topology::{genus_bound_h2r, inv_sqrt3, GenusBound};
use rotcmc::{
    generate_profile, horizontal_slice, ricci_normal, sectional_tangent, Execution, ProfileCurve,
    SpaceForm,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn sweep(
    space: SpaceForm,
    grid: &[f64],
    n_samples: usize,
) -> Result<Vec<StabilityVerdict>, String> {
    let cfg = KoisoConfig {
        n_samples,
        ..KoisoConfig::default()
    };
    stability_sweep_with(space, grid, &cfg)
        .into_iter()
        .collect::<rotcmc::Result<Vec<_>>>()
        .map_err(|e| e.to_string())
}

fn linear(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn c1_h0() -> Outcome {
    let h0 = find_h0().map_err(|e| e.to_string())?;
    ensure((0.17..=0.19).contains(&h0), || {
        format!("H0 = {h0} outside [0.17, 0.19]")
    })?;
    let below = d_area_dh(SpaceForm::S2xR, h0 - 1e-10).map_err(|e| e.to_string())?;
    let above = d_area_dh(SpaceForm::S2xR, h0 + 1e-10).map_err(|e| e.to_string())?;
    ensure(below > 0.0 && above < 0.0, || {
        format!("dA/dH does not change sign within 1e-10 of H0: {below:e}, {above:e}")
    })?;
    Ok(format!("H0 = {h0:.12}"))
}

fn c2_area() -> Outcome {
    let grids = [
        (SpaceForm::S2xR, log_space(0.05, 20.0, 20)),
        (SpaceForm::H2xR, log_space(0.52, 20.0, 20)),
    ];
    let mut worst = 0.0f64;
    for (space, grid) in grids {
        let f = AreaFunction::new(space);
        for h in grid {
            let p = generate_profile(space, h, 4000).map_err(|e| e.to_string())?;
            let exact = f.area(h).map_err(|e| e.to_string())?;
            let rel = (area_quadrature(&p) - exact).abs() / exact;
            ensure(rel < 1e-8, || {
                format!("{space} H = {h}: relative error {rel:e}")
            })?;
            worst = worst.max(rel);
        }
    }
    Ok(format!("40 spheres, max relative error {worst:.2e}"))
}

fn c3_monotone() -> Outcome {
    let grid = log_space(0.51, 50.0, 100);
    for &h in &grid {
        let d = d_area_dh(SpaceForm::H2xR, h).map_err(|e| e.to_string())?;
        ensure(d < 0.0, || format!("dA/dH = {d} at H = {h}"))?;
    }
    Ok("dA/dH < 0 at 100 points".into())
}

fn c4_spectrum() -> Outcome {
    let cases = [
        (SpaceForm::S2xR, 0.2),
        (SpaceForm::S2xR, 0.5),
        (SpaceForm::S2xR, 1.0),
        (SpaceForm::H2xR, 0.6),
        (SpaceForm::H2xR, 1.0),
        (SpaceForm::H2xR, 2.0),
    ];
    let mut worst = 0.0f64;
    for (space, h) in cases {
        let p = generate_profile(space, h, 2000).map_err(|e| e.to_string())?;
        let s = assemble_spectrum_with(&p, 8, 4, ZeroTolerance::default(), Execution::default())
            .map_err(|e| e.to_string())?;
        ensure(s.negative_count == 1 && s.kernel_dim == 3, || {
            format!(
                "{space} H = {h}: negative_count {}, kernel_dim {}",
                s.negative_count, s.kernel_dim
            )
        })?;
        let est = s
            .per_mode
            .iter()
            .find_map(|(m, ls)| {
                let i = ls.iter().position(|&l| l == s.lambda2)?;
                s.error_estimates[m][i]
            })
            .ok_or_else(|| format!("{space} H = {h}: no error estimate for lambda2"))?;
        ensure(s.lambda2.abs() < 50.0 * est, || {
            format!(
                "{space} H = {h}: |lambda2| = {:e} vs 50 x {est:e}",
                s.lambda2.abs()
            )
        })?;
        worst = worst.max(s.lambda2.abs() / est);
    }
    Ok(format!("6 spheres, max |lambda2| / estimate = {worst:.2}"))
}

fn c5_slice() -> Outcome {
    let p = horizontal_slice(2000).map_err(|e| e.to_string())?;
    let s = assemble_spectrum_with(&p, 3, 4, ZeroTolerance::default(), Execution::default())
        .map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (&m, ls) in &s.per_mode {
        for (i, &l) in ls.iter().enumerate() {
            let deg = m as usize + i;
            if deg > 3 {
                continue;
            }
            let exact = (deg * (deg + 1)) as f64;
            let err = if exact == 0.0 {
                l.abs()
            } else {
                (l - exact).abs() / exact
            };
            ensure(err < 1e-3, || format!("m = {m}, l = {deg}: {l} vs {exact}"))?;
            worst = worst.max(err);
        }
    }
    Ok(format!(
        "l <= 3 in modes 0..3, max relative error {worst:.2e}"
    ))
}

fn c6_consistency() -> Outcome {
    let h0 = find_h0().map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    let mut checked = 0;
    for (space, grid) in [
        (SpaceForm::S2xR, linear(0.05, 1.0, 40)),
        (SpaceForm::H2xR, linear(0.6, 3.0, 40)),
    ] {
        let t = Instant::now();
        let verdicts = sweep(space, &grid, 2001)?;
        let elapsed = t.elapsed();
        slowest = slowest.max(elapsed);
        ensure(elapsed < Duration::from_secs(120), || {
            format!("{space} sweep took {elapsed:?}")
        })?;
        for v in verdicts {
            if space == SpaceForm::S2xR && (v.h - h0).abs() <= 0.02 {
                continue;
            }
            let rel = v
                .relative_consistency()
                .ok_or("missing consistency residual")?;
            ensure(rel < 1e-3, || {
                format!("{space} H = {}: relative residual {rel:e}", v.h)
            })?;
            worst = worst.max(rel);
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} points, max relative residual {worst:.2e}, slowest 40-point sweep {:.1} s",
        slowest.as_secs_f64()
    ))
}

fn c7_verdicts() -> Outcome {
    use Verdict::*;
    let table = [
        (
            SpaceForm::S2xR,
            vec![0.05, 0.10, 0.15, 0.25, 0.50, 1.00],
            vec![Unstable, Unstable, Unstable, Stable, Stable, Stable],
        ),
        (
            SpaceForm::H2xR,
            vec![0.6, 1.0, 2.0],
            vec![Stable, Stable, Stable],
        ),
    ];
    for (space, grid, expected) in table {
        let got: Vec<Verdict> = sweep(space, &grid, 2001)?
            .iter()
            .map(|v| v.verdict)
            .collect();
        ensure(got == expected, || format!("{space}: {got:?}"))?;
    }
    Ok("9 verdicts match".into())
}

fn c8_willmore() -> Outcome {
    let four_pi = 4.0 * PI;
    let mut min_excess = f64::INFINITY;
    for (space, grid) in [
        (SpaceForm::S2xR, log_space(0.05, 50.0, 25)),
        (SpaceForm::H2xR, log_space(0.51, 50.0, 25)),
    ] {
        for h in grid {
            let w =
                willmore_integral(&generate_profile(space, h, 2001).map_err(|e| e.to_string())?);
            ensure(w >= four_pi - 1e-6, || format!("{space} H = {h}: W = {w}"))?;
            min_excess = min_excess.min(w - four_pi);
        }
        let w = willmore_integral(&generate_profile(space, 50.0, 2001).map_err(|e| e.to_string())?);
        let rel = (w - four_pi).abs() / four_pi;
        ensure(rel < 0.01, || {
            format!("{space} H = 50: W / 4pi - 1 = {rel:e}")
        })?;
    }
    Ok(format!("50 spheres, min W - 4pi = {min_excess:.2e}"))
}

fn profiles_for_identities() -> Result<Vec<ProfileCurve>, String> {
    let mut out = vec![horizontal_slice(2001).map_err(|e| e.to_string())?];
    for (space, grid) in [
        (SpaceForm::S2xR, log_space(0.05, 50.0, 12)),
        (SpaceForm::H2xR, log_space(0.51, 50.0, 12)),
    ] {
        for h in grid {
            out.push(generate_profile(space, h, 2001).map_err(|e| e.to_string())?);
        }
    }
    Ok(out)
}

fn c9_identities() -> Outcome {
    let profiles = profiles_for_identities()?;
    let (mut ric, mut gauss) = (0.0f64, 0.0f64);
    let mut samples = 0;
    for p in &profiles {
        let kappa = p.space.kappa_f64();
        for x in &p.samples {
            let r = (ricci_normal(p.space, x.sigma) + sectional_tangent(p.space, x.sigma) - kappa)
                .abs();
            let g = (x.k1 * x.k1 + x.k2 * x.k2 - (4.0 * p.h * p.h - 2.0 * x.k1 * x.k2)).abs();
            ensure(r <= 1e-12, || {
                format!(
                    "{} H = {} s = {}: Ric + K_s off by {r:e}",
                    p.space, p.h, x.s
                )
            })?;
            ensure(g <= 1e-10, || {
                format!(
                    "{} H = {} s = {}: Gauss identity off by {g:e}",
                    p.space, p.h, x.s
                )
            })?;
            ric = ric.max(r);
            gauss = gauss.max(g);
            samples += 1;
        }
    }
    Ok(format!(
        "{samples} samples, max deviations {ric:.1e} / {gauss:.1e}"
    ))
}

fn c10_genus() -> Outcome {
    let table = [
        (0.4, false, GenusBound::Nonexistence),
        (0.577350269, true, GenusBound::AtMost(2)),
        (0.6, false, GenusBound::AtMost(1)),
        (0.75, false, GenusBound::SphereOnly),
    ];
    for (h, exact, expected) in table {
        let r = genus_bound_h2r(h, exact).map_err(|e| e.to_string())?;
        ensure(r.max_genus == expected, || {
            format!("H = {h}: {:?}", r.max_genus)
        })?;
        let again = r.reproduce().map_err(|e| e.to_string())?;
        ensure(again == expected, || {
            format!("H = {h}: trace reproduces {again:?}")
        })?;
    }
    ensure(
        genus_bound_h2r(inv_sqrt3(), false)
            .map(|r| r.max_genus)
            .ok()
            == Some(GenusBound::AtMost(2)),
        || "1/sqrt3 within the exact window".into(),
    )?;
    Ok("nonexistence, 2, 1, sphere-only".into())
}

fn observed_order(coarse_err: f64, fine_err: f64) -> f64 {
    (coarse_err / fine_err).log2()
}

fn c11_properties() -> Outcome {
    // reflection symmetry through the equator
    let mut sym = 0.0f64;
    for (space, h) in [
        (SpaceForm::S2xR, 0.1),
        (SpaceForm::S2xR, 1.0),
        (SpaceForm::H2xR, 0.7),
        (SpaceForm::H2xR, 3.0),
    ] {
        let p = generate_profile(space, h, 2001).map_err(|e| e.to_string())?;
        let n = p.len();
        for i in 0..n {
            let (a, b) = (&p.samples[i], &p.samples[n - 1 - i]);
            let d = (a.r - b.r)
                .abs()
                .max((a.t + b.t).abs())
                .max((a.sigma + b.sigma - PI).abs());
            sym = sym.max(d);
        }
    }
    ensure(sym < 1e-8, || format!("reflection asymmetry {sym:e}"))?;

    // area quadrature under grid halving
    let exact = AreaFunction::new(SpaceForm::H2xR)
        .area(1.0)
        .map_err(|e| e.to_string())?;
    let area_err = |n| -> Result<f64, String> {
        let p = generate_profile(SpaceForm::H2xR, 1.0, n).map_err(|e| e.to_string())?;
        Ok((area_quadrature(&p) - exact).abs())
    };
    let area_order = observed_order(area_err(101)?, area_err(201)?);
    ensure(area_order >= 1.9, || {
        format!("area quadrature order {area_order:.2}")
    })?;

    // slice eigenvalue l = 2 under grid halving
    let eig_err = |n| -> Result<f64, String> {
        let p = horizontal_slice(n).map_err(|e| e.to_string())?;
        let s = assemble_spectrum_with(&p, 2, 3, ZeroTolerance::default(), Execution::Sequential)
            .map_err(|e| e.to_string())?;
        Ok((s.per_mode[&0][2] - 6.0).abs())
    };
    let eig_order = observed_order(eig_err(501)?, eig_err(1001)?);
    ensure(eig_order >= 1.8, || {
        format!("eigenvalue order {eig_order:.2}")
    })?;

    // parallel sweeps are deterministic and match the sequential path
    let grid = linear(0.1, 1.0, 8);
    let run = |exec| {
        let cfg = KoisoConfig {
            n_samples: 801,
            exec,
            ..KoisoConfig::default()
        };
        stability_sweep_with(SpaceForm::S2xR, &grid, &cfg)
            .into_iter()
            .collect::<rotcmc::Result<Vec<_>>>()
            .map_err(|e| e.to_string())
    };
    let seq = run(Execution::Sequential)?;
    let par = run(Execution::default())?;
    let par2 = run(Execution::default())?;
    ensure(seq == par && par == par2, || {
        "sweep results differ between runs".into()
    })?;

    Ok(format!(
        "symmetry {sym:.1e}, area order {area_order:.2}, eigenvalue order {eig_order:.2}, sweeps identical"
    ))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "H0 reproduction",
            budget: Duration::from_secs(1),
            run: c1_h0,
        },
        Criterion {
            id: 2,
            name: "area agreement",
            budget: Duration::from_secs(10),
            run: c2_area,
        },
        Criterion {
            id: 3,
            name: "H2xR monotonicity",
            budget: Duration::from_secs(1),
            run: c3_monotone,
        },
        Criterion {
            id: 4,
            name: "spectral structure",
            budget: Duration::from_secs(60),
            run: c4_spectrum,
        },
        Criterion {
            id: 5,
            name: "slice oracle",
            budget: Duration::from_secs(5),
            run: c5_slice,
        },
        // two 40-point sweeps, each timed against 120 s inside
        Criterion {
            id: 6,
            name: "Koiso consistency",
            budget: Duration::from_secs(240),
            run: c6_consistency,
        },
        Criterion {
            id: 7,
            name: "verdict table",
            budget: Duration::from_secs(60),
            run: c7_verdicts,
        },
        Criterion {
            id: 8,
            name: "Willmore property",
            budget: Duration::from_secs(5),
            run: c8_willmore,
        },
        Criterion {
            id: 9,
            name: "pointwise identities",
            budget: Duration::from_secs(5),
            run: c9_identities,
        },
        Criterion {
            id: 10,
            name: "genus-bound table",
            budget: Duration::from_secs(1),
            run: c10_genus,
        },
        Criterion {
            id: 11,
            name: "property suite",
            budget: Duration::from_secs(60),
            run: c11_properties,
        },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed <= c.budget {
                Ok(msg)
            } else {
                Err(format!(
                    "{msg}; runtime {:.2} s exceeds {:.0} s",
                    elapsed.as_secs_f64(),
                    c.budget.as_secs_f64()
                ))
            }
        });
        match outcome {
            Ok(msg) => println!(
                "PASS criterion {:>2} ({}) [{:.2} s]: {msg}",
                c.id,
                c.name,
                elapsed.as_secs_f64()
            ),
            Err(msg) => {
                failures += 1;
                println!(
                    "FAIL criterion {:>2} ({}) [{:.2} s]: {msg}",
                    c.id,
                    c.name,
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
