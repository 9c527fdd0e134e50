#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use rotcmc::closedform::{self, AreaFunction};
use rotcmc::integrals::{area_quadrature, willmore_integral};
use rotcmc::manifest::{linear_grid, with_suffix, GridSpec, RunManifest};
use rotcmc::spectrum::{self, assemble_spectrum_with, ZeroTolerance};
use rotcmc::stability::{self, koiso_classify_with, stability_sweep_with, KoisoConfig, Transition};
use rotcmc::topology::{self, CurvatureAssumption};
use rotcmc::{generate_profile, horizontal_slice, Error, Execution, SpaceForm};

#[derive(Parser)]
#[command(
    name = "rotcmc",
    version,
    about = "Rotational CMC spheres in S2xR and H2xR"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generating curve of the rotational sphere as CSV
    Profile(ProfileArgs),
    /// Stability verdicts over a uniform grid of mean curvatures
    Sweep(SweepArgs),
    /// Low Jacobi spectrum as JSON
    Spectrum(SpectrumArgs),
    /// Stability verdict at one mean curvature
    Classify(ClassifyArgs),
    /// Genus bounds for closed stable CMC surfaces
    Bounds(BoundsArgs),
    /// Critical mean curvature where the S2xR area derivative changes sign
    H0(OutArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    S2xr,
    H2xr,
}

impl From<Space> for SpaceForm {
    fn from(s: Space) -> Self {
        match s {
            Space::S2xr => SpaceForm::S2xR,
            Space::H2xr => SpaceForm::H2xR,
        }
    }
}

#[derive(Args)]
struct OutArgs {
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long, value_enum)]
    space: Space,
    #[arg(long = "H", allow_negative_numbers = true)]
    h: f64,
    #[arg(long, default_value_t = stability::DEFAULT_SAMPLES)]
    samples: usize,
    #[command(flatten)]
    out: OutArgs,
    /// Prefix for x,y series files
    #[arg(long)]
    plot_data: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SpectralArgs {
    #[arg(long, default_value_t = stability::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = spectrum::DEFAULT_M_MAX)]
    m_max: u32,
    #[arg(long, default_value_t = spectrum::DEFAULT_K_PER_MODE)]
    k_per_mode: usize,
    /// Absolute kernel threshold; overrides --zero-tol-factor
    #[arg(long)]
    zero_tol: Option<f64>,
    /// Kernel threshold as a multiple of each eigenvalue's error estimate
    #[arg(long, default_value_t = spectrum::DEFAULT_ZERO_TOL_FACTOR)]
    zero_tol_factor: f64,
    /// Run every loop on one thread
    #[arg(long)]
    sequential: bool,
}

impl SpectralArgs {
    fn zero_tolerance(&self) -> ZeroTolerance {
        match self.zero_tol {
            Some(v) => ZeroTolerance::Absolute(v),
            None => ZeroTolerance::ErrorMultiple(self.zero_tol_factor),
        }
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }

    fn record(&self, m: &mut RunManifest) {
        m.param("samples", self.samples)
            .param("m_max", self.m_max)
            .param("k_per_mode", self.k_per_mode)
            .param("sequential", self.sequential)
            .tolerance("zero_tol", self.zero_tolerance());
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    space: Space,
    #[arg(long = "H-min", allow_negative_numbers = true)]
    h_min: f64,
    #[arg(long = "H-max", allow_negative_numbers = true)]
    h_max: f64,
    /// Number of grid points
    #[arg(long, default_value_t = 40)]
    steps: usize,
    #[command(flatten)]
    spectral: SpectralArgs,
    /// Verdict threshold as a multiple of the error estimate of the u integral
    #[arg(long, default_value_t = stability::DEFAULT_VERDICT_FACTOR)]
    verdict_factor: f64,
    #[command(flatten)]
    out: OutArgs,
    #[arg(long)]
    plot_data: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long, value_enum, required_unless_present = "slice")]
    space: Option<Space>,
    #[arg(
        long = "H",
        allow_negative_numbers = true,
        required_unless_present = "slice"
    )]
    h: Option<f64>,
    /// Use the horizontal slice of S2xR
    #[arg(long, conflicts_with_all = ["space", "h"])]
    slice: bool,
    #[command(flatten)]
    spectral: SpectralArgs,
    #[command(flatten)]
    out: OutArgs,
    #[arg(long)]
    plot_data: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long, value_enum)]
    space: Space,
    #[arg(long = "H", allow_negative_numbers = true)]
    h: f64,
    #[command(flatten)]
    spectral: SpectralArgs,
    #[arg(long, default_value_t = stability::DEFAULT_VERDICT_FACTOR)]
    verdict_factor: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, conflicts_with_all = ["conformally_flat", "s2xr"], requires = "h")]
    h2xr: bool,
    #[arg(long = "H", allow_negative_numbers = true)]
    h: Option<f64>,
    /// Declare H = 1/sqrt3 exactly
    #[arg(long)]
    exact_inv_sqrt3: bool,
    #[arg(long, conflicts_with = "s2xr")]
    conformally_flat: bool,
    #[arg(long, requires = "conformally_flat", conflicts_with = "scalar_nonneg")]
    ricci_nonneg: bool,
    #[arg(long, requires = "conformally_flat")]
    scalar_nonneg: bool,
    #[arg(long)]
    embedded: bool,
    #[arg(long)]
    s2xr: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => e.exit_code() as u8,
            CliError::Io(_) => 1,
        }
    }
}

type CliResult = std::result::Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().collect();
    match run(cli.command, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command, argv: Vec<String>) -> CliResult {
    let start = Instant::now();
    match command {
        Command::Profile(a) => cmd_profile(a, argv, start),
        Command::Sweep(a) => cmd_sweep(a, argv, start),
        Command::Spectrum(a) => cmd_spectrum(a, argv, start),
        Command::Classify(a) => cmd_classify(a, argv, start),
        Command::Bounds(a) => cmd_bounds(a, argv, start),
        Command::H0(a) => cmd_h0(a, argv, start),
    }
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn print_json(value: &impl Serialize) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::other)?;
    writeln!(out)
}

fn write_json(path: &Path, value: &impl Serialize) -> io::Result<()> {
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, value).map_err(io::Error::other)?;
    writeln!(f)?;
    f.flush()
}

/// Writes JSON to `out` with a manifest, or to stdout.
fn emit_json(
    out: &Option<PathBuf>,
    value: &impl Serialize,
    mut manifest: RunManifest,
    start: Instant,
) -> CliResult {
    match out {
        Some(path) => {
            write_json(path, value)?;
            manifest.output(path).write_beside(path, start.elapsed())?;
        }
        None => print_json(value)?,
    }
    Ok(())
}

fn write_series(path: &Path, points: impl IntoIterator<Item = (f64, f64)>) -> io::Result<()> {
    let mut f = create(path)?;
    writeln!(f, "x,y")?;
    for (x, y) in points {
        writeln!(f, "{x:.16e},{y:.16e}")?;
    }
    f.flush()
}

fn cmd_profile(a: ProfileArgs, argv: Vec<String>, start: Instant) -> CliResult {
    let space = SpaceForm::from(a.space);
    let profile = generate_profile(space, a.h, a.samples)?;
    let mut manifest = RunManifest::new("profile", argv);
    manifest
        .param("space", space)
        .param("H", a.h)
        .param("samples", a.samples);

    if let Some(prefix) = &a.plot_data {
        let path = with_suffix(prefix, "profile.csv");
        write_series(&path, profile.samples.iter().map(|p| (p.r, p.t)))?;
        manifest.output(&path);
    }
    match &a.out.out {
        Some(path) => {
            let mut f = create(path)?;
            profile.write_csv(&mut f)?;
            f.flush()?;
            manifest.output(path).write_beside(path, start.elapsed())?;
            print_json(&json!({
                "space": space,
                "H": a.h,
                "rows": profile.len(),
                "total_length": profile.total_length,
                "r_max": profile.r_max(),
                "area_quadrature": area_quadrature(&profile),
                "area_closed_form": AreaFunction::new(space).area(a.h)?,
                "willmore": willmore_integral(&profile),
                "cmc_residual": profile.cmc_residual(),
                "first_integral_drift": profile.first_integral_drift(),
            }))?;
        }
        None => profile.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct TransitionReport {
    #[serde(flatten)]
    transition: Transition,
    #[serde(rename = "contains_H0", skip_serializing_if = "Option::is_none")]
    contains_h0: Option<bool>,
}

#[derive(Serialize)]
struct SweepSummary {
    space: SpaceForm,
    grid: GridSpec,
    points: usize,
    counts: BTreeMap<&'static str, usize>,
    transitions: Vec<TransitionReport>,
    #[serde(rename = "H0", skip_serializing_if = "Option::is_none")]
    h0: Option<f64>,
    /// Largest `|∫u + (dA/dH)/(4H)| / |(dA/dH)/(4H)|` over the grid.
    max_relative_consistency: Option<f64>,
}

fn cmd_sweep(a: SweepArgs, argv: Vec<String>, start: Instant) -> CliResult {
    let space = SpaceForm::from(a.space);
    if !(a.h_min <= a.h_max) {
        return Err(
            Error::InvalidArgument(format!("H-min {} exceeds H-max {}", a.h_min, a.h_max)).into(),
        );
    }
    if a.steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()).into());
    }
    let grid = linear_grid(a.h_min, a.h_max, a.steps);
    let spec = GridSpec {
        h_min: a.h_min,
        h_max: a.h_max,
        steps: grid.len(),
        spacing: "linear",
    };
    let cfg = KoisoConfig {
        n_samples: a.spectral.samples,
        m_max: a.spectral.m_max,
        k_per_mode: a.spectral.k_per_mode,
        zero_tol: a.spectral.zero_tolerance(),
        verdict_factor: a.verdict_factor,
        exec: a.spectral.execution(),
    };
    let verdicts = stability_sweep_with(space, &grid, &cfg)
        .into_iter()
        .collect::<rotcmc::Result<Vec<_>>>()?;

    let h0 = match space {
        SpaceForm::S2xR => Some(closedform::find_h0()?),
        SpaceForm::H2xR => None,
    };
    let mut counts = BTreeMap::new();
    for v in &verdicts {
        *counts.entry(v.verdict.as_str()).or_insert(0) += 1;
    }
    let transitions = stability::verdict_transitions(&verdicts)
        .into_iter()
        .map(|t| TransitionReport {
            transition: t,
            contains_h0: h0.map(|h0| t.bracket.0 <= h0 && h0 <= t.bracket.1),
        })
        .collect();
    let summary = SweepSummary {
        space,
        grid: spec.clone(),
        points: verdicts.len(),
        counts,
        transitions,
        h0,
        max_relative_consistency: verdicts
            .iter()
            .filter_map(|v| v.relative_consistency())
            .reduce(f64::max),
    };
    let area_grid: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|&h| space.check_existence(h).is_ok())
        .collect();
    let area_rows = closedform::closed_form_sweep(space, &area_grid)?;

    let mut manifest = RunManifest::new("sweep", argv);
    manifest
        .param("space", space)
        .param("verdict_factor", a.verdict_factor);
    a.spectral.record(&mut manifest);
    manifest.grid = Some(spec);
    manifest.tolerance("verdict_factor", a.verdict_factor);

    if let Some(prefix) = &a.plot_data {
        let series: [(&str, Vec<(f64, f64)>); 3] = [
            (
                "lambda1.csv",
                verdicts.iter().map(|v| (v.h, v.lambda1)).collect(),
            ),
            (
                "u_integral.csv",
                verdicts
                    .iter()
                    .filter_map(|v| Some((v.h, v.u_integral?)))
                    .collect(),
            ),
            (
                "area.csv",
                area_rows.iter().map(|r| (r.h, r.area)).collect(),
            ),
        ];
        for (name, points) in series {
            let path = with_suffix(prefix, name);
            write_series(&path, points)?;
            manifest.output(&path);
        }
    }
    if let Some(path) = &a.out.out {
        let mut f = create(path)?;
        stability::write_sweep_csv(&verdicts, &mut f)?;
        f.flush()?;
        let area_path = with_suffix(path, "area.csv");
        let mut f = create(&area_path)?;
        closedform::write_sweep_csv(&area_rows, &mut f)?;
        f.flush()?;
        let summary_path = with_suffix(path, "summary.json");
        write_json(&summary_path, &summary)?;
        manifest
            .output(path)
            .output(&area_path)
            .output(&summary_path);
        manifest.write_beside(path, start.elapsed())?;
    }
    print_json(&summary)?;
    Ok(())
}

fn cmd_spectrum(a: SpectrumArgs, argv: Vec<String>, start: Instant) -> CliResult {
    let profile = if a.slice {
        horizontal_slice(a.spectral.samples)?
    } else {
        let space = SpaceForm::from(a.space.expect("clap enforces --space"));
        generate_profile(space, a.h.expect("clap enforces --H"), a.spectral.samples)?
    };
    let result = assemble_spectrum_with(
        &profile,
        a.spectral.m_max,
        a.spectral.k_per_mode,
        a.spectral.zero_tolerance(),
        a.spectral.execution(),
    )?;
    let mut manifest = RunManifest::new("spectrum", argv);
    manifest
        .param("space", profile.space)
        .param("H", profile.h)
        .param("slice", a.slice);
    a.spectral.record(&mut manifest);
    if let Some(prefix) = &a.plot_data {
        let path = with_suffix(prefix, "eigenvalues.csv");
        let points = result
            .per_mode
            .iter()
            .flat_map(|(m, ls)| ls.iter().map(move |l| (f64::from(*m), *l)));
        write_series(&path, points)?;
        manifest.output(&path);
    }
    emit_json(&a.out.out, &result.to_json(), manifest, start)
}

fn cmd_classify(a: ClassifyArgs, argv: Vec<String>, start: Instant) -> CliResult {
    let space = SpaceForm::from(a.space);
    let cfg = KoisoConfig {
        n_samples: a.spectral.samples,
        m_max: a.spectral.m_max,
        k_per_mode: a.spectral.k_per_mode,
        zero_tol: a.spectral.zero_tolerance(),
        verdict_factor: a.verdict_factor,
        exec: a.spectral.execution(),
    };
    let verdict = koiso_classify_with(space, a.h, &cfg)?;
    let mut manifest = RunManifest::new("classify", argv);
    manifest.param("space", space).param("H", a.h);
    a.spectral.record(&mut manifest);
    manifest.tolerance("verdict_factor", a.verdict_factor);
    emit_json(&a.out.out, &verdict, manifest, start)
}

fn cmd_bounds(a: BoundsArgs, argv: Vec<String>, start: Instant) -> CliResult {
    let report = if a.h2xr {
        topology::genus_bound_h2r(a.h.expect("clap enforces --H"), a.exact_inv_sqrt3)?
    } else if a.conformally_flat {
        let assumption = match (a.ricci_nonneg, a.scalar_nonneg) {
            (true, false) => CurvatureAssumption::RicciNonneg,
            (false, true) => CurvatureAssumption::ScalarNonneg,
            _ => {
                return Err(Error::InvalidArgument(
                    "--conformally-flat needs exactly one of --ricci-nonneg, --scalar-nonneg"
                        .into(),
                )
                .into())
            }
        };
        topology::genus_bound_conformally_flat(assumption, a.embedded)
    } else if a.s2xr {
        topology::classify_s2r_compact_stable()?
    } else {
        return Err(Error::InvalidArgument(
            "choose one of --h2xr, --conformally-flat, --s2xr".into(),
        )
        .into());
    };
    let mut manifest = RunManifest::new("bounds", argv);
    manifest
        .param("h2xr", a.h2xr)
        .param("H", a.h)
        .param("exact_inv_sqrt3", a.exact_inv_sqrt3)
        .param("conformally_flat", a.conformally_flat)
        .param("ricci_nonneg", a.ricci_nonneg)
        .param("scalar_nonneg", a.scalar_nonneg)
        .param("embedded", a.embedded)
        .param("s2xr", a.s2xr)
        .tolerance("exact_window", topology::EXACT_WINDOW);
    emit_json(&a.out.out, &report, manifest, start)
}

fn cmd_h0(a: OutArgs, argv: Vec<String>, start: Instant) -> CliResult {
    let h0 = closedform::find_h0()?;
    let value = json!({
        "H0": h0,
        "dAdH_at_H0": closedform::d_area_dh(SpaceForm::S2xR, h0)?,
        "sign_changes": closedform::s2r_derivative_sign_changes(2000),
    });
    let manifest = RunManifest::new("h0", argv);
    emit_json(&a.out, &value, manifest, start)
}
