use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use nzbc_core::grid::{evaluate_grid, PointFlag};
use nzbc_core::io::{self, presets, Channel, ConventionSetting, PixelRange, RunConfig};
use nzbc_core::scattering::{self, AuditReport};
use nzbc_core::verification::{
    self, evolution_run, tolerances, ConventionProbe, EvolutionOutcome, VerificationReport,
};
use nzbc_core::{Complex64, Error, Solution};

use crate::{ChannelArg, Cli, Command, GlobalOpts};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable input; exit 2.
    Usage(String),
    /// The input was understood but a check or construction failed; exit 1.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Failed(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_)
            | Error::Parse { .. }
            | Error::UnsupportedSchema(_)
            | Error::UnknownPreset(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(cli: Cli) -> CliResult<ExitCode> {
    let pool = match cli.global.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?,
        ),
        None => None,
    };
    let global = cli.global;
    let work = move || dispatch(cli.command, &global);
    match pool {
        Some(p) => p.install(work),
        None => work(),
    }
}

fn dispatch(cmd: Command, g: &GlobalOpts) -> CliResult<ExitCode> {
    match cmd {
        Command::Presets => list_presets(),
        Command::Construct {
            config,
            out,
            channel,
            clamp,
            emit_gnuplot,
        } => construct(&resolve(&config)?, g, &out, channel, clamp, emit_gnuplot),
        Command::Check { config } => check(&resolve(&config)?, g),
        Command::Evolve { config, out } => evolve(&resolve(&config)?, g, out.as_deref()),
        Command::Audit { config, probes } => audit(&resolve(&config)?, g, probes),
    }
}

/// A readable file path, or else a bundled preset name (a `presets/NAME.json`
/// path that does not exist also resolves to the preset).
fn resolve(arg: &str) -> CliResult<RunConfig> {
    let path = Path::new(arg);
    let cfg = if path.is_file() {
        io::parse_config_str(
            &fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{arg}: {e}")))?,
        )
        .map_err(|e| CliError::Usage(format!("{arg}: {e}")))?
    } else {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
        match presets::preset_json(arg).or_else(|| presets::preset_json(stem)) {
            Some(text) => io::parse_config_str(text)?,
            None => {
                return Err(CliError::Usage(format!(
                    "{arg}: no such file or bundled preset"
                )))
            }
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

fn setting(cfg: &RunConfig, g: &GlobalOpts) -> ConventionSetting {
    g.sign_convention
        .map(Into::into)
        .unwrap_or(cfg.sign_convention)
}

fn solution(cfg: &RunConfig, g: &GlobalOpts) -> CliResult<(Solution, Option<ConventionProbe>)> {
    Ok(match setting(cfg, g) {
        ConventionSetting::Auto => {
            let (s, p) = verification::select_convention(&cfg.spectral(), &cfg.plan())?;
            (s, Some(p))
        }
        ConventionSetting::A => (
            Solution::new(cfg.spectral(), nzbc_core::SignConvention::A)?,
            None,
        ),
        ConventionSetting::B => (
            Solution::new(cfg.spectral(), nzbc_core::SignConvention::B)?,
            None,
        ),
    })
}

fn print_json<T: Serialize>(v: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("report serializes")
    );
}

fn list_presets() -> CliResult<ExitCode> {
    for name in presets::names() {
        let cfg = presets::preset(name)?;
        let mut line = format!(
            "{name}\t{}\tN={}",
            cfg.pole_order.as_str(),
            cfg.eigenvalues.len()
        );
        if cfg.uncertain {
            line.push_str("\tuncertain");
        }
        if let Some(note) = &cfg.note {
            let _ = write!(line, "\t{note}");
        }
        println!("{line}");
    }
    Ok(ExitCode::SUCCESS)
}

fn construct(
    cfg: &RunConfig,
    g: &GlobalOpts,
    out: &Path,
    channel: ChannelArg,
    clamp: Option<(f64, f64)>,
    emit_gnuplot: bool,
) -> CliResult<ExitCode> {
    let (sol, _) = solution(cfg, g)?;
    let grid = evaluate_grid(&sol, &cfg.grid.xs(), &cfg.grid.ts())?;
    fs::create_dir_all(out).map_err(|e| CliError::Usage(format!("{}: {e}", out.display())))?;
    let base = out.join(&cfg.name);
    let csv = base.with_extension("csv");
    io::write_grid_csv(&grid, &csv)?;
    io::write_grid_json(&grid, base.with_extension("json"))?;
    let channel = match channel {
        ChannelArg::AbsU => Channel::AbsU,
        ChannelArg::ReU => Channel::ReU,
    };
    if let PixelRange::Degenerate(v) =
        io::render_pgm(&grid, base.with_extension("pgm"), channel, clamp)?
    {
        log::warn!("{}", Error::DegenerateRange(v));
    }
    if emit_gnuplot {
        let csv_name = format!("{}.csv", cfg.name);
        let png_name = format!("{}.png", cfg.name);
        fs::write(
            base.with_extension("gp"),
            io::gnuplot_script(&csv_name, &cfg.name, &png_name),
        )?;
    }
    let failed = grid.count(PointFlag::Error);
    let near = grid.count(PointFlag::NearSingular);
    println!(
        "{}: {}x{} points, convention {}, {near} near-singular, {failed} failed -> {}",
        cfg.name,
        grid.nx(),
        grid.nt(),
        sol.convention().as_str(),
        out.display()
    );
    if failed > 0 {
        return Err(CliError::Failed(format!(
            "{failed} grid points could not be evaluated"
        )));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CheckOutput<'a> {
    name: &'a str,
    uncertain: bool,
    /// Failures reported as warnings because the preset is uncertain.
    downgraded: bool,
    #[serde(flatten)]
    report: &'a VerificationReport,
}

fn check(cfg: &RunConfig, g: &GlobalOpts) -> CliResult<ExitCode> {
    let choice = setting(cfg, g).choice();
    let mut report = verification::verify(&cfg.spectral(), &cfg.plan(), choice)?;
    let downgraded = !report.passed && cfg.uncertain;
    if downgraded {
        let failed: Vec<String> = report.failed_gates().map(|g| g.name.clone()).collect();
        report.warnings.push(format!(
            "uncertain configuration; failed gates downgraded: {}",
            failed.join(", ")
        ));
    }
    print_json(&CheckOutput {
        name: &cfg.name,
        uncertain: cfg.uncertain,
        downgraded,
        report: &report,
    });
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if report.passed || downgraded {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(CliError::Failed(format!(
            "{}: failed gates: {}",
            cfg.name,
            report
                .failed_gates()
                .map(|g| g.name.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        )))
    }
}

#[derive(Serialize)]
struct EvolveOutput<'a> {
    name: &'a str,
    convention: &'static str,
    #[serde(flatten)]
    outcome: &'a EvolutionOutcome,
    linf_tolerance: f64,
    mass_tolerance: f64,
    passed: bool,
}

fn evolve(cfg: &RunConfig, g: &GlobalOpts, out: Option<&Path>) -> CliResult<ExitCode> {
    let (sol, _) = solution(cfg, g)?;
    let setup = cfg.verification.evolution.unwrap_or_default();
    let run = evolution_run(&sol, &setup)?;
    let o = &run.outcome;
    let passed = o.linf_error < tolerances::EVOLUTION && o.mass_rel_drift < tolerances::MASS;
    print_json(&EvolveOutput {
        name: &cfg.name,
        convention: sol.convention().as_str(),
        outcome: o,
        linf_tolerance: tolerances::EVOLUTION,
        mass_tolerance: tolerances::MASS,
        passed,
    });
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?;
        let mut text = String::from("x,re_evolved,im_evolved,re_exact,im_exact,abs_err\n");
        for ((x, a), b) in run.xs.iter().zip(&run.evolved).zip(&run.exact) {
            let _ = writeln!(
                text,
                "{x},{},{},{},{},{}",
                a.re,
                a.im,
                b.re,
                b.im,
                (a - b).norm()
            );
        }
        fs::write(dir.join(format!("{}_evolved.csv", cfg.name)), text)?;
    }
    if passed {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(CliError::Failed(format!(
            "{}: evolution cross-check failed",
            cfg.name
        )))
    }
}

/// Log-uniform radius in `[0.1, 10] Q0`, uniform angle, kept away from the
/// real axis and the background circle.
fn probe_points(seed: u64, n: usize, q0: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let r = q0 * 10f64.powf(rng.random_range(-1.0..1.0));
        let z = Complex64::from_polar(
            r,
            rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        );
        if z.im.abs() > 1e-3 * r && (r - q0).abs() > 1e-3 * q0 {
            out.push(z);
        }
    }
    out
}

#[derive(Serialize)]
struct AuditOutput<'a> {
    name: &'a str,
    convention: &'static str,
    seed: u64,
    q_plus: Complex64,
    #[serde(flatten)]
    audit: &'a AuditReport,
}

fn audit(cfg: &RunConfig, g: &GlobalOpts, probes: usize) -> CliResult<ExitCode> {
    let (sol, _) = solution(cfg, g)?;
    let points = probe_points(g.seed, probes, sol.orbit().q0);
    let report = scattering::audit(sol.orbit(), &points);
    print_json(&AuditOutput {
        name: &cfg.name,
        convention: sol.convention().as_str(),
        seed: g.seed,
        q_plus: sol.q_plus(),
        audit: &report,
    });
    if report.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(CliError::Failed(format!("{}: audit failed", cfg.name)))
    }
}
