//! Command-line surface of the remwalk laboratory: closed-form tables,
//! finite-size SCGF evaluation and sweeps, Monte Carlo estimates, resolvent
//! and projector checks, and the bundled validation suite.

mod config;
mod output;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{parse_grid, Config};
use output::{fmt_f64, CsvFile, RunManifest};
use remwalk::analytic::{self, Activity, PhaseLabel, Rate};
use remwalk::operator::GeneratorSpec;
use remwalk::remfield::RemField;
use remwalk::resolvent;
use remwalk::spectral::{self, Method};
use remwalk::trajectories;
use remwalk::validation::{self, Scale};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "remwalk", version, about, max_term_width = 100)]
struct Cli {
    /// Worker threads for parallel scans (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Flat key=value configuration file; flags override file values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form tables: phase diagram, rate function, pressures,
    /// transition lines
    Analytic(AnalyticArgs),
    /// Finite-size SCGF at one parameter point, over one or more seeds
    Scgf(ScgfArgs),
    /// Finite-size SCGF over a parameter grid
    Sweep(SweepArgs),
    /// Monte Carlo trajectory estimates (moment generating function and
    /// activity)
    Mc(McArgs),
    /// Per-configuration resolvent bound report
    ResolventCheck(ResolventArgs),
    /// Spectral-projector statistics above an energy cut
    Projector(ProjectorArgs),
    /// Eigenvalue/configuration level-shift statistics
    Shift(ProjectorArgs),
    /// Boundary-vector values and bounds on the exclusion set
    Phivec(PhivecArgs),
    /// Run the bundled validation suite
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalyticKind {
    Phase,
    Rate,
    Pressure,
    Boundaries,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Krylov,
    Dense,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Krylov => Method::Krylov,
            MethodArg::Dense => Method::Dense,
        }
    }
}

impl std::str::FromStr for MethodArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "krylov" => Ok(MethodArg::Krylov),
            "dense" => Ok(MethodArg::Dense),
            other => Err(format!("unknown method {other:?} (krylov|dense)")),
        }
    }
}

#[derive(Args)]
struct AnalyticArgs {
    #[arg(value_enum)]
    kind: AnalyticKind,
    /// Time extent(s); comma list or start:stop:count
    #[arg(long, short = 't')]
    t: Option<String>,
    /// Coupling(s)
    #[arg(long)]
    lambda: Option<String>,
    /// Jump tilt
    #[arg(long)]
    s: Option<f64>,
    /// Scaled energy value(s), for the rate function
    #[arg(long)]
    u: Option<String>,
    /// Inverse temperature(s), for the pressure table
    #[arg(long)]
    beta: Option<String>,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScgfArgs {
    #[arg(long, short = 'n')]
    n: Option<u32>,
    #[arg(long, short = 't')]
    t: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    /// Number of landscape seeds (0, 1, ..., seeds-1)
    #[arg(long)]
    seeds: Option<u64>,
    /// Single landscape seed (overrides --seeds)
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, short = 'n')]
    n: Option<u32>,
    /// Time grid; comma list or start:stop:count
    #[arg(long, short = 't')]
    t: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct McArgs {
    #[arg(long, short = 'n')]
    n: Option<u32>,
    #[arg(long, short = 't')]
    t: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Number of landscape seeds
    #[arg(long)]
    seeds: Option<u64>,
    /// Master seed for the trajectory streams
    #[arg(long)]
    seed: Option<u64>,
    /// Also compute the dense reference (sizes up to the dense cap)
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ResolventArgs {
    #[arg(long, short = 'n')]
    n: Option<u32>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Spectral parameter; defaults to
    /// 1.5 * max(gamma n, lambda max|U|, top eigenvalue + margin)
    #[arg(long)]
    e: Option<f64>,
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProjectorArgs {
    #[arg(long, short = 'n')]
    n: Option<u32>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PhivecArgs {
    #[arg(long, short = 'n')]
    n: Option<u32>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Spectral parameter; defaults to 1.05 * lambda * delta * n
    #[arg(long)]
    e: Option<f64>,
    /// Highest derivative order
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Quick,
    Full,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(value_enum, default_value = "quick")]
    level: Level,
    /// Write the JSON verdict here (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .ok();
    }
    let exit = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    std::process::exit(exit);
}

fn run(cli: Cli) -> Result<i32> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Analytic(args) => cmd_analytic(&cfg, args),
        Command::Scgf(args) => cmd_scgf(&cfg, args),
        Command::Sweep(args) => cmd_sweep(&cfg, args),
        Command::Mc(args) => cmd_mc(&cfg, args),
        Command::ResolventCheck(args) => cmd_resolvent(&cfg, args),
        Command::Projector(args) => cmd_projector(&cfg, args, false),
        Command::Shift(args) => cmd_projector(&cfg, args, true),
        Command::Phivec(args) => cmd_phivec(&cfg, args),
        Command::Validate(args) => cmd_validate(args),
    }
}

fn phase_name(label: PhaseLabel) -> String {
    match label {
        PhaseLabel::Active => "Active".to_string(),
        PhaseLabel::InactiveGlass => "InactiveGlass".to_string(),
        PhaseLabel::InactiveParamagnetic => "InactiveParamagnetic".to_string(),
        PhaseLabel::Boundary(detail) => format!("Boundary:{detail:?}"),
    }
}

fn activity_field(a: Activity) -> String {
    match a {
        Activity::Point(v) => fmt_f64(v),
        Activity::Interval { lo, hi } => format!("interval[{lo};{hi}]"),
    }
}

/// Write the CSV (plus manifest) when an output path was given, otherwise
/// print the rows to stdout. Exit code 1 when any point failed.
fn emit(csv: CsvFile, out_given: bool, manifest: RunManifest, started: Instant) -> Result<i32> {
    let failed = manifest.any_failed();
    if failed {
        for point in manifest.points.iter().filter(|p| p.status != "ok") {
            eprintln!("point {}: {}", point.params, point.status);
        }
    }
    if out_given {
        let digest = csv.finish()?;
        let out = PathBuf::from(&digest.path);
        let mut manifest = manifest;
        manifest.outputs.push(digest);
        manifest.write(&out, started.elapsed().as_secs_f64())?;
    } else {
        print!("{}", csv.into_buffer());
    }
    Ok(if failed { 1 } else { 0 })
}

fn cmd_analytic(cfg: &Config, args: AnalyticArgs) -> Result<i32> {
    let started = Instant::now();
    let s = cfg.resolve(args.s, "s", 0.0)?;
    let out = cfg.resolve_opt(args.out, "out")?;
    let out_given = out.is_some();
    let path = out.unwrap_or_else(|| PathBuf::from("analytic.csv"));

    let grid_of = |flag: &Option<String>, key: &str, default: &str| -> Result<Vec<f64>> {
        let text = cfg.resolve(flag.clone(), key, default.to_string())?;
        parse_grid(&text)
    };

    let (csv, manifest) = match args.kind {
        AnalyticKind::Phase => {
            let ts = grid_of(&args.t, "t", "1")?;
            let lambdas = grid_of(&args.lambda, "lambda", "1")?;
            let mut csv =
                CsvFile::new(&path, &["t", "lambda", "s", "theta", "phase", "activity"]);
            let mut manifest = RunManifest::new(
                serde_json::json!({"t": ts, "lambda": lambdas, "s": s}),
                None,
            );
            for &t in &ts {
                for &lambda in &lambdas {
                    let point = analytic::classify_phase(t, lambda, analytic::DEFAULT_PHASE_TOL)?;
                    let theta = analytic::scgf_limit(t, lambda, s)?;
                    csv.row(&[
                        fmt_f64(t),
                        fmt_f64(lambda),
                        fmt_f64(s),
                        fmt_f64(theta),
                        phase_name(point.label),
                        activity_field(point.activity),
                    ]);
                    manifest.point_ok(format!("t={t} lambda={lambda}"));
                }
            }
            (csv, manifest)
        }
        AnalyticKind::Rate => {
            let ts = grid_of(&args.t, "t", "1")?;
            let us = grid_of(&args.u, "u", "0")?;
            let mut csv = CsvFile::new(&path, &["t", "u", "phi"]);
            let mut manifest =
                RunManifest::new(serde_json::json!({"t": ts, "u": us, "s": s}), None);
            for &t in &ts {
                for &u in &us {
                    let phi = match analytic::rate_function(t, u, s)? {
                        Rate::Finite(v) => fmt_f64(v),
                        Rate::Infinite => "inf".to_string(),
                    };
                    csv.row(&[fmt_f64(t), fmt_f64(u), phi]);
                    manifest.point_ok(format!("t={t} u={u}"));
                }
            }
            (csv, manifest)
        }
        AnalyticKind::Pressure => {
            let betas = grid_of(&args.beta, "beta", "0:3:31")?;
            let lambdas = grid_of(&args.lambda, "lambda", "0")?;
            let lambda = lambdas[0];
            let mut csv = CsvFile::new(&path, &["beta", "p_rem", "qrem_pressure"]);
            let mut manifest = RunManifest::new(
                serde_json::json!({"beta": betas, "lambda": lambda, "s": s}),
                None,
            );
            for &beta in &betas {
                csv.row(&[
                    fmt_f64(beta),
                    fmt_f64(analytic::rem_pressure(beta)),
                    fmt_f64(analytic::qrem_pressure(beta, lambda, s)),
                ]);
                manifest.point_ok(format!("beta={beta}"));
            }
            (csv, manifest)
        }
        AnalyticKind::Boundaries => {
            let lambdas = grid_of(&args.lambda, "lambda", "0:3:31")?;
            let mut csv = CsvFile::new(&path, &["lambda", "t_inv", "kind"]);
            let mut manifest = RunManifest::new(serde_json::json!({"lambda": lambdas}), None);
            for &lambda in &lambdas {
                for crossing in analytic::boundary_curves(lambda)? {
                    csv.row(&[
                        fmt_f64(lambda),
                        fmt_f64(crossing.t_inv),
                        format!("{:?}", crossing.detail),
                    ]);
                }
                manifest.point_ok(format!("lambda={lambda}"));
            }
            (csv, manifest)
        }
    };
    emit(csv, out_given, manifest, started)
}

const SCGF_HEADER: [&str; 12] = [
    "n",
    "t",
    "lambda",
    "s",
    "seed",
    "method",
    "theta_n",
    "theta_limit",
    "gap",
    "krylov_dim",
    "substeps",
    "residual_estimate",
];

fn scgf_row(csv: &mut CsvFile, rec: &spectral::ScgfRecord) {
    csv.row(&[
        rec.n.to_string(),
        fmt_f64(rec.t),
        fmt_f64(rec.lambda),
        fmt_f64(rec.s),
        rec.seed.to_string(),
        format!("{:?}", rec.method),
        fmt_f64(rec.theta_n),
        fmt_f64(rec.theta_limit),
        fmt_f64(rec.theta_n - rec.theta_limit),
        rec.krylov_dim.to_string(),
        rec.substeps.to_string(),
        fmt_f64(rec.residual_estimate),
    ]);
}

fn cmd_scgf(cfg: &Config, args: ScgfArgs) -> Result<i32> {
    let started = Instant::now();
    let n = cfg.resolve(args.n, "n", 8u32)?;
    let t = cfg.resolve(args.t, "t", 1.0)?;
    let lambda = cfg.resolve(args.lambda, "lambda", 1.0)?;
    let s = cfg.resolve(args.s, "s", 0.0)?;
    let method: Method = cfg.resolve(args.method, "method", MethodArg::Krylov)?.into();
    let out = cfg.resolve_opt(args.out, "out")?;
    let out_given = out.is_some();
    let path = out.unwrap_or_else(|| PathBuf::from("scgf.csv"));

    let seed_list: Vec<u64> = match cfg.resolve_opt(args.seed, "seed")? {
        Some(seed) => vec![seed],
        None => (0..cfg.resolve(args.seeds, "seeds", 1u64)?).collect(),
    };

    let mut csv = CsvFile::new(&path, &SCGF_HEADER);
    let mut manifest = RunManifest::new(
        serde_json::json!({"n": n, "t": t, "lambda": lambda, "s": s, "seeds": seed_list}),
        None,
    );
    for &seed in &seed_list {
        let field = RemField::new(seed, n)?;
        match spectral::scgf_finite(&field, t, lambda, s, method) {
            Ok(rec) => {
                scgf_row(&mut csv, &rec);
                manifest.point_ok(format!("seed={seed}"));
            }
            Err(e) => manifest.point_failed(format!("seed={seed}"), e),
        }
    }
    emit(csv, out_given, manifest, started)
}

fn cmd_sweep(cfg: &Config, args: SweepArgs) -> Result<i32> {
    let started = Instant::now();
    let n = cfg.resolve(args.n, "n", 8u32)?;
    let ts = parse_grid(&cfg.resolve(args.t, "t", "1".to_string())?)?;
    let lambdas = parse_grid(&cfg.resolve(args.lambda, "lambda", "0:2:5".to_string())?)?;
    let ss = parse_grid(&cfg.resolve(args.s, "s", "0".to_string())?)?;
    let seeds = cfg.resolve(args.seeds, "seeds", 1u64)?;
    let method: Method = cfg.resolve(args.method, "method", MethodArg::Krylov)?.into();
    let out = cfg.resolve_opt(args.out, "out")?;
    let out_given = out.is_some();
    let path = out.unwrap_or_else(|| PathBuf::from("sweep.csv"));

    let mut csv = CsvFile::new(&path, &SCGF_HEADER);
    let mut manifest = RunManifest::new(
        serde_json::json!({"n": n, "t": ts, "lambda": lambdas, "s": ss, "seeds": seeds}),
        None,
    );
    for &t in &ts {
        for &lambda in &lambdas {
            for &s in &ss {
                for seed in 0..seeds {
                    let field = RemField::new(seed, n)?;
                    match spectral::scgf_finite(&field, t, lambda, s, method) {
                        Ok(rec) => {
                            scgf_row(&mut csv, &rec);
                            manifest
                                .point_ok(format!("t={t} lambda={lambda} s={s} seed={seed}"));
                        }
                        Err(e) => manifest
                            .point_failed(format!("t={t} lambda={lambda} s={s} seed={seed}"), e),
                    }
                }
            }
        }
    }
    emit(csv, out_given, manifest, started)
}

fn cmd_mc(cfg: &Config, args: McArgs) -> Result<i32> {
    let started = Instant::now();
    let n = cfg.resolve(args.n, "n", 8u32)?;
    let t = cfg.resolve(args.t, "t", 1.0)?;
    let lambda = cfg.resolve(args.lambda, "lambda", 1.0)?;
    let samples = cfg.resolve(args.samples, "samples", 10_000usize)?;
    let seeds = cfg.resolve(args.seeds, "seeds", 1u64)?;
    let master_seed = cfg.resolve(args.seed, "seed", 2024u64)?;
    let out = cfg.resolve_opt(args.out, "out")?;
    let out_given = out.is_some();
    let path = out.unwrap_or_else(|| PathBuf::from("mc.csv"));

    let mut csv = CsvFile::new(
        &path,
        &[
            "n",
            "t",
            "lambda",
            "field_seed",
            "master_seed",
            "samples",
            "mgf_mean",
            "mgf_stderr",
            "mgf_exact",
            "untilted_activity",
            "untilted_stderr",
            "tilted_activity",
            "tilted_ci_low",
            "tilted_ci_high",
            "tilted_ess",
            "degenerate",
        ],
    );
    let mut manifest = RunManifest::new(
        serde_json::json!({"n": n, "t": t, "lambda": lambda, "samples": samples, "seeds": seeds}),
        Some(master_seed),
    );
    for seed in 0..seeds {
        let field = RemField::new(seed, n)?;
        let result =
            trajectories::mgf_estimate(&field, t, lambda, samples, master_seed, args.exact)
                .and_then(|mgf| {
                    trajectories::activity_estimate(&field, t, lambda, samples, master_seed)
                        .map(|act| (mgf, act))
                });
        match result {
            Ok((mgf, act)) => {
                csv.row(&[
                    n.to_string(),
                    fmt_f64(t),
                    fmt_f64(lambda),
                    seed.to_string(),
                    master_seed.to_string(),
                    samples.to_string(),
                    fmt_f64(mgf.mean),
                    fmt_f64(mgf.stderr),
                    mgf.exact.map(fmt_f64).unwrap_or_default(),
                    fmt_f64(act.untilted),
                    fmt_f64(act.untilted_stderr),
                    fmt_f64(act.tilted.value),
                    fmt_f64(act.tilted.ci_low),
                    fmt_f64(act.tilted.ci_high),
                    fmt_f64(act.tilted.ess),
                    act.tilted.degenerate.to_string(),
                ]);
                manifest.point_ok(format!("field_seed={seed}"));
            }
            Err(e) => manifest.point_failed(format!("field_seed={seed}"), e),
        }
    }
    emit(csv, out_given, manifest, started)
}

fn cmd_resolvent(cfg: &Config, args: ResolventArgs) -> Result<i32> {
    let started = Instant::now();
    let n = cfg.resolve(args.n, "n", 8u32)?;
    let gamma = cfg.resolve(args.gamma, "gamma", 0.2)?;
    let lambda = cfg.resolve(args.lambda, "lambda", 1.0)?;
    let seeds = cfg.resolve(args.seeds, "seeds", 1u64)?;
    let e_flag = cfg.resolve_opt(args.e, "e")?;
    let out = cfg.resolve_opt(args.out, "out")?;
    let out_given = out.is_some();
    let path = out.unwrap_or_else(|| PathBuf::from("resolvent.csv"));

    let mut csv = CsvFile::new(
        &path,
        &[
            "n",
            "gamma",
            "lambda",
            "seed",
            "e",
            "gamma_n",
            "condition_ok",
            "all_pass",
            "l1_norm",
            "min_lhs",
        ],
    );
    let mut manifest = RunManifest::new(
        serde_json::json!({"n": n, "gamma": gamma, "lambda": lambda, "seeds": seeds, "e": e_flag}),
        None,
    );
    for seed in 0..seeds {
        let field = RemField::new(seed, n)?;
        let outcome = (|| -> remwalk::Result<resolvent::ResolventReport> {
            let e = match e_flag {
                Some(e) => e,
                None => {
                    let spec = GeneratorSpec::qrem(n, gamma, lambda);
                    let top = spectral::extreme_eigs(&spec, &field, 1, 1e-9)?.values[0];
                    1.5 * (gamma * n as f64)
                        .max(lambda * field.max_abs_energy())
                        .max(top + resolvent::SPECTRUM_MARGIN_PER_SPIN * n as f64)
                }
            };
            resolvent::l1_bound_report(&field, gamma, lambda, e)
        })();
        match outcome {
            Ok(report) => {
                csv.row(&[
                    n.to_string(),
                    fmt_f64(gamma),
                    fmt_f64(lambda),
                    seed.to_string(),
                    fmt_f64(report.e),
                    fmt_f64(report.gamma_n_value),
                    report.condition_ok.to_string(),
                    report.all_pass.to_string(),
                    fmt_f64(report.l1_norm),
                    fmt_f64(report.min_lhs),
                ]);
                manifest.point_ok(format!("seed={seed}"));
            }
            Err(e) => manifest.point_failed(format!("seed={seed}"), e),
        }
    }
    emit(csv, out_given, manifest, started)
}

fn cmd_projector(cfg: &Config, args: ProjectorArgs, shift_mode: bool) -> Result<i32> {
    let started = Instant::now();
    let n = cfg.resolve(args.n, "n", 10u32)?;
    let gamma = cfg.resolve(args.gamma, "gamma", 0.3)?;
    let lambda = cfg.resolve(args.lambda, "lambda", 1.0)?;
    let delta = cfg.resolve(args.delta, "delta", 0.6)?;
    let seeds = cfg.resolve(args.seeds, "seeds", 1u64)?;
    let out = cfg.resolve_opt(args.out, "out")?;
    let out_given = out.is_some();
    let path = out.unwrap_or_else(|| {
        PathBuf::from(if shift_mode {
            "shift.csv"
        } else {
            "projector.csv"
        })
    });

    let header: &[&str] = if shift_mode {
        &[
            "n",
            "gamma",
            "lambda",
            "delta",
            "seed",
            "levels_above",
            "shift_sup",
            "shift_sup_normalized",
        ]
    } else {
        &[
            "n",
            "gamma",
            "lambda",
            "delta",
            "seed",
            "threshold",
            "trace_above",
            "flat_weight",
            "decay_rate",
            "shift_sup",
        ]
    };
    let mut csv = CsvFile::new(&path, header);
    let mut manifest = RunManifest::new(
        serde_json::json!({
            "n": n, "gamma": gamma, "lambda": lambda, "delta": delta, "seeds": seeds
        }),
        None,
    );
    for seed in 0..seeds {
        let field = RemField::new(seed, n)?;
        if shift_mode {
            match spectral::shift_statistic(&field, gamma, lambda, delta) {
                Ok(report) => {
                    csv.row(&[
                        n.to_string(),
                        fmt_f64(gamma),
                        fmt_f64(lambda),
                        fmt_f64(delta),
                        seed.to_string(),
                        report.per_level.len().to_string(),
                        fmt_f64(report.shift_sup),
                        fmt_f64(report.shift_sup_normalized),
                    ]);
                    manifest.point_ok(format!("seed={seed}"));
                }
                Err(e) => manifest.point_failed(format!("seed={seed}"), e),
            }
        } else {
            match spectral::projector_overlap(&field, gamma, lambda, delta) {
                Ok(summary) => {
                    csv.row(&[
                        n.to_string(),
                        fmt_f64(gamma),
                        fmt_f64(lambda),
                        fmt_f64(delta),
                        seed.to_string(),
                        fmt_f64(summary.threshold),
                        summary.trace_above.to_string(),
                        fmt_f64(summary.flat_weight_above()),
                        fmt_f64(summary.flat_decay_rate()),
                        fmt_f64(summary.shift_sup),
                    ]);
                    manifest.point_ok(format!("seed={seed}"));
                }
                Err(e) => manifest.point_failed(format!("seed={seed}"), e),
            }
        }
    }
    emit(csv, out_given, manifest, started)
}

fn cmd_phivec(cfg: &Config, args: PhivecArgs) -> Result<i32> {
    let started = Instant::now();
    let n = cfg.resolve(args.n, "n", 10u32)?;
    let gamma = cfg.resolve(args.gamma, "gamma", 0.2)?;
    let lambda = cfg.resolve(args.lambda, "lambda", 1.0)?;
    let delta = cfg.resolve(args.delta, "delta", 0.8)?;
    let eps = cfg.resolve(args.eps, "eps", 0.2)?;
    let e = cfg
        .resolve_opt(args.e, "e")?
        .unwrap_or(1.05 * lambda * delta * n as f64);
    let k_max = cfg.resolve(args.k_max, "k_max", 2usize)?;
    let seeds = cfg.resolve(args.seeds, "seeds", 1u64)?;
    let out = cfg.resolve_opt(args.out, "out")?;
    let out_given = out.is_some();
    let path = out.unwrap_or_else(|| PathBuf::from("phivec.csv"));

    let mut csv = CsvFile::new(
        &path,
        &[
            "n", "gamma", "lambda", "delta", "eps", "e", "seed", "set_size", "k", "max_abs",
            "bound", "within",
        ],
    );
    let mut manifest = RunManifest::new(
        serde_json::json!({
            "n": n, "gamma": gamma, "lambda": lambda, "delta": delta,
            "eps": eps, "e": e, "k_max": k_max, "seeds": seeds
        }),
        None,
    );
    for seed in 0..seeds {
        let field = RemField::new(seed, n)?;
        let params = spectral::PhiCheckParams {
            gamma,
            lambda,
            delta,
            eps,
            e,
            k_max,
        };
        match spectral::phi_vector_check(&field, params) {
            Ok(report) => {
                for k in 0..=k_max {
                    csv.row(&[
                        n.to_string(),
                        fmt_f64(gamma),
                        fmt_f64(lambda),
                        fmt_f64(delta),
                        fmt_f64(eps),
                        fmt_f64(e),
                        seed.to_string(),
                        report.set_size.to_string(),
                        k.to_string(),
                        fmt_f64(report.max_abs[k]),
                        fmt_f64(report.bounds[k]),
                        (report.max_abs[k] <= report.bounds[k]).to_string(),
                    ]);
                }
                manifest.point_ok(format!("seed={seed}"));
            }
            Err(e) => manifest.point_failed(format!("seed={seed}"), e),
        }
    }
    emit(csv, out_given, manifest, started)
}

fn cmd_validate(args: ValidateArgs) -> Result<i32> {
    let scale = match args.level {
        Level::Quick => Scale::Quick,
        Level::Full => Scale::Full,
    };
    let results = validation::run_all(scale);
    for r in &results {
        println!("{}", r.status_line());
        println!("    {}", r.details);
    }
    let warnings: Vec<String> = results
        .iter()
        .flat_map(|r| {
            r.warnings
                .iter()
                .map(move |w| format!("criterion {}: {w}", r.id))
        })
        .collect();
    if !warnings.is_empty() {
        println!("statistical warnings:");
        for w in &warnings {
            println!("    {w}");
        }
    }
    let all_passed = results.iter().all(|r| r.passed);
    println!(
        "{}: {}/{} criteria passed",
        if all_passed { "PASS" } else { "FAIL" },
        results.iter().filter(|r| r.passed).count(),
        results.len()
    );

    let verdict = serde_json::json!({
        "scale": format!("{scale:?}"),
        "passed": all_passed,
        "criteria": results,
        "warnings": warnings,
    });
    match args.out {
        Some(path) => {
            std::fs::write(&path, serde_json::to_string_pretty(&verdict)?)
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => println!("{}", serde_json::to_string(&verdict)?),
    }
    Ok(if all_passed { 0 } else { 1 })
}
