//! Command-line front end: figure-dataset reproduction, generic sweeps,
//! optimal-mode and loss-threshold searches, and oracle validation.
//!
//! Exit codes: 0 success, 2 config error, 3 validation failure,
//! 4 numeric-domain error.

mod config;
mod engine;
mod figures;
mod optimize;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use catalynet::oracle::{self, ValidationLevel};
use catalynet::probes::ProbeFamily;
use catalynet::Error as CoreError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use config::{OutputFormat, SweepConfig};
use report::{fmt_float, library_version, write_json};

#[derive(Parser)]
#[command(
    name = "catalynet",
    version,
    about = "Distributed-network multiphase sensing with catalyzed W-type probes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one figure's dataset (CSV per panel + JSON sidecar + gnuplot script)
    Figure(FigureArgs),
    /// Evaluate metrics over a parameter grid from a JSON config
    Sweep(SweepArgs),
    /// Run one of the searches: modes, theta, eta-crossover, lesr
    Optimize(OptimizeArgs),
    /// Cross-validate every closed form against the Fock oracle
    Validate(ValidateArgs),
}

#[derive(Args)]
struct FigureArgs {
    /// fig2..fig15 or figS2; or `all`
    id: String,
    /// output directory (a subdirectory per figure is created)
    #[arg(long, default_value = "figures")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON config file (see docs/sweep-config.schema.json)
    #[arg(long)]
    config: PathBuf,
    /// override: probe family
    #[arg(long)]
    family: Option<String>,
    /// override: BS angle theta
    #[arg(long)]
    theta: Option<f64>,
    /// override: catalytic photon number
    #[arg(long)]
    m: Option<usize>,
    /// override: number of encoded phases
    #[arg(long)]
    d: Option<usize>,
    /// override: catalyzed-mode count for partial families
    #[arg(long)]
    s: Option<usize>,
    /// override: solve the amplitude from this resource budget
    #[arg(long)]
    n_resource: Option<f64>,
    /// override: transmittance for H_l
    #[arg(long)]
    eta: Option<f64>,
    /// override: output path
    #[arg(long)]
    out: Option<String>,
    /// override: output format (csv | json)
    #[arg(long)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct OptimizeArgs {
    /// search kind
    kind: OptimizeKind,
    #[arg(long, default_value = "pcwc")]
    family: String,
    #[arg(long, default_value_t = 20)]
    d: usize,
    #[arg(long, default_value_t = 5)]
    m: usize,
    /// fixed BS angle where the search does not scan it
    #[arg(long, default_value_t = 5.0 * std::f64::consts::PI / 12.0)]
    theta: f64,
    #[arg(long, default_value_t = 1.0)]
    n_resource: f64,
    /// catalyzed-mode count for partial families
    #[arg(long)]
    s: Option<usize>,
    /// write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OptimizeKind {
    Modes,
    Theta,
    EtaCrossover,
    Lesr,
}

#[derive(Args)]
struct ValidateArgs {
    /// fast: d <= 2, m <= 2; full: d <= 3, m <= 3
    #[arg(long, default_value = "fast")]
    level: LevelArg,
    /// write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

fn configure_threads() {
    if let Ok(v) = std::env::var("CATALYNET_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    // CATALYNET_SEEDLESS is accepted and ignored: the engine is deterministic.
}

fn numeric_error(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::DegenerateCatalysis { .. }
            | CoreError::CutoffTooSmall { .. }
            | CoreError::OrderTooSmall { .. }
            | CoreError::ZeroConstantTerm { .. }
            | CoreError::NullOutcome { .. }
            | CoreError::NonBracketing(_)
            | CoreError::NonPositive { .. }
    )
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match cli.command {
        Command::Figure(args) => run_figure(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Optimize(args) => run_optimize(args),
        Command::Validate(args) => run_validate(args),
    }
}

fn run_figure(args: FigureArgs) -> ExitCode {
    let ids: Vec<&str> = if args.id == "all" {
        figures::FIGURE_IDS.to_vec()
    } else {
        vec![args.id.as_str()]
    };
    for id in ids {
        match figures::write_figure(id, &args.out) {
            Ok(out) => {
                println!("{id}: {} panels -> {}", out.panels.len(), out.dir.display());
            }
            Err(e) => {
                eprintln!("figure {id}: {e}");
                return if e.contains("unknown figure") {
                    ExitCode::from(EXIT_CONFIG)
                } else {
                    ExitCode::from(EXIT_NUMERIC)
                };
            }
        }
    }
    ExitCode::SUCCESS
}

fn apply_overrides(cfg: &mut SweepConfig, args: &SweepArgs) {
    if let Some(f) = &args.family {
        cfg.probe.family = f.clone();
    }
    if let Some(t) = args.theta {
        cfg.probe.theta = t;
    }
    if let Some(m) = args.m {
        cfg.probe.m = m;
    }
    if let Some(d) = args.d {
        cfg.probe.d = d;
        if let Some(r) = cfg.reference.as_mut() {
            r.d = d;
        }
    }
    if let Some(s) = args.s {
        cfg.probe.s = s;
    }
    if let Some(n) = args.n_resource {
        // amplitude solved from the budget at the probe's d
        if let Ok(fam) = ProbeFamily::parse(&cfg.probe.family) {
            use catalynet::probes::{solve_amplitude_for_resource, UncatalyzedFamily};
            let base = if fam.is_coherent() { UncatalyzedFamily::Wc } else { UncatalyzedFamily::Ws };
            if let Ok(amp) = solve_amplitude_for_resource(n, cfg.probe.d, base) {
                cfg.probe.amplitude = amp;
                if let Some(r) = cfg.reference.as_mut() {
                    r.amplitude = amp;
                }
            }
        }
    }
    if let Some(e) = args.eta {
        cfg.eta = e;
    }
    if let Some(o) = &args.out {
        cfg.out = o.clone();
    }
    if let Some(f) = args.format {
        cfg.format = match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
}

fn run_sweep(args: SweepArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config {}: {e}", args.config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let mut cfg: SweepConfig = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config {}: line {} column {}: {e}", args.config.display(), e.line(), e.column());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    apply_overrides(&mut cfg, &args);
    if let Err(e) = cfg.validate() {
        eprintln!("config: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let rows = match engine::run_sweep(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("sweep: {e}");
            return if numeric_error(&e) {
                ExitCode::from(EXIT_NUMERIC)
            } else {
                ExitCode::from(EXIT_CONFIG)
            };
        }
    };
    let header = engine::header(&cfg);
    let out_path = PathBuf::from(&cfg.out);
    let result = match cfg.format {
        OutputFormat::Csv => {
            let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            report::CsvWriter::create(&out_path, &header_refs).and_then(|mut w| {
                for row in &rows {
                    w.row(row)?;
                }
                w.finish()
            })
        }
        OutputFormat::Json => {
            let json_rows: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    let obj: serde_json::Map<String, serde_json::Value> = header
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.clone(), json!(v)))
                        .collect();
                    serde_json::Value::Object(obj)
                })
                .collect();
            write_json(
                &out_path,
                &json!({"library_version": library_version(), "config": cfg, "rows": json_rows}),
            )
            .map(|_| rows.len())
        }
    };
    match result {
        Ok(n) => {
            println!("wrote {n} rows to {}", out_path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("write {}: {e}", out_path.display());
            ExitCode::FAILURE
        }
    }
}

fn run_optimize(args: OptimizeArgs) -> ExitCode {
    let family = match ProbeFamily::parse(&args.family) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("optimize: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let report = match args.kind {
        OptimizeKind::Modes => optimize::run_modes(family, args.d, args.m, args.theta, args.n_resource),
        OptimizeKind::Theta => optimize::run_theta(family, args.d, args.m, args.n_resource),
        OptimizeKind::EtaCrossover => {
            optimize::run_eta_crossover(family, args.d, args.m, args.theta, args.n_resource, args.s)
        }
        OptimizeKind::Lesr => optimize::run_lesr(family, args.d, args.m, args.n_resource, args.s),
    };
    match report {
        Ok(value) => emit_report(&value, args.out.as_deref()),
        Err(e) => {
            eprintln!("optimize: {e}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

fn emit_report(value: &serde_json::Value, out: Option<&std::path::Path>) -> ExitCode {
    match out {
        Some(path) => match write_json(path, value) {
            Ok(()) => {
                println!("wrote {}", path.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("write {}: {e}", path.display());
                ExitCode::FAILURE
            }
        },
        None => {
            println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
            ExitCode::SUCCESS
        }
    }
}

fn run_validate(args: ValidateArgs) -> ExitCode {
    let level = match args.level {
        LevelArg::Fast => ValidationLevel::Fast,
        LevelArg::Full => ValidationLevel::Full,
    };
    let report = match oracle::validate_grid(level) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("validate: {e}");
            return ExitCode::from(EXIT_NUMERIC);
        }
    };
    let value = json!({
        "library_version": library_version(),
        "level": match report.level { ValidationLevel::Fast => "fast", ValidationLevel::Full => "full" },
        "tolerance": report.tolerance,
        "pass": report.pass,
        "grid_points": report.grid_points,
        "quantities": report.quantities.iter().map(|q| json!({
            "quantity": q.quantity,
            "worst_rel_err": q.worst_rel_err,
            "worst_rel_err_str": fmt_float(q.worst_rel_err),
            "worst_case": q.worst_case,
            "points": q.points,
        })).collect::<Vec<_>>(),
    });
    let code = emit_report(&value, args.out.as_deref());
    if code != ExitCode::SUCCESS {
        return code;
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VALIDATION)
    }
}
