//! `lyochaos`: freeze-drying simulation, uncertainty quantification and
//! chance-constrained design from the command line.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lyochaos::studies::{BenchmarkCase, Method, ModelKind, DEFAULT_REPETITIONS};
use lyochaos::{Error, Result};

use config::{FileConfig, FlagOverrides, RunConfig};
use output::OutputDir;

#[derive(Parser)]
#[command(name = "lyochaos", version, about = "Freeze-drying simulation with polynomial chaos uncertainty quantification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pce,
    Mc,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Pce => Method::Pce,
            MethodArg::Mc => Method::Mc,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Args, Clone)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model parameter file (TOML).
    #[arg(long)]
    params: Option<PathBuf>,
    /// Process conditions file (TOML).
    #[arg(long)]
    conditions: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Model runs: PCE fitting samples or MC ensemble size, per --method.
    #[arg(long)]
    samples: Option<usize>,
    /// Total polynomial order.
    #[arg(long)]
    order: Option<usize>,
    /// Spatial grid nodes.
    #[arg(long)]
    nodes: Option<usize>,
    /// Override one parameter or condition, e.g. `--set h=20` or `--set conditions.T_b=300`.
    #[arg(long = "set", value_parser = parse_assignment)]
    set: Vec<(String, f64)>,
    /// Suppress the terminal report.
    #[arg(long, short)]
    quiet: bool,
}

fn parse_assignment(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("`{v}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Args, Clone)]
struct SimArgs {
    /// Simulated span in hours.
    #[arg(long)]
    t_end: Option<f64>,
    /// Output points.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Deterministic primary drying run.
    SimulatePrimary {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Deterministic secondary drying run.
    SimulateSecondary {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
        /// Bound-water target for the reported drying time (wt/wt).
        #[arg(long)]
        target: Option<f64>,
    },
    /// Uncertainty propagation for a case preset.
    Uq {
        #[command(flatten)]
        common: Common,
        /// Case preset (a1 or a2; default a2).
        #[arg(long)]
        case: Option<String>,
    },
    /// Vary one input and pin the others at their nominal values.
    Oat {
        #[command(flatten)]
        common: Common,
        /// Case preset (default a2).
        #[arg(long)]
        case: Option<String>,
        /// Name of the input to vary.
        #[arg(long)]
        input: String,
    },
    /// Minimum shelf temperature meeting the drying-time chance constraint.
    Design {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        design: DesignArgs,
    },
    /// Minimum drying time over the allowed shelf temperatures.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        design: DesignArgs,
    },
    /// Time PCE and MC on the case presets.
    Benchmark {
        #[command(flatten)]
        common: Common,
        /// Cases to time, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "a1,a2")]
        case: Vec<BenchmarkCase>,
        #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
        reps: usize,
    },
}

#[derive(Args, Clone)]
struct DesignArgs {
    /// Required probability of meeting the target.
    #[arg(long)]
    probability: Option<f64>,
    /// Bound-water target (wt/wt).
    #[arg(long)]
    concentration: Option<f64>,
    /// Target drying time in hours (design only).
    #[arg(long)]
    target_time: Option<f64>,
    /// Lower shelf-temperature bound (K).
    #[arg(long)]
    tb_lower: Option<f64>,
    /// Upper shelf-temperature bound (K).
    #[arg(long)]
    tb_upper: Option<f64>,
}

fn flags(c: &Common, preset: Option<&str>) -> FlagOverrides {
    FlagOverrides {
        preset: preset.map(str::to_string),
        params: c.params.clone(),
        conditions: c.conditions.clone(),
        seed: c.seed,
        method: c.method.map(Into::into),
        samples: c.samples,
        order: c.order,
        nodes: c.nodes,
        set: c.set.clone(),
    }
}

fn load(
    command: &str,
    c: &Common,
    default_preset: &str,
    preset: Option<&str>,
    model: Option<ModelKind>,
) -> Result<(RunConfig, OutputDir)> {
    let file = c.config.as_deref().map(FileConfig::load).transpose()?;
    let cfg = config::resolve(command, default_preset, file, &flags(c, preset), model)?;
    Ok((cfg, OutputDir::create(&c.out)?))
}

fn apply_sim(cfg: &mut RunConfig, sim: &SimArgs) -> Result<()> {
    if let Some(h) = sim.t_end {
        cfg.simulation.t_end = h * 3600.0;
    }
    if let Some(p) = sim.points {
        cfg.simulation.points = p;
    }
    if cfg.simulation.points < 2 || !(cfg.simulation.t_end > 0.0) {
        return Err(Error::Config("--t-end must be positive and --points at least 2".into()));
    }
    Ok(())
}

fn apply_design(cfg: &mut RunConfig, d: &DesignArgs) -> Result<()> {
    let t = &mut cfg.study.design;
    if let Some(p) = d.probability {
        t.probability = p;
    }
    if let Some(c) = d.concentration {
        t.concentration = c;
    }
    if let Some(h) = d.target_time {
        t.target_time = h * 3600.0;
    }
    if let Some(v) = d.tb_lower {
        t.tb_lower = v;
    }
    if let Some(v) = d.tb_upper {
        t.tb_upper = v;
    }
    cfg.study.validate()
}

/// Design runs use one method; `both` is not meaningful there.
fn single_method(c: &Common) -> Result<()> {
    if matches!(c.method, Some(MethodArg::Both)) {
        return Err(Error::Config("design and optimize need --method pce or --method mc".into()));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(String, bool)> {
    match cli.command {
        Command::SimulatePrimary { common, sim } => {
            let (mut cfg, out) = load("simulate-primary", &common, "a1", None, Some(ModelKind::Primary))?;
            apply_sim(&mut cfg, &sim)?;
            Ok((commands::simulate_primary_cmd(&cfg, &out)?, common.quiet))
        }
        Command::SimulateSecondary { common, sim, target } => {
            let (mut cfg, out) = load("simulate-secondary", &common, "a2", None, Some(ModelKind::Secondary))?;
            apply_sim(&mut cfg, &sim)?;
            if let Some(t) = target {
                if !(t >= 0.0) {
                    return Err(Error::Config("--target must be non-negative".into()));
                }
                cfg.simulation.target = t;
            }
            Ok((commands::simulate_secondary_cmd(&cfg, &out)?, common.quiet))
        }
        Command::Uq { common, case } => {
            let (cfg, out) = load("uq", &common, "a2", case.as_deref(), None)?;
            Ok((commands::uq_cmd(&cfg, &out)?, common.quiet))
        }
        Command::Oat { common, case, input } => {
            let (cfg, out) = load("oat", &common, "a2", case.as_deref(), None)?;
            Ok((commands::oat_cmd(&cfg, &out, &input)?, common.quiet))
        }
        Command::Design { common, design } => {
            single_method(&common)?;
            let (mut cfg, out) = load("design", &common, "b1", None, None)?;
            apply_design(&mut cfg, &design)?;
            Ok((commands::design_cmd(&cfg, &out)?, common.quiet))
        }
        Command::Optimize { common, design } => {
            single_method(&common)?;
            let (mut cfg, out) = load("optimize", &common, "b2", None, None)?;
            apply_design(&mut cfg, &design)?;
            Ok((commands::optimize_cmd(&cfg, &out)?, common.quiet))
        }
        Command::Benchmark { common, case, reps } => {
            if reps == 0 {
                return Err(Error::Config("--reps must be positive".into()));
            }
            let (cfg, out) = load("benchmark", &common, "a2", None, None)?;
            Ok((commands::benchmark_cmd(&cfg, &out, &case, reps)?, common.quiet))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidParameters(_) | Error::Io(_) => 2,
        Error::Fit(_) => 4,
        Error::Infeasible(_) => 5,
        _ => 3,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((report, quiet)) => {
            if !quiet {
                println!("{report}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
