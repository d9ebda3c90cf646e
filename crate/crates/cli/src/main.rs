use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use epistemic_core::gaussian::Quadrature;
use epistemic_core::report::{
    emit, run, Command, Format, MzModel, NumberMode, Phase, ReportDocument, RunConfig,
    DEFAULT_TOLERANCE, REPORT_DIR_ENV,
};

/// Verification suites for ontological models of quantum theory.
#[derive(Debug, Parser)]
#[command(name = "epistemic", version, propagate_version = true)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Absolute tolerance for floating-point comparisons.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Exact checks on the toy theory and the CHSH comparison.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Side-by-side quantum and toy simulations.
    Simulate {
        #[command(subcommand)]
        target: SimTarget,
    },
    /// Finite-instance searches behind the no-go theorems.
    Nogo {
        #[command(subcommand)]
        theorem: Nogo,
    },
    /// Epistemically restricted Gaussian states.
    Gaussian {
        #[command(subcommand)]
        task: GaussianTask,
    },
    /// Re-runs the configuration stored in a report and compares the checks.
    Replay { report: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    ToyBorn,
    Noncomm,
    CombineTable,
    Steering,
    NoSignaling,
    Chsh,
}

#[derive(Debug, Subcommand)]
enum SimTarget {
    /// Mach–Zehnder interferometer in the quantum and toy descriptions.
    Mz {
        #[arg(long, value_enum, default_value_t = PhaseArg::Pi)]
        phase: PhaseArg,
        #[arg(long, value_enum, default_value_t = ModelArg::Both)]
        model: ModelArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PhaseArg {
    Pi,
    #[value(name = "0")]
    Zero,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Quantum,
    Toy,
    Both,
}

#[derive(Debug, Subcommand)]
enum Nogo {
    /// Finite-grid search for a model of the PBR measurement with overlap.
    Pbr {
        #[arg(long, default_value_t = 4)]
        lambda_size: usize,
        #[arg(long, default_value_t = 4)]
        grid_denominator: u32,
        /// Overlap threshold as p/q.
        #[arg(long, default_value = "1/4")]
        q: String,
        /// Maximal null-outcome probability per preparation; 0 disables.
        #[arg(long, default_value = "1/2")]
        null_budget: String,
        /// Sample correlated joint distributions instead of products.
        #[arg(long)]
        relax_product: bool,
    },
    /// Exhaustive possibilistic search for Hardy's interferometer.
    Hardy {
        #[arg(long, default_value_t = 4)]
        lambda_size: usize,
        /// Allow phase-dependent flags on the upper-arm support.
        #[arg(long)]
        drop_invar: bool,
    },
}

#[derive(Debug, Subcommand)]
enum GaussianTask {
    /// Two-mode squeezed state and Alice's measurement update.
    Epr {
        #[arg(long, default_value_t = 3.0)]
        squeeze: f64,
        /// The free parameter playing the role of ħ.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, value_enum, default_value_t = QuadratureArg::Q)]
        measure: QuadratureArg,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        value: f64,
    },
    /// The fixed battery of Gaussian checks.
    Suite,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum QuadratureArg {
    Q,
    P,
}

fn command_for(verb: &Verb) -> Option<Command> {
    Some(match verb {
        Verb::Verify { suite } => match suite {
            Suite::ToyBorn => Command::ToyBorn,
            Suite::Noncomm => Command::Noncomm,
            Suite::CombineTable => Command::CombineTable,
            Suite::Steering => Command::Steering,
            Suite::NoSignaling => Command::NoSignaling,
            Suite::Chsh => Command::Chsh,
        },
        Verb::Simulate { target: SimTarget::Mz { phase, model } } => Command::Mz {
            phase: match phase {
                PhaseArg::Pi => Phase::Pi,
                PhaseArg::Zero => Phase::Zero,
            },
            model: match model {
                ModelArg::Quantum => MzModel::Quantum,
                ModelArg::Toy => MzModel::Toy,
                ModelArg::Both => MzModel::Both,
            },
        },
        Verb::Nogo { theorem } => match theorem {
            Nogo::Pbr { lambda_size, grid_denominator, q, null_budget, relax_product } => Command::Pbr {
                lambda_size: *lambda_size,
                grid_denominator: *grid_denominator,
                q: q.clone(),
                null_budget: null_budget.clone(),
                relax_product: *relax_product,
            },
            Nogo::Hardy { lambda_size, drop_invar } => {
                Command::Hardy { lambda_size: *lambda_size, drop_invar: *drop_invar }
            }
        },
        Verb::Gaussian { task } => match task {
            GaussianTask::Epr { squeeze, lambda, measure, value } => Command::GaussianEpr {
                squeeze: *squeeze,
                lambda: *lambda,
                measure: match measure {
                    QuadratureArg::Q => Quadrature::Position,
                    QuadratureArg::P => Quadrature::Momentum,
                },
                value: *value,
            },
            GaussianTask::Suite => Command::GaussianSuite,
        },
        Verb::Replay { .. } => return None,
    })
}

fn verb_name(command: &Command) -> String {
    serde_json::to_value(command)
        .ok()
        .and_then(|v| v.get("verb").and_then(|s| s.as_str()).map(String::from))
        .unwrap_or_else(|| "report".into())
}

/// The explicit path, else a file in the report directory, else stdout.
fn destination(global: &GlobalArgs, command: &Command) -> Option<PathBuf> {
    if let Some(path) = &global.output {
        return Some(path.clone());
    }
    let dir = std::env::var_os(REPORT_DIR_ENV)?;
    let ext = match global.format {
        FormatArg::Json => "json",
        FormatArg::Text => "txt",
    };
    Some(PathBuf::from(dir).join(format!("{}-seed{}.{ext}", verb_name(command), global.seed)))
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .with_context(|| format!("creating {}", parent.display()))?;
            }
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn replay(path: &PathBuf, global: &GlobalArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let stored = ReportDocument::from_json(&text).context("parsing report")?;
    let fresh = run(&stored.config);
    let identical = fresh.without_timing() == stored.without_timing();
    let format = match global.format {
        FormatArg::Json => Format::Json,
        FormatArg::Text => Format::Text,
    };
    write_out(global.output.as_ref(), &emit(&fresh, format))?;
    eprintln!("replay {}", if identical { "matches the stored report" } else { "differs from the stored report" });
    Ok(if identical && fresh.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    let Some(command) = command_for(&cli.verb) else {
        let Verb::Replay { report } = &cli.verb else { unreachable!("only replay has no command") };
        return replay(report, &cli.global);
    };
    let destination = destination(&cli.global, &command);
    let config = RunConfig {
        command,
        seed: cli.global.seed,
        mode: match cli.global.mode {
            ModeArg::Exact => NumberMode::Exact,
            ModeArg::Float => NumberMode::Float,
        },
        tolerance: cli.global.tolerance,
        output: destination.as_ref().map(|p| p.display().to_string()),
    };
    let report = run(&config);
    let format = match cli.global.format {
        FormatArg::Json => Format::Json,
        FormatArg::Text => Format::Text,
    };
    write_out(destination.as_ref(), &emit(&report, format))?;
    Ok(ExitCode::from(u8::try_from(report.exit_code()).unwrap_or(1)))
}
