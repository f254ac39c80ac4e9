use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use welcher_core::metrics::{evaluate, MetricInputs};
use welcher_core::scenario::{full_pipeline, single_scenario_pipeline, SimMode};
use welcher_core::{DualityMetrics, Scenario};

use welcher::config::{ConfigFile, Overrides};
use welcher::{io, sweep};

#[derive(Parser)]
#[command(
    name = "welcher",
    version,
    about = "Dual-pinhole which-way experiment simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    A,
    B,
    C,
    D,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(name = "1d")]
    OneD,
    #[value(name = "2d")]
    TwoD,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepParam {
    WireThickness,
}

#[derive(Subcommand)]
enum Command {
    /// Run the optical simulation and write summary.json and profiles.
    Simulate {
        #[arg(long, value_enum, default_value = "all")]
        case: CaseArg,
        /// Flat TOML file with geometry and run options.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        grid_n: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also draw a photon stream (written to events.csv).
        #[arg(long)]
        photons: bool,
        /// Photons per second.
        #[arg(long)]
        flux: Option<f64>,
        /// Stream duration, s.
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Visibility and which-way bounds from measured numbers (no simulation).
    Metrics {
        /// Normalized detector count with both pinholes open and the grid in, %.
        #[arg(long, default_value_t = 98.87)]
        w2: f64,
        /// Wrong-detector count with one pinhole blocked, %.
        #[arg(long, default_value_t = 0.46)]
        leak: f64,
        /// Fraction of the light stopped by the grid.
        #[arg(long, default_value_t = 0.01)]
        blocked_frac: f64,
        /// Airy disk radius at the wire plane, mm.
        #[arg(long, default_value_t = 10.7)]
        airy_radius: f64,
        /// Wire thickness, mm.
        #[arg(long, default_value_t = 0.127)]
        wire_t: f64,
        /// Fringe constant, 1/mm.
        #[arg(long, default_value_t = 2.462)]
        b: f64,
        #[arg(long, default_value_t = 6)]
        wire_count: usize,
    },
    /// Tabulate the visibility bounds over a parameter range as CSV.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Start value, mm.
        #[arg(long)]
        from: f64,
        /// End value, mm.
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// Run cases a and b at every step as well.
        #[arg(long)]
        simulate: bool,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct MetricsReport {
    inputs: MetricInputs,
    metrics: DualityMetrics,
}

fn load_config(path: Option<&PathBuf>) -> Result<ConfigFile> {
    Ok(match path {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            case,
            config,
            out,
            grid_n,
            mode,
            seed,
            photons,
            flux,
            duration,
        } => {
            let overrides = Overrides {
                grid_n,
                mode: mode.map(|m| match m {
                    ModeArg::OneD => SimMode::OneD,
                    ModeArg::TwoD => SimMode::TwoD,
                }),
                seed,
                photons,
                flux,
                duration,
            };
            let run = load_config(config.as_ref())?.resolve(&overrides);
            let output = match case {
                CaseArg::All => full_pipeline(&run.geometry, &run.options),
                single => {
                    let s = match single {
                        CaseArg::A => Scenario::A,
                        CaseArg::B => Scenario::B,
                        CaseArg::C => Scenario::C,
                        CaseArg::D => Scenario::D,
                        CaseArg::All => unreachable!(),
                    };
                    single_scenario_pipeline(&run.geometry, s, &run.options)
                }
            }
            .context("simulation failed")?;
            for path in io::write_outputs(&output, &out)? {
                log::info!("wrote {}", path.display());
            }
        }
        Command::Metrics {
            w2,
            leak,
            blocked_frac,
            airy_radius,
            wire_t,
            b,
            wire_count,
        } => {
            let inputs = MetricInputs {
                w2,
                leak_b: leak,
                w1: w2,
                leak_a: leak,
                blocked_fraction: blocked_frac,
                airy_radius_mm: airy_radius,
                wire_thickness_mm: wire_t,
                wire_count,
                fringe_constant_per_mm: b,
            };
            let metrics = evaluate(&inputs, None)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&MetricsReport { inputs, metrics })?
            );
        }
        Command::Sweep {
            param: SweepParam::WireThickness,
            from,
            to,
            steps,
            simulate,
            config,
            out,
        } => {
            let run = load_config(config.as_ref())?.resolve(&Overrides::default());
            let ts = sweep::thicknesses(from, to, steps)?;
            let rows = sweep::wire_thickness_sweep(&run.geometry, &run.options, &ts, simulate)?;
            io::write_rows(&rows, out.as_deref())?;
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
