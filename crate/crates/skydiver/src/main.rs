use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use skydiver::cli::{self, InputSource, OUT_DIR_ENV};
use skydiver::sim::{HwConfig, RateSource, ScheduleKind};

/// Spiking-CNN accelerator workload simulator.
///
/// Exit codes: 0 success, 2 usage error, 3 data/format error,
/// 4 model/shape error.
#[derive(Parser)]
#[command(name = "skydiver", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic network (seeded Gaussian weights).
    Gen {
        /// Layer spec, e.g. "12x12x3-8C3-16C3-1C3" or "28x28-16c-32c-10".
        #[arg(long)]
        layers: String,
        #[arg(long)]
        seed: u64,
        /// Weight standard deviation.
        #[arg(long, default_value_t = 0.5)]
        sigma: f32,
        /// Output network JSON path (weight blob lands alongside).
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate one schedule mode and write report files.
    Run {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum, default_value_t = ScheduleArg::Baseline)]
        schedule: ScheduleArg,
        /// Apply the full-padding/stride-1 transform before running.
        #[arg(long, value_enum, default_value_t = OnOff::Off)]
        aprc: OnOff,
        /// Where channel-workload weights come from for cbws.
        #[arg(long, value_enum, default_value_t = RatesArg::Predicted)]
        rates: RatesArg,
        #[command(flatten)]
        hw: HwArgs,
    },
    /// Run the {baseline, cbws} × {aprc off, on} matrix into one CSV.
    Compare {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        hw: HwArgs,
    },
    /// Emit per-layer spikerates and per-channel spike distributions.
    Profile {
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Args)]
struct IoArgs {
    /// Network JSON file (from `gen`).
    #[arg(long)]
    net: PathBuf,
    /// Bit-packed spike trace input (timesteps come from the file).
    #[arg(long, conflicts_with_all = ["images", "density"])]
    input: Option<PathBuf>,
    /// IDX image file; the image at --image-index is rate-encoded.
    #[arg(long, conflicts_with = "density")]
    images: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    image_index: usize,
    /// Synthetic Bernoulli input density in [0, 1].
    #[arg(long)]
    density: Option<f64>,
    #[arg(long, default_value_t = 50)]
    timesteps: usize,
    /// Seed for every stochastic path (encoding, synthetic inputs).
    #[arg(long)]
    seed: u64,
    /// Output directory; falls back to $SKYDIVER_OUT_DIR, then ".".
    #[arg(long)]
    out: Option<PathBuf>,
}

impl IoArgs {
    fn source(&self) -> InputSource {
        if let Some(path) = &self.input {
            InputSource::Trace(path.clone())
        } else if let Some(path) = &self.images {
            InputSource::Idx {
                path: path.clone(),
                index: self.image_index,
            }
        } else {
            InputSource::Random {
                density: self.density.unwrap_or(0.3),
            }
        }
    }

    fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

#[derive(Args)]
struct HwArgs {
    /// Channel-based SPEs per cluster (partition width N).
    #[arg(long, default_value_t = 4)]
    spes: usize,
    #[arg(long, default_value_t = 4)]
    streams: usize,
    #[arg(long, default_value_t = 8)]
    clusters: usize,
    #[arg(long, default_value_t = 200e6)]
    clock_hz: f64,
}

impl HwArgs {
    fn config(&self) -> HwConfig {
        HwConfig {
            clusters: self.clusters,
            spes_per_cluster: self.spes,
            streams: self.streams,
            clock_hz: self.clock_hz,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Baseline,
    Cbws,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum RatesArg {
    /// Upstream filter magnitudes (measured rates for layer 0).
    Predicted,
    /// Spike counts measured by a functional pre-run.
    Measured,
}

fn run(cli: Cli) -> skydiver::Result<()> {
    match cli.command {
        Command::Gen {
            layers,
            seed,
            sigma,
            out,
        } => {
            cli::cmd_gen(&layers, seed, sigma, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Run {
            io,
            schedule,
            aprc,
            rates,
            hw,
        } => {
            let outcome = cli::cmd_run(
                &io.net,
                &io.source(),
                io.timesteps,
                io.seed,
                match schedule {
                    ScheduleArg::Baseline => ScheduleKind::Baseline,
                    ScheduleArg::Cbws => ScheduleKind::Cbws,
                },
                matches!(aprc, OnOff::On),
                match rates {
                    RatesArg::Predicted => RateSource::AprcPredicted,
                    RatesArg::Measured => RateSource::OracleMeasured,
                },
                &hw.config(),
                &io.out_dir(),
            )?;
            let mean = skydiver::sim::mean_balance_ratio(&outcome.report);
            println!(
                "mode {}: {} cycles, mean balance ratio {}",
                outcome.report.mode,
                outcome.report.total_cycles,
                mean.map_or("n/a".into(), |r| format!("{r:.4}")),
            );
            println!("wrote {} and {}", outcome.json_path.display(), outcome.csv_path.display());
        }
        Command::Compare { io, hw } => {
            let out = io.out_dir().join("compare.csv");
            let outcome = cli::cmd_compare(
                &io.net,
                &io.source(),
                io.timesteps,
                io.seed,
                &hw.config(),
                &out,
            )?;
            for (label, report) in &outcome.reports {
                let mean = skydiver::sim::mean_balance_ratio(report);
                println!(
                    "{label}: {} cycles, mean balance ratio {}",
                    report.total_cycles,
                    mean.map_or("n/a".into(), |r| format!("{r:.4}")),
                );
            }
            println!("wrote {}", outcome.csv_path.display());
        }
        Command::Profile { io } => {
            let outcome =
                cli::cmd_profile(&io.net, &io.source(), io.timesteps, io.seed, &io.out_dir())?;
            println!(
                "wrote {} and {}",
                outcome.layers_csv.display(),
                outcome.channels_csv.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
