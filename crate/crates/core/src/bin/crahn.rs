//! Command-line driver. Powers are in mW, distances in m, time in frames.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crahn::epidemic::{integrate, EpidemicConfig, EpidemicState, Recovery, Scheme};
use crahn::experiment::{
    dynamics_csv, key_value_csv, reproduce_figures, run_sweep, summary_csv, trajectory_csv,
    ExperimentSpec, TimerAxis, DESK_ROUNDS, FULL_ROUNDS,
};
use crahn::planner::{self, DEFAULT_BETA_TH};
use crahn::simulator::{self, SimConfig};
use crahn::{spectrum, Error, Result, SystemParams, ValidatedParams};

#[derive(Parser)]
#[command(
    name = "crahn",
    version,
    about = "Recovery-assisted flooding in cognitive radio ad hoc networks"
)]
#[command(
    after_help = "Units: powers in mW, distances in m, densities in nodes/m^2, time in frames.\n\
Exit codes: 0 ok, 2 config error, 3 infeasible parameters, 4 numerical failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key = value parameter file; omitted keys keep the reference values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the derived access quantities as key,value rows.
    Derive {
        #[command(flatten)]
        common: Common,
    },
    /// Integrate the flooding ODE and print t,S,I,R,P.
    Ode {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "static")]
        scheme: Scheme,
        #[arg(long, default_value = "hybrid")]
        recovery: Recovery,
        #[arg(long, default_value_t = 65.0)]
        timer: f64,
        /// Print every n-th grid point (h = 0.01 frame).
        #[arg(long, default_value_t = 100)]
        stride: usize,
    },
    /// Pick the SU power and global timer.
    Plan {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "static")]
        scheme: Scheme,
        /// Allowed non-delivery probability at the timer.
        #[arg(long, default_value_t = 0.05)]
        eps_t: f64,
        #[arg(long, default_value_t = DEFAULT_BETA_TH)]
        beta_th: f64,
    },
    /// Monte Carlo simulation. Writes dynamics to --out and the summary next
    /// to it as <stem>_summary.csv.
    Sim {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "static")]
        scheme: Scheme,
        #[arg(long, default_value = "hybrid")]
        recovery: Recovery,
        #[arg(long, default_value_t = 65)]
        timer: u32,
        #[arg(long, default_value_t = DESK_ROUNDS)]
        rounds: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Run rounds on one thread.
        #[arg(long)]
        serial: bool,
    },
    /// ODE and simulation over a range of timers.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "static")]
        scheme: Scheme,
        /// start:end:step in frames.
        #[arg(long, default_value = "5:65:5")]
        timers: TimerAxis,
        #[arg(long, default_value_t = DESK_ROUNDS)]
        rounds: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        serial: bool,
    },
    /// Write the four figure CSVs and a summary into a directory.
    Figures {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "figures")]
        out_dir: PathBuf,
        #[arg(long)]
        rounds: Option<u32>,
        /// Use the full-scale round count.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn load(config: Option<&Path>) -> Result<ValidatedParams> {
    match config {
        Some(path) => SystemParams::from_config_file(path)?.validate(),
        None => SystemParams::reference().validate(),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn summary_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sim");
    path.with_file_name(format!("{stem}_summary.csv"))
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Derive { common } => {
            let p = load(common.config.as_deref())?;
            let d = spectrum::derive(&p)?;
            emit(common.out.as_deref(), &key_value_csv(&p, &d.rows()))
        }
        Command::Ode {
            common,
            scheme,
            recovery,
            timer,
            stride,
        } => {
            let p = load(common.config.as_deref())?;
            let d = spectrum::derive(&p)?;
            let cfg = EpidemicConfig::from_derived(&p, &d, timer, scheme).with_recovery(recovery);
            let traj = integrate(&cfg, &EpidemicState::initial(p.relay_population()))?;
            emit(common.out.as_deref(), &trajectory_csv(&p, &traj, stride))
        }
        Command::Plan {
            common,
            scheme,
            eps_t,
            beta_th,
        } => {
            let p = load(common.config.as_deref())?;
            let plan = planner::plan(&p, eps_t, beta_th, scheme)?;
            emit(common.out.as_deref(), &key_value_csv(&p, &plan.rows()))
        }
        Command::Sim {
            common,
            scheme,
            recovery,
            timer,
            rounds,
            seed,
            serial,
        } => {
            let p = load(common.config.as_deref())?;
            let mut cfg = SimConfig::new(p, scheme, recovery, timer, rounds, seed)?;
            cfg.parallel = !serial;
            let metrics = simulator::run(&cfg)?;
            match common.out.as_deref() {
                Some(path) => {
                    fs::write(path, dynamics_csv(&p, &metrics))?;
                    fs::write(summary_path(path), summary_csv(&p, &metrics))?;
                    Ok(())
                }
                None => {
                    emit(None, &dynamics_csv(&p, &metrics))?;
                    emit(None, &summary_csv(&p, &metrics))
                }
            }
        }
        Command::Sweep {
            common,
            scheme,
            timers,
            rounds,
            seed,
            serial,
        } => {
            let p = load(common.config.as_deref())?;
            let mut spec = ExperimentSpec::new(p, scheme, timers, rounds, seed);
            spec.parallel = !serial;
            match common.out.as_deref() {
                Some(path) => {
                    let mut file = io::BufWriter::new(fs::File::create(path)?);
                    run_sweep(&spec, &mut file)?;
                }
                None => {
                    run_sweep(&spec, &mut io::stdout().lock())?;
                }
            }
            Ok(())
        }
        Command::Figures {
            config,
            out_dir,
            rounds,
            full,
            seed,
        } => {
            let p = load(config.as_deref())?;
            let rounds = rounds.unwrap_or(if full { FULL_ROUNDS } else { DESK_ROUNDS });
            let files = reproduce_figures(&p, rounds, seed, &out_dir)?;
            for path in [
                &files.fig4,
                &files.fig5,
                &files.fig6,
                &files.fig7,
                &files.summary,
            ] {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    e.exit_code() as u8
}
