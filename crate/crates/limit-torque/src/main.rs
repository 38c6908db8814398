use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use limit_torque::runner::{self, EXIT_CONFIG};
use limit_torque::scenario::{preset, ScenarioConfig, PRESET_NAMES};

#[derive(Parser)]
#[command(
    name = "limit-torque",
    about = "Batch experiments for joint-limit-avoiding torque control",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write its trace CSV and metrics JSON.
    Run { config: PathBuf },
    /// Run one of the built-in presets (or emit its config instead).
    Preset {
        /// One of the built-in names; pass an unknown name to list them.
        name: String,
        /// Print the preset's JSON config to stdout instead of running it.
        #[arg(long)]
        emit_config: bool,
    },
    /// Re-run a scenario over a list of control periods.
    Sweep {
        config: PathBuf,
        /// Comma-separated control periods in seconds, e.g. 1e-2,1e-3,1e-4.
        #[arg(long, value_delimiter = ',', required = true)]
        dts: Vec<f64>,
    },
    /// Check the gain conditions of a scenario's controller.
    ValidateGains { config: PathBuf },
    /// Audit the desired trajectory's feasibility against the limits.
    Audit { config: PathBuf },
}

fn load(path: &Path) -> Result<ScenarioConfig, i32> {
    ScenarioConfig::from_path(path).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_CONFIG
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config } => runner::run_path(&config),
        Command::Preset { name, emit_config } => match preset(&name) {
            Ok(cfg) => {
                if emit_config {
                    print!("{}", cfg.to_json_pretty());
                    0
                } else {
                    runner::run_config(&cfg)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                eprintln!("available presets: {}", PRESET_NAMES.join(", "));
                EXIT_CONFIG
            }
        },
        Command::Sweep { config, dts } => match load(&config) {
            Err(code) => code,
            Ok(cfg) => match runner::run_sweep(&cfg, &dts) {
                Ok((rows, path)) => {
                    println!("sweep table: {}", path.display());
                    for r in &rows {
                        println!(
                            "dt={:<8.0e} vel overshoot={:<12.5e} osc index={:<12.5e} converged={} diverged={}",
                            r.dt_control,
                            r.max_velocity_overshoot,
                            r.torque_oscillation_index,
                            r.converged,
                            r.diverged
                        );
                    }
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_CONFIG
                }
            },
        },
        Command::ValidateGains { config } => match load(&config).and_then(|cfg| {
            // Compile without the gain gate so invalid sets can be inspected.
            let mut cfg = cfg;
            cfg.controller.allow_invalid_gains = true;
            cfg.compile().map_err(|e| {
                eprintln!("error: {e}");
                EXIT_CONFIG
            })
        }) {
            Err(code) => code,
            Ok(built) => {
                let report = limit_torque::validate_gains(&built.selection.gains);
                for (i, m) in report.schur_margins.iter().enumerate() {
                    println!("joint {}: schur margin {m:.6}", i + 1);
                }
                if report.pass {
                    println!("gain set: PASS");
                    0
                } else {
                    for issue in &report.issues {
                        println!("issue: {issue}");
                    }
                    println!("gain set: FAIL");
                    1
                }
            }
        },
        Command::Audit { config } => match load(&config).and_then(|cfg| {
            cfg.compile().map_err(|e| {
                eprintln!("error: {e}");
                EXIT_CONFIG
            })
        }) {
            Err(code) => code,
            Ok(built) => {
                let report = built
                    .spec
                    .audit_feasibility(&built.lim, built.sim.duration, 1e-3)
                    .expect("dimensions already validated");
                for i in 0..built.lim.n() {
                    println!(
                        "joint {}: position margin {:.3} deg, velocity margin {:.3} deg/s",
                        i + 1,
                        report.position_margins[i].to_degrees(),
                        report.velocity_margins[i].to_degrees()
                    );
                }
                if report.feasible {
                    println!("desired trajectory: FEASIBLE");
                    0
                } else {
                    println!("desired trajectory: INFEASIBLE (controller will saturate it)");
                    1
                }
            }
        },
    };
    ExitCode::from(code as u8)
}
