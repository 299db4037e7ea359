//! `machlimit` command line: gas hypothesis checks, dispersive-decay
//! measurements, single runs, ε-sweeps and rate fits.

use clap::{Parser, Subcommand};
use machlimit::harness::{self, ExperimentConfig};
use machlimit::scaling::ScalingParams;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "machlimit",
    about = "Pseudospectral laboratory for the low-Mach, inviscid limit of a \
             heat-conducting compressible fluid"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the structural hypotheses of the configured gas model
    CheckGas {
        /// Optional config file; defaults apply otherwise
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Measure the sup-norm decay of the acoustic field on a big box
    AcousticDecay {
        #[arg(long)]
        config: PathBuf,
        /// Mach parameter for the study (defaults to 1)
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
    },
    /// Run one experiment at a single ε
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// Run the full ε-sweep of the config
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit a power law to a sweep-table column against eps
    Fit {
        /// CSV table produced by `sweep`
        #[arg(long)]
        table: PathBuf,
        /// column name to fit
        #[arg(long)]
        column: String,
    },
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("machlimit: {err}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch() -> Result<ExitCode, Box<dyn std::error::Error>> {
    let cli = Cli::parse();
    match cli.command {
        Command::CheckGas { config } => {
            let cfg = match config {
                Some(path) => ExperimentConfig::from_path(path)?,
                None => ExperimentConfig::default(),
            };
            let gas = cfg.gas();
            let scaling = ScalingParams::new(
                cfg.eps_list.first().copied().unwrap_or(0.1),
                cfg.a_exp,
                cfg.b_exp,
                cfg.eta,
            );
            let report = gas.verify_hypotheses(scaling.as_ref().ok());
            print!("{report}");
            if report.all_passed() {
                println!("all hypotheses hold");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("failed: {:?}", report.failed_names());
                Ok(ExitCode::FAILURE)
            }
        }
        Command::AcousticDecay { config, eps } => {
            let cfg = ExperimentConfig::from_path(config)?;
            let study = harness::acoustic_decay_study(&cfg, eps)?;
            std::fs::create_dir_all(&cfg.output_dir)?;
            let path = cfg.output_dir.join(format!("decay_eps{eps}.csv"));
            std::fs::write(&path, &study.csv)?;
            println!(
                "fitted decay exponent sigma = {:.4} over {} samples; series in {}",
                study.sigma,
                study.series.len(),
                path.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { config, eps } => {
            let cfg = ExperimentConfig::from_path(config)?;
            let art = harness::run_single(&cfg, eps, true)?;
            let conv = art.final_conv();
            println!(
                "eps = {eps}: sup rel_entropy = {:.6e}, final m3/eps = {:.6e}, \
                 m4 = {:.6e}, m5 = {:.6e}, min r1 gap = {:.3e}",
                art.sup_rel_entropy(),
                conv.m3 / eps,
                conv.m4,
                conv.m5_q1,
                art.min_r1_gap(),
            );
            println!("artifacts in {}", cfg.output_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { config } => {
            let cfg = ExperimentConfig::from_path(config)?;
            let table = harness::run_sweep(&cfg, true)?;
            print!("{}", table.to_csv());
            let failed = table.rows.iter().any(|(_, r)| r.is_err());
            println!("sweep table in {}", cfg.output_dir.join("sweep.csv").display());
            Ok(if failed {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Fit { table, column } => {
            let text = std::fs::read_to_string(&table)?;
            let mut lines = text.lines();
            let header = lines.next().ok_or("empty table")?;
            let cols: Vec<&str> = header.split(',').collect();
            let eps_idx = cols
                .iter()
                .position(|c| *c == "eps")
                .ok_or("no eps column")?;
            let col_idx = cols
                .iter()
                .position(|c| *c == column)
                .ok_or_else(|| format!("no column `{column}`; have {cols:?}"))?;
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for line in lines {
                let parts: Vec<&str> = line.split(',').collect();
                if parts.len() <= col_idx.max(eps_idx) {
                    continue;
                }
                let (Ok(x), Ok(y)) = (parts[eps_idx].parse(), parts[col_idx].parse()) else {
                    continue;
                };
                xs.push(x);
                ys.push(y);
            }
            let (order, r2) = harness::fit_rate(&xs, &ys)?;
            println!("order = {order:.6}, r_squared = {r2:.6}");
            Ok(ExitCode::SUCCESS)
        }
    }
}
