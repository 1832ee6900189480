use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fdrfnr_harness::config::RawConfig;
use fdrfnr_harness::curves::write_curves;
use fdrfnr_harness::decide::{decide_text, read_observations, run_decide};
use fdrfnr_harness::plot::{emit_plot, PlotKind};
use fdrfnr_harness::simulate::write_simulation;
use fdrfnr_harness::spec::{parse_alphas, parse_model, parse_null, parse_procedure};
use fdrfnr_harness::Result;

#[derive(Parser)]
#[command(name = "fdrfnr", version, about = "Optimal FDR/FNR tradeoff curves and multiple-testing simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate mFNR*, FNR* and the oracle split over an alpha grid
    Curves {
        /// gaussian(mu=..), usqrt, ustep(cut=..) or ucustom(file=..)
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 0.75)]
        pi0: f64,
        /// start:stop:step or a comma-separated list
        #[arg(long, default_value = "0:1:0.01")]
        alphas: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo comparison of procedures from a key=value config file
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// worker threads (default: one per core)
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        pi0: Option<f64>,
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        procedures: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Apply one procedure to observations read one per line
    Decide {
        #[arg(long = "in")]
        input: PathBuf,
        /// np, oracle, trivial, bh, suncai or datadriven(est=..)
        #[arg(long = "proc")]
        procedure: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        pi0: f64,
        /// uniform or normal
        #[arg(long)]
        null: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// generating model, required by np, oracle and est=oracle
        #[arg(long)]
        model: Option<String>,
        /// output file (default: standard output)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a curves or simulation CSV as SVG
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Curves,
    Simulation,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Curves { model, pi0, alphas, out } => {
            let model = parse_model(&model, pi0, Path::new("."))?;
            let alphas = parse_alphas(&alphas)?;
            for p in write_curves(&model, &alphas, &out)? {
                eprintln!("wrote {}", p.display());
            }
        }
        Command::Simulate {
            config,
            seed,
            threads,
            out,
            model,
            pi0,
            alphas,
            procedures,
            n,
            trials,
        } => {
            let mut raw = RawConfig::read(&config)?;
            let overrides = [
                ("seed", seed.map(|v| v.to_string())),
                ("threads", threads.map(|v| v.to_string())),
                ("out", out.map(|v| v.display().to_string())),
                ("model", model),
                ("pi0", pi0.map(|v| v.to_string())),
                ("alphas", alphas),
                ("procedures", procedures),
                ("n", n.map(|v| v.to_string())),
                ("trials", trials.map(|v| v.to_string())),
            ];
            for (k, v) in overrides {
                if let Some(v) = v {
                    raw.set(k, &v)?;
                }
            }
            let cfg = raw.build()?;
            let rows = write_simulation(&cfg)?;
            eprintln!("wrote {} rows to {}", rows.len(), cfg.out.display());
        }
        Command::Decide {
            input,
            procedure,
            alpha,
            pi0,
            null,
            seed,
            model,
            out,
        } => {
            let null = parse_null(&null)?;
            let choice = parse_procedure(&procedure, null)?;
            let model = model.map(|m| parse_model(&m, pi0, Path::new("."))).transpose()?;
            let obs = read_observations(&input)?;
            let result = run_decide(&obs, &choice, alpha, pi0, null, model.as_ref(), seed)?;
            let text = decide_text(&result)?;
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
        Command::Plot { input, kind, out } => {
            let kind = match kind {
                Kind::Curves => PlotKind::Curves,
                Kind::Simulation => PlotKind::Simulation,
            };
            emit_plot(&input, kind, &out)?;
            eprintln!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fdrfnr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
