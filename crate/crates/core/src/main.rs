use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bidir_relay::cli::{run_dmt_curve, run_lemma1, run_outage_sweep, run_slope_fit};
use bidir_relay::config::SimConfig;
use bidir_relay::{exec, Error, Result};

/// Bidirectional random relaying: DMT curves and Monte Carlo outage.
#[derive(Parser)]
#[command(name = "bidir-relay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form diversity-multiplexing curves for all scenarios.
    DmtCurve(Common),
    /// Monte Carlo outage probability over the configured SNR grid.
    OutageSweep(Common),
    /// Diversity slope per scenario from an outage-sweep CSV.
    SlopeFit {
        #[command(flatten)]
        common: Common,
        /// Outage-sweep CSV to fit.
        #[arg(long)]
        input: PathBuf,
    },
    /// Lower-tail exponent of Poisson shot noise against its bound.
    Lemma1(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config; defaults apply to every key it omits.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `experiment.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "BIDIR_RELAY_THREADS")]
    threads: Option<usize>,
    /// Extra `section.key=value` overrides, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn load(&self) -> Result<SimConfig> {
        let mut cfg = match &self.config {
            Some(p) => SimConfig::from_file(p)?,
            None => SimConfig::default(),
        };
        for o in &self.overrides {
            cfg.apply_override(o)?;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }

    fn threads(&self) -> usize {
        exec::resolve_threads(self.threads)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::DmtCurve(c) => {
            let cfg = c.load()?;
            c.emit(&run_dmt_curve(&cfg)?)
        }
        Command::OutageSweep(c) => {
            let cfg = c.load()?;
            let out = run_outage_sweep(&cfg, c.threads())?;
            c.emit(&out.csv)?;
            let flagged = out.low_confidence();
            if flagged > 0 {
                eprintln!("warning: {flagged} of {} points flagged in the quality column", out.rows.len());
            }
            Ok(())
        }
        Command::SlopeFit { common, input } => {
            let cfg = common.load()?;
            let text = std::fs::read_to_string(&input).map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
            let (csv, _) = run_slope_fit(&text, cfg.slope_window)?;
            common.emit(&csv)
        }
        Command::Lemma1(c) => {
            let cfg = c.load()?;
            let (csv, report) = run_lemma1(&cfg, c.threads())?;
            c.emit(&csv)?;
            if !report.passes {
                eprintln!("note: exponent at the largest omega exceeds bound + tolerance");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
