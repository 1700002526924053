mod cache;
mod config;
mod output;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mixflag::coxeter::CartanType;

use crate::config::JobConfig;

#[derive(Parser)]
#[command(
    name = "mixflag",
    version,
    about = "Characters and multiplicities of mixed parity sheaves on flag varieties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Standard-basis characters of one family of objects, one row per w.
    Tables {
        #[arg(long, value_enum)]
        kind: TableKind,
        #[command(flatten)]
        job: JobArgs,
    },
    /// Run a named verification suite; exit status 1 if any check fails.
    Check {
        #[arg(long, value_enum)]
        suite: Suite,
        #[command(flatten)]
        job: JobArgs,
    },
    /// Graded dimensions of Hom between parity objects.
    Hilbert {
        #[command(flatten)]
        job: JobArgs,
    },
    /// Write the validated p-canonical table in table-file format (the KL
    /// basis in characteristic 0).
    ExportPcan {
        #[command(flatten)]
        job: JobArgs,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TableKind {
    Tilting,
    Projective,
    Simple,
    Parity,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Suite {
    Identities,
    Perversity,
    Calibration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct JobArgs {
    /// Cartan type and rank, e.g. B3.
    #[arg(long = "type")]
    cartan_type: Option<CartanType>,
    /// Characteristic of the coefficient field (0 or a prime).
    #[arg(long = "char", default_value_t = 0)]
    characteristic: u64,
    /// p-canonical table for the group.
    #[arg(long)]
    pcan: Option<PathBuf>,
    /// p-canonical table for the Langlands dual group.
    #[arg(long)]
    pcan_dual: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Directory holding the Kazhdan-Lusztig cache.
    #[arg(long)]
    cache: Option<PathBuf>,
}

impl JobArgs {
    fn into_config(self) -> JobConfig {
        JobConfig {
            cartan_type: self.cartan_type,
            characteristic: self.characteristic,
            pcan: self.pcan,
            pcan_dual: self.pcan_dual,
            out: self.out,
            format: self.format,
            cache: self.cache,
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Tables { kind, job } => {
            let cfg = job.into_config();
            let ctx = cfg.context()?;
            let text = output::table(&ctx, kind, cfg.format)?;
            cfg.finish(&ctx)?;
            cfg.emit(&text)?;
            Ok(true)
        }
        Command::Check { suite, job } => {
            let cfg = job.into_config();
            let report = match suite {
                Suite::Calibration => suites::calibration(),
                Suite::Identities | Suite::Perversity => {
                    let ctx = cfg.context()?;
                    let report = if matches!(suite, Suite::Identities) {
                        suites::identities(&ctx)
                    } else {
                        suites::perversity(&ctx)
                    };
                    cfg.finish(&ctx)?;
                    report
                }
            };
            cfg.emit(&report.render(cfg.format)?)?;
            Ok(report.passed())
        }
        Command::Hilbert { job } => {
            let cfg = job.into_config();
            let ctx = cfg.context()?;
            let text = output::hilbert(&ctx, cfg.format)?;
            cfg.finish(&ctx)?;
            cfg.emit(&text)?;
            Ok(true)
        }
        Command::ExportPcan { job } => {
            let cfg = job.into_config();
            let ctx = cfg.context()?;
            cfg.finish(&ctx)?;
            cfg.emit(&(ctx.pcan().to_json() + "\n"))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
