//! `gstsim`: validate inputs, run tax-reform scenarios and render reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
mod output;
mod report;
mod run;
mod scenario;
mod validate;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gstsim_core::{MaskedInputTreatment, DEFAULT_BALANCE_TOLERANCE};

use crate::error::{CliError, CliResult};
use crate::scenario::{Inputs, Scenario};
use crate::validate::ValidateArgs;

#[derive(Parser)]
#[command(
    name = "gstsim",
    version,
    about = "Input-output price and incidence model for value-added tax reforms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check input files, table balance and productivity.
    Validate {
        #[arg(long)]
        table: PathBuf,
        /// GST category list.
        #[arg(long)]
        gst: PathBuf,
        #[arg(long, default_value_t = 0.06)]
        rate: f64,
        #[arg(long)]
        expenditure: Option<PathBuf>,
        #[arg(long)]
        concordance: Option<PathBuf>,
        #[arg(long)]
        categories: Option<PathBuf>,
        /// Report balance violations as warnings instead of failing.
        #[arg(long)]
        allow_unbalanced: bool,
        #[arg(long, default_value_t = DEFAULT_BALANCE_TOLERANCE)]
        balance_tolerance: f64,
    },
    /// Run a scenario file and write its reports.
    Run {
        scenario: PathBuf,
        /// Output directory, overriding the scenario's.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        allow_unbalanced: bool,
        /// Write numbers in shortest round-trip form instead of 6 significant digits.
        #[arg(long)]
        full_precision: bool,
        #[arg(long, value_enum)]
        treatment: Option<Treatment>,
        #[arg(long)]
        exempt_retains_input_tax: bool,
    },
    /// Render the reports of a finished run.
    Report {
        run_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Directory for csv copies or plot data (plot data defaults to <RUN_DIR>/plotdata).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Treatment {
    Drop,
    Baseline,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Plotdata,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            return fail(CliError::usage(first));
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{e}");
    ExitCode::from(e.exit)
}

fn execute(command: Command) -> CliResult<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let io = |e: std::io::Error| CliError::new("IO", e.to_string());
    match command {
        Command::Validate {
            table,
            gst,
            rate,
            expenditure,
            concordance,
            categories,
            allow_unbalanced,
            balance_tolerance,
        } => validate::validate(
            &ValidateArgs {
                inputs: Inputs {
                    table,
                    gst_list: gst,
                    expenditure,
                    concordance,
                    categories,
                },
                gst_rate: rate,
                allow_unbalanced,
                balance_tolerance,
            },
            &mut out,
        ),
        Command::Run {
            scenario,
            out: out_dir,
            allow_unbalanced,
            full_precision,
            treatment,
            exempt_retains_input_tax,
        } => {
            let mut s = Scenario::load(&scenario)?;
            if let Some(dir) = out_dir {
                s.output_dir = dir;
            }
            s.allow_unbalanced |= allow_unbalanced;
            s.options.exempt_retains_input_tax |= exempt_retains_input_tax;
            if let Some(t) = treatment {
                s.options.masked_input_treatment = match t {
                    Treatment::Drop => MaskedInputTreatment::Drop,
                    Treatment::Baseline => MaskedInputTreatment::Baseline,
                };
            }
            let artifacts = run::run_scenario(&s, full_precision)?;
            for w in &artifacts.warnings {
                eprintln!("warning: {w}");
            }
            run::write_run(&s.output_dir, &artifacts)?;
            for (name, _) in &artifacts.files {
                writeln!(out, "{}", s.output_dir.join(name).display()).map_err(io)?;
            }
            Ok(())
        }
        Command::Report {
            run_dir,
            format,
            out: dest,
        } => match (format, dest) {
            (Format::Text, _) => {
                let text = report::render_text(&run_dir)?;
                out.write_all(text.as_bytes()).map_err(io)
            }
            (Format::Csv, None) => report::render_csv(&run_dir, &mut out),
            (Format::Csv, Some(dest)) => {
                for p in report::copy_csv(&run_dir, &dest)? {
                    writeln!(out, "{}", p.display()).map_err(io)?;
                }
                Ok(())
            }
            (Format::Plotdata, dest) => {
                let dest = dest.unwrap_or_else(|| run_dir.join("plotdata"));
                for p in report::write_plotdata(&run_dir, &dest)? {
                    writeln!(out, "{}", p.display()).map_err(io)?;
                }
                Ok(())
            }
        },
    }
}
