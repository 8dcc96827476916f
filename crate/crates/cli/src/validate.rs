use std::io::Write;

use gstsim_core::diagnostics::{productivity_check, tax_to_va_ratio};
use gstsim_core::ingest::format_number;
use gstsim_core::{rate_mask, Identity};

use crate::error::{CliError, CliResult, EXIT_NUMERICAL};
use crate::run::load_inputs;
use crate::scenario::Inputs;

pub struct ValidateArgs {
    pub inputs: Inputs,
    pub gst_rate: f64,
    pub allow_unbalanced: bool,
    pub balance_tolerance: f64,
}

/// Loads and checks every input, printing one line per check.
pub fn validate(args: &ValidateArgs, out: &mut impl Write) -> CliResult<()> {
    let loaded = load_inputs(
        &args.inputs,
        args.gst_rate,
        args.allow_unbalanced,
        args.balance_tolerance,
    )?;
    let mut say =
        |line: String| writeln!(out, "{line}").map_err(|e| CliError::new("IO", e.to_string()));
    let g = |x: f64| format_number(x, false);
    let sectors = loaded.bundle.sectors();

    say(format!("table: {} sectors", sectors.len()))?;
    say(format!(
        "balance: max row residual {}, max column residual {} (tolerance {})",
        g(loaded.balance.max_row()),
        g(loaded.balance.max_column()),
        g(args.balance_tolerance)
    ))?;
    for identity in [Identity::Row, Identity::Column] {
        for i in loaded.balance.flagged(identity, args.balance_tolerance) {
            say(format!(
                "warning: {identity} balance off for sector {}",
                sectors.id(i)
            ))?;
        }
    }
    let ratio = tax_to_va_ratio(&loaded.bundle)?;
    say(format!(
        "tax to value added: min {}, max {}",
        g(ratio.min()),
        g(ratio.max())
    ))?;

    let mask = rate_mask(&loaded.schedule);
    for (what, report) in [
        ("A", productivity_check(loaded.bundle.a(), None)?),
        (
            "masked A'",
            productivity_check(loaded.bundle.a(), Some(&mask))?,
        ),
    ] {
        say(format!(
            "productivity: spectral radius of {what} {} ({})",
            g(report.spectral_radius()),
            if report.passed { "pass" } else { "fail" }
        ))?;
        if !report.passed {
            let mut err = CliError::new(
                "NON_PRODUCTIVE",
                format!(
                    "spectral radius of {what} is {}, must be below 1",
                    report.spectral_radius()
                ),
            );
            err.exit = EXIT_NUMERICAL;
            return Err(err);
        }
    }

    say(format!(
        "gst list: {} sectors, {} defaulted",
        loaded.schedule.len(),
        loaded.warnings.len()
    ))?;
    for w in &loaded.warnings {
        say(format!("warning: {w}"))?;
    }
    if let Some(e) = &loaded.expenditure {
        say(format!(
            "expenditure: {} groups, {} items",
            e.groups().len(),
            e.items().len()
        ))?;
    }
    if let Some(c) = &loaded.concordance {
        say(format!("concordance: {} links", c.links().len()))?;
    }
    if let Some(m) = &loaded.categories {
        say(format!("categories: {} codes", m.iter().count()))?;
    }
    say("OK".to_string())
}
