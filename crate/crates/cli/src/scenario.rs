//! Scenario files.
//!
//! A scenario is a TOML document. Relative paths are resolved against the
//! directory holding the scenario file.
//!
//! ```toml
//! [inputs]
//! table = "io_table.csv"          # required
//! gst_list = "gst_list.csv"       # required
//! expenditure = "expenditure.csv" # optional; enables incidence reports
//! concordance = "concordance.csv" # optional; item codes must equal sector ids without it
//! categories = "categories.csv"   # optional; enables category tables
//!
//! [policy]
//! gst_rate = 0.06                     # required, in [0, 1)
//! masked_input_treatment = "drop"     # or "baseline"
//! exempt_retains_input_tax = false
//! tax_row = "gst"                     # or "baseline" to keep the table's own tax row
//!
//! [report]
//! dimensions = ["income_class", "ethnicity"]  # default: every dimension present
//!
//! [report.base_groups]
//! income_class = "LOW"    # default: first group of the dimension
//!
//! [output]
//! dir = "out/run"         # required
//!
//! [validation]
//! allow_unbalanced = false
//! balance_tolerance = 1e-6
//! ```

use std::collections::BTreeMap;
use std::path::{Component, Path, PathBuf};

use gstsim_core::{Dimension, MaskedInputTreatment, SimulationOptions, TaxRow};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    inputs: RawInputs,
    policy: RawPolicy,
    #[serde(default)]
    report: RawReport,
    output: RawOutput,
    #[serde(default)]
    validation: RawValidation,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInputs {
    table: PathBuf,
    gst_list: PathBuf,
    expenditure: Option<PathBuf>,
    concordance: Option<PathBuf>,
    categories: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolicy {
    gst_rate: f64,
    masked_input_treatment: Option<String>,
    #[serde(default)]
    exempt_retains_input_tax: bool,
    tax_row: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReport {
    dimensions: Option<Vec<String>>,
    #[serde(default)]
    base_groups: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: PathBuf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawValidation {
    #[serde(default)]
    allow_unbalanced: bool,
    balance_tolerance: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Inputs {
    pub table: PathBuf,
    pub gst_list: PathBuf,
    pub expenditure: Option<PathBuf>,
    pub concordance: Option<PathBuf>,
    pub categories: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub inputs: Inputs,
    pub gst_rate: f64,
    pub options: SimulationOptions,
    /// `None` reports every dimension present in the expenditure file.
    pub dimensions: Option<Vec<Dimension>>,
    pub base_groups: BTreeMap<Dimension, String>,
    pub output_dir: PathBuf,
    pub allow_unbalanced: bool,
    pub balance_tolerance: f64,
}

impl Scenario {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let raw: RawScenario =
            toml::from_str(&text).map_err(|e| CliError::config(path, e.message()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: PathBuf| normalize(&if p.is_absolute() { p } else { base.join(p) });
        let parse = |what: &str, value: &str| CliError::config(path, format!("{what}: {value}"));

        let mut options = SimulationOptions {
            exempt_retains_input_tax: raw.policy.exempt_retains_input_tax,
            ..Default::default()
        };
        if let Some(s) = &raw.policy.masked_input_treatment {
            options.masked_input_treatment = s
                .parse::<MaskedInputTreatment>()
                .map_err(|e| parse("policy.masked_input_treatment", &e.to_string()))?;
        }
        if let Some(s) = &raw.policy.tax_row {
            options.tax_row = s
                .parse::<TaxRow>()
                .map_err(|e| parse("policy.tax_row", &e.to_string()))?;
        }
        let dimension = |s: &str| {
            s.parse::<Dimension>()
                .map_err(|e| parse("report", &e.to_string()))
        };
        let dimensions = match raw.report.dimensions {
            None => None,
            Some(list) => Some(
                list.iter()
                    .map(|s| dimension(s))
                    .collect::<CliResult<Vec<_>>>()?,
            ),
        };
        let mut base_groups = BTreeMap::new();
        for (dim, group) in raw.report.base_groups {
            base_groups.insert(dimension(&dim)?, group);
        }
        let balance_tolerance = raw
            .validation
            .balance_tolerance
            .unwrap_or(gstsim_core::DEFAULT_BALANCE_TOLERANCE);
        if !(balance_tolerance >= 0.0) {
            return Err(parse(
                "validation.balance_tolerance",
                &format!("{balance_tolerance} must be nonnegative"),
            ));
        }
        Ok(Scenario {
            inputs: Inputs {
                table: resolve(raw.inputs.table),
                gst_list: resolve(raw.inputs.gst_list),
                expenditure: raw.inputs.expenditure.map(resolve),
                concordance: raw.inputs.concordance.map(resolve),
                categories: raw.inputs.categories.map(resolve),
            },
            gst_rate: raw.policy.gst_rate,
            options,
            dimensions,
            base_groups,
            output_dir: resolve(raw.output.dir),
            allow_unbalanced: raw.validation.allow_unbalanced,
            balance_tolerance,
        })
    }
}

/// Folds `.` and `name/..` pairs without touching the file system.
fn normalize(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in path.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir
                if matches!(out.components().next_back(), Some(Component::Normal(_))) =>
            {
                out.pop();
            }
            other => out.push(other),
        }
    }
    if out.as_os_str().is_empty() {
        out.push(".");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> CliResult<Scenario> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.toml");
        std::fs::write(&path, text).unwrap();
        Scenario::load(&path)
    }

    const MINIMAL: &str = "[inputs]\ntable = \"t.csv\"\ngst_list = \"g.csv\"\n[policy]\ngst_rate = 0.06\n[output]\ndir = \"out\"\n";

    #[test]
    fn defaults_and_relative_paths() {
        let s = load(MINIMAL).unwrap();
        assert_eq!(s.options, SimulationOptions::default());
        assert!(s.inputs.table.ends_with("t.csv") && s.inputs.table.is_absolute());
        assert!(s.dimensions.is_none());
        assert_eq!(s.balance_tolerance, 1e-6);
    }

    #[test]
    fn normalizes_parent_components() {
        assert_eq!(
            normalize(Path::new("data/app/../../out/x")),
            PathBuf::from("out/x")
        );
        assert_eq!(normalize(Path::new("../a/./b")), PathBuf::from("../a/b"));
        assert_eq!(normalize(Path::new("a/..")), PathBuf::from("."));
    }

    #[test]
    fn unknown_keys_and_values_are_rejected() {
        let err = load(&MINIMAL.replace("gst_rate", "rate")).unwrap_err();
        assert_eq!(err.code, "CONFIG");
        let err = load(&format!("{MINIMAL}[report]\ndimensions = [\"age\"]\n")).unwrap_err();
        assert_eq!(err.code, "CONFIG");
        let text = MINIMAL.replace(
            "gst_rate = 0.06",
            "gst_rate = 0.06\nmasked_input_treatment = \"keep\"",
        );
        assert!(load(&text)
            .unwrap_err()
            .message
            .contains("masked_input_treatment"));
    }
}
