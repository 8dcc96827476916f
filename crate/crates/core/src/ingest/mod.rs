//! CSV file formats, validation and classification concordance.
//!
//! All files are UTF-8 CSV with a header row, `.` as decimal separator and
//! no thousands separators. Lines starting with `#` are comments. Every
//! load error carries the file, line and column it refers to.
//!
//! | file | columns |
//! |------|---------|
//! | IO table | `sector_id, sector_name, <sector ids...>, FINAL_DEMAND, EXPORTS, OUTPUT`, plus rows `LABOR` and `CAPITAL` (or one `VALUE_ADDED`), `IMPORTS`, `INDIRECT_TAX` |
//! | GST list | `sector_id, category, standard_share, note` |
//! | expenditure | `group_id, dimension, label, item_code, amount` |
//! | concordance | `item_code, sector_id, weight` |
//! | categories | `code, category` |

mod categories;
mod concordance;
mod expenditure;
mod schedule;
mod table;

use std::fs::File;
use std::path::{Path, PathBuf};

use csv::StringRecord;

use crate::error::{Error, Result};

pub use categories::{load_category_map, write_category_map};
pub use concordance::{
    item_prices, load_concordance, map_expenditure, render_concordance, write_concordance,
    Concordance, ConcordanceLink, WEIGHT_SUM_TOLERANCE,
};
pub use expenditure::{load_expenditure, render_expenditure, write_expenditure};
pub use schedule::{load_rate_schedule, render_rate_schedule, write_rate_schedule, LoadedSchedule};
pub use table::{load_io_table, render_io_table, write_io_table, LoadedTable};

/// Significant digits used when rendering numbers for people.
pub const DISPLAY_SIGNIFICANT_DIGITS: usize = 6;

/// Renders a number with six significant digits (`%g` style), or in the
/// shortest form that parses back to the same bits when `full_precision`.
pub fn format_number(x: f64, full_precision: bool) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if full_precision || !x.is_finite() {
        return format!("{x}");
    }
    let digits = DISPLAY_SIGNIFICANT_DIGITS;
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent format");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < -4 || exponent >= digits as i32 {
        format!("{}e{}", trim_fraction(mantissa), exponent)
    } else {
        let rounded: f64 = sci.parse().expect("round trip");
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        trim_fraction(&format!("{rounded:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One parsed CSV file: header plus data records with their line numbers.
pub(crate) struct CsvDocument {
    pub path: PathBuf,
    pub header: StringRecord,
    pub header_line: u64,
    pub rows: Vec<(u64, StringRecord)>,
}

impl CsvDocument {
    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(file);
        let csv_err = |e: csv::Error| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::Parse(e.to_string()).at(path, line, 1)
        };
        let header = reader.headers().map_err(csv_err)?.clone();
        let header_line = header.position().map(|p| p.line()).unwrap_or(1);
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(csv_err)?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            rows.push((line, record));
        }
        Ok(CsvDocument {
            path: path.to_path_buf(),
            header,
            header_line,
            rows,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.header.is_empty() || (self.header.len() == 1 && self.header[0].is_empty())
    }

    /// Fails unless the header is exactly `expected`.
    pub fn expect_header(&self, expected: &[&str]) -> Result<()> {
        for (i, name) in expected.iter().enumerate() {
            match self.header.get(i) {
                Some(found) if found == *name => {}
                Some(found) => {
                    return Err(self.err(
                        self.header_line,
                        i,
                        Error::Schema(format!("expected column {name:?}, found {found:?}")),
                    ))
                }
                None => {
                    return Err(self.err(
                        self.header_line,
                        i,
                        Error::Schema(format!("missing column {name:?}")),
                    ))
                }
            }
        }
        if self.header.len() > expected.len() {
            return Err(self.err(
                self.header_line,
                expected.len(),
                Error::Schema(format!(
                    "unexpected column {:?}",
                    &self.header[expected.len()]
                )),
            ));
        }
        Ok(())
    }

    /// Wraps `error` with a location; `column` is 0-based.
    pub fn err(&self, line: u64, column: usize, error: Error) -> Error {
        error.at(&self.path, line, column + 1)
    }

    pub fn number(&self, line: u64, record: &StringRecord, column: usize) -> Result<f64> {
        let raw = record.get(column).unwrap_or("");
        if raw.is_empty() {
            return Err(self.err(line, column, Error::Parse("missing numeric value".into())));
        }
        let value: f64 = raw.parse().map_err(|_| {
            self.err(
                line,
                column,
                Error::Parse(format!("{raw:?} is not a number")),
            )
        })?;
        if !value.is_finite() {
            return Err(self.err(line, column, Error::Parse(format!("{raw:?} is not finite"))));
        }
        Ok(value)
    }
}

/// Quotes a CSV field when needed.
pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) || s.starts_with('#') || s != s.trim() {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_number(0.920366218, false), "0.920366");
        assert_eq!(format_number(-7.9633781, false), "-7.96338");
        assert_eq!(format_number(100.0, false), "100");
        assert_eq!(format_number(1234567.0, false), "1.23457e6");
        assert_eq!(format_number(0.00001234, false), "1.234e-5");
        assert_eq!(format_number(-0.0, false), "0");
        assert_eq!(format_number(5.0, false), "5");
        assert_eq!(format_number(999999.5, false), "1e6");
    }

    #[test]
    fn full_precision_round_trips() {
        for x in [0.1 + 0.2, 1.0 / 3.0, 6.02e23, -1e-300] {
            let s = format_number(x, true);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a, b"), "\"a, b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
