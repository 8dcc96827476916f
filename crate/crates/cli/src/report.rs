use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};
use crate::output::CsvTable;

pub const PRICE_CHANGES: &str = "price_changes.csv";
pub const SUMMARY: &str = "summary.csv";
pub const INCIDENCE: &str = "incidence_by_group.csv";
pub const GAPS: &str = "gaps.csv";

/// Run artifacts present in `run_dir`, in report order.
pub fn artifacts(run_dir: &Path) -> CliResult<Vec<String>> {
    for required in [PRICE_CHANGES, SUMMARY] {
        if !run_dir.join(required).is_file() {
            return Err(CliError::new(
                "MISSING_ARTIFACT",
                format!("{} has no {required}", run_dir.display()),
            ));
        }
    }
    let mut categories: Vec<String> = fs::read_dir(run_dir)
        .map_err(|e| CliError::io(run_dir, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with("category_table_") && n.ends_with(".csv"))
        .collect();
    categories.sort();
    let mut names = vec![PRICE_CHANGES.to_string(), SUMMARY.to_string()];
    if run_dir.join(INCIDENCE).is_file() {
        names.push(INCIDENCE.to_string());
    }
    names.extend(categories);
    if run_dir.join(GAPS).is_file() {
        names.push(GAPS.to_string());
    }
    Ok(names)
}

fn load(run_dir: &Path, name: &str) -> CliResult<CsvTable> {
    CsvTable::read(&run_dir.join(name))
}

fn cell<'a>(table: &'a CsvTable, row: &'a [String], name: &str, file: &str) -> CliResult<&'a str> {
    table
        .column(name)
        .and_then(|c| row.get(c))
        .map(String::as_str)
        .ok_or_else(|| CliError::new("MISSING_ARTIFACT", format!("{file} has no {name} column")))
}

/// Left-aligned text, right-aligned numbers, two spaces between columns.
fn aligned(header: &[&str], rows: &[Vec<String>]) -> String {
    let numeric: Vec<bool> = (0..header.len())
        .map(|c| !rows.is_empty() && rows.iter().all(|r| r[c].parse::<f64>().is_ok()))
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].chars().count())
                .chain([header[c].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if numeric[c] {
                    format!("{s:>w$}", w = widths[c])
                } else {
                    format!("{s:<w$}", w = widths[c])
                }
            })
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out += &line(r.iter().map(String::as_str).collect());
    }
    out
}

fn direction(percent: &str) -> &'static str {
    match percent.parse::<f64>() {
        Ok(v) if v > 0.0 => "rise",
        Ok(v) if v < 0.0 => "decline",
        _ => "unchanged",
    }
}

pub fn render_text(run_dir: &Path) -> CliResult<String> {
    let names = artifacts(run_dir)?;
    let mut out = String::new();

    let prices = load(run_dir, PRICE_CHANGES)?;
    let mut rows = Vec::new();
    for r in &prices.rows {
        let pct = cell(&prices, r, "percent_change", PRICE_CHANGES)?;
        rows.push(vec![
            cell(&prices, r, "sector_id", PRICE_CHANGES)?.to_string(),
            pct.to_string(),
            direction(pct).to_string(),
        ]);
    }
    out += "Price changes\n";
    out += &aligned(&["sector", "%", "direction"], &rows);

    let summary = load(run_dir, SUMMARY)?;
    out += "\nSummary\n";
    out += &aligned(&["key", "value"], &summary.rows);

    for name in &names[2..] {
        let table = load(run_dir, name)?;
        let title = name.trim_end_matches(".csv").replace('_', " ");
        out += &format!("\n{}{}\n", title[..1].to_uppercase(), &title[1..]);
        let header: Vec<&str> = table.header.iter().map(String::as_str).collect();
        out += &aligned(&header, &table.rows);
    }
    Ok(out)
}

/// Writes every artifact to `out` exactly as stored, each preceded by a
/// `# <file name>` line.
pub fn render_csv(run_dir: &Path, out: &mut impl Write) -> CliResult<()> {
    for name in artifacts(run_dir)? {
        let path = run_dir.join(&name);
        let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        writeln!(out, "# {name}")
            .and_then(|_| out.write_all(&bytes))
            .map_err(|e| CliError::new("IO", e.to_string()))?;
    }
    Ok(())
}

/// Copies every artifact byte for byte into `dest`.
pub fn copy_csv(run_dir: &Path, dest: &Path) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dest).map_err(|e| CliError::io(dest, e))?;
    let mut written = Vec::new();
    for name in artifacts(run_dir)? {
        let target = dest.join(&name);
        fs::copy(run_dir.join(&name), &target).map_err(|e| CliError::io(&target, e))?;
        written.push(target);
    }
    Ok(written)
}

/// One `label,value` series per artifact, for bar charts of percent changes.
pub fn write_plotdata(run_dir: &Path, dest: &Path) -> CliResult<Vec<PathBuf>> {
    let names = artifacts(run_dir)?;
    fs::create_dir_all(dest).map_err(|e| CliError::io(dest, e))?;
    let mut written = Vec::new();
    for name in names.iter().filter(|n| *n != SUMMARY) {
        let table = load(run_dir, name)?;
        let mut series = CsvTable::new(&["label", "value"]);
        for r in &table.rows {
            let (label, value) = if name == PRICE_CHANGES {
                (
                    cell(&table, r, "sector_id", name)?.to_string(),
                    cell(&table, r, "percent_change", name)?,
                )
            } else if name == INCIDENCE {
                (
                    cell(&table, r, "group_id", name)?.to_string(),
                    cell(&table, r, "percent_change", name)?,
                )
            } else if name == GAPS {
                (
                    cell(&table, r, "group_id", name)?.to_string(),
                    cell(&table, r, "gap_change", name)?,
                )
            } else {
                let code = cell(&table, r, "category_code", name)?;
                if code == "TOTAL" {
                    continue;
                }
                (
                    format!("{}:{code}", cell(&table, r, "group_id", name)?),
                    cell(&table, r, "share_change", name)?,
                )
            };
            series.row(vec![label, value.to_string()]);
        }
        let target = dest.join(name);
        fs::write(&target, series.render()).map_err(|e| CliError::io(&target, e))?;
        written.push(target);
    }
    Ok(written)
}
