use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::{csv_field, format_number, write_file, CsvDocument};
use crate::error::{Error, Identity, Result};
use crate::table::{balance_report, BalanceReport, IoTable, IoTableParts, SectorSet};

const TRAILING: [&str; 3] = ["FINAL_DEMAND", "EXPORTS", "OUTPUT"];
const PRIMARY: [&str; 5] = ["LABOR", "CAPITAL", "VALUE_ADDED", "IMPORTS", "INDIRECT_TAX"];

#[derive(Debug, Clone)]
pub struct LoadedTable {
    pub table: IoTable,
    pub balance: BalanceReport,
}

/// Reads an IO table. `balance_tolerance` of `None` accepts unbalanced tables.
///
/// A combined `VALUE_ADDED` row is stored as capital with zero labor.
pub fn load_io_table(
    path: impl AsRef<Path>,
    balance_tolerance: Option<f64>,
) -> Result<LoadedTable> {
    let doc = CsvDocument::read(path.as_ref())?;
    let h = &doc.header;
    let hl = doc.header_line;
    if doc.is_empty() {
        return Err(doc.err(hl, 0, Error::Schema("file has no header".into())));
    }
    for (i, name) in ["sector_id", "sector_name"].iter().enumerate() {
        if h.get(i) != Some(name) {
            return Err(doc.err(
                hl,
                i,
                Error::Schema(format!("column {} must be {name:?}", i + 1)),
            ));
        }
    }
    if h.len() < 2 + 1 + TRAILING.len() {
        return Err(doc.err(hl, h.len(), Error::Schema("header lists no sectors".into())));
    }
    let n = h.len() - 2 - TRAILING.len();
    for (k, name) in TRAILING.iter().enumerate() {
        let col = 2 + n + k;
        if &h[col] != *name {
            return Err(doc.err(
                hl,
                col,
                Error::Schema(format!("expected column {name:?}, found {:?}", &h[col])),
            ));
        }
    }
    let header_ids: Vec<&str> = (0..n).map(|j| &h[2 + j]).collect();
    for (j, id) in header_ids.iter().enumerate() {
        if id.is_empty()
            || PRIMARY.contains(id)
            || TRAILING.contains(id)
            || header_ids[..j].contains(id)
        {
            return Err(doc.err(
                hl,
                2 + j,
                Error::Schema(format!("invalid sector column {id:?}")),
            ));
        }
    }
    let fd_col = 2 + n;
    let ex_col = fd_col + 1;
    let out_col = fd_col + 2;

    let mut sector_rows: Vec<Option<(u64, String)>> = vec![None; n];
    let mut z = DMatrix::zeros(n, n);
    let mut final_demand = DVector::zeros(n);
    let mut exports = DVector::zeros(n);
    let mut output = DVector::zeros(n);
    let mut primary: BTreeMap<&'static str, (u64, DVector<f64>)> = BTreeMap::new();

    for (line, record) in &doc.rows {
        let line = *line;
        let label = record.get(0).unwrap_or("");
        if let Some(i) = header_ids.iter().position(|id| *id == label) {
            if let Some((first, _)) = &sector_rows[i] {
                return Err(doc.err(
                    line,
                    0,
                    Error::Schema(format!("sector {label} repeated (first on line {first})")),
                ));
            }
            for j in 0..n {
                let v = doc.number(line, record, 2 + j)?;
                if v < 0.0 {
                    return Err(doc.err(line, 2 + j, negative("intermediate flows", i, v)));
                }
                z[(i, j)] = v;
            }
            final_demand[i] = doc.number(line, record, fd_col)?;
            exports[i] = doc.number(line, record, ex_col)?;
            if exports[i] < 0.0 {
                return Err(doc.err(line, ex_col, negative("exports", i, exports[i])));
            }
            output[i] = doc.number(line, record, out_col)?;
            if output[i] <= 0.0 {
                return Err(doc.err(
                    line,
                    out_col,
                    Error::ZeroOutput {
                        sector: label.to_string(),
                        index: i,
                        value: output[i],
                    },
                ));
            }
            sector_rows[i] = Some((line, record.get(1).unwrap_or("").to_string()));
        } else if let Some(&name) = PRIMARY.iter().find(|p| **p == label) {
            if let Some((first, _)) = primary.get(name) {
                return Err(doc.err(
                    line,
                    0,
                    Error::Schema(format!("row {name} repeated (first on line {first})")),
                ));
            }
            let mut row = DVector::zeros(n);
            for j in 0..n {
                row[j] = doc.number(line, record, 2 + j)?;
                if row[j] < 0.0 {
                    return Err(doc.err(line, 2 + j, negative("primary inputs", j, row[j])));
                }
            }
            for col in [fd_col, ex_col, out_col] {
                if !record.get(col).unwrap_or("").is_empty() {
                    return Err(doc.err(
                        line,
                        col,
                        Error::Schema(format!("row {name} must leave column {} empty", &h[col])),
                    ));
                }
            }
            primary.insert(name, (line, row));
        } else {
            return Err(doc.err(
                line,
                0,
                Error::Schema(format!("unknown row label {label:?}")),
            ));
        }
    }

    let end_line = doc.rows.last().map(|(l, _)| *l + 1).unwrap_or(hl + 1);
    let sectors = SectorSet::new(header_ids.iter().enumerate().map(|(j, id)| {
        let name = sector_rows[j]
            .as_ref()
            .map(|(_, name)| name.clone())
            .unwrap_or_default();
        (
            id.to_string(),
            if name.is_empty() {
                id.to_string()
            } else {
                name
            },
        )
    }))
    .map_err(|e| doc.err(hl, 2, e))?;
    if let Some(j) = sector_rows.iter().position(Option::is_none) {
        return Err(doc.err(
            end_line,
            0,
            Error::Schema(format!("missing row for sector {}", header_ids[j])),
        ));
    }

    let mut take = |name: &str| primary.remove(name).map(|(_, row)| row);
    let (labor, capital) = match (take("LABOR"), take("CAPITAL"), take("VALUE_ADDED")) {
        (Some(l), Some(k), None) => (l, k),
        (None, None, Some(va)) => (DVector::zeros(n), va),
        (None, None, None) => {
            return Err(doc.err(
                end_line,
                0,
                Error::Schema(
                    "missing value-added row: need LABOR and CAPITAL, or VALUE_ADDED".into(),
                ),
            ))
        }
        (l, k, va) => {
            let present: Vec<&str> = [
                ("LABOR", l.is_some()),
                ("CAPITAL", k.is_some()),
                ("VALUE_ADDED", va.is_some()),
            ]
            .iter()
            .filter(|(_, p)| *p)
            .map(|(n, _)| *n)
            .collect();
            return Err(doc.err(
                end_line,
                0,
                Error::Schema(format!(
                    "value-added rows {} do not form LABOR+CAPITAL or VALUE_ADDED",
                    present.join("+")
                )),
            ));
        }
    };
    let mut required = |name: &str| {
        take(name).ok_or_else(|| doc.err(end_line, 0, Error::Schema(format!("missing row {name}"))))
    };
    let imports = required("IMPORTS")?;
    let indirect_tax = required("INDIRECT_TAX")?;

    let table = IoTable::new(IoTableParts {
        sectors,
        intermediate: z,
        final_demand,
        exports,
        labor,
        capital,
        imports,
        indirect_tax,
        output,
    })
    .map_err(|e| doc.err(hl, 0, e))?;
    let balance = balance_report(&table);
    if let Some(tol) = balance_tolerance {
        if let Some((identity, index, residual)) = balance.first_violation(tol) {
            let (line, column) = match identity {
                Identity::Row => (
                    sector_rows[index].as_ref().map(|(l, _)| *l).unwrap_or(hl),
                    out_col,
                ),
                Identity::Column => (hl, 2 + index),
            };
            return Err(doc.err(
                line,
                column,
                Error::Unbalanced {
                    sector: table.sectors().id(index).to_string(),
                    index,
                    identity,
                    residual,
                    tolerance: tol,
                },
            ));
        }
    }
    Ok(LoadedTable { table, balance })
}

fn negative(what: &'static str, index: usize, value: f64) -> Error {
    Error::InvalidValue { what, index, value }
}

/// Serializes a table in the format [`load_io_table`] reads, always with
/// separate `LABOR` and `CAPITAL` rows. Numbers are written in shortest
/// round-trip form.
pub fn render_io_table(table: &IoTable) -> String {
    let s = table.sectors();
    let n = s.len();
    let num = |x: f64| format_number(x, true);
    let mut out = String::new();
    let mut header = vec!["sector_id".to_string(), "sector_name".to_string()];
    header.extend(s.ids().iter().map(|id| csv_field(id)));
    header.extend(TRAILING.iter().map(|t| t.to_string()));
    writeln!(out, "{}", header.join(",")).unwrap();
    for i in 0..n {
        let mut row = vec![csv_field(s.id(i)), csv_field(s.name(i))];
        row.extend((0..n).map(|j| num(table.intermediate()[(i, j)])));
        row.push(num(table.final_demand()[i]));
        row.push(num(table.exports()[i]));
        row.push(num(table.output()[i]));
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    for (label, v) in [
        ("LABOR", table.labor()),
        ("CAPITAL", table.capital()),
        ("IMPORTS", table.imports()),
        ("INDIRECT_TAX", table.indirect_tax()),
    ] {
        let mut row = vec![label.to_string(), String::new()];
        row.extend(v.iter().map(|&x| num(x)));
        row.extend([String::new(), String::new(), String::new()]);
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    out
}

pub fn write_io_table(table: &IoTable, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &render_io_table(table))
}
