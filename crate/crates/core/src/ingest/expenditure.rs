use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::{csv_field, format_number, write_file, CsvDocument};
use crate::error::{Error, Result};
use crate::incidence::{Basis, Dimension, ExpenditureMatrix, HouseholdGroup};

const HEADER: [&str; 5] = ["group_id", "dimension", "label", "item_code", "amount"];

/// Reads long-format expenditure. Groups and items keep first-appearance
/// order; absent (group, item) pairs are zero.
pub fn load_expenditure(path: impl AsRef<Path>) -> Result<ExpenditureMatrix> {
    let doc = CsvDocument::read(path.as_ref())?;
    doc.expect_header(&HEADER)?;
    let mut groups: Vec<(HouseholdGroup, u64)> = Vec::new();
    let mut items: Vec<String> = Vec::new();
    let mut cells: BTreeMap<(usize, usize), (f64, u64)> = BTreeMap::new();
    for (line, record) in &doc.rows {
        let line = *line;
        let group_id = record.get(0).unwrap_or("");
        if group_id.is_empty() {
            return Err(doc.err(line, 0, Error::Schema("empty group_id".into())));
        }
        let dimension: Dimension = record
            .get(1)
            .unwrap_or("")
            .parse()
            .map_err(|e| doc.err(line, 1, e))?;
        let label = record.get(2).unwrap_or("");
        let item = record.get(3).unwrap_or("");
        if item.is_empty() {
            return Err(doc.err(line, 3, Error::Schema("empty item_code".into())));
        }
        let amount = doc.number(line, record, 4)?;
        if amount < 0.0 {
            return Err(doc.err(
                line,
                4,
                Error::InvalidValue {
                    what: "expenditure",
                    index: 0,
                    value: amount,
                },
            ));
        }
        let h = match groups.iter().position(|(g, _)| g.group_id == group_id) {
            Some(h) => {
                let g = &groups[h].0;
                if g.dimension != dimension || g.label != label {
                    return Err(doc.err(
                        line,
                        1,
                        Error::Schema(format!(
                            "group {group_id} was declared as {}/{:?} on line {}",
                            g.dimension, g.label, groups[h].1
                        )),
                    ));
                }
                h
            }
            None => {
                groups.push((
                    HouseholdGroup {
                        group_id: group_id.to_string(),
                        dimension,
                        label: label.to_string(),
                    },
                    line,
                ));
                groups.len() - 1
            }
        };
        let i = match items.iter().position(|c| c == item) {
            Some(i) => i,
            None => {
                items.push(item.to_string());
                items.len() - 1
            }
        };
        if let Some((_, first)) = cells.insert((h, i), (amount, line)) {
            return Err(doc.err(
                line,
                3,
                Error::Schema(format!(
                    "{group_id}/{item} repeated (first on line {first})"
                )),
            ));
        }
    }
    if groups.is_empty() {
        return Err(doc.err(
            doc.header_line + 1,
            0,
            Error::Schema("no expenditure records".into()),
        ));
    }
    let mut values = DMatrix::zeros(groups.len(), items.len());
    for (&(h, i), &(v, _)) in &cells {
        values[(h, i)] = v;
    }
    let first_lines: Vec<u64> = groups.iter().map(|(_, l)| *l).collect();
    ExpenditureMatrix::new(
        groups.into_iter().map(|(g, _)| g).collect(),
        items,
        values,
        Basis::ItemCodes,
    )
    .map_err(|e| {
        let line = match &e {
            Error::EmptyGroup(id) => doc
                .rows
                .iter()
                .find(|(_, r)| r.get(0) == Some(id.as_str()))
                .map(|(l, _)| *l)
                .unwrap_or(first_lines[0]),
            _ => first_lines[0],
        };
        doc.err(line, 4, e)
    })
}

/// Every (group, item) cell, group-major, in shortest round-trip form.
pub fn render_expenditure(e: &ExpenditureMatrix) -> String {
    let mut out = HEADER.join(",");
    out.push('\n');
    for (h, g) in e.groups().iter().enumerate() {
        for (i, item) in e.items().iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{}",
                csv_field(&g.group_id),
                g.dimension,
                csv_field(&g.label),
                csv_field(item),
                format_number(e.values()[(h, i)], true)
            )
            .unwrap();
        }
    }
    out
}

pub fn write_expenditure(e: &ExpenditureMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &render_expenditure(e))
}
