use std::fmt::Write as _;
use std::path::Path;

use super::{csv_field, write_file, CsvDocument};
use crate::error::{Error, Result};
use crate::incidence::{CategoryMap, ReportingCategory};

const HEADER: [&str; 2] = ["code", "category"];

/// Reads `code, category` pairs; categories are roman numerals `i` to `xii`.
pub fn load_category_map(path: impl AsRef<Path>) -> Result<CategoryMap> {
    let doc = CsvDocument::read(path.as_ref())?;
    doc.expect_header(&HEADER)?;
    let mut pairs = Vec::with_capacity(doc.rows.len());
    for (line, record) in &doc.rows {
        let code = record.get(0).unwrap_or("");
        if code.is_empty() {
            return Err(doc.err(*line, 0, Error::Schema("empty code".into())));
        }
        if pairs
            .iter()
            .any(|(c, _): &(String, ReportingCategory)| c == code)
        {
            return Err(doc.err(
                *line,
                0,
                Error::Schema(format!("code {code} is mapped twice")),
            ));
        }
        let category: ReportingCategory = record
            .get(1)
            .unwrap_or("")
            .parse()
            .map_err(|e| doc.err(*line, 1, e))?;
        pairs.push((code.to_string(), category));
    }
    CategoryMap::new(pairs)
}

pub fn write_category_map(map: &CategoryMap, path: impl AsRef<Path>) -> Result<()> {
    let mut out = HEADER.join(",");
    out.push('\n');
    for (code, category) in map.iter() {
        writeln!(out, "{},{}", csv_field(code), category.code()).unwrap();
    }
    write_file(path.as_ref(), &out)
}
