use std::fmt::Write as _;
use std::path::Path;

use super::{csv_field, format_number, write_file, CsvDocument};
use crate::error::{Error, Result};
use crate::price::{RateCategory, RateEntry, RateSchedule};
use crate::table::SectorSet;

const HEADER: [&str; 4] = ["sector_id", "category", "standard_share", "note"];

#[derive(Debug, Clone)]
pub struct LoadedSchedule {
    pub schedule: RateSchedule,
    /// Free-text provenance per sector; empty for defaulted sectors.
    pub notes: Vec<String>,
    /// One entry per sector that was missing from the file.
    pub warnings: Vec<String>,
}

/// Reads a GST category list. Sectors absent from the file default to
/// fully standard-rated, with a warning each. An empty `standard_share`
/// cell takes the category's default (1 for standard-rated, 0 otherwise).
pub fn load_rate_schedule(
    path: impl AsRef<Path>,
    sectors: &SectorSet,
    gst_rate: f64,
) -> Result<LoadedSchedule> {
    let doc = CsvDocument::read(path.as_ref())?;
    let n = sectors.len();
    let mut entries: Vec<Option<RateEntry>> = vec![None; n];
    let mut notes = vec![String::new(); n];
    if !doc.is_empty() {
        doc.expect_header(&HEADER)?;
    }
    for (line, record) in &doc.rows {
        let line = *line;
        let id = record.get(0).unwrap_or("");
        let index = sectors
            .index_of(id)
            .ok_or_else(|| doc.err(line, 0, Error::UnknownSector(id.to_string())))?;
        if entries[index].is_some() {
            return Err(doc.err(line, 0, Error::Schema(format!("sector {id} listed twice"))));
        }
        let category: RateCategory = record
            .get(1)
            .unwrap_or("")
            .parse()
            .map_err(|e| doc.err(line, 1, e))?;
        let share = if record.get(2).unwrap_or("").is_empty() {
            category.default_share()
        } else {
            doc.number(line, record, 2)?
        };
        let entry = RateEntry::new(category, share).map_err(|e| doc.err(line, 2, e))?;
        entries[index] = Some(entry);
        notes[index] = record.get(3).unwrap_or("").to_string();
    }
    let mut warnings = Vec::new();
    let entries = entries
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            e.unwrap_or_else(|| {
                warnings.push(format!(
                    "sector {} not in {}; assuming standard_rated with share 1",
                    sectors.id(i),
                    doc.path.display()
                ));
                RateEntry::of(RateCategory::StandardRated)
            })
        })
        .collect();
    let schedule = RateSchedule::new(entries, gst_rate)?;
    Ok(LoadedSchedule {
        schedule,
        notes,
        warnings,
    })
}

pub fn render_rate_schedule(
    schedule: &RateSchedule,
    sectors: &SectorSet,
    notes: &[String],
) -> String {
    let mut out = HEADER.join(",");
    out.push('\n');
    for (i, e) in schedule.entries().iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{}",
            csv_field(sectors.id(i)),
            e.category,
            format_number(e.standard_share, true),
            csv_field(notes.get(i).map(String::as_str).unwrap_or(""))
        )
        .unwrap();
    }
    out
}

pub fn write_rate_schedule(
    schedule: &RateSchedule,
    sectors: &SectorSet,
    notes: &[String],
    path: impl AsRef<Path>,
) -> Result<()> {
    write_file(
        path.as_ref(),
        &render_rate_schedule(schedule, sectors, notes),
    )
}
