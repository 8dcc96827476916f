use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::{csv_field, format_number, write_file, CsvDocument};
use crate::error::{Error, Result};
use crate::incidence::{Basis, ExpenditureMatrix};
use crate::price::PriceVector;
use crate::table::SectorSet;

/// Weights of an item's spending must sum to one within this tolerance.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

const HEADER: [&str; 3] = ["item_code", "sector_id", "weight"];

#[derive(Debug, Clone, PartialEq)]
pub struct ConcordanceLink {
    pub item_code: String,
    pub sector_id: String,
    pub weight: f64,
}

/// Weighted many-to-many mapping from consumption items to IO sectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Concordance {
    links: Vec<ConcordanceLink>,
    sector_index: Vec<usize>,
}

impl Concordance {
    pub fn new(links: Vec<ConcordanceLink>, sectors: &SectorSet) -> Result<Self> {
        let mut sector_index = Vec::with_capacity(links.len());
        let mut sums: BTreeMap<&str, f64> = BTreeMap::new();
        for link in &links {
            let s = sectors
                .index_of(&link.sector_id)
                .ok_or_else(|| Error::UnknownSector(link.sector_id.clone()))?;
            if !(link.weight > 0.0 && link.weight <= 1.0) {
                return Err(Error::InvalidWeight(format!(
                    "{} -> {}: {} is outside (0, 1]",
                    link.item_code, link.sector_id, link.weight
                )));
            }
            sector_index.push(s);
            *sums.entry(link.item_code.as_str()).or_default() += link.weight;
        }
        for (item, sum) in sums {
            if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                return Err(Error::InvalidWeight(format!(
                    "weights of {item} sum to {sum}, not 1"
                )));
            }
        }
        Ok(Concordance {
            links,
            sector_index,
        })
    }

    /// Each sector id maps to itself with weight 1.
    pub fn identity(sectors: &SectorSet) -> Self {
        Concordance {
            links: sectors
                .ids()
                .iter()
                .map(|id| ConcordanceLink {
                    item_code: id.clone(),
                    sector_id: id.clone(),
                    weight: 1.0,
                })
                .collect(),
            sector_index: (0..sectors.len()).collect(),
        }
    }

    pub fn links(&self) -> &[ConcordanceLink] {
        &self.links
    }

    pub fn covers(&self, item_code: &str) -> bool {
        self.links.iter().any(|l| l.item_code == item_code)
    }
}

/// Redistributes item spending over sectors:
/// `E_sector[h][s] = sum_item weight(item, s) * E[h][item]`.
pub fn map_expenditure(
    expenditure: &ExpenditureMatrix,
    concordance: &Concordance,
    sectors: &SectorSet,
) -> Result<ExpenditureMatrix> {
    if expenditure.basis() != Basis::ItemCodes {
        return Err(Error::BasisMismatch(
            "expenditure is already keyed by sector".into(),
        ));
    }
    let unmapped: Vec<String> = expenditure
        .items()
        .iter()
        .filter(|item| !concordance.covers(item))
        .cloned()
        .collect();
    if !unmapped.is_empty() {
        return Err(Error::UnmappedItem(unmapped));
    }
    let item_index: BTreeMap<&str, usize> = expenditure
        .items()
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    // items x sectors weight matrix
    let mut weights = DMatrix::zeros(expenditure.items().len(), sectors.len());
    for (link, &s) in concordance.links.iter().zip(&concordance.sector_index) {
        if s >= sectors.len() || sectors.id(s) != link.sector_id {
            return Err(Error::Misaligned(
                "concordance was built for a different sector set".into(),
            ));
        }
        if let Some(&i) = item_index.get(link.item_code.as_str()) {
            weights[(i, s)] += link.weight;
        }
    }
    ExpenditureMatrix::new(
        expenditure.groups().to_vec(),
        sectors.ids().to_vec(),
        expenditure.values() * weights,
        Basis::SectorCodes,
    )
}

/// Price relative of each item: the weighted mean of its sectors' prices.
pub fn item_prices(
    concordance: &Concordance,
    items: &[String],
    sectors: &SectorSet,
    prices: &PriceVector,
) -> Result<PriceVector> {
    if prices.len() != sectors.len() {
        return Err(Error::DimensionMismatch {
            what: "prices",
            expected: sectors.len(),
            found: prices.len(),
        });
    }
    let unmapped: Vec<String> = items
        .iter()
        .filter(|i| !concordance.covers(i))
        .cloned()
        .collect();
    if !unmapped.is_empty() {
        return Err(Error::UnmappedItem(unmapped));
    }
    let mut out = DVector::zeros(items.len());
    for (link, &s) in concordance.links.iter().zip(&concordance.sector_index) {
        if s >= sectors.len() || sectors.id(s) != link.sector_id {
            return Err(Error::Misaligned(
                "concordance was built for a different sector set".into(),
            ));
        }
        if let Some(i) = items.iter().position(|c| *c == link.item_code) {
            out[i] += link.weight * prices.values()[s];
        }
    }
    PriceVector::new(out)
}

pub fn load_concordance(path: impl AsRef<Path>, sectors: &SectorSet) -> Result<Concordance> {
    let doc = CsvDocument::read(path.as_ref())?;
    doc.expect_header(&HEADER)?;
    let mut links = Vec::with_capacity(doc.rows.len());
    let mut first_line: BTreeMap<String, u64> = BTreeMap::new();
    let mut pairs: BTreeMap<(String, String), u64> = BTreeMap::new();
    for (line, record) in &doc.rows {
        let line = *line;
        let item = record.get(0).unwrap_or("").to_string();
        if item.is_empty() {
            return Err(doc.err(line, 0, Error::Schema("empty item_code".into())));
        }
        let sector = record.get(1).unwrap_or("").to_string();
        if sectors.index_of(&sector).is_none() {
            return Err(doc.err(line, 1, Error::UnknownSector(sector)));
        }
        let weight = doc.number(line, record, 2)?;
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(doc.err(
                line,
                2,
                Error::InvalidWeight(format!("{weight} is outside (0, 1]")),
            ));
        }
        if let Some(first) = pairs.insert((item.clone(), sector.clone()), line) {
            return Err(doc.err(
                line,
                1,
                Error::Schema(format!(
                    "{item} -> {sector} repeated (first on line {first})"
                )),
            ));
        }
        first_line.entry(item.clone()).or_insert(line);
        links.push(ConcordanceLink {
            item_code: item,
            sector_id: sector,
            weight,
        });
    }
    Concordance::new(links, sectors).map_err(|e| {
        let line = match &e {
            Error::InvalidWeight(msg) => first_line
                .iter()
                .find(|(item, _)| msg.starts_with(&format!("weights of {item} ")))
                .map(|(_, l)| *l)
                .unwrap_or(doc.header_line),
            _ => doc.header_line,
        };
        doc.err(line, 2, e)
    })
}

pub fn render_concordance(c: &Concordance) -> String {
    let mut out = HEADER.join(",");
    out.push('\n');
    for l in c.links() {
        writeln!(
            out,
            "{},{},{}",
            csv_field(&l.item_code),
            csv_field(&l.sector_id),
            format_number(l.weight, true)
        )
        .unwrap();
    }
    out
}

pub fn write_concordance(c: &Concordance, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &render_concordance(c))
}
