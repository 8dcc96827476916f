//! Household incidence of sector price changes.
//!
//! Baseline prices are normalized to 1, so expenditure values double as
//! baseline quantities and the post-reform cost of the same basket is
//! `sum_i p_i * E[h][i]`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::price::PriceVector;
use crate::table::SectorSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    IncomeClass,
    Ethnicity,
}

impl Dimension {
    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::IncomeClass => "income_class",
            Dimension::Ethnicity => "ethnicity",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "income_class" => Ok(Dimension::IncomeClass),
            "ethnicity" => Ok(Dimension::Ethnicity),
            other => Err(Error::Parse(format!(
                "unknown group dimension {other:?} (expected income_class or ethnicity)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HouseholdGroup {
    pub group_id: String,
    pub dimension: Dimension,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    ItemCodes,
    SectorCodes,
}

/// Monthly expenditure by household group (rows) and item or sector (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpenditureMatrix {
    groups: Vec<HouseholdGroup>,
    items: Vec<String>,
    values: DMatrix<f64>,
    basis: Basis,
}

impl ExpenditureMatrix {
    pub fn new(
        groups: Vec<HouseholdGroup>,
        items: Vec<String>,
        values: DMatrix<f64>,
        basis: Basis,
    ) -> Result<Self> {
        if values.nrows() != groups.len() {
            return Err(Error::DimensionMismatch {
                what: "expenditure rows",
                expected: groups.len(),
                found: values.nrows(),
            });
        }
        if values.ncols() != items.len() {
            return Err(Error::DimensionMismatch {
                what: "expenditure columns",
                expected: items.len(),
                found: values.ncols(),
            });
        }
        let mut seen = BTreeSet::new();
        for g in &groups {
            if !seen.insert(g.group_id.as_str()) {
                return Err(Error::Schema(format!("duplicate group id {}", g.group_id)));
            }
        }
        let mut seen = BTreeSet::new();
        for item in &items {
            if !seen.insert(item.as_str()) {
                return Err(Error::Schema(format!("duplicate item code {item}")));
            }
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidValue {
                    what: "expenditure",
                    index,
                    value,
                });
            }
        }
        for (h, g) in groups.iter().enumerate() {
            if !(values.row(h).sum() > 0.0) {
                return Err(Error::EmptyGroup(g.group_id.clone()));
            }
        }
        Ok(ExpenditureMatrix {
            groups,
            items,
            values,
            basis,
        })
    }

    pub fn groups(&self) -> &[HouseholdGroup] {
        &self.groups
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn group_totals(&self) -> DVector<f64> {
        DVector::from_fn(self.groups.len(), |h, _| self.values.row(h).sum())
    }

    /// Groups of one dimension, in their original order.
    pub fn select_dimension(&self, dimension: Dimension) -> Option<ExpenditureMatrix> {
        let rows: Vec<usize> = (0..self.groups.len())
            .filter(|&h| self.groups[h].dimension == dimension)
            .collect();
        if rows.is_empty() {
            return None;
        }
        Some(ExpenditureMatrix {
            groups: rows.iter().map(|&h| self.groups[h].clone()).collect(),
            items: self.items.clone(),
            values: self.values.select_rows(rows.iter()),
            basis: self.basis,
        })
    }

    /// Dimensions present, in first-appearance order.
    pub fn dimensions(&self) -> Vec<Dimension> {
        let mut out = Vec::new();
        for g in &self.groups {
            if !out.contains(&g.dimension) {
                out.push(g.dimension);
            }
        }
        out
    }
}

/// The twelve household expenditure reporting categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReportingCategory {
    FoodAndNonAlcoholicBeverages,
    AlcoholicBeveragesAndTobacco,
    ClothingAndFootwear,
    HousingAndUtilities,
    FurnishingsAndHouseholdMaintenance,
    Health,
    Transport,
    Communication,
    RecreationAndCulture,
    Education,
    RestaurantsAndHotels,
    MiscellaneousGoodsAndServices,
}

impl ReportingCategory {
    pub const ALL: [ReportingCategory; 12] = [
        Self::FoodAndNonAlcoholicBeverages,
        Self::AlcoholicBeveragesAndTobacco,
        Self::ClothingAndFootwear,
        Self::HousingAndUtilities,
        Self::FurnishingsAndHouseholdMaintenance,
        Self::Health,
        Self::Transport,
        Self::Communication,
        Self::RecreationAndCulture,
        Self::Education,
        Self::RestaurantsAndHotels,
        Self::MiscellaneousGoodsAndServices,
    ];

    const CODES: [&'static str; 12] = [
        "i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x", "xi", "xii",
    ];

    /// Lower-case roman numeral, `i` to `xii`.
    pub fn code(self) -> &'static str {
        Self::CODES[self as usize]
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::FoodAndNonAlcoholicBeverages => "Food and non-alcoholic beverages",
            Self::AlcoholicBeveragesAndTobacco => "Alcoholic beverages and tobacco",
            Self::ClothingAndFootwear => "Clothing and footwear",
            Self::HousingAndUtilities => "Housing, water, electricity, gas and other fuels",
            Self::FurnishingsAndHouseholdMaintenance => {
                "Furnishings, household equipment and maintenance"
            }
            Self::Health => "Health",
            Self::Transport => "Transport",
            Self::Communication => "Communication",
            Self::RecreationAndCulture => "Recreation and culture",
            Self::Education => "Education",
            Self::RestaurantsAndHotels => "Restaurants and hotels",
            Self::MiscellaneousGoodsAndServices => "Miscellaneous goods and services",
        }
    }
}

impl FromStr for ReportingCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::CODES
            .iter()
            .position(|c| *c == s)
            .map(|i| Self::ALL[i])
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown reporting category {s:?} (expected i to xii)"
                ))
            })
    }
}

/// Assigns every item or sector code to one reporting category.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CategoryMap(BTreeMap<String, ReportingCategory>);

impl CategoryMap {
    pub fn new<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, ReportingCategory)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (code, category) in pairs {
            let code = code.into();
            if map.insert(code.clone(), category).is_some() {
                return Err(Error::Schema(format!("code {code} is mapped twice")));
            }
        }
        Ok(CategoryMap(map))
    }

    pub fn get(&self, code: &str) -> Option<ReportingCategory> {
        self.0.get(code).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, ReportingCategory)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Fails with the list of codes the map does not cover.
    pub fn check_covers(&self, codes: &[String]) -> Result<()> {
        let missing: Vec<String> = codes
            .iter()
            .filter(|c| !self.0.contains_key(c.as_str()))
            .cloned()
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::UnmappedCategory(missing))
        }
    }
}

/// Extra spending needed to buy the baseline basket at new prices:
/// `(p_i - 1) * E[h][i]`.
pub fn expenditure_change(
    expenditure: &ExpenditureMatrix,
    sectors: &SectorSet,
    prices: &PriceVector,
) -> Result<DMatrix<f64>> {
    if expenditure.basis() != Basis::SectorCodes {
        return Err(Error::BasisMismatch(
            "expenditure is keyed by item codes; map it to sectors first".into(),
        ));
    }
    if prices.len() != sectors.len() {
        return Err(Error::DimensionMismatch {
            what: "prices",
            expected: sectors.len(),
            found: prices.len(),
        });
    }
    if expenditure.items().len() != sectors.len() {
        return Err(Error::DimensionMismatch {
            what: "expenditure sectors",
            expected: sectors.len(),
            found: expenditure.items().len(),
        });
    }
    if expenditure.items() != sectors.ids() {
        return Err(Error::BasisMismatch(
            "expenditure columns are not in sector order".into(),
        ));
    }
    let mut delta = expenditure.values().clone();
    for (mut column, p) in delta.column_iter_mut().zip(prices.values().iter()) {
        column *= p - 1.0;
    }
    Ok(delta)
}

/// [`expenditure_change`] for item-keyed spending, given each item's price
/// relative (see [`crate::ingest::item_prices`]).
pub fn item_expenditure_change(
    expenditure: &ExpenditureMatrix,
    item_prices: &PriceVector,
) -> Result<DMatrix<f64>> {
    if expenditure.basis() != Basis::ItemCodes {
        return Err(Error::BasisMismatch(
            "expenditure is keyed by sector".into(),
        ));
    }
    if item_prices.len() != expenditure.items().len() {
        return Err(Error::DimensionMismatch {
            what: "item prices",
            expected: expenditure.items().len(),
            found: item_prices.len(),
        });
    }
    let mut delta = expenditure.values().clone();
    for (mut column, p) in delta.column_iter_mut().zip(item_prices.values().iter()) {
        column *= p - 1.0;
    }
    Ok(delta)
}

fn check_same_shape(expenditure: &ExpenditureMatrix, delta: &DMatrix<f64>) -> Result<()> {
    let e = expenditure.values();
    if e.shape() != delta.shape() {
        return Err(Error::ShapeMismatch {
            left_rows: e.nrows(),
            left_cols: e.ncols(),
            right_rows: delta.nrows(),
            right_cols: delta.ncols(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupIncidence {
    pub group: HouseholdGroup,
    pub total_before: f64,
    pub total_after: f64,
    pub percent_change: f64,
}

pub fn incidence_by_group(
    expenditure: &ExpenditureMatrix,
    delta: &DMatrix<f64>,
) -> Result<Vec<GroupIncidence>> {
    check_same_shape(expenditure, delta)?;
    expenditure
        .groups()
        .iter()
        .enumerate()
        .map(|(h, group)| {
            let total_before = expenditure.values().row(h).sum();
            let total_after = total_before + delta.row(h).sum();
            Ok(GroupIncidence {
                group: group.clone(),
                total_before,
                total_after,
                percent_change: purchasing_power_change(total_before, total_after)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryRow {
    pub category: ReportingCategory,
    /// Percent of the group's baseline total.
    pub baseline_share: f64,
    /// Percent of the group's post-reform total.
    pub post_share: f64,
    /// `post_share - baseline_share`, in percentage points.
    pub share_change: f64,
    /// Percent change of spending within the category.
    pub percent_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupCategoryTable {
    pub group: HouseholdGroup,
    pub rows: Vec<CategoryRow>,
    pub total_before: f64,
    pub total_after: f64,
    pub total_percent_change: f64,
}

/// Per-group category composition before and after the reform.
///
/// Only categories that at least one code maps to are listed, in category
/// order.
pub fn category_report(
    expenditure: &ExpenditureMatrix,
    delta: &DMatrix<f64>,
    map: &CategoryMap,
) -> Result<Vec<GroupCategoryTable>> {
    check_same_shape(expenditure, delta)?;
    map.check_covers(expenditure.items())?;
    let item_category: Vec<ReportingCategory> = expenditure
        .items()
        .iter()
        .map(|c| map.get(c).expect("coverage checked"))
        .collect();
    let categories: BTreeSet<ReportingCategory> = item_category.iter().copied().collect();

    let e = expenditure.values();
    expenditure
        .groups()
        .iter()
        .enumerate()
        .map(|(h, group)| {
            let total_before = e.row(h).sum();
            if !(total_before > 0.0) {
                return Err(Error::EmptyGroup(group.group_id.clone()));
            }
            let total_after = total_before + delta.row(h).sum();
            let rows = categories
                .iter()
                .map(|&category| {
                    let (before, change) = item_category
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| **c == category)
                        .fold((0.0, 0.0), |(b, d), (i, _)| {
                            (b + e[(h, i)], d + delta[(h, i)])
                        });
                    let baseline_share = 100.0 * before / total_before;
                    let post_share = 100.0 * (before + change) / total_after;
                    CategoryRow {
                        category,
                        baseline_share,
                        post_share,
                        share_change: post_share - baseline_share,
                        percent_change: if before > 0.0 {
                            100.0 * change / before
                        } else {
                            0.0
                        },
                    }
                })
                .collect();
            Ok(GroupCategoryTable {
                group: group.clone(),
                rows,
                total_before,
                total_after,
                total_percent_change: purchasing_power_change(total_before, total_after)?,
            })
        })
        .collect()
}

/// Percent change in the cost of the baseline basket.
pub fn purchasing_power_change(total_before: f64, total_after: f64) -> Result<f64> {
    if !(total_before > 0.0) {
        return Err(Error::NonPositiveBase(total_before));
    }
    Ok(100.0 * (total_after - total_before) / total_before)
}

/// Each group's total divided by the base group's total.
pub fn gap_ratios(totals: &[(String, f64)], base_group: &str) -> Result<Vec<(String, f64)>> {
    let base = totals
        .iter()
        .find(|(id, _)| id == base_group)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::UnknownBaseGroup(base_group.to_string()))?;
    if !(base > 0.0) {
        return Err(Error::NonPositiveBase(base));
    }
    Ok(totals
        .iter()
        .map(|(id, v)| {
            let ratio = if id == base_group { 1.0 } else { v / base };
            (id.clone(), ratio)
        })
        .collect())
}

/// Percent change of each group's gap ratio.
pub fn gap_change_report(
    before: &[(String, f64)],
    after: &[(String, f64)],
) -> Result<Vec<(String, f64)>> {
    if before.len() != after.len() {
        return Err(Error::Misaligned(format!(
            "{} ratios before, {} after",
            before.len(),
            after.len()
        )));
    }
    before
        .iter()
        .zip(after)
        .map(|((id_b, b), (id_a, a))| {
            if id_b != id_a {
                return Err(Error::Misaligned(format!(
                    "group {id_b} paired with {id_a}"
                )));
            }
            if !(*b > 0.0) {
                return Err(Error::NonPositiveBase(*b));
            }
            Ok((id_b.clone(), 100.0 * (a - b) / b))
        })
        .collect()
}
