//! Cost-push price model with multi-rate value-added tax.
//!
//! Prices are normalized so that every sector's baseline price is 1. The
//! reform replaces the old output tax row with a value-added tax row and
//! scales each column of the transposed coefficient matrix by the share of
//! the supplying sector's output that is standard-rated.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::leontief::leontief_inverse;
use crate::table::CoefficientBundle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RateCategory {
    StandardRated,
    ZeroRated,
    Exempt,
}

impl RateCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            RateCategory::StandardRated => "standard_rated",
            RateCategory::ZeroRated => "zero_rated",
            RateCategory::Exempt => "exempt",
        }
    }

    /// Standard-rated share assumed when an entry gives none.
    pub fn default_share(self) -> f64 {
        match self {
            RateCategory::StandardRated => 1.0,
            RateCategory::ZeroRated | RateCategory::Exempt => 0.0,
        }
    }
}

impl fmt::Display for RateCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RateCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard_rated" => Ok(RateCategory::StandardRated),
            "zero_rated" => Ok(RateCategory::ZeroRated),
            "exempt" => Ok(RateCategory::Exempt),
            other => Err(Error::Parse(format!(
                "unknown rate category {other:?} (expected standard_rated, zero_rated or exempt)"
            ))),
        }
    }
}

/// Tax treatment of one sector.
///
/// `category` records the dominant treatment for reporting. The model uses
/// `standard_share` alone: a zero-rated sector with some standard-rated
/// activities simply carries a share between 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEntry {
    pub category: RateCategory,
    pub standard_share: f64,
}

impl RateEntry {
    pub fn new(category: RateCategory, standard_share: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&standard_share) {
            return Err(Error::InvalidShare(standard_share));
        }
        Ok(RateEntry {
            category,
            standard_share,
        })
    }

    pub fn of(category: RateCategory) -> Self {
        RateEntry {
            category,
            standard_share: category.default_share(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateSchedule {
    entries: Vec<RateEntry>,
    gst_rate: f64,
}

impl RateSchedule {
    pub fn new(entries: Vec<RateEntry>, gst_rate: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&gst_rate) {
            return Err(Error::InvalidValue {
                what: "gst rate",
                index: 0,
                value: gst_rate,
            });
        }
        for e in &entries {
            if !(0.0..=1.0).contains(&e.standard_share) {
                return Err(Error::InvalidShare(e.standard_share));
            }
        }
        Ok(RateSchedule { entries, gst_rate })
    }

    /// Every sector fully standard-rated.
    pub fn uniform(n: usize, gst_rate: f64) -> Result<Self> {
        Self::new(
            vec![RateEntry::of(RateCategory::StandardRated); n],
            gst_rate,
        )
    }

    pub fn entries(&self) -> &[RateEntry] {
        &self.entries
    }

    pub fn gst_rate(&self) -> f64 {
        self.gst_rate
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn with_entry(mut self, index: usize, entry: RateEntry) -> Self {
        self.entries[index] = entry;
        self
    }
}

/// Diagonal of the rate-mask matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMask(DVector<f64>);

impl RateMask {
    pub fn new(diagonal: DVector<f64>) -> Result<Self> {
        for (index, &value) in diagonal.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidValue {
                    what: "rate mask",
                    index,
                    value,
                });
            }
        }
        Ok(RateMask(diagonal))
    }

    pub fn full(n: usize) -> Self {
        RateMask(DVector::from_element(n, 1.0))
    }

    pub fn diagonal(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Normalized sector prices; every entry finite and strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceVector(DVector<f64>);

impl PriceVector {
    pub fn new(values: DVector<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidPrice { index, value });
            }
        }
        Ok(PriceVector(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(values))
    }

    pub fn ones(n: usize) -> Self {
        PriceVector(DVector::from_element(n, 1.0))
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Elementwise ratio to a reference price vector.
    pub fn relative_to(&self, reference: &PriceVector) -> Result<PriceVector> {
        check_len("reference prices", self.len(), reference.len())?;
        PriceVector::new(self.0.component_div(&reference.0))
    }
}

/// How inputs bought from masked (non standard-rated) suppliers enter the
/// post-reform price equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaskedInputTreatment {
    /// Masked input costs leave the price equation entirely.
    #[default]
    Drop,
    /// Masked inputs are charged at their baseline price of 1.
    Baseline,
}

impl FromStr for MaskedInputTreatment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop" => Ok(Self::Drop),
            "baseline" => Ok(Self::Baseline),
            other => Err(Error::Parse(format!(
                "unknown masked-input treatment {other:?} (expected drop or baseline)"
            ))),
        }
    }
}

impl fmt::Display for MaskedInputTreatment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Drop => "drop",
            Self::Baseline => "baseline",
        })
    }
}

/// Which tax row enters the exogenous costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TaxRow {
    /// Value-added tax coefficients from [`gst_coefficients`].
    #[default]
    Gst,
    /// The table's own indirect tax row (no reform).
    Baseline,
}

impl FromStr for TaxRow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gst" => Ok(Self::Gst),
            "baseline" => Ok(Self::Baseline),
            other => Err(Error::Parse(format!(
                "unknown tax row {other:?} (expected gst or baseline)"
            ))),
        }
    }
}

impl fmt::Display for TaxRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gst => "gst",
            Self::Baseline => "baseline",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimulationOptions {
    pub masked_input_treatment: MaskedInputTreatment,
    /// Exempt sectors cannot reclaim tax paid on standard-rated inputs;
    /// add it to their costs.
    pub exempt_retains_input_tax: bool,
    pub tax_row: TaxRow,
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        });
    }
    Ok(())
}

/// `(I - A' B)^-1`, the Leontief inverse of the transposed coefficient
/// matrix with column `i` scaled by `mask[i]`.
///
/// With a full mask this is exactly `leontief_inverse(A')`.
pub fn masked_inverse(a: &DMatrix<f64>, mask: &RateMask) -> Result<DMatrix<f64>> {
    check_len("rate mask", a.nrows(), mask.len())?;
    leontief_inverse(&masked_transpose(a, mask))
}

/// `A' B` for a diagonal `B`.
pub fn masked_transpose(a: &DMatrix<f64>, mask: &RateMask) -> DMatrix<f64> {
    let mut at = a.transpose();
    for (mut column, &b) in at.column_iter_mut().zip(mask.diagonal().iter()) {
        column *= b;
    }
    at
}

pub fn rate_mask(schedule: &RateSchedule) -> RateMask {
    RateMask(DVector::from_iterator(
        schedule.len(),
        schedule.entries().iter().map(|e| e.standard_share),
    ))
}

/// Value-added tax per unit of output: rate times standard-rated share
/// times value added (labor plus capital).
pub fn gst_coefficients(
    bundle: &CoefficientBundle,
    schedule: &RateSchedule,
) -> Result<DVector<f64>> {
    check_len("rate schedule", bundle.sectors().len(), schedule.len())?;
    let value_added = bundle.value_added();
    Ok(DVector::from_fn(schedule.len(), |j, _| {
        schedule.gst_rate() * schedule.entries()[j].standard_share * value_added[j]
    }))
}

/// Baseline prices `(I - A')^-1 (l + v + m + t)`; all ones for a balanced bundle.
pub fn baseline_prices(bundle: &CoefficientBundle) -> Result<PriceVector> {
    let costs = primary_costs(bundle, bundle.indirect_tax());
    solve(bundle.a(), &RateMask::full(bundle.sectors().len()), &costs)
}

/// Exogenous cost column of the post-reform price equation.
pub fn exogenous_costs(
    bundle: &CoefficientBundle,
    schedule: &RateSchedule,
    options: &SimulationOptions,
) -> Result<DVector<f64>> {
    let n = bundle.sectors().len();
    check_len("rate schedule", n, schedule.len())?;
    let tax = match options.tax_row {
        TaxRow::Gst => gst_coefficients(bundle, schedule)?,
        TaxRow::Baseline => bundle.indirect_tax().clone(),
    };
    let mut costs = primary_costs(bundle, &tax);
    let mask = rate_mask(schedule);
    let a = bundle.a();
    if options.masked_input_treatment == MaskedInputTreatment::Baseline {
        let unmasked = mask.diagonal().map(|b| 1.0 - b);
        costs += a.transpose() * unmasked;
    }
    if options.exempt_retains_input_tax {
        for (j, entry) in schedule.entries().iter().enumerate() {
            if entry.category != RateCategory::Exempt {
                continue;
            }
            let taxed_inputs = a.column(j).dot(mask.diagonal());
            costs[j] += schedule.gst_rate() * (1.0 - entry.standard_share) * taxed_inputs;
        }
    }
    Ok(costs)
}

/// Post-reform normalized prices `(I - A' B)^-1 c`.
pub fn simulate_prices(
    bundle: &CoefficientBundle,
    schedule: &RateSchedule,
    options: &SimulationOptions,
) -> Result<PriceVector> {
    let costs = exogenous_costs(bundle, schedule, options)?;
    solve(bundle.a(), &rate_mask(schedule), &costs)
}

fn primary_costs(bundle: &CoefficientBundle, tax: &DVector<f64>) -> DVector<f64> {
    bundle.value_added() + bundle.imports() + tax
}

fn solve(a: &DMatrix<f64>, mask: &RateMask, costs: &DVector<f64>) -> Result<PriceVector> {
    let inverse = masked_inverse(a, mask)?;
    PriceVector::new(inverse * costs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceChangeSummary {
    /// `(p_i - 1) * 100` per sector.
    pub percent_changes: Vec<f64>,
    pub risers: usize,
    /// Mean percent rise over sectors whose price rose; 0 when none did.
    pub mean_rise: f64,
    pub decliners: usize,
    /// Mean absolute percent decline over sectors whose price fell.
    pub mean_decline: f64,
    /// `mean_decline - mean_rise`: positive when declines dominate.
    pub net_decline: f64,
    /// Weighted mean percent change, when weights were supplied.
    pub weighted_mean_change: Option<f64>,
}

pub fn price_change_summary(
    prices: &PriceVector,
    weights: Option<&DVector<f64>>,
) -> Result<PriceChangeSummary> {
    let percent_changes: Vec<f64> = prices.values().iter().map(|p| (p - 1.0) * 100.0).collect();
    let rises: Vec<f64> = percent_changes
        .iter()
        .copied()
        .filter(|&c| c > 0.0)
        .collect();
    let declines: Vec<f64> = percent_changes
        .iter()
        .copied()
        .filter(|&c| c < 0.0)
        .map(f64::abs)
        .collect();
    let mean = |v: &[f64]| {
        if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    let weighted_mean_change = match weights {
        None => None,
        Some(w) => {
            check_len("summary weights", prices.len(), w.len())?;
            let total = w.sum();
            if !(total > 0.0) {
                return Err(Error::NonPositiveBase(total));
            }
            let dot: f64 = w.iter().zip(&percent_changes).map(|(w, c)| w * c).sum();
            Some(dot / total)
        }
    };
    let mean_rise = mean(&rises);
    let mean_decline = mean(&declines);
    Ok(PriceChangeSummary {
        risers: rises.len(),
        mean_rise,
        decliners: declines.len(),
        mean_decline,
        net_decline: mean_decline - mean_rise,
        weighted_mean_change,
        percent_changes,
    })
}
