//! Input-output price model for replacing an output-based sales tax with a
//! multi-rate value-added tax, and the household incidence of the
//! resulting price changes.
//!
//! The pipeline runs table -> coefficients ([`table`]) -> post-reform
//! prices ([`price`]) -> household expenditure change ([`incidence`]), with
//! file formats in [`ingest`] and sanity checks in [`diagnostics`].

// `!(x >= 0.0)` style checks are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod example3;
pub mod incidence;
pub mod ingest;
pub mod leontief;
pub mod price;
pub mod table;

pub use error::{Error, Identity, Location, Result};
pub use incidence::{
    category_report, expenditure_change, gap_change_report, gap_ratios, incidence_by_group,
    item_expenditure_change, purchasing_power_change, Basis, CategoryMap, CategoryRow, Dimension,
    ExpenditureMatrix, GroupCategoryTable, GroupIncidence, HouseholdGroup, ReportingCategory,
};
pub use leontief::{leontief_inverse, quantity_model, spectral_radius, SpectralEstimate};
pub use price::{
    baseline_prices, gst_coefficients, masked_inverse, price_change_summary, rate_mask,
    simulate_prices, MaskedInputTreatment, PriceChangeSummary, PriceVector, RateCategory,
    RateEntry, RateMask, RateSchedule, SimulationOptions, TaxRow,
};
pub use table::{
    balance_report, derive_coefficients, derive_coefficients_with_tolerance, BalanceReport,
    CoefficientBundle, IoTable, IoTableParts, SectorSet, DEFAULT_BALANCE_TOLERANCE,
};
