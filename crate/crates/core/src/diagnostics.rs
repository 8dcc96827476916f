//! Stability and sanity checks on coefficients and expenditure structure.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::incidence::ExpenditureMatrix;
use crate::leontief::{spectral_radius, SpectralEstimate};
use crate::price::{masked_transpose, RateMask};
use crate::table::CoefficientBundle;

/// Mean absolute deviation between two equally shaped matrices.
pub fn mad(left: &DMatrix<f64>, right: &DMatrix<f64>) -> Result<f64> {
    if left.shape() != right.shape() {
        return Err(Error::ShapeMismatch {
            left_rows: left.nrows(),
            left_cols: left.ncols(),
            right_rows: right.nrows(),
            right_cols: right.ncols(),
        });
    }
    if left.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = left
        .iter()
        .zip(right.iter())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(total / left.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupDrift {
    pub group_id: String,
    /// Largest absolute share change across items, percentage points.
    pub max: f64,
    /// Smallest absolute share change across items, percentage points.
    pub min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    pub groups: Vec<GroupDrift>,
    pub max: f64,
    pub min: f64,
}

/// Change in expenditure composition between two surveys of the same
/// groups and items.
pub fn structure_drift(
    before: &ExpenditureMatrix,
    after: &ExpenditureMatrix,
) -> Result<DriftReport> {
    if before.items() != after.items() {
        return Err(Error::Misaligned("item codes differ".into()));
    }
    if before.groups().len() != after.groups().len() {
        return Err(Error::Misaligned(format!(
            "{} groups vs {}",
            before.groups().len(),
            after.groups().len()
        )));
    }
    let mut groups = Vec::with_capacity(before.groups().len());
    for (h, (g1, g2)) in before.groups().iter().zip(after.groups()).enumerate() {
        if g1.group_id != g2.group_id {
            return Err(Error::Misaligned(format!(
                "group {} paired with {}",
                g1.group_id, g2.group_id
            )));
        }
        let r1 = before.values().row(h);
        let r2 = after.values().row(h);
        let (t1, t2) = (r1.sum(), r2.sum());
        let changes = r1
            .iter()
            .zip(r2.iter())
            .map(|(a, b)| (100.0 * b / t2 - 100.0 * a / t1).abs());
        let (min, max) = changes.fold((f64::INFINITY, 0.0_f64), |(lo, hi), c| {
            (lo.min(c), hi.max(c))
        });
        groups.push(GroupDrift {
            group_id: g1.group_id.clone(),
            max,
            min: if min.is_finite() { min } else { 0.0 },
        });
    }
    let max = groups.iter().fold(0.0_f64, |m, g| m.max(g.max));
    let min = groups.iter().map(|g| g.min).fold(f64::INFINITY, f64::min);
    Ok(DriftReport {
        groups,
        max,
        min: if min.is_finite() { min } else { 0.0 },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductivityReport {
    pub estimate: SpectralEstimate,
    pub passed: bool,
}

impl ProductivityReport {
    pub fn spectral_radius(&self) -> f64 {
        self.estimate.radius
    }
}

/// Spectral radius of `A`, or of `A' B` when a mask is given.
///
/// Passing means [`crate::leontief::leontief_inverse`] (resp.
/// [`crate::price::masked_inverse`]) will not report a non-productive matrix.
pub fn productivity_check(a: &DMatrix<f64>, mask: Option<&RateMask>) -> Result<ProductivityReport> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            what: "coefficient matrix columns",
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let estimate = match mask {
        None => spectral_radius(a),
        Some(mask) => {
            if mask.len() != a.nrows() {
                return Err(Error::DimensionMismatch {
                    what: "rate mask",
                    expected: a.nrows(),
                    found: mask.len(),
                });
            }
            spectral_radius(&masked_transpose(a, mask))
        }
    };
    Ok(ProductivityReport {
        passed: estimate.is_productive(),
        estimate,
    })
}

/// Baseline indirect tax per unit of value added, `t / (l + v)`.
pub fn tax_to_va_ratio(bundle: &CoefficientBundle) -> Result<DVector<f64>> {
    let value_added = bundle.value_added();
    for (j, &va) in value_added.iter().enumerate() {
        if !(va > 0.0) {
            return Err(Error::ZeroValueAdded {
                sector: bundle.sectors().id(j).to_string(),
            });
        }
    }
    Ok(bundle.indirect_tax().component_div(&value_added))
}
