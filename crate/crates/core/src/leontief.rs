//! Leontief inverse, spectral radius estimation and the quantity model.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Iteration cap for the spectral radius estimate.
pub const POWER_ITERATION_CAP: usize = 1000;
/// Stop once successive radius estimates differ by less than this.
pub const POWER_ITERATION_TOLERANCE: f64 = 1e-12;
/// A matrix counts as productive when its spectral radius is below `1 - PRODUCTIVITY_MARGIN`.
pub const PRODUCTIVITY_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub radius: f64,
    /// Collatz-Wielandt upper bound from the final iterate; always valid.
    pub upper_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SpectralEstimate {
    pub fn is_productive(&self) -> bool {
        self.radius < 1.0 - PRODUCTIVITY_MARGIN
    }
}

/// Estimates the spectral radius of a nonnegative square matrix.
///
/// Iterates on `M + I` from the all-ones vector. The shift keeps every
/// iterate strictly positive and removes the oscillation that plain power
/// iteration shows on periodic matrices; the radius of `M` is the radius of
/// the shifted matrix minus one.
pub fn spectral_radius(m: &DMatrix<f64>) -> SpectralEstimate {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "spectral radius needs a square matrix");
    if n == 0 {
        return SpectralEstimate {
            radius: 0.0,
            upper_bound: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let mut x = DVector::from_element(n, 1.0);
    let mut radius = f64::NAN;
    let mut upper_bound = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    for k in 1..=POWER_ITERATION_CAP {
        iterations = k;
        let mx = m * &x;
        upper_bound = mx
            .iter()
            .zip(x.iter())
            .filter(|(_, &xi)| xi > 0.0)
            .map(|(&yi, &xi)| yi / xi)
            .fold(0.0, f64::max);
        let y = mx + &x;
        // max(x) == 1 after the first step, so the norm ratio is max(y).
        let norm = y.max() / x.max();
        let estimate = norm - 1.0;
        let delta = (estimate - radius).abs();
        radius = estimate;
        x = y / norm;
        if delta < POWER_ITERATION_TOLERANCE {
            converged = true;
            break;
        }
    }
    SpectralEstimate {
        radius: radius.max(0.0),
        upper_bound,
        iterations,
        converged,
    }
}

/// Returns `(I - A)^-1` for a nonnegative productive matrix.
pub fn leontief_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "coefficient matrix columns",
            expected: n,
            found: a.ncols(),
        });
    }
    for (index, &value) in a.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidValue {
                what: "coefficient matrix",
                index,
                value,
            });
        }
    }
    let estimate = spectral_radius(a);
    if !estimate.is_productive() {
        return Err(Error::NonProductive {
            spectral_radius: estimate.radius,
        });
    }
    let inverse = (DMatrix::identity(n, n) - a)
        .lu()
        .try_inverse()
        .ok_or(Error::Singular)?;
    if inverse.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    // A nonnegative matrix with radius below one has a nonnegative inverse;
    // a negative entry means the radius estimate was wrong.
    if inverse.iter().any(|&v| v < -1e-9) {
        return Err(Error::NonProductive {
            spectral_radius: estimate.radius,
        });
    }
    Ok(inverse)
}

/// Gross output needed to meet final demand plus exports: `L (f + e)`.
pub fn quantity_model(
    leontief: &DMatrix<f64>,
    final_demand: &DVector<f64>,
    exports: &DVector<f64>,
) -> Result<DVector<f64>> {
    let n = leontief.nrows();
    if leontief.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "Leontief inverse columns",
            expected: n,
            found: leontief.ncols(),
        });
    }
    for (what, v) in [("final demand", final_demand), ("exports", exports)] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                what,
                expected: n,
                found: v.len(),
            });
        }
    }
    Ok(leontief * (final_demand + exports))
}
