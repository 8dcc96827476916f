//! Input-output table data model and technical coefficients.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Identity, Result};

/// Relative tolerance for the row and column accounting identities.
pub const DEFAULT_BALANCE_TOLERANCE: f64 = 1e-6;

/// Ordered list of sectors. Index `i` means the same sector in every
/// matrix and vector built from this set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorSet {
    ids: Vec<String>,
    names: Vec<String>,
}

impl SectorSet {
    pub fn new<I, S, T>(sectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let (ids, names): (Vec<String>, Vec<String>) = sectors
            .into_iter()
            .map(|(id, name)| (id.into(), name.into()))
            .unzip();
        if ids.is_empty() {
            return Err(Error::InvalidSectorSet(
                "at least one sector is required".into(),
            ));
        }
        for (i, id) in ids.iter().enumerate() {
            if id.trim().is_empty() {
                return Err(Error::InvalidSectorSet(format!(
                    "sector {} has an empty id",
                    i + 1
                )));
            }
            if ids[..i].contains(id) {
                return Err(Error::InvalidSectorSet(format!("duplicate sector id {id}")));
            }
        }
        Ok(SectorSet { ids, names })
    }

    /// Sector set whose names equal the ids.
    pub fn from_ids<I, S>(ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(ids.into_iter().map(|id| {
            let id = id.into();
            (id.clone(), id)
        }))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, index: usize) -> &str {
        &self.ids[index]
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|s| s == id)
    }
}

/// Flows of a square input-output table, in currency units.
#[derive(Debug, Clone)]
pub struct IoTableParts {
    pub sectors: SectorSet,
    /// `intermediate[(i, j)]`: sales of sector `i` to sector `j`.
    pub intermediate: DMatrix<f64>,
    pub final_demand: DVector<f64>,
    pub exports: DVector<f64>,
    pub labor: DVector<f64>,
    pub capital: DVector<f64>,
    pub imports: DVector<f64>,
    pub indirect_tax: DVector<f64>,
    pub output: DVector<f64>,
}

/// A validated input-output table.
///
/// Construction checks shapes, signs and strictly positive output. The
/// accounting identities are not enforced here because published tables
/// carry rounding; see [`balance_report`] and [`derive_coefficients`].
#[derive(Debug, Clone)]
pub struct IoTable(IoTableParts);

impl IoTable {
    pub fn new(parts: IoTableParts) -> Result<Self> {
        let n = parts.sectors.len();
        if parts.intermediate.nrows() != n || parts.intermediate.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "intermediate flows",
                expected: n,
                found: if parts.intermediate.nrows() != n {
                    parts.intermediate.nrows()
                } else {
                    parts.intermediate.ncols()
                },
            });
        }
        let vectors: [(&'static str, &DVector<f64>, bool); 7] = [
            ("final demand", &parts.final_demand, true),
            ("exports", &parts.exports, false),
            ("labor", &parts.labor, false),
            ("capital", &parts.capital, false),
            ("imports", &parts.imports, false),
            ("indirect tax", &parts.indirect_tax, false),
            ("output", &parts.output, false),
        ];
        for (what, v, may_be_negative) in vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: n,
                    found: v.len(),
                });
            }
            for (index, &value) in v.iter().enumerate() {
                if !value.is_finite() || (!may_be_negative && value < 0.0) {
                    return Err(Error::InvalidValue { what, index, value });
                }
            }
        }
        for (index, &value) in parts.intermediate.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidValue {
                    what: "intermediate flows",
                    index,
                    value,
                });
            }
        }
        for (index, &value) in parts.output.iter().enumerate() {
            if value <= 0.0 {
                return Err(Error::ZeroOutput {
                    sector: parts.sectors.id(index).to_string(),
                    index,
                    value,
                });
            }
        }
        Ok(IoTable(parts))
    }

    pub fn sectors(&self) -> &SectorSet {
        &self.0.sectors
    }

    pub fn intermediate(&self) -> &DMatrix<f64> {
        &self.0.intermediate
    }

    pub fn final_demand(&self) -> &DVector<f64> {
        &self.0.final_demand
    }

    pub fn exports(&self) -> &DVector<f64> {
        &self.0.exports
    }

    pub fn labor(&self) -> &DVector<f64> {
        &self.0.labor
    }

    pub fn capital(&self) -> &DVector<f64> {
        &self.0.capital
    }

    pub fn imports(&self) -> &DVector<f64> {
        &self.0.imports
    }

    pub fn indirect_tax(&self) -> &DVector<f64> {
        &self.0.indirect_tax
    }

    pub fn output(&self) -> &DVector<f64> {
        &self.0.output
    }

    pub fn parts(&self) -> &IoTableParts {
        &self.0
    }

    pub fn into_parts(self) -> IoTableParts {
        self.0
    }
}

/// Relative residuals of both accounting identities, per sector.
///
/// Residuals are signed: `(lhs - x) / x`.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceReport {
    pub row: Vec<f64>,
    pub column: Vec<f64>,
}

impl BalanceReport {
    pub fn max_row(&self) -> f64 {
        self.row.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn max_column(&self) -> f64 {
        self.column.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Sector indices whose residual exceeds `tolerance`, per identity.
    pub fn flagged(&self, identity: Identity, tolerance: f64) -> Vec<usize> {
        let residuals = match identity {
            Identity::Row => &self.row,
            Identity::Column => &self.column,
        };
        residuals
            .iter()
            .enumerate()
            .filter(|(_, r)| r.abs() > tolerance)
            .map(|(i, _)| i)
            .collect()
    }

    /// First violation in sector order, row identity before column.
    pub fn first_violation(&self, tolerance: f64) -> Option<(Identity, usize, f64)> {
        let row = self.flagged(Identity::Row, tolerance);
        let col = self.flagged(Identity::Column, tolerance);
        match (row.first(), col.first()) {
            (Some(&r), Some(&c)) if c < r => Some((Identity::Column, c, self.column[c])),
            (Some(&r), _) => Some((Identity::Row, r, self.row[r])),
            (None, Some(&c)) => Some((Identity::Column, c, self.column[c])),
            (None, None) => None,
        }
    }
}

pub fn balance_report(table: &IoTable) -> BalanceReport {
    let z = table.intermediate();
    let x = table.output();
    let n = x.len();
    let row = (0..n)
        .map(|i| {
            let lhs = z.row(i).sum() + table.final_demand()[i] + table.exports()[i];
            (lhs - x[i]) / x[i]
        })
        .collect();
    let column = (0..n)
        .map(|j| {
            let lhs = z.column(j).sum()
                + table.labor()[j]
                + table.capital()[j]
                + table.imports()[j]
                + table.indirect_tax()[j];
            (lhs - x[j]) / x[j]
        })
        .collect();
    BalanceReport { row, column }
}

/// Input requirements per unit of gross output.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientBundle {
    sectors: SectorSet,
    a: DMatrix<f64>,
    labor: DVector<f64>,
    capital: DVector<f64>,
    imports: DVector<f64>,
    indirect_tax: DVector<f64>,
}

impl CoefficientBundle {
    /// Every entry must lie in `[0, 1]`. Column sums are not checked so that
    /// deliberately perturbed bundles can be built.
    pub fn new(
        sectors: SectorSet,
        a: DMatrix<f64>,
        labor: DVector<f64>,
        capital: DVector<f64>,
        imports: DVector<f64>,
        indirect_tax: DVector<f64>,
    ) -> Result<Self> {
        let n = sectors.len();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "coefficient matrix",
                expected: n,
                found: if a.nrows() != n { a.nrows() } else { a.ncols() },
            });
        }
        for (index, &value) in a.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidValue {
                    what: "coefficient matrix",
                    index,
                    value,
                });
            }
        }
        for (what, v) in [
            ("labor coefficients", &labor),
            ("capital coefficients", &capital),
            ("import coefficients", &imports),
            ("indirect tax coefficients", &indirect_tax),
        ] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: n,
                    found: v.len(),
                });
            }
            for (index, &value) in v.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::InvalidValue { what, index, value });
                }
            }
        }
        Ok(CoefficientBundle {
            sectors,
            a,
            labor,
            capital,
            imports,
            indirect_tax,
        })
    }

    pub fn sectors(&self) -> &SectorSet {
        &self.sectors
    }

    /// `a[(i, j)]`: input from sector `i` per unit of output of sector `j`.
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn labor(&self) -> &DVector<f64> {
        &self.labor
    }

    pub fn capital(&self) -> &DVector<f64> {
        &self.capital
    }

    pub fn imports(&self) -> &DVector<f64> {
        &self.imports
    }

    pub fn indirect_tax(&self) -> &DVector<f64> {
        &self.indirect_tax
    }

    /// Labor plus capital per unit of output.
    pub fn value_added(&self) -> DVector<f64> {
        &self.labor + &self.capital
    }

    /// Column totals of all coefficients; 1 for a balanced table.
    pub fn column_totals(&self) -> DVector<f64> {
        DVector::from_fn(self.sectors.len(), |j, _| {
            self.a.column(j).sum()
                + self.labor[j]
                + self.capital[j]
                + self.imports[j]
                + self.indirect_tax[j]
        })
    }

    pub fn with_indirect_tax(mut self, indirect_tax: DVector<f64>) -> Result<Self> {
        self.indirect_tax = indirect_tax;
        Self::new(
            self.sectors,
            self.a,
            self.labor,
            self.capital,
            self.imports,
            self.indirect_tax,
        )
    }
}

pub fn derive_coefficients(table: &IoTable) -> Result<CoefficientBundle> {
    derive_coefficients_with_tolerance(table, DEFAULT_BALANCE_TOLERANCE)
}

/// Pass `f64::INFINITY` to skip the balance check.
pub fn derive_coefficients_with_tolerance(
    table: &IoTable,
    tolerance: f64,
) -> Result<CoefficientBundle> {
    let report = balance_report(table);
    if let Some((identity, index, residual)) = report.first_violation(tolerance) {
        return Err(Error::Unbalanced {
            sector: table.sectors().id(index).to_string(),
            index,
            identity,
            residual,
            tolerance,
        });
    }
    let x = table.output();
    let mut a = table.intermediate().clone();
    for (j, mut column) in a.column_iter_mut().enumerate() {
        column /= x[j];
    }
    let per_unit = |v: &DVector<f64>| v.component_div(x);
    CoefficientBundle::new(
        table.sectors().clone(),
        a,
        per_unit(table.labor()),
        per_unit(table.capital()),
        per_unit(table.imports()),
        per_unit(table.indirect_tax()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example3;

    #[test]
    fn sector_set_rejects_duplicates_and_blanks() {
        assert!(SectorSet::from_ids(["A", "B", "A"]).is_err());
        assert!(SectorSet::from_ids([" "]).is_err());
        assert!(SectorSet::from_ids(Vec::<String>::new()).is_err());
        let s = SectorSet::from_ids(["A", "B"]).unwrap();
        assert_eq!(s.index_of("B"), Some(1));
        assert_eq!(s.index_of("C"), None);
    }

    #[test]
    fn example_table_derives_printed_coefficients() {
        let bundle = derive_coefficients(&example3::table()).unwrap();
        let at = bundle.a().transpose();
        let printed = example3::transposed_coefficients();
        assert_eq!(at, printed);
        for j in 0..3 {
            assert_eq!(bundle.indirect_tax()[j], 0.01);
            assert_eq!(bundle.labor()[j], 0.0);
            assert_eq!(bundle.imports()[j], [0.10, 0.28, 0.10][j]);
            assert_eq!(bundle.capital()[j], [0.60, 0.27, 0.48][j]);
            assert!((bundle.column_totals()[j] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn pure_labor_economy() {
        let sectors = SectorSet::from_ids(["A", "B"]).unwrap();
        let x = DVector::from_vec(vec![5.0, 7.0]);
        let zero = DVector::zeros(2);
        let table = IoTable::new(IoTableParts {
            sectors,
            intermediate: DMatrix::zeros(2, 2),
            final_demand: x.clone(),
            exports: zero.clone(),
            labor: x.clone(),
            capital: zero.clone(),
            imports: zero.clone(),
            indirect_tax: zero.clone(),
            output: x,
        })
        .unwrap();
        let b = derive_coefficients(&table).unwrap();
        assert_eq!(b.a(), &DMatrix::zeros(2, 2));
        assert_eq!(b.labor(), &DVector::from_element(2, 1.0));
    }

    #[test]
    fn zero_output_is_rejected() {
        let mut parts = example3::table().into_parts();
        parts.output[2] = 0.0;
        match IoTable::new(parts) {
            Err(Error::ZeroOutput { index, sector, .. }) => {
                assert_eq!(index, 2);
                assert_eq!(sector, "SER");
            }
            other => panic!("expected ZeroOutput, got {other:?}"),
        }
    }

    #[test]
    fn perturbed_flow_flags_sector_in_both_identities() {
        let mut parts = example3::table().into_parts();
        parts.intermediate[(0, 0)] += 0.1 * parts.output[0];
        let table = IoTable::new(parts).unwrap();
        let report = balance_report(&table);
        assert_eq!(report.flagged(Identity::Row, 1e-6), vec![0]);
        assert_eq!(report.flagged(Identity::Column, 1e-6), vec![0]);
        assert!((report.row[0] - 0.1).abs() < 1e-12);
        assert!((report.column[0] - 0.1).abs() < 1e-12);
        match derive_coefficients(&table) {
            Err(Error::Unbalanced {
                index: 0,
                identity: Identity::Row,
                ..
            }) => {}
            other => panic!("expected Unbalanced, got {other:?}"),
        }
        assert!(derive_coefficients_with_tolerance(&table, f64::INFINITY).is_ok());
    }

    #[test]
    fn balanced_fixture_has_tiny_residuals() {
        let report = balance_report(&example3::table());
        assert!(report.max_row() < 1e-9);
        assert!(report.max_column() < 1e-9);
    }

    #[test]
    fn empty_final_demand_row_residual_is_zero() {
        // x equal to the row sums of Z, no final demand or exports.
        let z = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let x = DVector::from_vec(vec![3.0, 7.0]);
        let table = IoTable::new(IoTableParts {
            sectors: SectorSet::from_ids(["A", "B"]).unwrap(),
            intermediate: z,
            final_demand: DVector::zeros(2),
            exports: DVector::zeros(2),
            labor: DVector::zeros(2),
            capital: DVector::zeros(2),
            imports: DVector::zeros(2),
            indirect_tax: DVector::zeros(2),
            output: x,
        })
        .unwrap();
        let report = balance_report(&table);
        assert_eq!(report.row, vec![0.0, 0.0]);
    }

    #[test]
    fn bundle_rejects_out_of_range_entries() {
        let s = SectorSet::from_ids(["A"]).unwrap();
        let v = |x: f64| DVector::from_element(1, x);
        assert!(CoefficientBundle::new(
            s.clone(),
            DMatrix::from_element(1, 1, 1.2),
            v(0.0),
            v(0.0),
            v(0.0),
            v(0.0)
        )
        .is_err());
        assert!(
            CoefficientBundle::new(s, DMatrix::zeros(1, 1), v(-0.1), v(0.0), v(0.0), v(0.0))
                .is_err()
        );
    }
}
