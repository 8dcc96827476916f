//! Three-sector worked example: agriculture, industry and services.
//!
//! Only coefficients exist for this economy, so the flow table is built by
//! scaling them with a gross output of 100 per sector. Value added is
//! carried as a single combined row (stored as capital, labor zero).

use nalgebra::{DMatrix, DVector};

use crate::table::{derive_coefficients, CoefficientBundle, IoTable, IoTableParts, SectorSet};

pub const SECTOR_IDS: [&str; 3] = ["AGR", "IND", "SER"];

pub fn sectors() -> SectorSet {
    SectorSet::new([
        ("AGR", "Agriculture"),
        ("IND", "Industry"),
        ("SER", "Services"),
    ])
    .expect("static sector list is valid")
}

/// Transposed coefficient matrix: row `j` lists the inputs bought by
/// sector `j` from each sector, per unit of `j`'s output.
pub fn transposed_coefficients() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        3,
        3,
        &[
            0.06, 0.11, 0.12, //
            0.07, 0.25, 0.12, //
            0.01, 0.12, 0.28,
        ],
    )
}

pub fn value_added() -> DVector<f64> {
    DVector::from_vec(vec![0.60, 0.27, 0.48])
}

pub fn imports() -> DVector<f64> {
    DVector::from_vec(vec![0.10, 0.28, 0.10])
}

pub fn indirect_tax() -> DVector<f64> {
    DVector::from_vec(vec![0.01, 0.01, 0.01])
}

/// Balanced flow table with gross output 100 in every sector.
pub fn table() -> IoTable {
    // intermediate[(i, j)] = 100 * transposed[(j, i)]
    let intermediate = DMatrix::from_row_slice(
        3,
        3,
        &[
            6.0, 7.0, 1.0, //
            11.0, 25.0, 12.0, //
            12.0, 12.0, 28.0,
        ],
    );
    IoTable::new(IoTableParts {
        sectors: sectors(),
        intermediate,
        final_demand: DVector::from_vec(vec![86.0, 52.0, 48.0]),
        exports: DVector::zeros(3),
        labor: DVector::zeros(3),
        capital: DVector::from_vec(vec![60.0, 27.0, 48.0]),
        imports: DVector::from_vec(vec![10.0, 28.0, 10.0]),
        indirect_tax: DVector::from_vec(vec![1.0, 1.0, 1.0]),
        output: DVector::from_element(3, 100.0),
    })
    .expect("static example table is valid")
}

pub fn bundle() -> CoefficientBundle {
    derive_coefficients(&table()).expect("example table is balanced")
}
