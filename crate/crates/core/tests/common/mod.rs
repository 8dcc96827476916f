#![allow(dead_code)]

use gstsim_core::{IoTable, IoTableParts, SectorSet};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `I + M + M^2 + ...` truncated once the next power is negligible.
pub fn power_series(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for _ in 0..100_000 {
        term = &term * m;
        sum += &term;
        if inf_norm(&term) < 1e-17 {
            return sum;
        }
    }
    panic!("power series did not converge");
}

/// Iterates `p <- M p + c` from `c` until it stops moving.
pub fn fixed_point(m: &DMatrix<f64>, c: &DVector<f64>) -> DVector<f64> {
    let mut p = c.clone();
    for _ in 0..100_000 {
        let next = m * &p + c;
        let step = (&next - &p).amax();
        p = next;
        if step < 1e-16 {
            return p;
        }
    }
    panic!("fixed point iteration did not converge");
}

/// Nonnegative matrix with every column sum at most `max_column_sum`.
pub fn productive_matrix(rng: &mut impl Rng, n: usize, max_column_sum: f64) -> DMatrix<f64> {
    let mut a = DMatrix::from_fn(n, n, |_, _| {
        if rng.gen_bool(0.2) {
            0.0
        } else {
            rng.gen::<f64>()
        }
    });
    for mut column in a.column_iter_mut() {
        let total = column.sum();
        if total > 0.0 {
            let target = rng.gen_range(0.0..max_column_sum);
            column *= target / total;
        }
    }
    a
}

pub fn random_mask(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| match rng.gen_range(0..4) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.gen::<f64>(),
    })
}

pub fn sector_set(n: usize) -> SectorSet {
    SectorSet::from_ids((0..n).map(|i| format!("S{i:02}"))).unwrap()
}

/// Exactly balanced table built from coefficients: flows `Z = A diag(x)`,
/// primary inputs split the remaining column share, final demand closes
/// the rows.
pub fn balanced_table(rng: &mut impl Rng, n: usize) -> (IoTable, DMatrix<f64>) {
    let a = productive_matrix(rng, n, 0.8);
    let x = DVector::from_fn(n, |_, _| rng.gen_range(50.0..500.0));
    let z = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * x[j]);
    let mut labor = DVector::zeros(n);
    let mut capital = DVector::zeros(n);
    let mut imports = DVector::zeros(n);
    let mut tax = DVector::zeros(n);
    for j in 0..n {
        let rest = x[j] - z.column(j).sum();
        let w: [f64; 4] = [rng.gen(), rng.gen(), rng.gen(), rng.gen::<f64>() * 0.2];
        let total: f64 = w.iter().sum();
        labor[j] = rest * w[0] / total;
        capital[j] = rest * w[1] / total;
        imports[j] = rest * w[2] / total;
        tax[j] = rest - labor[j] - capital[j] - imports[j];
    }
    let exports = DVector::from_fn(n, |i, _| rng.gen_range(0.0..0.2) * x[i]);
    let final_demand = DVector::from_fn(n, |i, _| x[i] - z.row(i).sum() - exports[i]);
    let table = IoTable::new(IoTableParts {
        sectors: sector_set(n),
        intermediate: z,
        final_demand,
        exports,
        labor,
        capital,
        imports,
        indirect_tax: tax,
        output: x,
    })
    .unwrap();
    (table, a)
}

pub fn appendix_transpose() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        3,
        3,
        &[0.06, 0.11, 0.12, 0.07, 0.25, 0.12, 0.01, 0.12, 0.28],
    )
}

pub fn assert_matrix_close(left: &DMatrix<f64>, right: &DMatrix<f64>, tol: f64) {
    assert_eq!(left.shape(), right.shape());
    let diff = (left - right).amax();
    assert!(
        diff <= tol,
        "max difference {diff:e} exceeds {tol:e}\nleft {left}\nright {right}"
    );
}
