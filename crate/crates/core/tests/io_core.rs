mod common;

use common::*;
use gstsim_core::leontief::spectral_radius;
use gstsim_core::{
    balance_report, derive_coefficients, example3, leontief_inverse, quantity_model, Error, IoTable,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

#[test]
fn appendix_table_recovers_printed_coefficients() {
    let bundle = derive_coefficients(&example3::table()).unwrap();
    assert_matrix_close(&bundle.a().transpose(), &appendix_transpose(), 1e-15);
    let totals = bundle.column_totals();
    for t in totals.iter() {
        assert!((t - 1.0).abs() < 1e-12);
    }
}

#[test]
fn appendix_inverse_matches_power_series() {
    let at = appendix_transpose();
    let l = leontief_inverse(&at).unwrap();
    assert_matrix_close(&l, &power_series(&at), 1e-10);
    let expected = DMatrix::from_row_slice(
        3,
        3,
        &[
            1.0804, 0.1924, 0.2121, 0.1061, 1.3888, 0.2491, 0.0327, 0.2341, 1.4334,
        ],
    );
    assert_matrix_close(&l, &expected, 1e-4);
}

#[test]
fn spectral_radius_agrees_with_eigenvalues() {
    let mut r = rng(7);
    for n in 1..=8 {
        let a = productive_matrix(&mut r, n, 0.9);
        let eig = a.clone().complex_eigenvalues();
        let exact = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let est = spectral_radius(&a);
        assert!(
            (est.radius - exact).abs() < 1e-6,
            "n={n}: estimate {} vs eigenvalues {exact}",
            est.radius
        );
        assert!(est.upper_bound >= exact - 1e-12);
    }
}

#[test]
fn non_productive_matrix_is_rejected() {
    // column sums of 1.1 with a positive matrix
    let a = DMatrix::from_element(3, 3, 1.1 / 3.0);
    match leontief_inverse(&a) {
        Err(Error::NonProductive { spectral_radius }) => {
            assert!((spectral_radius - 1.1).abs() < 1e-9)
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn perturbed_table_is_flagged_on_both_identities() {
    let (table, _) = balanced_table(&mut rng(3), 4);
    let mut parts = table.into_parts();
    parts.intermediate[(1, 2)] += 5.0;
    let table = IoTable::new(parts).unwrap();
    let report = balance_report(&table);
    assert!(report.row[1].abs() > 1e-3);
    assert!(report.column[2].abs() > 1e-3);
    assert!(matches!(
        derive_coefficients(&table),
        Err(Error::Unbalanced { index: 1, .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn balanced_tables_round_trip(seed in any::<u64>(), n in 1usize..=6) {
        let (table, a) = balanced_table(&mut rng(seed), n);
        let report = balance_report(&table);
        prop_assert!(report.max_row() < 1e-12);
        prop_assert!(report.max_column() < 1e-12);

        let bundle = derive_coefficients(&table).unwrap();
        prop_assert!((bundle.a() - &a).amax() < 1e-12);
        for t in bundle.column_totals().iter() {
            prop_assert!((t - 1.0).abs() < 1e-9);
        }

        let l = leontief_inverse(bundle.a()).unwrap();
        let id = DMatrix::<f64>::identity(n, n);
        prop_assert!((&l * (&id - bundle.a()) - &id).amax() < 1e-10);
        for i in 0..n {
            for j in 0..n {
                prop_assert!(l[(i, j)] >= id[(i, j)] - 1e-12);
            }
        }
        let x = quantity_model(&l, table.final_demand(), table.exports()).unwrap();
        let rel = (&x - table.output()).amax() / table.output().amax();
        prop_assert!(rel < 1e-8);
    }

    #[test]
    fn inverse_matches_power_series(seed in any::<u64>(), n in 1usize..=10) {
        let a = productive_matrix(&mut rng(seed), n, 0.8);
        let l = leontief_inverse(&a).unwrap();
        let oracle = power_series(&a);
        prop_assert!((&l - &oracle).amax() < 1e-10);
    }

    #[test]
    fn quantity_model_is_linear(seed in any::<u64>(), k in 0.1f64..10.0) {
        let mut r = rng(seed);
        let a = productive_matrix(&mut r, 5, 0.8);
        let l = leontief_inverse(&a).unwrap();
        let f = DVector::from_fn(5, |i, _| i as f64 + 1.0);
        let e = DVector::zeros(5);
        let x1 = quantity_model(&l, &f, &e).unwrap();
        let xk = quantity_model(&l, &(&f * k), &e).unwrap();
        prop_assert!((&xk - &x1 * k).amax() < 1e-9 * xk.amax());
    }
}
