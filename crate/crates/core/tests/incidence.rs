mod common;

use approx::assert_abs_diff_eq;
use common::*;
use gstsim_core::ingest::{map_expenditure, Concordance, ConcordanceLink};
use gstsim_core::{
    category_report, example3, expenditure_change, gap_change_report, gap_ratios,
    incidence_by_group, Basis, CategoryMap, Dimension, ExpenditureMatrix, HouseholdGroup,
    PriceVector, ReportingCategory, SectorSet,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

fn groups(n: usize) -> Vec<HouseholdGroup> {
    (0..n)
        .map(|h| HouseholdGroup {
            group_id: format!("G{h}"),
            dimension: if h % 2 == 0 {
                Dimension::IncomeClass
            } else {
                Dimension::Ethnicity
            },
            label: format!("group {h}"),
        })
        .collect()
}

fn sector_expenditure(sectors: &SectorSet, values: DMatrix<f64>) -> ExpenditureMatrix {
    ExpenditureMatrix::new(
        groups(values.nrows()),
        sectors.ids().to_vec(),
        values,
        Basis::SectorCodes,
    )
    .unwrap()
}

fn category_map(sectors: &SectorSet) -> CategoryMap {
    CategoryMap::new(
        sectors
            .ids()
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), ReportingCategory::ALL[i % 5])),
    )
    .unwrap()
}

fn pairs(labels: &[&str], values: &[f64]) -> Vec<(String, f64)> {
    labels
        .iter()
        .map(|s| s.to_string())
        .zip(values.iter().copied())
        .collect()
}

#[test]
fn appendix_expenditure_change() {
    let sectors = example3::sectors();
    let e = sector_expenditure(
        &sectors,
        DMatrix::from_row_slice(1, 3, &[100.0, 200.0, 300.0]),
    );
    let p = PriceVector::from_slice(&[0.920366, 0.914612, 0.997991]).unwrap();
    let delta = expenditure_change(&e, &sectors, &p).unwrap();
    let expected = [-7.9634, -17.0776, -0.6027];
    for i in 0..3 {
        assert_abs_diff_eq!(delta[(0, i)], expected[i], epsilon = 1e-4);
    }
    let inc = incidence_by_group(&e, &delta).unwrap();
    assert_abs_diff_eq!(inc[0].percent_change, -4.274, epsilon = 1e-3);
}

#[test]
fn printed_gap_table() {
    let labels = ["BUMI", "CINA"];
    let before = gap_ratios(&pairs(&labels, &[2046.0, 2775.0]), "BUMI").unwrap();
    let after = gap_ratios(&pairs(&labels, &[2153.0, 2915.0]), "BUMI").unwrap();
    assert_eq!(before[0].1, 1.0);
    assert_abs_diff_eq!(before[1].1, 1.356, epsilon = 0.005);
    assert_abs_diff_eq!(after[1].1, 1.354, epsilon = 0.005);

    let labels = ["LOW", "HIGH"];
    let before = gap_ratios(&pairs(&labels, &[692.0, 7517.0]), "LOW").unwrap();
    let after = gap_ratios(&pairs(&labels, &[730.0, 7889.0]), "LOW").unwrap();
    assert_abs_diff_eq!(before[1].1, 10.863, epsilon = 0.005);
    assert_abs_diff_eq!(after[1].1, 10.811, epsilon = 0.005);

    let change = gap_change_report(
        &pairs(&["CINA", "HIGH"], &[1.356, 10.863]),
        &pairs(&["CINA", "HIGH"], &[1.354, 10.811]),
    )
    .unwrap();
    assert_abs_diff_eq!(change[0].1, -0.15, epsilon = 0.03);
    assert_abs_diff_eq!(change[1].1, -0.48, epsilon = 0.03);
}

#[test]
fn unit_prices_give_empty_reports() {
    let sectors = sector_set(4);
    let e = sector_expenditure(
        &sectors,
        DMatrix::from_fn(3, 4, |h, i| (h * 4 + i + 1) as f64),
    );
    let delta = expenditure_change(&e, &sectors, &PriceVector::ones(4)).unwrap();
    assert!(delta.iter().all(|&v| v == 0.0));
    for g in incidence_by_group(&e, &delta).unwrap() {
        assert_eq!(g.percent_change, 0.0);
    }
    for t in category_report(&e, &delta, &category_map(&sectors)).unwrap() {
        assert_eq!(t.total_percent_change, 0.0);
        for r in t.rows {
            assert_eq!(r.share_change, 0.0);
            assert_eq!(r.percent_change, 0.0);
        }
    }
}

fn random_case(seed: u64, groups: usize, n: usize) -> (SectorSet, ExpenditureMatrix, PriceVector) {
    let mut r = rng(seed);
    let sectors = sector_set(n);
    let values = DMatrix::from_fn(groups, n, |_, _| r.gen_range(1.0..1000.0));
    let prices = PriceVector::new(DVector::from_fn(n, |_, _| r.gen_range(0.8..1.2))).unwrap();
    (
        sectors.clone(),
        sector_expenditure(&sectors, values),
        prices,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn category_columns_sum(seed in any::<u64>(), h in 1usize..6, n in 1usize..12) {
        let (sectors, e, p) = random_case(seed, h, n);
        let delta = expenditure_change(&e, &sectors, &p).unwrap();
        for t in category_report(&e, &delta, &category_map(&sectors)).unwrap() {
            let base: f64 = t.rows.iter().map(|r| r.baseline_share).sum();
            let post: f64 = t.rows.iter().map(|r| r.post_share).sum();
            let change: f64 = t.rows.iter().map(|r| r.share_change).sum();
            prop_assert!((base - 100.0).abs() < 1e-9);
            prop_assert!((post - 100.0).abs() < 1e-9);
            prop_assert!(change.abs() < 1e-9);
        }
    }

    #[test]
    fn incidence_totals_are_consistent(seed in any::<u64>(), h in 1usize..6, n in 1usize..12) {
        let (sectors, e, p) = random_case(seed, h, n);
        let delta = expenditure_change(&e, &sectors, &p).unwrap();
        for (row, g) in incidence_by_group(&e, &delta).unwrap().iter().enumerate() {
            let direct: f64 = (0..n).map(|i| p.values()[i] * e.values()[(row, i)]).sum();
            prop_assert!((g.total_after - direct).abs() < 1e-9 * direct);
        }
    }

    #[test]
    fn incidence_is_linear_and_scale_free(seed in any::<u64>(), k in 0.01f64..100.0) {
        let (sectors, e, p) = random_case(seed, 3, 6);
        let delta = expenditure_change(&e, &sectors, &p).unwrap();
        let scaled = sector_expenditure(&sectors, e.values() * k);
        let delta_k = expenditure_change(&scaled, &sectors, &p).unwrap();
        prop_assert!((&delta_k - &delta * k).amax() <= 1e-9 * delta_k.amax().max(1.0));
        let a = incidence_by_group(&e, &delta).unwrap();
        let b = incidence_by_group(&scaled, &delta_k).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x.percent_change - y.percent_change).abs() < 1e-9);
        }
    }

    #[test]
    fn concordance_conserves_spending(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let sectors = sector_set(n);
        let mut links = Vec::new();
        for item in 0..12 {
            let k = r.gen_range(1..=n);
            let raw: Vec<f64> = (0..k).map(|_| r.gen_range(0.1..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let mut assigned = 0.0;
            for (j, w) in raw.iter().enumerate() {
                let weight = if j + 1 == k { 1.0 - assigned } else { w / total };
                assigned += weight;
                links.push(ConcordanceLink {
                    item_code: format!("I{item:02}"),
                    sector_id: sectors.id(j).to_string(),
                    weight,
                });
            }
        }
        let concordance = Concordance::new(links, &sectors).unwrap();
        let items = ExpenditureMatrix::new(
            groups(4),
            (0..12).map(|i| format!("I{i:02}")).collect(),
            DMatrix::from_fn(4, 12, |_, _| r.gen_range(0.0..500.0) + 1.0),
            Basis::ItemCodes,
        )
        .unwrap();
        let mapped = map_expenditure(&items, &concordance, &sectors).unwrap();
        let before = items.group_totals();
        let after = mapped.group_totals();
        for h in 0..4 {
            prop_assert!((before[h] - after[h]).abs() < 1e-9 * before[h]);
        }
    }
}
