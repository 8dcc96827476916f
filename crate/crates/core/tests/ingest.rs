mod common;

use std::path::PathBuf;

use approx::assert_abs_diff_eq;
use common::*;
use gstsim_core::ingest::{
    item_prices, load_category_map, load_concordance, load_expenditure, load_io_table,
    load_rate_schedule, map_expenditure, render_io_table, render_rate_schedule,
};
use gstsim_core::{
    derive_coefficients, example3, expenditure_change, incidence_by_group, item_expenditure_change,
    simulate_prices, PriceVector, RateCategory, RateEntry, RateSchedule, SimulationOptions,
};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/appendix")
        .join(name)
}

fn write(contents: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), contents).unwrap();
    f
}

#[test]
fn bundled_fixture_reproduces_worked_example() {
    let loaded = load_io_table(fixture("io_table.csv"), Some(1e-6)).unwrap();
    assert!(loaded.balance.max_row() < 1e-9);
    assert!(loaded.balance.max_column() < 1e-9);
    let bundle = derive_coefficients(&loaded.table).unwrap();
    assert_eq!(bundle.a(), example3::bundle().a());

    let schedule = load_rate_schedule(fixture("gst_list.csv"), bundle.sectors(), 0.06).unwrap();
    assert!(schedule.warnings.is_empty());
    assert_eq!(
        schedule.schedule.entries()[0].category,
        RateCategory::ZeroRated
    );
    assert_eq!(schedule.notes[0], "fresh produce");
    let p = simulate_prices(&bundle, &schedule.schedule, &SimulationOptions::default()).unwrap();
    for (got, want) in p.values().iter().zip([0.9204, 0.9146, 0.9980]) {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-3);
    }
}

#[test]
fn comment_lines_keep_line_numbers() {
    let text = std::fs::read_to_string(fixture("io_table.csv"))
        .unwrap()
        .replace(
            "IND,Industry,11,25,12,52,0,100",
            "IND,Industry,11,25,12,52,0,0",
        );
    let err = load_io_table(write(&text).path(), Some(1e-6)).unwrap_err();
    assert_eq!(err.code(), "ZERO_OUTPUT");
    let loc = err.location().unwrap();
    assert_eq!((loc.line, loc.column), (4, 8));
}

#[test]
fn item_and_sector_incidence_agree() {
    let sectors = example3::sectors();
    let items = load_expenditure(fixture("expenditure.csv")).unwrap();
    let concordance = load_concordance(fixture("concordance.csv"), &sectors).unwrap();
    let categories = load_category_map(fixture("categories.csv")).unwrap();
    categories.check_covers(items.items()).unwrap();

    let p = PriceVector::from_slice(&[0.92, 0.91, 1.03]).unwrap();
    let by_sector = map_expenditure(&items, &concordance, &sectors).unwrap();
    let sector_delta = expenditure_change(&by_sector, &sectors, &p).unwrap();
    let q = item_prices(&concordance, items.items(), &sectors, &p).unwrap();
    let item_delta = item_expenditure_change(&items, &q).unwrap();

    let a = incidence_by_group(&by_sector, &sector_delta).unwrap();
    let b = incidence_by_group(&items, &item_delta).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_abs_diff_eq!(x.total_before, y.total_before, epsilon = 1e-9);
        assert_abs_diff_eq!(x.total_after, y.total_after, epsilon = 1e-9);
    }
}

#[test]
fn schedule_with_unknown_sector() {
    let f = write("sector_id,category,standard_share,note\nAGR,zero_rated,,\nFISH,exempt,,\n");
    let err = load_rate_schedule(f.path(), &example3::sectors(), 0.06).unwrap_err();
    assert_eq!(err.code(), "UNKNOWN_SECTOR");
    assert_eq!(err.location().unwrap().line, 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn io_table_round_trip(seed in any::<u64>(), n in 1usize..=6) {
        let (table, _) = balanced_table(&mut rng(seed), n);
        let text = render_io_table(&table);
        let f = write(&text);
        let loaded = load_io_table(f.path(), Some(1e-6)).unwrap().table;
        prop_assert_eq!(loaded.intermediate(), table.intermediate());
        prop_assert_eq!(loaded.final_demand(), table.final_demand());
        prop_assert_eq!(loaded.labor(), table.labor());
        prop_assert_eq!(loaded.capital(), table.capital());
        prop_assert_eq!(loaded.imports(), table.imports());
        prop_assert_eq!(loaded.indirect_tax(), table.indirect_tax());
        prop_assert_eq!(loaded.output(), table.output());
        prop_assert_eq!(render_io_table(&loaded), text);
    }

    #[test]
    fn schedule_round_trip(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let sectors = sector_set(n);
        let entries = (0..n)
            .map(|_| {
                let category = [RateCategory::StandardRated, RateCategory::ZeroRated, RateCategory::Exempt]
                    [r.gen_range(0..3)];
                RateEntry::new(category, r.gen()).unwrap()
            })
            .collect();
        let schedule = RateSchedule::new(entries, 0.06).unwrap();
        let notes = vec![String::from("a, \"quoted\" note"); n];
        let f = write(&render_rate_schedule(&schedule, &sectors, &notes));
        let loaded = load_rate_schedule(f.path(), &sectors, 0.06).unwrap();
        prop_assert_eq!(loaded.schedule, schedule);
        prop_assert_eq!(loaded.notes, notes);
    }

    #[test]
    fn item_prices_stay_within_sector_range(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sectors = example3::sectors();
        let concordance = load_concordance(fixture("concordance.csv"), &sectors).unwrap();
        let p = PriceVector::new(DVector::from_fn(3, |_, _| r.gen_range(0.5..1.5))).unwrap();
        let items: Vec<String> = ["FOOD", "HOUSING", "TRANSPORT", "MEALS"].map(String::from).to_vec();
        let q = item_prices(&concordance, &items, &sectors, &p).unwrap();
        let (lo, hi) = (p.values().min(), p.values().max());
        for v in q.values().iter() {
            prop_assert!(*v >= lo - 1e-15 && *v <= hi + 1e-15);
        }
    }
}
