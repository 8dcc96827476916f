use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use gstsim_core::diagnostics::productivity_check;
use gstsim_core::ingest::{
    format_number, item_prices, load_category_map, load_concordance, load_expenditure,
    load_io_table, load_rate_schedule, map_expenditure, Concordance,
};
use gstsim_core::{
    baseline_prices, category_report, derive_coefficients_with_tolerance, expenditure_change,
    gap_change_report, gap_ratios, incidence_by_group, item_expenditure_change,
    price_change_summary, rate_mask, simulate_prices, BalanceReport, CategoryMap,
    CoefficientBundle, Dimension, ExpenditureMatrix, GroupCategoryTable, GroupIncidence,
    PriceVector, RateSchedule, SectorSet,
};

use crate::error::{CliError, CliResult};
use crate::output::CsvTable;
use crate::scenario::{Inputs, Scenario};

/// Everything read from disk, validated and aligned to the table's sectors.
pub struct LoadedInputs {
    pub bundle: CoefficientBundle,
    pub output: nalgebra::DVector<f64>,
    pub balance: BalanceReport,
    pub schedule: RateSchedule,
    pub warnings: Vec<String>,
    pub expenditure: Option<ExpenditureMatrix>,
    pub concordance: Option<Concordance>,
    pub categories: Option<CategoryMap>,
}

pub fn load_inputs(
    inputs: &Inputs,
    gst_rate: f64,
    allow_unbalanced: bool,
    balance_tolerance: f64,
) -> CliResult<LoadedInputs> {
    let tolerance = (!allow_unbalanced).then_some(balance_tolerance);
    let loaded = load_io_table(&inputs.table, tolerance)?;
    let bundle =
        derive_coefficients_with_tolerance(&loaded.table, tolerance.unwrap_or(f64::INFINITY))?;
    let sectors = bundle.sectors().clone();
    let schedule = load_rate_schedule(&inputs.gst_list, &sectors, gst_rate)?;
    let expenditure = inputs
        .expenditure
        .as_deref()
        .map(load_expenditure)
        .transpose()?;
    let concordance = match &inputs.concordance {
        Some(path) => Some(load_concordance(path, &sectors)?),
        None => None,
    };
    let categories = inputs
        .categories
        .as_deref()
        .map(load_category_map)
        .transpose()?;
    if let Some(e) = &expenditure {
        let c = concordance
            .clone()
            .unwrap_or_else(|| Concordance::identity(&sectors));
        map_expenditure(e, &c, &sectors)?;
        if let Some(map) = &categories {
            if map.check_covers(e.items()).is_err() {
                map.check_covers(sectors.ids())?;
            }
        }
    }
    Ok(LoadedInputs {
        output: loaded.table.output().clone(),
        bundle,
        balance: loaded.balance,
        warnings: schedule.warnings,
        schedule: schedule.schedule,
        expenditure,
        concordance,
        categories,
    })
}

/// Files produced by a run, in write order.
pub struct Artifacts {
    pub files: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

pub fn run_scenario(scenario: &Scenario, full_precision: bool) -> CliResult<Artifacts> {
    let inputs = load_inputs(
        &scenario.inputs,
        scenario.gst_rate,
        scenario.allow_unbalanced,
        scenario.balance_tolerance,
    )?;
    let num = |x: f64| format_number(x, full_precision);
    let bundle = &inputs.bundle;
    let sectors = bundle.sectors();

    let productivity = productivity_check(bundle.a(), Some(&rate_mask(&inputs.schedule)))?;
    let baseline = baseline_prices(bundle)?;
    let post = simulate_prices(bundle, &inputs.schedule, &scenario.options)?;
    let relative = post.relative_to(&baseline)?;
    let summary = price_change_summary(&relative, Some(&inputs.output))?;

    let mut files = Vec::new();
    let mut prices = CsvTable::new(&[
        "sector_id",
        "sector_name",
        "baseline_price",
        "post_price",
        "percent_change",
    ]);
    for i in 0..sectors.len() {
        prices.row(vec![
            sectors.id(i).to_string(),
            sectors.name(i).to_string(),
            num(baseline.values()[i]),
            num(post.values()[i]),
            num(summary.percent_changes[i]),
        ]);
    }
    files.push(("price_changes.csv".to_string(), prices.render()));

    let mut s = CsvTable::new(&["key", "value"]);
    let mut kv = |k: &str, v: String| s.row(vec![k.to_string(), v]);
    kv("sectors", sectors.len().to_string());
    kv("gst_rate", num(scenario.gst_rate));
    kv(
        "masked_input_treatment",
        scenario.options.masked_input_treatment.to_string(),
    );
    kv(
        "exempt_retains_input_tax",
        scenario.options.exempt_retains_input_tax.to_string(),
    );
    kv("tax_row", scenario.options.tax_row.to_string());
    kv("risers", summary.risers.to_string());
    kv("mean_rise", num(summary.mean_rise));
    kv("decliners", summary.decliners.to_string());
    kv("mean_decline", num(summary.mean_decline));
    kv("net_decline", num(summary.net_decline));
    kv(
        "output_weighted_mean_change",
        num(summary.weighted_mean_change.unwrap_or(0.0)),
    );
    kv("max_row_residual", num(inputs.balance.max_row()));
    kv("max_column_residual", num(inputs.balance.max_column()));
    kv("spectral_radius", num(productivity.spectral_radius()));
    files.push(("summary.csv".to_string(), s.render()));

    if let Some(items) = &inputs.expenditure {
        files.extend(incidence_files(scenario, &inputs, items, &relative, &num)?);
    }
    Ok(Artifacts {
        files,
        warnings: inputs.warnings,
    })
}

fn incidence_files(
    scenario: &Scenario,
    inputs: &LoadedInputs,
    items: &ExpenditureMatrix,
    prices: &PriceVector,
    num: &dyn Fn(f64) -> String,
) -> CliResult<Vec<(String, String)>> {
    let sectors: &SectorSet = inputs.bundle.sectors();
    let concordance = inputs
        .concordance
        .clone()
        .unwrap_or_else(|| Concordance::identity(sectors));
    let by_sector = map_expenditure(items, &concordance, sectors)?;
    let delta = expenditure_change(&by_sector, sectors, prices)?;
    let incidence = incidence_by_group(&by_sector, &delta)?;

    let present = items.dimensions();
    let dimensions = match &scenario.dimensions {
        None => present.clone(),
        Some(list) => {
            for d in list {
                if !present.contains(d) {
                    return Err(CliError::new(
                        "CONFIG",
                        format!("report dimension {d} has no groups in the expenditure file"),
                    ));
                }
            }
            list.clone()
        }
    };
    for (d, group) in &scenario.base_groups {
        let found = items
            .groups()
            .iter()
            .any(|g| g.dimension == *d && g.group_id == *group);
        if !found {
            return Err(CliError::new(
                "UNKNOWN_BASE_GROUP",
                format!("base group {group} is not a {d} group"),
            ));
        }
    }

    let mut files = Vec::new();
    let mut t = CsvTable::new(&[
        "group_id",
        "dimension",
        "label",
        "total_before",
        "total_after",
        "percent_change",
    ]);
    for g in incidence
        .iter()
        .filter(|g| dimensions.contains(&g.group.dimension))
    {
        t.row(vec![
            g.group.group_id.clone(),
            g.group.dimension.to_string(),
            g.group.label.clone(),
            num(g.total_before),
            num(g.total_after),
            num(g.percent_change),
        ]);
    }
    files.push(("incidence_by_group.csv".to_string(), t.render()));

    if let Some(map) = &inputs.categories {
        let tables = if map.check_covers(items.items()).is_ok() {
            let q = item_prices(&concordance, items.items(), sectors, prices)?;
            let item_delta = item_expenditure_change(items, &q)?;
            category_report(items, &item_delta, map)?
        } else {
            category_report(&by_sector, &delta, map)?
        };
        for d in &dimensions {
            files.push((
                format!("category_table_{d}.csv"),
                category_file(&tables, *d, num),
            ));
        }
    }

    files.push((
        "gaps.csv".to_string(),
        gaps_file(scenario, &incidence, &dimensions, num)?,
    ));
    Ok(files)
}

fn category_file(
    tables: &[GroupCategoryTable],
    d: Dimension,
    num: &dyn Fn(f64) -> String,
) -> String {
    let mut t = CsvTable::new(&[
        "group_id",
        "label",
        "category_code",
        "category",
        "baseline_share",
        "post_share",
        "share_change",
        "percent_change",
    ]);
    for table in tables.iter().filter(|t| t.group.dimension == d) {
        let g = &table.group;
        let (mut base, mut post, mut change) = (0.0, 0.0, 0.0);
        for r in &table.rows {
            base += r.baseline_share;
            post += r.post_share;
            change += r.share_change;
            t.row(vec![
                g.group_id.clone(),
                g.label.clone(),
                r.category.code().to_string(),
                r.category.name().to_string(),
                num(r.baseline_share),
                num(r.post_share),
                num(r.share_change),
                num(r.percent_change),
            ]);
        }
        // shares sum to 100 and changes to 0 up to rounding
        let snap = |x: f64, exact: f64| if (x - exact).abs() < 1e-9 { exact } else { x };
        t.row(vec![
            g.group_id.clone(),
            g.label.clone(),
            "TOTAL".to_string(),
            "Total".to_string(),
            num(snap(base, 100.0)),
            num(snap(post, 100.0)),
            num(snap(change, 0.0)),
            num(table.total_percent_change),
        ]);
    }
    t.render()
}

fn gaps_file(
    scenario: &Scenario,
    incidence: &[GroupIncidence],
    dimensions: &[Dimension],
    num: &dyn Fn(f64) -> String,
) -> CliResult<String> {
    let mut t = CsvTable::new(&[
        "dimension",
        "group_id",
        "label",
        "base",
        "post",
        "percent_change",
        "ratio_before",
        "ratio_after",
        "gap_change",
    ]);
    for d in dimensions {
        let groups: Vec<&GroupIncidence> = incidence
            .iter()
            .filter(|g| g.group.dimension == *d)
            .collect();
        let base_group = match scenario.base_groups.get(d) {
            Some(id) => id.clone(),
            None => groups[0].group.group_id.clone(),
        };
        let totals = |f: fn(&GroupIncidence) -> f64| -> Vec<(String, f64)> {
            groups
                .iter()
                .map(|g| (g.group.group_id.clone(), f(g)))
                .collect()
        };
        let before = gap_ratios(&totals(|g| g.total_before), &base_group)?;
        let after = gap_ratios(&totals(|g| g.total_after), &base_group)?;
        let change = gap_change_report(&before, &after)?;
        let by_id: BTreeMap<&str, usize> = before
            .iter()
            .enumerate()
            .map(|(i, (id, _))| (id.as_str(), i))
            .collect();
        for g in &groups {
            let i = by_id[g.group.group_id.as_str()];
            t.row(vec![
                d.to_string(),
                g.group.group_id.clone(),
                g.group.label.clone(),
                num(g.total_before),
                num(g.total_after),
                num(g.percent_change),
                num(before[i].1),
                num(after[i].1),
                num(change[i].1),
            ]);
        }
    }
    Ok(t.render())
}

/// Writes `artifacts` into `dir` atomically: files are staged in a sibling
/// temporary directory which is renamed into place only after every file
/// is written. An existing run directory is replaced; any other existing
/// directory is left alone.
pub fn write_run(dir: &Path, artifacts: &Artifacts) -> CliResult<()> {
    let parent = match dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(|e| CliError::io(&parent, e))?;
    if dir.exists() && !is_run_dir(dir) {
        return Err(CliError::new(
            "OUTPUT_EXISTS",
            format!(
                "{} exists and does not look like a previous run; refusing to replace it",
                dir.display()
            ),
        ));
    }
    let staging = tempfile::Builder::new()
        .prefix(".gstsim-staging-")
        .tempdir_in(&parent)
        .map_err(|e| CliError::io(&parent, e))?;
    for (name, contents) in &artifacts.files {
        let path = staging.path().join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    }
    let staged = staging.keep();
    if dir.exists() {
        let old = tempfile::Builder::new()
            .prefix(".gstsim-old-")
            .tempdir_in(&parent)
            .map_err(|e| CliError::io(&parent, e))?;
        let old_path = old.path().join("run");
        fs::rename(dir, &old_path).map_err(|e| CliError::io(dir, e))?;
        if let Err(e) = fs::rename(&staged, dir) {
            let _ = fs::rename(&old_path, dir);
            let _ = fs::remove_dir_all(&staged);
            return Err(CliError::io(dir, e));
        }
    } else if let Err(e) = fs::rename(&staged, dir) {
        let _ = fs::remove_dir_all(&staged);
        return Err(CliError::io(dir, e));
    }
    Ok(())
}

fn is_run_dir(dir: &Path) -> bool {
    match fs::read_dir(dir) {
        Ok(mut entries) => entries.next().is_none() || dir.join("summary.csv").is_file(),
        Err(_) => false,
    }
}
