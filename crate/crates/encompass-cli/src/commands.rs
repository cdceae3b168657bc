//! The four subcommands: benchmark construction, comparison, simulation,
//! and table re-rendering.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use encompass_core::ar::ArSpec;
use encompass_core::components::{aggregate_series, build_component_forecasts};
use encompass_core::convert::{growth_to_levels, levels_to_log};
use encompass_core::io;
use encompass_core::panel::PanelForm;
use encompass_core::regress::{encompass, rmse};
use encompass_core::rolling::{label_panel, rolling_forecasts};
use encompass_core::{ForecastPanel64, Quarter, Series64};

use crate::config::{Benchmark, BenchmarkKind, Comparison, RunConfig};
use crate::sim::run_simulation;
use crate::table::{self, ResultRow};
use crate::CliError;

/// A constructed benchmark panel plus its audit metadata.
pub struct BuiltBenchmark {
    pub name: String,
    /// `log_level` when the equation ran in logs, `level` otherwise.
    pub panel: ForecastPanel64,
    pub estimation_start: Quarter,
}

fn load_actuals(config: &RunConfig) -> Result<BTreeMap<String, Series64>, CliError> {
    let mut out = BTreeMap::new();
    for (name, path) in &config.actuals {
        let series = io::load_series_csv(path, name)
            .map_err(|e| CliError::core(format!("loading actuals '{name}'"), e))?;
        out.insert(name.clone(), series);
    }
    Ok(out)
}

fn load_external_panels(config: &RunConfig) -> Result<Vec<ForecastPanel64>, CliError> {
    config
        .forecast_files
        .iter()
        .map(|path| {
            io::load_forecast_csv(path)
                .map_err(|e| CliError::core(format!("loading panel {}", path.display()), e))
        })
        .collect()
}

/// Build one benchmark panel and verify that every origin's estimation
/// window ends at that origin.
pub fn build_benchmark(
    benchmark: &Benchmark,
    actuals: &BTreeMap<String, Series64>,
) -> Result<BuiltBenchmark, CliError> {
    let context = || format!("building benchmark '{}'", benchmark.name);
    let panel = match &benchmark.kind {
        BenchmarkKind::Ar { series, use_logs, p } => {
            let data = actuals.get(series).ok_or_else(|| {
                CliError::Config(format!(
                    "benchmark '{}': series '{series}' not in [data].actuals",
                    benchmark.name
                ))
            })?;
            let run = rolling_forecasts(data, &ArSpec::new(*p, *use_logs), &benchmark.scheme)
                .map_err(|e| CliError::core(context(), e))?;
            run.audit_no_future_information()
                .map_err(|e| CliError::core(context(), e))?;
            label_panel(run, &benchmark.name).panel
        }
        BenchmarkKind::Components {
            spec,
            single_equation,
            single_equation_logs,
        } => {
            if *single_equation {
                let aggregate = aggregate_series(spec, actuals)
                    .map_err(|e| CliError::core(context(), e))?;
                let run = rolling_forecasts(
                    &aggregate,
                    &ArSpec::ar4(*single_equation_logs),
                    &benchmark.scheme,
                )
                .map_err(|e| CliError::core(context(), e))?;
                run.audit_no_future_information()
                    .map_err(|e| CliError::core(context(), e))?;
                label_panel(run, &benchmark.name).panel
            } else {
                let built = build_component_forecasts(spec, actuals, &benchmark.scheme)
                    .map_err(|e| CliError::core(context(), e))?;
                built
                    .audit_no_future_information()
                    .map_err(|e| CliError::core(context(), e))?;
                built.panel
            }
        }
    };
    Ok(BuiltBenchmark {
        name: benchmark.name.clone(),
        panel,
        estimation_start: benchmark.scheme.estimation_start,
    })
}

/// Build every configured benchmark and write one forecast CSV each.
///
/// Reruns are byte-identical: panels iterate in origin order and values are
/// printed at full round-trip precision.
pub fn cmd_forecast(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    if config.benchmarks.is_empty() {
        return Err(CliError::Config(
            "no [[benchmark]] sections configured".to_string(),
        ));
    }
    let actuals = load_actuals(config)?;
    let mut written = Vec::new();
    for benchmark in &config.benchmarks {
        let built = build_benchmark(benchmark, &actuals)?;
        let path = out.join(format!("{}.csv", built.name));
        let directives = vec![(
            "estimation_start".to_string(),
            built.estimation_start.to_string(),
        )];
        io::save_forecast_csv(&path, &built.panel, &directives)
            .map_err(|e| CliError::core(format!("writing {}", path.display()), e))?;
        written.push(path);
    }
    Ok(written)
}

fn to_log_panel(
    panel: &ForecastPanel64,
    actual_levels: &Series64,
    annualized: bool,
    context: &str,
) -> Result<ForecastPanel64, CliError> {
    let panel = match panel.form() {
        PanelForm::GrowthPct => {
            let with_flag = panel.clone().with_annualized(annualized);
            let levels = growth_to_levels(&with_flag, actual_levels)
                .map_err(|e| CliError::core(context.to_string(), e))?;
            levels_to_log(&levels).map_err(|e| CliError::core(context.to_string(), e))?
        }
        PanelForm::Level => {
            levels_to_log(panel).map_err(|e| CliError::core(context.to_string(), e))?
        }
        PanelForm::LogLevel => panel.clone(),
    };
    Ok(panel)
}

/// Run every configured comparison and emit the result tables.
///
/// Writes `results.csv` (machine form), `results.txt` (fixed-width tables
/// with parenthesized t-statistics and RMSE companions), and `rmse.csv`.
pub fn cmd_compare(config: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let actuals = load_actuals(config)?;
    let externals = load_external_panels(config)?;

    // Benchmarks referenced by comparisons, built once each, in config order.
    let mut built: BTreeMap<String, BuiltBenchmark> = BTreeMap::new();
    for benchmark in &config.benchmarks {
        if config.comparisons.iter().any(|c| c.model_b == benchmark.name) {
            built.insert(benchmark.name.clone(), build_benchmark(benchmark, &actuals)?);
        }
    }

    let cells: Vec<Result<Vec<ResultRow>, CliError>> = config
        .comparisons
        .par_iter()
        .map(|c| run_comparison(c, &actuals, &externals, &built))
        .collect();

    let mut rows = Vec::new();
    for cell in cells {
        rows.extend(cell?);
    }

    let results_csv_path = out.join("results.csv");
    let results_txt_path = out.join("results.txt");
    let rmse_csv_path = out.join("rmse.csv");
    write_text(&results_csv_path, &table::results_csv(&rows))?;
    write_text(&results_txt_path, &table::render_text(&rows))?;
    write_text(&rmse_csv_path, &table::rmse_csv(&rows))?;
    Ok(vec![results_csv_path, results_txt_path, rmse_csv_path])
}

fn run_comparison(
    c: &Comparison,
    actuals: &BTreeMap<String, Series64>,
    externals: &[ForecastPanel64],
    built: &BTreeMap<String, BuiltBenchmark>,
) -> Result<Vec<ResultRow>, CliError> {
    let label = format!("comparison {}: {} vs {}", c.variable, c.model_a, c.model_b);

    let actual_levels = actuals.get(&c.variable).ok_or_else(|| {
        CliError::Config(format!("{label}: no actuals for '{}'", c.variable))
    })?;
    let actual_logs = actual_levels
        .to_logs()
        .map_err(|e| CliError::core(label.clone(), e))?;

    let external = externals
        .iter()
        .find(|p| p.model() == c.model_a && p.variable() == c.variable)
        .ok_or_else(|| {
            CliError::Config(format!(
                "{label}: no forecast file provides panel ({}, {})",
                c.model_a, c.variable
            ))
        })?;
    let panel_a = to_log_panel(external, actual_levels, c.annualized, &label)?;

    let bench = &built[&c.model_b];
    let panel_b = match bench.panel.form() {
        PanelForm::Level => {
            levels_to_log(&bench.panel).map_err(|e| CliError::core(label.clone(), e))?
        }
        PanelForm::LogLevel => bench.panel.clone(),
        PanelForm::GrowthPct => unreachable!("benchmarks are built in level or log space"),
    };

    let mut rows = Vec::with_capacity(c.horizons.len());
    for &s in &c.horizons {
        let cell = format!("{label}, s={s}");
        let result = encompass(&actual_logs, &panel_a, &panel_b, s, c.period, c.cov)
            .map_err(|e| CliError::core(cell.clone(), e))?;
        let rmse_a = rmse(&panel_a, &actual_logs, s, c.period)
            .map_err(|e| CliError::core(cell.clone(), e))?;
        let rmse_b = rmse(&panel_b, &actual_logs, s, c.period)
            .map_err(|e| CliError::core(cell.clone(), e))?;
        rows.push(ResultRow {
            variable: c.variable.clone(),
            model_a: c.model_a.clone(),
            model_b: c.model_b.clone(),
            s,
            result,
            rmse_a,
            rmse_b,
        });
    }
    Ok(rows)
}

/// Run the configured Monte Carlo and write its one-row summary CSV.
pub fn cmd_simulate(
    config: &RunConfig,
    seed_override: Option<u64>,
    out: &Path,
) -> Result<PathBuf, CliError> {
    let sim = config
        .simulate
        .as_ref()
        .ok_or_else(|| CliError::Config("no [simulate] section configured".to_string()))?;
    let seed = seed_override.unwrap_or(sim.seed);
    let summary = run_simulation(sim, seed)?;

    let path = out.join("simulation.csv");
    let body = format!(
        "{}\n{}\n",
        crate::sim::SimSummary::csv_header(),
        summary.to_csv_row()
    );
    write_text(&path, &body)?;
    Ok(path)
}

/// Re-render a machine results CSV as the fixed-width text table.
pub fn cmd_table(input: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::io(input.display().to_string(), e))?;
    table::render_from_csv(&text)
}

fn write_text(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::io(path.display().to_string(), e))
}
