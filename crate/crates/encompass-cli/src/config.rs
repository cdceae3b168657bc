//! Run configuration: a single TOML file describes data files, the rolling
//! scheme, benchmark builders, the comparison matrix, and simulation setups.
//!
//! ```toml
//! [data]
//! actuals = { gdp = "gdp.csv", deflator = "deflator.csv" }
//! forecasts = ["swx_gdp.csv"]
//!
//! [scheme]
//! estimation_start = "1954Q1"
//! first_end = "1974Q4"
//! last_end = "2017Q3"
//! horizon = 16
//!
//! [[benchmark]]
//! name = "PAR4"
//! kind = "ar"
//! series = "deflator"
//! logs = true
//!
//! [[benchmark]]
//! name = "YSAR4"
//! kind = "components"
//! preset = "ysar4"
//!
//! [[comparison]]
//! variable = "gdp"
//! model_a = "SWX"
//! model_b = "YSAR4"
//! horizons = [2, 4]
//! period = ["1992Q1", "2016Q1"]
//! cov = "truncated_hac"
//! ```
//!
//! Relative paths resolve against the config file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use encompass_core::components::{Component, ComponentModelSpec};
use encompass_core::regress::CovMethod;
use encompass_core::rolling::RollingScheme;
use encompass_core::{Quarter, QuarterRange};

use crate::sim::InfoStructure;
use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    data: Option<RawData>,
    scheme: Option<RawScheme>,
    #[serde(default, rename = "benchmark")]
    benchmarks: Vec<RawBenchmark>,
    #[serde(default, rename = "comparison")]
    comparisons: Vec<RawComparison>,
    simulate: Option<RawSimulate>,
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    #[serde(default)]
    actuals: BTreeMap<String, String>,
    #[serde(default)]
    forecasts: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScheme {
    estimation_start: String,
    first_end: String,
    last_end: String,
    horizon: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBenchmark {
    name: String,
    kind: String,
    // kind = "ar"
    series: Option<String>,
    logs: Option<bool>,
    p: Option<usize>,
    // kind = "components"
    preset: Option<String>,
    aggregate: Option<String>,
    components: Option<Vec<RawComponent>>,
    #[serde(default)]
    single_equation: bool,
    // optional per-benchmark scheme overrides
    estimation_start: Option<String>,
    first_end: Option<String>,
    last_end: Option<String>,
    horizon: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    series: String,
    #[serde(default = "default_sign")]
    sign: i8,
    #[serde(default)]
    logs: bool,
}

fn default_sign() -> i8 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComparison {
    variable: String,
    model_a: String,
    model_b: String,
    horizons: Vec<usize>,
    period: Vec<String>,
    cov: String,
    #[serde(default)]
    annualized: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulate {
    structure: String,
    #[serde(default = "default_n")]
    n: usize,
    #[serde(default = "default_s")]
    s: usize,
    #[serde(default = "default_reps")]
    reps: usize,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_cov")]
    cov: String,
    #[serde(default = "default_mean_change")]
    mean_change: f64,
    #[serde(default = "default_sd")]
    signal_sd: f64,
    #[serde(default = "default_noise_sd")]
    noise_sd: f64,
    #[serde(default = "default_sd")]
    error_sd: f64,
}

fn default_n() -> usize {
    200
}
fn default_s() -> usize {
    1
}
fn default_reps() -> usize {
    1000
}
fn default_seed() -> u64 {
    17
}
fn default_cov() -> String {
    "white".to_string()
}
fn default_mean_change() -> f64 {
    1.0
}
fn default_sd() -> f64 {
    1.0
}
fn default_noise_sd() -> f64 {
    0.5
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
}

/// How a benchmark panel gets built.
#[derive(Debug, Clone)]
pub enum BenchmarkKind {
    /// A single AR(p) equation on one series.
    Ar {
        series: String,
        use_logs: bool,
        p: usize,
    },
    /// Per-component AR(4) equations summed through the identity; the
    /// single-equation variant fits one AR(4) to the aggregated series
    /// instead.
    Components {
        spec: ComponentModelSpec,
        single_equation: bool,
        single_equation_logs: bool,
    },
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub name: String,
    pub kind: BenchmarkKind,
    pub scheme: RollingScheme,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub variable: String,
    pub model_a: String,
    pub model_b: String,
    pub horizons: Vec<usize>,
    pub period: QuarterRange,
    pub cov: CovMethod,
    pub annualized: bool,
}

#[derive(Debug, Clone)]
pub struct SimulateConfig {
    pub structure: InfoStructure,
    pub n: usize,
    pub s: usize,
    pub reps: usize,
    pub seed: u64,
    pub cov: CovMethod,
    pub mean_change: f64,
    pub signal_sd: f64,
    pub noise_sd: f64,
    pub error_sd: f64,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub actuals: BTreeMap<String, PathBuf>,
    pub forecast_files: Vec<PathBuf>,
    pub benchmarks: Vec<Benchmark>,
    pub comparisons: Vec<Comparison>,
    pub simulate: Option<SimulateConfig>,
    pub out_dir: Option<PathBuf>,
}

fn config_err(detail: impl Into<String>) -> CliError {
    CliError::Config(detail.into())
}

fn parse_quarter(text: &str, what: &str) -> Result<Quarter, CliError> {
    text.parse()
        .map_err(|_| config_err(format!("{what}: malformed quarter '{text}' (expected YYYYQn)")))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(path.display().to_string(), e))?;
        let raw: RawConfig = toml::from_str(&text)
            .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::resolve(raw, base)
    }

    fn resolve(raw: RawConfig, base: &Path) -> Result<Self, CliError> {
        let data = raw.data.unwrap_or(RawData {
            actuals: BTreeMap::new(),
            forecasts: Vec::new(),
        });
        let actuals: BTreeMap<String, PathBuf> = data
            .actuals
            .into_iter()
            .map(|(name, p)| (name, base.join(p)))
            .collect();
        let forecast_files: Vec<PathBuf> = data.forecasts.iter().map(|p| base.join(p)).collect();

        let global_scheme = match &raw.scheme {
            Some(s) => Some(resolve_scheme(s)?),
            None => None,
        };

        let mut benchmarks = Vec::new();
        for b in &raw.benchmarks {
            benchmarks.push(resolve_benchmark(b, global_scheme)?);
        }

        let mut comparisons = Vec::new();
        for c in &raw.comparisons {
            if c.period.len() != 2 {
                return Err(config_err(format!(
                    "comparison '{}': period must be [start, end]",
                    c.variable
                )));
            }
            let start = parse_quarter(&c.period[0], "comparison period")?;
            let end = parse_quarter(&c.period[1], "comparison period")?;
            let period = QuarterRange::new(start, end)
                .map_err(|e| config_err(format!("comparison '{}': {e}", c.variable)))?;
            if c.horizons.is_empty() || c.horizons.iter().any(|&h| h == 0) {
                return Err(config_err(format!(
                    "comparison '{}': horizons must be nonempty and >= 1",
                    c.variable
                )));
            }
            let cov = CovMethod::parse(&c.cov).map_err(|_| {
                config_err(format!(
                    "comparison '{}': unknown covariance method '{}'",
                    c.variable, c.cov
                ))
            })?;
            if !benchmarks.iter().any(|b| b.name == c.model_b) {
                return Err(config_err(format!(
                    "comparison '{}': model_b '{}' is not a configured benchmark",
                    c.variable, c.model_b
                )));
            }
            if !actuals.contains_key(&c.variable) {
                return Err(config_err(format!(
                    "comparison '{}': no actuals series configured for this variable",
                    c.variable
                )));
            }
            comparisons.push(Comparison {
                variable: c.variable.clone(),
                model_a: c.model_a.clone(),
                model_b: c.model_b.clone(),
                horizons: c.horizons.clone(),
                period,
                cov,
                annualized: c.annualized,
            });
        }

        let simulate = match &raw.simulate {
            Some(s) => Some(resolve_simulate(s)?),
            None => None,
        };

        let out_dir = raw
            .output
            .and_then(|o| o.dir)
            .map(|d| base.join(d));

        Ok(RunConfig {
            actuals,
            forecast_files,
            benchmarks,
            comparisons,
            simulate,
            out_dir,
        })
    }
}

fn resolve_scheme(raw: &RawScheme) -> Result<RollingScheme, CliError> {
    RollingScheme::new(
        parse_quarter(&raw.estimation_start, "scheme.estimation_start")?,
        parse_quarter(&raw.first_end, "scheme.first_end")?,
        parse_quarter(&raw.last_end, "scheme.last_end")?,
        raw.horizon,
    )
    .map_err(|e| config_err(e.to_string()))
}

fn resolve_benchmark(
    raw: &RawBenchmark,
    global_scheme: Option<RollingScheme>,
) -> Result<Benchmark, CliError> {
    // Per-benchmark overrides fall back to the global scheme field-wise.
    let scheme = {
        let g = global_scheme;
        let estimation_start = match &raw.estimation_start {
            Some(s) => parse_quarter(s, "benchmark.estimation_start")?,
            None => g.ok_or_else(|| missing_scheme(&raw.name))?.estimation_start,
        };
        let first_end = match &raw.first_end {
            Some(s) => parse_quarter(s, "benchmark.first_end")?,
            None => g.ok_or_else(|| missing_scheme(&raw.name))?.first_end,
        };
        let last_end = match &raw.last_end {
            Some(s) => parse_quarter(s, "benchmark.last_end")?,
            None => g.ok_or_else(|| missing_scheme(&raw.name))?.last_end,
        };
        let horizon = match raw.horizon {
            Some(h) => h,
            None => g.ok_or_else(|| missing_scheme(&raw.name))?.horizon,
        };
        RollingScheme::new(estimation_start, first_end, last_end, horizon)
            .map_err(|e| config_err(format!("benchmark '{}': {e}", raw.name)))?
    };

    let kind = match raw.kind.as_str() {
        "ar" => {
            let series = raw.series.clone().ok_or_else(|| {
                config_err(format!("benchmark '{}': kind=ar requires `series`", raw.name))
            })?;
            BenchmarkKind::Ar {
                series,
                use_logs: raw.logs.unwrap_or(true),
                p: raw.p.unwrap_or(4),
            }
        }
        "components" => {
            let spec = match (&raw.preset, &raw.components) {
                (Some(preset), None) => {
                    let mut spec = match preset.as_str() {
                        "ysar4" => ComponentModelSpec::gdp_ten_component(),
                        "csar4" => ComponentModelSpec::consumption_three_component(),
                        "isar4" => ComponentModelSpec::investment_two_component(),
                        "osar4" => ComponentModelSpec::other_five_component(),
                        other => {
                            return Err(config_err(format!(
                                "benchmark '{}': unknown preset '{other}'",
                                raw.name
                            )))
                        }
                    };
                    spec.name = raw.name.clone();
                    if let Some(agg) = &raw.aggregate {
                        spec.aggregate_name = agg.clone();
                    }
                    spec
                }
                (None, Some(list)) => {
                    let aggregate = raw.aggregate.clone().ok_or_else(|| {
                        config_err(format!(
                            "benchmark '{}': kind=components requires `aggregate`",
                            raw.name
                        ))
                    })?;
                    let components = list
                        .iter()
                        .map(|c| Component::new(c.series.clone(), c.sign, c.logs))
                        .collect();
                    ComponentModelSpec::new(raw.name.clone(), components, aggregate)
                        .map_err(|e| config_err(e.to_string()))?
                }
                (Some(_), Some(_)) => {
                    return Err(config_err(format!(
                        "benchmark '{}': give either `preset` or `components`, not both",
                        raw.name
                    )))
                }
                (None, None) => {
                    return Err(config_err(format!(
                        "benchmark '{}': kind=components requires `preset` or `components`",
                        raw.name
                    )))
                }
            };
            BenchmarkKind::Components {
                spec,
                single_equation: raw.single_equation,
                single_equation_logs: raw.logs.unwrap_or(false),
            }
        }
        other => {
            return Err(config_err(format!(
                "benchmark '{}': unknown kind '{other}' (expected 'ar' or 'components')",
                raw.name
            )))
        }
    };

    Ok(Benchmark {
        name: raw.name.clone(),
        kind,
        scheme,
    })
}

fn missing_scheme(name: &str) -> CliError {
    config_err(format!(
        "benchmark '{name}': no [scheme] section and no per-benchmark override"
    ))
}

fn resolve_simulate(raw: &RawSimulate) -> Result<SimulateConfig, CliError> {
    let structure = InfoStructure::parse(&raw.structure)
        .ok_or_else(|| config_err(format!("simulate: unknown structure '{}'", raw.structure)))?;
    if raw.reps == 0 {
        return Err(config_err("simulate: reps must be >= 1"));
    }
    if raw.s == 0 {
        return Err(config_err("simulate: s must be >= 1"));
    }
    if raw.n < 10 {
        return Err(config_err("simulate: n must be >= 10"));
    }
    if !(raw.signal_sd > 0.0) || !(raw.error_sd > 0.0) || raw.noise_sd < 0.0 {
        return Err(config_err("simulate: standard deviations must be positive"));
    }
    let cov = CovMethod::parse(&raw.cov)
        .map_err(|_| config_err(format!("simulate: unknown covariance method '{}'", raw.cov)))?;
    Ok(SimulateConfig {
        structure,
        n: raw.n,
        s: raw.s,
        reps: raw.reps,
        seed: raw.seed,
        cov,
        mean_change: raw.mean_change,
        signal_sd: raw.signal_sd,
        noise_sd: raw.noise_sd,
        error_sd: raw.error_sd,
    })
}
