//! Identity-based aggregate forecasters.
//!
//! An aggregate (real GDP, total consumption, ...) is forecast by fitting one
//! AR(4) equation per component, converting logged components back to levels,
//! and summing with the component signs. The GDP reading uses ten components
//! whose signed sum is GDP itself; consumption and fixed investment use the
//! three and two components that sum to their totals.

use std::collections::BTreeMap;

use crate::ar::{ArFit, ArSpec};
use crate::error::Error;
use crate::panel::{ForecastPanel, PanelForm};
use crate::quarter::Quarter;
use crate::rolling::{rolling_forecasts, RollingScheme};
use crate::scalar::Scalar;
use crate::series::Series;

/// One component of an aggregate: a series name, its sign in the identity,
/// and whether its AR equation runs in logs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub series: String,
    pub sign: i8,
    pub use_logs: bool,
}

impl Component {
    pub fn new(series: impl Into<String>, sign: i8, use_logs: bool) -> Self {
        Component {
            series: series.into(),
            sign,
            use_logs,
        }
    }
}

/// A named list of components plus the aggregation identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentModelSpec {
    pub name: String,
    pub components: Vec<Component>,
    pub aggregate_name: String,
}

impl ComponentModelSpec {
    pub fn new(
        name: impl Into<String>,
        components: Vec<Component>,
        aggregate_name: impl Into<String>,
    ) -> Result<Self, Error> {
        let name = name.into();
        if components.is_empty() {
            return Err(Error::BadComponentSpec {
                name,
                detail: "at least one component required".to_string(),
            });
        }
        for c in &components {
            if c.sign != 1 && c.sign != -1 {
                return Err(Error::BadComponentSpec {
                    name,
                    detail: format!("component '{}' has sign {}, expected +1 or -1", c.series, c.sign),
                });
            }
        }
        let mut names: Vec<&str> = components.iter().map(|c| c.series.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadComponentSpec {
                name,
                detail: "component names must be unique".to_string(),
            });
        }
        Ok(ComponentModelSpec {
            name,
            components,
            aggregate_name: aggregate_name.into(),
        })
    }

    /// The ten-component GDP model: consumption of services, nondurables and
    /// durables, residential and nonresidential fixed investment, inventory
    /// investment, exports, imports (negative sign), government spending, and
    /// the chain-linking statistical discrepancy. Inventory investment and
    /// the discrepancy can be negative, so their equations run in levels.
    pub fn gdp_ten_component() -> Self {
        let c = |series: &str, sign: i8, logs: bool| Component::new(series, sign, logs);
        ComponentModelSpec {
            name: "YSAR4".to_string(),
            components: vec![
                c("services", 1, true),
                c("nondurables", 1, true),
                c("durables", 1, true),
                c("residential", 1, true),
                c("nonresidential", 1, true),
                c("inventories", 1, false),
                c("exports", 1, true),
                c("imports", -1, true),
                c("government", 1, true),
                c("discrepancy", 1, false),
            ],
            aggregate_name: "gdp".to_string(),
        }
    }

    /// The three consumption components summing to total consumption.
    pub fn consumption_three_component() -> Self {
        ComponentModelSpec {
            name: "CSAR4".to_string(),
            components: vec![
                Component::new("services", 1, true),
                Component::new("nondurables", 1, true),
                Component::new("durables", 1, true),
            ],
            aggregate_name: "consumption".to_string(),
        }
    }

    /// The two fixed-investment components summing to total fixed investment.
    pub fn investment_two_component() -> Self {
        ComponentModelSpec {
            name: "ISAR4".to_string(),
            components: vec![
                Component::new("residential", 1, true),
                Component::new("nonresidential", 1, true),
            ],
            aggregate_name: "investment".to_string(),
        }
    }

    /// The five components outside consumption and fixed investment.
    pub fn other_five_component() -> Self {
        ComponentModelSpec {
            name: "OSAR4".to_string(),
            components: vec![
                Component::new("inventories", 1, false),
                Component::new("exports", 1, true),
                Component::new("imports", -1, true),
                Component::new("government", 1, true),
                Component::new("discrepancy", 1, false),
            ],
            aggregate_name: "other".to_string(),
        }
    }
}

/// Aggregate forecasts plus the per-component level panels behind them.
#[derive(Debug, Clone)]
pub struct AggregateForecast<F> {
    /// Aggregate level forecasts (model = spec name, variable = aggregate).
    pub panel: ForecastPanel<F>,
    /// Component forecasts converted to levels, keyed by series name.
    pub component_panels: BTreeMap<String, ForecastPanel<F>>,
    /// Fitted equations per component and origin (window end = origin).
    pub component_fits: BTreeMap<String, BTreeMap<Quarter, ArFit<F>>>,
}

impl<F: Scalar> AggregateForecast<F> {
    /// Check that no component's estimation window reaches past its origin.
    pub fn audit_no_future_information(&self) -> Result<(), Error> {
        for fits in self.component_fits.values() {
            for (origin, fit) in fits {
                if fit.window.end != *origin {
                    return Err(Error::FutureInformation {
                        origin: *origin,
                        window_end: fit.window.end,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Fit every component equation over the rolling scheme and sum the level
/// forecasts with the component signs.
///
/// Logged components are estimated in logs and exponentiated back to levels
/// (point forecasts; no variance correction). Errors carry the offending
/// component's name.
pub fn build_component_forecasts<F: Scalar>(
    spec: &ComponentModelSpec,
    data: &BTreeMap<String, Series<F>>,
    scheme: &RollingScheme,
) -> Result<AggregateForecast<F>, Error> {
    let mut component_panels = BTreeMap::new();
    let mut component_fits = BTreeMap::new();

    for component in &spec.components {
        let series = data.get(&component.series).ok_or_else(|| Error::BadComponentSpec {
            name: spec.name.clone(),
            detail: format!("series '{}' not found in data", component.series),
        })?;
        let run = rolling_forecasts(series, &ArSpec::ar4(component.use_logs), scheme)
            .map_err(|e| Error::Component {
                name: component.series.clone(),
                source: Box::new(e),
            })?;
        let level_panel = if component.use_logs {
            run.panel
                .map_values(PanelForm::Level, |_, _, v| Ok(v.exp()))
                .expect("exp cannot fail")
        } else {
            run.panel.clone()
        };
        component_panels.insert(component.series.clone(), level_panel);
        component_fits.insert(
            component.series.clone(),
            run.fits,
        );
    }

    // Signed sum per (origin, horizon), components in spec order.
    let mut aggregate = ForecastPanel::new(&spec.name, &spec.aggregate_name, PanelForm::Level);
    let first = &component_panels[&spec.components[0].series];
    for (origin, _) in first.iter() {
        let horizon = first.path(origin).unwrap().len();
        let mut sum = vec![F::zero(); horizon];
        for component in &spec.components {
            let panel = &component_panels[&component.series];
            let path = panel.path(origin).ok_or_else(|| Error::PanelMismatch {
                origin,
                detail: format!("component '{}' lacks this origin", component.series),
            })?;
            let sign = if component.sign >= 0 { F::one() } else { -F::one() };
            for (acc, v) in sum.iter_mut().zip(path) {
                *acc = *acc + sign * *v;
            }
        }
        aggregate.insert(origin, sum)?;
    }

    Ok(AggregateForecast {
        panel: aggregate,
        component_panels,
        component_fits,
    })
}

/// Signed sum of the component series themselves (the aggregate's history).
///
/// Present only where every component is present. Used by the
/// single-equation variant that fits one AR directly to the aggregate.
pub fn aggregate_series<F: Scalar>(
    spec: &ComponentModelSpec,
    data: &BTreeMap<String, Series<F>>,
) -> Result<Series<F>, Error> {
    let mut parts: Vec<(&Series<F>, F)> = Vec::with_capacity(spec.components.len());
    for component in &spec.components {
        let series = data.get(&component.series).ok_or_else(|| Error::BadComponentSpec {
            name: spec.name.clone(),
            detail: format!("series '{}' not found in data", component.series),
        })?;
        let sign = if component.sign >= 0 { F::one() } else { -F::one() };
        parts.push((series, sign));
    }
    let start = parts.iter().map(|(s, _)| s.start()).min().unwrap();
    let end = parts.iter().map(|(s, _)| s.end()).max().unwrap();
    let len = (start.distance(end) + 1) as usize;
    let values: Vec<Option<F>> = (0..len)
        .map(|i| {
            let q = start.add(i as i64);
            parts
                .iter()
                .map(|(s, sign)| s.value_at(q).map(|v| *sign * v))
                .try_fold(F::zero(), |acc, v| v.map(|v| acc + v))
        })
        .collect();
    Ok(Series::new(&spec.aggregate_name, start, values))
}

/// The residual block of the GDP identity: `gdp - consumption - investment`,
/// entry-wise over identical origins and horizons.
pub fn other_from_identity<F: Scalar>(
    gdp: &ForecastPanel<F>,
    consumption: &ForecastPanel<F>,
    investment: &ForecastPanel<F>,
) -> Result<ForecastPanel<F>, Error> {
    for panel in [gdp, consumption, investment] {
        if panel.form() != PanelForm::Level {
            return Err(Error::FormMismatch {
                model: panel.model().to_string(),
                variable: panel.variable().to_string(),
                expected: PanelForm::Level.to_string(),
                got: panel.form().to_string(),
            });
        }
    }
    if gdp.len() != consumption.len() || gdp.len() != investment.len() {
        let detail = format!(
            "origin counts differ: gdp {}, consumption {}, investment {}",
            gdp.len(),
            consumption.len(),
            investment.len()
        );
        let origin = gdp.origins().next().unwrap_or_else(|| {
            consumption
                .origins()
                .next()
                .unwrap_or("1954Q1".parse().unwrap())
        });
        return Err(Error::PanelMismatch { origin, detail });
    }

    let mut out = ForecastPanel::new(gdp.model(), "other", PanelForm::Level);
    for (origin, g_path) in gdp.iter() {
        let c_path = consumption.path(origin).ok_or_else(|| Error::PanelMismatch {
            origin,
            detail: "consumption panel lacks this origin".to_string(),
        })?;
        let i_path = investment.path(origin).ok_or_else(|| Error::PanelMismatch {
            origin,
            detail: "investment panel lacks this origin".to_string(),
        })?;
        if c_path.len() != g_path.len() || i_path.len() != g_path.len() {
            return Err(Error::PanelMismatch {
                origin,
                detail: "horizon lengths differ".to_string(),
            });
        }
        let path: Vec<F> = g_path
            .iter()
            .zip(c_path)
            .zip(i_path)
            .map(|((g, c), i)| *g - *c - *i)
            .collect();
        out.insert(origin, path)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn q(s: &str) -> Quarter {
        s.parse().unwrap()
    }

    fn flat_series(name: &str, value: f64, n: usize) -> Series<f64> {
        // Constant series are collinear for AR fits, so wiggle slightly.
        let vals = (0..n)
            .map(|i| Some(value + ((i * 37 % 11) as f64 - 5.0) * 1e-3 * value))
            .collect();
        Series::new(name, q("1954Q1"), vals)
    }

    fn scheme() -> RollingScheme {
        RollingScheme::new(q("1954Q1"), q("1960Q4"), q("1961Q3"), 4).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ComponentModelSpec::new("m", vec![], "agg").is_err());
        assert!(ComponentModelSpec::new(
            "m",
            vec![Component::new("a", 2, false)],
            "agg"
        )
        .is_err());
        assert!(ComponentModelSpec::new(
            "m",
            vec![Component::new("a", 1, false), Component::new("a", 1, true)],
            "agg"
        )
        .is_err());
    }

    #[test]
    fn ten_component_spec_matches_identity_conventions() {
        let spec = ComponentModelSpec::gdp_ten_component();
        assert_eq!(spec.components.len(), 10);
        let imports = spec.components.iter().find(|c| c.series == "imports").unwrap();
        assert_eq!(imports.sign, -1);
        for name in ["inventories", "discrepancy"] {
            let c = spec.components.iter().find(|c| c.series == name).unwrap();
            assert!(!c.use_logs, "{name} must be estimated in levels");
        }
        // Consumption + investment + other partition the ten components.
        let mut partition: Vec<String> = ComponentModelSpec::consumption_three_component()
            .components
            .iter()
            .chain(&ComponentModelSpec::investment_two_component().components)
            .chain(&ComponentModelSpec::other_five_component().components)
            .map(|c| c.series.clone())
            .collect();
        partition.sort();
        let mut full: Vec<String> = spec.components.iter().map(|c| c.series.clone()).collect();
        full.sort();
        assert_eq!(partition, full);
    }

    #[test]
    fn single_component_aggregate_equals_component() {
        let spec = ComponentModelSpec::new(
            "ONE",
            vec![Component::new("a", 1, false)],
            "agg",
        )
        .unwrap();
        let mut data = BTreeMap::new();
        data.insert("a".to_string(), flat_series("a", 50.0, 60));
        let out = build_component_forecasts(&spec, &data, &scheme()).unwrap();
        let comp = &out.component_panels["a"];
        for (origin, path) in out.panel.iter() {
            assert_eq!(path, comp.path(origin).unwrap());
        }
        out.audit_no_future_information().unwrap();
    }

    #[test]
    fn two_near_constant_components_sum() {
        let spec = ComponentModelSpec::new(
            "TWO",
            vec![Component::new("a", 1, false), Component::new("b", 1, false)],
            "agg",
        )
        .unwrap();
        let mut data = BTreeMap::new();
        data.insert("a".to_string(), flat_series("a", 30.0, 60));
        data.insert("b".to_string(), flat_series("b", 12.0, 60));
        let out = build_component_forecasts(&spec, &data, &scheme()).unwrap();
        for (origin, path) in out.panel.iter() {
            for (h, v) in path.iter().enumerate() {
                let a = out.component_panels["a"].value_at(origin, h + 1).unwrap();
                let b = out.component_panels["b"].value_at(origin, h + 1).unwrap();
                assert_relative_eq!(*v, a + b, max_relative = 1e-14);
                assert_relative_eq!(*v, 42.0, max_relative = 0.05);
            }
        }
    }

    #[test]
    fn sign_flip_leaves_aggregate_unchanged() {
        // Negating a non-logged component's data and flipping its sign is a
        // no-op for the aggregate.
        let mut data = BTreeMap::new();
        data.insert("a".to_string(), flat_series("a", 30.0, 60));
        data.insert("b".to_string(), flat_series("b", 12.0, 60));
        let plus = ComponentModelSpec::new(
            "P",
            vec![Component::new("a", 1, false), Component::new("b", 1, false)],
            "agg",
        )
        .unwrap();
        let out_plus = build_component_forecasts(&plus, &data, &scheme()).unwrap();

        let negated = Series::new(
            "b",
            data["b"].start(),
            data["b"].iter().map(|(_, v)| v.map(|x| -x)).collect(),
        );
        data.insert("b".to_string(), negated);
        let minus = ComponentModelSpec::new(
            "M",
            vec![Component::new("a", 1, false), Component::new("b", -1, false)],
            "agg",
        )
        .unwrap();
        let out_minus = build_component_forecasts(&minus, &data, &scheme()).unwrap();

        for (origin, path) in out_plus.panel.iter() {
            let other = out_minus.panel.path(origin).unwrap();
            for (a, b) in path.iter().zip(other) {
                assert_eq!(a, b, "sign flip must be exact");
            }
        }
    }

    #[test]
    fn other_identity_arithmetic() {
        let mk = |name: &str, v: f64| {
            let mut p = ForecastPanel::new("m", name, PanelForm::Level);
            p.insert(q("1992Q1"), vec![v, v + 1.0]).unwrap();
            p.insert(q("1992Q2"), vec![v - 2.0, v]).unwrap();
            p
        };
        let gdp = mk("gdp", 100.0);
        let cons = mk("consumption", 60.0);
        let inv = mk("investment", 20.0);
        let other = other_from_identity(&gdp, &cons, &inv).unwrap();
        assert_eq!(other.path(q("1992Q1")).unwrap(), &[20.0, 19.0]);
        assert_eq!(other.path(q("1992Q2")).unwrap(), &[22.0, 20.0]);
        assert_eq!(other.variable(), "other");
    }

    #[test]
    fn other_identity_zero_when_components_exhaust_gdp() {
        let mut gdp = ForecastPanel::new("m", "gdp", PanelForm::Level);
        let mut cons = ForecastPanel::new("m", "consumption", PanelForm::Level);
        let mut inv = ForecastPanel::new("m", "investment", PanelForm::Level);
        gdp.insert(q("1992Q1"), vec![80.0, 81.0]).unwrap();
        cons.insert(q("1992Q1"), vec![50.0, 50.5]).unwrap();
        inv.insert(q("1992Q1"), vec![30.0, 30.5]).unwrap();
        let other = other_from_identity(&gdp, &cons, &inv).unwrap();
        assert_eq!(other.path(q("1992Q1")).unwrap(), &[0.0, 0.0]);
    }

    #[test]
    fn other_identity_mismatch_rejected() {
        let mut gdp = ForecastPanel::new("m", "gdp", PanelForm::Level);
        let mut cons = ForecastPanel::new("m", "consumption", PanelForm::Level);
        let mut inv = ForecastPanel::new("m", "investment", PanelForm::Level);
        gdp.insert(q("1992Q1"), vec![80.0]).unwrap();
        cons.insert(q("1992Q2"), vec![50.0]).unwrap();
        inv.insert(q("1992Q1"), vec![30.0]).unwrap();
        assert!(other_from_identity(&gdp, &cons, &inv).is_err());
    }

    #[test]
    fn aggregate_series_signed_sum() {
        let spec = ComponentModelSpec::new(
            "S",
            vec![Component::new("a", 1, false), Component::new("b", -1, false)],
            "net",
        )
        .unwrap();
        let mut data = BTreeMap::new();
        data.insert(
            "a".to_string(),
            Series::new("a", q("1954Q1"), vec![Some(5.0), Some(6.0), None]),
        );
        data.insert(
            "b".to_string(),
            Series::new("b", q("1954Q1"), vec![Some(2.0), Some(1.5), Some(1.0)]),
        );
        let s = aggregate_series(&spec, &data).unwrap();
        assert_eq!(s.value_at(q("1954Q1")), Some(3.0));
        assert_eq!(s.value_at(q("1954Q2")), Some(4.5));
        assert_eq!(s.value_at(q("1954Q3")), None);
    }
}
