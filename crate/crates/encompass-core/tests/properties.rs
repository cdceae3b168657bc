//! Property tests for the structural invariants.

mod common;

use proptest::prelude::*;
use std::collections::BTreeMap;

use common::{normal_equations_ols, q};
use encompass_core::ar::{fit_ar, iterate_forecast, ArSpec};
use encompass_core::components::{build_component_forecasts, Component, ComponentModelSpec};
use encompass_core::convert::growth_to_levels;
use encompass_core::io::{load_series_csv, save_series_csv};
use encompass_core::panel::PanelForm;
use encompass_core::regress::{ols3, robust_cov, CovMethod, DesignRow, RegressionData};
use encompass_core::rolling::RollingScheme;
use encompass_core::{ForecastPanel64, Quarter, QuarterRange, Series64};

fn quarter_strategy() -> impl Strategy<Value = Quarter> {
    (1900i32..2100, 1u8..=4).prop_map(|(y, qq)| Quarter::new(y, qq).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quarter_distance_inverts_add(start in quarter_strategy(), n in -400i64..=400) {
        let other = start.add(n);
        prop_assert_eq!(start.distance(other), n);
        prop_assert_eq!(other.add(-n), start);
    }

    #[test]
    fn quarter_parse_round_trips(qq in quarter_strategy()) {
        let text = qq.to_string();
        let back: Quarter = text.parse().unwrap();
        prop_assert_eq!(back, qq);
    }

    #[test]
    fn diff_then_cumulative_reconstruction_is_identity(
        values in prop::collection::vec(-1000.0f64..1000.0, 8..60),
        s in 1usize..5,
    ) {
        prop_assume!(s < values.len());
        let series = Series64::new("x", q("1954Q1"), values.iter().copied().map(Some).collect());
        let diffed = series.diff(s).unwrap();

        // Rebuild from the first s values plus the differences.
        let mut rebuilt = values[..s].to_vec();
        for t in s..values.len() {
            let d = diffed.value_at(q("1954Q1").add(t as i64)).unwrap();
            rebuilt.push(rebuilt[t - s] + d);
        }
        for (a, b) in values.iter().zip(&rebuilt) {
            prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
        }
    }

    #[test]
    fn series_load_emit_load_identity(
        entries in prop::collection::vec((any::<bool>(), -1.0e6f64..1.0e6), 2..40),
    ) {
        prop_assume!(entries.first().map(|e| e.0).unwrap_or(false));
        prop_assume!(entries.last().map(|e| e.0).unwrap_or(false));
        let dir = tempfile::tempdir().unwrap();
        let start = q("1970Q1");
        let mut body = String::from("date,value\n");
        for (i, (present, v)) in entries.iter().enumerate() {
            if *present {
                body.push_str(&format!("{},{}\n", start.add(i as i64), v));
            }
        }
        let p0 = dir.path().join("in.csv");
        std::fs::write(&p0, &body).unwrap();

        let s1: Series64 = load_series_csv(&p0, "x").unwrap();
        let p1 = dir.path().join("out1.csv");
        save_series_csv(&p1, &s1).unwrap();
        let s2: Series64 = load_series_csv(&p1, "x").unwrap();
        prop_assert_eq!(&s1, &s2);

        let p2 = dir.path().join("out2.csv");
        save_series_csv(&p2, &s2).unwrap();
        prop_assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn scheme_origin_count_is_distance_plus_one(
        first in quarter_strategy(),
        extra in 0i64..200,
        horizon in 1usize..20,
    ) {
        let scheme = RollingScheme::new(first.add(-40), first, first.add(extra), horizon).unwrap();
        prop_assert_eq!(scheme.origin_count() as i64, extra + 1);
        prop_assert_eq!(scheme.windows().count() as i64, extra + 1);
        // Expanding windows: same start, nested spans.
        let mut prev_len = 0usize;
        for w in scheme.windows() {
            prop_assert_eq!(w.start, first.add(-40));
            prop_assert!(w.len() > prev_len);
            prev_len = w.len();
        }
    }

    #[test]
    fn noise_free_ar_recovery(
        roots in prop::collection::vec(0.35f64..0.9, 1..=4),
        c in -0.5f64..0.5,
    ) {
        // Distinct roots only: require pairwise separation.
        for i in 0..roots.len() {
            for j in (i + 1)..roots.len() {
                prop_assume!((roots[i] - roots[j]).abs() > 0.08);
            }
        }
        let p = roots.len();
        // Characteristic polynomial product (1 - r z) -> phi coefficients.
        let mut poly = vec![1.0];
        for r in &roots {
            let mut next = vec![0.0; poly.len() + 1];
            for (i, coeff) in poly.iter().enumerate() {
                next[i] += coeff;
                next[i + 1] -= coeff * r;
            }
            poly = next;
        }
        let phi: Vec<f64> = poly[1..].iter().map(|v| -v).collect();

        // Excite all modes with spread-out starting values.
        let mut vals: Vec<f64> = (0..p).map(|i| 1.0 + i as f64 * 0.7).collect();
        for t in p..40 {
            let mut next = c;
            for (lag, coeff) in phi.iter().enumerate() {
                next += coeff * vals[t - 1 - lag];
            }
            vals.push(next);
        }
        let series = Series64::new("x", q("1954Q1"), vals.into_iter().map(Some).collect());
        let window = QuarterRange::new(q("1954Q1"), q("1954Q1").add(39)).unwrap();
        let fit = fit_ar(&series, &ArSpec::new(p, false), window).unwrap();
        for (got, want) in fit.phi.iter().zip(&phi) {
            prop_assert!((got - want).abs() < 1e-8 * want.abs().max(1.0),
                "phi {} vs {}", got, want);
        }
        prop_assert!((fit.constant - c).abs() < 1e-8);
    }

    #[test]
    fn anchor_scales_out_of_level_paths(
        growth in prop::collection::vec(-50.0f64..50.0, 1..16),
        anchor in 0.01f64..10_000.0,
    ) {
        let origin = q("1991Q4");
        let mk_panel = || {
            let mut p = ForecastPanel64::new("m", "y", PanelForm::GrowthPct);
            p.insert(origin, growth.clone()).unwrap();
            p
        };
        let unit_anchor = Series64::new("a", origin, vec![Some(1.0)]);
        let real_anchor = Series64::new("a", origin, vec![Some(anchor)]);
        let unit = growth_to_levels(&mk_panel(), &unit_anchor).unwrap();
        let scaled = growth_to_levels(&mk_panel(), &real_anchor).unwrap();
        for (u, s) in unit.path(origin).unwrap().iter().zip(scaled.path(origin).unwrap()) {
            // Bit-exact: the cumulative factor is anchor-free.
            prop_assert_eq!(anchor * u, *s);
        }
        // Monotone when all growth rates are positive.
        if growth.iter().all(|g| *g > 0.0) {
            let path = scaled.path(origin).unwrap();
            prop_assert!(path[0] > anchor);
            prop_assert!(path.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn growth_level_round_trip(
        growth in prop::collection::vec(-30.0f64..30.0, 1..12),
        anchor in 1.0f64..5_000.0,
    ) {
        let origin = q("1991Q4");
        let mut p = ForecastPanel64::new("m", "y", PanelForm::GrowthPct);
        p.insert(origin, growth.clone()).unwrap();
        let anchors = Series64::new("a", origin, vec![Some(anchor)]);
        let levels = growth_to_levels(&p, &anchors).unwrap();
        let path = levels.path(origin).unwrap();
        let mut prev = anchor;
        for (g, level) in growth.iter().zip(path) {
            let implied = (level / prev - 1.0) * 100.0;
            prop_assert!((implied - g).abs() <= 1e-10 * g.abs().max(1.0),
                "implied {} vs {}", implied, g);
            prev = *level;
        }
    }
}

fn design_strategy() -> impl Strategy<Value = RegressionData<f64>> {
    prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0), 8..40).prop_map(|rows| {
        let start = q("1980Q1");
        let rows: Vec<DesignRow<f64>> = rows
            .into_iter()
            .enumerate()
            .map(|(i, (y, xa, xb))| DesignRow {
                target: start.add(i as i64),
                y: y + 0.3 * xa, // keep a little signal so fits are sane
                xa,
                xb,
            })
            .collect();
        let period = QuarterRange::new(start, start.add(rows.len() as i64 - 1)).unwrap();
        RegressionData {
            s: 1,
            rows,
            dropped: 0,
            period,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scale_equivariance(data in design_strategy(), k in 0.05f64..20.0) {
        let base = match ols3(&data) {
            Ok(fit) => fit,
            Err(_) => return Ok(()), // rank-deficient draw: nothing to check
        };
        let scaled_data = RegressionData {
            s: data.s,
            rows: data
                .rows
                .iter()
                .map(|r| DesignRow {
                    target: r.target,
                    y: k * r.y,
                    xa: k * r.xa,
                    xb: k * r.xb,
                })
                .collect(),
            dropped: 0,
            period: data.period,
        };
        let scaled = match ols3(&scaled_data) {
            Ok(fit) => fit,
            Err(_) => return Ok(()),
        };
        let tol = 1e-7;
        prop_assert!((scaled.coeffs[0] - k * base.coeffs[0]).abs() < tol * k.max(1.0),
            "alpha: {} vs {}", scaled.coeffs[0], k * base.coeffs[0]);
        prop_assert!((scaled.coeffs[1] - base.coeffs[1]).abs() < tol);
        prop_assert!((scaled.coeffs[2] - base.coeffs[2]).abs() < tol);

        // t-statistics are scale-free, for robust and classical covariances.
        for method in [CovMethod::White, CovMethod::BartlettHac, CovMethod::PlainOls] {
            let v0 = robust_cov(&data, &base.residuals, method, 2).unwrap();
            let v1 = robust_cov(&scaled_data, &scaled.residuals, method, 2).unwrap();
            for i in 0..3 {
                let t0 = base.coeffs[i] / v0.matrix[i][i].sqrt();
                let t1 = scaled.coeffs[i] / v1.matrix[i][i].sqrt();
                if t0.is_finite() && t1.is_finite() {
                    prop_assert!((t0 - t1).abs() < 1e-6 * t0.abs().max(1.0),
                        "{method} t{}: {} vs {}", i, t0, t1);
                }
            }
        }
    }

    #[test]
    fn covariance_symmetry_and_diagonal_nonnegativity(data in design_strategy()) {
        let fit = match ols3(&data) {
            Ok(f) => f,
            Err(_) => return Ok(()),
        };
        for (method, lag) in [
            (CovMethod::White, 0usize),
            (CovMethod::BartlettHac, 3),
            (CovMethod::TruncatedHac, 3),
            (CovMethod::PlainOls, 0),
        ] {
            let cov = robust_cov(&data, &fit.residuals, method, lag).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert_eq!(cov.matrix[i][j], cov.matrix[j][i]);
                }
            }
            if matches!(method, CovMethod::White | CovMethod::BartlettHac | CovMethod::PlainOls) {
                for i in 0..3 {
                    prop_assert!(cov.matrix[i][i] >= -1e-15,
                        "{method} diagonal {} = {}", i, cov.matrix[i][i]);
                }
            }
        }
    }

    #[test]
    fn refitting_with_duplicated_zero_residual_row_is_stable(data in design_strategy()) {
        let fit = match ols3(&data) {
            Ok(f) => f,
            Err(_) => return Ok(()),
        };
        // Duplicate the middle row's regressors with its fitted value.
        let mid = &data.rows[data.rows.len() / 2];
        let fitted_y = fit.coeffs[0] + fit.coeffs[1] * mid.xa + fit.coeffs[2] * mid.xb;
        let mut rows = data.rows.clone();
        rows.push(DesignRow {
            target: data.period.end.add(1),
            y: fitted_y,
            xa: mid.xa,
            xb: mid.xb,
        });
        let period = QuarterRange::new(data.period.start, data.period.end.add(1)).unwrap();
        let extended = RegressionData { s: data.s, rows, dropped: 0, period };
        let refit = ols3(&extended).unwrap();

        // Against a plain recomputation oracle on the extended rows.
        let design: Vec<Vec<f64>> = extended.rows.iter().map(|r| vec![1.0, r.xa, r.xb]).collect();
        let y: Vec<f64> = extended.rows.iter().map(|r| r.y).collect();
        let oracle = normal_equations_ols(&design, &y);
        for i in 0..3 {
            prop_assert!((refit.coeffs[i] - fit.coeffs[i]).abs() < 1e-8 * fit.coeffs[i].abs().max(1.0),
                "coeff {}: {} vs {}", i, refit.coeffs[i], fit.coeffs[i]);
            prop_assert!((refit.coeffs[i] - oracle[i]).abs() < 1e-8 * oracle[i].abs().max(1.0));
        }
    }
}

/// CSAR4 + ISAR4 + OSAR4 reproduce YSAR4 cell-by-cell when built from the
/// same data and scheme.
#[test]
fn sub_aggregates_sum_to_full_aggregate() {
    let full = ComponentModelSpec::gdp_ten_component();
    let mut data = BTreeMap::new();
    for (i, component) in full.components.iter().enumerate() {
        let series = if component.use_logs {
            common::positive_walk(
                &component.series,
                "1954Q1",
                100,
                80.0 + 15.0 * i as f64,
                0.005,
                0.012,
                300 + i as u64,
            )
        } else {
            common::ar1_series(&component.series, "1954Q1", 100, 1.5, 0.5, 0.8, 400 + i as u64)
        };
        data.insert(component.series.clone(), series);
    }
    let scheme = RollingScheme::new(q("1954Q1"), q("1968Q4"), q("1970Q3"), 6).unwrap();

    let y = build_component_forecasts(&full, &data, &scheme).unwrap();
    let c = build_component_forecasts(
        &ComponentModelSpec::consumption_three_component(),
        &data,
        &scheme,
    )
    .unwrap();
    let i = build_component_forecasts(
        &ComponentModelSpec::investment_two_component(),
        &data,
        &scheme,
    )
    .unwrap();
    let o = build_component_forecasts(
        &ComponentModelSpec::other_five_component(),
        &data,
        &scheme,
    )
    .unwrap();

    for (origin, path) in y.panel.iter() {
        for (h, v) in path.iter().enumerate() {
            let sum = c.panel.value_at(origin, h + 1).unwrap()
                + i.panel.value_at(origin, h + 1).unwrap()
                + o.panel.value_at(origin, h + 1).unwrap();
            assert!(
                (v - sum).abs() <= 1e-9 * v.abs().max(1.0),
                "origin {origin} h {}: {} vs {}",
                h + 1,
                v,
                sum
            );
        }
    }
}

/// The numeric kernels are scalar-generic; exercise an f32 fit end to end.
#[test]
fn single_precision_fit_runs() {
    let mut vals: Vec<f32> = vec![1.0, 0.4];
    for t in 2..40 {
        vals.push(0.3 + 0.5 * vals[t - 1] - 0.1 * vals[t - 2]);
    }
    let series = encompass_core::Series32::new("x", q("1954Q1"), vals.into_iter().map(Some).collect());
    let window = QuarterRange::new(q("1954Q1"), q("1963Q3")).unwrap();
    let fit = fit_ar(&series, &ArSpec::new(2, false), window).unwrap();
    assert!((fit.phi[0] - 0.5).abs() < 1e-3);
    assert!((fit.phi[1] + 0.1).abs() < 1e-3);
    let path = iterate_forecast(&fit, &[0.55f32, 0.57], 4);
    assert_eq!(path.len(), 4);
}

/// With the discrepancy defined as the residual of the identity, the signed
/// component sum reproduces recorded GDP exactly on historical data.
#[test]
fn identity_closure_on_actuals_with_residual_discrepancy() {
    use encompass_core::components::aggregate_series;

    let spec = ComponentModelSpec::gdp_ten_component();
    let n = 90;
    let mut data = BTreeMap::new();
    for (i, component) in spec.components.iter().enumerate() {
        if component.series == "discrepancy" {
            continue;
        }
        let series = if component.use_logs {
            common::positive_walk(&component.series, "1954Q1", n, 60.0 + 25.0 * i as f64, 0.005, 0.015, 500 + i as u64)
        } else {
            common::ar1_series(&component.series, "1954Q1", n, 3.0, 0.5, 1.0, 600 + i as u64)
        };
        data.insert(component.series.clone(), series);
    }
    // Recorded GDP: an independent walk; the discrepancy absorbs the gap.
    let gdp = common::positive_walk("gdp", "1954Q1", n, 900.0, 0.006, 0.01, 700);
    let mut discrepancy_vals = Vec::with_capacity(n);
    for i in 0..n {
        let quarter = q("1954Q1").add(i as i64);
        let mut signed = 0.0;
        for component in &spec.components {
            if component.series == "discrepancy" {
                continue;
            }
            signed += component.sign as f64 * data[&component.series].value_at(quarter).unwrap();
        }
        discrepancy_vals.push(Some(gdp.value_at(quarter).unwrap() - signed));
    }
    data.insert(
        "discrepancy".to_string(),
        Series64::new("discrepancy", q("1954Q1"), discrepancy_vals),
    );

    let rebuilt = aggregate_series(&spec, &data).unwrap();
    for i in 0..n {
        let quarter = q("1954Q1").add(i as i64);
        let got = rebuilt.value_at(quarter).unwrap();
        let want = gdp.value_at(quarter).unwrap();
        assert!(
            (got - want).abs() <= 1e-9 * want.abs(),
            "{quarter}: {got} vs {want}"
        );
    }
}

/// A custom spec with a negative sign nets two logged series.
#[test]
fn custom_component_spec_builds() {
    let spec = ComponentModelSpec::new(
        "NET",
        vec![Component::new("a", 1, true), Component::new("b", -1, true)],
        "net",
    )
    .unwrap();
    let mut data = BTreeMap::new();
    data.insert(
        "a".to_string(),
        common::positive_walk("a", "1954Q1", 80, 200.0, 0.004, 0.01, 901),
    );
    data.insert(
        "b".to_string(),
        common::positive_walk("b", "1954Q1", 80, 50.0, 0.004, 0.01, 902),
    );
    let scheme = RollingScheme::new(q("1954Q1"), q("1966Q4"), q("1967Q3"), 4).unwrap();
    let built = build_component_forecasts(&spec, &data, &scheme).unwrap();
    for (origin, path) in built.panel.iter() {
        for (h, v) in path.iter().enumerate() {
            let a = built.component_panels["a"].value_at(origin, h + 1).unwrap();
            let b = built.component_panels["b"].value_at(origin, h + 1).unwrap();
            assert_eq!(*v, a - b);
        }
    }
}
