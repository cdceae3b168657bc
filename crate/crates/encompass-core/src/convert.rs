//! Converting growth-rate forecast paths to levels and logs.
//!
//! Externally produced forecasts arrive as quarterly percentage changes; the
//! comparison regression needs log levels. Each path is anchored at the
//! actual level of the quarter before its first forecast quarter (the
//! origin), then compounded forward.


use crate::error::Error;
use crate::panel::{ForecastPanel, PanelForm};
use crate::scalar::Scalar;
use crate::series::Series;

/// Compound a growth-rate panel into level forecasts.
///
/// For each origin `o` with growth path `g_1..g_H` (percent per quarter):
///
/// ```text
/// L^_{o+h} = L_o * m_1 * ... * m_h,      m_h = 1 + g_h / 100
/// ```
///
/// where `L_o` is the actual level at the origin. With the panel's
/// `annualized` flag the per-quarter multiplier is instead
/// `exp(ln(1 + g/100) / 4)`. The cumulative factor is computed once per path
/// and scaled by the anchor in a single multiplication, so the ratio of a
/// level forecast to its anchor depends only on the growth path.
pub fn growth_to_levels<F: Scalar>(
    panel: &ForecastPanel<F>,
    actuals: &Series<F>,
) -> Result<ForecastPanel<F>, Error> {
    if panel.form() != PanelForm::GrowthPct {
        return Err(Error::FormMismatch {
            model: panel.model().to_string(),
            variable: panel.variable().to_string(),
            expected: PanelForm::GrowthPct.to_string(),
            got: panel.form().to_string(),
        });
    }
    let hundred = F::from_f64_lit(100.0);
    let quarter_split = F::from_f64_lit(0.25);
    let annualized = panel.annualized();

    let mut out = ForecastPanel::new(panel.model(), panel.variable(), PanelForm::Level);
    for (origin, path) in panel.iter() {
        let anchor = actuals.value_at(origin).ok_or_else(|| Error::MissingAnchor {
            model: panel.model().to_string(),
            variable: panel.variable().to_string(),
            quarter: origin,
        })?;
        let mut cum = F::one();
        let mut levels = Vec::with_capacity(path.len());
        for (i, g) in path.iter().enumerate() {
            let gross = F::one() + *g / hundred;
            if gross <= F::zero() {
                return Err(Error::GrowthOutOfRange {
                    origin,
                    horizon: i + 1,
                    value: g.to_f64().unwrap_or(f64::NAN),
                });
            }
            let multiplier = if annualized {
                (gross.ln() * quarter_split).exp()
            } else {
                gross
            };
            cum = cum * multiplier;
            levels.push(anchor * cum);
        }
        out.insert(origin, levels)?;
    }
    Ok(out)
}

/// Element-wise natural log of a level panel.
pub fn levels_to_log<F: Scalar>(panel: &ForecastPanel<F>) -> Result<ForecastPanel<F>, Error> {
    if panel.form() != PanelForm::Level {
        return Err(Error::FormMismatch {
            model: panel.model().to_string(),
            variable: panel.variable().to_string(),
            expected: PanelForm::Level.to_string(),
            got: panel.form().to_string(),
        });
    }
    panel.map_values(PanelForm::LogLevel, |origin, horizon, v| {
        if v > F::zero() {
            Ok(v.ln())
        } else {
            Err(Error::GrowthOutOfRange {
                origin,
                horizon,
                value: v.to_f64().unwrap_or(f64::NAN),
            })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quarter::Quarter;
    use approx::assert_relative_eq;

    fn q(s: &str) -> Quarter {
        s.parse().unwrap()
    }

    fn anchor_series(value: f64) -> Series<f64> {
        Series::new("lvl", q("1991Q4"), vec![Some(value), Some(value)])
    }

    fn growth_panel(path: Vec<f64>) -> ForecastPanel<f64> {
        let mut p = ForecastPanel::new("m", "y", PanelForm::GrowthPct);
        p.insert(q("1991Q4"), path).unwrap();
        p
    }

    #[test]
    fn zero_growth_is_flat() {
        let out = growth_to_levels(&growth_panel(vec![0.0, 0.0, 0.0]), &anchor_series(100.0))
            .unwrap();
        assert_eq!(out.path(q("1991Q4")).unwrap(), &[100.0, 100.0, 100.0]);
        assert_eq!(out.form(), PanelForm::Level);
    }

    #[test]
    fn one_percent_compounds() {
        let out = growth_to_levels(&growth_panel(vec![1.0, 1.0]), &anchor_series(100.0)).unwrap();
        let path = out.path(q("1991Q4")).unwrap();
        assert_relative_eq!(path[0], 101.0, max_relative = 1e-12);
        assert_relative_eq!(path[1], 102.01, max_relative = 1e-12);
    }

    #[test]
    fn round_trip_recovers_growth() {
        let growth = vec![0.31, -1.2, 2.47, 0.0, 5.5];
        let out = growth_to_levels(&growth_panel(growth.clone()), &anchor_series(87.3)).unwrap();
        let path = out.path(q("1991Q4")).unwrap();
        let mut prev = 87.3;
        for (g, level) in growth.iter().zip(path) {
            let implied = (level / prev - 1.0) * 100.0;
            assert_relative_eq!(implied, *g, max_relative = 1e-10, epsilon = 1e-10);
            prev = *level;
        }
    }

    #[test]
    fn missing_anchor_is_an_error() {
        let mut p = ForecastPanel::new("m", "y", PanelForm::GrowthPct);
        p.insert(q("1993Q1"), vec![1.0]).unwrap();
        let err = growth_to_levels(&p, &anchor_series(100.0)).unwrap_err();
        assert!(matches!(err, Error::MissingAnchor { .. }), "got {err}");
    }

    #[test]
    fn growth_at_or_below_minus_hundred_rejected() {
        let err =
            growth_to_levels(&growth_panel(vec![-100.0]), &anchor_series(100.0)).unwrap_err();
        assert!(matches!(err, Error::GrowthOutOfRange { .. }), "got {err}");
    }

    #[test]
    fn annualized_flag_quarters_the_rate() {
        let mut p = ForecastPanel::new("m", "y", PanelForm::GrowthPct).with_annualized(true);
        p.insert(q("1991Q4"), vec![4.0]).unwrap();
        let out = growth_to_levels(&p, &anchor_series(100.0)).unwrap();
        // exp(ln(1.04)/4) per quarter.
        let expect = 100.0 * (1.04_f64.ln() / 4.0).exp();
        assert_relative_eq!(out.path(q("1991Q4")).unwrap()[0], expect, max_relative = 1e-12);
    }

    #[test]
    fn monotone_when_growth_positive() {
        let out = growth_to_levels(
            &growth_panel(vec![0.5, 0.01, 3.0, 0.2]),
            &anchor_series(42.0),
        )
        .unwrap();
        let path = out.path(q("1991Q4")).unwrap();
        assert!(path.windows(2).all(|w| w[1] > w[0]));
        assert!(path[0] > 42.0);
    }

    #[test]
    fn anchor_scales_out_exactly() {
        // The level path factors as anchor * cumulative-growth, so scaling
        // the anchor rescales the path bit-for-bit.
        let growth = vec![0.37, -0.9, 1.83];
        let unit = growth_to_levels(&growth_panel(growth.clone()), &anchor_series(1.0)).unwrap();
        let scaled = growth_to_levels(&growth_panel(growth), &anchor_series(250.5)).unwrap();
        for (u, s) in unit
            .path(q("1991Q4"))
            .unwrap()
            .iter()
            .zip(scaled.path(q("1991Q4")).unwrap())
        {
            assert_eq!(250.5 * u, *s); // exact, not approximate
        }
    }

    #[test]
    fn log_conversion_round_trips() {
        let mut p = ForecastPanel::new("m", "y", PanelForm::Level);
        p.insert(q("1991Q4"), vec![100.0, 95.5, 107.25]).unwrap();
        let logs = levels_to_log(&p).unwrap();
        assert_eq!(logs.form(), PanelForm::LogLevel);
        assert_relative_eq!(
            logs.path(q("1991Q4")).unwrap()[0],
            100.0_f64.ln(),
            max_relative = 1e-12
        );
        for (orig, back) in p
            .path(q("1991Q4"))
            .unwrap()
            .iter()
            .zip(logs.path(q("1991Q4")).unwrap().iter().map(|v| v.exp()))
        {
            assert_relative_eq!(*orig, back, max_relative = 1e-12);
        }
    }

    #[test]
    fn nonpositive_level_rejected() {
        let mut p = ForecastPanel::new("m", "y", PanelForm::Level);
        p.insert(q("1991Q4"), vec![100.0, -1.0]).unwrap();
        assert!(levels_to_log(&p).is_err());
    }
}
