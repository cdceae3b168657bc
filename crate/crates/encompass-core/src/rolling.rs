//! Expanding-window rolling estimation and forecasting.
//!
//! The estimation window has a fixed start quarter; only the end quarter
//! advances. Before each forecast origin the equation is re-fit on data
//! through that origin, so no future information enters the coefficients.

use std::collections::BTreeMap;

use crate::ar::{fit_ar, iterate_forecast, ArFit, ArSpec};
use crate::error::Error;
use crate::panel::{ForecastPanel, PanelForm};
use crate::quarter::{Quarter, QuarterRange};
use crate::scalar::Scalar;
use crate::series::Series;

/// Window-generation rule: fixed estimation start, advancing end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RollingScheme {
    /// First quarter of every estimation window.
    pub estimation_start: Quarter,
    /// End quarter of the first window (= first forecast origin).
    pub first_end: Quarter,
    /// End quarter of the last window (= last forecast origin).
    pub last_end: Quarter,
    /// Forecast steps per origin.
    pub horizon: usize,
}

impl RollingScheme {
    pub fn new(
        estimation_start: Quarter,
        first_end: Quarter,
        last_end: Quarter,
        horizon: usize,
    ) -> Result<Self, Error> {
        if estimation_start >= first_end {
            return Err(Error::BadScheme {
                detail: format!("estimation start {estimation_start} must precede first end {first_end}"),
            });
        }
        if first_end > last_end {
            return Err(Error::BadScheme {
                detail: format!("first end {first_end} must not be after last end {last_end}"),
            });
        }
        if horizon == 0 {
            return Err(Error::BadScheme {
                detail: "horizon must be at least 1".to_string(),
            });
        }
        Ok(RollingScheme {
            estimation_start,
            first_end,
            last_end,
            horizon,
        })
    }

    /// Number of forecast origins the scheme generates.
    pub fn origin_count(&self) -> usize {
        (self.first_end.distance(self.last_end) + 1) as usize
    }

    /// Iterate the estimation windows, one per origin.
    pub fn windows(&self) -> impl Iterator<Item = QuarterRange> + '_ {
        let start = self.estimation_start;
        let first = self.first_end;
        (0..self.origin_count() as i64).map(move |i| QuarterRange {
            start,
            end: first.add(i),
        })
    }
}

/// A rolling-forecast panel together with per-origin fit metadata.
#[derive(Debug, Clone)]
pub struct RollingForecasts<F> {
    /// Forecast paths keyed by origin, in the estimation space
    /// (`log_level` when the equation was fit on logs, `level` otherwise).
    pub panel: ForecastPanel<F>,
    /// Fitted equation per origin; the window end equals the origin.
    pub fits: BTreeMap<Quarter, ArFit<F>>,
}

impl<F: Scalar> RollingForecasts<F> {
    /// Check that no estimation window extends past its forecast origin.
    pub fn audit_no_future_information(&self) -> Result<(), Error> {
        for (origin, fit) in &self.fits {
            if fit.window.end != *origin {
                return Err(Error::FutureInformation {
                    origin: *origin,
                    window_end: fit.window.end,
                });
            }
        }
        Ok(())
    }
}

/// Produce expanding-window forecasts for every origin in the scheme.
///
/// For each end quarter `e` from `first_end` to `last_end` the equation is
/// re-fit on `[estimation_start, e]` and iterated forward `horizon` steps.
/// Forecast targets past the end of the data are still produced; evaluation
/// truncates to available actuals later. When `spec.use_logs` is set the
/// series is logged first and the panel comes back in `log_level` form.
pub fn rolling_forecasts<F: Scalar>(
    series: &Series<F>,
    spec: &ArSpec,
    scheme: &RollingScheme,
) -> Result<RollingForecasts<F>, Error> {
    let (working, form) = if spec.use_logs {
        (series.to_logs()?, PanelForm::LogLevel)
    } else {
        (series.clone(), PanelForm::Level)
    };

    let mut panel = ForecastPanel::new("", working.name(), form);
    let mut fits = BTreeMap::new();
    for window in scheme.windows() {
        let origin = window.end;
        let fit = fit_ar(&working, spec, window)?;
        let history_window = QuarterRange {
            start: origin.add(-(spec.p as i64) + 1),
            end: origin,
        };
        let history = working.window_values(history_window)?;
        let path = iterate_forecast(&fit, &history, scheme.horizon);
        panel.insert(origin, path)?;
        fits.insert(origin, fit);
    }
    Ok(RollingForecasts { panel, fits })
}

/// Rename the panel of a rolling run (panels start with an empty model name).
pub fn label_panel<F: Scalar>(run: RollingForecasts<F>, model: &str) -> RollingForecasts<F> {
    let mut panel = ForecastPanel::new(model, run.panel.variable(), run.panel.form());
    for (origin, path) in run.panel.iter() {
        panel.insert(origin, path.to_vec()).expect("copy of valid panel");
    }
    RollingForecasts {
        panel,
        fits: run.fits,
    }
}
