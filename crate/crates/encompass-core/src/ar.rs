//! AR(p) estimation by OLS and iterated multi-step forecasting.

use crate::error::Error;
use crate::linalg::{lsq_solve, DMat, LinalgError};
use crate::quarter::QuarterRange;
use crate::scalar::Scalar;
use crate::series::Series;
use crate::RANK_TOL;

/// Specification of a single autoregressive equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArSpec {
    /// Lag order, `p >= 1`.
    pub p: usize,
    /// Estimate on the log of the series rather than the level.
    pub use_logs: bool,
    /// Include a constant term. Always true in this toolkit.
    pub include_constant: bool,
}

impl ArSpec {
    /// The usual fourth-order equation with a constant.
    pub fn ar4(use_logs: bool) -> Self {
        ArSpec {
            p: 4,
            use_logs,
            include_constant: true,
        }
    }

    pub fn new(p: usize, use_logs: bool) -> Self {
        assert!(p >= 1, "lag order must be at least 1");
        ArSpec {
            p,
            use_logs,
            include_constant: true,
        }
    }

    /// Minimum window length for a nondegenerate fit: `p` starting lags plus
    /// at least `p + 2` estimation rows.
    pub fn min_window(&self) -> usize {
        2 * self.p + 2
    }
}

/// A fitted AR equation over one estimation window.
#[derive(Debug, Clone, PartialEq)]
pub struct ArFit<F> {
    /// Constant term.
    pub constant: F,
    /// Lag coefficients, `phi[0]` multiplying the first lag.
    pub phi: Vec<F>,
    /// Estimation window (the first `p` quarters provide starting lags).
    pub window: QuarterRange,
    /// Estimation rows used: window length minus `p`.
    pub nobs: usize,
}

impl<F: Scalar> ArFit<F> {
    pub fn order(&self) -> usize {
        self.phi.len()
    }

    /// Long-run mean `c / (1 - sum(phi))` of a stable fit.
    pub fn long_run_mean(&self) -> F {
        let phi_sum = self.phi.iter().copied().fold(F::zero(), |a, b| a + b);
        self.constant / (F::one() - phi_sum)
    }
}

/// Fit an AR(p) by OLS of `x_t` on `[1, x_{t-1}, ..., x_{t-p}]`.
///
/// Rows run over the window quarters whose `p` lags also lie inside the
/// window, so `nobs = window length - p`. The window must be fully observed.
pub fn fit_ar<F: Scalar>(
    series: &Series<F>,
    spec: &ArSpec,
    window: QuarterRange,
) -> Result<ArFit<F>, Error> {
    let min = spec.min_window();
    if window.len() < min {
        return Err(Error::WindowTooShort {
            window: window.to_string(),
            nobs: window.len(),
            min,
        });
    }
    let values = series.window_values(window)?;
    let p = spec.p;
    let nobs = values.len() - p;

    let mut rows = Vec::with_capacity(nobs);
    let mut y = Vec::with_capacity(nobs);
    for t in p..values.len() {
        let mut row = Vec::with_capacity(p + 1);
        row.push(F::one());
        for lag in 1..=p {
            row.push(values[t - lag]);
        }
        rows.push(row);
        y.push(values[t]);
    }
    let x = DMat::from_rows(&rows);

    let fit = lsq_solve(&x, &y, RANK_TOL).map_err(|e| match e {
        LinalgError::RankDeficient { ratio, .. } => Error::Collinear {
            window: window.to_string(),
            ratio,
        },
        LinalgError::Underdetermined { rows, .. } => Error::WindowTooShort {
            window: window.to_string(),
            nobs: rows,
            min,
        },
    })?;

    Ok(ArFit {
        constant: fit.coeffs[0],
        phi: fit.coeffs[1..].to_vec(),
        window,
        nobs,
    })
}

/// Iterate a fitted AR forward `horizon` steps.
///
/// `history` holds the last `p` observed values in time order (oldest first).
/// One-step predictions are fed back in as the actuals run out.
pub fn iterate_forecast<F: Scalar>(fit: &ArFit<F>, history: &[F], horizon: usize) -> Vec<F> {
    let p = fit.order();
    assert_eq!(
        history.len(),
        p,
        "history must hold exactly p values (oldest first)"
    );
    let mut buf: Vec<F> = history.to_vec();
    let mut path = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let mut next = fit.constant;
        for (lag, coeff) in fit.phi.iter().enumerate() {
            next = next + *coeff * buf[buf.len() - 1 - lag];
        }
        path.push(next);
        buf.push(next);
    }
    path
}
