//! The encompassing regression and its robust covariance estimators.
//!
//! For an `s`-quarter horizon the design regresses the actual `s`-change on
//! the two forecast changes over a common target period:
//!
//! ```text
//! y_t - y_{t-s} = alpha + beta (a_t - y_{t-s}) + gamma (b_t - y_{t-s}) + u_t
//! ```
//!
//! where `a_t`, `b_t` are the horizon-`s` log-level forecasts made at `t-s`.
//! Overlapping horizons make `u_t` an MA(s-1) process, so the coefficient
//! covariance is estimated by a truncated or Bartlett-weighted HAC sandwich;
//! with `s = 1` the truncated estimator reduces to White's correction.

use std::fmt;


use crate::error::Error;
use crate::linalg::{lsq_solve, DMat, LinalgError};
use crate::panel::{ForecastPanel, PanelForm};
use crate::quarter::{Quarter, QuarterRange};
use crate::scalar::Scalar;
use crate::series::Series;
use crate::RANK_TOL;

/// Coefficient-covariance estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovMethod {
    /// Heteroskedasticity-only correction (the truncated estimator at lag 0).
    White,
    /// Unweighted HAC: every lag up to `L` enters with weight 1.
    TruncatedHac,
    /// Bartlett-weighted HAC: lag `j` enters with weight `1 - j/(L+1)`.
    BartlettHac,
    /// Classical OLS covariance `s^2 (X'X)^-1`, no robustness adjustment.
    PlainOls,
}

impl CovMethod {
    pub fn parse(text: &str) -> Result<Self, Error> {
        match text {
            "white" => Ok(CovMethod::White),
            "truncated_hac" => Ok(CovMethod::TruncatedHac),
            "bartlett_hac" => Ok(CovMethod::BartlettHac),
            "plain_ols" => Ok(CovMethod::PlainOls),
            other => Err(Error::UnknownForm {
                text: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for CovMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CovMethod::White => "white",
            CovMethod::TruncatedHac => "truncated_hac",
            CovMethod::BartlettHac => "bartlett_hac",
            CovMethod::PlainOls => "plain_ols",
        };
        f.write_str(s)
    }
}

/// One usable target quarter of the design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignRow<F> {
    /// Target quarter `t`.
    pub target: Quarter,
    /// Actual change `y_t - y_{t-s}`.
    pub y: F,
    /// Model-a forecast change `a_t - y_{t-s}`.
    pub xa: F,
    /// Model-b forecast change `b_t - y_{t-s}`.
    pub xb: F,
}

/// Assembled regression data for one horizon.
#[derive(Debug, Clone)]
pub struct RegressionData<F> {
    /// Forecast horizon in quarters.
    pub s: usize,
    /// Rows sorted by target quarter.
    pub rows: Vec<DesignRow<F>>,
    /// Targets inside the requested period that failed an availability
    /// condition (missing actual, absent origin, or short path).
    pub dropped: usize,
    /// The requested target period.
    pub period: QuarterRange,
}

impl<F: Scalar> RegressionData<F> {
    /// First and last target quarters actually used.
    pub fn realized_range(&self) -> Option<QuarterRange> {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => Some(QuarterRange {
                start: a.target,
                end: b.target,
            }),
            _ => None,
        }
    }

    fn design_matrix(&self) -> DMat<F> {
        let rows: Vec<Vec<F>> = self
            .rows
            .iter()
            .map(|r| vec![F::one(), r.xa, r.xb])
            .collect();
        DMat::from_rows(&rows)
    }
}

/// Build the regression rows for horizon `s` over a target period.
///
/// A target `t` is usable when the actual log level is present at `t` and
/// `t-s` and both panels contain origin `t-s` with a path reaching horizon
/// `s`. Remaining targets inside the period are counted in `dropped`.
pub fn build_design<F: Scalar>(
    actual: &Series<F>,
    fa: &ForecastPanel<F>,
    fb: &ForecastPanel<F>,
    s: usize,
    period: QuarterRange,
) -> Result<RegressionData<F>, Error> {
    if !actual.in_logs() {
        return Err(Error::FormMismatch {
            model: "actual".to_string(),
            variable: actual.name().to_string(),
            expected: "log series".to_string(),
            got: "level series".to_string(),
        });
    }
    for panel in [fa, fb] {
        if panel.form() != PanelForm::LogLevel {
            return Err(Error::FormMismatch {
                model: panel.model().to_string(),
                variable: panel.variable().to_string(),
                expected: PanelForm::LogLevel.to_string(),
                got: panel.form().to_string(),
            });
        }
    }
    assert!(s >= 1, "horizon must be at least 1");

    let mut rows = Vec::new();
    let mut dropped = 0usize;
    for target in period.iter() {
        let origin = target.add(-(s as i64));
        let ingredients = (
            actual.value_at(target),
            actual.value_at(origin),
            fa.value_at(origin, s),
            fb.value_at(origin, s),
        );
        match ingredients {
            (Some(y1), Some(y0), Some(a), Some(b)) => rows.push(DesignRow {
                target,
                y: y1 - y0,
                xa: a - y0,
                xb: b - y0,
            }),
            _ => dropped += 1,
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyDesign {
            period: period.to_string(),
        });
    }
    Ok(RegressionData {
        s,
        rows,
        dropped,
        period,
    })
}

/// OLS fit of the three-coefficient design.
#[derive(Debug, Clone)]
pub struct Ols3Fit<F> {
    /// `[alpha, beta, gamma]`.
    pub coeffs: [F; 3],
    /// Residuals in row order.
    pub residuals: Vec<F>,
    /// Regression standard error `sqrt(u'u / (n - 3))`, in units of `y`.
    pub se_regression: F,
    /// Centered R-squared.
    pub r2: F,
}

const COEFF_NAMES: [&str; 3] = ["alpha", "beta", "gamma"];

fn name_collinear_pair(null_vector: &[f64]) -> (&'static str, &'static str) {
    // The two largest components of the null direction name the pair that
    // cannot be told apart.
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| {
        null_vector[b]
            .abs()
            .partial_cmp(&null_vector[a].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let (mut i, mut j) = (idx[0], idx[1]);
    if i > j {
        std::mem::swap(&mut i, &mut j);
    }
    (COEFF_NAMES[i], COEFF_NAMES[j])
}

/// Estimate the design by least squares.
///
/// Errors when the design is too small, when the target has zero variance,
/// or when the regressors are not separately identified (for instance two
/// perfectly correlated forecast columns).
pub fn ols3<F: Scalar>(data: &RegressionData<F>) -> Result<Ols3Fit<F>, Error> {
    let n = data.rows.len();
    if n < 5 {
        return Err(Error::TooFewRows { rows: n, min: 5 });
    }
    let x = data.design_matrix();
    let y: Vec<F> = data.rows.iter().map(|r| r.y).collect();

    let ls = lsq_solve(&x, &y, RANK_TOL).map_err(|e| match e {
        LinalgError::RankDeficient { ratio, null_vector } => {
            let (first, second) = name_collinear_pair(&null_vector);
            Error::NotIdentified { first, second, ratio }
        }
        LinalgError::Underdetermined { rows, .. } => Error::TooFewRows { rows, min: 5 },
    })?;

    let coeffs = [ls.coeffs[0], ls.coeffs[1], ls.coeffs[2]];
    let residuals: Vec<F> = data
        .rows
        .iter()
        .map(|r| r.y - (coeffs[0] + coeffs[1] * r.xa + coeffs[2] * r.xb))
        .collect();

    let rss = residuals.iter().map(|u| *u * *u).sum::<F>();
    let mean_y = y.iter().copied().sum::<F>() / F::from_count(n);
    let tss = y.iter().map(|v| (*v - mean_y) * (*v - mean_y)).sum::<F>();
    if tss == F::zero() {
        return Err(Error::DegenerateTarget);
    }

    Ok(Ols3Fit {
        coeffs,
        residuals,
        se_regression: (rss / F::from_count(n - 3)).sqrt(),
        r2: F::one() - rss / tss,
    })
}

/// A 3x3 coefficient covariance estimate.
#[derive(Debug, Clone)]
pub struct CovEstimate<F> {
    /// Symmetric covariance matrix in `[alpha, beta, gamma]` order.
    pub matrix: [[F; 3]; 3],
    /// Estimator actually applied.
    pub method: CovMethod,
    /// Lag depth used (0 for White and plain OLS).
    pub lag: usize,
    /// Set when the truncated mid-matrix came out non-positive-semidefinite;
    /// diagonal t-statistics usually survive, Bartlett weights avoid it.
    pub non_psd: bool,
}

/// Sandwich (or classical) covariance of the OLS coefficients.
///
/// For the robust methods the mid-matrix is
///
/// ```text
/// S = G_0 + sum_{j=1..L} w_j (G_j + G_j'),
/// G_j = sum_t u_t u_{t-j} x_t x_{t-j}'
/// ```
///
/// with `w_j = 1` (truncated) or `w_j = 1 - j/(L+1)` (Bartlett), and the
/// covariance is `(X'X)^-1 S (X'X)^-1`. Lags are counted in row order;
/// designs with interior gaps should use `PlainOls` instead. White forces
/// `L = 0`. Plain OLS returns `s^2 (X'X)^-1` with `s^2 = u'u/(n-3)`.
pub fn robust_cov<F: Scalar>(
    data: &RegressionData<F>,
    residuals: &[F],
    method: CovMethod,
    lag: usize,
) -> Result<CovEstimate<F>, Error> {
    let n = data.rows.len();
    assert_eq!(residuals.len(), n, "residuals must match the design rows");
    let lag = match method {
        CovMethod::White | CovMethod::PlainOls => 0,
        _ => lag,
    };
    if lag >= n {
        return Err(Error::LagTooLarge { lag, rows: n });
    }

    let x = data.design_matrix();
    let zeros = vec![F::zero(); n];
    let ls = lsq_solve(&x, &zeros, RANK_TOL).map_err(|e| match e {
        LinalgError::RankDeficient { ratio, null_vector } => {
            let (first, second) = name_collinear_pair(&null_vector);
            Error::NotIdentified { first, second, ratio }
        }
        LinalgError::Underdetermined { rows, .. } => Error::TooFewRows { rows, min: 5 },
    })?;
    let xtx_inv = ls.xtx_inv;

    let mut non_psd = false;
    let v = match method {
        CovMethod::PlainOls => {
            let rss = residuals.iter().map(|u| *u * *u).sum::<F>();
            let sigma2 = rss / F::from_count(n - 3);
            let mut v = DMat::zeros(3, 3);
            for i in 0..3 {
                for j in 0..3 {
                    *v.at_mut(i, j) = sigma2 * xtx_inv.at(i, j);
                }
            }
            v
        }
        CovMethod::White | CovMethod::TruncatedHac | CovMethod::BartlettHac => {
            let mut s_mid = DMat::zeros(3, 3);
            // Lag 0: sum of u_t^2 x_t x_t'.
            for (t, row) in data.rows.iter().enumerate() {
                let xt = [F::one(), row.xa, row.xb];
                let w = residuals[t] * residuals[t];
                for i in 0..3 {
                    for j in 0..3 {
                        *s_mid.at_mut(i, j) = s_mid.at(i, j) + w * xt[i] * xt[j];
                    }
                }
            }
            for j_lag in 1..=lag {
                let weight = match method {
                    CovMethod::BartlettHac => {
                        F::one() - F::from_count(j_lag) / F::from_count(lag + 1)
                    }
                    _ => F::one(),
                };
                let mut gamma = DMat::<F>::zeros(3, 3);
                for t in j_lag..n {
                    let rt = &data.rows[t];
                    let rl = &data.rows[t - j_lag];
                    let xt = [F::one(), rt.xa, rt.xb];
                    let xl = [F::one(), rl.xa, rl.xb];
                    let w = residuals[t] * residuals[t - j_lag];
                    for i in 0..3 {
                        for j in 0..3 {
                            *gamma.at_mut(i, j) = gamma.at(i, j) + w * xt[i] * xl[j];
                        }
                    }
                }
                for i in 0..3 {
                    for j in 0..3 {
                        *s_mid.at_mut(i, j) =
                            s_mid.at(i, j) + weight * (gamma.at(i, j) + gamma.at(j, i));
                    }
                }
            }
            if method == CovMethod::TruncatedHac && lag > 0 {
                non_psd = !is_psd(&s_mid);
            }
            xtx_inv.matmul(&s_mid).matmul(&xtx_inv)
        }
    };

    // Enforce exact symmetry (the product can drift by an ulp).
    let mut matrix = [[F::zero(); 3]; 3];
    let half = F::from_f64_lit(0.5);
    for i in 0..3 {
        for j in 0..3 {
            matrix[i][j] = (v.at(i, j) + v.at(j, i)) * half;
        }
    }

    Ok(CovEstimate {
        matrix,
        method,
        lag,
        non_psd,
    })
}

/// Cholesky-based PSD probe with a relative pivot tolerance.
fn is_psd<F: Scalar>(m: &DMat<F>) -> bool {
    let k = m.nrows();
    let mut a = m.clone();
    let mut scale = F::zero();
    for i in 0..k {
        scale = scale.max(a.at(i, i).abs());
    }
    if scale == F::zero() {
        return true; // zero matrix
    }
    let tol = -F::from_f64_lit(1e-10) * scale;
    for j in 0..k {
        let mut pivot = a.at(j, j);
        for p in 0..j {
            pivot = pivot - a.at(j, p) * a.at(j, p);
        }
        if pivot < tol {
            return false;
        }
        let pivot = pivot.max(F::zero()).sqrt();
        *a.at_mut(j, j) = pivot;
        for i in (j + 1)..k {
            let mut v = a.at(i, j);
            for p in 0..j {
                v = v - a.at(i, p) * a.at(j, p);
            }
            *a.at_mut(i, j) = if pivot > F::zero() { v / pivot } else { F::zero() };
        }
    }
    true
}

/// Full output of one encompassing comparison cell.
#[derive(Debug, Clone)]
pub struct EncompassResult<F> {
    pub alpha: F,
    pub beta: F,
    pub gamma: F,
    /// `[t(alpha), t(beta), t(gamma)]`.
    pub tstats: [F; 3],
    /// Regression standard error in units of the log change.
    pub se_regression: F,
    pub r2: F,
    pub nobs: usize,
    pub cov_method: CovMethod,
    /// HAC lag depth used.
    pub lag: usize,
    /// Targets in the requested period that were dropped for missing data.
    pub dropped: usize,
    /// First and last target quarters used.
    pub sample: QuarterRange,
    /// Non-fatal estimation warning (non-PSD truncated mid-matrix).
    pub warning: Option<String>,
}

/// Run the full comparison for one horizon: design, OLS, covariance,
/// t-statistics.
///
/// The HAC lag is `s - 1`; `White` and `PlainOls` use no lags. Missing-data
/// designs (dropped targets) are fine for plain OLS, which is how sparse
/// forecast sets are handled.
pub fn encompass<F: Scalar>(
    actual: &Series<F>,
    fa: &ForecastPanel<F>,
    fb: &ForecastPanel<F>,
    s: usize,
    period: QuarterRange,
    method: CovMethod,
) -> Result<EncompassResult<F>, Error> {
    let data = build_design(actual, fa, fb, s, period)?;
    let fit = ols3(&data)?;
    let lag = match method {
        CovMethod::TruncatedHac | CovMethod::BartlettHac => s - 1,
        CovMethod::White | CovMethod::PlainOls => 0,
    };
    let cov = robust_cov(&data, &fit.residuals, method, lag)?;

    let mut tstats = [F::zero(); 3];
    for i in 0..3 {
        tstats[i] = fit.coeffs[i] / cov.matrix[i][i].sqrt();
    }
    let warning = cov.non_psd.then(|| {
        format!(
            "truncated HAC mid-matrix not positive semidefinite at lag {}; consider bartlett_hac",
            cov.lag
        )
    });

    Ok(EncompassResult {
        alpha: fit.coeffs[0],
        beta: fit.coeffs[1],
        gamma: fit.coeffs[2],
        tstats,
        se_regression: fit.se_regression,
        r2: fit.r2,
        nobs: data.rows.len(),
        cov_method: cov.method,
        lag: cov.lag,
        dropped: data.dropped,
        sample: data.realized_range().expect("nonempty design"),
        warning,
    })
}

/// Root mean squared error of a forecast panel against actuals.
///
/// Targets are matched exactly as in [`build_design`], restricted to the one
/// panel: the actual must be present at `t` and `t-s` and the panel must
/// reach horizon `s` from origin `t-s`. The panel and the actual series must
/// live in the same space (both log or both level).
pub fn rmse<F: Scalar>(
    panel: &ForecastPanel<F>,
    actual: &Series<F>,
    s: usize,
    period: QuarterRange,
) -> Result<F, Error> {
    let compatible = matches!(
        (panel.form(), actual.in_logs()),
        (PanelForm::LogLevel, true) | (PanelForm::Level, false)
    );
    if !compatible {
        return Err(Error::FormMismatch {
            model: panel.model().to_string(),
            variable: panel.variable().to_string(),
            expected: if actual.in_logs() {
                PanelForm::LogLevel.to_string()
            } else {
                PanelForm::Level.to_string()
            },
            got: panel.form().to_string(),
        });
    }
    let mut sum_sq = F::zero();
    let mut count = 0usize;
    for target in period.iter() {
        let origin = target.add(-(s as i64));
        if let (Some(actual_t), Some(_anchor), Some(forecast)) = (
            actual.value_at(target),
            actual.value_at(origin),
            panel.value_at(origin, s),
        ) {
            let e = forecast - actual_t;
            sum_sq = sum_sq + e * e;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::NoMatchedTargets {
            period: period.to_string(),
        });
    }
    Ok((sum_sq / F::from_count(count)).sqrt())
}
