//! Monte Carlo validation: synthetic forecast pairs with a known
//! information structure, run through the encompassing regression.
//!
//! Each replication draws an artificial actual series and two forecast
//! panels, regresses the realized `s`-change on both forecast changes, and
//! the summary reports coefficient means, spreads, and t-test rejection
//! rates. Replication `r` uses RNG stream `r` of the master seed, so results
//! do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use encompass_core::panel::PanelForm;
use encompass_core::regress::{encompass, CovMethod};
use encompass_core::{Error, ForecastPanel64, Quarter, QuarterRange, Series64};

use crate::config::SimulateConfig;
use crate::CliError;

/// Relationship between the information sets behind the two forecasts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfoStructure {
    /// Model a sees the whole predictable part; model b sees a noisy subset
    /// of it. Expect beta near 1 and gamma near 0.
    AEncompassesB,
    /// Each model sees one of two independent signals, both weighted 0.5 in
    /// the truth. Expect beta and gamma both near 0.5.
    IndependentInfo,
    /// Model b's "information" is exactly model a's error, so conditional on
    /// a it contributes negatively. Expect gamma near -1.
    NegativeInfo,
    /// Neither forecast is informative. Expect the constant to recover the
    /// average s-period change.
    NoInformation,
    /// Model b duplicates model a bit-for-bit; the regression must refuse to
    /// identify beta and gamma separately.
    DuplicateForecast,
}

impl InfoStructure {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "a_encompasses_b" => Some(InfoStructure::AEncompassesB),
            "independent" => Some(InfoStructure::IndependentInfo),
            "negative" => Some(InfoStructure::NegativeInfo),
            "no_information" => Some(InfoStructure::NoInformation),
            "duplicate" => Some(InfoStructure::DuplicateForecast),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            InfoStructure::AEncompassesB => "a_encompasses_b",
            InfoStructure::IndependentInfo => "independent",
            InfoStructure::NegativeInfo => "negative",
            InfoStructure::NoInformation => "no_information",
            InfoStructure::DuplicateForecast => "duplicate",
        }
    }
}

/// One synthetic replication, ready for the regression.
pub struct SimInstance {
    pub actual: Series64,
    pub fa: ForecastPanel64,
    pub fb: ForecastPanel64,
    pub period: QuarterRange,
    /// Realized average s-period change over the targets.
    pub avg_change: f64,
}

/// Draw one replication of the data-generating process.
///
/// The `s`-change for each target is `mu + signal part + error`, where for
/// `s > 1` the error is an MA(s-1) sum of one-quarter shocks (the overlap
/// structure of multi-step forecast errors). Forecast paths carry the model
/// change at horizon `s`; shorter horizons are linear fill-ins.
pub fn generate(cfg: &SimulateConfig, rng: &mut ChaCha8Rng) -> SimInstance {
    let n = cfg.n;
    let s = cfg.s;
    let total = n + s;
    let start: Quarter = "1960Q1".parse().unwrap();
    let mut draw = || -> f64 { StandardNormal.sample(rng) };

    // One-quarter shocks for the MA(s-1) error.
    let shock_sd = cfg.error_sd / (s as f64).sqrt();
    let shocks: Vec<f64> = (0..total).map(|_| shock_sd * draw()).collect();
    let eps = |i: usize, shocks: &[f64]| -> f64 {
        if s == 1 {
            shocks[i] * (s as f64).sqrt() // = error_sd * shock
        } else {
            (0..s).map(|j| shocks[i - j]).sum()
        }
    };

    let mut d = vec![0.0; total];
    let mut xa = vec![0.0; total];
    let mut xb = vec![0.0; total];
    for i in s..total {
        let e = eps(i, &shocks);
        let mu = cfg.mean_change;
        match cfg.structure {
            InfoStructure::AEncompassesB => {
                let z = cfg.signal_sd * draw();
                let eta = cfg.noise_sd * draw();
                d[i] = mu + z + e;
                xa[i] = mu + z;
                xb[i] = mu + 0.7 * z + eta;
            }
            InfoStructure::IndependentInfo => {
                let z = cfg.signal_sd * draw();
                let v = cfg.signal_sd * draw();
                d[i] = mu + 0.5 * z + 0.5 * v + e;
                xa[i] = mu + z;
                xb[i] = mu + v;
            }
            InfoStructure::NegativeInfo => {
                let z = cfg.signal_sd * draw();
                let v = cfg.noise_sd * draw();
                let eta = cfg.noise_sd * draw();
                d[i] = mu + z + e;
                xa[i] = mu + z + v;
                xb[i] = mu + v + 0.1 * eta;
            }
            InfoStructure::NoInformation => {
                let z = cfg.signal_sd * draw();
                let v = cfg.signal_sd * draw();
                d[i] = mu + e;
                xa[i] = mu + z;
                xb[i] = mu + v;
            }
            InfoStructure::DuplicateForecast => {
                let z = cfg.signal_sd * draw();
                d[i] = mu + z + e;
                xa[i] = mu + z;
                xb[i] = xa[i];
            }
        }
    }

    // Actual log levels consistent with the generated s-changes.
    let mut levels = vec![0.0; total];
    for (k, level) in levels.iter_mut().enumerate().take(s) {
        *level = 10.0 + 0.01 * k as f64;
    }
    for i in s..total {
        levels[i] = levels[i - s] + d[i];
    }
    let actual = Series64::new("sim", start, levels.iter().copied().map(Some).collect())
        .assume_logs();

    let mut fa_panel = ForecastPanel64::new("a", "sim", PanelForm::LogLevel);
    let mut fb_panel = ForecastPanel64::new("b", "sim", PanelForm::LogLevel);
    for i in s..total {
        let origin = start.add((i - s) as i64);
        let anchor = levels[i - s];
        let mk_path = |change: f64| -> Vec<f64> {
            (1..=s)
                .map(|h| anchor + change * h as f64 / s as f64)
                .collect()
        };
        fa_panel.insert(origin, mk_path(xa[i])).unwrap();
        fb_panel.insert(origin, mk_path(xb[i])).unwrap();
    }

    let period = QuarterRange::new(start.add(s as i64), start.add(total as i64 - 1)).unwrap();
    let avg_change = d[s..].iter().sum::<f64>() / n as f64;

    SimInstance {
        actual,
        fa: fa_panel,
        fb: fb_panel,
        period,
        avg_change,
    }
}

/// Aggregated Monte Carlo output.
#[derive(Debug, Clone)]
pub struct SimSummary {
    pub structure: InfoStructure,
    pub reps: usize,
    /// Replications where the regression ran to completion.
    pub successes: usize,
    /// Replications rejected as not separately identified.
    pub identification_errors: usize,
    pub n: usize,
    pub s: usize,
    pub cov: CovMethod,
    pub lag: usize,
    /// Means of `[alpha, beta, gamma]` over successes.
    pub mean: [f64; 3],
    /// Standard deviations of `[alpha, beta, gamma]` over successes.
    pub sd: [f64; 3],
    /// Rates of `|t| > 1.96` over successes.
    pub reject: [f64; 3],
    pub mean_r2: f64,
    /// Mean over replications of the realized average s-period change.
    pub mean_avg_change: f64,
    pub seed: u64,
}

impl SimSummary {
    pub fn csv_header() -> &'static str {
        "structure,reps,successes,identification_errors,n,s,cov,lag,\
         mean_alpha,sd_alpha,mean_beta,sd_beta,mean_gamma,sd_gamma,\
         reject_alpha,reject_beta,reject_gamma,mean_r2,mean_avg_change,seed"
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.structure.as_str(),
            self.reps,
            self.successes,
            self.identification_errors,
            self.n,
            self.s,
            self.cov,
            self.lag,
            self.mean[0],
            self.sd[0],
            self.mean[1],
            self.sd[1],
            self.mean[2],
            self.sd[2],
            self.reject[0],
            self.reject[1],
            self.reject[2],
            self.mean_r2,
            self.mean_avg_change,
            self.seed,
        )
    }
}

/// Run the full Monte Carlo: `reps` independent replications, each on its
/// own RNG stream, merged in replication order.
pub fn run_simulation(cfg: &SimulateConfig, seed: u64) -> Result<SimSummary, CliError> {
    let lag = match cfg.cov {
        CovMethod::TruncatedHac | CovMethod::BartlettHac => cfg.s - 1,
        _ => 0,
    };

    let outcomes: Vec<(f64, Result<[f64; 7], Error>)> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(rep as u64);
            let inst = generate(cfg, &mut rng);
            let run = encompass(&inst.actual, &inst.fa, &inst.fb, cfg.s, inst.period, cfg.cov)
                .map(|r| {
                    [
                        r.alpha, r.beta, r.gamma, r.tstats[0], r.tstats[1], r.tstats[2], r.r2,
                    ]
                });
            (inst.avg_change, run)
        })
        .collect();

    let mut successes = 0usize;
    let mut identification_errors = 0usize;
    let mut sums = [0.0; 3];
    let mut sq_sums = [0.0; 3];
    let mut rejects = [0usize; 3];
    let mut r2_sum = 0.0;
    let mut avg_change_sum = 0.0;

    for (avg_change, outcome) in outcomes {
        avg_change_sum += avg_change;
        match outcome {
            Ok(values) => {
                successes += 1;
                for i in 0..3 {
                    sums[i] += values[i];
                    sq_sums[i] += values[i] * values[i];
                    if values[3 + i].abs() > 1.96 {
                        rejects[i] += 1;
                    }
                }
                r2_sum += values[6];
            }
            Err(Error::NotIdentified { .. }) => identification_errors += 1,
            Err(other) => {
                return Err(CliError::core(
                    format!("simulation replication ({})", cfg.structure.as_str()),
                    other,
                ))
            }
        }
    }

    let m = successes.max(1) as f64;
    let mut mean = [0.0; 3];
    let mut sd = [0.0; 3];
    let mut reject = [0.0; 3];
    for i in 0..3 {
        mean[i] = sums[i] / m;
        let var = (sq_sums[i] / m - mean[i] * mean[i]).max(0.0);
        sd[i] = var.sqrt();
        reject[i] = rejects[i] as f64 / m;
    }

    Ok(SimSummary {
        structure: cfg.structure,
        reps: cfg.reps,
        successes,
        identification_errors,
        n: cfg.n,
        s: cfg.s,
        cov: cfg.cov,
        lag,
        mean,
        sd,
        reject,
        mean_r2: r2_sum / m,
        mean_avg_change: avg_change_sum / cfg.reps as f64,
        seed,
    })
}
