//! Shared helpers for the integration suites: seeded data generators and an
//! independent normal-equations solver used as the OLS oracle.
#![allow(dead_code)] // each suite uses a different subset

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use encompass_core::{Quarter, Series64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(s: &str) -> Quarter {
    s.parse().unwrap()
}

/// Stationary AR(1) level series around `mean`, standard-normal shocks.
pub fn ar1_series(name: &str, start: &str, n: usize, mean: f64, phi: f64, sd: f64, seed: u64) -> Series64 {
    let mut r = rng(seed);
    let c = mean * (1.0 - phi);
    let mut vals = vec![mean];
    for _ in 1..n {
        let shock: f64 = StandardNormal.sample(&mut r);
        let prev = *vals.last().unwrap();
        vals.push(c + phi * prev + sd * shock);
    }
    Series64::new(name, q(start), vals.into_iter().map(Some).collect())
}

/// Strictly positive series: geometric random walk with drift.
pub fn positive_walk(name: &str, start: &str, n: usize, level: f64, drift: f64, sd: f64, seed: u64) -> Series64 {
    let mut r = rng(seed);
    let mut log_level = level.ln();
    let mut vals = Vec::with_capacity(n);
    for _ in 0..n {
        vals.push(Some(log_level.exp()));
        let shock: f64 = StandardNormal.sample(&mut r);
        log_level += drift + sd * shock;
    }
    Series64::new(name, q(start), vals)
}

/// Gaussian elimination with partial pivoting; the independent oracle for
/// every least-squares check (normal equations `X'X b = X'y`).
pub fn gauss_solve(a: &mut Vec<Vec<f64>>, b: &mut Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        assert!(a[col][col].abs() > 1e-300, "oracle: singular system");
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Solve OLS through explicit normal equations: the oracle route.
pub fn normal_equations_ols(design: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = design.len();
    let k = design[0].len();
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for t in 0..n {
        for i in 0..k {
            xty[i] += design[t][i] * y[t];
            for j in 0..k {
                xtx[i][j] += design[t][i] * design[t][j];
            }
        }
    }
    gauss_solve(&mut xtx, &mut xty)
}
