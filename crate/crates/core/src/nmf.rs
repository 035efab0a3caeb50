//! Heuristic upper bounds on the nonnegative rank by seeded multi-restart NMF.
//!
//! Each restart runs alternating nonnegative least squares (a few projected
//! Gauss–Seidel sweeps per factor per iteration) and falls back to
//! multiplicative updates if the residual turns non-finite or blows up. A
//! restart succeeds when the max-entry residual drops to `fit_tol`. A failed
//! search is only evidence: it never certifies a lower bound.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matcore::FloatMatrix;
use crate::nnfactor::NonnegFactorization;

pub const DEFAULT_ITERS: usize = 500;
pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_FIT_TOL: f64 = 1e-9;

/// How often (in iterations) the max-entry residual is checked.
const CHECK_EVERY: usize = 10;
/// Gauss–Seidel sweeps per factor per iteration.
const INNER_SWEEPS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub k: usize,
    /// Clamped witness from the lowest-index successful restart.
    pub witness: Option<NonnegFactorization<f64>>,
    /// Max-entry residual of the returned witness, or the best over all
    /// restarts when none succeeded.
    pub residual: f64,
    pub restart: Option<usize>,
}

/// Searches for `T ≈ LR` with inner dimension `k` and max-entry residual at
/// most `fit_tol`.
pub fn search_upper(
    t: &FloatMatrix,
    k: usize,
    restarts: usize,
    seed: u64,
    fit_tol: f64,
    iters: usize,
) -> Result<SearchReport> {
    t.require_nonnegative()?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    if !(fit_tol > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("fit tolerance must be positive, got {fit_tol}")));
    }
    let mut best = f64::INFINITY;
    for restart in 0..restarts {
        let (l, r, res) = run_restart(t, k, seed, restart as u64, fit_tol, iters);
        if res <= fit_tol {
            let (m, n) = t.shape();
            let f = NonnegFactorization::from_raw_clamped(FloatMatrix::new(m, k, l)?, FloatMatrix::new(k, n, r)?, 0.0)?;
            let residual = f.residual(t)?;
            if residual <= 2.0 * fit_tol {
                return Ok(SearchReport { k, witness: Some(f), residual, restart: Some(restart) });
            }
        }
        best = best.min(res);
    }
    Ok(SearchReport { k, witness: None, residual: best, restart: None })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinKReport {
    pub k_best: Option<usize>,
    pub witness: Option<NonnegFactorization<f64>>,
    /// One report per `k` tried, in scan order.
    pub scanned: Vec<SearchReport>,
}

/// Smallest `k` in `[k_lo, k_hi]` at which [`search_upper`] succeeds, by a
/// linear upward scan. The zero matrix fits at `k_lo` with zero factors.
pub fn min_k_search(
    t: &FloatMatrix,
    k_lo: usize,
    k_hi: usize,
    restarts: usize,
    seed: u64,
    fit_tol: f64,
    iters: usize,
) -> Result<MinKReport> {
    t.require_nonnegative()?;
    if k_lo > k_hi {
        return Err(Error::InvalidParameter(alloc::format!("empty range [{k_lo}, {k_hi}]")));
    }
    let (m, n) = t.shape();
    if t.is_zero() {
        let f = NonnegFactorization::new(FloatMatrix::zeros(m, k_lo), FloatMatrix::zeros(k_lo, n))?;
        return Ok(MinKReport { k_best: Some(k_lo), witness: Some(f), scanned: Vec::new() });
    }
    let mut scanned = Vec::new();
    for k in k_lo.max(1)..=k_hi {
        let rep = search_upper(t, k, restarts, seed, fit_tol, iters)?;
        let found = rep.witness.clone();
        scanned.push(rep);
        if found.is_some() {
            return Ok(MinKReport { k_best: Some(k), witness: found, scanned });
        }
    }
    Ok(MinKReport { k_best: None, witness: None, scanned })
}

fn run_restart(t: &FloatMatrix, k: usize, seed: u64, restart: u64, fit_tol: f64, iters: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let (m, n) = t.shape();
    let a = t.entries();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart);
    let mean = a.iter().sum::<f64>() / (m * n) as f64;
    let scale = libm::sqrt(mean / k as f64);
    let mut draw = || (1.0 - rng.random::<f64>()) * scale;
    let mut l: Vec<f64> = (0..m * k).map(|_| draw()).collect();
    let mut r: Vec<f64> = (0..k * n).map(|_| draw()).collect();

    let mut res = residual(a, &l, &r, m, n, k);
    let mut multiplicative = false;
    let blowup = 1e6 * (1.0 + res);
    for it in 1..=iters {
        if multiplicative {
            mu_step(a, &mut l, &mut r, m, n, k);
        } else {
            hals_step(a, &mut l, &mut r, m, n, k);
        }
        if it % CHECK_EVERY == 0 || it == iters {
            let now = residual(a, &l, &r, m, n, k);
            if !multiplicative && !(now.is_finite() && now <= blowup) {
                // restart the factors from the draw and switch schemes
                l.iter_mut().for_each(|x| *x = draw());
                r.iter_mut().for_each(|x| *x = draw());
                multiplicative = true;
                res = residual(a, &l, &r, m, n, k);
                continue;
            }
            res = now;
            if res <= fit_tol {
                break;
            }
        }
    }
    (l, r, if res.is_finite() { res } else { f64::INFINITY })
}

fn residual(a: &[f64], l: &[f64], r: &[f64], m: usize, n: usize, k: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in 0..n {
            let p: f64 = (0..k).map(|q| l[i * k + q] * r[q * n + j]).sum();
            let d = (p - a[i * n + j]).abs();
            if !(d <= worst) {
                worst = d;
            }
        }
    }
    worst
}

/// Approximate nonnegative least squares for `L` with `R` fixed, then for
/// `R` with `L` fixed, each by projected Gauss–Seidel over factor columns
/// (rows). Column/row scales are balanced afterwards.
fn hals_step(a: &[f64], l: &mut [f64], r: &mut [f64], m: usize, n: usize, k: usize) {
    // L update: needs A Rᵀ (m×k) and R Rᵀ (k×k).
    let mut art = vec![0.0; m * k];
    for i in 0..m {
        for q in 0..k {
            art[i * k + q] = (0..n).map(|j| a[i * n + j] * r[q * n + j]).sum();
        }
    }
    let mut rrt = vec![0.0; k * k];
    for p in 0..k {
        for q in 0..k {
            rrt[p * k + q] = (0..n).map(|j| r[p * n + j] * r[q * n + j]).sum();
        }
    }
    for _ in 0..INNER_SWEEPS {
        for q in 0..k {
            let d = rrt[q * k + q];
            if d <= 0.0 {
                continue;
            }
            for i in 0..m {
                let lr: f64 = (0..k).map(|p| l[i * k + p] * rrt[p * k + q]).sum();
                l[i * k + q] = (l[i * k + q] + (art[i * k + q] - lr) / d).max(0.0);
            }
        }
    }
    // R update: needs Lᵀ A (k×n) and Lᵀ L (k×k).
    let mut lta = vec![0.0; k * n];
    for q in 0..k {
        for j in 0..n {
            lta[q * n + j] = (0..m).map(|i| l[i * k + q] * a[i * n + j]).sum();
        }
    }
    let mut ltl = vec![0.0; k * k];
    for p in 0..k {
        for q in 0..k {
            ltl[p * k + q] = (0..m).map(|i| l[i * k + p] * l[i * k + q]).sum();
        }
    }
    for _ in 0..INNER_SWEEPS {
        for q in 0..k {
            let d = ltl[q * k + q];
            if d <= 0.0 {
                continue;
            }
            for j in 0..n {
                let lr: f64 = (0..k).map(|p| ltl[q * k + p] * r[p * n + j]).sum();
                r[q * n + j] = (r[q * n + j] + (lta[q * n + j] - lr) / d).max(0.0);
            }
        }
    }
    balance(l, r, m, n, k);
}

fn mu_step(a: &[f64], l: &mut [f64], r: &mut [f64], m: usize, n: usize, k: usize) {
    const EPS: f64 = 1e-300;
    let mut lr = vec![0.0; m * n];
    let product = |l: &[f64], r: &[f64], lr: &mut [f64]| {
        for i in 0..m {
            for j in 0..n {
                lr[i * n + j] = (0..k).map(|q| l[i * k + q] * r[q * n + j]).sum();
            }
        }
    };
    product(l, r, &mut lr);
    for i in 0..m {
        for q in 0..k {
            let num: f64 = (0..n).map(|j| a[i * n + j] * r[q * n + j]).sum();
            let den: f64 = (0..n).map(|j| lr[i * n + j] * r[q * n + j]).sum();
            l[i * k + q] *= num / (den + EPS);
        }
    }
    product(l, r, &mut lr);
    for q in 0..k {
        for j in 0..n {
            let num: f64 = (0..m).map(|i| l[i * k + q] * a[i * n + j]).sum();
            let den: f64 = (0..m).map(|i| l[i * k + q] * lr[i * n + j]).sum();
            r[q * n + j] *= num / (den + EPS);
        }
    }
    balance(l, r, m, n, k);
}

/// Rescales column `q` of `L` and row `q` of `R` to equal Euclidean norms.
fn balance(l: &mut [f64], r: &mut [f64], m: usize, n: usize, k: usize) {
    for q in 0..k {
        let nl = libm::sqrt((0..m).map(|i| l[i * k + q] * l[i * k + q]).sum());
        let nr = libm::sqrt((0..n).map(|j| r[q * n + j] * r[q * n + j]).sum());
        if nl > 0.0 && nr > 0.0 {
            let s = libm::sqrt(nr / nl);
            (0..m).for_each(|i| l[i * k + q] *= s);
            (0..n).for_each(|j| r[q * n + j] /= s);
        }
    }
}
