//! The integral operator `(Sf)(s) = ∫ f(t)(1 + cos(s − t)) dt` on `[0, 2π)`.
//!
//! `S` has rank three: `Sf = a cos s + b sin s + c` where `(a, b, c)` are the
//! first trigonometric moments of `f`. Nonnegative `f` map exactly onto the
//! interior of the ice-cream cone `c > √(a² + b²)` plus the origin, and every
//! interior point has an explicit nonnegative preimage built from two Poisson
//! kernel bumps. Discretizing the kernel gives the matrices `K_n` whose
//! nonnegative rank the growth experiment tracks.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{acos, atan2, cos, sin};

use crate::error::{Error, Result};
use crate::matcore::{rank_float, sample_kernel, AnyMatrix, GridSpec, DEFAULT_RANK_TOL};
use crate::nmf::{min_k_search, search_upper, DEFAULT_FIT_TOL, DEFAULT_RESTARTS};
use crate::rank3geo::nnrank_rank3;

/// Radii must clear `R/c` by this margin so the two Poisson bumps stay apart.
pub const RADIUS_MARGIN: f64 = 1e-6;
/// Default grid size for moment checks.
pub const DEFAULT_GRID: usize = 512;
/// NMF iterations used by the growth experiment.
pub const GROWTH_NMF_ITERS: usize = 5000;

/// Samples of a function on a uniform periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.n()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Coordinates `(a, b, c)` of `a cos s + b sin s + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IceCreamPoint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl IceCreamPoint {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// `R = √(a² + b²)`.
    pub fn radius(&self) -> f64 {
        libm::hypot(self.a, self.b)
    }

    /// `arg(a + ib)`, and 0 at the axis.
    pub fn theta(&self) -> f64 {
        if self.a == 0.0 && self.b == 0.0 {
            0.0
        } else {
            atan2(self.b, self.a)
        }
    }

    /// `c − √(a² + b²)`, the minimum of `a cos s + b sin s + c`.
    pub fn margin(&self) -> f64 {
        self.c - self.radius()
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0.0 && self.b == 0.0 && self.c == 0.0
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.a - other.a).abs().max((self.b - other.b).abs()).max((self.c - other.c).abs())
    }
}

/// Two-bump Poisson preimage parameters for a strict-interior point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonParams {
    pub r: f64,
    pub theta: f64,
    pub alpha: f64,
    pub c: f64,
}

impl PoissonParams {
    /// Parameters for `p` at radius `r`, with `cos α = R/(c r)`.
    pub fn for_point(p: &IceCreamPoint, r: f64) -> Result<Self> {
        match cone_membership(p, 0.0)?.class {
            Membership::Inside => {}
            Membership::Boundary => return Err(Error::BoundaryPoint),
            Membership::Outside => return Err(Error::OutsidePoint),
        }
        let ratio = p.radius() / p.c;
        let lower = if ratio > 0.0 { ratio + RADIUS_MARGIN } else { 0.0 };
        if !(r > 0.0 && r >= lower && r < 1.0) {
            return Err(Error::RadiusOutOfRange { r, lower });
        }
        let alpha = acos((ratio / r).min(1.0));
        Ok(Self { r, theta: p.theta(), alpha, c: p.c })
    }

    /// `f(t) = (c/4π)[P_r(t − θ + α) + P_r(t − θ − α)]`.
    pub fn eval(&self, t: f64) -> f64 {
        let shift = t - self.theta;
        self.c / (4.0 * PI) * (kernel(self.r, shift + self.alpha) + kernel(self.r, shift - self.alpha))
    }
}

/// Quadrature moments `(∫f cos, ∫f sin, ∫f)` with uniform weights `2π/n`.
pub fn moments(f: &GridFunction) -> Result<IceCreamPoint> {
    let g = f.grid();
    if g.n() < 3 {
        return Err(Error::InvalidParameter(alloc::format!("moments need at least 3 grid points, got {}", g.n())));
    }
    let w = g.weight();
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for (i, &v) in f.values().iter().enumerate() {
        let t = g.point(i);
        a += v * cos(t);
        b += v * sin(t);
        c += v;
    }
    Ok(IceCreamPoint::new(w * a, w * b, w * c))
}

/// `(Sf)(s) = a cos s + b sin s + c` sampled on `out_grid`.
pub fn apply_s(f: &GridFunction, out_grid: &GridSpec) -> Result<GridFunction> {
    let p = moments(f)?;
    GridFunction::from_fn(*out_grid, |s| p.a * cos(s) + p.b * sin(s) + p.c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipReport {
    pub class: Membership,
    /// `c − √(a² + b²)`.
    pub margin: f64,
}

/// Classifies `p` by the sign of its margin against `±eps`.
pub fn cone_membership(p: &IceCreamPoint, eps: f64) -> Result<MembershipReport> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("eps must be nonnegative, got {eps}")));
    }
    let margin = p.margin();
    let class = if margin > eps {
        Membership::Inside
    } else if margin >= -eps {
        Membership::Boundary
    } else {
        Membership::Outside
    };
    Ok(MembershipReport { class, margin })
}

/// `P_r(t) = (1 − r²)/(1 − 2r cos t + r²)` for `0 < r < 1`.
pub fn poisson_kernel(r: f64, t: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::RadiusOutOfRange { r, lower: 0.0 });
    }
    Ok(kernel(r, t))
}

fn kernel(r: f64, t: f64) -> f64 {
    (1.0 - r * r) / (1.0 - 2.0 * r * cos(t) + r * r)
}

/// Nonnegative `f` with moments `p`, sampled on `out_grid`. The origin maps
/// to the zero function; boundary and outside points are rejected.
pub fn poisson_preimage(p: &IceCreamPoint, r: f64, out_grid: &GridSpec) -> Result<GridFunction> {
    if p.is_zero() {
        return GridFunction::new(*out_grid, vec![0.0; out_grid.n()]);
    }
    let params = PoissonParams::for_point(p, r)?;
    GridFunction::from_fn(*out_grid, |t| params.eval(t))
}

/// Which measurements [`growth_experiment`] takes besides the float rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrowthMethods {
    pub exact3: bool,
    pub nmf: bool,
}

impl Default for GrowthMethods {
    fn default() -> Self {
        Self { exact3: true, nmf: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub n: usize,
    pub rank_float: usize,
    pub k_exact3: Option<usize>,
    pub k_nmf: Option<usize>,
    /// Best NMF residual one below the reference `k` (the exact3 value when
    /// measured, else the NMF value); `None` when that is below the rank.
    pub residual_at_k_minus_1: Option<f64>,
}

/// For each `n`, samples `K_n` on an aligned row grid and a column grid
/// shifted by `offset`, then records its float rank, the rank-three
/// geometric `k` and the NMF scan.
pub fn growth_experiment(n_list: &[usize], offset: f64, methods: GrowthMethods, seed: u64) -> Result<Vec<GrowthRow>> {
    n_list.iter().map(|&n| growth_row(n, offset, methods, seed)).collect()
}

fn growth_row(n: usize, offset: f64, methods: GrowthMethods, seed: u64) -> Result<GrowthRow> {
    if n < 3 {
        return Err(Error::InvalidParameter(alloc::format!("grid size must be at least 3, got {n}")));
    }
    let t = sample_kernel(&GridSpec::aligned(n)?, &GridSpec::new(n, offset)?);
    let rank = rank_float(&t, DEFAULT_RANK_TOL)?;
    let k_exact3 = if methods.exact3 { Some(nnrank_rank3(&AnyMatrix::Float(t.clone()))?.k) } else { None };
    let mut k_nmf = None;
    let mut scanned = Vec::new();
    if methods.nmf {
        let rep = min_k_search(&t, rank.max(1), n, DEFAULT_RESTARTS, seed, DEFAULT_FIT_TOL, GROWTH_NMF_ITERS)?;
        k_nmf = rep.k_best;
        scanned = rep.scanned;
    }
    let residual_at_k_minus_1 = match k_exact3.or(k_nmf) {
        Some(k) if k > rank.max(1) && methods.nmf => {
            match scanned.iter().find(|s| s.k == k - 1) {
                Some(s) => Some(s.residual),
                None => Some(
                    search_upper(&t, k - 1, DEFAULT_RESTARTS, seed, DEFAULT_FIT_TOL, GROWTH_NMF_ITERS)?.residual,
                ),
            }
        }
        _ => None,
    };
    Ok(GrowthRow { n, rank_float: rank, k_exact3, k_nmf, residual_at_k_minus_1 })
}
