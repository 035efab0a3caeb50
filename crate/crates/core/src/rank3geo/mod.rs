//! Nonnegative rank of rank-three matrices through the nested polygon problem.
//!
//! Columns of a rank-three nonnegative matrix `T`, scaled to unit column sum,
//! are points in a 2D affine chart of the column space. Each row `i` gives a
//! half-plane (coordinate `i` of the lifted point is `>= 0`). A convex polygon
//! with `k` vertices nested between the hull of the column points and the
//! outer region lifts to a factorization `T = LR` with `L, R >= 0` whose
//! factor `L` spans the column space of `T`; conversely every such
//! factorization yields a nested polygon. The minimum `k` is therefore the
//! nonnegative rank restricted to factorizations through the column space.
//! It equals `rank⁺(T)` whenever it is 3 or 4 (a factorization with three
//! factors necessarily spans the column space), and is an upper bound with
//! `rank⁺(T) >= 4` beyond that.

mod planar;
mod sweep;

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

pub use planar::{convex_hull, outer_polygon, HalfPlane, Point2};
pub use sweep::{GEOM_SLACK, REFINE_WIDTH, SWEEP_SAMPLES};

use crate::error::{Error, Result};
use crate::matcore::{
    orthonormal_column_basis, rank_exact, rank_float, AnyMatrix, ExactMatrix, FloatMatrix, Rational, Scalar,
    DEFAULT_RANK_TOL,
};
use crate::nnfactor::{trivial_witness, AnyFactorization, NonnegFactorization, FLOAT_VERIFY_TOL};

/// Affine lift from chart coordinates back to `R^m`: row `i` of the lifted
/// point is `lift[i].eval(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceChart {
    pub lift: Vec<HalfPlane>,
    /// Chart point index of every column; `None` for zero columns.
    pub column_point: Vec<Option<usize>>,
    /// Column sums of `T` (the normalizing functional).
    pub column_sum: Vec<f64>,
}

impl SliceChart {
    pub fn lift_point(&self, p: Point2) -> Vec<f64> {
        self.lift.iter().map(|h| h.eval(p)).collect()
    }
}

/// Inner point set and outer half-planes of a nested polygon problem.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedPolygonInstance {
    pub inner: Vec<Point2>,
    pub outer: Vec<HalfPlane>,
    /// Present when the instance was sliced from a matrix.
    pub chart: Option<SliceChart>,
}

/// Convex polygon (counterclockwise) nested between the inner hull and the
/// outer region.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonWitness {
    pub vertices: Vec<Point2>,
}

impl PolygonWitness {
    pub fn k(&self) -> usize {
        self.vertices.len()
    }
}

/// Planar section of a nonnegative rank-three matrix.
///
/// Rational input is sliced in exact arithmetic (basis columns, coordinates
/// and row functionals); float input through an orthonormal basis of its
/// numeric column space. Both are then centered and whitened so the inner
/// points have identity covariance.
pub fn projective_slice(t: &AnyMatrix) -> Result<NestedPolygonInstance> {
    t.require_nonnegative()?;
    let raw = match t {
        AnyMatrix::Exact(m) => slice_exact(m)?,
        AnyMatrix::Float(m) => slice_float(m)?,
    };
    whiten(raw)
}

/// Minimum-vertex convex polygon between `conv(inner)` and the outer region.
pub fn min_nested_polygon(inst: &NestedPolygonInstance) -> Result<PolygonWitness> {
    sweep::min_nested(&inst.inner, &inst.outer)
}

/// Result of the exact rank-three method.
#[derive(Debug, Clone)]
pub struct Rank3Outcome {
    /// Minimum nested polygon size, capped by `min(m, n)`.
    pub k: usize,
    /// Verified factorization with inner dimension `k`.
    pub witness: AnyFactorization,
    pub polygon: PolygonWitness,
    pub instance: NestedPolygonInstance,
    /// Certified lower bound on `rank⁺(T)`: `k` itself when `k <= 4`, else 4.
    pub lower_bound: usize,
}

impl Rank3Outcome {
    /// True when `k` is certified to be the nonnegative rank.
    pub fn is_exact(&self) -> bool {
        self.lower_bound == self.k
    }
}

pub fn nnrank_rank3(t: &AnyMatrix) -> Result<Rank3Outcome> {
    let instance = projective_slice(t)?;
    let polygon = min_nested_polygon(&instance)?;
    let min_dim = t.rows().min(t.cols());
    let (k, witness) = if polygon.k() >= min_dim {
        let w = match t {
            AnyMatrix::Exact(m) => AnyFactorization::Exact(trivial_witness(m)?),
            AnyMatrix::Float(m) => AnyFactorization::Float(trivial_witness(m)?),
        };
        (min_dim, w)
    } else {
        let w = lift_witness(&t.to_float(), &instance, &polygon)?;
        (polygon.k(), AnyFactorization::Float(w))
    };
    let tol = FLOAT_VERIFY_TOL * t.to_float().max_abs().max(1.0);
    if !witness.verify(t, tol)? {
        return Err(Error::WitnessRejected(alloc::format!(
            "residual {:e} above {tol:e}",
            witness.residual(t)?
        )));
    }
    Ok(Rank3Outcome { k, witness, polygon, instance, lower_bound: k.min(4) })
}

/// Columns of `L` are the lifted polygon vertices; column `j` of `R` holds
/// the convex coordinates of column point `j`, times its column sum.
fn lift_witness(
    t: &FloatMatrix,
    inst: &NestedPolygonInstance,
    poly: &PolygonWitness,
) -> Result<NonnegFactorization<f64>> {
    let chart = inst
        .chart
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("instance carries no slice chart".into()))?;
    let (m, n) = t.shape();
    let k = poly.k();
    let lifted: Vec<Vec<f64>> = poly.vertices.iter().map(|&v| chart.lift_point(v)).collect();
    let left = FloatMatrix::from_fn(m, k, |i, l| lifted[l][i])?;
    let mut right = vec![0.0; k * n];
    for j in 0..n {
        let Some(idx) = chart.column_point[j] else { continue };
        let lambda = convex_coordinates(&poly.vertices, inst.inner[idx]);
        for (l, c) in lambda.into_iter().enumerate() {
            right[l * n + j] = c * chart.column_sum[j];
        }
    }
    NonnegFactorization::from_raw_clamped(left, FloatMatrix::new(k, n, right)?, GEOM_SLACK)
}

/// Convex combination of polygon vertices equal to `p`, from the fan
/// triangulation at vertex 0. Points marginally outside are projected by
/// clamping the barycentric weights.
fn convex_coordinates(poly: &[Point2], p: Point2) -> Vec<f64> {
    let k = poly.len();
    let mut best: Option<(f64, usize, [f64; 3])> = None;
    for l in 1..k - 1 {
        let (a, b, c) = (poly[0], poly[l], poly[l + 1]);
        let area = (b - a).cross(c - a);
        if area <= 0.0 {
            continue;
        }
        let wb = (p - a).cross(c - a) / area;
        let wc = (b - a).cross(p - a) / area;
        let bary = [1.0 - wb - wc, wb, wc];
        let worst = bary.iter().copied().fold(f64::INFINITY, f64::min);
        if best.is_none_or(|(w, _, _)| worst > w) {
            best = Some((worst, l, bary));
        }
    }
    let mut out = vec![0.0; k];
    if let Some((_, l, bary)) = best {
        let clamped: Vec<f64> = bary.iter().map(|x| x.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        out[0] = clamped[0] / total;
        out[l] = clamped[1] / total;
        out[l + 1] = clamped[2] / total;
    }
    out
}

/// Chart data before whitening.
struct RawSlice {
    points: Vec<Point2>,
    /// Lift functionals for every row (zero rows included).
    lift: Vec<HalfPlane>,
    zero_rows: Vec<bool>,
    column_point: Vec<Option<usize>>,
    column_sum: Vec<f64>,
}

fn slice_exact(t: &ExactMatrix) -> Result<RawSlice> {
    let rank = rank_exact(t);
    if rank != 3 {
        return Err(Error::RankNotThree { rank });
    }
    let (m, n) = t.shape();
    let all_rows: Vec<usize> = (0..m).collect();

    let mut basis: Vec<usize> = Vec::with_capacity(3);
    for j in t.nonzero_cols() {
        let mut trial = basis.clone();
        trial.push(j);
        if rank_exact(&t.select(&all_rows, &trial)?) == trial.len() {
            basis = trial;
            if basis.len() == 3 {
                break;
            }
        }
    }
    let b = t.select(&all_rows, &basis)?;
    let mut pivots: Vec<usize> = Vec::with_capacity(3);
    for i in 0..m {
        let mut trial = pivots.clone();
        trial.push(i);
        if rank_exact(&b.select(&trial, &[0, 1, 2])?) == trial.len() {
            pivots = trial;
            if pivots.len() == 3 {
                break;
            }
        }
    }
    let inv = inverse3(&b.select(&pivots, &[0, 1, 2])?);
    let w: Vec<Rational> = (0..3).map(|k| b.col(k).into_iter().sum()).collect();

    // Chart: c = c0 + x e1 + y e2 with c0 = (1/w0, 0, 0), e1 = (w1, -w0, 0),
    // e2 = (w2, 0, -w0); so x = -ĉ1/w0, y = -ĉ2/w0 for ĉ with w·ĉ = 1.
    let mut exact_points: Vec<(Rational, Rational)> = Vec::new();
    let mut column_point = vec![None; n];
    let mut column_sum = vec![0.0; n];
    for j in 0..n {
        let col = t.col(j);
        if col.iter().all(Zero::is_zero) {
            continue;
        }
        let rhs: Vec<Rational> = pivots.iter().map(|&i| col[i].clone()).collect();
        let c: Vec<Rational> = (0..3)
            .map(|r| (0..3).map(|s| inv[r][s].clone() * rhs[s].clone()).sum())
            .collect();
        let sum: Rational = col.iter().cloned().sum();
        let x = -(c[1].clone() / sum.clone()) / w[0].clone();
        let y = -(c[2].clone() / sum.clone()) / w[0].clone();
        let idx = match exact_points.iter().position(|(px, py)| *px == x && *py == y) {
            Some(idx) => idx,
            None => {
                exact_points.push((x, y));
                exact_points.len() - 1
            }
        };
        column_point[j] = Some(idx);
        column_sum[j] = sum.to_f64();
    }

    let zero_rows: Vec<bool> = (0..m).map(|i| t.row(i).iter().all(Zero::is_zero)).collect();
    let lift = (0..m)
        .map(|i| {
            let (b0, b1, b2) = (b.get(i, 0).clone(), b.get(i, 1).clone(), b.get(i, 2).clone());
            let g1 = w[1].clone() * b0.clone() - w[0].clone() * b1;
            let g2 = w[2].clone() * b0.clone() - w[0].clone() * b2;
            let h = b0 / w[0].clone();
            HalfPlane::new(g1.to_f64(), g2.to_f64(), h.to_f64())
        })
        .collect();
    let points = exact_points
        .iter()
        .map(|(x, y)| Point2::new(x.to_f64(), y.to_f64()))
        .collect();
    Ok(RawSlice { points, lift, zero_rows, column_point, column_sum })
}

fn inverse3(a: &ExactMatrix) -> [[Rational; 3]; 3] {
    let e = |i: usize, j: usize| a.get(i, j).clone();
    let cof = |i: usize, j: usize| {
        let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
        let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
        e(r0, c0) * e(r1, c1) - e(r0, c1) * e(r1, c0)
    };
    let det = e(0, 0) * cof(0, 0) + e(0, 1) * cof(0, 1) + e(0, 2) * cof(0, 2);
    core::array::from_fn(|i| core::array::from_fn(|j| cof(j, i) / det.clone()))
}

fn slice_float(t: &FloatMatrix) -> Result<RawSlice> {
    let rank = rank_float(t, DEFAULT_RANK_TOL)?;
    if rank != 3 {
        return Err(Error::RankNotThree { rank });
    }
    let (m, n) = t.shape();
    let (mut q, _) = orthonormal_column_basis(t, DEFAULT_RANK_TOL);
    q.truncate(3);
    if q.len() < 3 {
        return Err(Error::RankNotThree { rank: q.len() });
    }
    let dot3 = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let w: [f64; 3] = core::array::from_fn(|k| q[k].iter().sum());
    let wn = libm::sqrt(dot3(&w, &w));
    let what = w.map(|x| x / wn);
    let c0 = w.map(|x| x / (wn * wn));
    // Orthonormal complement of w.
    let kmin = (0..3).min_by(|&a, &b| what[a].abs().total_cmp(&what[b].abs())).unwrap_or(0);
    let mut a1 = [0.0; 3];
    a1[kmin] = 1.0;
    let proj = what[kmin];
    let mut a1 = core::array::from_fn::<f64, 3, _>(|k| a1[k] - proj * what[k]);
    let a1n = libm::sqrt(dot3(&a1, &a1));
    a1.iter_mut().for_each(|x| *x /= a1n);
    let a2 = [
        what[1] * a1[2] - what[2] * a1[1],
        what[2] * a1[0] - what[0] * a1[2],
        what[0] * a1[1] - what[1] * a1[0],
    ];

    let mut points: Vec<Point2> = Vec::new();
    let mut column_point = vec![None; n];
    let mut column_sum = vec![0.0; n];
    for j in 0..n {
        let col = t.col(j);
        let sum: f64 = col.iter().sum();
        if sum <= 0.0 {
            continue;
        }
        let c: [f64; 3] = core::array::from_fn(|k| q[k].iter().zip(&col).map(|(a, b)| a * b).sum());
        let scale = dot3(&w, &c);
        let chat = c.map(|x| x / scale);
        let p = Point2::new(dot3(&a1, &chat), dot3(&a2, &chat));
        let idx = match points.iter().position(|&r| r.dist(p) <= 1e-12) {
            Some(idx) => idx,
            None => {
                points.push(p);
                points.len() - 1
            }
        };
        column_point[j] = Some(idx);
        column_sum[j] = sum;
    }
    let zero_rows: Vec<bool> = (0..m).map(|i| t.row(i).iter().all(|&x| x == 0.0)).collect();
    let lift = (0..m)
        .map(|i| {
            let row: [f64; 3] = core::array::from_fn(|k| q[k][i]);
            HalfPlane::new(dot3(&row, &a1), dot3(&row, &a2), dot3(&row, &c0))
        })
        .collect();
    Ok(RawSlice { points, lift, zero_rows, column_point, column_sum })
}

/// Centers the inner points and maps their covariance to the identity.
fn whiten(raw: RawSlice) -> Result<NestedPolygonInstance> {
    let n = raw.points.len() as f64;
    if raw.points.len() < 3 {
        return Err(Error::DegenerateInner);
    }
    let mx = raw.points.iter().map(|p| p.x).sum::<f64>() / n;
    let my = raw.points.iter().map(|p| p.y).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in &raw.points {
        let (dx, dy) = (p.x - mx, p.y - my);
        sxx += dx * dx / n;
        sxy += dx * dy / n;
        syy += dy * dy / n;
    }
    // Cholesky factor [[l11, 0], [l21, l22]] of the covariance.
    let l11 = libm::sqrt(sxx);
    if !(l11 > 0.0) {
        return Err(Error::DegenerateInner);
    }
    let l21 = sxy / l11;
    let l22sq = syy - l21 * l21;
    if !(l22sq > 1e-24 * (sxx + syy)) {
        return Err(Error::DegenerateInner);
    }
    let l22 = libm::sqrt(l22sq);

    let inner = raw
        .points
        .iter()
        .map(|p| {
            let (dx, dy) = (p.x - mx, p.y - my);
            let zx = dx / l11;
            Point2::new(zx, (dy - l21 * zx) / l22)
        })
        .collect();
    // g·x + h with x = μ + L z becomes (Lᵀg)·z + (g·μ + h).
    let lift: Vec<HalfPlane> = raw
        .lift
        .iter()
        .map(|h| HalfPlane::new(l11 * h.u + l21 * h.v, l22 * h.v, h.u * mx + h.v * my + h.w))
        .collect();
    let outer = lift
        .iter()
        .zip(&raw.zero_rows)
        .filter(|(_, &zero)| !zero)
        .map(|(h, _)| *h)
        .collect();
    Ok(NestedPolygonInstance {
        inner,
        outer,
        chart: Some(SliceChart { lift, column_point: raw.column_point, column_sum: raw.column_sum }),
    })
}
