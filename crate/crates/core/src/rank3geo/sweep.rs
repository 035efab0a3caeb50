//! Minimum nested polygon by greedy supporting chains.
//!
//! Positions on the outer boundary are measured by arc length counterclockwise
//! from the first outer vertex. From a boundary point `x`, the greedy step
//! follows the line through `x` that supports the inner hull with the hull on
//! its left, until the line leaves the outer polygon. A start position closes
//! with `k` vertices when `k` greedy steps advance a full perimeter. Some
//! optimal polygon has a vertex on the outer boundary and the greedy chain from
//! that vertex is optimal, so the minimum over start positions is the answer.
//!
//! The set of optimal starts is invariant under the greedy map, so isolated
//! optima sit on breakpoints of that map: outer vertices, boundary hits of
//! inner edge lines (which include all contact points), and greedy preimages
//! of outer vertices. These are tried exactly; a uniform sample plus
//! golden-section refinement around local maxima of the advance covers optima
//! that form intervals. Every polygon returned has passed the containment
//! checks, so a reported `k` is always realized.

use alloc::vec::Vec;

use super::planar::{contains_all, convex_hull, outer_polygon, simplify_polygon, HalfPlane, Point2};
use super::PolygonWitness;
use crate::error::{Error, Result};

/// Uniform start positions before refinement.
pub const SWEEP_SAMPLES: usize = 720;
/// Refinement stops at this parameter width, relative to the perimeter.
pub const REFINE_WIDTH: f64 = 1e-12;
/// Geometric slack for containment and closure.
pub const GEOM_SLACK: f64 = 1e-9;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    /// Inner hull on the left: counterclockwise chains.
    Left,
    /// Inner hull on the right: walks the chain backwards.
    Right,
}

struct Sweep {
    hull: Vec<Point2>,
    outer: Vec<Point2>,
    edges: Vec<HalfPlane>,
    cum: Vec<f64>,
    perimeter: f64,
}

impl Sweep {
    fn new(hull: Vec<Point2>, outer: Vec<Point2>) -> Self {
        let n = outer.len();
        let mut edges = Vec::with_capacity(n);
        let mut cum = Vec::with_capacity(n + 1);
        cum.push(0.0);
        for e in 0..n {
            let (a, b) = (outer[e], outer[(e + 1) % n]);
            let len = a.dist(b);
            let normal = Point2::new(-(b.y - a.y) / len, (b.x - a.x) / len);
            edges.push(HalfPlane::new(normal.x, normal.y, -normal.dot(a)));
            cum.push(cum[e] + len);
        }
        let perimeter = cum[n];
        Self { hull, outer, edges, cum, perimeter }
    }

    fn wrap(&self, s: f64) -> f64 {
        let r = s % self.perimeter;
        if r < 0.0 {
            r + self.perimeter
        } else {
            r
        }
    }

    fn point_at(&self, s: f64) -> Point2 {
        let s = self.wrap(s);
        let n = self.outer.len();
        let e = match self.cum[1..].iter().position(|&c| s < c) {
            Some(e) => e,
            None => n - 1,
        };
        let (a, b) = (self.outer[e], self.outer[(e + 1) % n]);
        let len = self.cum[e + 1] - self.cum[e];
        a + (b - a) * ((s - self.cum[e]) / len).clamp(0.0, 1.0)
    }

    fn param_on_edge(&self, p: Point2, e: usize) -> f64 {
        let n = self.outer.len();
        let (a, b) = (self.outer[e], self.outer[(e + 1) % n]);
        let len = self.cum[e + 1] - self.cum[e];
        let t = ((p - a).dot(b - a) / len).clamp(0.0, len);
        self.wrap(self.cum[e] + t)
    }

    /// Where the ray `x + τ d` (τ > 0) leaves the outer polygon.
    fn exit(&self, x: Point2, d: Point2) -> Option<(Point2, f64)> {
        let d = d * (1.0 / d.norm());
        let mut best: Option<(f64, usize)> = None;
        for (e, h) in self.edges.iter().enumerate() {
            let nd = h.normal().dot(d);
            if nd >= -1e-12 {
                continue;
            }
            let tau = h.eval(x).max(0.0) / -nd;
            if best.is_none_or(|(t, _)| tau < t) {
                best = Some((tau, e));
            }
        }
        let (tau, e) = best?;
        let p = x + d * tau;
        Some((p, self.param_on_edge(p, e)))
    }

    /// Direction from `x` of the line supporting the hull with the hull on
    /// the given side.
    fn tangent(&self, x: Point2, side: Side) -> Option<Point2> {
        let sgn = if side == Side::Left { 1.0 } else { -1.0 };
        let mut best: Option<Point2> = None;
        for &q in &self.hull {
            let d = q - x;
            let len = d.norm();
            if len <= GEOM_SLACK {
                continue;
            }
            let d = d * (1.0 / len);
            if !self.hull.iter().all(|&r| sgn * d.cross(r - x) >= -GEOM_SLACK) {
                continue;
            }
            // Most counterclockwise (Left) / clockwise (Right) valid direction.
            if best.is_none_or(|b| sgn * b.cross(d) > 0.0) {
                best = Some(d);
            }
        }
        best
    }

    /// One greedy step from parameter `s`: (advance along the boundary in the
    /// walking direction, new parameter, new point).
    fn step(&self, s: f64, side: Side) -> Option<(f64, f64, Point2)> {
        let x = self.point_at(s);
        let d = self.tangent(x, side)?;
        let (p, s2) = self.exit(x, d)?;
        let delta = match side {
            Side::Left => self.wrap(s2 - s),
            Side::Right => self.wrap(s - s2),
        };
        (delta > REFINE_WIDTH * self.perimeter).then_some((delta, s2, p))
    }

    /// Total advance after `k` greedy steps, or `None` on a stall.
    fn advance(&self, s0: f64, k: usize) -> Option<f64> {
        let (mut s, mut acc) = (s0, 0.0);
        for _ in 0..k {
            let (delta, s2, _) = self.step(s, Side::Left)?;
            acc += delta;
            s = s2;
        }
        Some(acc)
    }

    /// Greedy chain from `s0`; the vertices if it closes within `cap` steps.
    fn close(&self, s0: f64, cap: usize) -> Option<Vec<Point2>> {
        let mut pts = alloc::vec![self.point_at(s0)];
        let (mut s, mut acc) = (s0, 0.0);
        for _ in 0..cap {
            let (delta, s2, p) = self.step(s, Side::Left)?;
            acc += delta;
            if acc >= self.perimeter - GEOM_SLACK {
                return Some(pts);
            }
            pts.push(p);
            s = s2;
        }
        None
    }

    /// Breakpoints of the greedy map plus a uniform sample, sorted.
    fn candidates(&self) -> Vec<f64> {
        let mut c: Vec<f64> = self.cum[..self.outer.len()].to_vec();
        let h = self.hull.len();
        for i in 0..h {
            let (a, b) = (self.hull[i], self.hull[(i + 1) % h]);
            for (from, dir) in [(a, a - b), (b, b - a)] {
                if let Some((_, s)) = self.exit(from, dir) {
                    c.push(s);
                }
            }
        }
        for e in 0..self.outer.len() {
            if let Some((_, s, _)) = self.step(self.cum[e], Side::Right) {
                c.push(s);
            }
        }
        c.extend((0..SWEEP_SAMPLES).map(|i| self.perimeter * i as f64 / SWEEP_SAMPLES as f64));
        let mut c: Vec<f64> = c.into_iter().map(|s| self.wrap(s)).collect();
        c.sort_by(f64::total_cmp);
        c.dedup_by(|a, b| (*a - *b).abs() <= REFINE_WIDTH * self.perimeter);
        c
    }

    /// Golden-section search for the maximum advance of `k` steps in
    /// `[lo, hi]` (unwrapped parameters).
    fn refine(&self, lo: f64, hi: f64, k: usize) -> (f64, f64) {
        let f = |s: f64| self.advance(s, k).unwrap_or(f64::NEG_INFINITY);
        let (mut a, mut b) = (lo, hi);
        let mut x1 = b - INV_PHI * (b - a);
        let mut x2 = a + INV_PHI * (b - a);
        let (mut f1, mut f2) = (f(x1), f(x2));
        while b - a > REFINE_WIDTH * self.perimeter {
            if f1 >= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - INV_PHI * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + INV_PHI * (b - a);
                f2 = f(x2);
            }
        }
        if f1 >= f2 {
            (x1, f1)
        } else {
            (x2, f2)
        }
    }
}

/// Certifies a chain: convex, counterclockwise, contains the inner hull and
/// lies in every outer half-plane, all within [`GEOM_SLACK`].
fn certify(chain: &[Point2], hull: &[Point2], planes: &[HalfPlane]) -> Option<Vec<Point2>> {
    let poly = simplify_polygon(chain, 1e-12);
    let ok = contains_all(&poly, hull, GEOM_SLACK)
        && poly.iter().all(|&v| planes.iter().all(|h| h.eval(v) >= -GEOM_SLACK));
    ok.then_some(poly)
}

pub(super) fn min_nested(inner: &[Point2], outer: &[HalfPlane]) -> Result<PolygonWitness> {
    let mut planes = Vec::with_capacity(outer.len());
    for h in outer {
        match h.normalized() {
            Some(n) => planes.push(n),
            None if h.w >= 0.0 => {}
            None => return Err(Error::InnerNotContained { index: 0 }),
        }
    }
    for (index, &p) in inner.iter().enumerate() {
        if planes.iter().any(|h| h.eval(p) < -GEOM_SLACK) {
            return Err(Error::InnerNotContained { index });
        }
    }
    let hull = convex_hull(inner, 1e-12);
    if hull.len() < 3 {
        return Err(Error::DegenerateInner);
    }
    let outer_poly = outer_polygon(&planes, GEOM_SLACK)?;

    let mut best = hull.clone();
    if let Some(q) = certify(&outer_poly, &hull, &planes) {
        if q.len() < best.len() {
            best = q;
        }
    }
    let sweep = Sweep::new(hull.clone(), outer_poly);
    let candidates = sweep.candidates();
    for &s in &candidates {
        if best.len() <= 3 {
            break;
        }
        if let Some(chain) = sweep.close(s, best.len() - 1) {
            if let Some(poly) = certify(&chain, &hull, &planes) {
                if poly.len() < best.len() {
                    best = poly;
                }
            }
        }
    }

    // Optima on intervals narrower than the sample spacing.
    while best.len() > 3 {
        let k = best.len() - 1;
        let n = candidates.len();
        let values: Vec<f64> = candidates
            .iter()
            .map(|&s| sweep.advance(s, k).unwrap_or(f64::NEG_INFINITY))
            .collect();
        let mut improved = None;
        for i in 0..n {
            let (prev, next) = ((i + n - 1) % n, (i + 1) % n);
            if !(values[i] > values[prev] && values[i] >= values[next]) {
                continue;
            }
            let lo = candidates[prev] - if prev > i { sweep.perimeter } else { 0.0 };
            let hi = candidates[next] + if next < i { sweep.perimeter } else { 0.0 };
            let (s, adv) = sweep.refine(lo, hi, k);
            if adv < sweep.perimeter - GEOM_SLACK {
                continue;
            }
            if let Some(poly) = sweep.close(s, k).and_then(|c| certify(&c, &hull, &planes)) {
                if poly.len() <= k {
                    improved = Some(poly);
                    break;
                }
            }
        }
        match improved {
            Some(poly) => best = poly,
            None => break,
        }
    }
    Ok(PolygonWitness { vertices: best })
}
