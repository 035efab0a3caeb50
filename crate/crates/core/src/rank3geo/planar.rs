//! Small planar toolkit: points, half-planes, hulls and polygon checks.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

use libm::{atan2, hypot};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        hypot(self.x, self.y)
    }

    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

impl Add for Point2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

/// `{(x, y) : u·x + v·y + w >= 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl HalfPlane {
    pub const fn new(u: f64, v: f64, w: f64) -> Self {
        Self { u, v, w }
    }

    #[inline]
    pub fn eval(&self, p: Point2) -> f64 {
        self.u * p.x + self.v * p.y + self.w
    }

    pub fn normal(&self) -> Point2 {
        Point2::new(self.u, self.v)
    }

    /// Same half-plane with a unit normal, so `eval` is a signed distance.
    /// `None` for a degenerate (constant) constraint.
    pub fn normalized(&self) -> Option<Self> {
        let n = hypot(self.u, self.v);
        (n > 0.0).then(|| Self::new(self.u / n, self.v / n, self.w / n))
    }

    /// Intersection point of the two boundary lines, if not parallel.
    pub fn meet(&self, other: &Self) -> Option<Point2> {
        let det = self.u * other.v - self.v * other.u;
        if det.abs() <= 1e-14 * self.normal().norm() * other.normal().norm() {
            return None;
        }
        let x = (self.v * other.w - other.v * self.w) / det;
        let y = (other.u * self.w - self.u * other.w) / det;
        Some(Point2::new(x, y))
    }
}

/// Convex hull in counterclockwise order without collinear or repeated
/// vertices (Andrew's monotone chain). `tol` is the collinearity slack.
pub fn convex_hull(points: &[Point2], tol: f64) -> Vec<Point2> {
    // near-equal points need not be adjacent after sorting
    let mut pts: Vec<Point2> = Vec::with_capacity(points.len());
    for &p in points {
        if pts.iter().all(|q| q.dist(p) > tol) {
            pts.push(p);
        }
    }
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    if pts.len() < 3 {
        return pts;
    }
    let mut lower = half_hull(pts.iter().copied(), tol);
    let mut upper = half_hull(pts.iter().rev().copied(), tol);
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn half_hull(points: impl Iterator<Item = Point2>, tol: f64) -> Vec<Point2> {
    let mut chain: Vec<Point2> = Vec::new();
    for p in points {
        while chain.len() >= 2 {
            let (a, b) = (chain[chain.len() - 2], chain[chain.len() - 1]);
            // distance-scaled collinearity test
            if (b - a).cross(p - a) <= tol * a.dist(b).max(a.dist(p)) {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(p);
    }
    chain
}

/// Vertices (counterclockwise) of the bounded region cut out by the
/// half-planes, which must be normalized.
pub fn outer_polygon(planes: &[HalfPlane], tol: f64) -> Result<Vec<Point2>> {
    if !is_bounded(planes) {
        return Err(Error::UnboundedOuter);
    }
    let mut corners = Vec::new();
    for (i, a) in planes.iter().enumerate() {
        for b in &planes[i + 1..] {
            if let Some(p) = a.meet(b) {
                if planes.iter().all(|h| h.eval(p) >= -tol) {
                    corners.push(p);
                }
            }
        }
    }
    let hull = convex_hull(&corners, tol);
    if hull.len() < 3 {
        return Err(Error::InvalidParameter("outer region has empty interior".into()));
    }
    Ok(hull)
}

/// The intersection of half-planes is bounded iff their inward normals leave
/// no angular gap of `π` or more.
fn is_bounded(planes: &[HalfPlane]) -> bool {
    let mut angles: Vec<f64> = planes
        .iter()
        .filter(|h| h.normal().norm() > 0.0)
        .map(|h| atan2(h.v, h.u))
        .collect();
    if angles.len() < 3 {
        return false;
    }
    angles.sort_by(f64::total_cmp);
    let mut max_gap = angles[0] + 2.0 * PI - angles[angles.len() - 1];
    for w in angles.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    max_gap < PI - 1e-12
}

/// Signed area (positive for counterclockwise order).
pub fn signed_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i].cross(poly[(i + 1) % n])).sum::<f64>() / 2.0
}

/// Drops repeated and collinear consecutive vertices of a closed chain.
pub fn simplify_polygon(poly: &[Point2], tol: f64) -> Vec<Point2> {
    let mut pts: Vec<Point2> = Vec::with_capacity(poly.len());
    for &p in poly {
        if pts.last().is_none_or(|q: &Point2| q.dist(p) > tol) {
            pts.push(p);
        }
    }
    while pts.len() > 1 && pts[0].dist(pts[pts.len() - 1]) <= tol {
        pts.pop();
    }
    loop {
        let n = pts.len();
        if n < 3 {
            return pts;
        }
        let drop = (0..n).find(|&i| {
            let (a, b, c) = (pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
            let base = a.dist(c).max(tol);
            // b within `tol` of segment line ac, and between a and c.
            ((c - a).cross(b - a)).abs() <= tol * base && (b - a).dot(c - a) >= 0.0 && (b - c).dot(a - c) >= 0.0
        });
        match drop {
            Some(i) => {
                pts.remove(i);
            }
            None => return pts,
        }
    }
}

/// True iff `poly` (counterclockwise) is convex and contains every point of
/// `inner`, each within `slack`.
pub fn contains_all(poly: &[Point2], inner: &[Point2], slack: f64) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b, c) = (poly[i], poly[(i + 1) % n], poly[(i + 2) % n]);
        let len = a.dist(b);
        if len == 0.0 {
            return false;
        }
        if (b - a).cross(c - b) < -slack * len.max(b.dist(c)) {
            return false;
        }
        if inner.iter().any(|&p| (b - a).cross(p - a) / len < -slack) {
            return false;
        }
    }
    signed_area(poly) > 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn hull_drops_interior_and_collinear() {
        let pts = vec![p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(2.0, 2.0), p(0.0, 2.0), p(1.0, 1.0), p(0.0, 1.0)];
        let h = convex_hull(&pts, 1e-12);
        assert_eq!(h, vec![p(0.0, 0.0), p(2.0, 0.0), p(2.0, 2.0), p(0.0, 2.0)]);
        assert!(signed_area(&h) > 0.0);
    }

    #[test]
    fn hull_of_collinear_points_is_degenerate() {
        let h = convex_hull(&[p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0)], 1e-12);
        assert!(h.len() < 3);
    }

    #[test]
    fn square_from_half_planes() {
        let planes = [
            HalfPlane::new(1.0, 0.0, 1.0),
            HalfPlane::new(-1.0, 0.0, 1.0),
            HalfPlane::new(0.0, 1.0, 1.0),
            HalfPlane::new(0.0, -1.0, 1.0),
            HalfPlane::new(1.0, 1.0, 5.0).normalized().unwrap(),
        ];
        let q = outer_polygon(&planes, 1e-12).unwrap();
        assert_eq!(q.len(), 4);
        assert!((signed_area(&q) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_region_rejected() {
        let planes = [HalfPlane::new(1.0, 0.0, 1.0), HalfPlane::new(0.0, 1.0, 1.0), HalfPlane::new(1.0, 1.0, 0.0)];
        assert_eq!(outer_polygon(&planes, 1e-12).unwrap_err(), Error::UnboundedOuter);
    }

    #[test]
    fn triple_corner_with_rounding() {
        // three lines through one corner, met at slightly different x
        let planes = [
            HalfPlane::new(0.471712491112149, -0.8817524174782685, 0.71443450831176),
            HalfPlane::new(0.05487235597917938, 0.9984933773186953, 1.3612135668844123),
            HalfPlane::new(-0.23338050807049895, 0.9723854886066307, 1.6757857087446415),
            HalfPlane::new(-1.0, 0.0, 1.2208580165514524),
        ];
        let q = outer_polygon(&planes, 1e-9).unwrap();
        assert_eq!(q.len(), 3);
        let hull = convex_hull(&[p(1.0, 0.0), p(0.0, 0.0), p(1.0 + 1e-16, 2.0), p(1.0 - 1e-16, 0.0)], 1e-12);
        assert_eq!(hull.len(), 3);
    }

    #[test]
    fn simplify_removes_collinear() {
        let poly = vec![p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(2.0, 2.0), p(2.0, 2.0), p(0.0, 2.0)];
        assert_eq!(simplify_polygon(&poly, 1e-12).len(), 4);
    }

    #[test]
    fn containment() {
        let sq = vec![p(0.0, 0.0), p(2.0, 0.0), p(2.0, 2.0), p(0.0, 2.0)];
        assert!(contains_all(&sq, &[p(1.0, 1.0), p(0.0, 1.0)], 1e-12));
        assert!(!contains_all(&sq, &[p(2.1, 1.0)], 1e-12));
        let cw: Vec<Point2> = sq.iter().rev().copied().collect();
        assert!(!contains_all(&cw, &[p(1.0, 1.0)], 1e-12));
    }
}
