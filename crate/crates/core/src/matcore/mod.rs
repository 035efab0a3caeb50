//! Dense matrices over exact rationals and 64-bit floats.
//!
//! [`Matrix`] is generic over a [`Scalar`]; the two instantiations used
//! throughout the crate are [`ExactMatrix`] (arbitrary-precision rationals,
//! used wherever a claim is certified) and [`FloatMatrix`] (used where
//! transcendental values force it, e.g. sampled kernels).

mod exact;
mod float;
mod grid;
mod transform;

use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use exact::rank_exact;
pub use float::{orthonormal_column_basis, rank_float, singular_values, solve_small, DEFAULT_RANK_TOL};
pub use grid::{sample_kernel, GridSpec};
pub use transform::{scale_and_permute, Permutation};

/// Arbitrary-precision rational scalar.
pub type Rational = BigRational;

/// Builds the rational `num / den`.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Scalar kind tag used by file formats and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarKind {
    Rational,
    Float,
}

/// Field scalar admissible as a matrix entry.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const KIND: ScalarKind;

    /// False for values a matrix must not hold (NaN, infinities).
    fn is_admissible(&self) -> bool;

    fn to_f64(&self) -> f64;

    fn abs_value(&self) -> Self;

    /// Rank of a matrix over this scalar: exact elimination for rationals,
    /// thresholded singular values (default relative tolerance) for floats.
    fn matrix_rank(m: &Matrix<Self>) -> usize;
}

impl Scalar for Rational {
    const KIND: ScalarKind = ScalarKind::Rational;

    fn is_admissible(&self) -> bool {
        true
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn matrix_rank(m: &Matrix<Self>) -> usize {
        rank_exact(m)
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float;

    fn is_admissible(&self) -> bool {
        self.is_finite()
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs_value(&self) -> Self {
        if *self < 0.0 {
            -*self
        } else {
            *self
        }
    }

    fn matrix_rank(m: &Matrix<Self>) -> usize {
        // The default tolerance is strictly positive, so this cannot fail.
        rank_float(m, DEFAULT_RANK_TOL).unwrap_or(0)
    }
}

/// Dense row-major matrix.
///
/// The nonnegativity flag is computed at construction and kept in sync by
/// every constructor; entries are never mutated in place afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
    nonneg: bool,
}

pub type ExactMatrix = Matrix<Rational>;
pub type FloatMatrix = Matrix<f64>;

impl<S: Scalar> Matrix<S> {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(Error::EntryCount { rows, cols, len: data.len() });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_admissible()) {
            return Err(Error::NonFinite { row: pos / cols.max(1), col: pos % cols.max(1) });
        }
        let zero = S::zero();
        let nonneg = data.iter().all(|x| *x >= zero);
        Ok(Self { rows, cols, data, nonneg })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: (0..rows * cols).map(|_| S::zero()).collect(), nonneg: true }
    }

    pub fn identity(n: usize) -> Self {
        let data = (0..n * n)
            .map(|p| if p / n == p % n { S::one() } else { S::zero() })
            .collect();
        Self { rows: n, cols: n, data, nonneg: true }
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(d: &[S]) -> Self {
        let n = d.len();
        let data: Vec<S> = (0..n * n)
            .map(|p| if p / n == p % n { d[p / n].clone() } else { S::zero() })
            .collect();
        let zero = S::zero();
        let nonneg = d.iter().all(|x| *x >= zero);
        Self { rows: n, cols: n, data, nonneg }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<S> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// True iff every entry is `>= 0`.
    #[inline]
    pub fn is_nonnegative(&self) -> bool {
        self.nonneg
    }

    /// Position of the first negative entry in row-major order.
    pub fn first_negative(&self) -> Option<(usize, usize)> {
        let zero = S::zero();
        self.data
            .iter()
            .position(|x| *x < zero)
            .map(|p| (p / self.cols, p % self.cols))
    }

    pub fn require_nonnegative(&self) -> Result<()> {
        match self.first_negative() {
            Some((row, col)) => Err(Error::NegativeEntry { row, col }),
            None => Ok(()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Self { rows: self.cols, cols: self.rows, data, nonneg: self.nonneg }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(alloc::format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = S::zero();
                for l in 0..self.cols {
                    acc = acc + self.get(i, l).clone() * other.get(l, j).clone();
                }
                data.push(acc);
            }
        }
        Self::new(self.rows, other.cols, data)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Self::new(self.rows, self.cols, data)
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(alloc::format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        Self::from_fn(self.rows, cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(alloc::format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self::new(self.rows + other.rows, self.cols, data)
    }

    /// Submatrix picking the listed rows and columns (in that order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.iter().any(|&i| i >= self.rows) || cols.iter().any(|&j| j >= self.cols) {
            return Err(Error::DimensionMismatch("selection index out of range".into()));
        }
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn rank(&self) -> usize {
        S::matrix_rank(self)
    }

    pub fn to_float(&self) -> FloatMatrix {
        FloatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Scalar::to_f64).collect(),
            nonneg: self.nonneg,
        }
    }

    /// Largest absolute entry of `self - other`, as a float.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch("max_abs_diff shape mismatch".into()));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.clone() - b.clone()).abs_value().to_f64())
            .fold(0.0, f64::max))
    }

    /// Indices of rows that contain a nonzero entry.
    pub fn nonzero_rows(&self) -> Vec<usize> {
        (0..self.rows).filter(|&i| self.row(i).iter().any(|x| !x.is_zero())).collect()
    }

    /// Indices of columns that contain a nonzero entry.
    pub fn nonzero_cols(&self) -> Vec<usize> {
        (0..self.cols)
            .filter(|&j| (0..self.rows).any(|i| !self.get(i, j).is_zero()))
            .collect()
    }
}

impl ExactMatrix {
    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| Rational::from_integer(x.into())).collect())
    }

    /// The 4x4 Robbins matrix: rank three, nonnegative rank four.
    pub fn robbins() -> Self {
        Self::from_i64(4, 4, &[1, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 1])
            .expect("static shape")
    }

    /// Circulant matrix whose first row is `first_row`; row `i` is the first
    /// row rotated right by `i`.
    pub fn circulant(first_row: &[Rational]) -> Self {
        let n = first_row.len();
        Self::from_fn(n, n, |i, j| first_row[(j + n - i) % n].clone()).expect("square shape")
    }
}

impl FloatMatrix {
    /// Circulant matrix over floats; same convention as [`ExactMatrix::circulant`].
    pub fn circulant(first_row: &[f64]) -> Result<Self> {
        let n = first_row.len();
        Self::from_fn(n, n, |i, j| first_row[(j + n - i) % n])
    }

    /// Exact rational image of every (finite) binary float entry.
    pub fn to_exact(&self) -> ExactMatrix {
        let data = self
            .data
            .iter()
            .map(|&x| Rational::from_float(x).expect("finite entries"))
            .collect();
        ExactMatrix { rows: self.rows, cols: self.cols, data, nonneg: self.nonneg }
    }

    /// Copy with entries in `[-tol, 0)` set to zero; `None` if an entry is
    /// below `-tol`.
    pub fn clamp_small_negatives(&self, tol: f64) -> Option<Self> {
        let mut data = self.data.clone();
        for x in &mut data {
            if *x < 0.0 {
                if *x < -tol {
                    return None;
                }
                *x = 0.0;
            }
        }
        Some(Self { rows: self.rows, cols: self.cols, data, nonneg: true })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// A matrix of either scalar kind, as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMatrix {
    Exact(ExactMatrix),
    Float(FloatMatrix),
}

impl AnyMatrix {
    pub fn rows(&self) -> usize {
        match self {
            Self::Exact(m) => m.rows(),
            Self::Float(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Self::Exact(m) => m.cols(),
            Self::Float(m) => m.cols(),
        }
    }

    pub fn kind(&self) -> ScalarKind {
        match self {
            Self::Exact(_) => ScalarKind::Rational,
            Self::Float(_) => ScalarKind::Float,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            Self::Exact(m) => m.is_nonnegative(),
            Self::Float(m) => m.is_nonnegative(),
        }
    }

    pub fn require_nonnegative(&self) -> Result<()> {
        match self {
            Self::Exact(m) => m.require_nonnegative(),
            Self::Float(m) => m.require_nonnegative(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Self::Exact(m) => m.rank(),
            Self::Float(m) => m.rank(),
        }
    }

    pub fn to_float(&self) -> FloatMatrix {
        match self {
            Self::Exact(m) => m.to_float(),
            Self::Float(m) => m.clone(),
        }
    }

    /// Exact view: rationals as-is, floats via their exact binary value.
    pub fn to_exact(&self) -> ExactMatrix {
        match self {
            Self::Exact(m) => m.clone(),
            Self::Float(m) => m.to_exact(),
        }
    }

    pub fn transpose(&self) -> Self {
        match self {
            Self::Exact(m) => Self::Exact(m.transpose()),
            Self::Float(m) => Self::Float(m.transpose()),
        }
    }
}

impl From<ExactMatrix> for AnyMatrix {
    fn from(m: ExactMatrix) -> Self {
        Self::Exact(m)
    }
}

impl From<FloatMatrix> for AnyMatrix {
    fn from(m: FloatMatrix) -> Self {
        Self::Float(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constructor_rejects_wrong_entry_count() {
        let err = FloatMatrix::new(2, 2, vec![1.0; 3]).unwrap_err();
        assert_eq!(err, Error::EntryCount { rows: 2, cols: 2, len: 3 });
    }

    #[test]
    fn constructor_rejects_non_finite() {
        let err = FloatMatrix::new(2, 2, vec![1.0, f64::NAN, 0.0, 1.0]).unwrap_err();
        assert_eq!(err, Error::NonFinite { row: 0, col: 1 });
        assert!(FloatMatrix::new(1, 1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn nonnegative_flag_tracks_entries() {
        let m = ExactMatrix::from_i64(2, 2, &[1, 0, 0, 2]).unwrap();
        assert!(m.is_nonnegative());
        let m = ExactMatrix::from_i64(2, 2, &[1, 0, -1, 2]).unwrap();
        assert!(!m.is_nonnegative());
        assert_eq!(m.first_negative(), Some((1, 0)));
        assert!(!m.transpose().is_nonnegative());
    }

    #[test]
    fn circulant_convention() {
        let c = ExactMatrix::circulant(&[rat(2, 1), rat(1, 1), rat(0, 1), rat(1, 1)]);
        let expected = ExactMatrix::from_i64(4, 4, &[2, 1, 0, 1, 1, 2, 1, 0, 0, 1, 2, 1, 1, 0, 1, 2]).unwrap();
        assert_eq!(c, expected);
    }

    #[test]
    fn stacking_and_selection() {
        let a = ExactMatrix::from_i64(2, 1, &[1, 2]).unwrap();
        let b = ExactMatrix::from_i64(2, 2, &[3, 4, 5, 6]).unwrap();
        let h = a.hstack(&b).unwrap();
        assert_eq!(h, ExactMatrix::from_i64(2, 3, &[1, 3, 4, 2, 5, 6]).unwrap());
        let v = b.vstack(&a.transpose()).unwrap();
        assert_eq!(v.shape(), (3, 2));
        assert_eq!(h.select(&[1], &[2, 0]).unwrap(), ExactMatrix::from_i64(1, 2, &[6, 2]).unwrap());
        assert!(a.hstack(&ExactMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn float_to_exact_is_exact() {
        let f = FloatMatrix::new(1, 2, vec![0.5, 0.1]).unwrap();
        let e = f.to_exact();
        assert_eq!(e.get(0, 0), &rat(1, 2));
        assert_eq!(Scalar::to_f64(e.get(0, 1)), 0.1);
    }

    #[test]
    fn clamping_small_negatives() {
        let f = FloatMatrix::new(1, 3, vec![1.0, -1e-12, 0.0]).unwrap();
        let c = f.clamp_small_negatives(1e-9).unwrap();
        assert!(c.is_nonnegative());
        assert_eq!(c.entries(), &[1.0, 0.0, 0.0]);
        assert!(f.clamp_small_negatives(1e-13).is_none());
    }
}
