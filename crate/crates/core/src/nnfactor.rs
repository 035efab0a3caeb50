//! Nonnegative factorization witnesses and the transfer laws between them.
//!
//! A [`NonnegFactorization`] `(L, R)` with `L: m×k`, `R: k×n`, both entrywise
//! nonnegative, certifies `rank⁺(LR) <= k`. Witnesses always carry both
//! factors so that any claim above the rank lower bound can be re-checked
//! with [`verify`].

use alloc::format;

use crate::error::{Error, Result};
use crate::matcore::{AnyMatrix, ExactMatrix, FloatMatrix, Matrix, Rational, Scalar};

/// Default max-entry tolerance for float witnesses.
pub const FLOAT_VERIFY_TOL: f64 = 1e-9;

/// `T = L R` with `L, R >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegFactorization<S> {
    left: Matrix<S>,
    right: Matrix<S>,
}

impl<S: Scalar> NonnegFactorization<S> {
    pub fn new(left: Matrix<S>, right: Matrix<S>) -> Result<Self> {
        if left.cols() != right.rows() {
            return Err(Error::DimensionMismatch(format!(
                "inner dimensions differ: L is {}x{}, R is {}x{}",
                left.rows(),
                left.cols(),
                right.rows(),
                right.cols()
            )));
        }
        left.require_nonnegative()?;
        right.require_nonnegative()?;
        Ok(Self { left, right })
    }

    /// The `k = 0` witness of the `m×n` zero matrix.
    pub fn empty(m: usize, n: usize) -> Self {
        Self { left: Matrix::zeros(m, 0), right: Matrix::zeros(0, n) }
    }

    /// Inner dimension.
    #[inline]
    pub fn k(&self) -> usize {
        self.left.cols()
    }

    #[inline]
    pub fn left(&self) -> &Matrix<S> {
        &self.left
    }

    #[inline]
    pub fn right(&self) -> &Matrix<S> {
        &self.right
    }

    /// Shape of the factored matrix.
    pub fn target_shape(&self) -> (usize, usize) {
        (self.left.rows(), self.right.cols())
    }

    pub fn into_parts(self) -> (Matrix<S>, Matrix<S>) {
        (self.left, self.right)
    }

    pub fn product(&self) -> Matrix<S> {
        self.left.matmul(&self.right).expect("inner dimensions checked at construction")
    }

    /// Maximum absolute entry of `LR - T`.
    pub fn residual(&self, t: &Matrix<S>) -> Result<f64> {
        self.check_shape(t)?;
        self.product().max_abs_diff(t)
    }

    fn check_shape(&self, t: &Matrix<S>) -> Result<()> {
        if self.target_shape() != t.shape() {
            let (m, n) = self.target_shape();
            return Err(Error::DimensionMismatch(format!(
                "witness factors a {m}x{n} matrix, target is {}x{}",
                t.rows(),
                t.cols()
            )));
        }
        Ok(())
    }

    pub fn to_float(&self) -> NonnegFactorization<f64> {
        NonnegFactorization { left: self.left.to_float(), right: self.right.to_float() }
    }
}

impl NonnegFactorization<f64> {
    /// Accepts float factors whose negative entries are all within `tol` of
    /// zero; such entries are clamped to zero in the stored witness.
    pub fn from_raw_clamped(left: FloatMatrix, right: FloatMatrix, tol: f64) -> Result<Self> {
        let l = left
            .clamp_small_negatives(tol)
            .ok_or_else(|| neg_error(&left))?;
        let r = right
            .clamp_small_negatives(tol)
            .ok_or_else(|| neg_error(&right))?;
        Self::new(l, r)
    }
}

fn neg_error(m: &FloatMatrix) -> Error {
    let (row, col) = m.first_negative().unwrap_or((0, 0));
    Error::NegativeEntry { row, col }
}

/// True iff `L R` matches `T` within `tol` in every entry.
///
/// With rational scalars and `tol = 0` this is exact equality. Nonnegativity
/// of the factors is an invariant of [`NonnegFactorization`].
pub fn verify<S: Scalar>(t: &Matrix<S>, f: &NonnegFactorization<S>, tol: &S) -> Result<bool> {
    f.check_shape(t)?;
    let p = f.product();
    Ok(p.entries()
        .iter()
        .zip(t.entries())
        .all(|(a, b)| (a.clone() - b.clone()).abs_value() <= *tol))
}

/// Exact check for rational witnesses.
pub fn verify_exact(t: &ExactMatrix, f: &NonnegFactorization<Rational>) -> Result<bool> {
    verify(t, f, &Rational::from_integer(0.into()))
}

/// Lower and upper bounds on the nonnegative rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankBounds {
    /// `rank(T)`.
    pub lower: usize,
    /// `min(m, n)`, or `0` for the zero matrix.
    pub upper: usize,
    /// `⌈6·min(m, n)/7⌉`, a known upper bound for rank-three matrices from the
    /// literature. Informational only; no witness backs it.
    pub reference_upper: usize,
}

pub fn bounds<S: Scalar>(t: &Matrix<S>) -> Result<RankBounds> {
    t.require_nonnegative()?;
    let lower = t.rank();
    let min_dim = t.rows().min(t.cols());
    let upper = if lower == 0 { 0 } else { min_dim };
    Ok(RankBounds { lower, upper, reference_upper: (6 * min_dim).div_ceil(7) })
}

/// Witness for `T` with `k = min(m, n)`: `(T, I)` or `(I, T)`; `k = 0` for
/// the zero matrix.
pub fn trivial_witness<S: Scalar>(t: &Matrix<S>) -> Result<NonnegFactorization<S>> {
    t.require_nonnegative()?;
    let (m, n) = t.shape();
    if t.is_zero() {
        return Ok(NonnegFactorization::empty(m, n));
    }
    if n <= m {
        NonnegFactorization::new(t.clone(), Matrix::identity(n))
    } else {
        NonnegFactorization::new(Matrix::identity(m), t.clone())
    }
}

/// `(Rᵀ, Lᵀ)`: a witness for `Tᵀ` with the same `k`.
pub fn transpose_witness<S: Scalar>(f: &NonnegFactorization<S>) -> NonnegFactorization<S> {
    NonnegFactorization { left: f.right.transpose(), right: f.left.transpose() }
}

/// Witness for `B·A` from witnesses of `A` and `B`, keeping the smaller inner
/// dimension: `(B·L_A, R_A)` if `k_A <= k_B`, else `(L_B, R_B·A)`.
pub fn product_witness<S: Scalar>(
    a: &Matrix<S>,
    f_a: &NonnegFactorization<S>,
    b: &Matrix<S>,
    f_b: &NonnegFactorization<S>,
) -> Result<NonnegFactorization<S>> {
    a.require_nonnegative()?;
    b.require_nonnegative()?;
    f_a.check_shape(a)?;
    f_b.check_shape(b)?;
    if b.cols() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "B is {}x{}, A is {}x{}; B·A undefined",
            b.rows(),
            b.cols(),
            a.rows(),
            a.cols()
        )));
    }
    if f_a.k() <= f_b.k() {
        NonnegFactorization::new(b.matmul(&f_a.left)?, f_a.right.clone())
    } else {
        NonnegFactorization::new(f_b.left.clone(), f_b.right.matmul(a)?)
    }
}

/// Witness for `A + B`: `[L_A | L_B]`, `[R_A; R_B]`.
pub fn sum_witness<S: Scalar>(
    f_a: &NonnegFactorization<S>,
    f_b: &NonnegFactorization<S>,
) -> Result<NonnegFactorization<S>> {
    if f_a.target_shape() != f_b.target_shape() {
        return Err(Error::DimensionMismatch(format!(
            "summands have shapes {:?} and {:?}",
            f_a.target_shape(),
            f_b.target_shape()
        )));
    }
    NonnegFactorization::new(f_a.left.hstack(&f_b.left)?, f_a.right.vstack(&f_b.right)?)
}

/// Witness for `B·T·A`: `(B·L_T, R_T·A)`, same `k`.
pub fn sandwich_witness<S: Scalar>(
    f_t: &NonnegFactorization<S>,
    a: &Matrix<S>,
    b: &Matrix<S>,
) -> Result<NonnegFactorization<S>> {
    a.require_nonnegative()?;
    b.require_nonnegative()?;
    NonnegFactorization::new(b.matmul(&f_t.left)?, f_t.right.matmul(a)?)
}

/// A witness of either scalar kind.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyFactorization {
    Exact(NonnegFactorization<Rational>),
    Float(NonnegFactorization<f64>),
}

impl AnyFactorization {
    pub fn k(&self) -> usize {
        match self {
            Self::Exact(f) => f.k(),
            Self::Float(f) => f.k(),
        }
    }

    pub fn to_float(&self) -> NonnegFactorization<f64> {
        match self {
            Self::Exact(f) => f.to_float(),
            Self::Float(f) => f.clone(),
        }
    }

    /// Verifies against a matrix of any kind. Exact against exact compares
    /// exactly; every other combination compares in floats within `tol`.
    pub fn verify(&self, t: &AnyMatrix, tol: f64) -> Result<bool> {
        match (self, t) {
            (Self::Exact(f), AnyMatrix::Exact(m)) => verify_exact(m, f),
            _ => verify(&t.to_float(), &self.to_float(), &tol),
        }
    }

    pub fn residual(&self, t: &AnyMatrix) -> Result<f64> {
        match (self, t) {
            (Self::Exact(f), AnyMatrix::Exact(m)) => f.residual(m),
            _ => self.to_float().residual(&t.to_float()),
        }
    }
}

impl From<NonnegFactorization<Rational>> for AnyFactorization {
    fn from(f: NonnegFactorization<Rational>) -> Self {
        Self::Exact(f)
    }
}

impl From<NonnegFactorization<f64>> for AnyFactorization {
    fn from(f: NonnegFactorization<f64>) -> Self {
        Self::Float(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{rat, sample_kernel, GridSpec};
    use alloc::vec;
    use alloc::vec::Vec;

    fn ex(rows: usize, cols: usize, v: &[i64]) -> ExactMatrix {
        ExactMatrix::from_i64(rows, cols, v).unwrap()
    }

    #[test]
    fn robbins_times_identity_verifies() {
        let t = ExactMatrix::robbins();
        let f = NonnegFactorization::new(t.clone(), ExactMatrix::identity(4)).unwrap();
        assert!(verify_exact(&t, &f).unwrap());
        assert_eq!(f.k(), 4);
    }

    #[test]
    fn outer_product_verifies() {
        let t = ex(2, 2, &[1, 2, 2, 4]);
        let f = NonnegFactorization::new(ex(2, 1, &[1, 2]), ex(1, 2, &[1, 2])).unwrap();
        assert!(verify_exact(&t, &f).unwrap());
    }

    #[test]
    fn robbins_rank_three_candidates_fail() {
        // A handful of natural k = 3 candidates built from Robbins columns;
        // none can reproduce the matrix.
        let t = ExactMatrix::robbins();
        let cols: Vec<Vec<usize>> = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
        for pick in cols {
            let l = t.select(&[0, 1, 2, 3], &pick).unwrap();
            // Best nonnegative 0/1 combination per column is still not exact.
            for mask in 0u32..(1 << 12) {
                let r = ExactMatrix::from_fn(3, 4, |i, j| rat(((mask >> (i * 4 + j)) & 1) as i64, 1)).unwrap();
                let f = NonnegFactorization::new(l.clone(), r).unwrap();
                assert!(!verify_exact(&t, &f).unwrap());
            }
        }
    }

    #[test]
    fn rejects_negative_factor_and_bad_dims() {
        assert!(matches!(
            NonnegFactorization::new(ex(1, 1, &[-1]), ex(1, 1, &[1])),
            Err(Error::NegativeEntry { .. })
        ));
        assert!(matches!(
            NonnegFactorization::new(ex(2, 2, &[1, 0, 0, 1]), ex(1, 2, &[1, 1])),
            Err(Error::DimensionMismatch(_))
        ));
        let f = NonnegFactorization::new(ex(2, 1, &[1, 1]), ex(1, 2, &[1, 1])).unwrap();
        assert!(verify_exact(&ExactMatrix::zeros(3, 2), &f).is_err());
    }

    #[test]
    fn float_clamping_witness() {
        let l = FloatMatrix::new(2, 1, vec![1.0, -1e-12]).unwrap();
        let r = FloatMatrix::new(1, 1, vec![2.0]).unwrap();
        let f = NonnegFactorization::from_raw_clamped(l.clone(), r.clone(), 1e-9).unwrap();
        assert_eq!(f.left().entries(), &[1.0, 0.0]);
        let t = FloatMatrix::new(2, 1, vec![2.0, 0.0]).unwrap();
        assert!(verify(&t, &f, &1e-9).unwrap());
        assert!(NonnegFactorization::from_raw_clamped(l, r, 1e-13).is_err());
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(
            bounds(&ExactMatrix::robbins()).unwrap(),
            RankBounds { lower: 3, upper: 4, reference_upper: 4 }
        );
        let z = bounds(&ExactMatrix::zeros(5, 7)).unwrap();
        assert_eq!((z.lower, z.upper), (0, 0));
        let c = ExactMatrix::circulant(&[rat(2, 1), rat(1, 1), rat(0, 1), rat(1, 1)]);
        let b = bounds(&c).unwrap();
        assert_eq!((b.lower, b.upper), (3, 4));
        assert!(matches!(bounds(&ex(1, 2, &[1, -1])), Err(Error::NegativeEntry { row: 0, col: 1 })));
        // reference bound ⌈6·7/7⌉ = 6, ⌈6·8/7⌉ = 7
        assert_eq!(bounds(&ExactMatrix::identity(7)).unwrap().reference_upper, 6);
        assert_eq!(bounds(&ExactMatrix::identity(8)).unwrap().reference_upper, 7);
    }

    #[test]
    fn transpose_examples() {
        let t = ExactMatrix::robbins();
        let f = NonnegFactorization::new(t.clone(), ExactMatrix::identity(4)).unwrap();
        let ft = transpose_witness(&f);
        assert_eq!(ft.left(), &ExactMatrix::identity(4));
        assert_eq!(ft.right(), &t.transpose());
        assert!(verify_exact(&t.transpose(), &ft).unwrap());
        assert_eq!(transpose_witness(&ft), f);

        let z = NonnegFactorization::<Rational>::empty(2, 3);
        let zt = transpose_witness(&z);
        assert_eq!((zt.k(), zt.target_shape()), (0, (3, 2)));
        assert!(verify_exact(&ExactMatrix::zeros(3, 2), &zt).unwrap());
    }

    #[test]
    fn product_examples() {
        let a = ex(3, 2, &[1, 0, 2, 1, 0, 3]);
        let f_a = trivial_witness(&a).unwrap();
        let b = ExactMatrix::identity(3);
        let f_b = trivial_witness(&b).unwrap();
        let f = product_witness(&a, &f_a, &b, &f_b).unwrap();
        assert_eq!(f, f_a);

        let u = ex(3, 1, &[1, 2, 0]);
        let f_u = NonnegFactorization::new(u.clone(), ExactMatrix::identity(1)).unwrap();
        let bb = ex(2, 3, &[1, 1, 0, 0, 2, 5]);
        let f_bb = trivial_witness(&bb).unwrap();
        let f = product_witness(&u, &f_u, &bb, &f_bb).unwrap();
        assert_eq!(f.k(), 1);
        assert!(verify_exact(&bb.matmul(&u).unwrap(), &f).unwrap());

        // Square of the n = 4 kernel matrix in floats.
        let g = GridSpec::aligned(4).unwrap();
        let k = sample_kernel(&g, &g);
        let f_k = trivial_witness(&k).unwrap();
        let f = product_witness(&k, &f_k, &k, &f_k).unwrap();
        assert_eq!(f.k(), 4);
        assert!(verify(&k.matmul(&k).unwrap(), &f, &1e-9).unwrap());

        assert!(product_witness(&bb, &f_bb, &bb, &f_bb).is_err());
    }

    #[test]
    fn sum_examples() {
        let b = ex(2, 2, &[1, 2, 3, 4]);
        let f_b = trivial_witness(&b).unwrap();
        let f_0 = NonnegFactorization::<Rational>::empty(2, 2);
        assert_eq!(sum_witness(&f_0, &f_b).unwrap(), f_b);

        let p = NonnegFactorization::new(ex(2, 1, &[1, 0]), ex(1, 2, &[1, 1])).unwrap();
        let q = NonnegFactorization::new(ex(2, 1, &[1, 1]), ex(1, 2, &[0, 2])).unwrap();
        let s = sum_witness(&p, &q).unwrap();
        assert_eq!(s.k(), 2);
        assert!(verify_exact(&ex(2, 2, &[1, 3, 0, 2]), &s).unwrap());

        // Robbins as the sum of column_j ⊗ e_j.
        let t = ExactMatrix::robbins();
        let mut acc = NonnegFactorization::<Rational>::empty(4, 4);
        for j in 0..4 {
            let col = t.select(&[0, 1, 2, 3], &[j]).unwrap();
            let e = ExactMatrix::from_fn(1, 4, |_, c| rat((c == j) as i64, 1)).unwrap();
            acc = sum_witness(&acc, &NonnegFactorization::new(col, e).unwrap()).unwrap();
        }
        assert_eq!(acc.k(), 4);
        assert!(verify_exact(&t, &acc).unwrap());

        assert!(sum_witness(&p, &NonnegFactorization::empty(3, 2)).is_err());
    }

    #[test]
    fn sandwich_examples() {
        let t = ExactMatrix::robbins();
        let f = trivial_witness(&t).unwrap();
        let i4 = ExactMatrix::identity(4);
        assert_eq!(sandwich_witness(&f, &i4, &i4).unwrap(), f);

        let da = ExactMatrix::diagonal(&[rat(1, 2), rat(3, 1), rat(1, 1), rat(5, 7)]);
        let db = ExactMatrix::diagonal(&[rat(2, 1), rat(1, 3), rat(4, 1), rat(1, 1)]);
        let s = sandwich_witness(&f, &da, &db).unwrap();
        assert_eq!(s.k(), 4);
        let target = db.matmul(&t).unwrap().matmul(&da).unwrap();
        assert!(verify_exact(&target, &s).unwrap());
    }

    #[test]
    fn sandwich_extracts_kernel_submatrix() {
        let big = GridSpec::aligned(8).unwrap();
        let small = GridSpec::aligned(4).unwrap();
        let k8 = sample_kernel(&big, &big);
        let k4 = sample_kernel(&small, &small);
        let f8 = trivial_witness(&k8).unwrap();
        // Row selection on the left, column selection on the right.
        let sel_rows = FloatMatrix::from_fn(4, 8, |i, j| if j == 2 * i { 1.0 } else { 0.0 }).unwrap();
        let sel_cols = sel_rows.transpose();
        let f4 = sandwich_witness(&f8, &sel_cols, &sel_rows).unwrap();
        assert_eq!(f4.k(), f8.k());
        assert!(verify(&k4, &f4, &1e-9).unwrap());
    }

    #[test]
    fn any_factorization_mixed_verify() {
        let t = ExactMatrix::robbins();
        let f = AnyFactorization::Exact(trivial_witness(&t).unwrap());
        assert!(f.verify(&AnyMatrix::Exact(t.clone()), 0.0).unwrap());
        assert!(f.verify(&AnyMatrix::Float(t.to_float()), 1e-9).unwrap());
        assert_eq!(f.residual(&AnyMatrix::Exact(t)).unwrap(), 0.0);
    }
}
