use alloc::vec::Vec;

use super::{Matrix, Scalar};
use crate::error::{Error, Result};

/// A permutation of `0..n`, stored as its image list: applied on the left,
/// row `i` of the result is row `p[i]` of the input; applied on the right,
/// column `j` of the result is column `p[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = alloc::vec![false; n];
        for &p in &images {
            if p >= n || seen[p] {
                return Err(Error::InvalidPermutation(alloc::format!("{images:?} is not a permutation of 0..{n}")));
            }
            seen[p] = true;
        }
        Ok(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// `i -> (i + shift) mod n`.
    pub fn cyclic(n: usize, shift: usize) -> Self {
        Self((0..n).map(|i| (i + shift) % n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = alloc::vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Self(inv)
    }

    /// The permutation as a 0/1 matrix acting on the left.
    pub fn to_matrix<S: Scalar>(&self) -> Matrix<S> {
        let n = self.0.len();
        Matrix::from_fn(n, n, |i, j| if self.0[i] == j { S::one() } else { S::zero() })
            .expect("square")
    }
}

/// `P_left · D_left · M · D_right · P_right` with strictly positive diagonals.
pub fn scale_and_permute<S: Scalar>(
    m: &Matrix<S>,
    d_left: &[S],
    d_right: &[S],
    p_left: &Permutation,
    p_right: &Permutation,
) -> Result<Matrix<S>> {
    let (rows, cols) = m.shape();
    if d_left.len() != rows || p_left.len() != rows || d_right.len() != cols || p_right.len() != cols {
        return Err(Error::DimensionMismatch(alloc::format!(
            "scalings/permutations do not match a {rows}x{cols} matrix"
        )));
    }
    let zero = S::zero();
    for (index, d) in d_left.iter().chain(d_right).enumerate() {
        if *d <= zero {
            return Err(Error::NonPositiveDiagonal { index });
        }
    }
    Matrix::from_fn(rows, cols, |i, j| {
        let (a, b) = (p_left.0[i], p_right.0[j]);
        d_left[a].clone() * m.get(a, b).clone() * d_right[b].clone()
    })
}
