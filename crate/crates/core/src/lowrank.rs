//! Exact nonnegative factorization with `k = rank(T)` for `rank(T) <= 2`.
//!
//! In rank two the columns of a nonnegative matrix span a pointed planar
//! cone; its two extreme rays are themselves (scaled) columns of `T`, hence
//! nonnegative, and every column is a nonnegative combination of them. Those
//! two columns form `L`, and `R` holds the coordinates of each column in the
//! basis `L`, obtained from the dual basis by a 2×2 solve.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::matcore::{rank_exact, ExactMatrix, Rational};
use crate::nnfactor::NonnegFactorization;

/// Factorization of a nonnegative rational matrix of rank at most two, with
/// inner dimension equal to the rank.
pub fn factor_rank_le2(t: &ExactMatrix) -> Result<NonnegFactorization<Rational>> {
    t.require_nonnegative()?;
    let rank = rank_exact(t);
    let (m, n) = t.shape();
    match rank {
        0 => Ok(NonnegFactorization::empty(m, n)),
        1 => factor_rank1(t),
        2 => {
            let gens = extreme_columns(t)?;
            factor_on_generators(t, gens[0], gens[1])
        }
        _ => Err(Error::RankTooHigh { rank }),
    }
}

/// Column indices of the extreme rays of the column cone of a rank-2
/// nonnegative matrix, in increasing index order.
///
/// Collinear candidates collapse to the one with the largest entry sum
/// (first index on ties).
pub fn extreme_columns(t: &ExactMatrix) -> Result<[usize; 2]> {
    t.require_nonnegative()?;
    let rank = rank_exact(t);
    if rank != 2 {
        return Err(Error::InvalidParameter(alloc::format!(
            "extreme columns need a rank-2 matrix, got rank {rank}"
        )));
    }
    let cols: Vec<Vec<Rational>> = (0..t.cols()).map(|j| t.col(j)).collect();
    let nonzero: Vec<usize> = (0..cols.len()).filter(|&j| cols[j].iter().any(|x| !x.is_zero())).collect();

    let b1 = nonzero[0];
    let b2 = *nonzero
        .iter()
        .find(|&&j| independent_rows(&cols[b1], &cols[j]).is_some())
        .expect("rank two has two independent columns");
    let (p, q) = independent_rows(&cols[b1], &cols[b2]).expect("independent");

    // Coordinates of every column in the basis (b1, b2).
    let coords: Vec<[Rational; 2]> = nonzero
        .iter()
        .map(|&j| solve2(&cols[b1], &cols[b2], &cols[j], p, q))
        .collect();
    let weight = |j: usize| -> Rational { cols[j].iter().cloned().sum() };
    let cross = |u: &[Rational; 2], v: &[Rational; 2]| -> Rational {
        u[0].clone() * v[1].clone() - u[1].clone() * v[0].clone()
    };

    // `sign = 1`: most clockwise ray (all others counterclockwise of it);
    // `sign = -1`: most counterclockwise.
    let extreme = |sign: i32| -> usize {
        let mut best = 0usize;
        for i in 1..nonzero.len() {
            let c = cross(&coords[best], &coords[i]);
            let c = if sign < 0 { -c } else { c };
            if c.is_negative() || (c.is_zero() && weight(nonzero[i]) > weight(nonzero[best])) {
                best = i;
            }
        }
        nonzero[best]
    };
    let (a, b) = (extreme(1), extreme(-1));
    Ok(if a < b { [a, b] } else { [b, a] })
}

fn factor_rank1(t: &ExactMatrix) -> Result<NonnegFactorization<Rational>> {
    let j0 = t.nonzero_cols()[0];
    let y = t.col(j0);
    let p = y.iter().position(|x| !x.is_zero()).expect("nonzero column");
    let left = ExactMatrix::new(y.len(), 1, y.clone())?;
    let right = ExactMatrix::from_fn(1, t.cols(), |_, j| t.get(p, j).clone() / y[p].clone())?;
    NonnegFactorization::new(left, right)
}

fn factor_on_generators(t: &ExactMatrix, g1: usize, g2: usize) -> Result<NonnegFactorization<Rational>> {
    let (m, n) = t.shape();
    let y1 = t.col(g1);
    let y2 = t.col(g2);
    let (p, q) = independent_rows(&y1, &y2).expect("extreme columns are independent");
    let mut right = vec![Rational::zero(); 2 * n];
    for j in 0..n {
        let c = t.col(j);
        if c.iter().all(Zero::is_zero) {
            continue;
        }
        let [lambda, mu] = solve2(&y1, &y2, &c, p, q);
        right[j] = lambda;
        right[n + j] = mu;
    }
    let left = ExactMatrix::from_fn(m, 2, |i, k| if k == 0 { y1[i].clone() } else { y2[i].clone() })?;
    NonnegFactorization::new(left, ExactMatrix::new(2, n, right)?)
}

/// Rows `(p, q)` with a nonzero 2×2 minor of `[u v]`, if any.
fn independent_rows(u: &[Rational], v: &[Rational]) -> Option<(usize, usize)> {
    let m = u.len();
    for p in 0..m {
        for q in p + 1..m {
            let det = u[p].clone() * v[q].clone() - u[q].clone() * v[p].clone();
            if !det.is_zero() {
                return Some((p, q));
            }
        }
    }
    None
}

/// Coordinates `(α, β)` with `c = α u + β v`, from rows `p, q` (Cramer).
/// Assumes `c` lies in the span of `u, v`.
fn solve2(u: &[Rational], v: &[Rational], c: &[Rational], p: usize, q: usize) -> [Rational; 2] {
    let det = u[p].clone() * v[q].clone() - u[q].clone() * v[p].clone();
    let alpha = (c[p].clone() * v[q].clone() - c[q].clone() * v[p].clone()) / det.clone();
    let beta = (u[p].clone() * c[q].clone() - u[q].clone() * c[p].clone()) / det;
    [alpha, beta]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::rat;
    use crate::nnfactor::verify_exact;

    fn ex(rows: usize, cols: usize, v: &[i64]) -> ExactMatrix {
        ExactMatrix::from_i64(rows, cols, v).unwrap()
    }

    #[test]
    fn rank_one_outer_product() {
        let t = ex(2, 2, &[1, 2, 2, 4]);
        let f = factor_rank_le2(&t).unwrap();
        assert_eq!(f.k(), 1);
        assert_eq!(f.left(), &ex(2, 1, &[1, 2]));
        assert_eq!(f.right(), &ex(1, 2, &[1, 2]));
        assert!(verify_exact(&t, &f).unwrap());
    }

    #[test]
    fn identity_two() {
        let t = ExactMatrix::identity(2);
        let f = factor_rank_le2(&t).unwrap();
        assert_eq!(f.k(), 2);
        assert_eq!(f.left(), &t);
        assert_eq!(f.right(), &t);
    }

    #[test]
    fn path_matrix() {
        let t = ex(2, 3, &[1, 1, 0, 0, 1, 1]);
        let f = factor_rank_le2(&t).unwrap();
        assert_eq!(f.k(), 2);
        assert_eq!(f.left(), &ExactMatrix::identity(2));
        assert_eq!(f.right(), &t);
        assert!(verify_exact(&t, &f).unwrap());
        // the middle column is y1 + y2
        assert_eq!(f.right().col(1), vec![rat(1, 1), rat(1, 1)]);
    }

    #[test]
    fn zero_matrix_and_zero_columns() {
        let f = factor_rank_le2(&ExactMatrix::zeros(3, 2)).unwrap();
        assert_eq!(f.k(), 0);
        let t = ex(3, 4, &[0, 1, 2, 0, 0, 0, 1, 0, 0, 1, 3, 0]);
        let f = factor_rank_le2(&t).unwrap();
        assert_eq!(f.k(), 2);
        assert!(verify_exact(&t, &f).unwrap());
        assert!(f.right().col(0).iter().all(Zero::is_zero));
    }

    #[test]
    fn collinear_extremes_pick_largest() {
        // columns 0 and 2 are collinear and extreme; column 2 is larger.
        let t = ex(2, 4, &[1, 1, 3, 0, 0, 1, 0, 2]);
        assert_eq!(extreme_columns(&t).unwrap(), [2, 3]);
        let f = factor_rank_le2(&t).unwrap();
        assert!(verify_exact(&t, &f).unwrap());
    }

    #[test]
    fn rejects_rank_three_and_negative() {
        assert_eq!(factor_rank_le2(&ExactMatrix::robbins()).unwrap_err(), Error::RankTooHigh { rank: 3 });
        assert!(matches!(factor_rank_le2(&ex(1, 2, &[1, -1])), Err(Error::NegativeEntry { .. })));
    }
}
