use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::ExactMatrix;

/// Rank over the rationals by fraction-free (Bareiss) elimination.
///
/// Each row is first scaled by the lcm of its denominators so elimination
/// runs over the integers; every intermediate value is a minor of the scaled
/// matrix, so the divisions below are exact.
pub fn rank_exact(m: &ExactMatrix) -> usize {
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<BigInt>> = (0..rows).map(|i| integer_row(m, i)).collect();

    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        let (head, tail) = a.split_at_mut(rank + 1);
        let prow = &head[rank];
        for row in tail.iter_mut() {
            for j in col + 1..cols {
                let v = &row[j] * &prow[col] - &row[col] * &prow[j];
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

fn integer_row(m: &ExactMatrix, i: usize) -> Vec<BigInt> {
    let row = m.row(i);
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{rat, Rational};
    use alloc::vec;
    use proptest::prelude::*;

    /// Plain rational Gauss-Jordan elimination; independent of the Bareiss path.
    fn rank_by_rational_elimination(m: &ExactMatrix) -> usize {
        let (rows, cols) = m.shape();
        let mut a: Vec<Vec<Rational>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
        let mut rank = 0;
        for col in 0..cols {
            let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else { continue };
            a.swap(rank, p);
            let pivot = a[rank][col].clone();
            for r in 0..rows {
                if r != rank && !a[r][col].is_zero() {
                    let f = a[r][col].clone() / pivot.clone();
                    for j in 0..cols {
                        let v = a[rank][j].clone() * f.clone();
                        a[r][j] = a[r][j].clone() - v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn robbins_has_rank_three() {
        assert_eq!(rank_exact(&ExactMatrix::robbins()), 3);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        assert_eq!(rank_exact(&ExactMatrix::zeros(4, 4)), 0);
        assert_eq!(rank_exact(&ExactMatrix::zeros(0, 3)), 0);
    }

    #[test]
    fn circulant_2101_has_rank_three() {
        // Eigenvalues f(i^k), f(x) = 2 + x + x^3: {4, 2, 0, 2}.
        let c = ExactMatrix::circulant(&[rat(2, 1), rat(1, 1), rat(0, 1), rat(1, 1)]);
        assert_eq!(rank_exact(&c), 3);
    }

    #[test]
    fn fractional_entries() {
        let m = ExactMatrix::new(2, 2, vec![rat(1, 3), rat(2, 7), rat(2, 3), rat(4, 7)]).unwrap();
        assert_eq!(rank_exact(&m), 1);
        let m = ExactMatrix::new(2, 2, vec![rat(1, 3), rat(2, 7), rat(2, 3), rat(3, 7)]).unwrap();
        assert_eq!(rank_exact(&m), 2);
    }

    fn small_int_matrix() -> impl Strategy<Value = ExactMatrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..4, r * c)
                .prop_map(move |v| ExactMatrix::from_i64(r, c, &v).unwrap())
        })
    }

    proptest! {
        #[test]
        fn bareiss_matches_rational_elimination(m in small_int_matrix()) {
            prop_assert_eq!(rank_exact(&m), rank_by_rational_elimination(&m));
        }

        #[test]
        fn rank_is_transpose_invariant(m in small_int_matrix()) {
            prop_assert_eq!(rank_exact(&m), rank_exact(&m.transpose()));
        }
    }
}
