use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, sqrt};

use super::FloatMatrix;
use crate::error::{Error, Result};

/// Default relative threshold for numeric rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

const JACOBI_MAX_SWEEPS: usize = 80;

/// Singular values in descending order, by one-sided Jacobi rotations.
///
/// Works on the taller of `m` and `m^T`, so the result has `min(rows, cols)`
/// entries.
pub fn singular_values(m: &FloatMatrix) -> Vec<f64> {
    let (rows, cols) = m.shape();
    let tall = rows >= cols;
    let (h, w) = if tall { (rows, cols) } else { (cols, rows) };
    // Column-major working copy of the tall orientation.
    let mut a: Vec<Vec<f64>> = (0..w)
        .map(|j| (0..h).map(|i| if tall { *m.get(i, j) } else { *m.get(j, i) }).collect())
        .collect();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..w {
            for q in p + 1..w {
                let (alpha, beta, gamma) = a[p].iter().zip(&a[q]).fold((0.0, 0.0, 0.0), |(x, y, z), (u, v)| {
                    (x + u * u, y + v * v, z + u * v)
                });
                if gamma == 0.0 || fabs(gamma) <= f64::EPSILON * sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (fabs(zeta) + sqrt(1.0 + zeta * zeta));
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = c * t;
                let (left, right) = a.split_at_mut(q);
                for (u, v) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (x, y) = (*u, *v);
                    *u = c * x - s * y;
                    *v = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = a.iter().map(|col| sqrt(col.iter().map(|x| x * x).sum())).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Number of singular values exceeding `rel_tol` times the largest one.
pub fn rank_float(m: &FloatMatrix, rel_tol: f64) -> Result<usize> {
    if !(rel_tol > 0.0) || !rel_tol.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("rank tolerance must be positive, got {rel_tol}")));
    }
    let sv = singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > rel_tol * top).count())
}

/// Orthonormal basis of the column space by Gram-Schmidt with column
/// pivoting (largest remaining norm first, re-orthogonalized twice).
///
/// Stops once the largest remaining column norm drops below `rel_tol` times
/// the largest original column norm. Returns the basis vectors (length
/// `rows` each) and the pivot column indices.
pub fn orthonormal_column_basis(m: &FloatMatrix, rel_tol: f64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let (rows, cols) = m.shape();
    let mut rest: Vec<Vec<f64>> = (0..cols).map(|j| m.col(j)).collect();
    let norm = |v: &[f64]| sqrt(v.iter().map(|x| x * x).sum());
    let scale = rest.iter().map(|c| norm(c)).fold(0.0, f64::max);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut pivots = Vec::new();
    if scale == 0.0 {
        return (basis, pivots);
    }
    while basis.len() < rows.min(cols) {
        let (j, best) = rest
            .iter()
            .enumerate()
            .filter(|(j, _)| !pivots.contains(j))
            .map(|(j, c)| (j, norm(c)))
            .fold((usize::MAX, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if j == usize::MAX || best <= rel_tol * scale {
            break;
        }
        let mut q = rest[j].clone();
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = q.iter().zip(b).map(|(x, y)| x * y).sum();
                q.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
        }
        let nq = norm(&q);
        q.iter_mut().for_each(|x| *x /= nq);
        for c in rest.iter_mut() {
            let d: f64 = c.iter().zip(&q).map(|(x, y)| x * y).sum();
            c.iter_mut().zip(&q).for_each(|(x, y)| *x -= d * y);
        }
        basis.push(q);
        pivots.push(j);
    }
    (basis, pivots)
}

/// Solves the square system `a x = b` (row-major `a`) by Gaussian
/// elimination with partial pivoting. `None` if numerically singular.
pub fn solve_small(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = a[i * n..(i + 1) * n].to_vec();
            row.push(b[i]);
            row
        })
        .collect();
    let scale = a.iter().fold(0.0f64, |s, x| s.max(fabs(*x)));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| fabs(m[x][col]).total_cmp(&fabs(m[y][col])))?;
        if fabs(m[p][col]) <= 1e-14 * scale {
            return None;
        }
        m.swap(col, p);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for j in col..=n {
                m[r][j] -= f * m[col][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{grid::sample_kernel, GridSpec, Matrix};

    #[test]
    fn identity_rank() {
        assert_eq!(rank_float(&Matrix::identity(3), 1e-8).unwrap(), 3);
    }

    #[test]
    fn zero_rank() {
        assert_eq!(rank_float(&FloatMatrix::zeros(3, 5), 1e-8).unwrap(), 0);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(rank_float(&Matrix::identity(2), 0.0).is_err());
        assert!(rank_float(&Matrix::identity(2), f64::NAN).is_err());
    }

    #[test]
    fn circulant_float_rank_matches_exact() {
        let c = FloatMatrix::circulant(&[2.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(rank_float(&c, 1e-8).unwrap(), 3);
        let sv = singular_values(&c);
        // Symmetric circulant: singular values are |eigenvalues| = {4, 2, 2, 0}.
        assert!((sv[0] - 4.0).abs() < 1e-12);
        assert!((sv[1] - 2.0).abs() < 1e-12);
        assert!((sv[2] - 2.0).abs() < 1e-12);
        assert!(sv[3].abs() < 1e-12);
    }

    #[test]
    fn kernel_64_has_numeric_rank_three() {
        let g = GridSpec::aligned(64).unwrap();
        let k = sample_kernel(&g, &g);
        assert_eq!(rank_float(&k, 1e-8).unwrap(), 3);
    }

    #[test]
    fn wide_matrix_singular_values() {
        let m = FloatMatrix::new(2, 3, vec![3.0, 0.0, 0.0, 0.0, 4.0, 0.0]).unwrap();
        let sv = singular_values(&m);
        assert_eq!(sv.len(), 2);
        assert!((sv[0] - 4.0).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn basis_spans_columns() {
        let m = FloatMatrix::new(3, 3, vec![1.0, 2.0, 3.0, 0.0, 1.0, 1.0, 1.0, 3.0, 4.0]).unwrap();
        let (basis, pivots) = orthonormal_column_basis(&m, 1e-10);
        assert_eq!(basis.len(), 2);
        assert_eq!(pivots.len(), 2);
        let d: f64 = basis[0].iter().zip(&basis[1]).map(|(x, y)| x * y).sum();
        assert!(d.abs() < 1e-14);
    }

    #[test]
    fn small_solve() {
        let x = solve_small(&[2.0, 1.0, 1.0, 3.0], &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
        assert!(solve_small(&[1.0, 2.0, 2.0, 4.0], &[1.0, 1.0]).is_none());
    }
}
