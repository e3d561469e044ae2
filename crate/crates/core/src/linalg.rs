//! Small dense kernels: determinants, exact rank and null spaces, and
//! orthonormal complements by Householder reflections.

use dashu::rational::RBig;

use crate::real::{Real, Scalar};
use crate::types::Matrix;

/// Determinant by Gaussian elimination with partial (largest-magnitude)
/// pivoting. Exact for rational input.
pub fn det<T: Scalar>(m: &Matrix<T>, bits: u32) -> T {
    let n = m.rows();
    assert_eq!(n, m.cols(), "determinant of a non-square matrix");
    let mut a = m.to_rows();
    let mut d = T::from_i64(1, bits);
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if a[i][k].abs() > a[piv][k].abs() {
                piv = i;
            }
        }
        if a[piv][k].is_zero() {
            return T::from_i64(0, bits);
        }
        if piv != k {
            a.swap(piv, k);
            d = -d;
        }
        let p = a[k][k].clone();
        d = d * p.clone();
        for i in k + 1..n {
            let f = a[i][k].clone() / p.clone();
            if f.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let v = a[i][j].clone() - f.clone() * a[k][j].clone();
                a[i][j] = v;
            }
        }
    }
    d
}

/// Reduced row echelon form over the rationals; returns the pivot columns.
fn rref(m: &Matrix<RBig>) -> (Vec<Vec<RBig>>, Vec<usize>) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.to_rows();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = RBig::from_i64(1, 0) / a[r][c].clone();
        for j in 0..cols {
            a[r][j] = a[r][j].clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let v = a[i][j].clone() - f.clone() * a[r][j].clone();
                    a[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank_exact(m: &Matrix<RBig>) -> usize {
    rref(m).1.len()
}

/// Basis of `{x : M x = 0}` as the columns of an `n × (n − rank)` matrix.
pub fn nullspace_exact(m: &Matrix<RBig>) -> Matrix<RBig> {
    let cols = m.cols();
    let (a, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    Matrix::from_fn(cols, free.len(), |i, f| {
        let fc = free[f];
        if i == fc {
            RBig::from_i64(1, 0)
        } else if let Some(pr) = pivots.iter().position(|&p| p == i) {
            -a[pr][fc].clone()
        } else {
            RBig::from_i64(0, 0)
        }
    })
}

/// Orthonormal basis of the orthogonal complement of the column span of
/// `a` (`n × k`, full column rank), via Householder QR with column pivoting.
/// Returns an `n × (n − k)` matrix.
pub fn orthonormal_complement<R: Real>(a: &Matrix<R>, bits: u32) -> Matrix<R> {
    let (n, k) = (a.rows(), a.cols());
    let zero = R::from_i64(0, bits);
    let mut w = a.to_rows();
    let mut reflectors: Vec<Vec<R>> = Vec::with_capacity(k);
    for step in 0..k.min(n) {
        // pivot the remaining column of largest norm into place
        let col_norm = |w: &Vec<Vec<R>>, c: usize| {
            (step..n).fold(zero.clone(), |s, i| s + w[i][c].clone() * w[i][c].clone())
        };
        let mut best = step;
        let mut best_norm = col_norm(&w, step);
        for c in step + 1..k {
            let v = col_norm(&w, c);
            if v > best_norm {
                best = c;
                best_norm = v;
            }
        }
        if best != step {
            for row in w.iter_mut() {
                row.swap(step, best);
            }
        }
        let norm = best_norm.sqrt();
        let mut v: Vec<R> = vec![zero.clone(); n];
        for i in step..n {
            v[i] = w[i][step].clone();
        }
        let alpha = if v[step].sign() >= 0 { -norm } else { norm };
        v[step] = v[step].clone() - alpha;
        let vnorm2 = (step..n).fold(zero.clone(), |s, i| s + v[i].clone() * v[i].clone());
        if vnorm2.is_zero() {
            reflectors.push(v);
            continue;
        }
        let two_over = R::from_i64(2, bits) / vnorm2;
        for c in step..k {
            let dot = (step..n).fold(zero.clone(), |s, i| s + v[i].clone() * w[i][c].clone());
            let f = two_over.clone() * dot;
            for i in step..n {
                w[i][c] = w[i][c].clone() - f.clone() * v[i].clone();
            }
        }
        let scaled: Vec<R> = v.iter().map(|x| x.clone() * two_over.clone().sqrt()).collect();
        reflectors.push(scaled);
    }
    // Q e_j for j = k..n, applying H_1 ⋯ H_k (each H = I − u uᵀ) in reverse
    Matrix::from_fn_cols(n, n - k, |c| {
        let mut x = vec![zero.clone(); n];
        x[k + c] = R::from_i64(1, bits);
        for u in reflectors.iter().rev() {
            let dot = (0..n).fold(zero.clone(), |s, i| s + u[i].clone() * x[i].clone());
            if dot.is_zero() {
                continue;
            }
            for i in 0..n {
                x[i] = x[i].clone() - dot.clone() * u[i].clone();
            }
        }
        x
    })
}

impl<T: Clone> Matrix<T> {
    /// Builds a matrix column by column.
    pub fn from_fn_cols(rows: usize, cols: usize, mut f: impl FnMut(usize) -> Vec<T>) -> Self {
        let columns: Vec<Vec<T>> = (0..cols).map(&mut f).collect();
        Matrix::from_fn(rows, cols, |i, j| columns[j][i].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> RBig {
        RBig::from_i64(v, 0)
    }

    #[test]
    fn determinant_by_cofactor_agreement() {
        // det [[3,7,13],[7,12,19],[13,19,27]] = -4
        let m = Matrix::from_rows(vec![
            vec![q(3), q(7), q(13)],
            vec![q(7), q(12), q(19)],
            vec![q(13), q(19), q(27)],
        ])
        .unwrap();
        assert_eq!(det(&m, 0), q(-4));
        let f = m.to_f64();
        assert!((det(&f, 53) + 4.0).abs() < 1e-10);
    }

    #[test]
    fn exact_rank_and_nullspace() {
        let m = Matrix::from_rows(vec![vec![q(1), q(1), q(1)], vec![q(1), q(2), q(3)]]).unwrap();
        assert_eq!(rank_exact(&m), 2);
        let ns = nullspace_exact(&m);
        assert_eq!(ns.cols(), 1);
        let col: Vec<RBig> = (0..3).map(|i| ns.get(i, 0).clone()).collect();
        assert_eq!(col, vec![q(1), q(-2), q(1)]);
    }

    #[test]
    fn complement_is_orthonormal_and_orthogonal() {
        let a = Matrix::from_rows(vec![
            vec![1.0, 1.0],
            vec![1.0, 2.0],
            vec![1.0, 3.0],
            vec![1.0, 5.0],
        ])
        .unwrap();
        let c = orthonormal_complement(&a, 53);
        assert_eq!((c.rows(), c.cols()), (4, 2));
        let ctc = c.transpose().matmul(&c).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ctc.get(i, j) - want).abs() < 1e-14);
            }
        }
        let atc = a.transpose().matmul(&c).unwrap();
        assert!(atc.to_rows().iter().flatten().all(|v| v.abs() < 1e-13));
    }
}
