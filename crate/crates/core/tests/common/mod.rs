#![allow(dead_code)]

use dashu::rational::RBig;
use loewner_core::types::{Inertia, Matrix, PointConfig, SymMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn q(v: i64) -> RBig {
    RBig::from(v)
}

/// Characteristic polynomial coefficients `c_0..c_n` (monic) by the
/// Faddeev–LeVerrier recursion in exact arithmetic.
pub fn char_poly(a: &SymMatrix<RBig>) -> Vec<RBig> {
    let n = a.order();
    let a = a.as_matrix();
    let mut c = vec![q(0); n + 1];
    c[n] = q(1);
    let mut m = Matrix::from_fn(n, n, |_, _| q(0));
    for k in 1..=n {
        let am = a.matmul(&m).unwrap();
        m = Matrix::from_fn(n, n, |i, j| {
            let v = am.get(i, j).clone();
            if i == j {
                v + c[n - k + 1].clone()
            } else {
                v
            }
        });
        let am = a.matmul(&m).unwrap();
        let tr = (0..n).fold(q(0), |s, i| s + am.get(i, i).clone());
        c[n - k] = -tr / q(k as i64);
    }
    c
}

fn sign(x: &RBig) -> i32 {
    if *x > q(0) {
        1
    } else if *x < q(0) {
        -1
    } else {
        0
    }
}

fn sign_changes(coeffs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut changes = 0;
    for s in coeffs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

/// Inertia of a real symmetric matrix from its characteristic polynomial.
/// All roots are real, so Descartes' rule of signs is exact.
pub fn inertia_by_char_poly(a: &SymMatrix<RBig>) -> Inertia {
    let c = char_poly(a);
    let n = a.order();
    let zero = c.iter().position(|x| sign(x) != 0).unwrap();
    let pos = sign_changes(c.iter().map(sign));
    let neg = sign_changes(c.iter().enumerate().map(|(i, x)| if i % 2 == 1 { -sign(x) } else { sign(x) }));
    assert_eq!(pos + neg + zero, n);
    Inertia::new(pos, zero, neg)
}

/// Sorted distinct nodes `k/1000`, `k` in `1..=10_000`.
pub fn random_ratios(rng: &mut ChaCha8Rng, n: usize) -> Vec<RBig> {
    let mut ks: Vec<i64> = Vec::with_capacity(n);
    while ks.len() < n {
        let k = rng.gen_range(1..=10_000);
        if !ks.contains(&k) {
            ks.push(k);
        }
    }
    ks.sort();
    ks.into_iter()
        .map(|k| RBig::from_parts(k.into(), 1000u32.into()))
        .collect()
}

pub fn random_config(rng: &mut ChaCha8Rng, n: usize) -> PointConfig {
    PointConfig::from_ratios(&random_ratios(rng, n)).unwrap()
}

/// Same nodes with the exact values dropped.
pub fn float_config(rng: &mut ChaCha8Rng, n: usize) -> PointConfig {
    PointConfig::from_f64s(random_config(rng, n).points()).unwrap()
}

pub fn random_int_sym(rng: &mut ChaCha8Rng, n: usize, span: i64) -> SymMatrix<RBig> {
    SymMatrix::from_upper(n, |_, _| q(rng.gen_range(-span..=span)))
}

pub fn random_int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, span: i64) -> Matrix<RBig> {
    Matrix::from_fn(rows, cols, |_, _| q(rng.gen_range(-span..=span)))
}

/// A non-integer exponent at least `gap` away from every integer.
pub fn non_integer(rng: &mut ChaCha8Rng, lo: f64, hi: f64, gap: f64) -> f64 {
    loop {
        let r: f64 = rng.gen_range(lo..hi);
        if (r - r.round()).abs() >= gap {
            return r;
        }
    }
}
