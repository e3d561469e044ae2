//! Constructors for the structured matrices: power-function Loewner matrices,
//! their hyperbolic-sine congruent form, the diagonal and all-ones factors,
//! the Vandermonde/antidiagonal factorization for integer exponents, the
//! power-sum matrix and the two-sequence Loewner matrix.

use dashu::rational::RBig;

use crate::error::{Error, Result};
use crate::real::{powi, Real, Scalar};
use crate::types::{Exponent, Matrix, PointConfig, SymMatrix, ToleranceContext};

/// A node configuration together with the exponent of `t ↦ t^r`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoewnerSpec {
    pub config: PointConfig,
    pub exponent: Exponent,
}

impl LoewnerSpec {
    pub fn new(config: PointConfig, r: f64) -> Self {
        LoewnerSpec {
            config,
            exponent: Exponent::new(r),
        }
    }
}

/// `p^r`; integer exponents use repeated squaring.
pub fn power<R: Real>(p: &R, e: Exponent, bits: u32) -> R {
    match e.integer_value() {
        Some(m) => powi(p, m, bits),
        None => (R::from_f64(e.value(), bits) * p.ln()).exp(),
    }
}

/// `r · p^(r-1)`, the derivative of `t^r` at `p`.
pub fn power_derivative<R: Real>(p: &R, e: Exponent, bits: u32) -> R {
    match e.integer_value() {
        Some(0) => R::from_i64(0, bits),
        Some(m) => R::from_i64(m, bits) * powi(p, m - 1, bits),
        None => {
            let r = R::from_f64(e.value(), bits);
            r.clone() * ((r - R::from_i64(1, bits)) * p.ln()).exp()
        }
    }
}

/// `(a^r - b^r) / (a - b)` for `a ≠ b`, both positive.
///
/// Integer exponents expand into a sum of monomials with no cancellation.
/// Otherwise the quotient is rewritten as `b^(r-1) · expm1(r·log1p(u)) / u`
/// with `u = (a-b)/b`, which stays accurate when `a` and `b` are close.
pub fn divided_power<R: Real>(a: &R, b: &R, e: Exponent, bits: u32) -> R {
    match e.integer_value() {
        Some(0) => R::from_i64(0, bits),
        Some(m) => {
            let k = m.unsigned_abs() as i64;
            let sum = monomial_sum(a, b, k, bits);
            if m > 0 {
                sum
            } else {
                -(sum / (powi(a, k, bits) * powi(b, k, bits)))
            }
        }
        None => {
            let r = R::from_f64(e.value(), bits);
            let u = (a.clone() - b.clone()) / b.clone();
            let scale = ((r.clone() - R::from_i64(1, bits)) * b.ln()).exp();
            scale * (r * u.ln_1p()).exp_m1() / u
        }
    }
}

/// `Σ_{t=0}^{k-1} a^t b^(k-1-t)`.
fn monomial_sum<T: Scalar>(a: &T, b: &T, k: i64, bits: u32) -> T {
    // Horner in a/b avoided so exact types stay exact
    let mut sum = T::from_i64(0, bits);
    let mut apow = T::from_i64(1, bits);
    for t in 0..k {
        sum = sum + apow.clone() * powi(b, k - 1 - t, bits);
        apow = apow * a.clone();
    }
    sum
}

/// Loewner matrix `[(p_i^r - p_j^r)/(p_i - p_j)]` with `r p_i^(r-1)` on the
/// diagonal, at the working precision of `tol`.
pub fn loewner_matrix<R: Real>(spec: &LoewnerSpec, tol: &ToleranceContext) -> SymMatrix<R> {
    let bits = tol.precision_bits;
    let p: Vec<R> = spec.config.points_as(bits);
    let e = spec.exponent;
    SymMatrix::from_upper(p.len(), |i, j| {
        if i == j {
            power_derivative(&p[i], e, bits)
        } else {
            divided_power(&p[i], &p[j], e, bits)
        }
    })
}

/// Exact Loewner matrix over the rationals for an integer exponent.
pub fn loewner_exact(nodes: &[RBig], m: i64) -> SymMatrix<RBig> {
    SymMatrix::from_upper(nodes.len(), |i, j| {
        let (a, b) = (&nodes[i], &nodes[j]);
        let k = m.unsigned_abs() as i64;
        if m == 0 {
            RBig::from_i64(0, 0)
        } else if i == j {
            RBig::from_i64(m, 0) * powi(a, m - 1, 0)
        } else if m > 0 {
            monomial_sum(a, b, k, 0)
        } else {
            -(monomial_sum(a, b, k, 0) / (powi(a, k, 0) * powi(b, k, 0)))
        }
    })
}

/// Exact Loewner matrix of a configuration (dyadic values for float nodes).
pub fn loewner_exact_config(config: &PointConfig, m: i64) -> SymMatrix<RBig> {
    loewner_exact(&config.exact_or_dyadic(), m)
}

/// `[sinh(r(x_i - x_j)) / sinh(x_i - x_j)]` with `r` on the diagonal.
pub fn sinh_loewner<R: Real>(
    x: &[f64],
    exponent: Exponent,
    tol: &ToleranceContext,
) -> Result<SymMatrix<R>> {
    if x.is_empty() {
        return Err(Error::EmptyPoints);
    }
    if let Some(i) = x.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(Error::NotIncreasing { index: i + 1 });
    }
    let bits = tol.precision_bits;
    let r = R::from_f64(exponent.value(), bits);
    let xs: Vec<R> = x.iter().map(|&v| R::from_f64(v, bits)).collect();
    Ok(SymMatrix::from_upper(x.len(), |i, j| {
        if i == j {
            r.clone()
        } else {
            let d = xs[i].clone() - xs[j].clone();
            (r.clone() * d.clone()).sinh() / d.sinh()
        }
    }))
}

/// Congruence factor `diag(e^((r-1) x_i))` relating the hyperbolic form to
/// the Loewner matrix at `p_i = e^(2 x_i)`.
pub fn sinh_congruence_factor<R: Real>(
    x: &[f64],
    exponent: Exponent,
    tol: &ToleranceContext,
) -> SymMatrix<R> {
    let bits = tol.precision_bits;
    let rm1 = R::from_f64(exponent.value(), bits) - R::from_i64(1, bits);
    let d: Vec<R> = x
        .iter()
        .map(|&v| (rm1.clone() * R::from_f64(v, bits)).exp())
        .collect();
    SymMatrix::diagonal(&d)
}

/// `diag(p_1, …, p_n)`.
pub fn diag_d<R: Real>(config: &PointConfig, tol: &ToleranceContext) -> SymMatrix<R> {
    SymMatrix::diagonal(&config.points_as::<R>(tol.precision_bits))
}

/// The all-ones matrix.
pub fn ones_e<T: Scalar>(n: usize, bits: u32) -> SymMatrix<T> {
    SymMatrix::from_upper(n, |_, _| T::from_i64(1, bits))
}

/// `r × n` Vandermonde matrix; row `a` holds `p_j^a`.
pub fn vandermonde_w<T: Scalar>(nodes: &[T], r: Exponent, bits: u32) -> Result<Matrix<T>> {
    let rows = match r.integer_value() {
        Some(m) if m >= 1 => m as usize,
        Some(_) => return Err(Error::Precondition("Vandermonde order must be ≥ 1".into())),
        None => return Err(Error::NotInteger(r.value())),
    };
    Ok(Matrix::from_fn(rows, nodes.len(), |a, j| {
        powi(&nodes[j], a as i64, bits)
    }))
}

/// `r × r` matrix with ones on the antidiagonal.
pub fn antidiag_v<T: Scalar>(r: usize, bits: u32) -> SymMatrix<T> {
    SymMatrix::from_upper(r, |i, j| T::from_i64((i + j + 1 == r) as i64, bits))
}

/// `[(p_i + p_j)^r]`.
pub fn power_sum_matrix<R: Real>(
    config: &PointConfig,
    exponent: Exponent,
    tol: &ToleranceContext,
) -> SymMatrix<R> {
    let bits = tol.precision_bits;
    let p: Vec<R> = config.points_as(bits);
    SymMatrix::from_upper(p.len(), |i, j| {
        power(&(p[i].clone() + p[j].clone()), exponent, bits)
    })
}

/// Exact power-sum matrix for an integer exponent.
pub fn power_sum_exact(nodes: &[RBig], m: i64) -> SymMatrix<RBig> {
    SymMatrix::from_upper(nodes.len(), |i, j| {
        powi(&(nodes[i].clone() + nodes[j].clone()), m, 0)
    })
}

/// Two-sequence Loewner matrix `[(p_i^r - q_j^r)/(p_i - q_j)]`; coincident
/// (to working precision) arguments take the derivative value.
pub fn cross_loewner<R: Real>(
    p: &PointConfig,
    q: &PointConfig,
    exponent: Exponent,
    tol: &ToleranceContext,
) -> Result<Matrix<R>> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: q.n(),
        });
    }
    let bits = tol.precision_bits;
    let pv: Vec<R> = p.points_as(bits);
    let qv: Vec<R> = q.points_as(bits);
    let unit = R::from_f64(2f64.powi(-(bits as i32)), bits);
    Ok(Matrix::from_fn(p.n(), q.n(), |i, j| {
        let gap = (pv[i].clone() - qv[j].clone()).abs();
        if gap <= unit.clone() * pv[i].clone() {
            power_derivative(&pv[i], exponent, bits)
        } else {
            divided_power(&pv[i], &qv[j], exponent, bits)
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Mp;

    fn tol() -> ToleranceContext {
        ToleranceContext::default()
    }

    fn spec(points: &[f64], r: f64) -> LoewnerSpec {
        LoewnerSpec::new(PointConfig::from_f64s(points).unwrap(), r)
    }

    fn assert_close(m: &Matrix<f64>, want: &[&[f64]], eps: f64) {
        for (i, row) in want.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                assert!((m.get(i, j) - w).abs() <= eps, "({i},{j}): {} vs {w}", m.get(i, j));
            }
        }
    }

    #[test]
    fn loewner_square_on_two_points() {
        let l = loewner_matrix::<f64>(&spec(&[1.0, 2.0], 2.0), &tol());
        assert_close(l.as_matrix(), &[&[2.0, 3.0], &[3.0, 4.0]], 0.0);
    }

    #[test]
    fn loewner_identity_exponent_is_all_ones() {
        let l = loewner_matrix::<f64>(&spec(&[1.0, 2.0, 3.0], 1.0), &tol());
        assert_close(l.as_matrix(), &[&[1.0; 3], &[1.0; 3], &[1.0; 3]], 0.0);
    }

    #[test]
    fn loewner_square_root() {
        let l = loewner_matrix::<f64>(&spec(&[1.0, 4.0], 0.5), &tol());
        assert_close(l.as_matrix(), &[&[0.5, 1.0 / 3.0], &[1.0 / 3.0, 0.25]], 1e-15);
    }

    #[test]
    fn negative_integer_exponent_matches_quotient() {
        let l = loewner_matrix::<f64>(&spec(&[1.0, 2.0], -1.0), &tol());
        // (1 - 1/2)/(1 - 2) = -1/2, diagonal -p^-2
        assert_close(l.as_matrix(), &[&[-1.0, -0.5], &[-0.5, -0.25]], 1e-15);
    }

    #[test]
    fn non_integer_quotient_matches_naive_formula() {
        let p = [0.7, 1.3, 5.0];
        let r = 2.37;
        let l = loewner_matrix::<f64>(&spec(&p, r), &tol());
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j {
                    r * p[i].powf(r - 1.0)
                } else {
                    (p[i].powf(r) - p[j].powf(r)) / (p[i] - p[j])
                };
                assert!((l.get(i, j) - want).abs() < 1e-13 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn multiprecision_matches_double() {
        let s = spec(&[1.0, 2.5, 4.0], 3.3);
        let a = loewner_matrix::<f64>(&s, &tol());
        let b = loewner_matrix::<Mp>(&s, &ToleranceContext::extended()).to_f64();
        for i in 0..3 {
            for j in 0..3 {
                assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-12 * b.get(i, j).abs());
            }
        }
    }

    #[test]
    fn sinh_form_examples() {
        let t = sinh_loewner::<f64>(&[0.1, 0.2], Exponent::new(1.0), &tol()).unwrap();
        assert_close(t.as_matrix(), &[&[1.0, 1.0], &[1.0, 1.0]], 1e-15);
        let s = sinh_loewner::<f64>(&[0.0], Exponent::new(3.0), &tol()).unwrap();
        assert_eq!(*s.get(0, 0), 3.0);
        assert!(sinh_loewner::<f64>(&[0.2, 0.1], Exponent::new(1.0), &tol()).is_err());
    }

    #[test]
    fn sinh_congruence_reproduces_loewner() {
        // p = (1, 2), r = 1.5
        let x = [0.0, 0.5 * 2f64.ln()];
        let e = Exponent::new(1.5);
        let tilde = sinh_loewner::<f64>(&x, e, &tol()).unwrap();
        let delta = sinh_congruence_factor::<f64>(&x, e, &tol());
        let prod = tilde.congruence(delta.as_matrix()).unwrap();
        let l = loewner_matrix::<f64>(&spec(&[1.0, 2.0], 1.5), &tol());
        for i in 0..2 {
            for j in 0..2 {
                assert!((prod.get(i, j) - l.get(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn diagonal_and_ones() {
        let c = PointConfig::from_ints(&[1, 2, 3]).unwrap();
        let d = diag_d::<f64>(&c, &tol());
        assert_close(d.as_matrix(), &[&[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 3.0]], 0.0);
        let d5 = diag_d::<f64>(&PointConfig::from_ints(&[5]).unwrap(), &tol());
        assert_eq!(*d5.get(0, 0), 5.0);
        assert_eq!(*ones_e::<f64>(1, 53).get(0, 0), 1.0);
        assert!(ones_e::<f64>(3, 53).as_matrix().to_rows().iter().flatten().all(|&v| v == 1.0));
    }

    #[test]
    fn vandermonde_rows_are_powers() {
        let w = vandermonde_w(&[1.0, 2.0, 3.0], Exponent::new(2.0), 53).unwrap();
        assert_eq!(w.to_rows(), vec![vec![1.0, 1.0, 1.0], vec![1.0, 2.0, 3.0]]);
        let w1 = vandermonde_w(&[1.0, 2.0], Exponent::new(1.0), 53).unwrap();
        assert_eq!(w1.to_rows(), vec![vec![1.0, 1.0]]);
        assert_eq!(
            vandermonde_w(&[1.0], Exponent::new(1.5), 53),
            Err(Error::NotInteger(1.5))
        );
    }

    #[test]
    fn antidiagonal_pattern() {
        let v = antidiag_v::<f64>(3, 53);
        assert_close(v.as_matrix(), &[&[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]], 0.0);
        assert_eq!(*antidiag_v::<f64>(1, 53).get(0, 0), 1.0);
    }

    #[test]
    fn power_sum_examples() {
        let c = PointConfig::from_ints(&[1, 2]).unwrap();
        let p1 = power_sum_matrix::<f64>(&c, Exponent::new(1.0), &tol());
        assert_close(p1.as_matrix(), &[&[2.0, 3.0], &[3.0, 4.0]], 0.0);
        let p0 = power_sum_matrix::<f64>(&c, Exponent::new(0.0), &tol());
        assert_close(p0.as_matrix(), &[&[1.0, 1.0], &[1.0, 1.0]], 0.0);
        let c3 = PointConfig::from_ints(&[1, 2, 3]).unwrap();
        let p2 = power_sum_matrix::<f64>(&c3, Exponent::new(2.0), &tol());
        assert_close(
            p2.as_matrix(),
            &[&[4.0, 9.0, 16.0], &[9.0, 16.0, 25.0], &[16.0, 25.0, 36.0]],
            0.0,
        );
    }

    #[test]
    fn cross_loewner_examples() {
        let p = PointConfig::from_ints(&[1, 2]).unwrap();
        let q = PointConfig::from_ints(&[3, 4]).unwrap();
        let m = cross_loewner::<f64>(&p, &q, Exponent::new(2.0), &tol()).unwrap();
        assert_close(&m, &[&[4.0, 5.0], &[5.0, 6.0]], 0.0);
        let same = cross_loewner::<f64>(&p, &p, Exponent::new(2.5), &tol()).unwrap();
        let l = loewner_matrix::<f64>(&LoewnerSpec::new(p.clone(), 2.5), &tol());
        assert_eq!(&same, l.as_matrix());
        let short = PointConfig::from_ints(&[1]).unwrap();
        assert!(cross_loewner::<f64>(&p, &short, Exponent::new(2.0), &tol()).is_err());
    }

    #[test]
    fn exact_loewner_matches_float() {
        let c = PointConfig::from_ints(&[1, 2, 3]).unwrap();
        for m in [-2, 0, 1, 3] {
            let e = loewner_exact_config(&c, m).to_f64();
            let f = loewner_matrix::<f64>(&LoewnerSpec::new(c.clone(), m as f64), &tol());
            for i in 0..3 {
                for j in 0..3 {
                    assert!((e.get(i, j) - f.get(i, j)).abs() < 1e-14);
                }
            }
        }
    }
}
