//! Predicted inertia of power Loewner matrices, and checks of the statements
//! that predict it: conditional definiteness on moment-orthogonal subspaces,
//! the existence of a negative eigenvalue for `r > 1`, and the algebraic
//! identities linking `L_r`, `L_{-r}`, `L_{r-2}` and the hyperbolic form.

use dashu::rational::RBig;
use serde::Serialize;

use crate::builders::{
    diag_d, loewner_exact, loewner_matrix, ones_e, power, sinh_congruence_factor, sinh_loewner,
    LoewnerSpec,
};
use crate::error::{Error, Result};
use crate::inertia::{inertia_auto, InertiaReport, MatrixSource};
use crate::linalg::{nullspace_exact, orthonormal_complement};
use crate::real::{max_of, powi, Real, Scalar};
use crate::types::{Exponent, Inertia, Matrix, PointConfig, SymMatrix, ToleranceContext, EXTENDED_BITS};

/// Which statement fixed a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// `r = 0`: the zero matrix.
    ZeroExponent,
    /// Integer `1 ≤ r ≤ n`.
    Integer,
    /// Non-integer `0 < r < n`.
    NonInteger,
    /// `r > n`: same inertia as `L_n`.
    Beyond,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub inertia: Inertia,
    pub clause: Clause,
    /// Obtained from `-r` by swapping π and ν.
    pub reflected: bool,
}

fn integer_clause(n: usize, m: usize) -> Inertia {
    // m = 2k → (k, n-m, k); m = 2k-1 → (k, n-m, k-1)
    let k = m.div_ceil(2);
    let neg = if m.is_multiple_of(2) { k } else { k - 1 };
    Inertia::new(k, n - m, neg)
}

/// Inertia of the `n × n` Loewner matrix of `t^r` predicted from `n` and `r`
/// alone.
pub fn predicted_inertia(n: usize, r: f64) -> Prediction {
    assert!(n >= 1, "order must be positive");
    if r < 0.0 {
        let p = predicted_inertia(n, -r);
        return Prediction {
            inertia: p.inertia.reflect(),
            reflected: true,
            ..p
        };
    }
    if r == 0.0 {
        return Prediction {
            inertia: Inertia::new(0, n, 0),
            clause: Clause::ZeroExponent,
            reflected: false,
        };
    }
    let fl = r.floor();
    if r == fl && fl as usize <= n {
        return Prediction {
            inertia: integer_clause(n, fl as usize),
            clause: Clause::Integer,
            reflected: false,
        };
    }
    if r < n as f64 {
        let f = fl as usize;
        let k = f.div_ceil(2);
        let inertia = if f.is_multiple_of(2) {
            Inertia::new(n - k, 0, k)
        } else {
            Inertia::new(k, 0, n - k)
        };
        return Prediction {
            inertia,
            clause: Clause::NonInteger,
            reflected: false,
        };
    }
    Prediction {
        inertia: integer_clause(n, n),
        clause: Clause::Beyond,
        reflected: false,
    }
}

/// Predicted versus computed inertia for one `(config, r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub r: f64,
    pub predicted: Prediction,
    pub computed: InertiaReport,
    pub matched: bool,
}

/// Exponents closer than this to an integer start at extended precision.
pub const NEAR_INTEGER: f64 = 1e-6;

/// Computes the inertia of `L_r` and compares it with [`predicted_inertia`].
///
/// Integer exponents go through the exact route (float nodes use their exact
/// binary values); exponents within [`NEAR_INTEGER`] of an integer start at
/// 256 bits.
pub fn verify_instance(config: &PointConfig, r: f64, tol: &ToleranceContext) -> Result<VerifyReport> {
    if !r.is_finite() {
        return Err(Error::Precondition("exponent must be finite".into()));
    }
    let exponent = Exponent::new(r);
    let config = if exponent.is_integer() {
        config.with_exact()
    } else {
        config.clone()
    };
    let near = !exponent.is_integer() && (r - r.round()).abs() < NEAR_INTEGER;
    let t = if near && tol.precision_bits < EXTENDED_BITS {
        tol.at_bits(EXTENDED_BITS)
    } else {
        *tol
    };
    let spec = LoewnerSpec { config, exponent };
    let computed = inertia_auto(&spec, &t)?;
    let predicted = predicted_inertia(spec.config.n(), r);
    let matched = !computed.disagreement && computed.consensus == predicted.inertia;
    Ok(VerifyReport {
        r,
        predicted,
        computed,
        matched,
    })
}

/// Moment matrix transpose: column `j` holds `p_i^j`, `j < k`.
fn moments<T: Scalar>(nodes: &[T], k: usize, bits: u32) -> Matrix<T> {
    Matrix::from_fn(nodes.len(), k, |i, j| powi(&nodes[i], j as i64, bits))
}

/// Orthonormal basis (as columns) of
/// `H_k = {x : Σ p_i^j x_i = 0, j = 0..k-1}`, an `n × (n-k)` matrix.
/// `k = 0` gives the identity.
pub fn subspace_basis<R: Real>(config: &PointConfig, k: usize, tol: &ToleranceContext) -> Result<Matrix<R>> {
    let n = config.n();
    if k >= n {
        return Err(Error::Precondition(format!("subspace index {k} must be below n = {n}")));
    }
    let bits = tol.precision_bits;
    let nodes: Vec<R> = config.points_as(bits);
    Ok(orthonormal_complement(&moments(&nodes, k, bits), bits))
}

/// Largest relative violation `|Σ p_i^j x_i| / Σ |p_i^j x_i|` over basis
/// columns `x` and moments `j < k`.
pub fn subspace_residual<R: Real>(config: &PointConfig, k: usize, basis: &Matrix<R>, bits: u32) -> f64 {
    let nodes: Vec<R> = config.points_as(bits);
    let mut worst = 0f64;
    for c in 0..basis.cols() {
        for j in 0..k {
            let mut s = R::from_i64(0, bits);
            let mut a = R::from_i64(0, bits);
            for (i, p) in nodes.iter().enumerate() {
                let term = powi(p, j as i64, bits) * basis.get(i, c).clone();
                a = a + term.clone().abs();
                s = s + term;
            }
            if !a.is_zero() {
                worst = worst.max((s.abs() / a).to_f64());
            }
        }
    }
    worst
}

/// `Qᵀ L_r Q` for an orthonormal basis `Q` of `H_k`.
#[derive(Debug, Clone)]
pub struct CompressedLoewner {
    pub spec: LoewnerSpec,
    pub k: usize,
}

impl MatrixSource for CompressedLoewner {
    fn order(&self) -> usize {
        self.spec.config.n() - self.k
    }
    fn build<R: Real>(&self, tol: &ToleranceContext) -> SymMatrix<R> {
        let l = loewner_matrix::<R>(&self.spec, tol);
        let q = subspace_basis::<R>(&self.spec.config, self.k, tol).expect("k checked on construction");
        l.congruence(&q).expect("conforming dimensions")
    }
    fn exact(&self) -> Option<SymMatrix<RBig>> {
        let m = self.spec.exponent.integer_value()?;
        let nodes = self.spec.config.exact()?;
        let basis = nullspace_exact(&moments(nodes, self.k, 0).transpose());
        loewner_exact(nodes, m).congruence(&basis).ok()
    }
}

/// Inertia of `L_r` compressed to `H_k`.
pub fn conditional_inertia(
    config: &PointConfig,
    r: f64,
    k: usize,
    tol: &ToleranceContext,
) -> Result<InertiaReport> {
    if k >= config.n() {
        return Err(Error::Precondition(format!(
            "subspace index {k} must be below n = {}",
            config.n()
        )));
    }
    let src = CompressedLoewner {
        spec: LoewnerSpec::new(config.clone(), r),
        k,
    };
    inertia_auto(&src, tol)
}

/// Checks that `L_r` has a negative eigenvalue; requires `r > 1`, `n ≥ 2`.
pub fn prop21_check(config: &PointConfig, r: f64, tol: &ToleranceContext) -> Result<(bool, InertiaReport)> {
    if !(r > 1.0) {
        return Err(Error::Precondition(format!("exponent must exceed 1, got {r}")));
    }
    if config.n() < 2 {
        return Err(Error::Precondition("at least two points required".into()));
    }
    let rep = verify_instance(config, r, tol)?.computed;
    Ok((rep.consensus.neg >= 1, rep))
}

/// Relative residuals of the three matrix identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// `L_{-r} + D^{-r} L_r D^{-r} = 0`.
    pub reflection: f64,
    /// `L_r = Δ L̃_r Δ` at `p_i = e^{2 x_i}`.
    pub sinh_congruence: f64,
    /// `L_r = D^{r-1} E + D L_{r-2} D + E D^{r-1}`.
    pub decomposition: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.reflection.max(self.sinh_congruence).max(self.decomposition)
    }
}

fn max_abs<T: Scalar>(m: &Matrix<T>, bits: u32) -> T {
    m.max_abs().unwrap_or_else(|| T::from_i64(0, bits))
}

fn rel_residual<R: Real>(lhs: &Matrix<R>, terms: &[&Matrix<R>], bits: u32) -> f64 {
    let (rows, cols) = (lhs.rows(), lhs.cols());
    let mut worst = R::from_i64(0, bits);
    for i in 0..rows {
        for j in 0..cols {
            let mut v = lhs.get(i, j).clone();
            for t in terms {
                v = v - t.get(i, j).clone();
            }
            worst = max_of(worst, v.abs());
        }
    }
    let scale = terms
        .iter()
        .map(|t| max_abs(t, bits))
        .fold(max_abs(lhs, bits), max_of);
    if scale.is_zero() {
        worst.to_f64()
    } else {
        (worst / scale).to_f64()
    }
}

fn scale_rows_cols<T: Scalar>(m: &SymMatrix<T>, d: &[T]) -> Matrix<T> {
    Matrix::from_fn(m.order(), m.order(), |i, j| {
        d[i].clone() * m.get(i, j).clone() * d[j].clone()
    })
}

/// Residuals of the reflection, hyperbolic-congruence and decomposition
/// identities at precision `R`.
pub fn verify_identities<R: Real>(config: &PointConfig, r: f64, tol: &ToleranceContext) -> Result<IdentityResiduals> {
    let bits = tol.precision_bits;
    let n = config.n();
    let e = Exponent::new(r);
    let spec = |x: f64| LoewnerSpec {
        config: config.clone(),
        exponent: Exponent::new(x),
    };
    let p: Vec<R> = config.points_as(bits);
    let l_r = loewner_matrix::<R>(&spec(r), tol);

    // L_{-r} = -D^{-r} L_r D^{-r}
    let l_neg = loewner_matrix::<R>(&spec(-r), tol);
    let dneg: Vec<R> = p.iter().map(|x| power(x, Exponent::new(-r), bits)).collect();
    let reflected = scale_rows_cols(&l_r, &dneg).map(|v| -v.clone());
    let reflection = rel_residual(l_neg.as_matrix(), &[&reflected], bits);

    // p_i = e^{2x_i}
    let x: Vec<f64> = config.points().iter().map(|v| 0.5 * v.ln()).collect();
    let tilde = sinh_loewner::<R>(&x, e, tol)?;
    let delta = sinh_congruence_factor::<R>(&x, e, tol);
    let dl = tilde.congruence(delta.as_matrix())?;
    let sinh_congruence = rel_residual(l_r.as_matrix(), &[dl.as_matrix()], bits);

    // L_r = D^{r-1} E + D L_{r-2} D + E D^{r-1}
    let d_rm1: Vec<R> = p.iter().map(|x| power(x, Exponent::new(r - 1.0), bits)).collect();
    let ones = ones_e::<R>(n, bits);
    let left = Matrix::from_fn(n, n, |i, j| d_rm1[i].clone() * ones.get(i, j).clone());
    let right = Matrix::from_fn(n, n, |i, j| ones.get(i, j).clone() * d_rm1[j].clone());
    let l_rm2 = loewner_matrix::<R>(&spec(r - 2.0), tol);
    let d = diag_d::<R>(config, tol);
    let dvec: Vec<R> = (0..n).map(|i| d.get(i, i).clone()).collect();
    let middle = scale_rows_cols(&l_rm2, &dvec);
    let decomposition = rel_residual(l_r.as_matrix(), &[&left, &middle, &right], bits);

    Ok(IdentityResiduals {
        reflection,
        sinh_congruence,
        decomposition,
    })
}

/// Exact residual matrix of the decomposition identity for an integer
/// exponent; all entries vanish when the identity holds.
pub fn decomposition_residual_exact(nodes: &[RBig], m: i64) -> Matrix<RBig> {
    let n = nodes.len();
    let l = loewner_exact(nodes, m);
    let l2 = loewner_exact(nodes, m - 2);
    Matrix::from_fn(n, n, |i, j| {
        let (pi, pj) = (&nodes[i], &nodes[j]);
        l.get(i, j).clone()
            - powi(pi, m - 1, 0)
            - pi.clone() * l2.get(i, j).clone() * pj.clone()
            - powi(pj, m - 1, 0)
    })
}

/// Exact residual of the reflection identity for an integer exponent.
pub fn reflection_residual_exact(nodes: &[RBig], m: i64) -> Matrix<RBig> {
    let n = nodes.len();
    let l = loewner_exact(nodes, m);
    let ln = loewner_exact(nodes, -m);
    Matrix::from_fn(n, n, |i, j| {
        ln.get(i, j).clone() + powi(&nodes[i], -m, 0) * l.get(i, j).clone() * powi(&nodes[j], -m, 0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Mp;

    fn t() -> ToleranceContext {
        ToleranceContext::default()
    }

    #[test]
    fn prediction_examples() {
        assert_eq!(predicted_inertia(6, 3.0).inertia, Inertia::new(2, 3, 1));
        assert_eq!(predicted_inertia(6, 3.5).inertia, Inertia::new(2, 0, 4));
        assert_eq!(predicted_inertia(5, 7.2).inertia, Inertia::new(3, 0, 2));
        let neg = predicted_inertia(3, -1.5);
        assert_eq!(neg.inertia, Inertia::new(2, 0, 1));
        assert!(neg.reflected);
        assert_eq!(predicted_inertia(4, 0.0).inertia, Inertia::new(0, 4, 0));
        assert_eq!(predicted_inertia(3, 0.5).inertia, Inertia::new(3, 0, 0));
        assert_eq!(predicted_inertia(1, 9.5).inertia, Inertia::new(1, 0, 0));
    }

    #[test]
    fn prediction_between_n_minus_one_and_n_agrees_with_beyond_clause() {
        for n in 1..9 {
            let inside = predicted_inertia(n, n as f64 - 0.5).inertia;
            let beyond = predicted_inertia(n, n as f64 + 0.5).inertia;
            assert_eq!(inside, beyond, "n = {n}");
        }
    }

    #[test]
    fn verify_examples() {
        let c6 = PointConfig::from_ints(&[1, 2, 3, 4, 5, 6]).unwrap();
        let v = verify_instance(&c6, 2.5, &t()).unwrap();
        assert!(v.matched);
        assert_eq!(v.computed.consensus, Inertia::new(5, 0, 1));
        let c2 = PointConfig::from_ints(&[1, 2]).unwrap();
        let v = verify_instance(&c2, 1.0, &t()).unwrap();
        assert!(v.matched);
        assert_eq!(v.computed.consensus, Inertia::new(1, 1, 0));
        let c4 = PointConfig::from_ints(&[2, 3, 5, 7]).unwrap();
        let v = verify_instance(&c4, 3.0, &t()).unwrap();
        assert!(v.matched);
        assert_eq!(v.computed.consensus, Inertia::new(2, 1, 1));
    }

    #[test]
    fn float_nodes_with_integer_exponent_use_exact_route() {
        let c = PointConfig::from_f64s(&[0.5, 1.25, 2.0]).unwrap();
        let v = verify_instance(&c, 2.0, &t()).unwrap();
        assert_eq!(v.computed.by_exact, Some(Inertia::new(1, 1, 1)));
        assert!(v.matched);
    }

    #[test]
    fn subspace_basis_examples() {
        let c2 = PointConfig::from_ints(&[1, 2]).unwrap();
        let b = subspace_basis::<f64>(&c2, 1, &t()).unwrap();
        assert_eq!(b.cols(), 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((b.get(0, 0).abs() - s).abs() < 1e-15);
        assert!((b.get(0, 0) + b.get(1, 0)).abs() < 1e-15);

        let c3 = PointConfig::from_ints(&[1, 2, 3]).unwrap();
        let b = subspace_basis::<f64>(&c3, 2, &t()).unwrap();
        let norm6 = 6f64.sqrt();
        let sign = b.get(0, 0).signum();
        for (i, want) in [1.0, -2.0, 1.0].iter().enumerate() {
            assert!((b.get(i, 0) * sign - want / norm6).abs() < 1e-14);
        }
        assert!(subspace_basis::<f64>(&c3, 3, &t()).is_err());
    }

    #[test]
    fn subspace_last_index_residual() {
        let c = PointConfig::from_f64s(&[0.3, 1.1, 2.7, 4.0, 8.5]).unwrap();
        let b = subspace_basis::<f64>(&c, 4, &t()).unwrap();
        assert_eq!(b.cols(), 1);
        assert!(subspace_residual(&c, 4, &b, 53) < 1e-12);
        let tol = ToleranceContext::extended();
        let bm = subspace_basis::<Mp>(&c, 4, &tol).unwrap();
        assert!(subspace_residual(&c, 4, &bm, 256) < 1e-60);
    }

    #[test]
    fn conditional_inertia_examples() {
        let c3 = PointConfig::from_ints(&[1, 2, 3]).unwrap();
        assert_eq!(conditional_inertia(&c3, 1.5, 1, &t()).unwrap().consensus, Inertia::new(0, 0, 2));
        assert_eq!(conditional_inertia(&c3, 2.5, 1, &t()).unwrap().consensus, Inertia::new(2, 0, 0));
        let c5 = PointConfig::from_ints(&[1, 2, 3, 4, 5]).unwrap();
        assert_eq!(conditional_inertia(&c5, 3.5, 2, &t()).unwrap().consensus, Inertia::new(0, 0, 3));
        // k = 0 is the whole matrix, positive definite for 0 < r < 1
        assert_eq!(conditional_inertia(&c5, 0.5, 0, &t()).unwrap().consensus, Inertia::new(5, 0, 0));
    }

    #[test]
    fn exact_compression_for_integer_exponent() {
        // L_2 on H_1 of (1,2,3): D L_0 D vanishes, so the compression is zero
        let c3 = PointConfig::from_ints(&[1, 2, 3]).unwrap();
        let rep = conditional_inertia(&c3, 2.0, 1, &t()).unwrap();
        assert_eq!(rep.by_exact, Some(Inertia::new(0, 2, 0)));
    }

    #[test]
    fn prop21_examples() {
        let c2 = PointConfig::from_ints(&[1, 2]).unwrap();
        let (ok, rep) = prop21_check(&c2, 3.0, &t()).unwrap();
        assert!(ok);
        assert_eq!(rep.consensus, Inertia::new(1, 0, 1));
        let c4 = PointConfig::from_ints(&[1, 2, 3, 4]).unwrap();
        assert!(prop21_check(&c4, 1.01, &t()).unwrap().0);
        assert!(prop21_check(&c2, 0.5, &t()).is_err());
    }

    #[test]
    fn identity_examples() {
        let c2 = PointConfig::from_ints(&[1, 2]).unwrap();
        let res = verify_identities::<f64>(&c2, 2.0, &t()).unwrap();
        assert!(res.decomposition == 0.0, "{res:?}");
        let c3 = PointConfig::from_ints(&[1, 2, 3]).unwrap();
        let res = verify_identities::<f64>(&c3, 1.5, &t()).unwrap();
        assert!(res.max() <= 1e-12, "{res:?}");
        let nodes = c3.exact().unwrap();
        assert!(decomposition_residual_exact(nodes, 3).to_rows().iter().flatten().all(Scalar::is_zero));
        assert!(reflection_residual_exact(nodes, 3).to_rows().iter().flatten().all(Scalar::is_zero));
    }
}
