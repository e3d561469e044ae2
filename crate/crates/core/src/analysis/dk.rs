//! Derivative of `A ↦ A^r` at a diagonal matrix, which acts as a Schur
//! (entrywise) product with the Loewner matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::builders::{loewner_matrix, LoewnerSpec};
use crate::error::{Error, Result};
use crate::inertia::eig_sym;
use crate::types::{PointConfig, SymMatrix, ToleranceContext};

/// `L ∘ X`.
pub fn hadamard(l: &SymMatrix<f64>, x: &SymMatrix<f64>) -> Result<SymMatrix<f64>> {
    if l.order() != x.order() {
        return Err(Error::DimensionMismatch {
            expected: l.order(),
            found: x.order(),
        });
    }
    Ok(SymMatrix::from_upper(l.order(), |i, j| l.get(i, j) * x.get(i, j)))
}

/// `L_r ∘ X`, the derivative of `t^r` at `diag(p)` applied to `X`.
pub fn dk_apply(config: &PointConfig, r: f64, x: &SymMatrix<f64>) -> Result<SymMatrix<f64>> {
    let l = loewner_matrix::<f64>(&LoewnerSpec::new(config.clone(), r), &ToleranceContext::default());
    hadamard(&l, x)
}

/// Loewner matrix of an arbitrary `f` with derivative `df`.
pub fn loewner_of(config: &PointConfig, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> SymMatrix<f64> {
    let p = config.points();
    SymMatrix::from_upper(p.len(), |i, j| {
        if i == j {
            df(p[i])
        } else {
            (f(p[i]) - f(p[j])) / (p[i] - p[j])
        }
    })
}

/// Same as [`dk_apply`] for an arbitrary `f`.
pub fn dk_apply_with(
    config: &PointConfig,
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    x: &SymMatrix<f64>,
) -> Result<SymMatrix<f64>> {
    hadamard(&loewner_of(config, f, df), x)
}

fn spectral_norm(a: &SymMatrix<f64>, tol: &ToleranceContext) -> Result<f64> {
    Ok(eig_sym(a, tol)?.max_abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DkProbe {
    /// `max ‖L_r ∘ X‖` over the sampled unit-norm `X`.
    pub bound: f64,
    /// `max_i r p_i^(r-1)`, the norm attained at `X = I`.
    pub reference: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Sampled lower bound for the norm of the derivative of `t^r` at
/// `diag(p)`. `X = I` is always included; the other samples are random
/// symmetric matrices scaled to unit spectral norm.
pub fn dk_norm_probe(config: &PointConfig, r: f64, samples: usize, seed: u64) -> Result<DkProbe> {
    if samples == 0 {
        return Err(Error::Precondition("at least one sample is required".into()));
    }
    let tol = ToleranceContext::default();
    let n = config.n();
    let l = loewner_matrix::<f64>(&LoewnerSpec::new(config.clone(), r), &tol);
    let reference = (0..n).map(|i| l.get(i, i).abs()).fold(0.0, f64::max);
    let mut bound = spectral_norm(&hadamard(&l, &SymMatrix::identity(n, 53))?, &tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 1..samples {
        let x = SymMatrix::from_upper(n, |_, _| rng.gen_range(-1.0..=1.0));
        let norm = spectral_norm(&x, &tol)?;
        if norm == 0.0 {
            continue;
        }
        let x = x.map(|v| v / norm);
        bound = bound.max(spectral_norm(&hadamard(&l, &x)?, &tol)?);
    }
    Ok(DkProbe {
        bound,
        reference,
        samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Matrix;

    #[test]
    fn off_diagonal_swap() {
        let c = PointConfig::from_ints(&[1, 4]).unwrap();
        let x = SymMatrix::try_from_matrix(Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()).unwrap();
        let y = dk_apply(&c, 0.5, &x).unwrap();
        assert_eq!(*y.get(0, 0), 0.0);
        assert!((y.get(0, 1) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn identity_gives_derivative() {
        let c = PointConfig::from_ints(&[1, 2, 5]).unwrap();
        let y = dk_apply(&c, 2.5, &SymMatrix::identity(3, 53)).unwrap();
        for (i, p) in [1.0f64, 2.0, 5.0].iter().enumerate() {
            assert!((y.get(i, i) - 2.5 * p.powf(1.5)).abs() < 1e-12);
            for j in 0..3 {
                if j != i {
                    assert_eq!(*y.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn r_one_is_identity_map() {
        let c = PointConfig::from_ints(&[1, 2, 3]).unwrap();
        let x = SymMatrix::from_upper(3, |i, j| (i * 3 + j) as f64 - 2.0);
        assert_eq!(dk_apply(&c, 1.0, &x).unwrap(), x);
        assert!(dk_apply(&c, 1.0, &SymMatrix::identity(2, 53)).is_err());
    }

    #[test]
    fn hook_matches_power() {
        let c = PointConfig::from_ints(&[1, 3, 4]).unwrap();
        let x = SymMatrix::from_upper(3, |i, j| 1.0 + (i + j) as f64);
        let a = dk_apply(&c, 1.5, &x).unwrap();
        let b = dk_apply_with(&c, |t| t.powf(1.5), |t| 1.5 * t.sqrt(), &x).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn probe_bounds() {
        let c = PointConfig::from_ints(&[1, 2, 3, 7]).unwrap();
        let p = dk_norm_probe(&c, 0.5, 200, 7).unwrap();
        assert!(p.bound >= p.reference * (1.0 - 1e-12));
        assert!(p.bound <= p.reference * (1.0 + 1e-10));
        let p1 = dk_norm_probe(&c, 1.0, 50, 7).unwrap();
        assert!((p1.bound - 1.0).abs() < 1e-12 && (p1.reference - 1.0).abs() < 1e-15);
        assert_eq!(dk_norm_probe(&c, 2.5, 40, 3).unwrap(), dk_norm_probe(&c, 2.5, 40, 3).unwrap());
        assert!(dk_norm_probe(&c, 0.5, 0, 1).is_err());
    }
}
