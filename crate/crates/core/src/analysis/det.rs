//! Determinants of Loewner matrices and the closed forms for three nodes.

use dashu::rational::RBig;
use serde::Serialize;

use crate::builders::{loewner_exact, loewner_matrix, LoewnerSpec};
use crate::error::{Error, Result};
use crate::linalg::det;
use crate::real::{Real, Scalar};
use crate::types::{PointConfig, ToleranceContext};

fn require_three<T>(nodes: &[T]) -> Result<()> {
    if nodes.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: nodes.len(),
        });
    }
    Ok(())
}

fn squared_vandermonde<T: Scalar>(p: &[T]) -> T {
    let d = |i: usize, j: usize| {
        let x = p[i].clone() - p[j].clone();
        x.clone() * x
    };
    d(0, 1) * d(0, 2) * d(1, 2)
}

/// `-(p1-p2)²(p1-p3)²(p2-p3)²`.
pub fn det_closed_form_l3<T: Scalar>(p: &[T]) -> Result<T> {
    require_three(p)?;
    Ok(-squared_vandermonde(p))
}

/// `-2 Π(p_i-p_j)² · ((Σp)(Σ_{i<j} p_i p_j) + p1 p2 p3)`.
pub fn det_closed_form_l4<T: Scalar>(p: &[T], bits: u32) -> Result<T> {
    require_three(p)?;
    let e1 = p[0].clone() + p[1].clone() + p[2].clone();
    let e2 = p[0].clone() * p[1].clone() + p[0].clone() * p[2].clone() + p[1].clone() * p[2].clone();
    let e3 = p[0].clone() * p[1].clone() * p[2].clone();
    Ok(-(T::from_i64(2, bits) * squared_vandermonde(p) * (e1 * e2 + e3)))
}

/// Exact `det L_m` for an integer exponent.
pub fn loewner_det_exact(nodes: &[RBig], m: i64) -> RBig {
    det(loewner_exact(nodes, m).as_matrix(), 0)
}

/// `det L_r` at the working precision.
pub fn loewner_det<R: Real>(config: &PointConfig, r: f64, tol: &ToleranceContext) -> R {
    let spec = LoewnerSpec::new(config.clone(), r);
    det(loewner_matrix::<R>(&spec, tol).as_matrix(), tol.precision_bits)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetIdentity {
    pub exponent: i64,
    /// Closed form, as an exact fraction string.
    pub closed_form: String,
    pub determinant: String,
    pub closed_form_f64: f64,
    pub matched: bool,
}

/// Compares both closed forms with exact determinants of `L_3` and `L_4`.
/// Floating nodes enter through their exact binary values.
pub fn det_identities(config: &PointConfig) -> Result<[DetIdentity; 2]> {
    let nodes = config.exact_or_dyadic();
    let l3 = det_closed_form_l3(&nodes)?;
    let l4 = det_closed_form_l4(&nodes, 0)?;
    let row = |m: i64, closed: RBig| {
        let d = loewner_det_exact(&nodes, m);
        DetIdentity {
            exponent: m,
            closed_form: closed.to_string(),
            determinant: d.to_string(),
            closed_form_f64: closed.approx_f64(),
            matched: closed == d,
        }
    };
    Ok([row(3, l3), row(4, l4)])
}
