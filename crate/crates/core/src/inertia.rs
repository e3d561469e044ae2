//! Inertia of symmetric matrices by three independent routes:
//!
//! * eigenvalues from cyclic Jacobi rotations, classified against a relative
//!   zero threshold,
//! * a Bunch–Kaufman block `LDLᵀ` congruence (1×1 and 2×2 pivots),
//! * symmetric Gaussian congruence over the rationals.
//!
//! [`inertia_auto`] runs the floating routes at double precision and
//! re-evaluates at 256 and then 512 bits whenever the routes disagree or a
//! computed eigenvalue is too close to the zero threshold to be trusted.

use dashu::rational::RBig;
use serde::Serialize;

use crate::builders::{loewner_exact, loewner_matrix, LoewnerSpec};
use crate::error::{Error, Result};
use crate::real::{Mp, Real, Scalar};
use crate::types::{Inertia, PointConfig, SymMatrix, ToleranceContext, DEFAULT_BITS};

const MAX_SWEEPS: usize = 100;

/// Precision ladder used by [`inertia_auto`].
pub const ESCALATION_BITS: [u32; 3] = [DEFAULT_BITS, 256, 512];

/// Eigenvalues in ascending order plus the final off-diagonal mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<R> {
    pub eigenvalues: Vec<R>,
    pub offdiag_residual: R,
}

impl<R: Real> Spectrum<R> {
    pub fn max_abs(&self) -> R {
        let bits = self.offdiag_residual.bits();
        self.eigenvalues
            .iter()
            .map(Scalar::abs)
            .fold(R::from_i64(0, bits), crate::real::max_of)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(Real::to_f64).collect()
    }
}

fn offdiag_norm<R: Real>(a: &[Vec<R>], bits: u32) -> R {
    let n = a.len();
    let mut s = R::from_i64(0, bits);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[i][j].clone() * a[i][j].clone();
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps continue until the off-diagonal Frobenius mass is at rounding level,
/// or has dropped below `residual_tol · ‖A‖` and stopped shrinking.
pub fn eig_sym<R: Real>(a: &SymMatrix<R>, tol: &ToleranceContext) -> Result<Spectrum<R>> {
    let n = a.order();
    let bits = tol.precision_bits;
    let mut m: Vec<Vec<R>> = a.as_matrix().to_rows();
    let zero = R::from_i64(0, bits);
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: vec![],
            offdiag_residual: zero,
        });
    }
    let norm = a.as_matrix().frobenius();
    let eps = 2f64.powi(-(bits as i32)) * n as f64;
    let floor = R::from_f64(eps, bits) * norm.clone();
    let target = R::from_f64(tol.residual_tol, bits) * norm.clone();
    let huge = R::from_f64(1e100, bits);
    let one = R::from_i64(1, bits);
    let two = R::from_i64(2, bits);

    let mut prev: Option<R> = None;
    let mut off = offdiag_norm(&m, bits);
    let mut sweeps = 0;
    loop {
        let stalled = prev
            .as_ref()
            .is_some_and(|p| off.clone() * R::from_i64(4, bits) > p.clone());
        if off.is_zero() || off <= floor || (off <= target && stalled) {
            break;
        }
        if sweeps == MAX_SWEEPS {
            if off <= target {
                break;
            }
            return Err(Error::NoConvergence { sweeps, bits });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[p][q].clone();
                if apq.is_zero() {
                    continue;
                }
                let theta = (m[q][q].clone() - m[p][p].clone()) / (two.clone() * apq.clone());
                let t = if theta.clone().abs() > huge {
                    one.clone() / (two.clone() * theta)
                } else {
                    let mag = one.clone()
                        / (theta.clone().abs() + (theta.clone() * theta.clone() + one.clone()).sqrt());
                    if theta.sign() < 0 {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = one.clone() / (t.clone() * t.clone() + one.clone()).sqrt();
                let s = t.clone() * c.clone();
                m[p][p] = m[p][p].clone() - t.clone() * apq.clone();
                m[q][q] = m[q][q].clone() + t * apq;
                m[p][q] = zero.clone();
                m[q][p] = zero.clone();
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m[k][p].clone();
                    let akq = m[k][q].clone();
                    let new_kp = c.clone() * akp.clone() - s.clone() * akq.clone();
                    let new_kq = s.clone() * akp + c.clone() * akq;
                    m[k][p] = new_kp.clone();
                    m[p][k] = new_kp;
                    m[k][q] = new_kq.clone();
                    m[q][k] = new_kq;
                }
            }
        }
        sweeps += 1;
        prev = Some(off);
        off = offdiag_norm(&m, bits);
    }

    let mut eigenvalues: Vec<R> = (0..n).map(|i| m[i][i].clone()).collect();
    eigenvalues.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(Spectrum {
        eigenvalues,
        offdiag_residual: off,
    })
}

/// Zero threshold `zero_rel_tol · n · scale`.
pub fn zero_threshold<R: Real>(scale: &R, order: usize, tol: &ToleranceContext) -> R {
    R::from_f64(tol.zero_rel_tol * order as f64, tol.precision_bits) * scale.clone()
}

/// Counts eigenvalues by sign; `|λ| ≤ zero_rel_tol · n · scale` counts as zero.
pub fn inertia_from_spectrum<R: Real>(s: &Spectrum<R>, scale: &R, tol: &ToleranceContext) -> Inertia {
    let n = s.eigenvalues.len();
    let thr = zero_threshold(scale, n, tol);
    let mut out = Inertia::default();
    for l in &s.eigenvalues {
        if l.clone().abs() <= thr {
            out.zero += 1;
        } else if l.sign() > 0 {
            out.pos += 1;
        } else {
            out.neg += 1;
        }
    }
    out
}

fn trailing_frobenius<R: Real>(a: &[Vec<R>], k: usize, bits: u32) -> R {
    let mut s = R::from_i64(0, bits);
    for row in &a[k..] {
        for x in &row[k..] {
            s = s + x.clone() * x.clone();
        }
    }
    s.sqrt()
}

fn sym_swap<T: Clone>(a: &mut [Vec<T>], i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// Inertia by Bunch–Kaufman symmetric-pivoted block congruence.
///
/// A trailing block whose Frobenius norm is at most
/// `zero_rel_tol · n · ‖A‖_F` contributes its size to ζ.
pub fn inertia_ldl<R: Real>(a: &SymMatrix<R>, tol: &ToleranceContext) -> Inertia {
    let n = a.order();
    let bits = tol.precision_bits;
    let mut m = a.as_matrix().to_rows();
    let norm = a.as_matrix().frobenius();
    let thr = zero_threshold(&norm, n, tol);
    let alpha = R::from_f64((1.0 + 17f64.sqrt()) / 8.0, bits);
    let mut out = Inertia::default();
    let mut k = 0;
    while k < n {
        if trailing_frobenius(&m, k, bits) <= thr {
            out.zero += n - k;
            break;
        }
        let akk = m[k][k].clone().abs();
        let (mut lambda, mut r) = (R::from_i64(0, bits), k);
        for i in k + 1..n {
            let v = m[i][k].clone().abs();
            if v > lambda {
                lambda = v;
                r = i;
            }
        }
        if akk <= thr && lambda <= thr {
            // negligible column: drop it
            out.zero += 1;
            k += 1;
            continue;
        }
        let two_by_two;
        if akk >= alpha.clone() * lambda.clone() {
            two_by_two = false;
        } else {
            let mut sigma = R::from_i64(0, bits);
            for j in k..n {
                if j != r {
                    let v = m[r][j].clone().abs();
                    if v > sigma {
                        sigma = v;
                    }
                }
            }
            if akk.clone() * sigma.clone() >= alpha.clone() * lambda.clone() * lambda.clone() {
                two_by_two = false;
            } else if m[r][r].clone().abs() >= alpha.clone() * sigma {
                sym_swap(&mut m, k, r);
                two_by_two = false;
            } else {
                sym_swap(&mut m, k + 1, r);
                two_by_two = true;
            }
        }
        if !two_by_two {
            let d = m[k][k].clone();
            match d.sign() {
                1 => out.pos += 1,
                -1 => out.neg += 1,
                _ => out.zero += 1,
            }
            if !d.is_zero() {
                for i in k + 1..n {
                    let f = m[i][k].clone() / d.clone();
                    for j in k + 1..n {
                        m[i][j] = m[i][j].clone() - f.clone() * m[k][j].clone();
                    }
                }
            }
            k += 1;
        } else {
            let (p, q, s) = (m[k][k].clone(), m[k + 1][k + 1].clone(), m[k][k + 1].clone());
            let det = p.clone() * q.clone() - s.clone() * s.clone();
            match det.sign() {
                -1 => {
                    out.pos += 1;
                    out.neg += 1;
                }
                1 if p.sign() > 0 => out.pos += 2,
                1 => out.neg += 2,
                _ => {
                    out.zero += 1;
                    if (p.clone() + q.clone()).sign() > 0 {
                        out.pos += 1;
                    } else {
                        out.neg += 1;
                    }
                }
            }
            if !det.is_zero() {
                for i in k + 2..n {
                    let (x0, x1) = (m[i][k].clone(), m[i][k + 1].clone());
                    // row i of [x0 x1] E^{-1}
                    let w0 = (q.clone() * x0.clone() - s.clone() * x1.clone()) / det.clone();
                    let w1 = (p.clone() * x1 - s.clone() * x0) / det.clone();
                    for j in k + 2..n {
                        m[i][j] = m[i][j].clone()
                            - w0.clone() * m[k][j].clone()
                            - w1.clone() * m[k + 1][j].clone();
                    }
                }
            }
            k += 2;
        }
    }
    out
}

/// Exact inertia of a rational symmetric matrix by Gaussian congruence.
///
/// When every remaining diagonal entry vanishes but some off-diagonal entry
/// `a_ij` does not, adding row/column `j` to row/column `i` produces the
/// nonzero pivot `2 a_ij`.
pub fn inertia_congruence_exact(a: &SymMatrix<RBig>) -> Inertia {
    let n = a.order();
    let mut m = a.as_matrix().to_rows();
    let mut out = Inertia::default();
    let mut k = 0;
    while k < n {
        let piv = (k..n).find(|&i| !m[i][i].is_zero());
        let piv = match piv {
            Some(i) => i,
            None => {
                let off = (k..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !m[i][j].is_zero());
                match off {
                    None => {
                        out.zero += n - k;
                        break;
                    }
                    Some((i, j)) => {
                        // congruence with I + e_i e_jᵀ: row_i += row_j, col_i += col_j
                        for c in k..n {
                            let v = m[i][c].clone() + m[j][c].clone();
                            m[i][c] = v;
                        }
                        for r in k..n {
                            let v = m[r][i].clone() + m[r][j].clone();
                            m[r][i] = v;
                        }
                        i
                    }
                }
            }
        };
        sym_swap(&mut m, k, piv);
        let d = m[k][k].clone();
        if Scalar::sign(&d) > 0 {
            out.pos += 1;
        } else {
            out.neg += 1;
        }
        for i in k + 1..n {
            let f = m[i][k].clone() / d.clone();
            if f.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let v = m[i][j].clone() - f.clone() * m[k][j].clone();
                m[i][j] = v;
            }
        }
        k += 1;
    }
    out
}

/// Exact inertia of the Loewner matrix for a positive integer exponent.
pub fn inertia_exact_integer(config: &PointConfig, r: i64) -> Result<Inertia> {
    if r < 1 {
        return Err(Error::Precondition(format!("integer exponent must be ≥ 1, got {r}")));
    }
    let exact = config.exact().ok_or(Error::MissingExact)?;
    Ok(inertia_congruence_exact(&loewner_exact(exact, r)))
}

/// Outcome of running every available route on one matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InertiaReport {
    pub by_eigen: Inertia,
    pub by_ldl: Inertia,
    pub by_exact: Option<Inertia>,
    pub consensus: Inertia,
    pub disagreement: bool,
    /// Precision at which the floating routes were evaluated.
    pub precision_bits: u32,
    /// Ascending eigenvalues (rounded to `f64`).
    pub eigenvalues: Vec<f64>,
    /// `max |λ|`, the scale of the zero threshold.
    pub scale: f64,
    /// Smallest `|λ| / (zero threshold)` among eigenvalues, `inf` if none.
    pub min_margin: f64,
}

/// Runs the eigen and LDL routes on `a`, plus the exact route when a rational
/// version of the same matrix is supplied. The exact result, when present, is
/// the consensus; otherwise the eigen route is reported and a split is
/// flagged.
pub fn inertia_with_exact<R: Real>(
    a: &SymMatrix<R>,
    tol: &ToleranceContext,
    exact: Option<&SymMatrix<RBig>>,
) -> Result<InertiaReport> {
    let spec = eig_sym(a, tol)?;
    let scale = spec.max_abs();
    let by_eigen = inertia_from_spectrum(&spec, &scale, tol);
    let by_ldl = inertia_ldl(a, tol);
    let by_exact = exact.map(inertia_congruence_exact);
    let consensus = by_exact.unwrap_or(by_eigen);
    let disagreement = by_eigen != consensus || by_ldl != consensus;
    let thr = zero_threshold(&scale, a.order(), tol).to_f64();
    let min_margin = spec
        .eigenvalues
        .iter()
        .map(|l| if thr > 0.0 { l.to_f64().abs() / thr } else { f64::INFINITY })
        .fold(f64::INFINITY, f64::min);
    Ok(InertiaReport {
        by_eigen,
        by_ldl,
        by_exact,
        consensus,
        disagreement,
        precision_bits: tol.precision_bits,
        eigenvalues: spec.to_f64(),
        scale: scale.to_f64(),
        min_margin,
    })
}

/// Eigen and LDL routes, plus the exact route of the Loewner matrix on
/// `exact_hint = (config, r)` when given.
pub fn inertia<R: Real>(
    a: &SymMatrix<R>,
    tol: &ToleranceContext,
    exact_hint: Option<(&PointConfig, i64)>,
) -> Result<InertiaReport> {
    let exact = match exact_hint {
        Some((config, r)) => {
            let nodes = config.exact().ok_or(Error::MissingExact)?;
            Some(loewner_exact(nodes, r))
        }
        None => None,
    };
    inertia_with_exact(a, tol, exact.as_ref())
}

/// A symmetric matrix that can be rebuilt at any precision.
pub trait MatrixSource: Sync {
    fn order(&self) -> usize;
    fn build<R: Real>(&self, tol: &ToleranceContext) -> SymMatrix<R>;
    /// Exact rational version, when one exists.
    fn exact(&self) -> Option<SymMatrix<RBig>> {
        None
    }
}

impl MatrixSource for LoewnerSpec {
    fn order(&self) -> usize {
        self.config.n()
    }
    fn build<R: Real>(&self, tol: &ToleranceContext) -> SymMatrix<R> {
        loewner_matrix(self, tol)
    }
    fn exact(&self) -> Option<SymMatrix<RBig>> {
        let m = self.exponent.integer_value()?;
        Some(loewner_exact(self.config.exact()?, m))
    }
}

/// A computed eigenvalue within this factor of the zero threshold is not
/// trusted at the current precision.
const GUARD: f64 = 16.0;

fn needs_more_precision(rep: &InertiaReport) -> bool {
    if rep.disagreement {
        return true;
    }
    if rep.by_exact.is_some() {
        return false;
    }
    // zero eigenvalues are only believed once extended precision agrees
    let suspicious_zero = rep.consensus.zero > 0 && rep.precision_bits <= DEFAULT_BITS;
    suspicious_zero || (rep.min_margin > 1.0 && rep.min_margin <= GUARD)
}

/// Evaluates `src` at `bits` of precision.
pub fn report_at<S: MatrixSource>(
    src: &S,
    tol: &ToleranceContext,
    exact: Option<&SymMatrix<RBig>>,
) -> Result<InertiaReport> {
    if tol.precision_bits <= DEFAULT_BITS {
        inertia_with_exact(&src.build::<f64>(tol), tol, exact)
    } else {
        inertia_with_exact(&src.build::<Mp>(tol), tol, exact)
    }
}

/// Inertia with automatic precision escalation, starting at
/// `tol.precision_bits` and climbing [`ESCALATION_BITS`].
pub fn inertia_auto<S: MatrixSource>(src: &S, tol: &ToleranceContext) -> Result<InertiaReport> {
    tol.validate()?;
    let exact = src.exact();
    let mut ladder: Vec<u32> = vec![tol.precision_bits];
    ladder.extend(ESCALATION_BITS.iter().copied().filter(|&b| b > tol.precision_bits));
    let mut last = None;
    for (idx, &bits) in ladder.iter().enumerate() {
        let t = if idx == 0 { *tol } else { tol.at_bits(bits) };
        let rep = match report_at(src, &t, exact.as_ref()) {
            Ok(rep) => rep,
            Err(e @ Error::NoConvergence { .. }) => {
                if idx + 1 == ladder.len() {
                    return Err(e);
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let done = !needs_more_precision(&rep);
        last = Some(rep);
        if done {
            break;
        }
    }
    Ok(last.expect("at least one precision level evaluated"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{antidiag_v, ones_e};
    use crate::types::Matrix;

    fn sym(rows: &[&[f64]]) -> SymMatrix<f64> {
        SymMatrix::try_from_matrix(Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap())
            .unwrap()
    }

    fn t() -> ToleranceContext {
        ToleranceContext::default()
    }

    #[test]
    fn eig_two_by_two_closed_form() {
        let s = eig_sym(&sym(&[&[2.0, 3.0], &[3.0, 4.0]]), &t()).unwrap();
        let r10 = 10f64.sqrt();
        assert!((s.eigenvalues[0] - (3.0 - r10)).abs() < 1e-14);
        assert!((s.eigenvalues[1] - (3.0 + r10)).abs() < 1e-14);
        assert_eq!(inertia_from_spectrum(&s, &s.max_abs(), &t()), Inertia::new(1, 0, 1));
    }

    #[test]
    fn eig_identity_and_ones() {
        let id = SymMatrix::<f64>::identity(3, 53);
        assert_eq!(eig_sym(&id, &t()).unwrap().eigenvalues, vec![1.0; 3]);
        let e = ones_e::<f64>(3, 53);
        let s = eig_sym(&e, &t()).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-15 && s.eigenvalues[1].abs() < 1e-15);
        assert!((s.eigenvalues[2] - 3.0).abs() < 1e-14);
        assert_eq!(inertia_from_spectrum(&s, &s.max_abs(), &t()), Inertia::new(1, 2, 0));
    }

    #[test]
    fn spectrum_classification_examples() {
        let s = Spectrum {
            eigenvalues: vec![-5.0],
            offdiag_residual: 0.0,
        };
        assert_eq!(inertia_from_spectrum(&s, &5.0, &t()), Inertia::new(0, 0, 1));
        let s = Spectrum {
            eigenvalues: vec![0.0, 0.0, 3.0],
            offdiag_residual: 0.0,
        };
        assert_eq!(inertia_from_spectrum(&s, &3.0, &t()), Inertia::new(1, 2, 0));
    }

    #[test]
    fn ldl_examples() {
        assert_eq!(inertia_ldl(&sym(&[&[2.0, 3.0], &[3.0, 4.0]]), &t()), Inertia::new(1, 0, 1));
        assert_eq!(inertia_ldl(&ones_e::<f64>(3, 53), &t()), Inertia::new(1, 2, 0));
        let d = sym(&[&[1.0, 0.0, 0.0], &[0.0, -2.0, 0.0], &[0.0, 0.0, 0.0]]);
        assert_eq!(inertia_ldl(&d, &t()), Inertia::new(1, 1, 1));
        // zero diagonal forces a 2×2 pivot
        assert_eq!(inertia_ldl(&antidiag_v::<f64>(4, 53), &t()), Inertia::new(2, 0, 2));
        assert_eq!(inertia_ldl(&antidiag_v::<f64>(3, 53), &t()), Inertia::new(2, 0, 1));
    }

    #[test]
    fn ldl_zero_column_in_the_middle() {
        let a = sym(&[&[1.0, 0.0, 2.0], &[0.0, 0.0, 0.0], &[2.0, 0.0, 1.0]]);
        assert_eq!(inertia_ldl(&a, &t()), Inertia::new(1, 1, 1));
    }

    #[test]
    fn exact_congruence_handles_zero_diagonal() {
        let v = antidiag_v::<RBig>(2, 0);
        assert_eq!(inertia_congruence_exact(&v), Inertia::new(1, 0, 1));
        let v3 = antidiag_v::<RBig>(3, 0);
        assert_eq!(inertia_congruence_exact(&v3), Inertia::new(2, 0, 1));
        let z = SymMatrix::from_upper(2, |_, _| RBig::from_i64(0, 0));
        assert_eq!(inertia_congruence_exact(&z), Inertia::new(0, 2, 0));
    }

    #[test]
    fn exact_integer_examples() {
        let c = PointConfig::from_ints(&[1, 2, 3]).unwrap();
        assert_eq!(inertia_exact_integer(&c, 2).unwrap(), Inertia::new(1, 1, 1));
        let c4 = PointConfig::from_ints(&[1, 2, 3, 4]).unwrap();
        assert_eq!(inertia_exact_integer(&c4, 3).unwrap(), Inertia::new(2, 1, 1));
        let c2 = PointConfig::from_ints(&[1, 2]).unwrap();
        assert_eq!(inertia_exact_integer(&c2, 1).unwrap(), Inertia::new(1, 1, 0));
        let f = PointConfig::from_f64s(&[1.0, 2.0]).unwrap();
        assert_eq!(inertia_exact_integer(&f, 1), Err(Error::MissingExact));
        assert!(inertia_exact_integer(&c2, 0).is_err());
    }

    #[test]
    fn report_examples() {
        let c = PointConfig::from_ints(&[1, 2, 3]).unwrap();
        let a = inertia_auto(&LoewnerSpec::new(c.clone(), 2.5), &t()).unwrap();
        assert_eq!(a.consensus, Inertia::new(2, 0, 1));
        assert!(!a.disagreement);
        let b = inertia_auto(&LoewnerSpec::new(c.clone(), 1.5), &t()).unwrap();
        assert_eq!(b.consensus, Inertia::new(1, 0, 2));
        let e = inertia(&ones_e::<f64>(4, 53), &t(), None).unwrap();
        assert_eq!(e.consensus, Inertia::new(1, 3, 0));
        let hinted = inertia(
            &loewner_matrix::<f64>(&LoewnerSpec::new(c.clone(), 2.0), &t()),
            &t(),
            Some((&c, 2)),
        )
        .unwrap();
        assert_eq!(hinted.by_exact, Some(Inertia::new(1, 1, 1)));
        assert_eq!(hinted.consensus, Inertia::new(1, 1, 1));
    }

    #[test]
    fn multiprecision_jacobi_resolves_tiny_eigenvalues() {
        // diag(1, 1e-30) rotated by 45°: invisible at double precision
        let tol = ToleranceContext::extended();
        let h = Mp::from_f64(0.5, 256);
        let tiny = Mp::from_f64(1e-30, 256);
        let one = Mp::from_i64(1, 256);
        let a = SymMatrix::from_upper(2, |i, j| {
            if i == j {
                h.clone() * (one.clone() + tiny.clone())
            } else {
                h.clone() * (one.clone() - tiny.clone())
            }
        });
        let s = eig_sym(&a, &tol).unwrap();
        assert!((s.eigenvalues[0].to_f64() - 1e-30).abs() < 1e-40);
        assert_eq!(inertia_ldl(&a, &tol), Inertia::new(2, 0, 0));
    }
}
