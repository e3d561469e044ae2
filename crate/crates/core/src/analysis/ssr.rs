//! Sign patterns of minors and compound matrices.

use dashu::rational::RBig;
use serde::Serialize;

use crate::builders::{loewner_exact_config, loewner_matrix, LoewnerSpec};
use crate::error::{Error, Result};
use crate::inertia::{zero_threshold, InertiaReport, ESCALATION_BITS};
use crate::linalg::det;
use crate::real::{Mp, Scalar};
use crate::types::{Exponent, Matrix, PointConfig, ToleranceContext};

/// Largest order accepted by [`ssr_scan`]; the scan costs `Σ C(n,k)²`
/// determinants.
pub const MAX_SSR_ORDER: usize = 7;

/// Common sign of all minors of one size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MinorSign {
    Positive,
    Negative,
    /// Two minors with opposite strict signs.
    Mixed,
    /// Every minor is zero.
    Zero,
    /// Some minors zero, the rest of one sign.
    PartlyZero,
}

impl MinorSign {
    pub fn is_strict(self) -> bool {
        matches!(self, MinorSign::Positive | MinorSign::Negative)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SsrClass {
    /// Strict common sign for every `k ≤ n`.
    Full,
    /// Strict common sign for every `k ≤ m`, with `m < n`.
    Partial(usize),
    Neither,
}

impl SsrClass {
    /// Largest `m` with strict sign for all `k ≤ m`.
    pub fn level(self, order: usize) -> usize {
        match self {
            SsrClass::Full => order,
            SsrClass::Partial(m) => m,
            SsrClass::Neither => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SsrReport {
    pub order: usize,
    /// `per_k[k - 1]` classifies the `k × k` minors.
    pub per_k: Vec<MinorSign>,
    pub ssr_class: SsrClass,
    pub precision_bits: u32,
    pub exact: bool,
}

/// Lexicographically ordered `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(pos) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn hadamard_bound<T: Scalar>(m: &Matrix<T>) -> f64 {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.approx_f64().powi(2)).sum::<f64>().sqrt())
        .product()
}

fn classify_minor<T: Scalar>(sub: &Matrix<T>, tol: &ToleranceContext) -> i8 {
    let d = det(sub, tol.precision_bits);
    if T::EXACT {
        return d.sign();
    }
    if d.approx_f64().abs() <= tol.zero_rel_tol * hadamard_bound(sub) {
        0
    } else {
        d.sign()
    }
}

fn classify_all(signs: &[i8]) -> MinorSign {
    let pos = signs.iter().any(|&s| s > 0);
    let neg = signs.iter().any(|&s| s < 0);
    let zero = signs.contains(&0);
    match (pos, neg, zero) {
        (true, true, _) => MinorSign::Mixed,
        (false, false, _) => MinorSign::Zero,
        (_, _, true) => MinorSign::PartlyZero,
        (true, false, false) => MinorSign::Positive,
        (false, true, false) => MinorSign::Negative,
    }
}

/// Classifies every `k × k` minor of the square matrix `a` for `k ≤ k_max`.
/// Exact scalars are compared with zero directly; floating minors within
/// `zero_rel_tol` times their Hadamard bound count as zero.
pub fn ssr_scan<T: Scalar>(a: &Matrix<T>, k_max: usize, tol: &ToleranceContext) -> Result<SsrReport> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.cols(),
        });
    }
    if n > MAX_SSR_ORDER {
        return Err(Error::TooLarge {
            order: n,
            max: MAX_SSR_ORDER,
        });
    }
    if k_max == 0 || k_max > n {
        return Err(Error::Precondition(format!("k_max must lie in 1..={n}, got {k_max}")));
    }
    let mut per_k = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let sets = subsets(n, k);
        let pairs: Vec<(&[usize], &[usize])> = sets
            .iter()
            .flat_map(|r| sets.iter().map(move |c| (r.as_slice(), c.as_slice())))
            .collect();
        let signs = crate::par::map(&pairs, |(r, c)| classify_minor(&a.select(r, c), tol));
        per_k.push(classify_all(&signs));
    }
    let level = per_k.iter().take_while(|s| s.is_strict()).count();
    let ssr_class = match level {
        0 => SsrClass::Neither,
        m if m == n => SsrClass::Full,
        m => SsrClass::Partial(m),
    };
    Ok(SsrReport {
        order: n,
        per_k,
        ssr_class,
        precision_bits: if T::EXACT { 0 } else { tol.precision_bits },
        exact: T::EXACT,
    })
}

/// SSR scan of the Loewner matrix `L_r`. Integer exponents use exact
/// rationals (floating nodes by their binary value); otherwise the scan is
/// repeated at higher precision while any minor class is not strict.
pub fn loewner_ssr(config: &PointConfig, r: f64, k_max: usize, tol: &ToleranceContext) -> Result<SsrReport> {
    let e = Exponent::new(r);
    if let Some(m) = e.integer_value() {
        let exact = loewner_exact_config(&config.with_exact(), m);
        return ssr_scan::<RBig>(exact.as_matrix(), k_max, tol);
    }
    let spec = LoewnerSpec::new(config.clone(), r);
    let mut ladder = vec![tol.precision_bits];
    ladder.extend(ESCALATION_BITS.iter().copied().filter(|&b| b > tol.precision_bits));
    let mut last = None;
    for (i, &bits) in ladder.iter().enumerate() {
        let t = if i == 0 { *tol } else { tol.at_bits(bits) };
        let rep = if bits <= crate::types::DEFAULT_BITS {
            ssr_scan(loewner_matrix::<f64>(&spec, &t).as_matrix(), k_max, &t)?
        } else {
            ssr_scan(loewner_matrix::<Mp>(&spec, &t).as_matrix(), k_max, &t)?
        };
        let settled = !rep
            .per_k
            .iter()
            .any(|s| matches!(s, MinorSign::Zero | MinorSign::PartlyZero));
        last = Some(rep);
        if settled {
            break;
        }
    }
    Ok(last.expect("at least one precision level evaluated"))
}

/// `k`-th compound: the `C(n,k) × C(n,k)` matrix of `k × k` minors indexed by
/// lexicographic subsets.
pub fn compound_matrix<T: Scalar>(a: &Matrix<T>, k: usize, bits: u32) -> Result<Matrix<T>> {
    let n = a.rows();
    if k == 0 || k > n.min(a.cols()) {
        return Err(Error::Precondition(format!("compound order {k} outside 1..={n}")));
    }
    let rs = subsets(a.rows(), k);
    let cs = subsets(a.cols(), k);
    Ok(Matrix::from_fn(rs.len(), cs.len(), |i, j| det(&a.select(&rs[i], &cs[j]), bits)))
}

/// Smallest gap between consecutive eigenvalues classified nonzero under
/// the report's zero threshold; `None` with fewer than two such eigenvalues.
pub fn min_nonzero_gap(rep: &InertiaReport, tol: &ToleranceContext) -> Option<f64> {
    let thr = zero_threshold(&rep.scale, rep.eigenvalues.len(), tol);
    let nz: Vec<f64> = rep.eigenvalues.iter().copied().filter(|l| l.abs() > thr).collect();
    nz.windows(2).map(|w| w[1] - w[0]).reduce(f64::min)
}
