//! Zeros of `f(x) = Σ c_j (x^r - p_j^r)/(x - p_j)` on `(0, ∞)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::PointConfig;

/// Linear combination of the divided differences of `t^r` at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComboFunction {
    config: PointConfig,
    coeffs: Vec<f64>,
    exponent: f64,
}

impl ComboFunction {
    pub fn new(config: PointConfig, coeffs: Vec<f64>, exponent: f64) -> Result<Self> {
        if coeffs.len() != config.n() {
            return Err(Error::DimensionMismatch {
                expected: config.n(),
                found: coeffs.len(),
            });
        }
        if coeffs.iter().all(|&c| c == 0.0) {
            return Err(Error::Precondition("coefficients must not all vanish".into()));
        }
        if !(exponent > 0.0) {
            return Err(Error::Precondition(format!("exponent must be positive, got {exponent}")));
        }
        Ok(ComboFunction {
            config,
            coeffs,
            exponent,
        })
    }

    pub fn config(&self) -> &PointConfig {
        &self.config
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Value and the magnitude `Σ |c_j · term_j|` used to judge whether the
    /// value is distinguishable from zero.
    fn eval_with_scale(&self, x: f64) -> (f64, f64) {
        let r = self.exponent;
        let mut sum = 0.0;
        let mut mag = 0.0;
        for (&c, &p) in self.coeffs.iter().zip(self.config.points()) {
            if c == 0.0 {
                continue;
            }
            // p^(r-1) · ((1+u)^r - 1)/u with u = (x - p)/p
            let u = (x - p) / p;
            let phi = if u == 0.0 { r } else { (r * u.ln_1p()).exp_m1() / u };
            let term = c * p.powf(r - 1.0) * phi;
            sum += term;
            mag += term.abs();
        }
        (sum, mag)
    }
}

/// `f(x)`; at a node the removable singularity takes its limit `r p^(r-1)`.
pub fn combo_eval(f: &ComboFunction, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Precondition(format!("evaluation point must be positive, got {x}")));
    }
    Ok(f.eval_with_scale(x).0)
}

/// Scan interval and grid policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPolicy {
    pub lo: f64,
    pub hi: f64,
    /// Points of the geometric grid.
    pub points: usize,
    /// `|f| ≤ zero_rel_tol · Σ|c_j term_j|` counts as unresolved.
    pub zero_rel_tol: f64,
    /// Local refinement levels for unresolved samples.
    pub refine_levels: usize,
}

impl ScanPolicy {
    /// `[min p / 100, 100 max p]` with 10^5 geometric points.
    pub fn for_config(config: &PointConfig) -> Self {
        let p = config.points();
        ScanPolicy {
            lo: p[0] / 100.0,
            hi: p[p.len() - 1] * 100.0,
            points: 100_000,
            zero_rel_tol: 1e-10,
            refine_levels: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroCount {
    pub count: usize,
    /// Intervals each containing a sign change.
    pub brackets: Vec<(f64, f64)>,
    /// Intervals where `f` stayed within the zero threshold after refinement
    /// and the signs on either side agree; not counted.
    pub ambiguous: Vec<(f64, f64)>,
}

const REFINE_SPLIT: usize = 16;

/// Counts strict sign changes of `f` over a geometric grid.
pub fn count_zeros(f: &ComboFunction, scan: &ScanPolicy) -> Result<ZeroCount> {
    if !(scan.lo > 0.0 && scan.hi > scan.lo && scan.points >= 2) {
        return Err(Error::Precondition("scan interval must satisfy 0 < lo < hi with ≥ 2 points".into()));
    }
    let ratio = (scan.hi / scan.lo).ln() / (scan.points - 1) as f64;
    let xs: Vec<f64> = (0..scan.points)
        .map(|i| scan.lo * (ratio * i as f64).exp())
        .collect();
    let classify = |x: f64| -> i8 {
        let (v, mag) = f.eval_with_scale(x);
        if v.abs() <= scan.zero_rel_tol * mag || v == 0.0 {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    };
    let signs = crate::par::map(&xs, |&x| classify(x));

    let mut out = ZeroCount {
        count: 0,
        brackets: Vec::new(),
        ambiguous: Vec::new(),
    };
    // walk strict samples; runs of unresolved samples between them are refined
    let mut last: Option<(f64, i8)> = None;
    let mut i = 0;
    while i < xs.len() {
        if signs[i] != 0 {
            if let Some((xa, sa)) = last {
                if sa != signs[i] {
                    out.count += 1;
                    out.brackets.push((xa, xs[i]));
                }
            }
            last = Some((xs[i], signs[i]));
            i += 1;
            continue;
        }
        let start = i;
        while i < xs.len() && signs[i] == 0 {
            i += 1;
        }
        let left = last.map_or(xs[start], |(x, _)| x);
        let right = if i < xs.len() { xs[i] } else { xs[xs.len() - 1] };
        let mut inner = Vec::new();
        refine(&classify, left, right, scan.refine_levels, &mut inner);
        let before = out.count;
        for (x, s) in inner {
            if let Some((xa, sa)) = last {
                if sa != s {
                    out.count += 1;
                    out.brackets.push((xa, x));
                }
            }
            last = Some((x, s));
        }
        let resolved_sign = if i < xs.len() { Some(signs[i]) } else { None };
        if out.count == before {
            let opposite = matches!((last, resolved_sign), (Some((_, a)), Some(b)) if a != b);
            if !opposite {
                out.ambiguous.push((left, right));
            }
        }
    }
    Ok(out)
}

/// Strictly classified samples strictly inside `(a, b)`, ascending.
fn refine(classify: &impl Fn(f64) -> i8, a: f64, b: f64, levels: usize, out: &mut Vec<(f64, i8)>) {
    if levels == 0 || !(b > a) {
        return;
    }
    let ratio = (b / a).ln() / REFINE_SPLIT as f64;
    let mut prev = a;
    for s in 1..=REFINE_SPLIT {
        let x = if s == REFINE_SPLIT { b } else { a * (ratio * s as f64).exp() };
        if s < REFINE_SPLIT {
            let c = classify(x);
            if c != 0 {
                out.push((x, c));
            } else {
                refine(classify, prev, x, levels - 1, out);
            }
        }
        prev = x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: &[f64]) -> PointConfig {
        PointConfig::from_f64s(p).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = ComboFunction::new(cfg(&[2.0]), vec![1.0], 2.0).unwrap();
        assert!((combo_eval(&f, 3.0).unwrap() - 5.0).abs() < 1e-14);
        // removable singularity at the node: r p^(r-1) = 4
        assert!((combo_eval(&f, 2.0).unwrap() - 4.0).abs() < 1e-14);
        let g = ComboFunction::new(cfg(&[1.0, 2.0]), vec![1.0, -1.0], 2.0).unwrap();
        assert!((combo_eval(&g, 3.0).unwrap() + 1.0).abs() < 1e-14);
        assert!(combo_eval(&g, 0.0).is_err());
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(ComboFunction::new(cfg(&[1.0]), vec![0.0], 1.5).is_err());
        assert!(ComboFunction::new(cfg(&[1.0]), vec![1.0, 2.0], 1.5).is_err());
    }

    /// Independent oracle: plain sign scan of the naive quotient, no
    /// refinement or threshold.
    fn naive_sign_changes(p: &[f64], c: &[f64], r: f64, lo: f64, hi: f64, m: usize) -> usize {
        let mut prev = 0.0f64;
        let mut changes = 0;
        for i in 0..m {
            let x = lo * (hi / lo).powf(i as f64 / (m - 1) as f64);
            let v: f64 = p
                .iter()
                .zip(c)
                .map(|(&pj, &cj)| cj * (x.powf(r) - pj.powf(r)) / (x - pj))
                .sum();
            if v != 0.0 && v.is_finite() {
                if prev != 0.0 && v.signum() != prev.signum() {
                    changes += 1;
                }
                prev = v;
            }
        }
        changes
    }

    #[test]
    fn single_term_has_no_zeros() {
        let f = ComboFunction::new(cfg(&[1.5]), vec![-2.0], 0.5).unwrap();
        let z = count_zeros(&f, &ScanPolicy::for_config(f.config())).unwrap();
        assert_eq!(z.count, 0);
    }

    #[test]
    fn two_terms_square_root() {
        let p = [1.0, 2.0];
        let f = ComboFunction::new(cfg(&p), vec![1.0, -1.0], 0.5).unwrap();
        let z = count_zeros(&f, &ScanPolicy::for_config(f.config())).unwrap();
        let oracle = naive_sign_changes(&p, &[1.0, -1.0], 0.5, 0.01, 200.0, 20_001);
        assert_eq!(z.count, oracle);
        assert!(z.count <= 1);
    }

    #[test]
    fn three_terms() {
        let p = [1.0, 2.0, 3.0];
        let c = [1.0, 1.0, -2.0];
        let f = ComboFunction::new(cfg(&p), c.to_vec(), 2.5).unwrap();
        let z = count_zeros(&f, &ScanPolicy::for_config(f.config())).unwrap();
        let oracle = naive_sign_changes(&p, &c, 2.5, 0.01, 300.0, 20_001);
        assert_eq!(z.count, oracle);
        assert!(z.count <= 2);
        assert_eq!(z.brackets.len(), z.count);
    }

    #[test]
    fn integer_exponent_can_exceed_bound() {
        // r = 1 makes every term 1: f = Σc ≡ 0 when Σc = 0
        let f = ComboFunction::new(cfg(&[1.0, 2.0]), vec![1.0, -1.0], 1.0).unwrap();
        let z = count_zeros(&f, &ScanPolicy::for_config(f.config())).unwrap();
        assert_eq!(z.count, 0);
        assert_eq!(z.ambiguous.len(), 1);
    }
}
