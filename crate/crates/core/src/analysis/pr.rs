//! Inertia of `P_r = [(p_i + p_j)^r]` against that of `L_{r+1}`.

use dashu::rational::RBig;
use serde::Serialize;

use crate::builders::{power_sum_exact, power_sum_matrix, LoewnerSpec};
use crate::error::{Error, Result};
use crate::inertia::{inertia_auto, InertiaReport, MatrixSource};
use crate::real::Real;
use crate::types::{Exponent, PointConfig, SymMatrix, ToleranceContext};

/// `[(p_i + p_j)^r]` as an engine input.
#[derive(Debug, Clone)]
pub struct PowerSum {
    pub config: PointConfig,
    pub exponent: Exponent,
}

impl MatrixSource for PowerSum {
    fn order(&self) -> usize {
        self.config.n()
    }
    fn build<R: Real>(&self, tol: &ToleranceContext) -> SymMatrix<R> {
        power_sum_matrix(&self.config, self.exponent, tol)
    }
    fn exact(&self) -> Option<SymMatrix<RBig>> {
        let m = self.exponent.integer_value()?;
        Some(power_sum_exact(self.config.exact()?, m))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrComparison {
    pub r: f64,
    pub power_sum: InertiaReport,
    pub loewner: InertiaReport,
    pub matched: bool,
}

/// Inertias of `P_r` and `L_{r+1}`. Integer `r` uses exact rationals.
pub fn pr_compare(config: &PointConfig, r: f64, tol: &ToleranceContext) -> Result<PrComparison> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Precondition(format!("r must be positive, got {r}")));
    }
    let e = Exponent::new(r);
    let config = if e.is_integer() { config.with_exact() } else { config.clone() };
    let power_sum = inertia_auto(
        &PowerSum {
            config: config.clone(),
            exponent: e,
        },
        tol,
    )?;
    let loewner = inertia_auto(&LoewnerSpec::new(config, r + 1.0), tol)?;
    let matched = power_sum.consensus == loewner.consensus;
    Ok(PrComparison {
        r,
        power_sum,
        loewner,
        matched,
    })
}
