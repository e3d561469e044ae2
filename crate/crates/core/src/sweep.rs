//! Eigenvalue trajectories of `L_r` along a grid of exponents.

use std::fmt::Write as _;

use serde::Serialize;

use crate::builders::LoewnerSpec;
use crate::error::{Error, Result};
use crate::inertia::{inertia_auto, zero_threshold};
use crate::types::{Exponent, Inertia, PointConfig, ToleranceContext, EXTENDED_BITS};

/// Grid points this close to an integer are replaced by the integer.
pub const SNAP: f64 = 1e-9;

/// Order from which sweeps start at extended precision.
pub const EXTENDED_FROM_ORDER: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub r: f64,
    /// Ascending; empty when the point failed.
    pub eigenvalues: Vec<f64>,
    pub inertia: Option<Inertia>,
    /// Zero threshold the eigenvalues were classified with.
    pub threshold: f64,
    pub precision_bits: u32,
    pub exact: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSweep {
    pub points_config: Vec<f64>,
    pub order: usize,
    pub grid: Vec<f64>,
    pub points: Vec<SweepPoint>,
}

impl SpectrumSweep {
    pub fn trajectories(&self) -> Vec<&[f64]> {
        self.points.iter().map(|p| p.eigenvalues.as_slice()).collect()
    }

    pub fn inertias(&self) -> Vec<Option<Inertia>> {
        self.points.iter().map(|p| p.inertia).collect()
    }
}

fn snap(r: f64) -> f64 {
    if (r - r.round()).abs() <= SNAP {
        r.round()
    } else {
        r
    }
}

fn sweep_point(config: &PointConfig, r: f64, tol: &ToleranceContext) -> SweepPoint {
    let e = Exponent::new(r);
    let config = if e.is_integer() { config.with_exact() } else { config.clone() };
    let spec = LoewnerSpec { config, exponent: e };
    match inertia_auto(&spec, tol) {
        Ok(rep) => {
            let t = tol.at_bits(rep.precision_bits);
            let threshold = zero_threshold(&rep.scale, rep.eigenvalues.len(), &t);
            SweepPoint {
                r,
                eigenvalues: rep.eigenvalues,
                inertia: Some(rep.consensus),
                threshold,
                precision_bits: rep.precision_bits,
                exact: rep.by_exact.is_some(),
                error: None,
            }
        }
        Err(err) => SweepPoint {
            r,
            eigenvalues: Vec::new(),
            inertia: None,
            threshold: f64::NAN,
            precision_bits: tol.precision_bits,
            exact: false,
            error: Some(err.to_string()),
        },
    }
}

/// Spectra of `L_r` at each exponent of an ascending `grid`. Points within
/// [`SNAP`] of an integer are evaluated at the integer through the exact
/// route; orders from [`EXTENDED_FROM_ORDER`] start at 256 bits. Failures are
/// recorded per point.
pub fn sweep_grid(config: &PointConfig, grid: &[f64], tol: &ToleranceContext) -> Result<SpectrumSweep> {
    tol.validate()?;
    if grid.is_empty() {
        return Err(Error::Precondition("empty exponent grid".into()));
    }
    if grid.iter().any(|r| !r.is_finite()) || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Precondition("exponent grid must be finite and strictly ascending".into()));
    }
    let t = if config.n() >= EXTENDED_FROM_ORDER && tol.precision_bits < EXTENDED_BITS {
        tol.at_bits(EXTENDED_BITS)
    } else {
        *tol
    };
    let grid: Vec<f64> = grid.iter().map(|&r| snap(r)).collect();
    let points = crate::par::map(&grid, |&r| sweep_point(config, r, &t));
    Ok(SpectrumSweep {
        points_config: config.points().to_vec(),
        order: config.n(),
        grid,
        points,
    })
}

/// Uniform grid of `steps` exponents from `r_min` to `r_max` inclusive.
pub fn uniform_grid(r_min: f64, r_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(r_min < r_max) || !r_min.is_finite() || !r_max.is_finite() || steps < 2 {
        return Err(Error::Precondition(format!(
            "need r_min < r_max and at least 2 steps, got {r_min}:{r_max}:{steps}"
        )));
    }
    let h = (r_max - r_min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i + 1 == steps { r_max } else { r_min + i as f64 * h })
        .collect())
}

pub fn eigen_trajectories(
    config: &PointConfig,
    r_min: f64,
    r_max: f64,
    steps: usize,
    tol: &ToleranceContext,
) -> Result<SpectrumSweep> {
    sweep_grid(config, &uniform_grid(r_min, r_max, steps)?, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignChange {
    pub from_r: f64,
    pub to_r: f64,
    pub before: Inertia,
    pub after: Inertia,
    /// No integer `m` with `|m| < n` lies in `[from_r, to_r]`.
    pub anomalous: bool,
}

/// Consecutive grid points whose inertias differ.
pub fn sign_change_report(s: &SpectrumSweep) -> Vec<SignChange> {
    let bound = s.order as f64 - 1.0;
    s.points
        .windows(2)
        .filter_map(|w| {
            let (a, b) = (w[0].inertia?, w[1].inertia?);
            if a == b {
                return None;
            }
            let m = w[0].r.ceil();
            let brackets = m <= w[1].r && m.abs() <= bound;
            Some(SignChange {
                from_r: w[0].r,
                to_r: w[1].r,
                before: a,
                after: b,
                anomalous: !brackets,
            })
        })
        .collect()
}

/// Indices `i` where the step from grid point `i` to `i + 1` moves some
/// sorted eigenvalue, relative to the local spectral scale, by more than ten
/// times the median relative movement.
pub fn under_resolved(s: &SpectrumSweep) -> Vec<usize> {
    let steps: Vec<(usize, f64)> = s
        .points
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].eigenvalues.len() == s.order && w[1].eigenvalues.len() == s.order)
        .map(|(i, w)| {
            let scale = w[0]
                .eigenvalues
                .iter()
                .chain(&w[1].eigenvalues)
                .fold(0.0f64, |m, x| m.max(x.abs()));
            let moved = w[0]
                .eigenvalues
                .iter()
                .zip(&w[1].eigenvalues)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            (i, if scale > 0.0 { moved / scale } else { 0.0 })
        })
        .collect();
    if steps.is_empty() {
        return Vec::new();
    }
    let mut sorted: Vec<f64> = steps.iter().map(|s| s.1).collect();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    steps
        .into_iter()
        .filter(|&(_, m)| m > 10.0 * median)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Scaling {
    None,
    /// `sign(λ) log10(1 + |λ|/τ)`; `τ` defaults to the smallest zero
    /// threshold in the sweep.
    SignedLog { tau: Option<f64> },
}

pub fn signed_log(lambda: f64, tau: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    lambda.signum() * (lambda.abs() / tau).ln_1p() / std::f64::consts::LN_10
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureRow {
    pub r: f64,
    pub y: Vec<f64>,
    pub inertia: Option<Inertia>,
}

/// Tabular eigenvalue dataset: `r, y_1..y_n, π, ζ, ν` per grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureData {
    pub order: usize,
    pub scaling: Scaling,
    pub tau: Option<f64>,
    pub rows: Vec<FigureRow>,
}

pub fn emit_figure(s: &SpectrumSweep, scaling: Scaling) -> Result<FigureData> {
    let tau = match scaling {
        Scaling::None => None,
        Scaling::SignedLog { tau: Some(t) } => {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::Precondition(format!("tau must be positive, got {t}")));
            }
            Some(t)
        }
        Scaling::SignedLog { tau: None } => Some(
            s.points
                .iter()
                .map(|p| p.threshold)
                .filter(|t| *t > 0.0)
                .fold(f64::INFINITY, f64::min),
        )
        .filter(|t| t.is_finite())
        .or(Some(1.0)),
    };
    let rows = s
        .points
        .iter()
        .map(|p| {
            let y = if p.eigenvalues.is_empty() {
                vec![f64::NAN; s.order]
            } else {
                match tau {
                    Some(t) => p.eigenvalues.iter().map(|&l| signed_log(l, t)).collect(),
                    None => p.eigenvalues.clone(),
                }
            };
            FigureRow {
                r: p.r,
                y,
                inertia: p.inertia,
            }
        })
        .collect();
    Ok(FigureData {
        order: s.order,
        scaling,
        tau,
        rows,
    })
}

impl FigureData {
    /// CSV with header `r,lambda_1..lambda_n,pos,zero,neg`; floats in
    /// shortest round-trip form, failed points with `NaN` values and empty
    /// inertia fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r");
        for i in 1..=self.order {
            let _ = write!(out, ",lambda_{i}");
        }
        out.push_str(",pos,zero,neg\n");
        for row in &self.rows {
            let _ = write!(out, "{:?}", row.r);
            for y in &row.y {
                let _ = write!(out, ",{y:?}");
            }
            match row.inertia {
                Some(i) => {
                    let _ = writeln!(out, ",{},{},{}", i.pos, i.zero, i.neg);
                }
                None => out.push_str(",,,\n"),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> ToleranceContext {
        ToleranceContext::default()
    }

    #[test]
    fn two_nodes_grid() {
        let c = PointConfig::from_ints(&[1, 2]).unwrap();
        let s = eigen_trajectories(&c, 0.5, 1.5, 3, &t()).unwrap();
        let want = [Inertia::new(2, 0, 0), Inertia::new(1, 1, 0), Inertia::new(1, 0, 1)];
        assert_eq!(s.inertias(), want.map(Some).to_vec());
        assert!(s.points[1].exact);
        let changes = sign_change_report(&s);
        assert_eq!(changes.len(), 2);
        assert!(changes.iter().all(|c| !c.anomalous && c.from_r <= 1.0 && c.to_r >= 1.0));
    }

    #[test]
    fn single_integer_point() {
        let c = PointConfig::from_ints(&[1, 2, 3, 4]).unwrap();
        let s = sweep_grid(&c, &[2.0], &t()).unwrap();
        assert_eq!(s.points[0].inertia, Some(Inertia::new(1, 2, 1)));
    }

    #[test]
    fn snapping() {
        let c = PointConfig::from_ints(&[1, 2, 3]).unwrap();
        let s = sweep_grid(&c, &[2.0 + 1e-10], &t()).unwrap();
        assert_eq!(s.grid, vec![2.0]);
        assert!(s.points[0].exact);
    }

    #[test]
    fn constant_regions() {
        let c = PointConfig::from_ints(&[1, 2, 3, 4]).unwrap();
        let s = eigen_trajectories(&c, 1.1, 1.9, 20, &t()).unwrap();
        assert!(sign_change_report(&s).is_empty());
        let c = PointConfig::from_ints(&[1, 2, 3, 4, 5]).unwrap();
        let s = eigen_trajectories(&c, 5.1, 9.0, 20, &t()).unwrap();
        assert!(sign_change_report(&s).is_empty());
    }

    #[test]
    fn rejects_bad_ranges() {
        let c = PointConfig::from_ints(&[1, 2]).unwrap();
        assert!(eigen_trajectories(&c, 1.0, 1.0, 3, &t()).is_err());
        assert!(eigen_trajectories(&c, 0.0, 1.0, 1, &t()).is_err());
        assert!(sweep_grid(&c, &[1.0, 0.5], &t()).is_err());
    }

    #[test]
    fn signed_log_shape() {
        assert_eq!(signed_log(0.0, 1e-9), 0.0);
        assert_eq!(signed_log(-3.0, 0.5), -signed_log(3.0, 0.5));
        assert!(signed_log(1.0, 0.1) < signed_log(1.5, 0.1));
        assert!(signed_log(-2.0, 0.1) < signed_log(-1.0, 0.1));
    }

    #[test]
    fn csv_layout() {
        let c = PointConfig::from_ints(&[1, 2]).unwrap();
        let s = eigen_trajectories(&c, 0.5, 1.5, 3, &t()).unwrap();
        let csv = emit_figure(&s, Scaling::None).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "r,lambda_1,lambda_2,pos,zero,neg");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("1.0,") && lines[2].ends_with(",1,1,0"));
        let scaled = emit_figure(&s, Scaling::SignedLog { tau: None }).unwrap();
        assert!(scaled.tau.unwrap() > 0.0);
    }
}
