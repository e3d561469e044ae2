//! `det L_z` for complex exponents and an argument-principle zero scan.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::PointConfig;

/// `e^w - 1` without cancellation near `w = 0`.
fn cexpm1(w: Complex64) -> Complex64 {
    let (a, b) = (w.re, w.im);
    let s = (b / 2.0).sin();
    Complex64::new(a.exp_m1() * b.cos() - 2.0 * s * s, a.exp() * b.sin())
}

/// Loewner matrix of `t^z` (principal branch) as rows.
pub fn complex_loewner(config: &PointConfig, z: Complex64) -> Vec<Vec<Complex64>> {
    let p = config.points();
    let n = p.len();
    let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            let lead = ((z - 1.0) * p[j].ln()).exp();
            a[i][j] = if i == j {
                z * lead
            } else {
                let u = (p[i] - p[j]) / p[j];
                lead * cexpm1(z * u.ln_1p()) / u
            };
        }
    }
    a
}

fn lu_det(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut d = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&x, &y| a[x][k].norm().total_cmp(&a[y][k].norm()))
            .unwrap_or(k);
        if a[piv][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != k {
            a.swap(piv, k);
            d = -d;
        }
        let p = a[k][k];
        d *= p;
        for i in k + 1..n {
            let f = a[i][k] / p;
            for j in k + 1..n {
                let v = a[k][j];
                a[i][j] -= f * v;
            }
        }
    }
    d
}

fn hadamard(a: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .map(|row| row.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
        .product()
}

/// `det L_z` by LU with partial pivoting.
pub fn complex_det(config: &PointConfig, z: Complex64) -> Complex64 {
    lu_det(complex_loewner(config, z))
}

/// Determinant and `|det| / Hadamard bound`.
fn det_with_ratio(config: &PointConfig, z: Complex64) -> (Complex64, f64) {
    let a = complex_loewner(config, z);
    let h = hadamard(&a);
    let d = lu_det(a);
    let ratio = if h > 0.0 { d.norm() / h } else { 0.0 };
    (d, ratio)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let ok = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite())
            && re_min < re_max
            && im_min < im_max;
        if !ok {
            return Err(Error::Precondition("rectangle needs finite min < max on both axes".into()));
        }
        Ok(Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn center(&self) -> [f64; 2] {
        [(self.re_min + self.re_max) / 2.0, (self.im_min + self.im_max) / 2.0]
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

/// A cell carrying nonzero winding, refined as far as the policy allows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroCell {
    pub cell: Rect,
    /// Zeros counted with multiplicity inside the cell.
    pub winding: i64,
    pub estimate: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexZeroScan {
    pub region: Rect,
    pub cells: Vec<ZeroCell>,
    pub total_winding: i64,
    /// Regrids forced by `det` vanishing on a cell boundary.
    pub regrids: usize,
}

/// `|det| ≤ BOUNDARY_ZERO · Hadamard bound` on a boundary sample forces a
/// regrid.
pub const BOUNDARY_ZERO: f64 = 1e-13;
const MAX_RETRIES: usize = 5;
const EDGE_SAMPLES: usize = 8;
const EDGE_DEPTH: usize = 24;
const MAX_PHASE_STEP: f64 = std::f64::consts::FRAC_PI_4;
const REFINE_DEPTH: usize = 14;
const SPLITS: [f64; 3] = [0.4871, 0.5377, 0.4619];
const SHIFTS: [f64; MAX_RETRIES] = [0.0, 0.1234, -0.2171, 0.3119, -0.0713];

struct BoundaryZero;

fn edge_phase(
    config: &PointConfig,
    a: Complex64,
    b: Complex64,
) -> std::result::Result<f64, BoundaryZero> {
    let eval = |z: Complex64| {
        let (d, ratio) = det_with_ratio(config, z);
        if ratio <= BOUNDARY_ZERO || !d.is_finite() {
            Err(BoundaryZero)
        } else {
            Ok(d)
        }
    };
    fn walk(
        eval: &impl Fn(Complex64) -> std::result::Result<Complex64, BoundaryZero>,
        za: Complex64,
        fa: Complex64,
        zb: Complex64,
        fb: Complex64,
        depth: usize,
    ) -> std::result::Result<f64, BoundaryZero> {
        let step = (fb / fa).arg();
        if step.abs() <= MAX_PHASE_STEP || depth == 0 {
            return Ok(step);
        }
        let zm = (za + zb) / 2.0;
        let fm = eval(zm)?;
        Ok(walk(eval, za, fa, zm, fm, depth - 1)? + walk(eval, zm, fm, zb, fb, depth - 1)?)
    }
    let mut total = 0.0;
    let mut zp = a;
    let mut fp = eval(a)?;
    for s in 1..=EDGE_SAMPLES {
        let z = a + (b - a) * (s as f64 / EDGE_SAMPLES as f64);
        let f = eval(z)?;
        total += walk(&eval, zp, fp, z, f, EDGE_DEPTH)?;
        zp = z;
        fp = f;
    }
    Ok(total)
}

fn winding(config: &PointConfig, r: &Rect) -> std::result::Result<i64, BoundaryZero> {
    let c = r.corners();
    let mut total = 0.0;
    for k in 0..4 {
        total += edge_phase(config, c[k], c[(k + 1) % 4])?;
    }
    Ok((total / std::f64::consts::TAU).round() as i64)
}

fn split(r: &Rect, f: f64) -> [Rect; 4] {
    let xm = r.re_min + f * (r.re_max - r.re_min);
    let ym = r.im_min + f * (r.im_max - r.im_min);
    [
        Rect { re_max: xm, im_max: ym, ..*r },
        Rect { re_min: xm, im_max: ym, ..*r },
        Rect { re_max: xm, im_min: ym, ..*r },
        Rect { re_min: xm, im_min: ym, ..*r },
    ]
}

/// Splits a cell with winding `w` until each zero cluster sits in a cell
/// at the depth limit, or splitting stops being conclusive.
fn refine(config: &PointConfig, cell: Rect, w: i64, depth: usize, out: &mut Vec<ZeroCell>) {
    let done = |out: &mut Vec<ZeroCell>| {
        out.push(ZeroCell {
            cell,
            winding: w,
            estimate: cell.center(),
        })
    };
    if depth == 0 {
        return done(out);
    }
    for f in SPLITS {
        let parts = split(&cell, f);
        let windings: std::result::Result<Vec<i64>, BoundaryZero> =
            parts.iter().map(|p| winding(config, p)).collect();
        let Ok(windings) = windings else { continue };
        if windings.iter().sum::<i64>() != w {
            continue;
        }
        for (p, pw) in parts.iter().zip(windings) {
            if pw != 0 {
                refine(config, *p, pw, depth - 1, out);
            }
        }
        return;
    }
    done(out)
}

/// Counts zeros of `det L_z` in `region` by the winding of the determinant
/// around each cell of an `nx × ny` grid, then refines cells with nonzero
/// winding. A vanishing determinant on a grid line shifts the interior
/// lines and slightly enlarges the region; the retries are bounded.
///
/// The result is evidence only: zeros clustered below the refinement
/// resolution are reported together.
pub fn complex_zero_scan(config: &PointConfig, region: Rect, grid: (usize, usize)) -> Result<ComplexZeroScan> {
    let (nx, ny) = grid;
    if nx == 0 || ny == 0 {
        return Err(Error::Precondition("grid needs at least one cell per axis".into()));
    }
    for (attempt, &shift) in SHIFTS.iter().enumerate() {
        let grow = attempt as f64 * 1.3e-3;
        let (w, h) = (region.re_max - region.re_min, region.im_max - region.im_min);
        let outer = Rect {
            re_min: region.re_min - grow * w,
            re_max: region.re_max + grow * w,
            im_min: region.im_min - grow * h,
            im_max: region.im_max + grow * h,
        };
        let lines = |lo: f64, hi: f64, m: usize| -> Vec<f64> {
            let step = (hi - lo) / m as f64;
            (0..=m)
                .map(|i| match i {
                    0 => lo,
                    i if i == m => hi,
                    i => lo + (i as f64 + shift) * step,
                })
                .collect()
        };
        let xs = lines(outer.re_min, outer.re_max, nx);
        let ys = lines(outer.im_min, outer.im_max, ny);
        let cells: Vec<Rect> = (0..ny)
            .flat_map(|j| {
                let (xs, ys) = (&xs, &ys);
                (0..nx).map(move |i| Rect {
                    re_min: xs[i],
                    re_max: xs[i + 1],
                    im_min: ys[j],
                    im_max: ys[j + 1],
                })
            })
            .collect();
        let windings = crate::par::map(&cells, |c| winding(config, c).ok());
        if windings.iter().any(Option::is_none) {
            continue;
        }
        let hits: Vec<(Rect, i64)> = cells
            .iter()
            .zip(windings)
            .filter_map(|(c, w)| w.filter(|&w| w != 0).map(|w| (*c, w)))
            .collect();
        let refined = crate::par::map(&hits, |&(c, w)| {
            let mut out = Vec::new();
            refine(config, c, w, REFINE_DEPTH, &mut out);
            out
        });
        let cells: Vec<ZeroCell> = refined.into_iter().flatten().collect();
        return Ok(ComplexZeroScan {
            region: outer,
            total_winding: hits.iter().map(|h| h.1).sum(),
            cells,
            regrids: attempt,
        });
    }
    Err(Error::Precondition(format!(
        "determinant vanished on cell boundaries after {MAX_RETRIES} regrids"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: &[f64]) -> PointConfig {
        PointConfig::from_f64s(p).unwrap()
    }

    #[test]
    fn cexpm1_small_argument() {
        let w = Complex64::new(1e-12, -2e-12);
        let e = cexpm1(w);
        assert!((e.re - 1e-12).abs() < 1e-23 && (e.im + 2e-12).abs() < 1e-23);
    }

    #[test]
    fn real_exponents_match_real_builder() {
        let c = cfg(&[1.0, 2.0, 3.0]);
        let d = complex_det(&c, Complex64::new(3.0, 0.0));
        assert!((d.re + 4.0).abs() < 1e-9 && d.im.abs() < 1e-9);
        let d = complex_det(&c, Complex64::new(1.0, 0.0));
        assert!(d.norm() < 1e-12);
        let d = complex_det(&c, Complex64::new(0.0, 0.0));
        assert_eq!(d.norm(), 0.0);
    }

    #[test]
    fn half_power_two_nodes_positive() {
        let d = complex_det(&cfg(&[1.0, 2.0]), Complex64::new(0.5, 0.0));
        assert!(d.re > 0.0 && d.im.abs() < 1e-15);
    }

    #[test]
    fn winding_at_one_is_n_minus_one() {
        let c = cfg(&[1.0, 2.0, 3.0]);
        let s = complex_zero_scan(&c, Rect::new(0.5, 1.5, -0.5, 0.5).unwrap(), (1, 1)).unwrap();
        assert_eq!(s.total_winding, 2);
        let w: i64 = s.cells.iter().map(|c| c.winding).sum();
        assert_eq!(w, 2);
        for cell in &s.cells {
            assert!((cell.estimate[0] - 1.0).abs() < 1e-2 && cell.estimate[1].abs() < 1e-2);
        }
    }

    #[test]
    fn winding_at_zero_is_n() {
        let c = cfg(&[1.0, 2.0, 3.0]);
        let s = complex_zero_scan(&c, Rect::new(-0.5, 0.5, -0.5, 0.5).unwrap(), (2, 2)).unwrap();
        assert_eq!(s.total_winding, 3);
        assert!(s.regrids >= 1);
    }

    #[test]
    fn empty_window() {
        let c = cfg(&[1.0, 2.0, 3.0]);
        let s = complex_zero_scan(&c, Rect::new(3.5, 4.5, -0.5, 0.5).unwrap(), (4, 4)).unwrap();
        assert_eq!(s.total_winding, 0);
        assert!(s.cells.is_empty());
    }
}
