//! WebAssembly bindings for the static page in `www/`.
//!
//! Each export has a plain Rust twin returning `Result<_, String>` so the
//! page logic is testable natively.

use loewner_core::analysis::complex_det;
use loewner_core::oracle::verify_instance;
use loewner_core::sweep::{eigen_trajectories, emit_figure, sign_change_report, Scaling};
use loewner_core::types::{PointConfig, ToleranceContext};
use num_complex::Complex64;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest grid the page may request, per axis.
pub const MAX_STEPS: usize = 400;
pub const MAX_ORDER: usize = 8;

pub fn parse_points(list: &str) -> Result<PointConfig, String> {
    let values = list
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() > MAX_ORDER {
        return Err(format!("at most {MAX_ORDER} points"));
    }
    PointConfig::from_f64s(&values).map_err(|e| e.to_string())
}

/// Signed-log eigenvalue curves with the inertia at each exponent.
pub fn trajectories_json(points: &str, r_min: f64, r_max: f64, steps: usize) -> Result<String, String> {
    let config = parse_points(points)?;
    if steps > MAX_STEPS {
        return Err(format!("at most {MAX_STEPS} steps"));
    }
    let tol = ToleranceContext::default();
    let sweep = eigen_trajectories(&config, r_min, r_max, steps, &tol).map_err(|e| e.to_string())?;
    let fig = emit_figure(&sweep, Scaling::SignedLog { tau: None }).map_err(|e| e.to_string())?;
    let changes: Vec<_> = sign_change_report(&sweep)
        .iter()
        .map(|c| json!({ "from": c.from_r, "to": c.to_r, "anomalous": c.anomalous }))
        .collect();
    let out = json!({
        "n": config.n(),
        "tau": fig.tau,
        "r": fig.rows.iter().map(|row| row.r).collect::<Vec<_>>(),
        "y": fig.rows.iter().map(|row| row.y.clone()).collect::<Vec<_>>(),
        "inertia": fig.rows.iter().map(|row| row.inertia.map(|i| [i.pos, i.zero, i.neg])).collect::<Vec<_>>(),
        "changes": changes,
    });
    Ok(out.to_string())
}

/// Predicted and computed inertia of `L_r`.
pub fn inertia_json(points: &str, r: f64) -> Result<String, String> {
    let config = parse_points(points)?;
    let v = verify_instance(&config, r, &ToleranceContext::default()).map_err(|e| e.to_string())?;
    let p = v.predicted.inertia;
    let c = v.computed.consensus;
    Ok(json!({
        "r": v.r,
        "predicted": [p.pos, p.zero, p.neg],
        "computed": [c.pos, c.zero, c.neg],
        "matched": v.matched,
        "eigenvalues": v.computed.eigenvalues,
        "precision_bits": v.computed.precision_bits,
        "exact": v.computed.by_exact.is_some(),
    })
    .to_string())
}

/// `[log10 |det L_z|, arg det L_z]` per cell centre, row-major from the
/// top-left (largest imaginary part) corner.
pub fn det_map(
    points: &str,
    re: (f64, f64),
    im: (f64, f64),
    nx: usize,
    ny: usize,
) -> Result<Vec<f64>, String> {
    let config = parse_points(points)?;
    if nx == 0 || ny == 0 || nx > MAX_STEPS || ny > MAX_STEPS {
        return Err(format!("grid must be between 1 and {MAX_STEPS} per axis"));
    }
    if !(re.0 < re.1 && im.0 < im.1) {
        return Err("empty window".into());
    }
    let mut out = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        let y = im.1 - (j as f64 + 0.5) * (im.1 - im.0) / ny as f64;
        for i in 0..nx {
            let x = re.0 + (i as f64 + 0.5) * (re.1 - re.0) / nx as f64;
            let d = complex_det(&config, Complex64::new(x, y));
            out.push(d.norm().log10());
            out.push(d.arg());
        }
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn trajectories(points: &str, r_min: f64, r_max: f64, steps: usize) -> Result<String, JsValue> {
    trajectories_json(points, r_min, r_max, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn inertia_at(points: &str, r: f64) -> Result<String, JsValue> {
    inertia_json(points, r).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn determinant_map(
    points: &str,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    nx: usize,
    ny: usize,
) -> Result<Vec<f64>, JsValue> {
    det_map(points, (re_min, re_max), (im_min, im_max), nx, ny).map_err(|e| JsValue::from_str(&e))
}
