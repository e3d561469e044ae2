use loewner_core::analysis::{
    complex_zero_scan, count_zeros, det_identities, dk_norm_probe, loewner_ssr, ComboFunction, Rect,
    ScanPolicy,
};
use loewner_core::builders::{
    cross_loewner, loewner_exact, loewner_matrix, power_sum_exact, power_sum_matrix, sinh_loewner,
    LoewnerSpec,
};
use loewner_core::oracle::verify_instance;
use loewner_core::real::{Mp, Real};
use loewner_core::sweep::{
    eigen_trajectories, emit_figure, sign_change_report, under_resolved, uniform_grid, Scaling,
};
use loewner_core::types::{Exponent, Matrix, PointConfig, ToleranceContext, DEFAULT_BITS};
use serde_json::{json, Value};

use crate::{parse, Common, Failure, Format, Kind, Outcome, Scale};

pub const SCHEMA_VERSION: u32 = 1;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn tolerance(c: &Common) -> Result<ToleranceContext, Failure> {
    if c.precision_bits < DEFAULT_BITS {
        return Err(usage(format!("precision must be at least {DEFAULT_BITS} bits")));
    }
    let mut t = ToleranceContext::for_bits(c.precision_bits);
    if let Some(z) = c.zero_rel_tol {
        t.zero_rel_tol = z;
    }
    if let Some(r) = c.residual_tol {
        t.residual_tol = r;
    }
    t.validate()?;
    Ok(t)
}

fn points(list: &str) -> Result<PointConfig, Failure> {
    parse::points(list).map_err(Failure::Usage)
}

fn finite(r: f64) -> Result<f64, Failure> {
    if r.is_finite() {
        Ok(r)
    } else {
        Err(usage("exponent must be finite"))
    }
}

fn describe(config: &PointConfig) -> Value {
    match config.exact() {
        Some(e) => json!({
            "points": config.points(),
            "exact": e.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        }),
        None => json!({ "points": config.points() }),
    }
}

fn json_report(command: &str, config: &PointConfig, mut body: Value) -> String {
    let obj = body.as_object_mut().expect("report bodies are objects");
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    obj.insert("command".into(), json!(command));
    obj.insert("nodes".into(), describe(config));
    let mut s = serde_json::to_string_pretty(&body).expect("reports serialize");
    s.push('\n');
    s
}

fn json_only(c: &Common, command: &str) -> Result<(), Failure> {
    if c.format == Some(Format::Csv) {
        return Err(usage(format!("{command} reports are JSON only")));
    }
    Ok(())
}

fn entries<R: Real>(m: &Matrix<R>) -> Vec<Vec<Value>> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|x| {
                    if x.bits() <= DEFAULT_BITS {
                        json!(x.to_f64())
                    } else {
                        json!(x.to_decimal_string())
                    }
                })
                .collect()
        })
        .collect()
}

fn entry_csv(v: &Value) -> String {
    match v {
        Value::Number(n) => format!("{:?}", n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        Value::Null => "NaN".into(),
        other => other.to_string(),
    }
}

fn build_matrix<R: Real>(
    config: &PointConfig,
    r: f64,
    kind: Kind,
    q: Option<&PointConfig>,
    tol: &ToleranceContext,
) -> Result<Matrix<R>, Failure> {
    let e = Exponent::new(r);
    Ok(match kind {
        Kind::Loewner => loewner_matrix::<R>(&LoewnerSpec::new(config.clone(), r), tol).into_matrix(),
        Kind::PowerSum => power_sum_matrix::<R>(config, e, tol).into_matrix(),
        Kind::Sinh => {
            let x: Vec<f64> = config.points().iter().map(|p| p.ln() / 2.0).collect();
            sinh_loewner::<R>(&x, e, tol)?.into_matrix()
        }
        Kind::Cross => {
            let q = q.ok_or_else(|| usage("--kind cross needs --q"))?;
            cross_loewner::<R>(config, q, e, tol)?
        }
    })
}

pub fn build(list: &str, r: f64, kind: Kind, q: Option<&str>, c: &Common) -> Result<Outcome, Failure> {
    let tol = tolerance(c)?;
    let config = points(list)?;
    let r = finite(r)?;
    let q = q.map(points).transpose()?;
    if q.is_some() && kind != Kind::Cross {
        return Err(usage("--q only applies to --kind cross"));
    }
    let matrix = if tol.precision_bits <= DEFAULT_BITS {
        entries(&build_matrix::<f64>(&config, r, kind, q.as_ref(), &tol)?)
    } else {
        entries(&build_matrix::<Mp>(&config, r, kind, q.as_ref(), &tol)?)
    };
    let exact = match (kind, config.exact(), Exponent::new(r).integer_value()) {
        (Kind::Loewner, Some(nodes), Some(m)) => Some(loewner_exact(nodes, m)),
        (Kind::PowerSum, Some(nodes), Some(m)) => Some(power_sum_exact(nodes, m)),
        _ => None,
    };
    let body = if c.format == Some(Format::Csv) {
        matrix
            .iter()
            .map(|row| row.iter().map(entry_csv).collect::<Vec<_>>().join(",") + "\n")
            .collect()
    } else {
        let mut v = json!({
            "kind": format!("{kind:?}").to_lowercase(),
            "r": r,
            "precision_bits": tol.precision_bits,
            "matrix": matrix,
        });
        if let Some(ex) = exact {
            let rows: Vec<Vec<String>> = (0..ex.order())
                .map(|i| (0..ex.order()).map(|j| ex.get(i, j).to_string()).collect())
                .collect();
            v["exact_matrix"] = json!(rows);
        }
        if let Some(q) = &q {
            v["q"] = describe(q);
        }
        json_report("build", &config, v)
    };
    Ok(Outcome { body, holds: true })
}

pub fn verify(list: &str, r: Option<f64>, range: Option<&str>, c: &Common) -> Result<Outcome, Failure> {
    let tol = tolerance(c)?;
    let config = points(list)?;
    let grid = match (r, range) {
        (Some(r), None) => {
            let r = finite(r)?;
            if r == 0.0 {
                return Err(usage("--r 0 is rejected: L_0 is the zero matrix"));
            }
            vec![r]
        }
        (None, Some(s)) => {
            let (a, b, steps) = parse::r_range(s).map_err(Failure::Usage)?;
            uniform_grid(a, b, steps)?
        }
        _ => return Err(usage("exactly one of --r and --r-range is required")),
    };
    let mut reports = Vec::with_capacity(grid.len());
    for &r in &grid {
        reports.push(verify_instance(&config, r, &tol)?);
    }
    let holds = reports.iter().all(|v| v.matched);
    let body = if c.format == Some(Format::Csv) {
        let mut s = String::from("r,pred_pos,pred_zero,pred_neg,pos,zero,neg,precision_bits,matched\n");
        for v in &reports {
            let (p, k) = (v.predicted.inertia, v.computed.consensus);
            s.push_str(&format!(
                "{:?},{},{},{},{},{},{},{},{}\n",
                v.r, p.pos, p.zero, p.neg, k.pos, k.zero, k.neg, v.computed.precision_bits, v.matched
            ));
        }
        s
    } else {
        let results: Vec<Value> = reports
            .iter()
            .map(|v| {
                json!({
                    "r": v.r,
                    "predicted": v.predicted,
                    "computed": v.computed.consensus,
                    "matched": v.matched,
                    "routes": v.computed,
                })
            })
            .collect();
        json_report("verify", &config, json!({ "results": results, "all_matched": holds }))
    };
    Ok(Outcome { body, holds })
}

pub fn sweep(list: &str, range: &str, scale: Scale, tau: Option<f64>, c: &Common) -> Result<Outcome, Failure> {
    let tol = tolerance(c)?;
    let config = points(list)?;
    let (a, b, steps) = parse::r_range(range).map_err(Failure::Usage)?;
    let s = eigen_trajectories(&config, a, b, steps, &tol)?;
    let scaling = match scale {
        Scale::None => Scaling::None,
        Scale::SignedLog => Scaling::SignedLog { tau },
    };
    let figure = emit_figure(&s, scaling)?;
    let changes = sign_change_report(&s);
    let failed = s.points.iter().any(|p| p.error.is_some());
    let holds = !failed && changes.iter().all(|c| !c.anomalous);
    let body = if c.format == Some(Format::Json) {
        json_report(
            "sweep",
            &config,
            json!({
                "sweep": s,
                "sign_changes": changes,
                "under_resolved_steps": under_resolved(&s),
                "figure": figure,
            }),
        )
    } else {
        figure.to_csv()
    };
    Ok(Outcome { body, holds })
}

pub fn zeros(
    list: &str,
    coeffs: &str,
    r: f64,
    interval: Option<&str>,
    grid_points: Option<usize>,
    c: &Common,
) -> Result<Outcome, Failure> {
    json_only(c, "zeros")?;
    let tol = tolerance(c)?;
    let config = points(list)?;
    let coeffs = parse::floats(coeffs).map_err(Failure::Usage)?;
    let n = config.n();
    let f = ComboFunction::new(config.clone(), coeffs, finite(r)?)?;
    let mut policy = ScanPolicy::for_config(&config);
    policy.zero_rel_tol = tol.zero_rel_tol;
    if let Some(s) = interval {
        let (lo, hi) = parse::interval(s).map_err(Failure::Usage)?;
        policy.lo = lo;
        policy.hi = hi;
    }
    if let Some(g) = grid_points {
        policy.points = g;
    }
    let z = count_zeros(&f, &policy)?;
    let e = Exponent::new(r);
    let bound_applies = !matches!(e.integer_value(), Some(m) if m >= 1 && (m as usize) < n);
    let holds = !bound_applies || z.count < n;
    let body = json_report(
        "zeros",
        &config,
        json!({
            "r": r,
            "coeffs": f.coeffs(),
            "scan": policy,
            "count": z.count,
            "brackets": z.brackets,
            "ambiguous": z.ambiguous,
            "bound": n - 1,
            "bound_applies": bound_applies,
            "within_bound": holds,
        }),
    );
    Ok(Outcome { body, holds })
}

pub fn ssr(list: &str, r: f64, k_max: Option<usize>, c: &Common) -> Result<Outcome, Failure> {
    json_only(c, "ssr")?;
    let tol = tolerance(c)?;
    let config = points(list)?;
    let n = config.n();
    let r = finite(r)?;
    let k_max = k_max.unwrap_or(n);
    let rep = loewner_ssr(&config, r, k_max, &tol)?;
    let expected = if r > 0.0 {
        match Exponent::new(r).integer_value() {
            Some(m) if (m as usize) < n => Some(m as usize),
            _ => Some(n),
        }
    } else {
        None
    };
    let level = rep.ssr_class.level(n);
    let holds = expected.is_none_or(|e| level >= e.min(k_max));
    let body = json_report(
        "ssr",
        &config,
        json!({ "r": r, "report": rep, "level": level, "expected_level": expected, "holds": holds }),
    );
    Ok(Outcome { body, holds })
}

pub fn det_id(list: &str, c: &Common) -> Result<Outcome, Failure> {
    json_only(c, "det-id")?;
    let config = points(list)?;
    let ids = det_identities(&config)?;
    let holds = ids.iter().all(|d| d.matched);
    let body = json_report("det-id", &config, json!({ "identities": ids, "all_matched": holds }));
    Ok(Outcome { body, holds })
}

pub fn dk(list: &str, r: f64, samples: usize, seed: u64, c: &Common) -> Result<Outcome, Failure> {
    json_only(c, "dk")?;
    let tol = tolerance(c)?;
    let config = points(list)?;
    let r = finite(r)?;
    let probe = dk_norm_probe(&config, r, samples, seed)?;
    let attained = probe.bound >= probe.reference * (1.0 - tol.zero_rel_tol);
    let bounded = !(r > 0.0 && r <= 1.0) || probe.bound <= probe.reference * (1.0 + tol.zero_rel_tol);
    let holds = attained && bounded;
    let body = json_report(
        "dk",
        &config,
        json!({ "r": r, "probe": probe, "ratio": probe.bound / probe.reference, "holds": holds }),
    );
    Ok(Outcome { body, holds })
}

pub fn complex_zeros(list: &str, re: &str, im: &str, grid: &str, c: &Common) -> Result<Outcome, Failure> {
    json_only(c, "complex-zeros")?;
    let config = points(list)?;
    let (a, b) = parse::interval(re).map_err(Failure::Usage)?;
    let (lo, hi) = parse::interval(im).map_err(Failure::Usage)?;
    let grid = parse::grid(grid).map_err(Failure::Usage)?;
    let scan = complex_zero_scan(&config, Rect::new(a, b, lo, hi)?, grid)?;
    let body = json_report("complex-zeros", &config, json!({ "grid": [grid.0, grid.1], "scan": scan }));
    Ok(Outcome { body, holds: true })
}

pub fn pr_compare(list: &str, r: f64, c: &Common) -> Result<Outcome, Failure> {
    json_only(c, "pr-compare")?;
    let tol = tolerance(c)?;
    let config = points(list)?;
    let cmp = loewner_core::analysis::pr_compare(&config, finite(r)?, &tol)?;
    let holds = cmp.matched;
    let body = json_report(
        "pr-compare",
        &config,
        json!({
            "r": r,
            "power_sum": cmp.power_sum.consensus,
            "loewner": cmp.loewner.consensus,
            "matched": cmp.matched,
            "routes": { "power_sum": cmp.power_sum, "loewner": cmp.loewner },
        }),
    );
    Ok(Outcome { body, holds })
}
