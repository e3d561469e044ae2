//! Parsers for list, range and point flags.

use std::str::FromStr;

use dashu::rational::RBig;
use loewner_core::types::{PointConfig, PointValue};

/// One node: integers and fractions are exact, anything else is a float.
pub fn point_value(tok: &str) -> Result<PointValue, String> {
    let tok = tok.trim();
    let is_exact = !tok.is_empty()
        && tok
            .split('/')
            .all(|part| !part.is_empty() && part.trim_start_matches(['-', '+']).chars().all(|c| c.is_ascii_digit()))
        && tok.matches('/').count() <= 1;
    if is_exact {
        if tok.split('/').nth(1).is_some_and(|d| d.trim_start_matches(['-', '+']).bytes().all(|b| b == b'0')) {
            return Err(format!("zero denominator in {tok:?}"));
        }
        return RBig::from_str(tok)
            .map(PointValue::Exact)
            .map_err(|e| format!("bad rational {tok:?}: {e}"));
    }
    tok.parse::<f64>()
        .map(PointValue::Float)
        .map_err(|_| format!("bad number {tok:?}"))
}

pub fn points(list: &str) -> Result<PointConfig, String> {
    let values = list
        .split(',')
        .map(point_value)
        .collect::<Result<Vec<_>, _>>()?;
    PointConfig::new(&values).map_err(|e| e.to_string())
}

pub fn floats(list: &str) -> Result<Vec<f64>, String> {
    list.split(',')
        .map(|t| {
            Ok(match point_value(t)? {
                PointValue::Exact(q) => q.to_f64().value(),
                PointValue::Float(x) => x,
            })
        })
        .collect()
}

/// `a:b:steps`.
pub fn r_range(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, steps] = parts.as_slice() else {
        return Err(format!("range {s:?} must look like a:b:steps"));
    };
    let a: f64 = a.trim().parse().map_err(|_| format!("bad range start {a:?}"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad range end {b:?}"))?;
    let steps: usize = steps.trim().parse().map_err(|_| format!("bad step count {steps:?}"))?;
    if !(a.is_finite() && b.is_finite() && a < b && steps >= 2) {
        return Err(format!("range {s:?} is empty: need a < b and at least 2 steps"));
    }
    Ok((a, b, steps))
}

/// `a:b`.
pub fn interval(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("interval {s:?} must look like a:b"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad bound {a:?}"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad bound {b:?}"))?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(format!("interval {s:?} is empty"));
    }
    Ok((a, b))
}

/// `nx,ny` or a single `n` for both axes.
pub fn grid(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| format!("bad grid size {t:?}"))
    };
    match s.split_once(',') {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let n = parse(s)?;
            Ok((n, n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactness_follows_spelling() {
        assert!(matches!(point_value("3").unwrap(), PointValue::Exact(_)));
        assert!(matches!(point_value("7/2").unwrap(), PointValue::Exact(_)));
        assert!(matches!(point_value("3.0").unwrap(), PointValue::Float(_)));
        assert!(matches!(point_value("1e2").unwrap(), PointValue::Float(_)));
        assert!(point_value("1/0").is_err());
        assert!(point_value("x").is_err());
    }

    #[test]
    fn config_from_list() {
        let c = points("1, 3/2, 2.5").unwrap();
        assert_eq!(c.points(), &[1.0, 1.5, 2.5]);
        assert!(c.exact().is_none());
        assert!(points("1,2,3").unwrap().exact().is_some());
        assert!(points("2,1").is_err());
        assert!(points("-1,1").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(r_range("0.5:1.5:3").unwrap(), (0.5, 1.5, 3));
        assert_eq!(r_range("-2:2:5").unwrap(), (-2.0, 2.0, 5));
        assert!(r_range("1:1:3").is_err());
        assert!(r_range("0:1:1").is_err());
        assert!(r_range("0:1").is_err());
        assert_eq!(grid("4").unwrap(), (4, 4));
        assert_eq!(grid("2,3").unwrap(), (2, 3));
        assert!(grid("0").is_err());
        assert_eq!(floats("1,-1,1/2").unwrap(), vec![1.0, -1.0, 0.5]);
        assert!(floats("1,2/0").is_err());
    }
}
