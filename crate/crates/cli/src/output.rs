//! CSV and JSON emission with fixed numeric formatting.

use std::fmt::Write as _;

use berezin_core::C64;
use serde_json::Value;

/// Point kinds written to the `kind` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Berezin,
    NrangeBoundary,
    CircleR1,
    CircleR2,
    CircleR3,
}

impl PointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PointKind::Berezin => "berezin",
            PointKind::NrangeBoundary => "nrange_boundary",
            PointKind::CircleR1 => "circle_r1",
            PointKind::CircleR2 => "circle_r2",
            PointKind::CircleR3 => "circle_r3",
        }
    }
}

/// 15 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn csv(rows: &[(C64, PointKind)]) -> String {
    let mut out = String::with_capacity(48 * (rows.len() + 1));
    out.push_str("re,im,kind\n");
    for (z, kind) in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_real(z.re),
            fmt_real(z.im),
            kind.as_str()
        );
    }
    out
}

/// Points on the circle `|z − c| = r`.
pub fn circle(c: C64, r: f64, n: usize) -> Vec<C64> {
    (0..n)
        .map(|k| c + C64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect()
}

fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Rounds every real in `v` to 15 significant digits; integers are kept.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round15(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

pub fn json<T: serde::Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let mut v = serde_json::to_value(value)?;
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let s = csv(&[(C64::new(0.5, -1.0), PointKind::Berezin)]);
        assert_eq!(
            s,
            "re,im,kind\n5.00000000000000e-1,-1.00000000000000e0,berezin\n"
        );
    }

    #[test]
    fn json_rounding() {
        let mut v = serde_json::json!({"a": 0.1 + 0.2, "b": [1.0 / 3.0], "n": 7});
        round_json(&mut v);
        assert_eq!(v["a"].as_f64().unwrap(), 0.3);
        assert_eq!(v["b"][0].as_f64().unwrap(), 0.333333333333333);
        assert_eq!(v["n"].as_u64(), Some(7));
    }
}
