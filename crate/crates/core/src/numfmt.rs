//! Fixed significant-digit rounding for reports.

use serde_json::Value;

/// Round to `digits` significant decimal digits.
pub fn sig_digits(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// Round every number in a JSON tree to `digits` significant digits.
pub fn round_json(v: &mut Value, digits: usize) {
    match v {
        Value::Number(num) => {
            if num.is_f64() {
                if let Some(x) = num.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(sig_digits(x, digits)) {
                        *num = r;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|x| round_json(x, digits)),
        Value::Object(map) => map.values_mut().for_each(|x| round_json(x, digits)),
        _ => {}
    }
}

/// Pretty JSON with numbers at 12 significant digits.
pub fn to_report_json<T: serde::Serialize>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_json(&mut v, 12);
    serde_json::to_string_pretty(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds() {
        assert_eq!(sig_digits(std::f64::consts::PI, 3), 3.14);
        assert_eq!(sig_digits(-0.000123456, 2), -0.00012);
        assert_eq!(sig_digits(0.0, 5), 0.0);
    }

    #[test]
    fn json_tree() {
        let mut v = serde_json::json!({"a": 1.0 / 3.0, "b": [2.0 / 3.0, 7], "c": "x"});
        round_json(&mut v, 4);
        assert_eq!(v.to_string(), r#"{"a":0.3333,"b":[0.6667,7],"c":"x"}"#);
    }
}
