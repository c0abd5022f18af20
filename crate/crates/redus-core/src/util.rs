//! Small shared helpers.

use serde_json::Value;

/// True for field names that carry wall-clock measurements or values derived
/// from them. All such fields follow the naming convention of containing
/// `time` (wall_time_s, avg_time_s, time_red_pct, ...) or being `tau_s`, so
/// deterministic output comparisons can drop exactly these.
pub fn is_wall_time_field(name: &str) -> bool {
    name.contains("time") || name == "tau_s"
}

/// Recursively remove wall-clock-derived fields from a JSON value, in place.
pub fn strip_wall_time_fields(value: &mut Value) {
    match value {
        Value::Object(map) => {
            map.retain(|key, _| !is_wall_time_field(key));
            for child in map.values_mut() {
                strip_wall_time_fields(child);
            }
        }
        Value::Array(items) => {
            for child in items {
                strip_wall_time_fields(child);
            }
        }
        _ => {}
    }
}

/// Round to six significant decimal digits. Used for human-facing metric
/// output; configuration echoes keep full precision.
pub fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor();
    let scale = 10f64.powf(5.0 - magnitude);
    (x * scale).round() / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn strips_time_fields_recursively() {
        let mut v = json!({
            "acc": 0.5,
            "wall_time_s": 1.25,
            "rows": [{"avg_time_s": 3.0, "loss": 0.1, "time_red_pct": 5.0}],
        });
        strip_wall_time_fields(&mut v);
        assert_eq!(v, json!({"acc": 0.5, "rows": [{"loss": 0.1}]}));
    }

    #[test]
    fn sig6_rounds_to_six_digits() {
        assert_eq!(sig6(3.526360524), 3.52636);
        assert_eq!(sig6(0.000123456789), 0.000123457);
        assert_eq!(sig6(-987654.321), -987654.0);
        assert_eq!(sig6(0.0), 0.0);
    }
}
