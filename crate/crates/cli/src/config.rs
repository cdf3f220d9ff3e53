use std::path::Path;

use multirec_core::seq::rational;
use multirec_core::seq::{
    parse_basis_shorthand, Ball, FiniteVector, Norm, OperatorSpec, ScalarSeq, SpaceSpec, WeightSpec,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

pub type Map = serde_json::Map<String, Value>;

/// Everything that ends a run with exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] multirec_core::Error),
    /// A result failed independent re-verification.
    #[error("verification failed: {0}")]
    Unverified(String),
}

pub fn load_config(path: &Path) -> Result<Map, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::Input(format!(
            "{}: config must be a JSON object",
            path.display()
        ))),
        // serde_json reports line and column
        Err(e) => Err(CliError::Input(format!("{}: {e}", path.display()))),
    }
}

/// Deserializes the command configuration and lists the defaults serde
/// filled in (fields present after resolution but absent from the input).
pub fn resolve<T: DeserializeOwned + Serialize>(input: &Map) -> Result<(T, Map), CliError> {
    let value = Value::Object(input.clone());
    let resolved: T = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            CliError::Input(format!("config: {}", e.inner()))
        } else {
            CliError::Input(format!("config field `{path}`: {}", e.inner()))
        }
    })?;
    let full = serde_json::to_value(&resolved).map_err(|e| CliError::Input(e.to_string()))?;
    let defaults = match defaults_diff(&Value::Object(input.clone()), &full) {
        Some(Value::Object(m)) => m,
        _ => Map::new(),
    };
    Ok((resolved, defaults))
}

/// Parts of `resolved` that do not appear in `input`, recursing into objects.
pub fn defaults_diff(input: &Value, resolved: &Value) -> Option<Value> {
    match (input, resolved) {
        (Value::Object(i), Value::Object(r)) => {
            let mut out = Map::new();
            for (k, v) in r {
                match i.get(k) {
                    None => {
                        out.insert(k.clone(), v.clone());
                    }
                    Some(iv) => {
                        if let Some(d) = defaults_diff(iv, v) {
                            out.insert(k.clone(), d);
                        }
                    }
                }
            }
            (!out.is_empty()).then_some(Value::Object(out))
        }
        _ => None,
    }
}

pub fn object_mut<'a>(map: &'a mut Map, key: &str) -> &'a mut Map {
    let slot = map.entry(key.to_string()).or_insert_with(|| Value::Object(Map::new()));
    if !slot.is_object() {
        *slot = Value::Object(Map::new());
    }
    slot.as_object_mut().expect("just made an object")
}

pub fn bounds_mut(map: &mut Map) -> &mut Map {
    object_mut(map, "bounds")
}

pub fn split_assignment<'a>(spec: &'a str, flag: &str) -> Result<(&'a str, &'a str), CliError> {
    spec.split_once('=')
        .filter(|(k, _)| !k.trim().is_empty())
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| CliError::Input(format!("{flag} expects KEY=VALUE, got {spec:?}")))
}

/// A set on stdin: whitespace-separated naturals or a JSON array.
pub fn parse_set(text: &str) -> Result<Value, CliError> {
    let t = text.trim();
    let elements: Vec<u64> = if t.starts_with('[') {
        serde_json::from_str(t).map_err(|e| CliError::Input(format!("stdin: {e}")))?
    } else {
        t.split_whitespace()
            .enumerate()
            .map(|(i, tok)| {
                tok.parse::<u64>().map_err(|_| {
                    CliError::Input(format!(
                        "stdin: token {} ({tok:?}) is not a non-negative integer",
                        i + 1
                    ))
                })
            })
            .collect::<Result<_, _>>()?
    };
    Ok(Value::from(elements))
}

fn json_or<F>(s: &str, shorthand: F) -> Result<Value, CliError>
where
    F: Fn(&str) -> Result<Value, CliError>,
{
    let t = s.trim();
    if t.starts_with('{') || t.starts_with('[') {
        serde_json::from_str(t).map_err(|e| CliError::Input(e.to_string()))
    } else {
        shorthand(t)
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Input(e.to_string()))
}

pub fn parse_rational(s: &str) -> Result<Value, CliError> {
    Ok(Value::from(rational::format(&parse_rational_value(s)?)))
}

/// `num/den`, an integer, or `b^e` with integer exponent.
fn parse_rational_value(s: &str) -> Result<rational::Rational, CliError> {
    let t = s.trim();
    if let Some((base, exp)) = t.split_once('^') {
        let base = rational::parse(base)?;
        let exp: i64 = exp
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("bad exponent in {t:?}")))?;
        return Ok(rational::pow(&base, exp));
    }
    Ok(rational::parse(t)?)
}

pub fn parse_vector(s: &str) -> Result<Value, CliError> {
    json_or(s, |t| to_value(&parse_basis_shorthand(t)?))
}

/// `unit`, `constant:R` or `valley:M`: a backward shift on unilateral `ℓ_1`.
pub fn parse_operator(s: &str) -> Result<Value, CliError> {
    json_or(s, |t| {
        let (kind, arg) = t.split_once(':').map_or((t, None), |(k, a)| (k, Some(a)));
        let weights = match (kind, arg) {
            ("unit", None) => WeightSpec::Unit,
            ("constant", Some(v)) => WeightSpec::constant(parse_rational_value(v)?),
            ("valley", Some(m)) => WeightSpec::Valley {
                m: m.trim()
                    .parse()
                    .map_err(|_| CliError::Input(format!("bad valley level {m:?}")))?,
            },
            _ => {
                return Err(CliError::Input(format!(
                    "unknown operator shorthand {t:?} (use unit, constant:R, valley:M or JSON)"
                )))
            }
        };
        to_value(&OperatorSpec::backward(weights, SpaceSpec::L1))
    })
}

pub fn parse_scalars(s: &str) -> Result<Value, CliError> {
    json_or(s, |t| match t {
        "one" => to_value(&ScalarSeq::One),
        "dyadic-sqrt" => to_value(&ScalarSeq::DyadicSqrt),
        "exp-sqrt" => to_value(&ScalarSeq::ExpSqrt),
        _ => Err(CliError::Input(format!(
            "unknown scalar sequence {t:?} (use one, dyadic-sqrt, exp-sqrt or JSON)"
        ))),
    })
}

/// `CENTER:RADIUS` (unilateral `ℓ_1`) or a JSON ball.
pub fn parse_ball(s: &str) -> Result<Value, CliError> {
    json_or(s, |t| {
        let (center, radius) = t
            .split_once(':')
            .ok_or_else(|| CliError::Input(format!("ball shorthand is CENTER:RADIUS, got {t:?}")))?;
        let center: FiniteVector = parse_basis_shorthand(center)?;
        let ball = Ball::new(center, parse_rational_value(radius)?, SpaceSpec::L1)?;
        to_value(&ball)
    })
}

pub fn parse_norm(s: &str) -> Result<Value, CliError> {
    let norm = match s.trim() {
        "1" => Norm::L1,
        "2" => Norm::L2,
        "inf" | "infinity" => Norm::Sup,
        other => return Err(CliError::Input(format!("p must be 1, 2 or inf, got {other:?}"))),
    };
    to_value(&norm)
}

/// `a..b`, `a..b:step` (inclusive integer ranges) or a comma list whose items
/// are integers or rationals (`1/16`, `2^-4`).
pub fn parse_grid_values(spec: &str) -> Result<Vec<Value>, CliError> {
    let t = spec.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((lo, rest)) = t.split_once("..") {
        let (hi, step) = rest.split_once(':').map_or((rest, "1"), |(h, s)| (h, s));
        let parse = |x: &str| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| CliError::Input(format!("bad range bound {x:?}")))
        };
        let (lo, hi, step) = (parse(lo)?, parse(hi)?, parse(step)?);
        if step <= 0 {
            return Err(CliError::Input("range step must be positive".into()));
        }
        return Ok((lo..=hi).step_by(step as usize).map(Value::from).collect());
    }
    t.split(',')
        .map(|item| {
            let item = item.trim();
            if let Ok(n) = item.parse::<i64>() {
                Ok(Value::from(n))
            } else {
                parse_rational(item)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn diff_recurses() {
        let input = json!({"a": 1, "bounds": {"q_max": 5}});
        let resolved = json!({"a": 1, "b": 2, "bounds": {"q_max": 5, "a_max": 9}});
        assert_eq!(
            defaults_diff(&input, &resolved),
            Some(json!({"b": 2, "bounds": {"a_max": 9}}))
        );
        assert_eq!(defaults_diff(&resolved, &resolved), None);
    }

    #[test]
    fn sets() {
        assert_eq!(parse_set("1 2\n3\t5").unwrap(), json!([1, 2, 3, 5]));
        assert_eq!(parse_set("[4, 8]").unwrap(), json!([4, 8]));
        assert_eq!(parse_set("").unwrap(), json!([]));
        let err = parse_set("1 x 3").unwrap_err().to_string();
        assert!(err.contains("token 2"), "{err}");
    }

    #[test]
    fn shorthands() {
        assert_eq!(parse_vector("e2").unwrap(), json!([[2, 1, 1]]));
        assert_eq!(parse_rational("2^-4").unwrap(), json!("1/16"));
        assert_eq!(parse_rational("3").unwrap(), json!("3/1"));
        assert_eq!(parse_scalars("dyadic-sqrt").unwrap(), json!({"kind": "dyadic-sqrt"}));
        let op = parse_operator("constant:2").unwrap();
        assert_eq!(op["kind"], "backward");
        assert_eq!(op["weights"], json!({"kind": "constant", "value": "2/1"}));
        let b = parse_ball("e0:1/4").unwrap();
        assert_eq!(b["radius"], "1/4");
        assert!(parse_ball("e0:-1").is_err());
        assert!(parse_operator("mystery").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid_values("1..3").unwrap(), vec![json!(1), json!(2), json!(3)]);
        assert_eq!(
            parse_grid_values("0..10:5").unwrap(),
            vec![json!(0), json!(5), json!(10)]
        );
        assert_eq!(
            parse_grid_values("2^-4,1/256").unwrap(),
            vec![json!("1/16"), json!("1/256")]
        );
        assert!(parse_grid_values("").unwrap().is_empty());
        assert!(parse_grid_values("3..1").unwrap().is_empty());
    }
}
