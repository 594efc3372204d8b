//! JSON diagram container: `{"version": 1, "term": T}`.

use serde_json::{json, Map, Value};

use super::{Generator, Phase, ZxError, ZxTerm};
use crate::linalg::C64;

pub const FORMAT_VERSION: u64 = 1;

/// Parses a diagram file and type-checks the term.
pub fn parse_diagram(text: &str) -> Result<ZxTerm, ZxError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ZxError::Syntax {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    let obj = value
        .as_object()
        .ok_or_else(|| format_err("$", "diagram must be a JSON object"))?;
    match obj.get("version").and_then(Value::as_u64) {
        Some(FORMAT_VERSION) => {}
        Some(v) => return Err(format_err("$.version", &format!("unsupported version {v}"))),
        None => return Err(format_err("$.version", "missing or non-integer version")),
    }
    let term = term_from_json(obj.get("term").ok_or_else(|| format_err("$", "missing \"term\""))?, "term")?;
    term.arity()?;
    Ok(term)
}

/// Serializes a term inside the versioned container, pretty-printed.
pub fn serialize(t: &ZxTerm) -> String {
    let v = json!({ "version": FORMAT_VERSION, "term": term_to_json(t) });
    serde_json::to_string_pretty(&v).expect("json values always serialize")
}

fn format_err(path: &str, msg: &str) -> ZxError {
    ZxError::Format { path: path.to_string(), msg: msg.to_string() }
}

fn phase_to_json(p: &Phase) -> Value {
    let terms: Map<String, Value> = p.terms.iter().map(|(k, &v)| (k.clone(), json!(v))).collect();
    json!({ "const": p.constant, "terms": terms })
}

fn number_or_expr(v: &Value, path: &str) -> Result<Phase, ZxError> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .map(Phase::constant)
            .ok_or_else(|| format_err(path, "number out of range")),
        Value::String(s) => Phase::parse(s),
        _ => Err(format_err(path, "expected a number or an expression string")),
    }
}

fn phase_from_json(v: &Value, path: &str) -> Result<Phase, ZxError> {
    match v {
        Value::Object(obj) => {
            let mut phase = match obj.get("const") {
                Some(c) => number_or_expr(c, &format!("{path}.const"))?,
                None => Phase::zero(),
            };
            if !phase.is_constant() {
                return Err(format_err(path, "\"const\" must not mention parameters"));
            }
            if let Some(terms) = obj.get("terms") {
                let terms = terms
                    .as_object()
                    .ok_or_else(|| format_err(&format!("{path}.terms"), "expected an object"))?;
                for (name, coeff) in terms {
                    let c = number_or_expr(coeff, &format!("{path}.terms.{name}"))?;
                    if !c.is_constant() {
                        return Err(format_err(&format!("{path}.terms.{name}"), "coefficient must be constant"));
                    }
                    *phase.terms.entry(name.clone()).or_insert(0.0) += c.constant;
                }
            }
            Ok(phase)
        }
        other => number_or_expr(other, path),
    }
}

fn count_field(obj: &Map<String, Value>, key: &str, path: &str) -> Result<usize, ZxError> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|n| n as usize)
        .ok_or_else(|| format_err(&format!("{path}.{key}"), "expected a non-negative integer"))
}

pub fn term_to_json(t: &ZxTerm) -> Value {
    match t {
        ZxTerm::Seq(a, b) => json!({ "seq": [term_to_json(a), term_to_json(b)] }),
        ZxTerm::Par(a, b) => json!({ "par": [term_to_json(a), term_to_json(b)] }),
        ZxTerm::Gen(g) => match g {
            Generator::ZSpider { inputs, outputs, phase } => {
                json!({ "gen": "Z", "in": inputs, "out": outputs, "phase": phase_to_json(phase) })
            }
            Generator::XSpider { inputs, outputs, phase } => {
                json!({ "gen": "X", "in": inputs, "out": outputs, "phase": phase_to_json(phase) })
            }
            Generator::Hadamard => json!({ "gen": "H" }),
            Generator::Discard => json!({ "gen": "discard" }),
            Generator::Swap => json!({ "gen": "swap" }),
            Generator::Id => json!({ "gen": "id" }),
            Generator::Scalar(c) => json!({ "gen": "scalar", "re": c.re, "im": c.im }),
        },
    }
}

/// Decodes a term value; `path` prefixes error locations. Does not type-check.
pub fn term_from_json(v: &Value, path: &str) -> Result<ZxTerm, ZxError> {
    let obj = v.as_object().ok_or_else(|| format_err(path, "expected an object"))?;
    for (key, build) in [("seq", ZxTerm::seq as fn(_, _) -> _), ("par", ZxTerm::par)] {
        if let Some(pair) = obj.get(key) {
            let pair = pair
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| format_err(&format!("{path}.{key}"), "expected a two-element array"))?;
            let a = term_from_json(&pair[0], &format!("{path}.{key}[0]"))?;
            let b = term_from_json(&pair[1], &format!("{path}.{key}[1]"))?;
            return Ok(build(a, b));
        }
    }
    let gen = obj
        .get("gen")
        .and_then(Value::as_str)
        .ok_or_else(|| format_err(path, "expected \"gen\", \"seq\" or \"par\""))?;
    let spider_phase = || match obj.get("phase") {
        Some(p) => phase_from_json(p, &format!("{path}.phase")),
        None => Ok(Phase::zero()),
    };
    let g = match gen {
        "Z" => Generator::ZSpider {
            inputs: count_field(obj, "in", path)?,
            outputs: count_field(obj, "out", path)?,
            phase: spider_phase()?,
        },
        "X" => Generator::XSpider {
            inputs: count_field(obj, "in", path)?,
            outputs: count_field(obj, "out", path)?,
            phase: spider_phase()?,
        },
        "H" => Generator::Hadamard,
        "discard" => Generator::Discard,
        "swap" => Generator::Swap,
        "id" => Generator::Id,
        "scalar" => {
            let part = |k: &str| match obj.get(k) {
                None => Ok(0.0),
                Some(v) => number_or_expr(v, &format!("{path}.{k}")).and_then(|p| {
                    p.value().map_err(|_| format_err(&format!("{path}.{k}"), "scalar must be constant"))
                }),
            };
            Generator::Scalar(C64::new(part("re")?, part("im")?))
        }
        other => return Err(format_err(&format!("{path}.gen"), &format!("unknown generator {other:?}"))),
    };
    Ok(ZxTerm::Gen(g))
}
