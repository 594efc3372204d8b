//! JSON container for hybrid graphs: `{"version": 1, "graph": G}`.
//!
//! Wires are written `"input:i"`, `"param:j"` or `"node:k"`.

use serde_json::{json, Value};

use super::{HybridGraph, Node, NodeKind, QuantumBox, SmoothPrim, Source};
use crate::error::{Error, Result};
use crate::zx::{term_from_json, term_to_json, ZxError, FORMAT_VERSION};

/// Serde adapter writing an [`RMat`](crate::linalg::RMat) as a list of rows.
pub(crate) mod rmat {
    use crate::linalg::RMat;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &RMat, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..m.rows()).map(|r| m.row(r).to_vec()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RMat, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        RMat::from_rows(&rows).map_err(D::Error::custom)
    }
}

fn err(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Zx(ZxError::Format { path: path.to_string(), msg: msg.to_string() })
}

fn source_to_json(s: Source) -> Value {
    match s {
        Source::Input(i) => json!(format!("input:{i}")),
        Source::Param(j) => json!(format!("param:{j}")),
        Source::Node(k) => json!(format!("node:{k}")),
    }
}

fn source_from_json(v: &Value, path: &str) -> Result<Source> {
    let s = v.as_str().ok_or_else(|| err(path, "expected a wire string"))?;
    let (kind, idx) = s.split_once(':').ok_or_else(|| err(path, format!("malformed wire `{s}`")))?;
    let idx: usize = idx.parse().map_err(|_| err(path, format!("malformed wire index in `{s}`")))?;
    match kind {
        "input" => Ok(Source::Input(idx)),
        "param" => Ok(Source::Param(idx)),
        "node" => Ok(Source::Node(idx)),
        _ => Err(err(path, format!("unknown wire kind `{kind}`"))),
    }
}

fn sources_from_json(v: Option<&Value>, path: &str) -> Result<Vec<Source>> {
    match v {
        None => Ok(vec![]),
        Some(Value::Array(items)) => {
            items.iter().enumerate().map(|(i, w)| source_from_json(w, &format!("{path}[{i}]"))).collect()
        }
        Some(_) => Err(err(path, "expected an array of wires")),
    }
}

fn usize_list(v: Option<&Value>, path: &str) -> Result<Vec<usize>> {
    let items = v.and_then(Value::as_array).ok_or_else(|| err(path, "expected an array of integers"))?;
    items
        .iter()
        .map(|x| x.as_u64().map(|n| n as usize).ok_or_else(|| err(path, "expected a non-negative integer")))
        .collect()
}

fn string_list(v: Option<&Value>, path: &str) -> Result<Vec<String>> {
    match v {
        None => Ok(vec![]),
        Some(Value::Array(items)) => items
            .iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(|| err(path, "expected a string")))
            .collect(),
        Some(_) => Err(err(path, "expected an array of strings")),
    }
}

pub fn graph_to_json(g: &HybridGraph) -> Value {
    let nodes: Vec<Value> = g
        .nodes
        .iter()
        .map(|n| {
            let inputs: Vec<Value> = n.inputs.iter().map(|&s| source_to_json(s)).collect();
            match &n.kind {
                NodeKind::Smooth(p) => json!({ "kind": "smooth", "prim": p, "inputs": inputs }),
                NodeKind::Box(b) => json!({
                    "kind": "box",
                    "term": term_to_json(b.term()),
                    "params": b.params(),
                    "state_qubits": b.state_qubits(),
                    "inputs": inputs,
                }),
                NodeKind::Mu { n, m } => json!({ "kind": "mu", "n": n, "m": m, "inputs": inputs }),
                NodeKind::Epsilon => json!({ "kind": "epsilon" }),
            }
        })
        .collect();
    json!({
        "inputs": g.input_widths,
        "params": g.param_names,
        "nodes": nodes,
        "outputs": g.outputs.iter().map(|&s| source_to_json(s)).collect::<Vec<_>>(),
    })
}

/// Decodes a graph value without checking it.
pub fn graph_from_json(v: &Value, path: &str) -> Result<HybridGraph> {
    let obj = v.as_object().ok_or_else(|| err(path, "expected an object"))?;
    let input_widths = usize_list(obj.get("inputs"), &format!("{path}.inputs"))?;
    let param_names = string_list(obj.get("params"), &format!("{path}.params"))?;
    let raw_nodes = match obj.get("nodes") {
        Some(Value::Array(a)) => a.as_slice(),
        None => &[],
        Some(_) => return Err(err(&format!("{path}.nodes"), "expected an array")),
    };
    let mut nodes = Vec::with_capacity(raw_nodes.len());
    for (i, n) in raw_nodes.iter().enumerate() {
        let np = format!("{path}.nodes[{i}]");
        let no = n.as_object().ok_or_else(|| err(&np, "expected an object"))?;
        let inputs = sources_from_json(no.get("inputs"), &format!("{np}.inputs"))?;
        let kind = match no.get("kind").and_then(Value::as_str) {
            Some("smooth") => {
                let prim = no.get("prim").ok_or_else(|| err(&np, "missing \"prim\""))?;
                NodeKind::Smooth(
                    serde_json::from_value::<SmoothPrim>(prim.clone()).map_err(|e| err(&format!("{np}.prim"), e))?,
                )
            }
            Some("box") => {
                let term = term_from_json(
                    no.get("term").ok_or_else(|| err(&np, "missing \"term\""))?,
                    &format!("{np}.term"),
                )?;
                let params = string_list(no.get("params"), &format!("{np}.params"))?;
                let state_qubits = usize_list(no.get("state_qubits"), &format!("{np}.state_qubits"))?;
                NodeKind::Box(QuantumBox::new(term, params, state_qubits)?)
            }
            Some("mu") => {
                let count = |k: &str| {
                    no.get(k)
                        .and_then(Value::as_u64)
                        .map(|x| x as usize)
                        .ok_or_else(|| err(&format!("{np}.{k}"), "expected a non-negative integer"))
                };
                NodeKind::Mu { n: count("n")?, m: count("m")? }
            }
            Some("epsilon") => NodeKind::Epsilon,
            Some(other) => return Err(err(&format!("{np}.kind"), format!("unknown node kind `{other}`"))),
            None => return Err(err(&format!("{np}.kind"), "missing node kind")),
        };
        nodes.push(Node { kind, inputs });
    }
    let outputs = sources_from_json(obj.get("outputs"), &format!("{path}.outputs"))?;
    Ok(HybridGraph { input_widths, param_names, nodes, outputs })
}

/// Parses a graph file and checks it.
pub fn parse_graph(text: &str) -> Result<HybridGraph> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        Error::Zx(ZxError::Syntax { line: e.line(), column: e.column(), msg: e.to_string() })
    })?;
    match value.get("version").and_then(Value::as_u64) {
        Some(FORMAT_VERSION) => {}
        Some(v) => return Err(err("$.version", format!("unsupported version {v}"))),
        None => return Err(err("$.version", "missing or non-integer version")),
    }
    let g = graph_from_json(value.get("graph").ok_or_else(|| err("$", "missing \"graph\""))?, "graph")?;
    g.check()?;
    Ok(g)
}

pub fn serialize_graph(g: &HybridGraph) -> String {
    let v = json!({ "version": FORMAT_VERSION, "graph": graph_to_json(g) });
    serde_json::to_string_pretty(&v).expect("json values always serialize")
}
