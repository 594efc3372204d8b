//! WebAssembly bindings for the browser demo in `www/`.

use hybridzx::data::{synth_dataset, Rule};
use hybridzx::demo::{train_on, DataSource, TrainConfig};
use hybridzx::hybrid::{bit_encoder, prob0_readout};
use hybridzx::linalg::PauliIndex;
use hybridzx::ptm::{ptm_apply, ptm_of_term};
use hybridzx::zx::{cnot, pauli_gadget, phase_gadget, Basis, Phase, ZxTerm};
use hybridzx::{Error, Result};
use serde_json::json;
use wasm_bindgen::prelude::*;

pub const GATES: [&str; 7] = ["rz", "rx", "h", "cnot", "zz", "xx", "zx"];

fn gate_term(gate: &str, angle: f64) -> Result<ZxTerm> {
    let a = Phase::constant(angle);
    Ok(match gate {
        "rz" => phase_gadget(Basis::Z, &[0], 1, a)?,
        "rx" => phase_gadget(Basis::X, &[0], 1, a)?,
        "h" => ZxTerm::hadamard(),
        "cnot" => cnot(),
        "zz" => phase_gadget(Basis::Z, &[0, 1], 2, a)?,
        "xx" => phase_gadget(Basis::X, &[0, 1], 2, a)?,
        "zx" => pauli_gadget(&[(0, Basis::Z), (1, Basis::X)], 2, a)?,
        other => return Err(Error::Config(format!("unknown gate `{other}`"))),
    })
}

/// `{"labels": [...], "matrix": [[...], ...]}` for a gate at an angle.
pub fn gate_ptm_json(gate: &str, angle: f64) -> Result<String> {
    let p = ptm_of_term(&gate_term(gate, angle)?)?;
    let labels: Vec<String> =
        (0..p.mat.rows()).map(|i| PauliIndex::new(p.n_out, i).expect("in range").label()).collect();
    let rows: Vec<Vec<f64>> = (0..p.mat.rows()).map(|r| p.mat.row(r).to_vec()).collect();
    Ok(json!({ "labels": labels, "matrix": rows }).to_string())
}

/// Pauli vector of the encoded bit and its Born probabilities.
pub fn encoder_json(x: f64) -> Result<String> {
    let v = bit_encoder(x);
    let p0 = ptm_apply(&prob0_readout(1, 0)?, &v)?[0];
    Ok(json!({ "pauli": v, "prob0": p0, "prob1": 1.0 - p0 }).to_string())
}

/// Trains the demo classifier and returns its metrics as a JSON array.
pub fn train_json(k: usize, rule: &str, n: usize, lr: f64, iterations: usize, seed: u64) -> Result<String> {
    let rule: Rule = rule.parse()?;
    let config = TrainConfig {
        seed,
        learning_rate: lr,
        iterations,
        fd_step: hybridzx::hybrid::DEFAULT_FD_STEP,
        layers: 1,
        data: DataSource::Synth { k, rule, n, seed: None },
    };
    let samples = synth_dataset(k, rule, n, seed)?;
    let report = train_on(&config, &samples, |_| {})?;
    serde_json::to_string(&report.metrics).map_err(|e| Error::Data(e.to_string()))
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = gatePtm)]
pub fn gate_ptm(gate: &str, angle: f64) -> std::result::Result<String, JsError> {
    js(gate_ptm_json(gate, angle))
}

#[wasm_bindgen(js_name = encodeBit)]
pub fn encode_bit(x: f64) -> std::result::Result<String, JsError> {
    js(encoder_json(x))
}

#[wasm_bindgen(js_name = trainDemo)]
pub fn train_demo(
    k: usize,
    rule: &str,
    n: usize,
    lr: f64,
    iterations: usize,
    seed: u64,
) -> std::result::Result<String, JsError> {
    js(train_json(k, rule, n, lr, iterations, seed))
}
