//! The binary-classifier demo: encoded bits feed a box of ZX and XX
//! interactions with a readout qubit, whose Y-basis expectation is compared
//! with the label by a squared loss. Parameters are trained by full-batch
//! gradient descent on finite-difference gradients.
//!
//! The readout qubit starts in `|0⟩` inside the box. The Y-basis
//! measurement is an `R_X(pi/2)` gadget on the readout followed by reading
//! `|0⟩`, so the reported expectation is `⟨Y⟩` of the readout before the
//! basis change.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{ingest_idx, synth_dataset, IdxOptions, Rule, Sample, MAX_BITS};
use crate::error::{Error, Result};
use crate::hybrid::{
    fd_gradient, prob0_readout, Evaluator, GraphBuilder, HybridGraph, QuantumBox, SmoothPrim, Source,
    DEFAULT_FD_STEP,
};
use crate::linalg::C64;
use crate::zx::{identity, pauli_gadget, phase_gadget, Basis, Phase, ZxError, ZxTerm};

/// Parameter names in graph order: for each layer, `zx_{l}_{i}` then `xx_{l}_{i}`.
pub fn demo_param_names(k: usize, layers: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(2 * k * layers);
    for l in 0..layers {
        names.extend((0..k).map(|i| format!("zx_{l}_{i}")));
        names.extend((0..k).map(|i| format!("xx_{l}_{i}")));
    }
    names
}

/// The box term on `k` data qubits; the readout qubit is wire `k`.
pub fn demo_circuit(k: usize, layers: usize) -> Result<ZxTerm, ZxError> {
    let n = k + 1;
    let prep_zero = ZxTerm::par(
        ZxTerm::scalar(C64::new(FRAC_1_SQRT_2, 0.0)),
        ZxTerm::x(0, 1, Phase::zero()),
    );
    let mut steps = vec![ZxTerm::par(identity(k), prep_zero)];
    let names = demo_param_names(k, layers);
    for l in 0..layers {
        for i in 0..k {
            let p = Phase::param(&names[2 * k * l + i], 1.0);
            steps.push(pauli_gadget(&[(i, Basis::Z), (k, Basis::X)], n, p)?);
        }
        for i in 0..k {
            let p = Phase::param(&names[2 * k * l + k + i], 1.0);
            steps.push(pauli_gadget(&[(i, Basis::X), (k, Basis::X)], n, p)?);
        }
    }
    steps.push(phase_gadget(Basis::X, &[k], n, Phase::constant(FRAC_PI_2))?);
    Ok(ZxTerm::seq_all(steps).expect("nonempty"))
}

/// Inputs: `k` bit wires then the label wire. Outputs: `[loss, expectation]`.
pub fn build_demo_graph(k: usize, layers: usize) -> Result<HybridGraph> {
    if k == 0 || k > MAX_BITS || layers == 0 {
        return Err(Error::Config(format!("demo needs 1 <= k <= {MAX_BITS} and layers >= 1")));
    }
    let names = demo_param_names(k, layers);
    let mut b = GraphBuilder::new(vec![1; k + 1], names.clone());
    let mut merged = b.bit_encoder(Source::Input(0));
    for i in 1..k {
        let enc = b.bit_encoder(Source::Input(i));
        merged = b.mu(merged, i, enc, 1);
    }
    let qb = QuantumBox::new(demo_circuit(k, layers)?, names.clone(), vec![k])?;
    let params = (0..names.len()).map(Source::Param).collect();
    let out = b.quantum_box(qb, params, vec![merged]);
    let readout = prob0_readout(k + 1, k)?;
    let p = b.smooth(SmoothPrim::Linear { matrix: readout.mat }, vec![out]);
    let two_p = b.smooth(SmoothPrim::Scale { c: 2.0 }, vec![p]);
    let minus_one = b.constant(vec![-1.0]);
    let e = b.smooth(SmoothPrim::Add, vec![two_p, minus_one]);
    let neg_e = b.smooth(SmoothPrim::Scale { c: -1.0 }, vec![e]);
    let diff = b.smooth(SmoothPrim::Add, vec![Source::Input(k), neg_e]);
    let loss = b.smooth(SmoothPrim::Mul, vec![diff, diff]);
    b.output(loss);
    b.output(e);
    b.finish()
}

/// Graph inputs for one sample: the bits then the label.
pub fn demo_inputs(s: &Sample) -> Vec<f64> {
    s.bits_f64().chain(std::iter::once(f64::from(s.label))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    Synth {
        k: usize,
        rule: Rule,
        n: usize,
        /// Defaults to the training seed.
        #[serde(default)]
        seed: Option<u64>,
    },
    Idx {
        images: PathBuf,
        labels: PathBuf,
        #[serde(default)]
        options: IdxOptions,
        /// Keep at most this many samples.
        #[serde(default)]
        limit: Option<usize>,
    },
}

fn default_fd_step() -> f64 {
    DEFAULT_FD_STEP
}

fn default_layers() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub seed: u64,
    pub learning_rate: f64,
    pub iterations: usize,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default = "default_layers")]
    pub layers: usize,
    pub data: DataSource,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        if !(self.fd_step > 0.0) {
            return Err(Error::Config(format!("fd_step must be positive, got {}", self.fd_step)));
        }
        if self.layers == 0 {
            return Err(Error::Config("layers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn load_samples(&self) -> Result<Vec<Sample>> {
        match &self.data {
            DataSource::Synth { k, rule, n, seed } => synth_dataset(*k, *rule, *n, seed.unwrap_or(self.seed)),
            DataSource::Idx { images, labels, options, limit } => {
                let mut s = ingest_idx(images, labels, options)?;
                if let Some(l) = limit {
                    s.truncate(*l);
                }
                Ok(s)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub iter: usize,
    pub loss: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub metrics: Vec<Metric>,
    pub params: Vec<f64>,
}

/// Mean loss and accuracy of the demo graph over `samples`.
pub fn evaluate(g: &HybridGraph, samples: &[Sample], params: &[f64]) -> Result<(f64, f64)> {
    let mut ev = Evaluator::new(g)?;
    let (mut loss, mut correct) = (0.0, 0usize);
    for s in samples {
        let out = ev.eval(&demo_inputs(s), params)?;
        loss += out[0];
        let predicted = if out[1] > 0.0 { 1 } else { -1 };
        correct += usize::from(predicted == s.label);
    }
    let n = samples.len() as f64;
    Ok((loss / n, correct as f64 / n))
}

fn mean_loss(g: &HybridGraph, samples: &[Sample], params: &[f64]) -> Result<f64> {
    let mut ev = Evaluator::new(g)?;
    let mut total = 0.0;
    for s in samples {
        total += ev.eval(&demo_inputs(s), params)?[0];
    }
    Ok(total / samples.len() as f64)
}

/// Full-batch gradient descent from parameters drawn uniformly in `(-pi, pi)`.
/// `on_metric` sees iteration 0 (the initial parameters) through `iterations`.
pub fn train_on(
    config: &TrainConfig,
    samples: &[Sample],
    mut on_metric: impl FnMut(&Metric),
) -> Result<TrainReport> {
    config.validate()?;
    let Some(first) = samples.first() else {
        return Err(Error::Data("dataset is empty".into()));
    };
    let k = first.bits.len();
    if samples.iter().any(|s| s.bits.len() != k) {
        return Err(Error::Data("samples have different bit counts".into()));
    }
    let g = build_demo_graph(k, config.layers)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params: Vec<f64> = (0..g.param_names.len()).map(|_| rng.gen_range(-PI..PI)).collect();
    let mut metrics = Vec::with_capacity(config.iterations + 1);
    for iter in 0..=config.iterations {
        let (loss, accuracy) = evaluate(&g, samples, &params)?;
        if !loss.is_finite() {
            return Err(Error::Data(format!("loss became {loss} at iteration {iter}")));
        }
        let m = Metric { iter, loss, accuracy };
        on_metric(&m);
        metrics.push(m);
        if iter == config.iterations {
            break;
        }
        let grad = fd_gradient(|p| mean_loss(&g, samples, p), &params, config.fd_step)?;
        for (p, d) in params.iter_mut().zip(grad) {
            *p -= config.learning_rate * d;
        }
    }
    Ok(TrainReport { metrics, params })
}

pub fn train(config: &TrainConfig) -> Result<TrainReport> {
    train_on(config, &config.load_samples()?, |_| {})
}
