//! Hybrid string diagrams: smooth classical maps, the coherence maps of the
//! quantum-to-classical functor and quantum boxes.
//!
//! A classical wire carrying the state of `n` qubits has width `4^n` and
//! holds a Pauli vector. [`mu`] merges two such wires (Kronecker product) and
//! [`epsilon`] is the empty merge. A [`QuantumBox`] accepts any number of
//! state wires but has exactly one output wire.

mod graph;
mod json;

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{from_pauli_vector, pauli_vector, qubits_of_pauli_dim, CMat, RMat, RVec};
use crate::ptm::{ptm_apply, ptm_of_term, Ptm};
use crate::sim::Circuit;
use crate::zx::{Binding, ZxTerm};

pub use graph::{
    fd_gradient, jacobian_fd, Evaluator, GraphBuilder, HybridGraph, Node, NodeKind, Source,
    DEFAULT_FD_STEP,
};
pub use json::{graph_from_json, graph_to_json, parse_graph, serialize_graph};

/// Tolerance on probabilities handed to [`expectation_from_prob`].
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Kronecker merge of two Pauli vectors, `v` on the most significant qubits.
pub fn mu(v: &[f64], w: &[f64]) -> Result<RVec> {
    for x in [v, w] {
        if qubits_of_pauli_dim(x.len()).is_none() {
            return Err(Error::Shape(format!("width {} is not a power of 4", x.len())));
        }
    }
    let mut out = Vec::with_capacity(v.len() * w.len());
    for &a in v {
        out.extend(w.iter().map(|&b| a * b));
    }
    Ok(out)
}

/// The unit of [`mu`]: the Pauli vector of the empty register.
pub fn epsilon() -> RVec {
    vec![1.0]
}

/// Left fold of [`mu`] starting from [`epsilon`].
pub fn mu_fold<V: AsRef<[f64]>>(states: &[V]) -> Result<RVec> {
    states.iter().try_fold(epsilon(), |acc, s| mu(&acc, s.as_ref()))
}

/// Pauli vector of the X-spider state with phase `pi x`: `|x⟩` at `x` in {0, 1}.
pub fn bit_encoder(x: f64) -> RVec {
    let (s, c) = (PI * x).sin_cos();
    vec![1.0, 0.0, -s, c]
}

/// Effect row for the probability of reading `|0⟩` on qubit `which` of an
/// `m`-qubit register, discarding the others.
pub fn prob0_readout(m: usize, which: usize) -> Result<Ptm> {
    if which >= m {
        return Err(Error::Shape(format!("readout qubit {which} out of range for {m} qubits")));
    }
    let row = (0..m).fold(RMat::identity(1), |acc, q| {
        let factor = if q == which { vec![0.5, 0.0, 0.0, 0.5] } else { vec![1.0, 0.0, 0.0, 0.0] };
        acc.kron(&RMat::row_vector(factor))
    });
    Ptm::new(m, 0, row)
}

/// `<Z> = 2 Prob(0) - 1`.
pub fn expectation_from_prob(p: f64) -> Result<f64> {
    if !(-PROB_TOLERANCE..=1.0 + PROB_TOLERANCE).contains(&p) {
        return Err(Error::Probability(p));
    }
    Ok(2.0 * p - 1.0)
}

pub fn squared_loss(y: f64, e: f64) -> f64 {
    (y - e) * (y - e)
}

/// Classical primitives. Each has a fixed output width given its input widths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum SmoothPrim {
    Const { value: RVec },
    Linear {
        #[serde(with = "json::rmat")]
        matrix: RMat,
    },
    Add,
    Mul,
    Sin,
    Cos,
    Scale { c: f64 },
    /// Components `start..end`.
    Proj { start: usize, end: usize },
    Concat,
    /// `v -> (v, v)` as one wire of twice the width.
    Copy,
}

impl SmoothPrim {
    pub fn output_width(&self, inputs: &[usize]) -> Result<usize> {
        let bad = |msg: &str| Err(Error::Graph(format!("{self:?}: {msg} (inputs {inputs:?})")));
        match (self, inputs) {
            (SmoothPrim::Const { value }, []) => Ok(value.len()),
            (SmoothPrim::Const { .. }, _) => bad("takes no inputs"),
            (SmoothPrim::Linear { matrix }, &[w]) if w == matrix.cols() => Ok(matrix.rows()),
            (SmoothPrim::Linear { .. }, _) => bad("input width must match matrix columns"),
            (SmoothPrim::Add | SmoothPrim::Mul, &[a, b]) if a == b => Ok(a),
            (SmoothPrim::Add | SmoothPrim::Mul, _) => bad("needs two inputs of equal width"),
            (SmoothPrim::Sin | SmoothPrim::Cos | SmoothPrim::Scale { .. }, &[w]) => Ok(w),
            (SmoothPrim::Proj { start, end }, &[w]) if start < end && *end <= w => Ok(end - start),
            (SmoothPrim::Proj { .. }, _) => bad("range must be nonempty and inside the input"),
            (SmoothPrim::Concat, ws) if !ws.is_empty() => Ok(ws.iter().sum()),
            (SmoothPrim::Copy, &[w]) => Ok(2 * w),
            _ => bad("wrong number of inputs"),
        }
    }

    /// Evaluates on already width-checked inputs.
    pub fn eval(&self, inputs: &[&[f64]]) -> RVec {
        match self {
            SmoothPrim::Const { value } => value.clone(),
            SmoothPrim::Linear { matrix } => matrix.matvec(inputs[0]).expect("width checked"),
            SmoothPrim::Add => inputs[0].iter().zip(inputs[1]).map(|(a, b)| a + b).collect(),
            SmoothPrim::Mul => inputs[0].iter().zip(inputs[1]).map(|(a, b)| a * b).collect(),
            SmoothPrim::Sin => inputs[0].iter().map(|x| x.sin()).collect(),
            SmoothPrim::Cos => inputs[0].iter().map(|x| x.cos()).collect(),
            SmoothPrim::Scale { c } => inputs[0].iter().map(|x| c * x).collect(),
            SmoothPrim::Proj { start, end } => inputs[0][*start..*end].to_vec(),
            SmoothPrim::Concat => inputs.concat(),
            SmoothPrim::Copy => [inputs[0], inputs[0]].concat(),
        }
    }
}

/// A functor box around a doubled ZX term.
///
/// Parameter wires bind phase parameters by name; state wires carry Pauli
/// vectors of `state_qubits[i]` qubits which are merged with [`mu`] before
/// entering the term. Qubits prepared inside the term (states with no input
/// wire) do not appear in `state_qubits`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumBox {
    term: ZxTerm,
    params: Vec<String>,
    state_qubits: Vec<usize>,
    out_qubits: usize,
}

impl QuantumBox {
    pub fn new(term: ZxTerm, params: Vec<String>, state_qubits: Vec<usize>) -> Result<Self> {
        let (n_in, n_out) = term.arity()?;
        let total: usize = state_qubits.iter().sum();
        if total != n_in {
            return Err(Error::Graph(format!(
                "box term takes {n_in} qubits but its state wires carry {total}"
            )));
        }
        let declared: BTreeSet<&str> = params.iter().map(String::as_str).collect();
        if declared.len() != params.len() {
            return Err(Error::Graph("duplicate box parameter name".into()));
        }
        if let Some(free) = term.params().into_iter().find(|p| !declared.contains(p.as_str())) {
            return Err(Error::Graph(format!("term parameter `{free}` has no parameter wire")));
        }
        Ok(Self { term, params, state_qubits, out_qubits: n_out })
    }

    pub fn term(&self) -> &ZxTerm {
        &self.term
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn state_qubits(&self) -> &[usize] {
        &self.state_qubits
    }

    pub fn out_qubits(&self) -> usize {
        self.out_qubits
    }

    pub fn output_width(&self) -> usize {
        1 << (2 * self.out_qubits)
    }

    pub fn bind(&self, values: &[f64]) -> Result<ZxTerm> {
        if values.len() != self.params.len() {
            return Err(Error::Shape(format!(
                "{} parameter values for {} parameter wires",
                values.len(),
                self.params.len()
            )));
        }
        let binding: Binding = self.params.iter().cloned().zip(values.iter().copied()).collect();
        Ok(self.term.substitute(&binding))
    }

    fn check_states<V: AsRef<[f64]>>(&self, states: &[V]) -> Result<()> {
        if states.len() != self.state_qubits.len() {
            return Err(Error::Shape(format!(
                "{} state wires for a box with {}",
                states.len(),
                self.state_qubits.len()
            )));
        }
        for (s, &n) in states.iter().zip(&self.state_qubits) {
            if s.as_ref().len() != 1 << (2 * n) {
                return Err(Error::Shape(format!("state of width {} for {n} qubits", s.as_ref().len())));
            }
        }
        Ok(())
    }

    /// Binds parameters and compiles the term for repeated evaluation.
    pub fn prepare(&self, values: &[f64]) -> Result<PreparedBox> {
        let circuit = Circuit::compile(&self.bind(values)?)?;
        let unitary = if circuit.is_pure() { Some(circuit.matrix()?) } else { None };
        Ok(PreparedBox { circuit, unitary })
    }
}

/// A box with bound parameters.
#[derive(Debug, Clone)]
pub struct PreparedBox {
    circuit: Circuit,
    unitary: Option<CMat>,
}

impl PreparedBox {
    /// Output Pauli vector for the merged input Pauli vector.
    pub fn apply(&self, merged: &[f64]) -> Result<RVec> {
        let rho = from_pauli_vector(merged)?;
        let out = match &self.unitary {
            Some(u) => u.matmul(&rho)?.matmul(&u.dagger())?,
            None => self.circuit.apply_density(&rho)?,
        };
        Ok(pauli_vector(&out)?)
    }
}

/// Evaluates a box: binds `params`, merges `states` with [`mu`] and applies
/// the transfer matrix of the term. The transfer matrix is never formed; the
/// merged vector is turned into a density matrix, pushed through the term and
/// read back in the Pauli basis.
pub fn eval_box<V: AsRef<[f64]>>(b: &QuantumBox, params: &[f64], states: &[V]) -> Result<RVec> {
    b.check_states(states)?;
    b.prepare(params)?.apply(&mu_fold(states)?)
}

/// [`eval_box`] through the explicit transfer matrix of the bound term.
pub fn eval_box_via_ptm<V: AsRef<[f64]>>(b: &QuantumBox, params: &[f64], states: &[V]) -> Result<RVec> {
    b.check_states(states)?;
    let p = ptm_of_term(&b.bind(params)?)?;
    ptm_apply(&p, &mu_fold(states)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::zx::{basis_prep, cnot, identity, Phase};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn mu_examples() {
        let v = mu(&[1.0, 0.0, 0.0, 1.0], &[1.0, 0.0, 0.0, -1.0]).unwrap();
        // Pauli vector of |01><01|: tr((P_i (x) P_j) |0><0| (x) |1><1|)
        let mut expect = vec![0.0; 16];
        for (i, a) in [1.0, 0.0, 0.0, 1.0].iter().enumerate() {
            for (j, b) in [1.0, 0.0, 0.0, -1.0].iter().enumerate() {
                expect[4 * i + j] = a * b;
            }
        }
        assert_eq!(v, expect);
        let w = vec![0.3, -0.1, 0.5, 2.0];
        assert_eq!(mu(&w, &epsilon()).unwrap(), w);
        assert_eq!(mu(&epsilon(), &w).unwrap(), w);
        assert!(mu(&[1.0, 2.0], &w).is_err());
        assert_eq!(epsilon(), vec![1.0]);
    }

    #[test]
    fn encoder_examples() {
        assert!(close(&bit_encoder(0.0), &[1.0, 0.0, 0.0, 1.0], 1e-15));
        assert!(close(&bit_encoder(1.0), &[1.0, 0.0, 0.0, -1.0], 1e-15));
        let a = 0.77;
        assert!(close(&bit_encoder(a / PI), &[1.0, 0.0, -a.sin(), a.cos()], 1e-15));
    }

    #[test]
    fn readout_examples() {
        let r = prob0_readout(1, 0).unwrap();
        assert_eq!(r.mat.as_slice(), &[0.5, 0.0, 0.0, 0.5]);
        let (x, y, z) = (0.1, -0.3, 0.4);
        let p = ptm_apply(&r, &[1.0, x, y, z]).unwrap()[0];
        assert!((p - (1.0 + z) / 2.0).abs() < 1e-15);
        assert_eq!(ptm_apply(&r, &[1.0, 0.0, 0.0, 1.0]).unwrap(), vec![1.0]);
        let r3 = prob0_readout(3, 2).unwrap();
        let state = mu_fold(&[bit_encoder(0.0), bit_encoder(0.0), bit_encoder(1.0)]).unwrap();
        assert!(ptm_apply(&r3, &state).unwrap()[0].abs() < 1e-15);
        assert!(prob0_readout(2, 2).is_err());
    }

    #[test]
    fn expectation_and_loss() {
        assert_eq!(expectation_from_prob(1.0).unwrap(), 1.0);
        assert_eq!(expectation_from_prob(0.5).unwrap(), 0.0);
        let z = -0.35;
        assert!((expectation_from_prob((1.0 + z) / 2.0).unwrap() - z).abs() < 1e-15);
        assert!(expectation_from_prob(1.1).is_err());
        assert!(expectation_from_prob(-1e-12).is_ok());
        assert_eq!(squared_loss(1.0, 1.0), 0.0);
        assert_eq!(squared_loss(-1.0, 1.0), 4.0);
        assert_eq!(squared_loss(1.0, 0.0), 1.0);
    }

    #[test]
    fn prim_widths() {
        assert_eq!(SmoothPrim::Concat.output_width(&[4, 1]).unwrap(), 5);
        assert_eq!(SmoothPrim::Copy.output_width(&[3]).unwrap(), 6);
        assert!(SmoothPrim::Add.output_width(&[3, 4]).is_err());
        assert!(SmoothPrim::Proj { start: 2, end: 5 }.output_width(&[4]).is_err());
        let lin = SmoothPrim::Linear { matrix: RMat::identity(2) };
        assert!(lin.output_width(&[3]).is_err());
    }

    #[test]
    fn box_validation() {
        let t = ZxTerm::z(1, 1, Phase::param("t", 1.0));
        assert!(QuantumBox::new(t.clone(), vec![], vec![1]).is_err());
        assert!(QuantumBox::new(t.clone(), vec!["t".into()], vec![2]).is_err());
        let b = QuantumBox::new(t, vec!["t".into()], vec![1]).unwrap();
        assert!(eval_box(&b, &[], &[bit_encoder(0.0)]).is_err());
        assert!(eval_box(&b, &[0.1], &[vec![1.0]]).is_err());
    }

    #[test]
    fn measurement_on_prepared_zero() {
        let prep = ZxTerm::par(ZxTerm::scalar(C64::new(FRAC_1_SQRT_2, 0.0)), ZxTerm::x(0, 1, Phase::zero()));
        let b = QuantumBox::new(prep, vec![], vec![]).unwrap();
        let out = eval_box::<RVec>(&b, &[], &[]).unwrap();
        let p = ptm_apply(&prob0_readout(1, 0).unwrap(), &out).unwrap()[0];
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn encoded_identity_box_gives_basis_state() {
        let b = QuantumBox::new(identity(4), vec![], vec![1, 1, 1, 1]).unwrap();
        let states: Vec<RVec> = [0.0, 1.0, 0.0, 0.0].iter().map(|&x| bit_encoder(x)).collect();
        let out = eval_box(&b, &[], &states).unwrap();
        // oracle: Pauli vector of |0100> from the basis-preparation term
        let prep = basis_prep(&["a", "b", "c", "d"]).unwrap();
        let binding: Binding =
            [("a", 0.0), ("b", 1.0), ("c", 0.0), ("d", 0.0)].iter().map(|&(k, v)| (k.to_string(), v)).collect();
        let oracle = ptm_of_term(&prep.substitute(&binding)).unwrap();
        assert!(close(&out, oracle.mat.as_slice(), 1e-12));
        assert!(close(&out, &eval_box_via_ptm(&b, &[], &states).unwrap(), 1e-12));
    }

    #[test]
    fn cnot_copies_basis_bit() {
        let b = QuantumBox::new(cnot(), vec![], vec![1, 1]).unwrap();
        for x in [0.0, 1.0] {
            let out = eval_box(&b, &[], &[bit_encoder(x), bit_encoder(0.0)]).unwrap();
            let p0 = ptm_apply(&prob0_readout(2, 1).unwrap(), &out).unwrap()[0];
            assert!((p0 - (1.0 - x)).abs() < 1e-12);
        }
    }
}
