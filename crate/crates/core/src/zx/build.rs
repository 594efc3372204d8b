//! Circuit builders: CNOT, Pauli phase gadgets and computational-basis preparation.
//!
//! Every builder inserts the scalar needed for its pure interpretation to be
//! an exact isometry. Phase gadgets fix the global phase so that
//! `gadget(P, a) = e^{i a/2} exp(-i a/2 P)`; the doubled semantics is
//! independent of that choice.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use super::{Phase, ZxError, ZxTerm};
use crate::linalg::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Z,
    X,
}

fn real(c: f64) -> ZxTerm {
    ZxTerm::scalar(C64::new(c, 0.0))
}

/// Identity on `n` wires (the unit scalar when `n == 0`).
pub fn identity(n: usize) -> ZxTerm {
    ZxTerm::par_all((0..n).map(|_| ZxTerm::id()))
}

/// Places `t` on wires `offset..offset + in(t)` of an `n`-wire layer.
pub fn on_wires(n: usize, offset: usize, t: ZxTerm) -> Result<ZxTerm, ZxError> {
    let (k, _) = t.arity()?;
    if offset + k > n {
        return Err(ZxError::Builder(format!("{k} wires at offset {offset} exceed {n}")));
    }
    let mut parts = Vec::with_capacity(3);
    if offset > 0 {
        parts.push(identity(offset));
    }
    parts.push(t);
    if offset + k < n {
        parts.push(identity(n - offset - k));
    }
    Ok(ZxTerm::par_all(parts))
}

/// Adjacent transpositions (position `p` swaps with `p + 1`) that reorder
/// `current` into `target`. Both must be permutations of the same labels.
pub fn swap_network(current: &[usize], target: &[usize]) -> Vec<usize> {
    let mut order = current.to_vec();
    let mut swaps = Vec::new();
    for (pos, want) in target.iter().enumerate() {
        let mut at = order.iter().position(|x| x == want).expect("target is a permutation");
        while at > pos {
            order.swap(at - 1, at);
            swaps.push(at - 1);
            at -= 1;
        }
    }
    swaps
}

fn swap_layers(n: usize, swaps: &[usize]) -> Vec<ZxTerm> {
    swaps.iter().map(|&p| on_wires(n, p, ZxTerm::swap()).expect("swap positions in range")).collect()
}

/// CNOT with control on the left wire: a Z copy spider on the control feeding
/// an X merge spider on the target, rescaled by `sqrt 2`.
pub fn cnot() -> ZxTerm {
    let copy = ZxTerm::par(ZxTerm::z(1, 2, Phase::zero()), ZxTerm::id());
    let merge = ZxTerm::par(ZxTerm::id(), ZxTerm::x(2, 1, Phase::zero()));
    ZxTerm::par(real(SQRT_2), ZxTerm::seq(copy, merge))
}

/// Phase gadget on `k` adjacent wires implementing `diag(e^{i a parity(b)})`.
fn contiguous_z_gadget(k: usize, phase: Phase) -> ZxTerm {
    if k == 1 {
        return ZxTerm::z(1, 1, phase);
    }
    let copies = ZxTerm::par_all((0..k).map(|_| ZxTerm::z(1, 2, Phase::zero())));
    // wires after copying: q0 l0 q1 l1 ...; legs are labelled k..2k
    let current: Vec<usize> = (0..k).flat_map(|i| [i, k + i]).collect();
    let target: Vec<usize> = (0..2 * k).collect();
    let mut layers = vec![copies];
    layers.extend(swap_layers(2 * k, &swap_network(&current, &target)));
    let hub = ZxTerm::seq(ZxTerm::x(k, 1, Phase::zero()), ZxTerm::z(1, 0, phase));
    layers.push(on_wires(2 * k, k, hub).expect("hub fits"));
    let body = ZxTerm::seq_all(layers).expect("nonempty");
    ZxTerm::par(real(2f64.powf((k as f64 - 1.0) / 2.0)), body)
}

/// Gadget for the Pauli product with the given legs on an `n`-wire register:
/// `e^{i a/2} exp(-i a/2 P_1 (x) ... (x) P_k)`, identity on other wires.
pub fn pauli_gadget(legs: &[(usize, Basis)], n: usize, phase: Phase) -> Result<ZxTerm, ZxError> {
    if legs.is_empty() {
        return Err(ZxError::Builder("gadget needs at least one leg".into()));
    }
    let mut qubits: Vec<usize> = legs.iter().map(|l| l.0).collect();
    qubits.sort_unstable();
    if qubits.windows(2).any(|w| w[0] == w[1]) {
        return Err(ZxError::Builder(format!("duplicate gadget qubits {qubits:?}")));
    }
    if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
        return Err(ZxError::Builder(format!("qubit {q} out of range for {n} wires")));
    }
    let k = qubits.len();
    let last = qubits[k - 1];
    let start = last + 1 - k;

    // gather the selected wires into start..=last, keeping the rest in order
    let current: Vec<usize> = (0..n).collect();
    let mut target: Vec<usize> = (0..=last).filter(|q| !qubits.contains(q)).collect();
    target.extend(&qubits);
    target.extend(last + 1..n);
    let swaps = swap_network(&current, &target);

    let hadamards: Vec<ZxTerm> = (0..n)
        .map(|q| {
            if legs.iter().any(|&(l, b)| l == q && b == Basis::X) {
                ZxTerm::hadamard()
            } else {
                ZxTerm::id()
            }
        })
        .collect();
    let has_x = legs.iter().any(|l| l.1 == Basis::X);

    let mut layers = Vec::new();
    if has_x {
        layers.push(ZxTerm::par_all(hadamards.clone()));
    }
    layers.extend(swap_layers(n, &swaps));
    layers.push(on_wires(n, start, contiguous_z_gadget(k, phase))?);
    let mut undo = swaps.clone();
    undo.reverse();
    layers.extend(swap_layers(n, &undo));
    if has_x {
        layers.push(ZxTerm::par_all(hadamards));
    }
    Ok(ZxTerm::seq_all(layers).expect("nonempty"))
}

/// Phase gadget with every leg in the same basis.
pub fn phase_gadget(basis: Basis, qubits: &[usize], n: usize, phase: Phase) -> Result<ZxTerm, ZxError> {
    let legs: Vec<(usize, Basis)> = qubits.iter().map(|&q| (q, basis)).collect();
    pauli_gadget(&legs, n, phase)
}

/// Prepares `|x_0 ... x_{k-1}⟩` from parameters `x_i`: X-spider states with
/// phase `pi x_i`, each rescaled by `1/sqrt 2`.
pub fn basis_prep<S: AsRef<str>>(bits: &[S]) -> Result<ZxTerm, ZxError> {
    if bits.is_empty() {
        return Err(ZxError::Builder("basis preparation needs at least one bit".into()));
    }
    Ok(ZxTerm::par_all(bits.iter().map(|name| {
        ZxTerm::par(real(FRAC_1_SQRT_2), ZxTerm::x(0, 1, Phase::param(name.as_ref(), PI)))
    })))
}
