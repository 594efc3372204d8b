//! Seeded generation of well-typed terms for property tests.

use std::f64::consts::PI;

use rand::Rng;

use crate::linalg::C64;
use crate::zx::{Phase, ZxTerm};

#[derive(Debug, Clone, Copy)]
pub struct TermShape {
    /// Bound on the wire count at every interface, including inputs and outputs.
    pub max_qubits: usize,
    /// Bound on [`ZxTerm::depth`].
    pub max_depth: usize,
    pub discards: bool,
}

impl Default for TermShape {
    fn default() -> Self {
        Self { max_qubits: 4, max_depth: 6, discards: true }
    }
}

/// A random term with a random input count.
pub fn random_term<R: Rng>(rng: &mut R, shape: TermShape) -> ZxTerm {
    let n_in = rng.gen_range(0..=shape.max_qubits);
    random_term_from(rng, n_in, shape)
}

/// A random term with exactly `n_in` inputs (`n_in <= max_qubits`).
pub fn random_term_from<R: Rng>(rng: &mut R, n_in: usize, shape: TermShape) -> ZxTerm {
    assert!(n_in <= shape.max_qubits, "input count exceeds the qubit bound");
    let depth = rng.gen_range(1..=shape.max_depth.max(1));
    grow(rng, n_in, shape.max_qubits, depth, &shape)
}

fn grow<R: Rng>(rng: &mut R, n_in: usize, max_out: usize, depth: usize, shape: &TermShape) -> ZxTerm {
    if depth <= 1 || rng.gen_bool(0.15) {
        return generator(rng, n_in, max_out, shape);
    }
    if rng.gen_bool(0.5) {
        let first = grow(rng, n_in, shape.max_qubits, depth - 1, shape);
        let (_, mid) = first.arity().expect("generated terms are well typed");
        let then = grow(rng, mid, max_out, depth - 1, shape);
        ZxTerm::seq(first, then)
    } else {
        let k = rng.gen_range(0..=n_in);
        let left = grow(rng, k, max_out, depth - 1, shape);
        let (_, left_out) = left.arity().expect("generated terms are well typed");
        let right = grow(rng, n_in - k, max_out - left_out, depth - 1, shape);
        ZxTerm::par(left, right)
    }
}

fn phase<R: Rng>(rng: &mut R) -> Phase {
    Phase::constant(rng.gen_range(-PI..PI))
}

fn spider<R: Rng>(rng: &mut R, n_in: usize, max_out: usize) -> ZxTerm {
    let m = rng.gen_range(0..=max_out.min(3));
    if rng.gen_bool(0.5) {
        ZxTerm::z(n_in, m, phase(rng))
    } else {
        ZxTerm::x(n_in, m, phase(rng))
    }
}

fn generator<R: Rng>(rng: &mut R, n_in: usize, max_out: usize, shape: &TermShape) -> ZxTerm {
    match n_in {
        0 if rng.gen_bool(0.3) => {
            let (r, a) = (rng.gen_range(0.5..1.5), rng.gen_range(-PI..PI));
            ZxTerm::scalar(C64::from_polar(r, a))
        }
        1 if max_out >= 1 => match rng.gen_range(0..5) {
            0 => ZxTerm::hadamard(),
            1 => ZxTerm::id(),
            2 if shape.discards => ZxTerm::discard(),
            _ => spider(rng, 1, max_out),
        },
        1 if shape.discards && rng.gen_bool(0.5) => ZxTerm::discard(),
        2 if max_out >= 2 && rng.gen_bool(0.3) => ZxTerm::swap(),
        _ => spider(rng, n_in, max_out),
    }
}
