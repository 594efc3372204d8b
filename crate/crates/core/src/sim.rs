//! Fast evaluation of bound terms by applying each generator locally.
//!
//! A term is flattened into a list of generator applications at wire offsets;
//! `Par(a, b)` flattens `b` first so that `a`'s offsets are unaffected by
//! `b` changing its wire count. The reference semantics in [`crate::sem`]
//! builds full Kronecker products instead; tests check the two agree.

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64, ZERO};
use crate::sem::generator_matrix;
use crate::zx::{Generator, ZxTerm};

#[derive(Debug, Clone)]
enum LocalOp {
    Matrix(CMat),
    Discard,
    Scalar(C64),
}

#[derive(Debug, Clone)]
struct Step {
    op: LocalOp,
    offset: usize,
    inputs: usize,
    outputs: usize,
    /// wire count before this step
    width: usize,
}

/// A flattened, parameter-free term ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Circuit {
    n_in: usize,
    n_out: usize,
    steps: Vec<Step>,
    pure: bool,
}

impl Circuit {
    pub fn compile(t: &ZxTerm) -> Result<Self> {
        let (n_in, n_out) = t.arity()?;
        let mut raw = Vec::new();
        flatten(t, 0, &mut raw);
        let mut width = n_in;
        let mut steps = Vec::with_capacity(raw.len());
        let mut pure = true;
        for (g, offset) in raw {
            let (inputs, outputs) = g.arity();
            let op = match g {
                Generator::Discard => {
                    pure = false;
                    LocalOp::Discard
                }
                Generator::Scalar(c) => LocalOp::Scalar(*c),
                Generator::Id => continue,
                other => LocalOp::Matrix(generator_matrix(other)?),
            };
            steps.push(Step { op, offset, inputs, outputs, width });
            width = width - inputs + outputs;
        }
        debug_assert_eq!(width, n_out);
        Ok(Self { n_in, n_out, steps, pure })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    /// True when the term has no discard, so it denotes a single linear map.
    pub fn is_pure(&self) -> bool {
        self.pure
    }

    /// Applies the pure map to the rows of `state` (`2^n_in x k`).
    pub fn apply_pure(&self, state: &CMat) -> Result<CMat> {
        if !self.pure {
            return Err(Error::Shape("circuit contains a discard".into()));
        }
        if state.rows() != 1 << self.n_in {
            return Err(Error::Shape(format!("{} rows for {} input qubits", state.rows(), self.n_in)));
        }
        let mut cur = state.clone();
        for s in &self.steps {
            cur = match &s.op {
                LocalOp::Matrix(m) => apply_rows(&cur, s, m),
                LocalOp::Scalar(c) => cur.scale(*c),
                LocalOp::Discard => unreachable!(),
            };
        }
        Ok(cur)
    }

    /// The pure map as a `2^n_out x 2^n_in` matrix.
    pub fn matrix(&self) -> Result<CMat> {
        self.apply_pure(&CMat::identity(1 << self.n_in))
    }

    /// Applies the CP map to a density matrix.
    pub fn apply_density(&self, rho: &CMat) -> Result<CMat> {
        let d = 1usize << self.n_in;
        if rho.shape() != (d, d) {
            return Err(Error::Shape(format!("{:?} density for {} input qubits", rho.shape(), self.n_in)));
        }
        let mut cur = rho.clone();
        for s in &self.steps {
            cur = match &s.op {
                LocalOp::Matrix(m) => apply_cols_conj(&apply_rows(&cur, s, m), s, m),
                LocalOp::Scalar(c) => cur.scale(C64::new(c.norm_sqr(), 0.0)),
                LocalOp::Discard => partial_trace_wire(&cur, s.offset, s.width),
            };
        }
        Ok(cur)
    }
}

fn flatten<'a>(t: &'a ZxTerm, offset: usize, out: &mut Vec<(&'a Generator, usize)>) {
    match t {
        ZxTerm::Gen(g) => out.push((g, offset)),
        ZxTerm::Seq(a, b) => {
            flatten(a, offset, out);
            flatten(b, offset, out);
        }
        ZxTerm::Par(a, b) => {
            let (a_in, _) = a.arity().expect("checked by compile");
            flatten(b, offset + a_in, out);
            flatten(a, offset, out);
        }
    }
}

/// `(I_L (x) M (x) I_R) * X` where `M` acts on wires `offset..offset+inputs`.
fn apply_rows(x: &CMat, s: &Step, m: &CMat) -> CMat {
    let right = 1usize << (s.width - s.offset - s.inputs);
    let left = 1usize << s.offset;
    let (k_in, k_out) = (1usize << s.inputs, 1usize << s.outputs);
    let cols = x.cols();
    let src = x.as_slice();
    let mut out = CMat::zeros(left * k_out * right, cols);
    let dst = out.as_mut_slice();
    for l in 0..left {
        for o in 0..k_out {
            for i in 0..k_in {
                let a = m[(o, i)];
                if a == ZERO {
                    continue;
                }
                for r in 0..right {
                    let src_row = ((l * k_in + i) * right + r) * cols;
                    let dst_row = ((l * k_out + o) * right + r) * cols;
                    for c in 0..cols {
                        dst[dst_row + c] += a * src[src_row + c];
                    }
                }
            }
        }
    }
    out
}

/// `X * (I_L (x) M (x) I_R)^dagger`.
fn apply_cols_conj(x: &CMat, s: &Step, m: &CMat) -> CMat {
    let right = 1usize << (s.width - s.offset - s.inputs);
    let left = 1usize << s.offset;
    let (k_in, k_out) = (1usize << s.inputs, 1usize << s.outputs);
    let rows = x.rows();
    let src_cols = x.cols();
    let dst_cols = left * k_out * right;
    let src = x.as_slice();
    let mut out = CMat::zeros(rows, dst_cols);
    let dst = out.as_mut_slice();
    for row in 0..rows {
        let src_row = &src[row * src_cols..(row + 1) * src_cols];
        let dst_row = &mut dst[row * dst_cols..(row + 1) * dst_cols];
        for l in 0..left {
            for o in 0..k_out {
                for i in 0..k_in {
                    let a = m[(o, i)].conj();
                    if a == ZERO {
                        continue;
                    }
                    let sbase = (l * k_in + i) * right;
                    let dbase = (l * k_out + o) * right;
                    for r in 0..right {
                        dst_row[dbase + r] += a * src_row[sbase + r];
                    }
                }
            }
        }
    }
    out
}

/// Traces out wire `wire` of a `width`-qubit density matrix.
fn partial_trace_wire(rho: &CMat, wire: usize, width: usize) -> CMat {
    let right = 1usize << (width - wire - 1);
    let left = 1usize << wire;
    let d = left * right;
    CMat::from_fn(d, d, |r, c| {
        let (lr, rr) = (r / right, r % right);
        let (lc, rc) = (c / right, c % right);
        (0..2).map(|b| rho[((lr * 2 + b) * right + rr, (lc * 2 + b) * right + rc)]).sum()
    })
}
