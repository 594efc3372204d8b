//! Reference semantics: pure matrices for discard-free terms, and
//! superoperators on column-vectorized density matrices for everything else.
//!
//! These are the definitional interpretations (homomorphic over `Seq` and
//! `Par`); the faster evaluator in [`crate::sim`] is checked against them.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{qubits_of_dim, unvec, vec, CMat, C64, ONE, ZERO};
use crate::zx::{Generator, ZxError, ZxTerm};

/// A CP map as a `4^n_out x 4^n_in` matrix acting on `vec(rho)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOp {
    pub n_in: usize,
    pub n_out: usize,
    pub mat: CMat,
}

/// A CP map as a list of Kraus operators, each `2^n_out x 2^n_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    n_in: usize,
    n_out: usize,
    ops: Vec<CMat>,
}

impl KrausMap {
    pub fn new(ops: Vec<CMat>) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::Shape("empty Kraus list".into()))?;
        let shape = first.shape();
        if ops.iter().any(|k| k.shape() != shape) {
            return Err(Error::Shape("Kraus operators differ in shape".into()));
        }
        let n_out = qubits_of_dim(shape.0);
        let n_in = qubits_of_dim(shape.1);
        match (n_in, n_out) {
            (Some(n_in), Some(n_out)) => Ok(Self { n_in, n_out, ops }),
            _ => Err(Error::Shape(format!("Kraus operator shape {shape:?} is not qubit-sized"))),
        }
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    /// `sum_j K_j x K_j^dagger`.
    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        let mut acc = CMat::zeros(1 << self.n_out, 1 << self.n_out);
        for k in &self.ops {
            acc = acc.add(&k.matmul(x)?.matmul(&k.dagger())?)?;
        }
        Ok(acc)
    }
}

impl SuperOp {
    pub fn identity(n: usize) -> Self {
        Self { n_in: n, n_out: n, mat: CMat::identity(1 << (2 * n)) }
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &SuperOp) -> Result<SuperOp> {
        if first.n_out != self.n_in {
            return Err(Error::Shape(format!(
                "cannot compose {}->{} after {}->{}",
                self.n_in, self.n_out, first.n_in, first.n_out
            )));
        }
        Ok(SuperOp { n_in: first.n_in, n_out: self.n_out, mat: self.mat.matmul(&first.mat)? })
    }

    /// Superoperator of the parallel product, `self` on the most significant
    /// qubits. Not a plain Kronecker product: the column-stacked joint index
    /// interleaves row and column digits of both factors.
    pub fn tensor(&self, other: &SuperOp) -> SuperOp {
        let (dao, dai) = (1usize << self.n_out, 1usize << self.n_in);
        let (dbo, dbi) = (1usize << other.n_out, 1usize << other.n_in);
        let (d_out, d_in) = (dao * dbo, dai * dbi);
        let mut mat = CMat::zeros(d_out * d_out, d_in * d_in);
        for ca in 0..dao {
            for ra in 0..dao {
                let oa = ca * dao + ra;
                for cb in 0..dbo {
                    for rb in 0..dbo {
                        let ob = cb * dbo + rb;
                        let o = (ca * dbo + cb) * d_out + ra * dbo + rb;
                        for ca2 in 0..dai {
                            for ra2 in 0..dai {
                                let x = self.mat[(oa, ca2 * dai + ra2)];
                                if x == ZERO {
                                    continue;
                                }
                                for cb2 in 0..dbi {
                                    for rb2 in 0..dbi {
                                        let y = other.mat[(ob, cb2 * dbi + rb2)];
                                        let i = (ca2 * dbi + cb2) * d_in + ra2 * dbi + rb2;
                                        mat[(o, i)] += x * y;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        SuperOp { n_in: self.n_in + other.n_in, n_out: self.n_out + other.n_out, mat }
    }
}

fn hadamard() -> CMat {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    CMat::from_vec(2, 2, vec![h, h, h, -h]).unwrap()
}

fn hadamard_power(n: usize) -> CMat {
    (0..n).fold(CMat::identity(1), |acc, _| acc.kron(&hadamard()))
}

/// `|0^m⟩⟨0^n| + e^{i alpha} |1^m⟩⟨1^n|`.
pub fn z_spider(inputs: usize, outputs: usize, alpha: f64) -> CMat {
    let (rows, cols) = (1usize << outputs, 1usize << inputs);
    let mut m = CMat::zeros(rows, cols);
    m[(0, 0)] += ONE;
    m[(rows - 1, cols - 1)] += C64::from_polar(1.0, alpha);
    m
}

/// Matrix of a single generator with a bound phase.
pub fn generator_matrix(g: &Generator) -> Result<CMat> {
    Ok(match g {
        Generator::ZSpider { inputs, outputs, phase } => z_spider(*inputs, *outputs, phase.value()?),
        Generator::XSpider { inputs, outputs, phase } => hadamard_power(*outputs)
            .matmul(&z_spider(*inputs, *outputs, phase.value()?))?
            .matmul(&hadamard_power(*inputs))?,
        Generator::Hadamard => hadamard(),
        Generator::Swap => {
            let mut m = CMat::zeros(4, 4);
            for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
                m[(r, c)] = ONE;
            }
            m
        }
        Generator::Id => CMat::identity(2),
        Generator::Scalar(c) => CMat::scalar(*c),
        Generator::Discard => return Err(ZxError::DiscardInPure.into()),
    })
}

/// Pure interpretation of a discard-free term with all phases bound.
pub fn interp_pure(t: &ZxTerm) -> Result<CMat> {
    match t {
        ZxTerm::Gen(g) => generator_matrix(g),
        ZxTerm::Seq(a, b) => {
            let ma = interp_pure(a)?;
            let mb = interp_pure(b)?;
            Ok(mb.matmul(&ma)?)
        }
        ZxTerm::Par(a, b) => Ok(interp_pure(a)?.kron(&interp_pure(b)?)),
    }
}

/// `rho -> m rho m^dagger` as `conj(m) (x) m` on column-stacked vectors.
pub fn double(m: &CMat) -> Result<SuperOp> {
    let n_out = qubits_of_dim(m.rows());
    let n_in = qubits_of_dim(m.cols());
    match (n_in, n_out) {
        (Some(n_in), Some(n_out)) => Ok(SuperOp { n_in, n_out, mat: m.conj().kron(m) }),
        _ => Err(Error::Shape(format!("{:?} is not a qubit map", m.shape()))),
    }
}

/// The trace map on one qubit: row `(1, 0, 0, 1)`.
pub fn discard_superop() -> SuperOp {
    SuperOp { n_in: 1, n_out: 0, mat: CMat::from_vec(1, 4, vec![ONE, ZERO, ZERO, ONE]).unwrap() }
}

/// CP-map interpretation of a term with all phases bound.
pub fn interp_cpm(t: &ZxTerm) -> Result<SuperOp> {
    match t {
        ZxTerm::Gen(Generator::Discard) => Ok(discard_superop()),
        ZxTerm::Gen(g) => double(&generator_matrix(g)?),
        ZxTerm::Seq(a, b) => interp_cpm(b)?.compose(&interp_cpm(a)?),
        ZxTerm::Par(a, b) => Ok(interp_cpm(a)?.tensor(&interp_cpm(b)?)),
    }
}

pub fn kraus_to_superop(k: &KrausMap) -> SuperOp {
    let d_out = 1usize << (2 * k.n_out);
    let d_in = 1usize << (2 * k.n_in);
    let mut mat = CMat::zeros(d_out, d_in);
    for op in &k.ops {
        mat = mat.add(&op.conj().kron(op)).expect("uniform Kraus shapes");
    }
    SuperOp { n_in: k.n_in, n_out: k.n_out, mat }
}

/// `unvec(S vec(rho))`.
pub fn apply(s: &SuperOp, rho: &CMat) -> Result<CMat> {
    let d = 1usize << s.n_in;
    if rho.shape() != (d, d) {
        return Err(Error::Shape(format!("{:?} density for a {}-qubit input", rho.shape(), s.n_in)));
    }
    let out = s.mat.matmul(&vec(rho)?)?;
    Ok(unvec(&out, 1 << s.n_out)?)
}
