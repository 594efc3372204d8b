//! Pauli transfer matrices: the real matrix of a CP map in the ordered
//! tensor-product Pauli basis, normalized so that
//! `M_ij = 2^-n_in tr(P_i^dagger Phi(P_j))`.
//!
//! With this normalization trace-one states have Pauli vectors
//! `(tr(P_i rho))_i` starting with 1, composition of maps is matrix product
//! and the parallel product is the Kronecker product.

use crate::error::{Error, Result};
use crate::linalg::{pauli_op, vec, CMat, PauliIndex, RMat, RVec, C64, ZERO};
use crate::sem::{apply, interp_cpm, KrausMap, SuperOp};
use crate::sim::Circuit;
use crate::zx::ZxTerm;

/// Imaginary parts above this mean the input was not Hermiticity-preserving.
pub const IMAG_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Ptm {
    pub n_in: usize,
    pub n_out: usize,
    pub mat: RMat,
}

impl Ptm {
    pub fn new(n_in: usize, n_out: usize, mat: RMat) -> Result<Self> {
        if mat.shape() != (1 << (2 * n_out), 1 << (2 * n_in)) {
            return Err(Error::Shape(format!("{:?} transfer matrix for {n_in}->{n_out} qubits", mat.shape())));
        }
        Ok(Self { n_in, n_out, mat })
    }

    pub fn identity(n: usize) -> Self {
        Self { n_in: n, n_out: n, mat: RMat::identity(1 << (2 * n)) }
    }

    /// Row-major CSV with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.mat.rows() {
            let line: Vec<String> = self.mat.row(r).iter().map(|&x| format_decimal(x)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest decimal that round-trips to the same `f64` (at most 17
/// significant digits); `-0` prints as `0`.
pub fn format_decimal(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    format!("{x}")
}

fn truncate(m: &CMat) -> Result<RMat> {
    let residue = m.max_imag();
    if residue > IMAG_TOLERANCE {
        return Err(Error::ImaginaryResidue(residue));
    }
    Ok(m.real_part())
}

/// `tr(a b)` without forming the product.
fn trace_of_product(a: &CMat, b: &CMat) -> C64 {
    let d = a.rows();
    let mut acc = ZERO;
    for r in 0..d {
        for c in 0..a.cols() {
            acc += a[(r, c)] * b[(c, r)];
        }
    }
    acc
}

fn direct(n_in: usize, n_out: usize, phi: impl Fn(&CMat) -> Result<CMat>) -> Result<Ptm> {
    let (dim_out, dim_in) = (1usize << (2 * n_out), 1usize << (2 * n_in));
    let norm = 1.0 / (1u64 << n_in) as f64;
    let out_paulis: Vec<CMat> = (0..dim_out)
        .map(|i| pauli_op(PauliIndex::new(n_out, i).unwrap()).dagger())
        .collect();
    let mut m = CMat::zeros(dim_out, dim_in);
    for j in 0..dim_in {
        let image = phi(&pauli_op(PauliIndex::new(n_in, j).unwrap()))?;
        for (i, p) in out_paulis.iter().enumerate() {
            m[(i, j)] = trace_of_product(p, &image) * norm;
        }
    }
    Ptm::new(n_in, n_out, truncate(&m)?)
}

/// Entrywise transfer matrix of a superoperator.
pub fn ptm_direct(s: &SuperOp) -> Result<Ptm> {
    direct(s.n_in, s.n_out, |p| apply(s, p))
}

/// Entrywise transfer matrix of a Kraus decomposition.
pub fn ptm_direct_kraus(k: &KrausMap) -> Result<Ptm> {
    direct(k.n_in(), k.n_out(), |p| k.apply(p))
}

/// `Q_n`: column `j` is `vec(P_j)`.
fn pauli_frame(n: usize) -> CMat {
    let dim = 1usize << (2 * n);
    let mut q = CMat::zeros(dim, dim);
    for j in 0..dim {
        let v = vec(&pauli_op(PauliIndex::new(n, j).unwrap())).unwrap();
        for (r, &x) in v.as_slice().iter().enumerate() {
            q[(r, j)] = x;
        }
    }
    q
}

/// Change of basis of a superoperator: `2^-n_in Q_m^dagger S Q_n`.
pub fn ptm_of_superop(s: &SuperOp) -> Result<Ptm> {
    let qm = pauli_frame(s.n_out);
    let qn = pauli_frame(s.n_in);
    let norm = C64::new(1.0 / (1u64 << s.n_in) as f64, 0.0);
    let m = qm.dagger().matmul(&s.mat)?.matmul(&qn)?.scale(norm);
    Ptm::new(s.n_in, s.n_out, truncate(&m)?)
}

/// Transfer matrix of a bound term via its superoperator. Only suitable
/// when every internal interface is small; see [`ptm_of_term`].
pub fn ptm_of_term_reference(t: &ZxTerm) -> Result<Ptm> {
    ptm_of_superop(&interp_cpm(t)?)
}

/// Transfer matrix of a bound term. Each Pauli operator is pushed through
/// the compiled term one generator at a time, so the cost depends on the
/// widest interface of the term rather than on a product of all its wires.
pub fn ptm_of_term(t: &ZxTerm) -> Result<Ptm> {
    let c = Circuit::compile(t)?;
    if c.is_pure() {
        let u = c.matrix()?;
        let u_dag = u.dagger();
        direct(c.n_in(), c.n_out(), |p| Ok(u.matmul(p)?.matmul(&u_dag)?))
    } else {
        direct(c.n_in(), c.n_out(), |p| c.apply_density(p))
    }
}

pub fn ptm_apply(p: &Ptm, v: &[f64]) -> Result<RVec> {
    if v.len() != p.mat.cols() {
        return Err(Error::Shape(format!("vector of length {} into {:?}", v.len(), p.mat.shape())));
    }
    Ok(p.mat.matvec(v)?)
}

/// `a` after `b`.
pub fn ptm_compose(a: &Ptm, b: &Ptm) -> Result<Ptm> {
    if a.n_in != b.n_out {
        return Err(Error::Shape(format!(
            "cannot compose {}->{} after {}->{}",
            a.n_in, a.n_out, b.n_in, b.n_out
        )));
    }
    Ok(Ptm { n_in: b.n_in, n_out: a.n_out, mat: a.mat.matmul(&b.mat)? })
}

pub fn ptm_tensor(a: &Ptm, b: &Ptm) -> Ptm {
    Ptm { n_in: a.n_in + b.n_in, n_out: a.n_out + b.n_out, mat: a.mat.kron(&b.mat) }
}
