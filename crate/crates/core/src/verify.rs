//! The invariant suite behind the `check` command.
//!
//! Each check returns the largest deviation it saw and whether it stayed
//! within tolerance. Random instances come from a seeded generator, so a run
//! is reproducible.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, PI};
use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::demo::{demo_circuit, demo_param_names};
use crate::error::Result;
use crate::hybrid::{
    epsilon, eval_box, jacobian_fd, mu, prob0_readout, GraphBuilder, QuantumBox, SmoothPrim, Source,
};
use crate::linalg::{pauli_vector, CMat, RMat, RVec, C64, ONE, ZERO};
use crate::ptm::{ptm_apply, ptm_direct, ptm_direct_kraus, ptm_of_term, ptm_tensor, Ptm};
use crate::random::{random_term, random_term_from, TermShape};
use crate::sem::{apply, double, interp_cpm, interp_pure, KrausMap, SuperOp};
use crate::zx::{basis_prep, cnot, identity, pauli_gadget, phase_gadget, Basis, Binding, Phase, ZxTerm};

/// Angles at which the closed-form matrices are compared.
pub const CHECK_ANGLES: [f64; 4] = [0.0, FRAC_PI_3, FRAC_PI_2, 1.234];

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {:<24} max error {:.3e} (tol {:.0e})", self.name, self.max_error, self.tolerance)?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

struct Tally {
    name: &'static str,
    tolerance: f64,
    max_error: f64,
    failures: Vec<String>,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, tolerance, max_error: 0.0, failures: Vec::new() }
    }

    fn record(&mut self, what: impl FnOnce() -> String, err: f64) {
        if err.is_nan() || err > self.max_error {
            self.max_error = if err.is_nan() { f64::INFINITY } else { err };
        }
        if !(err <= self.tolerance) {
            self.failures.push(what());
        }
    }

    fn require(&mut self, what: impl FnOnce() -> String, ok: bool) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self) -> CheckOutcome {
        let detail = match self.failures.len() {
            0 => String::new(),
            n => format!("{n} failing instance(s), first: {}", self.failures[0]),
        };
        CheckOutcome {
            name: self.name,
            passed: self.failures.is_empty(),
            max_error: self.max_error,
            tolerance: self.tolerance,
            detail,
        }
    }
}

fn vec_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn mat_diff(a: &RMat, b: &RMat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.max_abs_diff(b)
}

fn magnitude(xs: &[f64]) -> f64 {
    xs.iter().fold(1.0, |m, x| m.max(x.abs()))
}

/// Largest entrywise difference divided by `max(1, largest entry)`. Random
/// unnormalized terms reach entries of size `1e4`, where an absolute bound
/// would only measure roundoff.
fn scaled_diff(a: &[f64], b: &[f64]) -> f64 {
    vec_diff(a, b) / magnitude(a).max(magnitude(b))
}

fn scaled_cdiff(a: &CMat, b: &CMat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    let mag = |m: &CMat| m.as_slice().iter().fold(1.0, |acc: f64, z| acc.max(z.norm()));
    a.max_abs_diff(b) / mag(a).max(mag(b))
}

fn scaled_mat_diff(a: &RMat, b: &RMat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    scaled_diff(a.as_slice(), b.as_slice())
}

pub fn rz_ptm(a: f64) -> RMat {
    let (s, c) = a.sin_cos();
    RMat::from_rows(&[
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, c, -s, 0.0],
        vec![0.0, s, c, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .expect("4x4")
}

pub fn rx_ptm(a: f64) -> RMat {
    let (s, c) = a.sin_cos();
    RMat::from_rows(&[
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, c, -s],
        vec![0.0, 0.0, s, c],
    ])
    .expect("4x4")
}

pub fn hadamard_ptm() -> RMat {
    RMat::from_rows(&[
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
        vec![0.0, 0.0, -1.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
    ])
    .expect("4x4")
}

/// The CNOT transfer matrix (control on the left qubit) in 2x2 blocks.
pub fn cnot_ptm() -> RMat {
    let id = [[1.0, 0.0], [0.0, 1.0]];
    let sx = [[0.0, 1.0], [1.0, 0.0]];
    let isy = [[0.0, 1.0], [-1.0, 0.0]];
    let neg_isy = [[0.0, -1.0], [1.0, 0.0]];
    let blocks: [(usize, [[f64; 2]; 2]); 8] =
        [(0, id), (7, id), (2, sx), (5, isy), (4, sx), (3, neg_isy), (6, id), (1, id)];
    let mut m = RMat::zeros(16, 16);
    for (br, (bc, b)) in blocks.iter().enumerate() {
        for r in 0..2 {
            for c in 0..2 {
                m[(2 * br + r, 2 * bc + c)] = b[r][c];
            }
        }
    }
    m
}

fn normalized_state(basis: Basis, a: f64) -> ZxTerm {
    let spider = match basis {
        Basis::Z => ZxTerm::z(0, 1, Phase::constant(a)),
        Basis::X => ZxTerm::x(0, 1, Phase::constant(a)),
    };
    ZxTerm::par(ZxTerm::scalar(C64::new(FRAC_1_SQRT_2, 0.0)), spider)
}

fn matrices() -> Result<CheckOutcome> {
    let mut t = Tally::new("closed-form matrices", 1e-12);
    for a in CHECK_ANGLES {
        let z = ptm_of_term(&normalized_state(Basis::Z, a))?;
        t.record(|| format!("Z state at {a}"), vec_diff(z.mat.as_slice(), &[1.0, a.cos(), a.sin(), 0.0]));
        let x = ptm_of_term(&normalized_state(Basis::X, a))?;
        t.record(|| format!("X state at {a}"), vec_diff(x.mat.as_slice(), &[1.0, 0.0, -a.sin(), a.cos()]));
        let rz = ptm_of_term(&phase_gadget(Basis::Z, &[0], 1, Phase::constant(a))?)?;
        t.record(|| format!("R_Z at {a}"), mat_diff(&rz.mat, &rz_ptm(a)));
        let rx = ptm_of_term(&phase_gadget(Basis::X, &[0], 1, Phase::constant(a))?)?;
        t.record(|| format!("R_X at {a}"), mat_diff(&rx.mat, &rx_ptm(a)));
    }
    let h = ptm_of_term(&ZxTerm::hadamard())?;
    t.record(|| "Hadamard".into(), mat_diff(&h.mat, &hadamard_ptm()));
    let c = ptm_of_term(&cnot())?;
    t.record(|| "CNOT".into(), mat_diff(&c.mat, &cnot_ptm()));
    let u = CMat::from_rows(&[
        vec![ONE, ZERO, ZERO, ZERO],
        vec![ZERO, ONE, ZERO, ZERO],
        vec![ZERO, ZERO, ZERO, ONE],
        vec![ZERO, ZERO, ONE, ZERO],
    ])?;
    let oracle = ptm_direct_kraus(&KrausMap::new(vec![u])?)?;
    t.record(|| "CNOT vs permutation-matrix oracle".into(), mat_diff(&c.mat, &oracle.mat));
    Ok(t.finish())
}

fn oracle_equivalence(rng: &mut ChaCha8Rng, count: usize) -> Result<CheckOutcome> {
    let mut t = Tally::new("oracle equivalence", 1e-9);
    for i in 0..count {
        let shape = TermShape { discards: i % 2 == 0, ..TermShape::default() };
        let term = random_term(rng, shape);
        let fast = ptm_of_term(&term)?;
        let slow = ptm_direct(&interp_cpm(&term)?)?;
        t.record(|| format!("term {term}"), scaled_mat_diff(&fast.mat, &slow.mat));
    }
    Ok(t.finish())
}

const SMALL: TermShape = TermShape { max_qubits: 2, max_depth: 6, discards: true };

fn functor_laws(rng: &mut ChaCha8Rng, count: usize) -> Result<CheckOutcome> {
    let mut t = Tally::new("functor laws", 1e-10);
    for _ in 0..count {
        let a = random_term(rng, TermShape::default());
        let (a_in, a_out) = a.arity()?;
        let b = random_term_from(rng, a_out, TermShape::default());
        let (pa, pb) = (ptm_of_term(&a)?, ptm_of_term(&b)?);
        let seq = ptm_of_term(&ZxTerm::seq(a.clone(), b.clone()))?;
        t.record(|| format!("seq {a} ; {b}"), scaled_mat_diff(&seq.mat, &pb.mat.matmul(&pa.mat)?));

        // box fusion on a random input state
        let v = random_state(rng, a_in);
        let box_a = QuantumBox::new(a.clone(), vec![], vec![a_in])?;
        let box_b = QuantumBox::new(b.clone(), vec![], vec![a_out])?;
        let fused = QuantumBox::new(ZxTerm::seq(a.clone(), b.clone()), vec![], vec![a_in])?;
        let two = eval_box(&box_b, &[], &[eval_box(&box_a, &[], &[&v])?])?;
        let one = eval_box(&fused, &[], &[&v])?;
        t.record(|| format!("fusion {a} ; {b}"), scaled_diff(&two, &one));

        let c = random_term(rng, SMALL);
        let d = random_term(rng, SMALL);
        let par = ptm_of_term(&ZxTerm::par(c.clone(), d.clone()))?;
        let kron = ptm_tensor(&ptm_of_term(&c)?, &ptm_of_term(&d)?);
        t.record(|| format!("par {c} | {d}"), scaled_mat_diff(&par.mat, &kron.mat));
    }
    Ok(t.finish())
}

fn random_vector(rng: &mut ChaCha8Rng, len: usize) -> RVec {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn random_density(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let d = 1 << n;
    let a = CMat::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let rho = a.matmul(&a.dagger()).expect("square");
    let tr = rho.trace();
    rho.scale(tr.inv())
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> RVec {
    pauli_vector(&random_density(rng, n)).expect("power-of-two dimension")
}

fn lax_monoidal(rng: &mut ChaCha8Rng, count: usize) -> Result<Vec<CheckOutcome>> {
    let mut assoc = Tally::new("mu associativity", 1e-12);
    let mut unit = Tally::new("mu unitality", 0.0);
    let mut natural = Tally::new("mu naturality", 1e-10);
    for _ in 0..count {
        let widths: Vec<usize> = (0..3).map(|_| 1 << (2 * rng.gen_range(0..=2))).collect();
        let (u, v, w) =
            (random_vector(rng, widths[0]), random_vector(rng, widths[1]), random_vector(rng, widths[2]));
        let left = mu(&mu(&u, &v)?, &w)?;
        let right = mu(&u, &mu(&v, &w)?)?;
        assoc.record(|| format!("widths {widths:?}"), vec_diff(&left, &right));

        unit.require(|| format!("left unit, width {}", u.len()), mu(&epsilon(), &u)? == u);
        unit.require(|| format!("right unit, width {}", u.len()), mu(&u, &epsilon())? == u);

        let term = random_term(rng, SMALL);
        let (n_in, _) = term.arity()?;
        let p = ptm_of_term(&term)?;
        let x = random_vector(rng, 1 << (2 * n_in));
        let n_u = rng.gen_range(0..=2);
        let u = random_vector(rng, 1 << (2 * n_u));
        let id = Ptm::identity(n_u);
        let lhs = ptm_apply(&ptm_tensor(&id, &p), &mu(&u, &x)?)?;
        let rhs = mu(&u, &ptm_apply(&p, &x)?)?;
        natural.record(|| format!("I (x) {term}"), scaled_diff(&lhs, &rhs));
        let lhs = ptm_apply(&ptm_tensor(&p, &id), &mu(&x, &u)?)?;
        let rhs = mu(&ptm_apply(&p, &x)?, &u)?;
        natural.record(|| format!("{term} (x) I"), scaled_diff(&lhs, &rhs));
    }
    Ok(vec![assoc.finish(), unit.finish(), natural.finish()])
}

fn kron_density(a: &CMat, b: &CMat) -> CMat {
    a.kron(b)
}

fn monoidal_semantics(rng: &mut ChaCha8Rng, count: usize) -> Result<CheckOutcome> {
    let mut t = Tally::new("parallel semantics", 1e-10);
    for i in 0..count {
        let shape = TermShape { discards: i % 2 == 0, ..SMALL };
        let (d1, d2) = (random_term(rng, shape), random_term(rng, shape));
        let (n1, _) = d1.arity()?;
        let (n2, _) = d2.arity()?;
        let joint = interp_cpm(&ZxTerm::par(d1.clone(), d2.clone()))?;
        let (s1, s2) = (interp_cpm(&d1)?, interp_cpm(&d2)?);
        let (r1, r2) = (random_density(rng, n1), random_density(rng, n2));
        let together = apply(&joint, &kron_density(&r1, &r2))?;
        let apart = kron_density(&apply(&s1, &r1)?, &apply(&s2, &r2)?);
        t.record(|| format!("superoperator {d1} | {d2}"), scaled_cdiff(&together, &apart));
        if !d1.has_discard() && !d2.has_discard() {
            let doubled = double(&interp_pure(&ZxTerm::par(d1.clone(), d2.clone()))?)?;
            t.record(|| format!("doubling {d1} | {d2}"), scaled_cdiff(&doubled.mat, &joint.mat));
        }
        let p = crate::ptm::ptm_of_superop(&joint)?;
        let q = ptm_tensor(&crate::ptm::ptm_of_superop(&s1)?, &crate::ptm::ptm_of_superop(&s2)?);
        t.record(|| format!("transfer matrix {d1} | {d2}"), scaled_mat_diff(&p.mat, &q.mat));
    }
    Ok(t.finish())
}

/// Unitary builders whose transfer matrices must start with row `(1, 0, ..., 0)`.
fn unitary_builders(rng: &mut ChaCha8Rng) -> Result<Vec<(String, ZxTerm)>> {
    let mut out = vec![("hadamard".to_string(), ZxTerm::hadamard()), ("cnot".to_string(), cnot())];
    for n in 1..=3 {
        out.push((format!("identity({n})"), identity(n)));
    }
    for _ in 0..6 {
        let n = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=n);
        let mut qubits: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            qubits.swap(i, rng.gen_range(0..=i));
        }
        let legs: Vec<(usize, Basis)> = qubits[..k]
            .iter()
            .map(|&q| (q, if rng.gen_bool(0.5) { Basis::Z } else { Basis::X }))
            .collect();
        let a = rng.gen_range(-PI..PI);
        out.push((format!("gadget {legs:?} on {n} at {a:.3}"), pauli_gadget(&legs, n, Phase::constant(a))?));
    }
    let names = demo_param_names(3, 1);
    let binding: Binding = names.iter().map(|n| (n.clone(), rng.gen_range(-PI..PI))).collect();
    out.push(("demo circuit".into(), demo_circuit(3, 1)?.substitute(&binding)));
    let bits = basis_prep(&["b0", "b1"])?;
    let binding: Binding = [("b0".to_string(), 1.0), ("b1".to_string(), 0.0)].into_iter().collect();
    out.push(("basis preparation".into(), bits.substitute(&binding)));
    Ok(out)
}

fn first_row_error(p: &Ptm) -> f64 {
    p.mat.row(0).iter().enumerate().map(|(j, &x)| (x - if j == 0 { 1.0 } else { 0.0 }).abs()).fold(0.0, f64::max)
}

fn choi(s: &SuperOp) -> Result<CMat> {
    let (di, dout) = (1usize << s.n_in, 1usize << s.n_out);
    let mut c = CMat::zeros(di * dout, di * dout);
    for i in 0..di {
        for j in 0..di {
            let mut e = CMat::zeros(di, di);
            e[(i, j)] = ONE;
            let img = apply(s, &e)?;
            for r in 0..dout {
                for k in 0..dout {
                    c[(i * dout + r, j * dout + k)] = img[(r, k)];
                }
            }
        }
    }
    Ok(c)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &CMat) -> f64 {
    let m = DMatrix::from_fn(h.rows(), h.cols(), |r, c| h[(r, c)]);
    m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

fn physicality(rng: &mut ChaCha8Rng, count: usize) -> Result<Vec<CheckOutcome>> {
    let mut tp = Tally::new("trace preservation", 1e-10);
    for (name, term) in unitary_builders(rng)? {
        tp.record(|| name.clone(), first_row_error(&ptm_of_term(&term)?));
    }

    let mut cp = Tally::new("complete positivity", 1e-9);
    for _ in 0..count {
        let term = random_term(rng, SMALL);
        let c = choi(&interp_cpm(&term)?)?;
        let scale = c.as_slice().iter().map(|z| z.norm()).fold(1.0, f64::max);
        cp.record(|| format!("Choi matrix of {term}"), (-min_eigenvalue(&c) / scale).max(0.0));
    }

    let mut probs = Tally::new("probabilities", 1e-10);
    let k = 3;
    let names = demo_param_names(k, 1);
    for _ in 0..count {
        let params: Vec<f64> = names.iter().map(|_| rng.gen_range(-PI..PI)).collect();
        let qb = QuantumBox::new(demo_circuit(k, 1)?, names.clone(), vec![k])?;
        let bits: Vec<f64> = (0..k).map(|_| f64::from(rng.gen_range(0..=1u8))).collect();
        let states: Vec<RVec> = bits.iter().map(|&b| crate::hybrid::bit_encoder(b)).collect();
        let merged = crate::hybrid::mu_fold(&states)?;
        let out = eval_box(&qb, &params, &[merged])?;
        for which in 0..=k {
            let p0 = ptm_apply(&prob0_readout(k + 1, which)?, &out)?[0];
            let p1 = ptm_apply(&prob1_readout(k + 1, which), &out)?[0];
            probs.require(|| format!("p0 = {p0} outside [0, 1]"), (-1e-10..=1.0 + 1e-9).contains(&p0));
            probs.require(|| format!("p1 = {p1} outside [0, 1]"), (-1e-10..=1.0 + 1e-9).contains(&p1));
            probs.record(|| format!("p0 + p1 = {}", p0 + p1), (p0 + p1 - 1.0).abs());
        }
    }

    let mut wire = Tally::new("one wire out", 0.0);
    let qb = QuantumBox::new(identity(2), vec![], vec![2])?;
    let mut b = GraphBuilder::new(vec![16], vec![]);
    let out = b.quantum_box(qb, vec![], vec![Source::Input(0)]);
    let q0 = b.smooth(SmoothPrim::Proj { start: 0, end: 4 }, vec![out]);
    b.output(q0);
    wire.require(|| "splitting a box output was accepted".into(), b.finish().is_err());

    Ok(vec![tp.finish(), cp.finish(), probs.finish(), wire.finish()])
}

fn prob1_readout(m: usize, which: usize) -> Ptm {
    let row = (0..m).fold(RMat::identity(1), |acc, q| {
        let f = if q == which { vec![0.5, 0.0, 0.0, -0.5] } else { vec![1.0, 0.0, 0.0, 0.0] };
        acc.kron(&RMat::row_vector(f))
    });
    Ptm { n_in: m, n_out: 0, mat: row }
}

/// `<X>` after `R_Z(theta)` on `|+⟩`, as a one-parameter graph: `cos(theta)`.
pub fn rz_expectation_graph() -> Result<crate::hybrid::HybridGraph> {
    let term = ZxTerm::seq(phase_gadget(Basis::Z, &[0], 1, Phase::param("theta", 1.0))?, ZxTerm::hadamard());
    let qb = QuantumBox::new(term, vec!["theta".into()], vec![1])?;
    let mut b = GraphBuilder::new(vec![], vec!["theta".into()]);
    let plus = b.constant(vec![1.0, 1.0, 0.0, 0.0]);
    let out = b.quantum_box(qb, vec![Source::Param(0)], vec![plus]);
    let p = b.smooth(SmoothPrim::Linear { matrix: prob0_readout(1, 0)?.mat }, vec![out]);
    let two_p = b.smooth(SmoothPrim::Scale { c: 2.0 }, vec![p]);
    let minus_one = b.constant(vec![-1.0]);
    let e = b.smooth(SmoothPrim::Add, vec![two_p, minus_one]);
    b.output(e);
    b.finish()
}

fn gradient(rng: &mut ChaCha8Rng, count: usize) -> Result<CheckOutcome> {
    let mut t = Tally::new("finite differences", 1e-6);
    let g = rz_expectation_graph()?;
    for _ in 0..count {
        let theta = rng.gen_range(-PI..PI);
        let j = jacobian_fd(&g, &[], &[theta], 1e-4)?;
        // d/dtheta of the (X, X) entry cos(theta) of the R_Z transfer matrix
        t.record(|| format!("theta = {theta}"), (j[(0, 0)] + theta.sin()).abs());
    }
    Ok(t.finish())
}

/// Runs every check with instance counts scaled by `count` (at least 1).
pub fn run_checks(seed: u64, count: usize) -> Result<Vec<CheckOutcome>> {
    let count = count.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![matrices()?];
    out.push(oracle_equivalence(&mut rng, 2 * count)?);
    out.push(functor_laws(&mut rng, 2 * count)?);
    out.extend(lax_monoidal(&mut rng, count)?);
    out.push(monoidal_semantics(&mut rng, count)?);
    out.extend(physicality(&mut rng, count)?);
    out.push(gradient(&mut rng, (count / 5).max(1))?);
    Ok(out)
}
