//! Acceptance suite. Each test prints one `PASS`/`FAIL` line for its
//! criterion; run with `--nocapture` to see them.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, PI};
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use hybridzx::data::Rule;
use hybridzx::demo::{build_demo_graph, demo_circuit, demo_param_names, train, DataSource, TrainConfig};
use hybridzx::hybrid::{
    bit_encoder, epsilon, eval_box, jacobian_fd, mu, mu_fold, prob0_readout, serialize_graph, GraphBuilder,
    QuantumBox, SmoothPrim, Source,
};
use hybridzx::linalg::{pauli_vector, CMat, RMat, RVec, C64};
use hybridzx::ptm::{ptm_apply, ptm_direct, ptm_direct_kraus, ptm_of_term, ptm_tensor, Ptm};
use hybridzx::random::{random_term, random_term_from, TermShape};
use hybridzx::sem::{apply, double, interp_cpm, interp_pure, KrausMap};
use hybridzx::zx::{basis_prep, cnot, identity, pauli_gadget, phase_gadget, serialize, Basis, Binding, Phase, ZxTerm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

const ANGLES: [f64; 4] = [0.0, FRAC_PI_3, FRAC_PI_2, 1.234];

fn report(criterion: u32, title: &str, ok: bool, detail: &str) {
    println!("{} criterion {criterion} ({title}): {detail}", if ok { "PASS" } else { "FAIL" });
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Difference relative to `max(1, largest entry)`.
fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let mag = a.iter().chain(b).fold(1.0f64, |m, x| m.max(x.abs()));
    max_diff(a, b) / mag
}

fn rel_cdiff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let mag = a.as_slice().iter().chain(b.as_slice()).fold(1.0f64, |m, z| m.max(z.norm()));
    a.max_abs_diff(b) / mag
}

/// Single-qubit Paulis in the order I, X, Y, Z.
fn paulis() -> [[[C64; 2]; 2]; 4] {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    [[[l, o], [o, l]], [[o, l], [l, o]], [[o, -i], [i, o]], [[l, o], [o, -l]]]
}

/// `tr(P_i U P_j U^dagger) / 2` for a 2x2 unitary written out by hand.
fn one_qubit_ptm(u: [[C64; 2]; 2]) -> RMat {
    let p = paulis();
    let mul = |a: [[C64; 2]; 2], b: [[C64; 2]; 2]| {
        let mut r = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        r
    };
    let dag = [[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]];
    RMat::from_fn(4, 4, |i, j| {
        let m = mul(mul(mul(p[i], u), p[j]), dag);
        (m[0][0] + m[1][1]).re / 2.0
    })
}

fn printed_cnot() -> RMat {
    let id = [[1.0, 0.0], [0.0, 1.0]];
    let sx = [[0.0, 1.0], [1.0, 0.0]];
    let isy = [[0.0, 1.0], [-1.0, 0.0]];
    let neg_isy = [[0.0, -1.0], [1.0, 0.0]];
    // (block row, block column, block) as printed; block row 2 is empty
    let blocks = [(0, 0, id), (1, 7, id), (3, 5, neg_isy), (4, 4, sx), (5, 3, isy), (6, 6, id), (7, 1, id)];
    let mut m = RMat::zeros(16, 16);
    for (br, bc, b) in blocks {
        for r in 0..2 {
            for cc in 0..2 {
                m[(2 * br + r, 2 * bc + cc)] = b[r][cc];
            }
        }
    }
    m
}

fn cnot_oracle() -> Ptm {
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    let u = CMat::from_rows(&[vec![l, o, o, o], vec![o, l, o, o], vec![o, o, o, l], vec![o, o, l, o]]).unwrap();
    ptm_direct_kraus(&KrausMap::new(vec![u]).unwrap()).unwrap()
}

fn state(basis: Basis, a: f64) -> ZxTerm {
    let s = match basis {
        Basis::Z => ZxTerm::z(0, 1, Phase::constant(a)),
        Basis::X => ZxTerm::x(0, 1, Phase::constant(a)),
    };
    ZxTerm::par(ZxTerm::scalar(c(FRAC_1_SQRT_2, 0.0)), s)
}

fn cnot_mismatches() -> Vec<(usize, usize, f64, f64)> {
    let ours = ptm_of_term(&cnot()).unwrap().mat;
    let printed = printed_cnot();
    let mut out = Vec::new();
    for r in 0..16 {
        for col in 0..16 {
            if (ours[(r, col)] - printed[(r, col)]).abs() > 1e-12 {
                out.push((r, col, ours[(r, col)], printed[(r, col)]));
            }
        }
    }
    out
}

#[test]
fn criterion_1_closed_form_matrices() {
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for a in ANGLES {
        let (s, co) = a.sin_cos();
        let z = ptm_of_term(&state(Basis::Z, a)).unwrap();
        worst = worst.max(max_diff(z.mat.as_slice(), &[1.0, co, s, 0.0]));
        let x = ptm_of_term(&state(Basis::X, a)).unwrap();
        worst = worst.max(max_diff(x.mat.as_slice(), &[1.0, 0.0, -s, co]));
        let rz_printed = RMat::from_rows(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, co, -s, 0.0],
            vec![0.0, s, co, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let rx_printed = RMat::from_rows(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, co, -s],
            vec![0.0, 0.0, s, co],
        ])
        .unwrap();
        let rz = ptm_of_term(&phase_gadget(Basis::Z, &[0], 1, Phase::constant(a)).unwrap()).unwrap();
        let rx = ptm_of_term(&phase_gadget(Basis::X, &[0], 1, Phase::constant(a)).unwrap()).unwrap();
        worst = worst.max(rz.mat.max_abs_diff(&rz_printed)).max(rx.mat.max_abs_diff(&rx_printed));
        // the printed matrices are those of exp(-i a/2 Z) and exp(-i a/2 X)
        let (h, g) = ((a / 2.0).cos(), (a / 2.0).sin());
        let rz_u = [[c(h, -g), c(0.0, 0.0)], [c(0.0, 0.0), c(h, g)]];
        let rx_u = [[c(h, 0.0), c(0.0, -g)], [c(0.0, -g), c(h, 0.0)]];
        worst = worst.max(one_qubit_ptm(rz_u).max_abs_diff(&rz_printed));
        worst = worst.max(one_qubit_ptm(rx_u).max_abs_diff(&rx_printed));
        checks += 6;
    }
    let h_printed = RMat::from_rows(&[
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
        vec![0.0, 0.0, -1.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
    ])
    .unwrap();
    worst = worst.max(ptm_of_term(&ZxTerm::hadamard()).unwrap().mat.max_abs_diff(&h_printed));
    let cnot_ours = ptm_of_term(&cnot()).unwrap();
    worst = worst.max(cnot_ours.mat.max_abs_diff(&cnot_oracle().mat));
    checks += 2;
    let computed_ok = worst <= 1e-12;

    let mismatches = cnot_mismatches();
    let listed: Vec<String> = mismatches
        .iter()
        .map(|(r, col, ours, printed)| format!("({r},{col}) computed {ours} printed {printed}"))
        .collect();
    report(
        1,
        "printed matrices",
        computed_ok && mismatches.is_empty(),
        &format!(
            "{checks} computed sub-checks within 1e-12 (max {worst:.1e}): {}; printed CNOT vs computed CNOT: {} mismatched entries [{}]",
            if computed_ok { "ok" } else { "FAILED" },
            mismatches.len(),
            listed.join("; ")
        ),
    );
    assert!(computed_ok, "max error {worst}");
}

/// The printed 16x16 CNOT matrix, compared verbatim. It is not the transfer
/// matrix of any unitary (block row 2 is empty), so this fails.
#[test]
#[ignore = "the printed CNOT matrix is not a valid transfer matrix; run with --ignored to see the comparison"]
fn criterion_1_cnot_verbatim() {
    let m = cnot_mismatches();
    assert!(m.is_empty(), "{} entries differ from the printed matrix: {m:?}", m.len());
}

fn corpus(seed: u64, n: usize) -> Vec<ZxTerm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| random_term(&mut rng, TermShape { max_qubits: 4, max_depth: 6, discards: i % 2 == 0 }))
        .collect()
}

#[test]
fn criterion_2_oracle_equivalence() {
    let terms = corpus(2, 100);
    let with_discards = terms.iter().filter(|t| t.has_discard()).count();
    let mut worst: f64 = 0.0;
    for t in &terms {
        assert!(t.depth() <= 6);
        let (i, o) = t.arity().unwrap();
        assert!(i <= 4 && o <= 4);
        let fast = ptm_of_term(t).unwrap();
        let slow = ptm_direct(&interp_cpm(t).unwrap()).unwrap();
        worst = worst.max(rel_diff(fast.mat.as_slice(), slow.mat.as_slice()));
    }
    let ok = worst <= 1e-9 && with_discards > 0 && with_discards < terms.len();
    report(2, "oracle equivalence", ok, &format!("100 terms ({with_discards} with discards), max error {worst:.2e}"));
    assert!(ok);
}

fn random_density(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let d = 1 << n;
    let a = CMat::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let rho = a.matmul(&a.dagger()).unwrap();
    let tr = rho.trace();
    rho.scale(tr.inv())
}

#[test]
fn criterion_3_functor_laws() {
    let terms = corpus(2, 100);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut seq_err, mut par_err, mut fuse_err) = (0.0f64, 0.0f64, 0.0f64);
    for (idx, a) in terms.iter().enumerate() {
        let (a_in, a_out) = a.arity().unwrap();
        let b = random_term_from(&mut rng, a_out, TermShape::default());
        let (pa, pb) = (ptm_of_term(a).unwrap(), ptm_of_term(&b).unwrap());
        let seq = ptm_of_term(&ZxTerm::seq(a.clone(), b.clone())).unwrap();
        seq_err = seq_err.max(rel_diff(seq.mat.as_slice(), pb.mat.matmul(&pa.mat).unwrap().as_slice()));

        // parallel partner: the next corpus term if the product stays within 4 qubits
        let width = a_in.max(a_out);
        let next = &terms[(idx + 1) % terms.len()];
        let (n_in, n_out) = next.arity().unwrap();
        let partner = if width + n_in.max(n_out) <= 4 {
            next.clone()
        } else {
            let room = 4 - width;
            random_term(&mut rng, TermShape { max_qubits: room, max_depth: 6, discards: true })
        };
        let par = ptm_of_term(&ZxTerm::par(a.clone(), partner.clone())).unwrap();
        let kron = ptm_tensor(&pa, &ptm_of_term(&partner).unwrap());
        par_err = par_err.max(rel_diff(par.mat.as_slice(), kron.mat.as_slice()));

        let v = pauli_vector(&random_density(&mut rng, a_in)).unwrap();
        let box_a = QuantumBox::new(a.clone(), vec![], vec![a_in]).unwrap();
        let box_b = QuantumBox::new(b.clone(), vec![], vec![a_out]).unwrap();
        let fused = QuantumBox::new(ZxTerm::seq(a.clone(), b.clone()), vec![], vec![a_in]).unwrap();
        let two = eval_box(&box_b, &[], &[eval_box(&box_a, &[], &[&v]).unwrap()]).unwrap();
        let one = eval_box(&fused, &[], &[&v]).unwrap();
        fuse_err = fuse_err.max(rel_diff(&two, &one));
    }
    let ok = seq_err <= 1e-10 && par_err <= 1e-10 && fuse_err <= 1e-10;
    report(
        3,
        "functor laws and box fusion",
        ok,
        &format!("100 terms: seq {seq_err:.2e}, par {par_err:.2e}, fusion {fuse_err:.2e}"),
    );
    assert!(ok);
}

fn kron_vec(a: &[f64], b: &[f64]) -> RVec {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> RVec {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn criterion_4_lax_monoidal_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut assoc, mut oracle, mut nat) = (0.0f64, 0.0f64, 0.0f64);
    let mut unit_ok = true;
    let small = TermShape { max_qubits: 2, max_depth: 6, discards: true };
    for _ in 0..50 {
        let w: Vec<usize> = (0..3).map(|_| 1 << (2 * rng.gen_range(0..=2))).collect();
        let (u, v, x) = (random_vec(&mut rng, w[0]), random_vec(&mut rng, w[1]), random_vec(&mut rng, w[2]));
        let left = mu(&mu(&u, &v).unwrap(), &x).unwrap();
        let right = mu(&u, &mu(&v, &x).unwrap()).unwrap();
        assoc = assoc.max(max_diff(&left, &right));
        oracle = oracle.max(max_diff(&left, &kron_vec(&kron_vec(&u, &v), &x)));

        unit_ok &= mu(&epsilon(), &u).unwrap() == u;
        unit_ok &= mu(&u, &epsilon()).unwrap() == u;

        let t = random_term(&mut rng, small);
        let (n_in, _) = t.arity().unwrap();
        let p = ptm_of_term(&t).unwrap();
        let y = random_vec(&mut rng, 1 << (2 * n_in));
        let n_u = rng.gen_range(0..=2);
        let z = random_vec(&mut rng, 1 << (2 * n_u));
        let id = Ptm::identity(n_u);
        let lhs = ptm_apply(&ptm_tensor(&id, &p), &mu(&z, &y).unwrap()).unwrap();
        let rhs = mu(&z, &ptm_apply(&p, &y).unwrap()).unwrap();
        nat = nat.max(rel_diff(&lhs, &rhs));
        let lhs = ptm_apply(&ptm_tensor(&p, &id), &mu(&y, &z).unwrap()).unwrap();
        let rhs = mu(&ptm_apply(&p, &y).unwrap(), &z).unwrap();
        nat = nat.max(rel_diff(&lhs, &rhs));
    }
    let ok = assoc <= 1e-12 && oracle <= 1e-12 && unit_ok && nat <= 1e-10;
    report(
        4,
        "associativity, unitality, naturality",
        ok,
        &format!(
            "50 instances each: associativity {assoc:.2e}, kron oracle {oracle:.2e}, unitality exact {unit_ok}, naturality {nat:.2e}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_5_parallel_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut sop, mut dbl, mut ptm) = (0.0f64, 0.0f64, 0.0f64);
    let mut pure_pairs = 0;
    for i in 0..50 {
        let shape = TermShape { max_qubits: 2, max_depth: 6, discards: i % 2 == 0 };
        let (d1, d2) = (random_term(&mut rng, shape), random_term(&mut rng, shape));
        let (n1, _) = d1.arity().unwrap();
        let (n2, _) = d2.arity().unwrap();
        let joint = interp_cpm(&ZxTerm::par(d1.clone(), d2.clone())).unwrap();
        let (r1, r2) = (random_density(&mut rng, n1), random_density(&mut rng, n2));
        let together = apply(&joint, &r1.kron(&r2)).unwrap();
        let apart = apply(&interp_cpm(&d1).unwrap(), &r1).unwrap().kron(&apply(&interp_cpm(&d2).unwrap(), &r2).unwrap());
        sop = sop.max(rel_cdiff(&together, &apart));
        if !d1.has_discard() && !d2.has_discard() {
            pure_pairs += 1;
            let m = interp_pure(&d1).unwrap().kron(&interp_pure(&d2).unwrap());
            dbl = dbl.max(rel_cdiff(&double(&m).unwrap().mat, &joint.mat));
        }
        let p = ptm_of_term(&ZxTerm::par(d1.clone(), d2.clone())).unwrap();
        let q = ptm_tensor(&ptm_of_term(&d1).unwrap(), &ptm_of_term(&d2).unwrap());
        ptm = ptm.max(rel_diff(p.mat.as_slice(), q.mat.as_slice()));
    }
    let ok = sop <= 1e-10 && dbl <= 1e-10 && ptm <= 1e-10;
    report(
        5,
        "semantics of parallel products",
        ok,
        &format!(
            "50 pairs: superoperator on product states {sop:.2e}, doubled kron ({pure_pairs} pure pairs) {dbl:.2e}, transfer matrix {ptm:.2e}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_6_physicality() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut builders: Vec<ZxTerm> = vec![ZxTerm::hadamard(), cnot(), identity(3)];
    for a in ANGLES {
        builders.push(phase_gadget(Basis::Z, &[0], 1, Phase::constant(a)).unwrap());
        builders.push(phase_gadget(Basis::X, &[1, 2], 3, Phase::constant(a)).unwrap());
        builders.push(pauli_gadget(&[(3, Basis::X), (0, Basis::Z), (1, Basis::X)], 4, Phase::constant(a)).unwrap());
    }
    let names = demo_param_names(3, 1);
    let binding: Binding = names.iter().map(|n| (n.clone(), rng.gen_range(-PI..PI))).collect();
    builders.push(demo_circuit(3, 1).unwrap().substitute(&binding));
    let bits: Binding = [("a".to_string(), 1.0), ("b".to_string(), 0.0)].into_iter().collect();
    builders.push(basis_prep(&["a", "b"]).unwrap().substitute(&bits));
    let mut row_err: f64 = 0.0;
    for t in &builders {
        let p = ptm_of_term(t).unwrap();
        let row = p.mat.row(0);
        row_err = row_err.max((row[0] - 1.0).abs());
        row_err = row_err.max(row[1..].iter().fold(0.0, |m, x| m.max(x.abs())));
    }

    // probabilities of both outcomes on every qubit of trace-preserving box outputs
    let (mut range_ok, mut sum_err) = (true, 0.0f64);
    let k = 3;
    let qb = QuantumBox::new(demo_circuit(k, 1).unwrap(), names.clone(), vec![k]).unwrap();
    for _ in 0..50 {
        let params: Vec<f64> = names.iter().map(|_| rng.gen_range(-PI..PI)).collect();
        let states: Vec<RVec> = (0..k).map(|_| bit_encoder(f64::from(rng.gen_range(0..=1u8)))).collect();
        let out = eval_box(&qb, &params, &[mu_fold(&states).unwrap()]).unwrap();
        for which in 0..=k {
            let p0 = ptm_apply(&prob0_readout(k + 1, which).unwrap(), &out).unwrap()[0];
            // |1><1| effect written independently: discard rows and (1, 0, 0, -1)/2
            let effect: RVec = (0..=k).fold(vec![1.0], |acc, q| {
                kron_vec(&acc, &if q == which { [0.5, 0.0, 0.0, -0.5] } else { [1.0, 0.0, 0.0, 0.0] })
            });
            let p1: f64 = effect.iter().zip(&out).map(|(a, b)| a * b).sum();
            range_ok &= (-1e-10..=1.0 + 1e-9).contains(&p0) && (-1e-10..=1.0 + 1e-9).contains(&p1);
            sum_err = sum_err.max((p0 + p1 - 1.0).abs());
        }
    }

    let qb = QuantumBox::new(identity(2), vec![], vec![2]).unwrap();
    let mut b = GraphBuilder::new(vec![16], vec![]);
    let out = b.quantum_box(qb, vec![], vec![Source::Input(0)]);
    let first = b.smooth(SmoothPrim::Proj { start: 0, end: 4 }, vec![out]);
    b.output(first);
    let rejected = b.finish().is_err();

    let ok = row_err <= 1e-10 && range_ok && sum_err <= 1e-10 && rejected;
    report(
        6,
        "physicality",
        ok,
        &format!(
            "{} unitary builders first row {row_err:.2e}; probabilities in range {range_ok}, p0 + p1 - 1 {sum_err:.2e}; split box output rejected {rejected}",
            builders.len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_7_finite_differences() {
    let term = ZxTerm::seq(phase_gadget(Basis::Z, &[0], 1, Phase::param("theta", 1.0)).unwrap(), ZxTerm::hadamard());
    let qb = QuantumBox::new(term, vec!["theta".into()], vec![1]).unwrap();
    let mut b = GraphBuilder::new(vec![], vec!["theta".into()]);
    let plus = b.constant(vec![1.0, 1.0, 0.0, 0.0]);
    let out = b.quantum_box(qb, vec![Source::Param(0)], vec![plus]);
    let p = b.smooth(SmoothPrim::Linear { matrix: prob0_readout(1, 0).unwrap().mat }, vec![out]);
    let two_p = b.smooth(SmoothPrim::Scale { c: 2.0 }, vec![p]);
    let m1 = b.constant(vec![-1.0]);
    let e = b.smooth(SmoothPrim::Add, vec![two_p, m1]);
    b.output(e);
    let g = b.finish().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let theta = rng.gen_range(-PI..PI);
        // e(theta) is the (X, X) entry cos(theta) of the R_Z matrix; its derivative is -sin(theta)
        assert!((g.eval(&[], &[theta]).unwrap()[0] - theta.cos()).abs() < 1e-12);
        let j = jacobian_fd(&g, &[], &[theta], 1e-4).unwrap();
        worst = worst.max((j[(0, 0)] + theta.sin()).abs());
    }
    let ok = worst <= 1e-6;
    report(7, "finite-difference gradient", ok, &format!("10 angles, max error {worst:.2e} at h = 1e-4"));
    assert!(ok);
}

#[test]
fn criterion_8_training() {
    let cfg = TrainConfig {
        seed: 1,
        learning_rate: 0.2,
        iterations: 500,
        fd_step: 1e-4,
        layers: 1,
        data: DataSource::Synth { k: 4, rule: Rule::SingleBit, n: 32, seed: None },
    };
    let start = Instant::now();
    let report_ = train(&cfg).unwrap();
    let elapsed = start.elapsed();
    let finite = report_.metrics.iter().all(|m| m.loss.is_finite() && m.accuracy.is_finite());
    let best = report_.metrics.iter().map(|m| m.accuracy).fold(0.0, f64::max);
    let first = report_.metrics.iter().find(|m| m.accuracy >= 0.9).map(|m| m.iter);
    let last = report_.metrics.last().unwrap();
    let ok = finite && first.is_some() && elapsed <= Duration::from_secs(180);
    report(
        8,
        "end-to-end training",
        ok,
        &format!(
            "k=4, 1 layer, 32 samples, lr 0.2, seed 1: first iteration with accuracy >= 0.9: {first:?}, best {best:.3}, final loss {:.4} accuracy {:.3}, {:.1}s",
            last.loss,
            last.accuracy,
            elapsed.as_secs_f64()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_9_cli_determinism() {
    let dir = TempDir::new().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    fs::write(p("cnot.json"), serialize(&cnot())).unwrap();
    fs::write(p("demo.json"), serialize_graph(&build_demo_graph(4, 1).unwrap())).unwrap();
    fs::write(
        p("train.json"),
        r#"{"seed": 9, "learning_rate": 0.2, "iterations": 20,
            "data": {"kind": "synth", "k": 4, "rule": "single-bit", "n": 32}}"#,
    )
    .unwrap();
    let runs: [Vec<String>; 3] = [
        vec!["ptm".into(), p("cnot.json")],
        vec!["eval".into(), p("demo.json"), "--inputs".into(), "0,1,0,0,1".into(), "--params".into(), "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8".into()],
        vec!["train".into(), "--config".into(), p("train.json")],
    ];
    let mut identical = Vec::new();
    for args in &runs {
        let run = || {
            let o = Command::new(env!("CARGO_BIN_EXE_hybridzx")).args(args).env_remove("HYBRIDZX_SEED").output().unwrap();
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            o.stdout
        };
        let (a, b) = (run(), run());
        identical.push(!a.is_empty() && a == b);
    }
    let ok = identical.iter().all(|&x| x);
    report(9, "CLI determinism", ok, &format!("ptm, eval, train byte-identical across two runs: {identical:?}"));
    assert!(ok);
}
