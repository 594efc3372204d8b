//! Dense complex and real matrices, Kronecker products, column-stacking
//! vectorization and the ordered n-qubit Pauli basis.
//!
//! Conventions used throughout the crate:
//! - the leftmost tensor factor is the most significant index (qubit 0 is the
//!   high bit of a computational basis index);
//! - `vec` stacks columns, so entry `(r, c)` of a `d x d` matrix lands at
//!   position `c * d + r`;
//! - Pauli index digits are base 4 with `0=I, 1=X, 2=Y, 3=Z`, leftmost qubit
//!   most significant.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Real vectors are plain `Vec<f64>`; as matrices they are single columns.
pub type RVec = Vec<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("pauli index {idx} out of range for {n} qubits")]
    PauliIndex { n: usize, idx: usize },
}

macro_rules! dense_matrix {
    ($name:ident, $elem:ty, $zero:expr, $one:expr) => {
        #[derive(Clone, PartialEq)]
        pub struct $name {
            rows: usize,
            cols: usize,
            data: Vec<$elem>,
        }

        impl $name {
            pub fn zeros(rows: usize, cols: usize) -> Self {
                assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
                Self { rows, cols, data: vec![$zero; rows * cols] }
            }

            pub fn identity(dim: usize) -> Self {
                let mut m = Self::zeros(dim, dim);
                for i in 0..dim {
                    m.data[i * dim + i] = $one;
                }
                m
            }

            /// Builds a matrix from row-major entries.
            pub fn from_vec(rows: usize, cols: usize, data: Vec<$elem>) -> Result<Self, LinalgError> {
                if rows == 0 || cols == 0 || data.len() != rows * cols {
                    return Err(LinalgError::Dimension(format!(
                        "{} entries for a {rows}x{cols} matrix",
                        data.len()
                    )));
                }
                Ok(Self { rows, cols, data })
            }

            pub fn from_rows(rows: &[Vec<$elem>]) -> Result<Self, LinalgError> {
                let ncols = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|r| r.len() != ncols) {
                    return Err(LinalgError::Dimension("ragged rows".into()));
                }
                Self::from_vec(rows.len(), ncols, rows.concat())
            }

            pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> $elem) -> Self {
                let mut data = Vec::with_capacity(rows * cols);
                for r in 0..rows {
                    for c in 0..cols {
                        data.push(f(r, c));
                    }
                }
                Self { rows, cols, data }
            }

            pub fn column(data: Vec<$elem>) -> Self {
                let n = data.len();
                Self { rows: n, cols: 1, data }
            }

            pub fn rows(&self) -> usize {
                self.rows
            }

            pub fn cols(&self) -> usize {
                self.cols
            }

            pub fn shape(&self) -> (usize, usize) {
                (self.rows, self.cols)
            }

            pub fn is_square(&self) -> bool {
                self.rows == self.cols
            }

            /// Row-major entries.
            pub fn as_slice(&self) -> &[$elem] {
                &self.data
            }

            pub fn as_mut_slice(&mut self) -> &mut [$elem] {
                &mut self.data
            }

            pub fn into_vec(self) -> Vec<$elem> {
                self.data
            }

            pub fn row(&self, r: usize) -> &[$elem] {
                &self.data[r * self.cols..(r + 1) * self.cols]
            }

            pub fn transpose(&self) -> Self {
                Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
            }

            pub fn scale(&self, s: $elem) -> Self {
                Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
            }

            pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
                if self.shape() != other.shape() {
                    return Err(LinalgError::Dimension(format!(
                        "cannot add {:?} and {:?}",
                        self.shape(),
                        other.shape()
                    )));
                }
                let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
                Ok(Self { rows: self.rows, cols: self.cols, data })
            }

            /// Matrix product `self * other`.
            pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
                if self.cols != other.rows {
                    return Err(LinalgError::Dimension(format!(
                        "cannot multiply {:?} by {:?}",
                        self.shape(),
                        other.shape()
                    )));
                }
                let mut out = Self::zeros(self.rows, other.cols);
                for i in 0..self.rows {
                    let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                    for k in 0..self.cols {
                        let a = self.data[i * self.cols + k];
                        if a == $zero {
                            continue;
                        }
                        let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                        for (o, &b) in out_row.iter_mut().zip(b_row) {
                            *o += a * b;
                        }
                    }
                }
                Ok(out)
            }

            /// Matrix-vector product.
            pub fn matvec(&self, v: &[$elem]) -> Result<Vec<$elem>, LinalgError> {
                if v.len() != self.cols {
                    return Err(LinalgError::Dimension(format!(
                        "vector of length {} against {:?}",
                        v.len(),
                        self.shape()
                    )));
                }
                Ok((0..self.rows)
                    .map(|r| self.row(r).iter().zip(v).fold($zero, |acc, (&a, &b)| acc + a * b))
                    .collect())
            }

            pub fn kron(&self, other: &Self) -> Self {
                let (rows, cols, data) =
                    kron_generic(self.rows, self.cols, &self.data, other.rows, other.cols, &other.data);
                Self { rows, cols, data }
            }

            pub fn trace(&self) -> $elem {
                (0..self.rows.min(self.cols)).fold($zero, |acc, i| acc + self[(i, i)])
            }
        }

        impl Index<(usize, usize)> for $name {
            type Output = $elem;
            fn index(&self, (r, c): (usize, usize)) -> &$elem {
                &self.data[r * self.cols + c]
            }
        }

        impl IndexMut<(usize, usize)> for $name {
            fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut $elem {
                &mut self.data[r * self.cols + c]
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                writeln!(f, "{}x{} {}", self.rows, self.cols, stringify!($name))?;
                for r in 0..self.rows {
                    writeln!(f, "  {:?}", self.row(r))?;
                }
                Ok(())
            }
        }
    };
}

fn kron_generic<T: Copy + std::ops::Mul<Output = T>>(
    ar: usize,
    ac: usize,
    a: &[T],
    br: usize,
    bc: usize,
    b: &[T],
) -> (usize, usize, Vec<T>) {
    let rows = ar * br;
    let cols = ac * bc;
    let mut data = Vec::with_capacity(rows * cols);
    for i in 0..ar {
        for k in 0..br {
            for j in 0..ac {
                let x = a[i * ac + j];
                data.extend(b[k * bc..(k + 1) * bc].iter().map(|&y| x * y));
            }
        }
    }
    (rows, cols, data)
}

dense_matrix!(CMat, C64, ZERO, ONE);
dense_matrix!(RMat, f64, 0.0, 1.0);

impl CMat {
    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn from_real(m: &RMat) -> Self {
        Self { rows: m.rows, cols: m.cols, data: m.data.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn scalar(c: C64) -> Self {
        Self { rows: 1, cols: 1, data: vec![c] }
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    /// Largest absolute entrywise difference, `inf` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest absolute imaginary part.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn real_part(&self) -> RMat {
        RMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.re).collect() }
    }

    /// Equality up to a nonzero global scalar: finds the scalar from the largest
    /// entry of `other` and compares `self` against `scalar * other`.
    pub fn approx_eq_up_to_scalar(&self, other: &Self, tol: f64) -> bool {
        if self.shape() != other.shape() {
            return false;
        }
        let Some((k, pivot)) =
            other.data.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        else {
            return false;
        };
        if pivot.norm() < tol {
            return self.data.iter().all(|z| z.norm() < tol);
        }
        let s = self.data[k] / pivot;
        if s.norm() < tol {
            return false;
        }
        self.max_abs_diff(&other.scale(s)) < tol
    }
}

impl RMat {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn row_vector(data: Vec<f64>) -> Self {
        let n = data.len();
        Self { rows: 1, cols: n, data }
    }
}

/// Column-stacking vectorization of a square matrix, returned as a column.
pub fn vec(rho: &CMat) -> Result<CMat, LinalgError> {
    if !rho.is_square() {
        return Err(LinalgError::Dimension(format!("vec of non-square {:?}", rho.shape())));
    }
    let d = rho.rows();
    let mut out = Vec::with_capacity(d * d);
    for c in 0..d {
        for r in 0..d {
            out.push(rho[(r, c)]);
        }
    }
    Ok(CMat::column(out))
}

/// Inverse of [`vec`]: reshapes a `dim^2` column back into a `dim x dim` matrix.
pub fn unvec(v: &CMat, dim: usize) -> Result<CMat, LinalgError> {
    let entries = v.as_slice();
    if v.cols() != 1 || entries.len() != dim * dim {
        return Err(LinalgError::Dimension(format!(
            "cannot unvec {:?} into {dim}x{dim}",
            v.shape()
        )));
    }
    Ok(CMat::from_fn(dim, dim, |r, c| entries[c * dim + r]))
}

/// `log2(d)` when `d` is a power of two.
pub fn qubits_of_dim(d: usize) -> Option<usize> {
    d.is_power_of_two().then(|| d.trailing_zeros() as usize)
}

/// `log4(d)` when `d` is a power of four.
pub fn qubits_of_pauli_dim(d: usize) -> Option<usize> {
    qubits_of_dim(d).filter(|b| b % 2 == 0).map(|b| b / 2)
}

/// Single-qubit Pauli matrices in the order `I, X, Y, Z`, as row-major 2x2 arrays.
pub const PAULI_1Q: [[C64; 4]; 4] = [
    [ONE, ZERO, ZERO, ONE],
    [ZERO, ONE, ONE, ZERO],
    [ZERO, C64::new(0.0, -1.0), I, ZERO],
    [ONE, ZERO, ZERO, C64::new(-1.0, 0.0)],
];

/// Position of an n-qubit Pauli operator in the fixed ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliIndex {
    n: usize,
    idx: usize,
}

impl PauliIndex {
    pub fn new(n: usize, idx: usize) -> Result<Self, LinalgError> {
        if idx >= 1usize << (2 * n) {
            return Err(LinalgError::PauliIndex { n, idx });
        }
        Ok(Self { n, idx })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn index(&self) -> usize {
        self.idx
    }

    /// Base-4 digits, leftmost qubit first.
    pub fn digits(&self) -> Vec<usize> {
        (0..self.n).map(|q| (self.idx >> (2 * (self.n - 1 - q))) & 3).collect()
    }

    pub fn label(&self) -> String {
        if self.n == 0 {
            return "1".into();
        }
        self.digits().iter().map(|&d| ['I', 'X', 'Y', 'Z'][d]).collect()
    }
}

/// The `2^n x 2^n` tensor-product Pauli matrix at `p`.
pub fn pauli_op(p: PauliIndex) -> CMat {
    p.digits().into_iter().fold(CMat::identity(1), |acc, d| {
        acc.kron(&CMat::from_vec(2, 2, PAULI_1Q[d].to_vec()).unwrap())
    })
}

/// Applies a 4x4 map to every per-qubit axis of a length `4^n` tensor.
fn transform_axes(data: &mut [C64], n: usize, w: &[[C64; 4]; 4]) {
    for q in 0..n {
        let stride = 1usize << (2 * (n - 1 - q));
        let block = stride * 4;
        for base in (0..data.len()).step_by(block) {
            for off in 0..stride {
                let i0 = base + off;
                let x = [data[i0], data[i0 + stride], data[i0 + 2 * stride], data[i0 + 3 * stride]];
                for (a, row) in w.iter().enumerate() {
                    data[i0 + a * stride] = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
                }
            }
        }
    }
}

/// Index into the interleaved (row bit, column bit) tensor for entry `(r, c)`.
fn interleave(r: usize, c: usize, n: usize) -> usize {
    let mut out = 0;
    for q in 0..n {
        let shift = n - 1 - q;
        let pair = (((r >> shift) & 1) << 1) | ((c >> shift) & 1);
        out = (out << 2) | pair;
    }
    out
}

/// Coefficients `tr(P_i * m)` for every n-qubit Pauli `P_i`, where `m` is
/// `2^n x 2^n`. Computed axis by axis in `O(n 4^n)`.
pub fn pauli_coefficients(m: &CMat) -> Result<Vec<C64>, LinalgError> {
    let n = qubits_of_dim(m.rows())
        .filter(|_| m.is_square())
        .ok_or_else(|| LinalgError::Dimension(format!("not an n-qubit operator: {:?}", m.shape())))?;
    let d = m.rows();
    let mut t = vec![ZERO; d * d];
    for r in 0..d {
        for c in 0..d {
            t[interleave(r, c, n)] = m[(r, c)];
        }
    }
    // tr(P m) = sum_{r,c} P[c][r] m[r][c]; the pair index is 2r + c
    let mut w = [[ZERO; 4]; 4];
    for (a, p) in PAULI_1Q.iter().enumerate() {
        for r in 0..2 {
            for c in 0..2 {
                w[a][2 * r + c] = p[2 * c + r];
            }
        }
    }
    transform_axes(&mut t, n, &w);
    Ok(t)
}

/// Real Pauli vector `(tr(P_i rho))_i` of a Hermitian operator.
pub fn pauli_vector(rho: &CMat) -> Result<RVec, LinalgError> {
    Ok(pauli_coefficients(rho)?.into_iter().map(|z| z.re).collect())
}

/// Reconstructs `2^-n * sum_i v_i P_i` from a Pauli vector of length `4^n`.
pub fn from_pauli_vector(v: &[f64]) -> Result<CMat, LinalgError> {
    let n = qubits_of_pauli_dim(v.len())
        .ok_or_else(|| LinalgError::Dimension(format!("length {} is not a power of 4", v.len())))?;
    let mut t: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
    let mut w = [[ZERO; 4]; 4];
    for (a, p) in PAULI_1Q.iter().enumerate() {
        for pair in 0..4 {
            w[pair][a] = p[pair];
        }
    }
    transform_axes(&mut t, n, &w);
    let d = 1usize << n;
    let norm = 1.0 / d as f64;
    Ok(CMat::from_fn(d, d, |r, c| t[interleave(r, c, n)] * norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cmat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat {
        CMat::from_fn(r, c, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn p(n: usize, idx: usize) -> CMat {
        pauli_op(PauliIndex::new(n, idx).unwrap())
    }

    #[test]
    fn kron_identities() {
        assert_eq!(CMat::identity(2).kron(&CMat::identity(2)), CMat::identity(4));
        let k = p(1, 1).kron(&p(1, 3));
        let z = p(1, 3);
        for r in 0..4 {
            for c in 0..4 {
                let expect = if (r < 2) != (c < 2) { z[(r % 2, c % 2)] } else { ZERO };
                assert_eq!(k[(r, c)], expect);
            }
        }
    }

    #[test]
    fn kron_of_vectors_by_index_arithmetic() {
        let v = RMat::column(vec![1.0, 0.0, 0.0, 1.0]);
        let w = RMat::column(vec![1.0, 0.0, 0.0, -1.0]);
        let k = v.kron(&w);
        let mut expect = vec![0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                expect[i * 4 + j] = v.as_slice()[i] * w.as_slice()[j];
            }
        }
        assert_eq!(k.as_slice(), &expect[..]);
        assert_eq!(expect[0], 1.0);
        assert_eq!(expect[12], 1.0);
        assert_eq!(expect[3], -1.0);
        assert_eq!(expect[15], -1.0);
    }

    #[test]
    fn dagger_examples() {
        assert_eq!(CMat::identity(2).dagger(), CMat::identity(2));
        let a = 0.7;
        let d = CMat::diag(&[ONE, C64::from_polar(1.0, a)]);
        assert!(d.dagger().max_abs_diff(&CMat::diag(&[ONE, C64::from_polar(1.0, -a)])) < 1e-15);
        assert_eq!(p(1, 2).dagger(), p(1, 2));
    }

    #[test]
    fn pauli_ordering() {
        assert_eq!(p(1, 0), CMat::identity(2));
        assert_eq!(p(2, 1), p(1, 0).kron(&p(1, 1)));
        assert_eq!(p(2, 15), p(1, 3).kron(&p(1, 3)));
        assert_eq!(p(0, 0), CMat::identity(1));
        assert_eq!(PauliIndex::new(2, 6).unwrap().label(), "XY");
        assert!(PauliIndex::new(1, 4).is_err());
    }

    #[test]
    fn pauli_orthogonality() {
        for n in 0..=3 {
            let d = 1usize << n;
            for i in 0..(1 << (2 * n)) {
                let pi = p(n, i);
                assert!(pi.matmul(&pi).unwrap().max_abs_diff(&CMat::identity(d)) < 1e-12);
                for j in 0..(1 << (2 * n)) {
                    let t = pi.dagger().matmul(&p(n, j)).unwrap().trace();
                    let expect = if i == j { d as f64 } else { 0.0 };
                    assert!((t - C64::new(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn vec_examples() {
        let v = vec(&CMat::identity(2)).unwrap();
        assert_eq!(v.as_slice(), &[ONE, ZERO, ZERO, ONE]);
        let mut ket0bra1 = CMat::zeros(2, 2);
        ket0bra1[(0, 1)] = ONE;
        assert_eq!(vec(&ket0bra1).unwrap().as_slice(), &[ZERO, ZERO, ONE, ZERO]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_cmat(&mut rng, 2, 2);
        assert_eq!(unvec(&vec(&a).unwrap(), 2).unwrap(), a);
        assert!(vec(&CMat::zeros(2, 3)).is_err());
        assert!(unvec(&CMat::column(vec![ONE; 3]), 2).is_err());
    }

    #[test]
    fn vec_sandwich_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = random_cmat(&mut rng, 2, 2);
            let b = random_cmat(&mut rng, 2, 2);
            let rho = random_cmat(&mut rng, 2, 2);
            let lhs = vec(&a.matmul(&rho).unwrap().matmul(&b).unwrap()).unwrap();
            let rhs = b.transpose().kron(&a).matmul(&vec(&rho).unwrap()).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn kron_mixed_product_and_associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = random_cmat(&mut rng, 2, 3);
            let b = random_cmat(&mut rng, 3, 2);
            let c = random_cmat(&mut rng, 3, 2);
            let d = random_cmat(&mut rng, 2, 2);
            let lhs = a.kron(&b).matmul(&c.kron(&d)).unwrap();
            let rhs = a.matmul(&c).unwrap().kron(&b.matmul(&d).unwrap());
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            let l = a.kron(&b).kron(&c);
            let r = a.kron(&b.kron(&c));
            assert!(l.max_abs_diff(&r) < 1e-12);
        }
    }

    #[test]
    fn fast_pauli_transform_matches_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 0..=3 {
            let d = 1 << n;
            let m = random_cmat(&mut rng, d, d);
            let fast = pauli_coefficients(&m).unwrap();
            for i in 0..(1 << (2 * n)) {
                let slow = p(n, i).matmul(&m).unwrap().trace();
                assert!((fast[i] - slow).norm() < 1e-12);
            }
            let h = m.add(&m.dagger()).unwrap();
            let back = from_pauli_vector(&pauli_vector(&h).unwrap()).unwrap();
            assert!(back.max_abs_diff(&h) < 1e-12);
        }
    }
}
