//! Dense complex matrices, Kronecker products, qubit relabelling and a
//! cyclic-Jacobi eigensolver for 3×3 real symmetric matrices.
//!
//! Matrices are square and stored row-major. Qubit `0` is the leftmost
//! Kronecker factor, i.e. the most significant bit of a basis index.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Square dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim.min(16) {
            let row: Vec<String> = (0..self.dim.min(16))
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Fails unless there are exactly
    /// `dim²` finite entries.
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite entry at ({}, {})",
                pos / dim,
                pos % dim
            )));
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from nested rows; non-square input is a dimension error.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::Dimension(format!(
                "row {i} has {} entries, matrix is not square ({dim} rows)",
                r.len()
            )));
        }
        Self::new(dim, rows.concat())
    }

    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::new(dim, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Projector `|v⟩⟨v|`.
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in v {
            for b in v {
                data.push(a * b.conj());
            }
        }
        Self { dim, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.data[i * self.dim + j] = z;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(Self { dim: n, data: out })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        Self { dim: n, data }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// `Tr[self · other]` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.data[i * n + j] * other.data[j * n + i];
            }
        }
        Ok(acc)
    }

    /// `max |M[i,j] − conj(M[j,i])|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Ascending eigenvalues of the Hermitian part `(M + M†)/2`.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        let m = DMatrix::from_fn(n, n, |i, j| {
            (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5
        });
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Number of qubits if the dimension is a power of two.
    pub fn qubit_count(&self) -> Option<usize> {
        self.dim.is_power_of_two().then(|| self.dim.trailing_zeros() as usize)
    }
}

/// Kronecker product with the standard layout
/// `out[i·db + k, j·db + l] = a[i,j] · b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    let mut data = vec![ZERO; n * n];
    for i in 0..da {
        for j in 0..da {
            let aij = a.data[i * da + j];
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                let row = (i * db + k) * n + j * db;
                let src = &b.data[k * db..(k + 1) * db];
                for (d, s) in data[row..row + db].iter_mut().zip(src) {
                    *d = aij * s;
                }
            }
        }
    }
    ComplexMatrix { dim: n, data }
}

/// Left-to-right Kronecker product of a non-empty list.
pub fn kron_all<'a, I>(factors: I) -> ComplexMatrix
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    let mut it = factors.into_iter();
    let first = it.next().expect("kron_all needs at least one factor").clone();
    it.fold(first, |acc, m| kron(&acc, m))
}

fn validate_permutation(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(Error::Validation(format!(
                "qubit permutation {perm:?} is not a bijection on 0..{}",
                perm.len()
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Maps a basis index to its image when old qubit `k` moves to `perm[k]`.
fn permute_index(index: usize, perm: &[usize]) -> usize {
    let q = perm.len();
    let mut out = 0usize;
    for (old, &new) in perm.iter().enumerate() {
        let bit = (index >> (q - 1 - old)) & 1;
        out |= bit << (q - 1 - new);
    }
    out
}

/// Relabels tensor factors: old qubit `k` becomes qubit `perm[k]`.
///
/// `permute_qubits(kron(A, B), &[1, 0]) == kron(B, A)`.
pub fn permute_qubits(op: &ComplexMatrix, perm: &[usize]) -> Result<ComplexMatrix> {
    let q = op.qubit_count().ok_or_else(|| {
        Error::Dimension(format!("dimension {} is not a power of two", op.dim))
    })?;
    if perm.len() != q {
        return Err(Error::Validation(format!(
            "permutation has {} entries for a {q}-qubit operator",
            perm.len()
        )));
    }
    validate_permutation(perm)?;
    let n = op.dim;
    let map: Vec<usize> = (0..n).map(|i| permute_index(i, perm)).collect();
    let mut data = vec![ZERO; n * n];
    for i in 0..n {
        let pi = map[i];
        for j in 0..n {
            data[pi * n + map[j]] = op.data[i * n + j];
        }
    }
    Ok(ComplexMatrix { dim: n, data })
}

/// Inverse of a qubit permutation given as `perm[old] = new`.
pub fn invert_permutation(perm: &[usize]) -> Result<Vec<usize>> {
    validate_permutation(perm)?;
    let mut inv = vec![0; perm.len()];
    for (old, &new) in perm.iter().enumerate() {
        inv[new] = old;
    }
    Ok(inv)
}

/// Cartesian axis of the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn unit(self) -> [f64; 3] {
        let mut v = [0.0; 3];
        v[self.index()] = 1.0;
        v
    }
}

pub fn pauli(axis: Axis) -> ComplexMatrix {
    let (o, l, i) = (ZERO, ONE, C64::new(0.0, 1.0));
    let data = match axis {
        Axis::X => vec![o, l, l, o],
        Axis::Y => vec![o, -i, i, o],
        Axis::Z => vec![l, o, o, -l],
    };
    ComplexMatrix { dim: 2, data }
}

/// `v·σ` for a real 3-vector (not necessarily unit).
pub fn bloch_observable(v: [f64; 3]) -> ComplexMatrix {
    let data = vec![
        C64::new(v[2], 0.0),
        C64::new(v[0], -v[1]),
        C64::new(v[0], v[1]),
        C64::new(-v[2], 0.0),
    ];
    ComplexMatrix { dim: 2, data }
}

/// Real symmetric 3×3 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealSym3([[f64; 3]; 3]);

impl RealSym3 {
    pub const SYMMETRY_TOL: f64 = 1e-12;

    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                if !m[i][j].is_finite() {
                    return Err(Error::Validation(format!("non-finite entry at ({i}, {j})")));
                }
                let d = (m[i][j] - m[j][i]).abs();
                if d > Self::SYMMETRY_TOL {
                    return Err(Error::Validation(format!(
                        "matrix is not symmetric: |M[{i}][{j}] - M[{j}][{i}]| = {d:.3e}"
                    )));
                }
            }
        }
        Ok(Self(m))
    }

    pub fn diag(d: [f64; 3]) -> Self {
        Self([[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]])
    }

    /// `mᵀm`, symmetrized exactly.
    pub fn gram(m: &[[f64; 3]; 3]) -> Self {
        let mut r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let s: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                r[i][j] = s;
                r[j][i] = s;
            }
        }
        Self(r)
    }

    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

/// Eigen-decomposition of a [`RealSym3`]: values descending, `vectors[k]` is
/// the unit eigenvector of `values[k]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymEigen3 {
    pub values: [f64; 3],
    pub vectors: [[f64; 3]; 3],
    pub sweeps: usize,
}

const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;
/// Largest negative eigenvalue magnitude treated as rounding noise for PSD input.
pub const PSD_CLAMP_TOL: f64 = 1e-10;

fn off_diagonal_norm(a: &[[f64; 3]; 3]) -> f64 {
    (2.0 * (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2])).sqrt()
}

/// Cyclic Jacobi eigensolver.
///
/// Stops when the off-diagonal Frobenius norm drops below `1e-13` (scaled by
/// the matrix norm when that exceeds one) or after 100 sweeps.
pub fn eig_sym3(m: &RealSym3) -> SymEigen3 {
    let mut a = m.0;
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    let mut sweeps = 0;

    while sweeps < JACOBI_MAX_SWEEPS && off_diagonal_norm(&a) >= JACOBI_OFF_TOL * scale {
        sweeps += 1;
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;

            // A ← Jᵀ A J with J the (p, q) rotation.
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            a[p][q] = 0.0;
            a[q][p] = 0.0;
            for row in v.iter_mut() {
                let vp = row[p];
                let vq = row[q];
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.map(|k| a[k][k]);
    let vectors = order.map(|k| [v[0][k], v[1][k], v[2][k]]);
    SymEigen3 { values, vectors, sweeps }
}

/// Descending eigenvalues of a matrix known to be positive semidefinite.
/// Negative values down to `-1e-10` are clamped to zero; anything lower is an
/// error.
pub fn psd_eigenvalues3(m: &RealSym3) -> Result<[f64; 3]> {
    let e = eig_sym3(m);
    let mut out = e.values;
    for x in out.iter_mut() {
        if *x < 0.0 {
            if *x < -PSD_CLAMP_TOL {
                return Err(Error::Validation(format!(
                    "matrix expected to be positive semidefinite has eigenvalue {x:.3e}"
                )));
            }
            *x = 0.0;
        }
    }
    Ok(out)
}
