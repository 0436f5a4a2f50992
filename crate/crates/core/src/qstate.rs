//! Two-qubit states, their Bloch (Fano) form and correlation spectra.
//!
//! Any two-qubit density matrix can be written as
//! `ρ = ¼(𝟙 + m_A·σ⊗𝟙 + 𝟙⊗m_B·σ + Σ t_mn σ_m⊗σ_n)`. The spectrum of
//! `R = tᵀt` is all the closed-form maxima depend on.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{
    bloch_observable, kron, pauli, permute_qubits, psd_eigenvalues3, Axis, ComplexMatrix, RealSym3,
};
use crate::C64;

/// Tolerance on Hermiticity and unit trace for a valid state.
pub const STATE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted for a valid state.
pub const PSD_TOL: f64 = 1e-9;

pub type Mat3 = [[f64; 3]; 3];

const IDENTITY3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Validated two-qubit density matrix. Qubit 0 is party A, qubit 1 party B.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState {
    rho: ComplexMatrix,
}

impl TwoQubitState {
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        if rho.dim() != 4 {
            return Err(Error::Dimension(format!(
                "two-qubit state needs a 4x4 matrix, got {0}x{0}",
                rho.dim()
            )));
        }
        let herm = rho.hermitian_deviation();
        if herm > STATE_TOL {
            return Err(Error::Validation(format!(
                "density matrix is not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Validation(format!(
                "density matrix trace is {:.12}{:+.3e}i, expected 1",
                tr.re, tr.im
            )));
        }
        let min_ev = rho.hermitian_eigenvalues()[0];
        if min_ev < -PSD_TOL {
            return Err(Error::Validation(format!(
                "density matrix is not positive semidefinite (min eigenvalue {min_ev:.3e})"
            )));
        }
        Ok(Self { rho })
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn maximally_mixed() -> Self {
        Self { rho: ComplexMatrix::identity(4).scale(C64::new(0.25, 0.0)) }
    }

    /// Exchanges the roles of the two qubits.
    pub fn swap_parties(&self) -> Self {
        let rho = permute_qubits(&self.rho, &[1, 0]).expect("4x4 swap is always valid");
        Self { rho }
    }

    /// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†` for 2×2 unitaries.
    pub fn conjugate_local(&self, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<Self> {
        if ua.dim() != 2 || ub.dim() != 2 {
            return Err(Error::Dimension("local unitaries must be 2x2".into()));
        }
        let u = kron(ua, ub);
        let rho = u.matmul(&self.rho)?.matmul(&u.adjoint())?;
        Self::new(rho)
    }
}

/// Local Bloch vectors and correlation matrix of a two-qubit state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochForm {
    pub m_a: [f64; 3],
    pub m_b: [f64; 3],
    /// `t[m][n] = Tr[ρ σ_m⊗σ_n]`, rows belong to party A.
    pub t: Mat3,
}

impl BlochForm {
    pub fn correlations(t: Mat3) -> Self {
        Self { m_a: [0.0; 3], m_b: [0.0; 3], t }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let vecs = self
            .m_a
            .iter()
            .zip(&other.m_a)
            .chain(self.m_b.iter().zip(&other.m_b))
            .map(|(a, b)| (a - b).abs());
        let mats = self
            .t
            .iter()
            .flatten()
            .zip(other.t.iter().flatten())
            .map(|(a, b)| (a - b).abs());
        vecs.chain(mats).fold(0.0, f64::max)
    }
}

/// Descending eigenvalues `λ₁ ≥ λ₂ ≥ λ₃ ≥ 0` of `R = tᵀt`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSpectrum(pub [f64; 3]);

impl CorrelationSpectrum {
    pub fn first(&self) -> f64 {
        self.0[0]
    }

    pub fn second(&self) -> f64 {
        self.0[1]
    }

    pub fn third(&self) -> f64 {
        self.0[2]
    }

    pub fn values(&self) -> [f64; 3] {
        self.0
    }
}

impl fmt::Display for CorrelationSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6}, {:.6})", self.0[0], self.0[1], self.0[2])
    }
}

fn expectation(rho: &ComplexMatrix, op: &ComplexMatrix) -> f64 {
    let v = rho.trace_product(op).expect("4x4 operands");
    debug_assert!(v.im.abs() <= STATE_TOL, "imaginary expectation {}", v.im);
    v.re
}

/// Pauli-trace decomposition of a state.
pub fn bloch_decompose(state: &TwoQubitState) -> BlochForm {
    let rho = state.rho();
    let id = ComplexMatrix::identity(2);
    let mut form = BlochForm::correlations([[0.0; 3]; 3]);
    for a in Axis::ALL {
        let sa = pauli(a);
        form.m_a[a.index()] = expectation(rho, &kron(&sa, &id));
        form.m_b[a.index()] = expectation(rho, &kron(&id, &sa));
        for b in Axis::ALL {
            form.t[a.index()][b.index()] = expectation(rho, &kron(&sa, &pauli(b)));
        }
    }
    form
}

/// Assembles `ρ` from a Bloch form; fails if the result is not a state.
pub fn bloch_compose(form: &BlochForm) -> Result<TwoQubitState> {
    let id = ComplexMatrix::identity(2);
    let mut rho = ComplexMatrix::identity(4);
    rho = rho.add(&kron(&bloch_observable(form.m_a), &id))?;
    rho = rho.add(&kron(&id, &bloch_observable(form.m_b)))?;
    for a in Axis::ALL {
        let row = form.t[a.index()];
        rho = rho.add(&kron(&pauli(a), &bloch_observable(row)))?;
    }
    let rho = rho.scale(C64::new(0.25, 0.0));
    if rho.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Validation("Bloch form has non-finite entries".into()));
    }
    let min_eigenvalue = rho.hermitian_eigenvalues()[0];
    if min_eigenvalue < -PSD_TOL {
        return Err(Error::Unphysical { min_eigenvalue });
    }
    TwoQubitState::new(rho)
}

pub fn correlation_matrix_spectrum(t: &Mat3) -> Result<CorrelationSpectrum> {
    Ok(CorrelationSpectrum(psd_eigenvalues3(&RealSym3::gram(t))?))
}

/// Spectrum of `tᵀt` for a Bloch form.
pub fn correlation_spectrum(form: &BlochForm) -> CorrelationSpectrum {
    // tᵀt is a Gram matrix: the PSD clamp can only trigger on rounding noise.
    correlation_matrix_spectrum(&form.t).expect("Gram matrix is positive semidefinite")
}

pub fn state_spectrum(state: &TwoQubitState) -> CorrelationSpectrum {
    correlation_spectrum(&bloch_decompose(state))
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[j][i] = a[i][j];
        }
    }
    out
}

fn mat_vec(a: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| (0..3).map(|k| a[i][k] * v[k]).sum())
}

pub fn determinant(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Applies local rotations `R_A`, `R_B ∈ SO(3)` to a Bloch form:
/// `m_A → R_A m_A`, `m_B → R_B m_B`, `t → R_A t R_Bᵀ`.
pub fn rotate_bloch(form: &BlochForm, rot_a: &Mat3, rot_b: &Mat3) -> BlochForm {
    BlochForm {
        m_a: mat_vec(rot_a, &form.m_a),
        m_b: mat_vec(rot_b, &form.m_b),
        t: mat_mul(&mat_mul(rot_a, &form.t), &transpose(rot_b)),
    }
}

/// Which Bloch axes receive the singular values of `t` after alignment.
///
/// The largest singular value goes on `primary`, the second on `secondary`
/// and the smallest, carrying the sign of `det t` if negative, on the
/// remaining axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlignLayout {
    pub primary: Axis,
    pub secondary: Axis,
}

impl AlignLayout {
    /// `diag(σ₁, ±σ₃, σ₂)`: the two largest correlations sit on the x and z
    /// axes measured by the `σz⊗σz` / `σx⊗σx` chain nodes.
    pub const CHAIN: Self = Self { primary: Axis::X, secondary: Axis::Z };
    /// `diag(σ₁, σ₂, ±σ₃)`.
    pub const DESCENDING: Self = Self { primary: Axis::X, secondary: Axis::Y };

    pub fn new(primary: Axis, secondary: Axis) -> Result<Self> {
        if primary == secondary {
            return Err(Error::Validation("alignment axes must differ".into()));
        }
        Ok(Self { primary, secondary })
    }

    pub fn remaining(&self) -> Axis {
        Axis::ALL
            .into_iter()
            .find(|a| *a != self.primary && *a != self.secondary)
            .expect("three axes")
    }

    /// Proper rotation sending `e₀, e₁, e₂` to the primary, secondary and
    /// remaining axes (up to a sign on the last).
    fn placement(&self) -> Mat3 {
        let targets = [self.primary, self.secondary, self.remaining()];
        let mut p = [[0.0; 3]; 3];
        for (k, axis) in targets.iter().enumerate() {
            p[axis.index()][k] = 1.0;
        }
        if determinant(&p) < 0.0 {
            for row in p.iter_mut() {
                row[2] = -row[2];
            }
        }
        p
    }
}

impl Default for AlignLayout {
    fn default() -> Self {
        Self::CHAIN
    }
}

/// State rotated so that its correlation matrix is diagonal.
#[derive(Clone, Debug)]
pub struct Alignment {
    pub state: TwoQubitState,
    pub rot_a: Mat3,
    pub rot_b: Mat3,
}

/// Aligns with [`AlignLayout::CHAIN`].
pub fn align_state(state: &TwoQubitState) -> Alignment {
    align_state_with(state, AlignLayout::CHAIN)
}

/// Finds proper rotations with `rot_a · t · rot_bᵀ` diagonal, the singular
/// values placed according to `layout`.
pub fn align_state_with(state: &TwoQubitState, layout: AlignLayout) -> Alignment {
    let form = bloch_decompose(state);
    let t = Matrix3::from_fn(|i, j| form.t[i][j]);
    let svd = t.svd(true, true);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested Vᵀ").transpose();
    let s = svd.singular_values;

    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let mut uu = [[0.0; 3]; 3];
    let mut vv = [[0.0; 3]; 3];
    for (k, &src) in order.iter().enumerate() {
        // Canonical column sign: the largest component of each v is positive.
        let col = v.column(src);
        let pivot = (0..3).max_by(|&a, &b| col[a].abs().total_cmp(&col[b].abs())).unwrap();
        let flip = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..3 {
            uu[i][k] = flip * u[(i, src)];
            vv[i][k] = flip * v[(i, src)];
        }
    }

    // Make both factors proper; each reflection flips the sign of the
    // smallest singular value in t = U D Vᵀ.
    for m in [&mut uu, &mut vv] {
        if determinant(m) < 0.0 {
            for row in m.iter_mut() {
                row[2] = -row[2];
            }
        }
    }

    // t = U D Vᵀ  ⇒  (P Uᵀ) t (P Vᵀ)ᵀ = P D Pᵀ.
    let p = layout.placement();
    let rot_a = mat_mul(&p, &transpose(&uu));
    let rot_b = mat_mul(&p, &transpose(&vv));
    let rotated = rotate_bloch(&form, &rot_a, &rot_b);
    let state = bloch_compose(&rotated).expect("local rotations preserve positivity");
    Alignment { state, rot_a, rot_b }
}

/// The four Bell states.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellLabel {
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    #[default]
    PsiMinus,
}

impl BellLabel {
    pub fn amplitudes(self) -> [C64; 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (z, p, m) = (C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0));
        match self {
            BellLabel::PhiPlus => [p, z, z, p],
            BellLabel::PhiMinus => [p, z, z, m],
            BellLabel::PsiPlus => [z, p, p, z],
            BellLabel::PsiMinus => [z, p, m, z],
        }
    }
}

impl FromStr for BellLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi+" => Ok(BellLabel::PhiPlus),
            "phi-" => Ok(BellLabel::PhiMinus),
            "psi+" => Ok(BellLabel::PsiPlus),
            "psi-" => Ok(BellLabel::PsiMinus),
            other => Err(Error::Validation(format!(
                "unknown Bell label {other:?} (expected phi+, phi-, psi+ or psi-)"
            ))),
        }
    }
}

/// Named state families accepted by [`make_state`].
#[derive(Clone, Debug, PartialEq)]
pub enum StateFamily {
    Bell(BellLabel),
    /// `v·|bell⟩⟨bell| + (1 − v)·𝟙/4`.
    Werner { v: f64, base: BellLabel },
    /// Amplitudes on `|00⟩, |01⟩, |10⟩, |11⟩`, normalized on construction.
    Pure([C64; 4]),
    Bloch(BlochForm),
    /// Row-major 4×4 density matrix.
    Dense([C64; 16]),
}

pub fn make_state(family: &StateFamily) -> Result<TwoQubitState> {
    match family {
        StateFamily::Bell(label) => Ok(pure_state(&label.amplitudes())),
        StateFamily::Werner { v, base } => {
            if !(0.0..=1.0).contains(v) {
                return Err(Error::Validation(format!("Werner visibility {v} outside [0, 1]")));
            }
            let bell = ComplexMatrix::outer(&base.amplitudes()).scale(C64::new(*v, 0.0));
            let noise = ComplexMatrix::identity(4).scale(C64::new((1.0 - v) / 4.0, 0.0));
            TwoQubitState::new(bell.add(&noise)?)
        }
        StateFamily::Pure(amps) => {
            let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if !norm.is_finite() || norm < 1e-12 {
                return Err(Error::Validation(format!(
                    "pure-state amplitudes cannot be normalized (norm {norm:.3e})"
                )));
            }
            let v = amps.map(|a| a / norm);
            Ok(pure_state(&v))
        }
        StateFamily::Bloch(form) => bloch_compose(form),
        StateFamily::Dense(entries) => TwoQubitState::new(ComplexMatrix::new(4, entries.to_vec())?),
    }
}

fn pure_state(amps: &[C64; 4]) -> TwoQubitState {
    TwoQubitState { rho: ComplexMatrix::outer(amps) }
}

/// Random density matrix `GG†/Tr(GG†)` with `G` a complex Gaussian `4×k`
/// matrix, `k` drawn uniformly from `1..=4` so pure states are included.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    let rank = rng.random_range(1..=4usize);
    let g: Vec<C64> = (0..4 * rank)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let mut rho = ComplexMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            let z: C64 = (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum();
            rho.set(i, j, z);
        }
    }
    let tr = rho.trace().re;
    let mut rho = rho.scale(C64::new(1.0 / tr, 0.0));
    // Exact Hermitian symmetry against rounding in the sum above.
    for i in 0..4 {
        rho.set(i, i, C64::new(rho.get(i, i).re, 0.0));
        for j in i + 1..4 {
            rho.set(j, i, rho.get(i, j).conj());
        }
    }
    TwoQubitState::new(rho).expect("Gram matrices are valid states")
}

/// Haar-random element of SU(2).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [a, b, c, d] = q.map(|x| x / n);
    ComplexMatrix::new(
        2,
        vec![C64::new(a, b), C64::new(c, d), C64::new(-c, d), C64::new(a, -b)],
    )
    .expect("2x2")
}

/// Uniformly random rotation in SO(3).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Mat3 {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

pub fn identity3() -> Mat3 {
    IDENTITY3
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Pauli traces computed entry by entry, independent of `kron`.
    fn pauli_trace_oracle(rho: &ComplexMatrix, a: Option<usize>, b: Option<usize>) -> f64 {
        let p = |k: Option<usize>, r: usize, c: usize| -> C64 {
            let i = C64::new(0.0, 1.0);
            let one = C64::new(1.0, 0.0);
            let zero = C64::new(0.0, 0.0);
            match (k, r, c) {
                (None, r, c) => if r == c { one } else { zero },
                (Some(0), 0, 1) | (Some(0), 1, 0) => one,
                (Some(1), 0, 1) => -i,
                (Some(1), 1, 0) => i,
                (Some(2), 0, 0) => one,
                (Some(2), 1, 1) => -one,
                _ => zero,
            }
        };
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..4 {
            for c in 0..4 {
                let op = p(a, r >> 1, c >> 1) * p(b, r & 1, c & 1);
                acc += op * rho.get(c, r);
            }
        }
        acc.re
    }

    fn t_oracle(state: &TwoQubitState) -> Mat3 {
        let mut t = [[0.0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = pauli_trace_oracle(state.rho(), Some(i), Some(j));
            }
        }
        t
    }

    #[test]
    fn phi_plus_decomposition() {
        let s = make_state(&StateFamily::Bell(BellLabel::PhiPlus)).unwrap();
        let f = bloch_decompose(&s);
        let expect = BlochForm::correlations([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(BlochForm::correlations(t_oracle(&s)).max_abs_diff(&expect) < 1e-15);
        assert!(f.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn maximally_mixed_decomposition() {
        let f = bloch_decompose(&TwoQubitState::maximally_mixed());
        assert!(f.max_abs_diff(&BlochForm::correlations([[0.0; 3]; 3])) < 1e-15);
        let s = bloch_compose(&BlochForm::correlations([[0.0; 3]; 3])).unwrap();
        assert!(s.rho().max_abs_diff(TwoQubitState::maximally_mixed().rho()) < 1e-15);
    }

    #[test]
    fn werner_psi_minus_is_isotropic() {
        for v in [0.0, 0.3, 0.75, 1.0] {
            let s = make_state(&StateFamily::Werner { v, base: BellLabel::PsiMinus }).unwrap();
            let t = t_oracle(&s);
            for i in 0..3 {
                for j in 0..3 {
                    let expect = if i == j { -v } else { 0.0 };
                    assert!((t[i][j] - expect).abs() < 1e-15);
                }
            }
            let sp = state_spectrum(&s);
            for x in sp.values() {
                assert!((x - v * v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn werner_endpoints() {
        let w0 = make_state(&StateFamily::Werner { v: 0.0, base: BellLabel::PsiMinus }).unwrap();
        assert!(w0.rho().max_abs_diff(TwoQubitState::maximally_mixed().rho()) < 1e-15);
        let w1 = make_state(&StateFamily::Werner { v: 1.0, base: BellLabel::PsiMinus }).unwrap();
        let psi = make_state(&StateFamily::Bell(BellLabel::PsiMinus)).unwrap();
        assert!(w1.rho().max_abs_diff(psi.rho()) < 1e-15);
        assert!(make_state(&StateFamily::Werner { v: 1.2, base: BellLabel::PsiMinus }).is_err());
    }

    #[test]
    fn compose_round_trips_phi_plus() {
        let form = BlochForm::correlations([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]);
        let s = bloch_compose(&form).unwrap();
        let phi = make_state(&StateFamily::Bell(BellLabel::PhiPlus)).unwrap();
        assert!(s.rho().max_abs_diff(phi.rho()) < 1e-15);
    }

    #[test]
    fn compose_rejects_unphysical() {
        let form = BlochForm::correlations([[2.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        match bloch_compose(&form) {
            Err(Error::Unphysical { min_eigenvalue }) => assert!((min_eigenvalue + 0.25).abs() < 1e-12),
            other => panic!("expected unphysical error, got {other:?}"),
        }
    }

    #[test]
    fn spectrum_examples() {
        let f = BlochForm::correlations([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert_eq!(correlation_spectrum(&f).values(), [1.0, 1.0, 1.0]);
        assert_eq!(correlation_spectrum(&BlochForm::correlations([[0.0; 3]; 3])).values(), [0.0; 3]);
    }

    #[test]
    fn pure_and_dense_families() {
        let z = C64::new(0.0, 0.0);
        assert!(make_state(&StateFamily::Pure([z; 4])).is_err());
        let s = make_state(&StateFamily::Pure([C64::new(2.0, 0.0), z, z, z])).unwrap();
        let f = bloch_decompose(&s);
        assert!((f.t[2][2] - 1.0).abs() < 1e-15);
        let mut dense = [z; 16];
        dense[0] = C64::new(1.0, 0.0);
        assert!(make_state(&StateFamily::Dense(dense)).is_ok());
        dense[0] = C64::new(2.0, 0.0);
        assert!(make_state(&StateFamily::Dense(dense)).is_err());
    }

    #[test]
    fn invalid_states_rejected() {
        let mut m = ComplexMatrix::identity(4).scale(C64::new(0.25, 0.0));
        m.set(0, 1, C64::new(0.1, 0.0));
        assert!(TwoQubitState::new(m).is_err());
        let neg = ComplexMatrix::from_real(4, &[0.5, 0., 0., 0., 0., 0.5, 0., 0., 0., 0., 0.5, 0., 0., 0., 0., -0.5]);
        assert!(TwoQubitState::new(neg.unwrap()).is_err());
        assert!(TwoQubitState::new(ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0))).is_err());
    }

    #[test]
    fn alignment_of_descending_diagonal_is_identity() {
        let t = [[0.6, 0.0, 0.0], [0.0, 0.4, 0.0], [0.0, 0.0, -0.2]];
        let s = bloch_compose(&BlochForm::correlations(t)).unwrap();
        let al = align_state_with(&s, AlignLayout::DESCENDING);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((al.rot_a[i][j] - e).abs() < 1e-12);
                assert!((al.rot_b[i][j] - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn alignment_of_phi_plus_keeps_forced_sign_on_smallest_slot() {
        let s = make_state(&StateFamily::Bell(BellLabel::PhiPlus)).unwrap();
        for layout in [AlignLayout::CHAIN, AlignLayout::DESCENDING] {
            let al = align_state_with(&s, layout);
            let t = bloch_decompose(&al.state).t;
            // det t = −1 is invariant under proper rotations.
            let rest = layout.remaining().index();
            for i in 0..3 {
                for j in 0..3 {
                    let e = if i != j { 0.0 } else if i == rest { -1.0 } else { 1.0 };
                    assert!((t[i][j] - e).abs() < 1e-12, "{layout:?} {t:?}");
                }
            }
        }
    }

    #[test]
    fn alignment_layout_places_singular_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let s = random_state(&mut rng);
            let f = bloch_decompose(&s);
            let sp = correlation_spectrum(&f);
            let sv = sp.values().map(f64::sqrt);
            let al = align_state(&s);
            let t = bloch_decompose(&al.state).t;
            assert!((t[0][0] - sv[0]).abs() < 1e-10);
            assert!((t[2][2] - sv[1]).abs() < 1e-10);
            assert!((t[1][1].abs() - sv[2]).abs() < 1e-10);
            assert!(determinant(&al.rot_a) > 0.999 && determinant(&al.rot_b) > 0.999);
            let direct = rotate_bloch(&f, &al.rot_a, &al.rot_b);
            assert!(direct.max_abs_diff(&bloch_decompose(&al.state)) < 1e-12);
        }
    }

    #[test]
    fn swap_parties_transposes_t() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_state(&mut rng);
        let f = bloch_decompose(&s);
        let g = bloch_decompose(&s.swap_parties());
        assert!(g.m_a.iter().zip(&f.m_b).all(|(a, b)| (a - b).abs() < 1e-14));
        for i in 0..3 {
            for j in 0..3 {
                assert!((g.t[i][j] - f.t[j][i]).abs() < 1e-14);
            }
        }
    }
}
