//! Network descriptors, measurement settings and the combinatorics of the
//! star-network central measurement.
//!
//! Indices of the `g_j` and `b^j` tables are zero-based in code and
//! one-based when printed.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matkernel::{bloch_observable, ComplexMatrix};
use crate::qstate::{align_state_with, AlignLayout, TwoQubitState};
use crate::C64;

/// Largest GHZ size constructed.
pub const MAX_GHZ_QUBITS: usize = 10;
/// Largest generalized Bell basis constructed (`2^n` dense vectors).
pub const MAX_BASIS_QUBITS: usize = 6;
/// Central-node sizes with a tabulated `b^j`.
pub const BJ_TABLE_SIZES: [usize; 3] = [2, 3, 4];

/// `n` sources in a line; source `k` is shared by parties `A_k` (first
/// qubit) and `A_{k+1}` (second qubit).
#[derive(Clone, Debug)]
pub struct ChainNetwork {
    sources: Vec<TwoQubitState>,
}

impl ChainNetwork {
    pub fn new(sources: Vec<TwoQubitState>) -> Result<Self> {
        if sources.len() < 2 {
            return Err(Error::Validation(format!(
                "a chain needs at least 2 sources, got {}",
                sources.len()
            )));
        }
        Ok(Self { sources })
    }

    pub fn sources(&self) -> &[TwoQubitState] {
        &self.sources
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// Every source rotated so the `σz⊗σz` / `σx⊗σx` middle measurements see
    /// the two largest correlations.
    pub fn aligned(&self) -> Self {
        let sources = self
            .sources
            .iter()
            .map(|s| align_state_with(s, AlignLayout::CHAIN).state)
            .collect();
        Self { sources }
    }
}

/// `n` sources around a central node; source `i` has Alice `i` on its first
/// qubit and the central node on its second.
#[derive(Clone, Debug)]
pub struct StarNetwork {
    sources: Vec<TwoQubitState>,
}

impl StarNetwork {
    pub fn new(sources: Vec<TwoQubitState>) -> Result<Self> {
        if sources.len() < 2 {
            return Err(Error::Validation(format!(
                "a star needs at least 2 sources, got {}",
                sources.len()
            )));
        }
        Ok(Self { sources })
    }

    pub fn sources(&self) -> &[TwoQubitState] {
        &self.sources
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// Alignment layout matched to the central observables of the tabulated
    /// `b^j`: `σz⊗σz`/`σx⊗σx` for `n = 2` and `n = 4`, the X/Y Pauli strings
    /// for `n = 3`.
    pub fn alignment_layout(&self) -> AlignLayout {
        match self.sources.len() {
            3 => AlignLayout::DESCENDING,
            _ => AlignLayout::CHAIN,
        }
    }

    pub fn aligned(&self) -> Self {
        let layout = self.alignment_layout();
        let sources = self.sources.iter().map(|s| align_state_with(s, layout).state).collect();
        Self { sources }
    }

    /// The two-source star read as a chain: source 2 is flipped so the
    /// central node holds its first qubit.
    pub fn as_chain(&self) -> Result<ChainNetwork> {
        if self.sources.len() != 2 {
            return Err(Error::Unsupported(format!(
                "only a 2-source star is a chain, got {} sources",
                self.sources.len()
            )));
        }
        ChainNetwork::new(vec![self.sources[0].clone(), self.sources[1].swap_parties()])
    }
}

/// ±1-valued qubit observable `axis·σ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DichotomicSetting {
    axis: [f64; 3],
}

impl DichotomicSetting {
    pub const UNIT_TOL: f64 = 1e-12;

    pub fn new(axis: [f64; 3]) -> Result<Self> {
        let norm = norm3(&axis);
        if !norm.is_finite() || (norm - 1.0).abs() > Self::UNIT_TOL {
            return Err(Error::Validation(format!(
                "measurement axis {axis:?} is not a unit vector (norm {norm})"
            )));
        }
        Ok(Self { axis })
    }

    /// Axis from polar angle `theta` and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self { axis: [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()] }
    }

    /// `(sin θ, 0, cos θ)`, a direction in the x–z plane.
    pub fn xz(theta: f64) -> Self {
        Self { axis: [theta.sin(), 0.0, theta.cos()] }
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn observable(&self) -> ComplexMatrix {
        bloch_observable(self.axis)
    }
}

/// End-party settings of a chain. The middle nodes always measure
/// `σz⊗σz` (for `I`) and `σx⊗σx` (for `J`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainSettings {
    pub a0: DichotomicSetting,
    pub a1: DichotomicSetting,
    pub c0: DichotomicSetting,
    pub c1: DichotomicSetting,
}

/// Peripheral settings of a star: `A₀ⁱ ± A₁ⁱ` equals `2cosαᵢ n̂·σ` and
/// `2sinαᵢ n̂′·σ`, with one orthonormal pair `(n̂, n̂′)` shared by all parties.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarSettings {
    alpha: Vec<f64>,
    nhat: [f64; 3],
    nprime: [f64; 3],
}

impl StarSettings {
    pub const ORTHO_TOL: f64 = 1e-12;

    pub fn new(alpha: Vec<f64>, nhat: [f64; 3], nprime: [f64; 3]) -> Result<Self> {
        for (name, v) in [("nhat", nhat), ("nprime", nprime)] {
            let n = norm3(&v);
            if (n - 1.0).abs() > Self::ORTHO_TOL {
                return Err(Error::Validation(format!("{name} is not a unit vector (norm {n})")));
            }
        }
        let dot = dot3(&nhat, &nprime);
        if dot.abs() > Self::ORTHO_TOL {
            return Err(Error::Validation(format!("nhat and nprime are not orthogonal (dot {dot:.3e})")));
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::Validation("non-finite angle".into()));
        }
        Ok(Self { alpha, nhat, nprime })
    }

    /// `n̂ = R x̂`, `n̂′ = R ŷ` with `R = R_z(φ) R_y(θ) R_z(ψ)`.
    pub fn from_euler(alpha: Vec<f64>, phi: f64, theta: f64, psi: f64) -> Self {
        let (sf, cf) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = psi.sin_cos();
        let nhat = [cf * ct * cp - sf * sp, sf * ct * cp + cf * sp, -st * cp];
        let nprime = [-cf * ct * sp - sf * cp, -sf * ct * sp + cf * cp, st * sp];
        Self { alpha, nhat, nprime }
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn nhat(&self) -> [f64; 3] {
        self.nhat
    }

    pub fn nprime(&self) -> [f64; 3] {
        self.nprime
    }

    /// Axes of `(A₀ⁱ, A₁ⁱ)`.
    pub fn party_axes(&self, i: usize) -> ([f64; 3], [f64; 3]) {
        let (s, c) = self.alpha[i].sin_cos();
        let a0 = [0, 1, 2].map(|k| c * self.nhat[k] + s * self.nprime[k]);
        let a1 = [0, 1, 2].map(|k| c * self.nhat[k] - s * self.nprime[k]);
        (a0, a1)
    }

    /// `A₀ⁱ + A₁ⁱ` when `flip` is false, `A₀ⁱ − A₁ⁱ` otherwise.
    pub fn combined_axis(&self, i: usize, flip: bool) -> [f64; 3] {
        let (s, c) = self.alpha[i].sin_cos();
        if flip {
            self.nprime.map(|x| 2.0 * s * x)
        } else {
            self.nhat.map(|x| 2.0 * c * x)
        }
    }

    /// The chain settings a two-party star corresponds to.
    pub fn to_chain_settings(&self) -> Result<ChainSettings> {
        if self.alpha.len() != 2 {
            return Err(Error::Unsupported("only two-party star settings map to a chain".into()));
        }
        let (a0, a1) = self.party_axes(0);
        let (c0, c1) = self.party_axes(1);
        Ok(ChainSettings {
            a0: DichotomicSetting { axis: a0 },
            a1: DichotomicSetting { axis: a1 },
            c0: DichotomicSetting { axis: c0 },
            c1: DichotomicSetting { axis: c1 },
        })
    }
}

pub(crate) fn norm3(v: &[f64; 3]) -> f64 {
    dot3(v, v).sqrt()
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn check_range(what: &str, n: usize, lo: usize, hi: usize) -> Result<()> {
    if n < lo || n > hi {
        return Err(Error::Unsupported(format!("{what} requires {lo} <= n <= {hi}, got n = {n}")));
    }
    Ok(())
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits.
pub fn ghz(n: usize) -> Result<Vec<f64>> {
    check_range("GHZ state", n, 2, MAX_GHZ_QUBITS)?;
    let mut v = vec![0.0; 1 << n];
    v[0] = FRAC_1_SQRT_2;
    v[(1 << n) - 1] = FRAC_1_SQRT_2;
    Ok(v)
}

/// Basis `|ψ_r⟩ = Z^{r₁} ⊗ X^{r₂} ⊗ … ⊗ X^{r_n} |GHZ_n⟩`; `vectors[r]` with
/// `r₁` the most significant bit of `r`. All amplitudes are real.
#[derive(Clone, Debug)]
pub struct GeneralizedBellBasis {
    n: usize,
    vectors: Vec<Vec<f64>>,
}

impl GeneralizedBellBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn projector(&self, r: usize) -> ComplexMatrix {
        let v: Vec<C64> = self.vectors[r].iter().map(|&x| C64::new(x, 0.0)).collect();
        ComplexMatrix::outer(&v)
    }

    /// Largest `|⟨ψ_r|ψ_s⟩ − δ_rs|`.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for (r, u) in self.vectors.iter().enumerate() {
            for (s, v) in self.vectors.iter().enumerate() {
                let ip: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                let target = if r == s { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).abs());
            }
        }
        worst
    }

    /// Largest entry of `Σ_r |ψ_r⟩⟨ψ_r| − 𝟙`.
    pub fn completeness_deviation(&self) -> f64 {
        let d = 1usize << self.n;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let s: f64 = self.vectors.iter().map(|v| v[i] * v[j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

pub fn bell_basis(n: usize) -> Result<GeneralizedBellBasis> {
    check_range("generalized Bell basis", n, 2, MAX_BASIS_QUBITS)?;
    let dim = 1usize << n;
    let vectors = (0..dim)
        .map(|r| {
            // X^{r_k} on qubits 2..n moves |0…0⟩ to |m⟩ (first bit 0) and
            // |1…1⟩ to its complement; Z^{r₁} then signs the latter.
            let m = r & ((1 << (n - 1)) - 1);
            let comp = !m & (dim - 1);
            let sign = if r >> (n - 1) & 1 == 1 { -1.0 } else { 1.0 };
            let mut v = vec![0.0; dim];
            v[m] = FRAC_1_SQRT_2;
            v[comp] = sign * FRAC_1_SQRT_2;
            v
        })
        .collect();
    Ok(GeneralizedBellBasis { n, vectors })
}

/// Parties (zero-based) whose input enters the sign `(−1)^{g_j(x)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartySubset(pub Vec<usize>);

impl PartySubset {
    pub fn contains(&self, party: usize) -> bool {
        self.0.contains(&party)
    }

    /// `g_j(x) mod 2` for an input string given as bits.
    pub fn parity(&self, inputs: usize, n: usize) -> bool {
        self.0.iter().filter(|&&i| inputs >> (n - 1 - i) & 1 == 1).count() % 2 == 1
    }
}

impl fmt::Display for PartySubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self.0.iter().map(|i| format!("x{}", i + 1)).collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// All even-size subsets of the `n` parties ordered by size, then
/// lexicographically.
pub fn gj_table(n: usize) -> Result<Vec<PartySubset>> {
    check_range("g_j table", n, 2, MAX_GHZ_QUBITS)?;
    let mut subsets: Vec<Vec<usize>> = (0u32..1 << n)
        .filter(|m| m.count_ones() % 2 == 0)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(subsets.into_iter().map(PartySubset).collect())
}

/// Outcome bit `b(r)` assigned to every generalized Bell vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dichotomy {
    n: usize,
    bits: Vec<bool>,
}

impl Dichotomy {
    pub fn from_bits(n: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != 1 << n {
            return Err(Error::Dimension(format!(
                "dichotomy on {n} qubits needs {} bits, got {}",
                1 << n,
                bits.len()
            )));
        }
        Ok(Self { n, bits })
    }

    pub fn from_fn(n: usize, f: impl Fn(&[u8]) -> u8) -> Self {
        let bits = (0..1usize << n)
            .map(|r| {
                let rb: Vec<u8> = (0..n).map(|k| (r >> (n - 1 - k) & 1) as u8).collect();
                f(&rb) & 1 == 1
            })
            .collect();
        Self { n, bits }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bit(&self, r: usize) -> bool {
        self.bits[r]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_balanced(&self) -> bool {
        self.bits.iter().filter(|b| **b).count() * 2 == self.bits.len()
    }

    /// `+1` for outcome bit 0, `−1` for bit 1.
    pub fn sign(&self, r: usize) -> f64 {
        if self.bits[r] {
            -1.0
        } else {
            1.0
        }
    }
}

/// Tabulated central-node dichotomies `b^j` for `n ∈ {2, 3, 4}`.
///
/// For `n = 2` the pair is chosen so the central observables are `σz⊗σz`
/// and `σx⊗σx`.
pub fn bj_table(n: usize) -> Result<Vec<Dichotomy>> {
    type Rule = fn(&[u8]) -> u8;
    let rules: Vec<Rule> = match n {
        2 => vec![|r| r[1], |r| r[0]],
        3 => vec![
            |r| r[0],
            |r| r[0] ^ r[1] ^ 1,
            |r| r[0] ^ r[2] ^ 1,
            |r| r[0] ^ r[1] ^ r[2] ^ 1,
        ],
        4 => vec![
            |r| r[0],
            |r| r[1] ^ r[2] ^ 1,
            |r| r[1] ^ r[3] ^ 1,
            |r| r[2] ^ r[3] ^ 1,
            |r| r[1] ^ 1,
            |r| r[2] ^ 1,
            |r| r[3] ^ 1,
            |r| r[1] ^ r[2] ^ r[3],
        ],
        _ => {
            return Err(Error::Unsupported(format!(
                "b^j tables exist only for n in {{2, 3, 4}} (got {n}); \
                 use oracle::dichotomy_search to explore other sizes"
            )))
        }
    };
    Ok(rules.into_iter().map(|f| Dichotomy::from_fn(n, f)).collect())
}

/// `Σ_r (−1)^{b(r)} |ψ_r⟩⟨ψ_r|`.
pub fn dichotomy_observable(basis: &GeneralizedBellBasis, dichotomy: &Dichotomy) -> Result<ComplexMatrix> {
    if basis.n != dichotomy.n {
        return Err(Error::Dimension(format!(
            "basis on {} qubits, dichotomy on {}",
            basis.n, dichotomy.n
        )));
    }
    let dim = 1usize << basis.n;
    let mut out = ComplexMatrix::zeros(dim);
    for (r, v) in basis.vectors.iter().enumerate() {
        let s = dichotomy.sign(r);
        // Each |ψ_r⟩ has two non-zero amplitudes.
        let support: Vec<usize> = (0..dim).filter(|&i| v[i] != 0.0).collect();
        for &i in &support {
            for &k in &support {
                let z = out.get(i, k) + C64::new(s * v[i] * v[k], 0.0);
                out.set(i, k, z);
            }
        }
    }
    Ok(out)
}

/// Central-node observable `B^j = M₀^j − M₁^j` (zero-based `j`).
pub fn bob_observable(n: usize, j: usize) -> Result<ComplexMatrix> {
    let table = bj_table(n)?;
    let d = table.get(j).ok_or_else(|| {
        Error::Validation(format!("observable index {j} out of range for n = {n} ({} entries)", table.len()))
    })?;
    dichotomy_observable(&bell_basis(n)?, d)
}
