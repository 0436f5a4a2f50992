//! Brute-force verification of the closed forms.
//!
//! The full network state is assembled as a dense matrix and the inequality
//! terms are evaluated as exact traces. The optimizers use cheap contractions
//! for the objective and re-evaluate the winning settings with the full
//! traces before returning.

mod optimizer;

pub use optimizer::{maximize, Maximum, OptimizerConfig};

use serde::Serialize;

use crate::closedform::{chain_ij_from_forms, chain_inequality_value};
use crate::error::{Error, Result};
use crate::matkernel::{kron, kron_all, pauli, permute_qubits, Axis, ComplexMatrix};
use crate::netmodel::{
    bell_basis, bj_table, bob_observable, gj_table, ChainNetwork, ChainSettings, DichotomicSetting, Dichotomy,
    PartySubset, StarNetwork, StarSettings,
};
use crate::qstate::{bloch_decompose, BlochForm};
use crate::matkernel::bloch_observable;

/// Largest number of sources assembled into a dense state (`2^10` rows).
pub const MAX_ORACLE_SOURCES: usize = 5;
/// Required agreement between the fast objective and the full traces.
pub const CONFIRM_TOL: f64 = 1e-10;
/// Largest central node handled by [`dichotomy_search`].
pub const MAX_SEARCH_QUBITS: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptResult<S> {
    pub value: f64,
    pub settings: S,
    /// `(I, J)` for a chain, `I_1 … I_m` for a star.
    pub terms: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn check_cap(n: usize) -> Result<()> {
    if n > MAX_ORACLE_SOURCES {
        return Err(Error::Resource(format!(
            "{n} sources exceed the oracle cap of {MAX_ORACLE_SOURCES} (2^{} dimensional state)",
            2 * MAX_ORACLE_SOURCES
        )));
    }
    Ok(())
}

fn confirm(fast: f64, full: f64) -> Result<()> {
    if (fast - full).abs() > CONFIRM_TOL {
        return Err(Error::OracleMismatch { fast, full });
    }
    Ok(())
}

fn expectation(rho: &ComplexMatrix, op: &ComplexMatrix) -> Result<f64> {
    Ok(rho.trace_product(op)?.re)
}

/// `ρ₁ ⊗ … ⊗ ρ_n`: end party `A₁` on qubit 0, middle party `k` on qubits
/// `2k − 1, 2k`, end party `A_{n+1}` on the last qubit.
pub fn assemble_chain(net: &ChainNetwork) -> Result<ComplexMatrix> {
    check_cap(net.len())?;
    Ok(kron_all(net.sources().iter().map(|s| s.rho())))
}

/// Normalized `(I, J)` as exact traces over the assembled chain.
pub fn chain_ij_full(net: &ChainNetwork, settings: &ChainSettings) -> Result<(f64, f64)> {
    let rho = assemble_chain(net)?;
    let n = net.len();
    let zz = kron(&pauli(Axis::Z), &pauli(Axis::Z));
    let xx = kron(&pauli(Axis::X), &pauli(Axis::X));
    let first = [settings.a0.observable(), settings.a1.observable()];
    let last = [settings.c0.observable(), settings.c1.observable()];
    let observable = |xa: usize, xc: usize, middle: &ComplexMatrix| {
        let mut factors = vec![&first[xa]];
        factors.extend(std::iter::repeat_n(middle, n - 1));
        factors.push(&last[xc]);
        kron_all(factors)
    };

    let (mut i_sum, mut j_sum) = (0.0, 0.0);
    for xa in 0..2 {
        for xc in 0..2 {
            let sign = if (xa + xc) % 2 == 1 { -1.0 } else { 1.0 };
            i_sum += expectation(&rho, &observable(xa, xc, &zz))?;
            j_sum += sign * expectation(&rho, &observable(xa, xc, &xx))?;
        }
    }
    Ok((0.25 * i_sum, 0.25 * j_sum))
}

/// Star qubit relabelling: source `i` occupies old qubits `2i` (Alice) and
/// `2i + 1` (central node), which move to `i` and `n + i`.
pub fn star_permutation(n: usize) -> Vec<usize> {
    let mut perm = vec![0; 2 * n];
    for i in 0..n {
        perm[2 * i] = i;
        perm[2 * i + 1] = n + i;
    }
    perm
}

/// Star state ordered `(A₁ … A_n, B₁ … B_n)`.
pub fn assemble_star(net: &StarNetwork) -> Result<ComplexMatrix> {
    check_cap(net.len())?;
    let full = kron_all(net.sources().iter().map(|s| s.rho()));
    permute_qubits(&full, &star_permutation(net.len()))
}

fn check_alpha(net_len: usize, settings: &StarSettings) -> Result<()> {
    if settings.alpha().len() != net_len {
        return Err(Error::Validation(format!(
            "{} angles given for a {net_len}-party star",
            settings.alpha().len()
        )));
    }
    Ok(())
}

/// `I_j = 2^{−n} Σ_x (−1)^{g_j(x)} Tr[(⊗ᵢ A_{xᵢ}ⁱ) ⊗ B^j ρ]`, summed over
/// every input string (zero-based `j`).
pub fn star_ij_full(net: &StarNetwork, settings: &StarSettings, j: usize) -> Result<f64> {
    let n = net.len();
    check_alpha(n, settings)?;
    let bob = bob_observable(n, j)?;
    let g = &gj_table(n)?[j];
    let rho = assemble_star(net)?;
    let parties: Vec<[ComplexMatrix; 2]> = (0..n)
        .map(|i| {
            let (a0, a1) = settings.party_axes(i);
            [bloch_observable(a0), bloch_observable(a1)]
        })
        .collect();

    let mut acc = 0.0;
    for x in 0..1usize << n {
        let mut factors: Vec<&ComplexMatrix> =
            (0..n).map(|i| &parties[i][x >> (n - 1 - i) & 1]).collect();
        factors.push(&bob);
        let sign = if g.parity(x, n) { -1.0 } else { 1.0 };
        acc += sign * expectation(&rho, &kron_all(factors))?;
    }
    Ok(acc / (1usize << n) as f64)
}

/// `Tr_B[(𝟙 ⊗ B) ρ]` for `ρ` on `(A, B)` with both halves of size `d`.
fn reduce_onto_alice(rho: &ComplexMatrix, bob: &ComplexMatrix) -> ComplexMatrix {
    let d = bob.dim();
    let mut out = ComplexMatrix::zeros(d);
    for a in 0..d {
        for a2 in 0..d {
            let mut acc = crate::C64::new(0.0, 0.0);
            for b in 0..d {
                for b2 in 0..d {
                    acc += bob.get(b, b2) * rho.get(a * d + b2, a2 * d + b);
                }
            }
            out.set(a, a2, acc);
        }
    }
    out
}

/// `Tr_A[(A ⊗ 𝟙) ρ]`.
fn reduce_onto_bob(rho: &ComplexMatrix, alice: &ComplexMatrix) -> ComplexMatrix {
    let d = alice.dim();
    let mut out = ComplexMatrix::zeros(d);
    for b in 0..d {
        for b2 in 0..d {
            let mut acc = crate::C64::new(0.0, 0.0);
            for a in 0..d {
                for a2 in 0..d {
                    acc += alice.get(a, a2) * rho.get(a2 * d + b, a * d + b2);
                }
            }
            out.set(b, b2, acc);
        }
    }
    out
}

/// Pauli-string correlators `Tr[(σ_{m₁} ⊗ … ⊗ σ_{m_n}) K]`, index `m` read
/// base 3 with party 1 most significant.
fn pauli_tensor(k: &ComplexMatrix, n: usize) -> Result<Vec<f64>> {
    let paulis = Axis::ALL.map(pauli);
    (0..3usize.pow(n as u32))
        .map(|idx| {
            let factors: Vec<&ComplexMatrix> =
                (0..n).map(|i| &paulis[idx / 3usize.pow((n - 1 - i) as u32) % 3]).collect();
            Ok(k.trace_product(&kron_all(factors))?.re)
        })
        .collect()
}

/// Precomputed star correlators for fast evaluation of every `I_j`.
#[derive(Clone, Debug)]
pub struct StarEvaluator {
    n: usize,
    subsets: Vec<PartySubset>,
    tensors: Vec<Vec<f64>>,
}

impl StarEvaluator {
    pub fn new(net: &StarNetwork) -> Result<Self> {
        let n = net.len();
        let table = bj_table(n)?;
        let rho = assemble_star(net)?;
        let tensors = (0..table.len())
            .map(|j| pauli_tensor(&reduce_onto_alice(&rho, &bob_observable(n, j)?), n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, subsets: gj_table(n)?, tensors })
    }

    pub fn term_count(&self) -> usize {
        self.tensors.len()
    }

    /// `I_j` by contracting `A₀ⁱ ± A₁ⁱ` with the correlator tensor.
    pub fn ij(&self, settings: &StarSettings, j: usize) -> f64 {
        let n = self.n;
        let vecs: Vec<[f64; 3]> =
            (0..n).map(|i| settings.combined_axis(i, self.subsets[j].contains(i))).collect();
        // Contract one party at a time, last party first.
        let mut acc = self.tensors[j].clone();
        for v in vecs.iter().rev() {
            acc = acc.chunks_exact(3).map(|c| c[0] * v[0] + c[1] * v[1] + c[2] * v[2]).collect();
        }
        acc[0] / (1usize << n) as f64
    }

    pub fn terms(&self, settings: &StarSettings) -> Vec<f64> {
        (0..self.term_count()).map(|j| self.ij(settings, j)).collect()
    }

    /// `Σ_j |I_j|^{1/n}`.
    pub fn value(&self, settings: &StarSettings) -> f64 {
        let p = 1.0 / self.n as f64;
        (0..self.term_count()).map(|j| self.ij(settings, j).abs().powf(p)).sum()
    }
}

fn chain_settings_from_angles(x: &[f64]) -> ChainSettings {
    ChainSettings {
        a0: DichotomicSetting::from_angles(x[0], x[1]),
        a1: DichotomicSetting::from_angles(x[2], x[3]),
        c0: DichotomicSetting::from_angles(x[4], x[5]),
        c1: DichotomicSetting::from_angles(x[6], x[7]),
    }
}

/// Maximizes `√|I| + √|J|` over the four end-party axes on the full sphere.
pub fn optimize_chain(net: &ChainNetwork, cfg: &OptimizerConfig) -> Result<OptResult<ChainSettings>> {
    check_cap(net.len())?;
    let forms: Vec<BlochForm> = net.sources().iter().map(bloch_decompose).collect();
    let objective = |x: &[f64]| {
        let (i, j) = chain_ij_from_forms(&forms, &chain_settings_from_angles(x));
        chain_inequality_value(i, j)
    };
    let best = maximize(objective, 8, cfg)?;
    let settings = chain_settings_from_angles(&best.x);
    let (i, j) = chain_ij_from_forms(&forms, &settings);
    let (fi, fj) = chain_ij_full(net, &settings)?;
    confirm(i, fi)?;
    confirm(j, fj)?;
    Ok(OptResult {
        value: chain_inequality_value(i, j),
        settings,
        terms: vec![i, j],
        iterations: best.iterations,
        converged: best.converged,
    })
}

fn star_settings_from_angles(x: &[f64], n: usize) -> StarSettings {
    StarSettings::from_euler(x[..n].to_vec(), x[n], x[n + 1], x[n + 2])
}

/// Maximizes `Σ_j |I_j|^{1/n}` over per-party angles `αᵢ` and the shared
/// orthonormal pair `(n̂, n̂′)`.
pub fn optimize_star(net: &StarNetwork, cfg: &OptimizerConfig) -> Result<OptResult<StarSettings>> {
    let n = net.len();
    check_cap(n)?;
    let eval = StarEvaluator::new(net)?;
    let best = maximize(|x: &[f64]| eval.value(&star_settings_from_angles(x, n)), n + 3, cfg)?;
    let settings = star_settings_from_angles(&best.x, n);
    let terms = eval.terms(&settings);
    for (j, &t) in terms.iter().enumerate() {
        confirm(t, star_ij_full(net, &settings, j)?)?;
    }
    Ok(OptResult {
        value: eval.value(&settings),
        settings,
        terms,
        iterations: best.iterations,
        converged: best.converged,
    })
}

/// Contribution `2^{−n} Tr[(⊗ᵢ (A₀ⁱ ± A₁ⁱ)) ⊗ |ψ_r⟩⟨ψ_r| ρ]` of each
/// generalized Bell outcome `r` to `I_j`; any dichotomy `b` then gives
/// `I_j = Σ_r (−1)^{b(r)} w_r`.
pub fn star_outcome_weights(net: &StarNetwork, settings: &StarSettings, j: usize) -> Result<Vec<f64>> {
    let n = net.len();
    check_alpha(n, settings)?;
    if n > MAX_SEARCH_QUBITS {
        return Err(Error::Unsupported(format!(
            "dichotomy search supports at most {MAX_SEARCH_QUBITS} sources, got {n}"
        )));
    }
    let subsets = gj_table(n)?;
    let g = subsets.get(j).ok_or_else(|| {
        Error::Validation(format!("term index {j} out of range for n = {n} ({} terms)", subsets.len()))
    })?;
    let rho = assemble_star(net)?;
    let factors: Vec<ComplexMatrix> =
        (0..n).map(|i| bloch_observable(settings.combined_axis(i, g.contains(i)))).collect();
    let m = reduce_onto_bob(&rho, &kron_all(factors.iter()));
    let basis = bell_basis(n)?;
    let scale = (1usize << n) as f64;
    Ok(basis
        .vectors()
        .iter()
        .map(|v| {
            let mut acc = 0.0;
            for (i, &vi) in v.iter().enumerate().filter(|(_, x)| **x != 0.0) {
                for (k, &vk) in v.iter().enumerate().filter(|(_, x)| **x != 0.0) {
                    acc += vi * vk * m.get(i, k).re;
                }
            }
            acc / scale
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DichotomyReport {
    pub j: usize,
    pub best: Dichotomy,
    pub best_abs: f64,
    pub tabulated: Option<Dichotomy>,
    pub tabulated_abs: Option<f64>,
    /// Tabulated `b^j` within `1e−9` of the best `|I_j|`.
    pub tabulated_is_optimal: Option<bool>,
    pub searched: usize,
}

pub const DICHOTOMY_TOL: f64 = 1e-9;

/// Exhaustive search over balanced dichotomies of the generalized Bell
/// basis for the one maximizing `|I_j|` at fixed settings.
pub fn dichotomy_search(net: &StarNetwork, settings: &StarSettings, j: usize) -> Result<DichotomyReport> {
    let n = net.len();
    let weights = star_outcome_weights(net, settings, j)?;
    let size = 1usize << n;
    let value = |bits: &[bool]| -> f64 {
        bits.iter().zip(&weights).map(|(&b, w)| if b { -w } else { *w }).sum::<f64>().abs()
    };

    let mut best: Option<(Vec<bool>, f64)> = None;
    let mut searched = 0;
    for mask in 0u64..1 << size {
        if mask.count_ones() as usize * 2 != size {
            continue;
        }
        searched += 1;
        let bits: Vec<bool> = (0..size).map(|r| mask >> r & 1 == 1).collect();
        let v = value(&bits);
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((bits, v));
        }
    }
    let (bits, best_abs) = best.expect("at least one balanced dichotomy exists");

    let tabulated = bj_table(n).ok().and_then(|t| t.get(j).cloned());
    let tabulated_abs = tabulated.as_ref().map(|d| value(d.bits()));
    Ok(DichotomyReport {
        j,
        best: Dichotomy::from_bits(n, bits)?,
        best_abs,
        tabulated_is_optimal: tabulated_abs.map(|t| t >= best_abs - DICHOTOMY_TOL),
        tabulated,
        tabulated_abs,
        searched,
    })
}
