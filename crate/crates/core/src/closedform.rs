//! Analytic maxima of the chain and star n-locality inequalities.
//!
//! Every maximum depends on the sources only through the two largest
//! eigenvalues `λ₁ ≥ λ₂` of `tᵀt`, so all of them are invariant under local
//! unitaries applied to any source.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{ChainNetwork, ChainSettings, StarNetwork};
use crate::qstate::{bloch_decompose, state_spectrum, BlochForm, CorrelationSpectrum, TwoQubitState};

/// Slack used for the strict violation comparison.
pub const VIOLATION_SLACK: f64 = 1e-12;
/// Slack used by the Cauchy–Schwarz relation checks.
pub const CAUCHY_SCHWARZ_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Chain,
    Star,
}

/// Scale of the chain inequality.
///
/// `Normalized` carries the ¼ prefactor in `I`, `J` with classical bound 1;
/// `PaperScale` (two sources only) drops it, doubling value and bound to 2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    Normalized,
    PaperScale,
}

impl Convention {
    pub fn chain_scale(self, n: usize) -> Result<f64> {
        match self {
            Convention::Normalized => Ok(1.0),
            Convention::PaperScale if n == 2 => Ok(2.0),
            Convention::PaperScale => Err(Error::Unsupported(format!(
                "paper_scale convention is defined for 2-source chains only, got {n} sources"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub topology: Topology,
    pub n: usize,
    pub classical_bound: f64,
    pub closed_form_max: f64,
    pub violation: bool,
    pub per_source_spectra: Vec<CorrelationSpectrum>,
    pub convention: Convention,
}

impl ViolationReport {
    fn new(
        topology: Topology,
        classical_bound: f64,
        closed_form_max: f64,
        per_source_spectra: Vec<CorrelationSpectrum>,
        convention: Convention,
    ) -> Self {
        Self {
            topology,
            n: per_source_spectra.len(),
            classical_bound,
            closed_form_max,
            violation: closed_form_max > classical_bound + VIOLATION_SLACK,
            per_source_spectra,
            convention,
        }
    }
}

/// Maximal CHSH value `2√(λ₁ + λ₂)`.
pub fn chsh_max(state: &TwoQubitState) -> f64 {
    let s = state_spectrum(state);
    2.0 * (s.first() + s.second()).sqrt()
}

fn spectra<'a>(sources: impl IntoIterator<Item = &'a TwoQubitState>) -> Vec<CorrelationSpectrum> {
    sources.into_iter().map(state_spectrum).collect()
}

/// `√(√∏λ₁ + √∏λ₂)` over a list of spectra.
fn chain_value(spectra: &[CorrelationSpectrum]) -> f64 {
    let p1: f64 = spectra.iter().map(CorrelationSpectrum::first).product();
    let p2: f64 = spectra.iter().map(CorrelationSpectrum::second).product();
    (p1.sqrt() + p2.sqrt()).sqrt()
}

/// Chain maximum `√(√(∏ᵢ λ₁⁽ⁱ⁾) + √(∏ᵢ λ₂⁽ⁱ⁾))` against bound 1, or doubled
/// against bound 2 in the paper-scale convention.
pub fn chain_max(net: &ChainNetwork, convention: Convention) -> Result<ViolationReport> {
    let scale = convention.chain_scale(net.len())?;
    let sp = spectra(net.sources());
    let value = scale * chain_value(&sp);
    Ok(ViolationReport::new(Topology::Chain, scale, value, sp, convention))
}

/// Normalized two-source chain value with a `|φ⁺⟩` first source:
/// `√(√γ₁ + √γ₂)`.
pub fn biloc_bell_generic(state: &TwoQubitState) -> f64 {
    let g = state_spectrum(state);
    let value = (g.first().sqrt() + g.second().sqrt()).sqrt();
    debug_assert!(value >= bell_generic_chsh_proxy(state) - 1e-12);
    value
}

/// `√(γ₁ + γ₂)`, half the CHSH maximum of the state.
pub fn bell_generic_chsh_proxy(state: &TwoQubitState) -> f64 {
    let g = state_spectrum(state);
    (g.first() + g.second()).sqrt()
}

fn add(a: [f64; 3], b: [f64; 3], sign: f64) -> [f64; 3] {
    [a[0] + sign * b[0], a[1] + sign * b[1], a[2] + sign * b[2]]
}

/// `uᵀ t[:, col]`.
fn row_contract(u: &[f64; 3], t: &[[f64; 3]; 3], col: usize) -> f64 {
    (0..3).map(|i| u[i] * t[i][col]).sum()
}

/// `t[row, :] · v`.
fn col_contract(t: &[[f64; 3]; 3], row: usize, v: &[f64; 3]) -> f64 {
    (0..3).map(|j| t[row][j] * v[j]).sum()
}

/// `(I, J)` from per-source Bloch forms by 3-vector contractions.
pub fn chain_ij_from_forms(forms: &[BlochForm], settings: &ChainSettings) -> (f64, f64) {
    let (a0, a1) = (settings.a0.axis(), settings.a1.axis());
    let (c0, c1) = (settings.c0.axis(), settings.c1.axis());
    let first = &forms[0].t;
    let last = &forms[forms.len() - 1].t;
    let middle = &forms[1..forms.len() - 1];
    let (z, x) = (2usize, 0usize);

    let i_val = 0.25
        * row_contract(&add(a0, a1, 1.0), first, z)
        * middle.iter().map(|f| f.t[z][z]).product::<f64>()
        * col_contract(last, z, &add(c0, c1, 1.0));
    let j_val = 0.25
        * row_contract(&add(a0, a1, -1.0), first, x)
        * middle.iter().map(|f| f.t[x][x]).product::<f64>()
        * col_contract(last, x, &add(c0, c1, -1.0));
    (i_val, j_val)
}

/// Normalized `(I, J)` of a chain for the given end-party settings.
pub fn chain_ij_factorized(net: &ChainNetwork, settings: &ChainSettings) -> (f64, f64) {
    let forms: Vec<BlochForm> = net.sources().iter().map(bloch_decompose).collect();
    chain_ij_from_forms(&forms, settings)
}

/// `√|I| + √|J|`.
pub fn chain_inequality_value(i: f64, j: f64) -> f64 {
    i.abs().sqrt() + j.abs().sqrt()
}

/// Star maximum `2^{n−2} √((∏ t₁)^{1/n} + (∏ t₂)^{1/n})` against `2^{n−2}`.
pub fn star_max(net: &StarNetwork) -> ViolationReport {
    let sp = spectra(net.sources());
    let n = sp.len() as f64;
    let g1 = sp.iter().map(CorrelationSpectrum::first).product::<f64>().powf(1.0 / n);
    let g2 = sp.iter().map(CorrelationSpectrum::second).product::<f64>().powf(1.0 / n);
    let bound = 2f64.powi(sp.len() as i32 - 2);
    let value = bound * (g1 + g2).sqrt();
    ViolationReport::new(Topology::Star, bound, value, sp, Convention::Normalized)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchySchwarz {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl CauchySchwarz {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, holds: lhs <= rhs + CAUCHY_SCHWARZ_SLACK }
    }
}

/// Paper-scale bilocal maximum against `√(S_CHSH(a) · S_CHSH(b))`.
pub fn cauchy_schwarz_check(a: &TwoQubitState, b: &TwoQubitState) -> CauchySchwarz {
    let (sa, sb) = (state_spectrum(a), state_spectrum(b));
    let lhs = 2.0 * chain_value(&[sa, sb]);
    let chsh = |s: CorrelationSpectrum| 2.0 * (s.first() + s.second()).sqrt();
    CauchySchwarz::new(lhs, (chsh(sa) * chsh(sb)).sqrt())
}

/// n-source relation `S² ≤ ∏ᵢ S_CHSH⁽ⁱ⁾ / 2` with `S` the normalized chain
/// maximum; for two sources this is the paper-scale check squared and
/// divided by four.
pub fn chain_cauchy_schwarz(net: &ChainNetwork) -> CauchySchwarz {
    let sp = spectra(net.sources());
    let lhs = chain_value(&sp).powi(2);
    let rhs: f64 = sp.iter().map(|s| (s.first() + s.second()).sqrt()).product();
    CauchySchwarz::new(lhs, rhs)
}
