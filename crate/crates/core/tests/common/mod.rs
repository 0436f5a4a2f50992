#![allow(dead_code)]

use std::f64::consts::PI;

use nlocal::matkernel::{bloch_observable, kron, ComplexMatrix};
use nlocal::netmodel::{ChainSettings, DichotomicSetting, StarSettings};
use nlocal::oracle::{maximize, OptimizerConfig};
use nlocal::qstate::{make_state, BellLabel, StateFamily, TwoQubitState};
use nlocal::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn bell() -> TwoQubitState {
    make_state(&StateFamily::Bell(BellLabel::PhiPlus)).unwrap()
}

pub fn werner(v: f64) -> TwoQubitState {
    make_state(&StateFamily::Werner { v, base: BellLabel::PsiMinus }).unwrap()
}

/// `p ρ + (1 − p) 𝟙/4`, which scales every correlation by `p`.
pub fn depolarize(state: &TwoQubitState, p: f64) -> TwoQubitState {
    let noise = ComplexMatrix::identity(4).scale(C64::new((1.0 - p) / 4.0, 0.0));
    TwoQubitState::new(state.rho().scale(C64::new(p, 0.0)).add(&noise).unwrap()).unwrap()
}

fn angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-PI..PI)
}

pub fn random_setting(rng: &mut ChaCha8Rng) -> DichotomicSetting {
    DichotomicSetting::from_angles(angle(rng), angle(rng))
}

pub fn random_chain_settings(rng: &mut ChaCha8Rng) -> ChainSettings {
    ChainSettings {
        a0: random_setting(rng),
        a1: random_setting(rng),
        c0: random_setting(rng),
        c1: random_setting(rng),
    }
}

pub fn random_star_settings(rng: &mut ChaCha8Rng, n: usize) -> StarSettings {
    let alpha = (0..n).map(|_| angle(rng)).collect();
    StarSettings::from_euler(alpha, angle(rng), angle(rng), angle(rng))
}

/// Reduced operator on the `keep` qubits (in the listed order) by explicit
/// summation over every configuration of the traced qubits.
pub fn partial_trace(rho: &ComplexMatrix, keep: &[usize]) -> ComplexMatrix {
    let q = rho.dim().trailing_zeros() as usize;
    let traced: Vec<usize> = (0..q).filter(|k| !keep.contains(k)).collect();
    let place = |kept: usize, rest: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &qubit) in keep.iter().enumerate() {
            let bit = kept >> (keep.len() - 1 - pos) & 1;
            idx |= bit << (q - 1 - qubit);
        }
        for (pos, &qubit) in traced.iter().enumerate() {
            let bit = rest >> (traced.len() - 1 - pos) & 1;
            idx |= bit << (q - 1 - qubit);
        }
        idx
    };
    let d = 1usize << keep.len();
    let mut out = ComplexMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..1usize << traced.len() {
                acc += rho.get(place(i, t), place(j, t));
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// `Tr[ρ (a·σ ⊗ b·σ)]` straight from the density matrix.
pub fn correlator(state: &TwoQubitState, a: [f64; 3], b: [f64; 3]) -> f64 {
    let op = kron(&bloch_observable(a), &bloch_observable(b));
    state.rho().trace_product(&op).unwrap().re
}

/// CHSH maximized numerically over four measurement directions, each given
/// by polar and azimuthal angles.
pub fn brute_force_chsh(state: &TwoQubitState, seed: u64) -> f64 {
    let dir = |t: f64, p: f64| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
    let objective = |x: &[f64]| {
        let (a, a2) = (dir(x[0], x[1]), dir(x[2], x[3]));
        let (b, b2) = (dir(x[4], x[5]), dir(x[6], x[7]));
        correlator(state, a, b) + correlator(state, a, b2) + correlator(state, a2, b) - correlator(state, a2, b2)
    };
    maximize(objective, 8, &OptimizerConfig::with_seed(seed)).unwrap().value
}
