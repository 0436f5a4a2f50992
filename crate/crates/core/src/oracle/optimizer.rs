//! Multi-start coordinate ascent over periodic angles.
//!
//! Each start draws a random point in `[−π, π)^d`. A sweep visits every
//! coordinate in turn, scans `grid_points` equally spaced values over the
//! full period and refines the best one by golden-section search inside the
//! neighbouring grid cells. Each sweep ends with a line search along the net
//! displacement of the sweep, which keeps progress on diagonal ridges.
//! Sweeps repeat until one gains less than `tol`.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub grid_points: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { starts: 16, grid_points: 9, tol: 1e-9, max_iters: 500, seed: 0 }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.starts < 1 {
            return Err(Error::Validation("optimizer needs at least one start".into()));
        }
        if self.grid_points < 3 {
            return Err(Error::Validation("optimizer grid needs at least 3 points".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Validation(format!("optimizer tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iters < 1 {
            return Err(Error::Validation("optimizer needs at least one iteration".into()));
        }
        Ok(())
    }
}

/// Best point found by [`maximize`].
#[derive(Clone, Debug, PartialEq)]
pub struct Maximum {
    pub x: Vec<f64>,
    pub value: f64,
    /// Sweeps performed by the winning start.
    pub iterations: usize,
    pub converged: bool,
}

const GOLDEN_MAX_EVALS: usize = 80;
const GOLDEN_WIDTH: f64 = 1e-11;

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
fn golden_section_max(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2;
    while evals < GOLDEN_MAX_EVALS && hi - lo > GOLDEN_WIDTH {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        evals += 1;
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn wrap_angle(x: f64) -> f64 {
    (x + PI).rem_euclid(TAU) - PI
}

fn ascend<F>(objective: &F, mut x: Vec<f64>, cfg: &OptimizerConfig) -> Maximum
where
    F: Fn(&[f64]) -> f64,
{
    let dim = x.len();
    let cell = TAU / cfg.grid_points as f64;
    let mut fx = objective(&x);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iters {
        iterations += 1;
        let before = fx;
        let origin = x.clone();
        for k in 0..dim {
            let centre = x[k];
            let mut probe = x.clone();
            let mut eval = |v: f64| {
                probe[k] = v;
                objective(&probe)
            };
            let (mut best_x, mut best_f) = (centre, fx);
            for g in 1..cfg.grid_points {
                let v = centre + g as f64 * cell;
                let fv = eval(v);
                if fv > best_f {
                    best_x = v;
                    best_f = fv;
                }
            }
            let (gx, gf) = golden_section_max(&mut eval, best_x - cell, best_x + cell);
            if gf > best_f {
                best_x = gx;
                best_f = gf;
            }
            if best_f > fx {
                x[k] = wrap_angle(best_x);
                fx = best_f;
            }
        }
        let step: Vec<f64> = x.iter().zip(&origin).map(|(a, b)| wrap_angle(a - b)).collect();
        if step.iter().any(|s| *s != 0.0) {
            let along = |t: f64| -> Vec<f64> { origin.iter().zip(&step).map(|(o, s)| o + t * s).collect() };
            let (t, ft) = golden_section_max(|t| objective(&along(t)), 1.0, 4.0);
            if ft > fx {
                x = along(t).into_iter().map(wrap_angle).collect();
                fx = ft;
            }
        }
        if fx - before < cfg.tol {
            converged = true;
            break;
        }
    }
    Maximum { x, value: fx, iterations, converged }
}

/// Maximizes `objective` over `dim` periodic angles.
///
/// Starts run in parallel; the result is the first start (in start order)
/// attaining the largest value, so it depends only on `cfg`.
pub fn maximize<F>(objective: F, dim: usize, cfg: &OptimizerConfig) -> Result<Maximum>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    let runs: Vec<Maximum> = (0..cfg.starts)
        .into_par_iter()
        .map(|start| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(start as u64);
            let x0: Vec<f64> = (0..dim).map(|_| rng.random_range(-PI..PI)).collect();
            ascend(&objective, x0, cfg)
        })
        .collect();
    let mut best = runs[0].clone();
    for run in runs.into_iter().skip(1) {
        if run.value > best.value {
            best = run;
        }
    }
    Ok(best)
}
