//! Command-line front end: network description files, reports and sweeps.
//!
//! Network files are JSON:
//!
//! ```json
//! {
//!   "topology": "chain",
//!   "sources": [
//!     { "family": "bell", "label": "phi+" },
//!     { "family": "werner", "v": 0.8, "base": "psi-" }
//!   ],
//!   "convention": "normalized"
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major. A sweep
//! file is a network file in which one parameter is written as the string
//! `"$sweep"` (it may appear in several places, all tied to the same value)
//! plus a `"sweep": {"lo": .., "hi": .., "step": ..}` entry.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::closedform::{
    chain_cauchy_schwarz, chain_ij_factorized, chain_max, star_max, CauchySchwarz, Convention, Topology,
    ViolationReport,
};
use crate::error::{Error, Result};
use crate::netmodel::{
    bell_basis, bj_table, bob_observable, gj_table, ChainNetwork, ChainSettings, DichotomicSetting, StarNetwork,
    StarSettings,
};
use crate::oracle::{chain_ij_full, optimize_chain, optimize_star, star_ij_full, OptimizerConfig, StarEvaluator};
use crate::qstate::{make_state, random_su2, BellLabel, BlochForm, StateFamily, TwoQubitState};
use crate::matkernel::ComplexMatrix;
use crate::C64;

/// Oracle excess over the closed form treated as an invariant violation.
pub const EXCESS_TOL: f64 = 1e-6;
/// Shortfall below the closed form reported as a gap by `verify`.
pub const GAP_TOL: f64 = 1e-4;
/// Most grid points a sweep may request.
pub const MAX_SWEEP_POINTS: f64 = 1e6;
const SWEEP_PLACEHOLDER: &str = "$sweep";

// ---------------------------------------------------------------------------
// Input files

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Bell {
        label: BellLabel,
    },
    Werner {
        v: f64,
        #[serde(default)]
        base: BellLabel,
    },
    Pure {
        amplitudes: [[f64; 2]; 4],
    },
    Bloch {
        #[serde(default)]
        m_a: [f64; 3],
        #[serde(default)]
        m_b: [f64; 3],
        t: [[f64; 3]; 3],
    },
    Dense {
        rho: [[[f64; 2]; 4]; 4],
    },
}

fn c64(z: [f64; 2]) -> C64 {
    C64::new(z[0], z[1])
}

impl SourceSpec {
    pub fn family(&self) -> StateFamily {
        match self {
            SourceSpec::Bell { label } => StateFamily::Bell(*label),
            SourceSpec::Werner { v, base } => StateFamily::Werner { v: *v, base: *base },
            SourceSpec::Pure { amplitudes } => StateFamily::Pure(amplitudes.map(c64)),
            SourceSpec::Bloch { m_a, m_b, t } => StateFamily::Bloch(BlochForm { m_a: *m_a, m_b: *m_b, t: *t }),
            SourceSpec::Dense { rho } => {
                StateFamily::Dense(std::array::from_fn(|k| c64(rho[k / 4][k % 4])))
            }
        }
    }

    pub fn build(&self) -> Result<TwoQubitState> {
        make_state(&self.family())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpecFile {
    pub topology: Topology,
    pub sources: Vec<SourceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<Convention>,
}

#[derive(Clone, Debug)]
pub enum Network {
    Chain(ChainNetwork),
    Star(StarNetwork),
}

impl Network {
    pub fn len(&self) -> usize {
        match self {
            Network::Chain(c) => c.len(),
            Network::Star(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sources(&self) -> &[TwoQubitState] {
        match self {
            Network::Chain(c) => c.sources(),
            Network::Star(s) => s.sources(),
        }
    }

    pub fn aligned(&self) -> Self {
        match self {
            Network::Chain(c) => Network::Chain(c.aligned()),
            Network::Star(s) => Network::Star(s.aligned()),
        }
    }

    fn with_sources(&self, sources: Vec<TwoQubitState>) -> Result<Self> {
        Ok(match self {
            Network::Chain(_) => Network::Chain(ChainNetwork::new(sources)?),
            Network::Star(_) => Network::Star(StarNetwork::new(sources)?),
        })
    }
}

impl NetworkSpecFile {
    pub fn build(&self) -> Result<Network> {
        let sources = self
            .sources
            .iter()
            .enumerate()
            .map(|(i, s)| s.build().map_err(|e| Error::Validation(format!("sources[{i}]: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        match self.topology {
            Topology::Chain => Ok(Network::Chain(ChainNetwork::new(sources)?)),
            Topology::Star => {
                if self.convention == Some(Convention::PaperScale) {
                    return Err(Error::Unsupported("the paper_scale convention applies to chains only".into()));
                }
                Ok(Network::Star(StarNetwork::new(sources)?))
            }
        }
    }
}

fn parse_error(origin: &str, e: serde_json::Error) -> Error {
    Error::Parse(format!("{origin}: {e}"))
}

pub fn parse_network(text: &str, origin: &str) -> Result<NetworkSpecFile> {
    serde_json::from_str(text).map_err(|e| parse_error(origin, e))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

pub fn load_network(path: &Path) -> Result<NetworkSpecFile> {
    parse_network(&read_file(path)?, &path.display().to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn validate(&self) -> Result<()> {
        let SweepRange { lo, hi, step } = *self;
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
            return Err(Error::Validation("sweep bounds must be finite".into()));
        }
        if lo >= hi {
            return Err(Error::Validation(format!("sweep needs lo < hi, got lo = {lo}, hi = {hi}")));
        }
        if step <= 0.0 {
            return Err(Error::Validation(format!("sweep step must be positive, got {step}")));
        }
        if (hi - lo) / step > MAX_SWEEP_POINTS {
            return Err(Error::Validation(format!(
                "sweep would need more than {MAX_SWEEP_POINTS} points"
            )));
        }
        Ok(())
    }

    /// `lo, lo + step, …` up to `hi`, rounded to 12 decimals so the printed
    /// parameter does not carry accumulated rounding.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|k| ((self.lo + k as f64 * self.step) * 1e12).round() / 1e12).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    template: Value,
    pub range: SweepRange,
}

fn count_placeholders(v: &Value) -> usize {
    match v {
        Value::String(s) => usize::from(s == SWEEP_PLACEHOLDER),
        Value::Array(items) => items.iter().map(count_placeholders).sum(),
        Value::Object(map) => map.values().map(count_placeholders).sum(),
        _ => 0,
    }
}

fn substitute(v: &mut Value, x: f64) {
    match v {
        Value::String(s) if s == SWEEP_PLACEHOLDER => *v = Value::from(x),
        Value::Array(items) => items.iter_mut().for_each(|i| substitute(i, x)),
        Value::Object(map) => map.values_mut().for_each(|i| substitute(i, x)),
        _ => {}
    }
}

impl SweepSpec {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut template: Value = serde_json::from_str(text).map_err(|e| parse_error(origin, e))?;
        let range = template
            .as_object_mut()
            .and_then(|m| m.remove("sweep"))
            .ok_or_else(|| Error::Parse(format!("{origin}: missing field `sweep`")))?;
        let range: SweepRange =
            serde_json::from_value(range).map_err(|e| Error::Parse(format!("{origin}: sweep: {e}")))?;
        range.validate()?;
        if count_placeholders(&template) == 0 {
            return Err(Error::Parse(format!(
                "{origin}: no parameter is marked with \"{SWEEP_PLACEHOLDER}\""
            )));
        }
        let spec = Self { template, range };
        // Reject malformed templates before any work is scheduled.
        spec.instantiate(range.lo)?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_file(path)?, &path.display().to_string())
    }

    pub fn instantiate(&self, x: f64) -> Result<NetworkSpecFile> {
        let mut v = self.template.clone();
        substitute(&mut v, x);
        serde_json::from_value(v).map_err(|e| Error::Parse(format!("sweep point {x}: {e}")))
    }
}

// ---------------------------------------------------------------------------
// Analysis

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AnalyzeOptions {
    pub oracle: bool,
    pub align: bool,
    pub seed: u64,
    /// Overrides the file's convention when set.
    pub convention: Option<Convention>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum OracleSettings {
    Chain(ChainSettings),
    Star(StarSettings),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleSummary {
    pub objective: String,
    pub value: f64,
    /// Closed form minus oracle value.
    pub gap: f64,
    pub exceeds_closed_form: bool,
    pub converged: bool,
    pub iterations: usize,
    pub seed: u64,
    pub terms: Vec<f64>,
    pub settings: OracleSettings,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    /// The analyzed network, so the report can be read back as input.
    #[serde(flatten)]
    pub network: NetworkSpecFile,
    pub aligned: bool,
    pub closed_form: ViolationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cauchy_schwarz: Option<CauchySchwarz>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
}

impl AnalysisReport {
    pub fn invariant_violated(&self) -> bool {
        self.oracle.as_ref().is_some_and(|o| o.exceeds_closed_form)
    }
}

fn effective_convention(spec: &NetworkSpecFile, opts_convention: Option<Convention>) -> Convention {
    opts_convention.or(spec.convention).unwrap_or_default()
}

fn closed_form(net: &Network, convention: Convention) -> Result<ViolationReport> {
    match net {
        Network::Chain(c) => chain_max(c, convention),
        Network::Star(s) => Ok(star_max(s)),
    }
}

fn run_oracle(net: &Network, convention: Convention, seed: u64, closed: f64) -> Result<OracleSummary> {
    let cfg = OptimizerConfig::with_seed(seed);
    let (objective, value, terms, settings, converged, iterations) = match net {
        Network::Chain(c) => {
            let r = optimize_chain(c, &cfg)?;
            let scale = convention.chain_scale(c.len())?;
            ("sqrt|I| + sqrt|J|".to_string(), scale * r.value, r.terms, OracleSettings::Chain(r.settings), r.converged, r.iterations)
        }
        Network::Star(s) => {
            let r = optimize_star(s, &cfg)?;
            let obj = format!("sum_j |I_j|^(1/{})", s.len());
            (obj, r.value, r.terms, OracleSettings::Star(r.settings), r.converged, r.iterations)
        }
    };
    Ok(OracleSummary {
        objective,
        value,
        gap: closed - value,
        exceeds_closed_form: value > closed + EXCESS_TOL,
        converged,
        iterations,
        seed,
        terms,
        settings,
    })
}

pub fn analyze(spec: &NetworkSpecFile, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let convention = effective_convention(spec, opts.convention);
    let mut network = spec.clone();
    network.convention = Some(convention);
    let mut net = network.build()?;
    if opts.align {
        net = net.aligned();
    }
    let closed = closed_form(&net, convention)?;
    let cauchy_schwarz = match &net {
        Network::Chain(c) => Some(chain_cauchy_schwarz(c)),
        Network::Star(_) => None,
    };
    let oracle = if opts.oracle {
        Some(run_oracle(&net, convention, opts.seed, closed.closed_form_max)?)
    } else {
        None
    };
    Ok(AnalysisReport { network, aligned: opts.align, closed_form: closed, cauchy_schwarz, oracle })
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

pub fn render_report(r: &AnalysisReport) -> String {
    let c = &r.closed_form;
    let topology = match c.topology {
        Topology::Chain => "chain",
        Topology::Star => "star",
    };
    let convention = match c.convention {
        Convention::Normalized => "normalized",
        Convention::PaperScale => "paper_scale",
    };
    let mut s = String::new();
    let _ = writeln!(s, "{topology} network, {} sources, {convention} convention{}", c.n, if r.aligned { ", aligned" } else { "" });
    for (i, sp) in c.per_source_spectra.iter().enumerate() {
        let _ = writeln!(s, "  source {}: lambda = {}", i + 1, fmt_vec(&sp.values()));
    }
    let verdict = if c.violation { "VIOLATION" } else { "no violation" };
    let _ = writeln!(s, "closed-form {:.6}, bound {}, {verdict}", c.closed_form_max, c.classical_bound);
    if let Some(cs) = &r.cauchy_schwarz {
        let _ = writeln!(
            s,
            "Cauchy-Schwarz: lhs {:.6}, rhs {:.6}, {}",
            cs.lhs,
            cs.rhs,
            if cs.holds { "holds" } else { "FAILS" }
        );
    }
    if let Some(o) = &r.oracle {
        let _ = writeln!(
            s,
            "oracle {:.6} ({}), gap {:.3e}, {} after {} sweeps, seed {}",
            o.value,
            o.objective,
            o.gap,
            if o.converged { "converged" } else { "not converged" },
            o.iterations,
            o.seed
        );
        let _ = writeln!(s, "  terms {}", fmt_vec(&o.terms));
        match &o.settings {
            OracleSettings::Chain(cs) => {
                for (name, d) in [("a0", cs.a0), ("a1", cs.a1), ("c0", cs.c0), ("c1", cs.c1)] {
                    let _ = writeln!(s, "  {name} = {}", fmt_vec(&d.axis()));
                }
            }
            OracleSettings::Star(ss) => {
                let _ = writeln!(s, "  alpha = {}", fmt_vec(ss.alpha()));
                let _ = writeln!(s, "  nhat = {}", fmt_vec(&ss.nhat()));
                let _ = writeln!(s, "  nprime = {}", fmt_vec(&ss.nprime()));
            }
        }
        if o.exceeds_closed_form {
            let _ = writeln!(s, "ORACLE EXCEEDS CLOSED FORM by {:.3e}", -o.gap);
        } else if !r.aligned && o.gap > GAP_TOL {
            let _ = writeln!(s, "  (sources are not aligned; rerun with --align to test achievability)");
        }
    }
    s
}

// ---------------------------------------------------------------------------
// Sweeps

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub closed_form: f64,
    pub bound: f64,
    pub violation: bool,
    pub oracle: Option<f64>,
}

/// Evaluates every grid point (concurrently) and returns rows in ascending
/// parameter order. The oracle runs on aligned sources.
pub fn sweep(spec: &SweepSpec, oracle: bool, seed: u64, convention: Option<Convention>) -> Result<Vec<SweepRow>> {
    spec.range
        .points()
        .into_par_iter()
        .map(|x| {
            let file = spec.instantiate(x)?;
            let conv = effective_convention(&file, convention);
            let net = file.build().map_err(|e| Error::Validation(format!("sweep point {x}: {e}")))?;
            let closed = closed_form(&net, conv)?;
            let oracle = if oracle {
                Some(run_oracle(&net.aligned(), conv, seed, closed.closed_form_max)?.value)
            } else {
                None
            };
            Ok(SweepRow {
                param: x,
                closed_form: closed.closed_form_max,
                bound: closed.classical_bound,
                violation: closed.violation,
                oracle,
            })
        })
        .collect()
}

pub fn write_csv(rows: &[SweepRow], with_oracle: bool, out: &mut dyn Write) -> std::io::Result<()> {
    if with_oracle {
        writeln!(out, "param,closed_form,bound,violation,oracle")?;
    } else {
        writeln!(out, "param,closed_form,bound,violation")?;
    }
    for r in rows {
        write!(out, "{},{:.12},{},{}", r.param, r.closed_form, r.bound, r.violation)?;
        if let Some(o) = r.oracle {
            write!(out, ",{o:.12}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Basis listing

#[derive(Clone, Debug, PartialEq)]
pub struct BasisCheck {
    pub name: String,
    pub deviation: f64,
    pub passed: bool,
}

const BASIS_TOL: f64 = 1e-12;

/// Generalized Bell basis, `g_j` subsets and `b^j` truth tables for `n`.
pub fn basis_listing(n: usize) -> Result<String> {
    let basis = bell_basis(n)?;
    let mut s = String::new();
    let bits = |r: usize| -> String { (0..n).map(|k| if r >> (n - 1 - k) & 1 == 1 { '1' } else { '0' }).collect() };
    let _ = writeln!(s, "generalized Bell basis, n = {n}");
    for (r, v) in basis.vectors().iter().enumerate() {
        let terms: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(i, a)| format!("{}{:.6}|{}>", if *a < 0.0 { "-" } else { "+" }, a.abs(), bits(i)))
            .collect();
        let _ = writeln!(s, "  psi_{} = {}", bits(r), terms.join(" "));
    }
    let _ = writeln!(s, "g_j subsets");
    for (j, g) in gj_table(n)?.iter().enumerate() {
        let _ = writeln!(s, "  g_{} = {g}", j + 1);
    }
    let table = bj_table(n)?;
    let _ = writeln!(s, "b^j truth tables (r = {})", (1..=n).map(|k| format!("r{k}")).collect::<String>());
    let header: Vec<String> = (0..1usize << n).map(bits).collect();
    let _ = writeln!(s, "        {}", header.join(" "));
    for (j, d) in table.iter().enumerate() {
        let row: Vec<String> = (0..1usize << n)
            .map(|r| format!("{:>width$}", u8::from(d.bit(r)), width = n))
            .collect();
        let _ = writeln!(s, "  b^{:<4} {}", j + 1, row.join(" "));
    }
    Ok(s)
}

/// Orthonormality, completeness and involution checks for size `n`.
pub fn basis_checks(n: usize) -> Result<Vec<BasisCheck>> {
    let basis = bell_basis(n)?;
    let mut checks = vec![];
    let mut push = |name: String, deviation: f64| {
        checks.push(BasisCheck { name, deviation, passed: deviation <= BASIS_TOL });
    };
    push("orthonormality".into(), basis.gram_deviation());
    push("completeness".into(), basis.completeness_deviation());
    let table = bj_table(n)?;
    let id = ComplexMatrix::identity(1 << n);
    for j in 0..table.len() {
        let b = bob_observable(n, j)?;
        push(format!("B^{} traceless", j + 1), b.trace().norm());
        push(format!("B^{} squares to identity", j + 1), b.matmul(&b)?.max_abs_diff(&id));
    }
    Ok(checks)
}

// ---------------------------------------------------------------------------
// Verification

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    /// Closed form not reached by the oracle (an achievability gap).
    Gap,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

const VERIFY_SAMPLES: usize = 20;
const VERIFY_TOL: f64 = 1e-10;

fn random_angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)
}

fn random_setting(rng: &mut ChaCha8Rng) -> DichotomicSetting {
    DichotomicSetting::from_angles(random_angle(rng), random_angle(rng))
}

fn check(name: &str, ok: bool, detail: String) -> VerifyCheck {
    let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
    VerifyCheck { name: name.into(), status, detail }
}

/// Self-consistency checks on one network: fast contractions against full
/// traces, local-unitary invariance of the closed form and the oracle on
/// aligned sources against the closed form.
pub fn verify(spec: &NetworkSpecFile, seed: u64, convention: Option<Convention>) -> Result<Vec<VerifyCheck>> {
    let conv = effective_convention(spec, convention);
    let net = spec.build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = vec![];

    let mut worst = 0.0f64;
    match &net {
        Network::Chain(c) => {
            for _ in 0..VERIFY_SAMPLES {
                let s = ChainSettings {
                    a0: random_setting(&mut rng),
                    a1: random_setting(&mut rng),
                    c0: random_setting(&mut rng),
                    c1: random_setting(&mut rng),
                };
                let (i, j) = chain_ij_factorized(c, &s);
                let (fi, fj) = chain_ij_full(c, &s)?;
                worst = worst.max((i - fi).abs()).max((j - fj).abs());
            }
        }
        Network::Star(s) => {
            let eval = StarEvaluator::new(s)?;
            for _ in 0..VERIFY_SAMPLES {
                let alpha = (0..s.len()).map(|_| random_angle(&mut rng)).collect();
                let set = StarSettings::from_euler(alpha, random_angle(&mut rng), random_angle(&mut rng), random_angle(&mut rng));
                for j in 0..eval.term_count() {
                    worst = worst.max((eval.ij(&set, j) - star_ij_full(s, &set, j)?).abs());
                }
            }
        }
    }
    checks.push(check("fast contraction vs full trace", worst <= VERIFY_TOL, format!("max deviation {worst:.3e}")));

    let reference = closed_form(&net, conv)?.closed_form_max;
    let mut worst = 0.0f64;
    for _ in 0..VERIFY_SAMPLES {
        let rotated = net
            .sources()
            .iter()
            .map(|s| s.conjugate_local(&random_su2(&mut rng), &random_su2(&mut rng)))
            .collect::<Result<Vec<_>>>()?;
        let value = closed_form(&net.with_sources(rotated)?, conv)?.closed_form_max;
        worst = worst.max((value - reference).abs());
    }
    checks.push(check("closed form under local unitaries", worst <= VERIFY_TOL, format!("max deviation {worst:.3e}")));

    if let Network::Chain(c) = &net {
        let cs = chain_cauchy_schwarz(c);
        checks.push(check("Cauchy-Schwarz relation", cs.holds, format!("lhs {:.9}, rhs {:.9}", cs.lhs, cs.rhs)));
    }

    let o = run_oracle(&net.aligned(), conv, seed, reference)?;
    let status = if o.exceeds_closed_form {
        CheckStatus::Fail
    } else if o.gap > GAP_TOL {
        CheckStatus::Gap
    } else {
        CheckStatus::Pass
    };
    checks.push(VerifyCheck {
        name: "oracle on aligned sources vs closed form".into(),
        status,
        detail: format!("oracle {:.9}, closed form {:.9}, gap {:.3e}", o.value, reference, o.gap),
    });
    Ok(checks)
}

// ---------------------------------------------------------------------------
// Argument parsing and dispatch

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    #[value(name = "normalized")]
    Normalized,
    #[value(name = "paper_scale")]
    PaperScale,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Normalized => Convention::Normalized,
            ConventionArg::PaperScale => Convention::PaperScale,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nlocal", version, about = "Maximal violation of n-local inequalities in chain and star networks")]
pub struct Cli {
    /// Seed for the optimizer multi-starts and random checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Inequality scale; overrides the convention given in the file.
    #[arg(long, global = true, value_enum)]
    pub convention: Option<ConventionArg>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form maximum, spectra and verdict for a network file.
    Analyze {
        file: PathBuf,
        /// Also maximize the inequality numerically over the settings.
        #[arg(long)]
        oracle: bool,
        /// Rotate every source to the canonical frame first.
        #[arg(long)]
        align: bool,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Closed-form (and optionally oracle) values over a parameter grid.
    Sweep {
        file: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        oracle: bool,
    },
    /// Generalized Bell basis and the central-node tables for `n` qubits.
    Basis {
        n: usize,
        /// Check orthonormality, completeness and the observables.
        #[arg(long)]
        check: bool,
    },
    /// Consistency checks of the closed form against the oracle.
    Verify { file: PathBuf },
}

/// Outcome of a successful run; invariant violations map to exit code 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    InvariantViolated,
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io { path: "<output>".into(), source: e }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<Status> {
    let convention = cli.convention.map(Convention::from);
    match &cli.command {
        Command::Analyze { file, oracle, align, json } => {
            let spec = load_network(file)?;
            let opts = AnalyzeOptions { oracle: *oracle, align: *align, seed: cli.seed, convention };
            let report = analyze(&spec, &opts)?;
            if *json {
                let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Parse(e.to_string()))?;
                writeln!(out, "{text}").map_err(io_err)?;
            } else {
                write!(out, "{}", render_report(&report)).map_err(io_err)?;
            }
            Ok(if report.invariant_violated() { Status::InvariantViolated } else { Status::Success })
        }
        Command::Sweep { file, csv, oracle } => {
            let spec = SweepSpec::load(file)?;
            let rows = sweep(&spec, *oracle, cli.seed, convention)?;
            match csv {
                Some(path) => {
                    let mut buf = vec![];
                    write_csv(&rows, *oracle, &mut buf).map_err(io_err)?;
                    std::fs::write(path, buf)
                        .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
                }
                None => write_csv(&rows, *oracle, out).map_err(io_err)?,
            }
            Ok(Status::Success)
        }
        Command::Basis { n, check } => {
            write!(out, "{}", basis_listing(*n)?).map_err(io_err)?;
            if !*check {
                return Ok(Status::Success);
            }
            let checks = basis_checks(*n)?;
            for c in &checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{tag} {} (deviation {:.3e})", c.name, c.deviation).map_err(io_err)?;
            }
            Ok(if checks.iter().all(|c| c.passed) { Status::Success } else { Status::InvariantViolated })
        }
        Command::Verify { file } => {
            let spec = load_network(file)?;
            let checks = verify(&spec, cli.seed, convention)?;
            for c in &checks {
                let tag = match c.status {
                    CheckStatus::Pass => "PASS",
                    CheckStatus::Gap => "GAP ",
                    CheckStatus::Fail => "FAIL",
                };
                writeln!(out, "{tag} {}: {}", c.name, c.detail).map_err(io_err)?;
            }
            let failed = checks.iter().any(|c| c.status == CheckStatus::Fail);
            Ok(if failed { Status::InvariantViolated } else { Status::Success })
        }
    }
}
