//! The trust-region outer loop.
//!
//! Each iteration samples a model, tests the stationarity gate
//! `‖h_k‖ ≥ η₂δ_k`, computes a certified trial step, estimates the reduction
//! from samples and accepts when `cred/pred ≥ η₁`. The radius is stored as an
//! integer exponent `j` with `δ = δ₀·γ^j`, so every radius in a trace lies
//! exactly on the lattice.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::lyapunov;
use crate::linalg::{all_finite, pairwise_mean_scalars};
use crate::model::build_model_from_samples;
use crate::problems::{SampleId, StochasticProblem};
use crate::prox::prox_gradient;
use crate::sampling::{dynamic_sample_size, SamplingState};
use crate::subproblem::{compute_trial_step, SearchParams, TrialStep};
use crate::{Error, Result, Vector};

/// Where the computed reduction draws its samples from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CredMode {
    /// Reuse the model's samples.
    #[default]
    SharedWithModel,
    /// Draw fresh samples from a separate stream.
    Independent,
}

/// How the model samples are chosen each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// The whole finite pool; the method is then deterministic.
    Full,
    /// `n_samples_model` i.i.d. draws.
    #[default]
    Fixed,
    /// Variance-driven growth starting from `n_samples_model`.
    Dynamic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrustRegionConfig {
    pub eta1: f64,
    pub eta2: f64,
    pub gamma: f64,
    /// Largest radius exponent, `δ_max = δ₀·γ^ℓ`.
    pub ell: u32,
    /// Initial radius.
    pub delta0: f64,
    /// When set, `ell` is derived from it during [`resolve`](Self::resolve).
    pub delta_max: Option<f64>,
    /// Tolerance of the reduction-accuracy event.
    pub eta: f64,
    /// Proximal-gradient parameter.
    pub r: f64,
    pub kappa_fcd: f64,
    pub kappa_bmh: f64,
    pub kappa_grad: f64,
    /// Lyapunov weight; chosen from the parameters when absent.
    pub nu: Option<f64>,
    pub max_iters: usize,
    /// Stop once the true `‖h(x_k)‖` falls to this value; 0 disables.
    pub epsilon_stop: f64,
    pub n_samples_model: usize,
    pub n_samples_cred: usize,
    pub cred_mode: CredMode,
    pub sampling_mode: SamplingMode,
    /// Dynamic sampling confidence.
    pub alpha: f64,
    /// Dynamic sampling cap.
    pub n_max: usize,
    pub refine_max_iters: usize,
    /// Treat a `ν` violating the Lyapunov condition as an error.
    pub check_theory: bool,
    pub seed: u64,
}

impl Default for TrustRegionConfig {
    fn default() -> Self {
        Self::table2()
    }
}

/// Relative mismatch tolerated between `delta_max` and `δ₀·γ^ℓ`.
const LATTICE_TOL: f64 = 1e-9;

impl TrustRegionConfig {
    /// Parameters of the reference training experiment: `η₁ = 0.5`,
    /// `η₂ = 5e−5`, `γ = 5`, `δ_max = 1e10` (reached as `1.6384·5¹⁴`).
    pub fn table2() -> Self {
        Self {
            eta1: 0.5,
            eta2: 5e-5,
            gamma: 5.0,
            ell: 14,
            delta0: 1.6384,
            delta_max: None,
            eta: 0.1,
            r: 1.0,
            kappa_fcd: 0.05,
            kappa_bmh: 1e6,
            kappa_grad: 1.0,
            nu: None,
            max_iters: 50,
            epsilon_stop: 0.0,
            n_samples_model: 100,
            n_samples_cred: 100,
            cred_mode: CredMode::SharedWithModel,
            sampling_mode: SamplingMode::Fixed,
            alpha: 0.9,
            n_max: 100_000,
            refine_max_iters: 2,
            check_theory: false,
            seed: 0,
        }
    }

    /// Radius at exponent `j`.
    pub fn delta(&self, j: i32) -> f64 {
        self.delta0 * self.gamma.powi(j)
    }

    pub fn max_delta(&self) -> f64 {
        self.delta(self.ell as i32)
    }

    /// Derives `ell` from `delta_max` when given, echoes the lattice value
    /// back into `delta_max` and fixes an automatic `ν` to its value.
    pub fn resolve(&mut self) -> Result<()> {
        if let Some(dm) = self.delta_max {
            if !(dm >= self.delta0 && self.gamma > 1.0 && self.delta0 > 0.0) {
                return Err(Error::Config(format!(
                    "delta_max = {dm} must be at least delta0 = {} with gamma > 1",
                    self.delta0
                )));
            }
            let ell = ((dm / self.delta0).ln() / self.gamma.ln()).round();
            self.ell = ell as u32;
            let lattice = self.max_delta();
            if ((lattice - dm) / dm).abs() > LATTICE_TOL {
                return Err(Error::Config(format!(
                    "delta_max = {dm} is not delta0·gamma^ell for an integer ell (nearest {lattice})"
                )));
            }
            self.delta_max = Some(lattice);
        }
        if self.delta_max.is_none() && self.gamma > 1.0 {
            self.delta_max = Some(self.max_delta());
        }
        if self.nu.is_none() {
            self.nu = Some(self.resolved_nu());
        }
        Ok(())
    }

    /// Right-hand side of the Lyapunov weight condition
    /// `ν/(1−ν) > (γ² − γ⁻²) / ((η₁ − η)·κ_fcd·min{η₂/κ_bmh, 1})`.
    pub fn nu_rhs(&self) -> f64 {
        let g2 = self.gamma * self.gamma;
        (g2 - 1.0 / g2) / ((self.eta1 - self.eta) * self.kappa_fcd * (self.eta2 / self.kappa_bmh).min(1.0))
    }

    /// The configured `ν`, or `2ρ/(1 + 2ρ)` with `ρ` the condition's right side.
    pub fn resolved_nu(&self) -> f64 {
        self.nu.unwrap_or_else(|| {
            let rho = self.nu_rhs();
            2.0 * rho / (1.0 + 2.0 * rho)
        })
    }

    /// Checks every parameter range. Returns warnings for soft violations.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.eta1 > 0.0 && self.eta1 < 1.0) {
            return bad(format!("eta1 must lie in (0, 1), got {}", self.eta1));
        }
        if !(self.eta2 > 0.0) {
            return bad(format!("eta2 must be positive, got {}", self.eta2));
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must exceed 1, got {}", self.gamma));
        }
        if !(self.delta0 > 0.0 && self.max_delta().is_finite()) {
            return bad(format!("delta0 must be positive with a finite delta0·gamma^ell, got {}", self.delta0));
        }
        let bound = self.eta1.min(1.0 - self.eta1);
        if !(self.eta > 0.0 && self.eta < bound) {
            return bad(format!(
                "eta must satisfy 0 < eta < min{{eta1, 1 - eta1}} = {bound}, got eta = {}",
                self.eta
            ));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return bad(format!("r must be positive, got {}", self.r));
        }
        if !(self.kappa_fcd > 0.0) {
            return bad(format!("kappa_fcd must be positive, got {}", self.kappa_fcd));
        }
        if !(self.kappa_bmh > 1.0) {
            return bad(format!("kappa_bmh must exceed 1, got {}", self.kappa_bmh));
        }
        if !(self.kappa_grad > 0.0) {
            return bad(format!("kappa_grad must be positive, got {}", self.kappa_grad));
        }
        if !(self.epsilon_stop >= 0.0) {
            return bad(format!("epsilon_stop must be nonnegative, got {}", self.epsilon_stop));
        }
        if self.n_samples_model == 0 || self.n_samples_cred == 0 {
            return bad("sample counts must be positive".into());
        }
        if self.sampling_mode == SamplingMode::Dynamic {
            if self.n_samples_model < 2 {
                return bad("dynamic sampling needs n_samples_model ≥ 2".into());
            }
            if self.n_max < self.n_samples_model {
                return bad(format!("n_max = {} is below n_samples_model", self.n_max));
            }
            if !(self.alpha > 0.0 && self.alpha < 1.0) {
                return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
            }
        }
        if let Some(dm) = self.delta_max {
            if ((self.max_delta() - dm) / dm).abs() > LATTICE_TOL {
                return bad(format!("delta_max = {dm} disagrees with delta0·gamma^ell = {}", self.max_delta()));
            }
        }
        let mut warnings = Vec::new();
        if let Some(nu) = self.nu {
            if !(nu > 0.0 && nu < 1.0) {
                return bad(format!("nu must lie in (0, 1), got {nu}"));
            }
            let rhs = self.nu_rhs();
            if nu / (1.0 - nu) <= rhs {
                let msg = format!("nu/(1 - nu) = {:e} does not exceed the Lyapunov bound {rhs:e}", nu / (1.0 - nu));
                if self.check_theory {
                    return bad(msg);
                }
                warnings.push(msg);
            }
        }
        Ok(warnings)
    }
}

/// One outer iteration, describing the state at `x_k` and what happened.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub delta_exponent: i32,
    pub delta: f64,
    pub delta_next: f64,
    pub h_model_norm: f64,
    pub h_true_norm: Option<f64>,
    pub pred: Option<f64>,
    pub cred: Option<f64>,
    pub ared: Option<f64>,
    pub accepted: bool,
    pub gated: bool,
    pub n_model: usize,
    pub n_cred: usize,
    pub b_k: f64,
    pub cauchy_r: Option<f64>,
    pub refine_iters: Option<usize>,
    /// `pred / (‖h_k‖·min{‖h_k‖/(1+b_k), δ_k})`.
    pub fcd_ratio: Option<f64>,
    /// The decrease certificate held within 10% of `κ_fcd`.
    pub fcd_tight: bool,
    pub fcd_violation: bool,
    pub cauchy_failure: bool,
    pub nonpositive_pred: bool,
    pub sample_cap_hit: bool,
    pub f_plus_phi: Option<f64>,
    pub psi: Option<f64>,
    #[serde(rename = "I_k")]
    pub i_k: Option<bool>,
    #[serde(rename = "J_k")]
    pub j_k: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StopReason {
    MaxIters,
    EpsilonReached,
    Aborted { error: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub records: Vec<IterationRecord>,
    pub final_point: Vector,
    /// `x₀` was outside `dom φ` and replaced by its projection.
    pub projected_start: bool,
    pub stop: StopReason,
    /// First `k` with `‖h(x_k)‖ ≤ epsilon_stop`, when stopping on it.
    pub t_eps: Option<usize>,
    pub final_h_true_norm: Option<f64>,
    pub final_f_plus_phi: Option<f64>,
    pub nu: f64,
    pub warnings: Vec<String>,
}

impl Trace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().filter(|r| r.accepted).count() as f64 / self.records.len() as f64
    }

    pub fn aborted(&self) -> bool {
        matches!(self.stop, StopReason::Aborted { .. })
    }
}

/// True objective information at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthAt {
    pub f_plus_phi: f64,
    pub gradient: Vector,
    pub h_norm: f64,
}

/// `(f+φ)(x)`, `∇f(x)` and `‖h(x)‖` when the problem has a true oracle.
pub fn truth_at<P: StochasticProblem + ?Sized>(problem: &P, x: &Vector, r: f64) -> Result<Option<TruthAt>> {
    let Some((f, gradient)) = problem.true_oracle(x) else {
        return Ok(None);
    };
    let h_norm = prox_gradient(x, &gradient, r, problem.phi())?.norm();
    Ok(Some(TruthAt {
        f_plus_phi: f + problem.phi().value(x),
        gradient,
        h_norm,
    }))
}

/// `(1/n)Σ[F(x,ξ_ℓ) − F(x+s,ξ_ℓ)] + φ(x) − φ(x+s)` over `samples`.
pub fn computed_reduction<P: StochasticProblem + ?Sized>(
    problem: &P,
    x: &Vector,
    s: &Vector,
    samples: &[SampleId],
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Parameter("computed reduction needs at least one sample".into()));
    }
    let y = x + s;
    let mut diffs = Vec::with_capacity(samples.len());
    for (i, &xi) in samples.iter().enumerate() {
        let d = problem.value_difference(x, &y, xi);
        if !d.is_finite() {
            return Err(Error::Sample { index: i, what: "value" });
        }
        diffs.push(d);
    }
    Ok(pairwise_mean_scalars(&diffs) + phi_reduction(problem, x, &y))
}

fn phi_reduction<P: StochasticProblem + ?Sized>(problem: &P, x: &Vector, y: &Vector) -> f64 {
    problem.phi().reduction(x, y)
}

/// The acceptance test and radius update on plain radii:
/// accept iff `cred/pred ≥ η₁` and `‖h‖ ≥ η₂δ`; then `δ ← min{γδ, δ_max}`,
/// otherwise `δ ← δ/γ`.
pub fn accept_and_update(cred: f64, pred: f64, h_norm: f64, delta: f64, config: &TrustRegionConfig) -> (bool, f64) {
    let accepted = passes(cred, pred, h_norm, delta, config);
    let next = if accepted {
        (config.gamma * delta).min(config.max_delta())
    } else {
        delta / config.gamma
    };
    (accepted, next)
}

fn passes(cred: f64, pred: f64, h_norm: f64, delta: f64, config: &TrustRegionConfig) -> bool {
    pred > 0.0 && cred / pred >= config.eta1 && h_norm >= config.eta2 * delta
}

const STREAM_MODEL: u64 = 0;
const STREAM_CRED: u64 = 1;

fn stream(seed: u64, k: usize, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((k as u64) * 8 + tag);
    rng
}

fn model_seed(seed: u64, k: usize) -> u64 {
    seed ^ (k as u64).wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Runs the method from `problem.initial_point()`.
///
/// Invalid configurations are errors. Failures inside the loop (a non-finite
/// sample, a failed projection) end the run early with
/// [`StopReason::Aborted`] and the trace up to that point.
pub fn run<P: StochasticProblem + ?Sized>(problem: &P, config: &TrustRegionConfig) -> Result<Trace> {
    run_observed(problem, config, |_, _| {})
}

/// Like [`run`], calling `observe(record, x_k)` after every iteration.
pub fn run_observed<P, F>(problem: &P, config: &TrustRegionConfig, mut observe: F) -> Result<Trace>
where
    P: StochasticProblem + ?Sized,
    F: FnMut(&IterationRecord, &Vector),
{
    let mut config = config.clone();
    config.resolve()?;
    let warnings = config.validate()?;
    let phi = problem.phi();
    let full_pool = match config.sampling_mode {
        SamplingMode::Full => Some(problem.full_pool().ok_or_else(|| {
            Error::Config(format!("full sampling needs a finite pool; {} is generative", problem.name()))
        })?),
        _ => None,
    };
    let nu = config.resolved_nu();

    let mut x = problem.initial_point();
    let projected_start = !phi.contains(&x);
    if projected_start {
        x = phi.prox(&x, 1.0)?;
    }

    let mut trace = Trace {
        records: Vec::with_capacity(config.max_iters),
        final_point: x.clone(),
        projected_start,
        stop: StopReason::MaxIters,
        t_eps: None,
        final_h_true_norm: None,
        final_f_plus_phi: None,
        nu,
        warnings,
    };

    let mut state = LoopState {
        x,
        j: 0,
        r_prev: None,
        truth: None,
    };
    let outcome = (|| -> Result<()> {
        state.truth = truth_at(problem, &state.x, config.r)?;
        for k in 0..config.max_iters {
            if config.epsilon_stop > 0.0 {
                if let Some(t) = &state.truth {
                    if t.h_norm <= config.epsilon_stop {
                        trace.t_eps = Some(k);
                        trace.stop = StopReason::EpsilonReached;
                        return Ok(());
                    }
                }
            }
            let x_k = state.x.clone();
            let record = iterate(problem, &config, k, nu, full_pool.as_deref(), &mut state)?;
            observe(&record, &x_k);
            trace.records.push(record);
        }
        if config.epsilon_stop > 0.0 {
            if let Some(t) = &state.truth {
                if t.h_norm <= config.epsilon_stop {
                    trace.t_eps = Some(config.max_iters);
                    trace.stop = StopReason::EpsilonReached;
                }
            }
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        trace.stop = StopReason::Aborted { error: e.to_string() };
    }
    trace.final_h_true_norm = state.truth.as_ref().map(|t| t.h_norm);
    trace.final_f_plus_phi = state.truth.as_ref().map(|t| t.f_plus_phi);
    trace.final_point = state.x;
    Ok(trace)
}

struct LoopState {
    x: Vector,
    j: i32,
    r_prev: Option<f64>,
    truth: Option<TruthAt>,
}

fn iterate<P: StochasticProblem + ?Sized>(
    problem: &P,
    config: &TrustRegionConfig,
    k: usize,
    nu: f64,
    full_pool: Option<&[SampleId]>,
    state: &mut LoopState,
) -> Result<IterationRecord> {
    let phi = problem.phi();
    let x = &state.x;
    let delta = config.delta(state.j);

    let mut cap_hit = false;
    let samples = match config.sampling_mode {
        SamplingMode::Full => full_pool.expect("pool resolved for full sampling").to_vec(),
        SamplingMode::Fixed => problem.draw(&mut stream(config.seed, k, STREAM_MODEL), config.n_samples_model),
        SamplingMode::Dynamic => {
            let init = SamplingState::new(config.n_samples_model, config.n_max, config.alpha, config.kappa_grad)?;
            let out = dynamic_sample_size(problem, x, delta, init, &mut stream(config.seed, k, STREAM_MODEL))?;
            cap_hit = out.cap_hit;
            out.samples
        }
    };
    let mut model = build_model_from_samples(problem, x, samples, model_seed(config.seed, k))?;
    model.clip_bound(config.kappa_bmh);
    let h_model_norm = prox_gradient(x, model.gradient(), config.r, phi)?.norm();
    if !h_model_norm.is_finite() {
        return Err(Error::Sample { index: 0, what: "model gradient" });
    }

    let truth = state.truth.as_ref();
    let mut record = IterationRecord {
        k,
        delta_exponent: state.j,
        delta,
        delta_next: delta,
        h_model_norm,
        h_true_norm: truth.map(|t| t.h_norm),
        pred: None,
        cred: None,
        ared: None,
        accepted: false,
        gated: false,
        n_model: model.n_samples(),
        n_cred: 0,
        b_k: model.bound(),
        cauchy_r: None,
        refine_iters: None,
        fcd_ratio: None,
        fcd_tight: false,
        fcd_violation: false,
        cauchy_failure: false,
        nonpositive_pred: false,
        sample_cap_hit: cap_hit,
        f_plus_phi: truth.map(|t| t.f_plus_phi),
        psi: truth.map(|t| lyapunov(t.f_plus_phi, delta, nu)),
        i_k: truth.map(|t| (model.gradient() - &t.gradient).norm() <= config.kappa_grad * delta),
        j_k: None,
    };

    if h_model_norm < config.eta2 * delta {
        record.gated = true;
        record.j_k = truth.map(|_| true);
        reject(config, state, &mut record);
        return Ok(record);
    }

    let r_init = state.r_prev.unwrap_or(1.0 / (1.0 + model.bound()));
    let step = compute_trial_step(
        &model,
        phi,
        x,
        delta,
        r_init,
        h_model_norm,
        config.kappa_fcd,
        config.refine_max_iters,
        &SearchParams::default(),
    );
    let step: TrialStep = match step {
        Ok(step) => step,
        Err(Error::CauchyFailure { .. }) => {
            record.cauchy_failure = true;
            reject(config, state, &mut record);
            return Ok(record);
        }
        Err(Error::FcdViolation { pred, .. }) => {
            record.fcd_violation = true;
            record.nonpositive_pred = !(pred > 0.0);
            record.pred = Some(pred);
            reject(config, state, &mut record);
            return Ok(record);
        }
        Err(e) => return Err(e),
    };
    state.r_prev = Some(step.cauchy_r);
    record.pred = Some(step.pred);
    record.cauchy_r = Some(step.cauchy_r);
    record.refine_iters = Some(step.refine_iters);
    record.fcd_ratio = Some(step.fcd_ratio);
    record.fcd_tight = step.fcd_ratio < 1.1 * config.kappa_fcd;

    let fresh;
    let cred_samples: &[SampleId] = match (config.sampling_mode, config.cred_mode) {
        (SamplingMode::Full, _) | (_, CredMode::SharedWithModel) => model.samples(),
        (_, CredMode::Independent) => {
            fresh = problem.draw(&mut stream(config.seed, k, STREAM_CRED), config.n_samples_cred);
            &fresh
        }
    };
    let cred = computed_reduction(problem, x, &step.s, cred_samples)?;
    record.cred = Some(cred);
    record.n_cred = cred_samples.len();

    let y = x + &step.s;
    if truth.is_some() {
        let ared = problem.true_reduction(x, &y).map(|d| d + phi_reduction(problem, x, &y));
        record.ared = ared;
        record.j_k = ared.map(|a| (a - cred).abs() <= config.eta * step.pred);
    }

    if passes(cred, step.pred, h_model_norm, delta, config) {
        if !all_finite(&y) {
            return Err(Error::Sample { index: 0, what: "trial point" });
        }
        record.accepted = true;
        state.j = (state.j + 1).min(config.ell as i32);
        record.delta_next = config.delta(state.j);
        state.x = y;
        state.truth = truth_at(problem, &state.x, config.r)?;
    } else {
        reject(config, state, &mut record);
    }
    Ok(record)
}

fn reject(config: &TrustRegionConfig, state: &mut LoopState, record: &mut IterationRecord) {
    state.j -= 1;
    record.delta_next = config.delta(state.j);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::SmoothQuadratic;

    #[test]
    fn acceptance_examples() {
        let c = TrustRegionConfig::table2();
        let (acc, next) = accept_and_update(1.0, 1.0, 1e6, 2.0, &c);
        assert!(acc);
        assert_eq!(next, 10.0);
        let (acc, next) = accept_and_update(-1.0, 1.0, 1e6, 2.0, &c);
        assert!(!acc);
        assert_eq!(next, 2.0 / 5.0);
        let (acc, next) = accept_and_update(1.0, 1.0, 1e6, c.max_delta(), &c);
        assert!(acc);
        assert_eq!(next, c.max_delta());
    }

    #[test]
    fn table2_lattice_reaches_delta_max() {
        let c = TrustRegionConfig::table2();
        assert!((c.max_delta() - 1e10).abs() / 1e10 < 1e-12);
        let mut d = c.clone();
        d.delta_max = Some(1e10);
        d.ell = 0;
        d.resolve().unwrap();
        assert_eq!(d.ell, 14);
        assert!(d.validate().unwrap().is_empty());
    }

    #[test]
    fn eta_bound_is_named() {
        let c = TrustRegionConfig { eta: 0.5, ..TrustRegionConfig::table2() };
        let err = c.validate().unwrap_err().to_string();
        assert!(err.contains("eta < min{eta1, 1 - eta1}"), "{err}");
    }

    #[test]
    fn nu_condition_warns_or_fails() {
        let mut c = TrustRegionConfig { nu: Some(0.5), ..TrustRegionConfig::table2() };
        assert_eq!(c.validate().unwrap().len(), 1);
        c.check_theory = true;
        assert!(c.validate().is_err());
        let auto = TrustRegionConfig::table2().resolved_nu();
        let c = TrustRegionConfig { nu: Some(auto), check_theory: true, ..TrustRegionConfig::table2() };
        assert!(c.validate().unwrap().is_empty());
    }

    #[test]
    fn zero_iterations_returns_start() {
        let p = SmoothQuadratic::new(3, 0.1, 2);
        let c = TrustRegionConfig { max_iters: 0, ..TrustRegionConfig::table2() };
        let t = run(&p, &c).unwrap();
        assert!(t.records.is_empty());
        assert_eq!(t.final_point, p.initial_point());
    }

    #[test]
    fn zero_step_has_zero_reduction() {
        let p = SmoothQuadratic::new(3, 0.3, 2);
        let x = p.initial_point();
        let samples = p.draw(&mut ChaCha8Rng::seed_from_u64(1), 10);
        assert_eq!(computed_reduction(&p, &x, &Vector::zeros(3), &samples).unwrap(), 0.0);
    }
}
