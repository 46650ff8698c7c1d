//! Analysis-side quantities computed from traces: the Lyapunov function,
//! the accuracy events, their empirical rates, radius summability, and the
//! constants that appear in the convergence theory.
//!
//! Nothing here feeds back into the algorithm.

use serde::{Deserialize, Serialize};

use crate::driver::{SamplingMode, Trace, TrustRegionConfig};
use crate::{Error, Result, Vector};

/// `Ψ = ν(f+φ) + (1−ν)δ²`.
pub fn lyapunov(f_plus_phi: f64, delta: f64, nu: f64) -> f64 {
    nu * f_plus_phi + (1.0 - nu) * delta * delta
}

/// `I = ‖g_model − ∇f‖ ≤ κ_grad δ` and `J = |ared − cred| ≤ η·pred`.
#[allow(clippy::too_many_arguments)]
pub fn event_indicators(
    true_grad: &Vector,
    model_grad: &Vector,
    delta: f64,
    kappa_grad: f64,
    ared: f64,
    cred: f64,
    pred: f64,
    eta: f64,
) -> (bool, bool) {
    let i = (model_grad - true_grad).norm() <= kappa_grad * delta;
    let j = (ared - cred).abs() <= eta * pred;
    (i, j)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub lipschitz: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub eta: f64,
    pub gamma: f64,
    pub kappa_fcd: f64,
    pub kappa_bmh: f64,
    pub kappa_grad: f64,
    pub nu: f64,
    pub deterministic: bool,
    /// `¼(L + κ_bmh + 2κ_grad)`, or 0 in deterministic mode.
    pub kappa_val: f64,
    /// Smallest admissible `ζ`.
    pub zeta: f64,
    /// Right side of the `ν/(1−ν)` condition.
    pub nu_rhs: f64,
    pub nu_condition_holds: bool,
    /// `½(1−ν)(1−γ⁻²)`.
    pub theta_lower: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
}

/// Evaluates the theory constants for `config` and a Lipschitz constant `l`.
pub fn theory_constants(config: &TrustRegionConfig, l: f64) -> Result<TheoryConstants> {
    if !(l >= 0.0) {
        return Err(Error::Parameter(format!("Lipschitz constant must be nonnegative, got {l}")));
    }
    let slack = 1.0 - config.eta1 - config.eta;
    if !(slack > 0.0) {
        return Err(Error::Parameter(format!(
            "eta1 + eta = {} must be below 1 for a finite zeta",
            config.eta1 + config.eta
        )));
    }
    let deterministic = config.sampling_mode == SamplingMode::Full;
    let kappa_val = if deterministic {
        0.0
    } else {
        0.25 * (l + config.kappa_bmh + 2.0 * config.kappa_grad)
    };
    let zeta = config.kappa_grad + config.eta2.max(4.0 * kappa_val / (slack * config.kappa_fcd.min(1.0)));
    let nu = config.resolved_nu();
    let nu_rhs = config.nu_rhs();
    let g2 = config.gamma * config.gamma;
    let c4 = (1.0 - nu) * (1.0 - 1.0 / g2);
    Ok(TheoryConstants {
        lipschitz: l,
        eta1: config.eta1,
        eta2: config.eta2,
        eta: config.eta,
        gamma: config.gamma,
        kappa_fcd: config.kappa_fcd,
        kappa_bmh: config.kappa_bmh,
        kappa_grad: config.kappa_grad,
        nu,
        deterministic,
        kappa_val,
        zeta,
        nu_rhs,
        nu_condition_holds: nu / (1.0 - nu) > nu_rhs,
        theta_lower: 0.5 * c4,
        c4,
        c5: 2.0 * nu * kappa_val + (1.0 - nu) * (g2 - 1.0),
        c6: config.kappa_fcd - (2.0 * kappa_val + config.kappa_fcd * config.kappa_grad) / zeta,
    })
}

impl TheoryConstants {
    /// `(c₁, c₂) = ((L/2)(1−β), 1−β)`, known only when `φ ≡ 0`.
    pub fn smooth_c1_c2(&self, beta: f64) -> (f64, f64) {
        (0.5 * self.lipschitz * (1.0 - beta), 1.0 - beta)
    }

    /// Whether `(αβ − ½)/(1−α) > (c₁ + c₂ζ)/(c₆ζ)` holds.
    pub fn rates_feasible(&self, alpha: f64, beta: f64, c1: f64, c2: f64) -> bool {
        let lhs_num = alpha * beta - 0.5;
        if lhs_num <= 0.0 {
            return false;
        }
        if alpha >= 1.0 {
            return true;
        }
        lhs_num / (1.0 - alpha) > (c1 + c2 * self.zeta) / (self.c6 * self.zeta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionRates {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub n_i: usize,
    pub n_j: usize,
    /// `α̂·β̂ > ½`.
    pub product_above_half: bool,
}

/// Empirical frequencies of the model-accuracy and reduction-accuracy events.
pub fn assumption_rates(trace: &Trace) -> Result<AssumptionRates> {
    if trace.records.is_empty() {
        return Err(Error::Diagnostic("empty trace".into()));
    }
    let is: Vec<bool> = trace.records.iter().filter_map(|r| r.i_k).collect();
    let js: Vec<bool> = trace.records.iter().filter_map(|r| r.j_k).collect();
    if is.is_empty() || js.is_empty() {
        return Err(Error::Diagnostic("trace has no true-objective columns".into()));
    }
    let rate = |v: &[bool]| v.iter().filter(|&&b| b).count() as f64 / v.len() as f64;
    let alpha_hat = rate(&is);
    let beta_hat = rate(&js);
    Ok(AssumptionRates {
        alpha_hat,
        beta_hat,
        n_i: is.len(),
        n_j: js.len(),
        product_above_half: alpha_hat * beta_hat > 0.5,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summability {
    pub sum_delta_sq: f64,
    /// `Σ 1(‖h(x_k)‖ ≥ ε)·δ_k` over rows with a true stationarity value.
    pub sum_indicator_delta: f64,
    /// First `k` with `‖h(x_k)‖ ≤ ε`.
    pub t_eps: Option<usize>,
}

/// Streaming form of [`summability_report`].
#[derive(Debug, Clone, Copy)]
pub struct SummabilityAccumulator {
    eps: f64,
    rows: usize,
    state: Summability,
}

impl SummabilityAccumulator {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            rows: 0,
            state: Summability {
                sum_delta_sq: 0.0,
                sum_indicator_delta: 0.0,
                t_eps: None,
            },
        }
    }

    pub fn push(&mut self, delta: f64, h_true_norm: Option<f64>) {
        self.state.sum_delta_sq += delta * delta;
        if let Some(h) = h_true_norm {
            if h >= self.eps {
                self.state.sum_indicator_delta += delta;
            }
            if self.state.t_eps.is_none() && h <= self.eps {
                self.state.t_eps = Some(self.rows);
            }
        }
        self.rows += 1;
    }

    /// Accounts for the iterate left after the last row.
    pub fn finish(mut self, final_h_true_norm: Option<f64>) -> Summability {
        if self.state.t_eps.is_none() {
            if let Some(h) = final_h_true_norm {
                if h <= self.eps {
                    self.state.t_eps = Some(self.rows);
                }
            }
        }
        self.state
    }
}

/// `Σδ_k²`, `Σ 1(‖h(x_k)‖ ≥ ε)δ_k` and `T_ε` over a trace.
pub fn summability_report(trace: &Trace, eps: f64) -> Summability {
    let t_eps = trace
        .records
        .iter()
        .position(|r| r.h_true_norm.is_some_and(|h| h <= eps))
        .or_else(|| trace.final_h_true_norm.filter(|&h| h <= eps).map(|_| trace.records.len()));
    Summability {
        sum_delta_sq: trace.records.iter().map(|r| r.delta * r.delta).sum(),
        sum_indicator_delta: trace
            .records
            .iter()
            .filter(|r| r.h_true_norm.is_some_and(|h| h >= eps))
            .map(|r| r.delta)
            .sum(),
        t_eps,
    }
}

/// `Ψ_{k+1} − Ψ_k` per row, formed as `−ν·ared` on acceptance plus
/// `(1−ν)(δ_{k+1}² − δ_k²)` to avoid cancellation against `f + φ`.
pub fn psi_increments(trace: &Trace) -> Result<Vec<f64>> {
    let nu = trace.nu;
    trace
        .records
        .iter()
        .map(|r| {
            let radius = (1.0 - nu) * (r.delta_next * r.delta_next - r.delta * r.delta);
            if r.accepted {
                let ared = r
                    .ared
                    .ok_or_else(|| Error::Diagnostic(format!("row {} lacks the true reduction", r.k)))?;
                Ok(-nu * ared + radius)
            } else {
                Ok(radius)
            }
        })
        .collect()
}

/// Rows where `Ψ_{k+1} − Ψ_k > −θ·δ_k²`.
pub fn psi_decrease_violations(trace: &Trace, theta: f64) -> Result<Vec<usize>> {
    let inc = psi_increments(trace)?;
    Ok(trace
        .records
        .iter()
        .zip(inc)
        .filter(|(r, d)| *d > -theta * r.delta * r.delta)
        .map(|(r, _)| r.k)
        .collect())
}

/// Aggregate diagnostics for one run, emitted as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub problem: String,
    pub seed: u64,
    pub iterations: usize,
    pub stop: crate::driver::StopReason,
    pub acceptance_rate: f64,
    pub gated: usize,
    pub fcd_violations: usize,
    pub fcd_tight: usize,
    pub cauchy_failures: usize,
    pub sample_cap_hits: usize,
    pub final_h_true_norm: Option<f64>,
    pub final_f_plus_phi: Option<f64>,
    pub t_eps: Option<usize>,
    pub summability: Summability,
    pub rates: Option<AssumptionRates>,
    pub constants: Option<TheoryConstants>,
    /// `(c₁, c₂)` at `β̂` when `φ ≡ 0`.
    pub c1_c2: Option<(f64, f64)>,
    pub rates_feasible: Option<bool>,
    pub warnings: Vec<String>,
}

impl Report {
    /// Summarizes `trace`. `lipschitz` enables the theory constants;
    /// `smooth` marks `φ ≡ 0` so that `c₁, c₂` can be reported.
    pub fn build(
        problem: &str,
        config: &TrustRegionConfig,
        trace: &Trace,
        lipschitz: Option<f64>,
        smooth: bool,
        eps: f64,
    ) -> Self {
        let rates = assumption_rates(trace).ok();
        let constants = lipschitz.and_then(|l| theory_constants(config, l).ok());
        let c1_c2 = match (&constants, &rates) {
            (Some(c), Some(r)) if smooth => Some(c.smooth_c1_c2(r.beta_hat)),
            _ => None,
        };
        let rates_feasible = match (&constants, &rates) {
            (Some(c), Some(r)) => {
                let (c1, c2) = c1_c2.unwrap_or((0.0, 0.0));
                Some(c.rates_feasible(r.alpha_hat, r.beta_hat, c1, c2))
            }
            _ => None,
        };
        let count = |f: fn(&crate::IterationRecord) -> bool| trace.records.iter().filter(|r| f(r)).count();
        Self {
            problem: problem.to_string(),
            seed: config.seed,
            iterations: trace.iterations(),
            stop: trace.stop.clone(),
            acceptance_rate: trace.acceptance_rate(),
            gated: count(|r| r.gated),
            fcd_violations: count(|r| r.fcd_violation),
            fcd_tight: count(|r| r.fcd_tight),
            cauchy_failures: count(|r| r.cauchy_failure),
            sample_cap_hits: count(|r| r.sample_cap_hit),
            final_h_true_norm: trace.final_h_true_norm,
            final_f_plus_phi: trace.final_f_plus_phi,
            t_eps: trace.t_eps,
            summability: summability_report(trace, eps),
            rates,
            constants,
            c1_c2,
            rates_feasible,
            warnings: trace.warnings.clone(),
        }
    }
}
