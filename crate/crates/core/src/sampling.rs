//! Variance-driven sample sizes for the model gradient.
//!
//! The sample count is grown until `n ≥ V̂ / ((1−α)(κ_grad δ)²)`, where `V̂`
//! is the unbiased sample variance of the per-sample gradient norms. By
//! Markov's inequality this makes `‖g − ∇f‖ ≤ κ_grad δ` hold with probability
//! roughly `α`.

use rand_chacha::ChaCha8Rng;

use crate::linalg::pairwise_sum_scalars;
use crate::model::sample_gradients;
use crate::problems::{SampleId, StochasticProblem};
use crate::{Error, Result, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingState {
    /// Current sample count.
    pub n: usize,
    pub n_max: usize,
    pub alpha: f64,
    pub kappa_grad: f64,
    /// Samples drawn so far, in draw order.
    pub samples: Vec<SampleId>,
    /// Set when the cap stopped the growth before the target was met.
    pub cap_hit: bool,
    /// `V̂` at exit.
    pub variance: f64,
}

impl SamplingState {
    pub fn new(n: usize, n_max: usize, alpha: f64, kappa_grad: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("dynamic sampling needs n ≥ 2, got {n}")));
        }
        if n > n_max {
            return Err(Error::Parameter(format!("initial n = {n} exceeds n_max = {n_max}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(kappa_grad > 0.0) {
            return Err(Error::Parameter(format!("kappa_grad must be positive, got {kappa_grad}")));
        }
        Ok(Self {
            n,
            n_max,
            alpha,
            kappa_grad,
            samples: Vec::new(),
            cap_hit: false,
            variance: 0.0,
        })
    }

    /// `V̂ / ((1−α)(κ_grad δ)²)`.
    pub fn required(&self, variance: f64, delta: f64) -> f64 {
        let tol = self.kappa_grad * delta;
        variance / ((1.0 - self.alpha) * tol * tol)
    }
}

/// Unbiased sample variance of the gradient norms `‖∇F(x, ξ_ℓ)‖`.
pub fn empirical_gradient_variance(grads: &[Vector]) -> Result<f64> {
    let norms: Vec<f64> = grads.iter().map(|g| g.norm()).collect();
    norm_variance(&norms)
}

fn norm_variance(norms: &[f64]) -> Result<f64> {
    let n = norms.len();
    if n < 2 {
        return Err(Error::Parameter(format!("variance needs at least two samples, got {n}")));
    }
    let mean = pairwise_sum_scalars(norms) / n as f64;
    let sq: Vec<f64> = norms.iter().map(|v| (v - mean) * (v - mean)).collect();
    Ok(pairwise_sum_scalars(&sq) / (n - 1) as f64)
}

/// Grows `state` until the Markov-bound target is met or the cap binds.
///
/// Any samples already in `state.samples` are kept; the first `state.n` are
/// drawn from `rng` when the state is fresh. Fresh samples are appended in
/// draw order, so the same `rng` state gives the same sample sequence for
/// every `delta`.
pub fn dynamic_sample_size<P: StochasticProblem + ?Sized>(
    problem: &P,
    x: &Vector,
    delta: f64,
    mut state: SamplingState,
    rng: &mut ChaCha8Rng,
) -> Result<SamplingState> {
    if !(delta > 0.0) {
        return Err(Error::Parameter(format!("delta must be positive, got {delta}")));
    }
    if state.samples.len() < state.n {
        let missing = state.n - state.samples.len();
        state.samples.extend(problem.draw(rng, missing));
    }
    state.samples.truncate(state.n);
    let mut norms: Vec<f64> = sample_gradients(problem, x, &state.samples)?
        .iter()
        .map(|g| g.norm())
        .collect();
    state.cap_hit = false;
    loop {
        let variance = norm_variance(&norms)?;
        state.variance = variance;
        let target = state.required(variance, delta).ceil();
        if target <= state.n as f64 {
            break;
        }
        if state.n >= state.n_max {
            state.cap_hit = true;
            break;
        }
        let room = state.n_max - state.n;
        let want = if target >= state.n_max as f64 {
            room
        } else {
            (target as usize - state.n).min(room)
        };
        let fresh = problem.draw(rng, want);
        let grads = sample_gradients(problem, x, &fresh)
            .map_err(|e| offset_sample_error(e, state.n))?;
        norms.extend(grads.iter().map(|g| g.norm()));
        state.samples.extend(fresh);
        state.n += want;
    }
    Ok(state)
}

fn offset_sample_error(err: Error, offset: usize) -> Error {
    match err {
        Error::Sample { index, what } => Error::Sample { index: index + offset, what },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::fixtures::TwoPointGradient;
    use crate::problems::SmoothQuadratic;
    use rand::SeedableRng;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_row_slice(xs)
    }

    #[test]
    fn variance_examples() {
        assert_eq!(empirical_gradient_variance(&[v(&[1.0, 2.0]), v(&[1.0, 2.0])]).unwrap(), 0.0);
        assert_eq!(empirical_gradient_variance(&[v(&[1.0]), v(&[-3.0])]).unwrap(), 2.0);
        assert!(empirical_gradient_variance(&[v(&[1.0])]).is_err());
    }

    #[test]
    fn zero_variance_keeps_n() {
        let p = SmoothQuadratic::new(3, 0.0, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let state = SamplingState::new(5, 1000, 0.9, 1.0).unwrap();
        let out = dynamic_sample_size(&p, &p.initial_point(), 1e-3, state, &mut rng).unwrap();
        assert_eq!(out.n, 5);
        assert_eq!(out.variance, 0.0);
        assert!(!out.cap_hit);
    }

    #[test]
    fn huge_delta_keeps_n() {
        let p = TwoPointGradient::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let state = SamplingState::new(10, 1000, 0.9, 1.0).unwrap();
        let out = dynamic_sample_size(&p, &p.initial_point(), 1e6, state, &mut rng).unwrap();
        assert_eq!(out.n, 10);
    }

    #[test]
    fn cap_is_flagged() {
        let p = TwoPointGradient::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let state = SamplingState::new(10, 50, 0.9, 1.0).unwrap();
        let out = dynamic_sample_size(&p, &p.initial_point(), 1e-3, state, &mut rng).unwrap();
        assert_eq!(out.n, 50);
        assert_eq!(out.samples.len(), 50);
        assert!(out.cap_hit);
    }
}
