//! Sampled quadratic models `m_k(x_k + s) = gᵀs + ½sᵀQs`.
//!
//! `g` is the mean of sampled gradients at the anchor and `Q` the mean of the
//! sampled Hessians, applied matrix-free. Sample gradients may be evaluated in
//! parallel; the reduction is a pairwise sum in sample order, so the result
//! does not depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::linalg::{all_finite, pairwise_mean};
use crate::problems::{SampleId, StochasticProblem};
use crate::{Error, Result, Vector};

/// Power iterations used to estimate `‖Q‖₂`.
pub const POWER_ITERATIONS: usize = 30;

/// Multiplicative safety margin applied to an unconverged power estimate.
pub const BOUND_INFLATION: f64 = 1.05;

/// Relative eigen-residual below which the power estimate is taken as exact.
const CONVERGED_RESIDUAL: f64 = 1e-12;

/// Below this many scalar gradient entries the samples are evaluated serially.
const PARALLEL_THRESHOLD: usize = 1 << 15;

/// A symmetric linear map `v ↦ Qv`.
pub trait LinearOperator: Send + Sync {
    fn dim(&self) -> usize;
    fn apply(&self, v: &Vector) -> Vector;
}

pub struct QuadraticModel<'a> {
    anchor: Vector,
    gradient: Vector,
    curvature: Box<dyn LinearOperator + 'a>,
    estimate: f64,
    bound: f64,
    samples: Vec<SampleId>,
    sample_seed: u64,
}

impl std::fmt::Debug for QuadraticModel<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadraticModel")
            .field("anchor", &self.anchor)
            .field("gradient", &self.gradient)
            .field("bound", &self.bound)
            .field("n_samples", &self.samples.len())
            .finish()
    }
}

impl<'a> QuadraticModel<'a> {
    /// Assembles a model from its parts and estimates its curvature bound.
    pub fn new(
        anchor: Vector,
        gradient: Vector,
        curvature: Box<dyn LinearOperator + 'a>,
        samples: Vec<SampleId>,
        sample_seed: u64,
    ) -> Self {
        let mut model = Self {
            anchor,
            gradient,
            curvature,
            estimate: 0.0,
            bound: 0.0,
            samples,
            sample_seed,
        };
        model.estimate = curvature_estimate(&model);
        model.bound = model.estimate;
        model
    }

    pub fn anchor(&self) -> &Vector {
        &self.anchor
    }

    /// `g = ∇m(x_k)`.
    pub fn gradient(&self) -> &Vector {
        &self.gradient
    }

    pub fn apply_curvature(&self, v: &Vector) -> Vector {
        self.curvature.apply(v)
    }

    /// Stored curvature bound `b`, after clipping.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Inflated power-iteration estimate of `‖Q‖₂`, before clipping.
    pub fn curvature_estimate(&self) -> f64 {
        self.estimate
    }

    /// Enforces `1 + b ≤ κ_bmh` by clipping `b`.
    pub fn clip_bound(&mut self, kappa_bmh: f64) {
        self.bound = self.estimate.min(kappa_bmh - 1.0).max(0.0);
    }

    pub fn samples(&self) -> &[SampleId] {
        &self.samples
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn sample_seed(&self) -> u64 {
        self.sample_seed
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    /// `gᵀs + ½sᵀQs`.
    pub fn value(&self, s: &Vector) -> f64 {
        self.gradient.dot(s) + 0.5 * s.dot(&self.curvature.apply(s))
    }

    /// `∇m(x_k + s) = g + Qs`.
    pub fn gradient_at(&self, s: &Vector) -> Vector {
        &self.gradient + self.curvature.apply(s)
    }
}

/// Draws `n` samples from the stream seeded by `seed` and builds the model.
pub fn build_model<'a, P: StochasticProblem + ?Sized>(
    problem: &'a P,
    x: &Vector,
    n: usize,
    seed: u64,
) -> Result<QuadraticModel<'a>> {
    if n == 0 {
        return Err(Error::Parameter("a model needs at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = problem.draw(&mut rng, n);
    build_model_from_samples(problem, x, samples, seed)
}

/// Builds the model from an explicit sample set; samples are evaluated once.
pub fn build_model_from_samples<'a, P: StochasticProblem + ?Sized>(
    problem: &'a P,
    x: &Vector,
    samples: Vec<SampleId>,
    seed: u64,
) -> Result<QuadraticModel<'a>> {
    if samples.is_empty() {
        return Err(Error::Parameter("a model needs at least one sample".into()));
    }
    let grads = sample_gradients(problem, x, &samples)?;
    let gradient = pairwise_mean(&grads, problem.dim());
    let curvature = problem.curvature(x, &samples);
    Ok(QuadraticModel::new(x.clone(), gradient, curvature, samples, seed))
}

/// Per-sample gradients in sample order; a non-finite entry is an error
/// naming the offending sample position.
pub fn sample_gradients<P: StochasticProblem + ?Sized>(
    problem: &P,
    x: &Vector,
    samples: &[SampleId],
) -> Result<Vec<Vector>> {
    let eval = |(i, &xi): (usize, &SampleId)| {
        let g = problem.gradient(x, xi);
        if all_finite(&g) {
            Ok(g)
        } else {
            Err(Error::Sample { index: i, what: "gradient" })
        }
    };
    if samples.len() * problem.dim() >= PARALLEL_THRESHOLD {
        samples.par_iter().enumerate().map(eval).collect()
    } else {
        samples.iter().enumerate().map(eval).collect()
    }
}

/// Estimate of `sup_{0<‖s‖≤δ} 2|m(x+s) − m(x) − gᵀs| / ‖s‖²`.
///
/// For a quadratic model the supremum is `‖Q‖₂` regardless of `δ`; the value
/// returned is the unclipped estimate stored on the model.
pub fn curvature_bound(model: &QuadraticModel<'_>, delta: f64) -> f64 {
    debug_assert!(delta > 0.0);
    model.curvature_estimate()
}

fn curvature_estimate(model: &QuadraticModel<'_>) -> f64 {
    let d = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(model.sample_seed ^ 0x5bd1_e995);
    let mut v = Vector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)));
    let norm = v.norm();
    if norm == 0.0 {
        return 0.0;
    }
    v /= norm;
    let mut theta = 0.0;
    let mut residual = f64::INFINITY;
    for _ in 0..POWER_ITERATIONS {
        let qv = model.apply_curvature(&v);
        let rayleigh = v.dot(&qv);
        theta = rayleigh.abs();
        residual = (&qv - &v * rayleigh).norm();
        let qn = qv.norm();
        if qn == 0.0 {
            return 0.0;
        }
        if residual <= CONVERGED_RESIDUAL * theta {
            break;
        }
        v = qv / qn;
    }
    if residual <= CONVERGED_RESIDUAL * theta {
        theta
    } else {
        theta * BOUND_INFLATION
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    struct Dense(DMatrix<f64>);

    impl LinearOperator for Dense {
        fn dim(&self) -> usize {
            self.0.nrows()
        }
        fn apply(&self, v: &Vector) -> Vector {
            &self.0 * v
        }
    }

    fn model(g: &[f64], q: DMatrix<f64>) -> QuadraticModel<'static> {
        let d = g.len();
        QuadraticModel::new(Vector::zeros(d), Vector::from_row_slice(g), Box::new(Dense(q)), vec![SampleId(0)], 11)
    }

    #[test]
    fn model_value_examples() {
        let m = model(&[1.0, 0.0], DMatrix::zeros(2, 2));
        assert_eq!(m.value(&Vector::zeros(2)), 0.0);
        assert_eq!(m.value(&Vector::from_row_slice(&[2.0, 3.0])), 2.0);
        let m = model(&[1.0, 1.0], DMatrix::identity(2, 2));
        assert_eq!(m.value(&Vector::from_row_slice(&[1.0, 1.0])), 3.0);
    }

    #[test]
    fn curvature_bound_examples() {
        assert_eq!(curvature_bound(&model(&[1.0, 0.0], DMatrix::zeros(2, 2)), 1.0), 0.0);
        let b = curvature_bound(&model(&[1.0, 0.0], DMatrix::identity(2, 2)), 1.0);
        assert!((b - 1.0).abs() <= 1e-6, "{b}");
        let b = curvature_bound(&model(&[1.0, 0.0], DMatrix::from_diagonal(&Vector::from_row_slice(&[1.0, 4.0]))), 0.3);
        assert!((4.0..=4.2).contains(&b), "{b}");
    }

    #[test]
    fn clipping_enforces_kappa_bmh() {
        let mut m = model(&[1.0], DMatrix::from_element(1, 1, 50.0));
        m.clip_bound(10.0);
        assert_eq!(m.bound(), 9.0);
        assert!(1.0 + m.bound() <= 10.0);
    }
}
