//! Small problems with known statistics, used by tests, examples and the
//! verification suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Pool, SampleId, StochasticProblem};
use crate::model::LinearOperator;
use crate::{ProxFunction, Vector};

/// One-dimensional linear `F(x, ξ) = (μ + σ·ε(ξ))·x` with `ε = ±1` equally
/// likely, over the box `[−1, 1]`.
///
/// The per-sample gradient norm takes the two values `μ ± σ`, so its variance
/// is exactly `σ²`. With the defaults (`μ = 3`, `σ = √2`) it is 2.
#[derive(Debug, Clone)]
pub struct TwoPointGradient {
    mean: f64,
    spread: f64,
    phi: ProxFunction,
}

impl Default for TwoPointGradient {
    fn default() -> Self {
        Self::new(3.0, std::f64::consts::SQRT_2)
    }
}

impl TwoPointGradient {
    /// Requires `mean > spread ≥ 0` so both gradient values are positive.
    pub fn new(mean: f64, spread: f64) -> Self {
        assert!(mean > spread && spread >= 0.0);
        let phi = ProxFunction::boxed(Vector::from_element(1, -1.0), Vector::from_element(1, 1.0))
            .expect("valid box");
        Self { mean, spread, phi }
    }

    /// Variance of the gradient norm.
    pub fn norm_variance(&self) -> f64 {
        self.spread * self.spread
    }

    fn slope(&self, xi: SampleId) -> f64 {
        if xi.0 & 1 == 0 {
            self.mean + self.spread
        } else {
            self.mean - self.spread
        }
    }
}

struct ZeroOperator(usize);

impl LinearOperator for ZeroOperator {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, _v: &Vector) -> Vector {
        Vector::zeros(self.0)
    }
}

impl StochasticProblem for TwoPointGradient {
    fn name(&self) -> &str {
        "two_point_gradient"
    }

    fn dim(&self) -> usize {
        1
    }

    fn phi(&self) -> &ProxFunction {
        &self.phi
    }

    fn pool(&self) -> Pool {
        Pool::Generative
    }

    fn initial_point(&self) -> Vector {
        Vector::zeros(1)
    }

    fn value(&self, x: &Vector, xi: SampleId) -> f64 {
        self.slope(xi) * x[0]
    }

    fn gradient(&self, _x: &Vector, xi: SampleId) -> Vector {
        Vector::from_element(1, self.slope(xi))
    }

    fn hess_vec(&self, _x: &Vector, _xi: SampleId, _v: &Vector) -> Vector {
        Vector::zeros(1)
    }

    fn curvature<'a>(&'a self, _x: &Vector, _samples: &[SampleId]) -> Box<dyn LinearOperator + 'a> {
        Box::new(ZeroOperator(1))
    }

    fn true_oracle(&self, x: &Vector) -> Option<(f64, Vector)> {
        Some((self.mean * x[0], Vector::from_element(1, self.mean)))
    }

    fn true_reduction(&self, x: &Vector, y: &Vector) -> Option<f64> {
        Some(self.mean * (x[0] - y[0]))
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(0.0)
    }

    fn lower_bound_note(&self) -> &'static str {
        "linear objective over a bounded box"
    }
}

/// Wraps a generative problem so that each sample is, with probability
/// `rate`, replaced by `F(x, ξ) + vᵀx` for a fixed large `v`.
///
/// The true objective is the uncorrupted one, so models built from one
/// corrupted sample violate the gradient-accuracy event by design.
#[derive(Debug, Clone)]
pub struct Corrupted<P> {
    inner: P,
    rate: f64,
    shift: Vector,
}

const CORRUPTION_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

impl<P: StochasticProblem> Corrupted<P> {
    pub fn new(inner: P, rate: f64, magnitude: f64) -> Self {
        assert!((0.0..=1.0).contains(&rate));
        let d = inner.dim();
        let shift = Vector::from_element(d, magnitude / (d as f64).sqrt());
        Self { inner, rate, shift }
    }

    pub fn is_corrupted(&self, xi: SampleId) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(xi.0 ^ CORRUPTION_SALT);
        rng.random::<f64>() < self.rate
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: StochasticProblem> StochasticProblem for Corrupted<P> {
    fn name(&self) -> &str {
        "corrupted"
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn phi(&self) -> &ProxFunction {
        self.inner.phi()
    }

    fn pool(&self) -> Pool {
        self.inner.pool()
    }

    fn initial_point(&self) -> Vector {
        self.inner.initial_point()
    }

    fn value(&self, x: &Vector, xi: SampleId) -> f64 {
        let v = self.inner.value(x, xi);
        if self.is_corrupted(xi) {
            v + self.shift.dot(x)
        } else {
            v
        }
    }

    fn value_difference(&self, x: &Vector, y: &Vector, xi: SampleId) -> f64 {
        let v = self.inner.value_difference(x, y, xi);
        if self.is_corrupted(xi) {
            v + self.shift.dot(&(x - y))
        } else {
            v
        }
    }

    fn gradient(&self, x: &Vector, xi: SampleId) -> Vector {
        let g = self.inner.gradient(x, xi);
        if self.is_corrupted(xi) {
            g + &self.shift
        } else {
            g
        }
    }

    fn hess_vec(&self, x: &Vector, xi: SampleId, v: &Vector) -> Vector {
        self.inner.hess_vec(x, xi, v)
    }

    fn curvature<'a>(&'a self, x: &Vector, samples: &[SampleId]) -> Box<dyn LinearOperator + 'a> {
        self.inner.curvature(x, samples)
    }

    fn true_oracle(&self, x: &Vector) -> Option<(f64, Vector)> {
        self.inner.true_oracle(x)
    }

    fn true_reduction(&self, x: &Vector, y: &Vector) -> Option<f64> {
        self.inner.true_reduction(x, y)
    }

    fn lipschitz(&self) -> Option<f64> {
        self.inner.lipschitz()
    }

    fn lower_bound_note(&self) -> &'static str {
        self.inner.lower_bound_note()
    }
}
