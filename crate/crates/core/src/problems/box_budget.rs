use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{normal_draw, random_spd, DenseOperator, Pool, SampleId, StochasticProblem};
use crate::model::LinearOperator;
use crate::{ProxFunction, Vector};

/// Fraction of the fully-filled weight allowed by the budget.
pub const BUDGET_FRACTION: f64 = 0.2;

/// Target perturbation scale: `t(ξ) = t₀ + 0.1·ξ`.
const TARGET_SPREAD: f64 = 0.1;

/// Stochastic convex quadratic over a box with a weighted budget.
///
/// `F(x, ξ) = ½(x − t(ξ))ᵀA(x − t(ξ))`, `φ` the indicator of
/// `{0 ≤ x ≤ 1, wᵀx = 0.2·Σw}` with uniform weights `w = 1/d`.
#[derive(Debug, Clone)]
pub struct BoxBudgetQuadratic {
    a: DMatrix<f64>,
    target: Vector,
    weights: Vector,
    budget: f64,
    phi: ProxFunction,
    lipschitz: f64,
}

impl BoxBudgetQuadratic {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim >= 2, "need d >= 2");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_spd(dim, 100.0, &mut rng);
        let target = Vector::from_iterator(dim, (0..dim).map(|_| rng.random_range(-0.5..1.5)));
        let weights = Vector::from_element(dim, 1.0 / dim as f64);
        let budget = BUDGET_FRACTION * weights.sum();
        let phi = ProxFunction::box_budget(
            Vector::zeros(dim),
            Vector::from_element(dim, 1.0),
            weights.clone(),
            budget,
        )
        .expect("budget inside the box");
        let lipschitz = a.symmetric_eigenvalues().iter().cloned().fold(0.0, f64::max);
        Self { a, target, weights, budget, phi, lipschitz }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn mean_target(&self) -> &Vector {
        &self.target
    }

    pub fn weights(&self) -> &Vector {
        &self.weights
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    fn sample_target(&self, xi: SampleId) -> Vector {
        &self.target + normal_draw(xi, self.dim()) * TARGET_SPREAD
    }
}

impl StochasticProblem for BoxBudgetQuadratic {
    fn name(&self) -> &str {
        "box_budget_quadratic"
    }

    fn dim(&self) -> usize {
        self.target.len()
    }

    fn phi(&self) -> &ProxFunction {
        &self.phi
    }

    fn pool(&self) -> Pool {
        Pool::Generative
    }

    fn initial_point(&self) -> Vector {
        Vector::from_element(self.dim(), BUDGET_FRACTION)
    }

    fn value(&self, x: &Vector, xi: SampleId) -> f64 {
        let r = x - self.sample_target(xi);
        0.5 * r.dot(&(&self.a * &r))
    }

    fn value_difference(&self, x: &Vector, y: &Vector, xi: SampleId) -> f64 {
        let d = y - x;
        -(self.gradient(x, xi).dot(&d) + 0.5 * d.dot(&(&self.a * &d)))
    }

    fn gradient(&self, x: &Vector, xi: SampleId) -> Vector {
        &self.a * (x - self.sample_target(xi))
    }

    fn hess_vec(&self, _x: &Vector, _xi: SampleId, v: &Vector) -> Vector {
        &self.a * v
    }

    fn curvature<'a>(&'a self, _x: &Vector, _samples: &[SampleId]) -> Box<dyn LinearOperator + 'a> {
        Box::new(DenseOperator(&self.a))
    }

    fn true_oracle(&self, x: &Vector) -> Option<(f64, Vector)> {
        // E[½(x − t₀ − sξ)ᵀA(x − t₀ − sξ)] = ½(x − t₀)ᵀA(x − t₀) + ½s²·tr(A)
        let r = x - &self.target;
        let ar = &self.a * &r;
        let spread = 0.5 * TARGET_SPREAD * TARGET_SPREAD * self.a.trace();
        Some((0.5 * r.dot(&ar) + spread, ar))
    }

    fn true_reduction(&self, x: &Vector, y: &Vector) -> Option<f64> {
        let d = y - x;
        let g = &self.a * (x - &self.target);
        Some(-(g.dot(&d) + 0.5 * d.dot(&(&self.a * &d))))
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz)
    }

    fn lower_bound_note(&self) -> &'static str {
        "convex quadratic is nonnegative and the indicator is zero on its domain"
    }
}
