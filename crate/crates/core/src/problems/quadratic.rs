use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{normal_draw, random_spd, DenseOperator, Pool, SampleId, StochasticProblem};
use crate::model::LinearOperator;
use crate::{ProxFunction, Vector};

/// `F(x, ξ) = ½xᵀAx − bᵀx + noise·ξᵀx` with `ξ` standard normal and `φ ≡ 0`.
#[derive(Debug, Clone)]
pub struct SmoothQuadratic {
    a: DMatrix<f64>,
    b: Vector,
    noise: f64,
    phi: ProxFunction,
    lipschitz: f64,
}

impl SmoothQuadratic {
    /// Random instance with `A` symmetric positive definite, condition number 10.
    pub fn new(dim: usize, noise: f64, seed: u64) -> Self {
        assert!(dim >= 1, "need d >= 1");
        assert!(noise >= 0.0, "noise must be nonnegative");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_spd(dim, 10.0, &mut rng);
        let b = Vector::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)));
        Self::from_parts(a, b, noise)
    }

    pub fn from_parts(a: DMatrix<f64>, b: Vector, noise: f64) -> Self {
        let dim = b.len();
        let lipschitz = a.symmetric_eigenvalues().iter().cloned().fold(0.0, f64::max);
        Self {
            a,
            b,
            noise,
            phi: ProxFunction::zero(dim),
            lipschitz,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rhs(&self) -> &Vector {
        &self.b
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// `A⁻¹b`.
    pub fn minimizer(&self) -> Vector {
        self.a.clone().cholesky().expect("A is positive definite").solve(&self.b)
    }
}

impl StochasticProblem for SmoothQuadratic {
    fn name(&self) -> &str {
        "smooth_quadratic"
    }

    fn dim(&self) -> usize {
        self.b.len()
    }

    fn phi(&self) -> &ProxFunction {
        &self.phi
    }

    fn pool(&self) -> Pool {
        Pool::Generative
    }

    fn initial_point(&self) -> Vector {
        Vector::zeros(self.dim())
    }

    fn value(&self, x: &Vector, xi: SampleId) -> f64 {
        let base = 0.5 * x.dot(&(&self.a * x)) - self.b.dot(x);
        if self.noise == 0.0 {
            base
        } else {
            base + self.noise * normal_draw(xi, self.dim()).dot(x)
        }
    }

    fn value_difference(&self, x: &Vector, y: &Vector, xi: SampleId) -> f64 {
        let d = y - x;
        -(self.gradient(x, xi).dot(&d) + 0.5 * d.dot(&(&self.a * &d)))
    }

    fn gradient(&self, x: &Vector, xi: SampleId) -> Vector {
        let g = &self.a * x - &self.b;
        if self.noise == 0.0 {
            g
        } else {
            g + normal_draw(xi, self.dim()) * self.noise
        }
    }

    fn hess_vec(&self, _x: &Vector, _xi: SampleId, v: &Vector) -> Vector {
        &self.a * v
    }

    fn curvature<'a>(&'a self, _x: &Vector, _samples: &[SampleId]) -> Box<dyn LinearOperator + 'a> {
        Box::new(DenseOperator(&self.a))
    }

    fn true_oracle(&self, x: &Vector) -> Option<(f64, Vector)> {
        let ax = &self.a * x;
        Some((0.5 * x.dot(&ax) - self.b.dot(x), ax - &self.b))
    }

    fn true_reduction(&self, x: &Vector, y: &Vector) -> Option<f64> {
        let d = y - x;
        let g = &self.a * x - &self.b;
        Some(-(g.dot(&d) + 0.5 * d.dot(&(&self.a * &d))))
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz)
    }

    fn lower_bound_note(&self) -> &'static str {
        "strongly convex quadratic"
    }
}
