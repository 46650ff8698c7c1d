//! Stochastic problems `f(x) = E[F(x, ξ)]` paired with a nonsmooth term `φ`.
//!
//! A problem exposes per-sample values, gradients and Hessian-vector
//! products, a way to draw i.i.d. samples, and (when available) the true
//! objective used for verification.

mod box_budget;
pub mod fixtures;
mod logistic;
mod quadratic;

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::pairwise_mean_scalars;
use crate::model::LinearOperator;
use crate::{ProxFunction, Vector};

pub use box_budget::BoxBudgetQuadratic;
pub use logistic::LogisticL1;
pub use quadratic::SmoothQuadratic;

/// Identifier of one sample `ξ`. For finite pools it is the pool index; for
/// generative problems it seeds the draw of `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SampleId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pool {
    Finite(usize),
    Generative,
}

pub trait StochasticProblem: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn phi(&self) -> &ProxFunction;

    fn pool(&self) -> Pool;

    fn initial_point(&self) -> Vector;

    /// `F(x, ξ)`.
    fn value(&self, x: &Vector, xi: SampleId) -> f64;

    /// `F(x, ξ) − F(y, ξ)`. Problems with closed-form differences override
    /// this to keep reductions accurate near a minimizer.
    fn value_difference(&self, x: &Vector, y: &Vector, xi: SampleId) -> f64 {
        self.value(x, xi) - self.value(y, xi)
    }

    /// `∇F(x, ξ)`.
    fn gradient(&self, x: &Vector, xi: SampleId) -> Vector;

    /// `∇²F(x, ξ) v`.
    fn hess_vec(&self, x: &Vector, xi: SampleId, v: &Vector) -> Vector;

    /// Mean curvature operator over `samples`, applied matrix-free.
    fn curvature<'a>(&'a self, x: &Vector, samples: &[SampleId]) -> Box<dyn LinearOperator + 'a> {
        Box::new(SampledHessian {
            problem: self,
            x: x.clone(),
            samples: samples.to_vec(),
        })
    }

    /// `(f(x), ∇f(x))` over the whole distribution, when computable.
    fn true_oracle(&self, _x: &Vector) -> Option<(f64, Vector)> {
        None
    }

    /// `f(x) − f(y)` computed with as little cancellation as the problem allows.
    fn true_reduction(&self, x: &Vector, y: &Vector) -> Option<f64> {
        match self.pool() {
            Pool::Finite(n) => {
                let diffs: Vec<f64> = (0..n as u64)
                    .map(|i| self.value_difference(x, y, SampleId(i)))
                    .collect();
                Some(pairwise_mean_scalars(&diffs))
            }
            Pool::Generative => {
                let (fx, _) = self.true_oracle(x)?;
                let (fy, _) = self.true_oracle(y)?;
                Some(fx - fy)
            }
        }
    }

    fn lipschitz(&self) -> Option<f64> {
        None
    }

    /// Why `f + φ` is bounded below on `dom φ`.
    fn lower_bound_note(&self) -> &'static str {
        "unspecified"
    }

    /// Draws `n` i.i.d. samples.
    fn draw(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<SampleId> {
        match self.pool() {
            Pool::Finite(size) => (0..n).map(|_| SampleId(rng.random_range(0..size as u64))).collect(),
            Pool::Generative => (0..n).map(|_| SampleId(rng.random())).collect(),
        }
    }

    /// Every sample of a finite pool, in index order.
    fn full_pool(&self) -> Option<Vec<SampleId>> {
        match self.pool() {
            Pool::Finite(n) => Some((0..n as u64).map(SampleId).collect()),
            Pool::Generative => None,
        }
    }
}

impl fmt::Debug for dyn StochasticProblem + '_ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StochasticProblem({}, d={})", self.name(), self.dim())
    }
}

/// Curvature operator built by averaging per-sample Hessian-vector products.
pub struct SampledHessian<'a, P: ?Sized> {
    problem: &'a P,
    x: Vector,
    samples: Vec<SampleId>,
}

impl<P: StochasticProblem + ?Sized> LinearOperator for SampledHessian<'_, P> {
    fn dim(&self) -> usize {
        self.x.len()
    }

    fn apply(&self, v: &Vector) -> Vector {
        let mut acc = Vector::zeros(self.x.len());
        for &xi in &self.samples {
            acc += self.problem.hess_vec(&self.x, xi, v);
        }
        acc / self.samples.len().max(1) as f64
    }
}

/// Dense symmetric matrix acting as a curvature operator.
pub struct DenseOperator<'a>(pub &'a DMatrix<f64>);

impl LinearOperator for DenseOperator<'_> {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, v: &Vector) -> Vector {
        self.0 * v
    }
}

/// Standard normal vector determined by a generative sample id.
pub(crate) fn normal_draw(xi: SampleId, dim: usize) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(xi.0);
    Vector::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Random symmetric positive definite matrix with eigenvalues spread over
/// `[1, cond]`, both endpoints attained.
pub(crate) fn random_spd(dim: usize, cond: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = g.qr().q();
    let eig = Vector::from_iterator(
        dim,
        (0..dim).map(|i| {
            if dim == 1 {
                1.0
            } else {
                1.0 + (cond - 1.0) * i as f64 / (dim - 1) as f64
            }
        }),
    );
    let a = &q * DMatrix::from_diagonal(&eig) * q.transpose();
    // exact symmetry
    (&a + a.transpose()) * 0.5
}
