//! Plugging in a user-defined problem: a noisy 2-D Rosenbrock valley with a
//! nonnegativity box, implemented against the `StochasticProblem` trait.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use proxstorm::problems::{Pool, SampleId};
use proxstorm::{driver, ProxFunction, Result, StochasticProblem, TrustRegionConfig, Vector};

struct NoisyRosenbrock {
    phi: ProxFunction,
}

fn shift(xi: SampleId) -> f64 {
    ChaCha8Rng::seed_from_u64(xi.0).random_range(-0.05..0.05)
}

impl StochasticProblem for NoisyRosenbrock {
    fn name(&self) -> &str {
        "noisy_rosenbrock"
    }
    fn dim(&self) -> usize {
        2
    }
    fn phi(&self) -> &ProxFunction {
        &self.phi
    }
    fn pool(&self) -> Pool {
        Pool::Generative
    }
    fn initial_point(&self) -> Vector {
        Vector::from_vec(vec![0.0, 2.0])
    }
    fn value(&self, x: &Vector, xi: SampleId) -> f64 {
        let a = 1.0 + shift(xi);
        (a - x[0]).powi(2) + 10.0 * (x[1] - x[0] * x[0]).powi(2)
    }
    fn gradient(&self, x: &Vector, xi: SampleId) -> Vector {
        let a = 1.0 + shift(xi);
        let t = x[1] - x[0] * x[0];
        Vector::from_vec(vec![-2.0 * (a - x[0]) - 40.0 * x[0] * t, 20.0 * t])
    }
    fn hess_vec(&self, x: &Vector, _xi: SampleId, v: &Vector) -> Vector {
        let h00 = 2.0 - 40.0 * (x[1] - 3.0 * x[0] * x[0]);
        let h01 = -40.0 * x[0];
        Vector::from_vec(vec![h00 * v[0] + h01 * v[1], h01 * v[0] + 20.0 * v[1]])
    }
    fn true_oracle(&self, x: &Vector) -> Option<(f64, Vector)> {
        // E[(a − x)²] = (1 − x)² + Var(a) and E[∇] uses a = 1.
        let t = x[1] - x[0] * x[0];
        let f = (1.0 - x[0]).powi(2) + 0.05 * 0.05 / 3.0 + 10.0 * t * t;
        Some((f, Vector::from_vec(vec![-2.0 * (1.0 - x[0]) - 40.0 * x[0] * t, 20.0 * t])))
    }
}

fn main() -> Result<()> {
    let phi = ProxFunction::boxed(Vector::zeros(2), Vector::from_element(2, 5.0))?;
    let problem = NoisyRosenbrock { phi };
    let config = TrustRegionConfig { max_iters: 300, n_samples_model: 20, n_samples_cred: 20, ..TrustRegionConfig::table2() };
    let trace = driver::run(&problem, &config)?;
    println!("x* ≈ {:?}", trace.final_point.as_slice());
    println!("|h| = {:.3e}, accepted {:.0}%", trace.final_h_true_norm.unwrap_or(f64::NAN), 100.0 * trace.acceptance_rate());
    Ok(())
}
