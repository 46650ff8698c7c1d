//! Variance-driven sample sizes on a fixture whose gradient-norm variance is
//! known exactly, for a range of trust-region radii.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use proxstorm::problems::fixtures::TwoPointGradient;
use proxstorm::sampling::{dynamic_sample_size, SamplingState};
use proxstorm::{Result, StochasticProblem};

fn main() -> Result<()> {
    let problem = TwoPointGradient::default();
    let x = problem.initial_point();
    println!("true variance {}", problem.norm_variance());
    println!("{:>8} {:>8} {:>10} {:>10} {:>5}", "delta", "n", "V_hat", "required", "cap");
    for delta in [4.0, 2.0, 1.0, 0.5, 0.25, 0.1] {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let state = SamplingState::new(10, 100_000, 0.9, 1.0)?;
        let out = dynamic_sample_size(&problem, &x, delta, state, &mut rng)?;
        println!(
            "{delta:>8} {:>8} {:>10.4} {:>10.1} {:>5}",
            out.n,
            out.variance,
            out.required(out.variance, delta),
            out.cap_hit
        );
    }
    Ok(())
}
