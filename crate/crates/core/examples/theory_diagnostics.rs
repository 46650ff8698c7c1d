//! Theory constants, empirical accuracy rates and the Lyapunov decrease
//! check for a deterministic and a stochastic run.

use proxstorm::diagnostics::{psi_decrease_violations, theory_constants, Report};
use proxstorm::driver::{self, SamplingMode};
use proxstorm::problems::LogisticL1;
use proxstorm::{Result, StochasticProblem, TrustRegionConfig};

fn main() -> Result<()> {
    let problem = LogisticL1::new(20, 500, 1e-2, 7);
    let l = problem.lipschitz().unwrap_or(0.0);

    let det = TrustRegionConfig { sampling_mode: SamplingMode::Full, max_iters: 100, ..TrustRegionConfig::table2() };
    let trace = driver::run(&problem, &det)?;
    let c = theory_constants(&det, l)?;
    let bad = psi_decrease_violations(&trace, c.theta_lower)?;
    println!("deterministic: nu = {}, theta_lower = {:.3e}", c.nu, c.theta_lower);
    println!("  Psi decrease violations over {} iterations: {}", trace.iterations(), bad.len());

    let stoch = TrustRegionConfig { max_iters: 100, seed: 1, ..TrustRegionConfig::table2() };
    let trace = driver::run(&problem, &stoch)?;
    let report = Report::build(problem.name(), &stoch, &trace, Some(l), false, 1e-3);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
