//! A small density-allocation problem: box bounds per element and a weighted
//! volume budget, solved with noisy targets.

use proxstorm::driver;
use proxstorm::problems::BoxBudgetQuadratic;
use proxstorm::{Result, StochasticProblem, TrustRegionConfig};

fn main() -> Result<()> {
    let problem = BoxBudgetQuadratic::new(12, 3);
    let config = TrustRegionConfig {
        max_iters: 200,
        n_samples_model: 1000,
        n_samples_cred: 1000,
        ..TrustRegionConfig::table2()
    };
    let trace = driver::run(&problem, &config)?;
    let x = &trace.final_point;

    println!("budget  {:.4}", problem.budget());
    println!("used    {:.4}", problem.weights().dot(x));
    println!("density {:?}", x.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());
    println!("feasible {}", problem.phi().contains(x));
    println!(
        "f + phi {:.6}, |h| {:.3e}",
        trace.final_f_plus_phi.unwrap_or(f64::NAN),
        trace.final_h_true_norm.unwrap_or(f64::NAN)
    );
    Ok(())
}
