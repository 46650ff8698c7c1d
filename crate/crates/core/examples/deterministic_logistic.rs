//! Full-pool ℓ¹-regularized logistic regression. With every sample in every
//! model the method is a deterministic proximal trust-region solver.

use std::time::Instant;

use proxstorm::driver::{self, SamplingMode};
use proxstorm::problems::LogisticL1;
use proxstorm::{Result, TrustRegionConfig};

fn main() -> Result<()> {
    let problem = LogisticL1::new(20, 500, 1e-2, 7);
    let config = TrustRegionConfig {
        sampling_mode: SamplingMode::Full,
        max_iters: 500,
        epsilon_stop: 1e-6,
        ..TrustRegionConfig::table2()
    };

    let start = Instant::now();
    let trace = driver::run(&problem, &config)?;
    let elapsed = start.elapsed();

    println!("{:>4} {:>4} {:>12} {:>14} {:>6}", "k", "j", "delta", "|h(x_k)|", "acc");
    for r in &trace.records {
        println!(
            "{:>4} {:>4} {:>12.4e} {:>14.6e} {:>6}",
            r.k,
            r.delta_exponent,
            r.delta,
            r.h_true_norm.unwrap_or(f64::NAN),
            r.accepted
        );
    }
    println!("stop: {:?} after {} iterations in {elapsed:?}", trace.stop, trace.iterations());
    println!("final f + phi = {:.10}", trace.final_f_plus_phi.unwrap_or(f64::NAN));
    println!("final |h|     = {:.3e}", trace.final_h_true_norm.unwrap_or(f64::NAN));
    let nnz = trace.final_point.iter().filter(|v| v.abs() > 1e-12).count();
    println!("nonzeros      = {nnz} / {}", trace.final_point.len());
    Ok(())
}
