//! Minibatch runs (100 samples per model) over several seeds, reporting the
//! true stationarity and the radius behaviour early and late in each run.

use proxstorm::harness::{quantile, run_seeds};
use proxstorm::problems::LogisticL1;
use proxstorm::{Result, TrustRegionConfig};

fn main() -> Result<()> {
    let problem = LogisticL1::new(20, 500, 1e-2, 7);
    let config = TrustRegionConfig {
        max_iters: 300,
        eta2: 4.0,
        gamma: 1.25,
        ell: 20,
        eta: 0.05,
        ..TrustRegionConfig::table2()
    };
    let seeds: Vec<u64> = (0..10).collect();
    let traces = run_seeds(&problem, &config, &seeds)?;

    let mut ratios = Vec::new();
    for (seed, t) in seeds.iter().zip(&traces) {
        let h0 = t.records[0].h_true_norm.unwrap_or(f64::NAN);
        let hk = t.final_h_true_norm.unwrap_or(f64::NAN);
        let m = t.records.len() / 10;
        let mean = |rs: &[proxstorm::IterationRecord]| rs.iter().map(|r| r.delta).sum::<f64>() / rs.len() as f64;
        let head = mean(&t.records[..m]);
        let tail = mean(&t.records[t.records.len() - m..]);
        println!(
            "seed {seed}: |h| {h0:.3e} -> {hk:.3e}  delta head {head:.3e} tail {tail:.3e}  accepted {:.0}%",
            100.0 * t.acceptance_rate()
        );
        ratios.push(hk / h0);
    }
    println!("median |h(x_K)|/|h(x_0)| = {:.3}", quantile(&ratios, 0.5));
    Ok(())
}
