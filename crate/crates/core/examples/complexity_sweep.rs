//! Iterations needed to reach `|h| ≤ ε` as `ε` shrinks, on a noisy smooth
//! quadratic.

use proxstorm::harness::sweep;
use proxstorm::problems::SmoothQuadratic;
use proxstorm::{Result, TrustRegionConfig};

fn main() -> Result<()> {
    let problem = SmoothQuadratic::new(5, 0.1, 3);
    let config = TrustRegionConfig { max_iters: 2000, ..TrustRegionConfig::table2() };
    let seeds: Vec<u64> = (0..20).collect();
    let rows = sweep(&problem, &config, &seeds, &[1e-1, 3e-2, 1e-2])?;
    println!("{:>8} {:>8} {:>8} {:>8} {:>9}", "eps", "median", "q1", "q3", "censored");
    for r in rows {
        println!("{:>8} {:>8} {:>8} {:>8} {:>9}", r.eps, r.median, r.q1, r.q3, r.censored);
    }
    Ok(())
}
