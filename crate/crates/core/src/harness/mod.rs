//! Config-driven runs, seed sweeps and verification, as used by the
//! `proxstorm` binary.
//!
//! Seeds are dispatched to a rayon pool whose size is capped by the
//! `PROXSTORM_THREADS` environment variable. Each seed writes its own trace
//! file; reports are assembled after all seeds finish, in seed order.

pub mod config;
pub mod io;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{summability_report, Report};
use crate::driver::{run, Trace};
use crate::{Error, Result, StochasticProblem, TrustRegionConfig};
use config::RunConfig;

/// Exit codes of the command-line interface.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const RUNTIME: i32 = 3;
}

pub const THREADS_ENV: &str = "PROXSTORM_THREADS";

/// Worker pool sized by `PROXSTORM_THREADS`, or rayon's default.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(Error::Config(format!("{THREADS_ENV} must be positive")));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Config(e.to_string()))
}

/// Runs `problem` once per seed, in parallel, returning traces in seed order.
pub fn run_seeds(problem: &dyn StochasticProblem, base: &TrustRegionConfig, seeds: &[u64]) -> Result<Vec<Trace>> {
    let pool = thread_pool()?;
    pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| run(problem, &TrustRegionConfig { seed, ..base.clone() }))
            .collect()
    })
}

/// Overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    /// Replaces the seed list with `0..n`.
    pub seeds: Option<u64>,
}

impl Overrides {
    fn apply(&self, config: &mut RunConfig) {
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        if let Some(n) = self.seeds {
            config.seeds = (0..n).collect();
        }
    }
}

fn load(path: &Path, overrides: &Overrides) -> Result<(RunConfig, Vec<String>)> {
    let mut config = RunConfig::load(path)?;
    overrides.apply(&mut config);
    let warnings = config.resolve()?;
    Ok((config, warnings))
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateReport {
    pub problem: String,
    pub seeds: Vec<u64>,
    pub median_final_h_true_norm: Option<f64>,
    pub median_final_f_plus_phi: Option<f64>,
    pub mean_acceptance_rate: f64,
    pub runs: Vec<Report>,
}

/// Executes one run per seed and writes traces, `report.json` and
/// `resolved_config.toml` under the output directory.
pub fn execute(config: &RunConfig) -> Result<(AggregateReport, Vec<Trace>)> {
    let problem = config.problem.build()?;
    fs::create_dir_all(&config.output_dir)?;
    fs::write(config.output_dir.join("resolved_config.toml"), config.to_toml()?)?;
    let traces = run_seeds(problem.as_ref(), &config.algorithm, &config.seeds)?;
    for (seed, trace) in config.seeds.iter().zip(&traces) {
        let path = trace_path(config, *seed);
        io::write_trace(path, trace, config.trace_format)?;
    }
    let smooth = problem.phi().is_zero();
    let runs: Vec<Report> = config
        .seeds
        .iter()
        .zip(&traces)
        .map(|(&seed, t)| Report::build(problem.name(), &config.for_seed(seed), t, problem.lipschitz(), smooth, config.report_eps))
        .collect();
    let report = AggregateReport {
        problem: problem.name().to_string(),
        seeds: config.seeds.clone(),
        median_final_h_true_norm: median_opt(traces.iter().map(|t| t.final_h_true_norm)),
        median_final_f_plus_phi: median_opt(traces.iter().map(|t| t.final_f_plus_phi)),
        mean_acceptance_rate: traces.iter().map(Trace::acceptance_rate).sum::<f64>() / traces.len() as f64,
        runs,
    };
    fs::write(config.output_dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    Ok((report, traces))
}

pub fn trace_path(config: &RunConfig, seed: u64) -> PathBuf {
    config
        .output_dir
        .join(format!("trace_seed{seed}.{}", config.trace_format.extension()))
}

fn median_opt(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Option<Vec<f64>> = values.collect();
    v.filter(|v| !v.is_empty()).map(|v| quantile(&v, 0.5))
}

/// Linear-interpolation quantile of unsorted data.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

/// `proxstorm run`.
pub fn cmd_run(path: &Path, overrides: &Overrides) -> i32 {
    let (config, warnings) = match load(path, overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::CONFIG;
        }
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    match execute(&config) {
        Ok((report, traces)) => {
            for (seed, t) in config.seeds.iter().zip(&traces) {
                println!(
                    "seed {seed}: {} iterations, acceptance {:.3}, final ‖h‖ {}, f+φ {}",
                    t.iterations(),
                    t.acceptance_rate(),
                    fmt_opt(t.final_h_true_norm),
                    fmt_opt(t.final_f_plus_phi),
                );
            }
            println!("median final ‖h‖ {}", fmt_opt(report.median_final_h_true_norm));
            println!("wrote {}", config.output_dir.display());
            let failed: Vec<_> = traces.iter().filter_map(|t| match &t.stop {
                crate::driver::StopReason::Aborted { error } => Some(error.clone()),
                _ => None,
            }).collect();
            if failed.is_empty() {
                exit::OK
            } else {
                for e in failed {
                    eprintln!("error: run aborted: {e}");
                }
                exit::RUNTIME
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Parameter(_) => exit::CONFIG,
                _ => exit::RUNTIME,
            }
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "n/a".into())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    /// `T_ε` per seed; `None` when the threshold was not reached.
    pub t_eps: Vec<Option<usize>>,
    /// Median over seeds, counting censored runs at the iteration cap.
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub censored: usize,
    /// The median itself is a censored value.
    pub median_censored: bool,
}

/// `T_ε` for every `ε` and seed.
///
/// Each seed runs once with `epsilon_stop = min ε`; since stopping does not
/// change the iterates before it, the first crossing of every larger `ε` is
/// read from the same trace.
pub fn sweep(problem: &dyn StochasticProblem, base: &TrustRegionConfig, seeds: &[u64], eps: &[f64]) -> Result<Vec<SweepRow>> {
    if problem.true_oracle(&problem.initial_point()).is_none() {
        return Err(Error::Config(format!("{} has no true oracle; T_ε is undefined", problem.name())));
    }
    if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Config("epsilons must be a nonempty list of positive numbers".into()));
    }
    let smallest = eps.iter().copied().fold(f64::INFINITY, f64::min);
    let config = TrustRegionConfig { epsilon_stop: smallest, ..base.clone() };
    let traces = run_seeds(problem, &config, seeds)?;
    if let Some(t) = traces.iter().find(|t| t.aborted()) {
        return Err(Error::Diagnostic(format!("a sweep run aborted: {:?}", t.stop)));
    }
    let cap = base.max_iters;
    Ok(eps
        .iter()
        .map(|&e| {
            let t_eps: Vec<Option<usize>> = traces.iter().map(|t| summability_report(t, e).t_eps).collect();
            let values: Vec<f64> = t_eps.iter().map(|t| t.unwrap_or(cap) as f64).collect();
            let median = quantile(&values, 0.5);
            let censored = t_eps.iter().filter(|t| t.is_none()).count();
            let uncensored: Vec<f64> = t_eps.iter().flatten().map(|&t| t as f64).collect();
            let median_censored = uncensored.iter().filter(|&&t| t <= median).count() * 2 < values.len();
            SweepRow {
                eps: e,
                median,
                q1: quantile(&values, 0.25),
                q3: quantile(&values, 0.75),
                censored,
                median_censored,
                t_eps,
            }
        })
        .collect())
}

/// `proxstorm sweep`.
pub fn cmd_sweep(path: &Path, eps: &[f64], overrides: &Overrides) -> i32 {
    let (config, warnings) = match load(path, overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::CONFIG;
        }
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let problem = match config.problem.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::CONFIG;
        }
    };
    let rows = match sweep(problem.as_ref(), &config.algorithm, &config.seeds, eps) {
        Ok(rows) => rows,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            return exit::CONFIG;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return exit::RUNTIME;
        }
    };
    println!("{:>10} {:>10} {:>10} {:>10} {:>9}", "eps", "median", "q1", "q3", "censored");
    for r in &rows {
        let mark = if r.median_censored { ">" } else { "" };
        println!(
            "{:>10.3e} {:>10} {:>10.1} {:>10.1} {:>9}",
            r.eps,
            format!("{mark}{}", r.median),
            r.q1,
            r.q3,
            r.censored
        );
    }
    let written = (|| -> Result<()> {
        fs::create_dir_all(&config.output_dir)?;
        fs::write(config.output_dir.join("resolved_config.toml"), config.to_toml()?)?;
        let mut w = csv::Writer::from_path(config.output_dir.join("sweep.csv"))?;
        w.write_record(["eps", "median", "q1", "q3", "censored", "median_censored"])?;
        for r in &rows {
            w.write_record([
                r.eps.to_string(),
                r.median.to_string(),
                r.q1.to_string(),
                r.q3.to_string(),
                r.censored.to_string(),
                r.median_censored.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    })();
    match written {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit::RUNTIME
        }
    }
}

/// `proxstorm verify`, with an injectable proximal map.
pub fn cmd_verify_with(suite: Option<&str>, prox: verify::ProxImpl<'_>) -> i32 {
    let outcomes = match verify::run_suites(suite, prox) {
        Ok(o) => o,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            return exit::CONFIG;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return exit::FAILED;
        }
    };
    let mut ok = true;
    for o in &outcomes {
        match &o.failure {
            None => println!("{}: pass ({} cases)", o.name, o.cases),
            Some(f) => {
                ok = false;
                println!("{}: FAIL after {} cases: {f}", o.name, o.cases);
            }
        }
    }
    if ok {
        exit::OK
    } else {
        exit::FAILED
    }
}

pub fn cmd_verify(suite: Option<&str>) -> i32 {
    cmd_verify_with(suite, &verify::library_prox)
}
