//! Property suites behind `proxstorm verify`.
//!
//! Each suite runs a fixed, seeded batch of randomized checks and reports the
//! first failing case with enough input to reproduce it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::driver::{run, run_observed, SamplingMode};
use crate::problems::fixtures::TwoPointGradient;
use crate::problems::{BoxBudgetQuadratic, LogisticL1, SampleId, SmoothQuadratic, StochasticProblem};
use crate::prox::prox_gradient;
use crate::sampling::{dynamic_sample_size, SamplingState};
use crate::subproblem::fcd_scale;
use crate::{Error, ProxFunction, Result, TrustRegionConfig, Vector};

pub const SUITES: [&str; 6] = [
    "nonexpansivity",
    "fcd",
    "projection",
    "storm_reduction",
    "gradient_consistency",
    "dynamic_sampling",
];

/// A proximal map implementation under test.
pub type ProxImpl<'a> = &'a dyn Fn(&ProxFunction, &Vector, f64) -> Result<Vector>;

/// The library's own proximal map.
pub fn library_prox(phi: &ProxFunction, x: &Vector, r: f64) -> Result<Vector> {
    phi.prox(x, r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    /// Description of the first failing case.
    pub failure: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Runs every suite, or only `filter`, using `prox` for the proximal map.
pub fn run_suites(filter: Option<&str>, prox: ProxImpl<'_>) -> Result<Vec<SuiteOutcome>> {
    if let Some(name) = filter {
        if !SUITES.contains(&name) {
            return Err(Error::Config(format!("unknown suite {name:?}; choose from {}", SUITES.join(", "))));
        }
    }
    let mut out = Vec::new();
    for name in SUITES {
        if filter.is_some_and(|f| f != name) {
            continue;
        }
        let (cases, failure) = match name {
            "nonexpansivity" => nonexpansivity(prox, 1000)?,
            "fcd" => fcd()?,
            "projection" => projection(prox, 200)?,
            "storm_reduction" => storm_reduction()?,
            "gradient_consistency" => gradient_consistency()?,
            "dynamic_sampling" => dynamic_sampling(100)?,
            _ => unreachable!(),
        };
        out.push(SuiteOutcome { name, cases, failure });
    }
    Ok(out)
}

type Check = (usize, Option<String>);

fn uniform_vec(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> Vector {
    Vector::from_iterator(d, (0..d).map(|_| rng.random_range(lo..hi)))
}

/// A random instance of each proximal family: zero, ℓ¹, box and box-budget.
pub fn random_phi(rng: &mut ChaCha8Rng, family: usize, d: usize) -> ProxFunction {
    match family {
        0 => ProxFunction::zero(d),
        1 => ProxFunction::l1(d, rng.random_range(0.01..2.0)).expect("positive weight"),
        2 => {
            let lo = uniform_vec(rng, d, -2.0, 0.0);
            let hi = &lo + uniform_vec(rng, d, 0.1, 2.0);
            ProxFunction::boxed(lo, hi).expect("ordered box")
        }
        _ => {
            let (lo, hi, w, c) = random_budget_set(rng, d);
            ProxFunction::box_budget(lo, hi, w, c).expect("feasible budget")
        }
    }
}

/// Random `{lo ≤ y ≤ hi, wᵀy = c}` with `c` strictly inside its feasible range.
pub fn random_budget_set(rng: &mut ChaCha8Rng, d: usize) -> (Vector, Vector, Vector, f64) {
    let lo = uniform_vec(rng, d, -1.0, 0.5);
    let hi = &lo + uniform_vec(rng, d, 0.1, 2.0);
    let w = uniform_vec(rng, d, 0.1, 2.0);
    let t = rng.random_range(0.05..0.95);
    let c = (1.0 - t) * w.dot(&lo) + t * w.dot(&hi);
    (lo, hi, w, c)
}

fn nonexpansivity(prox: ProxImpl<'_>, pairs: usize) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e6f_6e65);
    let mut cases = 0;
    for family in 0..4 {
        for _ in 0..pairs {
            let d = rng.random_range(1..=6);
            let phi = random_phi(&mut rng, family, d);
            let r = rng.random_range(0.1..3.0);
            let x = uniform_vec(&mut rng, d, -3.0, 3.0);
            let y = uniform_vec(&mut rng, d, -3.0, 3.0);
            let gap = (prox(&phi, &y, r)? - prox(&phi, &x, r)?).norm();
            cases += 1;
            if gap > (&y - &x).norm() + 1e-12 {
                return Ok((cases, Some(format!("{} prox expands: r = {r}, x = {x:?}, y = {y:?}", phi.name()))));
            }
        }
    }
    Ok((cases, None))
}

/// Minimizer of `‖y − x‖` over `{lo ≤ y ≤ hi, wᵀy = c}` by enumerating which
/// coordinates sit at a bound. Exponential in `d`; meant for `d ≤ 6`.
pub fn brute_force_box_budget(x: &Vector, w: &Vector, c: f64, lo: &Vector, hi: &Vector) -> Option<Vector> {
    let d = x.len();
    let mut best: Option<(f64, Vector)> = None;
    let mut code = vec![0u8; d];
    loop {
        let mut y = Vector::zeros(d);
        let mut rem = c;
        let mut wx = 0.0;
        let mut ww = 0.0;
        for i in 0..d {
            match code[i] {
                0 => {
                    wx += w[i] * x[i];
                    ww += w[i] * w[i];
                }
                1 => {
                    y[i] = lo[i];
                    rem -= w[i] * lo[i];
                }
                _ => {
                    y[i] = hi[i];
                    rem -= w[i] * hi[i];
                }
            }
        }
        let ok = if ww > 0.0 {
            let mu = (wx - rem) / ww;
            for i in 0..d {
                if code[i] == 0 {
                    y[i] = x[i] - mu * w[i];
                }
            }
            (0..d).all(|i| y[i] >= lo[i] - 1e-12 && y[i] <= hi[i] + 1e-12)
        } else {
            rem.abs() <= 1e-12 * c.abs().max(1.0)
        };
        if ok {
            let dist = (&y - x).norm();
            if best.as_ref().is_none_or(|(b, _)| dist < *b) {
                best = Some((dist, y));
            }
        }
        let mut i = 0;
        while i < d {
            code[i] += 1;
            if code[i] < 3 {
                break;
            }
            code[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    best.map(|(_, y)| y)
}

fn projection(prox: ProxImpl<'_>, instances: usize) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7072_6f6a);
    for case in 0..instances {
        let d = rng.random_range(1..=4);
        let (lo, hi, w, c) = random_budget_set(&mut rng, d);
        let x = uniform_vec(&mut rng, d, -3.0, 3.0);
        let phi = ProxFunction::box_budget(lo.clone(), hi.clone(), w.clone(), c)?;
        let got = prox(&phi, &x, 1.0)?;
        let want = brute_force_box_budget(&x, &w, c, &lo, &hi)
            .ok_or_else(|| Error::Domain("oracle found no feasible point".into()))?;
        let err = (&got - &want).amax();
        if err > 1e-8 {
            return Ok((
                case + 1,
                Some(format!("error {err:e}: x = {x:?}, w = {w:?}, c = {c}, lo = {lo:?}, hi = {hi:?}")),
            ));
        }
    }
    Ok((instances, None))
}

/// Short stochastic runs on the built-in problems used by the FCD suite.
pub fn fcd_runs() -> Vec<(Box<dyn StochasticProblem>, TrustRegionConfig)> {
    let base = TrustRegionConfig { max_iters: 40, ..TrustRegionConfig::table2() };
    vec![
        (
            Box::new(LogisticL1::new(10, 200, 1e-2, 1)),
            TrustRegionConfig { n_samples_model: 20, seed: 1, ..base.clone() },
        ),
        (
            Box::new(LogisticL1::new(10, 200, 1e-2, 2)),
            TrustRegionConfig { sampling_mode: SamplingMode::Full, seed: 2, ..base.clone() },
        ),
        (
            Box::new(SmoothQuadratic::new(5, 0.5, 3)),
            TrustRegionConfig { n_samples_model: 10, seed: 3, ..base.clone() },
        ),
        (
            Box::new(BoxBudgetQuadratic::new(6, 4)),
            TrustRegionConfig {
                sampling_mode: SamplingMode::Dynamic,
                n_samples_model: 10,
                n_max: 5000,
                seed: 4,
                ..base.clone()
            },
        ),
    ]
}

fn fcd() -> Result<Check> {
    let mut cases = 0;
    for (problem, config) in fcd_runs() {
        let trace = run(problem.as_ref(), &config)?;
        for r in &trace.records {
            if r.fcd_violation {
                return Ok((cases, Some(format!("{} seed {}: flagged at k = {}", problem.name(), config.seed, r.k))));
            }
            let Some(pred) = r.pred else { continue };
            cases += 1;
            let bound = config.kappa_fcd * fcd_scale(r.h_model_norm, r.b_k, r.delta);
            if pred < bound {
                return Ok((
                    cases,
                    Some(format!("{} seed {} k = {}: pred {pred:e} < {bound:e}", problem.name(), config.seed, r.k)),
                ));
            }
        }
    }
    Ok((cases, None))
}

fn storm_reduction() -> Result<Check> {
    let problem = SmoothQuadratic::new(5, 0.1, 11);
    let mut cases = 0;
    for (i, r) in [0.1, 1.0, 10.0].into_iter().enumerate() {
        let config = TrustRegionConfig { r, max_iters: 30, n_samples_model: 10, seed: i as u64, ..TrustRegionConfig::table2() };
        let mut worst: Option<String> = None;
        run_observed(&problem, &config, |rec, x| {
            if worst.is_some() {
                return;
            }
            let (_, g) = problem.true_oracle(x).expect("true oracle");
            let h = prox_gradient(x, &g, r, problem.phi()).expect("valid r");
            cases += 1;
            let err = (&h - &g).amax();
            if err > 1e-12 {
                worst = Some(format!("r = {r}, k = {}: |h − ∇f| = {err:e} at x = {x:?}", rec.k));
            }
        })?;
        if worst.is_some() {
            return Ok((cases, worst));
        }
    }
    Ok((cases, None))
}

/// Largest relative mismatch between per-sample gradients and central
/// differences of per-sample values.
pub fn finite_difference_error<P: StochasticProblem + ?Sized>(problem: &P, x: &Vector, xi: SampleId) -> f64 {
    let g = problem.gradient(x, xi);
    let h = 1e-6;
    let fd = Vector::from_iterator(
        x.len(),
        (0..x.len()).map(|i| {
            let mut e = Vector::zeros(x.len());
            e[i] = h;
            (problem.value(&(x + &e), xi) - problem.value(&(x - &e), xi)) / (2.0 * h)
        }),
    );
    (&fd - &g).norm() / g.norm().max(1.0)
}

fn gradient_consistency() -> Result<Check> {
    let problems: Vec<Box<dyn StochasticProblem>> = vec![
        Box::new(LogisticL1::new(8, 50, 1e-2, 5)),
        Box::new(SmoothQuadratic::new(6, 0.3, 6)),
        Box::new(BoxBudgetQuadratic::new(6, 7)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x6772_6164);
    let mut cases = 0;
    for p in &problems {
        for _ in 0..20 {
            let x = uniform_vec(&mut rng, p.dim(), -1.5, 1.5);
            let xi = p.draw(&mut rng, 1)[0];
            cases += 1;
            let err = finite_difference_error(p.as_ref(), &x, xi);
            if err > 1e-5 {
                return Ok((cases, Some(format!("{}: relative error {err:e} at x = {x:?}, sample {}", p.name(), xi.0))));
            }
        }
        if let (Some(pool), Some((_, g))) = (p.full_pool(), p.true_oracle(&p.initial_point())) {
            let x = p.initial_point();
            let mean = pool.iter().fold(Vector::zeros(p.dim()), |acc, &xi| acc + p.gradient(&x, xi)) / pool.len() as f64;
            cases += 1;
            let err = (&mean - &g).amax();
            if err > 1e-12 {
                return Ok((cases, Some(format!("{}: pool mean differs from true gradient by {err:e}", p.name()))));
            }
        }
    }
    Ok((cases, None))
}

fn dynamic_sampling(trials: usize) -> Result<Check> {
    let problem = TwoPointGradient::default();
    let delta = 0.1;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(t as u64);
        let state = SamplingState::new(10, 100_000, 0.9, 1.0)?;
        let out = dynamic_sample_size(&problem, &problem.initial_point(), delta, state, &mut rng)?;
        let required = out.required(out.variance, delta);
        if out.cap_hit || (out.n as f64) < required {
            return Ok((t + 1, Some(format!("seed {t}: n = {} below {required} (cap hit: {})", out.n, out.cap_hit))));
        }
    }
    Ok((trials, None))
}
