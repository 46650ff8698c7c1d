use proxstorm::driver::{self, accept_and_update, computed_reduction, run, run_observed, SamplingMode, StopReason};
use proxstorm::problems::{LogisticL1, Pool, SampleId, SmoothQuadratic};
use proxstorm::{ProxFunction, StochasticProblem, TrustRegionConfig, Vector};

#[test]
fn noiseless_quadratic_reaches_dense_solution() {
    let p = SmoothQuadratic::new(8, 0.0, 4);
    let config = TrustRegionConfig { max_iters: 100, epsilon_stop: 1e-10, n_samples_model: 1, n_samples_cred: 1, ..TrustRegionConfig::table2() };
    let trace = run(&p, &config).unwrap();
    assert_eq!(trace.stop, StopReason::EpsilonReached);
    assert!(trace.final_h_true_norm.unwrap() < 1e-10);
    let xs = p.matrix().clone().cholesky().unwrap().solve(p.rhs());
    assert!((&trace.final_point - xs).amax() < 1e-9);
}

#[test]
fn radii_stay_on_the_lattice() {
    let p = LogisticL1::new(10, 200, 1e-2, 3);
    let config = TrustRegionConfig { max_iters: 80, n_samples_model: 10, n_samples_cred: 10, seed: 5, ..TrustRegionConfig::table2() };
    let trace = run(&p, &config).unwrap();
    for w in trace.records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        assert_eq!(a.delta, 1.6384 * 5f64.powi(a.delta_exponent));
        assert!(a.delta_exponent <= 14);
        let step = b.delta_exponent - a.delta_exponent;
        if a.accepted {
            assert!(step == 1 || (step == 0 && a.delta_exponent == 14));
        } else {
            assert_eq!(step, -1);
        }
        assert_eq!(a.delta_next, b.delta);
    }
}

#[test]
fn identical_seeds_give_identical_traces() {
    let p = LogisticL1::new(10, 200, 1e-2, 3);
    let config = TrustRegionConfig { max_iters: 60, n_samples_model: 20, seed: 9, ..TrustRegionConfig::table2() };
    let a = run(&p, &config).unwrap();
    let b = run(&p, &config).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.final_point, b.final_point);
    let c = run(&p, &TrustRegionConfig { seed: 10, ..config }).unwrap();
    assert_ne!(a.records, c.records);
}

#[test]
fn computed_reduction_two_samples() {
    let p = LogisticL1::new(3, 10, 0.5, 1);
    let x = Vector::from_vec(vec![0.2, -0.1, 0.0]);
    let s = Vector::from_vec(vec![-0.1, 0.3, 0.2]);
    let ids = [SampleId(2), SampleId(7)];
    let y = &x + &s;
    let mean = 0.5 * ((p.value(&x, ids[0]) - p.value(&y, ids[0])) + (p.value(&x, ids[1]) - p.value(&y, ids[1])));
    let l1 = |v: &Vector| 0.5 * v.iter().map(|t| t.abs()).sum::<f64>();
    let want = mean + l1(&x) - l1(&y);
    let got = computed_reduction(&p, &x, &s, &ids).unwrap();
    assert!((got - want).abs() < 1e-15);
    assert!(computed_reduction(&p, &x, &s, &[]).is_err());
}

#[test]
fn full_mode_cred_equals_ared() {
    let p = LogisticL1::new(10, 150, 1e-2, 2);
    let config = TrustRegionConfig { sampling_mode: SamplingMode::Full, max_iters: 30, ..TrustRegionConfig::table2() };
    let trace = run(&p, &config).unwrap();
    for r in trace.records.iter().filter(|r| r.pred.is_some()) {
        assert_eq!(r.cred, r.ared, "k = {}", r.k);
        assert_eq!(r.n_model, 150);
    }
}

#[test]
fn acceptance_rule() {
    let c = TrustRegionConfig::table2();
    assert_eq!(accept_and_update(0.6, 1.0, 1.0, 1.0, &c), (true, 5.0));
    assert_eq!(accept_and_update(0.4, 1.0, 1.0, 1.0, &c), (false, 0.2));
    // Gate: ‖h‖ below η₂δ rejects even a perfect ratio.
    assert!(!accept_and_update(1.0, 1.0, 1e-5, 1.0, &c).0);
    assert!(!accept_and_update(-1.0, -1.0, 1.0, 1.0, &c).0);
    assert_eq!(accept_and_update(1.0, 1.0, 1e9, 1e10, &c), (true, c.max_delta()));
}

struct OutsideStart {
    phi: ProxFunction,
}

impl StochasticProblem for OutsideStart {
    fn name(&self) -> &str {
        "outside_start"
    }
    fn dim(&self) -> usize {
        2
    }
    fn phi(&self) -> &ProxFunction {
        &self.phi
    }
    fn pool(&self) -> Pool {
        Pool::Finite(1)
    }
    fn initial_point(&self) -> Vector {
        Vector::from_vec(vec![5.0, -3.0])
    }
    fn value(&self, x: &Vector, _xi: SampleId) -> f64 {
        0.5 * x.norm_squared()
    }
    fn gradient(&self, x: &Vector, _xi: SampleId) -> Vector {
        x.clone()
    }
    fn hess_vec(&self, _x: &Vector, _xi: SampleId, v: &Vector) -> Vector {
        v.clone()
    }
    fn true_oracle(&self, x: &Vector) -> Option<(f64, Vector)> {
        Some((0.5 * x.norm_squared(), x.clone()))
    }
}

#[test]
fn infeasible_start_is_projected() {
    let phi = ProxFunction::boxed(Vector::from_element(2, 1.0), Vector::from_element(2, 2.0)).unwrap();
    let p = OutsideStart { phi };
    let config = TrustRegionConfig { max_iters: 50, epsilon_stop: 1e-12, ..TrustRegionConfig::table2() };
    let mut first = None;
    let trace = run_observed(&p, &config, |r, x| {
        if r.k == 0 {
            first = Some(x.clone());
        }
    })
    .unwrap();
    assert!(trace.projected_start);
    assert_eq!(first.unwrap(), Vector::from_vec(vec![2.0, 1.0]));
    assert!((trace.final_point.clone() - Vector::from_element(2, 1.0)).amax() < 1e-9);
    assert!(trace.records.iter().all(|r| r.f_plus_phi.unwrap().is_finite()));
}

#[test]
fn invalid_configs_are_errors() {
    let p = SmoothQuadratic::new(2, 0.1, 0);
    let bad = [
        TrustRegionConfig { eta1: 1.5, ..TrustRegionConfig::table2() },
        TrustRegionConfig { gamma: 1.0, ..TrustRegionConfig::table2() },
        TrustRegionConfig { eta: 0.6, ..TrustRegionConfig::table2() },
        TrustRegionConfig { n_samples_model: 0, ..TrustRegionConfig::table2() },
        TrustRegionConfig { sampling_mode: SamplingMode::Full, ..TrustRegionConfig::table2() },
    ];
    for c in bad {
        assert!(driver::run(&p, &c).is_err(), "{c:?}");
    }
}
