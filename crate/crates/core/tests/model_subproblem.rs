use proxstorm::model::{build_model, build_model_from_samples, BOUND_INFLATION};
use proxstorm::problems::{BoxBudgetQuadratic, LogisticL1, SmoothQuadratic};
use proxstorm::prox::prox_gradient;
use proxstorm::subproblem::{cauchy_search, compute_trial_step, fcd_scale, predicted_reduction, SearchParams};
use proxstorm::{StochasticProblem, Vector};

/// Largest eigenvalue by plain power iteration, run to convergence.
fn power_oracle(apply: impl Fn(&Vector) -> Vector, d: usize) -> f64 {
    let mut v = Vector::from_fn(d, |i, _| 1.0 + i as f64 * 0.1);
    v /= v.norm();
    let mut lam = 0.0;
    for _ in 0..5000 {
        let w = apply(&v);
        lam = w.norm();
        v = w / lam;
    }
    lam
}

#[test]
fn curvature_bound_brackets_spectral_norm() {
    let p = SmoothQuadratic::new(6, 0.0, 2);
    let x = p.initial_point();
    let m = build_model(&p, &x, 3, 0).unwrap();
    let exact = p.matrix().symmetric_eigenvalues().amax();
    let oracle = power_oracle(|v| p.matrix() * v, 6);
    assert!((oracle - exact).abs() < 1e-8 * exact);
    assert!(m.curvature_estimate() >= exact * (1.0 - 1e-8));
    assert!(m.curvature_estimate() <= exact * BOUND_INFLATION * (1.0 + 1e-12));
}

#[test]
fn logistic_model_bound_matches_power_oracle() {
    let p = LogisticL1::new(8, 100, 1e-2, 3);
    let x = Vector::from_element(8, 0.1);
    let pool = p.full_pool().unwrap();
    let m = build_model_from_samples(&p, &x, pool, 0).unwrap();
    let oracle = power_oracle(|v| m.apply_curvature(v), 8);
    assert!(m.curvature_estimate() >= oracle * (1.0 - 1e-6));
    assert!(m.curvature_estimate() <= oracle * BOUND_INFLATION * (1.0 + 1e-6));
}

#[test]
fn model_value_is_quadratic() {
    let p = SmoothQuadratic::new(3, 0.2, 5);
    let x = Vector::from_vec(vec![0.1, 0.2, 0.3]);
    let m = build_model(&p, &x, 4, 9).unwrap();
    let s = Vector::from_vec(vec![0.5, -0.4, 0.2]);
    let want = m.gradient().dot(&s) + 0.5 * s.dot(&(p.matrix() * &s));
    assert!((m.value(&s) - want).abs() < 1e-12);
    assert!((m.gradient_at(&s) - (m.gradient() + p.matrix() * &s)).amax() < 1e-12);
}

#[test]
fn same_seed_same_model() {
    let p = LogisticL1::new(5, 50, 1e-2, 1);
    let x = p.initial_point();
    let a = build_model(&p, &x, 10, 42).unwrap();
    let b = build_model(&p, &x, 10, 42).unwrap();
    assert_eq!(a.samples(), b.samples());
    assert_eq!(a.gradient(), b.gradient());
}

#[test]
fn cauchy_step_meets_its_acceptance_test() {
    let p = LogisticL1::new(10, 200, 1e-2, 4);
    let x = p.initial_point();
    let params = SearchParams::default();
    for delta in [1e-3, 1e-1, 1.0, 10.0] {
        let m = build_model(&p, &x, 50, 1).unwrap();
        let (r, s) = cauchy_search(&m, p.phi(), &x, delta, 1.0, &params).unwrap();
        assert!(s.norm() <= delta * (1.0 + 1e-12));
        let pred = predicted_reduction(&m, p.phi(), &x, &s);
        assert!(pred >= params.kappa_dec / r * s.norm_squared() - 1e-15, "delta {delta}");
    }
}

#[test]
fn trial_steps_certify_fraction_of_cauchy_decrease() {
    let problems: Vec<Box<dyn StochasticProblem>> = vec![
        Box::new(LogisticL1::new(10, 200, 1e-2, 4)),
        Box::new(SmoothQuadratic::new(5, 0.3, 1)),
        Box::new(BoxBudgetQuadratic::new(6, 2)),
    ];
    let params = SearchParams::default();
    for p in &problems {
        let x = p.initial_point();
        for (i, delta) in [1e-4, 1e-2, 0.3, 3.0, 100.0].into_iter().enumerate() {
            let mut m = build_model(p.as_ref(), &x, 20, i as u64).unwrap();
            m.clip_bound(1e6);
            let h = prox_gradient(&x, m.gradient(), 1.0, p.phi()).unwrap().norm();
            let step = compute_trial_step(&m, p.phi(), &x, delta, 1.0, h, 0.05, 2, &params).unwrap();
            assert!(step.s.norm() <= delta * (1.0 + 1e-12));
            assert!(p.phi().contains(&(&x + &step.s)), "{}: step leaves the domain", p.name());
            assert!(step.pred >= 0.05 * fcd_scale(h, m.bound(), delta));
            assert!(step.pred >= step.cauchy_pred - 1e-14, "refinement lost decrease");
        }
    }
}
