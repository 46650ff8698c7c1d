use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use proxstorm::problems::{BoxBudgetQuadratic, LogisticL1, SampleId, SmoothQuadratic};
use proxstorm::prox::prox_gradient;
use proxstorm::{StochasticProblem, Vector};

fn random_point(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Vector {
    Vector::from_iterator(d, (0..d).map(|_| rng.random_range(-scale..scale)))
}

fn central_gradient(f: impl Fn(&Vector) -> f64, x: &Vector) -> Vector {
    let h = 1e-6;
    Vector::from_iterator(
        x.len(),
        (0..x.len()).map(|i| {
            let mut e = Vector::zeros(x.len());
            e[i] = h;
            (f(&(x + &e)) - f(&(x - &e))) / (2.0 * h)
        }),
    )
}

fn check_derivatives(p: &dyn StochasticProblem, rng: &mut ChaCha8Rng) {
    for _ in 0..10 {
        let x = random_point(rng, p.dim(), 1.0);
        let xi = p.draw(rng, 1)[0];
        let g = p.gradient(&x, xi);
        let fd = central_gradient(|y| p.value(y, xi), &x);
        assert!((&g - &fd).norm() <= 1e-5 * g.norm().max(1.0), "{}: gradient", p.name());

        let v = random_point(rng, p.dim(), 1.0);
        let hv = p.hess_vec(&x, xi, &v);
        let t = 1e-6;
        let fd_hv = (p.gradient(&(&x + &v * t), xi) - p.gradient(&(&x - &v * t), xi)) / (2.0 * t);
        assert!((&hv - &fd_hv).norm() <= 1e-5 * hv.norm().max(1.0), "{}: hess_vec", p.name());
    }
}

#[test]
fn per_sample_derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    check_derivatives(&LogisticL1::new(6, 40, 1e-2, 2), &mut rng);
    check_derivatives(&SmoothQuadratic::new(4, 0.3, 3), &mut rng);
    check_derivatives(&BoxBudgetQuadratic::new(5, 4), &mut rng);
}

#[test]
fn logistic_pool_mean_is_true_gradient() {
    let p = LogisticL1::new(5, 60, 1e-2, 9);
    let x = Vector::from_vec(vec![0.3, -0.2, 0.1, 0.0, 0.5]);
    let (f, g) = p.true_oracle(&x).unwrap();
    let n = p.pool_size() as f64;
    let mut fm = 0.0;
    let mut gm = Vector::zeros(5);
    for i in 0..p.pool_size() {
        fm += p.value(&x, SampleId(i as u64));
        gm += p.gradient(&x, SampleId(i as u64));
    }
    assert!((f - fm / n).abs() < 1e-12);
    assert!((g - gm / n).amax() < 1e-12);
}

#[test]
fn logistic_at_zero_is_log_two() {
    // softplus(0) − y·0 = ln 2 for every label.
    let p = LogisticL1::new(7, 30, 1e-2, 4);
    let (f, _) = p.true_oracle(&Vector::zeros(7)).unwrap();
    assert!((f - std::f64::consts::LN_2).abs() < 1e-14);
    // And the gradient at zero is the mean of (½ − y)a.
    let (_, g) = p.true_oracle(&Vector::zeros(7)).unwrap();
    let mut want = Vector::zeros(7);
    for (a, y) in p.rows().iter().zip(p.labels()) {
        want += a * (0.5 - y);
    }
    want /= p.pool_size() as f64;
    assert!((g - want).amax() < 1e-12);
}

#[test]
fn lipschitz_constants_are_witnessed_not_exceeded() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let problems: Vec<Box<dyn StochasticProblem>> = vec![
        Box::new(LogisticL1::new(6, 80, 1e-2, 1)),
        Box::new(SmoothQuadratic::new(5, 0.1, 2)),
        Box::new(BoxBudgetQuadratic::new(5, 3)),
    ];
    for p in &problems {
        let l = p.lipschitz().unwrap();
        for _ in 0..200 {
            let x = random_point(&mut rng, p.dim(), 2.0);
            let y = random_point(&mut rng, p.dim(), 2.0);
            let gx = p.true_oracle(&x).unwrap().1;
            let gy = p.true_oracle(&y).unwrap().1;
            assert!((gx - gy).norm() <= l * (&x - &y).norm() * (1.0 + 1e-10), "{}", p.name());
        }
    }
}

#[test]
fn quadratic_oracle_and_minimizer() {
    let p = SmoothQuadratic::new(4, 0.5, 8);
    let a: &DMatrix<f64> = p.matrix();
    let x = Vector::from_vec(vec![0.2, -1.0, 0.4, 0.9]);
    let (f, g) = p.true_oracle(&x).unwrap();
    assert!((f - (0.5 * x.dot(&(a * &x)) - p.rhs().dot(&x))).abs() < 1e-12);
    assert!((g - (a * &x - p.rhs())).amax() < 1e-12);
    let xs = p.minimizer();
    assert!((a * &xs - p.rhs()).amax() < 1e-10);

    // Sample gradients average to the true one.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let ids = p.draw(&mut rng, 20_000);
    let mean = ids.iter().fold(Vector::zeros(4), |acc, &xi| acc + p.gradient(&x, xi)) / ids.len() as f64;
    let (_, g) = p.true_oracle(&x).unwrap();
    assert!((mean - g).amax() < 5.0 * 0.5 / (20_000f64).sqrt());
}

/// Minimizer of `½(x − t)ᵀA(x − t)` over `{0 ≤ x ≤ 1, wᵀx = c}` by trying
/// every split of coordinates into lower, upper and free sets.
fn enumerate_qp(a: &DMatrix<f64>, t: &Vector, w: &Vector, c: f64) -> Vector {
    let d = t.len();
    let mut best: Option<(f64, Vector)> = None;
    for code in 0..3usize.pow(d as u32) {
        let mut state = vec![0u8; d];
        let mut m = code;
        for s in state.iter_mut() {
            *s = (m % 3) as u8;
            m /= 3;
        }
        let free: Vec<usize> = (0..d).filter(|&i| state[i] == 2).collect();
        let mut x = Vector::from_iterator(d, state.iter().map(|&s| if s == 1 { 1.0 } else { 0.0 }));
        let nf = free.len();
        if nf > 0 {
            // KKT on the free block with one equality multiplier.
            let mut k = DMatrix::zeros(nf + 1, nf + 1);
            let mut rhs = Vector::zeros(nf + 1);
            for (p, &i) in free.iter().enumerate() {
                for (q, &j) in free.iter().enumerate() {
                    k[(p, q)] = a[(i, j)];
                }
                k[(p, nf)] = w[i];
                k[(nf, p)] = w[i];
                let mut r = 0.0;
                for j in 0..d {
                    r += a[(i, j)] * t[j];
                    if state[j] != 2 {
                        r -= a[(i, j)] * x[j];
                    }
                }
                rhs[p] = r;
            }
            let fixed: f64 = (0..d).filter(|&j| state[j] != 2).map(|j| w[j] * x[j]).sum();
            rhs[nf] = c - fixed;
            let Some(sol) = k.lu().solve(&rhs) else { continue };
            for (p, &i) in free.iter().enumerate() {
                x[i] = sol[p];
            }
        }
        let feasible = x.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)) && (w.dot(&x) - c).abs() < 1e-10;
        if feasible {
            let r = &x - t;
            let val = 0.5 * r.dot(&(a * &r));
            if best.as_ref().is_none_or(|(b, _)| val < *b) {
                best = Some((val, x));
            }
        }
    }
    best.unwrap().1
}

#[test]
fn box_budget_minimizer_is_stationary() {
    for seed in 0..5 {
        let p = BoxBudgetQuadratic::new(4, seed);
        let xs = enumerate_qp(p.matrix(), p.mean_target(), p.weights(), p.budget());
        let (_, g) = p.true_oracle(&xs).unwrap();
        let h = prox_gradient(&xs, &g, 1.0, p.phi()).unwrap();
        assert!(h.norm() < 1e-8, "seed {seed}: |h| = {}", h.norm());
        assert!(p.phi().contains(&p.initial_point()));
    }
}

#[test]
fn pool_csv_round_trip() {
    let p = LogisticL1::new(4, 25, 0.05, 3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pool.csv");
    p.write_pool_csv(&path).unwrap();
    let q = LogisticL1::read_pool_csv(&path, 0.05).unwrap();
    assert_eq!(q.rows(), p.rows());
    assert_eq!(q.labels(), p.labels());
    let x = Vector::from_vec(vec![0.1, 0.2, -0.3, 0.4]);
    assert_eq!(q.true_oracle(&x).unwrap().0, p.true_oracle(&x).unwrap().0);
}

#[test]
fn malformed_pool_csv_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "a,b\n1,x\n").unwrap();
    assert!(LogisticL1::read_pool_csv(&path, 0.01).is_err());
}
