//! Proximal maps for the supported nonsmooth terms.
//!
//! Every term is convex, proper and closed, and its proximal map
//! `prox_{rφ}(x) = argmin_y φ(y) + ‖y − x‖² / (2r)` is evaluated exactly
//! (up to the bisection tolerance for the budget constraint).

use crate::linalg::{inf_norm, pairwise_sum_scalars};
use crate::{Error, Result, Vector};

/// Relative slack used when deciding whether a point lies in `dom φ`.
const FEAS_TOL: f64 = 1e-9;

/// Stopping tolerance on the budget residual, relative to `max(1, |c|)`.
const BUDGET_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Zero,
    L1 { weight: f64 },
    Box { lo: Vector, hi: Vector },
    BoxBudget { lo: Vector, hi: Vector, weights: Vector, budget: f64 },
}

/// A convex nonsmooth term with an exact proximal map.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxFunction {
    dim: usize,
    kind: Kind,
}

impl ProxFunction {
    pub fn zero(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self { dim, kind: Kind::Zero }
    }

    /// `λ‖x‖₁`.
    pub fn l1(dim: usize, weight: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::Parameter(format!("l1 weight must be finite and >= 0, got {weight}")));
        }
        Ok(Self { dim, kind: Kind::L1 { weight } })
    }

    /// Indicator of `{lo ≤ x ≤ hi}`.
    pub fn boxed(lo: Vector, hi: Vector) -> Result<Self> {
        check_bounds(&lo, &hi)?;
        Ok(Self { dim: lo.len(), kind: Kind::Box { lo, hi } })
    }

    /// Indicator of `{lo ≤ x ≤ hi, wᵀx = c}` with `w > 0`.
    pub fn box_budget(lo: Vector, hi: Vector, weights: Vector, budget: f64) -> Result<Self> {
        check_bounds(&lo, &hi)?;
        if weights.len() != lo.len() {
            return Err(Error::Parameter("weights and bounds differ in length".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::Parameter("budget weights must be positive and finite".into()));
        }
        let wlo = weights.dot(&lo);
        let whi = weights.dot(&hi);
        if !(wlo <= budget && budget <= whi) {
            return Err(Error::Domain(format!(
                "budget {budget} outside [{wlo}, {whi}] attainable by the box"
            )));
        }
        Ok(Self {
            dim: lo.len(),
            kind: Kind::BoxBudget { lo, hi, weights, budget },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            Kind::Zero => "zero",
            Kind::L1 { .. } => "l1",
            Kind::Box { .. } => "box",
            Kind::BoxBudget { .. } => "box_budget",
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, Kind::Zero)
    }

    /// `φ(y)`, `+∞` outside the domain.
    pub fn value(&self, y: &Vector) -> f64 {
        match &self.kind {
            Kind::Zero => 0.0,
            Kind::L1 { weight } => weight * y.iter().map(|v| v.abs()).sum::<f64>(),
            Kind::Box { lo, hi } => {
                if in_box(y, lo, hi) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Kind::BoxBudget { lo, hi, weights, budget } => {
                let resid = (weights.dot(y) - budget).abs();
                if in_box(y, lo, hi) && resid <= FEAS_TOL * budget.abs().max(1.0) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `φ(x) − φ(y)`, formed term by term so that it stays accurate when
    /// `y` is close to `x`. `−∞` when `y ∉ dom φ`.
    pub fn reduction(&self, x: &Vector, y: &Vector) -> f64 {
        match &self.kind {
            Kind::L1 { weight } => {
                let terms: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a.abs() - b.abs()).collect();
                weight * pairwise_sum_scalars(&terms)
            }
            _ => {
                if !self.contains(y) {
                    f64::NEG_INFINITY
                } else {
                    self.value(x) - self.value(y)
                }
            }
        }
    }

    pub fn contains(&self, y: &Vector) -> bool {
        self.value(y).is_finite()
    }

    /// Exact proximal map with parameter `r > 0`.
    pub fn prox(&self, x: &Vector, r: f64) -> Result<Vector> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Parameter(format!("prox parameter must be positive, got {r}")));
        }
        debug_assert_eq!(x.len(), self.dim);
        Ok(match &self.kind {
            Kind::Zero => x.clone(),
            Kind::L1 { weight } => {
                let t = r * weight;
                x.map(|v| soft_threshold(v, t))
            }
            Kind::Box { lo, hi } => clamp(x, lo, hi),
            Kind::BoxBudget { lo, hi, weights, budget } => {
                project_box_budget(x, weights, *budget, lo, hi)?
            }
        })
    }
}

fn check_bounds(lo: &Vector, hi: &Vector) -> Result<()> {
    if lo.is_empty() || lo.len() != hi.len() {
        return Err(Error::Parameter("bounds must be nonempty and of equal length".into()));
    }
    if lo.iter().zip(hi.iter()).any(|(l, h)| !(l <= h)) {
        return Err(Error::Domain("box requires lo <= hi in every coordinate".into()));
    }
    Ok(())
}

fn in_box(y: &Vector, lo: &Vector, hi: &Vector) -> bool {
    y.iter().zip(lo.iter().zip(hi.iter())).all(|(v, (l, h))| {
        let slack = FEAS_TOL * l.abs().max(h.abs()).max(1.0);
        *v >= l - slack && *v <= h + slack
    })
}

/// `sign(v)·max(|v| − t, 0)`; `|v| = t` maps to zero.
pub fn soft_threshold(v: f64, t: f64) -> f64 {
    let m = v.abs() - t;
    if m > 0.0 {
        m.copysign(v)
    } else {
        0.0
    }
}

fn clamp(x: &Vector, lo: &Vector, hi: &Vector) -> Vector {
    Vector::from_iterator(
        x.len(),
        x.iter().zip(lo.iter().zip(hi.iter())).map(|(v, (l, h))| v.max(*l).min(*h)),
    )
}

/// Proximal gradient `(x − prox_{rφ}(x − r·g)) / r`.
///
/// With `g = ∇f(x)` this is the stationarity measure `h(x)`; with the model
/// gradient it is `h_k`. Only its norm is consumed by the algorithm.
pub fn prox_gradient(x: &Vector, g: &Vector, r: f64, phi: &ProxFunction) -> Result<Vector> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Parameter(format!("prox parameter must be positive, got {r}")));
    }
    if phi.is_zero() {
        // identity prox; skip the round trip through x − r·g
        return Ok(g.clone());
    }
    let p = phi.prox(&(x - g * r), r)?;
    Ok((x - p) / r)
}

/// Euclidean projection onto `{lo ≤ y ≤ hi, wᵀy = c}`.
///
/// Uses the scalar dual: `y(μ) = clamp(x − μw, lo, hi)` makes `wᵀy(μ)`
/// continuous and nonincreasing, so `μ*` is found by bisection and then
/// polished by an exact solve on the free coordinates.
pub fn project_box_budget(x: &Vector, w: &Vector, c: f64, lo: &Vector, hi: &Vector) -> Result<Vector> {
    let n = x.len();
    if w.len() != n || lo.len() != n || hi.len() != n {
        return Err(Error::Parameter("projection inputs differ in length".into()));
    }
    let wlo = w.dot(lo);
    let whi = w.dot(hi);
    if !(wlo <= c && c <= whi) {
        return Err(Error::Domain(format!("budget {c} outside [{wlo}, {whi}]")));
    }
    // `x − μw` cancels when `x` is large, so `wᵀy` is only known to a few
    // ulps of `Σ|wᵢxᵢ|`; the tolerance cannot be tighter than that.
    let scale = w.iter().zip(x.iter()).map(|(wi, xi)| (wi * xi).abs()).sum::<f64>();
    let tol = BUDGET_TOL * c.abs().max(1.0) + 4.0 * n as f64 * f64::EPSILON * scale;
    let y_of = |mu: f64| clamp(&(x - w * mu), lo, hi);
    let excess = |mu: f64| w.dot(&y_of(mu)) - c;

    let wmin = w.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut radius = (inf_norm(x) + inf_norm(hi) + inf_norm(lo)) / wmin + 1.0;
    let mut expansions = 0;
    while !(excess(-radius) >= 0.0 && excess(radius) <= 0.0) {
        radius *= 2.0;
        expansions += 1;
        if expansions > 60 || !radius.is_finite() {
            return Err(Error::Bracket { lo: -radius, hi: radius });
        }
    }

    let (mut a, mut b) = (-radius, radius);
    let mut best = (f64::INFINITY, 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let e = excess(mid);
        if e.abs() < best.0 {
            best = (e.abs(), mid);
        }
        if e.abs() <= tol || mid <= a || mid >= b {
            break;
        }
        if e > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }

    // On the final bracket the active set is (nearly always) fixed, so wᵀy is
    // affine in μ and the root can be taken exactly.
    let mu = best.1;
    let y = y_of(mu);
    let mut fixed = 0.0;
    let mut free_ww = 0.0;
    let mut free_wx = 0.0;
    for i in 0..n {
        let t = x[i] - mu * w[i];
        if t > lo[i] && t < hi[i] {
            free_ww += w[i] * w[i];
            free_wx += w[i] * x[i];
        } else {
            fixed += w[i] * y[i];
        }
    }
    if free_ww > 0.0 {
        let mu_exact = (free_wx + fixed - c) / free_ww;
        let e = excess(mu_exact).abs();
        if e < best.0 {
            best = (e, mu_exact);
        }
    }
    if best.0 > tol {
        return Err(Error::Bracket { lo: a, hi: b });
    }
    Ok(y_of(best.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_row_slice(xs)
    }

    /// Minimizes `λ|y| + (y − x)²/(2r)` over a grid on [−5, 5].
    fn grid_prox_l1(x: f64, lambda: f64, r: f64) -> f64 {
        let mut best = (f64::INFINITY, 0.0);
        let steps = 100_000;
        for i in 0..=steps {
            let y = -5.0 + 10.0 * i as f64 / steps as f64;
            let val = lambda * y.abs() + (y - x).powi(2) / (2.0 * r);
            if val < best.0 {
                best = (val, y);
            }
        }
        best.1
    }

    #[test]
    fn zero_prox_is_identity() {
        let phi = ProxFunction::zero(2);
        assert_eq!(phi.prox(&v(&[1.5, -2.0]), 0.7).unwrap(), v(&[1.5, -2.0]));
    }

    #[test]
    fn l1_prox_matches_grid() {
        let phi = ProxFunction::l1(3, 1.0).unwrap();
        let x = v(&[3.0, -1.0, 0.2]);
        let p = phi.prox(&x, 1.0).unwrap();
        for i in 0..3 {
            let oracle = grid_prox_l1(x[i], 1.0, 1.0);
            assert!((p[i] - oracle).abs() <= 1e-4, "coord {i}: {} vs {}", p[i], oracle);
        }
        assert_eq!(p, v(&[2.0, 0.0, 0.0]));
    }

    #[test]
    fn soft_threshold_tie_maps_to_zero() {
        assert_eq!(soft_threshold(0.5, 0.5), 0.0);
        assert_eq!(soft_threshold(-0.5, 0.5), 0.0);
    }

    #[test]
    fn box_prox_clamps() {
        let phi = ProxFunction::boxed(Vector::zeros(3), Vector::from_element(3, 1.0)).unwrap();
        for r in [1e-3, 1.0, 1e3] {
            assert_eq!(phi.prox(&v(&[2.0, -1.0, 0.5]), r).unwrap(), v(&[1.0, 0.0, 0.5]));
        }
    }

    #[test]
    fn nonpositive_r_rejected() {
        let phi = ProxFunction::zero(1);
        assert!(matches!(phi.prox(&v(&[1.0]), 0.0), Err(Error::Parameter(_))));
        assert!(matches!(prox_gradient(&v(&[1.0]), &v(&[1.0]), -1.0, &phi), Err(Error::Parameter(_))));
    }

    #[test]
    fn prox_gradient_examples() {
        let zero = ProxFunction::zero(2);
        let g = v(&[0.3, -7.0]);
        assert_eq!(prox_gradient(&v(&[4.0, 1.0]), &g, 0.25, &zero).unwrap(), g);

        let l1 = ProxFunction::l1(2, 1.0).unwrap();
        let h = prox_gradient(&Vector::zeros(2), &v(&[0.3, -0.9]), 0.5, &l1).unwrap();
        assert_eq!(h, Vector::zeros(2));
        // grid oracle agrees that x − r·g soft-thresholds back to 0
        assert!(grid_prox_l1(-0.15, 1.0, 0.5).abs() < 1e-4);
        assert!(grid_prox_l1(0.45, 1.0, 0.5).abs() < 1e-4);

        let h = prox_gradient(&v(&[2.0, 0.0]), &v(&[0.5, 0.0]), 1.0, &l1).unwrap();
        assert!((grid_prox_l1(1.5, 1.0, 1.0) - 0.5).abs() < 1e-4);
        assert_eq!(h, v(&[1.5, 0.0]));
    }

    #[test]
    fn budget_projection_of_feasible_point_is_identity() {
        let x = v(&[0.2, 0.3, 0.5]);
        let w = Vector::from_element(3, 1.0);
        let y = project_box_budget(&x, &w, 1.0, &Vector::zeros(3), &Vector::from_element(3, 1.0)).unwrap();
        assert!((y - x).amax() <= 1e-12);
    }

    #[test]
    fn budget_projection_one_dimensional() {
        let y = project_box_budget(&v(&[0.9]), &v(&[1.0]), 0.3, &v(&[0.0]), &v(&[1.0])).unwrap();
        assert!((y[0] - 0.3).abs() <= 1e-12);
    }

    #[test]
    fn infeasible_budget_is_domain_error() {
        let r = project_box_budget(&v(&[0.5, 0.5]), &v(&[1.0, 1.0]), 3.0, &Vector::zeros(2), &Vector::from_element(2, 1.0));
        assert!(matches!(r, Err(Error::Domain(_))));
        let r = ProxFunction::box_budget(Vector::zeros(2), Vector::from_element(2, 1.0), v(&[1.0, 1.0]), -0.1);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn box_budget_value_is_indicator() {
        let phi = ProxFunction::box_budget(Vector::zeros(2), Vector::from_element(2, 1.0), v(&[0.5, 0.5]), 0.2).unwrap();
        assert_eq!(phi.value(&v(&[0.2, 0.2])), 0.0);
        assert!(phi.value(&v(&[0.5, 0.5])).is_infinite());
        assert!(phi.value(&v(&[-0.1, 0.5])).is_infinite());
    }

    #[test]
    fn budget_projection_of_huge_input() {
        let n = 12;
        let w = Vector::from_element(n, 1.0 / n as f64);
        let x = Vector::from_fn(n, |i, _| 3.6e5 + 0.37 * i as f64);
        let y = project_box_budget(&x, &w, 0.2, &Vector::zeros(n), &Vector::from_element(n, 1.0)).unwrap();
        assert!((w.dot(&y) - 0.2).abs() < 1e-9);
        assert!(y.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
