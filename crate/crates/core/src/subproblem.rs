//! Trial steps for the trust-region subproblem
//! `min_{‖s‖≤δ} m(x+s) + φ(x+s)`.
//!
//! A Cauchy step is found along the arc `p(r) = prox_{rφ}(x − r·g)` by a
//! bi-directional search on `r`, then improved by a few monotone spectral
//! proximal-gradient iterations. Every returned [`TrialStep`] has been checked
//! against the trust-region constraint and the fraction of Cauchy decrease.

use crate::model::QuadraticModel;
use crate::{Error, ProxFunction, Result, Vector};

/// Step-length controls for the Cauchy search and the refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    /// Sufficient-decrease constant in `pred ≥ (κ_dec / r)·‖s‖²`.
    pub kappa_dec: f64,
    pub shrink: f64,
    pub expand: f64,
    pub max_halvings: usize,
    pub max_expansions: usize,
    /// Safeguards for the Barzilai–Borwein step.
    pub bb_min: f64,
    pub bb_max: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            kappa_dec: 0.75,
            shrink: 0.5,
            expand: 2.0,
            max_halvings: 60,
            max_expansions: 40,
            bb_min: 1e-8,
            bb_max: 1e8,
        }
    }
}

/// Relative slack on `‖s‖ ≤ δ` absorbing rounding in the radial retraction.
pub const RADIUS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialStep {
    pub s: Vector,
    pub pred: f64,
    /// `‖h_k‖`, the model proximal-gradient norm the step was certified against.
    pub h_model_norm: f64,
    /// Accepted Cauchy step length.
    pub cauchy_r: f64,
    pub cauchy_pred: f64,
    pub refine_iters: usize,
    /// `pred / (‖h_k‖·min{‖h_k‖/(1+b), δ})`.
    pub fcd_ratio: f64,
}

impl TrialStep {
    /// Validates the trust-region constraint and the fraction of Cauchy
    /// decrease `pred ≥ κ_fcd‖h‖·min{‖h‖/(1+b), δ}`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        s: Vector,
        pred: f64,
        h_model_norm: f64,
        bound: f64,
        delta: f64,
        kappa_fcd: f64,
        cauchy_r: f64,
        cauchy_pred: f64,
        refine_iters: usize,
    ) -> Result<Self> {
        let norm = s.norm();
        if norm > delta * (1.0 + RADIUS_SLACK) {
            return Err(Error::Parameter(format!("step norm {norm:e} exceeds radius {delta:e}")));
        }
        let scale = fcd_scale(h_model_norm, bound, delta);
        let required = kappa_fcd * scale;
        if !(pred > 0.0 && pred >= required) {
            return Err(Error::FcdViolation { pred, bound: required });
        }
        Ok(Self {
            s,
            pred,
            h_model_norm,
            cauchy_r,
            cauchy_pred,
            refine_iters,
            fcd_ratio: pred / scale,
        })
    }
}

/// `‖h‖·min{‖h‖/(1+b), δ}`.
pub fn fcd_scale(h_norm: f64, bound: f64, delta: f64) -> f64 {
    h_norm * (h_norm / (1.0 + bound)).min(delta)
}

/// `m(x) + φ(x) − m(x+s) − φ(x+s)` with `m(x)` normalized to zero.
/// Returns `−∞` when `x + s ∉ dom φ`.
///
/// Evaluated on the step actually realized in floating point, `(x+s) − x`,
/// so that tiny steps near a stationary point keep their sign.
pub fn predicted_reduction(model: &QuadraticModel<'_>, phi: &ProxFunction, x: &Vector, s: &Vector) -> f64 {
    let y = x + s;
    let phi_part = phi.reduction(x, &y);
    if phi_part == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    -model.value(&(&y - x)) + phi_part
}

/// Bi-directional search along the Cauchy arc.
///
/// Accepts `r` when `‖s(r)‖ ≤ δ` and `pred(s(r)) ≥ (κ_dec/r)‖s(r)‖²`. Starting
/// from `r_init`, either halves until accepted or doubles while still
/// accepted and inside the ball, returning the last accepted `r` and `s(r)`.
pub fn cauchy_search(
    model: &QuadraticModel<'_>,
    phi: &ProxFunction,
    x: &Vector,
    delta: f64,
    r_init: f64,
    params: &SearchParams,
) -> Result<(f64, Vector)> {
    if !(r_init > 0.0 && r_init.is_finite()) {
        return Err(Error::Parameter(format!("initial step length must be positive, got {r_init}")));
    }
    let g = model.gradient();
    let trial = |r: f64| -> Result<Option<Vector>> {
        let p = phi.prox(&(x - g * r), r)?;
        let s = &p - x;
        let norm = s.norm();
        if norm > delta * (1.0 + RADIUS_SLACK) {
            return Ok(None);
        }
        let pred = predicted_reduction(model, phi, x, &s);
        Ok((pred >= params.kappa_dec / r * norm * norm).then_some(s))
    };

    let mut r = r_init;
    if let Some(mut s) = trial(r)? {
        for _ in 0..params.max_expansions {
            if s.norm() >= delta {
                break;
            }
            let next = r * params.expand;
            match trial(next)? {
                Some(sn) => {
                    r = next;
                    s = sn;
                }
                None => break,
            }
        }
        return Ok((r, s));
    }
    for _ in 0..params.max_halvings {
        r *= params.shrink;
        if let Some(s) = trial(r)? {
            return Ok((r, s));
        }
    }
    Err(Error::CauchyFailure { halvings: params.max_halvings })
}

/// Monotone spectral proximal-gradient refinement of a Cauchy step.
///
/// Returns the improved step and the number of accepted iterations. Each
/// candidate is radially retracted into the ball and kept only if the
/// composite model value strictly decreases.
pub fn refine_spg(
    model: &QuadraticModel<'_>,
    phi: &ProxFunction,
    x: &Vector,
    s_c: &Vector,
    delta: f64,
    max_iters: usize,
    params: &SearchParams,
) -> Result<(Vector, usize)> {
    let mut s = s_c.clone();
    if max_iters == 0 {
        return Ok((s, 0));
    }
    let g = model.gradient();
    let mut qs = model.apply_curvature(&s);
    // Progress is measured by the predicted reduction, which is formed
    // without cancelling φ(x) against φ(x + s).
    let mut pred = predicted_reduction(model, phi, x, &s);
    let mut t = 1.0 / (1.0 + model.bound());
    let mut iters = 0;
    for _ in 0..max_iters {
        let grad = g + &qs;
        let y = x + &s;
        let y_next = phi.prox(&(&y - grad * t), t)?;
        let mut s_next = &y_next - x;
        let norm = s_next.norm();
        if norm > delta {
            s_next *= delta / norm;
        }
        let pred_next = predicted_reduction(model, phi, x, &s_next);
        if !(pred_next > pred) {
            break;
        }
        let ds = &s_next - &s;
        let q_ds = model.apply_curvature(&ds);
        let curv = ds.dot(&q_ds);
        t = if curv > 0.0 {
            (ds.dot(&ds) / curv).clamp(params.bb_min, params.bb_max)
        } else {
            params.bb_max
        };
        s = s_next;
        qs += q_ds;
        pred = pred_next;
        iters += 1;
    }
    Ok((s, iters))
}

/// Cauchy search followed by refinement, certified as a [`TrialStep`].
#[allow(clippy::too_many_arguments)]
pub fn compute_trial_step(
    model: &QuadraticModel<'_>,
    phi: &ProxFunction,
    x: &Vector,
    delta: f64,
    r_init: f64,
    h_model_norm: f64,
    kappa_fcd: f64,
    refine_max_iters: usize,
    params: &SearchParams,
) -> Result<TrialStep> {
    let (r, s_c) = cauchy_search(model, phi, x, delta, r_init, params)?;
    let cauchy_pred = predicted_reduction(model, phi, x, &s_c);
    let (s, iters) = refine_spg(model, phi, x, &s_c, delta, refine_max_iters, params)?;
    let pred = predicted_reduction(model, phi, x, &s);
    TrialStep::new(s, pred, h_model_norm, model.bound(), delta, kappa_fcd, r, cauchy_pred, iters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LinearOperator;
    use crate::problems::SampleId;
    use nalgebra::DMatrix;

    struct Dense(DMatrix<f64>);

    impl LinearOperator for Dense {
        fn dim(&self) -> usize {
            self.0.nrows()
        }
        fn apply(&self, v: &Vector) -> Vector {
            &self.0 * v
        }
    }

    fn model(g: &[f64], q: DMatrix<f64>) -> QuadraticModel<'static> {
        QuadraticModel::new(Vector::zeros(g.len()), Vector::from_row_slice(g), Box::new(Dense(q)), vec![SampleId(0)], 3)
    }

    #[test]
    fn predicted_reduction_examples() {
        let zero = ProxFunction::zero(2);
        let m = model(&[1.0, 0.0], DMatrix::zeros(2, 2));
        let x = Vector::zeros(2);
        assert_eq!(predicted_reduction(&m, &zero, &x, &Vector::zeros(2)), 0.0);
        assert_eq!(predicted_reduction(&m, &zero, &x, &Vector::from_row_slice(&[-1.0, 0.0])), 1.0);

        let l1 = ProxFunction::l1(2, 1.0).unwrap();
        let x = Vector::from_row_slice(&[2.0, 0.0]);
        let pred = predicted_reduction(&m, &l1, &x, &Vector::from_row_slice(&[-1.0, 0.0]));
        // −gᵀs = 1, φ(x) − φ(x+s) = 2 − 1
        assert_eq!(pred, 1.0 + (2.0 - 1.0));
    }

    #[test]
    fn infeasible_step_has_negative_infinite_pred() {
        let phi = ProxFunction::boxed(Vector::zeros(1), Vector::from_element(1, 1.0)).unwrap();
        let m = model(&[1.0], DMatrix::zeros(1, 1));
        let pred = predicted_reduction(&m, &phi, &Vector::from_element(1, 0.5), &Vector::from_element(1, 2.0));
        assert_eq!(pred, f64::NEG_INFINITY);
    }

    #[test]
    fn linear_model_accepts_initial_r() {
        let zero = ProxFunction::zero(2);
        let m = model(&[0.3, -0.4], DMatrix::zeros(2, 2));
        let x = Vector::zeros(2);
        // ‖r·g‖ = 0.5·r; with δ = 1 the ball binds at r = 2 after doubling from 0.25.
        let (r, s) = cauchy_search(&m, &zero, &x, 1.0, 0.25, &SearchParams::default()).unwrap();
        assert_eq!(r, 2.0);
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    /// Largest accepted `r` over the grid {2^j}: for the 1-D model
    /// m(s) = −s + s² the arc step is s(r) = r and the decrease test reads
    /// r − r² ≥ 0.75·r, i.e. r ≤ 0.25.
    #[test]
    fn one_dimensional_quadratic_matches_scan() {
        let zero = ProxFunction::zero(1);
        let m = model(&[-1.0], DMatrix::from_element(1, 1, 2.0));
        let x = Vector::zeros(1);
        let delta = 10.0;
        let mut best = None;
        for j in -20..=20 {
            let r = 2f64.powi(j);
            let s = r;
            let pred = s - s * s;
            if s <= delta && pred >= 0.75 / r * s * s {
                best = Some(r);
            }
        }
        let (r, s) = cauchy_search(&m, &zero, &x, delta, 1.0, &SearchParams::default()).unwrap();
        assert_eq!(Some(r), best);
        assert_eq!(r, 0.25);
        assert_eq!(s[0], 0.25);
    }

    #[test]
    fn refine_with_zero_iterations_returns_cauchy_step() {
        let zero = ProxFunction::zero(2);
        let m = model(&[1.0, 1.0], DMatrix::identity(2, 2));
        let sc = Vector::from_row_slice(&[-0.1, -0.1]);
        let (s, it) = refine_spg(&m, &zero, &Vector::zeros(2), &sc, 1.0, 0, &SearchParams::default()).unwrap();
        assert_eq!(s, sc);
        assert_eq!(it, 0);
    }

    #[test]
    fn cauchy_failure_is_reported() {
        // the radius excludes every arc point reached within three halvings
        let zero = ProxFunction::zero(1);
        let m = model(&[1.0], DMatrix::zeros(1, 1));
        let params = SearchParams { max_halvings: 3, ..SearchParams::default() };
        let err = cauchy_search(&m, &zero, &Vector::zeros(1), 1e-30, 1.0, &params).unwrap_err();
        assert!(matches!(err, Error::CauchyFailure { halvings: 3 }));
    }
}
