use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand::seq::index::sample;
use rand_distr::StandardNormal;

use super::{Pool, SampleId, StochasticProblem};
use crate::linalg::{pairwise_mean, pairwise_mean_scalars};
use crate::model::LinearOperator;
use crate::{Error, ProxFunction, Result, Vector};

/// ℓ¹-regularized logistic regression over a finite synthetic pool.
///
/// `F(θ, i) = softplus(a_iᵀθ) − y_i a_iᵀθ` (binary cross entropy of
/// `sigmoid(a_iᵀθ)` against label `y_i`) and `φ = λ‖θ‖₁`.
#[derive(Debug, Clone)]
pub struct LogisticL1 {
    rows: Vec<Vector>,
    labels: Vec<f64>,
    truth: Option<Vector>,
    phi: ProxFunction,
    lipschitz: f64,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

impl LogisticL1 {
    /// Synthetic pool: standard normal features, a ground-truth weight vector
    /// with `⌈d/4⌉` entries of magnitude one and Bernoulli labels.
    pub fn new(dim: usize, pool_size: usize, lambda: f64, seed: u64) -> Self {
        assert!(dim >= 1 && pool_size >= 2, "need d >= 1 and pool_size >= 2");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut truth = Vector::zeros(dim);
        for i in sample(&mut rng, dim, dim.div_ceil(4)).into_iter() {
            truth[i] = if rng.random::<bool>() { 1.0 } else { -1.0 };
        }
        let mut rows = Vec::with_capacity(pool_size);
        let mut labels = Vec::with_capacity(pool_size);
        for _ in 0..pool_size {
            let a = Vector::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)));
            let p = sigmoid(a.dot(&truth));
            labels.push(if rng.random::<f64>() < p { 1.0 } else { 0.0 });
            rows.push(a);
        }
        Self::from_parts(rows, labels, Some(truth), lambda).expect("valid synthetic pool")
    }

    pub fn from_parts(rows: Vec<Vector>, labels: Vec<f64>, truth: Option<Vector>, lambda: f64) -> Result<Self> {
        if rows.len() < 2 || rows.len() != labels.len() {
            return Err(Error::Parameter("pool needs >= 2 rows with one label each".into()));
        }
        let dim = rows[0].len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Parameter("pool rows must share a positive dimension".into()));
        }
        if labels.iter().any(|&y| y != 0.0 && y != 1.0) {
            return Err(Error::Parameter("labels must be 0 or 1".into()));
        }
        let n = rows.len() as f64;
        let mut gram = DMatrix::<f64>::zeros(dim, dim);
        for r in &rows {
            gram.ger(1.0, r, r, 1.0);
        }
        let top = gram.symmetric_eigenvalues().iter().cloned().fold(0.0, f64::max);
        Ok(Self {
            rows,
            labels,
            truth,
            phi: ProxFunction::l1(dim, lambda)?,
            lipschitz: 0.25 * top / n,
        })
    }


    pub fn pool_size(&self) -> usize {
        self.rows.len()
    }

    pub fn ground_truth(&self) -> Option<&Vector> {
        self.truth.as_ref()
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Writes the pool as CSV, one sample per row: features then label.
    pub fn write_pool_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let dim = self.dim();
        let mut header: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
        header.push("y".into());
        w.write_record(&header)?;
        for (r, y) in self.rows.iter().zip(&self.labels) {
            let mut rec: Vec<String> = r.iter().map(|v| v.to_string()).collect();
            rec.push(y.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_pool_csv(path: impl AsRef<Path>, lambda: f64) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parameter(format!("bad pool value: {e}")))?;
            let (y, x) = vals
                .split_last()
                .ok_or_else(|| Error::Parameter("empty pool row".into()))?;
            rows.push(Vector::from_row_slice(x));
            labels.push(*y);
        }
        Self::from_parts(rows, labels, None, lambda)
    }

    fn margin(&self, x: &Vector, i: usize) -> f64 {
        self.rows[i].dot(x)
    }
}

struct LogisticCurvature<'a> {
    rows: &'a [Vector],
    picks: Vec<(usize, f64)>,
}

impl LinearOperator for LogisticCurvature<'_> {
    fn dim(&self) -> usize {
        self.rows[0].len()
    }

    fn apply(&self, v: &Vector) -> Vector {
        let mut acc = Vector::zeros(self.dim());
        for &(i, w) in &self.picks {
            let a = &self.rows[i];
            acc.axpy(w * a.dot(v), a, 1.0);
        }
        acc / self.picks.len().max(1) as f64
    }
}

impl StochasticProblem for LogisticL1 {
    fn name(&self) -> &str {
        "logistic_l1"
    }

    fn dim(&self) -> usize {
        self.rows[0].len()
    }

    fn phi(&self) -> &ProxFunction {
        &self.phi
    }

    fn pool(&self) -> Pool {
        Pool::Finite(self.rows.len())
    }

    fn initial_point(&self) -> Vector {
        Vector::zeros(self.dim())
    }

    fn value(&self, x: &Vector, xi: SampleId) -> f64 {
        let i = xi.0 as usize;
        let z = self.margin(x, i);
        softplus(z) - self.labels[i] * z
    }

    fn value_difference(&self, x: &Vector, y: &Vector, xi: SampleId) -> f64 {
        // softplus(u) − softplus(v) = log1p(σ(v)·expm1(u − v)), with u − v
        // taken from x − y directly.
        let i = xi.0 as usize;
        let d = self.rows[i].dot(&(x - y));
        let v = self.margin(y, i);
        (sigmoid(v) * d.exp_m1()).ln_1p() - self.labels[i] * d
    }

    fn gradient(&self, x: &Vector, xi: SampleId) -> Vector {
        let i = xi.0 as usize;
        let z = self.margin(x, i);
        &self.rows[i] * (sigmoid(z) - self.labels[i])
    }

    fn hess_vec(&self, x: &Vector, xi: SampleId, v: &Vector) -> Vector {
        let i = xi.0 as usize;
        let s = sigmoid(self.margin(x, i));
        &self.rows[i] * (s * (1.0 - s) * self.rows[i].dot(v))
    }

    fn curvature<'a>(&'a self, x: &Vector, samples: &[SampleId]) -> Box<dyn LinearOperator + 'a> {
        let picks = samples
            .iter()
            .map(|xi| {
                let i = xi.0 as usize;
                let s = sigmoid(self.margin(x, i));
                (i, s * (1.0 - s))
            })
            .collect();
        Box::new(LogisticCurvature { rows: &self.rows, picks })
    }

    fn true_oracle(&self, x: &Vector) -> Option<(f64, Vector)> {
        let n = self.rows.len();
        let values: Vec<f64> = (0..n as u64).map(|i| self.value(x, SampleId(i))).collect();
        let grads: Vec<Vector> = (0..n as u64).map(|i| self.gradient(x, SampleId(i))).collect();
        Some((pairwise_mean_scalars(&values), pairwise_mean(&grads, self.dim())))
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz)
    }

    fn lower_bound_note(&self) -> &'static str {
        "cross entropy and the l1 norm are both nonnegative"
    }
}
