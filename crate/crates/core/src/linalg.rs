//! Small numeric helpers shared across modules.

use crate::Vector;

/// Sums vectors by recursive halving so the result depends only on the
/// order of `items`, never on how the work was scheduled.
pub fn pairwise_sum(items: &[Vector], dim: usize) -> Vector {
    match items.len() {
        0 => Vector::zeros(dim),
        1 => items[0].clone(),
        n => {
            let (left, right) = items.split_at(n / 2);
            pairwise_sum(left, dim) + pairwise_sum(right, dim)
        }
    }
}

pub fn pairwise_sum_scalars(items: &[f64]) -> f64 {
    match items.len() {
        0 => 0.0,
        1 => items[0],
        2 => items[0] + items[1],
        n => {
            let (left, right) = items.split_at(n / 2);
            pairwise_sum_scalars(left) + pairwise_sum_scalars(right)
        }
    }
}

pub fn pairwise_mean(items: &[Vector], dim: usize) -> Vector {
    let n = items.len().max(1) as f64;
    pairwise_sum(items, dim) / n
}

pub fn pairwise_mean_scalars(items: &[f64]) -> f64 {
    pairwise_sum_scalars(items) / items.len().max(1) as f64
}

pub fn inf_norm(v: &Vector) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn all_finite(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite())
}
