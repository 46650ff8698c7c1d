//! Oracles shared by the integration tests.

use proxstorm::Vector;

/// Nearest point of `{lo ≤ y ≤ hi, wᵀy = c}` by enumerating which
/// coordinates sit at a bound; the free ones are `x − μw` for a shared `μ`.
pub fn enumerate_projection(x: &Vector, w: &Vector, c: f64, lo: &Vector, hi: &Vector) -> Vector {
    let d = x.len();
    let mut best: Option<(f64, Vector)> = None;
    for code in 0..3usize.pow(d as u32) {
        let mut state = vec![0u8; d];
        let mut m = code;
        for s in state.iter_mut() {
            *s = (m % 3) as u8;
            m /= 3;
        }
        let mut y = Vector::zeros(d);
        let (mut used, mut ww, mut wx) = (0.0, 0.0, 0.0);
        for i in 0..d {
            match state[i] {
                0 => {
                    y[i] = lo[i];
                    used += w[i] * lo[i];
                }
                1 => {
                    y[i] = hi[i];
                    used += w[i] * hi[i];
                }
                _ => {
                    ww += w[i] * w[i];
                    wx += w[i] * x[i];
                }
            }
        }
        if ww > 0.0 {
            let mu = (wx + used - c) / ww;
            for i in 0..d {
                if state[i] == 2 {
                    y[i] = x[i] - mu * w[i];
                }
            }
        } else if (used - c).abs() > 1e-12 {
            continue;
        }
        let feasible = (0..d).all(|i| y[i] >= lo[i] - 1e-12 && y[i] <= hi[i] + 1e-12);
        if feasible {
            let dist = (&y - x).norm_squared();
            if best.as_ref().is_none_or(|(b, _)| dist < *b) {
                best = Some((dist, y));
            }
        }
    }
    best.expect("nonempty feasible set").1
}
