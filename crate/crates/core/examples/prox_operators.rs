//! Evaluates each proximal map on a small point and prints the stationarity
//! measure `h = (prox(x − r g) − x)/r` for a few step parameters.

use proxstorm::prox::{prox_gradient, ProxFunction};
use proxstorm::{Result, Vector};

fn main() -> Result<()> {
    let x = Vector::from_vec(vec![0.8, -0.05, 0.3, -1.4]);
    let g = Vector::from_vec(vec![0.5, 0.2, -1.0, 0.1]);
    let lo = Vector::from_element(4, -1.0);
    let hi = Vector::from_element(4, 1.0);

    let families = [
        ProxFunction::zero(4),
        ProxFunction::l1(4, 0.1)?,
        ProxFunction::boxed(lo.clone(), hi.clone())?,
        ProxFunction::box_budget(lo, hi, Vector::from_element(4, 1.0), 0.5)?,
    ];

    for phi in &families {
        println!("{}", phi.name());
        let p = phi.prox(&x, 1.0)?;
        println!("  prox(x)      = {:?}", p.as_slice());
        println!("  phi(prox(x)) = {:.6}", phi.value(&p));
        for r in [0.1, 1.0, 10.0] {
            let h = prox_gradient(&x, &g, r, phi)?;
            println!("  r = {r:<4}  |h| = {:.6}", h.norm());
        }
    }
    Ok(())
}
