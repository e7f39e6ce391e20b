//! Cutoff channel load: the largest load below which the high-SNR bad
//! solution of the large-system BER equations disappears.
//!
//! The cutoff is computed from a scalar interference-energy fixed point, then
//! converted to a load.  A separate closed form gives the critical load of
//! the simultaneous-flip schedule, which is far smaller — the price paid for
//! updating every unstable bit at once.

use crate::analysis::qfunc::q_function;
use crate::analysis::replica::EnergyDistribution;
use crate::error::{Error, Result};

/// Damping factor of the fixed-point iteration.
const DAMPING: f64 = 0.5;
/// Step-size tolerance that ends the iteration.
const STEP_TOL: f64 = 1e-12;
/// Iteration cap per start.
const MAX_ITERS: usize = 100_000;
/// Starting points, spread over four decades to catch multiple roots.
const STARTS: [f64; 4] = [1e-3, 0.1, 1.0, 10.0];

/// Closed-form critical load of the simultaneous-flip schedule:
/// `1/2 - 1/(4 ln 2)`, approximately 0.139326.
pub fn critical_load() -> f64 {
    0.5 - 1.0 / (4.0 * std::f64::consts::LN_2)
}

/// Interference-energy map whose fixed point determines the cutoff load.
fn interference_map(dist: &EnergyDistribution, i: f64) -> f64 {
    let num = dist.expect(|a| a.powi(3) * (-a * a / (2.0 * i)).exp());
    let den = dist.expect(|a| a * a * q_function(a / i.sqrt()));
    num * num / (8.0 * std::f64::consts::PI * den * den)
}

/// Load at which a given interference energy is marginally self-sustaining.
fn load_at(dist: &EnergyDistribution, i: f64) -> f64 {
    i / (4.0 * dist.expect(|a| a * a * q_function(a / i.sqrt())))
}

/// Cutoff channel load of an energy distribution.
///
/// Solves the interference fixed point by damped iteration from several
/// starts and reports the root with the largest load, as `(load, I)`.
/// Starts whose evaluation underflows (interference far below the
/// distribution's scale) are abandoned; failure of every start is an error
/// carrying the last iteration count and residual.
pub fn cutoff_load(dist: &EnergyDistribution) -> Result<(f64, f64)> {
    let mut roots: Vec<f64> = Vec::new();
    let mut last_iters = 0usize;
    let mut last_residual = f64::NAN;
    for &start in &STARTS {
        let mut i = start;
        let mut converged = false;
        for iter in 0..MAX_ITERS {
            let t = interference_map(dist, i);
            if !t.is_finite() || i < 1e-14 {
                last_iters = iter;
                last_residual = f64::NAN;
                break;
            }
            let next = i + DAMPING * (t - i);
            let step = (next - i).abs();
            i = next;
            if step < STEP_TOL {
                last_iters = iter + 1;
                last_residual = (interference_map(dist, i) - i).abs();
                converged = last_residual < 1e-10 * (1.0 + i);
                break;
            }
        }
        if converged && roots.iter().all(|&r| (r - i).abs() > 1e-6 * (1.0 + i)) {
            roots.push(i);
        }
    }
    let best = roots
        .iter()
        .map(|&i| (load_at(dist, i), i))
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    match best {
        Some((alpha, i)) => Ok((alpha, i)),
        None => Err(Error::NoConvergence {
            what: "interference fixed point".into(),
            iterations: last_iters,
            residual: last_residual,
        }),
    }
}
