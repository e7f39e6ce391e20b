//! Exhaustive maximum-likelihood detection over all 2^K bit vectors.
//!
//! Candidates are visited in Gray-code order so each differs from the last
//! by one bit and the likelihood updates in O(K) per candidate. Ties are
//! broken toward the lexicographically smallest vector (−1 sorts before +1)
//! so boundary inputs decode deterministically.

use crate::bits::BitVector;
use crate::channel::{ChannelInstance, Observation};
use crate::error::{Error, Result};
use crate::likelihood::{apply_flips_to_gradient, gradient_from_mf, likelihood_from_mf};

/// Largest K accepted by the exhaustive scan.
pub const GML_MAX_BITS: usize = 24;

/// Globally maximum-likelihood bit vector for the observation.
pub fn detect_gml(ch: &ChannelInstance, obs: &Observation) -> Result<BitVector> {
    detect_gml_scored(ch, obs).map(|(b, _)| b)
}

/// [`detect_gml`] also returning the winning likelihood value.
pub fn detect_gml_scored(ch: &ChannelInstance, obs: &Observation) -> Result<(BitVector, f64)> {
    let k = ch.k();
    if k > GML_MAX_BITS {
        return Err(Error::BudgetExceeded {
            what: "exhaustive likelihood scan".into(),
            needed: 1u128 << k,
            cap: 1u128 << GML_MAX_BITS,
        });
    }
    let y = obs.mf_output();
    let h = ch.weighted();

    let mut b = BitVector::new(vec![-1; k]);
    let mut g = gradient_from_mf(ch, y, &b);
    let mut f = likelihood_from_mf(ch, y, &b);
    let mut best_b = b.clone();
    let mut best_f = f;

    for i in 1u64..(1u64 << k) {
        let flip = [i.trailing_zeros() as usize];
        // Single-bit move: Δf = −2·b_j·g_j − 2·H_jj with the pre-flip b.
        f += -2.0 * b.get_f(flip[0]) * g[flip[0]] - 2.0 * h.get(flip[0], flip[0]);
        apply_flips_to_gradient(&mut g, h, &flip, &b);
        b.flip_set(&flip);
        let tol = 1e-9 * (1.0 + f.abs().max(best_f.abs()));
        if f > best_f + tol {
            best_f = f;
            best_b = b.clone();
        } else if f >= best_f - tol && b < best_b {
            best_b = b.clone();
        }
    }
    // Report the exact value at the winner, free of accumulated drift.
    let exact = likelihood_from_mf(ch, y, &best_b);
    Ok((best_b, exact))
}
