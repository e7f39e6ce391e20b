//! Signal distances, per-bit union bounds on BER, and efficiency lower bounds.
//!
//! Each detector family assigns an error vector a signal distance; summing
//! Gaussian tails of these distances over the error set yields an analytic
//! per-bit BER upper bound, and the smallest normalized distance yields a
//! lower bound on the asymptotic efficiency of power usage.

use crate::analysis::errors::{enumerate_error_set, ErrorVector};
use crate::analysis::qfunc::q_function;
use crate::channel::ChannelInstance;
use crate::error::{Error, Result};

/// Which detector's geometry a distance or bound refers to.
///
/// `Las` carries the per-bit threshold diagonal of the converged search; the
/// single-bit schedules use `t_k = A_k^2`, which is exactly the `Lml1` case.
#[derive(Debug, Clone, PartialEq)]
pub enum DistanceKind {
    /// Exhaustive decision regions: `sqrt(e^T H e)`.
    Gml,
    /// Ascent search with threshold diagonal `T`: `e^T (2H - T) e / |e|`.
    Las(Vec<f64>),
    /// Single-bit ascent / radius-1 local maxima: `T = diag(A_k^2)`.
    Lml1,
}

/// Threshold diagonal of the simultaneous (all-candidates) schedule:
/// `t_k = sum_j |H_kj|`, the most conservative stable threshold.
pub fn parallel_thresholds(ch: &ChannelInstance) -> Vec<f64> {
    let h = ch.weighted();
    let k = ch.k();
    (0..k)
        .map(|i| h.row(i).iter().map(|v| v.abs()).sum())
        .collect()
}

/// Signal distance of an error vector under the given detector geometry.
pub fn signal_distance(ch: &ChannelInstance, e: &ErrorVector, kind: &DistanceKind) -> Result<f64> {
    let h = ch.weighted();
    let quad = e.quad_form(h);
    let weight = e.weight() as f64;
    if weight == 0.0 {
        return Err(Error::InvalidConfig(
            "signal distance of the zero vector is undefined".into(),
        ));
    }
    match kind {
        DistanceKind::Gml => Ok(quad.max(0.0).sqrt()),
        DistanceKind::Las(t) => {
            if t.len() != ch.k() {
                return Err(Error::InvalidDimensions(format!(
                    "threshold diagonal has {} entries for {} bits",
                    t.len(),
                    ch.k()
                )));
            }
            let diag: f64 = e.support().iter().map(|&i| t[i]).sum();
            Ok((2.0 * quad - diag) / weight.sqrt())
        }
        DistanceKind::Lml1 => {
            let diag: f64 = e
                .support()
                .iter()
                .map(|&i| ch.amplitude(i) * ch.amplitude(i))
                .sum();
            Ok((2.0 * quad - diag) / weight.sqrt())
        }
    }
}

/// A truncated per-bit BER upper bound together with its truncation depth.
#[derive(Debug, Clone, PartialEq)]
pub struct UnionBound {
    /// The bound value (may exceed 1 for loose truncations; still an upper bound).
    pub value: f64,
    /// Largest error weight included in the sum.
    pub max_weight: usize,
    /// True when `max_weight` is below the number of bits, i.e. deeper error
    /// patterns exist but were not summed.
    pub truncated: bool,
    /// Number of error vectors that contributed terms.
    pub terms: usize,
}

/// Per-bit BER upper bound: `sum over the error set of 2^-w(e) Q(d(e)/sigma)`.
///
/// The sum runs over indecomposable error vectors touching `bit`, truncated
/// at `max_weight`.  Distances may be negative for the search kinds, in which
/// case the Gaussian tail correctly exceeds one half.
pub fn union_bound(
    ch: &ChannelInstance,
    sigma: f64,
    bit: usize,
    kind: &DistanceKind,
    max_weight: usize,
) -> Result<UnionBound> {
    if sigma <= 0.0 {
        return Err(Error::InvalidConfig(
            "union bound requires a positive noise level".into(),
        ));
    }
    let set = enumerate_error_set(ch, bit, max_weight, true)?;
    let mut value = 0.0;
    for e in &set {
        let d = signal_distance(ch, e, kind)?;
        value += 0.5f64.powi(e.weight() as i32) * q_function(d / sigma);
    }
    Ok(UnionBound {
        value,
        max_weight,
        truncated: max_weight < ch.k(),
        terms: set.len(),
    })
}

/// Lower bound on the asymptotic efficiency of bit `bit` under a search
/// geometry: the squared, clamped minimum of `[e^T (2H - T) e]^+ / (A_k |e|)`
/// over error vectors touching the bit.
///
/// Only the search kinds admit this bound; the exhaustive kind is excluded.
pub fn ame_lower_bound(
    ch: &ChannelInstance,
    bit: usize,
    kind: &DistanceKind,
    max_weight: usize,
) -> Result<f64> {
    if matches!(kind, DistanceKind::Gml) {
        return Err(Error::InvalidConfig(
            "the efficiency lower bound is defined for the search kinds only".into(),
        ));
    }
    // The minimum is taken over the unfiltered error set: a superset can only
    // lower the minimum, so the result remains a valid lower bound.
    let set = enumerate_error_set(ch, bit, max_weight, false)?;
    let a_k = ch.amplitude(bit);
    let mut least = f64::INFINITY;
    for e in &set {
        let d = signal_distance(ch, e, kind)?.max(0.0);
        let ratio = d / a_k;
        if ratio < least {
            least = ratio;
        }
    }
    Ok((least * least).clamp(0.0, 1.0))
}
