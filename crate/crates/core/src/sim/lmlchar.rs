//! Statistical check that heavier error vectors sit farther from the
//! transmitted point on large random channels.
//!
//! Samples nested-support error-vector pairs (the lighter vector's support
//! strictly inside the heavier one's) on fresh channel realizations and
//! reports how often the exhaustive-search distance ordering is violated.
//! Because the quadratic form only involves crosscorrelations inside the
//! heavier support, each sample generates just the needed columns instead
//! of a full K-column channel, which keeps large-N sampling cheap.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seed::stream_rng;

/// Violation-rate report from [`run_lml_characteristic`].
#[derive(Debug, Clone, Serialize)]
pub struct LmlCharReport {
    /// Channel dimensions per realization.
    pub n: usize,
    /// Bits per realization implied by the load.
    pub k: usize,
    /// Weight cap of the lighter vector.
    pub m1: usize,
    /// Weight cap of the heavier vector.
    pub m2: usize,
    /// Nested pairs sampled.
    pub samples: u64,
    /// Pairs where the lighter vector was at least as far as the heavier.
    pub violations: u64,
    /// violations / samples.
    pub violation_rate: f64,
}

/// Distance ordering on one support Gram: true when the lighter prefix of
/// the sign pattern is at least as far as the full pattern. `r` is the
/// w2×w2 support crosscorrelation matrix in row-major order.
fn pair_is_violation(r: &[f64], w1: usize, w2: usize, signs: &[i8]) -> bool {
    debug_assert_eq!(r.len(), w2 * w2);
    debug_assert_eq!(signs.len(), w2);
    let quad = |w: usize| -> f64 {
        let mut total = 0.0;
        for i in 0..w {
            for j in 0..w {
                total += f64::from(signs[i]) * f64::from(signs[j]) * r[i * w2 + j];
            }
        }
        total
    };
    quad(w1) >= quad(w2)
}

/// Support crosscorrelations of `w` fresh binary ±N^(−1/2) columns,
/// computed exactly from sign agreements.
fn sample_support_gram<R: Rng + ?Sized>(rng: &mut R, n: usize, w: usize) -> Vec<f64> {
    let words = n.div_ceil(64);
    let tail_bits = n - (words - 1) * 64;
    let tail_mask = if tail_bits == 64 { u64::MAX } else { (1u64 << tail_bits) - 1 };
    let mut cols = vec![0u64; words * w];
    for c in 0..w {
        for word in 0..words {
            let mut v: u64 = rng.random();
            if word == words - 1 {
                v &= tail_mask;
            }
            cols[c * words + word] = v;
        }
    }
    let mut r = vec![0.0; w * w];
    for i in 0..w {
        r[i * w + i] = 1.0;
        for j in (i + 1)..w {
            let mut disagree = 0u32;
            for word in 0..words {
                disagree += (cols[i * words + word] ^ cols[j * words + word]).count_ones();
            }
            let dot = (n as f64 - 2.0 * f64::from(disagree)) / n as f64;
            r[i * w + j] = dot;
            r[j * w + i] = dot;
        }
    }
    r
}

/// Samples `samples` nested error-vector pairs on fresh N-dimensional
/// channels at load `alpha` and reports the distance-ordering violation
/// rate. The lighter weight is drawn from 1..=m1 and the heavier from
/// (m1+1)..=m2; the lighter vector is the heavier one restricted to a
/// strict support prefix, so both are error patterns of one transmission.
pub fn run_lml_characteristic(
    n: usize,
    alpha: f64,
    m1: usize,
    m2: usize,
    samples: u64,
    seed: u64,
) -> Result<LmlCharReport> {
    if n == 0 {
        return Err(Error::InvalidDimensions("channel dimension is zero".into()));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidConfig("load must be positive".into()));
    }
    let k = (n as f64 * alpha).round() as usize;
    if m1 == 0 || m2 <= m1 {
        return Err(Error::InvalidConfig(format!(
            "weight caps must satisfy 1 <= m1 < m2, got ({m1}, {m2})"
        )));
    }
    if m2 > k {
        return Err(Error::InvalidConfig(format!(
            "heavier weight cap {m2} exceeds the {k} bits implied by the load"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidConfig("sample count must be positive".into()));
    }

    let mut violations = 0u64;
    for s in 0..samples {
        let mut rng = stream_rng(seed, 0x6c6d_6c63, s);
        let w1 = rng.random_range(1..=m1);
        let w2 = rng.random_range((m1 + 1)..=m2);
        let r = sample_support_gram(&mut rng, n, w2);
        let signs: Vec<i8> = (0..w2)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        if pair_is_violation(&r, w1, w2, &signs) {
            violations += 1;
        }
    }
    Ok(LmlCharReport {
        n,
        k,
        m1,
        m2,
        samples,
        violations,
        violation_rate: violations as f64 / samples as f64,
    })
}
