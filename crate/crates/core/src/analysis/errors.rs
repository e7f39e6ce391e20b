//! Enumeration of sign error vectors and the indecomposability filter.
//!
//! An error vector describes how a demodulated vector differs from the
//! transmitted one: entry `+1`/`-1` marks a flipped bit (with the sign of the
//! transmitted bit), `0` marks an agreeing bit.  Per-bit error bounds sum over
//! the error vectors that touch that bit, optionally restricted to the
//! indecomposable ones, which cannot be split into two easier error patterns.

use crate::bits::BitVector;
use crate::channel::ChannelInstance;
use crate::error::{Error, Result};
use crate::mat::Matrix;

/// Cap on the number of candidate vectors an enumeration may visit.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

/// A sign error pattern over `{-1, 0, +1}^K` together with its support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorVector {
    entries: Vec<i8>,
    support: Vec<usize>,
}

impl ErrorVector {
    /// Builds an error vector from raw entries, validating the alphabet.
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.iter().any(|&e| e < -1 || e > 1) {
            return Err(Error::InvalidConfig(
                "error vector entries must lie in {-1, 0, +1}".into(),
            ));
        }
        let support = entries
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, _)| i)
            .collect();
        Ok(Self { entries, support })
    }

    /// Raw entries over `{-1, 0, +1}`.
    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    /// Number of nonzero entries.
    pub fn weight(&self) -> usize {
        self.support.len()
    }

    /// Indices of the nonzero entries, in increasing order.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Entry at index `k` as a float.
    pub fn get_f(&self, k: usize) -> f64 {
        f64::from(self.entries[k])
    }

    /// Whether this pattern can arise when `b` is transmitted.
    ///
    /// The difference `(b - b*) / 2` of two sign vectors has entry `b_k` where
    /// they disagree, so every nonzero entry must match the transmitted sign.
    pub fn is_admissible_for(&self, b: &BitVector) -> bool {
        self.support.iter().all(|&k| self.entries[k] == b.get(k))
    }

    /// The erroneous vector `b* = b - 2e` implied by this pattern.
    ///
    /// Only valid when the pattern is admissible for `b`.
    pub fn apply_to(&self, b: &BitVector) -> BitVector {
        let mut out = b.clone();
        for &k in &self.support {
            out.flip(k);
        }
        out
    }

    /// Quadratic form `e^T M e`, restricted to the support for efficiency.
    pub fn quad_form(&self, m: &Matrix) -> f64 {
        let mut total = 0.0;
        for &i in &self.support {
            let row = m.row(i);
            let ei = self.get_f(i);
            for &j in &self.support {
                total += ei * self.get_f(j) * row[j];
            }
        }
        total
    }
}

/// Number of vectors visited when enumerating patterns touching one fixed bit
/// with weight at most `max_weight`: sum over w of C(K-1, w-1) * 2^w.
fn enumeration_size(k: usize, max_weight: usize) -> u64 {
    let mut total: u128 = 0;
    for w in 1..=max_weight.min(k) {
        // C(k-1, w-1) support choices, 2^w sign patterns.
        let mut combos: u128 = 1;
        for i in 0..(w - 1) {
            combos = combos.saturating_mul((k - 1 - i) as u128) / (i as u128 + 1);
        }
        total = total.saturating_add(combos.saturating_mul(1u128 << w.min(127)));
    }
    total.min(u128::from(u64::MAX)) as u64
}

/// Enumerates all error vectors with a nonzero entry at `bit` and weight at
/// most `max_weight`; with the filter on, only indecomposable ones survive.
///
/// A vector is decomposable when its support splits into two nonempty parts
/// whose cross-correlation energy `e1^T H e2` is nonnegative: either part is
/// then at least as likely an error on its own, so compound patterns add
/// nothing to a union bound.  Diagonal (orthogonal) channels therefore keep
/// only the weight-1 vectors.
pub fn enumerate_error_set(
    ch: &ChannelInstance,
    bit: usize,
    max_weight: usize,
    indecomposable_filter: bool,
) -> Result<Vec<ErrorVector>> {
    let k = ch.k();
    if bit >= k {
        return Err(Error::InvalidConfig(format!(
            "bit index {bit} out of range for {k} bits"
        )));
    }
    if max_weight == 0 {
        return Err(Error::InvalidConfig("max_weight must be at least 1".into()));
    }
    let needed = enumeration_size(k, max_weight);
    if needed > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "error vector enumeration".into(),
            needed: u128::from(needed),
            cap: u128::from(ENUMERATION_BUDGET),
        });
    }

    let h = ch.weighted();
    let others: Vec<usize> = (0..k).filter(|&i| i != bit).collect();
    let mut out = Vec::new();
    let mut support = Vec::with_capacity(max_weight);
    for w in 1..=max_weight.min(k) {
        let mut chooser = SupportChooser::new(others.len(), w - 1);
        while let Some(extra) = chooser.next() {
            support.clear();
            support.push(bit);
            support.extend(extra.iter().map(|&i| others[i]));
            support.sort_unstable();
            for signs in 0..(1u32 << w) {
                let mut entries = vec![0i8; k];
                for (pos, &idx) in support.iter().enumerate() {
                    entries[idx] = if signs >> pos & 1 == 1 { -1 } else { 1 };
                }
                let ev = ErrorVector {
                    entries,
                    support: support.clone(),
                };
                if !indecomposable_filter || !is_decomposable(&ev, h) {
                    out.push(ev);
                }
            }
        }
    }
    Ok(out)
}

/// Lexicographic chooser over size-`w` subsets of `0..n`.
struct SupportChooser {
    n: usize,
    idx: Vec<usize>,
    fresh: bool,
    done: bool,
}

impl SupportChooser {
    fn new(n: usize, w: usize) -> Self {
        Self {
            n,
            idx: (0..w).collect(),
            fresh: true,
            done: w > n,
        }
    }

    fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(&self.idx);
        }
        let w = self.idx.len();
        if w == 0 {
            self.done = true;
            return None;
        }
        let mut i = w;
        loop {
            if i == 0 {
                self.done = true;
                return None;
            }
            i -= 1;
            if self.idx[i] + (w - i) < self.n {
                self.idx[i] += 1;
                for j in i + 1..w {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(&self.idx);
            }
        }
    }
}

/// Whether the support of `e` splits into two parts with nonnegative coupling.
fn is_decomposable(e: &ErrorVector, h: &Matrix) -> bool {
    let sup = e.support();
    let w = sup.len();
    if w < 2 {
        return false;
    }
    // Each unordered 2-partition appears once: the first support index is
    // pinned to part 1 and the remaining w-1 memberships are enumerated.
    for mask in 0..(1u32 << (w - 1)) {
        let mut coupling = 0.0;
        let mut part2_nonempty = false;
        for (pi, &i) in sup.iter().enumerate().skip(1) {
            let in_part2 = mask >> (pi - 1) & 1 == 1;
            part2_nonempty |= in_part2;
            if !in_part2 {
                continue;
            }
            // i ranges over part 2; accumulate e1^T H e2 against part 1.
            for (pj, &j) in sup.iter().enumerate() {
                let j_in_part1 = pj == 0 || mask >> (pj - 1) & 1 == 0;
                if j_in_part1 {
                    coupling += e.get_f(i) * e.get_f(j) * h.get(j, i);
                }
            }
        }
        if part2_nonempty && coupling >= 0.0 {
            return true;
        }
    }
    false
}
