//! Antipodal bit vectors b ∈ {−1,+1}^K.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Sign with the tie convention sign(0) = +1, applied everywhere a real
/// value is sliced to a bit.
pub fn sign_pm(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

/// A length-K vector over {−1,+1}.
///
/// Ordering is lexicographic with −1 before +1, which is the tie-break
/// order used by the exhaustive detector and neighborhood scans.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BitVector(Vec<i8>);

impl BitVector {
    /// Wraps a sign vector; every entry must be −1 or +1.
    pub fn new(signs: Vec<i8>) -> Self {
        assert!(
            signs.iter().all(|&s| s == 1 || s == -1),
            "bit vector entries must be ±1"
        );
        BitVector(signs)
    }

    /// All-(+1) vector of length `k`.
    pub fn all_plus(k: usize) -> Self {
        BitVector(vec![1; k])
    }

    /// Componentwise sign of a real vector, sign(0) = +1.
    pub fn from_signs_of(values: &[f64]) -> Self {
        BitVector(values.iter().map(|&v| sign_pm(v)).collect())
    }

    /// Uniformly random vector over {−1,+1}^k.
    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        BitVector((0..k).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sign at position `k` as an integer (−1 or +1).
    pub fn get(&self, k: usize) -> i8 {
        self.0[k]
    }

    /// Sign at position `k` as a float.
    pub fn get_f(&self, k: usize) -> f64 {
        f64::from(self.0[k])
    }

    /// Flips bit `k` in place.
    pub fn flip(&mut self, k: usize) {
        self.0[k] = -self.0[k];
    }

    /// Flips every bit in `set` in place.
    pub fn flip_set(&mut self, set: &[usize]) {
        for &k in set {
            self.0[k] = -self.0[k];
        }
    }

    /// Copy with the bits in `set` flipped.
    pub fn with_flipped(&self, set: &[usize]) -> Self {
        let mut out = self.clone();
        for &k in set {
            out.flip(k);
        }
        out
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    /// The bits as f64 values, for dense linear algebra.
    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&s| f64::from(s)).collect()
    }

    /// Number of positions where `self` and `other` differ.
    pub fn hamming_distance(&self, other: &BitVector) -> usize {
        assert_eq!(self.len(), other.len(), "length mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl std::fmt::Display for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", if *s > 0 { "+" } else { "-" })?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn test_sign_zero_is_plus_one() {
        assert_eq!(sign_pm(0.0), 1);
        assert_eq!(sign_pm(-0.0), 1);
        assert_eq!(sign_pm(-1e-300), -1);
    }

    #[test]
    #[should_panic(expected = "must be ±1")]
    fn test_rejects_non_antipodal_entries() {
        BitVector::new(vec![1, 0, -1]);
    }

    #[test]
    fn test_lexicographic_order_minus_first() {
        let a = BitVector::new(vec![-1, 1]);
        let b = BitVector::new(vec![1, -1]);
        assert!(a < b);
    }

    #[test]
    fn test_hamming_distance_counts_flips() {
        let a = BitVector::new(vec![1, 1, -1, 1]);
        let b = a.with_flipped(&[0, 2]);
        assert_eq!(a.hamming_distance(&b), 2);
        assert_eq!(a.hamming_distance(&a), 0);
    }

    #[test]
    fn test_random_is_seed_deterministic() {
        let mut r1 = ChaCha8Rng::seed_from_u64(5);
        let mut r2 = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(BitVector::random(64, &mut r1), BitVector::random(64, &mut r2));
    }

    #[test]
    fn test_serializes_as_plain_sign_array() {
        let b = BitVector::new(vec![1, -1, 1]);
        assert_eq!(serde_json::to_string(&b).unwrap(), "[1,-1,1]");
    }
}
