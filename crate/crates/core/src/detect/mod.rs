//! Symbol detectors: exhaustive maximum likelihood, likelihood ascent
//! search with pluggable schedules, and bounded local search over
//! multi-bit flip neighborhoods.

use crate::bits::BitVector;
use crate::channel::{ChannelInstance, Observation};
use crate::seed::stream_rng;
use serde::{Deserialize, Serialize};

pub mod gml;
pub mod las;
pub mod lmlas;
pub mod schedule;

pub use gml::{detect_gml, detect_gml_scored};
pub use las::{detect_las, detect_las_with_threshold_scale};
pub use lmlas::{detect_lmlas, is_lml_point, LmlasConfig};
pub use schedule::{
    candidates_masked, hybrid_default, next_candidates, Phase, SchedulePolicy,
};

/// Outcome of one detector run.
#[derive(Debug, Clone, Serialize)]
pub struct DetectorTrace {
    /// Converged bit vector b*.
    pub output: BitVector,
    /// Steps executed (candidate sets examined, or accepted moves for the
    /// neighborhood search).
    pub steps: usize,
    /// Total bit flips Σ|L_p(n)| from b(0) to b*.
    pub flips: usize,
    /// Likelihood after each step; element 0 is the starting value.
    pub likelihood_trace: Vec<f64>,
    /// Average flips per bit, c = flips/K.
    pub flip_rate: f64,
    /// Likelihood at the output.
    pub final_likelihood: f64,
    /// True when the step cap was exhausted before convergence. A periodic
    /// single-bit schedule should never set this.
    pub anomaly: bool,
    /// ℓ₁ norm of the gradient at the output.
    pub grad_l1: f64,
    /// Per-bit minimum candidate threshold summed over the final no-flip
    /// verification window; `grad_l1` never exceeds it at a fixed point.
    /// `None` when the run did not converge or the bound does not apply.
    pub threshold_bound: Option<f64>,
}

/// How a search is seeded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitKind {
    /// Uniform over {−1,+1}^K, deterministic in the seed.
    Random,
    /// Componentwise sign of the matched-filter statistic, sign(0) = +1.
    MatchedFilter,
    /// A caller-supplied vector.
    Given(BitVector),
}

/// Builds the starting vector for a detector run.
pub fn initial_vector(
    kind: &InitKind,
    ch: &ChannelInstance,
    obs: &Observation,
    seed: u64,
) -> BitVector {
    match kind {
        InitKind::Random => {
            let mut rng = stream_rng(seed, 0x696e_6974, 0);
            BitVector::random(ch.k(), &mut rng)
        }
        InitKind::MatchedFilter => BitVector::from_signs_of(obs.mf_output()),
        InitKind::Given(b) => b.clone(),
    }
}
