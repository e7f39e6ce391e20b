//! Candidate-set schedules for likelihood ascent search.
//!
//! A schedule decides, at every step n, which bit indices L(n) are tested
//! for flipping. Fixed schedules (sequential, parallel, group) cycle through
//! deterministic sets; greedy schedules (error-height elimination, furthest
//! from decision margin) rank bits by the current gradient; hybrid chains
//! phases with step budgets, ending in a single-bit phase so the fixed
//! points coincide with one-bit-stable vectors.

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::seed::stream_rng;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// One phase of a hybrid schedule: a policy run for a step budget.
/// The final phase of a hybrid ignores its budget and runs to convergence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub policy: SchedulePolicy,
    pub budget: usize,
}

/// Which bits are tested at each search step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulePolicy {
    /// One bit per step, cycling 0, 1, …, K−1, 0, …
    SequentialCircular,
    /// One uniformly random bit per step (deterministic in the seed).
    SequentialRandom { seed: u64 },
    /// All K bits every step.
    Parallel,
    /// Disjoint index groups visited round-robin.
    Group { partition: Vec<Vec<usize>> },
    /// The m bits with the greatest flip desirability −b_k·g_k/A_k
    /// (`signed` switches to the raw ranking g_k/A_k).
    Ehe { m: usize, signed: bool },
    /// The m bits furthest past the decision margin, ranked by |g_k| − A_k/2.
    Fmd { m: usize },
    /// Phases executed in order; the last phase runs until convergence.
    Hybrid { phases: Vec<Phase> },
}

impl SchedulePolicy {
    /// Largest candidate-set size this policy can emit in one step.
    pub fn max_step_width(&self, k: usize) -> usize {
        match self {
            SchedulePolicy::SequentialCircular | SchedulePolicy::SequentialRandom { .. } => 1,
            SchedulePolicy::Parallel => k,
            SchedulePolicy::Group { partition } => {
                partition.iter().map(Vec::len).max().unwrap_or(0)
            }
            SchedulePolicy::Ehe { m, .. } | SchedulePolicy::Fmd { m } => *m,
            SchedulePolicy::Hybrid { phases } => phases
                .iter()
                .map(|p| p.policy.max_step_width(k))
                .max()
                .unwrap_or(0),
        }
    }

    /// True when every step of the terminal behaviour updates one bit.
    pub fn terminal_phase_is_single_bit(&self, k: usize) -> bool {
        match self {
            SchedulePolicy::Hybrid { phases } => phases
                .last()
                .is_some_and(|p| p.policy.max_step_width(k) == 1),
            other => other.max_step_width(k) == 1,
        }
    }

    /// Checks the policy is well formed for a K-bit problem.
    pub fn validate(&self, k: usize) -> Result<()> {
        match self {
            SchedulePolicy::SequentialCircular
            | SchedulePolicy::SequentialRandom { .. }
            | SchedulePolicy::Parallel => Ok(()),
            SchedulePolicy::Group { partition } => {
                let mut seen = vec![false; k];
                for group in partition {
                    if group.is_empty() {
                        return Err(Error::InvalidConfig("empty group in partition".into()));
                    }
                    for &idx in group {
                        if idx >= k {
                            return Err(Error::InvalidConfig(format!(
                                "group index {idx} out of range for K={k}"
                            )));
                        }
                        if seen[idx] {
                            return Err(Error::InvalidConfig(format!(
                                "index {idx} appears in two groups"
                            )));
                        }
                        seen[idx] = true;
                    }
                }
                if seen.iter().all(|&s| s) {
                    Ok(())
                } else {
                    Err(Error::InvalidConfig(
                        "partition must cover every index".into(),
                    ))
                }
            }
            SchedulePolicy::Ehe { m, .. } | SchedulePolicy::Fmd { m } => {
                if *m >= 1 && *m <= k {
                    Ok(())
                } else {
                    Err(Error::InvalidConfig(format!(
                        "candidate count {m} must lie in 1..={k}"
                    )))
                }
            }
            SchedulePolicy::Hybrid { phases } => {
                if phases.is_empty() {
                    return Err(Error::InvalidConfig("hybrid needs at least one phase".into()));
                }
                for phase in phases {
                    if matches!(phase.policy, SchedulePolicy::Hybrid { .. }) {
                        return Err(Error::InvalidConfig("hybrid phases cannot nest".into()));
                    }
                    phase.policy.validate(k)?;
                }
                for phase in &phases[..phases.len() - 1] {
                    if phase.budget == 0 {
                        return Err(Error::InvalidConfig(
                            "non-final hybrid phases need budget >= 1".into(),
                        ));
                    }
                }
                if !self.terminal_phase_is_single_bit(k) {
                    return Err(Error::InvalidConfig(
                        "final hybrid phase must update one bit per step".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Default hybrid: a parallel burst for ⌈log₂K⌉ steps, one period of
/// ⌈√K⌉-sized groups, then circular single-bit sweeps to convergence.
pub fn hybrid_default(k: usize) -> SchedulePolicy {
    assert!(k >= 1);
    let burst = (k as f64).log2().ceil().max(1.0) as usize;
    let group_size = (k as f64).sqrt().ceil() as usize;
    let partition: Vec<Vec<usize>> = (0..k)
        .collect::<Vec<_>>()
        .chunks(group_size)
        .map(|c| c.to_vec())
        .collect();
    let period = partition.len();
    SchedulePolicy::Hybrid {
        phases: vec![
            Phase {
                policy: SchedulePolicy::Parallel,
                budget: burst,
            },
            Phase {
                policy: SchedulePolicy::Group { partition },
                budget: period,
            },
            Phase {
                policy: SchedulePolicy::SequentialCircular,
                budget: 0,
            },
        ],
    }
}

/// Candidate set L(n) for step `n` given the current search state.
///
/// Greedy policies rank every index; [`candidates_masked`] additionally
/// restricts them to not-yet-verified bits so convergence sweeps terminate.
pub fn next_candidates(
    policy: &SchedulePolicy,
    n: usize,
    g: &[f64],
    b: &BitVector,
    a: &[f64],
) -> Vec<usize> {
    candidates_masked(policy, n, g, b, a, None)
}

/// [`next_candidates`] with an optional exclusion mask: when `covered` is
/// given, greedy policies rank only indices with `covered[k] == false`.
/// Deterministic schedules ignore the mask.
pub fn candidates_masked(
    policy: &SchedulePolicy,
    n: usize,
    g: &[f64],
    b: &BitVector,
    a: &[f64],
    covered: Option<&[bool]>,
) -> Vec<usize> {
    let k = b.len();
    match policy {
        SchedulePolicy::SequentialCircular => vec![n % k],
        SchedulePolicy::SequentialRandom { seed } => {
            let mut rng = stream_rng(*seed, 0x7363_6865, n as u64);
            vec![rng.random_range(0..k)]
        }
        SchedulePolicy::Parallel => (0..k).collect(),
        SchedulePolicy::Group { partition } => partition[n % partition.len()].clone(),
        SchedulePolicy::Ehe { m, signed } => {
            let score = |i: usize| {
                if *signed {
                    g[i] / a[i]
                } else {
                    -b.get_f(i) * g[i] / a[i]
                }
            };
            top_m(k, *m, covered, score)
        }
        SchedulePolicy::Fmd { m } => top_m(k, *m, covered, |i| g[i].abs() - 0.5 * a[i]),
        SchedulePolicy::Hybrid { phases } => {
            let (idx, local_n) = hybrid_phase_at(phases, n);
            candidates_masked(&phases[idx].policy, local_n, g, b, a, covered)
        }
    }
}

/// Resolves which phase of a hybrid handles global step `n`: returns the
/// phase index and the step index local to that phase. The last phase
/// absorbs all overflow.
pub fn hybrid_phase_at(phases: &[Phase], n: usize) -> (usize, usize) {
    let mut offset = 0;
    for (idx, phase) in phases.iter().enumerate() {
        let is_last = idx + 1 == phases.len();
        if is_last || n < offset + phase.budget {
            return (idx, n - offset);
        }
        offset += phase.budget;
    }
    unreachable!("hybrid phase list validated nonempty")
}

/// Indices of the `m` highest scores (ties to the lower index), restricted
/// to unmasked indices; returns fewer when the mask leaves fewer than `m`.
fn top_m<F: Fn(usize) -> f64>(k: usize, m: usize, covered: Option<&[bool]>, score: F) -> Vec<usize> {
    let mut ranked: Vec<usize> = (0..k)
        .filter(|&i| covered.is_none_or(|c| !c[i]))
        .collect();
    if ranked.is_empty() {
        // Everything verified; fall back to the full ranking.
        ranked = (0..k).collect();
    }
    ranked.sort_by(|&i, &j| score(j).partial_cmp(&score(i)).unwrap().then(i.cmp(&j)));
    ranked.truncate(m);
    ranked.sort_unstable();
    ranked
}
