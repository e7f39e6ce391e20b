//! Likelihood ascent search.
//!
//! From a starting vector, each step tests a schedule-chosen candidate set
//! L(n) and simultaneously flips every candidate k with b_k·g_k < −t_k(n),
//! where the threshold t_k(n) = Σ_{j∈L(n)} |H_kj| guarantees each step can
//! only increase the likelihood. The gradient is maintained incrementally;
//! the search stops at the first full verification window — every bit
//! covered by candidate sets with zero flips — which certifies a fixed
//! point of the schedule.

use super::schedule::{candidates_masked, hybrid_phase_at, SchedulePolicy};
use super::DetectorTrace;
use crate::bits::BitVector;
use crate::channel::{ChannelInstance, Observation};
use crate::error::Result;
use crate::likelihood::{
    apply_flips_to_gradient, gradient_from_mf, likelihood_delta, likelihood_from_mf,
};
use crate::mat::Matrix;

/// Candidate thresholds t_k = Σ_{j∈set} |H_kj| for each k in `set`.
pub fn thresholds_for(h: &Matrix, set: &[usize]) -> Vec<f64> {
    set.iter()
        .map(|&k| {
            let row = h.row(k);
            set.iter().map(|&j| row[j].abs()).sum()
        })
        .collect()
}

/// Runs likelihood ascent search from `b0` under `policy`.
///
/// `max_steps = 0` selects the default cap of 100·K. Hitting the cap is
/// reported through [`DetectorTrace::anomaly`], never as an error.
pub fn detect_las(
    ch: &ChannelInstance,
    obs: &Observation,
    b0: &BitVector,
    policy: &SchedulePolicy,
    max_steps: usize,
) -> Result<DetectorTrace> {
    detect_las_with_threshold_scale(ch, obs, b0, policy, max_steps, 1.0)
}

/// [`detect_las`] with the flip thresholds multiplied by `scale`.
///
/// `scale = 1.0` is the ascent-guaranteeing setting; smaller values admit
/// likelihood-decreasing flips and exist to demonstrate that the exact
/// thresholds are necessary, not just sufficient.
pub fn detect_las_with_threshold_scale(
    ch: &ChannelInstance,
    obs: &Observation,
    b0: &BitVector,
    policy: &SchedulePolicy,
    max_steps: usize,
    scale: f64,
) -> Result<DetectorTrace> {
    let k = ch.k();
    assert_eq!(b0.len(), k, "b0 length must match K");
    policy.validate(k)?;
    let cap = if max_steps == 0 { 100 * k } else { max_steps };
    let y = obs.mf_output();
    let h = ch.weighted();
    let a = ch.profile().amplitudes();

    let mut b = b0.clone();
    let mut g = gradient_from_mf(ch, y, &b);
    let mut f = likelihood_from_mf(ch, y, &b);
    let mut likelihood_trace = Vec::with_capacity(64);
    likelihood_trace.push(f);

    let mut covered = vec![false; k];
    let mut covered_count = 0usize;
    let mut min_threshold = vec![f64::INFINITY; k];
    let mut total_flips = 0usize;
    let mut converged = false;
    let mut steps = 0usize;
    let mut prev_phase = usize::MAX;
    let mut flip_buf: Vec<usize> = Vec::with_capacity(k);

    for step in 0..cap {
        // Hybrid phases each get a fresh verification window, and only the
        // terminal phase may declare convergence.
        let (phase_idx, in_final_phase) = match policy {
            SchedulePolicy::Hybrid { phases } => {
                let (idx, _) = hybrid_phase_at(phases, step);
                (idx, idx + 1 == phases.len())
            }
            _ => (0, true),
        };
        if phase_idx != prev_phase {
            if prev_phase != usize::MAX {
                covered.fill(false);
                covered_count = 0;
                min_threshold.fill(f64::INFINITY);
            }
            prev_phase = phase_idx;
        }

        let l = candidates_masked(policy, step, &g, &b, a, Some(&covered));
        let t = thresholds_for(h, &l);
        flip_buf.clear();
        for (&cand, &tk) in l.iter().zip(&t) {
            if b.get_f(cand) * g[cand] < -(scale * tk) {
                flip_buf.push(cand);
            }
        }
        steps = step + 1;
        if flip_buf.is_empty() {
            for (&cand, &tk) in l.iter().zip(&t) {
                if scale * tk < min_threshold[cand] {
                    min_threshold[cand] = scale * tk;
                }
                if !covered[cand] {
                    covered[cand] = true;
                    covered_count += 1;
                }
            }
            likelihood_trace.push(f);
            if covered_count == k && in_final_phase {
                converged = true;
                break;
            }
        } else {
            let delta = likelihood_delta(&g, h, &flip_buf, &b);
            apply_flips_to_gradient(&mut g, h, &flip_buf, &b);
            b.flip_set(&flip_buf);
            f += delta;
            total_flips += flip_buf.len();
            likelihood_trace.push(f);
            covered.fill(false);
            covered_count = 0;
            min_threshold.fill(f64::INFINITY);
        }
    }

    let grad_l1: f64 = g.iter().map(|v| v.abs()).sum();
    let threshold_bound = converged.then(|| min_threshold.iter().sum());
    Ok(DetectorTrace {
        output: b,
        steps,
        flips: total_flips,
        flip_rate: total_flips as f64 / k as f64,
        final_likelihood: f,
        likelihood_trace,
        anomaly: !converged,
        grad_l1,
        threshold_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generate_dense, transmit, two_bit_channel, EnergyProfile};
    use crate::detect::schedule::{hybrid_default, Phase};
    use crate::detect::{initial_vector, is_lml_point, InitKind};
    use crate::seed::stream_rng;
    use approx::assert_abs_diff_eq;

    fn zero_y_obs() -> Observation {
        Observation::from_mf_output(vec![0.0, 0.0], BitVector::all_plus(2))
    }

    #[test]
    fn test_two_bit_hand_trace_order_12() {
        let ch = two_bit_channel(0.4, 1.0, 0.6, 0.0);
        let trace = detect_las(
            &ch,
            &zero_y_obs(),
            &BitVector::all_plus(2),
            &SchedulePolicy::SequentialCircular,
            0,
        )
        .unwrap();
        // Bit 0 flips first (g₀ = −1.24 < −1), then both bits verify stable.
        assert_eq!(trace.output, BitVector::new(vec![-1, 1]));
        assert_eq!(trace.flips, 1);
        assert!(!trace.anomaly);
    }

    #[test]
    fn test_two_bit_hand_trace_order_21() {
        let ch = two_bit_channel(0.4, 1.0, 0.6, 0.0);
        // Same channel, reversed visit order: bit 1 flips (−0.60 < −0.36).
        let trace = detect_las(
            &ch,
            &zero_y_obs(),
            &BitVector::all_plus(2),
            &SchedulePolicy::Group {
                partition: vec![vec![1], vec![0]],
            },
            0,
        )
        .unwrap();
        assert_eq!(trace.output, BitVector::new(vec![1, -1]));
        assert_eq!(trace.flips, 1);
    }

    #[test]
    fn test_parallel_thresholds_hold_both_bits() {
        let ch = two_bit_channel(0.4, 1.0, 0.6, 0.0);
        // Full-set thresholds (1.24, 0.60) exceed both |g| values, so the
        // all-plus vector is already a fixed point of the parallel schedule.
        let trace = detect_las(
            &ch,
            &zero_y_obs(),
            &BitVector::all_plus(2),
            &SchedulePolicy::Parallel,
            0,
        )
        .unwrap();
        assert_eq!(trace.output, BitVector::all_plus(2));
        assert_eq!(trace.flips, 0);
    }

    #[test]
    fn test_lml_start_never_moves() {
        let ch = two_bit_channel(0.4, 1.0, 0.6, 0.0);
        for start in [BitVector::new(vec![1, -1]), BitVector::new(vec![-1, 1])] {
            for policy in [
                SchedulePolicy::SequentialCircular,
                SchedulePolicy::SequentialRandom { seed: 5 },
                SchedulePolicy::Ehe { m: 1, signed: false },
                SchedulePolicy::Fmd { m: 1 },
            ] {
                let trace = detect_las(&ch, &zero_y_obs(), &start, &policy, 0).unwrap();
                assert_eq!(trace.output, start, "{policy:?}");
                assert_eq!(trace.flips, 0);
            }
        }
    }

    #[test]
    fn test_likelihood_trace_monotone_all_policies() {
        let profile = EnergyProfile::two_class(24, 0.5, 1.0, 0.5).unwrap();
        let ch = generate_dense(32, 24, &profile, 0.4, 31).unwrap();
        let policies = [
            SchedulePolicy::SequentialCircular,
            SchedulePolicy::SequentialRandom { seed: 7 },
            SchedulePolicy::Parallel,
            SchedulePolicy::Ehe { m: 3, signed: false },
            SchedulePolicy::Ehe { m: 3, signed: true },
            SchedulePolicy::Fmd { m: 3 },
            hybrid_default(24),
        ];
        let mut rng = stream_rng(8, 0, 0);
        for trial in 0..40u64 {
            let truth = BitVector::random(24, &mut rng);
            let obs = transmit(&ch, &truth, 100 + trial);
            let b0 = BitVector::random(24, &mut rng);
            for policy in &policies {
                let trace = detect_las(&ch, &obs, &b0, policy, 0).unwrap();
                assert!(!trace.anomaly, "{policy:?} failed to converge");
                for w in trace.likelihood_trace.windows(2) {
                    assert!(
                        w[1] >= w[0] - 1e-9,
                        "{policy:?}: likelihood decreased {} -> {}",
                        w[0],
                        w[1]
                    );
                }
                let direct =
                    crate::likelihood::likelihood(&ch, &obs, &trace.output);
                assert_abs_diff_eq!(trace.final_likelihood, direct, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn test_single_bit_policies_reach_one_bit_stable_points() {
        let ch = generate_dense(32, 20, &EnergyProfile::equal(20), 0.5, 77).unwrap();
        let mut rng = stream_rng(9, 1, 0);
        for trial in 0..50u64 {
            let truth = BitVector::random(20, &mut rng);
            let obs = transmit(&ch, &truth, trial);
            let b0 = initial_vector(&InitKind::MatchedFilter, &ch, &obs, 0);
            for policy in [
                SchedulePolicy::SequentialCircular,
                SchedulePolicy::SequentialRandom { seed: trial },
                SchedulePolicy::Ehe { m: 1, signed: false },
                SchedulePolicy::Fmd { m: 1 },
                hybrid_default(20),
            ] {
                let trace = detect_las(&ch, &obs, &b0, &policy, 0).unwrap();
                assert!(!trace.anomaly);
                assert!(
                    is_lml_point(&ch, &obs, &trace.output, 1).unwrap(),
                    "{policy:?} stopped at a 1-flippable point"
                );
            }
        }
    }

    #[test]
    fn test_hybrid_does_not_stop_in_early_phase() {
        let ch = two_bit_channel(0.4, 1.0, 0.6, 0.0);
        // A parallel opening phase makes no flips at y = 0, but the run must
        // continue into the single-bit phase and escape the non-stable point.
        let policy = SchedulePolicy::Hybrid {
            phases: vec![
                Phase {
                    policy: SchedulePolicy::Parallel,
                    budget: 3,
                },
                Phase {
                    policy: SchedulePolicy::SequentialCircular,
                    budget: 0,
                },
            ],
        };
        let trace = detect_las(&ch, &zero_y_obs(), &BitVector::all_plus(2), &policy, 0).unwrap();
        assert_eq!(trace.output, BitVector::new(vec![-1, 1]));
        assert_eq!(trace.flips, 1);
    }

    #[test]
    fn test_gradient_bound_at_fixed_points() {
        let ch = generate_dense(48, 30, &EnergyProfile::equal(30), 0.4, 13).unwrap();
        let mut rng = stream_rng(14, 2, 0);
        for trial in 0..30u64 {
            let truth = BitVector::random(30, &mut rng);
            let obs = transmit(&ch, &truth, trial);
            let b0 = BitVector::random(30, &mut rng);
            for policy in [
                SchedulePolicy::SequentialCircular,
                SchedulePolicy::Parallel,
                SchedulePolicy::Group {
                    partition: (0..30).map(|i| vec![i]).collect(),
                },
            ] {
                let trace = detect_las(&ch, &obs, &b0, &policy, 0).unwrap();
                let bound = trace.threshold_bound.expect("converged");
                assert!(
                    trace.grad_l1 <= bound + 1e-9,
                    "{policy:?}: grad l1 {} > bound {}",
                    trace.grad_l1,
                    bound
                );
            }
        }
    }

    #[test]
    fn test_scaled_thresholds_can_break_monotonicity() {
        // With thresholds at 90% a flip that lowers the likelihood must be
        // admitted on some instance; with full thresholds it never is.
        let mut found_decrease = false;
        let mut rng = stream_rng(21, 0, 0);
        'outer: for trial in 0..10_000u64 {
            let ch = generate_dense(12, 9, &EnergyProfile::equal(9), 1.0, 9000 + trial).unwrap();
            let truth = BitVector::random(9, &mut rng);
            let obs = transmit(&ch, &truth, trial);
            let b0 = BitVector::random(9, &mut rng);
            let trace = detect_las_with_threshold_scale(
                &ch,
                &obs,
                &b0,
                &SchedulePolicy::SequentialCircular,
                200,
                0.9,
            )
            .unwrap();
            for w in trace.likelihood_trace.windows(2) {
                if w[1] < w[0] - 1e-9 {
                    found_decrease = true;
                    break 'outer;
                }
            }
        }
        assert!(
            found_decrease,
            "0.9-scaled thresholds never admitted a decreasing flip in 1e4 trials"
        );
    }

    #[test]
    fn test_max_steps_cap_reports_anomaly_flag() {
        let ch = generate_dense(16, 12, &EnergyProfile::equal(12), 0.8, 3).unwrap();
        let obs = transmit(&ch, &BitVector::all_plus(12), 4);
        // One step is never enough to verify 12 bits.
        let trace = detect_las(
            &ch,
            &obs,
            &BitVector::all_plus(12),
            &SchedulePolicy::SequentialCircular,
            1,
        )
        .unwrap();
        assert!(trace.anomaly);
        assert!(trace.threshold_bound.is_none());
    }
}
