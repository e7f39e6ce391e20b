//! Randomized invariants checked with proptest: likelihood algebra,
//! channel geometry, bit-vector arithmetic, and detector fixed points.

use lasmimo::analysis::{enumerate_error_set, signal_distance, union_bound, DistanceKind};
use lasmimo::bits::BitVector;
use lasmimo::channel::{
    generate_dense, generate_sparse, sigma_to_snr_db, snr_db_to_sigma, transmit, EnergyProfile,
};
use lasmimo::detect::{
    detect_las, initial_vector, is_lml_point, InitKind, SchedulePolicy,
};
use lasmimo::likelihood::{
    apply_flips_to_gradient, gradient, likelihood, likelihood_delta,
};
use lasmimo::seed::stream_rng;
use proptest::prelude::*;

/// A small random channel with a transmitted frame, fully determined by the
/// strategy inputs so shrinking stays reproducible.
fn random_frame(
    n: usize,
    k: usize,
    sigma: f64,
    seed: u64,
) -> (
    lasmimo::channel::ChannelInstance,
    lasmimo::channel::Observation,
) {
    let profile = EnergyProfile::equal(k);
    let ch = generate_dense(n, k, &profile, sigma, seed).unwrap();
    let mut rng = stream_rng(seed, 0xF0, 0);
    let b = BitVector::random(k, &mut rng);
    let obs = transmit(&ch, &b, seed ^ 0x9E37);
    (ch, obs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn likelihood_delta_matches_direct_difference(
        k in 2usize..12,
        seed in any::<u64>(),
        flips in proptest::collection::vec(0usize..12, 1..4),
    ) {
        let (ch, obs) = random_frame(k, k, 0.5, seed);
        let mut rng = stream_rng(seed, 0xF1, 0);
        let b = BitVector::random(k, &mut rng);
        let mut set: Vec<usize> = flips.into_iter().map(|f| f % k).collect();
        set.sort_unstable();
        set.dedup();
        let g = gradient(&ch, &obs, &b);
        let predicted = likelihood_delta(&g, ch.weighted(), &set, &b);
        let direct = likelihood(&ch, &obs, &b.with_flipped(&set))
            - likelihood(&ch, &obs, &b);
        prop_assert!((predicted - direct).abs() < 1e-9);
    }

    #[test]
    fn gradient_update_matches_recomputation(
        k in 2usize..12,
        seed in any::<u64>(),
        flip in 0usize..12,
    ) {
        let (ch, obs) = random_frame(k, k, 0.5, seed);
        let mut rng = stream_rng(seed, 0xF2, 0);
        let b = BitVector::random(k, &mut rng);
        let set = [flip % k];
        let mut g = gradient(&ch, &obs, &b);
        apply_flips_to_gradient(&mut g, ch.weighted(), &set, &b);
        let fresh = gradient(&ch, &obs, &b.with_flipped(&set));
        for (a, f) in g.iter().zip(&fresh) {
            prop_assert!((a - f).abs() < 1e-9);
        }
    }

    #[test]
    fn crosscorrelations_are_unit_diagonal_and_bounded(
        n in 1usize..40,
        k in 1usize..10,
        seed in any::<u64>(),
    ) {
        let ch = generate_dense(n, k, &EnergyProfile::equal(k), 0.3, seed).unwrap();
        let r = ch.crosscorr();
        for i in 0..k {
            prop_assert_eq!(r.get(i, i), 1.0);
            for j in 0..k {
                prop_assert_eq!(r.get(i, j), r.get(j, i));
                prop_assert!(r.get(i, j).abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn sparse_crosscorrelations_are_unit_diagonal_and_bounded(
        n in 8usize..40,
        k in 1usize..10,
        l in 1usize..8,
        seed in any::<u64>(),
    ) {
        let l = l.min(n);
        let ch = generate_sparse(n, k, l, &EnergyProfile::equal(k), 0.3, seed).unwrap();
        let r = ch.crosscorr();
        for i in 0..k {
            prop_assert!((r.get(i, i) - 1.0).abs() < 1e-12);
            for j in 0..k {
                prop_assert_eq!(r.get(i, j), r.get(j, i));
                prop_assert!(r.get(i, j).abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn snr_conversion_round_trips(
        snr_db in -10.0f64..20.0,
        energy in 0.05f64..4.0,
    ) {
        let sigma = snr_db_to_sigma(snr_db, energy);
        prop_assert!(sigma > 0.0);
        let back = sigma_to_snr_db(sigma, energy);
        prop_assert!((back - snr_db).abs() < 1e-9);
    }

    #[test]
    fn flip_sets_are_involutions(
        k in 1usize..32,
        seed in any::<u64>(),
        flips in proptest::collection::vec(0usize..32, 0..8),
    ) {
        let mut rng = stream_rng(seed, 0xF3, 0);
        let b = BitVector::random(k, &mut rng);
        let mut set: Vec<usize> = flips.into_iter().map(|f| f % k).collect();
        set.sort_unstable();
        set.dedup();
        let twice = b.with_flipped(&set).with_flipped(&set);
        prop_assert_eq!(&twice, &b);
        prop_assert_eq!(b.with_flipped(&set).hamming_distance(&b), set.len());
    }

    #[test]
    fn exhaustive_distances_are_nonnegative_and_bound_shrinks(
        k in 2usize..7,
        seed in any::<u64>(),
    ) {
        let ch = generate_dense(k + 2, k, &EnergyProfile::equal(k), 0.5, seed).unwrap();
        for e in enumerate_error_set(&ch, 0, k, true).unwrap() {
            // Parallel columns at tiny N make exact ties, so zero distances
            // are legitimate; negative ones are not.
            prop_assert!(signal_distance(&ch, &e, &DistanceKind::Gml).unwrap() >= 0.0);
        }
        // Tightening the noise can only shrink a sum of Gaussian tails.
        let loose = union_bound(&ch, 0.8, 0, &DistanceKind::Gml, k).unwrap().value;
        let tight = union_bound(&ch, 0.4, 0, &DistanceKind::Gml, k).unwrap().value;
        prop_assert!(tight <= loose + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn single_bit_schedules_end_at_one_flip_maxima(
        k in 2usize..24,
        seed in any::<u64>(),
        circular in any::<bool>(),
    ) {
        let (ch, obs) = random_frame(k, k, 0.6, seed);
        let policy = if circular {
            SchedulePolicy::SequentialCircular
        } else {
            SchedulePolicy::SequentialRandom { seed }
        };
        let b0 = initial_vector(&InitKind::Random, &ch, &obs, seed);
        let trace = detect_las(&ch, &obs, &b0, &policy, 0).unwrap();
        prop_assert!(!trace.anomaly);
        prop_assert!(is_lml_point(&ch, &obs, &trace.output, 1).unwrap());
        for w in trace.likelihood_trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9);
        }
    }
}
