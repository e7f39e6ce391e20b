//! Local search over multi-bit flip neighborhoods.
//!
//! A vector is locally maximum-likelihood at radius J (an LML-J point) when
//! no flip of at most J bits increases the likelihood. The search scans flip
//! sets in (size, lexicographic) order and takes the first strictly
//! improving move, so runs are deterministic; the scan cost Σ_{i≤J} C(K,i)
//! is budget-capped.

use super::DetectorTrace;
use crate::bits::BitVector;
use crate::channel::{ChannelInstance, Observation};
use crate::error::{Error, Result};
use crate::likelihood::{
    apply_flips_to_gradient, gradient_from_mf, likelihood_delta, likelihood_from_mf,
};

/// Scan-size cap: Σ_{i≤J} C(K,i) candidate sets per sweep.
pub const LMLAS_BUDGET: u64 = 10_000_000;

/// Neighborhood radius for the local search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LmlasConfig {
    j: usize,
}

impl LmlasConfig {
    /// Radius-J configuration; J must be at least 1.
    pub fn new(j: usize) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidConfig("neighborhood radius must be >= 1".into()));
        }
        Ok(LmlasConfig { j })
    }

    pub fn j(&self) -> usize {
        self.j
    }

    /// Neighborhood-to-problem size ratio β = J/K.
    pub fn beta(&self, k: usize) -> f64 {
        self.j as f64 / k as f64
    }
}

/// Number of flip sets a radius-J scan visits, Σ_{i=1..J} C(K,i),
/// saturating above the budget cap.
pub fn scan_size(k: usize, j: usize) -> u64 {
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for i in 1..=j.min(k) {
        c = c * (k - i + 1) as u128 / i as u128;
        total += c;
        if total > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    total as u64
}

/// In-place lexicographic combination cursor over {0..k} choose `size`.
struct Combinations {
    k: usize,
    idx: Vec<usize>,
    fresh: bool,
}

impl Combinations {
    fn new(k: usize, size: usize) -> Self {
        Combinations {
            k,
            idx: (0..size).collect(),
            fresh: true,
        }
    }

    fn next(&mut self) -> Option<&[usize]> {
        if self.fresh {
            self.fresh = false;
            return Some(&self.idx);
        }
        let size = self.idx.len();
        let mut i = size;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if self.idx[i] < self.k - size + i {
                self.idx[i] += 1;
                for t in i + 1..size {
                    self.idx[t] = self.idx[t - 1] + 1;
                }
                return Some(&self.idx);
            }
        }
    }
}

fn check_budget(k: usize, j: usize) -> Result<()> {
    let needed = scan_size(k, j);
    if needed > LMLAS_BUDGET {
        return Err(Error::BudgetExceeded {
            what: format!("radius-{j} neighborhood scan"),
            needed: needed as u128,
            cap: LMLAS_BUDGET as u128,
        });
    }
    Ok(())
}

/// Local search from `b0`: repeatedly moves to the first flip set of at
/// most `cfg.j()` bits that strictly increases the likelihood, until none
/// exists. `max_steps = 0` selects the default move cap of 100·K.
pub fn detect_lmlas(
    ch: &ChannelInstance,
    obs: &Observation,
    b0: &BitVector,
    cfg: &LmlasConfig,
    max_steps: usize,
) -> Result<DetectorTrace> {
    let k = ch.k();
    assert_eq!(b0.len(), k, "b0 length must match K");
    let j = cfg.j();
    if j > k {
        return Err(Error::InvalidConfig(format!(
            "neighborhood radius {j} exceeds K={k}"
        )));
    }
    check_budget(k, j)?;
    let cap = if max_steps == 0 { 100 * k } else { max_steps };
    let y = obs.mf_output();
    let h = ch.weighted();

    let mut b = b0.clone();
    let mut g = gradient_from_mf(ch, y, &b);
    let mut f = likelihood_from_mf(ch, y, &b);
    let mut likelihood_trace = vec![f];
    let mut moves = 0usize;
    let mut total_flips = 0usize;
    let mut converged = false;

    'outer: loop {
        if moves >= cap {
            break;
        }
        // Accept only improvements beyond arithmetic noise so incremental
        // state drift can never produce an accept/undo cycle.
        let tol = 1e-12 * (1.0 + f.abs());
        for size in 1..=j {
            let mut combos = Combinations::new(k, size);
            while let Some(set) = combos.next() {
                let delta = likelihood_delta(&g, h, set, &b);
                if delta > tol {
                    apply_flips_to_gradient(&mut g, h, set, &b);
                    let owned: Vec<usize> = set.to_vec();
                    b.flip_set(&owned);
                    f += delta;
                    moves += 1;
                    total_flips += owned.len();
                    likelihood_trace.push(f);
                    continue 'outer;
                }
            }
        }
        converged = true;
        break;
    }

    let grad_l1: f64 = g.iter().map(|v| v.abs()).sum();
    Ok(DetectorTrace {
        output: b,
        steps: moves,
        flips: total_flips,
        flip_rate: total_flips as f64 / k as f64,
        final_likelihood: f,
        likelihood_trace,
        anomaly: !converged,
        grad_l1,
        threshold_bound: None,
    })
}

/// True when no flip of at most `j` bits increases the likelihood of `b`.
///
/// The radius-1 test is the closed form b_k·g_k ≥ −A_k² for every k and is
/// allowed at any K; larger radii scan the neighborhood under the budget
/// cap. Equal-likelihood neighbors do not disqualify membership.
pub fn is_lml_point(
    ch: &ChannelInstance,
    obs: &Observation,
    b: &BitVector,
    j: usize,
) -> Result<bool> {
    let k = ch.k();
    assert_eq!(b.len(), k, "b length must match K");
    if j == 0 {
        return Err(Error::InvalidConfig("neighborhood radius must be >= 1".into()));
    }
    // Radius 1 is O(K) and always allowed; wider radii must fit the budget
    // before any scanning happens.
    if j >= 2 {
        check_budget(k, j)?;
    }
    let y = obs.mf_output();
    let g = gradient_from_mf(ch, y, b);
    let a = ch.profile().amplitudes();
    // Radius 1 first: cheap, and a failure settles any larger radius too.
    for i in 0..k {
        let energy = a[i] * a[i];
        if b.get_f(i) * g[i] < -energy - 1e-9 * (1.0 + energy) {
            return Ok(false);
        }
    }
    if j == 1 {
        return Ok(true);
    }
    let h = ch.weighted();
    let f = likelihood_from_mf(ch, y, b);
    let tol = 1e-9 * (1.0 + f.abs());
    for size in 2..=j.min(k) {
        let mut combos = Combinations::new(k, size);
        while let Some(set) = combos.next() {
            if likelihood_delta(&g, h, set, b) > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{
        from_columns, generate_dense, transmit, two_bit_channel, EnergyProfile, ModelTag,
    };
    use crate::detect::gml::detect_gml_scored;
    use crate::detect::las::detect_las;
    use crate::detect::SchedulePolicy;
    use crate::likelihood::likelihood;
    use crate::mat::Matrix;
    use crate::seed::stream_rng;
    use approx::assert_abs_diff_eq;

    fn all_vectors(k: usize) -> Vec<BitVector> {
        (0..1u32 << k)
            .map(|code| {
                BitVector::new(
                    (0..k)
                        .map(|i| if code >> i & 1 == 1 { 1i8 } else { -1i8 })
                        .collect(),
                )
            })
            .collect()
    }

    #[test]
    fn test_combination_cursor_is_lexicographic_and_complete() {
        let mut combos = Combinations::new(5, 3);
        let mut seen = Vec::new();
        while let Some(s) = combos.next() {
            seen.push(s.to_vec());
        }
        assert_eq!(seen.len(), 10);
        assert_eq!(seen[0], vec![0, 1, 2]);
        assert_eq!(seen[1], vec![0, 1, 3]);
        assert_eq!(seen[9], vec![2, 3, 4]);
        let mut sorted = seen.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 10);
        assert_eq!(sorted, seen, "order must already be lexicographic");
    }

    #[test]
    fn test_scan_size_values() {
        assert_eq!(scan_size(4, 2), 4 + 6);
        assert_eq!(scan_size(10, 10), 1023);
        assert_eq!(scan_size(40, 5), 40 + 780 + 9880 + 91390 + 658008);
    }

    #[test]
    fn test_two_bit_membership_examples() {
        let ch = two_bit_channel(0.4, 1.0, 0.6, 0.0);
        let obs = Observation::from_mf_output(vec![0.0, 0.0], BitVector::all_plus(2));
        assert!(is_lml_point(&ch, &obs, &BitVector::new(vec![1, -1]), 1).unwrap());
        assert!(is_lml_point(&ch, &obs, &BitVector::new(vec![-1, 1]), 1).unwrap());
        assert!(!is_lml_point(&ch, &obs, &BitVector::new(vec![1, 1]), 1).unwrap());
    }

    #[test]
    fn test_orthogonal_signs_are_lml_at_every_radius() {
        let eye = Matrix::from_vec(4, 4, {
            let mut v = vec![0.0; 16];
            for i in 0..4 {
                v[i * 4 + i] = 1.0;
            }
            v
        });
        let ch = from_columns(eye, &EnergyProfile::equal(4), 0.0, 0, ModelTag::Custom).unwrap();
        let obs = Observation::from_mf_output(vec![0.3, -0.2, 0.0, -0.9], BitVector::all_plus(4));
        let b = BitVector::from_signs_of(obs.mf_output());
        for j in 1..=4 {
            assert!(is_lml_point(&ch, &obs, &b, j).unwrap(), "radius {j}");
        }
    }

    #[test]
    fn test_radius1_closed_form_matches_neighborhood_scan() {
        let ch = generate_dense(16, 7, &EnergyProfile::equal(7), 0.6, 91).unwrap();
        let mut rng = stream_rng(12, 0, 0);
        for trial in 0..30u64 {
            let truth = BitVector::random(7, &mut rng);
            let obs = transmit(&ch, &truth, trial);
            for b in all_vectors(7) {
                let closed = is_lml_point(&ch, &obs, &b, 1).unwrap();
                let f = likelihood(&ch, &obs, &b);
                let brute = (0..7).all(|i| {
                    likelihood(&ch, &obs, &b.with_flipped(&[i])) <= f + 1e-9 * (1.0 + f.abs())
                });
                assert_eq!(closed, brute);
            }
        }
    }

    #[test]
    fn test_search_output_is_brute_force_lml() {
        let ch = generate_dense(16, 8, &EnergyProfile::equal(8), 0.7, 17).unwrap();
        let mut rng = stream_rng(13, 0, 0);
        for trial in 0..15u64 {
            let truth = BitVector::random(8, &mut rng);
            let obs = transmit(&ch, &truth, trial);
            for j in 1..=3 {
                let cfg = LmlasConfig::new(j).unwrap();
                let b0 = BitVector::random(8, &mut rng);
                let trace = detect_lmlas(&ch, &obs, &b0, &cfg, 0).unwrap();
                assert!(!trace.anomaly);
                let f = likelihood(&ch, &obs, &trace.output);
                // No vector within Hamming distance j may beat the output.
                for cand in all_vectors(8) {
                    if trace.output.hamming_distance(&cand) <= j {
                        assert!(
                            likelihood(&ch, &obs, &cand) <= f + 1e-9 * (1.0 + f.abs()),
                            "j={j} trial={trial}"
                        );
                    }
                }
                assert!(is_lml_point(&ch, &obs, &trace.output, j).unwrap());
            }
        }
    }

    #[test]
    fn test_radius_k_matches_exhaustive_likelihood() {
        let ch = generate_dense(20, 8, &EnergyProfile::equal(8), 0.5, 29).unwrap();
        let mut rng = stream_rng(14, 0, 0);
        for trial in 0..10u64 {
            let truth = BitVector::random(8, &mut rng);
            let obs = transmit(&ch, &truth, trial);
            let (_, best_f) = detect_gml_scored(&ch, &obs).unwrap();
            let cfg = LmlasConfig::new(8).unwrap();
            let trace = detect_lmlas(&ch, &obs, &BitVector::random(8, &mut rng), &cfg, 0).unwrap();
            assert_abs_diff_eq!(trace.final_likelihood, best_f, epsilon = 1e-9);
        }
    }

    #[test]
    fn test_memberships_nest_by_radius() {
        let ch = generate_dense(12, 6, &EnergyProfile::equal(6), 0.8, 37).unwrap();
        let mut rng = stream_rng(15, 0, 0);
        for trial in 0..10u64 {
            let truth = BitVector::random(6, &mut rng);
            let obs = transmit(&ch, &truth, trial);
            for b in all_vectors(6) {
                for j in 1..6 {
                    let wider = is_lml_point(&ch, &obs, &b, j + 1).unwrap();
                    let narrower = is_lml_point(&ch, &obs, &b, j).unwrap();
                    assert!(
                        !wider || narrower,
                        "radius-{} membership must imply radius-{}",
                        j + 1,
                        j
                    );
                }
            }
        }
    }

    #[test]
    fn test_lml_points_are_las_fixed_points() {
        let ch = generate_dense(24, 12, &EnergyProfile::equal(12), 0.5, 43).unwrap();
        let mut rng = stream_rng(16, 0, 0);
        for trial in 0..25u64 {
            let truth = BitVector::random(12, &mut rng);
            let obs = transmit(&ch, &truth, trial);
            let cfg = LmlasConfig::new(1).unwrap();
            let fixed = detect_lmlas(&ch, &obs, &BitVector::random(12, &mut rng), &cfg, 0)
                .unwrap()
                .output;
            for policy in [
                SchedulePolicy::SequentialCircular,
                SchedulePolicy::SequentialRandom { seed: trial },
                SchedulePolicy::Ehe { m: 1, signed: false },
            ] {
                let trace = detect_las(&ch, &obs, &fixed, &policy, 0).unwrap();
                assert_eq!(trace.output, fixed);
                assert_eq!(trace.flips, 0);
            }
        }
    }

    #[test]
    fn test_sequential_las_and_radius1_search_share_fixed_points() {
        let ch = generate_dense(24, 14, &EnergyProfile::equal(14), 0.6, 47).unwrap();
        let mut rng = stream_rng(17, 0, 0);
        for trial in 0..25u64 {
            let truth = BitVector::random(14, &mut rng);
            let obs = transmit(&ch, &truth, trial);
            let b0 = BitVector::random(14, &mut rng);
            let las_out = detect_las(&ch, &obs, &b0, &SchedulePolicy::SequentialCircular, 0)
                .unwrap()
                .output;
            assert!(is_lml_point(&ch, &obs, &las_out, 1).unwrap());
            let cfg = LmlasConfig::new(1).unwrap();
            let search_out = detect_lmlas(&ch, &obs, &b0, &cfg, 0).unwrap().output;
            assert!(is_lml_point(&ch, &obs, &search_out, 1).unwrap());
            // Each detector's output is a fixed point of the other.
            assert_eq!(
                detect_lmlas(&ch, &obs, &las_out, &cfg, 0).unwrap().output,
                las_out
            );
            assert_eq!(
                detect_las(&ch, &obs, &search_out, &SchedulePolicy::SequentialCircular, 0)
                    .unwrap()
                    .output,
                search_out
            );
        }
    }

    #[test]
    fn test_budget_refusal() {
        let ch = generate_dense(80, 60, &EnergyProfile::equal(60), 0.5, 3).unwrap();
        let obs = transmit(&ch, &BitVector::all_plus(60), 1);
        let cfg = LmlasConfig::new(6).unwrap();
        assert!(matches!(
            detect_lmlas(&ch, &obs, &BitVector::all_plus(60), &cfg, 0),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(
            is_lml_point(&ch, &obs, &BitVector::all_plus(60), 6),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn test_config_validation() {
        assert!(LmlasConfig::new(0).is_err());
        let cfg = LmlasConfig::new(3).unwrap();
        assert_eq!(cfg.j(), 3);
        assert_abs_diff_eq!(cfg.beta(12), 0.25, epsilon = 0.0);
    }
}
