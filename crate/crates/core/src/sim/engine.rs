//! Monte Carlo engine: matched-frame multi-detector trials with
//! deterministic per-trial seeding and worker-count-independent results.
//!
//! Every frame draws its channel, data, noise, and detector starting points
//! from seeds derived from `(master_seed, role, cell, trial)`, so a run is
//! reproducible from the master seed alone. Frames are dispatched in fixed
//! batches and reduced in index order, which keeps the output bitwise
//! identical for any worker count.

use serde::Serialize;

use crate::bits::BitVector;
use crate::channel::{generate_dense, generate_sparse, transmit, ChannelInstance};
use crate::detect::{
    detect_gml, detect_las, detect_lmlas, initial_vector, InitKind, LmlasConfig,
};
use crate::error::{Error, Result};
use crate::par::indexed_map;
use crate::seed::derive_seed;
use crate::sim::config::{DetectorSpec, ExperimentConfig, InitSpec, StoppingRule};

/// Frames dispatched per scheduling round; fixed so that stopping decisions
/// fall on the same trial boundaries for every worker count.
const BATCH: u64 = 64;

/// Seed-derivation roles.
const LBL_CHAN: u64 = 0x6368_616e;
const LBL_DATA: u64 = 0x6461_7461;
const LBL_NOISE: u64 = 0x6e6f_6973;
const LBL_INIT: u64 = 0x7374_6172;

/// Bit-error-rate estimate for one detector at one noise level.
#[derive(Debug, Clone, Serialize)]
pub struct BerEstimate {
    /// Detector label from the config.
    pub detector: String,
    /// Noise level expressed in dB, when the grid was given that way.
    pub snr_db: Option<f64>,
    /// Noise standard deviation.
    pub sigma: f64,
    /// Bit errors accumulated.
    pub bit_errors: u64,
    /// Bits simulated (trials × K).
    pub bits_simulated: u64,
    /// Frames simulated.
    pub trials: u64,
    /// Point estimate bit_errors / bits_simulated.
    pub ber: f64,
    /// Binomial standard error √(p(1−p)/bits).
    pub std_error: f64,
    /// Average flips per bit per frame.
    pub mean_flip_rate: f64,
    /// Average accepted steps per frame.
    pub mean_steps: f64,
    /// Frames that exhausted their step cap before converging.
    pub anomalies: u64,
    /// True when the trial cap stopped the cell before this detector
    /// reached the requested bit-error count.
    pub under_powered: bool,
}

/// Flip-activity statistics for one detector at one noise level.
#[derive(Debug, Clone, Serialize)]
pub struct FlipRateStats {
    /// Detector label from the config.
    pub detector: String,
    /// Noise level expressed in dB, when the grid was given that way.
    pub snr_db: Option<f64>,
    /// Noise standard deviation.
    pub sigma: f64,
    /// Frames simulated.
    pub trials: u64,
    /// Mean flips per bit across frames.
    pub mean_c: f64,
    /// Largest flips per bit seen in any frame.
    pub max_c: f64,
    /// Mean accepted steps per frame.
    pub mean_steps: f64,
}

/// Per-detector outcome of a single frame.
#[derive(Debug, Clone, Copy)]
struct TrialOutcome {
    errors: u32,
    flips: u32,
    steps: u32,
    flip_rate: f64,
    anomaly: bool,
}

/// Running totals for one detector within one noise cell.
#[derive(Debug, Clone, Default)]
struct Accumulator {
    bit_errors: u64,
    flips: u64,
    steps: u64,
    flip_rate_sum: f64,
    max_flip_rate: f64,
    anomalies: u64,
}

impl Accumulator {
    fn absorb(&mut self, o: &TrialOutcome) {
        self.bit_errors += u64::from(o.errors);
        self.flips += u64::from(o.flips);
        self.steps += u64::from(o.steps);
        self.flip_rate_sum += o.flip_rate;
        if o.flip_rate > self.max_flip_rate {
            self.max_flip_rate = o.flip_rate;
        }
        self.anomalies += u64::from(o.anomaly);
    }
}

fn init_kind(spec: InitSpec, truth: &BitVector) -> InitKind {
    match spec {
        InitSpec::Random => InitKind::Random,
        InitSpec::MatchedFilter => InitKind::MatchedFilter,
        InitSpec::Truth => InitKind::Given(truth.clone()),
    }
}

/// Runs every configured detector on one frame and counts bit errors.
fn simulate_trial(
    cfg: &ExperimentConfig,
    sigma: f64,
    cell: usize,
    trial: u64,
    fixed: Option<&ChannelInstance>,
) -> Result<Vec<TrialOutcome>> {
    let trial_tag = ((cell as u64) << 40) | trial;
    let (n, k, l) = cfg.channel.dimensions()?;
    let owned;
    let ch: &ChannelInstance = match fixed {
        Some(ch) => ch,
        None => {
            let profile = cfg.profile.build(k)?;
            let seed = derive_seed(cfg.master_seed, LBL_CHAN, trial_tag);
            owned = match l {
                None => generate_dense(n, k, &profile, sigma, seed)?,
                Some(l) => generate_sparse(n, k, l, &profile, sigma, seed)?,
            };
            &owned
        }
    };

    let mut data_rng = crate::seed::stream_rng(cfg.master_seed, LBL_DATA, trial_tag);
    let b = BitVector::random(k, &mut data_rng);
    let noise_seed = derive_seed(cfg.master_seed, LBL_NOISE, trial_tag);
    let obs = transmit(ch, &b, noise_seed);

    let mut outcomes = Vec::with_capacity(cfg.detectors.len());
    for (d, det) in cfg.detectors.iter().enumerate() {
        let init_seed = derive_seed(cfg.master_seed, LBL_INIT.wrapping_add(d as u64), trial_tag);
        let outcome = match det {
            DetectorSpec::MatchedFilter => {
                let out = BitVector::from_signs_of(obs.mf_output());
                TrialOutcome {
                    errors: out.hamming_distance(&b) as u32,
                    flips: 0,
                    steps: 0,
                    flip_rate: 0.0,
                    anomaly: false,
                }
            }
            DetectorSpec::Gml => {
                let out = detect_gml(ch, &obs)?;
                TrialOutcome {
                    errors: out.hamming_distance(&b) as u32,
                    flips: 0,
                    steps: 0,
                    flip_rate: 0.0,
                    anomaly: false,
                }
            }
            DetectorSpec::Las {
                policy,
                init,
                max_steps,
                ..
            } => {
                let b0 = initial_vector(&init_kind(*init, &b), ch, &obs, init_seed);
                let trace = detect_las(ch, &obs, &b0, policy, *max_steps)?;
                TrialOutcome {
                    errors: trace.output.hamming_distance(&b) as u32,
                    flips: trace.flips as u32,
                    steps: trace.steps as u32,
                    flip_rate: trace.flip_rate,
                    anomaly: trace.anomaly,
                }
            }
            DetectorSpec::Lmlas {
                j, init, max_steps, ..
            } => {
                let b0 = initial_vector(&init_kind(*init, &b), ch, &obs, init_seed);
                let lml = LmlasConfig::new(*j)?;
                let trace = detect_lmlas(ch, &obs, &b0, &lml, *max_steps)?;
                TrialOutcome {
                    errors: trace.output.hamming_distance(&b) as u32,
                    flips: trace.flips as u32,
                    steps: trace.steps as u32,
                    flip_rate: trace.flip_rate,
                    anomaly: trace.anomaly,
                }
            }
        };
        outcomes.push(outcome);
    }
    Ok(outcomes)
}

/// Runs one noise cell to its stopping point.
fn run_cell(
    cfg: &ExperimentConfig,
    cell: usize,
    snr_db: Option<f64>,
    sigma: f64,
) -> Result<(Vec<Accumulator>, u64, bool)> {
    let (n, k, l) = cfg.channel.dimensions()?;
    let fixed = if cfg.fixed_channel {
        let profile = cfg.profile.build(k)?;
        let seed = derive_seed(cfg.master_seed, LBL_CHAN, (cell as u64) << 40);
        Some(match l {
            None => generate_dense(n, k, &profile, sigma, seed)?,
            Some(l) => generate_sparse(n, k, l, &profile, sigma, seed)?,
        })
    } else {
        None
    };
    let _ = snr_db;

    let (target_errors, max_trials) = match cfg.stopping {
        StoppingRule::UntilErrors {
            min_bit_errors,
            max_trials,
        } => (Some(min_bit_errors), max_trials),
        StoppingRule::FixedTrials { trials } => (None, trials),
    };

    let mut accs = vec![Accumulator::default(); cfg.detectors.len()];
    let mut done: u64 = 0;
    while done < max_trials {
        let batch = BATCH.min(max_trials - done);
        let results = indexed_map(batch as usize, cfg.workers, |i| {
            simulate_trial(cfg, sigma, cell, done + i as u64, fixed.as_ref())
        });
        for result in results {
            let outcomes = result?;
            for (acc, o) in accs.iter_mut().zip(&outcomes) {
                acc.absorb(&o);
            }
        }
        done += batch;
        if let Some(target) = target_errors {
            if accs.iter().all(|a| a.bit_errors >= target) {
                break;
            }
        }
    }
    let capped = match target_errors {
        Some(target) => accs.iter().any(|a| a.bit_errors < target),
        None => false,
    };
    Ok((accs, done, capped))
}

fn check_labels(cfg: &ExperimentConfig) -> Result<()> {
    let mut labels: Vec<String> = cfg.detectors.iter().map(|d| d.label()).collect();
    labels.sort();
    labels.dedup();
    if labels.len() != cfg.detectors.len() {
        return Err(Error::InvalidConfig(
            "detector labels must be unique; set explicit labels".into(),
        ));
    }
    Ok(())
}

/// Estimates the bit error rate of every configured detector at every
/// noise level. Rows come out cell-major: all detectors for the first
/// noise level, then the second, and so on.
pub fn run_ber(cfg: &ExperimentConfig) -> Result<Vec<BerEstimate>> {
    cfg.validate()?;
    check_labels(cfg)?;
    let (_, k, _) = cfg.channel.dimensions()?;
    let target = match cfg.stopping {
        StoppingRule::UntilErrors { min_bit_errors, .. } => Some(min_bit_errors),
        StoppingRule::FixedTrials { .. } => None,
    };

    let mut rows = Vec::new();
    for (cell, (snr_db, sigma)) in cfg.noise_levels()?.into_iter().enumerate() {
        let (accs, trials, _) = run_cell(cfg, cell, snr_db, sigma)?;
        let bits = trials * k as u64;
        for (det, acc) in cfg.detectors.iter().zip(&accs) {
            let ber = acc.bit_errors as f64 / bits as f64;
            rows.push(BerEstimate {
                detector: det.label(),
                snr_db,
                sigma,
                bit_errors: acc.bit_errors,
                bits_simulated: bits,
                trials,
                ber,
                std_error: (ber * (1.0 - ber) / bits as f64).sqrt(),
                mean_flip_rate: acc.flip_rate_sum / trials as f64,
                mean_steps: acc.steps as f64 / trials as f64,
                anomalies: acc.anomalies,
                under_powered: target.is_some_and(|t| acc.bit_errors < t),
            });
        }
    }
    Ok(rows)
}

/// Measures flip activity (mean and worst-case flips per bit, mean steps)
/// over a fixed number of frames. Requires a fixed-trials stopping rule so
/// the sample size does not depend on error counts.
pub fn run_bfr(cfg: &ExperimentConfig) -> Result<Vec<FlipRateStats>> {
    cfg.validate()?;
    check_labels(cfg)?;
    if !matches!(cfg.stopping, StoppingRule::FixedTrials { .. }) {
        return Err(Error::InvalidConfig(
            "flip-rate measurement needs a fixed-trials stopping rule".into(),
        ));
    }
    let mut rows = Vec::new();
    for (cell, (snr_db, sigma)) in cfg.noise_levels()?.into_iter().enumerate() {
        let (accs, trials, _) = run_cell(cfg, cell, snr_db, sigma)?;
        for (det, acc) in cfg.detectors.iter().zip(&accs) {
            rows.push(FlipRateStats {
                detector: det.label(),
                snr_db,
                sigma,
                trials,
                mean_c: acc.flip_rate_sum / trials as f64,
                max_c: acc.max_flip_rate,
                mean_steps: acc.steps as f64 / trials as f64,
            });
        }
    }
    Ok(rows)
}
