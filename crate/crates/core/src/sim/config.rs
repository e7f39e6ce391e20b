//! Experiment configuration: channel geometry, energy profile, noise grid,
//! detector roster, stopping rule, and reproducibility knobs.

use serde::{Deserialize, Serialize};

use crate::channel::{snr_db_to_sigma, EnergyProfile};
use crate::detect::SchedulePolicy;
use crate::error::{Error, Result};

/// Channel geometry: explicit dimensions or a load with the bit count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ChannelSpec {
    /// Dense binary chips with explicit dimensions.
    Dense { n: usize, k: usize },
    /// Dense binary chips; `n` is derived from the load `alpha = k/n`.
    DenseLoad { alpha: f64, k: usize },
    /// Sparse columns with `l` nonzero chips each.
    Sparse { n: usize, k: usize, l: usize },
    /// Sparse columns with the dimension derived from the load.
    SparseLoad { alpha: f64, k: usize, l: usize },
}

impl ChannelSpec {
    /// Resolves to `(n, k, sparse_chip_count)`.
    pub fn dimensions(&self) -> Result<(usize, usize, Option<usize>)> {
        let derive_n = |alpha: f64, k: usize| -> Result<usize> {
            if !(alpha > 0.0) {
                return Err(Error::InvalidConfig("load must be positive".into()));
            }
            let n = (k as f64 / alpha).round() as usize;
            if n == 0 {
                return Err(Error::InvalidConfig(format!(
                    "load {alpha} with {k} bits leaves no dimensions"
                )));
            }
            Ok(n)
        };
        match *self {
            ChannelSpec::Dense { n, k } => Ok((n, k, None)),
            ChannelSpec::DenseLoad { alpha, k } => Ok((derive_n(alpha, k)?, k, None)),
            ChannelSpec::Sparse { n, k, l } => Ok((n, k, Some(l))),
            ChannelSpec::SparseLoad { alpha, k, l } => Ok((derive_n(alpha, k)?, k, Some(l))),
        }
    }
}

/// Bit-energy profile of the transmitters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileSpec {
    /// Unit amplitude for every bit.
    Equal,
    /// A fraction of the bits at one amplitude, the rest at another.
    TwoClass { fraction_first: f64, a1: f64, a2: f64 },
    /// Explicit per-bit amplitudes (length must equal the bit count).
    Amplitudes { values: Vec<f64> },
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec::Equal
    }
}

impl ProfileSpec {
    /// Materializes the profile for `k` bits.
    pub fn build(&self, k: usize) -> Result<EnergyProfile> {
        match self {
            ProfileSpec::Equal => Ok(EnergyProfile::equal(k)),
            ProfileSpec::TwoClass {
                fraction_first,
                a1,
                a2,
            } => EnergyProfile::two_class(k, *fraction_first, *a1, *a2),
            ProfileSpec::Amplitudes { values } => {
                if values.len() != k {
                    return Err(Error::InvalidConfig(format!(
                        "{} amplitudes for {k} bits",
                        values.len()
                    )));
                }
                EnergyProfile::from_amplitudes(values.clone())
            }
        }
    }
}

/// How a search detector is seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitSpec {
    /// Uniform random sign vector, deterministic in the trial seed.
    Random,
    /// Signs of the matched-filter statistic.
    MatchedFilter,
    /// The transmitted vector itself (measures pure stability).
    Truth,
}

/// One detector to run on every frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DetectorSpec {
    /// Sign decisions on the matched-filter output.
    MatchedFilter,
    /// Exhaustive likelihood maximization (small bit counts only).
    Gml,
    /// Threshold ascent search under a flip schedule.
    Las {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        policy: SchedulePolicy,
        init: InitSpec,
        #[serde(default)]
        max_steps: usize,
    },
    /// Steepest-neighborhood search over flip sets up to size `j`.
    Lmlas {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        j: usize,
        init: InitSpec,
        #[serde(default)]
        max_steps: usize,
    },
}

impl DetectorSpec {
    /// Stable column label for report rows.
    pub fn label(&self) -> String {
        match self {
            DetectorSpec::MatchedFilter => "mf".into(),
            DetectorSpec::Gml => "gml".into(),
            DetectorSpec::Las { label, policy, .. } => label.clone().unwrap_or_else(|| {
                let p = match policy {
                    SchedulePolicy::SequentialCircular => "slas",
                    SchedulePolicy::SequentialRandom { .. } => "slas-random",
                    SchedulePolicy::Parallel => "plas",
                    SchedulePolicy::Group { .. } => "gplas",
                    SchedulePolicy::Ehe { .. } => "ehe",
                    SchedulePolicy::Fmd { .. } => "fmd",
                    SchedulePolicy::Hybrid { .. } => "wslas",
                };
                p.into()
            }),
            DetectorSpec::Lmlas { label, j, .. } => label
                .clone()
                .unwrap_or_else(|| format!("lmlas-{j}")),
        }
    }
}

/// When a BER cell stops accumulating frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum StoppingRule {
    /// Run until every detector has the target bit-error count, capped.
    UntilErrors { min_bit_errors: u64, max_trials: u64 },
    /// Run an exact number of frames (matched-frame comparisons).
    FixedTrials { trials: u64 },
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule::UntilErrors {
            min_bit_errors: 300,
            max_trials: 10_000_000,
        }
    }
}

/// A full Monte Carlo experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub channel: ChannelSpec,
    #[serde(default)]
    pub profile: ProfileSpec,
    /// SNR grid in dB (amplitude-weighted mean bit energy over two noise
    /// variances); exactly one of `snr_db`/`sigma` must be given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<Vec<f64>>,
    /// Direct noise levels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<f64>>,
    pub detectors: Vec<DetectorSpec>,
    #[serde(default)]
    pub stopping: StoppingRule,
    #[serde(default)]
    pub master_seed: u64,
    /// Worker threads; 0 uses the default pool.
    #[serde(default)]
    pub workers: usize,
    /// Reuse one channel realization for every frame of a cell instead of
    /// drawing a fresh channel per frame.
    #[serde(default)]
    pub fixed_channel: bool,
}

impl ExperimentConfig {
    /// Validates cross-field constraints.
    pub fn validate(&self) -> Result<()> {
        let (n, k, l) = self.channel.dimensions()?;
        if n == 0 || k == 0 {
            return Err(Error::InvalidConfig("empty channel".into()));
        }
        if let Some(l) = l {
            if l == 0 || l > n {
                return Err(Error::InvalidConfig(format!(
                    "sparse chip count {l} must lie in 1..={n}"
                )));
            }
        }
        self.profile.build(k)?;
        match (&self.snr_db, &self.sigma) {
            (Some(s), None) if !s.is_empty() => {}
            (None, Some(s)) if !s.is_empty() => {}
            _ => {
                return Err(Error::InvalidConfig(
                    "exactly one nonempty noise grid (snr_db or sigma) is required".into(),
                ))
            }
        }
        if self.detectors.is_empty() {
            return Err(Error::InvalidConfig("no detectors configured".into()));
        }
        match self.stopping {
            StoppingRule::UntilErrors { min_bit_errors, max_trials } => {
                if min_bit_errors == 0 {
                    return Err(Error::InvalidConfig(
                        "min_bit_errors must be at least 1".into(),
                    ));
                }
                if max_trials == 0 {
                    return Err(Error::InvalidConfig("max_trials must be at least 1".into()));
                }
            }
            StoppingRule::FixedTrials { trials } => {
                if trials == 0 {
                    return Err(Error::InvalidConfig("trials must be at least 1".into()));
                }
            }
        }
        Ok(())
    }

    /// The noise grid as `(snr_db, sigma)` rows.
    pub fn noise_levels(&self) -> Result<Vec<(Option<f64>, f64)>> {
        let (_, k, _) = self.channel.dimensions()?;
        let mean_energy = self.profile.build(k)?.mean_energy();
        match (&self.snr_db, &self.sigma) {
            (Some(snrs), None) => Ok(snrs
                .iter()
                .map(|&db| (Some(db), snr_db_to_sigma(db, mean_energy)))
                .collect()),
            (None, Some(sigmas)) => Ok(sigmas.iter().map(|&s| (None, s)).collect()),
            _ => Err(Error::InvalidConfig(
                "exactly one nonempty noise grid (snr_db or sigma) is required".into(),
            )),
        }
    }
}
