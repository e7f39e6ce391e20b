//! Structured-text configuration: one file with a section per subcommand.

use std::path::Path;

use serde::{Deserialize, Serialize};

use lasmimo::analysis::EnergyDistribution;
use lasmimo::sim::{ChannelSpec, ExperimentConfig, ProfileSpec};

/// Whole config file; each subcommand reads its own section.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replica: Option<ReplicaSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<RegionsSection>,
}

impl CliConfig {
    /// Parses a config file, anchoring parse errors to the file path.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// What the simulate subcommand estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    /// Bit error rates per detector and noise level.
    #[default]
    Ber,
    /// Flip-rate statistics per detector and noise level.
    Bfr,
}

/// The `[simulate]` section: one or more experiments, run in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    #[serde(default)]
    pub measure: Measure,
    pub experiment: Vec<ExperimentConfig>,
}

/// Large-system energy distribution over amplitude classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DistSpec {
    /// All bits at unit amplitude.
    Equal,
    /// A `lambda1` fraction at amplitude `a1`, the rest at `a2`.
    TwoClass { lambda1: f64, a1: f64, a2: f64 },
    /// Explicit `(amplitude, fraction)` classes.
    Classes { entries: Vec<(f64, f64)> },
}

impl DistSpec {
    /// Materializes the distribution.
    pub fn build(&self) -> Result<EnergyDistribution, String> {
        let built = match self {
            DistSpec::Equal => return Ok(EnergyDistribution::equal_unit()),
            DistSpec::TwoClass { lambda1, a1, a2 } => {
                EnergyDistribution::two_class(*lambda1, *a1, *a2)
            }
            DistSpec::Classes { entries } => EnergyDistribution::new(entries.clone()),
        };
        built.map_err(|e| e.to_string())
    }
}

/// Cutoff-load sweep over the weak-class amplitude of a two-class
/// distribution with the strong-class fraction held fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffSweep {
    pub lambda1: f64,
    #[serde(default = "unit_amplitude")]
    pub a1: f64,
    pub a2: Vec<f64>,
}

fn unit_amplitude() -> f64 {
    1.0
}

/// The `[replica]` section: branch tables, phase scans, band edges, the
/// coexistence-corner search, and cutoff-load sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplicaSection {
    pub distribution: DistSpec,
    /// Loads for the branch table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    /// Noise grid for the branch table, in dB.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<Vec<f64>>,
    /// Noise grid for the branch table, as direct noise levels (0 allowed).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<f64>>,
    /// Load window for the phase scan and corner search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_range: Option<[f64; 2]>,
    /// SNR window for the phase scan and corner search, in dB.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db_range: Option<[f64; 2]>,
    /// Phase-scan grid (loads × SNRs).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 2]>,
    /// Locate and print the point where the coexistence band closes.
    #[serde(default)]
    pub locate_cusp: bool,
    /// Optional cutoff-load sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_sweep: Option<CutoffSweep>,
}

/// Distance/bound flavors for the bounds subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKindSpec {
    /// Exhaustive-detector pairwise distances.
    Gml,
    /// Ascent-search distances under parallel-schedule thresholds.
    Las,
    /// One-flip local-maximum distances.
    Lml1,
}

/// The `[bounds]` section: per-bit error bounds on one generated channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub channel: ChannelSpec,
    #[serde(default)]
    pub profile: ProfileSpec,
    #[serde(default)]
    pub seed: u64,
    pub sigma: Vec<f64>,
    pub kinds: Vec<BoundKindSpec>,
    pub max_weight: usize,
    /// Bits to tabulate; all of them when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<Vec<usize>>,
}

/// The `[regions]` section: decision-region map of the analytic two-bit
/// channel over a matched-filter window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionsSection {
    pub rho: f64,
    pub a1: f64,
    pub a2: f64,
    pub y1_range: [f64; 2],
    pub y2_range: [f64; 2],
    pub grid: [usize; 2],
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_config_round_trips_through_toml() {
        let text = r#"
[simulate]
measure = "ber"

[[simulate.experiment]]
channel = { model = "dense", n = 8, k = 4 }
profile = { kind = "equal" }
snr_db = [6.0, 8.0]
detectors = [
    { kind = "matched-filter" },
    { kind = "las", policy = "sequential-circular", init = "random" },
]
stopping = { mode = "until-errors", min_bit_errors = 300, max_trials = 10000 }
master_seed = 7

[replica]
distribution = { kind = "equal" }
alphas = [1.25]
snr_db = [8.0]

[bounds]
channel = { model = "dense", n = 8, k = 8 }
sigma = [0.5]
kinds = ["gml", "lml1"]
max_weight = 3

[regions]
rho = 0.4
a1 = 1.0
a2 = 0.6
y1_range = [-0.99, 0.99]
y2_range = [-0.99, 0.99]
grid = [100, 100]
"#;
        let cfg: CliConfig = toml::from_str(text).unwrap();
        let back: CliConfig = toml::from_str(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, back);
        let sim = cfg.simulate.unwrap();
        assert_eq!(sim.experiment.len(), 1);
        assert_eq!(sim.experiment[0].detectors.len(), 2);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<CliConfig>("[simulate]\nmeasure = \"ber\"\nbogus = 1\nexperiment = []\n");
        assert!(err.is_err());
    }

    #[test]
    fn distribution_specs_build() {
        assert!(DistSpec::Equal.build().is_ok());
        assert!(DistSpec::TwoClass { lambda1: 0.5, a1: 1.0, a2: 0.4 }.build().is_ok());
        assert!(DistSpec::Classes { entries: vec![(1.0, 0.7), (0.5, 0.3)] }.build().is_ok());
        assert!(DistSpec::Classes { entries: vec![(1.0, 0.5)] }.build().is_err());
    }
}
