//! Named presets pinning the parameter sets behind the standard plots and
//! tables, at a desk-scale bit count.

use lasmimo::detect::SchedulePolicy;
use lasmimo::sim::{
    ChannelSpec, DetectorSpec, ExperimentConfig, InitSpec, ProfileSpec, StoppingRule,
};

use crate::config::{
    BoundKindSpec, BoundsSection, CliConfig, CutoffSweep, DistSpec, Measure, RegionsSection,
    ReplicaSection, SimulateSection,
};

/// Desk-scale bit count for the large-channel presets.
const DESK_K: usize = 2048;

/// Names `recipe` accepts.
pub const RECIPE_NAMES: [&str; 9] = [
    "fig1", "fig3", "fig4a", "fig4b", "fig4c", "fig4d", "fig4e", "fig5", "table-bfr",
];

fn slas_random() -> DetectorSpec {
    DetectorSpec::Las {
        label: Some("slas".into()),
        policy: SchedulePolicy::SequentialCircular,
        init: InitSpec::Random,
        max_steps: 0,
    }
}

fn ber_experiment(alpha: f64, k: usize, snr_db: Vec<f64>, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        channel: ChannelSpec::DenseLoad { alpha, k },
        profile: ProfileSpec::Equal,
        snr_db: Some(snr_db),
        sigma: None,
        detectors: vec![DetectorSpec::MatchedFilter, slas_random()],
        stopping: StoppingRule::UntilErrors {
            min_bit_errors: 300,
            max_trials: 5000,
        },
        master_seed: seed,
        workers: 0,
        fixed_channel: false,
    }
}

fn snr_sweep_recipe(alpha: f64) -> CliConfig {
    CliConfig {
        simulate: Some(SimulateSection {
            measure: Measure::Ber,
            experiment: vec![ber_experiment(alpha, DESK_K, vec![4.0, 6.0, 8.0], 1)],
        }),
        ..CliConfig::default()
    }
}

/// Builds the preset for `name`, or lists the valid names in the error.
pub fn recipe(name: &str) -> Result<CliConfig, String> {
    let cfg = match name {
        // Two-bit decision-region map on an odd-hundredths grid, which
        // avoids placing samples exactly on the boundary lines.
        "fig1" => CliConfig {
            regions: Some(RegionsSection {
                rho: 0.4,
                a1: 1.0,
                a2: 0.6,
                y1_range: [-0.99, 0.99],
                y2_range: [-0.99, 0.99],
                grid: [100, 100],
            }),
            // A bounds table on the same correlation accompanies the map.
            bounds: Some(BoundsSection {
                channel: ChannelSpec::Dense { n: 16, k: 8 },
                profile: ProfileSpec::Equal,
                seed: 1,
                sigma: vec![0.5],
                kinds: vec![BoundKindSpec::Gml, BoundKindSpec::Lml1],
                max_weight: 3,
                bits: None,
            }),
            ..CliConfig::default()
        },
        // Phase scan of the coexistence band plus the corner where the
        // band closes.
        "fig3" => CliConfig {
            replica: Some(ReplicaSection {
                distribution: DistSpec::Equal,
                alphas: None,
                snr_db: None,
                sigma: None,
                alpha_range: Some([1.0, 2.0]),
                snr_db_range: Some([4.0, 8.0]),
                grid: Some([41, 17]),
                locate_cusp: true,
                cutoff_sweep: None,
            }),
            ..CliConfig::default()
        },
        // Load sweep at fixed SNR: the three qualitative regimes.
        "fig4a" => CliConfig {
            simulate: Some(SimulateSection {
                measure: Measure::Ber,
                experiment: [0.8, 1.02, 1.5, 2.0, 2.3]
                    .iter()
                    .map(|&a| ber_experiment(a, DESK_K, vec![7.99], 1))
                    .collect(),
            }),
            ..CliConfig::default()
        },
        // SNR sweeps at the pinned loads.
        "fig4b" => snr_sweep_recipe(2.30),
        "fig4c" => snr_sweep_recipe(1.25),
        "fig4d" => snr_sweep_recipe(1.08),
        "fig4e" => snr_sweep_recipe(1.02),
        // Cutoff-load sweep for the two-class distribution.
        "fig5" => CliConfig {
            replica: Some(ReplicaSection {
                distribution: DistSpec::TwoClass {
                    lambda1: 0.5,
                    a1: 1.0,
                    a2: 0.4,
                },
                alphas: None,
                snr_db: None,
                sigma: None,
                alpha_range: None,
                snr_db_range: None,
                grid: None,
                locate_cusp: false,
                cutoff_sweep: Some(CutoffSweep {
                    lambda1: 0.5,
                    a1: 1.0,
                    a2: vec![1.0, 0.8, 0.6, 0.4, 0.2, 0.1, 0.05],
                }),
            }),
            ..CliConfig::default()
        },
        // Flip-rate table over a practical load/SNR sweep.
        "table-bfr" => CliConfig {
            simulate: Some(SimulateSection {
                measure: Measure::Bfr,
                experiment: [0.5, 0.7, 1.0, 1.2]
                    .iter()
                    .map(|&alpha| ExperimentConfig {
                        channel: ChannelSpec::DenseLoad { alpha, k: 1500 },
                        profile: ProfileSpec::Equal,
                        snr_db: Some(vec![4.0, 6.0, 8.0]),
                        sigma: None,
                        detectors: vec![DetectorSpec::Las {
                            label: Some("slas".into()),
                            policy: SchedulePolicy::SequentialCircular,
                            init: InitSpec::MatchedFilter,
                            max_steps: 0,
                        }],
                        stopping: StoppingRule::FixedTrials { trials: 20 },
                        master_seed: 1,
                        workers: 0,
                        fixed_channel: false,
                    })
                    .collect(),
            }),
            ..CliConfig::default()
        },
        other => {
            return Err(format!(
                "unknown recipe '{other}'; valid names: {}",
                RECIPE_NAMES.join(", ")
            ))
        }
    };
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_recipe_builds_and_round_trips() {
        for name in RECIPE_NAMES {
            let cfg = recipe(name).unwrap();
            let text = toml::to_string(&cfg).unwrap();
            let back: CliConfig = toml::from_str(&text).unwrap();
            assert_eq!(cfg, back, "recipe {name}");
        }
    }

    #[test]
    fn recipe_experiments_validate() {
        for name in RECIPE_NAMES {
            if let Some(sim) = recipe(name).unwrap().simulate {
                for exp in &sim.experiment {
                    exp.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
                }
            }
        }
    }

    #[test]
    fn unknown_recipe_lists_the_choices() {
        let err = recipe("fig9").unwrap_err();
        assert!(err.contains("fig1"));
        assert!(err.contains("table-bfr"));
    }
}
