//! Monte Carlo experiments: BER and flip-rate estimation over detector
//! rosters, large-channel distance-ordering statistics, and two-bit
//! decision-region maps.

pub mod config;
pub mod engine;
pub mod lmlchar;
pub mod regions;

pub use config::{
    ChannelSpec, DetectorSpec, ExperimentConfig, InitSpec, ProfileSpec, StoppingRule,
};
pub use engine::{run_ber, run_bfr, BerEstimate, FlipRateStats};
pub use lmlchar::{run_lml_characteristic, LmlCharReport};
pub use regions::{map_regions_2bit, RegionCell, RegionGrid};
