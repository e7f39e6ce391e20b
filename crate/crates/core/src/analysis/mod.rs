//! Analytic performance predictions: Gaussian tail utilities, error-event
//! union bounds, efficiency bounds, large-system BER fixed points, cutoff
//! loads, and the coexistence phase structure.

pub mod bounds;
pub mod cutoff;
pub mod errors;
pub mod qfunc;
pub mod replica;
pub mod spinodal;

pub use bounds::{
    ame_lower_bound, parallel_thresholds, signal_distance, union_bound, DistanceKind, UnionBound,
};
pub use cutoff::{critical_load, cutoff_load};
pub use errors::{enumerate_error_set, ErrorVector, ENUMERATION_BUDGET};
pub use qfunc::{normal_pdf, q_function, q_inverse, single_bit_bound};
pub use replica::{replica_ber, BranchClass, EnergyDistribution, ReplicaBranch, ReplicaSolution};
pub use spinodal::{cusp_point, solution_count, spinodal_scan, PhasePoint, SpinodalScan};
