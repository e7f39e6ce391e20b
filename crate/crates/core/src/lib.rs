//! Likelihood ascent search detection for large MIMO / random-spreading
//! CDMA channels.
//!
//! The crate simulates binary symbol detection through random signature
//! channels and provides:
//!
//! * channel realizations (dense binary/Gaussian chips, sparse signatures,
//!   exact small analytic channels) — [`channel`];
//! * detectors: exhaustive maximum-likelihood, likelihood ascent search
//!   under pluggable update schedules, and bounded local search over
//!   multi-bit flips — [`detect`];
//! * analytic references: error-event enumeration, union bounds, asymptotic
//!   multiuser efficiency, large-system fixed-point BER, cutoff loads, and
//!   solution-count phase boundaries — [`analysis`];
//! * Monte-Carlo drivers with deterministic seeding independent of worker
//!   count — [`sim`].
//!
//! ```
//! use lasmimo::channel::{generate_dense, transmit, EnergyProfile};
//! use lasmimo::detect::{detect_las, SchedulePolicy};
//! use lasmimo::BitVector;
//!
//! let profile = EnergyProfile::equal(32);
//! let ch = generate_dense(64, 32, &profile, 0.3, 7).unwrap();
//! let truth = BitVector::all_plus(32);
//! let obs = transmit(&ch, &truth, 1);
//! let start = BitVector::from_signs_of(obs.mf_output());
//! let trace = detect_las(&ch, &obs, &start, &SchedulePolicy::SequentialCircular, 0).unwrap();
//! assert!(trace.output.len() == 32);
//! ```

pub mod analysis;
pub mod bits;
pub mod channel;
pub mod detect;
pub mod error;
pub mod likelihood;
pub mod mat;
pub mod par;
pub mod seed;
pub mod sim;

pub use bits::BitVector;
pub use error::{Error, Result};
