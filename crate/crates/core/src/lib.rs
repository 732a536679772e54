//! Simulator and analysis toolkit for the Möbius-strip Bell experiment.
//!
//! A "particle" is a four-segment Möbius strip printed with `A+ B'+ A'- B-`
//! on one face and the sign-reversed sequence on the other. Alice reads an
//! A-type segment (accepting or rejecting the one that faces her), Bob reads a
//! B-type segment, and the CHSH combination of their correlators comes out as
//! `4p`, where `p` is Alice's acceptance probability.
//!
//! The crate is organised bottom-up:
//!
//! - [`strip`]: the 8-cell double cover, symbol table and serving geometry.
//! - [`measurement`]: Alice's accept/reject readout, Bob's readout, the
//!   order-dependent sequential walk and the signalling direction choice.
//! - [`experiment`]: policies, seeded random streams and trial generation.
//! - [`statistics`]: correlator estimators, the Bell report and handedness.
//! - [`exact`]: exhaustive enumeration of the outcome space, generic over the
//!   scalar so it can run in exact rational arithmetic.
//! - [`trial_log`]: the line-delimited trial log format.
//!
//! Numeric code is generic over [`Scalar`] (exact enumeration) and [`Real`]
//! (estimators with standard errors); the aliases below fix the common choices.

pub mod error;
pub mod exact;
pub mod experiment;
pub mod measurement;
pub mod scalar;
pub mod statistics;
pub mod strip;
pub mod trial_log;

pub use error::{Error, Result};
pub use exact::{
    conditional_tables, enumerate_outcomes, exact_expectations, ExactBell, ExactReport,
    StatelessPolicy,
};
pub use experiment::{
    accept_probability, draw_serving, run_experiment, AlicePolicy, BobPolicy, Experiment,
    ExperimentSpec, FatigueState, Mode, PlateSide, Serving, Streams, TrialRecord,
};
pub use measurement::{
    alice_measure, bob_measure, nonlocal_reject_direction, sequential_measure, suggested_letter,
    AliceDecision, Direction, MeasurementResult, WalkState,
};
pub use scalar::{Real, Scalar};
pub use statistics::{
    bell_report, handedness, handedness_from_counts, BellReport, CorrelatorEstimate,
    HandednessReport, PairCounts, RunningStats, Tally, Verdict, CLASSICAL_BOUND,
    DEFAULT_VERDICT_SIGMAS,
};
pub use trial_log::{log_from_str, log_to_string, read_log, write_log};
pub use strip::{
    all_configs, antipode, clockwise_step, local_view, symbol_at, traverse, Cell, Letter,
    LocalView, Orientation, ServingConfig, Sign, Symbol,
};

/// Exact rational scalar used by the enumeration oracle.
pub type Rational = num_rational::Rational64;

/// Exact expectations in rational arithmetic.
pub type RationalReport = ExactReport<Rational>;

/// Exact expectations in double precision.
pub type ExactReportF64 = ExactReport<f64>;

/// Monte Carlo Bell report in double precision.
pub type BellReportF64 = BellReport<f64>;

/// Monte Carlo Bell report in single precision.
pub type BellReportF32 = BellReport<f32>;

/// Handedness report in double precision.
pub type HandednessReportF64 = HandednessReport<f64>;
