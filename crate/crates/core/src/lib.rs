//! The two-sided game of Googol.
//!
//! n cards carry two distinct positive values each; a fair coin per card
//! picks the visible side and the hidden sides are revealed one by one in a
//! uniform random order. The player stops once and wants either the largest
//! hidden value itself (secretary objective) or a large expected value
//! relative to the expected hidden maximum (prophet objective).
//!
//! This crate implements:
//!
//! * the instance model with its ranking/couple structure and both the
//!   discrete (coins + permutation) and continuous (arrival-time) views of
//!   the randomness ([`instance`]);
//! * the stopping rules: open, closed and full moving windows, their
//!   randomized mixture, and the timed window of length 1 + t
//!   ([`algorithms`]);
//! * every closed-form outcome distribution, in f64 and in exact rational
//!   arithmetic ([`formulas`]);
//! * ground-truth engines: exhaustive exact-rational enumeration for the
//!   discrete rules and quadrature for the timed window ([`oracle`]);
//! * seeded, reproducible Monte Carlo estimation with confidence intervals
//!   ([`montecarlo`]);
//! * the tuned constants and machine-checked certifications of the
//!   headline guarantees ([`guarantees`]).

pub mod algorithms;
pub mod error;
pub mod formulas;
pub mod guarantees;
pub mod instance;
pub mod montecarlo;
pub mod oracle;
pub mod records;

pub use algorithms::{AlgorithmSpec, Outcome, StopResult, WindowSpec};
pub use error::{Error, Result};
pub use instance::{
    structured_instance, ContinuousRealization, DiscreteRealization, Instance, Rank, RankedView,
};
