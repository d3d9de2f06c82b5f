//! Antidistinguishability of quantum measurements.
//!
//! Builds three-measurement families adapted to a given `d ⊗ d` entangled
//! pure state (even `d`) and certifies numerically that the family is
//! perfectly antidistinguishable with that state as probe while no
//! single-system probe achieves perfect exclusion.
//!
//! * [`qcore`]: complex matrices, states, measurements, Schmidt form.
//! * [`families`]: the three measurement families and their parameter bounds.
//! * [`exclusion`]: state antidistinguishability with a certified SDP solver.
//! * [`antimeas`]: measurement antidistinguishability with single and entangled probes.
//! * [`cli`]: command-line front end.

pub mod antimeas;
pub mod cli;
pub mod error;
pub mod exclusion;
pub mod families;
pub mod qcore;

pub use error::{Error, Result};
pub use qcore::Tolerances;
