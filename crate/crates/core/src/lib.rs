//! Outcome statistics of stimulated emission from a single excited emitter
//! in a one-dimensional waveguide driven by a single-photon pulse.
//!
//! Three independent routes produce the same [`OutcomeProbabilities`]:
//! closed forms ([`analytic`]), quadrature over the two-photon out-state
//! amplitudes ([`outstate`]) and a discretized time evolution ([`oracle`]).

pub mod analytic;
pub mod error;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod outstate;
pub mod pulses;

pub use error::{Error, Result};
pub use model::{EmitterKind, LifetimeCurve, Method, OutcomeProbabilities, SystemParams};
pub use pulses::{Pulse, PulseShape};
