//! Radar-cross-section (RCS) signature toolkit.
//!
//! The crate covers the full chain from raw chamber sweeps to target
//! recognition:
//!
//! * [`signature`] — sweep/signature data types, dBsm conversions, and
//!   azimuth-sector slicing.
//! * [`mie`] — exact and approximate PEC-sphere RCS, chamber link budget,
//!   and measured-vs-theoretical calibration.
//! * [`dsp`] — background subtraction, Hann windowing, time-domain
//!   transform, Tukey gating, plus a synthetic-chamber generator for
//!   end-to-end verification.
//! * [`dist`] — eleven candidate RCS distributions with density
//!   evaluation, seeded sampling, and maximum-likelihood fitting.
//! * [`recognition`] — AIC/BIC model ranking, per-class model databases,
//!   and the equal-prior MAP classifier.
//! * [`montecarlo`] — SNR-controlled noise injection, accuracy sweeps,
//!   confusion matrices, and the held-out-class experiment.
//! * [`io`] — CSV and JSON codecs for every file format the toolkit
//!   reads or writes.
//!
//! All randomness flows through the seeded generator in [`rng`]; given the
//! same inputs and seed every result is bit-identical, including under
//! parallel execution.

pub mod dist;
pub mod dsp;
pub mod error;
pub mod io;
pub mod mie;
pub mod montecarlo;
pub mod numeric;
pub mod recognition;
pub mod rng;
pub mod signature;
pub mod special;

pub use error::{Error, Result};
