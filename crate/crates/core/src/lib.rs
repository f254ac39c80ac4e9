//! Scalar wave optics for the dual-pinhole / wire-grid / imaging-lens which-way
//! experiment, together with the visibility and which-way arithmetic that is
//! built on top of it.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration and
//! the command-line runner live in the `welcher` crate.
//!
//! Plane conventions used throughout:
//!
//! * sample `(ix, iy)` sits at `x = (ix - nx/2)·dx`, `y = (iy - ny/2)·dy`, so the
//!   optical axis is on a sample;
//! * pinhole A is at `x = -separation/2`, pinhole B at `+separation/2`;
//! * wires run parallel to `y`, fringes vary along `x`.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod elements;
mod error;
pub mod fft;
pub mod field;
pub mod metrics;
pub mod photon;
pub mod propagation;
pub mod scenario;
pub mod special;

pub use elements::{DetectorLabel, DetectorRegion, EdgeMode, ExperimentGeometry, PinholeBlock};
pub use error::{Error, Result};
pub use field::{Axis, IntensityProfile, SampledField};
pub use metrics::{DetectorCounts, DualityMetrics};
pub use photon::{CoincidenceReport, PhotonEvent};
pub use propagation::PropagationMethod;
pub use scenario::{RunSummary, Scenario, ScenarioResult, SimOptions};

pub use num_complex::Complex64;
