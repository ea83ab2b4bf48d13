//! Scattered-light statistics for bound complexes of polar molecules in
//! parallel 1D tubes.
//!
//! With probe and detection perpendicular to the tubes, all molecules in one
//! tube scatter in phase, and the detected amplitude reduces to a weighted
//! sum of per-tube molecule numbers. At the diffraction minimum the weighted
//! means cancel, so the photon rate measures nothing but number fluctuations,
//! and those differ sharply between bound complexes (which enter the beam as
//! a unit) and their dissociation products (which enter independently). The
//! photon rate at the minimum therefore reads out which complexes exist
//! without relying on any internal state structure.
//!
//! The crate provides:
//!
//! - [`optics`]: mode functions, per-tube phase factors, the spacing solver
//!   that places the detector at a diffraction minimum, and coupling
//!   constants.
//! - [`statistics`]: independent Poissonian species over tubes and the
//!   closed-form amplitude/intensity moments, including beam-profile-weighted
//!   effective numbers.
//! - [`montecarlo`]: a seeded, chunk-deterministic sampling estimator that
//!   cross-checks the closed forms, parallel via rayon behind the `parallel`
//!   feature (on by default) with a bit-identical sequential fallback.
//! - [`scenarios`]: the standard dissociation cascades and plateau scans.

pub mod montecarlo;
pub mod optics;
pub mod sampling;
pub mod scenarios;
pub mod statistics;

pub use montecarlo::{estimate, estimate_scan, estimate_sequential, McConfig, McEstimate, MonteCarloError};
pub use optics::{minimum_spacings, CouplingParams, ModeKind, OpticalGeometry, OpticsError};
pub use scenarios::{Cascade, CascadeKind, ScanPoint, ScenarioError};
pub use statistics::{
    effective_number_moments, BeamProfile, Ensemble, IntensityReport, ProfileShape, Species,
    StatisticsError,
};
