//! Quasi-static models of a bellow-type silicone elbow actuator and a
//! stacked-airbag shoulder actuator, plus a deterministic simulation of the
//! two-link arm they drive.
//!
//! Units are SI throughout the API (radians, pascals, metres, newtons);
//! degrees and kilopascals appear only in the config and CSV layers.

pub mod config;
pub mod control;
pub mod csvio;
pub mod lisper;
pub mod numerics;
pub mod plant;
pub mod scasper;
pub mod scenario;

pub use config::ModelConfig;
