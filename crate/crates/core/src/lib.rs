//! Simulation toolkit for a periodically driven open qubit.
//!
//! The crate builds two time-independent rotating-frame generators for the
//! same microscopic model — a Redfield generator (not completely positive)
//! and its ergodically averaged weak-coupling counterpart (completely
//! positive) — propagates Bloch vectors under either of them, and evaluates
//! the internal entropy production along states and trajectories so that
//! second-law violations of the non-CP dynamics can be detected and mapped.
//!
//! Modules follow the pipeline:
//!
//! * [`params`] — physical parameters and reduction to dimensionless units,
//! * [`bloch`] — qubit states in the rotated Pauli basis, entropies,
//! * [`bath`] — Ohmic bath correlation function and one-sided transforms,
//! * [`generators`] — 4×4 Bloch-space generators and CP diagnostics,
//! * [`dynamics`] — matrix-exponential propagation and positivity monitor,
//! * [`thermo`] — entropy production, heat flux, violation scans and sweeps.

pub mod bath;
pub mod bloch;
pub mod dynamics;
pub mod generators;
mod linalg;
pub mod params;
pub mod quad;
pub mod thermo;

pub use bath::{SpectralModel, TimeKernel, CorrelationPart, TransformRequest};
pub use bloch::{BlochVector, DensityMatrix, FrameDirection};
pub use dynamics::TrajectoryRecord;
pub use generators::{BlochGenerator, GeneratorKind, KossakowskiData};
pub use params::{FrequencyConvention, ModelParams, UnitMode};
pub use thermo::{Sampling, SigmaSample, SweepCell, ViolationReport};
