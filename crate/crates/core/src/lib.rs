//! Exact slope comparisons for syzygy bundles on polarized surfaces.
//!
//! Given the numerical data of a smooth projective surface (intersection
//! form, canonical class, χ(O_X), generators of the effective cone) and a
//! vector bundle `E` with ample determinant `D`, this crate compares the
//! slopes of the syzygy bundles `M_{E(d)}` and `M_{E(d)⊗O(-S)}` as
//! functions of the twist `d`, and constructs a polarization for which the
//! latter destabilizes the former for all large `d`.
//!
//! Everything is computed over exact rationals.

pub mod catalog;
pub mod chern;
pub mod cones;
pub mod destabilize;
pub mod document;
pub mod error;
pub mod lattice;
pub mod poly;
pub mod rational;
pub mod slopes;

pub use chern::{Assumption, BundleNumerics, Tagged};
pub use cones::{Positivity, Witness};
pub use destabilize::{batch_report, run_pipeline, BatchJob, BatchReport, DestabilizationReport};
pub use document::SurfaceDocument;
pub use error::{Error, Hypothesis, Result};
pub use lattice::{validate_surface, DivisorClass, SurfaceData, ValidationReport};
pub use poly::{QuadraticPolynomial, Threshold};
pub use rational::Rational;
pub use slopes::SlopeComparison;
