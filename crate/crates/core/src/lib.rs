//! Marked spatial dependence graph models.
//!
//! Estimates the conditional dependence structure of a multivariate spatial
//! point pattern carrying real-valued marks. The pipeline runs
//!
//! 1. [`pattern`]: rescale to the unit square and demean marks per type,
//! 2. [`spectra`]: DFT of the marked locations and the raw periodogram matrix field,
//! 3. [`smoothing`]: kernel smoothing over the frequency lattice into invertible estimates,
//! 4. [`partial`]: per-frequency inversion, rescaled inverse and partial coherence,
//! 5. [`graph`]: thresholding of the aggregated statistic into an undirected graph.
//!
//! [`pipeline`] composes these steps and [`simulate`] generates synthetic
//! patterns with a known coupling structure.
//!
//! The crate is `no_std` (it needs `alloc`). Enable `std` for std-backed
//! error traits and `parallel` to run the frequency loop on rayon.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
pub mod graph;
pub mod linalg;
pub mod partial;
pub mod pattern;
pub mod pipeline;
pub mod simulate;
pub mod smoothing;
pub mod spectra;

pub use error::{Error, Result, Warning};
pub use num_complex::Complex64;

pub use graph::DependenceGraph;
pub use linalg::CMatrix;
pub use partial::{EdgeStatisticMatrix, PartialDependenceField};
pub use pattern::{MarkedPoint, MarkedPointPattern, TypeInfo, Window};
pub use pipeline::{AnalysisOptions, AnalysisResult};
pub use simulate::{Coupling, SimulationSpec};
pub use smoothing::{Kernel, SmootherSpec};
pub use spectra::{DftTable, FieldKind, FrequencyGrid, SpectralMatrixField};
