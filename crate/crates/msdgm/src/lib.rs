//! File formats, pipeline orchestration and the `msdgm` command line.
//!
//! The numerical work lives in [`msdgm_core`]; this crate reads delimited
//! pattern files, writes graphs (DOT, JSON), statistic matrices and spectra
//! dumps, and runs the analyze / simulate / recovery-study workflows.

pub mod analyze;
pub mod formats;
pub mod input;
pub mod recovery;
pub mod spec_file;

pub use analyze::{run_analyze, AnalysisConfig, AnalysisOutputs};
pub use input::{load_pattern, load_pattern_file, Schema};
pub use recovery::{run_recovery_study, RecoveryRow};
pub use spec_file::SimulationFile;

/// Version stamped into every JSON document this crate writes.
pub const SCHEMA_VERSION: u32 = 1;
