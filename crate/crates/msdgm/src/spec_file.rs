//! JSON simulation specs.
//!
//! ```json
//! {
//!   "num_types": 4,
//!   "points_per_type": 500,
//!   "seed": 7,
//!   "couplings": [{ "source": 0, "target": 1, "rho": 0.9, "sigma": 0.01 }]
//! }
//! ```
//!
//! Type indices are 0-based; generated types are named `t1`, `t2`, ...

use std::path::Path;

use anyhow::Context;
use msdgm_core::{Coupling, SimulationSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingFile {
    pub source: usize,
    pub target: usize,
    pub rho: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationFile {
    pub num_types: usize,
    pub points_per_type: usize,
    pub seed: u64,
    #[serde(default)]
    pub couplings: Vec<CouplingFile>,
}

impl SimulationFile {
    pub fn parse(text: &str) -> anyhow::Result<SimulationSpec> {
        let file: SimulationFile = serde_json::from_str(text).context("parsing simulation spec")?;
        let spec = SimulationSpec::from(file);
        spec.validate()?;
        Ok(spec)
    }

    pub fn read(path: &Path) -> anyhow::Result<SimulationSpec> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text)
    }
}

impl From<SimulationFile> for SimulationSpec {
    fn from(f: SimulationFile) -> Self {
        SimulationSpec {
            num_types: f.num_types,
            points_per_type: f.points_per_type,
            seed: f.seed,
            couplings: f
                .couplings
                .into_iter()
                .map(|c| Coupling {
                    source: c.source,
                    target: c.target,
                    rho: c.rho,
                    sigma: c.sigma,
                })
                .collect(),
        }
    }
}
