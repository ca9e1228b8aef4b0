//! End-to-end estimation: pattern in, edge statistics out.
//!
//! The statistics matrix is computed once and then thresholded as often as
//! needed, so one analysis serves every threshold.

use alloc::string::String;
use alloc::vec::Vec;

use crate::graph::{build_msdgm, DependenceGraph};
use crate::partial::{edge_statistics, EdgeStatisticMatrix, FlagReason, InverseField, PartialDependenceField};
use crate::pattern::MarkedPointPattern;
use crate::smoothing::{smooth_field, Kernel, SmootherSpec, DEFAULT_RIDGE};
use crate::spectra::{assemble_periodogram_field, compute_dft, FrequencyGrid, SpectralMatrixField};
use crate::{Error, Result, Warning};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub grid: FrequencyGrid,
    pub kernel: Kernel,
    /// `None` picks `max(2, minimal admissible h)` for the surviving types.
    pub half_width: Option<usize>,
    pub ridge: f64,
    pub min_count: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            grid: FrequencyGrid::default(),
            kernel: Kernel::Uniform,
            half_width: None,
            ridge: DEFAULT_RIDGE,
            min_count: 1,
        }
    }
}

impl AnalysisOptions {
    pub fn smoother_for(&self, d: usize) -> SmootherSpec {
        let default = SmootherSpec::default_for(d);
        SmootherSpec {
            kernel: self.kernel,
            half_width: self.half_width.unwrap_or(default.half_width),
            ridge: self.ridge,
        }
    }
}

/// A pattern ready for the DFT, plus what preprocessing did to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub pattern: MarkedPointPattern,
    pub dropped: Vec<String>,
    pub warnings: Vec<Warning>,
}

/// Filter by count, rescale to the unit square, demean marks.
pub fn prepare(pattern: &MarkedPointPattern, min_count: usize) -> Result<Prepared> {
    let (filtered, dropped) = pattern.filter_min_count(min_count)?;
    let mut warnings = Vec::new();
    let d = filtered.num_types();
    if d < 2 {
        return Err(Error::TooFewTypes(d));
    }
    if d == 2 {
        log::warn!("{}", Warning::TwoTypesOnly);
        warnings.push(Warning::TwoTypesOnly);
    }
    let dup = filtered.duplicate_coordinates();
    if dup > 0 {
        let w = Warning::DuplicateCoordinates { count: dup };
        log::warn!("{w}");
        warnings.push(w);
    }
    Ok(Prepared {
        pattern: filtered.rescale_to_unit_square().demean_marks(),
        dropped,
        warnings,
    })
}

/// Raw periodogram field of a prepared pattern.
pub fn periodogram(prepared: &MarkedPointPattern, grid: &FrequencyGrid) -> Result<SpectralMatrixField> {
    Ok(assemble_periodogram_field(&compute_dft(prepared, grid)?))
}

/// Rescaled inverse field of a smoothed spectral field.
pub fn partial_dependence(smoothed: &SpectralMatrixField, ridge: f64) -> Result<(PartialDependenceField, usize)> {
    let inverse = InverseField::compute(smoothed, ridge)?;
    Ok((PartialDependenceField::from_inverse(&inverse), inverse.ridged_count()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResult {
    pub type_names: Vec<String>,
    pub type_counts: Vec<usize>,
    pub dropped: Vec<String>,
    pub smoother: SmootherSpec,
    pub statistics: EdgeStatisticMatrix,
    pub flagged_singular: usize,
    pub flagged_non_positive: usize,
    /// Frequencies that needed the ridge retry during inversion.
    pub ridged: usize,
    pub usable_frequencies: usize,
    pub warnings: Vec<Warning>,
}

impl AnalysisResult {
    pub fn flagged(&self) -> usize {
        self.flagged_singular + self.flagged_non_positive
    }

    pub fn graph(&self, alpha: f64) -> Result<DependenceGraph> {
        build_msdgm(&self.statistics, &self.type_names, alpha)
    }
}

/// Runs preprocessing, DFT, smoothing, inversion and aggregation.
pub fn analyze(pattern: &MarkedPointPattern, options: &AnalysisOptions) -> Result<AnalysisResult> {
    let Prepared {
        pattern,
        dropped,
        mut warnings,
    } = prepare(pattern, options.min_count)?;
    let d = pattern.num_types();
    let smoother = options.smoother_for(d);
    warnings.extend(smoother.validate(d)?);

    let raw = periodogram(&pattern, &options.grid)?;
    let smoothed = smooth_field(&raw, &smoother);
    let (field, ridged) = partial_dependence(&smoothed, smoother.ridge)?;
    let statistics = edge_statistics(&field)?;

    Ok(AnalysisResult {
        type_names: pattern.type_names(),
        type_counts: pattern.types().iter().map(|t| t.count).collect(),
        dropped,
        smoother,
        statistics,
        flagged_singular: field.flagged_count(FlagReason::Singular),
        flagged_non_positive: field.flagged_count(FlagReason::NonPositiveDiagonal),
        ridged,
        usable_frequencies: field.usable_count(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{simulate, Coupling, SimulationSpec};

    #[test]
    fn rejects_single_type() {
        let spec = SimulationSpec::independent(2, 30, 1);
        let p = simulate(&spec).unwrap();
        let (one, _) = p.filter_min_count(1).unwrap();
        let only_first = {
            let pts: Vec<_> = one.points().iter().filter(|q| q.type_id == 0).copied().collect();
            MarkedPointPattern::new(pts, *one.window(), alloc::vec![String::from("a")]).unwrap()
        };
        assert_eq!(analyze(&only_first, &AnalysisOptions::default()), Err(Error::TooFewTypes(1)));
    }

    #[test]
    fn two_types_warn_but_run() {
        let p = simulate(&SimulationSpec::independent(2, 100, 9)).unwrap();
        let r = analyze(&p, &AnalysisOptions::default()).unwrap();
        assert!(r.warnings.contains(&Warning::TwoTypesOnly));
        assert_eq!(r.statistics.dim(), 2);
        assert_eq!(r.usable_frequencies + r.flagged(), FrequencyGrid::default().len() - 1);
    }

    #[test]
    fn perfect_coupling_is_detected() {
        let spec = SimulationSpec::independent(3, 150, 4).with_coupling(Coupling {
            source: 0,
            target: 1,
            rho: 1.0,
            sigma: 0.0,
        });
        let r = analyze(&simulate(&spec).unwrap(), &AnalysisOptions::default()).unwrap();
        let g = r.graph(0.9).unwrap();
        assert!(g.has_edge(0, 1));
    }
}
