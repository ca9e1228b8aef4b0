//! Kernel smoothing of the periodogram field over the frequency lattice.
//!
//! A raw periodogram matrix is an outer product and therefore singular for
//! `d >= 2`. Averaging over a `(2h+1) x (2h+1)` lattice neighbourhood raises
//! the rank, and a small ridge proportional to the mean auto-spectrum keeps
//! the result safely invertible.

use alloc::vec::Vec;

use crate::linalg::CMatrix;
use crate::spectra::{FieldKind, SpectralMatrixField};
use crate::{Error, Result, Warning};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Uniform,
    /// Product of 1-D triangles, weight `(h+1-|dp|)(h+1-|dq|)`.
    Triangular,
}

impl Kernel {
    fn weight(self, half_width: usize, dp: i64, dq: i64) -> f64 {
        match self {
            Kernel::Uniform => 1.0,
            Kernel::Triangular => {
                let h = half_width as i64 + 1;
                ((h - dp.abs()) * (h - dq.abs())) as f64
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmootherSpec {
    pub kernel: Kernel,
    pub half_width: usize,
    /// Fraction of the mean diagonal added to the diagonal.
    pub ridge: f64,
}

pub const DEFAULT_HALF_WIDTH: usize = 2;
pub const DEFAULT_RIDGE: f64 = 1e-8;

/// Smallest `h` with `(2h+1)^2 >= d`.
pub fn min_admissible_half_width(d: usize) -> usize {
    let mut h = 0;
    while (2 * h + 1) * (2 * h + 1) < d {
        h += 1;
    }
    h
}

impl SmootherSpec {
    /// Uniform kernel, `h = max(2, minimal admissible h)`, ridge `1e-8`.
    pub fn default_for(d: usize) -> Self {
        Self {
            kernel: Kernel::Uniform,
            half_width: DEFAULT_HALF_WIDTH.max(min_admissible_half_width(d)),
            ridge: DEFAULT_RIDGE,
        }
    }

    pub fn neighbourhood_size(&self) -> usize {
        (2 * self.half_width + 1) * (2 * self.half_width + 1)
    }

    /// Checks the ridge and warns when the bandwidth cannot make a
    /// `d x d` estimate full rank on its own.
    pub fn validate(&self, d: usize) -> Result<Option<Warning>> {
        if !self.ridge.is_finite() || self.ridge < 0.0 {
            return Err(Error::InvalidSmoother(alloc::format!(
                "ridge must be finite and >= 0, got {}",
                self.ridge
            )));
        }
        let minimum = min_admissible_half_width(d);
        if self.half_width < minimum && self.ridge == 0.0 {
            let w = Warning::BandwidthBelowAdmissible {
                bandwidth: self.half_width,
                minimum,
            };
            log::warn!("{w}");
            return Ok(Some(w));
        }
        Ok(None)
    }
}

/// Returns `matrix + ridge * mean(diag) * I`.
///
/// An all-zero diagonal leaves the matrix untouched and yields a warning.
pub fn regularize(matrix: &CMatrix, ridge: f64) -> (CMatrix, Option<Warning>) {
    if ridge == 0.0 {
        return (matrix.clone(), None);
    }
    let mean = matrix.mean_diagonal();
    if mean == 0.0 {
        log::warn!("{}", Warning::ZeroDiagonalRidge);
        return (matrix.clone(), Some(Warning::ZeroDiagonalRidge));
    }
    let mut out = matrix.clone();
    out.add_to_diagonal(ridge * mean);
    (out, None)
}

fn smooth_at(raw: &SpectralMatrixField, spec: &SmootherSpec, index: usize) -> CMatrix {
    let grid = raw.grid();
    let (p0, q0) = grid.point(index);
    let h = spec.half_width as i64;
    let mut acc = CMatrix::zeros(raw.dim());
    let mut total = 0.0;
    // Fixed raster order (dp major, dq minor) keeps the sum reproducible.
    for dp in -h..=h {
        for dq in -h..=h {
            let (p, q) = (p0 + dp, q0 + dq);
            if p == 0 && q == 0 {
                continue;
            }
            let Some(k) = grid.index(p, q) else {
                continue;
            };
            let w = spec.kernel.weight(spec.half_width, dp, dq);
            for (a, b) in acc.as_mut_slice().iter_mut().zip(raw.matrix(k).as_slice()) {
                *a += b * w;
            }
            total += w;
        }
    }
    if total == 0.0 {
        // Only reachable at (0, 0) with h = 0.
        return raw.matrix(index).clone();
    }
    acc.scale(1.0 / total);
    acc.hermitianize();
    acc
}

/// Kernel-weighted neighbourhood average at every lattice point, truncated
/// and renormalized at the lattice edges, with `(0, 0)` left out of every
/// neighbourhood, followed by [`regularize`] with `spec.ridge`.
pub fn smooth_field(raw: &SpectralMatrixField, spec: &SmootherSpec) -> SpectralMatrixField {
    let n = raw.grid().len();
    let one = |k: usize| regularize(&smooth_at(raw, spec, k), spec.ridge).0;

    #[cfg(feature = "parallel")]
    let matrices: Vec<CMatrix> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let matrices: Vec<CMatrix> = (0..n).map(one).collect();

    SpectralMatrixField::new(*raw.grid(), FieldKind::Smoothed, matrices)
        .expect("smoothing preserves field shape")
}
