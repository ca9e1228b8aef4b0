//! Partial dependence between component processes, frequency by frequency.
//!
//! Two routes are provided. The inverse route inverts the full spectral
//! matrix `f` and rescales `g = f^-1`:
//!
//! ```text
//! d_ij = g_ij / sqrt(g_ii g_jj),    R_ij|rest = -d_ij
//! ```
//!
//! The partialization route removes the linear effect of the remaining
//! components explicitly,
//!
//! ```text
//! f_ij|rest = f_ij - f_i,rest f_rest,rest^-1 f_rest,j
//! ```
//!
//! and rescales by the partialized auto-spectra. Both give the same partial
//! coherence; the pipeline uses the inverse route (Cholesky) and the
//! partialization route (pivoted LU) serves as a cross-check.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::CMatrix;
use crate::smoothing::regularize;
use crate::spectra::{FrequencyGrid, SpectralMatrixField};
use crate::{Error, Result};

/// 1-norm condition number above which a matrix is treated as singular.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Maximum entry of `g f - I` accepted for a stored inverse.
pub const INVERSE_RESIDUAL_LIMIT: f64 = 1e-8;
const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub inverse: CMatrix,
    /// Whether the ridge retry was needed.
    pub ridged: bool,
}

fn try_invert(f: &CMatrix) -> Option<CMatrix> {
    let n = f.dim();
    let mut g = f.cholesky_inverse()?;
    // One Newton step g <- g + g (I - f g) tightens the residual.
    let mut r = CMatrix::identity(n).sub(&f.mul(&g));
    if r.max_abs() > 0.0 {
        r = g.mul(&r);
        for (a, b) in g.as_mut_slice().iter_mut().zip(r.as_slice()) {
            *a += b;
        }
        g.hermitianize();
    }
    let cond = f.norm_one() * g.norm_one();
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return None;
    }
    let residual = g.mul(f).sub(&CMatrix::identity(n)).max_abs();
    if !(residual <= INVERSE_RESIDUAL_LIMIT) {
        return None;
    }
    Some(g)
}

/// Inverts a Hermitian spectral matrix. A singular or ill-conditioned input
/// is regularized once with `ridge` and retried.
pub fn invert_spectral_matrix(f: &CMatrix, ridge: f64) -> Result<Inversion> {
    let dev = f.hermitian_deviation();
    if dev > HERMITIAN_TOLERANCE * f.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian(dev));
    }
    if let Some(inverse) = try_invert(f) {
        return Ok(Inversion {
            inverse,
            ridged: false,
        });
    }
    if ridge > 0.0 {
        let (shifted, warning) = regularize(f, ridge);
        if warning.is_none() {
            if let Some(inverse) = try_invert(&shifted) {
                return Ok(Inversion {
                    inverse,
                    ridged: true,
                });
            }
        }
    }
    Err(Error::Singular)
}

fn positive_real(z: Complex64) -> Option<f64> {
    (z.re > 0.0 && z.im.abs() <= HERMITIAN_TOLERANCE * z.re.max(1.0)).then_some(z.re)
}

/// `g_ij / sqrt(g_ii g_jj)`; its modulus measures the strength of the
/// linear partial interrelation of `i` and `j`.
pub fn rescaled_inverse(g: &CMatrix, i: usize, j: usize) -> Result<Complex64> {
    let gii = positive_real(g[(i, i)]).ok_or(Error::NonPositiveDiagonal)?;
    let gjj = positive_real(g[(j, j)]).ok_or(Error::NonPositiveDiagonal)?;
    Ok(g[(i, j)] / libm::sqrt(gii * gjj))
}

/// Partial coherence `R_ij|rest = -g_ij / sqrt(g_ii g_jj)`.
pub fn partial_coherence(g: &CMatrix, i: usize, j: usize) -> Result<Complex64> {
    rescaled_inverse(g, i, j).map(|d| -d)
}

/// Ordinary coherence `|f_ij|^2 / (f_ii f_jj)`.
pub fn ordinary_coherence(f: &CMatrix, i: usize, j: usize) -> Result<f64> {
    let fii = positive_real(f[(i, i)]).ok_or(Error::ZeroAutoSpectrum(i))?;
    let fjj = positive_real(f[(j, j)]).ok_or(Error::ZeroAutoSpectrum(j))?;
    Ok(f[(i, j)].norm_sqr() / (fii * fjj))
}

/// Partialized 2x2 block `[[f_ii|r, f_ij|r], [f_ji|r, f_jj|r]]` where `r`
/// is every index other than `i` and `j`.
fn partialized_block(f: &CMatrix, i: usize, j: usize, ridge: f64) -> Result<[[Complex64; 2]; 2]> {
    let d = f.dim();
    if i >= d || j >= d {
        return Err(Error::UnknownType(i.max(j)));
    }
    let pair = [i, j];
    let mut block = [[f[(i, i)], f[(i, j)]], [f[(j, i)], f[(j, j)]]];
    let rest: Vec<usize> = (0..d).filter(|&k| k != i && k != j).collect();
    if rest.is_empty() {
        return Ok(block);
    }
    let f_rr = f.submatrix(&rest);
    // columns f_rest,i and f_rest,j
    let rhs: Vec<Vec<Complex64>> = rest
        .iter()
        .map(|&r| vec![f[(r, i)], f[(r, j)]])
        .collect();
    let solution = match f_rr.solve(&rhs) {
        Some(x) => x,
        None if ridge > 0.0 => {
            let (shifted, _) = regularize(&f_rr, ridge);
            shifted.solve(&rhs).ok_or(Error::Singular)?
        }
        None => return Err(Error::Singular),
    };
    for (a, &row) in pair.iter().enumerate() {
        for b in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &r) in rest.iter().enumerate() {
                acc += f[(row, r)] * solution[k][b];
            }
            block[a][b] -= acc;
        }
    }
    Ok(block)
}

/// Partial cross-spectrum `f_ij - f_i,rest f_rest,rest^-1 f_rest,j`.
///
/// With `d = 2` the conditioning set is empty and `f_ij` is returned.
pub fn brillinger_partial_spectrum(f: &CMatrix, i: usize, j: usize, ridge: f64) -> Result<Complex64> {
    Ok(partialized_block(f, i, j, ridge)?[0][1])
}

/// Partial coherence from the partialized spectra,
/// `f_ij|rest / sqrt(f_ii|rest f_jj|rest)`.
pub fn brillinger_partial_coherence(f: &CMatrix, i: usize, j: usize, ridge: f64) -> Result<Complex64> {
    let b = partialized_block(f, i, j, ridge)?;
    let fii = positive_real(b[0][0]).ok_or(Error::Singular)?;
    let fjj = positive_real(b[1][1]).ok_or(Error::Singular)?;
    Ok(b[0][1] / libm::sqrt(fii * fjj))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlagReason {
    Singular,
    NonPositiveDiagonal,
}

/// Per-frequency state of a partial-dependence computation.
#[derive(Debug, Clone, PartialEq)]
pub enum FrequencyEntry<T> {
    /// The `(0, 0)` frequency, structurally zero after demeaning.
    Dc,
    Flagged(FlagReason),
    Value(T),
}

impl<T> FrequencyEntry<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            FrequencyEntry::Value(v) => Some(v),
            _ => None,
        }
    }
}

/// Inverse spectral matrices `g(w) = f(w)^-1` over the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseField {
    grid: FrequencyGrid,
    dim: usize,
    entries: Vec<FrequencyEntry<CMatrix>>,
    ridged: usize,
}

impl InverseField {
    /// Inverts every non-DC matrix of `field`.
    pub fn compute(field: &SpectralMatrixField, ridge: f64) -> Result<Self> {
        let d = field.dim();
        if d < 2 {
            return Err(Error::TooFewTypes(d));
        }
        let grid = *field.grid();
        let dc = grid.dc_index();
        let one = |k: usize| -> Result<(FrequencyEntry<CMatrix>, bool)> {
            if k == dc {
                return Ok((FrequencyEntry::Dc, false));
            }
            match invert_spectral_matrix(field.matrix(k), ridge) {
                Ok(inv) => Ok((FrequencyEntry::Value(inv.inverse), inv.ridged)),
                Err(Error::Singular) => Ok((FrequencyEntry::Flagged(FlagReason::Singular), false)),
                Err(e) => Err(e),
            }
        };

        #[cfg(feature = "parallel")]
        let results: Vec<_> = {
            use rayon::prelude::*;
            (0..grid.len()).into_par_iter().map(one).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let results: Vec<_> = (0..grid.len()).map(one).collect();

        let mut entries = Vec::with_capacity(results.len());
        let mut ridged = 0;
        for r in results {
            let (entry, was_ridged) = r?;
            ridged += usize::from(was_ridged);
            entries.push(entry);
        }
        Ok(Self {
            grid,
            dim: d,
            entries,
            ridged,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, index: usize) -> &FrequencyEntry<CMatrix> {
        &self.entries[index]
    }

    /// Number of frequencies that needed the ridge retry.
    pub fn ridged_count(&self) -> usize {
        self.ridged
    }
}

/// Rescaled inverse `d_ij(w)` at every usable frequency, stored as a
/// Hermitian matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialDependenceField {
    grid: FrequencyGrid,
    dim: usize,
    entries: Vec<FrequencyEntry<CMatrix>>,
}

impl PartialDependenceField {
    pub fn from_inverse(inverse: &InverseField) -> Self {
        let d = inverse.dim;
        let entries = inverse
            .entries
            .iter()
            .map(|e| match e {
                FrequencyEntry::Dc => FrequencyEntry::Dc,
                FrequencyEntry::Flagged(r) => FrequencyEntry::Flagged(*r),
                FrequencyEntry::Value(g) => rescale_all(g, d)
                    .map(FrequencyEntry::Value)
                    .unwrap_or(FrequencyEntry::Flagged(FlagReason::NonPositiveDiagonal)),
            })
            .collect();
        Self {
            grid: inverse.grid,
            dim: d,
            entries,
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, index: usize) -> &FrequencyEntry<CMatrix> {
        &self.entries[index]
    }

    /// `d_ij(w)` at lattice `index`, or `None` for DC and flagged frequencies.
    pub fn rescaled(&self, index: usize, i: usize, j: usize) -> Option<Complex64> {
        self.entries[index].value().map(|m| m[(i, j)])
    }

    /// `R_ij|rest(w) = -d_ij(w)`.
    pub fn partial_coherence(&self, index: usize, i: usize, j: usize) -> Option<Complex64> {
        self.rescaled(index, i, j).map(|z| -z)
    }

    pub fn flagged_count(&self, reason: FlagReason) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e, FrequencyEntry::Flagged(r) if *r == reason))
            .count()
    }

    pub fn total_flagged(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e, FrequencyEntry::Flagged(_)))
            .count()
    }

    pub fn usable_count(&self) -> usize {
        self.entries.iter().filter(|e| e.value().is_some()).count()
    }
}

fn rescale_all(g: &CMatrix, d: usize) -> Option<CMatrix> {
    let mut out = CMatrix::identity(d);
    for i in 0..d {
        for j in (i + 1)..d {
            let v = rescaled_inverse(g, i, j).ok()?;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    Some(out)
}

/// Symmetric `d x d` matrix of `sup_w |d_ij(w)|`, unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeStatisticMatrix {
    dim: usize,
    values: Vec<f64>,
}

impl EdgeStatisticMatrix {
    /// Builds from a row-major `d x d` slice; the input must be symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        let mut values = Vec::with_capacity(d * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        for i in 0..d {
            for j in 0..i {
                if values[i * d + j] != values[j * d + i] {
                    return Err(Error::NotHermitian((values[i * d + j] - values[j * d + i]).abs()));
                }
            }
        }
        Ok(Self { dim: d, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.dim.max(1)).map(<[f64]>::to_vec).collect()
    }

    /// Relabels types: entry `(a, b)` of the result is `(perm[a], perm[b])` here.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let d = self.dim;
        let mut values = vec![0.0; d * d];
        for a in 0..d {
            for b in 0..d {
                values[a * d + b] = self.get(perm[a], perm[b]);
            }
        }
        Self { dim: d, values }
    }
}

/// Supremum of `|d_ij(w)|` over all usable frequencies (DC excluded).
pub fn edge_statistics(field: &PartialDependenceField) -> Result<EdgeStatisticMatrix> {
    let d = field.dim;
    if field.usable_count() == 0 {
        return Err(Error::AllFrequenciesFlagged {
            flagged: field.total_flagged(),
            singular: field.flagged_count(FlagReason::Singular),
            non_positive: field.flagged_count(FlagReason::NonPositiveDiagonal),
        });
    }
    let mut values = vec![0.0f64; d * d];
    for m in field.entries.iter().filter_map(FrequencyEntry::value) {
        for i in 0..d {
            for j in (i + 1)..d {
                let v = m[(i, j)].norm();
                if v > values[i * d + j] {
                    values[i * d + j] = v;
                    values[j * d + i] = v;
                }
            }
        }
    }
    for i in 0..d {
        values[i * d + i] = 1.0;
    }
    Ok(EdgeStatisticMatrix { dim: d, values })
}
