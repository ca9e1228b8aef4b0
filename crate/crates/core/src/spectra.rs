//! DFT of marked locations and the marked periodogram matrix field.
//!
//! Coordinates are expected on the unit square, so the transform of type `i`
//! at lattice point `(p, q)` is
//!
//! ```text
//! F_i(p, q) = sum_k (m_k - mean_i) * exp(-2 pi i (p x_k + q y_k))
//! ```
//!
//! with angular frequency `(2 pi p, 2 pi q)`. The `(l_x l_y)^(-1/2)` prefactor
//! of the general form is dropped; it cancels in every normalized quantity.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::CMatrix;
use crate::pattern::MarkedPointPattern;
use crate::{Error, Result};

/// Half-plane frequency lattice `p in 0..=p_max`, `q in -q_max..q_max`.
///
/// Positions are stored in raster order: `p` major, `q` minor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyGrid {
    p_max: usize,
    q_max: usize,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self { p_max: 16, q_max: 16 }
    }
}

impl FrequencyGrid {
    pub fn new(p_max: usize, q_max: usize) -> Result<Self> {
        if q_max == 0 {
            return Err(Error::InvalidGrid("q_max must be at least 1"));
        }
        Ok(Self { p_max, q_max })
    }

    pub fn p_max(&self) -> usize {
        self.p_max
    }

    pub fn q_max(&self) -> usize {
        self.q_max
    }

    /// Number of `q` values per `p` row.
    pub fn row_len(&self) -> usize {
        2 * self.q_max
    }

    pub fn len(&self) -> usize {
        (self.p_max + 1) * self.row_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, p: i64, q: i64) -> Option<usize> {
        let qm = self.q_max as i64;
        if p < 0 || p > self.p_max as i64 || q < -qm || q >= qm {
            return None;
        }
        Some(p as usize * self.row_len() + (q + qm) as usize)
    }

    pub fn point(&self, index: usize) -> (i64, i64) {
        let p = index / self.row_len();
        let q = (index % self.row_len()) as i64 - self.q_max as i64;
        (p as i64, q)
    }

    /// Lattice position of the `(0, 0)` frequency.
    pub fn dc_index(&self) -> usize {
        self.q_max
    }

    /// Angular frequency `(2 pi p, 2 pi q)`.
    pub fn omega(&self, index: usize) -> (f64, f64) {
        let (p, q) = self.point(index);
        (2.0 * PI * p as f64, 2.0 * PI * q as f64)
    }

    pub fn points(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.len()).map(move |k| self.point(k))
    }
}

/// Per-type DFT values over a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DftTable {
    grid: FrequencyGrid,
    /// `values[type_id][lattice index]`
    values: Vec<Vec<Complex64>>,
}

impl DftTable {
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn num_types(&self) -> usize {
        self.values.len()
    }

    pub fn type_values(&self, type_id: usize) -> Result<&[Complex64]> {
        self.values
            .get(type_id)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownType(type_id))
    }

    pub fn value(&self, type_id: usize, index: usize) -> Complex64 {
        self.values[type_id][index]
    }

    /// `(F_1, ..., F_d)` at one lattice position.
    pub fn vector_at(&self, index: usize) -> Vec<Complex64> {
        self.values.iter().map(|v| v[index]).collect()
    }
}

/// `exp(-i theta)`
#[inline]
fn unit_phase(theta: f64) -> Complex64 {
    let (s, c) = libm::sincos(theta);
    Complex64::new(c, -s)
}

fn dft_of_points(points: &[(f64, f64, f64)], grid: &FrequencyGrid) -> Vec<Complex64> {
    let p_count = grid.p_max + 1;
    let row = grid.row_len();
    let qm = grid.q_max as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut x_phase = vec![Complex64::new(0.0, 0.0); p_count];
    let mut y_phase = vec![Complex64::new(0.0, 0.0); row];
    for &(x, y, mark) in points {
        if mark == 0.0 {
            continue;
        }
        // Factor exp(-2 pi i (p x + q y)) into per-axis phases; each is
        // evaluated directly rather than by recurrence.
        for (p, slot) in x_phase.iter_mut().enumerate() {
            *slot = unit_phase(2.0 * PI * p as f64 * x) * mark;
        }
        for (k, slot) in y_phase.iter_mut().enumerate() {
            *slot = unit_phase(2.0 * PI * (k as f64 - qm) * y);
        }
        for (p, &xp) in x_phase.iter().enumerate() {
            let dst = &mut out[p * row..(p + 1) * row];
            for (acc, &yq) in dst.iter_mut().zip(&y_phase) {
                *acc += xp * yq;
            }
        }
    }
    out
}

/// Marked DFT of every type over `grid`.
///
/// The pattern must be on the unit square with demeaned marks.
pub fn compute_dft(pattern: &MarkedPointPattern, grid: &FrequencyGrid) -> Result<DftTable> {
    if !pattern.is_unit_square() {
        return Err(Error::NotPreprocessed {
            missing: "rescale_to_unit_square",
        });
    }
    if !pattern.is_demeaned() {
        return Err(Error::NotPreprocessed {
            missing: "demean_marks",
        });
    }
    let mut by_type: Vec<Vec<(f64, f64, f64)>> = vec![Vec::new(); pattern.num_types()];
    for p in pattern.points() {
        by_type[p.type_id].push((p.x, p.y, p.mark));
    }

    #[cfg(feature = "parallel")]
    let values = {
        use rayon::prelude::*;
        by_type
            .par_iter()
            .map(|pts| dft_of_points(pts, grid))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let values = by_type.iter().map(|pts| dft_of_points(pts, grid)).collect();

    Ok(DftTable {
        grid: *grid,
        values,
    })
}

/// Marked auto-periodogram `|F_i|^2` over the grid.
pub fn auto_periodogram(table: &DftTable, i: usize) -> Result<Vec<f64>> {
    Ok(table.type_values(i)?.iter().map(|z| z.norm_sqr()).collect())
}

/// Marked cross-periodogram `F_i * conj(F_j)` over the grid.
pub fn cross_periodogram(table: &DftTable, i: usize, j: usize) -> Result<Vec<Complex64>> {
    let fi = table.type_values(i)?;
    let fj = table.type_values(j)?;
    Ok(fi.iter().zip(fj).map(|(a, b)| a * b.conj()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Raw,
    Smoothed,
}

/// One `d x d` Hermitian spectral matrix per lattice frequency.
///
/// Entry `(i, j)` is the cross-spectrum `f_ij`; its real part is the
/// co-spectrum and its negated imaginary part the quadrature spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMatrixField {
    grid: FrequencyGrid,
    kind: FieldKind,
    dim: usize,
    matrices: Vec<CMatrix>,
}

impl SpectralMatrixField {
    pub fn new(grid: FrequencyGrid, kind: FieldKind, matrices: Vec<CMatrix>) -> Result<Self> {
        if matrices.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: matrices.len(),
            });
        }
        let dim = matrices.first().map_or(0, CMatrix::dim);
        if let Some(bad) = matrices.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self {
            grid,
            kind,
            dim,
            matrices,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, index: usize) -> &CMatrix {
        &self.matrices[index]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn entry(&self, index: usize, i: usize, j: usize) -> Complex64 {
        self.matrices[index][(i, j)]
    }

    pub fn co_spectrum(&self, index: usize, i: usize, j: usize) -> f64 {
        self.entry(index, i, j).re
    }

    pub fn quadrature_spectrum(&self, index: usize, i: usize, j: usize) -> f64 {
        -self.entry(index, i, j).im
    }

    /// Multiplies every entry by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for m in &mut out.matrices {
            m.scale(factor);
        }
        out
    }
}

/// Stacks auto- and cross-periodograms into `F(w) F(w)^H` at every frequency.
pub fn assemble_periodogram_field(table: &DftTable) -> SpectralMatrixField {
    let d = table.num_types();
    let matrices = (0..table.grid.len())
        .map(|k| {
            let mut m = CMatrix::zeros(d);
            for i in 0..d {
                let fi = table.values[i][k];
                m[(i, i)] = Complex64::new(fi.norm_sqr(), 0.0);
                for j in (i + 1)..d {
                    let v = fi * table.values[j][k].conj();
                    m[(i, j)] = v;
                    m[(j, i)] = v.conj();
                }
            }
            m
        })
        .collect();
    SpectralMatrixField {
        grid: table.grid,
        kind: FieldKind::Raw,
        dim: d,
        matrices,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{MarkedPoint, Window};
    use alloc::string::ToString;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn table(values: Vec<Vec<Complex64>>, grid: FrequencyGrid) -> DftTable {
        DftTable { grid, values }
    }

    #[test]
    fn grid_layout() {
        let g = FrequencyGrid::default();
        assert_eq!(g.len(), 17 * 32);
        assert_eq!(g.point(0), (0, -16));
        assert_eq!(g.point(g.len() - 1), (16, 15));
        assert_eq!(g.point(g.dc_index()), (0, 0));
        assert_eq!(g.points().filter(|&pq| pq == (0, 0)).count(), 1);
        for k in 0..g.len() {
            let (p, q) = g.point(k);
            assert_eq!(g.index(p, q), Some(k));
        }
        assert_eq!(g.index(0, 16), None);
        assert_eq!(g.index(-1, 0), None);
        assert!(FrequencyGrid::new(4, 0).is_err());
    }

    #[test]
    fn two_point_dft() {
        // marks +1 at (0,0) and -1 at (0.5,0): F(1,0) = 1 - exp(-i pi) = 2
        let pts = vec![
            MarkedPoint { x: 0.0, y: 0.0, type_id: 0, mark: 1.0 },
            MarkedPoint { x: 0.5, y: 0.0, type_id: 0, mark: -1.0 },
        ];
        let p = MarkedPointPattern::new(pts, Window::unit(), vec!["a".to_string()])
            .unwrap()
            .demean_marks();
        let grid = FrequencyGrid::new(2, 2).unwrap();
        let t = compute_dft(&p, &grid).unwrap();
        let f = t.value(0, grid.index(1, 0).unwrap());
        assert!((f - c(2.0, 0.0)).norm() < 1e-15);
        assert!(t.value(0, grid.dc_index()).norm() < 1e-15);
    }

    #[test]
    fn single_point_type_is_zero() {
        let pts = vec![
            MarkedPoint { x: 0.3, y: 0.7, type_id: 0, mark: 4.2 },
            MarkedPoint { x: 0.1, y: 0.2, type_id: 1, mark: 1.0 },
            MarkedPoint { x: 0.9, y: 0.4, type_id: 1, mark: 3.0 },
        ];
        let p = MarkedPointPattern::new(pts, Window::unit(), vec!["a".into(), "b".into()])
            .unwrap()
            .demean_marks();
        let t = compute_dft(&p, &FrequencyGrid::default()).unwrap();
        assert!(t.type_values(0).unwrap().iter().all(|z| *z == c(0.0, 0.0)));
        assert!(t.type_values(1).unwrap().iter().any(|z| z.norm() > 0.1));
    }

    #[test]
    fn requires_preprocessing() {
        let pts = vec![MarkedPoint { x: 1.0, y: 2.0, type_id: 0, mark: 1.0 }];
        let w = Window::new(0.0, 4.0, 0.0, 4.0).unwrap();
        let raw = MarkedPointPattern::new(pts, w, vec!["a".into()]).unwrap();
        let grid = FrequencyGrid::default();
        assert!(matches!(compute_dft(&raw, &grid), Err(Error::NotPreprocessed { .. })));
        assert!(matches!(
            compute_dft(&raw.rescale_to_unit_square(), &grid),
            Err(Error::NotPreprocessed { missing: "demean_marks" })
        ));
        assert!(compute_dft(&raw.rescale_to_unit_square().demean_marks(), &grid).is_ok());
    }

    #[test]
    fn periodogram_examples() {
        let grid = FrequencyGrid::new(0, 1).unwrap();
        let t = table(
            vec![vec![c(3.0, 4.0), c(1.0, 1.0)], vec![c(0.0, 0.0), c(2.0, 0.0)]],
            grid,
        );
        assert_eq!(auto_periodogram(&t, 0).unwrap(), vec![25.0, 2.0]);
        assert_eq!(auto_periodogram(&t, 1).unwrap()[0], 0.0);
        let cross = cross_periodogram(&t, 0, 1).unwrap();
        assert_eq!(cross[1], c(2.0, 2.0));
        let back = cross_periodogram(&t, 1, 0).unwrap();
        assert_eq!(back[1], cross[1].conj());
        let same = cross_periodogram(&t, 0, 0).unwrap();
        let auto = auto_periodogram(&t, 0).unwrap();
        for (z, a) in same.iter().zip(&auto) {
            assert_eq!(*z, c(*a, 0.0));
        }
        assert_eq!(auto_periodogram(&t, 2), Err(Error::UnknownType(2)));
        assert_eq!(cross_periodogram(&t, 0, 5), Err(Error::UnknownType(5)));
    }

    #[test]
    fn outer_product_field() {
        let grid = FrequencyGrid::new(0, 1).unwrap();
        let t = table(
            vec![vec![c(1.0, 0.0), c(0.5, -2.0)], vec![c(0.0, 1.0), c(1.5, 0.25)]],
            grid,
        );
        let field = assemble_periodogram_field(&t);
        assert_eq!(field.kind(), FieldKind::Raw);
        let expected = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(1.0, 0.0)],
        ]);
        assert_eq!(*field.matrix(0), expected);
        assert_eq!(field.co_spectrum(0, 0, 1), 0.0);
        assert_eq!(field.quadrature_spectrum(0, 0, 1), 1.0);
        for m in field.matrices() {
            assert_eq!(m.hermitian_deviation(), 0.0);
            assert!(m.determinant().norm() < 1e-12);
        }
    }
}
