//! Marked point patterns and their preprocessing.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkedPoint {
    pub x: f64,
    pub y: f64,
    pub type_id: usize,
    pub mark: f64,
}

/// Axis-aligned rectangular observation window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let w = Self {
            x_min,
            x_max,
            y_min,
            y_max,
        };
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || !(w.width() > 0.0) || !(w.height() > 0.0) {
            return Err(Error::DegenerateWindow {
                x_min,
                x_max,
                y_min,
                y_max,
            });
        }
        Ok(w)
    }

    pub const fn unit() -> Self {
        Self {
            x_min: 0.0,
            x_max: 1.0,
            y_min: 0.0,
            y_max: 1.0,
        }
    }

    /// Tight bounding box of the given coordinates.
    pub fn bounding_box(coords: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut iter = coords.into_iter();
        let (x0, y0) = iter.next().ok_or(Error::EmptyPattern)?;
        let (mut x_min, mut x_max, mut y_min, mut y_max) = (x0, x0, y0, y0);
        for (x, y) in iter {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        Self::new(x_min, x_max, y_min, y_max)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }

    pub fn is_unit(&self) -> bool {
        *self == Self::unit()
    }
}

/// Registry entry for one component process.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeInfo {
    pub name: String,
    pub count: usize,
    /// Mean of the marks as loaded. Demeaning keeps the original value here.
    pub mark_mean: f64,
}

/// Typed, marked locations in a rectangular window.
///
/// Values are immutable once built; every preprocessing step returns a new
/// pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedPointPattern {
    points: Vec<MarkedPoint>,
    window: Window,
    types: Vec<TypeInfo>,
    demeaned: bool,
}

impl MarkedPointPattern {
    /// Validates points against the window and builds the type registry.
    /// `type_names[i]` names `type_id == i`; every type needs at least one point.
    pub fn new(points: Vec<MarkedPoint>, window: Window, type_names: Vec<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let window = Window::new(window.x_min, window.x_max, window.y_min, window.y_max)?;
        let mut counts = alloc::vec![0usize; type_names.len()];
        let mut sums = alloc::vec![0.0f64; type_names.len()];
        for (index, p) in points.iter().enumerate() {
            for (field, v) in [("x", p.x), ("y", p.y), ("mark", p.mark)] {
                if !v.is_finite() {
                    return Err(Error::NonFinite { index, field });
                }
            }
            if !window.contains(p.x, p.y) {
                return Err(Error::PointOutsideWindow {
                    index,
                    x: p.x,
                    y: p.y,
                });
            }
            if p.type_id >= type_names.len() {
                return Err(Error::UnknownType(p.type_id));
            }
            counts[p.type_id] += 1;
            sums[p.type_id] += p.mark;
        }
        if let Some(empty) = counts.iter().position(|&c| c == 0) {
            return Err(Error::EmptyType(type_names[empty].clone()));
        }
        let types = type_names
            .into_iter()
            .zip(counts.iter().zip(&sums))
            .map(|(name, (&count, &sum))| TypeInfo {
                name,
                count,
                mark_mean: sum / count as f64,
            })
            .collect();
        Ok(Self {
            points,
            window,
            types,
            demeaned: false,
        })
    }

    /// Builds a pattern from labelled records, registering type labels in
    /// first-appearance order. With `window = None` the tight bounding box is used.
    pub fn from_labeled<S: AsRef<str>>(
        records: impl IntoIterator<Item = (f64, f64, S, f64)>,
        window: Option<Window>,
    ) -> Result<Self> {
        let mut ids: BTreeMap<String, usize> = BTreeMap::new();
        let mut names = Vec::new();
        let mut points = Vec::new();
        for (x, y, label, mark) in records {
            let label = label.as_ref();
            let type_id = match ids.get(label) {
                Some(&id) => id,
                None => {
                    let id = names.len();
                    ids.insert(String::from(label), id);
                    names.push(String::from(label));
                    id
                }
            };
            points.push(MarkedPoint { x, y, type_id, mark });
        }
        if points.is_empty() {
            return Err(Error::EmptyPattern);
        }
        for (index, p) in points.iter().enumerate() {
            for (field, v) in [("x", p.x), ("y", p.y)] {
                if !v.is_finite() {
                    return Err(Error::NonFinite { index, field });
                }
            }
        }
        let window = match window {
            Some(w) => w,
            None => Window::bounding_box(points.iter().map(|p| (p.x, p.y)))?,
        };
        Self::new(points, window, names)
    }

    pub fn points(&self) -> &[MarkedPoint] {
        &self.points
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn types(&self) -> &[TypeInfo] {
        &self.types
    }

    pub fn type_names(&self) -> Vec<String> {
        self.types.iter().map(|t| t.name.clone()).collect()
    }

    /// Number of component processes `d`.
    pub fn num_types(&self) -> usize {
        self.types.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_unit_square(&self) -> bool {
        self.window.is_unit()
    }

    pub fn is_demeaned(&self) -> bool {
        self.demeaned
    }

    pub fn points_of_type(&self, type_id: usize) -> impl Iterator<Item = &MarkedPoint> + '_ {
        self.points.iter().filter(move |p| p.type_id == type_id)
    }

    /// Number of points whose exact coordinates repeat an earlier point.
    pub fn duplicate_coordinates(&self) -> usize {
        let mut keys: Vec<(u64, u64)> = self
            .points
            .iter()
            .map(|p| (p.x.to_bits(), p.y.to_bits()))
            .collect();
        keys.sort_unstable();
        keys.windows(2).filter(|w| w[0] == w[1]).count()
    }

    /// Maps the shared window affinely onto `[0, 1]^2`.
    pub fn rescale_to_unit_square(&self) -> Self {
        if self.window.is_unit() {
            return self.clone();
        }
        let Window {
            x_min, y_min, ..
        } = self.window;
        let (lx, ly) = (self.window.width(), self.window.height());
        let points = self
            .points
            .iter()
            .map(|p| MarkedPoint {
                x: (p.x - x_min) / lx,
                y: (p.y - y_min) / ly,
                ..*p
            })
            .collect();
        Self {
            points,
            window: Window::unit(),
            types: self.types.clone(),
            demeaned: self.demeaned,
        }
    }

    /// Subtracts each type's mean mark. The registry keeps the original means.
    pub fn demean_marks(&self) -> Self {
        if self.demeaned {
            return self.clone();
        }
        let d = self.types.len();
        let mut points = self.points.clone();
        // Two passes: the second removes the rounding residue of the first.
        for _ in 0..2 {
            let mut sums = alloc::vec![0.0f64; d];
            for p in &points {
                sums[p.type_id] += p.mark;
            }
            for p in &mut points {
                p.mark -= sums[p.type_id] / self.types[p.type_id].count as f64;
            }
        }
        Self {
            points,
            window: self.window,
            types: self.types.clone(),
            demeaned: true,
        }
    }

    /// Multiplies every mark by `factor`.
    pub fn scale_marks(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.points {
            p.mark *= factor;
        }
        for t in &mut out.types {
            t.mark_mean *= factor;
        }
        out
    }

    /// Drops types with fewer than `min_n` points and reindexes the rest
    /// densely. Returns the names of the dropped types.
    pub fn filter_min_count(&self, min_n: usize) -> Result<(Self, Vec<String>)> {
        if min_n == 0 {
            return Err(Error::InvalidMinCount);
        }
        let mut remap = alloc::vec![None; self.types.len()];
        let mut types = Vec::new();
        let mut dropped = Vec::new();
        for (id, info) in self.types.iter().enumerate() {
            if info.count >= min_n {
                remap[id] = Some(types.len());
                types.push(info.clone());
            } else {
                dropped.push(info.name.clone());
            }
        }
        if types.is_empty() {
            return Err(Error::AllTypesDropped { min_n });
        }
        let points = self
            .points
            .iter()
            .filter_map(|p| {
                remap[p.type_id].map(|type_id| MarkedPoint { type_id, ..*p })
            })
            .collect();
        Ok((
            Self {
                points,
                window: self.window,
                types,
                demeaned: self.demeaned,
            },
            dropped,
        ))
    }
}
