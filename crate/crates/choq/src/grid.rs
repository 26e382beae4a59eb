//! Regular cubic grids in dimension 1–3, cell-centered scalar fields,
//! superlevel-set extraction, finite-difference gradients, and Lebesgue sums.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on `cells_per_axis^n`; a dense f64 buffer at this size is ~256 MiB.
pub const MAX_TOTAL_CELLS: usize = 1 << 25;

/// Regular grid with cubic cells. The bounding box is `[min, min + cells*h]`
/// per axis; samples are taken at cell centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    min: [f64; 3],
    cells: usize,
    h: f64,
}

impl Grid {
    /// Build a grid from a cubic bounding box. `bbox` holds `(min, max)` per axis.
    pub fn new(n: usize, bbox: &[(f64, f64)], cells: usize) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::BadDimension(n));
        }
        if bbox.len() != n {
            return Err(Error::invalid(format!(
                "bbox has {} axes, dimension is {}",
                bbox.len(),
                n
            )));
        }
        if cells < 2 {
            return Err(Error::TooFewCells(cells));
        }
        let extents: Vec<f64> = bbox.iter().map(|&(lo, hi)| hi - lo).collect();
        let e0 = extents[0];
        if !e0.is_finite() || e0 <= 0.0 {
            return Err(Error::NonCubicBbox(extents));
        }
        for &e in &extents {
            if !(e.is_finite() && e > 0.0) || (e - e0).abs() > 1e-9 * e0.abs() {
                return Err(Error::NonCubicBbox(extents));
            }
        }
        let total = cells.checked_pow(n as u32).ok_or(Error::CapacityExceeded {
            total: usize::MAX,
            budget: MAX_TOTAL_CELLS,
        })?;
        if total > MAX_TOTAL_CELLS {
            return Err(Error::CapacityExceeded {
                total,
                budget: MAX_TOTAL_CELLS,
            });
        }
        let mut min = [0.0; 3];
        for (k, &(lo, _)) in bbox.iter().enumerate() {
            min[k] = lo;
        }
        Ok(Grid {
            n,
            min,
            cells,
            h: e0 / cells as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells
    }

    pub fn total_cells(&self) -> usize {
        self.cells.pow(self.n as u32)
    }

    /// Cell width (one value; cells are cubic).
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn axis_min(&self, axis: usize) -> f64 {
        self.min[axis]
    }

    pub fn axis_max(&self, axis: usize) -> f64 {
        self.min[axis] + self.cells as f64 * self.h
    }

    /// Cell volume `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.n as i32)
    }

    pub fn multi_to_index(&self, m: [usize; 3]) -> usize {
        match self.n {
            1 => m[0],
            2 => m[1] * self.cells + m[0],
            _ => (m[2] * self.cells + m[1]) * self.cells + m[0],
        }
    }

    pub fn index_to_multi(&self, idx: usize) -> [usize; 3] {
        match self.n {
            1 => [idx, 0, 0],
            2 => [idx % self.cells, idx / self.cells, 0],
            _ => [
                idx % self.cells,
                (idx / self.cells) % self.cells,
                idx / (self.cells * self.cells),
            ],
        }
    }

    /// Coordinates of the center of cell `idx`.
    pub fn cell_center(&self, idx: usize) -> [f64; 3] {
        let m = self.index_to_multi(idx);
        let mut c = [0.0; 3];
        for k in 0..self.n {
            c[k] = self.min[k] + (m[k] as f64 + 0.5) * self.h;
        }
        c
    }

    /// Lower corner of cell `idx`.
    pub fn cell_low_corner(&self, idx: usize) -> [f64; 3] {
        let m = self.index_to_multi(idx);
        let mut c = [0.0; 3];
        for k in 0..self.n {
            c[k] = self.min[k] + m[k] as f64 * self.h;
        }
        c
    }

    pub fn is_boundary_cell(&self, idx: usize) -> bool {
        let m = self.index_to_multi(idx);
        (0..self.n).any(|k| m[k] == 0 || m[k] == self.cells - 1)
    }

    /// Iterate all cell indices.
    pub fn indices(&self) -> std::ops::Range<usize> {
        0..self.total_cells()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradientSource {
    Analytic,
    FiniteDifference,
}

/// Non-negative scalar field sampled at cell centers, with compact support
/// (the outermost cell layer must vanish) and an optional per-cell gradient
/// magnitude `|∇u|`.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
    gradient: Option<(Vec<f64>, GradientSource)>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        validate_values(&grid, &values)?;
        Ok(ScalarField {
            grid,
            values,
            gradient: None,
        })
    }

    pub fn with_gradient(
        grid: Grid,
        values: Vec<f64>,
        gradient: Vec<f64>,
        source: GradientSource,
    ) -> Result<Self> {
        validate_values(&grid, &values)?;
        if gradient.len() != values.len() {
            return Err(Error::LengthMismatch {
                got: gradient.len(),
                want: values.len(),
            });
        }
        for (i, &g) in gradient.iter().enumerate() {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::NegativeValue { index: i, value: g });
            }
        }
        Ok(ScalarField {
            grid,
            values,
            gradient: Some((gradient, source)),
        })
    }

    /// Sample `f` (and optionally `|∇f|`) at every cell center.
    pub fn from_fn(
        grid: Grid,
        f: impl Fn([f64; 3]) -> f64,
        grad: Option<impl Fn([f64; 3]) -> f64>,
    ) -> Result<Self> {
        let values: Vec<f64> = grid.indices().map(|i| f(grid.cell_center(i))).collect();
        match grad {
            None => ScalarField::new(grid, values),
            Some(g) => {
                let gv: Vec<f64> = grid.indices().map(|i| g(grid.cell_center(i))).collect();
                ScalarField::with_gradient(grid, values, gv, GradientSource::Analytic)
            }
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gradient_values(&self) -> Option<&[f64]> {
        self.gradient.as_ref().map(|(g, _)| g.as_slice())
    }

    pub fn gradient_source(&self) -> Option<GradientSource> {
        self.gradient.as_ref().map(|&(_, s)| s)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Strict superlevel set `{x : f(x) > t}`.
    pub fn superlevel(&self, t: f64) -> DiscreteSet {
        let cells = self
            .grid
            .indices()
            .filter(|&i| self.values[i] > t)
            .collect();
        DiscreteSet {
            grid: self.grid,
            cells,
        }
    }

    /// Closed superlevel set `{x : f(x) ≥ t}`. Kept separate from
    /// [`superlevel`](Self::superlevel): layer cakes use the strict set, the
    /// superlevel inequality the closed one, and they are never interchanged.
    pub fn superlevel_closed(&self, t: f64) -> DiscreteSet {
        let cells = self
            .grid
            .indices()
            .filter(|&i| self.values[i] >= t)
            .collect();
        DiscreteSet {
            grid: self.grid,
            cells,
        }
    }

    /// `Σ values · h^n`.
    pub fn lebesgue_integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// `Σ |∇f| · h^n`, requires a gradient.
    pub fn gradient_lebesgue_integral(&self) -> Result<f64> {
        let (g, _) = self
            .gradient
            .as_ref()
            .ok_or_else(|| Error::invalid("field carries no gradient"))?;
        Ok(g.iter().sum::<f64>() * self.grid.cell_volume())
    }

    /// The gradient magnitude as a field of its own (for Choquet integrals of
    /// `|∇u|^p`). Fails if no gradient is attached or its support touches the
    /// grid boundary.
    pub fn gradient_field(&self) -> Result<ScalarField> {
        let (g, _) = self
            .gradient
            .as_ref()
            .ok_or_else(|| Error::invalid("field carries no gradient"))?;
        ScalarField::new(self.grid, g.clone())
    }

    /// Pointwise power `f^alpha` (exact on samples; gradient is dropped).
    pub fn powered(&self, alpha: f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| v.powf(alpha)).collect(),
            gradient: None,
        }
    }

    /// Pointwise scaling `λ·f` (λ ≥ 0); the gradient scales with it.
    pub fn scaled(&self, lambda: f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| lambda * v).collect(),
            gradient: self
                .gradient
                .as_ref()
                .map(|(g, s)| (g.iter().map(|&v| lambda * v).collect(), *s)),
        }
    }

    /// Pointwise sum on a shared grid. Gradient magnitudes do not add, so the
    /// result carries none; generators that know the vector gradients attach
    /// their own.
    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        ScalarField::new(self.grid, values)
    }

    /// Sorted distinct positive sample values.
    pub fn distinct_positive_values(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = self.values.iter().cloned().filter(|&v| v > 0.0).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        vals
    }
}

fn validate_values(grid: &Grid, values: &[f64]) -> Result<()> {
    if values.len() != grid.total_cells() {
        return Err(Error::LengthMismatch {
            got: values.len(),
            want: grid.total_cells(),
        });
    }
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::NegativeValue { index: i, value: v });
        }
    }
    for i in grid.indices() {
        if grid.is_boundary_cell(i) && values[i] != 0.0 {
            return Err(Error::NotCompactlySupported {
                index: i,
                value: values[i],
            });
        }
    }
    Ok(())
}

/// Central differences in the interior, one-sided at the grid boundary;
/// magnitude is the Euclidean norm of the per-axis differences. Returns the
/// same field with the computed gradient attached.
pub fn fd_gradient(f: &ScalarField) -> ScalarField {
    let grid = *f.grid();
    let c = grid.cells_per_axis();
    let h = grid.h();
    let v = f.values();
    let mut mag = vec![0.0f64; v.len()];
    for idx in grid.indices() {
        let m = grid.index_to_multi(idx);
        let mut sq = 0.0;
        for axis in 0..grid.n() {
            let stride = c.pow(axis as u32);
            let i = m[axis];
            let d = if i == 0 {
                (v[idx + stride] - v[idx]) / h
            } else if i == c - 1 {
                (v[idx] - v[idx - stride]) / h
            } else {
                (v[idx + stride] - v[idx - stride]) / (2.0 * h)
            };
            sq += d * d;
        }
        mag[idx] = sq.sqrt();
    }
    ScalarField {
        grid,
        values: f.values().to_vec(),
        gradient: Some((mag, GradientSource::FiniteDifference)),
    }
}

/// Finite union of grid cells, stored as sorted deduplicated indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSet {
    grid: Grid,
    cells: Vec<usize>,
}

impl DiscreteSet {
    pub fn new(grid: Grid, mut cells: Vec<usize>) -> Result<Self> {
        let total = grid.total_cells();
        for &c in &cells {
            if c >= total {
                return Err(Error::CellOutOfRange { index: c, total });
            }
        }
        cells.sort_unstable();
        cells.dedup();
        Ok(DiscreteSet { grid, cells })
    }

    pub fn empty(grid: Grid) -> Self {
        DiscreteSet {
            grid,
            cells: Vec::new(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.cells.binary_search(&idx).is_ok()
    }

    pub fn is_subset_of(&self, other: &DiscreteSet) -> bool {
        self.grid == other.grid && self.cells.iter().all(|&c| other.contains(c))
    }

    pub fn union(&self, other: &DiscreteSet) -> Result<DiscreteSet> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let mut cells = self.cells.clone();
        cells.extend_from_slice(&other.cells);
        DiscreteSet::new(self.grid, cells)
    }

    /// Lebesgue measure `|E| = #cells · h^n`.
    pub fn measure(&self) -> f64 {
        self.cells.len() as f64 * self.grid.cell_volume()
    }

    /// Per-axis index range `[lo, hi]` of the member cells.
    pub fn index_bounds(&self) -> Option<([usize; 3], [usize; 3])> {
        if self.cells.is_empty() {
            return None;
        }
        let mut lo = [usize::MAX; 3];
        let mut hi = [0usize; 3];
        for &c in &self.cells {
            let m = self.grid.index_to_multi(c);
            for k in 0..self.grid.n() {
                lo[k] = lo[k].min(m[k]);
                hi[k] = hi[k].max(m[k]);
            }
        }
        for k in self.grid.n()..3 {
            lo[k] = 0;
            hi[k] = 0;
        }
        Some((lo, hi))
    }

    /// Diagonal of the bounding box of the member cells (outer corners);
    /// an upper bound for the diameter of the set.
    pub fn bbox_diameter(&self) -> f64 {
        match self.index_bounds() {
            None => 0.0,
            Some((lo, hi)) => {
                let h = self.grid.h();
                let mut sq = 0.0;
                for k in 0..self.grid.n() {
                    let e = (hi[k] - lo[k] + 1) as f64 * h;
                    sq += e * e;
                }
                sq.sqrt()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_grid_2d(cells: usize) -> Grid {
        Grid::new(2, &[(-2.0, 2.0), (-2.0, 2.0)], cells).unwrap()
    }

    #[test]
    fn grid_cell_width() {
        let g = unit_grid_2d(128);
        assert_eq!(g.h(), 4.0 / 128.0);
        let g1 = Grid::new(1, &[(0.0, 1.0)], 2).unwrap();
        assert_eq!(g1.h(), 0.5);
        let g3 = Grid::new(3, &[(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)], 64).unwrap();
        assert_eq!(g3.h(), 2.0 / 64.0);
    }

    #[test]
    fn grid_rejects_non_cubic_bbox() {
        let err = Grid::new(2, &[(-2.0, 2.0), (-1.0, 2.0)], 16).unwrap_err();
        assert!(matches!(err, Error::NonCubicBbox(_)));
    }

    #[test]
    fn grid_rejects_oversized_request() {
        let err = Grid::new(3, &[(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)], 512).unwrap_err();
        assert!(matches!(err, Error::CapacityExceeded { .. }));
    }

    #[test]
    fn index_round_trip() {
        let g = Grid::new(3, &[(0.0, 1.0), (0.0, 1.0), (0.0, 1.0)], 8).unwrap();
        for idx in [0usize, 1, 7, 8, 63, 64, 511] {
            assert_eq!(g.multi_to_index(g.index_to_multi(idx)), idx);
        }
    }

    fn block_indicator(grid: Grid, lo: usize, hi: usize, scale: f64) -> ScalarField {
        let values = grid
            .indices()
            .map(|i| {
                let m = grid.index_to_multi(i);
                let inside = (0..grid.n()).all(|k| m[k] >= lo && m[k] < hi);
                if inside {
                    scale
                } else {
                    0.0
                }
            })
            .collect();
        ScalarField::new(grid, values).unwrap()
    }

    #[test]
    fn superlevel_at_max_is_empty() {
        let f = block_indicator(unit_grid_2d(16), 4, 8, 2.0);
        assert!(f.superlevel(f.max_value()).is_empty());
    }

    #[test]
    fn superlevel_of_scaled_indicator_is_the_block() {
        let g = unit_grid_2d(16);
        let f = block_indicator(g, 4, 8, 2.0);
        let s = f.superlevel(1.0);
        assert_eq!(s.len(), 16);
        for &c in s.cells() {
            let m = g.index_to_multi(c);
            assert!((4..8).contains(&m[0]) && (4..8).contains(&m[1]));
        }
    }

    #[test]
    fn superlevel_nesting_is_monotone() {
        let g = unit_grid_2d(24);
        let f = ScalarField::from_fn(
            g,
            |x| {
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                (1.0 - r).max(0.0)
            },
            None::<fn([f64; 3]) -> f64>,
        )
        .unwrap();
        let mut prev = f.superlevel(0.0);
        for k in 1..=10 {
            let cur = f.superlevel(k as f64 / 10.0);
            assert!(cur.is_subset_of(&prev));
            prev = cur;
        }
    }

    #[test]
    fn lebesgue_of_zero_field_is_zero() {
        let g = unit_grid_2d(8);
        let f = ScalarField::new(g, vec![0.0; g.total_cells()]).unwrap();
        assert_eq!(f.lebesgue_integral(), 0.0);
    }

    #[test]
    fn lebesgue_counts_indicator_cells() {
        let g = unit_grid_2d(16);
        let f = block_indicator(g, 4, 8, 1.0);
        let expect = 16.0 * g.cell_volume();
        assert!((f.lebesgue_integral() - expect).abs() < 1e-12);
    }

    #[test]
    fn lebesgue_matches_layer_cake_sum() {
        let g = unit_grid_2d(24);
        let f = ScalarField::from_fn(
            g,
            |x| {
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                (1.5 - r).max(0.0)
            },
            None::<fn([f64; 3]) -> f64>,
        )
        .unwrap();
        let mut levels = f.distinct_positive_values();
        levels.insert(0, 0.0);
        let mut cake = 0.0;
        for w in levels.windows(2) {
            cake += (w[1] - w[0]) * f.superlevel(w[0]).measure();
        }
        assert!((cake - f.lebesgue_integral()).abs() < 1e-9 * f.lebesgue_integral());
    }

    #[test]
    fn lebesgue_is_linear_and_monotone() {
        let g = unit_grid_2d(16);
        let f = block_indicator(g, 4, 10, 1.0);
        let gfield = block_indicator(g, 5, 9, 2.0);
        let sum = f.add(&gfield).unwrap();
        let lhs = sum.lebesgue_integral();
        let rhs = f.lebesgue_integral() + gfield.lebesgue_integral();
        assert!((lhs - rhs).abs() < 1e-12);
        assert!(f.scaled(3.0).lebesgue_integral() >= f.lebesgue_integral());
    }

    #[test]
    fn fd_gradient_of_zero_field_is_zero() {
        let g = unit_grid_2d(8);
        let f = ScalarField::new(g, vec![0.0; g.total_cells()]).unwrap();
        let fd = fd_gradient(&f);
        assert!(fd.gradient_values().unwrap().iter().all(|&v| v == 0.0));
        assert_eq!(fd.gradient_source(), Some(GradientSource::FiniteDifference));
    }

    #[test]
    fn fd_gradient_is_exact_on_a_linear_ramp() {
        let g = Grid::new(1, &[(-2.0, 2.0)], 64).unwrap();
        let f = ScalarField::from_fn(g, |x| (1.0 - x[0].abs()).max(0.0), None::<fn([f64; 3]) -> f64>)
            .unwrap();
        let fd = fd_gradient(&f);
        let mag = fd.gradient_values().unwrap();
        let h = g.h();
        for i in g.indices() {
            let x = g.cell_center(i);
            // stay away from the kinks at |x| in {0, 1}
            if x[0].abs() > 2.0 * h && (x[0].abs() - 1.0).abs() > 2.0 * h {
                let want = if x[0].abs() < 1.0 { 1.0 } else { 0.0 };
                assert!(
                    (mag[i] - want).abs() < 1e-9,
                    "at {:?} got {} want {}",
                    x,
                    mag[i],
                    want
                );
            }
        }
    }

    #[test]
    fn compact_support_is_enforced() {
        let g = unit_grid_2d(8);
        let mut values = vec![0.0; g.total_cells()];
        values[0] = 1.0; // corner cell
        assert!(matches!(
            ScalarField::new(g, values),
            Err(Error::NotCompactlySupported { .. })
        ));
    }

    #[test]
    fn set_deduplicates_and_sorts() {
        let g = unit_grid_2d(8);
        let s = DiscreteSet::new(g, vec![5, 3, 5, 9, 3]).unwrap();
        assert_eq!(s.cells(), &[3, 5, 9]);
        assert!(s.contains(5));
        assert!(!s.contains(4));
    }

    #[test]
    fn set_rejects_out_of_range() {
        let g = unit_grid_2d(8);
        assert!(matches!(
            DiscreteSet::new(g, vec![64 * 64]),
            Err(Error::CellOutOfRange { .. })
        ));
    }
}
