//! Generators for the extremal objects the verifier runs on: radial tents and
//! bumps, four-corner Cantor iterates with capacitary collar functions, value
//! truncation, and the staircase partition of a monotone sampled function.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{DiscreteSet, GradientSource, Grid, ScalarField};

/// Spiked tent in the plane: height `1/r` on `B(0,r)`, radially linear down
/// to `0` at `|x| = 2r`, gradient `1/r²` on the open annulus.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TentSpec {
    pub r: f64,
    pub cells: usize,
}

impl TentSpec {
    pub fn new(r: f64, cells: usize) -> Self {
        TentSpec { r, cells }
    }
}

pub fn tent2d(spec: &TentSpec) -> Result<ScalarField> {
    let r = spec.r;
    if !(0.0 < r && r < 1.0) {
        return Err(Error::invalid(format!("tent needs 0 < r < 1, got {r}")));
    }
    let half = 4.0 * r;
    let grid = Grid::new(2, &[(-half, half), (-half, half)], spec.cells)?;
    if grid.h() > r / 8.0 {
        return Err(Error::UnderResolved(format!(
            "tent r = {r} needs h ≤ r/8, grid has h = {}",
            grid.h()
        )));
    }
    ScalarField::from_fn(
        grid,
        |x| {
            let s = (x[0] * x[0] + x[1] * x[1]).sqrt();
            if s <= r {
                1.0 / r
            } else if s < 2.0 * r {
                (2.0 * r - s) / (r * r)
            } else {
                0.0
            }
        },
        Some(|x: [f64; 3]| {
            let s = (x[0] * x[0] + x[1] * x[1]).sqrt();
            if s > r && s < 2.0 * r {
                1.0 / (r * r)
            } else {
                0.0
            }
        }),
    )
}

/// Cone `u(x) = max(0, 1 − |x|/R)` with gradient `1/R` inside the support;
/// its superlevel `{u > t}` is the ball of radius `R·(1−t)`.
pub fn radial_bump(n: usize, big_r: f64, grid: Grid) -> Result<ScalarField> {
    if grid.n() != n {
        return Err(Error::GridMismatch);
    }
    if big_r <= 0.0 {
        return Err(Error::invalid("bump radius must be positive"));
    }
    if grid.h() > big_r / 4.0 {
        return Err(Error::UnderResolved(format!(
            "bump R = {big_r} needs h ≤ R/4, grid has h = {}",
            grid.h()
        )));
    }
    ScalarField::from_fn(
        grid,
        move |x| {
            let s = norm(x, n);
            (1.0 - s / big_r).max(0.0)
        },
        Some(move |x: [f64; 3]| {
            let s = norm(x, n);
            if s < big_r {
                1.0 / big_r
            } else {
                0.0
            }
        }),
    )
}

fn norm(x: [f64; 3], n: usize) -> f64 {
    x[..n].iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Cells whose centers lie strictly inside the ball.  The requested center
/// snaps to the nearest cell center so the discretization sits symmetrically
/// on the sample lattice (and, for the unit ball, keeps the covered area at
/// or below the continuum area).
pub fn ball_set(grid: Grid, center: &[f64], radius: f64) -> Result<DiscreteSet> {
    let n = grid.n();
    if center.len() != n {
        return Err(Error::invalid("ball center dimension mismatch"));
    }
    if radius <= 0.0 {
        return Err(Error::invalid("ball radius must be positive"));
    }
    let h = grid.h();
    let mut snapped = [0.0f64; 3];
    for k in 0..n {
        let i = ((center[k] - grid.axis_min(k)) / h - 0.5).round();
        let i = i.clamp(0.0, (grid.cells_per_axis() - 1) as f64);
        snapped[k] = grid.axis_min(k) + (i + 0.5) * h;
    }
    let cells = grid
        .indices()
        .filter(|&idx| {
            let c = grid.cell_center(idx);
            let mut sq = 0.0;
            for k in 0..n {
                let d = c[k] - snapped[k];
                sq += d * d;
            }
            sq.sqrt() < radius
        })
        .collect();
    DiscreteSet::new(grid, cells)
}

/// Random sum of cones with an exact vector-summed gradient magnitude.
/// Supports stay well inside the grid so gradients vanish near the boundary.
pub fn bump_sum(grid: Grid, count: usize, rng: &mut impl Rng) -> Result<ScalarField> {
    let n = grid.n();
    let half = 0.5 * (grid.axis_max(0) - grid.axis_min(0));
    let margin = 0.9 * half;
    let mut bumps = Vec::with_capacity(count);
    for _ in 0..count {
        let radius = rng.gen_range(0.15 * half..0.35 * half);
        let height: f64 = rng.gen_range(0.5..1.5);
        let mut center = [0.0f64; 3];
        for c in center.iter_mut().take(n) {
            let span = margin - radius;
            *c = rng.gen_range(-span..span);
        }
        bumps.push((center, radius, height));
    }
    let mut values = vec![0.0f64; grid.total_cells()];
    let mut grad = vec![0.0f64; grid.total_cells()];
    for idx in grid.indices() {
        let x = grid.cell_center(idx);
        let mut v = 0.0;
        let mut gvec = [0.0f64; 3];
        for &(c, r, a) in &bumps {
            let mut d = [0.0f64; 3];
            for k in 0..n {
                d[k] = x[k] - c[k];
            }
            let s = norm(d, n);
            if s < r && s > 0.0 {
                v += a * (1.0 - s / r);
                for k in 0..n {
                    gvec[k] -= a / r * d[k] / s;
                }
            } else if s == 0.0 {
                v += a;
            }
        }
        values[idx] = v;
        grad[idx] = norm(gvec, n);
    }
    ScalarField::with_gradient(grid, values, grad, GradientSource::Analytic)
}

/// Four-corner Cantor iterate: level `k` keeps `4^k` axis-aligned squares of
/// side `4^{-k}/k` in the plane, so the total side-length sum is `1/k`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CantorSpec {
    pub level: u32,
    /// Cells per axis; `None` picks the coarsest grid resolving the squares.
    pub cells: Option<usize>,
}

impl CantorSpec {
    pub fn new(level: u32) -> Self {
        CantorSpec { level, cells: None }
    }
}

pub fn cantor_side(level: u32) -> f64 {
    0.25f64.powi(level as i32) / level as f64
}

/// Collar width for the capacitary function at this level.
pub fn cantor_collar(level: u32) -> f64 {
    let l = cantor_side(level);
    let parent = if level == 1 {
        1.0
    } else {
        cantor_side(level - 1)
    };
    l.min(0.45 * (parent - 2.0 * l))
}

struct CantorGeometry {
    lows: Vec<[f64; 2]>,
    side: f64,
    collar: f64,
}

fn cantor_geometry(level: u32) -> Result<CantorGeometry> {
    if level == 0 {
        return Err(Error::invalid("cantor level must be ≥ 1"));
    }
    let mut lows: Vec<[f64; 2]> = vec![[-0.5, -0.5]];
    let mut side = 1.0f64;
    for j in 1..=level {
        let child = cantor_side(j);
        let mut next = Vec::with_capacity(lows.len() * 4);
        for lo in &lows {
            for dx in [0.0, side - child] {
                for dy in [0.0, side - child] {
                    next.push([lo[0] + dx, lo[1] + dy]);
                }
            }
        }
        lows = next;
        side = child;
    }
    let collar = cantor_collar(level);
    // siblings inside one parent are the closest pair
    let min_gap = if level == 1 {
        1.0 - 2.0 * side
    } else {
        cantor_side(level - 1) - 2.0 * side
    };
    if 2.0 * collar >= min_gap {
        return Err(Error::invalid(format!(
            "collars of width {collar} overlap across a gap of {min_gap}"
        )));
    }
    Ok(CantorGeometry {
        lows,
        side,
        collar,
    })
}

fn cantor_grid(spec: &CantorSpec) -> Result<Grid> {
    let side = cantor_side(spec.level);
    let cells = match spec.cells {
        Some(c) => c,
        None => {
            // h ≤ side/2 with 10% headroom, rounded up to a multiple of 32
            let raw = (1.5 / (side / 2.0) * 1.1).ceil() as usize;
            raw.div_ceil(32) * 32
        }
    };
    let grid = Grid::new(2, &[(-0.75, 0.75), (-0.75, 0.75)], cells)?;
    if grid.h() > side / 2.0 {
        return Err(Error::UnderResolved(format!(
            "cantor level {} has squares of side {side}; h = {} does not resolve them",
            spec.level,
            grid.h()
        )));
    }
    Ok(grid)
}

/// Cells whose centers lie in the union of the level-`k` squares.
pub fn cantor_set(spec: &CantorSpec) -> Result<(Grid, DiscreteSet)> {
    let geo = cantor_geometry(spec.level)?;
    let grid = cantor_grid(spec)?;
    let h = grid.h();
    let cells_axis = grid.cells_per_axis() as i64;
    let mut cells = Vec::new();
    for lo in &geo.lows {
        let i0 = (((lo[0] - grid.axis_min(0)) / h).floor() as i64).max(0);
        let i1 = ((((lo[0] + geo.side) - grid.axis_min(0)) / h).ceil() as i64).min(cells_axis);
        let j0 = (((lo[1] - grid.axis_min(1)) / h).floor() as i64).max(0);
        let j1 = ((((lo[1] + geo.side) - grid.axis_min(1)) / h).ceil() as i64).min(cells_axis);
        for j in j0..j1 {
            for i in i0..i1 {
                let idx = grid.multi_to_index([i as usize, j as usize, 0]);
                let c = grid.cell_center(idx);
                if c[0] >= lo[0]
                    && c[0] <= lo[0] + geo.side
                    && c[1] >= lo[1]
                    && c[1] <= lo[1] + geo.side
                {
                    cells.push(idx);
                }
            }
        }
    }
    Ok((grid, DiscreteSet::new(grid, cells)?))
}

/// Capacitary collar function: `1` on every level-`k` square, decaying
/// linearly (in sup-norm distance) to `0` across a collar of width
/// [`cantor_collar`], so `∫|∇φ| dx = O(4^k·l_k) = O(1/k)`.
pub fn cantor_capacitary(spec: &CantorSpec) -> Result<ScalarField> {
    let geo = cantor_geometry(spec.level)?;
    let grid = cantor_grid(spec)?;
    let h = grid.h();
    let w = geo.collar;
    let cells_axis = grid.cells_per_axis() as i64;
    let mut values = vec![0.0f64; grid.total_cells()];
    for lo in &geo.lows {
        let i0 = (((lo[0] - w - grid.axis_min(0)) / h).floor() as i64).max(0);
        let i1 = ((((lo[0] + geo.side + w) - grid.axis_min(0)) / h).ceil() as i64).min(cells_axis);
        let j0 = (((lo[1] - w - grid.axis_min(1)) / h).floor() as i64).max(0);
        let j1 = ((((lo[1] + geo.side + w) - grid.axis_min(1)) / h).ceil() as i64).min(cells_axis);
        for j in j0..j1 {
            for i in i0..i1 {
                let idx = grid.multi_to_index([i as usize, j as usize, 0]);
                let c = grid.cell_center(idx);
                let dx = (lo[0] - c[0]).max(c[0] - (lo[0] + geo.side)).max(0.0);
                let dy = (lo[1] - c[1]).max(c[1] - (lo[1] + geo.side)).max(0.0);
                let d = dx.max(dy); // sup-norm distance to the square
                let v = (1.0 - d / w).clamp(0.0, 1.0);
                if v > values[idx] {
                    values[idx] = v;
                }
            }
        }
    }
    let grad: Vec<f64> = values
        .iter()
        .map(|&v| if v > 0.0 && v < 1.0 { 1.0 / w } else { 0.0 })
        .collect();
    ScalarField::with_gradient(grid, values, grad, GradientSource::Analytic)
}

/// Value truncation `ψ = clamp(f − a, 0, b − a)`; the gradient survives
/// exactly on the band `{a < f < b}` and vanishes elsewhere.
pub fn truncate(f: &ScalarField, a: f64, b: f64) -> Result<ScalarField> {
    if !(0.0 <= a && a < b) {
        return Err(Error::invalid(format!(
            "truncation needs 0 ≤ a < b, got a = {a}, b = {b}"
        )));
    }
    let values: Vec<f64> = f
        .values()
        .iter()
        .map(|&v| (v - a).clamp(0.0, b - a))
        .collect();
    match (f.gradient_values(), f.gradient_source()) {
        (Some(g), Some(src)) => {
            let grad: Vec<f64> = f
                .values()
                .iter()
                .zip(g)
                .map(|(&v, &gv)| if v > a && v < b { gv } else { 0.0 })
                .collect();
            ScalarField::with_gradient(*f.grid(), values, grad, src)
        }
        _ => ScalarField::new(*f.grid(), values),
    }
}

/// Increasing thresholds along which a sampled monotone function varies by at
/// most `epsilon` per step.
#[derive(Debug, Clone, Serialize)]
pub struct StaircasePartition {
    pub points: Vec<f64>,
    pub epsilon: f64,
    pub sup: f64,
}

impl StaircasePartition {
    /// Exhaustive per-sample certificate: for every sample `t` in
    /// `(points[i-1], points[i]]`, `|F(points[i]) − F(t)| ≤ epsilon`.
    pub fn certify(&self, ts: &[f64], fs: &[f64]) -> (bool, f64) {
        let mut max_dev = 0.0f64;
        for w in self.points.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let f_hi = match ts.iter().position(|&t| t == hi) {
                Some(j) => fs[j],
                None => return (false, f64::INFINITY),
            };
            for (j, &t) in ts.iter().enumerate() {
                if t > lo && t <= hi {
                    max_dev = max_dev.max((f_hi - fs[j]).abs());
                }
            }
        }
        (max_dev <= self.epsilon, max_dev)
    }
}

/// Greedy staircase sweep over samples `(ts, fs)` of a non-decreasing
/// function on `[0, s)`: each new point is the last sample whose value stays
/// within `epsilon` of the value just after the previous point.
pub fn staircase(ts: &[f64], fs: &[f64], epsilon: f64, s: f64) -> Result<StaircasePartition> {
    if ts.len() != fs.len() || ts.is_empty() {
        return Err(Error::invalid("need equally many sample points and values"));
    }
    if epsilon <= 0.0 {
        return Err(Error::invalid("epsilon must be positive"));
    }
    for w in ts.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::invalid("sample abscissas must be strictly increasing"));
        }
    }
    if ts[0] < 0.0 || *ts.last().unwrap() >= s {
        return Err(Error::invalid("samples must lie in [0, s)"));
    }
    for w in fs.windows(2) {
        if w[0] > w[1] {
            return Err(Error::invalid("sample values must be non-decreasing"));
        }
    }
    let mut points = vec![0.0];
    let mut i = if ts[0] == 0.0 { 1 } else { 0 };
    while i < ts.len() {
        let reference = fs[i];
        let mut j = i;
        while j + 1 < ts.len() && fs[j + 1] <= reference + epsilon {
            j += 1;
        }
        points.push(ts[j]);
        i = j + 1;
    }
    Ok(StaircasePartition {
        points,
        epsilon,
        sup: s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn tent_gradient_integral_is_three_pi_and_r_free() {
        // area(annulus)·(1/r²) = 3πr²/r² = 3π, independently of r
        let mut vals = Vec::new();
        for r in [0.25, 0.125] {
            let f = tent2d(&TentSpec::new(r, 128)).unwrap();
            let gi = f.gradient_lebesgue_integral().unwrap();
            assert!(
                (gi - 3.0 * PI).abs() < 0.05 * 3.0 * PI,
                "r = {r}: ∫|∇u| = {gi}"
            );
            vals.push(gi);
        }
        assert!((vals[0] - vals[1]).abs() < 0.05 * vals[0]);
    }

    #[test]
    fn tent_support_is_the_double_ball() {
        let r = 0.25;
        let f = tent2d(&TentSpec::new(r, 128)).unwrap();
        let sup = f.superlevel(0.0);
        let grid = f.grid();
        for idx in grid.indices() {
            let c = grid.cell_center(idx);
            let inside = (c[0] * c[0] + c[1] * c[1]).sqrt() < 2.0 * r;
            assert_eq!(sup.contains(idx), inside);
        }
    }

    #[test]
    fn tent_rejects_unresolved_radius() {
        assert!(matches!(
            tent2d(&TentSpec::new(0.5, 16)),
            Err(Error::UnderResolved(_))
        ));
    }

    #[test]
    fn bump_closed_forms() {
        let grid = Grid::new(2, &[(-2.0, 2.0), (-2.0, 2.0)], 256).unwrap();
        let f = radial_bump(2, 1.0, grid).unwrap();
        // ∫ u dx = ∫₀¹ (1−ρ)·2πρ dρ = π/3
        let lebesgue = f.lebesgue_integral();
        assert!(
            (lebesgue - PI / 3.0).abs() < 0.02 * (PI / 3.0),
            "∫u = {lebesgue}"
        );
        // ∫ |∇u| dx = π·R²·(1/R) = π
        let gi = f.gradient_lebesgue_integral().unwrap();
        assert!((gi - PI).abs() < 0.02 * PI, "∫|∇u| = {gi}");
        // sup norm
        assert!((f.max_value() - 1.0).abs() < 0.02);
    }

    #[test]
    fn bump_superlevel_is_a_ball() {
        let grid = Grid::new(2, &[(-2.0, 2.0), (-2.0, 2.0)], 128).unwrap();
        let f = radial_bump(2, 1.0, grid).unwrap();
        let s = f.superlevel(0.5);
        for idx in grid.indices() {
            let c = grid.cell_center(idx);
            let inside = (c[0] * c[0] + c[1] * c[1]).sqrt() < 0.5;
            assert_eq!(s.contains(idx), inside, "cell {idx}");
        }
    }

    #[test]
    fn fd_gradient_tracks_analytic_on_smooth_cells() {
        let grid = Grid::new(2, &[(-2.0, 2.0), (-2.0, 2.0)], 128).unwrap();
        let f = radial_bump(2, 1.0, grid).unwrap();
        let fd = crate::grid::fd_gradient(&f);
        let (ana, num) = (f.gradient_values().unwrap(), fd.gradient_values().unwrap());
        let h = grid.h();
        let mut worst = 0.0f64;
        for idx in grid.indices() {
            let c = grid.cell_center(idx);
            let s = (c[0] * c[0] + c[1] * c[1]).sqrt();
            // stay away from the kinks at s = 0 and s = R
            if s > 4.0 * h && (s - 1.0).abs() > 4.0 * h && s < 1.0 {
                worst = worst.max((ana[idx] - num[idx]).abs());
            }
        }
        assert!(worst < 10.0 * h, "max deviation {worst} at h = {h}");
    }

    #[test]
    fn cantor_counts_and_sides() {
        let (_, e1) = cantor_set(&CantorSpec::new(1)).unwrap();
        assert!(!e1.is_empty());
        assert_eq!(cantor_side(1), 0.25);
        assert_eq!(cantor_side(3), 0.25f64.powi(3) / 3.0);
        // 4^k · l_k = 1/k
        assert!((4f64.powi(3) * cantor_side(3) - 1.0 / 3.0).abs() < 1e-12);
        let geo = cantor_geometry(3).unwrap();
        assert_eq!(geo.lows.len(), 64);
    }

    #[test]
    fn cantor_capacitary_is_one_on_squares() {
        let spec = CantorSpec::new(1);
        let phi = cantor_capacitary(&spec).unwrap();
        let (_, e) = cantor_set(&spec).unwrap();
        for &c in e.cells() {
            assert_eq!(phi.values()[c], 1.0);
        }
    }

    #[test]
    fn cantor_gradient_integral_decays() {
        // closed form is 4^k·((l+2w)² − l²)/w = O(1/k)
        let g2 = cantor_capacitary(&CantorSpec::new(2))
            .unwrap()
            .gradient_lebesgue_integral()
            .unwrap();
        let g4 = cantor_capacitary(&CantorSpec::new(4))
            .unwrap()
            .gradient_lebesgue_integral()
            .unwrap();
        assert!(
            g2 / g4 >= 1.5,
            "gradient mass must drop by ≥ 1.5 from level 2 to 4, got {g2} / {g4}"
        );
    }

    #[test]
    fn truncate_identity_and_band() {
        let grid = Grid::new(2, &[(-2.0, 2.0), (-2.0, 2.0)], 128).unwrap();
        let f = radial_bump(2, 1.0, grid).unwrap();
        let same = truncate(&f, 0.0, 2.0).unwrap();
        assert_eq!(same.values(), f.values());

        let psi = truncate(&f, 0.25, 0.75).unwrap();
        assert!((psi.max_value() - 0.5).abs() < 1e-12);
        // |ψ| ≤ |f| pointwise and sup norm is min(b, max f) − a
        for (a, b) in psi.values().iter().zip(f.values()) {
            assert!(a <= b);
        }
        let g = psi.gradient_values().unwrap();
        for idx in grid.indices() {
            let v = f.values()[idx];
            if v > 0.25 && v < 0.75 {
                assert!(g[idx] > 0.0);
            } else {
                assert_eq!(g[idx], 0.0);
            }
        }
    }

    #[test]
    fn truncate_rejects_bad_band() {
        let grid = Grid::new(2, &[(-2.0, 2.0), (-2.0, 2.0)], 64).unwrap();
        let f = radial_bump(2, 1.0, grid).unwrap();
        assert!(truncate(&f, 0.5, 0.5).is_err());
    }

    #[test]
    fn tent_truncation_band_closed_form() {
        // band between half height and full height is the annulus r < s < 1.5r
        let r = 0.25;
        let f = tent2d(&TentSpec::new(r, 192)).unwrap();
        let psi = truncate(&f, 0.5 / r, 1.0 / r).unwrap();
        let band = psi.gradient_lebesgue_integral().unwrap();
        let exact = PI * (1.5f64.powi(2) - 1.0) * r * r / (r * r); // 1.25π
        assert!(
            (band - exact).abs() < 0.05 * exact,
            "band integral {band} vs {exact}"
        );
    }

    #[test]
    fn staircase_constant_function() {
        let ts: Vec<f64> = (0..50).map(|i| i as f64 / 50.0).collect();
        let fs = vec![1.0; 50];
        let p = staircase(&ts, &fs, 0.01, 1.0).unwrap();
        assert_eq!(p.points, vec![0.0, ts[49]]);
        let (ok, dev) = p.certify(&ts, &fs);
        assert!(ok && dev == 0.0);
    }

    #[test]
    fn staircase_isolates_a_jump() {
        // left-continuous step: value 0 up to and including t = 0.5, then 3ε
        let eps = 0.01;
        let ts: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
        let fs: Vec<f64> = ts
            .iter()
            .map(|&t| if t <= 0.5 { 0.0 } else { 3.0 * eps })
            .collect();
        let p = staircase(&ts, &fs, eps, 1.0).unwrap();
        assert!(p.points.contains(&0.5));
        let (ok, _) = p.certify(&ts, &fs);
        assert!(ok);
    }

    #[test]
    fn staircase_rejects_decreasing_samples() {
        assert!(staircase(&[0.0, 0.5], &[1.0, 0.5], 0.1, 1.0).is_err());
    }
}
