//! Certified brackets for the δ-dimensional content of a cell set.
//!
//! Upper bounds are explicit ball covers drawn from a finite candidate family
//! (dyadic radii on coarsened lattices plus tight enclosing balls), improved
//! by weighted-set-cover greedy and, on small instances, exact branch and
//! bound over the same family.  Lower bounds come from [`frostman`]: any
//! non-negative cell weighting that respects ball-mass constraints at every
//! scale certifies `Σ rᵢ^δ ≥ μ(E)/slack` for every countable ball cover.

pub mod frostman;
pub mod geom;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::DiscreteSet;
pub use frostman::{frostman_lower, lower_bound_slack, LowerBound, LowerMethod};

/// Smallest admissible content dimension; below this the cost function is too
/// flat for brackets to be informative.
pub const MIN_DELTA: f64 = 0.1;

/// Default cell cap for the exact cover search.
pub const EXACT_CELL_CAP: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    /// Center coordinates; entries beyond the grid dimension are zero.
    pub center: [f64; 3],
    pub radius: f64,
}

/// An explicit ball cover of a cell set, with cost `Σ rᵢ^δ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cover {
    pub balls: Vec<Ball>,
    pub cost: f64,
    pub delta: f64,
}

impl Cover {
    pub fn empty(delta: f64) -> Self {
        Cover {
            balls: Vec::new(),
            cost: 0.0,
            delta,
        }
    }

    pub fn recompute_cost(&self) -> f64 {
        self.balls.iter().map(|b| b.radius.powf(self.delta)).sum()
    }

    /// Check that every cell of `e` lies inside at least one ball and that the
    /// stored cost matches the recomputed sum.
    pub fn validate(&self, e: &DiscreteSet) -> Result<()> {
        let rec = self.recompute_cost();
        if (rec - self.cost).abs() > 1e-9 * rec.max(1.0) {
            return Err(Error::invalid(format!(
                "cover cost {} does not match recomputed {}",
                self.cost, rec
            )));
        }
        let grid = e.grid();
        let (h, n) = (grid.h(), grid.n());
        for &cell in e.cells() {
            let lo = grid.cell_low_corner(cell);
            let hit = self
                .balls
                .iter()
                .any(|b| geom::ball_contains_cell(b.center, b.radius, lo, h, n));
            if !hit {
                return Err(Error::invalid(format!(
                    "cover misses cell {cell}; not a valid witness"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CandidateBall {
    pub ball: Ball,
    /// Positions (into `e.cells()`) of the cells this ball fully contains.
    pub covered: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct CandidateFamily {
    pub balls: Vec<CandidateBall>,
    pub cell_count: usize,
}

/// Dense index over the bounding box of a set: membership and position lookup.
pub(crate) struct SetMask {
    lo: [i64; 3],
    dims: [usize; 3],
    pos: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl SetMask {
    pub(crate) fn build(e: &DiscreteSet) -> SetMask {
        let grid = e.grid();
        let (blo, bhi) = e.index_bounds().expect("mask of an empty set");
        let mut lo = [0i64; 3];
        let mut dims = [1usize; 3];
        for k in 0..3 {
            lo[k] = blo[k] as i64;
            dims[k] = bhi[k] - blo[k] + 1;
        }
        let total = dims[0] * dims[1] * dims[2];
        let mut pos = vec![ABSENT; total];
        for (p, &cell) in e.cells().iter().enumerate() {
            let m = grid.index_to_multi(cell);
            let f = (m[0] as i64 - lo[0]) as usize
                + dims[0]
                    * ((m[1] as i64 - lo[1]) as usize + dims[1] * (m[2] as i64 - lo[2]) as usize);
            pos[f] = p as u32;
        }
        SetMask { lo, dims, pos }
    }

    #[inline]
    pub(crate) fn position(&self, idx: [i64; 3]) -> Option<u32> {
        for k in 0..3 {
            let d = idx[k] - self.lo[k];
            if d < 0 || d as usize >= self.dims[k] {
                return None;
            }
        }
        let f = (idx[0] - self.lo[0]) as usize
            + self.dims[0]
                * ((idx[1] - self.lo[1]) as usize
                    + self.dims[1] * (idx[2] - self.lo[2]) as usize);
        let p = self.pos[f];
        if p == ABSENT {
            None
        } else {
            Some(p)
        }
    }

    pub(crate) fn bounds(&self) -> ([i64; 3], [usize; 3]) {
        (self.lo, self.dims)
    }
}

fn align_down(v: i64, m: i64) -> i64 {
    v.div_euclid(m) * m
}

/// Visit every index triple in `ranges` (inclusive), stepping `steps[k]` on
/// axis `k`.
fn for_box(ranges: [[i64; 2]; 3], steps: [i64; 3], mut f: impl FnMut([i64; 3])) {
    let mut i2 = ranges[2][0];
    while i2 <= ranges[2][1] {
        let mut i1 = ranges[1][0];
        while i1 <= ranges[1][1] {
            let mut i0 = ranges[0][0];
            while i0 <= ranges[0][1] {
                f([i0, i1, i2]);
                i0 += steps[0];
            }
            i1 += steps[1];
        }
        i2 += steps[2];
    }
}

/// Finite surrogate for the infimum over all ball covers: balls centred at
/// cell centers of per-level coarsened lattices with dyadic radii
/// `{h, 2h, 4h, …}` up to the set diameter, plus tight enclosing balls.
/// Deterministic order; only balls containing at least one cell are kept.
pub fn candidate_balls(e: &DiscreteSet, _delta: f64) -> Result<CandidateFamily> {
    if e.is_empty() {
        return Err(Error::EmptySet);
    }
    let grid = e.grid();
    let (h, n, cells_axis) = (grid.h(), grid.n(), grid.cells_per_axis() as i64);
    let mask = SetMask::build(e);
    let multis: Vec<[i64; 3]> = e
        .cells()
        .iter()
        .map(|&c| {
            let m = grid.index_to_multi(c);
            [m[0] as i64, m[1] as i64, m[2] as i64]
        })
        .collect();

    let diam_bound = e.bbox_diameter() + h;
    let mut family = Vec::new();

    let mut level = 0u32;
    loop {
        let rho = h * f64::powi(2.0, level as i32);
        let spacing = 1i64 << level;
        let reach = 1i64 << level; // per-axis |Δ| ≤ ρ is necessary for containment

        let mut sites: Vec<[i64; 3]> = Vec::new();
        for m in &multis {
            let mut ranges = [[0i64; 2]; 3];
            for k in 0..n {
                let a0 = align_down(m[k] - reach, spacing).max(0);
                let a1 = (m[k] + reach).min(cells_axis - 1);
                if a0 > a1 {
                    ranges = [[0, -1]; 3];
                    break;
                }
                ranges[k] = [a0, a1];
            }
            for k in n..3 {
                ranges[k] = [0, 0];
            }
            for_box(ranges, [spacing, spacing, spacing], |i| sites.push(i));
        }
        sites.sort_unstable();
        sites.dedup();

        for site in sites {
            let mut center = [0.0f64; 3];
            for k in 0..n {
                center[k] = grid.axis_min(k) + (site[k] as f64 + 0.5) * h;
            }
            let covered = covered_cells(grid, &mask, center, rho);
            if !covered.is_empty() {
                family.push(CandidateBall {
                    ball: Ball {
                        center,
                        radius: rho,
                    },
                    covered,
                });
            }
        }

        if rho >= diam_bound {
            break;
        }
        level += 1;
    }

    // tight enclosing balls: exact min radius from a few central cell centers
    let (blo, bhi) = e.index_bounds().unwrap();
    let mut hull_sites: Vec<[i64; 3]> = Vec::new();
    let mut base = [0i64; 3];
    for k in 0..n {
        base[k] = ((blo[k] + bhi[k]) as i64 / 2).clamp(0, cells_axis - 1);
    }
    hull_sites.push(base);
    for k in 0..n {
        for d in [-1i64, 1] {
            let mut s = base;
            s[k] = (s[k] + d).clamp(0, cells_axis - 1);
            hull_sites.push(s);
        }
    }
    hull_sites.sort_unstable();
    hull_sites.dedup();
    for site in hull_sites {
        let mut center = [0.0f64; 3];
        for k in 0..n {
            center[k] = grid.axis_min(k) + (site[k] as f64 + 0.5) * h;
        }
        let mut rmax2: f64 = 0.0;
        for &cell in e.cells() {
            let lo = grid.cell_low_corner(cell);
            rmax2 = rmax2.max(geom::far_dist2(center, lo, h, n));
        }
        // sqrt may round below the true enclosing radius; nudge up so the
        // containment predicate accepts the extremal cell
        let radius = rmax2.sqrt() * (1.0 + 1e-12);
        family.push(CandidateBall {
            ball: Ball { center, radius },
            covered: (0..e.len() as u32).collect(),
        });
    }

    Ok(CandidateFamily {
        balls: family,
        cell_count: e.len(),
    })
}

fn covered_cells(
    grid: &crate::grid::Grid,
    mask: &SetMask,
    center: [f64; 3],
    radius: f64,
) -> Vec<u32> {
    let (h, n) = (grid.h(), grid.n());
    let (mlo, mdims) = mask.bounds();
    let mut ranges = [[0i64; 2]; 3];
    for k in 0..n {
        let lo = ((center[k] - radius - grid.axis_min(k)) / h).floor() as i64 - 1;
        let hi = ((center[k] + radius - grid.axis_min(k)) / h).ceil() as i64 + 1;
        ranges[k] = [lo.max(mlo[k]), hi.min(mlo[k] + mdims[k] as i64 - 1)];
        if ranges[k][0] > ranges[k][1] {
            return Vec::new();
        }
    }
    for k in n..3 {
        ranges[k] = [0, 0];
    }
    let mut out = Vec::new();
    for_box(ranges, [1, 1, 1], |idx| {
        if let Some(p) = mask.position(idx) {
            let mut lo = [0.0f64; 3];
            for k in 0..n {
                lo[k] = grid.axis_min(k) + idx[k] as f64 * h;
            }
            if geom::ball_contains_cell(center, radius, lo, h, n) {
                out.push(p);
            }
        }
    });
    out
}

#[derive(Clone, Copy)]
struct HeapKey {
    gain: f64,
    idx: usize,
}

impl PartialEq for HeapKey {
    fn eq(&self, other: &Self) -> bool {
        self.gain.total_cmp(&other.gain).is_eq() && self.idx == other.idx
    }
}
impl Eq for HeapKey {}
impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // min-heap through Reverse: order by gain, then candidate index
        self.gain
            .total_cmp(&other.gain)
            .then(self.idx.cmp(&other.idx))
    }
}

fn greedy_indices(family: &CandidateFamily, delta: f64) -> (Vec<usize>, f64) {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let m = family.cell_count;
    let costs: Vec<f64> = family
        .balls
        .iter()
        .map(|c| c.ball.radius.powf(delta))
        .collect();
    let mut covered = vec![false; m];
    let mut remaining = m;
    let mut heap: BinaryHeap<Reverse<HeapKey>> = family
        .balls
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.covered.is_empty())
        .map(|(i, c)| {
            Reverse(HeapKey {
                gain: costs[i] / c.covered.len() as f64,
                idx: i,
            })
        })
        .collect();

    let mut chosen = Vec::new();
    while remaining > 0 {
        let Some(Reverse(top)) = heap.pop() else {
            break; // cannot happen: enclosing balls cover everything
        };
        let newly = family.balls[top.idx]
            .covered
            .iter()
            .filter(|&&p| !covered[p as usize])
            .count();
        if newly == 0 {
            continue;
        }
        let gain = costs[top.idx] / newly as f64;
        let fresh = HeapKey {
            gain,
            idx: top.idx,
        };
        // lazy evaluation: stale keys only underestimate the gain
        if heap
            .peek()
            .map(|Reverse(next)| fresh.cmp(next).is_le())
            .unwrap_or(true)
        {
            for &p in &family.balls[top.idx].covered {
                if !covered[p as usize] {
                    covered[p as usize] = true;
                    remaining -= 1;
                }
            }
            chosen.push(top.idx);
        } else {
            heap.push(Reverse(fresh));
        }
    }

    // drop balls made redundant by later picks
    let mut mult = vec![0u32; m];
    for &i in &chosen {
        for &p in &family.balls[i].covered {
            mult[p as usize] += 1;
        }
    }
    let mut order: Vec<usize> = (0..chosen.len()).collect();
    order.sort_by(|&a, &b| {
        costs[chosen[b]]
            .total_cmp(&costs[chosen[a]])
            .then(chosen[a].cmp(&chosen[b]))
    });
    let mut keep = vec![true; chosen.len()];
    for &oi in &order {
        let i = chosen[oi];
        if family.balls[i]
            .covered
            .iter()
            .all(|&p| mult[p as usize] >= 2)
        {
            keep[oi] = false;
            for &p in &family.balls[i].covered {
                mult[p as usize] -= 1;
            }
        }
    }
    let chosen: Vec<usize> = chosen
        .into_iter()
        .zip(keep)
        .filter_map(|(i, k)| k.then_some(i))
        .collect();
    let cost = chosen.iter().map(|&i| costs[i]).sum();
    (chosen, cost)
}

/// Weighted-set-cover greedy over the candidate family: repeatedly pick the
/// ball minimising `r^δ / newly covered cells`.
pub fn greedy_upper(e: &DiscreteSet, delta: f64) -> Result<Cover> {
    let family = candidate_balls(e, delta)?;
    Ok(greedy_upper_with(&family, delta))
}

pub fn greedy_upper_with(family: &CandidateFamily, delta: f64) -> Cover {
    let (chosen, cost) = greedy_indices(family, delta);
    Cover {
        balls: chosen.iter().map(|&i| family.balls[i].ball).collect(),
        cost,
        delta,
    }
}

/// Upper bound for a union queried together with its parts: the cheaper of a
/// direct cover and the concatenation of per-part covers, so that
/// `upper(E ∪ F) ≤ upper(E) + upper(F)` holds by construction.
pub fn union_upper(parts: &[&DiscreteSet], delta: f64) -> Result<(DiscreteSet, Cover)> {
    if parts.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut union = parts[0].clone();
    for p in &parts[1..] {
        union = union.union(p)?;
    }
    if union.is_empty() {
        return Ok((union, Cover::empty(delta)));
    }
    let direct = greedy_upper(&union, delta)?;
    let mut concat = Cover::empty(delta);
    for p in parts {
        if p.is_empty() {
            continue;
        }
        let c = greedy_upper(p, delta)?;
        concat.balls.extend(c.balls);
        concat.cost += c.cost;
    }
    Ok((
        union,
        if concat.cost < direct.cost {
            concat
        } else {
            direct
        },
    ))
}

#[derive(Debug, Clone)]
pub struct ExactOutcome {
    pub cover: Cover,
    /// Set when the search space was exhausted within the node budget, i.e.
    /// the cover is optimal within the candidate family.
    pub optimal: bool,
    pub nodes: u64,
}

type CellWords = [u64; 4];

fn word_set(mask: &mut CellWords, p: u32) {
    mask[(p / 64) as usize] |= 1u64 << (p % 64);
}
fn word_get(mask: &CellWords, p: u32) -> bool {
    mask[(p / 64) as usize] & (1u64 << (p % 64)) != 0
}

/// Branch and bound for the minimum-cost cover within the candidate family.
/// Instances are capped at [`EXACT_CELL_CAP`] cells by default (callers pass
/// the cap through); exhausting `node_budget` returns the incumbent with the
/// optimality flag unset.
pub fn exact_small(e: &DiscreteSet, delta: f64, node_budget: u64) -> Result<ExactOutcome> {
    exact_small_with_cap(e, delta, node_budget, EXACT_CELL_CAP)
}

pub fn exact_small_with_cap(
    e: &DiscreteSet,
    delta: f64,
    node_budget: u64,
    cell_cap: usize,
) -> Result<ExactOutcome> {
    if e.is_empty() {
        return Err(Error::EmptySet);
    }
    if e.len() > cell_cap.min(256) {
        return Err(Error::InstanceTooLarge {
            cells: e.len(),
            cap: cell_cap.min(256),
        });
    }
    let family = candidate_balls(e, delta)?;
    let m = e.len();
    let costs: Vec<f64> = family
        .balls
        .iter()
        .map(|c| c.ball.radius.powf(delta))
        .collect();

    // dominance: drop balls whose coverage is contained in a cheaper ball
    let masks: Vec<CellWords> = family
        .balls
        .iter()
        .map(|c| {
            let mut w = [0u64; 4];
            for &p in &c.covered {
                word_set(&mut w, p);
            }
            w
        })
        .collect();
    let mut alive: Vec<usize> = (0..family.balls.len()).collect();
    alive.retain(|&i| {
        !(0..family.balls.len()).any(|j| {
            j != i
                && (costs[j] < costs[i] || (costs[j] == costs[i] && j < i))
                && (0..4).all(|w| masks[i][w] & !masks[j][w] == 0)
        })
    });

    // per-cell candidate lists, cheapest first
    let mut per_cell: Vec<Vec<usize>> = vec![Vec::new(); m];
    for &i in &alive {
        for &p in &family.balls[i].covered {
            per_cell[p as usize].push(i);
        }
    }
    for list in &mut per_cell {
        list.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
    }
    // branching order: scarcest cells first
    let mut cell_order: Vec<u32> = (0..m as u32).collect();
    cell_order.sort_by_key(|&p| (per_cell[p as usize].len(), p));

    // admissible bound: each uncovered cell pays at least its best density
    let dmin: Vec<f64> = (0..m)
        .map(|p| {
            per_cell[p]
                .iter()
                .map(|&i| costs[i] / family.balls[i].covered.len() as f64)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    let (greedy_sel, greedy_cost) = greedy_indices(&family, delta);

    struct Search<'a> {
        family: &'a CandidateFamily,
        costs: &'a [f64],
        per_cell: &'a [Vec<usize>],
        cell_order: &'a [u32],
        dmin: &'a [f64],
        best_cost: f64,
        best_sel: Vec<usize>,
        nodes: u64,
        budget: u64,
        exhausted: bool,
    }

    impl Search<'_> {
        fn dfs(&mut self, covered: CellWords, cost: f64, lb_rest: f64, sel: &mut Vec<usize>) {
            if cost + lb_rest >= self.best_cost - 1e-12 {
                return;
            }
            let Some(&branch_cell) = self
                .cell_order
                .iter()
                .find(|&&p| !word_get(&covered, p))
            else {
                self.best_cost = cost;
                self.best_sel = sel.clone();
                return;
            };
            if self.nodes >= self.budget {
                self.exhausted = true;
                return;
            }
            self.nodes += 1;
            for &i in &self.per_cell[branch_cell as usize] {
                let mut ncov = covered;
                let mut lb = lb_rest;
                for &p in &self.family.balls[i].covered {
                    if !word_get(&ncov, p) {
                        word_set(&mut ncov, p);
                        lb -= self.dmin[p as usize];
                    }
                }
                sel.push(i);
                self.dfs(ncov, cost + self.costs[i], lb.max(0.0), sel);
                sel.pop();
                if self.exhausted {
                    return;
                }
            }
        }
    }

    let mut search = Search {
        family: &family,
        costs: &costs,
        per_cell: &per_cell,
        cell_order: &cell_order,
        dmin: &dmin,
        best_cost: greedy_cost,
        best_sel: greedy_sel,
        nodes: 0,
        budget: node_budget,
        exhausted: node_budget == 0,
    };
    if node_budget > 0 {
        let lb0: f64 = dmin.iter().sum();
        let mut sel = Vec::new();
        search.dfs([0u64; 4], 0.0, lb0, &mut sel);
    }

    let cover = Cover {
        balls: search
            .best_sel
            .iter()
            .map(|&i| family.balls[i].ball)
            .collect(),
        cost: search.best_sel.iter().map(|&i| costs[i]).sum(),
        delta,
    };
    Ok(ExactOutcome {
        optimal: !search.exhausted,
        nodes: search.nodes,
        cover,
    })
}

/// Options shared by the content bracket pipeline.
#[derive(Debug, Clone)]
pub struct BracketOptions {
    pub exact_cap: usize,
    pub exact_budget: u64,
    pub run_exact: bool,
    /// Above this many cells the packing program switches from simplex to the
    /// (feasible-side) proportional-fitting solver.
    pub simplex_var_cap: usize,
    /// Override of the lower-bound slack base (default `2·√n`).
    pub slack_base_override: Option<f64>,
}

impl Default for BracketOptions {
    fn default() -> Self {
        BracketOptions {
            exact_cap: EXACT_CELL_CAP,
            exact_budget: 200_000,
            run_exact: true,
            simplex_var_cap: 8_000,
            slack_base_override: None,
        }
    }
}

/// Certified bracket `[lower, upper]` for the δ-content of a set, with the
/// witness cover, the lower-bound method tag and the documented slack.
#[derive(Debug, Clone, Serialize)]
pub struct ContentBracket {
    pub delta: f64,
    pub lower: f64,
    pub upper: f64,
    pub witness: Cover,
    pub lower_method: LowerMethod,
    /// Upper bound is optimal within the candidate family.
    pub exact: bool,
    /// The lower bound is `μ(E) / slack`.
    pub slack: f64,
    pub candidate_count: usize,
    pub warnings: Vec<String>,
}

pub fn content_bracket(e: &DiscreteSet, delta: f64) -> Result<ContentBracket> {
    content_bracket_with(e, delta, &BracketOptions::default())
}

pub fn content_bracket_with(
    e: &DiscreteSet,
    delta: f64,
    opts: &BracketOptions,
) -> Result<ContentBracket> {
    let n = e.grid().n() as f64;
    if !(MIN_DELTA..=n).contains(&delta) {
        return Err(Error::BadDelta {
            delta,
            min: MIN_DELTA,
            max: n,
        });
    }
    if e.is_empty() {
        return Ok(ContentBracket {
            delta,
            lower: 0.0,
            upper: 0.0,
            witness: Cover::empty(delta),
            lower_method: LowerMethod::Exact,
            exact: true,
            slack: lower_bound_slack(e.grid().n(), delta),
            candidate_count: 0,
            warnings: Vec::new(),
        });
    }

    let family = candidate_balls(e, delta)?;
    let candidate_count = family.balls.len();
    let greedy = greedy_upper_with(&family, delta);
    let mut upper = greedy;
    let mut exact_flag = false;
    if opts.run_exact && e.len() <= opts.exact_cap.min(256) {
        let out = exact_small_with_cap(e, delta, opts.exact_budget, opts.exact_cap)?;
        if out.cover.cost <= upper.cost {
            upper = out.cover;
            exact_flag = out.optimal;
        }
    }

    let low = frostman_lower(e, delta, opts)?;
    if low.value > upper.cost * (1.0 + 1e-9) {
        return Err(Error::BracketInversion {
            lower: low.value,
            upper: upper.cost,
            lower_method: format!("{:?}", low.method),
            upper_balls: upper.balls.len(),
        });
    }
    upper.validate(e)?;

    Ok(ContentBracket {
        delta,
        lower: low.value,
        upper: upper.cost,
        witness: upper,
        lower_method: low.method,
        exact: exact_flag,
        slack: low.slack,
        candidate_count,
        warnings: low.warnings,
    })
}

/// Brackets for a decreasing chain `S_0 ⊇ S_1 ⊇ …`, made consistent with
/// monotonicity: a cover of a superset covers the subset, and a feasible
/// packing weight for a subset is feasible for the superset.
pub fn content_brackets_nested(
    sets: &[DiscreteSet],
    delta: f64,
    opts: &BracketOptions,
) -> Result<Vec<ContentBracket>> {
    use rayon::prelude::*;
    let mut brackets: Vec<ContentBracket> = sets
        .par_iter()
        .map(|s| content_bracket_with(s, delta, opts))
        .collect::<Result<_>>()?;
    for i in 1..brackets.len() {
        if brackets[i].upper > brackets[i - 1].upper {
            brackets[i].upper = brackets[i - 1].upper;
            brackets[i].witness = brackets[i - 1].witness.clone();
            brackets[i].exact = false;
        }
    }
    for i in (1..brackets.len()).rev() {
        if brackets[i].lower > brackets[i - 1].lower {
            brackets[i - 1].lower = brackets[i].lower;
            brackets[i - 1].lower_method = brackets[i].lower_method;
        }
    }
    Ok(brackets)
}

#[cfg(test)]
mod tests;
