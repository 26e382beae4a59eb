//! Certified lower bounds via packing weights.
//!
//! A weighting `μ ≥ 0` on the cells of `E` (mass spread uniformly inside each
//! cell) is *admissible* when `μ(B(x,r)) ≤ (σ·r)^δ` for every ball, with
//! `σ = 2√n`.  Any countable ball cover of `E` then satisfies
//! `Σ rᵢ^δ ≥ Σ μ(Bᵢ)/σ^δ ≥ μ(E)/σ^δ`, so `μ(E)/σ^δ` is a valid lower bound
//! for the δ-content.  Admissibility is enforced by finitely many
//! constraints:
//!
//! * a per-cell cap handles balls with `r ≤ t₀·h` through the density bound
//!   `μ(B) ≤ d_max · v_n · r^n`;
//! * for `r ≥ t₀·h`, every ball is contained in a window `B(c, σ·ρ)` of the
//!   ladder `ρ = t₀·h·g^k` (lattice spacing ≤ ρ): picking the level with
//!   `ρ ≤ r < g·ρ` and the nearest lattice center `c` gives
//!   `‖x−c‖ + r ≤ (√n/2)·ρ + g·ρ ≤ σ·ρ`, and the window constraint caps its
//!   mass by `(σ·ρ)^δ ≤ (σ·r)^δ`.
//!
//! Window masses are over-estimated linearly (exact cell overlap fractions in
//! dimensions 1–2, intersection indicators in dimension 3), so constraint
//! feasibility in `μ` implies admissibility of the spread measure.

use serde::{Deserialize, Serialize};

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::grid::DiscreteSet;

use super::geom;
use super::{align_down, for_box, BracketOptions, SetMask};

/// Unit-ball volumes v_1, v_2, v_3.
pub const UNIT_BALL_VOLUME: [f64; 3] = [
    2.0,
    std::f64::consts::PI,
    4.0 * std::f64::consts::PI / 3.0,
];

/// Crossover between the density cap and the window ladder, in cell widths.
const T0: f64 = 4.0;

/// Sweeps of the proportional-fitting solver.
const PROPORTIONAL_SWEEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerMethod {
    FrostmanLp,
    VolumeBound,
    Exact,
}

/// `slack(δ) = (2√n)^δ`: the factor dividing the packing mass.
pub fn lower_bound_slack(n: usize, delta: f64) -> f64 {
    (2.0 * (n as f64).sqrt()).powf(delta)
}

#[derive(Debug, Clone)]
pub struct LowerBound {
    /// Certified lower bound `μ(E)/slack` (or the volume bound at δ = n).
    pub value: f64,
    pub mu_total: f64,
    pub slack: f64,
    pub method: LowerMethod,
    pub warnings: Vec<String>,
}

struct Window {
    rhs: f64,
    coefs: Vec<(u32, f64)>,
}

pub fn frostman_lower(e: &DiscreteSet, delta: f64, opts: &BracketOptions) -> Result<LowerBound> {
    if e.is_empty() {
        return Err(Error::EmptySet);
    }
    let grid = e.grid();
    let n = grid.n();
    let h = grid.h();
    let vn = UNIT_BALL_VOLUME[n - 1];
    let sigma = opts
        .slack_base_override
        .unwrap_or(2.0 * (n as f64).sqrt());
    let slack = sigma.powf(delta);
    let cap = slack * T0.powf(delta - n as f64) / vn * h.powf(delta);

    let windows = build_windows(e, delta, sigma);
    let mut warnings = Vec::new();

    let mut mu = if e.len() <= opts.simplex_var_cap {
        match solve_simplex(e.len(), cap, &windows) {
            Ok(mu) => mu,
            Err(msg) => {
                warnings.push(format!(
                    "packing simplex failed ({msg}); using proportional fitting"
                ));
                solve_proportional(e.len(), cap, &windows)
            }
        }
    } else {
        warnings.push(format!(
            "packing program has {} variables (> {}); using proportional fitting",
            e.len(),
            opts.simplex_var_cap
        ));
        solve_proportional(e.len(), cap, &windows)
    };

    certify_feasible(&mut mu, cap, &windows);
    let mu_total: f64 = mu.iter().sum();
    let mut out = LowerBound {
        value: mu_total / slack,
        mu_total,
        slack,
        method: LowerMethod::FrostmanLp,
        warnings,
    };

    // at δ = n the volume of the union is itself a certificate:
    // Σ rᵢ^n ≥ Σ |Bᵢ|/v_n ≥ |E|/v_n
    if (delta - n as f64).abs() < 1e-12 {
        let vol = e.measure() / vn;
        if vol > out.value {
            out.value = vol;
            out.method = LowerMethod::VolumeBound;
        }
    }
    Ok(out)
}

fn build_windows(e: &DiscreteSet, delta: f64, sigma: f64) -> Vec<Window> {
    let grid = e.grid();
    let n = grid.n();
    let h = grid.h();
    let g: f64 = if n == 1 { 1.5 } else { 2.0 };
    let mask = SetMask::build(e);
    let multis: Vec<[i64; 3]> = e
        .cells()
        .iter()
        .map(|&c| {
            let m = grid.index_to_multi(c);
            [m[0] as i64, m[1] as i64, m[2] as i64]
        })
        .collect();

    let (blo, bhi) = e.index_bounds().unwrap();
    let mut center0 = [0.0f64; 3];
    let mut enclose2 = 0.0f64;
    for k in 0..n {
        let lo = grid.axis_min(k) + blo[k] as f64 * h;
        let hi = grid.axis_min(k) + (bhi[k] + 1) as f64 * h;
        center0[k] = 0.5 * (lo + hi);
        enclose2 += (0.5 * (hi - lo)).powi(2);
    }
    let r_enclose = enclose2.sqrt();

    let mut windows = Vec::new();
    let mut label = T0 * h;
    loop {
        let spacing = (label / h).floor() as i64; // ≥ T0 ≥ 1, and spacing·h ≤ label
        let radius = sigma * label;
        let reach = (radius / h).ceil() as i64 + 1;
        let rhs = radius.powf(delta);

        let mut sites: Vec<[i64; 3]> = Vec::new();
        for m in &multis {
            let mut ranges = [[0i64; 2]; 3];
            for k in 0..n {
                ranges[k] = [align_down(m[k] - reach, spacing), m[k] + reach];
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
            let coefs = window_coefs(grid, &mask, center, radius);
            if !coefs.is_empty() {
                windows.push(Window { rhs, coefs });
            }
        }

        if sigma * label >= r_enclose {
            break;
        }
        label *= g;
    }

    // global window containing every cell: caps μ(E) itself
    windows.push(Window {
        rhs: (sigma * label).powf(delta),
        coefs: (0..e.len() as u32).map(|p| (p, 1.0)).collect(),
    });
    windows
}

fn window_coefs(
    grid: &crate::grid::Grid,
    mask: &SetMask,
    center: [f64; 3],
    radius: f64,
) -> Vec<(u32, f64)> {
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
    let r2 = radius * radius;
    let mut out = Vec::new();
    for_box(ranges, [1, 1, 1], |idx| {
        if let Some(p) = mask.position(idx) {
            let mut lo = [0.0f64; 3];
            for k in 0..n {
                lo[k] = grid.axis_min(k) + idx[k] as f64 * h;
            }
            if geom::near_dist2(center, lo, h, n) > r2 {
                return;
            }
            let coef = if geom::far_dist2(center, lo, h, n) <= r2 {
                1.0
            } else {
                geom::overlap_fraction(center, radius, lo, h, n)
            };
            if coef > 0.0 {
                out.push((p, coef));
            }
        }
    });
    out
}

fn solve_simplex(
    n_vars: usize,
    cap: f64,
    windows: &[Window],
) -> std::result::Result<Vec<f64>, String> {
    let mut prob = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..n_vars).map(|_| prob.add_var(1.0, (0.0, cap))).collect();
    for w in windows {
        let mut expr = LinearExpr::empty();
        for &(p, c) in &w.coefs {
            expr.add(vars[p as usize], c);
        }
        prob.add_constraint(expr, ComparisonOp::Le, w.rhs);
    }
    let sol = prob.solve().map_err(|e| e.to_string())?;
    let mu: Vec<f64> = vars.iter().map(|v| *sol.var_value(*v)).collect();
    if mu.iter().any(|v| !v.is_finite()) {
        return Err("non-finite solution".to_string());
    }
    Ok(mu)
}

/// Feasible-side iterative solver: start at the caps, then rescale each weight
/// by the worst load ratio among the windows containing it.  Every sweep
/// keeps `load_j = Σ c·μ ≤ rhs_j`: each factor `f_q ≤ rhs_j / load_j` for all
/// windows `j ∋ q`, so the new load is at most `rhs_j`.  After the first
/// (shrinking) sweep the iterates grow monotonically toward a fixed point.
fn solve_proportional(n_vars: usize, cap: f64, windows: &[Window]) -> Vec<f64> {
    let mut mu = vec![cap; n_vars];
    for _ in 0..PROPORTIONAL_SWEEPS {
        let mut factor = vec![f64::INFINITY; n_vars];
        for w in windows {
            let load: f64 = w.coefs.iter().map(|&(p, c)| c * mu[p as usize]).sum();
            if load <= 0.0 {
                continue;
            }
            let ratio = w.rhs / load;
            for &(p, _) in &w.coefs {
                let f = &mut factor[p as usize];
                if ratio < *f {
                    *f = ratio;
                }
            }
        }
        let mut changed = false;
        for q in 0..n_vars {
            if factor[q].is_finite() {
                let next = (mu[q] * factor[q]).min(cap);
                if (next - mu[q]).abs() > 1e-14 * cap {
                    changed = true;
                }
                mu[q] = next;
            }
        }
        if !changed {
            break;
        }
    }
    mu
}

/// Clamp into the box, then scale down by the worst constraint violation so
/// the returned weights are feasible in exact f64 arithmetic.
fn certify_feasible(mu: &mut [f64], cap: f64, windows: &[Window]) {
    for v in mu.iter_mut() {
        if !v.is_finite() {
            *v = 0.0;
        }
        *v = v.clamp(0.0, cap);
    }
    let mut worst = 1.0f64;
    for w in windows {
        let load: f64 = w.coefs.iter().map(|&(p, c)| c * mu[p as usize]).sum();
        if load > w.rhs {
            worst = worst.max(load / w.rhs);
        }
    }
    if worst > 1.0 {
        let scale = worst * (1.0 + 1e-12);
        for v in mu.iter_mut() {
            *v /= scale;
        }
    }
}
