//! Layer-cake Choquet integration against content brackets, plus numeric
//! checkers for quasi-sublinearity, dimension change, and a Fatou-type
//! consistency statement.
//!
//! The threshold ladder is drawn from the field's own sample values, so the
//! one-dimensional integral is exact for sampled fields and all uncertainty
//! lives in the per-level content brackets.  The content of `{f > t}` is
//! non-increasing in `t`; the upper sum therefore pairs each interval with
//! the *strict* superlevel at its left endpoint and the content upper bound,
//! the lower sum the *closed* superlevel at its right endpoint and the
//! content lower bound.

use serde::Serialize;

use crate::content::{
    content_brackets_nested, greedy_upper, union_upper, BracketOptions, ContentBracket, MIN_DELTA,
};
use crate::error::{Error, Result};
use crate::grid::{DiscreteSet, ScalarField};

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdLadder {
    /// `t_0 = 0 < t_1 < … < t_m = max(f)`.
    pub levels: Vec<f64>,
    pub policy: LadderPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LadderPolicy {
    DistinctValues,
    Subsampled,
}

/// One ladder interval `[t, t_next)` with the two content brackets it uses.
#[derive(Debug, Clone, Serialize)]
pub struct ChoquetLevel {
    pub t: f64,
    pub t_next: f64,
    /// Bracket of the strict superlevel `{f > t}` (upper endpoint source).
    pub strict_content: ContentBracket,
    /// Bracket of the closed superlevel `{f ≥ t_next}` (lower endpoint source).
    pub closed_content: ContentBracket,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChoquetBracket {
    pub delta: f64,
    pub lower: f64,
    pub upper: f64,
    pub ladder: ThresholdLadder,
    pub levels: Vec<ChoquetLevel>,
}

impl ChoquetBracket {
    fn zero(delta: f64) -> Self {
        ChoquetBracket {
            delta,
            lower: 0.0,
            upper: 0.0,
            ladder: ThresholdLadder {
                levels: vec![0.0],
                policy: LadderPolicy::DistinctValues,
            },
            levels: Vec::new(),
        }
    }

    /// Endpointwise monotone transform `x ↦ x^e`, `e > 0`.
    pub fn powf_bracket(&self, e: f64) -> [f64; 2] {
        [self.lower.powf(e), self.upper.powf(e)]
    }
}

pub fn choquet_integral(f: &ScalarField, delta: f64, m: usize) -> Result<ChoquetBracket> {
    choquet_integral_with(f, delta, m, &BracketOptions::default())
}

pub fn choquet_integral_with(
    f: &ScalarField,
    delta: f64,
    m: usize,
    opts: &BracketOptions,
) -> Result<ChoquetBracket> {
    let n = f.grid().n() as f64;
    if !(MIN_DELTA..=n).contains(&delta) {
        return Err(Error::BadDelta {
            delta,
            min: MIN_DELTA,
            max: n,
        });
    }
    if m < 2 {
        return Err(Error::TooFewLevels(m));
    }
    let ladder = build_ladder(f, m);
    if ladder.levels.len() < 2 {
        return Ok(ChoquetBracket::zero(delta));
    }
    let levels = &ladder.levels;
    let k_max = levels.len() - 1;

    // one nested decreasing chain:
    // {f > t_0} ⊇ {f ≥ t_1} ⊇ {f > t_1} ⊇ … ⊇ {f ≥ t_m}
    let mut sets: Vec<DiscreteSet> = Vec::with_capacity(2 * k_max);
    for k in 0..k_max {
        sets.push(f.superlevel(levels[k]));
        sets.push(f.superlevel_closed(levels[k + 1]));
    }
    // deduplicate identical consecutive sets (always the case for full ladders)
    let mut unique: Vec<DiscreteSet> = Vec::new();
    let mut which: Vec<usize> = Vec::with_capacity(sets.len());
    for s in sets {
        if unique.last().map(|u| u == &s).unwrap_or(false) {
            which.push(unique.len() - 1);
        } else {
            unique.push(s);
            which.push(unique.len() - 1);
        }
    }
    let brackets = content_brackets_nested(&unique, delta, opts)?;

    let mut lower = 0.0;
    let mut upper = 0.0;
    let mut out_levels = Vec::with_capacity(k_max);
    for k in 0..k_max {
        let dt = levels[k + 1] - levels[k];
        let strict = &brackets[which[2 * k]];
        let closed = &brackets[which[2 * k + 1]];
        upper += dt * strict.upper;
        lower += dt * closed.lower;
        out_levels.push(ChoquetLevel {
            t: levels[k],
            t_next: levels[k + 1],
            strict_content: strict.clone(),
            closed_content: closed.clone(),
        });
    }
    Ok(ChoquetBracket {
        delta,
        lower,
        upper,
        ladder,
        levels: out_levels,
    })
}

fn build_ladder(f: &ScalarField, m: usize) -> ThresholdLadder {
    let distinct = f.distinct_positive_values();
    if distinct.is_empty() {
        return ThresholdLadder {
            levels: vec![0.0],
            policy: LadderPolicy::DistinctValues,
        };
    }
    let d = distinct.len();
    let (chosen, policy) = if d <= m {
        (distinct, LadderPolicy::DistinctValues)
    } else {
        // evenly spaced by rank, always keeping the maximum
        let mut picked: Vec<f64> = (1..=m)
            .map(|j| distinct[(j * d).div_ceil(m) - 1])
            .collect();
        picked.dedup();
        (picked, LadderPolicy::Subsampled)
    };
    let mut levels = Vec::with_capacity(chosen.len() + 1);
    levels.push(0.0);
    levels.extend(chosen);
    ThresholdLadder { levels, policy }
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionChangeReport {
    pub delta_lo: f64,
    pub delta_hi: f64,
    /// `(δ₂/δ₁)^{1/δ₂}`.
    pub factor: f64,
    /// Bracket of `(∫ f dH^{δ₂})^{1/δ₂}`.
    pub lhs: [f64; 2],
    /// Bracket of `(∫ f^{δ₁/δ₂} dH^{δ₁})^{1/δ₁}`.
    pub rhs: [f64; 2],
    /// `factor · rhs_upper − lhs_lower ≥ 0` when satisfied.
    pub margin: f64,
    pub satisfied: bool,
}

/// Bracket-consistent check of the dimension-change inequality
/// `(∫ f dH^{δ₂})^{1/δ₂} ≤ (δ₂/δ₁)^{1/δ₂} (∫ f^{δ₁/δ₂} dH^{δ₁})^{1/δ₁}`:
/// asserts `lhs_lower ≤ factor · rhs_upper`, the only sound direction.
pub fn dimension_change_check(
    f: &ScalarField,
    delta_lo: f64,
    delta_hi: f64,
    m: usize,
    opts: &BracketOptions,
) -> Result<DimensionChangeReport> {
    let n = f.grid().n() as f64;
    if !(delta_lo < delta_hi && delta_hi <= n && delta_lo >= MIN_DELTA) {
        return Err(Error::invalid(format!(
            "need {MIN_DELTA} <= delta_lo < delta_hi <= {n}, got ({delta_lo}, {delta_hi})"
        )));
    }
    let hi = choquet_integral_with(f, delta_hi, m, opts)?;
    let lo = choquet_integral_with(&f.powered(delta_lo / delta_hi), delta_lo, m, opts)?;
    let lhs = hi.powf_bracket(1.0 / delta_hi);
    let rhs = lo.powf_bracket(1.0 / delta_lo);
    let factor = (delta_hi / delta_lo).powf(1.0 / delta_hi);
    let margin = factor * rhs[1] - lhs[0];
    Ok(DimensionChangeReport {
        delta_lo,
        delta_hi,
        factor,
        lhs,
        rhs,
        margin,
        satisfied: margin >= -1e-12 * lhs[0].max(1.0),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SublinearityReport {
    pub delta: f64,
    /// `upper(∫ Σ fᵢ) / Σ lower(∫ fᵢ)`.
    pub ratio: f64,
    pub cap: f64,
    pub passed: bool,
    pub sum_upper: f64,
    pub parts_lower_sum: f64,
    /// `Σ upper(∫ fᵢ on the sum's ladder) / Σ lower(∫ fᵢ)`; the ratio never
    /// exceeds this by construction of the union covers.
    pub parts_slack_bound: f64,
}

/// Empirical constant for countable quasi-sublinearity: the upper integral of
/// the sum over the summed lower integrals.  Union covers are taken as the
/// cheaper of a direct cover and the concatenation of per-part covers, so the
/// ratio is bounded by the parts' own bracket slack.
pub fn sublinearity_check(
    fields: &[ScalarField],
    delta: f64,
    cap: f64,
    m: usize,
    opts: &BracketOptions,
) -> Result<SublinearityReport> {
    if fields.len() < 2 {
        return Err(Error::invalid("need at least 2 fields"));
    }
    let grid = fields[0].grid();
    if fields.iter().any(|f| f.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let mut sum = fields[0].clone();
    for f in &fields[1..] {
        sum = sum.add(f)?;
    }
    let ladder = build_ladder(&sum, m);
    let levels = &ladder.levels;

    let mut sum_upper = 0.0;
    let mut parts_upper_on_sum_ladder = 0.0;
    if levels.len() >= 2 {
        for k in 0..levels.len() - 1 {
            let dt = levels[k + 1] - levels[k];
            let t = levels[k];
            let part_sets: Vec<DiscreteSet> =
                fields.iter().map(|f| f.superlevel(t)).collect();
            let mut part_cost_sum = 0.0;
            for s in &part_sets {
                if !s.is_empty() {
                    part_cost_sum += greedy_upper(s, delta)?.cost;
                }
            }
            let refs: Vec<&DiscreteSet> = part_sets.iter().collect();
            let (_, union_cover) = union_upper(&refs, delta)?;
            sum_upper += dt * union_cover.cost;
            parts_upper_on_sum_ladder += dt * part_cost_sum;
        }
    }

    let mut parts_lower_sum = 0.0;
    for f in fields {
        parts_lower_sum += choquet_integral_with(f, delta, m, opts)?.lower;
    }
    let ratio = if parts_lower_sum > 0.0 {
        sum_upper / parts_lower_sum
    } else if sum_upper == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let parts_slack_bound = if parts_lower_sum > 0.0 {
        parts_upper_on_sum_ladder / parts_lower_sum
    } else {
        f64::INFINITY
    };
    Ok(SublinearityReport {
        delta,
        ratio,
        cap,
        passed: ratio <= cap,
        sum_upper,
        parts_lower_sum,
        parts_slack_bound,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FatouReport {
    pub delta: f64,
    /// Lower integral of the pointwise limit (the last element).
    pub limit_lower: f64,
    /// liminf of the per-element upper integrals.
    pub liminf_upper: f64,
    pub cap: f64,
    pub margin: f64,
    pub passed: bool,
}

/// Consistency check of the Fatou-type inequality
/// `∫ lim fᵢ ≤ c · liminf ∫ fᵢ` for a pointwise non-decreasing sequence whose
/// limit is its last element.
pub fn fatou_consistency_check(
    seq: &[ScalarField],
    delta: f64,
    cap: f64,
    m: usize,
    opts: &BracketOptions,
) -> Result<FatouReport> {
    if seq.is_empty() {
        return Err(Error::invalid("empty sequence"));
    }
    let grid = seq[0].grid();
    for w in seq.windows(2) {
        if w[1].grid() != grid {
            return Err(Error::GridMismatch);
        }
        let non_decreasing = w[0]
            .values()
            .iter()
            .zip(w[1].values())
            .all(|(a, b)| a <= b);
        if !non_decreasing {
            return Err(Error::invalid(
                "sequence is not pointwise non-decreasing",
            ));
        }
    }
    let uppers: Vec<f64> = seq
        .iter()
        .map(|f| choquet_integral_with(f, delta, m, opts).map(|b| b.upper))
        .collect::<Result<_>>()?;
    // liminf of the finite sequence: sup over i of inf of the tail
    let liminf_upper = (0..uppers.len())
        .map(|i| uppers[i..].iter().cloned().fold(f64::INFINITY, f64::min))
        .fold(f64::NEG_INFINITY, f64::max);
    let limit_lower = choquet_integral_with(seq.last().unwrap(), delta, m, opts)?.lower;
    let margin = cap * liminf_upper - limit_lower;
    Ok(FatouReport {
        delta,
        limit_lower,
        liminf_upper,
        cap,
        margin,
        passed: margin >= -1e-12 * limit_lower.max(1.0),
    })
}
