//! Bracket-consistent evaluation of capacity-type Sobolev inequalities on
//! generated fields, with sharpness sweeps.
//!
//! The comparison discipline: an inequality `A ≤ c·B` is *violated* only when
//! `A_lower > cap·B_upper` (certified), *consistent* when
//! `A_upper ≤ cap·B_lower` (certified), and *inconclusive* in between.  The
//! recorded empirical constant is `A_upper / B_lower`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::choquet::choquet_integral_with;
use crate::content::{content_bracket_with, BracketOptions, MIN_DELTA};
use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::testbed::{cantor_capacitary, tent2d, truncate, CantorSpec, TentSpec};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ValueBracket {
    pub lower: f64,
    pub upper: f64,
}

impl ValueBracket {
    pub fn point(v: f64) -> Self {
        ValueBracket { lower: v, upper: v }
    }

    pub fn from_pair(b: [f64; 2]) -> Self {
        ValueBracket {
            lower: b[0],
            upper: b[1],
        }
    }

    pub fn powf(self, e: f64) -> Self {
        ValueBracket {
            lower: self.lower.powf(e),
            upper: self.upper.powf(e),
        }
    }

    pub fn scale(self, c: f64) -> Self {
        ValueBracket {
            lower: c * self.lower,
            upper: c * self.upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    Inconclusive,
    Violation,
}

/// Parameter tuple for the inequality family, with the derived exponents.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InequalityParams {
    pub n: usize,
    pub delta: f64,
    pub p: f64,
    pub kappa: f64,
}

impl InequalityParams {
    /// Value-side exponent `p(δ−κp)/(δ−p)` of the gradient-side inequality.
    pub fn sobolev_exponent(&self) -> f64 {
        self.p * (self.delta - self.kappa * self.p) / (self.delta - self.p)
    }

    /// Content dimension `δ − κp` on the value side.
    pub fn sobolev_content_dim(&self) -> f64 {
        self.delta - self.kappa * self.p
    }

    /// Lower edge `(n−1)/(1−κ/n)` of the admissible δ-window for the endpoint
    /// exponent `p = δ/n`.
    pub fn endpoint_delta_min(n: usize, kappa: f64) -> f64 {
        (n as f64 - 1.0) / (1.0 - kappa / n as f64)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Choquet ladder size.
    pub ladder: usize,
    /// Verdict cap `c` in `lhs ≤ c·rhs`.
    pub cap: f64,
    /// Value groups for the superlevel integrand.
    pub superlevel_groups: usize,
    pub bracket: BracketOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            ladder: 12,
            cap: 64.0,
            superlevel_groups: 24,
            bracket: BracketOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub theorem: String,
    pub n: usize,
    pub delta: f64,
    pub p: f64,
    pub kappa: f64,
    pub lhs: ValueBracket,
    pub rhs: ValueBracket,
    /// `[lhs_lower/rhs_upper, lhs_upper/rhs_lower]`.
    pub ratio: ValueBracket,
    pub verdict: Verdict,
    /// `lhs_upper / rhs_lower`, the recorded constant.
    pub empirical_constant: f64,
    pub cap: f64,
    pub extra: BTreeMap<String, f64>,
}

fn safe_div(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn make_report(
    theorem: &str,
    n: usize,
    delta: f64,
    p: f64,
    kappa: f64,
    lhs: ValueBracket,
    rhs: ValueBracket,
    cap: f64,
) -> InequalityReport {
    let ratio = ValueBracket {
        lower: safe_div(lhs.lower, rhs.upper),
        upper: safe_div(lhs.upper, rhs.lower),
    };
    let tiny = 1e-12 * lhs.upper.max(1.0);
    let verdict = if lhs.lower > cap * rhs.upper + tiny {
        Verdict::Violation
    } else if lhs.upper <= cap * rhs.lower + tiny {
        Verdict::Consistent
    } else {
        Verdict::Inconclusive
    };
    InequalityReport {
        theorem: theorem.to_string(),
        n,
        delta,
        p,
        kappa,
        lhs,
        rhs,
        ratio,
        verdict,
        empirical_constant: ratio.upper,
        cap,
        extra: BTreeMap::new(),
    }
}

fn gradient_of(f: &ScalarField) -> Result<ScalarField> {
    f.gradient_field()
}

/// Gradient-side inequality with Choquet integrals on both sides:
/// `(∫ |u|^{p(δ−κp)/(δ−p)} dH^{δ−κp})^{(δ−p)/(p(δ−κp))}
///  ≤ c (∫ |∇u|^p dH^δ)^{1/p}`.
pub fn verify_sobolev(
    f: &ScalarField,
    params: &InequalityParams,
    opts: &VerifyOptions,
) -> Result<InequalityReport> {
    let n = f.grid().n();
    if params.n != n {
        return Err(Error::invalid("params.n does not match the field's grid"));
    }
    let (delta, p, kappa) = (params.delta, params.p, params.kappa);
    if !(MIN_DELTA..=n as f64).contains(&delta) {
        return Err(Error::BadDelta {
            delta,
            min: MIN_DELTA,
            max: n as f64,
        });
    }
    if !(0.0..1.0).contains(&kappa) {
        return Err(Error::invalid(format!(
            "kappa must lie in [0, 1), got {kappa}"
        )));
    }
    if !(p > delta / n as f64 && p < delta) {
        return Err(Error::invalid(format!(
            "p must lie in (delta/n, delta) = ({}, {delta}), got {p}",
            delta / n as f64
        )));
    }
    if p > 0.95 * delta {
        return Err(Error::invalid(format!(
            "p = {p} too close to delta = {delta}: derived exponents overflow (need p ≤ 0.95·delta)"
        )));
    }
    let content_dim = params.sobolev_content_dim();
    if content_dim < MIN_DELTA {
        return Err(Error::BadDelta {
            delta: content_dim,
            min: MIN_DELTA,
            max: n as f64,
        });
    }
    let q = params.sobolev_exponent();
    let lhs = ValueBracket::from_pair(
        choquet_integral_with(&f.powered(q), content_dim, opts.ladder, &opts.bracket)?
            .powf_bracket(1.0 / q),
    );
    let grad = gradient_of(f)?;
    let rhs = ValueBracket::from_pair(
        choquet_integral_with(&grad.powered(p), delta, opts.ladder, &opts.bracket)?
            .powf_bracket(1.0 / p),
    );
    Ok(make_report(
        "sobolev", n, delta, p, kappa, lhs, rhs, opts.cap,
    ))
}

/// Strong Sobolev inequality with a Lebesgue gradient side:
/// `(∫ |u|^{(n−κ)/(n−1)} dH^{n−κ})^{(n−1)/(n−κ)} ≤ c ∫ |∇u| dx`.
/// At `κ = 0` it records the classical Lebesgue value alongside.
pub fn verify_w11(f: &ScalarField, kappa: f64, opts: &VerifyOptions) -> Result<InequalityReport> {
    let n = f.grid().n();
    if n < 2 {
        return Err(Error::invalid("needs grid dimension ≥ 2"));
    }
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::invalid(format!(
            "kappa must lie in [0, 1] (the largest possible range), got {kappa}"
        )));
    }
    let d = n as f64 - kappa;
    let e = d / (n as f64 - 1.0);
    let lhs = ValueBracket::from_pair(
        choquet_integral_with(&f.powered(e), d, opts.ladder, &opts.bracket)?
            .powf_bracket(1.0 / e),
    );
    let grad = gradient_of(f)?;
    let rhs = ValueBracket::point(grad.lebesgue_integral());
    let mut report = make_report("w11", n, d, 1.0, kappa, lhs, rhs, opts.cap);
    if kappa == 0.0 {
        let ecl = n as f64 / (n as f64 - 1.0);
        let classical = f.powered(ecl).lebesgue_integral().powf(1.0 / ecl);
        report
            .extra
            .insert("classical_lebesgue_lhs".to_string(), classical);
    }
    Ok(report)
}

/// Endpoint integrability `p = δ/n` on the gradient side:
/// `(∫ |u|^{(δ−κδ/n)/(n−1)} dH^{δ−κδ/n})^{(n−1)/(δ−κδ/n)}
///  ≤ c (∫ |∇u|^{δ/n} dH^δ)^{n/δ}` for `(n−1)/(1−κ/n) ≤ δ ≤ n`.
pub fn verify_endpoint(
    f: &ScalarField,
    delta: f64,
    kappa: f64,
    opts: &VerifyOptions,
) -> Result<InequalityReport> {
    let n = f.grid().n();
    if n < 2 {
        return Err(Error::invalid("needs grid dimension ≥ 2"));
    }
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::invalid(format!(
            "kappa must lie in [0, 1], got {kappa}"
        )));
    }
    let dmin = InequalityParams::endpoint_delta_min(n, kappa);
    if !(delta >= dmin - 1e-12 && delta <= n as f64 + 1e-12) {
        return Err(Error::invalid(format!(
            "delta must satisfy (n-1)/(1-kappa/n) <= delta <= n, i.e. {dmin} <= delta <= {n}, got {delta}"
        )));
    }
    let d = delta - kappa * delta / n as f64;
    let e = d / (n as f64 - 1.0);
    let p = delta / n as f64;
    let lhs = ValueBracket::from_pair(
        choquet_integral_with(&f.powered(e), d, opts.ladder, &opts.bracket)?
            .powf_bracket(1.0 / e),
    );
    let grad = gradient_of(f)?;
    let rhs = ValueBracket::from_pair(
        choquet_integral_with(&grad.powered(p), delta, opts.ladder, &opts.bracket)?
            .powf_bracket(1.0 / p),
    );
    Ok(make_report(
        "endpoint", n, delta, p, kappa, lhs, rhs, opts.cap,
    ))
}

/// Level-band inequality: `|b−a| · H^{n−κ}({u ≥ b})^{(n−1)/(n−κ)}` against
/// the gradient mass of the band `{a < u < b}`, evaluated through truncation.
pub fn verify_band(
    f: &ScalarField,
    a: f64,
    b: f64,
    kappa: f64,
    opts: &VerifyOptions,
) -> Result<InequalityReport> {
    let n = f.grid().n();
    if n < 2 {
        return Err(Error::invalid("needs grid dimension ≥ 2"));
    }
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::invalid(format!(
            "kappa must lie in [0, 1], got {kappa}"
        )));
    }
    let sup = f.max_value();
    if !(0.0 <= a && a < b && b < sup) {
        return Err(Error::invalid(format!(
            "band needs 0 ≤ a < b < max(u) = {sup}, got a = {a}, b = {b}"
        )));
    }
    let d = n as f64 - kappa;
    let e = (n as f64 - 1.0) / d;
    let level = f.superlevel_closed(b);
    let cb = content_bracket_with(&level, d, &opts.bracket)?;
    let lhs = ValueBracket {
        lower: cb.lower,
        upper: cb.upper,
    }
    .powf(e)
    .scale(b - a);
    let psi = truncate(f, a, b)?;
    let rhs = ValueBracket::point(psi.gradient_lebesgue_integral()?);
    Ok(make_report("band", n, d, 1.0, kappa, lhs, rhs, opts.cap))
}

/// Superlevel inequality: `‖u‖∞ ≤ c ∫ |∇u(x)| / H^{n−κ}({u ≥ u(x)})^{(n−1)/(n−κ)} dx`.
/// Closed superlevels are used exactly as stated.  Where `u(x) = 0` the
/// superlevel is all of space and the integrand vanishes.
pub fn verify_superlevel(
    f: &ScalarField,
    kappa: f64,
    opts: &VerifyOptions,
) -> Result<InequalityReport> {
    let n = f.grid().n();
    if n < 2 {
        return Err(Error::invalid("needs grid dimension ≥ 2"));
    }
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::invalid(format!(
            "kappa must lie in [0, 1], got {kappa}"
        )));
    }
    let sup = f.max_value();
    if sup <= 0.0 {
        return Err(Error::invalid("needs max(u) > 0"));
    }
    let grad = f
        .gradient_values()
        .ok_or_else(|| Error::invalid("field carries no gradient"))?;

    // value groups, always containing the smallest and largest positive value
    let distinct = f.distinct_positive_values();
    let g = opts.superlevel_groups.max(2);
    let groups: Vec<f64> = if distinct.len() <= g {
        distinct
    } else {
        let d = distinct.len();
        let mut picked: Vec<f64> = (0..g)
            .map(|j| distinct[j * (d - 1) / (g - 1)])
            .collect();
        picked.dedup();
        picked
    };
    // closed superlevels {f ≥ v} shrink as v grows
    let sets: Vec<_> = groups.iter().map(|&v| f.superlevel_closed(v)).collect();
    let brackets =
        crate::content::content_brackets_nested(&sets, n as f64 - kappa, &opts.bracket)?;

    let e = (n as f64 - 1.0) / (n as f64 - kappa);
    let hn = f.grid().cell_volume();
    let mut rhs_lower = 0.0f64;
    let mut rhs_upper = 0.0f64;
    for (idx, &v) in f.values().iter().enumerate() {
        if v <= 0.0 || grad[idx] == 0.0 {
            continue;
        }
        // snap up for the upper sum (subset ⇒ smaller denominator is sound),
        // snap down for the lower sum (superset ⇒ larger denominator)
        let up_pos = groups.partition_point(|&gv| gv < v);
        let down_pos = groups.partition_point(|&gv| gv <= v) - 1;
        let denom_up = brackets[up_pos].lower.powf(e);
        let denom_down = brackets[down_pos].upper.powf(e);
        rhs_upper += grad[idx] * hn / denom_up;
        rhs_lower += grad[idx] * hn / denom_down;
    }
    let lhs = ValueBracket::point(sup);
    let rhs = ValueBracket {
        lower: rhs_lower,
        upper: rhs_upper,
    };
    let mut report = make_report(
        "superlevel",
        n,
        n as f64 - kappa,
        1.0,
        kappa,
        lhs,
        rhs,
        opts.cap,
    );
    // every superlevel below the sup must have strictly positive content
    let positive = groups
        .iter()
        .zip(&brackets)
        .filter(|(&v, _)| v < sup)
        .all(|(_, b)| b.lower > 0.0);
    report
        .extra
        .insert("positive_denominators".to_string(), f64::from(positive as u8 as i8));
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub abscissa: f64,
    pub lhs: ValueBracket,
    pub rhs: ValueBracket,
    pub ratio: ValueBracket,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub kind: String,
    pub points: Vec<SweepPoint>,
    /// Log-log slope of `lhs_lower` against the abscissa.
    pub slope: f64,
    pub slope_half_width: f64,
    pub expected_slope: Option<f64>,
    pub warnings: Vec<String>,
}

/// Ordinary least squares on `(ln x, ln y)`; the half width is twice the
/// slope's standard error.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::invalid("slope fit needs at least 3 points"));
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(Error::invalid("log-log fit needs positive data"));
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let df = (m - 2.0).max(1.0);
    let stderr = (ss_res / df / sxx).sqrt();
    Ok((slope, 2.0 * stderr))
}

/// Tent sweep: `lhs = (∫ u_r^α dH^{2−κ})^{1/α}` (lower bracket) against
/// `∫ |∇u_r| dx`, fitted in log-log over shrinking `r`.  The expected slope
/// is `(2−κ)/α − 1`.
pub fn sharpness_tent(
    kappa: f64,
    alpha: f64,
    r_list: &[f64],
    cells: usize,
    opts: &VerifyOptions,
) -> Result<SweepReport> {
    if alpha <= 0.0 {
        return Err(Error::invalid("alpha must be positive"));
    }
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::invalid(format!(
            "kappa must lie in [0, 1], got {kappa}"
        )));
    }
    for w in r_list.windows(2) {
        if w[0] <= w[1] {
            return Err(Error::invalid("r_list must be strictly decreasing"));
        }
    }
    let delta = 2.0 - kappa;
    let mut points = Vec::new();
    let mut warnings = Vec::new();
    for &r in r_list {
        let field = match tent2d(&TentSpec::new(r, cells)) {
            Ok(f) => f,
            Err(Error::UnderResolved(msg)) => {
                warnings.push(format!("dropped r = {r}: {msg}"));
                continue;
            }
            Err(e) => return Err(e),
        };
        let cb = choquet_integral_with(&field.powered(alpha), delta, opts.ladder, &opts.bracket)?;
        let lhs = ValueBracket::from_pair(cb.powf_bracket(1.0 / alpha));
        let rhs = ValueBracket::point(field.gradient_lebesgue_integral()?);
        points.push(SweepPoint {
            abscissa: r,
            lhs,
            rhs,
            ratio: ValueBracket {
                lower: safe_div(lhs.lower, rhs.upper),
                upper: safe_div(lhs.upper, rhs.lower),
            },
        });
    }
    if points.len() < 3 {
        return Err(Error::invalid(format!(
            "only {} resolvable sweep points; need at least 3",
            points.len()
        )));
    }
    let fit: Vec<(f64, f64)> = points.iter().map(|p| (p.abscissa, p.lhs.lower)).collect();
    let (slope, half) = fit_loglog(&fit)?;
    Ok(SweepReport {
        kind: "tent".to_string(),
        points,
        slope,
        slope_half_width: half,
        expected_slope: Some((2.0 - kappa) / alpha - 1.0),
        warnings,
    })
}

/// Cantor blow-up sweep: `(∫ φ_k^p dH^δ)^{1/p}` (lower bracket) against the
/// shrinking gradient mass `∫ |∇φ_k| dx`, for `δ < n − 1`.
pub fn cantor_blowup(
    delta: f64,
    p: f64,
    levels: &[u32],
    opts: &VerifyOptions,
) -> Result<SweepReport> {
    if !(MIN_DELTA..1.0).contains(&delta) {
        return Err(Error::invalid(format!(
            "the blow-up example needs {MIN_DELTA} ≤ delta < n−1 = 1, got {delta}"
        )));
    }
    if p <= 0.0 {
        return Err(Error::invalid("p must be positive"));
    }
    for w in levels.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::invalid("levels must be strictly increasing"));
        }
    }
    let mut points = Vec::new();
    for &k in levels {
        let phi = cantor_capacitary(&CantorSpec::new(k))?;
        let cb = choquet_integral_with(&phi.powered(p), delta, opts.ladder, &opts.bracket)?;
        let lhs = ValueBracket::from_pair(cb.powf_bracket(1.0 / p));
        let rhs = ValueBracket::point(phi.gradient_lebesgue_integral()?);
        points.push(SweepPoint {
            abscissa: k as f64,
            lhs,
            rhs,
            ratio: ValueBracket {
                lower: safe_div(lhs.lower, rhs.upper),
                upper: safe_div(lhs.upper, rhs.lower),
            },
        });
    }
    let (slope, half) = if points.len() >= 3 {
        let fit: Vec<(f64, f64)> = points
            .iter()
            .map(|p| (p.abscissa, p.ratio.lower))
            .collect();
        fit_loglog(&fit)?
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(SweepReport {
        kind: "cantor".to_string(),
        points,
        slope,
        slope_half_width: half,
        expected_slope: None,
        warnings: Vec::new(),
    })
}
