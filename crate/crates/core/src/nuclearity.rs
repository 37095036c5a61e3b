//! Summability criteria for `r`-nuclearity of Hermite multipliers
//! `T_m : L^{p₁} → L^{p₂}`.
//!
//! Two sums are evaluated:
//!
//! * `s_r(m,p₁,p₂) = Σ_ν |m(ν)|^r ‖φ_ν‖^r_{p₂} ‖φ_ν‖^r_{p₁'}` with norms
//!   computed by quadrature, and
//! * `ϰ(m,p₁,p₂)`, the same sum with the norms replaced by their asymptotic
//!   laws. The lattice is split into cells `I_s` (exactly `s` entries `≤ k`);
//!   entries `≤ k` contribute the frozen factor `k^e (ln k)^L`, entries
//!   `> k` contribute `ν_j^e (ln ν_j)^L`. Nine `(e, L)` laws arise from the
//!   three norm regimes of `p₂` crossed with the three of `p₁'`.
//!
//! A finite partial sum never implies finiteness on its own: a verdict is
//! [`Verdict::Finite`] only when a certified tail bound is below tolerance.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::hermite::{count_up_to, enumerate_level, MultiIndex};
use crate::math::{floor, ln, pow};
use crate::quadrature::{lp_norm_1d, norm_floor, norm_growth, NormRegime};
use crate::spectral::Symbol;
use crate::sum::CompensatedSum;
use crate::tail::{lattice_diverges, lattice_tail, FactorFloor, FactorGrowth};

/// Regime of `p₂`: `sub4` for `1 ≤ p₂ < 4`, `eq4` at `4`, `super4` above.
pub type P2Regime = NormRegime;

/// Branch of `p₁`, equivalently the regime of the conjugate `p₁'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum P1Branch {
    /// `4/3 < p₁ < ∞`, i.e. `p₁' < 4`.
    Gt43,
    /// `p₁ = 4/3`, i.e. `p₁' = 4`.
    Eq43,
    /// `1 < p₁ < 4/3`, i.e. `p₁' > 4`.
    Lt43,
}

/// Default partition cutoff.
pub const DEFAULT_CUTOFF: u32 = 10;

/// Truncation order of the first pass of the certifying drivers, per dimension.
pub const DEFAULT_ORDER_PER_DIM: u32 = 200;

/// Maximal number of doublings of the truncation order in the drivers.
pub const DOUBLING_CAP: u32 = 3;

/// Largest lattice we are willing to sum term by term.
pub const MAX_TERMS: u64 = 100_000_000;

/// Largest truncation order for `s_r`, whose cost is dominated by the
/// quadrature norms (roughly cubic in the order).
pub const S_R_MAX_ORDER: u32 = 1000;

/// Quadrature tolerance for the norms entering `s_r`.
pub const NORM_TOL: f64 = 1e-10;

/// One of the nine `(p₂, p₁)` regime combinations, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeCase {
    pub p1: Exponent,
    pub p2: Exponent,
    pub r: f64,
    pub k: u32,
    pub p2_regime: P2Regime,
    pub p1_branch: P1Branch,
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("nuclearity order must lie in (0, 1], got {r}")))
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::domain("dimension n must be ≥ 1"))
    } else {
        Ok(())
    }
}

fn check_tolerance(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("tolerance must be positive, got {tol}")))
    }
}

/// Assigns the regime tags. `p₁ = 1` and `p₁ = ∞` lie outside the theorems.
pub fn classify_regime(p1: Exponent, p2: Exponent, r: f64, k: u32) -> Result<RegimeCase> {
    if p1.is_infinite() || p1.value() <= 1.0 {
        return Err(Error::Unsupported { hypothesis: "1 < p1 < ∞" });
    }
    check_r(r)?;
    if k < 2 {
        return Err(Error::domain(format!("partition cutoff must be k ≥ 2, got {k}")));
    }
    let p1_branch = match NormRegime::of(p1.conjugate()) {
        NormRegime::Sub4 => P1Branch::Gt43,
        NormRegime::Eq4 => P1Branch::Eq43,
        NormRegime::Super4 => P1Branch::Lt43,
    };
    Ok(RegimeCase { p1, p2, r, k, p2_regime: NormRegime::of(p2), p1_branch })
}

impl RegimeCase {
    pub fn p1_conjugate(&self) -> Exponent {
        self.p1.conjugate()
    }

    /// Per-coordinate `(e, L)`: an entry `u > k` contributes `u^e (ln u)^L`.
    pub fn law(&self) -> (f64, f64) {
        let r = self.r;
        let a = self.p2.recip();
        let b = self.p1.recip();
        // 1/p₂' = 1 − 1/p₂, which is 1 at p₂ = ∞.
        let a_dual = self.p2.conjugate().recip();
        use NormRegime::*;
        use P1Branch::*;
        match (self.p2_regime, self.p1_branch) {
            (Sub4, Gt43) => (0.5 * r * (a - b), 0.0),
            (Sub4, Eq43) => (0.5 * r * (a - 0.75), r),
            (Sub4, Lt43) => (0.5 * r * (a + b / 3.0 - 1.0), 0.0),
            (Eq4, Gt43) => (0.5 * r * (0.25 - b), r),
            (Eq4, Eq43) => (-0.25 * r, 2.0 * r),
            (Eq4, Lt43) => (r / 6.0 * (b - 2.25), r),
            (Super4, Gt43) => (0.5 * r * (a_dual / 3.0 - b), 0.0),
            (Super4, Eq43) => (-r / 6.0 * (a + 1.25), r),
            (Super4, Lt43) => (r / 6.0 * (b - a - 2.0), 0.0),
        }
    }

    /// Weight factor of a single coordinate.
    pub fn coordinate_factor(&self, u: u32) -> f64 {
        let (e, l) = self.law();
        let base = f64::from(u.max(self.k));
        let mut v = pow(base, e);
        if l != 0.0 {
            v *= pow(ln(base), l);
        }
        v
    }

    /// `f(u) ≤ scale · K^power (ln K)^L` for `u ≤ K`, valid once `K ≥ k`.
    fn growth(&self) -> FactorGrowth {
        let (e, l) = self.law();
        if e >= 0.0 {
            FactorGrowth { scale: 1.0, power: e, log_power: l }
        } else {
            FactorGrowth { scale: pow(f64::from(self.k), e), power: 0.0, log_power: l }
        }
    }

    /// `f(u) ≥ scale · (K + 3/2)^{-decay}` for `u ≤ K`, valid once `K ≥ k`.
    fn floor(&self) -> FactorFloor {
        let (e, l) = self.law();
        let k = f64::from(self.k);
        let log_part = pow(ln(k), l);
        if e >= 0.0 {
            FactorFloor { scale: pow(k, e) * log_part, decay: 0.0 }
        } else {
            FactorFloor { scale: log_part, decay: -e }
        }
    }
}

/// Cell `I_s` of the partition of `ℕ₀ⁿ`: exactly `s` entries are `≤ k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionCell {
    pub s: usize,
    pub k: u32,
}

impl PartitionCell {
    pub fn contains(&self, nu: &MultiIndex) -> bool {
        partition_cell_of(nu, self.k) == self.s
    }
}

/// `#{j : ν_j ≤ k}`.
pub fn partition_cell_of(nu: &MultiIndex, k: u32) -> usize {
    nu.entries().iter().filter(|&&u| u <= k).count()
}

/// The asymptotic weight of `ν` in the sum `ϰ`.
pub fn kappa_weight(case: &RegimeCase, nu: &MultiIndex) -> f64 {
    nu.entries().iter().fold(1.0, |acc, &u| acc * case.coordinate_factor(u))
}

/// Three-valued outcome of a summability test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// A certified tail bound is below the tolerance.
    Finite,
    /// A lower comparison series diverges.
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionMethod {
    Kappa,
    SR,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub method: CriterionMethod,
    pub partial_sum: f64,
    pub tail_bound: Option<f64>,
    #[serde(rename = "N")]
    pub truncation_order: u32,
    pub verdict: Verdict,
    pub tolerance: f64,
    pub p2_regime: Option<P2Regime>,
    pub p1_branch: Option<P1Branch>,
    pub k: Option<u32>,
    pub r: f64,
    pub p1: Exponent,
    pub p2: Exponent,
    pub n: usize,
}

fn abs_pow(v: f64, r: f64) -> f64 {
    if r == 1.0 {
        v.abs()
    } else {
        pow(v.abs(), r)
    }
}

fn check_budget(n: usize, max_order: u32) -> Result<()> {
    match count_up_to(n, u64::from(max_order)) {
        Some(c) if c <= MAX_TERMS => Ok(()),
        _ => Err(Error::capability(format!(
            "lattice |ν| ≤ {max_order} in dimension {n} exceeds {MAX_TERMS} terms"
        ))),
    }
}

/// Partial sums of `Σ Π_j factors[ν_j] · |m(ν)|^r` at each checkpoint order
/// (ascending). Terms are accumulated level by level in graded order.
fn weighted_partials(
    m: &Symbol,
    n: usize,
    factors: &[f64],
    r: f64,
    checkpoints: &[u32],
) -> Result<Vec<f64>> {
    let last = checkpoints.last().copied().unwrap_or(0);
    check_budget(n, last)?;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    let mut acc = CompensatedSum::new();
    for level in 0..=last {
        let radial = m.level_value(u64::from(level), n);
        for nu in enumerate_level(n, level)? {
            let mv = radial.unwrap_or_else(|| m.eval(&nu));
            if mv == 0.0 {
                continue;
            }
            let w = nu.entries().iter().fold(1.0, |a, &u| a * factors[u as usize]);
            acc.add(w * abs_pow(mv, r));
        }
        while next.peek().is_some_and(|&&c| c == level) {
            out.push(acc.value());
            next.next();
        }
    }
    Ok(out)
}

/// Tail bound and verdict for a sum truncated at `max_order`.
fn certify(
    m: &Symbol,
    n: usize,
    max_order: u32,
    growth: FactorGrowth,
    floor: FactorFloor,
    r: f64,
    tol: f64,
) -> (Option<f64>, Verdict) {
    if let Some(order) = m.support_order() {
        if order <= u64::from(max_order) {
            return (Some(0.0), Verdict::Finite);
        }
    }
    let tail = m.upper_envelope(n).and_then(|env| lattice_tail(n, u64::from(max_order), growth, &env, r));
    if let Some(b) = tail {
        if b < tol {
            return (Some(b), Verdict::Finite);
        }
    }
    let diverges = m.lower_envelope(n).is_some_and(|env| lattice_diverges(n, floor, &env, r));
    (tail, if diverges { Verdict::Divergent } else { Verdict::Inconclusive })
}

/// Finite-support symbols are summed through their whole support.
fn effective_order(m: &Symbol, max_order: u32) -> u32 {
    m.support_order().map_or(max_order, |o| max_order.max(o as u32))
}

fn kappa_factors(case: &RegimeCase, max_order: u32) -> Vec<f64> {
    (0..=max_order).map(|u| case.coordinate_factor(u)).collect()
}

/// `Σ_{|ν|≤N} ϰ-weight(ν) |m(ν)|^r` with a certified tail and a verdict.
pub fn kappa_sum(m: &Symbol, case: &RegimeCase, n: usize, max_order: u32, tol: f64) -> Result<CriterionReport> {
    check_dim(n)?;
    check_tolerance(tol)?;
    let needed = case.k as u64 * n as u64;
    if u64::from(max_order) < needed {
        return Err(Error::domain(format!(
            "truncation order {max_order} must be ≥ k·n = {needed} so every cell is sampled"
        )));
    }
    let order = effective_order(m, max_order);
    let partial = weighted_partials(m, n, &kappa_factors(case, order), case.r, &[order])?[0];
    let (tail_bound, verdict) = certify(m, n, order, case.growth(), case.floor(), case.r, tol);
    Ok(CriterionReport {
        method: CriterionMethod::Kappa,
        partial_sum: partial,
        tail_bound,
        truncation_order: order,
        verdict,
        tolerance: tol,
        p2_regime: Some(case.p2_regime),
        p1_branch: Some(case.p1_branch),
        k: Some(case.k),
        r: case.r,
        p1: case.p1,
        p2: case.p2,
        n,
    })
}

/// `Σ_{|ν|≤N} |m(ν)|^r`, summed in the same order as [`kappa_sum`].
pub fn symbol_power_sum(m: &Symbol, r: f64, n: usize, max_order: u32) -> Result<f64> {
    check_dim(n)?;
    check_r(r)?;
    let order = effective_order(m, max_order);
    Ok(weighted_partials(m, n, &vec![1.0; order as usize + 1], r, &[order])?[0])
}

/// Per-coordinate factors `‖φ_u‖^r_{p₂} ‖φ_u‖^r_{p₁'}` for `u ≤ max_order`.
fn s_r_factors(p1: Exponent, p2: Exponent, r: f64, max_order: u32) -> Result<Vec<f64>> {
    let dual = p1.conjugate();
    (0..=max_order)
        .map(|u| {
            let a = lp_norm_1d(u, p2, NORM_TOL)?;
            let b = if dual == p2 { a } else { lp_norm_1d(u, dual, NORM_TOL)? };
            Ok(pow(a * b, r))
        })
        .collect()
}

fn s_r_bounds(p1: Exponent, p2: Exponent, r: f64) -> (FactorGrowth, FactorFloor) {
    let dual = p1.conjugate();
    let (g2, a2) = norm_growth(p2);
    let (g1, a1) = norm_growth(dual);
    let (f2, d2) = norm_floor(p2);
    let (f1, d1) = norm_floor(dual);
    (
        FactorGrowth { scale: pow(g2 * g1, r), power: r * (a2 + a1), log_power: 0.0 },
        FactorFloor { scale: pow(f2 * f1, r), decay: r * (d2 + d1) },
    )
}

/// `Σ_{|ν|≤N} |m(ν)|^r ‖φ_ν‖^r_{p₂} ‖φ_ν‖^r_{p₁'}` with quadrature norms.
///
/// The tail is bounded with rigorous norm bounds (uniform bounds on `|φ_u|`
/// and Hölder), not with the asymptotic laws, so the verdict does not rest on
/// unquantified constants. `p₁ ∈ [1, ∞]` is accepted here.
pub fn s_r_sum(
    m: &Symbol,
    p1: Exponent,
    p2: Exponent,
    r: f64,
    n: usize,
    max_order: u32,
    tol: f64,
) -> Result<CriterionReport> {
    check_dim(n)?;
    check_r(r)?;
    check_tolerance(tol)?;
    let order = effective_order(m, max_order);
    if order > S_R_MAX_ORDER {
        return Err(Error::capability(format!("s_r truncation order is limited to {S_R_MAX_ORDER}")));
    }
    check_budget(n, order)?;
    let factors = s_r_factors(p1, p2, r, order)?;
    let partial = weighted_partials(m, n, &factors, r, &[order])?[0];
    let (growth, floor) = s_r_bounds(p1, p2, r);
    let (tail_bound, verdict) = certify(m, n, order, growth, floor, r, tol);
    let case = classify_regime(p1, p2, r, DEFAULT_CUTOFF).ok();
    Ok(CriterionReport {
        method: CriterionMethod::SR,
        partial_sum: partial,
        tail_bound,
        truncation_order: order,
        verdict,
        tolerance: tol,
        p2_regime: Some(NormRegime::of(p2)),
        p1_branch: case.map(|c| c.p1_branch),
        k: None,
        r,
        p1,
        p2,
        n,
    })
}

/// [`kappa_sum`] at `N = 200n`, doubling `N` while the verdict is inconclusive.
pub fn certify_kappa(m: &Symbol, case: &RegimeCase, n: usize, tol: f64) -> Result<CriterionReport> {
    let mut order = (DEFAULT_ORDER_PER_DIM * n as u32).max(case.k * n as u32);
    let mut report = kappa_sum(m, case, n, order, tol)?;
    for _ in 0..DOUBLING_CAP {
        if report.verdict != Verdict::Inconclusive || count_up_to(n, 2 * u64::from(order)).map_or(true, |c| c > MAX_TERMS) {
            break;
        }
        order *= 2;
        report = kappa_sum(m, case, n, order, tol)?;
    }
    Ok(report)
}

/// [`s_r_sum`] at `N = 200n`, doubling `N` while the verdict is inconclusive.
pub fn certify_s_r(m: &Symbol, p1: Exponent, p2: Exponent, r: f64, n: usize, tol: f64) -> Result<CriterionReport> {
    let mut order = (DEFAULT_ORDER_PER_DIM * n as u32).min(S_R_MAX_ORDER);
    let mut report = s_r_sum(m, p1, p2, r, n, order, tol)?;
    for _ in 0..DOUBLING_CAP {
        let next = 2 * order;
        let too_big = next > S_R_MAX_ORDER || count_up_to(n, u64::from(next)).map_or(true, |c| c > MAX_TERMS);
        if report.verdict != Verdict::Inconclusive || too_big {
            break;
        }
        order = next;
        report = s_r_sum(m, p1, p2, r, n, order, tol)?;
    }
    Ok(report)
}

/// Ratio of the `s_r` and `ϰ` partial sums at `N` and `2N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrKappaComparison {
    #[serde(rename = "N")]
    pub truncation_order: u32,
    pub s_r: [f64; 2],
    pub kappa: [f64; 2],
    /// `s_r/ϰ` at `N` and `2N`; `1` when both vanish, absent when only one does.
    pub ratio: [Option<f64>; 2],
    /// `|ratio(2N)/ratio(N) − 1|`.
    pub drift: Option<f64>,
    /// Exactly one of the two partial sums vanished.
    pub anomaly: bool,
}

fn sum_ratio(a: f64, b: f64) -> Option<f64> {
    match (a == 0.0, b == 0.0) {
        (true, true) => Some(1.0),
        (false, false) => Some(a / b),
        _ => None,
    }
}

pub fn compare_sr_kappa(m: &Symbol, case: &RegimeCase, n: usize, max_order: u32) -> Result<SrKappaComparison> {
    check_dim(n)?;
    let hi = 2 * max_order;
    if hi > S_R_MAX_ORDER {
        return Err(Error::capability(format!("s_r truncation order is limited to {S_R_MAX_ORDER}")));
    }
    let checkpoints = [max_order, hi];
    let sr_factors = s_r_factors(case.p1, case.p2, case.r, hi)?;
    let s = weighted_partials(m, n, &sr_factors, case.r, &checkpoints)?;
    let kp = weighted_partials(m, n, &kappa_factors(case, hi), case.r, &checkpoints)?;
    let ratio = [sum_ratio(s[0], kp[0]), sum_ratio(s[1], kp[1])];
    let drift = match ratio {
        [Some(a), Some(b)] => Some((b / a - 1.0).abs()),
        _ => None,
    };
    Ok(SrKappaComparison {
        truncation_order: max_order,
        s_r: [s[0], s[1]],
        kappa: [kp[0], kp[1]],
        ratio,
        drift,
        anomaly: ratio.iter().any(Option::is_none),
    })
}

/// Best rational `h/k` with `k ≤ 10⁶` that rounds exactly to `x`.
fn exact_small_rational(x: f64) -> Option<Ratio<i64>> {
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut y = x;
    for _ in 0..48 {
        let a = floor(y);
        if !(a.abs() < 1e12) {
            return None;
        }
        let a = a as i64;
        let h = a.checked_mul(h1)?.checked_add(h0)?;
        let k = a.checked_mul(k1)?.checked_add(k0)?;
        if k > 1_000_000 {
            return None;
        }
        if h as f64 / k as f64 == x {
            return Some(Ratio::new(h, k));
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let frac = y - a as f64;
        if frac == 0.0 {
            return None;
        }
        y = 1.0 / frac;
    }
    None
}

/// `r = 1/(1 + |1/p − 1/2|)` in exact rational arithmetic.
pub fn gl_condition_exact(p: Ratio<i64>) -> Result<Ratio<i64>> {
    if p < Ratio::from_integer(1) {
        return Err(Error::domain(format!("Lebesgue exponent must be ≥ 1, got {p}")));
    }
    let half = Ratio::new(1, 2);
    let d = p.recip() - half;
    let d = if d < Ratio::from_integer(0) { -d } else { d };
    Ok((Ratio::from_integer(1) + d).recip())
}

/// `r = 1/(1 + |1/p − 1/2|)`.
///
/// When `p` is the nearest double to a rational with a small denominator the
/// computation is exact, so dual exponents give identical results.
pub fn gl_condition(p: Exponent) -> f64 {
    if p.is_infinite() {
        return 2.0 / 3.0;
    }
    match exact_small_rational(p.value()).and_then(|q| gl_condition_exact(q).ok()) {
        Some(r) => *r.numer() as f64 / *r.denom() as f64,
        None => 1.0 / (1.0 + (p.recip() - 0.5).abs()),
    }
}
