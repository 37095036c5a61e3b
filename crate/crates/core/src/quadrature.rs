//! Quadrature on `ℝ` and `ℝⁿ`, and `L^p` norms of Hermite functions.
//!
//! Gauss–Hermite rules handle inner products of Hermite expansions exactly.
//! `L^p` norms use nested tanh-sinh panels whose breakpoints are the zeros
//! of `φ_ν`: between consecutive zeros `|φ_ν|^p` is smooth apart from an
//! algebraic endpoint singularity, which the double-exponential map absorbs.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::hermite::{eval_phi_1d, MultiIndex};
use crate::math::{self, cosh, exp, ln, lgamma, pow, sinh, sqrt, PHI_SUP_BOUND, PI, PI_POW_NEG_QUARTER};
use crate::sum::CompensatedSum;

/// Largest Gauss–Hermite rule we build.
pub const MAX_GAUSS_HERMITE_NODES: usize = 10_000;

/// Default partition cutoff `k`.
pub const DEFAULT_CUTOFF: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    GaussHermite,
    TruncatedAdaptive,
}

/// Nodes and weights of a one-dimensional rule.
///
/// For `GaussHermite` the `weights` integrate against `e^{-x²}`; for
/// `TruncatedAdaptive` they integrate against `dx` on `[-R, R]`. Either way
/// [`QuadratureRule::dx_weights`] gives weights for plain `∫ f dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    kind: RuleKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    dx_weights: Vec<f64>,
    truncation_radius: Option<f64>,
}

impl QuadratureRule {
    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dx_weights(&self) -> &[f64] {
        &self.dx_weights
    }

    pub fn truncation_radius(&self) -> Option<f64> {
        self.truncation_radius
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫ f dx` over the rule's support.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.dx_weights)
            .map(|(&x, &w)| w * f(x))
            .collect::<CompensatedSum>()
            .value()
    }

    /// Composite Gauss–Legendre rule on `[-radius, radius]` with `panels`
    /// equal panels of `order` points each.
    pub fn truncated(radius: f64, panels: usize, order: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || panels == 0 || order == 0 {
            return Err(Error::domain("truncated rule needs radius > 0, panels ≥ 1, order ≥ 1"));
        }
        let (gx, gw) = gauss_legendre(order)?;
        let width = 2.0 * radius / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let mid = -radius + (p as f64 + 0.5) * width;
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(mid + 0.5 * width * x);
                weights.push(0.5 * width * w);
            }
        }
        Ok(QuadratureRule {
            kind: RuleKind::TruncatedAdaptive,
            nodes,
            dx_weights: weights.clone(),
            weights,
            truncation_radius: Some(radius),
        })
    }
}

/// Orthonormal Hermite polynomials `p̃_m(z), p̃_{m−1}(z)` (weight `e^{-z²}`)
/// as mantissas sharing a base-2 exponent.
fn orthonormal_pair(m: usize, z: f64) -> (f64, f64, i32) {
    let mut prev = 0.0;
    let mut cur = PI_POW_NEG_QUARTER;
    let mut exp2 = 0;
    for k in 0..m {
        let kf = k as f64;
        let next = z * sqrt(2.0 / (kf + 1.0)) * cur - sqrt(kf / (kf + 1.0)) * prev;
        prev = cur;
        cur = next;
        if cur.abs() > 1e150 {
            cur = libm::ldexp(cur, -500);
            prev = libm::ldexp(prev, -500);
            exp2 += 500;
        }
    }
    (cur, prev, exp2)
}

/// Positive zeros of `p̃_M`, ascending.
///
/// Sign changes are bracketed on a grid whose step is a quarter of the
/// smallest zero spacing `π/√(2M+1)`, then polished by Newton's method
/// safeguarded with bisection.
fn positive_hermite_roots(m: usize) -> Result<Vec<f64>> {
    let mf = m as f64;
    let h = 0.25 * PI / sqrt(2.0 * mf + 1.0);
    let top = sqrt(2.0 * mf + 1.0) + 1.0;
    let sign = |z: f64| orthonormal_pair(m, z).0.is_sign_negative();
    let mut roots = Vec::with_capacity(m / 2);
    let mut x = if m % 2 == 1 { 0.5 * h } else { 0.0 };
    let mut s = sign(x);
    while x < top {
        let xn = x + h;
        let sn = sign(xn);
        if sn != s {
            let (mut a, mut b) = (x, xn);
            let mut z = 0.5 * (a + b);
            for _ in 0..100 {
                let (pm, pm1, _) = orthonormal_pair(m, z);
                if pm == 0.0 {
                    break;
                }
                if pm.is_sign_negative() == s {
                    a = z;
                } else {
                    b = z;
                }
                let mut next = z - pm / (sqrt(2.0 * mf) * pm1);
                if !(next > a && next < b) {
                    next = 0.5 * (a + b);
                }
                let done = (next - z).abs() <= 2.0 * f64::EPSILON * z;
                z = next;
                if done {
                    break;
                }
            }
            roots.push(z);
        }
        x = xn;
        s = sn;
    }
    Ok(roots)
}

/// The `M`-point Gauss–Hermite rule for the weight `e^{-x²}`. Weights of the outermost
/// nodes underflow to zero once `M` exceeds roughly 700; the `dx_weights`
/// (`w_i e^{x_i²}`) stay positive for every `M`.
pub fn gauss_hermite_rule(m: usize) -> Result<QuadratureRule> {
    if m == 0 || m > MAX_GAUSS_HERMITE_NODES {
        return Err(Error::capability(format!(
            "Gauss–Hermite node count must lie in 1..={MAX_GAUSS_HERMITE_NODES}, got {m}"
        )));
    }
    let mf = m as f64;
    let half = m / 2;
    let roots = positive_hermite_roots(m)?;
    if roots.len() != half {
        return Err(Error::Convergence { previous: half as f64, last: roots.len() as f64 });
    }

    // w e^{z²} = 2 / (2M ψ_{M−1}(z)²) with ψ the Hermite function.
    let scaled = |z: f64| -> f64 {
        let (_, pm1, e2) = orthonormal_pair(m, z);
        let ln_psi = ln(pm1.abs()) + f64::from(e2) * math::LN_2 - 0.5 * z * z;
        exp(-ln(mf) - 2.0 * ln_psi)
    };

    let mut nodes = Vec::with_capacity(m);
    nodes.extend(roots.iter().rev().map(|r| -r));
    if m % 2 == 1 {
        nodes.push(0.0);
    }
    nodes.extend(roots.iter().copied());
    let dx_weights: Vec<f64> = nodes.iter().map(|&x| scaled(x.abs())).collect();
    let weights = nodes.iter().zip(&dx_weights).map(|(&x, &w)| w * exp(-x * x)).collect();
    Ok(QuadratureRule {
        kind: RuleKind::GaussHermite,
        nodes,
        weights,
        dx_weights,
        truncation_radius: None,
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 || order > MAX_GAUSS_HERMITE_NODES {
        return Err(Error::capability(format!("Gauss–Legendre order {order} out of range")));
    }
    let nf = order as f64;
    let mut x = vec![0.0; order];
    let mut w = vec![0.0; order];
    for i in 0..order.div_ceil(2) {
        let mut z = math::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=order {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if order == 1 { z } else { p1 };
            let pm1 = if order == 1 { 1.0 } else { p0 };
            dp = nf * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        if order == 1 {
            z = 0.0;
            dp = 1.0;
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[order - 1 - i] = w[i];
    }
    Ok((x, w))
}

const TANH_SINH_T_MAX: f64 = 3.5;
const TANH_SINH_MAX_LEVEL: u32 = 9;
const TANH_SINH_MIN_LEVEL: u32 = 3;

struct Panel {
    a: f64,
    b: f64,
    sum: f64,
    level: u32,
    estimate: f64,
    frozen: bool,
}

impl Panel {
    fn eval_at(&self, t: f64, f: &impl Fn(f64) -> f64) -> f64 {
        let hw = 0.5 * (self.b - self.a);
        if t == 0.0 {
            return hw * core::f64::consts::FRAC_PI_2 * f(0.5 * (self.a + self.b));
        }
        let u = core::f64::consts::FRAC_PI_2 * sinh(t.abs());
        let ch = cosh(u);
        // Distance to the nearest endpoint, computed without cancellation.
        let dist = hw / (exp(u) * ch);
        let x = if t < 0.0 { self.a + dist } else { self.b - dist };
        let w = hw * core::f64::consts::FRAC_PI_2 * cosh(t) / (ch * ch);
        if w == 0.0 {
            0.0
        } else {
            w * f(x)
        }
    }

    fn start(a: f64, b: f64, f: &impl Fn(f64) -> f64) -> Panel {
        let mut p = Panel { a, b, sum: 0.0, level: 0, estimate: 0.0, frozen: false };
        let mut acc = CompensatedSum::new();
        let kmax = TANH_SINH_T_MAX as i32;
        for k in -kmax..=kmax {
            acc.add(p.eval_at(f64::from(k), f));
        }
        p.sum = acc.value();
        p.estimate = p.sum;
        p
    }

    /// Halves the step, reusing every previous point.
    fn refine(&mut self, f: &impl Fn(f64) -> f64) {
        self.level += 1;
        let h = libm::ldexp(1.0, -(self.level as i32));
        let mut acc = CompensatedSum::new();
        acc.add(self.sum);
        let mut j = 0u32;
        loop {
            let t = f64::from(2 * j + 1) * h;
            if t > TANH_SINH_T_MAX {
                break;
            }
            acc.add(self.eval_at(t, f));
            acc.add(self.eval_at(-t, f));
            j += 1;
        }
        self.sum = acc.value();
        self.estimate = h * self.sum;
    }
}

/// `∫ f` over `[breaks[0], breaks[last]]` with one nested tanh-sinh panel
/// per break interval. Refinement proceeds level by level; it stops once two
/// successive global estimates agree to `tol` (relative).
pub(crate) fn integrate_panels(breaks: &[f64], f: impl Fn(f64) -> f64, tol: f64) -> Result<f64> {
    let mut panels: Vec<Panel> =
        breaks.windows(2).filter(|w| w[1] > w[0]).map(|w| Panel::start(w[0], w[1], &f)).collect();
    if panels.is_empty() {
        return Ok(0.0);
    }
    let total = |ps: &[Panel]| ps.iter().map(|p| p.estimate).collect::<CompensatedSum>().value();
    let mut previous = total(&panels);
    let count = panels.len() as f64;
    for level in 1..=TANH_SINH_MAX_LEVEL {
        let panel_tol = 0.1 * tol * previous.abs() / count;
        for p in panels.iter_mut().filter(|p| !p.frozen) {
            let old = p.estimate;
            p.refine(&f);
            if level >= TANH_SINH_MIN_LEVEL && (p.estimate - old).abs() <= panel_tol {
                p.frozen = true;
            }
        }
        let current = total(&panels);
        if level >= TANH_SINH_MIN_LEVEL && (current - previous).abs() <= tol * current.abs() {
            return Ok(current);
        }
        previous = current;
    }
    let last = total(&panels);
    Err(Error::Convergence { previous, last })
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 1e-14 && tol < 1e-2 {
        Ok(())
    } else {
        Err(Error::domain(format!("tolerance must lie in (1e-14, 1e-2), got {tol}")))
    }
}

/// Truncation radius `√(2λ) + 12` with `λ = 2ν + 1`.
pub fn truncation_radius(degree: u32) -> f64 {
    sqrt(2.0 * (2.0 * f64::from(degree) + 1.0)) + 12.0
}

/// Positive zeros of `φ_degree`, ascending.
fn positive_zeros(degree: u32) -> Result<Vec<f64>> {
    if degree == 0 {
        return Ok(Vec::new());
    }
    let rule = gauss_hermite_rule(degree as usize)?;
    Ok(rule.nodes().iter().copied().filter(|&x| x > 0.0).collect())
}

/// `‖φ_degree‖_{L^p(ℝ)}`.
pub fn lp_norm_1d(degree: u32, p: Exponent, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if p.is_infinite() {
        return sup_norm_1d(degree);
    }
    let radius = truncation_radius(degree);
    let mut breaks = vec![0.0];
    breaks.extend(positive_zeros(degree)?);
    let last = *breaks.last().unwrap_or(&0.0);
    let tail_panels = math::ceil(radius - last).max(1.0) as usize;
    let step = (radius - last) / tail_panels as f64;
    breaks.extend((1..=tail_panels).map(|i| last + step * i as f64));
    let pv = p.value();
    let half = integrate_panels(
        &breaks,
        |x| eval_phi_1d(degree, x).map_or(0.0, |v| v.abs_pow(pv)),
        tol,
    )?;
    Ok(pow(2.0 * half, 1.0 / pv))
}

/// `sup |φ_degree|` from a grid of spacing `0.25/√λ` plus golden-section
/// polishing around the best grid point.
pub fn sup_norm_1d(degree: u32) -> Result<f64> {
    let lambda = 2.0 * f64::from(degree) + 1.0;
    let h = 0.25 / sqrt(lambda);
    let radius = truncation_radius(degree);
    let g = |x: f64| eval_phi_1d(degree, x).map_or(0.0, |v| v.to_f64().abs());
    let steps = math::ceil(radius / h) as usize;
    let (mut best_x, mut best) = (0.0, g(0.0));
    for i in 1..=steps {
        let x = i as f64 * h;
        let v = g(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let inv_phi = 0.5 * (sqrt(5.0) - 1.0);
    let (mut a, mut b) = ((best_x - h).max(0.0), best_x + h);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = g(d);
        }
    }
    Ok(best.max(fc).max(fd))
}

/// `‖φ_ν‖_{L^p(ℝⁿ)} = Π_j ‖φ_{ν_j}‖_{L^p(ℝ)}`.
pub fn lp_norm_phi(nu: &MultiIndex, p: Exponent, tol: f64) -> Result<f64> {
    nu.entries().iter().try_fold(1.0, |acc, &d| Ok(acc * lp_norm_1d(d, p, tol)?))
}

/// Which of the three asymptotic laws governs `‖φ_ν‖_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormRegime {
    Sub4,
    Eq4,
    Super4,
}

impl NormRegime {
    pub fn of(p: Exponent) -> NormRegime {
        if p.near(4.0) {
            NormRegime::Eq4
        } else if p.value() < 4.0 {
            NormRegime::Sub4
        } else {
            NormRegime::Super4
        }
    }
}

/// Power of `ν` in the one-dimensional norm asymptotics:
/// `1/(2p) − 1/4` for `p < 4`, `−1/8` (times `ln ν`) at `p = 4`, and
/// `−1/(6p) − 1/12` for `p > 4`.
pub fn asymptotic_power(p: Exponent) -> f64 {
    match NormRegime::of(p) {
        NormRegime::Sub4 => 0.5 * p.recip() - 0.25,
        NormRegime::Eq4 => -0.125,
        NormRegime::Super4 => -p.recip() / 6.0 - 1.0 / 12.0,
    }
}

/// The one-dimensional asymptotic model of `‖φ_ν‖_p` with partition cutoff `k`.
///
/// Above the cutoff it is the bare power law (with the `ln ν` factor at
/// `p = 4`); at or below it is frozen to `ρ_k = ‖φ_k‖_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Model {
    pub p: Exponent,
    pub k: u32,
    pub rho_k: f64,
}

impl Lemma1Model {
    pub fn new(p: Exponent, k: u32, tol: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!("partition cutoff must be k ≥ 2, got {k}")));
        }
        Ok(Lemma1Model { p, k, rho_k: lp_norm_1d(k, p, tol)? })
    }

    pub fn eval(&self, nu: f64) -> f64 {
        if nu <= f64::from(self.k) {
            return self.rho_k;
        }
        let base = pow(nu, asymptotic_power(self.p));
        match NormRegime::of(self.p) {
            NormRegime::Eq4 => base * ln(nu),
            _ => base,
        }
    }
}

/// Model factor for a single degree; see [`Lemma1Model`].
pub fn lemma1_model(nu: f64, p: Exponent, k: u32) -> Result<f64> {
    if !(nu >= 0.0) {
        return Err(Error::domain(format!("degree must be ≥ 0, got {nu}")));
    }
    Ok(Lemma1Model::new(p, k, 1e-10)?.eval(nu))
}

/// A computed norm next to its asymptotic model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub p: Exponent,
    pub degree: MultiIndex,
    pub computed: f64,
    pub predicted: f64,
    pub regime: NormRegime,
}

impl NormEstimate {
    pub fn ratio(&self) -> f64 {
        self.computed / self.predicted
    }
}

pub fn norm_estimate(nu: &MultiIndex, p: Exponent, k: u32, tol: f64) -> Result<NormEstimate> {
    let model = Lemma1Model::new(p, k, tol)?;
    let computed = lp_norm_phi(nu, p, tol)?;
    let predicted = nu.entries().iter().map(|&d| model.eval(f64::from(d))).product();
    Ok(NormEstimate { p, degree: nu.clone(), computed, predicted, regime: NormRegime::of(p) })
}

/// Result of a log-log regression of `‖φ_ν‖_p` against `ν`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub p: Exponent,
    /// Fitted power of `ν`.
    pub power: f64,
    /// Fitted power of `ln ν`; only fitted at `p = 4`.
    pub log_power: Option<f64>,
    pub degrees: Vec<u32>,
    pub norms: Vec<f64>,
}

/// Fits `ln ‖φ_ν‖_p ≈ c + a ln ν` over geometrically spaced degrees in
/// `[lo, hi]`. At `p = 4` the regression also carries a `ln ln ν` column so
/// the logarithmic factor does not bias the power.
pub fn fit_norm_exponent(p: Exponent, lo: u32, hi: u32, samples: usize, tol: f64) -> Result<ExponentFit> {
    if lo < 10 || lo >= hi || samples < 8 {
        return Err(Error::domain(format!(
            "exponent fit needs 10 ≤ lo < hi and samples ≥ 8, got [{lo}, {hi}] with {samples}"
        )));
    }
    let ratio = f64::from(hi) / f64::from(lo);
    let mut degrees: Vec<u32> = (0..samples)
        .map(|i| math::round(f64::from(lo) * pow(ratio, i as f64 / (samples - 1) as f64)) as u32)
        .collect();
    degrees.dedup();
    let with_log = NormRegime::of(p) == NormRegime::Eq4;
    if degrees.len() < 4 {
        return Err(Error::domain("degenerate fit: too few distinct degrees"));
    }
    let norms = degrees.iter().map(|&d| lp_norm_1d(d, p, tol)).collect::<Result<Vec<_>>>()?;

    let cols = if with_log { 3 } else { 2 };
    let x = DMatrix::from_fn(degrees.len(), cols, |i, j| {
        let l = ln(f64::from(degrees[i]));
        match j {
            0 => 1.0,
            1 => l,
            _ => ln(l),
        }
    });
    let y = DVector::from_iterator(norms.len(), norms.iter().map(|&v| ln(v)));
    let coef = x
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::domain(format!("least-squares fit failed: {e}")))?;
    Ok(ExponentFit {
        p,
        power: coef[1],
        log_power: with_log.then(|| coef[2]),
        degrees,
        norms,
    })
}

/// `(∫ (1+x²)^{-q/2} dx)^{1/q}` for `q > 1`.
fn weight_norm(q: f64) -> f64 {
    let ln_int = 0.5 * ln(PI) + lgamma(0.5 * (q - 1.0)) - lgamma(0.5 * q);
    exp(ln_int / q)
}

/// `(scale, power)` with `‖φ_u‖_p ≤ scale · K^power` for all `u ≤ K`, `K ≥ 1`.
///
/// For `p ≥ 2` this interpolates the `L²` normalization with the uniform
/// bound on `|φ_u|`; for `p < 2` it is Hölder against `(1+x²)^{-1/2}` using
/// `‖(1+x²)^{1/2} φ_u‖₂² = u + 3/2`.
pub(crate) fn norm_growth(p: Exponent) -> (f64, f64) {
    if p.value() >= 2.0 {
        (pow(PHI_SUP_BOUND, 1.0 - 2.0 * p.recip()), 0.0)
    } else {
        let q = 2.0 * p.value() / (2.0 - p.value());
        (weight_norm(q) * sqrt(2.5), 0.5)
    }
}

/// `(scale, decay)` with `‖φ_u‖_p ≥ scale · (K + 3/2)^{-decay}` for all
/// `u ≤ K`, from `1 = ‖φ_u‖₂² ≤ ‖φ_u‖_p ‖φ_u‖_{p'}`.
pub(crate) fn norm_floor(p: Exponent) -> (f64, f64) {
    let dual = p.conjugate();
    if dual.value() >= 2.0 {
        (1.0 / pow(PHI_SUP_BOUND, 1.0 - 2.0 * dual.recip()), 0.0)
    } else {
        let q = 2.0 * dual.value() / (2.0 - dual.value());
        (1.0 / weight_norm(q), 0.5)
    }
}
