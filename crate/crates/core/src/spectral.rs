//! Hermite multipliers `T_m f = Σ m(ν) f̂(φ_ν) φ_ν` and their kernels.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{count_up_to, enumerate_up_to, graded_rank, phi_table, MultiIndex};
use crate::math::{self, exp, pow, sinh, PHI_SUP_BOUND, PI};
use crate::quadrature::QuadratureRule;
use crate::sum::CompensatedSum;
use crate::tail::{lattice_tail, FactorGrowth};

/// Coefficients smaller than this are written as exact zeros in tables.
pub const SNAP_TO_ZERO: f64 = 1e-14;

/// A certified decay bound on `|m(ν)|` in terms of `|ν|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Envelope {
    /// `|m(ν)| ≤ scale · (1 + |ν|)^{-decay}` (or `≥` when used as a lower envelope).
    Polynomial { scale: f64, decay: f64 },
    /// `|m(ν)| ≤ scale · e^{-rate |ν|}` (or `≥` when used as a lower envelope).
    Exponential { scale: f64, rate: f64 },
}

impl Envelope {
    pub fn at(&self, order: u64) -> f64 {
        match *self {
            Envelope::Polynomial { scale, decay } => scale * pow(1.0 + order as f64, -decay),
            Envelope::Exponential { scale, rate } => scale * exp(-rate * order as f64),
        }
    }
}

/// Tag describing how a [`Symbol`] was built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolKind {
    Heat { t: f64 },
    Power { a: f64 },
    Table,
    Custom,
}

type SymbolFn = dyn Fn(&MultiIndex) -> f64 + Send + Sync;

#[derive(Clone)]
enum Repr {
    Heat(f64),
    Power(f64),
    Table(BTreeMap<MultiIndex, f64>),
    Custom(Arc<SymbolFn>),
}

/// The symbol `m : ℕ₀ⁿ → ℝ` of a Hermite multiplier, with optional decay
/// envelopes used to certify tails.
#[derive(Clone)]
pub struct Symbol {
    repr: Repr,
    upper: Option<Envelope>,
    lower: Option<Envelope>,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("Symbol");
        match &self.repr {
            Repr::Heat(t) => d.field("heat", t),
            Repr::Power(a) => d.field("power", a),
            Repr::Table(t) => d.field("table", t),
            Repr::Custom(_) => d.field("custom", &"<fn>"),
        };
        d.field("upper", &self.upper).field("lower", &self.lower).finish()
    }
}

impl Symbol {
    /// The Hermite semigroup symbol `m_t(ν) = e^{-t(2|ν|+n)}`.
    pub fn heat(t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain(format!("heat symbol needs t > 0, got {t}")));
        }
        Ok(Symbol { repr: Repr::Heat(t), upper: None, lower: None })
    }

    /// The spectral multiplier `(2|ν|+n)^{-a}`, i.e. `H^{-a}`.
    pub fn power(a: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::domain(format!("power symbol needs a ≥ 0, got {a}")));
        }
        Ok(Symbol { repr: Repr::Power(a), upper: None, lower: None })
    }

    /// A finitely supported symbol; zero outside the given entries.
    pub fn table(entries: impl IntoIterator<Item = (MultiIndex, f64)>) -> Result<Self> {
        let map: BTreeMap<MultiIndex, f64> = entries.into_iter().collect();
        let mut dims = map.keys().map(MultiIndex::dim);
        if let Some(d) = dims.next() {
            if dims.any(|e| e != d) {
                return Err(Error::domain("table symbol mixes multi-index dimensions"));
            }
        }
        if let Some((nu, v)) = map.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::domain(format!("table value at {nu:?} is not finite: {v}")));
        }
        Ok(Symbol { repr: Repr::Table(map), upper: None, lower: None })
    }

    /// An arbitrary symbol. Tails can only be certified through the envelopes.
    pub fn custom(
        f: impl Fn(&MultiIndex) -> f64 + Send + Sync + 'static,
        upper: Option<Envelope>,
        lower: Option<Envelope>,
    ) -> Self {
        Symbol { repr: Repr::Custom(Arc::new(f)), upper, lower }
    }

    /// The constant symbol `m ≡ value`, with matching upper and lower envelopes.
    pub fn constant(value: f64) -> Self {
        let env = Envelope::Polynomial { scale: value.abs(), decay: 0.0 };
        Symbol::custom(move |_| value, Some(env), Some(env))
    }

    pub fn kind(&self) -> SymbolKind {
        match self.repr {
            Repr::Heat(t) => SymbolKind::Heat { t },
            Repr::Power(a) => SymbolKind::Power { a },
            Repr::Table(_) => SymbolKind::Table,
            Repr::Custom(_) => SymbolKind::Custom,
        }
    }

    pub fn eval(&self, nu: &MultiIndex) -> f64 {
        match &self.repr {
            Repr::Heat(t) => exp(-t * nu.eigenvalue() as f64),
            Repr::Power(a) => pow(nu.eigenvalue() as f64, -a),
            Repr::Table(map) => map.get(nu).copied().unwrap_or(0.0),
            Repr::Custom(f) => f(nu),
        }
    }

    /// Value on level `|ν| = k` for symbols that depend on `|ν|` only.
    pub fn level_value(&self, k: u64, n: usize) -> Option<f64> {
        let lambda = (2 * k + n as u64) as f64;
        match self.repr {
            Repr::Heat(t) => Some(exp(-t * lambda)),
            Repr::Power(a) => Some(pow(lambda, -a)),
            _ => None,
        }
    }

    /// The support when it is finite.
    pub fn finite_support(&self) -> Option<&BTreeMap<MultiIndex, f64>> {
        match &self.repr {
            Repr::Table(map) => Some(map),
            _ => None,
        }
    }

    /// Largest `|ν|` in the support of a table symbol.
    pub fn support_order(&self) -> Option<u64> {
        self.finite_support().map(|m| m.keys().map(MultiIndex::order).max().unwrap_or(0))
    }

    /// Upper envelope in dimension `n`.
    pub fn upper_envelope(&self, n: usize) -> Option<Envelope> {
        match self.repr {
            Repr::Heat(t) => Some(Envelope::Exponential { scale: exp(-t * n as f64), rate: 2.0 * t }),
            // 2|ν| + n ≥ 1 + |ν|
            Repr::Power(a) => Some(Envelope::Polynomial { scale: 1.0, decay: a }),
            Repr::Table(_) => None,
            Repr::Custom(_) => self.upper,
        }
    }

    /// Lower envelope on `|m|` in dimension `n`.
    pub fn lower_envelope(&self, n: usize) -> Option<Envelope> {
        match self.repr {
            Repr::Heat(t) => Some(Envelope::Exponential { scale: exp(-t * n as f64), rate: 2.0 * t }),
            // 2|ν| + n ≤ max(2, n)(1 + |ν|)
            Repr::Power(a) => Some(Envelope::Polynomial {
                scale: pow(2f64.max(n as f64), -a),
                decay: a,
            }),
            Repr::Table(_) => None,
            Repr::Custom(_) => self.lower,
        }
    }
}

/// Hermite–Fourier coefficients `f̂(φ_ν)` for all `|ν| ≤ N`, stored in the
/// graded order of [`enumerate_up_to`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    dimension: usize,
    max_order: u32,
    values: Vec<f64>,
}

impl CoefficientVector {
    pub fn zeros(dimension: usize, max_order: u32) -> Result<Self> {
        let len = lattice_len(dimension, max_order)?;
        Ok(CoefficientVector { dimension, max_order, values: vec![0.0; len] })
    }

    /// Builds a vector from `(ν, value)` pairs; unspecified entries are zero.
    pub fn from_entries(
        dimension: usize,
        max_order: u32,
        entries: impl IntoIterator<Item = (MultiIndex, f64)>,
    ) -> Result<Self> {
        let mut c = Self::zeros(dimension, max_order)?;
        for (nu, v) in entries {
            c.set(&nu, v)?;
        }
        Ok(c)
    }

    pub fn unit(nu: &MultiIndex, max_order: u32) -> Result<Self> {
        Self::from_entries(nu.dim(), max_order, [(nu.clone(), 1.0)])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn index_of(&self, nu: &MultiIndex) -> Option<usize> {
        (nu.dim() == self.dimension && nu.order() <= u64::from(self.max_order))
            .then(|| graded_rank(nu.entries()))
    }

    /// Coefficient at `ν`; zero outside the stored range.
    pub fn get(&self, nu: &MultiIndex) -> f64 {
        self.index_of(nu).map_or(0.0, |i| self.values[i])
    }

    pub fn set(&mut self, nu: &MultiIndex, value: f64) -> Result<()> {
        let i = self.index_of(nu).ok_or_else(|| {
            Error::domain(format!(
                "{nu:?} is outside the coefficient range (n = {}, N = {})",
                self.dimension, self.max_order
            ))
        })?;
        self.values[i] = value;
        Ok(())
    }

    /// `(ν, value)` pairs in graded order.
    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, f64)> + '_ {
        enumerate_up_to(self.dimension, self.max_order)
            .expect("dimension validated at construction")
            .zip(self.values.iter().copied())
    }

    /// A copy with entries below [`SNAP_TO_ZERO`] in magnitude set to exact zero.
    pub fn snapped(&self) -> CoefficientVector {
        let mut c = self.clone();
        c.values.iter_mut().filter(|v| v.abs() < SNAP_TO_ZERO).for_each(|v| *v = 0.0);
        c
    }

    /// `Σ c(ν)²`.
    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v * v).collect::<CompensatedSum>().value()
    }
}

fn lattice_len(n: usize, max_order: u32) -> Result<usize> {
    if n == 0 {
        return Err(Error::domain("dimension n must be ≥ 1"));
    }
    count_up_to(n, u64::from(max_order))
        .and_then(|c| usize::try_from(c).ok())
        .filter(|&c| c <= 50_000_000)
        .ok_or_else(|| Error::capability(format!("lattice |ν| ≤ {max_order} in n = {n} is too large")))
}

fn check_points(n: usize, x: &[f64]) -> Result<()> {
    if x.len() != n {
        return Err(Error::domain(format!(
            "dimension mismatch: expected {n} coordinates, got {}",
            x.len()
        )));
    }
    Ok(())
}

/// Per-coordinate tables `φ_a(x_j)` for `a ≤ N`.
fn coordinate_tables(max_order: u32, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    x.iter().map(|&xj| phi_table(max_order, xj)).collect()
}

/// Contracts the leading axis of a row-major tensor `a[lead][rest]` against
/// `g[out][lead]`, placing the new axis last: `b[rest][out]`.
fn contract_leading(a: &[f64], lead: usize, g: &[Vec<f64>]) -> Vec<f64> {
    let rest = a.len() / lead;
    let out = g.len();
    let mut b = vec![0.0; rest * out];
    for (o, row) in g.iter().enumerate() {
        for r in 0..rest {
            let mut acc = 0.0;
            for (i, gi) in row.iter().enumerate() {
                acc += gi * a[i * rest + r];
            }
            b[r * out + o] = acc;
        }
    }
    b
}

/// Hermite–Fourier analysis `f̂(φ_ν) = ∫ f φ_ν dx` for every `|ν| ≤ N` by
/// tensor-product quadrature with the given one-dimensional rule.
///
/// With a Gauss–Hermite rule of at least `N + 1` nodes the result is exact
/// (up to rounding) whenever `f` is itself a Hermite expansion of order `≤ N`.
pub fn analyze(
    f: impl Fn(&[f64]) -> f64,
    n: usize,
    max_order: u32,
    rule: &QuadratureRule,
) -> Result<CoefficientVector> {
    let len = lattice_len(n, max_order)?;
    let nodes = rule.nodes();
    let weights = rule.dx_weights();
    let m = nodes.len();
    let grid_len = u32::try_from(n)
        .ok()
        .and_then(|e| m.checked_pow(e))
        .filter(|&g| g <= 20_000_000)
        .ok_or_else(|| Error::capability(format!("tensor grid {m}^{n} is too large")))?;

    // g[a][i] = W_i φ_a(x_i)
    let tables = coordinate_tables(max_order, nodes)?;
    let g: Vec<Vec<f64>> = (0..=max_order as usize)
        .map(|a| (0..m).map(|i| weights[i] * tables[i][a]).collect())
        .collect();

    let mut values = Vec::with_capacity(grid_len);
    let mut idx = vec![0usize; n];
    let mut point = vec![0.0; n];
    for _ in 0..grid_len {
        for (p, &i) in point.iter_mut().zip(&idx) {
            *p = nodes[i];
        }
        let v = f(&point);
        if !v.is_finite() {
            return Err(Error::domain(format!("integrand is not finite at {point:?}")));
        }
        values.push(v);
        for d in (0..n).rev() {
            idx[d] += 1;
            if idx[d] < m {
                break;
            }
            idx[d] = 0;
        }
    }

    let mut lead = m;
    for _ in 0..n {
        values = contract_leading(&values, lead, &g);
        lead = m;
    }

    // values is now indexed by (a_1, …, a_n) in row-major order over 0..=N.
    let side = max_order as usize + 1;
    let mut out = Vec::with_capacity(len);
    for nu in enumerate_up_to(n, max_order)? {
        let flat = nu.entries().iter().fold(0usize, |acc, &a| acc * side + a as usize);
        out.push(values[flat]);
    }
    Ok(CoefficientVector { dimension: n, max_order, values: out })
}

/// Applies the multiplier componentwise: `(T_m c)(ν) = m(ν) c(ν)`.
pub fn apply_multiplier(m: &Symbol, c: &CoefficientVector) -> CoefficientVector {
    let values = c.iter().map(|(nu, v)| if v == 0.0 { 0.0 } else { m.eval(&nu) * v }).collect();
    CoefficientVector { dimension: c.dimension, max_order: c.max_order, values }
}

/// Evaluates `Σ_{|ν| ≤ N} c(ν) φ_ν(x)`.
pub fn synthesize(c: &CoefficientVector, x: &[f64]) -> Result<f64> {
    check_points(c.dimension, x)?;
    let tables = coordinate_tables(c.max_order, x)?;
    let mut acc = CompensatedSum::new();
    for (nu, v) in c.iter() {
        if v != 0.0 {
            let phi: f64 = nu.entries().iter().zip(&tables).map(|(&a, t)| t[a as usize]).product();
            acc.add(v * phi);
        }
    }
    Ok(acc.value())
}

/// The projection `P_k`: keeps exactly the coefficients with `|ν| = k`.
pub fn project_level(c: &CoefficientVector, k: u32) -> Result<CoefficientVector> {
    if k > c.max_order {
        return Err(Error::domain(format!("level {k} exceeds the stored order {}", c.max_order)));
    }
    let values = c
        .iter()
        .map(|(nu, v)| if nu.order() == u64::from(k) { v } else { 0.0 })
        .collect();
    Ok(CoefficientVector { dimension: c.dimension, max_order: c.max_order, values })
}

/// A truncated kernel value together with a certified bound on the omitted terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSum {
    pub value: f64,
    pub tail_bound: Option<f64>,
    pub max_order: u32,
}

/// The truncated kernel `K_m(x,y) ≈ Σ_{|ν|≤N} m(ν) φ_ν(x) φ_ν(y)`.
///
/// The tail bound uses `|φ_k| ≤ 0.8161` for every `k`, so it is available
/// whenever `m` has an upper envelope or finite support.
pub fn kernel_series(m: &Symbol, x: &[f64], y: &[f64], max_order: u32) -> Result<KernelSum> {
    let n = x.len();
    if n == 0 {
        return Err(Error::domain("dimension n must be ≥ 1"));
    }
    check_points(n, y)?;
    let tx = coordinate_tables(max_order, x)?;
    let ty = coordinate_tables(max_order, y)?;
    let mut acc = CompensatedSum::new();
    for nu in enumerate_up_to(n, max_order)? {
        let mv = m.eval(&nu);
        if mv == 0.0 {
            continue;
        }
        let mut prod = 1.0;
        for (j, &a) in nu.entries().iter().enumerate() {
            prod *= tx[j][a as usize] * ty[j][a as usize];
        }
        acc.add(mv * prod);
    }
    let sup_sq = PHI_SUP_BOUND * PHI_SUP_BOUND;
    let tail_bound = match m.finite_support() {
        Some(map) => Some(
            map.iter()
                .filter(|(nu, _)| nu.dim() == n && nu.order() > u64::from(max_order))
                .map(|(_, v)| v.abs() * pow(sup_sq, n as f64))
                .sum(),
        ),
        None => m.upper_envelope(n).and_then(|env| {
            lattice_tail(n, u64::from(max_order), FactorGrowth::constant(sup_sq), &env, 1.0)
        }),
    };
    Ok(KernelSum { value: acc.value(), tail_bound, max_order })
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("semigroup time must be t > 0, got {t}")))
    }
}

/// `(2π sinh 2t)^{-n/2}`, or a capability error when it overflows.
fn mehler_prefactor(t: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    let pre = pow(2.0 * PI * sinh(2.0 * t), -nf / 2.0);
    if pre.is_finite() {
        Ok(pre)
    } else {
        // (2π sinh 2t)^{-n/2} = MAX  ⇔  sinh 2t = MAX^{-2/n} / (2π)
        let threshold = libm::asinh(pow(f64::MAX, -2.0 / nf) / (2.0 * PI)) / 2.0;
        Err(Error::capability(format!(
            "Mehler prefactor overflows for t = {t:e} in n = {n}; requires t > {threshold:e}"
        )))
    }
}

/// Mehler's closed form of the semigroup kernel
/// `K_t(x,y) = (2π sinh 2t)^{-n/2} exp(−½(|x|²+|y|²) coth 2t + x·y csch 2t)`.
pub fn mehler_kernel(t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    check_t(t)?;
    let n = x.len();
    if n == 0 {
        return Err(Error::domain("dimension n must be ≥ 1"));
    }
    check_points(n, y)?;
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::domain("kernel arguments must be finite"));
    }
    let pre = mehler_prefactor(t, n)?;
    let s = sinh(2.0 * t);
    let coth = math::cosh(2.0 * t) / s;
    let csch = 1.0 / s;
    let sq: f64 = x.iter().map(|v| v * v).sum::<f64>() + y.iter().map(|v| v * v).sum::<f64>();
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    Ok(pre * exp(-0.5 * sq * coth + dot * csch))
}

/// The diagonal form `(2π)^{-n/2} sinh(2t)^{-n/2} e^{-|x|²(coth 2t − csch 2t)}`.
pub fn mehler_diagonal(t: f64, x: &[f64]) -> Result<f64> {
    check_t(t)?;
    if x.is_empty() {
        return Err(Error::domain("dimension n must be ≥ 1"));
    }
    let pre = mehler_prefactor(t, x.len())?;
    let s = sinh(2.0 * t);
    let a = math::cosh(2.0 * t) / s - 1.0 / s;
    let sq: f64 = x.iter().map(|v| v * v).sum();
    Ok(pre * exp(-sq * a))
}
