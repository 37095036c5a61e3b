//! Hermite functions `φ_ν` and the multi-index lattice `ℕ₀ⁿ`.
//!
//! One-dimensional functions are evaluated with the normalized three-term
//! recurrence
//!
//! ```text
//! φ_{k+1}(x) = x √(2/(k+1)) φ_k(x) − √(k/(k+1)) φ_{k−1}(x),   φ₀(x) = π^{-1/4} e^{-x²/2}
//! ```
//!
//! with the Gaussian factor carried separately as a logarithm so values far
//! beyond the turning point `|x| = √(2ν+1)` stay representable.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{self, binomial, exp, ln, sqrt, PI_POW_NEG_QUARTER};

/// Default guard on the degree accepted by [`eval_phi_1d`].
pub const DEFAULT_MAX_DEGREE: u32 = 1_000_000;

/// Exponent of the exact power-of-two rescaling applied to the recurrence.
const RESCALE_BITS: i32 = 500;
const RESCALE_THRESHOLD: f64 = 3.273_390_607_896_142e150; // 2^500

/// Magnitudes in `[e^-690.7, e^690.7] = [1e-300, 1e300]` are stored as plain values.
const LN_REPRESENTABLE: f64 = 690.775_527_898_213_7;

/// An eigenfunction label `ν ∈ ℕ₀ⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("multi-index needs dimension n ≥ 1"));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `|ν| = Σ ν_j`.
    pub fn order(&self) -> u64 {
        self.0.iter().map(|&v| u64::from(v)).sum()
    }

    /// Harmonic oscillator eigenvalue `λ_ν = 2|ν| + n`.
    pub fn eigenvalue(&self) -> u64 {
        2 * self.order() + self.dim() as u64
    }
}

impl From<u32> for MultiIndex {
    fn from(v: u32) -> Self {
        MultiIndex(vec![v])
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        assert!(N > 0, "multi-index needs dimension n ≥ 1");
        MultiIndex(v.to_vec())
    }
}

/// A real number stored as `value · e^{log_scale}`.
///
/// `log_scale` is `None` whenever the number is directly representable; it is
/// only populated for magnitudes outside `[10⁻³⁰⁰, 10³⁰⁰]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteValue {
    value: f64,
    log_scale: Option<f64>,
}

impl HermiteValue {
    pub const ZERO: HermiteValue = HermiteValue { value: 0.0, log_scale: None };

    pub fn from_f64(value: f64) -> Self {
        HermiteValue { value, log_scale: None }
    }

    /// Builds `mantissa · e^{log_scale}` and folds the scale in when possible.
    pub fn from_parts(mantissa: f64, log_scale: f64) -> Self {
        HermiteValue { value: mantissa, log_scale: Some(log_scale) }.normalized()
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn log_scale(&self) -> Option<f64> {
        self.log_scale
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0.0
    }

    pub fn signum(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            self.value.signum()
        }
    }

    /// `ln |v|`, `-∞` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.value == 0.0 {
            return f64::NEG_INFINITY;
        }
        ln(self.value.abs()) + self.log_scale.unwrap_or(0.0)
    }

    /// The value as a plain float; may underflow to zero or overflow to infinity.
    pub fn to_f64(&self) -> f64 {
        match self.log_scale {
            None => self.value,
            Some(_) if self.value == 0.0 => 0.0,
            Some(_) => self.signum() * exp(self.ln_abs()),
        }
    }

    /// `|v|^p` as a plain float.
    pub fn abs_pow(&self, p: f64) -> f64 {
        if self.value == 0.0 {
            return 0.0;
        }
        match self.log_scale {
            None => math::pow(self.value.abs(), p),
            Some(_) => exp(p * self.ln_abs()),
        }
    }

    pub fn mul(self, other: HermiteValue) -> HermiteValue {
        if self.is_zero() || other.is_zero() {
            return HermiteValue::ZERO;
        }
        match (self.log_scale, other.log_scale) {
            (None, None) => {
                let v = self.value * other.value;
                if v != 0.0 && v.is_finite() && v.abs() >= 1e-300 && v.abs() <= 1e300 {
                    return HermiteValue::from_f64(v);
                }
                HermiteValue::from_parts(
                    self.value.signum() * other.value.signum(),
                    ln(self.value.abs()) + ln(other.value.abs()),
                )
            }
            (a, b) => HermiteValue {
                value: self.value * other.value,
                log_scale: Some(a.unwrap_or(0.0) + b.unwrap_or(0.0)),
            }
            .normalized(),
        }
    }

    fn normalized(self) -> HermiteValue {
        let Some(scale) = self.log_scale else { return self };
        if self.value == 0.0 {
            return HermiteValue::ZERO;
        }
        let ln_abs = ln(self.value.abs()) + scale;
        if ln_abs.abs() <= LN_REPRESENTABLE {
            // Multiply directly when the scale itself is representable, which
            // keeps full precision of the mantissa.
            let v = if scale.abs() <= LN_REPRESENTABLE {
                self.value * exp(scale)
            } else {
                self.value.signum() * exp(ln_abs)
            };
            HermiteValue::from_f64(v)
        } else {
            // Keep a unit-magnitude mantissa so products cannot overflow.
            HermiteValue { value: self.value.signum(), log_scale: Some(ln_abs) }
        }
    }
}

fn check_x(x: f64) -> Result<()> {
    if math::is_finite(x) {
        Ok(())
    } else {
        Err(Error::domain(format!("Hermite function argument must be finite, got {x}")))
    }
}

/// Runs the normalized recurrence to `degree`, calling `visit(k, φ_k mantissa,
/// log_scale)` for every `k ≤ degree`. The value of `φ_k(x)` is
/// `mantissa · e^{log_scale}`.
fn recurrence(degree: u32, x: f64, mut visit: impl FnMut(u32, f64, f64)) {
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = PI_POW_NEG_QUARTER;
    visit(0, cur, log_scale);
    for k in 0..degree {
        let kf = f64::from(k);
        let next = x * sqrt(2.0 / (kf + 1.0)) * cur - sqrt(kf / (kf + 1.0)) * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_THRESHOLD {
            // Exact power-of-two scaling keeps φ(-x) = ±φ(x) bit-identical.
            cur = libm::ldexp(cur, -RESCALE_BITS);
            prev = libm::ldexp(prev, -RESCALE_BITS);
            log_scale += f64::from(RESCALE_BITS) * math::LN_2;
        }
        visit(k + 1, cur, log_scale);
    }
}

/// Evaluates the one-dimensional Hermite function `φ_degree(x)`.
pub fn eval_phi_1d(degree: u32, x: f64) -> Result<HermiteValue> {
    eval_phi_1d_with_max(degree, x, DEFAULT_MAX_DEGREE)
}

/// [`eval_phi_1d`] with an explicit degree guard.
pub fn eval_phi_1d_with_max(degree: u32, x: f64, max_degree: u32) -> Result<HermiteValue> {
    if degree > max_degree {
        return Err(Error::capability(format!(
            "degree {degree} exceeds the configured maximum {max_degree}"
        )));
    }
    check_x(x)?;
    let mut out = (0.0, 0.0);
    recurrence(degree, x, |k, m, s| {
        if k == degree {
            out = (m, s);
        }
    });
    Ok(HermiteValue::from_parts(out.0, out.1))
}

/// Values `φ_0(x), …, φ_max(x)` as plain floats (entries far in the
/// Gaussian tail underflow to zero).
pub fn phi_table(max_degree: u32, x: f64) -> Result<Vec<f64>> {
    if max_degree > DEFAULT_MAX_DEGREE {
        return Err(Error::capability(format!(
            "degree {max_degree} exceeds the configured maximum {DEFAULT_MAX_DEGREE}"
        )));
    }
    check_x(x)?;
    let mut out = Vec::with_capacity(max_degree as usize + 1);
    recurrence(max_degree, x, |_, m, s| out.push(HermiteValue::from_parts(m, s).to_f64()));
    Ok(out)
}

/// Evaluates the tensor-product Hermite function `φ_ν(x) = Π_j φ_{ν_j}(x_j)`.
pub fn eval_phi_nd(nu: &MultiIndex, x: &[f64]) -> Result<HermiteValue> {
    if nu.dim() != x.len() {
        return Err(Error::domain(format!(
            "dimension mismatch: multi-index has n = {}, point has {} coordinates",
            nu.dim(),
            x.len()
        )));
    }
    nu.entries().iter().zip(x).try_fold(HermiteValue::from_f64(1.0), |acc, (&d, &xj)| {
        Ok(acc.mul(eval_phi_1d(d, xj)?))
    })
}

/// `|{ν ∈ ℕ₀ⁿ : |ν| = k}| = C(k+n−1, n−1)`, `None` on overflow.
pub fn level_count(n: usize, k: u64) -> Option<u64> {
    if n == 0 {
        return None;
    }
    binomial(k + n as u64 - 1, n as u64 - 1)
}

/// `|{ν ∈ ℕ₀ⁿ : |ν| ≤ N}| = C(N+n, n)`, `None` on overflow.
pub fn count_up_to(n: usize, max_order: u64) -> Option<u64> {
    if n == 0 {
        return None;
    }
    binomial(max_order + n as u64, n as u64)
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::domain("dimension n must be ≥ 1"))
    } else {
        Ok(())
    }
}

/// Advances `a` to the lexicographically next composition with the same sum.
/// Returns `false` when `a` was the last one, `(k, 0, …, 0)`.
fn next_composition(a: &mut [u32]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    // The tail sum after position i; find the rightmost i < n-1 with a
    // nonzero tail.
    let mut tail = 0u32;
    for i in (0..n - 1).rev() {
        tail += a[i + 1];
        if tail > 0 {
            a[i] += 1;
            for v in &mut a[i + 1..] {
                *v = 0;
            }
            a[n - 1] = tail - 1;
            return true;
        }
    }
    false
}

/// All `ν` with `|ν| = k`, in lexicographic order.
pub fn enumerate_level(n: usize, k: u32) -> Result<Vec<MultiIndex>> {
    check_dim(n)?;
    let count = level_count(n, u64::from(k))
        .and_then(|c| usize::try_from(c).ok())
        .ok_or_else(|| Error::capability(format!("level size C({k}+{n}−1, {n}−1) overflows")))?;
    let mut out = Vec::with_capacity(count);
    let mut a = vec![0u32; n];
    a[n - 1] = k;
    loop {
        out.push(MultiIndex(a.clone()));
        if !next_composition(&mut a) {
            break;
        }
    }
    debug_assert_eq!(out.len(), count);
    Ok(out)
}

/// Iterator over `{ν : |ν| ≤ N}` in graded order: by level, then
/// lexicographically within a level.
#[derive(Debug, Clone)]
pub struct LatticeIter {
    current: Option<Vec<u32>>,
    level: u32,
    max_order: u32,
}

impl Iterator for LatticeIter {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let cur = self.current.as_mut()?;
        let out = MultiIndex(cur.clone());
        if !next_composition(cur) {
            if self.level == self.max_order {
                self.current = None;
            } else {
                self.level += 1;
                let n = cur.len();
                cur.iter_mut().for_each(|v| *v = 0);
                cur[n - 1] = self.level;
            }
        }
        Some(out)
    }
}

/// All `ν` with `|ν| ≤ N`, each exactly once, in graded lexicographic order.
pub fn enumerate_up_to(n: usize, max_order: u32) -> Result<LatticeIter> {
    check_dim(n)?;
    Ok(LatticeIter { current: Some(vec![0; n]), level: 0, max_order })
}

/// Position of `ν` in the order produced by [`enumerate_up_to`].
pub(crate) fn graded_rank(nu: &[u32]) -> usize {
    let n = nu.len();
    let k: u64 = nu.iter().map(|&v| u64::from(v)).sum();
    let mut rank = if k == 0 { 0 } else { count_up_to(n, k - 1).unwrap_or(u64::MAX) };
    let mut remaining = k;
    for (i, &v) in nu.iter().enumerate().take(n.saturating_sub(1)) {
        let parts = (n - 1 - i) as u64;
        for a in 0..u64::from(v) {
            rank += binomial(remaining - a + parts - 1, parts - 1).unwrap_or(u64::MAX);
        }
        remaining -= u64::from(v);
    }
    rank as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eval_examples() {
        let v0 = eval_phi_1d(0, 0.0).unwrap().to_f64();
        assert!(close(v0, 0.751_125_544_464_942_5, 1e-15));
        assert_eq!(eval_phi_1d(1, 0.0).unwrap().to_f64(), 0.0);
        let v2 = eval_phi_1d(2, 0.0).unwrap().to_f64();
        assert!(close(v2, -0.531_125_966_013_598_4, 1e-15), "{v2}");
    }

    #[test]
    fn nd_examples() {
        let a = eval_phi_nd(&MultiIndex::from([0, 0]), &[0.0, 0.0]).unwrap().to_f64();
        assert!(close(a, 0.564_189_583_547_756_3, 1e-15));
        let b = eval_phi_nd(&MultiIndex::from([1, 0]), &[0.0, 3.7]).unwrap();
        assert!(b.is_zero());
        let c = eval_phi_nd(&MultiIndex::from([2, 2]), &[0.0, 0.0]).unwrap().to_f64();
        assert!(close(c, 0.282_094_791_773_878_1, 1e-15));
    }

    #[test]
    fn errors() {
        assert!(matches!(eval_phi_1d(10, f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(eval_phi_1d(10, f64::INFINITY), Err(Error::Domain(_))));
        assert!(matches!(eval_phi_1d(DEFAULT_MAX_DEGREE + 1, 0.0), Err(Error::Capability(_))));
        assert!(matches!(eval_phi_1d_with_max(11, 0.0, 10), Err(Error::Capability(_))));
        assert!(matches!(
            eval_phi_nd(&MultiIndex::from([1, 2]), &[0.0]),
            Err(Error::Domain(_))
        ));
        assert!(MultiIndex::new(vec![]).is_err());
    }

    #[test]
    fn deep_tail_is_log_scaled() {
        let v = eval_phi_1d(3, 60.0).unwrap();
        assert!(v.log_scale().is_some());
        assert_eq!(v.to_f64(), 0.0);
        // ln φ₃(60) = ln(π^{-1/4} (8x³−12x)/√48) − x²/2
        let x: f64 = 60.0;
        let expected = (0.751_125_544_464_942_5 * (8.0 * x.powi(3) - 12.0 * x) / 48f64.sqrt()).ln()
            - x * x / 2.0;
        assert!(close(v.ln_abs(), expected, 1e-12 * expected.abs()));
        assert_eq!(v.signum(), 1.0);
    }

    #[test]
    fn large_degree_is_finite() {
        let v = eval_phi_1d(1_000_000, 1.0).unwrap();
        assert!(v.to_f64().is_finite());
        assert!(v.to_f64().abs() < 0.1);
    }

    #[test]
    fn table_matches_pointwise() {
        let t = phi_table(40, 2.5).unwrap();
        for (d, v) in t.iter().enumerate() {
            assert_eq!(*v, eval_phi_1d(d as u32, 2.5).unwrap().to_f64());
        }
    }

    #[test]
    fn multi_index_basics() {
        let nu = MultiIndex::from([2, 0, 3]);
        assert_eq!(nu.order(), 5);
        assert_eq!(nu.eigenvalue(), 13);
        assert_eq!(nu.dim(), 3);
    }

    #[test]
    fn level_examples() {
        assert_eq!(enumerate_level(1, 5).unwrap(), vec![MultiIndex::from(5)]);
        let l = enumerate_level(2, 3).unwrap();
        let want: Vec<MultiIndex> =
            [[0, 3], [1, 2], [2, 1], [3, 0]].into_iter().map(MultiIndex::from).collect();
        assert_eq!(l, want);
        assert_eq!(enumerate_level(3, 2).unwrap().len(), 6);
        assert!(enumerate_level(0, 2).is_err());
    }

    #[test]
    fn up_to_examples() {
        assert_eq!(enumerate_up_to(1, 4).unwrap().count(), 5);
        assert_eq!(enumerate_up_to(2, 2).unwrap().count(), 6);
        let origin: Vec<_> = enumerate_up_to(3, 0).unwrap().collect();
        assert_eq!(origin, vec![MultiIndex::from([0, 0, 0])]);
    }

    #[test]
    fn rank_matches_enumeration_order() {
        for n in 1..=4 {
            for (i, nu) in enumerate_up_to(n, 7).unwrap().enumerate() {
                assert_eq!(graded_rank(nu.entries()), i, "{nu:?}");
            }
        }
    }

    #[test]
    fn hermite_value_products() {
        let a = HermiteValue::from_parts(1.5, -800.0);
        let b = HermiteValue::from_parts(-2.0, 790.0);
        let c = a.mul(b);
        assert!(c.log_scale().is_none());
        assert!(close(c.to_f64(), -3.0 * (-10.0f64).exp(), 1e-15));
        let d = HermiteValue::from_f64(1e-200).mul(HermiteValue::from_f64(1e-200));
        assert!(d.log_scale().is_some());
        assert!(close(d.ln_abs(), -400.0 * 10f64.ln(), 1e-10));
    }
}
