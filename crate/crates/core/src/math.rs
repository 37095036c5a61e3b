//! Thin wrappers over `libm` so the numeric code reads like `std`.

pub(crate) use libm::{ceil, cos, cosh, exp, floor, lgamma, log as ln, pow, round, sinh, sqrt};

pub(crate) const PI: f64 = core::f64::consts::PI;
pub(crate) const LN_2: f64 = core::f64::consts::LN_2;

/// `π^{-1/4}`, the value of `φ₀(0)`.
pub(crate) const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

/// Upper bound on `sup_x |φ_k(x)|` valid for every degree `k`.
///
/// Cramér's inequality `|H_k(x)| e^{-x²/2} ≤ κ 2^{k/2} √(k!)` with
/// `κ ≈ 1.086435` gives `|φ_k| ≤ κ π^{-1/4}`; the constant below rounds up.
pub(crate) const PHI_SUP_BOUND: f64 = 1.0865 * PI_POW_NEG_QUARTER;

pub(crate) fn is_finite(x: f64) -> bool {
    x.is_finite()
}

/// `x^k` by binary exponentiation.
pub(crate) fn powi(x: f64, k: u32) -> f64 {
    let (mut base, mut e, mut acc) = (x, k, 1.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// `n` choose `k` in floating point; exact while the result stays below 2⁵³.
pub(crate) fn binomial_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Checked `n` choose `k`.
pub(crate) fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    u64::try_from(acc).ok()
}
