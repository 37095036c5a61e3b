//! Certified bounds for lattice tails `Σ_{|ν|>N} Π_j f(ν_j) · |m(ν)|^r`.
//!
//! Every bound here is an honest upper bound: per-coordinate factors are
//! dominated by `scale · K^power · (ln K)^log_power` whenever all coordinates
//! are at most `K = |ν|`, the level multiplicity by `C(K+n−1, n−1)`, and the
//! symbol by its decay envelope.

use crate::math::{binomial_f64, exp, ln, pow};
use crate::spectral::Envelope;

/// Smallest level for which a [`FactorGrowth`] bound is required to hold.
/// `ln 3 > 1`, so `K^a (ln K)^L ≥ 1` from here on.
pub(crate) const MIN_LEVEL: u64 = 3;

/// Per-coordinate factor bound `f(u) ≤ scale · K^power · (ln K)^log_power`
/// for every coordinate `u ≤ K`, `K ≥ MIN_LEVEL`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FactorGrowth {
    pub scale: f64,
    pub power: f64,
    pub log_power: f64,
}

impl FactorGrowth {
    pub const UNIT: FactorGrowth = FactorGrowth { scale: 1.0, power: 0.0, log_power: 0.0 };

    pub fn constant(scale: f64) -> Self {
        FactorGrowth { scale, power: 0.0, log_power: 0.0 }
    }
}

/// Per-coordinate lower bound `f(u) ≥ scale · (K + 3/2)^{-decay}` for all
/// coordinates `u ≤ K` and all sufficiently large `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FactorFloor {
    pub scale: f64,
    pub decay: f64,
}

/// Upper bound on the tail beyond level `max_order`, or `None` when the
/// envelope decays too slowly to certify one.
pub(crate) fn lattice_tail(
    n: usize,
    max_order: u64,
    growth: FactorGrowth,
    envelope: &Envelope,
    r: f64,
) -> Option<f64> {
    let nf = n as f64;
    let k0 = max_order + 1;
    if k0 < MIN_LEVEL || growth.power < 0.0 || growth.log_power < 0.0 {
        return None;
    }
    match *envelope {
        Envelope::Exponential { scale, rate } => {
            if scale == 0.0 {
                return Some(0.0);
            }
            // Ratio U_{K+1}/U_K is decreasing in K; bound the tail by a
            // geometric series started at K0.
            let k = k0 as f64;
            let ratio = (k + nf) / (k + 1.0)
                * pow((k + 1.0) / k, nf * growth.power)
                * pow(ln(k + 1.0) / ln(k), nf * growth.log_power)
                * exp(-rate * r);
            if !(ratio < 1.0) {
                return None;
            }
            let ln_first = ln(binomial_f64(k0 + n as u64 - 1, n as u64 - 1))
                + nf * (ln(growth.scale) + growth.power * ln(k) + growth.log_power * ln(ln(k)))
                + r * (ln(scale) - rate * k);
            Some(exp(ln_first) / (1.0 - ratio))
        }
        Envelope::Polynomial { scale, decay } => {
            if scale == 0.0 {
                return Some(0.0);
            }
            // C(K+n−1,n−1) ≤ (K+1)^{n−1}; (ln K)^L ≤ (K^ε/(εe))^L.
            let slack = decay * r - (nf - 1.0) - nf * growth.power - 1.0;
            if !(slack > 0.0) {
                return None;
            }
            let (eps, log_const) = if growth.log_power > 0.0 {
                let eps = slack / (2.0 * nf * growth.log_power);
                (eps, pow(eps * core::f64::consts::E, -nf * growth.log_power))
            } else {
                (0.0, 1.0)
            };
            let alpha = nf - 1.0 + nf * growth.power + eps * nf * growth.log_power - decay * r;
            let integral = pow(k0 as f64, alpha + 1.0) / (-(alpha + 1.0));
            Some(pow(growth.scale, nf) * log_const * pow(scale, r) * integral)
        }
    }
}

/// True when the lower comparison series `Σ_K C(K+n−1,n−1) floor(K)^n env(K)^r`
/// provably diverges.
pub(crate) fn lattice_diverges(n: usize, floor: FactorFloor, lower: &Envelope, r: f64) -> bool {
    match *lower {
        Envelope::Exponential { .. } => false,
        Envelope::Polynomial { scale, decay } => {
            let nf = n as f64;
            scale > 0.0 && floor.scale > 0.0 && nf - 1.0 - nf * floor.decay - decay * r >= -1.0
        }
    }
}
