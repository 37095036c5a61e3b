//! Nuclear and spectral traces of Hermite multipliers.
//!
//! For a multiplier `T_m` the nuclear trace is `Σ_ν m(ν)`. It is computed
//! here by several routes that share as little code as possible:
//!
//! * the symbol series, with a certified tail,
//! * quadrature of the truncated kernel diagonal `Σ m(ν) φ_ν(x)²`,
//! * for the semigroup `e^{-tH}`, quadrature of Mehler's closed-form
//!   diagonal and the closed form `(e^t − e^{-t})^{-n}`,
//! * the eigenvalues of a Galerkin matrix `⟨T_m φ_μ, φ_ν⟩`, which for the
//!   semigroup is assembled from Mehler's kernel rather than from `m`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::hermite::{count_up_to, enumerate_level, enumerate_up_to, graded_rank, phi_table};
use crate::math::{binomial_f64, cosh, exp, powi, sinh, sqrt, PI};
use crate::nuclearity::{
    certify_kappa, certify_s_r, classify_regime, gl_condition, CriterionReport, Verdict, DEFAULT_CUTOFF,
};
use crate::quadrature::{gauss_hermite_rule, integrate_panels, truncation_radius, QuadratureRule};
use crate::spectral::{mehler_diagonal, mehler_kernel, Symbol, SymbolKind};
use crate::sum::CompensatedSum;
use crate::tail::{lattice_tail, FactorGrowth};

/// Largest truncation order tried by [`trace_symbol_sum`].
pub const MAX_TRACE_ORDER: u32 = 1 << 20;

/// Largest lattice summed term by term for symbols that are not radial.
pub const MAX_TRACE_TERMS: u64 = 50_000_000;

/// Largest Galerkin basis.
pub const MAX_GALERKIN_BASIS: usize = 3000;

/// A truncated trace with a bound on what was left out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceValue {
    pub value: f64,
    /// Bound on `|Σ_{|ν|>N} m(ν)|`; absent when no envelope is available.
    pub tail_bound: Option<f64>,
    #[serde(rename = "N")]
    pub truncation_order: u32,
    /// Difference between two quadrature rules, for quadrature routes.
    pub quadrature_error: Option<f64>,
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

fn check_table_dim(m: &Symbol, n: usize) -> Result<()> {
    match m.finite_support().and_then(|t| t.keys().next()) {
        Some(nu) if nu.dim() != n => Err(Error::domain(format!(
            "table symbol has dimension {}, expected {n}",
            nu.dim()
        ))),
        _ => Ok(()),
    }
}

/// Certified `|Σ_{|ν|>N} m(ν)|` bound.
fn series_tail(m: &Symbol, n: usize, max_order: u32) -> Option<f64> {
    if let Some(map) = m.finite_support() {
        return Some(
            map.iter()
                .filter(|(nu, _)| nu.order() > u64::from(max_order))
                .map(|(_, v)| v.abs())
                .sum(),
        );
    }
    m.upper_envelope(n)
        .and_then(|env| lattice_tail(n, u64::from(max_order), FactorGrowth::UNIT, &env, 1.0))
}

/// `Σ_{|ν|≤N} m(ν) · Π_j q[ν_j]`, level-grouped when `m` is radial.
fn weighted_symbol_sum(m: &Symbol, n: usize, max_order: u32, q: Option<&[f64]>) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    let radial_probe = m.level_value(0, n).is_some();
    if radial_probe {
        // level_sums[k] = Σ_{|ν|=k} Π_j q[ν_j]
        let level_sums: Vec<f64> = match q {
            None => (0..=u64::from(max_order)).map(|k| binomial_f64(k + n as u64 - 1, n as u64 - 1)).collect(),
            Some(q) => {
                let len = max_order as usize + 1;
                let mut conv = q[..len].to_vec();
                for _ in 1..n {
                    let mut next = vec![0.0; len];
                    for (i, &a) in conv.iter().enumerate() {
                        for (j, &b) in q[..len - i].iter().enumerate() {
                            next[i + j] += a * b;
                        }
                    }
                    conv = next;
                }
                conv
            }
        };
        for (k, s) in level_sums.iter().enumerate() {
            let mk = m.level_value(k as u64, n).unwrap_or(0.0);
            if mk != 0.0 {
                acc.add(mk * s);
            }
        }
        return Ok(acc.value());
    }
    if let Some(map) = m.finite_support() {
        for (nu, v) in map.iter().filter(|(nu, _)| nu.order() <= u64::from(max_order)) {
            let w = q.map_or(1.0, |q| nu.entries().iter().map(|&u| q[u as usize]).product());
            acc.add(v * w);
        }
        return Ok(acc.value());
    }
    if count_up_to(n, u64::from(max_order)).map_or(true, |c| c > MAX_TRACE_TERMS) {
        return Err(Error::capability(format!(
            "lattice |ν| ≤ {max_order} in dimension {n} exceeds {MAX_TRACE_TERMS} terms"
        )));
    }
    for level in 0..=max_order {
        for nu in enumerate_level(n, level)? {
            let v = m.eval(&nu);
            if v != 0.0 {
                let w = q.map_or(1.0, |q| nu.entries().iter().map(|&u| q[u as usize]).product());
                acc.add(v * w);
            }
        }
    }
    Ok(acc.value())
}

/// `Tr(T_m) = Σ_ν m(ν)`, truncated where the certified tail drops below `tol`.
pub fn trace_symbol_sum(m: &Symbol, n: usize, tol: f64) -> Result<TraceValue> {
    check_dim(n)?;
    check_tolerance(tol)?;
    check_table_dim(m, n)?;
    let order = if let Some(order) = m.support_order() {
        order as u32
    } else {
        if m.upper_envelope(n).is_none() {
            return Err(Error::Inconclusive(
                "symbol has infinite support and no decay envelope".to_string(),
            ));
        }
        let mut order = 16u32;
        loop {
            if series_tail(m, n, order).is_some_and(|b| b < tol) {
                break order;
            }
            if order >= MAX_TRACE_ORDER {
                return Err(Error::Inconclusive(format!(
                    "tail bound stays above {tol:e} up to order {MAX_TRACE_ORDER}"
                )));
            }
            order *= 2;
        }
    };
    Ok(TraceValue {
        value: weighted_symbol_sum(m, n, order, None)?,
        tail_bound: series_tail(m, n, order),
        truncation_order: order,
        quadrature_error: None,
    })
}

/// `q[u] = ∫ φ_u(x)² dx` by the given rule, for `u ≤ N`.
fn diagonal_integrals(rule: &QuadratureRule, max_order: u32) -> Result<Vec<f64>> {
    let mut acc = vec![CompensatedSum::new(); max_order as usize + 1];
    for (&x, &w) in rule.nodes().iter().zip(rule.dx_weights()) {
        for (a, v) in acc.iter_mut().zip(phi_table(max_order, x)?) {
            a.add(w * v * v);
        }
    }
    Ok(acc.iter().map(CompensatedSum::value).collect())
}

/// `∫_{ℝⁿ} Σ_{|ν|≤N} m(ν) φ_ν(x)² dx` by tensor Gauss–Hermite quadrature.
///
/// The integrand is a sum of products, so the tensor rule factorizes into
/// one-dimensional integrals of `φ_u²`. Rules with `N + 1` nodes (exact for
/// this integrand) and `N + 9` nodes are compared; a difference above `tol`
/// is reported as a convergence failure.
pub fn trace_diagonal_quadrature(m: &Symbol, n: usize, max_order: u32, tol: f64) -> Result<TraceValue> {
    check_dim(n)?;
    check_tolerance(tol)?;
    check_table_dim(m, n)?;
    let nodes = max_order as usize + 1;
    let coarse = diagonal_integrals(&gauss_hermite_rule(nodes)?, max_order)?;
    let fine = diagonal_integrals(&gauss_hermite_rule(nodes + 8)?, max_order)?;
    let a = weighted_symbol_sum(m, n, max_order, Some(&coarse))?;
    let b = weighted_symbol_sum(m, n, max_order, Some(&fine))?;
    let diff = (a - b).abs();
    if diff > tol {
        return Err(Error::Convergence { previous: a, last: b });
    }
    Ok(TraceValue {
        value: a,
        tail_bound: series_tail(m, n, max_order),
        truncation_order: max_order,
        quadrature_error: Some(diff),
    })
}

/// `∫_{ℝⁿ} K_t(x,x) dx` with Mehler's closed-form diagonal, by adaptive
/// quadrature of the one-dimensional factor.
pub fn mehler_diagonal_trace(t: f64, n: usize, tol: f64) -> Result<f64> {
    check_dim(n)?;
    if !(tol > 1e-15 && tol < 1e-2) {
        return Err(Error::domain(format!("tolerance must lie in (1e-15, 1e-2), got {tol}")));
    }
    mehler_diagonal(t, &[0.0])?;
    // K_t(x,x) ∝ e^{-x² tanh t}; beyond the radius it is below e^{-45}.
    let radius = sqrt(45.0 / libm::tanh(t));
    let panels = 24;
    let breaks: Vec<f64> = (0..=panels).map(|i| radius * f64::from(i) / f64::from(panels)).collect();
    let half = integrate_panels(&breaks, |x| mehler_diagonal(t, &[x]).unwrap_or(0.0), tol)?;
    Ok(powi(2.0 * half, n as u32))
}

/// The semigroup trace `(e^t − e^{-t})^{-n}` and the Mehler-integral form
/// `[(2π)^{-1/2} sinh(2t)^{-1/2} (π/(coth 2t − csch 2t))^{1/2}]^n` it is
/// derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemigroupTrace {
    pub t: f64,
    pub n: usize,
    pub value: f64,
    pub mehler_form: f64,
    /// The two forms agree to `10⁻¹²` relative.
    pub consistent: bool,
}

pub fn semigroup_trace_closed_form(t: f64, n: usize) -> Result<SemigroupTrace> {
    check_dim(n)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("semigroup time must be t > 0, got {t}")));
    }
    let k = n as u32;
    let value = powi(1.0 / (exp(t) - exp(-t)), k);
    let s = sinh(2.0 * t);
    let a = cosh(2.0 * t) / s - 1.0 / s;
    let one_dim = sqrt(1.0 / (2.0 * PI)) * sqrt(1.0 / s) * sqrt(PI / a);
    let mehler_form = powi(one_dim, k);
    let consistent = (value - mehler_form).abs() <= 1e-12 * value.abs();
    Ok(SemigroupTrace { t, n, value, mehler_form, consistent })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub between: [String; 2],
    pub abs: f64,
}

/// All available trace routes for one symbol and their pairwise differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub n: usize,
    pub symbol: SymbolKind,
    pub symbol_sum: TraceValue,
    pub diagonal_quadrature: TraceValue,
    /// Quadrature of Mehler's diagonal; heat symbols only.
    pub mehler_diagonal: Option<f64>,
    /// `(e^t − e^{-t})^{-n}`; heat symbols only.
    pub closed_form: Option<f64>,
    pub discrepancies: Vec<Discrepancy>,
}

/// Runs every route. The diagonal quadrature is truncated at the order the
/// symbol series needed.
pub fn trace_report(m: &Symbol, n: usize, tol: f64) -> Result<TraceReport> {
    let symbol_sum = trace_symbol_sum(m, n, tol)?;
    let qtol = tol.max(1e-12);
    let diagonal_quadrature = trace_diagonal_quadrature(m, n, symbol_sum.truncation_order, qtol)?;
    let (mehler, closed) = match m.kind() {
        SymbolKind::Heat { t } => (
            Some(mehler_diagonal_trace(t, n, qtol.min(1e-3))?),
            Some(semigroup_trace_closed_form(t, n)?.value),
        ),
        _ => (None, None),
    };
    let routes: Vec<(&str, f64)> = [
        Some(("symbol_sum", symbol_sum.value)),
        Some(("diagonal_quadrature", diagonal_quadrature.value)),
        mehler.map(|v| ("mehler_diagonal", v)),
        closed.map(|v| ("closed_form", v)),
    ]
    .into_iter()
    .flatten()
    .collect();
    let mut discrepancies = Vec::new();
    for (i, (a, va)) in routes.iter().enumerate() {
        for (b, vb) in &routes[i + 1..] {
            discrepancies.push(Discrepancy { between: [a.to_string(), b.to_string()], abs: (va - vb).abs() });
        }
    }
    Ok(TraceReport {
        n,
        symbol: m.kind(),
        symbol_sum,
        diagonal_quadrature,
        mehler_diagonal: mehler,
        closed_form: closed,
        discrepancies,
    })
}

/// How the Galerkin matrix was assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GalerkinRoute {
    /// Double integrals of Mehler's closed-form kernel against `φ_μ ⊗ φ_ν`.
    MehlerKernel,
    /// The truncated series kernel with a quadrature Gram matrix.
    SeriesKernel,
}

/// One-dimensional `G1[a][b] = ∫∫ K_t(x,y) φ_a(y) φ_b(x) dx dy` for `a, b ≤ N`,
/// by a composite Gauss–Legendre rule on `[-R, R]²`.
fn mehler_galerkin_1d(t: f64, max_order: u32) -> Result<DMatrix<f64>> {
    let radius = truncation_radius(max_order);
    let width = 0.5f64.min(sqrt(t));
    let panels = libm::ceil(2.0 * radius / width) as usize;
    let rule = QuadratureRule::truncated(radius, panels, 16)?;
    let len = rule.len();
    if len > 8000 {
        return Err(Error::capability(format!("Mehler Galerkin grid of {len} nodes is too fine")));
    }
    let nodes = rule.nodes();
    let w = rule.dx_weights();
    let side = max_order as usize + 1;
    let mut phi = DMatrix::zeros(len, side);
    for (i, &x) in nodes.iter().enumerate() {
        for (a, v) in phi_table(max_order, x)?.into_iter().enumerate() {
            phi[(i, a)] = w[i] * v;
        }
    }
    let mut kernel = DMatrix::zeros(len, len);
    for i in 0..len {
        for j in i..len {
            let v = mehler_kernel(t, &[nodes[i]], &[nodes[j]])?;
            kernel[(i, j)] = v;
            kernel[(j, i)] = v;
        }
    }
    Ok(phi.transpose() * kernel * phi)
}

/// One-dimensional Gram matrix `Q[a][b] = ⟨φ_a, φ_b⟩` by Gauss–Hermite
/// quadrature with `N + 1` nodes.
fn gram_1d(max_order: u32) -> Result<DMatrix<f64>> {
    let rule = gauss_hermite_rule(max_order as usize + 1)?;
    let side = max_order as usize + 1;
    let mut phi = DMatrix::zeros(rule.len(), side);
    for (i, (&x, &w)) in rule.nodes().iter().zip(rule.dx_weights()).enumerate() {
        for (a, v) in phi_table(max_order, x)?.into_iter().enumerate() {
            phi[(i, a)] = sqrt(w) * v;
        }
    }
    Ok(phi.transpose() * &phi)
}

/// `⟨T_m φ_μ, φ_ν⟩` for `|μ|, |ν| ≤ N`, rows and columns in graded order.
pub fn galerkin_matrix(m: &Symbol, n: usize, max_order: u32) -> Result<(DMatrix<f64>, GalerkinRoute)> {
    check_dim(n)?;
    check_table_dim(m, n)?;
    let size = count_up_to(n, u64::from(max_order))
        .and_then(|c| usize::try_from(c).ok())
        .filter(|&c| c <= MAX_GALERKIN_BASIS)
        .ok_or_else(|| Error::capability(format!("Galerkin basis exceeds {MAX_GALERKIN_BASIS} functions")))?;
    let basis: Vec<_> = enumerate_up_to(n, max_order)?.collect();
    if let SymbolKind::Heat { t } = m.kind() {
        let g1 = mehler_galerkin_1d(t, max_order)?;
        let g: DMatrix<f64> = DMatrix::from_fn(size, size, |i, j| {
            basis[i]
                .entries()
                .iter()
                .zip(basis[j].entries())
                .map(|(&a, &b)| g1[(a as usize, b as usize)])
                .product()
        });
        return Ok((g, GalerkinRoute::MehlerKernel));
    }
    let q = gram_1d(max_order)?;
    let c: DMatrix<f64> = DMatrix::from_fn(size, size, |l, mu| {
        basis[l]
            .entries()
            .iter()
            .zip(basis[mu].entries())
            .map(|(&a, &b)| q[(a as usize, b as usize)])
            .product()
    });
    let d: Vec<f64> = basis.iter().map(|nu| m.eval(nu)).collect();
    let mut dc = c.clone();
    for (l, &ml) in d.iter().enumerate() {
        dc.row_mut(l).scale_mut(ml);
    }
    debug_assert_eq!(graded_rank(basis[size - 1].entries()), size - 1);
    Ok((c.transpose() * dc, GalerkinRoute::SeriesKernel))
}

/// Eigenvalues of the Galerkin matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalerkinSpectrum {
    pub route: GalerkinRoute,
    #[serde(rename = "N")]
    pub truncation_order: u32,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    pub eigenvalue_sum: f64,
    pub max_off_diagonal: f64,
}

pub fn galerkin_eigenvalues(m: &Symbol, n: usize, max_order: u32) -> Result<GalerkinSpectrum> {
    let (g, route) = galerkin_matrix(m, n, max_order)?;
    let mut max_off_diagonal = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            if i != j {
                max_off_diagonal = max_off_diagonal.max(g[(i, j)].abs());
            }
        }
    }
    let sym = (&g + g.transpose()) * 0.5;
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let eigenvalue_sum = eigenvalues.iter().copied().collect::<CompensatedSum>().value();
    Ok(GalerkinSpectrum { route, truncation_order: max_order, eigenvalues, eigenvalue_sum, max_off_diagonal })
}

/// Default Galerkin truncation: orders `0..=59` in one dimension, a basis of
/// at most 1000 functions otherwise.
pub fn default_galerkin_order(n: usize) -> u32 {
    if n <= 1 {
        return 59;
    }
    let mut order = 0;
    while count_up_to(n, u64::from(order) + 1).is_some_and(|c| c <= 1000) {
        order += 1;
    }
    order
}

/// Nuclear trace against the eigenvalue sum under the exponent condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralTraceReport {
    pub p: Exponent,
    /// `1/(1 + |1/p − 1/2|)`.
    pub gl_order: f64,
    /// The order at which the criterion was evaluated.
    pub r: f64,
    /// `r ≤ gl_order`, so the trace formula is covered.
    pub hypotheses_met: bool,
    pub criterion: CriterionReport,
    pub trace: TraceValue,
    pub galerkin_route: GalerkinRoute,
    #[serde(rename = "galerkin_N")]
    pub galerkin_order: u32,
    pub eigenvalue_sum: f64,
    pub max_off_diagonal: f64,
    pub difference: f64,
}

/// [`spectral_trace_check_at`] with `r` from the exponent condition.
pub fn spectral_trace_check(m: &Symbol, p: Exponent, n: usize, tol: f64) -> Result<SpectralTraceReport> {
    spectral_trace_check_at(m, p, n, tol, gl_condition(p), default_galerkin_order(n))
}

/// Certifies `r`-nuclearity on `L^p`, then compares `Σ m(ν)` with the sum of
/// the Galerkin eigenvalues. For `p ∈ (1, ∞)` the `ϰ` criterion is used; at
/// `p = 1` or `∞` the direct sum `s_r`. A non-finite verdict refuses the
/// check; `r` above the exponent condition only clears `hypotheses_met`.
pub fn spectral_trace_check_at(
    m: &Symbol,
    p: Exponent,
    n: usize,
    tol: f64,
    r: f64,
    galerkin_order: u32,
) -> Result<SpectralTraceReport> {
    let gl_order = gl_condition(p);
    let criterion = match classify_regime(p, p, r, DEFAULT_CUTOFF) {
        Ok(case) => certify_kappa(m, &case, n, tol)?,
        Err(Error::Unsupported { .. }) => certify_s_r(m, p, p, r, n, tol)?,
        Err(e) => return Err(e),
    };
    if criterion.verdict != Verdict::Finite {
        return Err(Error::CriterionNotFinite(criterion.verdict));
    }
    let trace = trace_symbol_sum(m, n, tol)?;
    let order = m.support_order().map_or(galerkin_order, |o| galerkin_order.max(o as u32));
    let spectrum = galerkin_eigenvalues(m, n, order)?;
    Ok(SpectralTraceReport {
        p,
        gl_order,
        r,
        hypotheses_met: r <= gl_order * (1.0 + 1e-12),
        difference: (trace.value - spectrum.eigenvalue_sum).abs(),
        criterion,
        trace,
        galerkin_route: spectrum.route,
        galerkin_order: order,
        eigenvalue_sum: spectrum.eigenvalue_sum,
        max_off_diagonal: spectrum.max_off_diagonal,
    })
}
