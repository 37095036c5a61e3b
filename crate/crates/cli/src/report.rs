//! Serializable outputs. JSON documents wrap the payload with a schema
//! version; CSV emits the flat row types.

use hermult_core::trace::TraceReport;
use hermult_core::{CriterionReport, Exponent};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub schema: u32,
    pub command: String,
    pub data: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    /// Comma-separated multi-index.
    pub nu: String,
    pub p: Exponent,
    pub computed: f64,
    pub model: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutput {
    pub kappa: CriterionReport,
    /// The direct sum `s_r`, when requested.
    pub direct: Option<CriterionReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionRow {
    pub method: String,
    pub verdict: String,
    pub partial_sum: f64,
    pub tail_bound: Option<f64>,
    #[serde(rename = "N")]
    pub truncation_order: u32,
    pub p1: Exponent,
    pub p2: Exponent,
    pub r: f64,
    pub k: Option<u32>,
    pub n: usize,
}

impl From<&CriterionReport> for CriterionRow {
    fn from(c: &CriterionReport) -> Self {
        CriterionRow {
            method: enum_name(&c.method),
            verdict: enum_name(&c.verdict),
            partial_sum: c.partial_sum,
            tail_bound: c.tail_bound,
            truncation_order: c.truncation_order,
            p1: c.p1,
            p2: c.p2,
            r: c.r,
            k: c.k,
            n: c.n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: usize,
    pub symbol_sum: f64,
    pub diagonal_quadrature: f64,
    pub mehler_diagonal: Option<f64>,
    pub closed_form: Option<f64>,
    #[serde(rename = "N")]
    pub truncation_order: u32,
    pub tail_bound: Option<f64>,
}

impl From<&TraceReport> for TraceRow {
    fn from(t: &TraceReport) -> Self {
        TraceRow {
            n: t.n,
            symbol_sum: t.symbol_sum.value,
            diagonal_quadrature: t.diagonal_quadrature.value,
            mehler_diagonal: t.mehler_diagonal,
            closed_form: t.closed_form,
            truncation_order: t.symbol_sum.truncation_order,
            tail_bound: t.symbol_sum.tail_bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemigroupRow {
    pub t: f64,
    pub n: usize,
    pub symbol_sum: f64,
    pub diagonal_quadrature: f64,
    pub closed_form: f64,
    #[serde(rename = "N")]
    pub truncation_order: u32,
    pub max_abs_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRow {
    pub t: f64,
    pub n: usize,
    pub x: f64,
    pub y: f64,
    pub mehler: f64,
    pub series: f64,
    pub tail_bound: Option<f64>,
    pub abs_error: f64,
    #[serde(rename = "N")]
    pub truncation_order: u32,
}

/// The serde name of a unit enum variant.
fn enum_name<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}
