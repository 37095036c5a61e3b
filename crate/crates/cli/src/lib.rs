//! Command-line front end for `hermult-core`: norm tables, nuclearity
//! verdicts, trace comparisons and kernel checks as JSON or CSV.
//!
//! Every run is a pure function of its arguments, so identical invocations
//! produce byte-identical output.

pub mod args;
pub mod error;
pub mod report;
mod symbol_spec;

use std::io::Write;

use hermult_core::nuclearity::classify_regime;
use hermult_core::quadrature::norm_estimate;
use hermult_core::spectral::mehler_kernel;
use hermult_core::trace::trace_report;
use hermult_core::{
    gl_condition, kappa_sum, kernel_series, s_r_sum, semigroup_trace_closed_form,
    trace_diagonal_quadrature, trace_symbol_sum, MultiIndex, Symbol,
};
use serde::Serialize;

pub use args::{Cli, Command, Format};
pub use error::{CliError, ErrorObject};
use report::*;
pub use symbol_spec::parse_symbol;

/// Version of the JSON layout.
pub const SCHEMA: u32 = 1;

/// Runs one command and returns the rendered artifact.
pub fn run(command: &Command) -> Result<Vec<u8>, CliError> {
    match command {
        Command::Norms(a) => {
            let c = &a.common;
            let mut rows = Vec::new();
            for &d in &a.degrees {
                let nu = MultiIndex::new(vec![d; c.n])?;
                for &p in &a.exponents {
                    let e = norm_estimate(&nu, p, c.k, c.tol)?;
                    rows.push(NormRow {
                        nu: join(nu.entries()),
                        p,
                        computed: e.computed,
                        model: e.predicted,
                        ratio: e.ratio(),
                    });
                }
            }
            render(c.format, "norms", &rows, &rows)
        }
        Command::Criterion(a) => {
            let c = &a.common;
            let m = parse_symbol(&a.symbol, c.n)?;
            let r = match (a.gl_order, a.r) {
                (Some(p), _) => gl_condition(p),
                (None, Some(r)) => r,
                (None, None) => 1.0,
            };
            let case = classify_regime(a.p1, a.p2, r, c.k)?;
            let kappa = kappa_sum(&m, &case, c.n, c.truncation, c.tol)?;
            let direct = if a.direct {
                Some(s_r_sum(&m, a.p1, a.p2, r, c.n, c.truncation, c.tol)?)
            } else {
                None
            };
            let rows: Vec<CriterionRow> =
                std::iter::once(&kappa).chain(direct.as_ref()).map(CriterionRow::from).collect();
            render(c.format, "criterion", &CriterionOutput { kappa, direct }, &rows)
        }
        Command::Trace(a) => {
            let c = &a.common;
            let m = parse_symbol(&a.symbol, c.n)?;
            let report = trace_report(&m, c.n, c.tol)?;
            let row = TraceRow::from(&report);
            render(c.format, "trace", &report, &[row])
        }
        Command::Semigroup(a) => {
            let c = &a.common;
            let mut rows = Vec::new();
            for &t in &a.times {
                let m = Symbol::heat(t)?;
                let sum = trace_symbol_sum(&m, c.n, c.tol)?;
                let quad = trace_diagonal_quadrature(&m, c.n, sum.truncation_order, c.tol.max(1e-12))?;
                let closed = semigroup_trace_closed_form(t, c.n)?.value;
                let spread = [
                    (sum.value - quad.value).abs(),
                    (sum.value - closed).abs(),
                    (quad.value - closed).abs(),
                ];
                rows.push(SemigroupRow {
                    t,
                    n: c.n,
                    symbol_sum: sum.value,
                    diagonal_quadrature: quad.value,
                    closed_form: closed,
                    truncation_order: sum.truncation_order,
                    max_abs_difference: spread.into_iter().fold(0.0, f64::max),
                });
            }
            render(c.format, "semigroup", &rows, &rows)
        }
        Command::Kernel(a) => {
            let c = &a.common;
            if a.points < 2 || !(a.half_width > 0.0 && a.half_width.is_finite()) {
                return Err(CliError::Config("kernel grid needs --points ≥ 2 and --half-width > 0".into()));
            }
            let grid: Vec<f64> = (0..a.points)
                .map(|i| -a.half_width + 2.0 * a.half_width * i as f64 / (a.points - 1) as f64)
                .collect();
            let mut rows = Vec::new();
            for &t in &a.times {
                let m = Symbol::heat(t)?;
                for &x in &grid {
                    for &y in &grid {
                        let (xv, yv) = (vec![x; c.n], vec![y; c.n]);
                        let mehler = mehler_kernel(t, &xv, &yv)?;
                        let series = kernel_series(&m, &xv, &yv, c.truncation)?;
                        rows.push(KernelRow {
                            t,
                            n: c.n,
                            x,
                            y,
                            mehler,
                            series: series.value,
                            tail_bound: series.tail_bound,
                            abs_error: (mehler - series.value).abs(),
                            truncation_order: series.max_order,
                        });
                    }
                }
            }
            render(c.format, "kernel", &rows, &rows)
        }
    }
}

/// Writes `bytes` to the configured output path, or stdout.
pub fn emit(command: &Command, bytes: &[u8]) -> Result<(), CliError> {
    let common = match command {
        Command::Norms(a) => &a.common,
        Command::Criterion(a) => &a.common,
        Command::Trace(a) => &a.common,
        Command::Semigroup(a) => &a.common,
        Command::Kernel(a) => &a.common,
    };
    match &common.output {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn render<D: Serialize, R: Serialize>(
    format: Format,
    command: &str,
    data: &D,
    rows: &[R],
) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let doc = Document { schema: SCHEMA, command: command.to_string(), data };
            let mut out = serde_json::to_vec_pretty(&doc).map_err(std::io::Error::from)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row)?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.into_error()))
        }
    }
}

fn join(entries: &[u32]) -> String {
    entries.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}
