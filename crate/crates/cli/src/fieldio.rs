//! Field, trace and report files.
//!
//! Field files are CSV with header `x1,x2,x3,s,beta2,beta3,B,rho,u1,u2,u3`
//! (`p` in place of `s` for incompressible flows), one row per node with
//! `x3` varying fastest. Values carry 17 significant digits so a write then
//! read reproduces every bit.

use std::fmt::Write as _;
use std::path::Path;

use subsonic_core::domain::{FlowKind, GridSpec, ScalarField3};
use subsonic_core::flow::FlowField;
use subsonic_core::gas::GasModel;
use subsonic_core::invariants::DiagnosticsReport;
use subsonic_core::solver::IterationTrace;

use crate::CliError;

const COMPRESSIBLE_HEADER: &str = "x1,x2,x3,s,beta2,beta3,B,rho,u1,u2,u3";
const INCOMPRESSIBLE_HEADER: &str = "x1,x2,x3,p,beta2,beta3,B,rho,u1,u2,u3";

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn push_value(out: &mut String, v: f64) {
    write!(out, "{v:.16e}").unwrap();
}

pub fn format_fields(flow: &FlowField) -> String {
    let g = flow.grid();
    let header = match flow.kind {
        FlowKind::Compressible(_) => COMPRESSIBLE_HEADER,
        FlowKind::Incompressible => INCOMPRESSIBLE_HEADER,
    };
    // a field without valid primitives (a failed run) still gets written
    let prim = flow.primitives().ok();
    let nan = ScalarField3::constant(g, f64::NAN);
    let (rho, u1, u2, u3) = match &prim {
        Some(p) => (&p.rho, &p.u1, &p.u2, &p.u3),
        None => (&nan, &nan, &nan, &nan),
    };
    let mut out = String::with_capacity(g.len() * 11 * 24 + 64);
    out.push_str(header);
    out.push('\n');
    for n in 0..g.len() {
        let (i, j, k) = g.ijk(n);
        let row = [
            g.x1(i),
            g.x2(j),
            g.x3(k),
            flow.primary.values[n],
            flow.beta2.values[n],
            flow.beta3.values[n],
            flow.bernoulli.values[n],
            rho.values[n],
            u1.values[n],
            u2.values[n],
            u3.values[n],
        ];
        for (c, v) in row.iter().enumerate() {
            if c > 0 {
                out.push(',');
            }
            push_value(&mut out, *v);
        }
        out.push('\n');
    }
    out
}

pub fn write_fields(path: &Path, flow: &FlowField) -> Result<(), CliError> {
    std::fs::write(path, format_fields(flow)).map_err(|e| io_err(path, e))
}

/// Parses a field file. Compressible files need the gas model; the grid is
/// recovered from the coordinate columns.
pub fn parse_fields(text: &str, gas: Option<GasModel>) -> Result<FlowField, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty field file")?.trim();
    let kind = match header {
        COMPRESSIBLE_HEADER => FlowKind::Compressible(gas.ok_or("compressible field file needs gamma")?),
        INCOMPRESSIBLE_HEADER => FlowKind::Incompressible,
        other => return Err(format!("unexpected header `{other}`")),
    };
    let mut rows: Vec<[f64; 7]> = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| format!("line {}: `{t}` is not a number", n + 2)))
            .collect::<Result<_, _>>()?;
        if vals.len() != 11 {
            return Err(format!("line {}: expected 11 columns, got {}", n + 2, vals.len()));
        }
        rows.push(std::array::from_fn(|c| vals[c]));
    }
    let grid = infer_grid(&rows)?;
    let column = |c: usize| ScalarField3 { grid, values: rows.iter().map(|r| r[c]).collect() };
    Ok(FlowField { kind, primary: column(3), beta2: column(4), beta3: column(5), bernoulli: column(6) })
}

fn infer_grid(rows: &[[f64; 7]]) -> Result<GridSpec, String> {
    let first = rows.first().ok_or("field file has no data rows")?;
    let n3 = rows.iter().take_while(|r| r[0] == first[0] && r[1] == first[1]).count();
    let plane = rows.iter().take_while(|r| r[0] == first[0]).count();
    if n3 == 0 || plane % n3 != 0 || rows.len() % plane != 0 {
        return Err("rows do not form a structured grid".into());
    }
    let grid = GridSpec::new(rows.len() / plane, plane / n3, n3).map_err(|e| e.to_string())?;
    for (n, r) in rows.iter().enumerate() {
        let (i, j, k) = grid.ijk(n);
        let expect = [grid.x1(i), grid.x2(j), grid.x3(k)];
        if (0..3).any(|c| (r[c] - expect[c]).abs() > 1e-12) {
            return Err(format!("row {} has coordinates {:?}, expected {expect:?}", n + 1, &r[..3]));
        }
    }
    Ok(grid)
}

pub fn read_fields(path: &Path, gas: Option<GasModel>) -> Result<FlowField, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_fields(&text, gas).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub const TRACE_HEADER: &str = "iteration,diff_primary,diff_beta2,diff_beta3,diff_bernoulli,\
norm_primary,norm_beta2,norm_beta3,norm_bernoulli,ratio,linear_iterations";

pub fn format_trace(trace: &IterationTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        write!(out, "{}", r.iteration).unwrap();
        for v in r.diff.iter().chain(&r.norm) {
            out.push(',');
            push_value(&mut out, *v);
        }
        out.push(',');
        if let Some(q) = r.ratio {
            push_value(&mut out, q);
        }
        writeln!(out, ",{}", r.linear_iterations).unwrap();
    }
    out
}

pub fn write_trace(path: &Path, trace: &IterationTrace) -> Result<(), CliError> {
    std::fs::write(path, format_trace(trace)).map_err(|e| io_err(path, e))
}

pub fn write_report(path: &Path, report: &DiagnosticsReport) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| io_err(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn read_report(path: &Path) -> Result<DiagnosticsReport, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_err(path, e))
}
