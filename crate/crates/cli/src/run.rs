//! Subcommand implementations.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde_json::json;
use subsonic_core::characteristics::{compressible_roots, roots, CharError, CharRoots, CharState};
use subsonic_core::domain::{
    check_compatibility, check_even_profile, BackgroundState, CompatibilityReport, GridSpec, Parity, Profile,
};
use subsonic_core::flow::FlowField;
use subsonic_core::gas::GasModel;
use subsonic_core::invariants::{diagnose, verify_appendix_chain, AppendixFields, DiagnosticsReport};
use subsonic_core::solver::{solve, solve_incompressible, SolveResult};

use crate::config::{parse_config, Mode, RunConfig};
use crate::fieldio::{read_fields, read_report, write_fields, write_report, write_trace};
use crate::CliError;

/// Command-line options shared by all subcommands.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Grid refinement factor, 1 when absent.
    pub refine: Option<usize>,
    /// Input file overriding `field_file` or `states_file`.
    pub input: Option<PathBuf>,
    pub quiet: bool,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn load(opts: &Options, required: bool) -> Result<RunConfig, CliError> {
    match &opts.config {
        Some(p) => parse_config(p),
        None if required => Err(config_err("--config <path> is required")),
        None => Ok(RunConfig::default()),
    }
}

fn output_dir(opts: &Options, cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = opts.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn grid(opts: &Options, cfg: &RunConfig, default: Option<GridSpec>) -> Result<GridSpec, CliError> {
    let g = cfg.grid.or(default).ok_or_else(|| config_err("missing key `grid`"))?;
    match opts.refine {
        None | Some(1) => Ok(g),
        Some(0) => Err(config_err("--refine must be at least 1")),
        Some(k) => Ok(g.refined(k)),
    }
}

fn gas(cfg: &RunConfig) -> Result<GasModel, CliError> {
    let g = cfg.gamma.ok_or_else(|| config_err("missing key `gamma`"))?;
    GasModel::new(g).map_err(|e| config_err(e.to_string()))
}

fn require_compatible(report: CompatibilityReport) -> Result<(), CliError> {
    if report.passed() {
        return Ok(());
    }
    let list: Vec<String> = report
        .failures()
        .map(|c| format!("{} {} (measured {:e})", c.field, c.condition, c.measured))
        .collect();
    Err(config_err(format!("incompatible profiles: {}", list.join("; "))))
}

fn background(cfg: &RunConfig, mode: Mode, grid: GridSpec) -> Result<BackgroundState, CliError> {
    let cross = grid.cross();
    let u0: &Profile = cfg.u0.as_ref().ok_or_else(|| config_err("missing key `u0`"))?;
    require_compatible(check_even_profile("u0", u0, cross, cfg.compatibility_tol))?;
    let u0 = u0.sample(cross, Parity::Even, Parity::Even).map_err(|e| config_err(e.to_string()))?;
    match mode {
        Mode::Compressible => {
            let rho0 = cfg.rho0.ok_or_else(|| config_err("missing key `rho0`"))?;
            BackgroundState::compressible(gas(cfg)?, rho0, u0, cfg.solver.subsonic_margin)
        }
        Mode::Incompressible => {
            let p0 = cfg.p0.ok_or_else(|| config_err("missing key `p0`"))?;
            BackgroundState::incompressible(p0, u0)
        }
    }
    .map_err(|e| config_err(e.to_string()))
}

fn report_orders(report: DiagnosticsReport, cfg: &RunConfig) -> Result<DiagnosticsReport, CliError> {
    Ok(match &cfg.coarse_report {
        Some(p) => report.with_orders(&read_report(p)?),
        None => report,
    })
}

fn summary(result: &SolveResult, mode: Mode, grid: GridSpec, cfg: &RunConfig, status: &str) -> String {
    let last = result.trace.records.last();
    let v = json!({
        "mode": match mode { Mode::Compressible => "compressible", Mode::Incompressible => "incompressible" },
        "grid": [grid.n1, grid.n2, grid.n3],
        "epsilon": cfg.epsilon,
        "status": status,
        "converged": result.converged,
        "iterations": result.trace.len(),
        "last_difference": last.map(|r| r.max_diff()),
        "delta_max": result.delta_max,
    });
    let mut s = serde_json::to_string_pretty(&v).unwrap();
    s.push('\n');
    s
}

/// `solve` and `solve-incompressible`. Writes `fields.csv`, `trace.csv`,
/// `run.json` and, when `diagnose = true`, `report.json`. Fields and trace
/// are written on failure too.
pub fn run_solve(opts: &Options, mode: Mode) -> Result<(), CliError> {
    let mut cfg = load(opts, true)?;
    match cfg.mode {
        Some(m) if m != mode => {
            let cmd = match m {
                Mode::Compressible => "solve",
                Mode::Incompressible => "solve-incompressible",
            };
            return Err(config_err(format!("config sets mode = {m:?}; use the `{cmd}` subcommand").to_lowercase()));
        }
        _ => cfg.mode = Some(mode),
    }
    let grid = grid(opts, &cfg, None)?;
    let bg = background(&cfg, mode, grid)?;
    require_compatible(check_compatibility(&cfg.profiles, grid.cross(), cfg.compatibility_tol))?;
    let data = cfg.profiles.sample(grid.cross(), cfg.epsilon).map_err(|e| config_err(e.to_string()))?;
    let result = match mode {
        Mode::Compressible => solve(&bg, &data, &cfg.solver, grid),
        Mode::Incompressible => solve_incompressible(&bg, &data, &cfg.solver, grid),
    }
    .map_err(CliError::Solver)?;

    let dir = output_dir(opts, &cfg)?;
    write_fields(&dir.join("fields.csv"), &result.flow)?;
    write_trace(&dir.join("trace.csv"), &result.trace)?;
    let outcome = match &result.failure {
        Some(e) => Err(CliError::Solver(e.clone())),
        None if !result.converged => Err(CliError::NotConverged {
            iterations: result.trace.len(),
            last_diff: result.trace.records.last().map_or(f64::NAN, |r| r.max_diff()),
        }),
        None => Ok(()),
    };
    let status = match &outcome {
        Ok(()) => "converged".to_string(),
        Err(e) => e.status_line(),
    };
    let run_json = dir.join("run.json");
    std::fs::write(&run_json, summary(&result, mode, grid, &cfg, &status))
        .map_err(|e| CliError::Io(format!("{}: {e}", run_json.display())))?;
    outcome?;

    if !opts.quiet {
        let last = result.trace.records.last().map_or(0.0, |r| r.max_diff());
        println!("converged in {} iterations, last difference {last:e}", result.trace.len());
    }
    if cfg.diagnose {
        let report = diagnose(&result.flow, &cfg.diagnose_options).map_err(CliError::Invariant)?;
        write_report(&dir.join("report.json"), &report_orders(report, &cfg)?)?;
    }
    Ok(())
}

/// Reads a field file and writes `report.json`.
pub fn run_diagnose(opts: &Options) -> Result<(), CliError> {
    let cfg = load(opts, false)?;
    let path = opts
        .input
        .clone()
        .or_else(|| cfg.field_file.clone())
        .ok_or_else(|| config_err("no field file: pass --input or set `field_file`"))?;
    let gas = cfg.gamma.map(GasModel::new).transpose().map_err(|e| config_err(e.to_string()))?;
    let flow = read_fields(&path, gas)?;
    check_mode(&cfg, &flow)?;
    let report = diagnose(&flow, &cfg.diagnose_options).map_err(CliError::Invariant)?;
    let report = report_orders(report, &cfg)?;
    let dir = output_dir(opts, &cfg)?;
    write_report(&dir.join("report.json"), &report)?;
    if !opts.quiet {
        println!("{} residuals written to {}", report.entries.len(), dir.join("report.json").display());
    }
    Ok(())
}

fn check_mode(cfg: &RunConfig, flow: &FlowField) -> Result<(), CliError> {
    let file_mode = match flow.kind {
        subsonic_core::domain::FlowKind::Compressible(_) => Mode::Compressible,
        subsonic_core::domain::FlowKind::Incompressible => Mode::Incompressible,
    };
    match cfg.mode {
        Some(m) if m != file_mode => Err(config_err(format!("config mode {m:?} does not match the field file"))),
        _ => Ok(()),
    }
}

pub const STATES_HEADER: &str = "gamma,rho,u1,u2,u3,xi2,xi3";
pub const ROOTS_HEADER: &str =
    "gamma,rho,u1,u2,u3,xi2,xi3,q,lambda_r,lambda_re,lambda_im,real_root_lo,real_root_hi,discriminant,classification";

/// Roots and classification of one state. `gamma = incompressible` selects
/// the incompressible symbol (density column ignored).
fn state_row(fields: &[&str]) -> Result<String, String> {
    let num = |i: usize| {
        fields[i].trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", fields[i].trim()))
    };
    let (rho, u1, u2, u3, xi2, xi3) = (num(1)?, num(2)?, num(3)?, num(4)?, num(5)?, num(6)?);
    if !(u1 > 0.0) {
        return Err(format!("u1 = {u1} must be positive"));
    }
    let (b2, b3) = (u2 / u1, u3 / u1);
    let (state, r) = if fields[0].trim() == "incompressible" {
        let st = CharState::incompressible(b2, b3, 1.0 / (u1 * u1)).map_err(|e| e.to_string())?;
        (st, roots(&st, xi2, xi3))
    } else {
        let gas = GasModel::new(num(0)?).map_err(|e| e.to_string())?;
        if !(rho > 0.0) {
            return Err(format!("rho = {rho} must be positive"));
        }
        let st = CharState::compressible(b2, b3, gas.sound_speed_sq(rho) / (u1 * u1)).map_err(|e| e.to_string())?;
        (st, compressible_roots(&st, xi2, xi3))
    };
    let mut line = fields.iter().map(|f| f.trim()).collect::<Vec<_>>().join(",");
    write!(line, ",{:.16e}", state.q).unwrap();
    let blank = |line: &mut String, n: usize| (0..n).for_each(|_| line.push(','));
    match r {
        Ok(CharRoots { lambda_r, lambda_re, lambda_im, discriminant, elliptic, real_pair, .. }) => {
            write!(line, ",{lambda_r:.16e}").unwrap();
            if elliptic {
                write!(line, ",{lambda_re:.16e},{lambda_im:.16e}").unwrap();
                blank(&mut line, 2);
            } else {
                blank(&mut line, 2);
                let (lo, hi) = real_pair.unwrap_or((f64::NAN, f64::NAN));
                write!(line, ",{lo:.16e},{hi:.16e}").unwrap();
            }
            write!(line, ",{discriminant:.16e},{}", if elliptic { "elliptic" } else { "non_elliptic" }).unwrap();
        }
        Err(CharError::DegenerateQuadratic) => {
            blank(&mut line, 6);
            line.push_str(",sonic");
        }
        Err(e) => return Err(e.to_string()),
    }
    Ok(line)
}

/// Reads a CSV of states and writes `characteristics.csv`.
pub fn run_characteristics(opts: &Options) -> Result<(), CliError> {
    let cfg = load(opts, false)?;
    let path = opts
        .input
        .clone()
        .or_else(|| cfg.states_file.clone())
        .ok_or_else(|| config_err("no states file: pass --input or set `states_file`"))?;
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let bad = |line: usize, msg: String| CliError::Io(format!("{}:{line}: {msg}", path.display()));
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(STATES_HEADER) {
        return Err(bad(1, format!("expected header `{STATES_HEADER}`")));
    }
    let mut out = String::from(ROOTS_HEADER);
    out.push('\n');
    let mut count = 0;
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(bad(n + 2, format!("expected 7 columns, got {}", fields.len())));
        }
        out.push_str(&state_row(&fields).map_err(|m| bad(n + 2, m))?);
        out.push('\n');
        count += 1;
    }
    let dir = output_dir(opts, &cfg)?;
    let target = dir.join("characteristics.csv");
    std::fs::write(&target, out).map_err(|e| CliError::Io(format!("{}: {e}", target.display())))?;
    if !opts.quiet {
        println!("{count} states written to {}", target.display());
    }
    Ok(())
}

/// Runs the appendix chain on the grid and its refinement by two and writes
/// the fine report with observed orders.
pub fn run_verify_appendix(opts: &Options) -> Result<(), CliError> {
    let cfg = load(opts, false)?;
    let coarse_grid = grid(opts, &cfg, Some(GridSpec::new(17, 16, 16).unwrap()))?;
    let fields = AppendixFields::reference();
    let coarse = verify_appendix_chain(&fields, coarse_grid);
    let fine = verify_appendix_chain(&fields, coarse_grid.refined(2)).with_orders(&coarse);
    let dir = output_dir(opts, &cfg)?;
    write_report(&dir.join("report.json"), &fine)?;
    if !opts.quiet {
        let factor = fine.reduction_factor(&coarse, "j_chain").unwrap_or(f64::NAN);
        println!("j_chain reduction factor {factor:.3}, report in {}", dir.join("report.json").display());
    }
    Ok(())
}

