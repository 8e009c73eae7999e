//! Run configuration: a flat `key = value` file with `#` comments.
//!
//! Profile values are a catalog name followed by its parameters
//! (`cos_cos 1 1 0.05 0.5`, `constant 0.5`) or `tabulated <path>` for a
//! quadrant table, resolved relative to the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use subsonic_core::domain::boundary::CATALOG_TOLERANCE;
use subsonic_core::domain::{BoundaryProfiles, GridSpec, Profile, QuadrantTable};
use subsonic_core::elliptic::{LinearSolverConfig, PreconditionerKind};
use subsonic_core::invariants::DiagnoseOptions;
use subsonic_core::solver::SolverConfig;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Compressible,
    Incompressible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `None` lets the subcommand decide.
    pub mode: Option<Mode>,
    pub gamma: Option<f64>,
    pub rho0: Option<f64>,
    pub p0: Option<f64>,
    pub u0: Option<Profile>,
    pub profiles: BoundaryProfiles,
    pub epsilon: f64,
    pub grid: Option<GridSpec>,
    pub solver: SolverConfig,
    pub compatibility_tol: f64,
    pub output_dir: PathBuf,
    pub diagnose: bool,
    pub diagnose_options: DiagnoseOptions,
    pub field_file: Option<PathBuf>,
    pub states_file: Option<PathBuf>,
    pub coarse_report: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: None,
            gamma: None,
            rho0: None,
            p0: None,
            u0: None,
            profiles: BoundaryProfiles::reference(),
            epsilon: 0.0,
            grid: None,
            solver: SolverConfig::default(),
            compatibility_tol: CATALOG_TOLERANCE,
            output_dir: PathBuf::from("out"),
            diagnose: false,
            diagnose_options: DiagnoseOptions::default(),
            field_file: None,
            states_file: None,
            coarse_report: None,
        }
    }
}

const KEYS: &[&str] = &[
    "mode",
    "gamma",
    "rho0",
    "p0",
    "u0",
    "epsilon",
    "beta2_in",
    "beta3_in",
    "b_in",
    "exit",
    "grid",
    "tol_fixed",
    "max_iter",
    "relaxation",
    "subsonic_margin",
    "delta_max",
    "linear_tol",
    "linear_max_iter",
    "preconditioner",
    "compatibility_tol",
    "output_dir",
    "diagnose",
    "reference_pressure",
    "constant_b_tol",
    "field_file",
    "states_file",
    "coarse_report",
];

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
    parse_str(&text, path.parent().unwrap_or(Path::new(".")))
}

/// Parses config text; relative paths are resolved against `base`.
pub fn parse_str(text: &str, base: &Path) -> Result<RunConfig, CliError> {
    let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(format!("line {line_no}: expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(config_err(format!("line {line_no}: unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(config_err(format!("line {line_no}: key `{key}` has no value")));
        }
        if entries.insert(key, (line_no, value)).is_some() {
            return Err(config_err(format!("line {line_no}: duplicate key `{key}`")));
        }
    }

    let mut cfg = RunConfig::default();
    for (&key, &(line, value)) in &entries {
        let at = |msg: String| config_err(format!("line {line}: {key}: {msg}"));
        let num = || value.parse::<f64>().map_err(|_| at(format!("`{value}` is not a number")));
        let count = || value.parse::<usize>().map_err(|_| at(format!("`{value}` is not a nonnegative integer")));
        let profile = || parse_profile(value, base).map_err(at);
        match key {
            "mode" => {
                cfg.mode = match value {
                    "compressible" => Some(Mode::Compressible),
                    "incompressible" => Some(Mode::Incompressible),
                    _ => return Err(at(format!("expected compressible or incompressible, got `{value}`"))),
                }
            }
            "gamma" => {
                let g = num()?;
                if !(g > 1.0 && g < 3.0) {
                    return Err(at(format!("gamma = {g} must lie in (1, 3)")));
                }
                cfg.gamma = Some(g);
            }
            "rho0" => {
                let r = num()?;
                if !(r > 0.0 && r.is_finite()) {
                    return Err(at(format!("rho0 = {r} must be positive")));
                }
                cfg.rho0 = Some(r);
            }
            "p0" => cfg.p0 = Some(finite(num()?).map_err(at)?),
            "u0" => cfg.u0 = Some(profile()?),
            "epsilon" => {
                let e = num()?;
                if !(e >= 0.0 && e.is_finite()) {
                    return Err(at(format!("epsilon = {e} must be nonnegative")));
                }
                cfg.epsilon = e;
            }
            "beta2_in" => cfg.profiles.beta2_in = profile()?,
            "beta3_in" => cfg.profiles.beta3_in = profile()?,
            "b_in" => cfg.profiles.b_in = profile()?,
            "exit" => cfg.profiles.exit = profile()?,
            "grid" => {
                let n: Vec<usize> = value
                    .split_whitespace()
                    .map(|t| t.parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| at(format!("expected three counts `n1 n2 n3`, got `{value}`")))?;
                if n.len() != 3 {
                    return Err(at(format!("expected three counts `n1 n2 n3`, got `{value}`")));
                }
                cfg.grid = Some(GridSpec::new(n[0], n[1], n[2]).map_err(|e| at(e.to_string()))?);
            }
            "tol_fixed" => cfg.solver.tol_fixed = num()?,
            "max_iter" => cfg.solver.max_iter = count()?,
            "relaxation" => cfg.solver.relaxation = num()?,
            "subsonic_margin" => cfg.solver.subsonic_margin = num()?,
            "delta_max" => cfg.solver.delta_max = Some(num()?),
            "linear_tol" => cfg.solver.linear.tol = num()?,
            "linear_max_iter" => cfg.solver.linear.max_iter = Some(count()?),
            "preconditioner" => {
                cfg.solver.linear.preconditioner = match value {
                    "spectral" => PreconditionerKind::Spectral,
                    "jacobi" => PreconditionerKind::Jacobi,
                    _ => return Err(at(format!("expected spectral or jacobi, got `{value}`"))),
                }
            }
            "compatibility_tol" => {
                let t = num()?;
                if !(t >= 0.0) {
                    return Err(at(format!("{t} must be nonnegative")));
                }
                cfg.compatibility_tol = t;
            }
            "output_dir" => cfg.output_dir = base.join(value),
            "diagnose" => {
                cfg.diagnose = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(at(format!("expected true or false, got `{value}`"))),
                }
            }
            "reference_pressure" => cfg.diagnose_options.reference_pressure = Some(finite(num()?).map_err(at)?),
            "constant_b_tol" => cfg.diagnose_options.constant_b_tol = num()?,
            "field_file" => cfg.field_file = Some(base.join(value)),
            "states_file" => cfg.states_file = Some(base.join(value)),
            "coarse_report" => cfg.coarse_report = Some(base.join(value)),
            _ => unreachable!("key list and match arms agree"),
        }
    }
    validate_solver(&cfg.solver)?;
    Ok(cfg)
}

fn finite(v: f64) -> Result<f64, String> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be finite"))
    }
}

fn validate_solver(s: &SolverConfig) -> Result<(), CliError> {
    s.validate().map_err(|e| config_err(e.to_string()))?;
    let LinearSolverConfig { tol, max_iter, .. } = s.linear;
    if !(tol > 0.0) {
        return Err(config_err(format!("linear_tol = {tol} must be positive")));
    }
    if max_iter == Some(0) {
        return Err(config_err("linear_max_iter must be positive"));
    }
    Ok(())
}

/// `name p1 p2 ...` from the catalog, or `tabulated <path>`.
pub fn parse_profile(value: &str, base: &Path) -> Result<Profile, String> {
    let mut parts = value.split_whitespace();
    let name = parts.next().ok_or("empty profile")?;
    if name == "tabulated" {
        let file = parts.next().ok_or("tabulated profile needs a file path")?;
        if parts.next().is_some() {
            return Err("tabulated profile takes a single path".into());
        }
        return read_table(&base.join(file)).map(Profile::Tabulated);
    }
    let params: Vec<f64> = parts
        .map(|t| t.parse::<f64>().map_err(|_| format!("profile parameter `{t}` is not a number")))
        .collect::<Result<_, _>>()?;
    Profile::builtin(name, &params).map_err(|e| e.to_string())
}

/// One row per `x2` node of the quadrant, values separated by commas or
/// whitespace.
fn read_table(path: &Path) -> Result<QuadrantTable, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read table {}: {e}", path.display()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| format!("{}:{}: `{t}` is not a number", path.display(), n + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let m3 = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m3) {
        return Err(format!("{}: rows have different lengths", path.display()));
    }
    let m2 = rows.len();
    QuadrantTable::new(m2, m3, rows.concat()).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, CliError> {
        parse_str(text, Path::new("."))
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse("mode = compressible\ngamma = 1.4\nrho0 = 1\nu0 = constant 0.5\nepsilon = 0.01\ngrid = 17 16 16\n")
            .unwrap();
        assert_eq!(c.gamma, Some(1.4));
        assert_eq!(c.grid.unwrap().n1, 17);
        assert_eq!(c.solver, SolverConfig::default());
        assert_eq!(c.profiles, BoundaryProfiles::reference());
        assert!(!c.diagnose);
    }

    #[test]
    fn gamma_out_of_range() {
        let e = parse("gamma = 3.5\n").unwrap_err();
        assert!(e.to_string().contains("(1, 3)"), "{e}");
    }

    #[test]
    fn unknown_key_is_named() {
        let e = parse("# comment\nmode = compressible\nfoo = 1\n").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("`foo`") && msg.contains("line 3"), "{msg}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn grammar_errors() {
        assert!(parse("gamma 1.4\n").is_err());
        assert!(parse("gamma =\n").is_err());
        assert!(parse("gamma = 1.4\ngamma = 1.5\n").is_err());
        assert!(parse("grid = 8 16 16\n").is_err());
        assert!(parse("u0 = bessel 1 1\n").is_err());
        assert!(parse("max_iter = 0\n").is_err());
        assert!(parse("preconditioner = ilu\n").is_err());
    }

    #[test]
    fn inline_comments_and_profiles() {
        let c = parse("b_in = constant 0 # constant Bernoulli\nexit = cos_cos 2 1 0.5\n").unwrap();
        assert_eq!(c.profiles.b_in, Profile::Constant(0.0));
        assert_eq!(c.profiles.exit, Profile::builtin("cos_cos", &[2.0, 1.0, 0.5]).unwrap());
    }

    #[test]
    fn tabulated_profile_from_file() {
        let dir = std::env::temp_dir().join(format!("subsonic-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("t.csv"), "1, 2, 3\n4 5 6\n").unwrap();
        let c = parse_str("u0 = tabulated t.csv\n", &dir).unwrap();
        match c.u0 {
            Some(Profile::Tabulated(t)) => assert_eq!((t.m2, t.m3, t.at(1, 2)), (2, 3, 6.0)),
            other => panic!("{other:?}"),
        }
        std::fs::write(dir.join("bad.csv"), "1, 2\n3\n").unwrap();
        assert!(parse_str("u0 = tabulated bad.csv\n", &dir).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
