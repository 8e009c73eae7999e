//! End-to-end runs of the binary on small grids.

use std::path::Path;
use std::process::{Command, Output};

use subsonic_core::characteristics::{compressible_roots, CharState};
use subsonic_cli::fieldio::{parse_fields, TRACE_HEADER};
use subsonic_core::domain::{BackgroundState, CrossField, GridSpec};
use subsonic_core::flow::FlowField;
use subsonic_core::gas::GasModel;
use subsonic_core::invariants::DiagnosticsReport;

const BASE: &str = "mode = compressible\ngamma = 1.4\nrho0 = 1\nu0 = constant 0.5\ngrid = 9 8 8\n";

fn subsonic(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subsonic")).args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("terminated by a signal")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn config_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    let o = subsonic(&["solve", "--config", "missing.cfg"], d.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("status=config_error exit=2 detail="));

    write(d.path(), "foo.cfg", &format!("{BASE}foo = 1\n"));
    let o = subsonic(&["solve", "--config", "foo.cfg"], d.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("`foo`"));

    write(d.path(), "gamma.cfg", &BASE.replace("1.4", "3.5"));
    assert_eq!(code(&subsonic(&["solve", "--config", "gamma.cfg"], d.path())), 2);

    // incompatible inlet angle
    write(d.path(), "edge.cfg", &format!("{BASE}beta2_in = cos_cos 1 1\n"));
    let o = subsonic(&["solve", "--config", "edge.cfg"], d.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("beta2_in"));

    assert_eq!(code(&subsonic(&["solve-incompressible", "--config", "foo.cfg"], d.path())), 2);
    assert_eq!(code(&subsonic(&["solve", "--bogus"], d.path())), 2);
}

#[test]
fn zero_epsilon_returns_the_background() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "run.cfg", &format!("{BASE}epsilon = 0\n"));
    let o = subsonic(&["solve", "--config", "run.cfg", "--out", "out", "--quiet"], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let out = d.path().join("out");
    let trace = read(&out, "trace.csv");
    assert_eq!(trace.lines().next(), Some(TRACE_HEADER));
    assert_eq!(trace.lines().count(), 2);

    let gas = GasModel::new(1.4).unwrap();
    let flow = parse_fields(&read(&out, "fields.csv"), Some(gas)).unwrap();
    let g = GridSpec::new(9, 8, 8).unwrap();
    let bg = BackgroundState::compressible(gas, 1.0, CrossField::constant(g.cross(), 0.5), 1e-6).unwrap();
    assert_eq!(flow, FlowField::background(&bg, g));
}

#[test]
fn solve_then_diagnose() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "run.cfg", &format!("{BASE}epsilon = 0.01\ndiagnose = true\n"));
    let o = subsonic(&["solve", "--config", "run.cfg", "--out", "a"], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let inline: DiagnosticsReport = serde_json::from_str(&read(&d.path().join("a"), "report.json")).unwrap();

    let o = subsonic(&["diagnose", "--config", "run.cfg", "--input", "a/fields.csv", "--out", "b"], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: DiagnosticsReport = serde_json::from_str(&read(&d.path().join("b"), "report.json")).unwrap();
    for name in [
        "primitive_mass",
        "primitive_momentum_1",
        "primitive_momentum_2",
        "primitive_momentum_3",
        "angle_system_continuity",
        "angle_system_beta2",
        "angle_system_beta3",
        "bernoulli_transport",
        "w_transport",
        "helicity_transport",
        "helicity_identity",
        "bernoulli_vorticity_divergence",
        "weighted_k_divergence",
        "k_unit_length",
    ] {
        let e = report.get(name).unwrap_or_else(|| panic!("missing {name}"));
        assert!(e.max_norm.is_finite());
    }
    // the file round trip is exact, so both reports agree
    assert_eq!(report, inline);
}

#[test]
fn outputs_are_deterministic() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "run.cfg", &format!("{BASE}epsilon = 0.01\ndiagnose = true\n"));
    for out in ["a", "b"] {
        assert_eq!(code(&subsonic(&["solve", "--config", "run.cfg", "--out", out, "--quiet"], d.path())), 0);
    }
    for f in ["fields.csv", "trace.csv", "report.json", "run.json"] {
        assert_eq!(read(&d.path().join("a"), f), read(&d.path().join("b"), f), "{f}");
    }
}

#[test]
fn refine_multiplies_the_grid() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "run.cfg", &format!("{BASE}epsilon = 0\n"));
    let o = subsonic(&["solve", "--config", "run.cfg", "--refine", "2", "--out", "o", "--quiet"], d.path());
    assert_eq!(code(&o), 0);
    let run: serde_json::Value = serde_json::from_str(&read(&d.path().join("o"), "run.json")).unwrap();
    assert_eq!(run["grid"], serde_json::json!([17, 16, 16]));
}

#[test]
fn failures_write_the_trace() {
    let d = tempfile::tempdir().unwrap();
    let cases = [
        // stagnation: the inlet Bernoulli function drops below the pressure
        ("mode = incompressible\np0 = 1\nu0 = constant 0.5\nb_in = constant -1\nepsilon = 1\ngrid = 9 8 8\n", 4, "stagnation"),
        (&*BASE.replace("constant 0.5", "constant 0.99").replace("grid", "epsilon = 0.01\ngrid"), 4, "sonic"),
        (&*format!("{BASE}epsilon = 0.01\nmax_iter = 2\n"), 3, "not_converged"),
        (&*format!("{BASE}epsilon = 0.01\ndelta_max = 1e-6\n"), 3, "delta_exceeded"),
    ];
    for (n, (cfg, exit, status)) in cases.iter().enumerate() {
        let name = format!("c{n}.cfg");
        write(d.path(), &name, cfg);
        let cmd = if cfg.contains("incompressible") { "solve-incompressible" } else { "solve" };
        let out = format!("o{n}");
        let o = subsonic(&[cmd, "--config", &name, "--out", &out], d.path());
        assert_eq!(code(&o), *exit, "{}", stderr(&o));
        let line = stderr(&o);
        assert_eq!(line.lines().count(), 1);
        assert!(line.starts_with(&format!("status={status} exit={exit}")), "{line}");
        let trace = read(&d.path().join(&out), "trace.csv");
        assert!(trace.lines().count() >= 2, "{status}: empty trace");
    }
}

#[test]
fn stress_configuration_fails_in_a_controlled_way() {
    let d = tempfile::tempdir().unwrap();
    for eps in ["0.5", "2"] {
        let cfg = format!(
            "{}beta2_in = sin_cos 3 2\nbeta3_in = cos_sin 2 3\nb_in = cos_cos 3 3\nexit = cos_cos 2 3\nepsilon = {eps}\nmax_iter = 30\n",
            BASE.replace("9 8 8", "13 12 12")
        );
        write(d.path(), "s.cfg", &cfg);
        let o = subsonic(&["solve", "--config", "s.cfg", "--out", "s"], d.path());
        assert!(matches!(code(&o), 3 | 4), "{}", stderr(&o));
        assert!(d.path().join("s/trace.csv").exists());
    }
}

#[test]
fn characteristics_of_states() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "states.csv",
        "gamma,rho,u1,u2,u3,xi2,xi3\n1.4,1,0.5,0,0,1,0\n1.4,1,1.5,0,0,1,0\n1.4,1,1,0,0,1,1\nincompressible,1,0.5,0.1,0,1,2\n",
    );
    let o = subsonic(&["characteristics", "--input", "states.csv", "--out", "."], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = read(d.path(), "characteristics.csv");
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let class: Vec<&str> = rows.iter().map(|r| *r.last().unwrap()).collect();
    assert_eq!(class, ["elliptic", "non_elliptic", "sonic", "elliptic"]);
    // q = c^2/u1^2 = 4 in the first row; the column is written losslessly
    let st = CharState::compressible(0.0, 0.0, 4.0).unwrap();
    let im: f64 = rows[0][10].parse().unwrap();
    assert_eq!(im, compressible_roots(&st, 1.0, 0.0).unwrap().lambda_im);

    write(d.path(), "bad.csv", "gamma,rho,u1,u2,u3,xi2,xi3\n1.4,1,0.5,0,0,0,0\n");
    let o = subsonic(&["characteristics", "--input", "bad.csv"], d.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("bad.csv:2"));
}

#[test]
fn verify_appendix_writes_orders() {
    let d = tempfile::tempdir().unwrap();
    let o = subsonic(&["verify-appendix", "--out", "."], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: DiagnosticsReport = serde_json::from_str(&read(d.path(), "report.json")).unwrap();
    assert!(r.get("j31_minus_gz").unwrap().max_norm < 1e-12);
    assert!(r.get("j_chain").unwrap().order.unwrap() > 1.8);
}
