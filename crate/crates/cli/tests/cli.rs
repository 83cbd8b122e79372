use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fracfp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracfp")).args(args).output().expect("binary runs")
}

fn config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const STABILITY: &str = r#"
experiment = "stability-sweep"

[coefficients]
forcing = "const1"

[discretization]
alpha_grid = [0.5, 1.0]
dofs = 15
steps = 32

[sweep]
cases = [{ label = "u0", u0 = "sin1" }, { label = "g", source = "tsin" }]
"#;

#[test]
fn catalog_lists_entries() {
    let o = fracfp(&["catalog"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("u0:sin1") && l.ends_with("sin(pi xi)")));
    assert!(text.lines().any(|l| l.starts_with("F:const1") && l.ends_with('1')));
    assert!(text.lines().any(|l| l.starts_with("g:tsin") && l.ends_with("t sin(pi xi)")));
}

#[test]
fn alpha_grid_override_gives_one_row_per_alpha() {
    let tmp = tempfile::tempdir().unwrap();
    let text = STABILITY.replace(", { label = \"g\", source = \"tsin\" }", "");
    let cfg = config(tmp.path(), "stability.toml", &text);
    let out = tmp.path().join("out");
    let o = fracfp(&["run", &cfg, "--alpha-grid", "0.3,0.7,1.0", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("ratios.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("config_hash,case,alpha"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let hash = report["config_hash"].as_str().unwrap();
    assert!(lines[1..].iter().all(|l| l.starts_with(hash)));
    assert_eq!(report["config"]["discretization"]["alpha_grid"], serde_json::json!([0.3, 0.7, 1.0]));
    assert_eq!(report["passed"], true);
}

#[test]
fn empty_alpha_grid_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "s.toml", STABILITY);
    let o = fracfp(&["run", &cfg, "--alpha-grid", "", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha grid is empty"));
    let cfg = config(tmp.path(), "e.toml", &STABILITY.replace("[0.5, 1.0]", "[]"));
    let o = fracfp(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 8"), "{}", stderr(&o));
    assert!(!tmp.path().join("report.json").exists());
}

#[test]
fn unknown_keys_and_ids_are_located() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "u.toml", &STABILITY.replace("steps = 32", "steps = 32\ntheta = 0.5"));
    let o = fracfp(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 11") && err.contains("theta"), "{err}");
    let cfg = config(tmp.path(), "k.toml", &STABILITY.replace("forcing = \"const1\"", "forcing = \"cubic\""));
    let err = stderr(&fracfp(&["run", &cfg]));
    assert!(err.contains("line 5") && err.contains("cubic"), "{err}");
}

#[test]
fn reports_are_deterministic_and_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "s.toml", STABILITY);
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    assert!(fracfp(&["run", &cfg, "--out", a.to_str().unwrap(), "--jobs", "1"]).status.success());
    assert!(fracfp(&["run", &cfg, "--out", b.to_str().unwrap(), "--jobs", "3"]).status.success());
    for f in ["report.json", "ratios.csv", "spreads.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    // the echoed config reproduces the run
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("report.json")).unwrap()).unwrap();
    let echo = config(tmp.path(), "echo.toml", report["config_echo"].as_str().unwrap());
    assert!(fracfp(&["run", &echo, "--out", c.to_str().unwrap()]).status.success());
    assert_eq!(fs::read(a.join("report.json")).unwrap(), fs::read(c.join("report.json")).unwrap());
    assert!(c.join("timing.json").exists());
}

#[test]
fn failed_assertion_exits_nonzero_with_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let text = STABILITY.replace("stability-sweep", "gradient-sweep").replace("[0.5, 1.0]", "[0.3, 1.0]");
    let cfg = config(tmp.path(), "g.toml", &text);
    let out = tmp.path().join("out");
    let o = fracfp(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("FAIL spread:u0") && stdout.contains("PASS spread:g"), "{stdout}");
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn convergence_writes_rate_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        "c.toml",
        r#"
experiment = "convergence"

[coefficients]
u0 = "sin1"

[discretization]
alpha = 1.0
meshes = [7, 15, 31]
steps = 256
degree = 1
projection = "ritz"
"#,
    );
    let out = tmp.path().join("out");
    let o = fracfp(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(fs::read_to_string(out.join("rates.csv")).unwrap().lines().count(), 4);
    let slopes = fs::read_to_string(out.join("slopes.csv")).unwrap();
    assert!(slopes.lines().next().unwrap().ends_with("norm,slope,halved_steps_slope,lower,upper,passed"));
    assert!(slopes.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn lemma_suite_honours_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "l.toml", "experiment = \"lemma-suite\"\n\n[lemma-suite]\ntrials = 10\n");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(fracfp(&["run", &cfg, "--seed", "1", "--out", a.to_str().unwrap()]).status.success());
    assert!(fracfp(&["run", &cfg, "--seed", "2", "--out", b.to_str().unwrap()]).status.success());
    let ra: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("report.json")).unwrap()).unwrap();
    let rb: serde_json::Value = serde_json::from_str(&fs::read_to_string(b.join("report.json")).unwrap()).unwrap();
    assert_eq!(ra["config"]["seed"], 1);
    assert_ne!(ra["config_hash"], rb["config_hash"]);
    assert_ne!(ra["tables"]["lemmas"], rb["tables"]["lemmas"]);
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        let text = fs::read_to_string(&p).unwrap();
        assert!(toml::from_str::<toml::Table>(&text).is_ok(), "{}", p.display());
    }
}
