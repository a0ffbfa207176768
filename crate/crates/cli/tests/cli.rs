use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const PRESETS: [&str; 7] = ["pure_growth", "transport", "barycenter", "decay", "lipschitz", "logistic", "drift_2d"];

fn mdelab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdelab")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn pure_growth_mass_is_exponential() {
    let dir = tempfile::tempdir().unwrap();
    let out = mdelab(&["solve", "--preset", "pure_growth", "--n", "16", "--out", "run"], dir.path());
    assert!(out.status.success(), "{}", text(&out.stderr));
    let diag = fs::read_to_string(dir.path().join("run/diagnostics.csv")).unwrap();
    let t = column(&diag, "t");
    let mass = column(&diag, "mass");
    assert_eq!(t.len(), 17);
    for (t, m) in t.iter().zip(&mass) {
        assert!((m - (0.5 * t).exp()).abs() <= 1e-12, "t = {t}: {m}");
    }
    assert!(dir.path().join("run/trajectory.csv").exists());
    assert!(dir.path().join("run/config.toml").exists());
}

#[test]
fn metrics_between_unit_diracs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.csv"), "atom_index,x0,weight\n0,0,1\n").unwrap();
    fs::write(dir.path().join("b.json"), r#"{"dim": 1, "atoms": [{"x": [1.0], "w": 1.0}]}"#).unwrap();
    let out = mdelab(&["metrics", "a.csv", "b.json"], dir.path());
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert_eq!(text(&out.stdout), "1\n");
    let out = mdelab(&["metrics", "a.csv", "b.json", "--metric", "both"], dir.path());
    assert_eq!(text(&out.stdout), "flat 1\nw1 1\n");
}

#[test]
fn broken_marginal_fails_with_mass_deficit_witness() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"
[scenario]
name = "broken"
horizon = 1.0
mu0 = [[0.0, 1.0]]
mvf.kind = "broken_marginal"
mvf.a = 0.5
mvf.b = [0.0]

[numerics]
samples = 10
"#;
    fs::write(dir.path().join("broken.toml"), config).unwrap();
    let out = mdelab(&["certify", "--config", "broken.toml", "--out", "w"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("mass deficit"));
    let witness = fs::read_to_string(dir.path().join("w/violations.csv")).unwrap();
    assert!(witness.lines().nth(1).unwrap().starts_with("marginal,0,"));
    assert!(witness.contains("mass deficit"));
    assert!(dir.path().join("w/witness_marginal_0_mu.json").exists());
}

#[test]
fn presets_pass_certify_and_residual_at_n8() {
    let dir = tempfile::tempdir().unwrap();
    for name in PRESETS {
        for cmd in ["certify", "residual"] {
            let out = mdelab(&[cmd, "--preset", name, "--n", "8", "--out", name], dir.path());
            assert!(out.status.success(), "{cmd} {name}: {}{}", text(&out.stdout), text(&out.stderr));
        }
    }
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 4] = [
        &["solve", "--preset", "logistic"],
        &["converge", "--preset", "transport", "--n-list", "4,8,16"],
        &["certify", "--preset", "drift_2d", "--seed", "11", "--samples", "40"],
        &["continuity", "--preset", "lipschitz"],
    ];
    for (k, args) in runs.iter().enumerate() {
        let mut dumps = Vec::new();
        for (run, extra) in [("a", None), ("b", None), ("c", Some("--sequential"))] {
            let out_dir = format!("{k}{run}");
            let mut full: Vec<&str> = args.to_vec();
            full.extend(["--out", &out_dir]);
            full.extend(extra);
            let out = mdelab(&full, dir.path());
            assert!(out.status.success(), "{args:?}: {}", text(&out.stderr));
            let mut files = read_dir_sorted(&dir.path().join(&out_dir));
            // the resolved config records the execution mode
            files.retain(|(name, _)| name != "config.toml");
            dumps.push(files);
        }
        assert!(!dumps[0].is_empty());
        assert_eq!(dumps[0], dumps[1], "{args:?}");
        assert_eq!(dumps[0], dumps[2], "{args:?} sequential");
    }
}

#[test]
fn config_errors_report_lines() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "preset = \"decay\"\n\n[numerics]\nn = \"eight\"\n").unwrap();
    let out = mdelab(&["solve", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("line 4"), "{}", text(&out.stderr));
}

#[test]
fn small_mesh_suggests_n() {
    let dir = tempfile::tempdir().unwrap();
    let out = mdelab(&["solve", "--preset", "decay", "--n", "1", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    assert!(err.contains("try N >= "), "{err}");
    let suggested: u32 = err.split("try N >= ").nth(1).unwrap().trim().parse().unwrap();
    let out = mdelab(&["solve", "--preset", "decay", "--n", &suggested.to_string(), "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", text(&out.stderr));
}

#[test]
fn inline_scenario_runs_and_records_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"
[scenario]
name = "inline"
horizon = 0.5
mu0 = [[-0.5, 0.5], [0.5, 0.5]]
mvf.kind = "lipschitz_field"
mvf.a = -1.0
growth.kind = "mass_coupled"
growth.kappa = 2.0
source.kind = "fixed"
source.atoms = [[0.0, 0.1]]

[numerics]
n = 6

[outputs]
dir = "from_config"
trajectory = false
"#;
    fs::write(dir.path().join("inline.toml"), config).unwrap();
    let out = mdelab(&["solve", "--config", "inline.toml"], dir.path());
    assert!(out.status.success(), "{}", text(&out.stderr));
    let files: Vec<String> = read_dir_sorted(&dir.path().join("from_config")).into_iter().map(|f| f.0).collect();
    assert_eq!(files, ["config.toml", "diagnostics.csv"]);
    let recorded = fs::read_to_string(dir.path().join("from_config/config.toml")).unwrap();
    assert!(recorded.contains("mass_coupled"));
}

#[test]
fn residual_band_violation_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("tight.toml"), "preset = \"transport\"\n[residual]\nratio_band = [0.0, 0.01]\n").unwrap();
    let out = mdelab(&["residual", "--config", "tight.toml", "--out", "r"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let witness = fs::read_to_string(dir.path().join("r/residual_violations.csv")).unwrap();
    assert!(witness.starts_with("n,n_next,residual,residual_next,ratio\n8,16,"));
}
