use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fpe_similarity::config::ExperimentConfig;

fn fpe_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpe-sim"))
        .args(args)
        .env_remove("FPE_SEED")
        .output()
        .expect("binary runs")
}

fn config_text(body: &str, out: &Path) -> String {
    format!("spec_version = 1\noutput_path = {:?}\n{body}", out.display().to_string())
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, config_text(body, &dir.join(name.trim_end_matches(".toml")))).unwrap();
    path.display().to_string()
}

fn read_csv(path: &Path) -> Vec<[f64; 3]> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,W,J"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

fn csvs(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    v.sort();
    v
}

const FIG1: &str = r#"
family = "gaussian"
times = [1.0, 2.0, 3.0, 4.0]
[parameters]
alpha = 1.0
mu1 = 0.5
mu2 = 1.0
mu4 = 1.0
[grid]
x_min = -12.0
x_max = 24.0
n = 2000
[oracle]
enabled = true
n_steps = 3000
n_paths = 0
seed = 1
"#;

const FIG2: &str = r#"
family = "exponential"
times = [1.0, 1.3, 1.6, 1.9]
[parameters]
alpha = 3.0
mu1 = 3.0
mu2 = -6.0
mu4 = 2.0
[grid]
x_min = 0.0
x_max = 45.0
n = 4000
[oracle]
enabled = true
n_steps = 3000
n_paths = 100000
dt = 0.00045
seed = 2024
"#;

const FIG8: &str = r#"
family = "gamma"
times = [0.5, 0.8, 1.1, 1.4]
[parameters]
alpha = -2.0
mu1 = -3.0
mu2 = 0.5
mu3 = 0.5
[grid]
x_min = 0.0
x_max = 40.0
n = 2000
"#;

#[test]
fn figure_gaussian_peaks_move_as_2t() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig1.toml", FIG1);
    let out = fpe_sim(&["figure", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let files = csvs(&dir.path().join("fig1"));
    assert_eq!(files.len(), 4);
    for (k, f) in files.iter().enumerate() {
        let t = (k + 1) as f64;
        let rows = read_csv(f);
        assert_eq!(rows.len(), 2000);
        let peak = rows.iter().max_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
        let dx = 36.0 / 1999.0;
        assert!((peak[0] - 2.0 * t).abs() <= dx, "t={t}: peak at {}", peak[0]);
        for r in &rows {
            let j = 1.0 * r[0] * r[1] / t;
            assert!((r[2] - j).abs() <= 1e-12 * j.abs(), "J row mismatch at x={}", r[0]);
        }
    }
    let summary = fs::read_to_string(dir.path().join("fig1/summary.jsonl")).unwrap();
    let peaks: Vec<f64> = summary
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["peak_location"].as_f64().unwrap())
        .collect();
    assert_eq!(peaks, vec![2.0, 4.0, 6.0, 8.0]);
}

#[test]
fn figure_exponential_current_maximum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig3.toml", FIG2);
    assert_eq!(fpe_sim(&["figure", &cfg]).status.code(), Some(0));
    for (f, t) in csvs(&dir.path().join("fig3")).iter().zip([1.0f64, 1.3, 1.6, 1.9]) {
        let rows = read_csv(f);
        let top = rows.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
        assert!((top[0] - t.powi(3) / 3.0).abs() <= 45.0 / 3999.0, "t={t}: J max at {}", top[0]);
    }
}

#[test]
fn figure_gamma_peak_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig8.toml", FIG8);
    assert_eq!(fpe_sim(&["figure", &cfg]).status.code(), Some(0));
    let summary = fs::read_to_string(dir.path().join("fig8/summary.jsonl")).unwrap();
    let expected = [0.5, 1.28, 2.42, 3.92];
    for (line, e) in summary.lines().zip(expected) {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let peak = v["peak_value"].as_f64().unwrap();
        assert!((peak - e).abs() < 1e-12 * e, "{peak} vs {e}");
        assert_eq!(v["peak_location"].as_f64(), Some(0.0));
        assert!(v["fwhm"].is_null());
        assert!((v["mass"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn config_round_trip_gives_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let first = write_config(dir.path(), "a.toml", FIG1);
    assert_eq!(fpe_sim(&["figure", &first]).status.code(), Some(0));
    // reload, re-serialize under a new output path and run again
    let mut cfg = ExperimentConfig::load(Path::new(&first)).unwrap();
    cfg.output_path = dir.path().join("b");
    let second = dir.path().join("b.toml");
    fs::write(&second, cfg.to_toml()).unwrap();
    assert_eq!(fpe_sim(&["figure", second.to_str().unwrap()]).status.code(), Some(0));
    let a = csvs(&dir.path().join("a"));
    let b = csvs(&dir.path().join("b"));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
}

#[test]
fn validate_reports_truncation_loss_on_narrow_gaussian_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig1.toml", FIG1);
    let out = fpe_sim(&["validate", &cfg]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    // [-12, 24] holds only 99.75% of the t = 4 density, so that slice cannot meet 1e-3
    assert_eq!(out.status.code(), Some(2), "{stdout}");
    let lines: Vec<&str> = stdout.lines().filter(|l| l.starts_with("fd-l1")).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].ends_with("ok") && lines[1].ends_with("ok") && lines[2].ends_with("FAIL"), "{stdout}");
    assert!(dir.path().join("fig1/validation.jsonl").exists());
}

#[test]
fn validate_passes_on_wide_gaussian_grid() {
    let dir = tempfile::tempdir().unwrap();
    let body = FIG1.replace("x_min = -12.0", "x_min = -24.0").replace("x_max = 24.0", "x_max = 48.0").replace("n = 2000", "n = 4000");
    let cfg = write_config(dir.path(), "wide.toml", &body);
    let out = fpe_sim(&["validate", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn validate_exponential_with_paths() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig2.toml", FIG2);
    let out = fpe_sim(&["validate", &cfg]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.lines().any(|l| l.starts_with("mc-ks") && l.ends_with("ok")));
}

#[test]
fn validate_coarse_grid_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "coarse.toml", &FIG2.replace("n = 4000", "n = 32").replace("n_paths = 100000", "n_paths = 0"));
    let code = fpe_sim(&["validate", &cfg]).status.code();
    assert!(matches!(code, Some(2) | Some(4)), "{code:?}");
}

#[test]
fn validate_without_oracle_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig8.toml", FIG8);
    assert_eq!(fpe_sim(&["validate", &cfg]).status.code(), Some(3));
}

#[test]
fn ill_posed_diffusion_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    // conjugate parameters: same density, negative diffusion
    let body = FIG1.replace("mu1 = 0.5", "mu1 = 1.5").replace("mu2 = 1.0", "mu2 = -1.0").replace("mu4 = 1.0", "mu4 = -1.0");
    let cfg = write_config(dir.path(), "conj.toml", &body);
    let out = fpe_sim(&["validate", &cfg]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ill-posed diffusion"));
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &FIG8.replace("mu3 = 0.5\n", ""));
    let out = fpe_sim(&["figure", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parameters.mu3"));
    assert_eq!(fpe_sim(&["figure", "/nonexistent/config.toml"]).status.code(), Some(3));
}

#[test]
fn seed_override_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig1.toml", FIG1);
    let out = Command::new(env!("CARGO_BIN_EXE_fpe-sim"))
        .args(["figure", &cfg])
        .env("FPE_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FPE_SEED"));
}

#[test]
fn qes_check_verdicts() {
    let out = fpe_sim(&["qes-check", "--p", "0,0,1", "--q", "2,3,-2", "--r", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "non-reducible\nresidual: -6z\n");

    // reduction of rho1 = z/2 + 1, rho2 = 1 with alpha = 1
    let out = fpe_sim(&["qes-check", "--p", "1", "--q", "-1,0.5", "--r", "0.5"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "reducible\nresidual: 0\n");

    assert_eq!(fpe_sim(&["qes-check", "--p", "", "--q", "1", "--r", "1"]).status.code(), Some(3));
    assert_eq!(fpe_sim(&["qes-check", "--p", "1,a", "--q", "1", "--r", "1"]).status.code(), Some(3));
}

#[test]
fn exponents_subcommand() {
    let out = fpe_sim(&["exponents", "--a", "1", "--d", "-1", "--e", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["alpha"].as_f64(), Some(0.5));
    assert_eq!(v["b"].as_f64(), Some(2.0));
    assert_eq!(fpe_sim(&["exponents", "--a", "1", "--d", "0", "--e", "0"]).status.code(), Some(3));
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert_eq!(n, 8);
}
