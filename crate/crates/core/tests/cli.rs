use std::path::Path;
use std::process::{Command, Output};

fn ddcosmo(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ddcosmo"));
    cmd.current_dir(dir).args(args);
    for key in ["DDCOSMO_CONFIG", "DDCOSMO_PROFILE", "DDCOSMO_OUT", "DDCOSMO_SEED"] {
        cmd.env_remove(key);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[geometry]\ntheta = 2.0\n[discretization]\nbandwidth = 12\n[experiment]\niterations = 15\n").unwrap();
    for out in ["a", "b"] {
        let o = ddcosmo(dir.path(), &["iterate", "--config", "run.toml", "--profile", "fast", "--seed", "42", "--out", out], &[]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(dir.path().join("a/iterate.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/iterate.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# ddcosmo"));
    assert!(text.contains("seed=42 generator=ChaCha8"));
    assert!(text.lines().any(|l| l == "n,err,ratio"));

    let o = ddcosmo(dir.path(), &["iterate", "--config", "run.toml", "--profile", "fast", "--seed", "43", "--out", "c"], &[]);
    assert!(o.status.success());
    assert_ne!(std::fs::read(dir.path().join("c/iterate.csv")).unwrap(), text.into_bytes());
}

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    for (i, body) in ["[geometry\ntheta = 1.0", "[geometry]\ntheta = 1.0\ncolour = 2\n", "[geometry]\ntheta = 3.5\n"].iter().enumerate() {
        let name = format!("bad{i}.toml");
        std::fs::write(dir.path().join(&name), body).unwrap();
        let o = ddcosmo(dir.path(), &["solve", "--config", &name, "--out", "never"], &[]);
        assert_eq!(o.status.code(), Some(2), "{body}");
        assert!(!dir.path().join("never").exists());
    }
    let o = ddcosmo(dir.path(), &["solve", "--profile", "turbo", "--out", "never"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn environment_overrides_config_and_flags_override_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "seed = 1\nout = \"from_config\"\n").unwrap();
    let o = ddcosmo(dir.path(), &["predict"], &[("DDCOSMO_CONFIG", "run.toml"), ("DDCOSMO_OUT", "from_env")]);
    assert!(o.status.success());
    assert!(dir.path().join("from_env/predict.toml").exists());
    assert!(!dir.path().join("from_config").exists());
    let o = ddcosmo(dir.path(), &["predict", "--out", "from_flag"], &[("DDCOSMO_CONFIG", "run.toml"), ("DDCOSMO_OUT", "from_env")]);
    assert!(o.status.success());
    assert!(dir.path().join("from_flag/predict.toml").exists());
}

#[test]
fn predict_reports_right_angle_rates() {
    let dir = tempfile::tempdir().unwrap();
    let o = ddcosmo(dir.path(), &["predict"], &[]);
    assert!(o.status.success());
    let report: toml::Value = toml::from_str(&std::fs::read_to_string(dir.path().join("out/predict.toml")).unwrap()).unwrap();
    assert!((report["rho"].as_float().unwrap() - 0.5).abs() < 1e-12);
    assert!((report["rate"].as_float().unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn spectrum_dump_writes_matrices() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "[experiment]\nthetas = [1.0]\nbandwidths = [4]\n").unwrap();
    let o = ddcosmo(dir.path(), &["spectrum", "--dump", "--config", "run.toml", "--profile", "fast"], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(dir.path().join("out/spectrum.csv")).unwrap();
    let headers: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, ["L", "theta", "rho_est", "rho_theory", "numrad_est", "f_theta", "norm_est", "norm_upper"]);
    let row = rdr.records().next().unwrap().unwrap();
    let rho: f64 = row[2].parse().unwrap();
    let rho_theory: f64 = row[3].parse().unwrap();
    assert!(rho > 0.0 && rho <= rho_theory);
    let m = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).from_path(dir.path().join("out/B_0_L4.csv")).unwrap();
    let rows: Vec<_> = m.into_records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 18);
    assert!(rows.iter().all(|r| r.len() == 18 && r[0].contains(',')));
}

#[test]
fn solve_on_three_disks() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "[geometry]\ndisks = [{ center = [0.0, 0.0], radius = 1.0 }, { center = [1.3, 0.2], radius = 0.8 }, { center = [2.3, -0.1], radius = 0.7 }]\n\
         [discretization]\nbandwidth = 8\n[problem]\ndata = \"source\"\nsource = [1.0, 3.0]\n",
    )
    .unwrap();
    let o = ddcosmo(dir.path(), &["solve", "--config", "run.toml", "--profile", "fast"], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("out/solve.csv")).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 3 * 17);
    let o = ddcosmo(dir.path(), &["predict", "--config", "run.toml"], &[]);
    assert_eq!(o.status.code(), Some(2));
}
