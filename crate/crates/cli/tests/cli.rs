use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn epi(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epi"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn epi")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn csvs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn meanfield_prints_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "mf.cfg", "beta = 0.5, 2\nrho0 = 0.99\nrho1 = 0.01\nout = mf\n");
    let out = epi(&["meanfield", "--config", &cfg], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("beta,rho0,rho1,x_inf,y_peak,x_hat"));
    let row: Vec<f64> = lines.nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((row[3] - 0.1998).abs() < 1e-3);
    assert!((row[5] - 0.20319).abs() < 1e-5);
    assert!(tmp.path().join("mf/meanfield.csv").exists());
    assert!(tmp.path().join("mf/manifest.txt").exists());
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.cfg", "colour = blue\n");
    assert_eq!(epi(&["pde", "--config", &bad], tmp.path()).status.code(), Some(2));
    assert_eq!(epi(&["pde", "--config", "missing.cfg"], tmp.path()).status.code(), Some(2));
    let two = write(tmp.path(), "two.cfg", "L = 10, 20\n");
    assert_eq!(epi(&["simulate", "--config", &two], tmp.path()).status.code(), Some(2));
    let over = write(tmp.path(), "over.cfg", "rho0 = 0.8\nrho1 = 0.5\n");
    assert_eq!(epi(&["final", "--config", &over], tmp.path()).status.code(), Some(2));
    assert_eq!(epi(&["no-such-command"], tmp.path()).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let stiff = write(tmp.path(), "stiff.cfg", "beta = 100\nL = 8\nrho0 = 0.5\nrho1 = 0.5\ndt = 0.1\nt_end = 1\n");
    let out = epi(&["pde", "--config", &stiff], tmp.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    let cfg = write(tmp.path(), "inf.cfg", "beta = 2\nL = 4\n");
    let table = write(
        tmp.path(),
        "rho.csv",
        "site_index,rho0,rho1,rho_final\n0,1,0,0.5\n1,1,0,0.5\n2,1,0,0.5\n3,1,0,0.5\n",
    );
    let out = epi(&["infer", "--config", &cfg, "--input", &table], tmp.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn rerun_from_manifest_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "crit.cfg",
        "beta = 0.5, 2\nalpha = 0.25\nL = 100, 1000\nreplicas = 6\nseed = 42\nout = a\n",
    );
    assert!(epi(&["critical-sweep", "--config", &cfg], tmp.path()).status.success());
    let out = epi(&["critical-sweep", "--config", "a/manifest.txt", "--out", "b"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (a, b) = (csvs(&tmp.path().join("a")), csvs(&tmp.path().join("b")));
    assert_eq!(a.len(), 3);
    assert_eq!(a, b);

    let hydro = write(tmp.path(), "h.cfg", "beta = 2\nL = 50, 100\nreplicas = 3\nt_end = 3\nsamples = 8\nout = h1\n");
    assert!(epi(&["hydro-sweep", "--config", &hydro], tmp.path()).status.success());
    assert!(epi(&["hydro-sweep", "--config", "h1/manifest.txt", "--out", "h2"], tmp.path()).status.success());
    assert_eq!(csvs(&tmp.path().join("h1")), csvs(&tmp.path().join("h2")));
}

#[test]
fn seed_and_out_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "s.cfg", "beta = 2\nL = 200\nreplicas = 3\nt_end = 2\nsamples = 5\nout = x\n");
    assert!(epi(&["simulate", "--config", &cfg, "--seed", "1", "--out", "s1"], tmp.path()).status.success());
    assert!(epi(&["simulate", "--config", &cfg, "--seed", "2", "--out", "s2"], tmp.path()).status.success());
    assert!(!tmp.path().join("x").exists());
    let manifest = fs::read_to_string(tmp.path().join("s2/manifest.txt")).unwrap();
    assert!(manifest.contains("seed = 2\n"));
    assert!(manifest.contains("run.command = simulate\n"));
    let t1 = fs::read(tmp.path().join("s1/trajectory_r0.csv")).unwrap();
    let t2 = fs::read(tmp.path().join("s2/trajectory_r0.csv")).unwrap();
    assert_ne!(t1, t2);
    let fin = fs::read_to_string(tmp.path().join("s1/final.csv")).unwrap();
    assert!(fin.starts_with("replica,seed,x_inf,events,wall_ms\n"));
    assert_eq!(fin.lines().count(), 4);
}
