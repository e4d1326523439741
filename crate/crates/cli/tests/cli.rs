use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn modspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modspace"))
        .args(args)
        .env("MODSPACE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path) -> String {
    let path = dir.join("small.cfg");
    fs::write(
        &path,
        "grid.N = 64\ngrid.L = square\npotential.kind = harmonic\nwindow.mode = same\n\
         norm.pq = 1:1, 2:2\ntime.list = 0, 0.5, 1\nsolver.dt = 1e-2\n",
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn norm_series_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let o = modspace(&["norm", "-c", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,p,q,norm,reference,ratio"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn transform_propagate_and_transport_write_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let u = dir.path().join("u.txt");
    let o = modspace(&["propagate", "-c", &cfg, "--time", "0.5", "-o", u.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let w = dir.path().join("w.txt");
    let o = modspace(&["transform", "-c", &cfg, "-i", u.to_str().unwrap(), "-o", w.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&w).unwrap();
    assert!(text.starts_with("x_index,xi_index,re,im"));
    assert_eq!(text.lines().count(), 1 + 64 * 64);

    let report = dir.path().join("iter.csv");
    let o = modspace(&[
        "transport", "-c", &cfg, "--set", "window.mode=free", "--set", "picard.dtau=0.1", "--time", "0.2",
        "--report", report.to_str().unwrap(), "-o", dir.path().join("t.txt").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(&report).unwrap().starts_with("k,increment_l2,wall_seconds"));
}

#[test]
fn flow_dump_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let o = modspace(&[
        "flow", "--set", "potential.kind=cosine", "--x", "0.5", "--xi", "-1", "--s", "2", "--stride", "100", "-o",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("s,f_1,g_1,detM"));
    assert_eq!(text.lines().count(), 1 + 21);

    let svg = dir.path().join("traj.svg");
    let o = modspace(&["plot", csv.to_str().unwrap(), "--x", "s", "--y", "f_1", "-o", svg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(&svg).unwrap().contains("<svg"));
}

#[test]
fn verify_reports_and_fails_on_bad_golden() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("ids.cfg"),
        "experiment.name = ids\nexperiment.kind = identities\ngrid.N = 64\ngrid.L = 8\ntime.list = 0.1\n\
         solver.dt = 0.01\npotential.kind = harmonic_cosine\ncheck.golden = ids.csv\n",
    )
    .unwrap();
    fs::write(dir.path().join("ids.csv"), "metric,expected,tolerance\nplancherel_error,0,1e-8\n").unwrap();
    let out = dir.path().join("out");
    let o = modspace(&["verify", dir.path().to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
    assert!(out.join("summary.csv").exists());

    fs::write(dir.path().join("ids.csv"), "metric,expected,tolerance\nplancherel_error,1,1e-8\n").unwrap();
    let o = modspace(&["verify", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("ids") && stdout(&o).contains("FAIL"));
}

#[test]
fn errors_exit_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = modspace(&["verify", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no experiments"));

    let o = modspace(&["norm", "--set", "grid.banana=3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));

    let o = Command::new(env!("CARGO_BIN_EXE_modspace"))
        .args(["norm"])
        .env("MODSPACE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
