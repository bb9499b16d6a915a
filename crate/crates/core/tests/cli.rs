//! Exit codes and outputs of the `sim` binary.

use std::path::Path;
use std::process::{Command, Output};

use lc_emulsion::io::RunConfig;

fn sim(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sim"));
    c.args(args).env_remove("SIM_THREADS");
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().expect("sim starts")
}

fn small_config(dir: &Path, edit: impl FnOnce(&mut RunConfig)) -> String {
    let mut cfg = RunConfig::drop_benchmark();
    cfg.grid.nx = 16;
    cfg.grid.ny = 16;
    cfg.numerics.max_steps = 20;
    edit(&mut cfg);
    let path = dir.join("cfg.toml");
    std::fs::write(&path, cfg.to_toml_string()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(sim(&[], &[]).status.code(), Some(1));
    assert_eq!(sim(&["frobnicate"], &[]).status.code(), Some(1));
    assert_eq!(
        sim(&["run", "--config", "/nonexistent/cfg.toml"], &[])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(sim(&["--help"], &[]).status.code(), Some(0));
}

#[test]
fn invalid_thread_count_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), |_| {});
    for bad in ["0", "-2", "many"] {
        let out = sim(&["check", "--config", &cfg], &[("SIM_THREADS", bad)]);
        assert_eq!(out.status.code(), Some(1), "SIM_THREADS={bad}");
    }
    assert_eq!(
        sim(&["check", "--config", &cfg], &[("SIM_THREADS", "4")])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn run_writes_outputs_and_render_reads_them() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), |c| c.output.snapshot_every = Some(10));
    let out_dir = dir.path().join("out");
    let out = sim(
        &["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()],
        &[],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in [
        "config.toml",
        "diagnostics.csv",
        "snapshot_0000000.bin",
        "snapshot_0000010.bin",
        "final.bin",
        "phi.ppm",
        "d_mag.ppm",
    ] {
        assert!(out_dir.join(f).is_file(), "missing {f}");
    }
    let diag = std::fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap();
    assert_eq!(diag.lines().count(), 2 + 21);

    let img = dir.path().join("mu.ppm");
    let snap = out_dir.join("final.bin");
    let r = sim(
        &[
            "render",
            "--snapshot",
            snap.to_str().unwrap(),
            "--field",
            "mu",
            "--out",
            img.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(r.status.code(), Some(0));
    assert!(std::fs::read(&img).unwrap().starts_with(b"P6"));
    let r = sim(
        &[
            "render",
            "--snapshot",
            snap.to_str().unwrap(),
            "--field",
            "u_mag",
            "--out",
            img.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(r.status.code(), Some(1), "flow field without flow");
}

#[test]
fn newton_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), |c| {
        c.numerics.newton_max_iters = 1;
        c.numerics.newton_tol = 1e-30;
        c.numerics.max_halvings = 0;
    });
    let out = sim(
        &[
            "run",
            "--config",
            &cfg,
            "--out",
            dir.path().join("o").to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn check_reports_the_critical_constant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), |_| {});
    let out = sim(
        &[
            "check", "--config", &cfg, "--c-gn", "0.2", "--c-lady", "0.1",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("0.217664"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("n,min_eps_kappa")));
}

#[test]
fn landscape_writes_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), |_| {});
    let out = sim(
        &[
            "landscape",
            "--config",
            &cfg,
            "--region",
            "0,1,0,1.5",
            "--samples",
            "11",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("E0 = -0.625000000"));
    let samples = std::fs::read_to_string(dir.path().join("landscape_samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 1 + 121);
    assert!(dir.path().join("landscape_points.csv").is_file());
    assert_eq!(
        sim(&["landscape", "--config", &cfg, "--region", "1,0,0,1"], &[])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn verify_suite_passes_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("v.csv");
    let out = sim(&["verify", "oracle", "--out", csv.to_str().unwrap()], &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().count() >= 2);
    assert_eq!(sim(&["verify", "nonsense"], &[]).status.code(), Some(1));
}
