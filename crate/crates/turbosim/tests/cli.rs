//! Black-box tests of the command-line binary: exit codes, artifact
//! layout, determinism, and flag precedence.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_turbosim")
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("turbosim-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, extra: &str) -> PathBuf {
    let path = dir.join("run.conf");
    let base = "channel.alpha = 4\nchannel.beta = 2\nsnr.start_db = 4\nsnr.stop_db = 8\n\
                snr.step_db = 2\nsim.seed = 7\nsim.min_bit_errors = 20\nsim.max_trials = 5000\n";
    std::fs::write(&path, format!("{base}{extra}")).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env_remove("TURBOSIM_WORKERS")
        .output()
        .unwrap()
}

#[test]
fn bad_config_exits_2_and_names_the_key() {
    let dir = scratch("badcfg");
    let cfg = dir.join("bad.conf");
    std::fs::write(&cfg, "channel.alpha = -3\n").unwrap();
    let out = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("channel.alpha"), "stderr: {stderr}");
}

#[test]
fn missing_config_file_exits_2() {
    let dir = scratch("missing");
    let out = run(&["simulate", "--config", "/no/such/file.conf", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_csv_and_manifest() {
    let dir = scratch("sim");
    let cfg = write_config(&dir, "scheme.kind = vblast\nscheme.m = 2\nscheme.n = 2\nscheme.q = 2\n");
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "--svg",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("ber.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scheme,M,N,alpha,beta,q,snr_db,trials,bit_errors,ber,ci_low,ci_high"
    );
    // 3 SNR points, one curve
    assert_eq!(csv.lines().count(), 4);
    for line in lines {
        assert!(line.starts_with("vblast,2,2,4,2,2,"), "row: {line}");
        // every numeric field round-trips
        for field in line.split(',').skip(6) {
            field.parse::<f64>().unwrap();
        }
    }
    let manifest = std::fs::read_to_string(dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"command\": \"simulate\""));
    assert!(manifest.contains("\"seed\": 7"));
    assert!(manifest.contains("ber.csv"));
    let svg = std::fs::read_to_string(dir.join("ber.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn rerun_is_byte_identical() {
    let dir = scratch("rerun");
    let cfg = write_config(&dir, "");
    let mut csvs = Vec::new();
    for sub in ["a", "b"] {
        let out_dir = dir.join(sub);
        let out = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        csvs.push(std::fs::read(out_dir.join("ber.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = scratch("seed");
    let cfg = write_config(&dir, "");
    let a = dir.join("a");
    let b = dir.join("b");
    run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    run(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "99", "--out", b.to_str().unwrap()]);
    let csv_a = std::fs::read(a.join("ber.csv")).unwrap();
    let csv_b = std::fs::read(b.join("ber.csv")).unwrap();
    assert_ne!(csv_a, csv_b);
    let manifest = std::fs::read_to_string(b.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 99"));
}

#[test]
fn workers_env_is_accepted_as_default() {
    let dir = scratch("env");
    let cfg = write_config(&dir, "");
    let out = Command::new(bin())
        .args(["simulate", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .env("TURBOSIM_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    // junk env value is a config error
    let out = Command::new(bin())
        .args(["simulate", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .env("TURBOSIM_WORKERS", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn asymptote_emits_pinned_schema() {
    let dir = scratch("asym");
    let cfg = write_config(&dir, "scheme.n = 1,2,3\n");
    let out = run(&["asymptote", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("asymptote.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "alpha,beta,N,coefficient,snr_db,ber_asymptote");
    // 3 N values x 3 SNR points
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn asymptote_rejects_gamma_domain_violation() {
    let dir = scratch("asymdom");
    let cfg = dir.join("run.conf");
    // beta <= 1/2 puts a gamma argument at or below zero
    std::fs::write(&cfg, "channel.alpha = 4\nchannel.beta = 0.5\n").unwrap();
    let out = run(&["asymptote", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("channel."));
}

#[test]
fn cr_reports_three_agreeing_methods() {
    let dir = scratch("cr");
    let cfg = write_config(&dir, "cr.trials = 50000\n");
    let out = run(&["cr", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("cr.csv")).unwrap();
    let values: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 3);
    assert!((values[0] - values[1]).abs() < 1e-7, "closed {} vs quadrature {}", values[0], values[1]);
    assert!((values[0] - values[2]).abs() < 0.02, "closed {} vs sampled {}", values[0], values[2]);
}

#[test]
fn cdf_and_pep_and_capacity_run() {
    let dir = scratch("rest");
    let cfg = write_config(
        &dir,
        "scheme.n = 1\ncdf.trials = 20000\ncdf.radii = 0.1,0.2\npep.trials = 20000\ncapacity.trials = 500\n",
    );
    for (sub, file) in [("cdf", "cdf.csv"), ("pep", "pep.csv"), ("capacity", "capacity.csv")] {
        let out_dir = dir.join(sub);
        let out = run(&[sub, "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{sub} failed");
        assert!(out_dir.join(file).exists());
        assert!(out_dir.join("manifest.json").exists());
    }
}

#[test]
fn power_normalization_flag_changes_results() {
    let dir = scratch("norm");
    let cfg = write_config(&dir, "");
    let a = dir.join("a");
    let b = dir.join("b");
    run(&["capacity", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    run(&[
        "capacity",
        "--config",
        cfg.to_str().unwrap(),
        "--power-normalization",
        "total",
        "--out",
        b.to_str().unwrap(),
    ]);
    let csv_a = std::fs::read(a.join("capacity.csv")).unwrap();
    let csv_b = std::fs::read(b.join("capacity.csv")).unwrap();
    assert_ne!(csv_a, csv_b);
}
