//! End-to-end tests of the binary: exit codes, artifact layout, manifest
//! contracts, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lasmimo"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn small_sim_config() -> &'static str {
    r#"
[simulate]
measure = "ber"

[[simulate.experiment]]
channel = { model = "dense", n = 8, k = 4 }
snr_db = [6.0]
detectors = [
    { kind = "matched-filter" },
    { kind = "las", policy = "sequential-circular", init = "matched-filter" },
]
stopping = { mode = "fixed-trials", trials = 192 }
master_seed = 3
workers = 1
"#
}

#[test]
fn missing_config_is_a_usage_error() {
    let out = run(&["simulate"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--config") || err.contains("--recipe"), "{err}");
}

#[test]
fn both_config_and_recipe_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), small_sim_config());
    let out = run(&["simulate", "--config", &cfg, "--recipe", "fig1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_config_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[simulate\nmeasure = \"ber\"\n");
    let out = run(&["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1"), "parse error must be line-anchored: {err}");
}

#[test]
fn unknown_recipe_is_rejected() {
    let out = run(&["simulate", "--recipe", "fig99"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig99"));
}

#[test]
fn nonexistent_config_path_is_rejected() {
    let out = run(&["simulate", "--config", "/definitely/not/here.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("simulate"));
}

#[test]
fn simulate_writes_table_and_manifest_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), small_sim_config());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");

    for out_dir in [&out_a, &out_b] {
        let out = run(&[
            "simulate",
            "--config",
            &cfg,
            "--seed",
            "9",
            "--out",
            &out_dir.display().to_string(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }

    let ber_a = std::fs::read(out_a.join("ber.csv")).unwrap();
    let ber_b = std::fs::read(out_b.join("ber.csv")).unwrap();
    assert_eq!(ber_a, ber_b, "same seed must give identical bytes");

    let text = String::from_utf8(ber_a).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "detector,K,N,alpha,snr_db,ber,stderr,bit_errors,bits,mean_c,mean_steps"
    );
    assert_eq!(text.lines().count(), 1 + 2, "one row per detector");

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_a.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["subcommand"], "simulate");
    assert_eq!(manifest["master_seed"], 9);
    for listed in manifest["outputs"].as_array().unwrap() {
        assert!(Path::new(listed.as_str().unwrap()).exists());
    }
}

#[test]
fn manifest_config_echo_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), small_sim_config());
    let out_a = dir.path().join("a");
    let out = run(&[
        "simulate",
        "--config",
        &cfg,
        "--seed",
        "11",
        "--out",
        &out_a.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    // Re-express the echoed config as a file and run without overrides.
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_a.join("manifest.json")).unwrap())
            .unwrap();
    let echoed = toml::to_string(&manifest["config"]).unwrap();
    let cfg2 = dir.path().join("echo.toml");
    std::fs::write(&cfg2, echoed).unwrap();
    let out_b = dir.path().join("b");
    let rerun = run(&[
        "simulate",
        "--config",
        &cfg2.display().to_string(),
        "--out",
        &out_b.display().to_string(),
    ]);
    assert_eq!(rerun.status.code(), Some(0), "{}", String::from_utf8_lossy(&rerun.stderr));

    let ber_a = std::fs::read(out_a.join("ber.csv")).unwrap();
    let ber_b = std::fs::read(out_b.join("ber.csv")).unwrap();
    assert_eq!(ber_a, ber_b);
}

#[test]
fn trial_cap_before_target_errors_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[simulate]
[[simulate.experiment]]
channel = { model = "dense", n = 8, k = 4 }
sigma = [0.01]
detectors = [{ kind = "gml" }]
stopping = { mode = "until-errors", min_bit_errors = 300, max_trials = 64 }
workers = 1
"#,
    );
    let out = run(&["simulate", "--config", &cfg, "--out", &dir.path().join("o").display().to_string()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("under-powered"));
}

#[test]
fn json_format_emits_parseable_objects() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), small_sim_config());
    let out_dir = dir.path().join("o");
    let out = run(&[
        "simulate",
        "--config",
        &cfg,
        "--format",
        "json",
        "--out",
        &out_dir.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("ber.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert!(rows[0]["detector"].is_string());
}

#[test]
fn fig1_recipe_maps_the_overlap_band() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let out = run(&[
        "regions",
        "--recipe",
        "fig1",
        "--out",
        &out_dir.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(out_dir.join("regions.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "y1,y2,gml,lml1,plas");

    let mut multi = 0usize;
    let mut rows = 0usize;
    for line in lines {
        rows += 1;
        let fields: Vec<&str> = line.split(',').collect();
        let y1: f64 = fields[0].parse().unwrap();
        let y2: f64 = fields[1].parse().unwrap();
        let is_multi = fields[3].contains(';');
        if is_multi {
            multi += 1;
        }
        let in_band = y1.abs() <= 0.24 && y2.abs() <= 0.4;
        assert_eq!(is_multi, in_band, "at ({y1}, {y2})");
        // The one-flip set always sits inside the parallel fixed-point set.
        for v in fields[3].split(';') {
            assert!(fields[4].split(';').any(|p| p == v), "at ({y1}, {y2})");
        }
    }
    assert_eq!(rows, 100 * 100);
    // Odd-hundredth grid: 24 columns inside |y1|<0.24, 40 rows inside
    // |y2|<0.4.
    assert_eq!(multi, 24 * 40);
}

#[test]
fn uncorrelated_regions_have_no_overlap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[regions]
rho = 0.0
a1 = 1.0
a2 = 0.6
y1_range = [-0.99, 0.99]
y2_range = [-0.99, 0.99]
grid = [40, 40]
"#,
    );
    let out_dir = dir.path().join("o");
    let out = run(&["regions", "--config", &cfg, "--out", &out_dir.display().to_string()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(out_dir.join("regions.csv")).unwrap();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert!(!fields[3].contains(';'), "{line}");
        assert_eq!(fields[2], fields[3], "exhaustive = one-flip when uncorrelated");
    }
}

#[test]
fn replica_zero_noise_point_has_one_clean_branch() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[replica]
distribution = { kind = "equal" }
alphas = [1.0]
sigma = [0.0]
"#,
    );
    let out_dir = dir.path().join("o");
    let out = run(&["replica", "--config", &cfg, "--out", &out_dir.display().to_string()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(out_dir.join("replica_branches.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    let fields: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(fields[0], "1"); // alpha
    assert_eq!(fields[4], "0"); // ber
    assert_eq!(fields[5], "1"); // eta
    assert_eq!(fields[6], "good");
}

#[test]
fn replica_cutoff_sweep_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[replica]
distribution = { kind = "two-class", lambda1 = 0.5, a1 = 1.0, a2 = 0.4 }
cutoff_sweep = { lambda1 = 0.5, a2 = [1.0, 0.4] }
"#,
    );
    let out_dir = dir.path().join("o");
    let out = run(&["replica", "--config", &cfg, "--out", &out_dir.display().to_string()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(out_dir.join("replica_cutoff.csv")).unwrap();
    let stars: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(stars.len(), 2);
    assert!(stars[1] > stars[0], "weaker second class must raise the cutoff");
}

#[test]
fn bounds_grow_with_error_weight() {
    let dir = tempfile::tempdir().unwrap();
    let out_dirs: Vec<_> = [1usize, 3]
        .iter()
        .map(|&w| {
            let cfg = dir.path().join(format!("w{w}.toml"));
            std::fs::write(
                &cfg,
                format!(
                    r#"
[bounds]
channel = {{ model = "dense", n = 16, k = 8 }}
seed = 5
sigma = [0.5]
kinds = ["lml1"]
max_weight = {w}
"#
                ),
            )
            .unwrap();
            let cfg = cfg.display().to_string();
            let out_dir = dir.path().join(format!("out{w}"));
            let out = run(&["bounds", "--config", &cfg, "--out", &out_dir.display().to_string()]);
            assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
            out_dir
        })
        .collect();

    let read_bounds = |d: &Path| -> Vec<f64> {
        std::fs::read_to_string(d.join("bounds.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
            .collect()
    };
    let w1 = read_bounds(&out_dirs[0]);
    let w3 = read_bounds(&out_dirs[1]);
    assert_eq!(w1.len(), 8);
    for (a, b) in w1.iter().zip(&w3) {
        assert!(b >= a, "deeper error patterns only add terms");
    }
}

#[test]
fn reference_config_parses_and_runs_bounds() {
    let reference = concat!(env!("CARGO_MANIFEST_DIR"), "/reference-config.toml");
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let out = run(&["bounds", "--config", reference, "--out", &out_dir.display().to_string()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("bounds.csv").exists());
}
