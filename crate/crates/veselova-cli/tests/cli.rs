//! End-to-end tests of the command-line binary: exit codes, output files,
//! reproducibility, the seed override, and the report contents.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_veselova"));
    c.env_remove("VESELOVA_SEED");
    c
}

/// A fresh, empty scratch directory unique to this test and process.
fn fresh_dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("veselova-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process was signalled")
}

const REDUCED_BATCH: &str = "mode = \"reduced\"\n\
    dimension = 3\n\
    mass = [1.0, 2.0, 3.0]\n\
    \n\
    [initial]\n\
    kind = \"random\"\n\
    seed = 7\n\
    count = 2\n\
    \n\
    [integrator]\n\
    steps = 2000\n\
    \n\
    [outputs]\n\
    stride = 20\n";

#[test]
fn reruns_are_byte_identical() {
    let d = fresh_dir("rerun");
    let cfg = write_config(&d, REDUCED_BATCH);
    for sub in ["a", "b"] {
        let out = bin()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .arg("--out-dir")
            .arg(d.join(sub))
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    }
    for name in ["traj_000.csv", "traj_001.csv"] {
        let a = std::fs::read(d.join("a").join(name)).unwrap();
        let b = std::fs::read(d.join("b").join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn seed_env_overrides_the_configured_seed() {
    let d = fresh_dir("seed-env");
    let cfg = write_config(&d, REDUCED_BATCH);
    let with_config_seed = write_config(&fresh_dir("seed-env-alt"), &REDUCED_BATCH.replace("seed = 7", "seed = 99"));

    // Same seed through the environment as through the file: identical bytes.
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&with_config_seed)
        .arg("--out-dir")
        .arg(d.join("env"))
        .env("VESELOVA_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(d.join("file"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let env_bytes = std::fs::read(d.join("env").join("traj_000.csv")).unwrap();
    let file_bytes = std::fs::read(d.join("file").join("traj_000.csv")).unwrap();
    assert_eq!(env_bytes, file_bytes);

    // A different env seed produces a different trajectory.
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(d.join("other"))
        .env("VESELOVA_SEED", "8")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let other = std::fs::read(d.join("other").join("traj_000.csv")).unwrap();
    assert_ne!(env_bytes, other);
}

#[test]
fn an_unparsable_seed_is_a_usage_error() {
    let d = fresh_dir("seed-bad");
    let cfg = write_config(&d, REDUCED_BATCH);
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .env("VESELOVA_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    assert!(stderr_of(&out).contains("VESELOVA_SEED"));
}

#[test]
fn every_violated_field_is_reported_at_once() {
    let d = fresh_dir("violations");
    let cfg = write_config(
        &d,
        "mode = \"reduced\"\n\
         dimension = 0\n\
         mass = [1.0, -2.0]\n\
         \n\
         [initial]\n\
         kind = \"random\"\n\
         \n\
         [integrator]\n\
         dt = -1.0\n",
    );
    let out = bin().args(["simulate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(code(&out), 1);
    let err = stderr_of(&out);
    for needle in ["dimension", "mass tensor must be positive", "integrator.dt"] {
        assert!(err.contains(needle), "missing `{needle}` in:\n{err}");
    }
}

#[test]
fn a_degenerate_cylindrical_body_is_rejected() {
    let d = fresh_dir("degenerate");
    let cfg = write_config(
        &d,
        "mode = \"cyl\"\n\
         dimension = 4\n\
         mass = [2.0, 2.0, 2.0, 2.0]\n\
         \n\
         [initial]\n\
         kind = \"explicit\"\n\
         a = 0.5\n\
         b = 2.0\n\
         p_sq = 6.0\n\
         d = 0.0\n",
    );
    let out = bin().args(["simulate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(code(&out), 1);
    assert!(stderr_of(&out).contains("degenerate"));
}

#[test]
fn subcommand_and_mode_must_agree() {
    let d = fresh_dir("mismatch");
    let cfg = write_config(&d, REDUCED_BATCH);
    let out = bin().args(["strata", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(code(&out), 1);
    let err = stderr_of(&out);
    assert!(err.contains("strata") && err.contains("reduced"), "{err}");
}

#[test]
fn unknown_subcommands_exit_with_the_usage_code() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn a_missing_config_file_is_a_usage_error() {
    let d = fresh_dir("missing");
    let out = bin()
        .args(["simulate", "--config"])
        .arg(d.join("nonexistent.toml"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn the_drift_guard_exits_with_the_numeric_code() {
    let d = fresh_dir("blowup");
    let cfg = write_config(
        &d,
        "mode = \"reduced\"\n\
         dimension = 3\n\
         mass = [1.0, 2.0, 3.0]\n\
         \n\
         [initial]\n\
         kind = \"random\"\n\
         seed = 4\n\
         \n\
         [integrator]\n\
         dt = 0.5\n\
         steps = 2000\n",
    );
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(d.join("out"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("numeric failure"));
}

#[test]
fn verify_passes_for_the_reference_body() {
    let d = fresh_dir("verify");
    let cfg = write_config(
        &d,
        "mode = \"verify\"\n\
         dimension = 3\n\
         mass = [1.0, 2.0, 3.0]\n",
    );
    let out = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(d.join("out"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"), "{text}");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("out").join("report.json")).unwrap())
            .unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() >= 20);
    for c in checks {
        assert_eq!(c["pass"], true, "failing check in report: {c}");
    }
}

#[test]
fn em_map_writes_the_three_reference_rays() {
    let d = fresh_dir("emmap");
    let cfg = write_config(
        &d,
        "mode = \"em-map\"\n\
         dimension = 3\n\
         mass = [1.0, 2.0, 3.0]\n\
         \n\
         [em_map]\n\
         samples = 500\n",
    );
    let out = bin()
        .args(["em-map", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(d.join("out"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let rays = std::fs::read_to_string(d.join("out").join("rays.csv")).unwrap();
    for slope in [
        "6.0000000000000000e0",
        "8.0000000000000000e0",
        "1.0000000000000000e1",
    ] {
        assert!(rays.contains(slope), "missing slope {slope} in:\n{rays}");
    }
    assert!(d.join("out").join("em_samples.csv").exists());
}

#[test]
fn spectrum_counts_three_base_frequencies_over_the_relative_equilibrium() {
    let d = fresh_dir("spectrum");
    let cfg = write_config(
        &d,
        "mode = \"spectrum\"\n\
         \n\
         [spectrum]\n\
         preset = \"releq-attitude\"\n",
    );
    let out = bin()
        .args(["spectrum", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(d.join("out"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("out").join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["spectrum"]["base_count"], 3);
    assert_eq!(report["spectrum"]["expected_base_count"], 3);
    assert!(d.join("out").join("spectrum.csv").exists());
}

#[test]
fn axis_trace_checks_the_invariant_cylinder() {
    let d = fresh_dir("axtrace");
    let cfg = write_config(
        &d,
        "mode = \"axis-trace\"\n\
         dimension = 3\n\
         mass = [1.0, 2.0, 2.0]\n\
         \n\
         [initial]\n\
         kind = \"random\"\n\
         seed = 11\n\
         count = 1\n\
         \n\
         [integrator]\n\
         steps = 4000\n\
         \n\
         [outputs]\n\
         stride = 10\n",
    );
    let out = bin()
        .args(["axis-trace", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(d.join("out"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("out").join("report.json")).unwrap())
            .unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks
        .iter()
        .any(|c| c["name"] == "axis-cylinder-residual-000" && c["pass"] == true));
    let trace = std::fs::read_to_string(d.join("out").join("axis_trace_000.csv")).unwrap();
    assert!(trace.starts_with("t,x1,x2,x3\n"));
}

#[test]
fn strata_runs_emit_tag_streams() {
    let d = fresh_dir("strata");
    let cfg = write_config(
        &d,
        "mode = \"axi\"\n\
         dimension = 3\n\
         mass = [1.0, 2.0, 2.0]\n\
         \n\
         [initial]\n\
         kind = \"explicit\"\n\
         q1 = 0.3\n\
         p1 = 0.4\n\
         p_sq = 2.0\n\
         \n\
         [integrator]\n\
         steps = 2000\n\
         \n\
         [outputs]\n\
         stride = 20\n",
    );
    let out = bin()
        .args(["strata", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(d.join("out"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let csv = std::fs::read_to_string(d.join("out").join("strata_000.csv")).unwrap();
    assert!(csv.starts_with("t,stratum\n"));
    assert!(csv.contains(",S3"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("out").join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["stratum_tags"][0], "S3");
}

#[test]
fn full_mode_emits_the_attitude_csv_schema() {
    let d = fresh_dir("full-csv");
    let cfg = write_config(
        &d,
        "mode = \"full\"\n\
         dimension = 3\n\
         mass = [1.0, 2.0, 3.0]\n\
         \n\
         [initial]\n\
         kind = \"steady-rotation\"\n\
         plane = [0, 1]\n\
         speed = 2.0\n\
         \n\
         [integrator]\n\
         steps = 500\n\
         \n\
         [outputs]\n\
         stride = 10\n",
    );
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(d.join("out"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let csv = std::fs::read_to_string(d.join("out").join("traj_000.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "t,g_0_0,g_0_1,g_0_2,g_1_0,g_1_1,g_1_2,g_2_0,g_2_1,g_2_2,om_0_1,om_0_2,om_1_2,H,P,maxres"
    );
}

#[test]
fn presets_list_and_emit_valid_configurations() {
    let d = fresh_dir("presets");
    let out = bin().args(["presets", "--list"]).output().unwrap();
    assert_eq!(code(&out), 0);
    let listing = stdout_of(&out);
    assert!(listing.contains("reduced-generic"));
    assert!(listing.contains("spectrum-releq-attitude"));

    let out = bin()
        .args(["presets", "--out-dir"])
        .arg(&d)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let mut count = 0;
    for entry in std::fs::read_dir(&d).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            veselova_cli::config::load_config(&path)
                .unwrap_or_else(|e| panic!("{} does not validate: {e}", path.display()));
            count += 1;
        }
    }
    assert!(count >= 10, "only {count} preset files were written");
}
