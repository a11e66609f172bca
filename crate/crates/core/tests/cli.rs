use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use d2d_cache::experiments::{PresetName, COLUMNS};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_d2d-cache"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn list_presets_names_all() {
    let o = cli(&["list-presets"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for p in PresetName::ALL {
        assert!(text.lines().any(|l| l.starts_with(p.as_str())), "{p} missing");
    }
}

#[test]
fn run_preset_to_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("audio.csv");
    let o = cli(&["run", "validate_audio", "--iterations", "50", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), COLUMNS);
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| &r[6] == "50" && &r[7] == "3"));
}

#[test]
fn json_to_stdout() {
    let o = cli(&["run", "validate_video", "--iterations", "20", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0]["sweep_name"], "mean_lifespan_s");
    assert_eq!(rows[0]["n_iter"], 20);
}

#[test]
fn output_is_reproducible_across_threads() {
    let base = ["run", "correlation_video", "--iterations", "100", "--seed", "11"];
    let one = cli(&[&base[..], &["--threads", "1"]].concat());
    let four = cli(&[&base[..], &["--threads", "4"]].concat());
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let other_seed = cli(&["run", "correlation_video", "--iterations", "100", "--seed", "12"]);
    assert_ne!(one.stdout, other_seed.stdout);
}

#[test]
fn run_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "exp.toml",
        r#"
preset = "custom"
iterations = 30
seed = 5

[lifespan]
law = "fixed"
mean = 60.0

[[sweeps]]
variable = "density"
values = [1e-3, 2e-3]
"#,
    );
    let o = cli(&["run", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("density_per_m2,0.001,"));
    assert!(lines[2].ends_with(",30,5"));
}

#[test]
fn validate_prints_resolved_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "v.toml", "preset = \"validate_video\"\nseed = 99\n");
    let o = cli(&["validate", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["seed"], 99);
    assert_eq!(v["name"], "validate_video");
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "u.toml", "preset = \"validate_audio\"\n[radio]\nbogus = 1\n");
    let alpha = write(dir.path(), "a.toml", "preset = \"validate_audio\"\n[radio]\npathloss_exponent = 1.5\n");
    let missing = dir.path().join("absent.toml").display().to_string();
    for args in [
        vec!["validate", unknown.as_str()],
        vec!["run", unknown.as_str()],
        vec!["run", alpha.as_str()],
        vec!["validate", missing.as_str()],
        vec!["run", "no_such_preset"],
        vec!["run", "validate_audio", "--iterations", "0"],
    ] {
        let o = cli(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error: "), "{args:?}");
    }
}

#[test]
fn numeric_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "n.toml",
        "preset = \"validate_audio\"\niterations = 10\n[fading]\nlaw = \"log_normal\"\nmu = 0.0\nsigma = 100.0\n",
    );
    let o = cli(&["run", &cfg]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("overflow"));
}

#[test]
fn unwritable_output_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("x.csv");
    let o = cli(&["run", "validate_audio", "--iterations", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("I/O error"));
}
