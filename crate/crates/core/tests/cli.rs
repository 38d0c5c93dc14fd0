use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_samoo");

fn samoo(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("SAMOO_OUT_DIR")
        .env_remove("RUST_LOG")
        .output()
        .expect("spawn samoo")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn lines(p: &Path) -> usize {
    fs::read_to_string(p).unwrap().lines().count()
}

const MINIMAL: &str = r#"{"problem":{"name":"zdt1"},"algorithm":{"name":"nsga2"},"ese_max":300,"seeds":[1]}"#;

#[test]
fn minimal_run_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", MINIMAL);
    let out = samoo(&["run", "c.json", "--out", "res", "--quiet"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let seed = dir.path().join("res/seed-1");
    assert_eq!(lines(&seed.join("history.csv")), 301);
    assert!(lines(&seed.join("front.csv")) > 1);
    assert_eq!(lines(&seed.join("archive.csv")), 301);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("res/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seeds"][0]["ese_used"], 300);
    assert_eq!(summary["indicator"], "igd");
    let header = fs::read_to_string(seed.join("history.csv")).unwrap();
    assert!(header.starts_with("ese,best_scalar,indicator\n"));
}

#[test]
fn unknown_key_exits_2_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "c.json",
        r#"{"problem":{"name":"zdt1"},"algorthm":{"name":"nsga2"},"ese_max":300,"seeds":[1]}"#,
    );
    let out = samoo(&["run", "c.json", "--out", "res"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("algorthm"));
    assert!(!dir.path().join("res").exists());
}

#[test]
fn semantic_errors_exit_2_before_any_output() {
    let dir = tempfile::tempdir().unwrap();
    for (i, text) in [
        r#"{"problem":{"name":"zdt1"},"algorithm":{"name":"ga"},"ese_max":300,"seeds":[1]}"#,
        r#"{"problem":{"name":"zdt1"},"algorithm":{"name":"nsga2"},"assist":{"mode":"knockout","n_doe":400},"ese_max":300,"seeds":[1]}"#,
        r#"{"problem":{"name":"zdt1"},"algorithm":{"name":"nsga2","cr":0.5},"ese_max":300,"seeds":[1]}"#,
    ]
    .iter()
    .enumerate()
    {
        let name = format!("c{i}.json");
        write(dir.path(), &name, text);
        let out = samoo(&["run", &name, "--out", "res"], dir.path());
        assert_eq!(out.status.code(), Some(2), "{text}");
    }
    let out = samoo(&["run", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("res").exists());
}

#[test]
fn evaluator_protocol_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // The echo evaluator answers with two values where one objective is expected.
    let cfg = serde_json::json!({
        "problem": {"command": [BIN, "evaluator", "echo"], "n_obj": 1, "lower": [0, 0], "upper": [1, 1], "timeout_secs": 5},
        "algorithm": {"name": "ga", "pop_size": 4},
        "ese_max": 10,
        "seeds": [1]
    });
    write(dir.path(), "c.json", &cfg.to_string());
    let out = samoo(&["run", "c.json", "--out", "res", "--quiet"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn external_sphere_evaluator_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({
        "problem": {"command": [BIN, "evaluator", "sphere"], "n_obj": 1, "lower": [-1, -1, -1], "upper": [1, 1, 1]},
        "algorithm": {"name": "de", "pop_size": 6},
        "assist": {"mode": "bias", "beta": 5},
        "ese_max": 30,
        "seeds": [2]
    });
    write(dir.path(), "c.json", &cfg.to_string());
    let out = samoo(&["run", "c.json", "--out", "res", "--quiet"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(lines(&dir.path().join("res/seed-2/history.csv")), 31);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "c.json",
        r#"{"problem":{"name":"zdt2","n_var":5},"algorithm":{"name":"nsga2"},"assist":{"mode":"knockout","beta":10},"ese_max":60,"seeds":[5]}"#,
    );
    for out in ["a", "b"] {
        assert_eq!(samoo(&["run", "c.json", "--out", out, "--quiet"], dir.path()).status.code(), Some(0));
    }
    for f in ["history.csv", "front.csv", "archive.csv"] {
        let read = |o: &str| fs::read(dir.path().join(o).join("seed-5").join(f)).unwrap();
        assert_eq!(read("a"), read("b"), "{f}");
    }
}

#[test]
fn output_dir_precedence_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "c.json",
        r#"{"problem":{"name":"sphere","n_var":2},"algorithm":{"name":"ga","pop_size":4},"ese_max":12,"seeds":[1],"output":"from-config"}"#,
    );
    assert_eq!(samoo(&["run", "c.json", "--quiet"], dir.path()).status.code(), Some(0));
    assert!(dir.path().join("from-config/seed-1/history.csv").exists());

    let out = Command::new(BIN)
        .args(["run", "c.json", "--quiet", "--seeds", "3,4"])
        .current_dir(dir.path())
        .env("SAMOO_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("from-env/seed-3").exists());
    assert!(dir.path().join("from-env/seed-4").exists());
    assert!(!dir.path().join("from-env/seed-1").exists());

    let out = Command::new(BIN)
        .args(["run", "c.json", "--quiet", "--out", "from-flag"])
        .current_dir(dir.path())
        .env("SAMOO_OUT_DIR", "from-env-2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("from-flag/seed-1").exists());
    assert!(!dir.path().join("from-env-2").exists());
}

#[test]
fn compare_identical_configs_ties_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"problem":{"name":"zdt1","n_var":4},"algorithm":{"name":"nsga2","pop_size":10},"ese_max":40,"seeds":[1,2,3]}"#;
    write(dir.path(), "a.json", text);
    write(dir.path(), "b.json", text);
    let out = samoo(&["compare", "a.json", "b.json", "--out", "cmp", "--svg"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let c: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("cmp/compare.json")).unwrap()).unwrap();
    assert_eq!(c["ties"], 3);
    assert_eq!(c["median_ratio"], 1.0);
    assert!(dir.path().join("cmp/front.svg").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("wins a=0 b=0 ties=3"));
}

#[test]
fn compare_three_objectives_skips_svg() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "a.json",
        r#"{"problem":{"name":"dtlz2","n_var":5,"n_obj":3},"algorithm":{"name":"nsga3","pop_size":10},"ese_max":30,"seeds":[1],"indicator":{"name":"hv"}}"#,
    );
    write(
        dir.path(),
        "b.json",
        r#"{"problem":{"name":"dtlz2","n_var":5,"n_obj":3},"algorithm":{"name":"nsga2","pop_size":10},"ese_max":30,"seeds":[1],"indicator":{"name":"hv"}}"#,
    );
    let out = samoo(&["compare", "a.json", "b.json", "--out", "cmp", "--svg"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped"));
    assert!(dir.path().join("cmp/compare.json").exists());
    assert!(!dir.path().join("cmp/front.svg").exists());
}

#[test]
fn compare_mismatched_budget_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.json", MINIMAL);
    write(
        dir.path(),
        "b.json",
        r#"{"problem":{"name":"zdt1"},"algorithm":{"name":"nsga2"},"ese_max":200,"seeds":[1]}"#,
    );
    let out = samoo(&["compare", "a.json", "b.json", "--out", "cmp"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ese_max"));
    assert!(!dir.path().join("cmp").exists());
}

#[test]
fn list_is_deterministic_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let a = samoo(&["list"], dir.path());
    let b = samoo(&["list"], dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    for word in ["zdt1", "nsga2", "nsga3", "ga", "de", "cubic", "thin_plate_spline", "knockout"] {
        assert!(text.contains(word), "{word}");
    }
}
