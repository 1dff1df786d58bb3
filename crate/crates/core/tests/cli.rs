//! Runs the `netclock` binary end to end on small files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn netclock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netclock"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = netclock(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Three-node chain with one cascade walking it at external times 10, 11, 12.
fn chain(dir: &TempDir) -> (PathBuf, PathBuf) {
    let graph = dir.path().join("graph.tsv");
    let cascades = dir.path().join("cascades.tsv");
    fs::write(&graph, "# chain\na\tb\nb\tc\n").unwrap();
    fs::write(&cascades, "7\ta\t10\n7\tb\t11\n7\tc\t12\n").unwrap();
    (graph, cascades)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn detect_splits_the_chain() {
    let dir = TempDir::new().unwrap();
    let (graph, cascades) = chain(&dir);
    for algo in ["dp", "greedy", "oracle"] {
        let out = dir.path().join(format!("{algo}.json"));
        ok(&[
            "detect",
            s(&graph),
            s(&cascades),
            "--algo",
            algo,
            "--out",
            s(&out),
        ]);
        let v = json(&out);
        assert_eq!(v["boundaries"], serde_json::json!([11, 12]), "{algo}");
        assert_eq!(
            v["intervals"],
            serde_json::json!([[10, 10], [11, 11], [12, 12]])
        );
        assert!((v["improvement"].as_f64().unwrap() - 9.228260).abs() < 1e-6);
        assert_eq!(v["algorithm"], algo);
        assert_eq!(v["interval_count"], 3);
    }
}

#[test]
fn detect_k_writes_assignment() {
    let dir = TempDir::new().unwrap();
    let (graph, cascades) = chain(&dir);
    let out = dir.path().join("k.json");
    ok(&[
        "detect-k",
        s(&graph),
        s(&cascades),
        "--k",
        "2",
        "--inner",
        "dp",
        "--out",
        s(&out),
    ]);
    let v = json(&out);
    assert!(!v["clocks"].as_array().unwrap().is_empty());
    assert_eq!(v["assignment"].as_object().unwrap().len(), 3);
    assert!((v["total"].as_f64().unwrap() - 9.228260).abs() < 1e-6);
}

#[test]
fn usage_and_input_errors_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let (graph, cascades) = chain(&dir);
    let out = dir.path().join("x.json");
    let missing = dir.path().join("missing.tsv");
    let code = |args: &[&str]| netclock(args).status.code();
    assert_eq!(
        code(&["detect", s(&missing), s(&cascades), "--out", s(&out)]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "detect-k",
            s(&graph),
            s(&cascades),
            "--k",
            "0",
            "--out",
            s(&out)
        ]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "detect",
            s(&graph),
            s(&cascades),
            "--pe",
            "1.5",
            "--out",
            s(&out)
        ]),
        Some(2)
    );
    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, "a\tb\na\ta\n").unwrap();
    let err = netclock(&["detect", s(&bad), s(&cascades), "--out", s(&out)]);
    assert_eq!(err.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&err.stderr).contains(":2"));
    assert_eq!(code(&["no-such-command"]), Some(2));
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        ok(&[
            "simulate",
            "--nodes",
            "200",
            "--cascades",
            "20",
            "--min-size",
            "5",
            "--stretch-mean",
            "3",
            "--seed",
            seed,
            "--out-dir",
            s(&out),
        ]);
        out
    };
    let (a, b, c) = (run("a", "4"), run("b", "4"), run("c", "5"));
    for file in [
        "graph.tsv",
        "nodes.map",
        "cascades.tsv",
        "stretched.tsv",
        "hidden_clock.json",
    ] {
        assert_eq!(
            fs::read(a.join(file)).unwrap(),
            fs::read(b.join(file)).unwrap(),
            "{file}"
        );
    }
    assert_ne!(
        fs::read(a.join("stretched.tsv")).unwrap(),
        fs::read(c.join("stretched.tsv")).unwrap()
    );
}

#[test]
fn simulate_then_complete_and_eval() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("sim");
    ok(&[
        "simulate",
        "--nodes",
        "300",
        "--cascades",
        "60",
        "--min-size",
        "10",
        "--stretch-mean",
        "3",
        "--seed",
        "1",
        "--out-dir",
        s(&data),
    ]);
    let graph = data.join("graph.tsv");
    let stretched = data.join("stretched.tsv");

    let detected = dir.path().join("clock.json");
    ok(&["detect", s(&graph), s(&stretched), "--out", s(&detected)]);

    let table = dir.path().join("completion.csv");
    let stdout = ok(&[
        "complete",
        s(&graph),
        s(&stretched),
        "--clock",
        s(&detected),
        "--drop-rates",
        "0.1,0.3",
        "--seed",
        "2",
        "--out",
        s(&table),
    ]);
    assert_eq!(stdout.lines().count(), 2);
    let csv = fs::read_to_string(&table).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("drop_rate,success,precision,recall,f1"));
    assert_eq!(lines.count(), 2);

    // the hidden clock is a valid input too
    let hidden_table = dir.path().join("hidden.csv");
    ok(&[
        "complete",
        s(&graph),
        s(&stretched),
        "--clock",
        s(&data.join("hidden_clock.json")),
        "--drop-rates",
        "0.3",
        "--out",
        s(&hidden_table),
    ]);

    let eval = dir.path().join("eval.csv");
    let stdout = ok(&[
        "eval",
        s(&graph),
        s(&stretched),
        "--compare",
        "dp,greedy,agg1..agg3,aggmatch,min,max",
        "--out",
        s(&eval),
    ]);
    assert!(stdout.starts_with("method"));
    let mut reader = csv_rows(&eval);
    let header = reader.remove(0);
    assert_eq!(
        header,
        ["method", "improvement", "ratio_to_best", "interval_count"]
    );
    let methods: Vec<&str> = reader.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(
        methods,
        ["dp", "greedy", "agg1", "agg2", "agg3", "aggmatch", "min", "max"]
    );
    let value = |m: &str| -> f64 {
        reader.iter().find(|r| r[0] == m).unwrap()[1]
            .parse()
            .unwrap()
    };
    assert!(value("dp") >= value("greedy") - 1e-9);
    for m in ["greedy", "agg1", "agg2", "agg3", "aggmatch", "min"] {
        assert!(value("dp") >= value(m) - 1e-9, "{m}");
    }
    assert_eq!(value("max"), 0.0);
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}
