use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn coopgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coopgraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = coopgraph(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn generate_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "spec.txt",
        "family = sbm\nn = 60\nm = 3\np = 0.7\nq = 0.1\n",
    );
    let graph = dir.path().join("g.txt");
    let graph = graph.to_str().unwrap();
    ok(&[
        "generate",
        "--config",
        &spec,
        "--seed",
        "5",
        "--connected",
        "--out",
        graph,
    ]);
    let text = fs::read_to_string(graph).unwrap();
    assert!(text.starts_with("# family = sbm\n"));
    assert!(text.contains("# seed = 5\n"));

    let csv = dir.path().join("a.csv");
    let csv = csv.to_str().unwrap();
    let summary = json(&ok(&[
        "analyze",
        graph,
        "--game",
        "-1,-2,3,0",
        "--out",
        csv,
    ]));
    let report = &summary["report"];
    assert_eq!(report["n"], 60);
    let exact = report["exact"]["bstar"]["value"].as_f64().unwrap();
    let mf = report["mean_field"]["bstar"]["value"].as_f64().unwrap();
    assert!((mf / exact - 1.0).abs() < 0.05, "{exact} {mf}");
    assert!(fs::read_to_string(format!("{csv}.json"))
        .unwrap()
        .contains("\"analyze-file\""));
    assert!(fs::read_to_string(csv)
        .unwrap()
        .starts_with("# experiment = analyze-file\n"));
}

#[test]
fn exact_on_complete_graph_with_dump() {
    let dir = tempfile::tempdir().unwrap();
    let k5 = write(
        dir.path(),
        "k5.txt",
        "5 10\n0 1\n0 2\n0 3\n0 4\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n",
    );
    let dump = dir.path().join("tau.bin");
    let dump_s = dump.to_str().unwrap();
    for method in ["auto", "cg", "gauss-seidel", "dense"] {
        let v = json(&ok(&["exact", &k5, "--method", method, "--dump", dump_s]));
        assert!(
            (v["bstar"]["value"].as_f64().unwrap() + 4.0).abs() < 1e-8,
            "{method}"
        );
        assert!((v["sigma"].as_f64().unwrap() - 0.6).abs() < 1e-8);
    }
    let tau = coopgraph::coalescence::read_tau_dump(&dump).unwrap();
    assert!((tau.get(0, 3) - 4.0).abs() < 1e-8);
}

#[test]
fn meanfield_closed_forms() {
    let v = json(&ok(&["meanfield", "--sbm", "100,2,0.8,0.0"]));
    assert!((v["bstar_sbm"]["inverse"].as_f64().unwrap() - 1.0 / 190.2156862745098).abs() < 1e-9);
    assert!((v["q_hat"]["expansion"].as_f64().unwrap() - 0.2036).abs() < 1e-12);
    let v = json(&ok(&["meanfield", "--er", "100,0.3"]));
    assert!((v["bstar_er"]["value"].as_f64().unwrap() - 74.21428571428571).abs() < 1e-9);
    assert!(!coopgraph(&["meanfield", "--er", "100"]).status.success());
    assert!(!coopgraph(&["meanfield"]).status.success());
}

#[test]
fn refuses_disconnected_input() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "split.txt", "5 3\n0 1\n1 2\n3 4\n");
    let out = coopgraph(&["analyze", &g]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("[3, 2]"), "{err}");
    let bad = write(dir.path(), "bad.txt", "3 2\n0 1\n1 x\n");
    let err = String::from_utf8_lossy(&coopgraph(&["exact", &bad]).stderr).to_string();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn simulate_small_graph_reports_chain_value() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "star.txt", "4 3\n0 1\n0 2\n0 3\n");
    let csv = dir.path().join("sim.csv");
    let csv = csv.to_str().unwrap();
    let v = json(&ok(&[
        "simulate",
        &g,
        "--set",
        "delta=0",
        "--set",
        "placement=0",
        "--set",
        "trials=20000",
        "--out",
        csv,
    ]));
    assert!((v["chain"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(v["disagree"], false);
}

#[test]
fn sweeps_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.txt", "n_grid = 20,40\nreplicates = 3\n");
    let mut outputs = Vec::new();
    for threads in ["1", "4", "8"] {
        let out = dir.path().join(format!("n{threads}.csv"));
        let out = out.to_str().unwrap();
        ok(&[
            "sweep-n",
            "--config",
            &cfg,
            "--seed",
            "9",
            "--threads",
            threads,
            "--out",
            out,
        ]);
        outputs.push(fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.contains("# seed = 9\n# replicates = 3\n# n_grid = 20,40\n"));
}

#[test]
fn rejects_unknown_keys() {
    let out = coopgraph(&["sweep-p-er", "--set", "nonsense=1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonsense"));
}
