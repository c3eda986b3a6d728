use std::path::Path;
use std::process::{Command, Output};

fn memxbar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memxbar")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_lp_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "lp.json", r#"{"kind":"lp","n":3,"l":1,"G":[1,1,1],"h":[1],"d":[1,2,3]}"#);
    let out = memxbar(&["solve-lp", "--problem", &p, "--eps", "1e-6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["converged"], true);
    assert_eq!(v["programs"], 1);
    assert!((v["objective"].as_f64().unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn generated_instances_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("cs");
    let out = memxbar(&["solve-cs", "--size", "3", "--seed", "5", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["problem.json", "solution.json", "signal.csv"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let plots = dir.path().join("plots");
    let out =
        memxbar(&["plot", "--csv", out_dir.join("signal.csv").to_str().unwrap(), "--out", plots.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(plots.join("cs_stem.svg").exists());

    let qp_dir = dir.path().join("qp");
    let out = memxbar(&["solve-qp", "--size", "8", "--out", qp_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let again = memxbar(&["solve-qp", "--problem", qp_dir.join("problem.json").to_str().unwrap()]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn pca_and_eig() {
    let dir = tempfile::tempdir().unwrap();
    let out = memxbar(&["pca", "--k", "2", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let scores = std::fs::read_to_string(dir.path().join("scores.csv")).unwrap();
    assert_eq!(scores.lines().next(), Some("pc1,pc2,label"));
    assert_eq!(scores.lines().count(), 151);

    let out = memxbar(&["eig", "--size", "12", "--multiplicity", "3", "--k", "4"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["multiplicity"], 3);
}

#[test]
fn bench_writes_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out = memxbar(&[
        "bench",
        "--kind",
        "lp",
        "--size",
        "6,8",
        "--variation",
        "0,0.05",
        "--trials",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trials = std::fs::read_to_string(dir.path().join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 2 + 2 * 2 * 2 * 2);
}

#[test]
fn exit_codes() {
    assert_eq!(memxbar(&["solve-lp", "--rho"]).status.code(), Some(2));
    assert_eq!(memxbar(&["solve-lp", "--variation", "0.9"]).status.code(), Some(2));
    assert_eq!(memxbar(&["bench", "--kind", "svm"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"kind\": \"lp\", \"n\": ");
    assert_eq!(memxbar(&["solve-lp", "--problem", &bad]).status.code(), Some(3));
    let wrong = write(dir.path(), "cs.json", r#"{"kind":"cs","p":2,"q":1,"H":[1,0],"h":[1],"xi":0.1}"#);
    assert_eq!(memxbar(&["solve-lp", "--problem", &wrong]).status.code(), Some(3));

    let singular =
        write(dir.path(), "sing.json", r#"{"kind":"lp","n":3,"l":2,"G":[1,1,1,2,2,2],"h":[1,2],"d":[1,1,1]}"#);
    assert_eq!(memxbar(&["solve-lp", "--problem", &singular]).status.code(), Some(4));
}
