//! End-to-end runs of the `nnrank` binary.

use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn nnrank(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_nnrank")).args(args).output().expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&text).unwrap_or_else(|e| panic!("not JSON ({e}): {text}"));
    (out.status.code().unwrap(), v)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const KERNEL4: &str = "2,1,0,1\n1,2,1,0\n0,1,2,1\n1,0,1,2\n";

#[test]
fn demo_robbins_report() {
    let (code, v) = nnrank(&["demo-robbins"]);
    assert_eq!(code, 0);
    assert_eq!(v["rank"], 3);
    assert_eq!(v["nnrank"], 4);
    assert_eq!(v["witness"]["k"], 4);
    assert_eq!(v["verification"], "exact");
}

#[test]
fn rank_of_zero_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "zero.csv", "0,0,0\n0,0,0\n");
    let (code, v) = nnrank(&["rank", "--in", &f]);
    assert_eq!(code, 0);
    assert_eq!(v["rank"], 0);
}

#[test]
fn exact3_on_kernel_and_witness_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "kernel4.csv", KERNEL4);
    let w = dir.path().join("w.json");
    let plot = dir.path().join("plot.csv");
    let (code, v) = nnrank(&[
        "nnrank", "--method", "exact3", "--in", &f, "--out", w.to_str().unwrap(), "--plot", plot.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["k"], 4);
    assert_eq!(v["certified"], true);
    let plot = std::fs::read_to_string(plot).unwrap();
    assert!(plot.starts_with("kind,x,y\n") && plot.contains("witness,"));
    let (code, v) = nnrank(&["verify", "--in", &f, "--witness", w.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["valid"], true);
    assert_eq!(v["mode"], "exact");
}

#[test]
fn every_method_witness_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("path.csv", "1,1,0\n0,1,1\n", "exact2"),
        ("k4.csv", KERNEL4, "nmf"),
        ("offset.csv", "0.5,1.25,2\n1,0.5,0.25\n2,1,0\n0,1,2\n", "exact3"),
    ];
    for (name, text, method) in cases {
        let f = write(dir.path(), name, text);
        let w = dir.path().join(format!("{name}.w.json"));
        let (code, v) = nnrank(&["nnrank", "--method", method, "--in", &f, "--out", w.to_str().unwrap()]);
        assert_eq!(code, 0, "{method}: {v}");
        let (code, v) = nnrank(&["verify", "--in", &f, "--witness", w.to_str().unwrap()]);
        assert_eq!((code, &v["valid"]), (0, &Value::Bool(true)), "{method}: {v}");

        let w2 = dir.path().join(format!("{name}.factor.json"));
        let (code, _) = nnrank(&["factor", "--in", &f, "--out", w2.to_str().unwrap()]);
        assert_eq!(code, 0);
        let (_, v) = nnrank(&["verify", "--in", &f, "--witness", w2.to_str().unwrap()]);
        assert_eq!(v["valid"], true);
    }
}

#[test]
fn bounds_and_nmf_reports() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "k4.csv", KERNEL4);
    let (_, v) = nnrank(&["nnrank", "--method", "bounds", "--in", &f]);
    assert_eq!((v["lower"].as_u64(), v["upper"].as_u64(), v["reference_upper"].as_u64()), (Some(3), Some(4), Some(4)));
    let (_, v) = nnrank(&["nnrank", "--method", "nmf", "--k", "3", "--restarts", "8", "--seed", "5", "--in", &f]);
    assert_eq!(v["found"], false);
    assert_eq!(v["params"]["seed"], 5);
    assert!(v["residual"].as_f64().unwrap() > 1e-3);
    assert!(v.get("witness").is_none());
}

#[test]
fn error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, v) = nnrank(&["rank", "--in", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!((code, v["code"].as_str()), (2, Some("io")));
    let ragged = write(dir.path(), "ragged.csv", "1,2\n3\n");
    let (code, v) = nnrank(&["rank", "--in", &ragged]);
    assert_eq!((code, v["code"].as_str()), (2, Some("format")));
    let two = write(dir.path(), "i2.csv", "1,0\n0,1\n");
    let (code, v) = nnrank(&["nnrank", "--method", "exact3", "--in", &two]);
    assert_eq!((code, v["code"].as_str()), (2, Some("precondition")));
    assert!(v["message"].as_str().unwrap().contains("exact2"));
    let neg = write(dir.path(), "neg.csv", "1,-1\n0,1\n");
    let (code, v) = nnrank(&["nnrank", "--method", "bounds", "--in", &neg]);
    assert_eq!((code, v["code"].as_str()), (2, Some("precondition")));
}

#[test]
fn json_matrix_input() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "m.json", r#"{"rows":2,"cols":2,"scalar":"rational","entries":["1/2","0","0","3"]}"#);
    let (code, v) = nnrank(&["rank", "--in", &f]);
    assert_eq!((code, v["rank"].as_u64(), v["scalar"].as_str()), (0, Some(2), Some("rational")));
}

#[test]
fn scone_commands() {
    let (_, v) = nnrank(&["scone", "membership", "--a", "3", "--b", "4", "--c", "4.9"]);
    assert_eq!(v["class"], "outside");
    let (_, v) = nnrank(&["scone", "membership", "--a", "-1", "--b", "0", "--c", "2"]);
    assert_eq!(v["class"], "inside");

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let (code, v) = nnrank(&["scone", "preimage", "--a", "1", "--b", "0", "--c", "2", "--r", "0.8", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(v["moment_error"].as_f64().unwrap() <= 1e-8);
    assert!(v["min_value"].as_f64().unwrap() >= 0.0);
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.starts_with("t,value\n"));
    assert_eq!(csv.lines().count(), 513);

    let (code, v) = nnrank(&["scone", "preimage", "--a", "1", "--b", "0", "--c", "1"]);
    assert_eq!((code, v["code"].as_str()), (2, Some("precondition")));
    assert!(v["message"].as_str().unwrap().contains("boundary point has no nonnegative preimage"));
}

#[test]
fn growth_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let run = |p: &Path| {
        let out = Command::new(env!("CARGO_BIN_EXE_nnrank"))
            .args(["scone", "growth", "--ns", "3,4", "--seed", "1", "--out", p.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run(&a), run(&b));
    let (ta, tb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    assert_eq!(ta, tb);
    assert!(ta.starts_with("n,rank_float,k_exact3,k_nmf,residual_at_k_minus_1\n3,3,3,3,\n4,3,4,4,"));
}
