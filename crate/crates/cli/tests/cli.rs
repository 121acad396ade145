use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("harmonic").chain(args.iter().copied());
    let code = harmonic_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn dim_standard_z2() {
    let v = json(&["dim", "--rank", "2", "--degree", "2", "--gens", "standard"]);
    assert_eq!(v["computed_dim"], 5);
    assert_eq!(v["expected_dim"], 5);
    assert_eq!(v["m"], 2);
    assert_eq!(v["generators"], 4);
    assert_eq!(v["surjective"], true);
    assert!(v.get("basis").is_none());
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(
        keys,
        [
            "m",
            "torsion",
            "generators",
            "degree",
            "order",
            "computed_dim",
            "expected_dim",
            "torsion_constant",
            "surjective"
        ]
    );
}

#[test]
fn dim_with_basis_and_torsion() {
    let v = json(&["dim", "--rank", "1", "--torsion", "2", "--degree", "3.5", "--with-basis"]);
    assert_eq!(v["computed_dim"], 2);
    assert_eq!(v["torsion_constant"], true);
    assert_eq!(v["basis"].as_array().unwrap().len(), 2);
    let b = json(&["basis", "--rank", "2", "--degree", "2"]);
    assert_eq!(b["dimension"], 5);
}

#[test]
fn trivial_group_is_rejected() {
    let (code, _, err) = run(&["dim", "--rank", "0", "--torsion", "", "--degree", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("trivial group"), "{err}");
}

#[test]
fn argument_errors_exit_one() {
    assert_eq!(run(&["measure", "--rank", "2", "--kind", "harnack"]).0, 1);
    assert_eq!(run(&["dim", "--rank", "2"]).0, 1);
    assert_eq!(run(&["dim", "--rank", "1", "--torsion", "1", "--degree", "1"]).0, 1);
    assert_eq!(run(&["verify", "--suite", "nope"]).0, 1);
    assert_eq!(run(&["verify", "--suite", "bochner"]).0, 1);
    assert_eq!(run(&["solve", "--rank", "1", "--radius", "2"]).0, 1);
    assert_eq!(run(&["volume", "--rank", "2", "--radius-sweep", "70", "--budget", "100"]).0, 1);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage"));
}

#[test]
fn generating_set_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"[{"free":[1,0]},{"free":[-1,0]},{"free":[0,1,2]}]"#).unwrap();
    let (code, _, err) = run(&["dim", "--rank", "2", "--degree", "1", "--gens", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("element 2"), "{err}");

    let half = dir.path().join("half.json");
    std::fs::write(&half, r#"[{"free":[1,0]},{"free":[1,1]}]"#).unwrap();
    let args = ["dim", "--rank", "2", "--degree", "3", "--gens", half.to_str().unwrap()];
    let (code, _, err) = run(&args);
    assert_eq!(code, 1, "not symmetric without --symmetrize");
    assert!(err.contains("symmetric"), "{err}");
    let mut with = args.to_vec();
    with.push("--symmetrize");
    let v = json(&with);
    assert_eq!(v["computed_dim"], 7);
    assert_eq!(v["generators"], 4);

    let weak = dir.path().join("weak.json");
    std::fs::write(&weak, r#"[{"free":[2]},{"free":[-2]}]"#).unwrap();
    let (code, _, err) = run(&["dim", "--rank", "1", "--degree", "1", "--gens", weak.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("does not generate"), "{err}");
}

#[test]
fn verify_suites() {
    let (code, out, _) = run(&["verify", "--suite", "theorem1_4", "--max-rank", "3", "--max-degree", "4"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3 * 3 * 5);

    let v = json(&["verify", "--suite", "theorem1_5", "--max-rank", "2", "--max-degree", "4", "--max-order", "2"]);
    let row = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["m"] == 2 && r["k"] == 4 && r["n"] == 2 && r["gens"] == "standard")
        .unwrap()
        .clone();
    assert_eq!(row["computed"], "14");

    let (code, out, _) = run(&["verify", "--suite", "bochner", "--max-rank", "2", "--samples", "10", "--seed", "5", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 11);

    assert_eq!(run(&["verify", "--suite", "dim_recursions"]).0, 0);
    assert_eq!(run(&["verify", "--suite", "theorem1_2", "--max-degree", "2"]).0, 0);
}

#[test]
fn failing_suite_exits_two() {
    // The one-dimensional difference-operator rows fail: D^k = span{1, x}.
    let (code, out, err) = run(&["verify", "--suite", "corollary5_4", "--max-rank", "1", "--max-degree", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("failing"));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn measure_csv_and_determinism() {
    let args = [
        "measure", "--rank", "2", "--kind", "all", "--radius-sweep", "1,2", "--trials", "3", "--seed", "7", "--format", "csv",
    ];
    let (code, a, _) = run(&args);
    assert_eq!(code, 0);
    let (_, b, _) = run(&args);
    assert_eq!(a, b);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "kind,R,trials,seed,constant");
    assert_eq!(lines.len(), 1 + 6 * 2);
    assert!(lines[1].starts_with("harnack,1,3,7,"));
    let (_, c, _) = run(&[
        "measure", "--rank", "2", "--kind", "harnack", "--radius-sweep", "1,2", "--trials", "3", "--seed", "8", "--format", "csv",
    ]);
    assert_ne!(a.lines().nth(1), c.lines().nth(1));
    assert_eq!(run(&["measure", "--rank", "2", "--kind", "harnack", "--seed", "1", "--outer-factor", "1"]).0, 1);
}

#[test]
fn solve_from_boundary_file() {
    let dir = tempfile::tempdir().unwrap();
    let b = dir.path().join("b.json");
    std::fs::write(&b, r#"{"-2": 0, "2": 4}"#).unwrap();
    let v = json(&["solve", "--rank", "1", "--radius", "1", "--boundary", b.to_str().unwrap(), "--mode", "exact"]);
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["values"]["-1"], "1");
    assert_eq!(v["values"]["0"], "2");
    assert_eq!(v["values"]["1"], "3");
    let v = json(&["solve", "--rank", "1", "--radius", "1", "--boundary", b.to_str().unwrap(), "--mode", "float"]);
    assert_eq!(v["mode"], "float");
    assert!((v["values"]["0"].as_f64().unwrap() - 2.0).abs() < 1e-12);

    std::fs::write(&b, r#"{"-2": 0}"#).unwrap();
    assert_eq!(run(&["solve", "--rank", "1", "--radius", "1", "--boundary", b.to_str().unwrap()]).0, 1);
}

#[test]
fn solve_seeded_is_reproducible() {
    let args = ["solve", "--rank", "1", "--torsion", "2", "--radius", "2", "--seed", "3"];
    let (_, a, _) = run(&args);
    let (_, b, _) = run(&args);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["mode"], "exact");
}

#[test]
fn volume_output() {
    let (code, out, _) = run(&["volume", "--rank", "2", "--radius-sweep", "1,2", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out, "r,volume,doubling_ratio,normalized_volume\n1,5,2.6,5.0\n2,13,3.1538461538461537,3.25\n");
    let v = json(&["volume", "--rank", "1", "--radius-sweep", "3"]);
    assert_eq!(v[0]["volume"], 7);
    assert_eq!(v[0]["doubling_ratio"], "13/7");
}

#[test]
fn out_file_and_binary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dim.json");
    let status = Command::new(env!("CARGO_BIN_EXE_harmonic"))
        .args(["dim", "--rank", "3", "--degree", "2", "--out", path.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["computed_dim"], 9);

    let out = Command::new(env!("CARGO_BIN_EXE_harmonic"))
        .args(["dim", "--rank", "0", "--torsion", "", "--degree", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trivial group"));
}
