use std::path::Path;
use std::process::{Command, Output};

use equisum::mixednorm::PointSet;

fn equisum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_equisum"))
        .args(args)
        .env_remove("EQUISUM_PRECISION_FLOOR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_5_8_writes_14_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = equisum(&["construct", "--a", "5", "--b", "8", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let set = PointSet::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(set.len(), 14);
    assert_eq!((set.a, set.b), (5, 8));

    let v = equisum(&["verify", "--in", path_str(&out)]);
    assert_eq!(code(&v), 0);
    assert_eq!(json(&v)["pass"], true);
}

#[test]
fn construct_28_40_is_infeasible() {
    let o = equisum(&["construct", "--a", "28", "--b", "40"]);
    assert_eq!(code(&o), 2);
    let body = json(&o);
    assert_eq!(body["error"], "InfeasibleConstruction");
    assert_eq!(body["verdict"]["verdict"], "InequalityFails");
    assert!(body["verdict"]["margin_lo"].is_string());
    assert!(body["verdict"]["margin_hi"]
        .as_str()
        .unwrap()
        .starts_with('-'));
}

#[test]
fn construct_1_1_writes_3_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = equisum(&["construct", "--a", "1", "--b", "1", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0);
    let set = PointSet::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(set.len(), 3);
}

#[test]
fn construct_to_stdout_and_forced_methods() {
    let o = equisum(&[
        "construct",
        "--a",
        "3",
        "--b",
        "3",
        "--method",
        "prop2",
        "--simplex",
        "projection",
    ]);
    assert_eq!(code(&o), 0);
    let set = PointSet::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(set.len(), 7);

    let o = equisum(&["construct", "--a", "1", "--b", "4", "--method", "theorem"]);
    assert_eq!(code(&o), 64);
}

#[test]
fn verify_detects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    assert_eq!(
        code(&equisum(&[
            "construct",
            "--a",
            "4",
            "--b",
            "9",
            "--out",
            path_str(&out)
        ])),
        0
    );
    let mut set = PointSet::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    set.points[0].x.coords_mut()[0] += 1e-3;
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, set.to_json()).unwrap();
    let v = equisum(&["verify", "--in", path_str(&bad)]);
    assert_eq!(code(&v), 1);
    assert_eq!(json(&v)["pass"], false);
}

#[test]
fn verify_two_points_passes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("two.json");
    std::fs::write(
        &p,
        r#"{"a":2,"b":1,"lambda":6.0,"swapped":false,"provenance":"hand",
            "points":[{"x":[0.0,0.0],"y":[0.0]},{"x":[3.0,4.0],"y":[-1.0]}]}"#,
    )
    .unwrap();
    let v = equisum(&["verify", "--in", path_str(&p)]);
    assert_eq!(code(&v), 0);
    assert_eq!(json(&v)["n_pairs"], 1);
}

#[test]
fn verify_malformed_input_exits_65() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("junk.json");
    std::fs::write(&p, "{ not json").unwrap();
    assert_eq!(code(&equisum(&["verify", "--in", path_str(&p)])), 65);

    std::fs::write(
        &p,
        r#"{"a":2,"b":1,"lambda":1.0,"swapped":false,"provenance":"hand",
            "points":[{"x":[0.0],"y":[0.0]}]}"#,
    )
    .unwrap();
    assert_eq!(code(&equisum(&["verify", "--in", path_str(&p)])), 65);
}

#[test]
fn check_examples() {
    let o = equisum(&["check", "--a", "29", "--b", "39"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["verdict"], "InequalityFails");
    assert_eq!(
        (v["c"].as_u64(), v["alpha"].as_u64(), v["beta"].as_u64()),
        (Some(2), Some(21), Some(9))
    );

    let v = json(&equisum(&["check", "--a", "2", "--b", "3"]));
    assert_eq!(v["verdict"], "BetaTrivial(0)");

    let v = json(&equisum(&["check", "--a", "5", "--b", "30"]));
    assert_eq!(v["lemma_covered"], true);

    let v = json(&equisum(&["check", "--a", "40", "--b", "28"]));
    assert_eq!(v["swapped"], true);
    assert_eq!(v["verdict"], "InequalityFails");
}

#[test]
fn precision_floor_env_and_flag() {
    let bad = Command::new(env!("CARGO_BIN_EXE_equisum"))
        .args(["check", "--a", "5", "--b", "8"])
        .env("EQUISUM_PRECISION_FLOOR", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 64);
    let ok = Command::new(env!("CARGO_BIN_EXE_equisum"))
        .args(["check", "--a", "5", "--b", "8", "--precision-floor", "60"])
        .env("EQUISUM_PRECISION_FLOOR", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&ok), 0);
}

#[test]
fn sweep_explicit_range_counts() {
    let o = equisum(&[
        "sweep", "--a-min", "2", "--a-max", "2", "--b-max", "5", "--format", "json",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let bs: Vec<u64> = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["b"].as_u64().unwrap())
        .collect();
    assert_eq!(bs, vec![3, 4, 5]);
}

#[test]
fn sweep_csv_failing_set_up_to_28() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = equisum(&[
        "sweep",
        "--a-min",
        "20",
        "--a-max",
        "28",
        "--format",
        "csv",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(&out).unwrap();
    let failing: Vec<&str> = csv
        .lines()
        .filter(|l| l.contains(",InequalityFails,"))
        .collect();
    assert_eq!(failing.len(), 1);
    assert!(failing[0].starts_with("28,40,2,"));
}

#[test]
fn usage_errors() {
    assert_eq!(code(&equisum(&[])), 64);
    assert_eq!(code(&equisum(&["construct", "--a", "0", "--b", "2"])), 64);
    assert_eq!(
        code(&equisum(&["sweep", "--a-min", "1", "--a-max", "3"])),
        64
    );
    assert_eq!(code(&equisum(&["--help"])), 0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let runs: Vec<Output> = (0..2)
        .map(|_| {
            equisum(&[
                "construct",
                "--a",
                "6",
                "--b",
                "17",
                "--simplex",
                "projection",
            ])
        })
        .collect();
    assert_eq!(code(&runs[0]), 0);
    assert_eq!(runs[0].stdout, runs[1].stdout);

    let s1 = equisum(&["sweep", "--a-min", "2", "--a-max", "8", "--threads", "1"]);
    let s2 = equisum(&["sweep", "--a-min", "2", "--a-max", "8"]);
    assert_eq!(code(&s1), 0);
    assert_eq!(s1.stdout, s2.stdout);
}
