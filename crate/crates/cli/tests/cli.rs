use std::path::PathBuf;
use std::process::{Command, Output};

use polyflake::PointCloud;
use serde_json::Value;

fn polyflake(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyflake"))
        .args(args)
        .output()
        .expect("run polyflake")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = polyflake(&full);
    let value = serde_json::from_str(stdout(&out).trim()).expect("json on stdout");
    (value, out.status.code().expect("exit code"))
}

#[test]
fn dim_prints_the_moran_root() {
    let out = polyflake(&["dim", "--n", "9", "--m", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().next(), Some("1.6207585335597825"));
    assert!(stdout(&out).contains("label: similarity dimension\n"));
}

#[test]
fn crossing_systems_are_labelled_upper_bound() {
    let (v, code) = json(&["dim", "--n", "9", "--m", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["label"], "similarity dimension (upper bound)");
}

#[test]
fn check_reports_crossing() {
    let out = polyflake(&["check", "--n", "9", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("intersecting: true"));
    let (v, _) = json(&["check", "--n", "9", "--m", "3"]);
    assert_eq!(v["intersecting"], false);
}

#[test]
fn matrix_matches_golden() {
    let out = polyflake(&["gen", "--n", "9", "--m", "2", "--format", "matrix"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), golden("matrix_9_2.txt"));
}

#[test]
fn matrix_matches_published_table() {
    let path =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/table1_9_2.txt");
    let published = std::fs::read_to_string(path).unwrap();
    let ours = stdout(&polyflake(&[
        "gen", "--n", "9", "--m", "2", "--format", "matrix",
    ]));
    let ours: Vec<&str> = ours.split_whitespace().collect();
    let published: Vec<&str> = published.split_whitespace().collect();
    assert_eq!(ours.len(), published.len());
    for (a, b) in ours.iter().zip(&published) {
        let decimals = b.split_once('.').map_or(0, |(_, f)| f.len());
        let v: f64 = a.parse().unwrap();
        let rounded = format!("{v:.decimals$}");
        let rounded = if rounded.contains('.') {
            rounded.trim_end_matches('0').trim_end_matches('.')
        } else {
            &rounded
        };
        assert_eq!(if rounded == "-0" { "0" } else { rounded }, *b, "{a}");
    }
}

#[test]
fn json_schemas_match_golden() {
    for (args, file) in [
        (&["dim", "--n", "9", "--m", "3"][..], "dim_9_3.json"),
        (
            &[
                "dim", "--n", "7", "--m", "2", "--center", "L:1", "--rot", "gamma",
            ][..],
            "dim_7_2_L1_gamma.json",
        ),
        (&["check", "--n", "8", "--m", "2"][..], "check_8_2.json"),
        (&["preset"][..], "presets.json"),
    ] {
        let (v, code) = json(args);
        assert_eq!(code, 0, "{args:?}");
        let want: Value = serde_json::from_str(&golden(file)).unwrap();
        assert_eq!(v, want, "{args:?}");
    }
}

#[test]
fn gamma_is_echoed_in_radians() {
    let (v, _) = json(&[
        "dim", "--n", "5", "--m", "2", "--center", "L:1", "--rot", "gamma",
    ]);
    let r = v["system"]["center"]["rotation_radians"].as_f64().unwrap();
    assert!((r - std::f64::consts::PI / 5.0).abs() < 1e-12);
}

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cloud.csv");
    let p = path.to_str().unwrap();
    let out = polyflake(&[
        "gen",
        "--preset",
        "hexaflake",
        "--points",
        "5000",
        "--seed",
        "3",
        "--out",
        p,
    ]);
    assert!(out.status.success());
    let again = polyflake(&[
        "gen",
        "--preset",
        "hexaflake",
        "--points",
        "5000",
        "--seed",
        "3",
    ]);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, stdout(&again), "same seed, same bytes");

    let cloud = PointCloud::read_csv(text.as_bytes()).unwrap();
    assert_eq!(cloud.len(), 5000);
    let sys = polyflake::build_flake(&polyflake::preset("hexaflake").unwrap()).unwrap();
    let direct = polyflake::generate(&sys, 5000, 3);
    for (a, b) in cloud.points.iter().zip(&direct.points) {
        assert!(a.distance(*b) < 1e-8);
    }
}

#[test]
fn png_and_svg_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let png = dir.path().join("p.png");
    let out = polyflake(&[
        "gen",
        "--preset",
        "pentaflake",
        "--points",
        "100000",
        "--seed",
        "1",
        "--out",
        png.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(&std::fs::read(&png).unwrap()[1..4], b"PNG");

    let svg = dir.path().join("f.svg");
    let out = polyflake(&[
        "preset",
        "hexaflake",
        "iter",
        "--depth",
        "2",
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<path").count(), 49);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| polyflake(args).status.code();
    assert_eq!(code(&["dim", "--n", "9"]), Some(0));
    assert_eq!(code(&["dim"]), Some(2));
    assert_eq!(code(&["dim", "--n", "abc"]), Some(2));
    assert_eq!(code(&["dim", "--n", "5", "--center", "L:2"]), Some(2));
    assert_eq!(code(&["dim", "--n", "5", "--rot", "gamma"]), Some(2));
    assert_eq!(code(&["iter", "--n", "5", "--depth", "9"]), Some(2));
    assert_eq!(code(&["gen", "--n", "5", "--preset", "vicsek"]), Some(2));
    assert_eq!(code(&["gen", "--preset", "koch"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(
        code(&["gen", "--n", "5", "--out", "/nonexistent-dir/x.csv"]),
        Some(1)
    );
}

#[test]
fn json_errors_are_structured() {
    let (v, code) = json(&["dim", "--n", "5", "--center", "L:2"]);
    assert_eq!(code, 2);
    assert_eq!(v["kind"], "usage");
    assert_eq!(v["exit_code"], 2);
}

#[test]
fn sweep_reproduces_the_list_head() {
    let out = polyflake(&["sweep", "--from", "17", "--to", "18"]);
    let text = stdout(&out);
    assert!(text.contains("17\t5\t1.5238404192006265"));
    let big = stdout(&polyflake(&["sweep", "--values", "1e308"]));
    assert!(big.contains("1e308\t2.5e307\t1.00161673"), "{big}");
}
