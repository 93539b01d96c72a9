use std::path::PathBuf;
use std::process::{Command, Output};

use bmdist::oracles::random_triangle_instance;
use bmdist::{BodyExpr, Vector};
use bmdist_cli::{render_svg, CliError};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn bmdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bmdist")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bmdist-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_body(name: &str, spec: &str) -> String {
    let path = scratch(name);
    let out = bmdist(&["body", "--standard", spec, "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    path.to_str().unwrap().to_string()
}

#[test]
fn distance_of_cross_polytope_and_cube() {
    let (a, b) = (write_body("cross3.json", "cross_polytope:3"), write_body("cube3.json", "cube:3"));
    let v = stdout_json(&bmdist(&["distance", "--a", &a, "--b", &b, "--restarts", "200", "--seed", "7"]));
    let upper = v["upper"].as_f64().unwrap();
    assert!((upper - 1.8).abs() <= 0.02, "{upper}");
    assert!(v["witness"]["matrix"].is_array());
}

#[test]
fn certify_and_replay() {
    let cube = write_body("cube2.json", "cube:2");
    let out = bmdist(&["certify", "--body", &cube]);
    let v = stdout_json(&out);
    assert!((v["value"].as_f64().unwrap() - 2f64.sqrt()).abs() <= 1e-12);
    let cert = scratch("cert.json");
    std::fs::write(&cert, &out.stdout).unwrap();
    let replay = stdout_json(&bmdist(&["verify-certificate", "--cert", cert.to_str().unwrap()]));
    assert_eq!(replay["valid"], Value::Bool(true));

    let mut bad: Value = serde_json::from_slice(&out.stdout).unwrap();
    bad["certificate"]["mu"][0] = Value::from(5.0);
    std::fs::write(&cert, bad.to_string()).unwrap();
    assert_eq!(bmdist(&["verify-certificate", "--cert", cert.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn non_optimal_position_is_a_validation_error() {
    let out = bmdist(&["certify", "--body", r#"{"kind":"polytope","dim":2,"vertices":[[2,0],[-2,0],[0,1],[0,-1]]}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not certified optimal"));
}

#[test]
fn theorem_suite_report() {
    let v = stdout_json(&bmdist(&["theorem", "--suite", "thm-3d-cones", "--cases", "2", "--seed", "1", "--tol", "0.03"]));
    assert_eq!(v["suite"], "thm-3d-cones");
    let cases = v["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 2);
    for c in cases {
        assert_eq!(c["pass"], Value::Bool(true));
        for key in ["seed", "lhs", "rhs", "residual"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
    }
    assert_eq!(bmdist(&["theorem", "--suite", "thm-nothing"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["distance", "--a", "std:regular_polygon:2:6", "--b", "std:simplex_regular_centered:2", "--restarts", "8", "--seed", "3"];
    let (a, b) = (bmdist(&args), bmdist(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let args = ["equilateral", "--n", "2", "--count", "2", "--restarts", "4"];
    let (a, b) = (bmdist(&args), bmdist(&args));
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let csv = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], ",0,1");
    assert!(lines[1].starts_with("0,1,"));
}

#[test]
fn bodies_round_trip_through_files() {
    for spec in ["cube:3", "simplex_regular_centered:2", "regular_polygon:2:7"] {
        let path = write_body("rt.json", spec);
        let first = std::fs::read(&path).unwrap();
        let again = bmdist(&["body", "--file", &path]);
        assert!(again.status.success());
        assert_eq!(first, again.stdout, "{spec}");
    }
    let hanner = bmdist(&["body", "--hanner", "linf(seg,l1(seg,seg))"]);
    assert_eq!(stdout_json(&hanner)["vertices"].as_array().unwrap().len(), 8);
    let positioned = bmdist(&["body", "--hanner", "linf(seg,l1(seg,seg))", "--positioned"]);
    let cert = stdout_json(&bmdist(&["certify", "--body", std::str::from_utf8(&positioned.stdout).unwrap()]));
    assert!((cert["value"].as_f64().unwrap() - 3f64.sqrt()).abs() <= 1e-9);
    let random = stdout_json(&bmdist(&["body", "--random-polygon", "--seed", "5"]));
    assert_eq!(random["symmetric"], Value::Bool(true));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["body", "--hanner", "l1(seg"],
        vec!["body"],
        vec!["body", "--standard", "cube:2", "--positioned"],
        vec!["distance", "--a", "{not json", "--b", "std:cube:2"],
        vec!["distance", "--a", "std:cube:2", "--b", "std:cube:3"],
        vec!["distance", "--a", "std:cube", "--b", "std:cube:2"],
        vec!["render"],
        vec!["render", "--body", "std:cube:3"],
        vec!["frobnicate"],
        vec!["distance", "--a", "std:cube:2", "--b", "std:cube:2", "--restarts", "0"],
    ] {
        let out = bmdist(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(!err.contains("panicked"), "{args:?}: {err}");
    }
}

#[test]
fn render_square_and_witness_overlay() {
    let svg = String::from_utf8(bmdist(&["render", "--body", "std:cube:2"]).stdout).unwrap();
    assert_eq!(svg.matches("<path").count(), 1);
    let d = svg.split("d=\"").nth(1).unwrap().split('"').next().unwrap();
    assert_eq!(d.matches('L').count(), 3);
    assert!(d.ends_with('Z'));
    assert_eq!(svg.matches("<circle").count(), 4);
    assert!(svg.contains(r#"viewBox="-1.1 -1.1 2.2 2.2""#));

    let est = bmdist(&["distance", "--a", "std:regular_polygon:2:6", "--b", "std:cross_polytope:2", "--restarts", "8"]);
    let path = scratch("est.json");
    std::fs::write(&path, &est.stdout).unwrap();
    let out = bmdist(&[
        "render",
        "--body",
        "std:regular_polygon:2:6",
        "--body",
        "std:cross_polytope:2",
        "--witness",
        path.to_str().unwrap(),
    ]);
    let svg = String::from_utf8(out.stdout).unwrap();
    assert_eq!(svg.matches("<path").count(), 3);
    assert!(svg.contains("stroke-dasharray"));
}

#[test]
fn triangle_lemma_figure() {
    let inst = random_triangle_instance(&mut ChaCha8Rng::seed_from_u64(1));
    let e = |i: usize| Vector::from_fn(2, |j, _| if i == j { 1.0 } else { 0.0 });
    let t = [&inst.y - e(0), &inst.y + e(0), &inst.y + e(1)];
    let dt: Vec<Vector> = t.iter().map(|x| x * inst.d).collect();
    let bodies = [
        BodyExpr::polytope(&t).unwrap(),
        BodyExpr::polytope(&inst.s).unwrap(),
        BodyExpr::polytope(&dt).unwrap(),
    ];
    let svg = render_svg(&bodies).unwrap();
    assert_eq!(svg.matches("<path").count(), 3);
    assert_eq!(svg.matches("<circle").count(), 9);
    assert_eq!(svg, render_svg(&bodies).unwrap());
    assert!(matches!(render_svg(&[]), Err(CliError::Usage(_))));
}
