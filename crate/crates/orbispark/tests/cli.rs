use std::path::PathBuf;
use std::process::{Command, Output};

use orbispark::format::{parse_document, to_json, IndexImage};
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn scratch(name: &str, text: &str) -> String {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbispark")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut a = vec!["--format", "json"];
    a.extend_from_slice(args);
    let out = run(&a);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (v, out.status.code().unwrap())
}

fn statuses(v: &Value) -> Vec<(String, String)> {
    v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["name"].as_str().unwrap().to_string(), c["status"].as_str().unwrap().to_string()))
        .collect()
}

fn groups(v: &Value) -> Vec<String> {
    v["cohomology"].as_array().unwrap().iter().map(|g| g["group"].as_str().unwrap().to_string()).collect()
}

#[test]
fn validate_s1_passes() {
    let (v, code) = json(&["validate", &fixture("s1-arcs.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["summary"]["fail"], 0);
    assert!(statuses(&v).iter().all(|(_, s)| s == "PASS" || s == "DECLARED-ONLY"));
}

#[test]
fn validate_all_bundled_fixtures() {
    for f in ["mirror-interval.json", "cone-z4.json", "chain.json"] {
        let (v, code) = json(&["validate", &fixture(f)]);
        assert_eq!(code, 0, "{f}: {v}");
    }
}

#[test]
fn union_violating_index_map_fails_with_the_triple() {
    let mut doc = parse_document(&std::fs::read_to_string(fixture("mirror-interval.json")).unwrap()).unwrap();
    let tw = doc.systems.iter_mut().find(|s| s.name == "tw").unwrap();
    tw.index_map.retain(|m| m.from.len() == 1);
    tw.index_map.push(IndexImage { from: vec!["1".into(), "2".into()], to: vec!["1".into()] });
    let path = scratch("union-violating.json", &to_json(&doc));
    let (v, code) = json(&["validate", &path]);
    assert_eq!(code, 1);
    let check = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "system.union-preserving[tw]").unwrap();
    assert_eq!(check["status"], "FAIL");
    let detail = check["detail"].as_str().unwrap();
    assert!(detail.contains("{1}") && detail.contains("{2}"), "{detail}");
}

#[test]
fn zero_denominator_is_reported_with_position() {
    let text = std::fs::read_to_string(fixture("mirror-interval.json")).unwrap().replacen("\"-1\"", "\"1/0\"", 1);
    let path = scratch("one-over-zero.json", &text);
    let out = run(&["validate", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("parse error at line 9"), "{err}");
}

#[test]
fn cohomology_of_the_circle() {
    let (v, code) = json(&["cohomology", &fixture("s1-arcs.json")]);
    assert_eq!(code, 0);
    let g = groups(&v);
    assert_eq!(&g[..3], &["Z", "Z", "0"]);
    assert!(g[2..].iter().all(|x| x == "0"));
    let (small, _) = json(&["cohomology", &fixture("s1-arcs.json"), "--complex", "small"]);
    assert_eq!(&groups(&small)[..3], &["Z", "Z", "0"]);
}

#[test]
fn cohomology_beyond_the_support_vanishes() {
    for f in ["s1-arcs.json", "mirror-interval.json", "cone-z4.json"] {
        let (v, code) = json(&["cohomology", &fixture(f), "--degree", "5"]);
        assert_eq!(code, 0);
        assert_eq!(groups(&v), ["0"]);
    }
}

#[test]
fn cohomology_with_a_vertex_choice_compares_complexes() {
    let (v, code) = json(&["cohomology", &fixture("s1-arcs.json"), "--phi", "max"]);
    assert_eq!(code, 0);
    let s = statuses(&v);
    assert!(!s.is_empty());
    assert!(s.iter().all(|(_, x)| x == "PASS"), "{s:?}");
}

#[test]
fn verify_complex_suite_on_every_fixture() {
    for f in ["s1-arcs.json", "mirror-interval.json", "cone-z4.json"] {
        let (v, code) = json(&["verify", &fixture(f), "--suite", "complex", "--probes", "3"]);
        assert_eq!(code, 0);
        let s = statuses(&v);
        for want in ["complex.delta-squared", "complex.total-squared", "complex.bidegree"] {
            assert!(s.iter().any(|(n, x)| n.starts_with(want) && x == "PASS"), "{f}: {want}");
        }
    }
}

#[test]
fn verify_homotopy_suite_on_the_mirror() {
    let (v, code) = json(&["verify", &fixture("mirror-interval.json"), "--suite", "homotopy", "--probes", "3"]);
    assert_eq!(code, 0);
    let s = statuses(&v);
    for want in ["homotopy.alpha[flip]", "homotopy.gamma[unflip,flip]", "homotopy.xi[flip,flip]"] {
        assert!(s.iter().any(|(n, x)| n == want && x == "PASS"), "{want}");
    }
}

#[test]
fn verify_appendix_suite_on_s1() {
    let (v, code) = json(&["verify", &fixture("s1-arcs.json"), "--suite", "appendix", "--probes", "3"]);
    assert_eq!(code, 0);
    let s = statuses(&v);
    for want in
        ["appendix.phi-cochain-map", "appendix.phi-injective", "appendix.global-forms-iso", "appendix.cohomology-iso"]
    {
        assert!(s.iter().any(|(n, x)| n.starts_with(want) && x == "PASS"), "{want}");
    }
}

#[test]
fn missing_suite_prerequisites_are_named() {
    let out = run(&["verify", &fixture("s1-arcs.json"), "--suite", "homotopy"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("natural transformations"));
    let out = run(&["verify", &fixture("cone-z4.json"), "--suite", "functor"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("compatible systems"));
}

#[test]
fn invalid_flags_are_usage_errors() {
    assert_eq!(run(&["cohomology", &fixture("s1-arcs.json"), "--complex", "medium"]).status.code(), Some(2));
    assert_eq!(run(&["cohomology", &fixture("s1-arcs.json"), "--degree", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", &fixture("s1-arcs.json"), "--suite", "everything"]).status.code(), Some(2));
}

#[test]
fn verify_reports_are_byte_stable() {
    let args = ["--format", "json", "verify", &fixture("mirror-interval.json"), "--seed", "42", "--probes", "3"];
    let a = run(&args).stdout;
    let b = run(&args).stdout;
    assert_eq!(a, b);
    let c =
        run(&["--format", "json", "verify", &fixture("mirror-interval.json"), "--seed", "43", "--probes", "3"]).stdout;
    let names =
        |x: &[u8]| statuses(&serde_json::from_slice(x).unwrap()).into_iter().map(|(n, _)| n).collect::<Vec<_>>();
    assert_eq!(names(&a), names(&c));
}

#[test]
fn spark_decompose_zero() {
    let (v, code) = json(&["spark", "decompose", &fixture("s1-arcs.json"), "zero", "--degree", "0"]);
    assert_eq!(code, 0);
    let cochains = v["cochains"].as_array().unwrap();
    assert_eq!(cochains.len(), 2);
    assert!(cochains.iter().all(|c| c["terms"].as_array().unwrap().is_empty()));
}

#[test]
fn spark_decompose_integer_step() {
    let (v, code) = json(&["spark", "decompose", &fixture("s1-arcs.json"), "step"]);
    assert_eq!(code, 0);
    let r = v["cochains"].as_array().unwrap().iter().find(|c| c["label"] == "r").unwrap();
    assert_eq!(r["kind"], "alternating");
    let at = |s: &str| {
        r["terms"].as_array().unwrap().iter().find(|t| t["string"] == s).map(|t| t["form"][0]["poly"][0][0].clone())
    };
    assert_eq!(at("({1},{2})"), Some(Value::from("-1")));
    assert_eq!(at("({2},{3})"), Some(Value::from("-1")));
    assert_eq!(at("({1},{3})"), Some(Value::from("-2")));
}

#[test]
fn spark_decompose_rejects_non_sparks() {
    let mut doc = parse_document(&std::fs::read_to_string(fixture("s1-arcs.json")).unwrap()).unwrap();
    let step = doc.cochains.iter_mut().find(|c| c.name == "step").unwrap();
    step.terms[0].form[0].poly[0].0 = orbispark::format::Q(orbispark_core::polyform::rational(1, 2));
    let path = scratch("half-step.json", &to_json(&doc));
    let (v, code) = json(&["spark", "decompose", &path, "step"]);
    assert_eq!(code, 1);
    assert!(v["checks"][0]["detail"].as_str().unwrap().contains("not a spark"));
}

#[test]
fn spark_equivalence_echoes_the_witness() {
    let (v, code) = json(&["spark", "equiv", &fixture("s1-arcs.json"), "zero", "exact", "--degree", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["checks"][0]["status"], "PASS");
    let b = v["cochains"].as_array().unwrap().iter().find(|c| c["label"] == "b").unwrap();
    assert!(!b["terms"].as_array().unwrap().is_empty());
    let (v, _) = json(&["spark", "equiv", &fixture("s1-arcs.json"), "winding", "winding-shifted"]);
    assert_eq!(v["checks"][0]["status"], "PASS");
}

#[test]
fn unknown_equivalence_only_fails_when_strict() {
    let (v, code) = json(&["spark", "equiv", &fixture("s1-arcs.json"), "winding", "step"]);
    assert_eq!(v["checks"][0]["status"], "UNKNOWN");
    assert_eq!(code, 0);
    let (_, code) = json(&["spark", "equiv", &fixture("s1-arcs.json"), "winding", "step", "--strict-unknown"]);
    assert_eq!(code, 3);
}

#[test]
fn spark_products_agree() {
    let (v, code) = json(&["spark", "mul", &fixture("s1-arcs.json"), "winding", "step"]);
    assert_eq!(code, 0);
    assert_eq!(v["checks"][0]["status"], "PASS");
}

#[test]
fn text_output_ends_with_a_summary() {
    let out = run(&["validate", &fixture("cone-z4.json")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().contains("0 fail"), "{text}");
}
