use std::path::PathBuf;

use orbispark::format::{
    document, load_file, load_str, parse_document, resolve, to_json, CochainTerm, FormTerm, LoadError, Q,
};
use orbispark_core::atlas::validate_atlas;
use orbispark_core::cochain::Domain;
use orbispark_core::fixtures;
use orbispark_core::homology::cohomology_all;
use orbispark_core::indexcomb::IndexString;
use orbispark_core::polyform::integer;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

const FIXTURES: [&str; 4] = ["s1-arcs.json", "mirror-interval.json", "cone-z4.json", "chain.json"];

const TINY: &str = r#"{
  "schema": 1,
  "atlases": [
    {
      "name": "point",
      "dim": 1,
      "vertices": ["p"],
      "charts": [{"index": ["p"]}]
    }
  ]
}"#;

#[test]
fn bundled_fixtures_round_trip_byte_for_byte() {
    for f in FIXTURES {
        let text = std::fs::read_to_string(fixture(f)).unwrap();
        let loaded = load_str(&text).unwrap();
        assert_eq!(to_json(&document(&loaded)), text, "{f}");
    }
}

#[test]
fn bundled_fixtures_match_the_built_in_models() {
    let s1 = load_file(&fixture("s1-arcs.json")).unwrap();
    let built = fixtures::s1_arcs();
    assert_eq!(*s1.atlases[0], built);
    let cone = load_file(&fixture("cone-z4.json")).unwrap();
    assert_eq!(*cone.atlases[0], fixtures::cone_z4());
    let m = load_file(&fixture("mirror-interval.json")).unwrap();
    assert_eq!(*m.atlases[0], fixtures::mirror_interval());
}

#[test]
fn loaded_atlases_keep_their_cohomology() {
    let s1 = load_file(&fixture("s1-arcs.json")).unwrap();
    let h = cohomology_all(&s1.atlases[0], Domain::Subsets);
    assert_eq!((h[0].free_rank, h[1].free_rank), (1, 1));
    assert!(!validate_atlas(&s1.atlases[0]).has_failures());
}

#[test]
fn minimal_document_loads() {
    let d = load_str(TINY).unwrap();
    assert_eq!(d.atlases.len(), 1);
    assert!(d.systems.is_empty());
}

#[test]
fn zero_denominator_is_a_parse_error_with_position() {
    let text = TINY.replace(
        r#""charts": [{"index": ["p"]}]"#,
        r#""charts": [{"index": ["p"], "group": [{"matrix": [["1/0"]], "translation": ["0"]}]}]"#,
    );
    match load_str(&text) {
        Err(LoadError::Parse { line, column, message }) => {
            assert_eq!(line, 8);
            assert!(column > 40, "column {column}");
            assert!(message.contains("1/0") || message.contains("zero"), "{message}");
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn syntax_errors_carry_the_position() {
    match parse_document("{\n  \"schema\": 1,\n  \"atlases\": [,]\n}") {
        Err(LoadError::Parse { line: 3, .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_fields_are_rejected() {
    let text = TINY.replace(r#""dim": 1,"#, r#""dim": 1, "dimension": 1,"#);
    assert!(matches!(load_str(&text), Err(LoadError::Parse { .. })));
}

#[test]
fn wrong_schema_version_is_named() {
    let text = TINY.replace(r#""schema": 1"#, r#""schema": 7"#);
    match load_str(&text) {
        Err(LoadError::Semantic(m)) => assert!(m.contains("schema"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unresolved_references_are_named() {
    let mut doc = parse_document(&std::fs::read_to_string(fixture("mirror-interval.json")).unwrap()).unwrap();
    doc.systems[0].target = "elsewhere".into();
    match resolve(&doc) {
        Err(LoadError::Semantic(m)) => assert!(m.contains("elsewhere"), "{m}"),
        other => panic!("{other:?}"),
    }
    let mut doc = parse_document(&std::fs::read_to_string(fixture("mirror-interval.json")).unwrap()).unwrap();
    doc.atlases[0].charts[0].index = vec!["9".into()];
    assert!(matches!(resolve(&doc), Err(LoadError::Semantic(_))));
}

#[test]
fn non_inclusion_embeddings_must_be_declared() {
    let mut doc = parse_document(&std::fs::read_to_string(fixture("chain.json")).unwrap()).unwrap();
    let v = doc.atlases.iter_mut().find(|a| a.name == "chain-v").unwrap();
    assert!(!v.containments.is_empty(), "the chain has nested charts with unrelated indices");
    v.containments.clear();
    match resolve(&doc) {
        Err(LoadError::Semantic(m)) => assert!(m.contains("containment"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn declared_containments_need_an_embedding() {
    let mut doc = parse_document(&std::fs::read_to_string(fixture("mirror-interval.json")).unwrap()).unwrap();
    doc.atlases[0].containments.push((vec!["1".into()], vec!["2".into()]));
    match resolve(&doc) {
        Err(LoadError::Semantic(m)) => assert!(m.contains("no embedding"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn duplicate_names_are_rejected() {
    let mut doc = parse_document(&std::fs::read_to_string(fixture("chain.json")).unwrap()).unwrap();
    let again = doc.systems[0].clone();
    doc.systems.push(again);
    assert!(matches!(resolve(&doc), Err(LoadError::Semantic(_))));
}

#[test]
fn cochain_literals_alternate_unless_ordered() {
    let mut doc = parse_document(&std::fs::read_to_string(fixture("s1-arcs.json")).unwrap()).unwrap();
    let mut c = doc.cochains[0].clone();
    c.terms.push(CochainTerm {
        string: vec![vec!["1".into()], vec!["2".into()]],
        form: vec![FormTerm { dx: vec![], poly: vec![(Q(integer(1)), vec![0])] }],
    });
    c.name = "edge".into();
    let mut o = c.clone();
    o.name = "edge-ordered".into();
    o.ordered = true;
    doc.cochains.extend([c, o]);
    let loaded = resolve(&doc).unwrap();
    let v = loaded.atlases[0].vertices();
    let w = |a: &str, b: &str| IndexString::new(vec![v.subset(&[a]).unwrap(), v.subset(&[b]).unwrap()]).unwrap();
    let alt = &loaded.cochain("edge").unwrap().value;
    assert_eq!(alt.get(&w("2", "1")).as_constant(), Some(integer(-1)));
    let ord = &loaded.cochain("edge-ordered").unwrap().value;
    assert!(ord.get(&w("2", "1")).is_zero());
    assert!(ord.to_alternating().is_none());
}

#[test]
fn dx_lists_in_any_order_carry_the_sign() {
    let text = TINY.replace(r#""dim": 1"#, r#""dim": 2"#).replace(
        "\n  ]\n}",
        r#"
  ],
  "cochains": [
    {"name": "a", "atlas": "point", "terms": [{"string": [["p"]], "form": [{"dx": [1, 0], "poly": [["1", [0, 0]]]}]}]},
    {"name": "b", "atlas": "point", "terms": [{"string": [["p"]], "form": [{"dx": [0, 1], "poly": [["-1", [0, 0]]]}]}]}
  ]
}"#,
    );
    let d = load_str(&text).unwrap();
    assert_eq!(d.cochain("a").unwrap().value, d.cochain("b").unwrap().value);
}
