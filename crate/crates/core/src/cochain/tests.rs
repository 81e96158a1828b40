use super::random::CochainSampler;
use super::*;
use crate::fixtures;
use crate::indexcomb::IndexSubset;
use crate::polyform::{integer, rational, Polynomial};

use proptest::prelude::*;

fn s1() -> Arc<GoodAtlas> {
    Arc::new(fixtures::s1_arcs())
}

fn subset(atlas: &GoodAtlas, m: &[&str]) -> IndexSubset {
    atlas.vertices().subset(m).unwrap()
}

fn word(atlas: &GoodAtlas, entries: &[&[&str]]) -> IndexString {
    IndexString::new(entries.iter().map(|m| subset(atlas, m)).collect()).unwrap()
}

fn constants(atlas: &Arc<GoodAtlas>, values: &[(&str, Rational)]) -> Cochain {
    let mut c = Cochain::zero(atlas.clone(), Domain::Subsets);
    for (v, x) in values {
        c.insert(&word(atlas, &[&[v]]), PolyForm::constant(1, x.clone())).unwrap();
    }
    c
}

#[test]
fn permuted_strings_carry_the_sign() {
    let a = s1();
    let x = PolyForm::function(Polynomial::var(1, 0));
    let mut c = Cochain::zero(a.clone(), Domain::Subsets);
    c.insert(&word(&a, &[&["2"], &["1"]]), x.clone()).unwrap();
    assert_eq!(c.value(&word(&a, &[&["1"], &["2"]])), x.scale(&integer(-1)));
    assert_eq!(c.value(&word(&a, &[&["2"], &["1"]])), x);
    assert!(c.value(&word(&a, &[&["1"], &["1"]])).is_zero());
}

#[test]
fn rejects_data_on_empty_charts_and_non_invariant_forms() {
    let a = s1();
    let mut c = Cochain::zero(a.clone(), Domain::Subsets);
    let one = PolyForm::constant(1, integer(1));
    assert!(c.insert(&word(&a, &[&["1"], &["2"], &["3"]]), one.clone()).is_err());

    let m = Arc::new(fixtures::mirror_interval());
    let mut c = Cochain::zero(m.clone(), Domain::Subsets);
    let x = PolyForm::function(Polynomial::var(1, 0));
    assert!(c.insert(&word(&m, &[&["1"]]), x.clone()).is_err());
    assert!(c.insert(&word(&m, &[&["2"]]), x).is_ok());
}

#[test]
fn delta_of_vertex_constants() {
    let a = s1();
    let c = constants(&a, &[("1", integer(0)), ("2", integer(1)), ("3", integer(2))]);
    let d = cech_delta(&c);
    // (δc)(I0, I1) = c(I1) - c(I0) restricted to the union.
    assert_eq!(d.value(&word(&a, &[&["1"], &["2"]])).as_constant(), Some(integer(1)));
    assert_eq!(d.value(&word(&a, &[&["2"], &["3"]])).as_constant(), Some(integer(1)));
    assert_eq!(d.value(&word(&a, &[&["1"], &["3"]])).as_constant(), Some(integer(2)));
    assert_eq!(d.value(&word(&a, &[&["3"], &["1"]])).as_constant(), Some(integer(-2)));
    assert!(cech_delta(&d).is_zero());
}

#[test]
fn delta_uses_the_stored_embedding() {
    let a = s1();
    let x = PolyForm::function(Polynomial::var(1, 0));
    let mut c = Cochain::zero(a.clone(), Domain::Subsets);
    c.insert(&word(&a, &[&["3"]]), x.clone()).unwrap();
    // The 13 overlap sits in the coordinate of arc 1 and maps into arc 3 by x + 3.
    let v = cech_delta(&c).value(&word(&a, &[&["1"], &["3"]]));
    let expect = PolyForm::function(&Polynomial::var(1, 0) + &Polynomial::constant(1, integer(3)));
    assert_eq!(v, expect);
}

#[test]
fn exterior_d_and_total_d_signs() {
    let a = s1();
    let x2 = PolyForm::function(Polynomial::var(1, 0).mul_poly(&Polynomial::var(1, 0)));
    let mut c = Cochain::zero(a.clone(), Domain::Subsets);
    c.insert(&word(&a, &[&["1"], &["2"]]), x2).unwrap();
    let dx2 = PolyForm::dx(1, 0).mul_function(&Polynomial::var(1, 0)).scale(&integer(2));
    let w = word(&a, &[&["1"], &["2"]]);
    assert_eq!(exterior_d(&c).value(&w), dx2);
    // Čech degree one picks up the sign (-1)^p in the total differential.
    assert_eq!(total_d(&c).value(&w), dx2.scale(&integer(-1)));
}

#[test]
fn cup_of_degree_zero_constants_multiplies() {
    let a = s1();
    let c = constants(&a, &[("1", integer(2)), ("2", integer(3)), ("3", rational(1, 2))]);
    let p = cup(&c, &c).unwrap();
    assert_eq!(p.value(&word(&a, &[&["2"]])).as_constant(), Some(integer(9)));
    assert_eq!(p.value(&word(&a, &[&["3"]])).as_constant(), Some(rational(1, 4)));
}

#[test]
fn cup_of_vertex_and_edge_restricts_to_the_union() {
    let a = s1();
    let c = constants(&a, &[("1", integer(5))]);
    let mut e = Cochain::zero(a.clone(), Domain::Subsets);
    e.insert(&word(&a, &[&["1"], &["2"]]), PolyForm::constant(1, integer(7))).unwrap();
    let lazy = cup_expr(stored(&c), stored(&e)).unwrap();
    let v = lazy.value(&word(&a, &[&["1"], &["2"]])).unwrap();
    assert_eq!(v.as_constant(), Some(integer(35)));
    let v = lazy.value(&word(&a, &[&["2"], &["1"]])).unwrap();
    assert!(v.is_zero(), "cup is not alternating: c(2) = 0 on the reversed word");
}

#[test]
fn lazy_and_stored_operators_agree() {
    let a = Arc::new(fixtures::cone_z4());
    let mut s = CochainSampler::new(7, 2);
    for _ in 0..4 {
        let c = s.cochain(&a, Domain::Subsets, &[(0, 0), (0, 1), (1, 2), (1, 0)]);
        assert_eq!(materialize(&*total_d_expr(stored(&c))).unwrap(), total_d(&c));
        assert_eq!(materialize(&*delta_expr(stored(&c))).unwrap(), cech_delta(&c));
        assert_eq!(materialize(&*ext_d_expr(stored(&c))).unwrap(), exterior_d(&c));
    }
}

#[test]
fn ordered_cochains_round_trip_alternating_data() {
    let a = s1();
    let mut s = CochainSampler::new(3, 2);
    let c = s.cochain(&a, Domain::Subsets, &[(0, 1), (1, 0)]);
    let o = OrderedCochain::from_cochain(&c, 2);
    assert_eq!(o.to_alternating(), Some(c));
    let mut bent = OrderedCochain::zero(a.clone(), Domain::Subsets);
    bent.insert(&word(&a, &[&["2"], &["1"]]), PolyForm::constant(1, integer(1))).unwrap();
    assert!(bent.to_alternating().is_none());
}

#[test]
fn small_complex_rejects_non_singleton_entries() {
    let a = s1();
    let mut c = Cochain::zero(a.clone(), Domain::Vertices);
    assert!(c.insert(&word(&a, &[&["1", "2"]]), PolyForm::constant(1, integer(1))).is_err());
    assert!(c.insert(&word(&a, &[&["1"], &["2"]]), PolyForm::constant(1, integer(1))).is_ok());
}

#[test]
fn lift_pullback_holds_for_mirror_and_fails_for_broken_system() {
    let m = fixtures::mirror_morphisms();
    let a = m.atlas.clone();
    let (i12, i1, i2) = (subset(&a, &["1", "2"]), subset(&a, &["1"]), subset(&a, &["2"]));
    let mut s = CochainSampler::new(11, 2);
    for _ in 0..4 {
        let w = s.cochain(&a, Domain::Subsets, &[(0, 0), (0, 1)]);
        for j in [i1, i2] {
            assert!(lift_pullback_check(&m.tw, &w, i12, j).unwrap());
            assert!(lift_pullback_check(&m.id, &w, i12, j).unwrap());
        }
    }
    let broken = fixtures::mirror_broken_system(a.clone());
    let mut w = Cochain::zero(a.clone(), Domain::Subsets);
    w.insert(&word(&a, &[&["2"]]), PolyForm::function(Polynomial::var(1, 0))).unwrap();
    assert!(!lift_pullback_check(&broken, &w, i12, i2).unwrap());
}

fn any_seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn total_differential_squares_to_zero(seed in any_seed()) {
        let a = Arc::new(fixtures::mirror_interval());
        let mut s = CochainSampler::new(seed, 3);
        let c = s.cochain(&a, Domain::Subsets, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        prop_assert!(total_d(&total_d(&c)).is_zero());
        prop_assert!(cech_delta(&cech_delta(&c)).is_zero());
        prop_assert_eq!(cech_delta(&exterior_d(&c)), exterior_d(&cech_delta(&c)));
    }

    #[test]
    fn values_alternate_under_transpositions(seed in any_seed()) {
        let a = s1();
        let mut s = CochainSampler::new(seed, 2);
        let c = s.cochain(&a, Domain::Subsets, &[(1, 0), (1, 1), (2, 0)]);
        for w in free_support(&a, Domain::Subsets, 2, usize::MAX) {
            prop_assert!(alternates_at(&c, &w).unwrap());
        }
    }

    #[test]
    fn ordered_arithmetic_matches_lazy_combination(seed in any_seed()) {
        let a = s1();
        let mut s = CochainSampler::new(seed, 2);
        let x = s.ordered_cochain(&a, Domain::Subsets, &[(0, 1), (1, 0)], 8);
        let y = s.ordered_cochain(&a, Domain::Subsets, &[(0, 1), (1, 0)], 8);
        let sum = x.add_scaled(&y, &rational(-2, 3)).unwrap();
        let lazy = combination(vec![(integer(1), view(&x)), (rational(-2, 3), view(&y))]).unwrap();
        prop_assert_eq!(OrderedCochain::tabulate(&*lazy, 2).unwrap(), sum);
    }
}
