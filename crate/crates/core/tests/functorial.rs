use std::collections::BTreeMap;
use std::sync::Arc;

use orbispark_core::atlas::GoodAtlas;
use orbispark_core::cochain::random::CochainSampler;
use orbispark_core::cochain::{
    combination, first_difference, free_support, total_d_expr, view, Cochain, CochainExpr, Domain, Expr, OrderedCochain,
};
use orbispark_core::fixtures;
use orbispark_core::functorial::*;
use orbispark_core::indexcomb::IndexString;
use orbispark_core::morphisms::{hcompose_nat, vcompose_nat, NaturalTransformation};
use orbispark_core::polyform::{PolyForm, Polynomial, Rational};

fn word(atlas: &GoodAtlas, entries: &[&[&str]]) -> IndexString {
    IndexString::new(entries.iter().map(|m| atlas.vertices().subset(m).unwrap()).collect()).unwrap()
}

fn words(atlas: &GoodAtlas, max_len: usize) -> Vec<IndexString> {
    (1..=max_len).flat_map(|l| free_support(atlas, Domain::Subsets, l, usize::MAX)).collect()
}

fn lin<'a>(terms: Vec<(i64, Expr<'a>)>) -> Expr<'a> {
    combination(terms.into_iter().map(|(c, e)| (Rational::from_integer(c.into()), e)).collect()).unwrap()
}

fn assert_same(a: &dyn CochainExpr, b: &dyn CochainExpr, ws: &[IndexString]) {
    if let Some(w) = first_difference(a, b, ws).unwrap() {
        panic!("differ at {}", a.atlas().vertices().format_string(&w));
    }
}

#[test]
fn phi_reads_the_chosen_vertices() {
    let a = Arc::new(fixtures::s1_arcs());
    let x = PolyForm::function(Polynomial::var(1, 0));
    let mut w = Cochain::zero(a.clone(), Domain::Vertices);
    w.insert(&word(&a, &[&["1"], &["2"]]), x.clone()).unwrap();
    let (lo, hi) = (ChoiceMap::min_vertex(&a), ChoiceMap::max_vertex(&a));
    let e = phi_extend(&lo, view(&w)).unwrap();
    assert_eq!(e.value(&word(&a, &[&["1"], &["2"]])).unwrap(), x);
    assert_eq!(e.value(&word(&a, &[&["1", "2"], &["2"]])).unwrap(), x);
    let e = phi_extend(&hi, view(&w)).unwrap();
    assert!(e.value(&word(&a, &[&["1", "2"], &["2"]])).unwrap().is_zero());
    assert_eq!(e.value(&word(&a, &[&["1"], &["1", "2"]])).unwrap(), x);
}

#[test]
fn phi_needs_the_small_complex() {
    let a = Arc::new(fixtures::s1_arcs());
    let lo = ChoiceMap::min_vertex(&a);
    let big = Cochain::zero(a.clone(), Domain::Subsets);
    assert!(phi_extend(&lo, view(&big)).is_err());
}

#[test]
fn choice_maps_must_pick_members() {
    let a = fixtures::s1_arcs();
    let mut m: BTreeMap<_, _> = ChoiceMap::min_vertex(&a).entries().collect();
    let i2 = a.vertices().subset(&["2"]).unwrap();
    m.insert(i2, 0);
    assert!(ChoiceMap::new(&a, m).is_err());
}

#[test]
fn small_complex_generators_on_the_circle() {
    let a = Arc::new(fixtures::s1_arcs());
    let small = small_complex_build(a.clone());
    assert_eq!(small.generators(0), 3);
    assert_eq!(small.generators(1), 3);
    assert_eq!(small.generators(2), 0);
    assert_eq!(SparkTriple::big(a).generators(0), 6);
}

#[test]
fn alpha_for_the_flip() {
    let m = fixtures::mirror_morphisms();
    let ws = words(&m.atlas, 3);
    let mut s = CochainSampler::new(4, 3);
    let mut nonzero = false;
    for _ in 0..6 {
        let w = s.ordered_cochain(&m.atlas, Domain::Subsets, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)], 64);
        let lhs = lin(vec![
            (1, total_d_expr(homotopy_alpha(&m.flip, view(&w)).unwrap())),
            (1, homotopy_alpha(&m.flip, total_d_expr(view(&w))).unwrap()),
        ]);
        let rhs =
            lin(vec![(1, pullback_system(&m.tw, view(&w)).unwrap()), (-1, pullback_system(&m.id, view(&w)).unwrap())]);
        assert_same(&*lhs, &*rhs, &ws);
        let h = homotopy_alpha(&m.flip, view(&w)).unwrap();
        nonzero |= ws.iter().any(|x| !h.value(x).unwrap().is_zero());
    }
    assert!(nonzero);
}

#[test]
fn alpha_vanishes_for_identity_on_alternating_data() {
    let c = fixtures::chain();
    let id = NaturalTransformation::identity(c.f1.clone());
    let mut s = CochainSampler::new(8, 2);
    let w = s.cochain(&c.v, Domain::Subsets, &[(0, 0), (1, 0), (1, 1)]);
    let h = homotopy_alpha(&id, view(&w)).unwrap();
    assert!(words(&c.u, 2).iter().all(|x| h.value(x).unwrap().is_zero()));
}

#[test]
fn gamma_with_identity_second_factor() {
    let m = fixtures::mirror_morphisms();
    let id = Arc::new(NaturalTransformation::identity(m.tw.clone()));
    let composite = vcompose_nat(&id, &m.flip).unwrap();
    let ws = words(&m.atlas, 2);
    let mut s = CochainSampler::new(6, 2);
    for _ in 0..4 {
        let w = s.ordered_cochain(&m.atlas, Domain::Subsets, &[(0, 0), (1, 0), (1, 1), (2, 0), (3, 0)], 64);
        let lhs = lin(vec![
            (1, total_d_expr(homotopy_gamma(&id, &m.flip, view(&w)).unwrap())),
            (-1, homotopy_gamma(&id, &m.flip, total_d_expr(view(&w))).unwrap()),
        ]);
        let rhs = lin(vec![
            (1, homotopy_alpha(&composite, view(&w)).unwrap()),
            (-1, homotopy_alpha(&id, view(&w)).unwrap()),
            (-1, homotopy_alpha(&m.flip, view(&w)).unwrap()),
        ]);
        assert_same(&*lhs, &*rhs, &ws);
    }
}

#[test]
fn gamma_for_two_flips() {
    let m = fixtures::mirror_morphisms();
    let composite = vcompose_nat(&m.unflip, &m.flip).unwrap();
    let ws = words(&m.atlas, 2);
    let mut s = CochainSampler::new(12, 2);
    for _ in 0..4 {
        let w = s.ordered_cochain(&m.atlas, Domain::Subsets, &[(0, 0), (1, 0), (1, 1), (2, 0), (3, 0)], 64);
        let lhs = lin(vec![
            (1, total_d_expr(homotopy_gamma(&m.unflip, &m.flip, view(&w)).unwrap())),
            (-1, homotopy_gamma(&m.unflip, &m.flip, total_d_expr(view(&w))).unwrap()),
        ]);
        let rhs = lin(vec![
            (1, homotopy_alpha(&composite, view(&w)).unwrap()),
            (-1, homotopy_alpha(&m.unflip, view(&w)).unwrap()),
            (-1, homotopy_alpha(&m.flip, view(&w)).unwrap()),
        ]);
        assert_same(&*lhs, &*rhs, &ws);
    }
}

#[test]
fn gamma_rejects_non_composable_pairs() {
    let m = fixtures::mirror_morphisms();
    let w = OrderedCochain::zero(m.atlas.clone(), Domain::Subsets);
    assert!(homotopy_gamma(&m.flip, &m.flip, view(&w)).is_err());
}

fn xi_identity(
    alpha: &NaturalTransformation,
    beta: &NaturalTransformation,
    w_atlas: &Arc<GoodAtlas>,
    u_atlas: &GoodAtlas,
    seed: u64,
) {
    let composite = hcompose_nat(beta, alpha).unwrap();
    let ws = words(u_atlas, 2);
    let mut s = CochainSampler::new(seed, 2);
    for _ in 0..4 {
        let w = s.ordered_cochain(w_atlas, Domain::Subsets, &[(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (3, 0)], 400);
        let lhs = lin(vec![
            (1, total_d_expr(homotopy_xi(alpha, beta, view(&w)).unwrap())),
            (-1, homotopy_xi(alpha, beta, total_d_expr(view(&w))).unwrap()),
        ]);
        let rhs = lin(vec![
            (1, homotopy_alpha(&composite, view(&w)).unwrap()),
            (-1, homotopy_alpha(alpha, pullback_system(beta.source_cs(), view(&w)).unwrap()).unwrap()),
            (-1, pullback_system(alpha.target_cs(), homotopy_alpha(beta, view(&w)).unwrap()).unwrap()),
        ]);
        assert_same(&*lhs, &*rhs, &ws);
    }
}

#[test]
fn xi_with_identity_second_transformation() {
    let c = fixtures::chain();
    let id = NaturalTransformation::identity(c.g1.clone());
    xi_identity(&c.gamma, &id, &c.w, &c.u, 3);
}

#[test]
fn xi_on_the_chain() {
    let c = fixtures::chain();
    xi_identity(&c.gamma, &c.beta, &c.w, &c.u, 5);
    xi_identity(&c.alpha, &c.beta, &c.w, &c.u, 7);
}

#[test]
fn homotopies_preserve_integers() {
    let c = fixtures::chain();
    let mut s = CochainSampler::new(17, 2);
    let r = s.int_cochain(&c.w, Domain::Subsets, 2).to_cochain();
    let h = homotopy_xi(&c.gamma, &c.beta, view(&r)).unwrap();
    for x in words(&c.u, 2) {
        let v = h.value(&x).unwrap();
        assert!(v.is_zero() || v.as_constant().is_some_and(|c| c.is_integer()));
    }
    let g = homotopy_alpha(&c.beta, view(&r)).unwrap();
    for x in words(&c.v, 2) {
        let v = g.value(&x).unwrap();
        assert!(v.is_zero() || v.as_constant().is_some_and(|c| c.is_integer()));
    }
}
