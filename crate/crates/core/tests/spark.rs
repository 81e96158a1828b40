use std::sync::Arc;

use orbispark_core::cochain::random::CochainSampler;
use orbispark_core::cochain::{total_d_expr, view, Cochain, Domain, OrderedCochain};
use orbispark_core::fixtures;
use orbispark_core::indexcomb::IndexString;
use orbispark_core::polyform::{integer, rational, PolyForm, Polynomial, Rational};
use orbispark_core::spark::*;
use orbispark_core::Error;

fn s1() -> Arc<orbispark_core::atlas::GoodAtlas> {
    Arc::new(fixtures::s1_arcs())
}

fn word(atlas: &orbispark_core::atlas::GoodAtlas, entries: &[&[&str]]) -> IndexString {
    IndexString::new(entries.iter().map(|m| atlas.vertices().subset(m).unwrap()).collect()).unwrap()
}

fn vertex_constants(atlas: &Arc<orbispark_core::atlas::GoodAtlas>, values: [Rational; 3]) -> Cochain {
    let mut c = Cochain::zero(atlas.clone(), Domain::Subsets);
    for (v, x) in ["1", "2", "3"].iter().zip(values) {
        c.insert(&word(atlas, &[&[v]]), PolyForm::constant(1, x)).unwrap();
    }
    c
}

fn constant_at(c: &OrderedCochain, w: &IndexString) -> Option<Rational> {
    c.get(w).as_constant()
}

#[test]
fn zero_decomposes_to_zero() {
    let a = s1();
    let (e, r) = spark_decompose(&OrderedCochain::zero(a.clone(), Domain::Subsets), 0).unwrap();
    assert!(e.cochain().is_zero());
    assert!(r.is_zero());
}

#[test]
fn integer_steps_on_the_circle() {
    let a = s1();
    let c = vertex_constants(&a, [integer(0), integer(1), integer(2)]);
    let sp = Spark::from_cochain(&c, 0).unwrap();
    assert!(sp.e().cochain().is_zero());
    let r = sp.r();
    assert_eq!(constant_at(r, &word(&a, &[&["1"], &["2"]])), Some(integer(-1)));
    assert_eq!(constant_at(r, &word(&a, &[&["2"], &["3"]])), Some(integer(-1)));
    assert_eq!(constant_at(r, &word(&a, &[&["1"], &["3"]])), Some(integer(-2)));
    assert_eq!(constant_at(r, &word(&a, &[&["2"], &["1"]])), Some(integer(1)));
}

#[test]
fn fractional_steps_are_not_sparks() {
    let a = s1();
    let c = vertex_constants(&a, [integer(0), rational(1, 3), rational(2, 3)]);
    assert!(matches!(Spark::from_cochain(&c, 0), Err(Error::NotASpark(_))));
}

#[test]
fn mixed_bidegree_part_is_not_a_spark() {
    let a = s1();
    let mut c = Cochain::zero(a.clone(), Domain::Subsets);
    c.insert(&word(&a, &[&["1"]]), PolyForm::function(Polynomial::var(1, 0))).unwrap();
    // δ of x on one arc alone leaves a non-constant (1,0) part.
    assert!(matches!(Spark::from_cochain(&c, 0), Err(Error::NotASpark(_))));
}

#[test]
fn winding_spark() {
    let a = s1();
    let w = fixtures::s1_winding_spark(&a).unwrap();
    let sp = Spark::from_cochain(&w, 0).unwrap();
    let dx3 = PolyForm::dx(1, 0).scale(&rational(1, 3));
    assert_eq!(sp.e().cochain().value(&word(&a, &[&["2"]])), dx3);
    assert_eq!(constant_at(sp.r(), &word(&a, &[&["1"], &["3"]])), Some(integer(-1)));
    assert_eq!(sp.r().get(&word(&a, &[&["1"], &["2"]])), PolyForm::zero(1));
}

#[test]
fn equivalent_to_itself_with_zero_witness() {
    let a = s1();
    let sp = Spark::from_cochain(&fixtures::s1_winding_spark(&a).unwrap(), 0).unwrap();
    match spark_equivalent(sp.a(), sp.a(), 0, &SearchBound::default()).unwrap() {
        Equivalence::Equivalent { b, s } => assert!(b.is_zero() && s.is_zero()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn integer_shift_is_equivalent() {
    let a = s1();
    let w = fixtures::s1_winding_spark(&a).unwrap();
    let shifted = w.add(&vertex_constants(&a, [integer(1), integer(-4), integer(0)])).unwrap();
    let (x, y) = (Spark::from_cochain(&w, 0).unwrap(), Spark::from_cochain(&shifted, 0).unwrap());
    let eq = spark_equivalent(y.a(), x.a(), 0, &SearchBound::default()).unwrap();
    let Equivalence::Equivalent { b, s } = eq else { panic!("{eq:?}") };
    assert!(b.is_zero());
    assert!(check_witness(y.a(), x.a(), &b, &s).unwrap());
}

#[test]
fn fractional_shift_is_not_found() {
    let a = s1();
    let w = fixtures::s1_winding_spark(&a).unwrap();
    let mut half = Cochain::zero(a.clone(), Domain::Subsets);
    for &i in a.nonempty_indices() {
        half.insert(&IndexString::single(i), PolyForm::constant(1, rational(1, 2))).unwrap();
    }
    let shifted = w.add(&half).unwrap();
    let (x, y) = (Spark::from_cochain(&w, 0).unwrap(), Spark::from_cochain(&shifted, 0).unwrap());
    assert!(matches!(spark_equivalent(y.a(), x.a(), 0, &SearchBound::default()).unwrap(), Equivalence::Unknown(_)));
}

#[test]
fn exact_perturbations_are_recovered() {
    for atlas in fixtures::atlases() {
        let atlas = Arc::new(atlas);
        let mut s = CochainSampler::new(5, 2);
        for k in 1..=atlas.dimension() + 1 {
            let sp = sample_spark(&atlas, Domain::Subsets, k, &mut s).unwrap();
            let bidegrees: Vec<_> = (0..k).map(|q| (k - 1 - q, q)).filter(|&(_, q)| q <= atlas.dimension()).collect();
            let b = s.ordered_cochain(&atlas, Domain::Subsets, &bidegrees, 6);
            let db = OrderedCochain::tabulate(&*total_d_expr(view(&b)), k + 1).unwrap();
            let moved = sp.a().add(&db).unwrap();
            let eq = spark_equivalent(&moved, sp.a(), k, &SearchBound::default()).unwrap();
            let Equivalence::Equivalent { b: b2, s: s2 } = eq else { panic!("{}: {eq:?}", atlas.name()) };
            assert!(check_witness(&moved, sp.a(), &b2, &s2).unwrap());
        }
    }
}

#[test]
fn product_with_zero_is_zero() {
    let a = s1();
    let x = SparkCharacter::new(Spark::from_cochain(&fixtures::s1_winding_spark(&a).unwrap(), 0).unwrap());
    let zero = SparkCharacter::new(Spark::zero(a.clone(), Domain::Subsets, 0));
    let p = character_mul(&x, &zero, &SearchBound::default()).unwrap();
    assert!(p.agreement.is_equivalent());
    let z1 = SparkCharacter::new(Spark::zero(a, Domain::Subsets, 1));
    assert!(p.product.equivalent(&z1, &SearchBound::default()).unwrap().is_equivalent());
}

#[test]
fn products_of_step_sparks() {
    let a = s1();
    let bound = SearchBound::default();
    let w = SparkCharacter::new(Spark::from_cochain(&fixtures::s1_winding_spark(&a).unwrap(), 0).unwrap());
    let step = SparkCharacter::new(
        Spark::from_cochain(&vertex_constants(&a, [integer(0), integer(1), integer(2)]), 0).unwrap(),
    );
    for (x, y) in [(&w, &w), (&w, &step), (&step, &w), (&step, &step)] {
        let p = character_mul(x, y, &bound).unwrap();
        assert!(p.agreement.is_equivalent(), "{:?}", p.agreement);
        let q = character_mul(y, x, &bound).unwrap();
        // (-1)^{(0+1)(0+1)} = -1
        let flipped = q.product.spark.a().scale(&integer(-1));
        assert!(spark_equivalent(p.product.spark.a(), &flipped, 1, &bound).unwrap().is_equivalent());
    }
}

#[test]
fn identity_hom_is_identity() {
    let a = s1();
    let x = SparkCharacter::new(Spark::from_cochain(&fixtures::s1_winding_spark(&a).unwrap(), 0).unwrap());
    assert_eq!(apply_spark_hom(&SparkHom::Identity, &x).unwrap(), x);
}

#[test]
fn pullback_hom_maps_the_decomposition() {
    let m = fixtures::mirror_morphisms();
    let mut s = CochainSampler::new(9, 2);
    for k in 0..2 {
        let x = SparkCharacter::new(sample_spark(&m.atlas, Domain::Subsets, k, &mut s).unwrap());
        let h = SparkHom::Pullback(m.tw.clone());
        let y = apply_spark_hom(&h, &x).unwrap();
        let e = OrderedCochain::tabulate(&*h.apply(view(x.spark.e().cochain())).unwrap(), 1).unwrap();
        assert_eq!(OrderedCochain::from_cochain(y.spark.e().cochain(), 1), e);
        let r = OrderedCochain::tabulate(&*h.apply(view(x.spark.r())).unwrap(), k + 2).unwrap();
        assert_eq!(y.spark.r(), &r);

        let bidegrees: Vec<_> = if k == 0 { vec![] } else { vec![(0, 0)] };
        let b = s.ordered_cochain(&m.atlas, Domain::Subsets, &bidegrees, 4);
        let sc = OrderedCochain::from_cochain(&s.int_cochain(&m.atlas, Domain::Subsets, k).to_cochain(), k + 1);
        assert!(respects_equivalence(&h, &b, &sc, k).unwrap());
    }
}

#[test]
fn homotopic_maps_give_equivalent_characters() {
    let m = fixtures::mirror_morphisms();
    let mut s = CochainSampler::new(13, 2);
    for i in 0..10 {
        let x = SparkCharacter::new(sample_spark(&m.atlas, Domain::Subsets, i % 2, &mut s).unwrap());
        let pair = transport_along(&m.flip, &x).unwrap();
        assert!(pair.verified);
        assert!(check_witness(pair.second.spark.a(), pair.first.spark.a(), &pair.b, &pair.s).unwrap());
    }
}

fn homotopy_defect(
    h: &SparkHomotopy,
    atlas: &Arc<orbispark_core::atlas::GoodAtlas>,
    w: &OrderedCochain,
    words: &[IndexString],
) -> Vec<PolyForm> {
    let a = h.apply(total_d_expr(view(w))).unwrap();
    let b = total_d_expr(h.apply(view(w)).unwrap());
    let _ = atlas;
    words.iter().map(|s| a.value(s).unwrap()).chain(words.iter().map(|s| b.value(s).unwrap())).collect()
}

#[test]
fn zero_homotopies_compose_trivially() {
    let m = fixtures::mirror_morphisms();
    let zero = SparkHomotopy::Zero(m.atlas.clone(), Domain::Subsets);
    let phi = Homotopic {
        from: SparkHom::Pullback(m.id.clone()),
        to: SparkHom::Pullback(m.id.clone()),
        homotopy: zero.clone(),
    };
    let psi = Homotopic {
        from: SparkHom::Pullback(m.id.clone()),
        to: SparkHom::Pullback(m.tw.clone()),
        homotopy: SparkHomotopy::Alpha(m.flip.clone()),
    };
    let v = compose_vertical(&phi, &psi);
    let mut s = CochainSampler::new(2, 2);
    let w = s.ordered_cochain(&m.atlas, Domain::Subsets, &[(0, 0), (1, 0), (0, 1)], 6);
    let words: Vec<IndexString> = orbispark_core::cochain::free_support(&m.atlas, Domain::Subsets, 2, usize::MAX);
    assert_eq!(
        homotopy_defect(&v.homotopy, &m.atlas, &w, &words),
        homotopy_defect(&psi.homotopy, &m.atlas, &w, &words)
    );

    let h = compose_horizontal(&phi, &phi);
    let out = h.representative.homotopy.apply(view(&w)).unwrap();
    assert!(words.iter().all(|s| out.value(s).unwrap().is_zero()));
}

#[test]
fn horizontal_witness_sign_is_forced() {
    // With gamma the interleaved words of Ψ∘Φ do not cancel, so only one sign works.
    let c = fixtures::chain();
    let phi = Homotopic {
        from: SparkHom::Pullback(c.g1.clone()),
        to: SparkHom::Pullback(c.g2.clone()),
        homotopy: SparkHomotopy::Alpha(c.beta.clone()),
    };
    let psi = Homotopic {
        from: SparkHom::Pullback(c.f0.clone()),
        to: SparkHom::Pullback(c.f1.clone()),
        homotopy: SparkHomotopy::Alpha(c.gamma.clone()),
    };
    let h = compose_horizontal(&phi, &psi);
    let mut s = CochainSampler::new(21, 2);
    let words: Vec<IndexString> =
        (1..=2).flat_map(|l| orbispark_core::cochain::free_support(&c.u, Domain::Subsets, l, usize::MAX)).collect();
    let mut saw_nonzero = false;
    for _ in 0..4 {
        let w = s.ordered_cochain(&c.w, Domain::Subsets, &[(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)], 10_000);
        let gamma = &h.witness;
        let lhs: Vec<PolyForm> = {
            let dg = total_d_expr(gamma.apply(view(&w)).unwrap());
            let gd = gamma.apply(total_d_expr(view(&w))).unwrap();
            words
                .iter()
                .map(|x| {
                    let mut v = dg.value(x).unwrap();
                    v.add_scaled(&gd.value(x).unwrap(), &integer(-1));
                    v
                })
                .collect()
        };
        let alt = h.alternate.homotopy.apply(view(&w)).unwrap();
        let rep = h.representative.homotopy.apply(view(&w)).unwrap();
        let rhs: Vec<PolyForm> = words
            .iter()
            .map(|x| {
                let mut v = alt.value(x).unwrap();
                v.add_scaled(&rep.value(x).unwrap(), &integer(-1));
                v
            })
            .collect();
        assert_eq!(lhs, rhs);
        if rhs.iter().any(|v| !v.is_zero()) {
            saw_nonzero = true;
            let flipped: Vec<PolyForm> = lhs.iter().map(|v| v.scale(&integer(-1))).collect();
            assert_ne!(flipped, rhs, "the opposite sign would also pass");
        }
    }
    assert!(saw_nonzero, "probes never separate the two representatives");
    assert_eq!(HORIZONTAL_WITNESS_SIGN, -1);
}
