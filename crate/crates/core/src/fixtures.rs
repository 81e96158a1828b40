//! Desk-scale atlases and morphisms used by tests and the bundled files.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::One;

use crate::atlas::GoodAtlas;
use crate::cochain::{Cochain, Domain};
use crate::indexcomb::{IndexString, IndexSubset, VertexSet};
use crate::morphisms::{CompatibleSystem, NaturalTransformation};
use crate::polyform::{
    integer, rational, AffineGroupElement, FiniteGroup, PolyForm, PolyMap, Polynomial, Rational, DEFAULT_ORDER_BOUND,
};

fn translation(t: Rational) -> PolyMap {
    PolyMap::affine(&[vec![Rational::one()]], &[t]).expect("1x1 affine map")
}

fn neg1() -> PolyMap {
    AffineGroupElement::negation(1).to_map()
}

fn z2() -> FiniteGroup {
    FiniteGroup::generate(1, &[AffineGroupElement::negation(1)], DEFAULT_ORDER_BOUND).expect("Z/2")
}

/// Three arcs covering the circle `R/3Z`; the triple intersection is empty.
pub fn s1_arcs() -> GoodAtlas {
    let v = VertexSet::new(["1", "2", "3"]).expect("labels");
    let s = |m: &[&str]| v.subset(m).expect("subset");
    let id = PolyMap::identity(1);
    GoodAtlas::builder("s1-arcs", v.clone(), 1)
        .plain_chart(s(&["1"]))
        .and_then(|b| b.plain_chart(s(&["2"])))
        .and_then(|b| b.plain_chart(s(&["3"])))
        .and_then(|b| b.plain_chart(s(&["1", "2"])))
        .and_then(|b| b.plain_chart(s(&["2", "3"])))
        .and_then(|b| b.plain_chart(s(&["1", "3"])))
        .and_then(|b| b.empty_chart(s(&["1", "2", "3"])))
        .and_then(|b| b.embedding(s(&["1", "2"]), s(&["1"]), id.clone()))
        .and_then(|b| b.embedding(s(&["1", "2"]), s(&["2"]), id.clone()))
        .and_then(|b| b.embedding(s(&["2", "3"]), s(&["2"]), id.clone()))
        .and_then(|b| b.embedding(s(&["2", "3"]), s(&["3"]), id.clone()))
        // The overlap of arcs 1 and 3 uses the coordinate of arc 1 and wraps around.
        .and_then(|b| b.embedding(s(&["1", "3"]), s(&["1"]), id.clone()))
        .and_then(|b| b.embedding(s(&["1", "3"]), s(&["3"]), translation(integer(3))))
        .and_then(|b| b.build())
        .expect("s1-arcs data is well formed")
}

/// `[-1,1]` modulo the reflection, glued to a plain interval on the right.
pub fn mirror_interval() -> GoodAtlas {
    let v = VertexSet::new(["1", "2"]).expect("labels");
    let s = |m: &[&str]| v.subset(m).expect("subset");
    let id = PolyMap::identity(1);
    GoodAtlas::builder("mirror-interval", v.clone(), 1)
        .chart(s(&["1"]), z2(), false, true)
        .and_then(|b| b.plain_chart(s(&["2"])))
        .and_then(|b| b.plain_chart(s(&["1", "2"])))
        .and_then(|b| b.embedding(s(&["1", "2"]), s(&["1"]), id.clone()))
        .and_then(|b| b.embedding(s(&["1", "2"]), s(&["2"]), id.clone()))
        .and_then(|b| b.build())
        .expect("mirror-interval data is well formed")
}

/// A mirror-interval variant whose overlap also carries the reflection but
/// embeds by a shift, which no group element can correct.
pub fn mirror_interval_nonequivariant() -> GoodAtlas {
    let v = VertexSet::new(["1", "2"]).expect("labels");
    let s = |m: &[&str]| v.subset(m).expect("subset");
    GoodAtlas::builder("mirror-interval-nonequivariant", v.clone(), 1)
        .chart(s(&["1"]), z2(), false, true)
        .and_then(|b| b.plain_chart(s(&["2"])))
        .and_then(|b| b.chart(s(&["1", "2"]), z2(), false, true))
        .and_then(|b| b.embedding(s(&["1", "2"]), s(&["1"]), translation(rational(1, 2))))
        .and_then(|b| b.embedding(s(&["1", "2"]), s(&["2"]), PolyMap::identity(1)))
        .and_then(|b| b.build())
        .expect("variant data is well formed")
}

/// The cone `C / Z_4`: one chart, rotation by a quarter turn.
pub fn cone_z4() -> GoodAtlas {
    let v = VertexSet::new(["1"]).expect("labels");
    let rot = AffineGroupElement::new(
        vec![vec![integer(0), integer(-1)], vec![integer(1), integer(0)]],
        vec![integer(0), integer(0)],
    )
    .expect("rotation");
    let g = FiniteGroup::generate(2, &[rot], DEFAULT_ORDER_BOUND).expect("Z/4");
    GoodAtlas::builder("cone-z4", v.clone(), 2)
        .chart(v.full(), g, false, true)
        .and_then(|b| b.build())
        .expect("cone data is well formed")
}

/// Self-systems of the mirror interval.
pub struct MirrorMorphisms {
    pub atlas: Arc<GoodAtlas>,
    pub id: Arc<CompatibleSystem>,
    /// Lifting `-id` on the reflected chart; the overlap arrow is twisted to match.
    pub tw: Arc<CompatibleSystem>,
    /// `id ⇒ tw` with component `-id` on the reflected chart.
    pub flip: Arc<NaturalTransformation>,
    /// `tw ⇒ id`.
    pub unflip: Arc<NaturalTransformation>,
}

pub fn mirror_morphisms() -> MirrorMorphisms {
    let atlas = Arc::new(mirror_interval());
    let v = atlas.vertices().clone();
    let s = |m: &[&str]| v.subset(m).expect("subset");
    let (i1, i2, i12) = (s(&["1"]), s(&["2"]), s(&["1", "2"]));
    let index_map: BTreeMap<IndexSubset, IndexSubset> = [(i1, i1), (i2, i2), (i12, i12)].into_iter().collect();
    let id = Arc::new(CompatibleSystem::identity(atlas.clone()));
    let mut lifts = BTreeMap::new();
    lifts.insert(i1, neg1());
    lifts.insert(i2, PolyMap::identity(1));
    lifts.insert(i12, PolyMap::identity(1));
    let mut arrows = BTreeMap::new();
    arrows.insert((i12, i1), neg1());
    let tw =
        Arc::new(CompatibleSystem::new("tw", atlas.clone(), atlas.clone(), index_map, lifts, arrows).expect("tw data"));
    let flip_components: BTreeMap<_, _> =
        [(i1, neg1()), (i2, PolyMap::identity(1)), (i12, PolyMap::identity(1))].into_iter().collect();
    let flip = Arc::new(
        NaturalTransformation::new("flip", id.clone(), tw.clone(), flip_components.clone()).expect("flip data"),
    );
    let unflip =
        Arc::new(NaturalTransformation::new("unflip", tw.clone(), id.clone(), flip_components).expect("unflip data"));
    MirrorMorphisms { atlas, id, tw, flip, unflip }
}

/// A mirror self-system whose lifting on the overlap is shifted by 1/8.
pub fn mirror_broken_system(atlas: Arc<GoodAtlas>) -> CompatibleSystem {
    let v = atlas.vertices().clone();
    let s = |m: &[&str]| v.subset(m).expect("subset");
    let (i1, i2, i12) = (s(&["1"]), s(&["2"]), s(&["1", "2"]));
    let index_map = [(i1, i1), (i2, i2), (i12, i12)].into_iter().collect();
    let mut lifts = BTreeMap::new();
    lifts.insert(i1, PolyMap::identity(1));
    lifts.insert(i2, PolyMap::identity(1));
    lifts.insert(i12, translation(rational(1, 8)));
    CompatibleSystem::new("broken", atlas.clone(), atlas, index_map, lifts, BTreeMap::new()).expect("broken data")
}

/// Chart coordinates `scale · x + offset · (|I| - 1)` on the real line.
#[derive(Clone)]
struct LineCoords {
    scale: Rational,
    offset: Rational,
}

impl LineCoords {
    fn chart_offset(&self, i: IndexSubset) -> Rational {
        &self.offset * Rational::from_integer((i.len() as i64 - 1).into())
    }

    /// Chart coordinates of `I` in `self` to chart coordinates of `J` in `other`.
    fn transition(&self, i: IndexSubset, j: IndexSubset, other: &LineCoords) -> PolyMap {
        let a = &other.scale / &self.scale;
        let b = other.chart_offset(j) - &a * self.chart_offset(i);
        PolyMap::affine(&[vec![a]], &[b]).expect("1x1 affine map")
    }
}

/// An atlas of one-dimensional charts cut out of the real line.
///
/// Vertex `v` covers an open interval and the chart over `I` is the
/// intersection. Every ordered pair of nonempty charts whose intervals are
/// nested gets an embedding, not only pairs related by inclusion of indices.
pub struct IntervalModel {
    pub atlas: Arc<GoodAtlas>,
    intervals: BTreeMap<IndexSubset, (Rational, Rational)>,
    coords: LineCoords,
}

impl IntervalModel {
    pub fn new(name: &str, vertices: &[(&str, (Rational, Rational))], scale: Rational, offset: Rational) -> Self {
        let coords = LineCoords { scale, offset };
        let v = VertexSet::new(vertices.iter().map(|(l, _)| String::from(*l))).expect("labels");
        let mut intervals = BTreeMap::new();
        for i in v.nonempty_subsets() {
            let lo = i.members().map(|m| vertices[m].1 .0.clone()).max().expect("nonempty");
            let hi = i.members().map(|m| vertices[m].1 .1.clone()).min().expect("nonempty");
            if lo < hi {
                intervals.insert(i, (lo, hi));
            }
        }
        let mut b = GoodAtlas::builder(name, v.clone(), 1);
        for i in v.nonempty_subsets() {
            b = if intervals.contains_key(&i) { b.plain_chart(i) } else { b.empty_chart(i) }.expect("fresh chart");
        }
        for (&i, ii) in &intervals {
            for (&j, jj) in &intervals {
                if i != j && nested(ii, jj) {
                    b = b.embedding(i, j, coords.transition(i, j, &coords)).expect("fresh embedding");
                }
            }
        }
        IntervalModel { atlas: Arc::new(b.build().expect("interval atlas")), intervals, coords }
    }

    /// The system induced by the identity of the line, given vertex images.
    pub fn system(&self, name: &str, target: &IntervalModel, images: &[(&str, &[&str])]) -> CompatibleSystem {
        let (sv, tv) = (self.atlas.vertices(), target.atlas.vertices());
        let mut on_vertices = BTreeMap::new();
        for (from, to) in images {
            on_vertices.insert(sv.subset(&[*from]).expect("source vertex"), tv.subset(to).expect("target vertices"));
        }
        let index_map: BTreeMap<IndexSubset, IndexSubset> = sv
            .nonempty_subsets()
            .into_iter()
            .map(|i| {
                let mut it = i.members().map(|m| on_vertices[&sv.singleton(m)]);
                let first = it.next().expect("nonempty");
                (i, it.fold(first, |acc, x| acc.union(x)))
            })
            .collect();
        let mut liftings = BTreeMap::new();
        for (&i, ii) in &self.intervals {
            let k = index_map[&i];
            let fits = target.intervals.get(&k).is_some_and(|kk| nested(ii, kk));
            assert!(fits, "chart {} does not fit its image", self.atlas.fmt_index(i));
            liftings.insert(i, self.coords.transition(i, k, &target.coords));
        }
        CompatibleSystem::new(name, self.atlas.clone(), target.atlas.clone(), index_map, liftings, BTreeMap::new())
            .expect("interval system")
    }
}

fn nested(inner: &(Rational, Rational), outer: &(Rational, Rational)) -> bool {
    outer.0 <= inner.0 && inner.1 <= outer.1
}

/// Three interval atlases `U → V → W` with systems and transformations
/// `γ: f0 ⇒ f1`, `α: f1 ⇒ f2` over `U → V` and `β: g1 ⇒ g2` over `V → W`.
pub struct Chain {
    pub u: Arc<GoodAtlas>,
    pub v: Arc<GoodAtlas>,
    pub w: Arc<GoodAtlas>,
    pub f0: Arc<CompatibleSystem>,
    pub f1: Arc<CompatibleSystem>,
    pub f2: Arc<CompatibleSystem>,
    pub g1: Arc<CompatibleSystem>,
    pub g2: Arc<CompatibleSystem>,
    pub gamma: Arc<NaturalTransformation>,
    pub alpha: Arc<NaturalTransformation>,
    pub beta: Arc<NaturalTransformation>,
}

pub fn chain() -> Chain {
    let q = |n, d| rational(n, d);
    let u = IntervalModel::new("chain-u", &[("1", (q(0, 1), q(2, 1))), ("2", (q(1, 1), q(3, 1)))], integer(1), q(1, 2));
    let v = IntervalModel::new(
        "chain-v",
        &[("a1", (q(0, 1), q(2, 1))), ("a2", (q(1, 1), q(3, 1))), ("b", (q(-1, 1), q(4, 1)))],
        integer(2),
        integer(1),
    );
    let w = IntervalModel::new(
        "chain-w",
        &[("c1", (q(-1, 2), q(5, 2))), ("c2", (q(1, 2), q(7, 2))), ("e", (q(-2, 1), q(5, 1)))],
        integer(1),
        q(-1, 3),
    );
    let f0 = Arc::new(u.system("f0", &v, &[("1", &["a1", "b"]), ("2", &["a2", "b"])]));
    let f1 = Arc::new(u.system("f1", &v, &[("1", &["a1"]), ("2", &["a2"])]));
    let f2 = Arc::new(u.system("f2", &v, &[("1", &["b"]), ("2", &["b"])]));
    let g1 = Arc::new(v.system("g1", &w, &[("a1", &["c1"]), ("a2", &["c2"]), ("b", &["e"])]));
    let g2 = Arc::new(v.system("g2", &w, &[("a1", &["e"]), ("a2", &["e"]), ("b", &["e"])]));
    let gamma = Arc::new(NaturalTransformation::new("gamma", f0.clone(), f1.clone(), BTreeMap::new()).expect("gamma"));
    let alpha = Arc::new(NaturalTransformation::new("alpha", f1.clone(), f2.clone(), BTreeMap::new()).expect("alpha"));
    let beta = Arc::new(NaturalTransformation::new("beta", g1.clone(), g2.clone(), BTreeMap::new()).expect("beta"));
    Chain { u: u.atlas, v: v.atlas, w: w.atlas, f0, f1, f2, g1, g2, gamma, alpha, beta }
}

/// All single-atlas fixtures.
pub fn atlases() -> Vec<GoodAtlas> {
    vec![s1_arcs(), mirror_interval(), cone_z4()]
}

/// The degree zero spark `x/3` on every arc of `s1-arcs`: `da = dx/3` and
/// the integer part is the winding cocycle on the wrapping overlap.
pub fn s1_winding_spark(atlas: &Arc<GoodAtlas>) -> Option<Cochain> {
    if atlas.name() != "s1-arcs" {
        return None;
    }
    let x = PolyForm::function(Polynomial::var(1, 0)).scale(&rational(1, 3));
    let mut a = Cochain::zero(atlas.clone(), Domain::Subsets);
    for &i in atlas.nonempty_indices() {
        a.insert(&IndexString::single(i), x.clone()).expect("x/3 is invariant");
    }
    Some(a)
}
