//! Compatible systems between good atlases and their natural transformations.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::atlas::{resolve_in, GoodAtlas};
use crate::indexcomb::IndexSubset;
use crate::polyform::PolyMap;
use crate::report::{Check, Status, ValidationReport};
use crate::{Error, Result};

/// A functor on index categories together with local liftings `f̃_I`.
#[derive(Clone, Debug)]
pub struct CompatibleSystem {
    name: String,
    source: Arc<GoodAtlas>,
    target: Arc<GoodAtlas>,
    index_map: BTreeMap<IndexSubset, IndexSubset>,
    liftings: BTreeMap<IndexSubset, PolyMap>,
    /// Images `f̃λ_IJ` of the stored source embeddings.
    arrows: BTreeMap<(IndexSubset, IndexSubset), PolyMap>,
}

fn same_atlas(a: &Arc<GoodAtlas>, b: &Arc<GoodAtlas>) -> bool {
    Arc::ptr_eq(a, b) || a.name() == b.name()
}

impl CompatibleSystem {
    /// Index images missing for non-singletons default to the union of the
    /// singleton images; arrows missing default to the stored target embedding.
    pub fn new(
        name: &str,
        source: Arc<GoodAtlas>,
        target: Arc<GoodAtlas>,
        mut index_map: BTreeMap<IndexSubset, IndexSubset>,
        liftings: BTreeMap<IndexSubset, PolyMap>,
        mut arrows: BTreeMap<(IndexSubset, IndexSubset), PolyMap>,
    ) -> Result<Self> {
        let tfull = target.vertices().full();
        for (&i, &k) in &index_map {
            if !i.is_subset(source.vertices().full()) || !k.is_subset(tfull) {
                return Err(Error::Malformed(alloc::format!("index map of `{name}` leaves the vertex sets")));
            }
        }
        for i in source.vertices().nonempty_subsets() {
            if index_map.contains_key(&i) {
                continue;
            }
            let parts: Option<Vec<IndexSubset>> =
                i.members().map(|v| index_map.get(&source.vertices().singleton(v)).copied()).collect();
            if let Some(parts) = parts {
                let u = parts.iter().fold(parts[0], |acc, x| acc.union(*x));
                index_map.insert(i, u);
            }
        }
        for (&i, m) in &liftings {
            if m.source_dim() != source.dimension() || m.target_dim() != target.dimension() {
                return Err(Error::DimensionMismatch { expected: target.dimension(), found: m.target_dim() });
            }
            if !index_map.contains_key(&i) {
                return Err(Error::OutsideDomain(source.fmt_index(i)));
            }
        }
        for e in source.embeddings() {
            if arrows.contains_key(&(e.source, e.target)) {
                continue;
            }
            if let (Some(&fi), Some(&fj)) = (index_map.get(&e.source), index_map.get(&e.target)) {
                if let Ok(t) = target.induced_embedding(fi, fj) {
                    arrows.insert((e.source, e.target), t.map.clone());
                }
            }
        }
        Ok(CompatibleSystem { name: name.to_string(), source, target, index_map, liftings, arrows })
    }

    /// The identity system on an atlas.
    pub fn identity(atlas: Arc<GoodAtlas>) -> Self {
        let index_map = atlas.vertices().nonempty_subsets().into_iter().map(|i| (i, i)).collect();
        let liftings = atlas.nonempty_indices().iter().map(|&i| (i, PolyMap::identity(atlas.dimension()))).collect();
        let arrows = atlas.embeddings().map(|e| ((e.source, e.target), e.map.clone())).collect();
        CompatibleSystem {
            name: alloc::format!("id[{}]", atlas.name()),
            source: atlas.clone(),
            target: atlas,
            index_map,
            liftings,
            arrows,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Arc<GoodAtlas> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GoodAtlas> {
        &self.target
    }

    pub fn image(&self, i: IndexSubset) -> Result<IndexSubset> {
        self.index_map.get(&i).copied().ok_or_else(|| Error::OutsideDomain(self.source.fmt_index(i)))
    }

    pub fn index_map(&self) -> &BTreeMap<IndexSubset, IndexSubset> {
        &self.index_map
    }

    pub fn lifting(&self, i: IndexSubset) -> Result<&PolyMap> {
        self.liftings.get(&i).ok_or_else(|| Error::OutsideDomain(self.source.fmt_index(i)))
    }

    pub fn liftings(&self) -> impl Iterator<Item = (IndexSubset, &PolyMap)> {
        self.liftings.iter().map(|(&i, m)| (i, m))
    }

    /// `f̃λ_IJ` for a stored source embedding.
    pub fn arrow(&self, i: IndexSubset, j: IndexSubset) -> Result<&PolyMap> {
        self.arrows
            .get(&(i, j))
            .ok_or_else(|| Error::MissingEmbedding(self.source.fmt_index(i), self.source.fmt_index(j)))
    }

    pub fn arrows(&self) -> impl Iterator<Item = ((IndexSubset, IndexSubset), &PolyMap)> {
        self.arrows.iter().map(|(&k, m)| (k, m))
    }

    /// The element `f̃(h)` of the group over `f(J)` with `f̃_J ∘ h = f̃(h) ∘ f̃_J`.
    pub fn map_group_element(&self, j: IndexSubset, h: &PolyMap) -> Result<PolyMap> {
        let fj = self.image(j)?;
        let lift = self.lifting(j)?;
        let group = self.target.group(fj).ok_or_else(|| Error::OutsideDomain(self.target.fmt_index(fj)))?;
        let lh = lift.compose(h)?;
        let found = resolve_in(group, &lh, lift)
            .ok_or_else(|| Error::NoGroupElement(self.source.fmt_index(j), self.target.fmt_index(fj)))?;
        Ok(found.to_map())
    }

    /// Image of an arbitrary embedding `m = h ∘ λ_IJ` of the source atlas.
    pub fn map_arrow(&self, i: IndexSubset, j: IndexSubset, m: &PolyMap) -> Result<PolyMap> {
        let stored = self.source.induced_embedding(i, j)?;
        let group = self.source.group(j).ok_or_else(|| Error::OutsideDomain(self.source.fmt_index(j)))?;
        let h = resolve_in(group, m, &stored.map)
            .ok_or_else(|| Error::NoGroupElement(self.source.fmt_index(i), self.source.fmt_index(j)))?;
        self.map_group_element(j, &h.to_map())?.compose(self.arrow(i, j)?)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_compatible_system(self)
    }
}

fn pair(a: &GoodAtlas, i: IndexSubset, j: IndexSubset) -> String {
    alloc::format!("({}, {})", a.fmt_index(i), a.fmt_index(j))
}

/// Check the clauses of a compatible system.
pub fn validate_compatible_system(cs: &CompatibleSystem) -> ValidationReport {
    let mut r = ValidationReport::default();
    let (src, tgt) = (cs.source(), cs.target());
    let subsets = src.vertices().nonempty_subsets();

    let missing = subsets.iter().find(|i| !cs.index_map.contains_key(i));
    r.push(Check::from_outcome(
        "system.index-map-total",
        "compatible system: functor defined on every index",
        subsets.len(),
        missing.map(|i| alloc::format!("no image for {}", src.fmt_index(*i))),
    ));

    let mut failure = None;
    let mut probes = 0;
    'u: for &i in &subsets {
        for &j in &subsets {
            let (Some(&fi), Some(&fj), Some(&fij)) =
                (cs.index_map.get(&i), cs.index_map.get(&j), cs.index_map.get(&i.union(j)))
            else {
                continue;
            };
            probes += 1;
            if fi.union(fj) != fij {
                failure = Some(alloc::format!(
                    "f({}) ∪ f({}) = {} but f({}) = {}",
                    src.fmt_index(i),
                    src.fmt_index(j),
                    tgt.fmt_index(fi.union(fj)),
                    src.fmt_index(i.union(j)),
                    tgt.fmt_index(fij)
                ));
                break 'u;
            }
        }
    }
    r.push(Check::from_outcome(
        "system.union-preserving",
        "compatible system: index functor preserves finite unions",
        probes,
        failure,
    ));

    let bad = src
        .nonempty_indices()
        .iter()
        .find(|&&i| !cs.liftings.contains_key(&i) || cs.index_map.get(&i).is_none_or(|&fi| tgt.is_empty_chart(fi)));
    r.push(Check::from_outcome(
        "system.liftings-present",
        "compatible system: a lifting into a nonempty chart for every nonempty chart",
        src.nonempty_indices().len(),
        bad.map(|i| alloc::format!("no lifting of {} into a nonempty chart", src.fmt_index(*i))),
    ));

    let mut failure = None;
    let mut probes = 0;
    'e: for (&i, lift) in &cs.liftings {
        let (Some(g), Some(h)) = (src.group(i), cs.index_map.get(&i).and_then(|&fi| tgt.group(fi))) else { continue };
        for m in g.maps() {
            probes += 1;
            let lm = lift.compose(m).expect("dimensions checked");
            if !h.maps().iter().any(|x| x.compose(lift).ok().as_ref() == Some(&lm)) {
                failure = Some(alloc::format!("lifting over {} is not equivariant", src.fmt_index(i)));
                break 'e;
            }
        }
    }
    r.push(Check::from_outcome(
        "system.lifting-equivariant",
        "compatible system: liftings intertwine the chart groups",
        probes,
        failure,
    ));

    let mut failure = None;
    let mut probes = 0;
    for e in src.embeddings() {
        if src.is_empty_chart(e.source) {
            continue;
        }
        probes += 1;
        let (Ok(fi), Ok(fj)) = (cs.image(e.source), cs.image(e.target)) else { continue };
        let ok = match (cs.arrow(e.source, e.target), tgt.induced_embedding(fi, fj), tgt.group(fj)) {
            (Ok(a), Ok(t), Some(g)) => resolve_in(g, a, &t.map).is_some(),
            _ => false,
        };
        if !ok {
            failure = Some(alloc::format!(
                "image of the embedding {} is not an embedding {}",
                pair(src, e.source, e.target),
                pair(tgt, fi, fj)
            ));
            break;
        }
    }
    r.push(Check::from_outcome(
        "system.arrows-are-embeddings",
        "compatible system: embeddings map to embeddings",
        probes,
        failure,
    ));

    let mut failure = None;
    let mut probes = 0;
    for e in src.embeddings() {
        let (Ok(li), Ok(lj), Ok(a)) = (cs.lifting(e.source), cs.lifting(e.target), cs.arrow(e.source, e.target)) else {
            continue;
        };
        probes += 1;
        let left = lj.compose(&e.map).expect("dimensions checked");
        let right = a.compose(li).expect("dimensions checked");
        if left != right {
            failure = Some(alloc::format!("lift-embed fails at {}", pair(src, e.source, e.target)));
            break;
        }
    }
    r.push(Check::from_outcome("system.lift-embed", "compatible system: f̃_J ∘ λ_IJ = (f̃λ_IJ) ∘ f̃_I", probes, failure));

    let mut failure = None;
    let mut probes = 0;
    let arrows: Vec<_> = src.embeddings().filter(|e| e.source != e.target).collect();
    'f: for first in &arrows {
        for second in &arrows {
            if first.target != second.source {
                continue;
            }
            let (i, j, k) = (first.source, first.target, second.target);
            if !src.has_embedding(i, k) {
                continue;
            }
            probes += 1;
            let composite = second.map.compose(&first.map).expect("dimensions checked");
            let expected = cs.map_arrow(i, k, &composite);
            let got = match (cs.arrow(j, k), cs.arrow(i, j)) {
                (Ok(b), Ok(a)) => b.compose(a).ok(),
                _ => None,
            };
            if expected.ok() != got || got.is_none() {
                failure =
                    Some(alloc::format!("arrow map is not functorial on {} then {}", pair(src, i, j), pair(src, j, k)));
                break 'f;
            }
        }
    }
    r.push(Check::from_outcome(
        "system.functorial",
        "compatible system: arrow map respects composition",
        probes,
        failure,
    ));

    r.push(Check::new(
        "system.image-condition",
        "compatible system: liftings cover the underlying map",
        Status::DeclaredOnly,
        0,
        "the underlying continuous map is not modeled",
    ));
    r
}

/// `g̃ ∘ f̃` with liftings `(g̃∘f̃)_I = g̃_{f̃I} ∘ f̃_I`.
pub fn compose_systems(g: &CompatibleSystem, f: &CompatibleSystem) -> Result<CompatibleSystem> {
    if !same_atlas(f.target(), g.source()) {
        return Err(Error::AtlasMismatch(f.target().name().into(), g.source().name().into()));
    }
    let mut index_map = BTreeMap::new();
    for (&i, &fi) in &f.index_map {
        if let Some(&gfi) = g.index_map.get(&fi) {
            index_map.insert(i, gfi);
        }
    }
    let mut liftings = BTreeMap::new();
    for (&i, fl) in &f.liftings {
        let fi = f.image(i)?;
        liftings.insert(i, g.lifting(fi)?.compose(fl)?);
    }
    let mut arrows = BTreeMap::new();
    for (&(i, j), a) in &f.arrows {
        if f.source.is_empty_chart(i) {
            continue;
        }
        let (fi, fj) = (f.image(i)?, f.image(j)?);
        arrows.insert((i, j), g.map_arrow(fi, fj, a)?);
    }
    let name = alloc::format!("{}∘{}", g.name(), f.name());
    CompatibleSystem::new(&name, f.source.clone(), g.target.clone(), index_map, liftings, arrows)
}

/// A family of target embeddings `α_I: Ṽ_{f¹I} → Ṽ_{f²I}`.
#[derive(Clone, Debug)]
pub struct NaturalTransformation {
    name: String,
    source_cs: Arc<CompatibleSystem>,
    target_cs: Arc<CompatibleSystem>,
    components: BTreeMap<IndexSubset, PolyMap>,
}

impl NaturalTransformation {
    /// Missing components default to the stored target embedding `λ_{f¹I, f²I}`.
    pub fn new(
        name: &str,
        source_cs: Arc<CompatibleSystem>,
        target_cs: Arc<CompatibleSystem>,
        mut components: BTreeMap<IndexSubset, PolyMap>,
    ) -> Result<Self> {
        if !same_atlas(source_cs.source(), target_cs.source()) || !same_atlas(source_cs.target(), target_cs.target()) {
            return Err(Error::AtlasMismatch(source_cs.name().into(), target_cs.name().into()));
        }
        let atlas = source_cs.source().clone();
        for &i in atlas.nonempty_indices() {
            if components.contains_key(&i) {
                continue;
            }
            if let (Ok(a), Ok(b)) = (source_cs.image(i), target_cs.image(i)) {
                if let Ok(e) = source_cs.target().induced_embedding(a, b) {
                    components.insert(i, e.map.clone());
                }
            }
        }
        Ok(NaturalTransformation { name: name.to_string(), source_cs, target_cs, components })
    }

    pub fn identity(cs: Arc<CompatibleSystem>) -> Self {
        let components =
            cs.source().nonempty_indices().iter().map(|&i| (i, PolyMap::identity(cs.target().dimension()))).collect();
        NaturalTransformation {
            name: alloc::format!("id[{}]", cs.name()),
            source_cs: cs.clone(),
            target_cs: cs,
            components,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source_cs(&self) -> &Arc<CompatibleSystem> {
        &self.source_cs
    }

    pub fn target_cs(&self) -> &Arc<CompatibleSystem> {
        &self.target_cs
    }

    pub fn component(&self, i: IndexSubset) -> Result<&PolyMap> {
        self.components.get(&i).ok_or_else(|| Error::OutsideDomain(self.source_cs.source().fmt_index(i)))
    }

    pub fn components(&self) -> impl Iterator<Item = (IndexSubset, &PolyMap)> {
        self.components.iter().map(|(&i, m)| (i, m))
    }

    pub fn validate(&self) -> ValidationReport {
        validate_natural_transformation(self)
    }
}

/// Check the clauses of a natural transformation.
pub fn validate_natural_transformation(nt: &NaturalTransformation) -> ValidationReport {
    let mut r = ValidationReport::default();
    let (f1, f2) = (nt.source_cs(), nt.target_cs());
    let (src, tgt) = (f1.source(), f1.target());

    let mut failure = None;
    let mut probes = 0;
    for &i in src.nonempty_indices() {
        probes += 1;
        let ok = match (f1.image(i), f2.image(i), nt.component(i)) {
            (Ok(a), Ok(b), Ok(c)) => match (tgt.induced_embedding(a, b), tgt.group(b)) {
                (Ok(e), Some(g)) => resolve_in(g, c, &e.map).is_some(),
                _ => false,
            },
            _ => false,
        };
        if !ok {
            failure = Some(alloc::format!("component at {} is not an embedding of the target atlas", src.fmt_index(i)));
            break;
        }
    }
    r.push(Check::from_outcome(
        "nat.components-are-embeddings",
        "natural transformation: components are embeddings",
        probes,
        failure,
    ));

    let mut failure = None;
    let mut probes = 0;
    for &i in src.nonempty_indices() {
        let (Ok(l1), Ok(l2), Ok(a)) = (f1.lifting(i), f2.lifting(i), nt.component(i)) else {
            failure = Some(alloc::format!("missing data at {}", src.fmt_index(i)));
            break;
        };
        probes += 1;
        if a.compose(l1).ok().as_ref() != Some(l2) {
            failure = Some(alloc::format!("f̃²_I ≠ α_I ∘ f̃¹_I at {}", src.fmt_index(i)));
            break;
        }
    }
    r.push(Check::from_outcome("nat.lifting", "natural transformation: f̃²_I = α_I ∘ f̃¹_I", probes, failure));

    let mut failure = None;
    let mut probes = 0;
    for e in src.embeddings() {
        if src.is_empty_chart(e.source) {
            continue;
        }
        let parts = (
            nt.component(e.source),
            nt.component(e.target),
            f1.arrow(e.source, e.target),
            f2.arrow(e.source, e.target),
        );
        let (Ok(ai), Ok(aj), Ok(b1), Ok(b2)) = parts else {
            failure =
                Some(alloc::format!("missing data at ({}, {})", src.fmt_index(e.source), src.fmt_index(e.target)));
            break;
        };
        probes += 1;
        if aj.compose(b1).ok() != b2.compose(ai).ok() {
            failure = Some(alloc::format!(
                "naturality square fails at ({}, {})",
                src.fmt_index(e.source),
                src.fmt_index(e.target)
            ));
            break;
        }
    }
    r.push(Check::from_outcome("nat.naturality", "natural transformation: α_J ∘ f̃¹λ = f̃²λ ∘ α_I", probes, failure));
    r
}

/// `(βα)_I = β_I ∘ α_I`.
pub fn vcompose_nat(beta: &NaturalTransformation, alpha: &NaturalTransformation) -> Result<NaturalTransformation> {
    if !Arc::ptr_eq(alpha.target_cs(), beta.source_cs()) && alpha.target_cs().name() != beta.source_cs().name() {
        return Err(Error::Malformed(alloc::format!("`{}` does not end where `{}` starts", alpha.name(), beta.name())));
    }
    let mut components = BTreeMap::new();
    for (&i, a) in &alpha.components {
        components.insert(i, beta.component(i)?.compose(a)?);
    }
    Ok(NaturalTransformation {
        name: alloc::format!("{}·{}", beta.name(), alpha.name()),
        source_cs: alpha.source_cs.clone(),
        target_cs: beta.target_cs.clone(),
        components,
    })
}

/// The two routes around the horizontal-composition square at `I`:
/// `g̃²(α_I) ∘ β_{f̃¹I}` and `β_{f̃²I} ∘ g̃¹(α_I)`.
pub fn hcompose_paths(
    beta: &NaturalTransformation,
    alpha: &NaturalTransformation,
    i: IndexSubset,
) -> Result<(PolyMap, PolyMap)> {
    let (f1, f2) = (alpha.source_cs(), alpha.target_cs());
    let (g1, g2) = (beta.source_cs(), beta.target_cs());
    let (a, b) = (f1.image(i)?, f2.image(i)?);
    let ai = alpha.component(i)?;
    let first = g2.map_arrow(a, b, ai)?.compose(beta.component(a)?)?;
    let second = beta.component(b)?.compose(&g1.map_arrow(a, b, ai)?)?;
    Ok((first, second))
}

/// `β ∘ α: g̃¹f̃¹ ⇒ g̃²f̃²` with components `(g̃²α_I) ∘ β_{f̃¹I}`.
pub fn hcompose_nat(beta: &NaturalTransformation, alpha: &NaturalTransformation) -> Result<NaturalTransformation> {
    if !same_atlas(alpha.source_cs().target(), beta.source_cs().source()) {
        return Err(Error::AtlasMismatch(
            alpha.source_cs().target().name().into(),
            beta.source_cs().source().name().into(),
        ));
    }
    let g1f1 = Arc::new(compose_systems(beta.source_cs(), alpha.source_cs())?);
    let g2f2 = Arc::new(compose_systems(beta.target_cs(), alpha.target_cs())?);
    let mut components = BTreeMap::new();
    for &i in alpha.components.keys() {
        let (first, second) = hcompose_paths(beta, alpha, i)?;
        if first != second {
            return Err(Error::Malformed(alloc::format!(
                "horizontal composite is ambiguous at {}",
                alpha.source_cs().source().fmt_index(i)
            )));
        }
        components.insert(i, first);
    }
    Ok(NaturalTransformation {
        name: alloc::format!("{}∘{}", beta.name(), alpha.name()),
        source_cs: g1f1,
        target_cs: g2f2,
        components,
    })
}
