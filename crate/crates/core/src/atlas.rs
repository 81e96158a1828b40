//! Good atlases: charts over the nonempty index subsets and their embeddings.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::indexcomb::{IndexSubset, VertexSet};
use crate::linalg::rank;
use crate::polyform::{AffineGroupElement, FiniteGroup, PolyForm, PolyMap, Rational};
use crate::report::{Check, Status, ValidationReport};
use crate::{Error, Result};

/// Sample points per chart for the injectivity check of non-affine maps.
pub const INJECTIVITY_SAMPLES: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub index: IndexSubset,
    pub dimension: usize,
    pub group: FiniteGroup,
    pub empty: bool,
    /// Declared metadata; not verified.
    pub contractible: bool,
}

/// An embedding `λ_IJ` from the chart over `source = I` into the chart over `target = J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingArrow {
    pub source: IndexSubset,
    pub target: IndexSubset,
    pub map: PolyMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodAtlas {
    name: String,
    vertices: VertexSet,
    dimension: usize,
    charts: BTreeMap<IndexSubset, Chart>,
    embeddings: BTreeMap<(IndexSubset, IndexSubset), EmbeddingArrow>,
    nonempty: Vec<IndexSubset>,
}

pub struct AtlasBuilder {
    name: String,
    vertices: VertexSet,
    dimension: usize,
    charts: BTreeMap<IndexSubset, Chart>,
    embeddings: BTreeMap<(IndexSubset, IndexSubset), EmbeddingArrow>,
}

impl AtlasBuilder {
    fn check_index(&self, i: IndexSubset) -> Result<()> {
        if !i.is_subset(self.vertices.full()) {
            return Err(Error::Malformed(alloc::format!("dangling index {:#x}", i.bits())));
        }
        Ok(())
    }

    pub fn chart(mut self, index: IndexSubset, group: FiniteGroup, empty: bool, contractible: bool) -> Result<Self> {
        self.check_index(index)?;
        if group.dim() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, found: group.dim() });
        }
        if self.charts.contains_key(&index) {
            return Err(Error::Malformed(alloc::format!("chart {} given twice", self.vertices.format_subset(index))));
        }
        let dimension = self.dimension;
        self.charts.insert(index, Chart { index, dimension, group, empty, contractible });
        Ok(self)
    }

    /// A nonempty chart with trivial group.
    pub fn plain_chart(self, index: IndexSubset) -> Result<Self> {
        let dim = self.dimension;
        self.chart(index, FiniteGroup::trivial(dim), false, true)
    }

    pub fn empty_chart(self, index: IndexSubset) -> Result<Self> {
        let dim = self.dimension;
        self.chart(index, FiniteGroup::trivial(dim), true, true)
    }

    pub fn embedding(mut self, source: IndexSubset, target: IndexSubset, map: PolyMap) -> Result<Self> {
        self.check_index(source)?;
        self.check_index(target)?;
        if map.source_dim() != self.dimension || map.target_dim() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, found: map.source_dim() });
        }
        if source == target && !map.is_identity() {
            return Err(Error::Malformed("the embedding of a chart into itself is the identity".into()));
        }
        if self.embeddings.insert((source, target), EmbeddingArrow { source, target, map }).is_some() {
            return Err(Error::Malformed(alloc::format!(
                "embedding {} -> {} given twice",
                self.vertices.format_subset(source),
                self.vertices.format_subset(target)
            )));
        }
        Ok(self)
    }

    pub fn build(mut self) -> Result<GoodAtlas> {
        let dim = self.dimension;
        for (&i, c) in &self.charts {
            if !c.empty {
                self.embeddings.entry((i, i)).or_insert_with(|| EmbeddingArrow {
                    source: i,
                    target: i,
                    map: PolyMap::identity(dim),
                });
            }
        }
        let mut nonempty: Vec<IndexSubset> = self.charts.values().filter(|c| !c.empty).map(|c| c.index).collect();
        nonempty.sort();
        Ok(GoodAtlas {
            name: self.name,
            vertices: self.vertices,
            dimension: self.dimension,
            charts: self.charts,
            embeddings: self.embeddings,
            nonempty,
        })
    }
}

impl GoodAtlas {
    pub fn builder(name: &str, vertices: VertexSet, dimension: usize) -> AtlasBuilder {
        AtlasBuilder {
            name: name.to_string(),
            vertices,
            dimension,
            charts: BTreeMap::new(),
            embeddings: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn chart(&self, index: IndexSubset) -> Option<&Chart> {
        self.charts.get(&index)
    }

    pub fn charts(&self) -> impl Iterator<Item = &Chart> {
        self.charts.values()
    }

    /// Missing charts count as empty.
    pub fn is_empty_chart(&self, index: IndexSubset) -> bool {
        self.charts.get(&index).is_none_or(|c| c.empty)
    }

    /// Indices of nonempty charts in canonical order.
    pub fn nonempty_indices(&self) -> &[IndexSubset] {
        &self.nonempty
    }

    pub fn group(&self, index: IndexSubset) -> Option<&FiniteGroup> {
        self.charts.get(&index).map(|c| &c.group)
    }

    pub fn embeddings(&self) -> impl Iterator<Item = &EmbeddingArrow> {
        self.embeddings.values()
    }

    pub fn has_embedding(&self, source: IndexSubset, target: IndexSubset) -> bool {
        self.embeddings.contains_key(&(source, target))
    }

    pub fn fmt_index(&self, i: IndexSubset) -> String {
        self.vertices.format_subset(i)
    }

    /// The stored arrow `λ_IJ`; the identity when `I = J`.
    pub fn induced_embedding(&self, source: IndexSubset, target: IndexSubset) -> Result<&EmbeddingArrow> {
        self.embeddings
            .get(&(source, target))
            .ok_or_else(|| Error::MissingEmbedding(self.fmt_index(source), self.fmt_index(target)))
    }

    /// Restrict a form on the chart over `from` to the chart over `to` along the stored embedding.
    pub fn restrict(&self, form: &PolyForm, to: IndexSubset, from: IndexSubset) -> Result<PolyForm> {
        if self.is_empty_chart(to) || form.is_zero() {
            return Ok(PolyForm::zero(self.dimension));
        }
        if to == from {
            return Ok(form.clone());
        }
        self.induced_embedding(to, from)?.map.pullback(form)
    }

    /// The unique `h` in the target group with `λ = h ∘ λ′`.
    pub fn resolve_group_element(
        &self,
        lambda: &EmbeddingArrow,
        lambda2: &EmbeddingArrow,
    ) -> Result<AffineGroupElement> {
        if (lambda.source, lambda.target) != (lambda2.source, lambda2.target) {
            return Err(Error::Malformed("embeddings have different endpoints".into()));
        }
        resolve_in(
            self.group(lambda.target)
                .ok_or_else(|| Error::MissingEmbedding(self.fmt_index(lambda.source), self.fmt_index(lambda.target)))?,
            &lambda.map,
            &lambda2.map,
        )
        .ok_or_else(|| Error::NoGroupElement(self.fmt_index(lambda.source), self.fmt_index(lambda.target)))
    }

    pub fn validate(&self) -> ValidationReport {
        validate_atlas(self)
    }
}

/// The unique `h ∈ group` with `map = h ∘ other`, if there is exactly one.
pub fn resolve_in(group: &FiniteGroup, map: &PolyMap, other: &PolyMap) -> Option<AffineGroupElement> {
    let mut found = None;
    for (g, m) in group.elements().iter().zip(group.maps()) {
        if m.compose(other).ok().as_ref() == Some(map) {
            if found.is_some() {
                return None;
            }
            found = Some(g.clone());
        }
    }
    found
}

/// Whether `map` is injective: exactly for affine maps, on a sample grid otherwise.
pub fn is_injective(map: &PolyMap) -> bool {
    if let Some((a, _)) = map.as_affine() {
        return rank(&a) == map.source_dim();
    }
    let n = map.source_dim();
    let mut per_axis = 1;
    while per_axis_pow(per_axis, n) < INJECTIVITY_SAMPLES {
        per_axis += 1;
    }
    let mut images = alloc::collections::BTreeSet::new();
    let total = per_axis_pow(per_axis, n);
    for k in 0..total {
        let mut rest = k;
        let point: Vec<Rational> = (0..n)
            .map(|_| {
                let c = (rest % per_axis) as i64;
                rest /= per_axis;
                // Symmetric grid on [-1, 1].
                Rational::new((2 * c - per_axis as i64 + 1).into(), (per_axis as i64 + 1).into())
            })
            .collect();
        if !images.insert(map.eval(&point)) {
            return false;
        }
    }
    true
}

fn per_axis_pow(k: usize, n: usize) -> usize {
    (0..n).fold(1usize, |acc, _| acc.saturating_mul(k))
}

fn names(a: &GoodAtlas, i: IndexSubset, j: IndexSubset) -> String {
    alloc::format!("{} -> {}", a.fmt_index(i), a.fmt_index(j))
}

/// Check every combinatorially checkable clause of a good atlas.
pub fn validate_atlas(a: &GoodAtlas) -> ValidationReport {
    let mut report = ValidationReport::default();
    let subsets = a.vertices().nonempty_subsets();

    let missing = subsets.iter().find(|i| a.chart(**i).is_none());
    report.push(Check::from_outcome(
        "atlas.charts-total",
        "good atlas: one chart for every nonempty index subset",
        subsets.len(),
        missing.map(|i| alloc::format!("no chart over {}", a.fmt_index(*i))),
    ));

    let mut failure = None;
    let mut probes = 0;
    'outer: for c in a.charts().filter(|c| c.empty) {
        for &j in &subsets {
            if c.index.is_subset(j) {
                probes += 1;
                if !a.is_empty_chart(j) {
                    failure = Some(alloc::format!("{} is empty but {} is not", a.fmt_index(c.index), a.fmt_index(j)));
                    break 'outer;
                }
            }
        }
    }
    report.push(Check::from_outcome(
        "atlas.empty-monotone",
        "good atlas: empty intersections stay empty under enlarging the index",
        probes,
        failure,
    ));

    let bad = a.charts().find(|c| c.empty && !c.group.is_trivial());
    report.push(Check::from_outcome(
        "atlas.empty-trivial-group",
        "good atlas: an empty chart carries the trivial group",
        a.charts().count(),
        bad.map(|c| alloc::format!("empty chart {} has a nontrivial group", a.fmt_index(c.index))),
    ));

    // Distinct affine maps differ on any open set, so a generated group acts effectively.
    let elements: usize = a.charts().map(|c| c.group.order()).sum();
    report.push(Check::new(
        "atlas.groups-effective",
        "chart: finite group acting effectively",
        Status::Pass,
        elements,
        alloc::format!("{elements} distinct group elements"),
    ));

    let mut failure = None;
    let mut probes = 0;
    'pairs: for &i in a.nonempty_indices() {
        for &j in a.nonempty_indices() {
            if j.is_subset(i) {
                probes += 1;
                if !a.has_embedding(i, j) {
                    failure = Some(alloc::format!("no embedding {}", names(a, i, j)));
                    break 'pairs;
                }
            }
        }
    }
    report.push(Check::from_outcome(
        "atlas.embeddings-present",
        "good atlas: embeddings exist for every containment of indices",
        probes,
        failure,
    ));

    let arrows: Vec<&EmbeddingArrow> = a.embeddings().filter(|e| e.source != e.target).collect();
    let bad = arrows.iter().find(|e| a.is_empty_chart(e.source) || a.is_empty_chart(e.target) || !is_injective(&e.map));
    report.push(Check::from_outcome(
        "atlas.embeddings-injective",
        "embedding: injective map between nonempty charts",
        arrows.len(),
        bad.map(|e| {
            alloc::format!("embedding {} is not an injective map of nonempty charts", names(a, e.source, e.target))
        }),
    ));

    let mut failure = None;
    let mut probes = 0;
    'eq: for e in &arrows {
        let (Some(gs), Some(gt)) = (a.group(e.source), a.group(e.target)) else { continue };
        for m in gs.maps() {
            probes += 1;
            let Ok(lg) = e.map.compose(m) else { continue };
            if !gt.maps().iter().any(|h| h.compose(&e.map).ok().as_ref() == Some(&lg)) {
                failure = Some(alloc::format!("embedding {} is not equivariant", names(a, e.source, e.target)));
                break 'eq;
            }
        }
    }
    report.push(Check::from_outcome(
        "atlas.embeddings-equivariant",
        "embedding: each source group element is carried by a target group element",
        probes,
        failure,
    ));

    let mut failure = None;
    let mut probes = 0;
    'comp: for first in &arrows {
        for second in &arrows {
            if first.target != second.source {
                continue;
            }
            let (i, k) = (first.source, second.target);
            let Ok(direct) = a.induced_embedding(i, k) else { continue };
            probes += 1;
            let Some(gk) = a.group(k) else { continue };
            let composite = second.map.compose(&first.map).expect("dimensions checked");
            if resolve_in(gk, &composite, &direct.map).is_none() {
                failure = Some(alloc::format!(
                    "{} then {} differs from the direct embedding by no unique group element",
                    names(a, i, first.target),
                    names(a, first.target, k)
                ));
                break 'comp;
            }
        }
    }
    report.push(Check::from_outcome(
        "atlas.embedding-composites",
        "embeddings into a chart agree up to a unique group element",
        probes,
        failure,
    ));

    let declared = a.charts().filter(|c| c.contractible).count();
    report.push(Check::new(
        "atlas.contractible",
        "good atlas: contractible charts",
        Status::DeclaredOnly,
        0,
        alloc::format!("{declared} of {} charts declared contractible", a.charts().count()),
    ));
    report.push(Check::new(
        "atlas.locally-finite",
        "good atlas: locally finite open cover",
        Status::DeclaredOnly,
        0,
        "no finite certificate exists",
    ));
    report
}
