//! The JSON atlas document: atlases, compatible systems, natural
//! transformations and cochain literals.
//!
//! Rationals are always strings `"p/q"` (or `"p"`). A polynomial is a list of
//! `["coefficient", [exponents]]` pairs, a polynomial map a list of component
//! polynomials and a form a list of `{"dx": [...], "poly": ...}` terms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use orbispark_core::atlas::GoodAtlas;
use orbispark_core::cochain::{Cochain, Domain, OrderedCochain};
use orbispark_core::indexcomb::{IndexString, IndexSubset, VertexSet};
use orbispark_core::morphisms::{CompatibleSystem, NaturalTransformation};
use orbispark_core::polyform::{
    format_rational, parse_rational, AffineGroupElement, FiniteGroup, PolyForm, PolyMap, Polynomial, Rational,
    DEFAULT_ORDER_BOUND,
};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{0}")]
    Semantic(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl From<orbispark_core::Error> for LoadError {
    fn from(e: orbispark_core::Error) -> Self {
        LoadError::Semantic(e.to_string())
    }
}

fn semantic(msg: impl Into<String>) -> LoadError {
    LoadError::Semantic(msg.into())
}

/// A rational written as a string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map(Q).map_err(de::Error::custom)
    }
}

/// `[["p/q", [e1, ..., en]], ...]`
pub type PolySpec = Vec<(Q, Vec<u32>)>;
/// One polynomial per target coordinate.
pub type MapSpec = Vec<PolySpec>;
pub type FormSpec = Vec<FormTerm>;
/// Vertex labels of an index subset.
pub type IndexSpec = Vec<String>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormTerm {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dx: Vec<usize>,
    pub poly: PolySpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasDocument {
    pub schema: u32,
    pub atlases: Vec<AtlasSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub systems: Vec<SystemSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transformations: Vec<TransformationSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cochains: Vec<CochainSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasSpec {
    pub name: String,
    pub dim: usize,
    pub vertices: Vec<String>,
    pub charts: Vec<ChartSpec>,
    #[serde(default)]
    pub embeddings: Vec<EmbeddingSpec>,
    /// Pairs `(I, J)` with an embedding although `J` is not a subset of `I`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub containments: Vec<(IndexSpec, IndexSpec)>,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub index: IndexSpec,
    /// Generators of the chart group; empty for the trivial group.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub group: Vec<GroupElementSpec>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub empty: bool,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub contractible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupElementSpec {
    pub matrix: Vec<Vec<Q>>,
    pub translation: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSpec {
    pub source: IndexSpec,
    pub target: IndexSpec,
    pub map: MapSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexImage {
    pub from: IndexSpec,
    pub to: IndexSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexedMap {
    pub index: IndexSpec,
    pub map: MapSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub name: String,
    pub source: String,
    pub target: String,
    /// Images of the singletons at least; other indices default to unions.
    pub index_map: Vec<IndexImage>,
    pub liftings: Vec<IndexedMap>,
    /// Images of source embeddings; missing ones default to the stored target embedding.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arrows: Vec<EmbeddingSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformationSpec {
    pub name: String,
    pub source: String,
    pub target: String,
    /// Missing components default to the stored target embedding.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<IndexedMap>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexSpec {
    #[default]
    Big,
    Small,
}

impl From<ComplexSpec> for Domain {
    fn from(c: ComplexSpec) -> Domain {
        match c {
            ComplexSpec::Big => Domain::Subsets,
            ComplexSpec::Small => Domain::Vertices,
        }
    }
}

impl From<Domain> for ComplexSpec {
    fn from(d: Domain) -> ComplexSpec {
        match d {
            Domain::Subsets => ComplexSpec::Big,
            Domain::Vertices => ComplexSpec::Small,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainSpec {
    pub name: String,
    pub atlas: String,
    #[serde(default)]
    pub complex: ComplexSpec,
    /// Values given on exactly the listed words; otherwise extended by alternation.
    #[serde(default, skip_serializing_if = "is_false")]
    pub ordered: bool,
    pub terms: Vec<CochainTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainTerm {
    pub string: Vec<IndexSpec>,
    pub form: FormSpec,
}

/// A named cochain literal, tabulated on words up to its longest entry.
#[derive(Clone, Debug)]
pub struct NamedCochain {
    pub name: String,
    pub value: OrderedCochain,
}

/// A document resolved into core objects.
#[derive(Clone, Debug, Default)]
pub struct Loaded {
    pub atlases: Vec<Arc<GoodAtlas>>,
    pub systems: Vec<Arc<CompatibleSystem>>,
    pub transformations: Vec<Arc<NaturalTransformation>>,
    pub cochains: Vec<NamedCochain>,
}

impl Loaded {
    pub fn atlas(&self, name: &str) -> Result<&Arc<GoodAtlas>, LoadError> {
        self.atlases.iter().find(|a| a.name() == name).ok_or_else(|| semantic(format!("unknown atlas `{name}`")))
    }

    pub fn system(&self, name: &str) -> Result<&Arc<CompatibleSystem>, LoadError> {
        self.systems.iter().find(|a| a.name() == name).ok_or_else(|| semantic(format!("unknown system `{name}`")))
    }

    pub fn cochain(&self, name: &str) -> Result<&NamedCochain, LoadError> {
        self.cochains.iter().find(|a| a.name == name).ok_or_else(|| semantic(format!("unknown cochain `{name}`")))
    }
}

pub fn parse_document(text: &str) -> Result<AtlasDocument, LoadError> {
    let doc: AtlasDocument = serde_json::from_str(text).map_err(|e| LoadError::Parse {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    if doc.schema != SCHEMA_VERSION {
        return Err(semantic(format!("unsupported schema version {} (expected {SCHEMA_VERSION})", doc.schema)));
    }
    Ok(doc)
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn load_str(text: &str) -> Result<Loaded, LoadError> {
    resolve(&parse_document(text)?)
}

pub fn load_file(path: &std::path::Path) -> Result<Loaded, LoadError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    load_str(&text)
}

fn subset(v: &VertexSet, labels: &[String]) -> Result<IndexSubset, LoadError> {
    if labels.is_empty() {
        return Err(semantic("empty index subset"));
    }
    v.subset(labels).map_err(|e| semantic(e.to_string()))
}

fn poly(n: usize, p: &PolySpec) -> Result<Polynomial, LoadError> {
    if let Some((_, e)) = p.iter().find(|(_, e)| e.len() != n) {
        return Err(semantic(format!("exponent vector {e:?} does not have {n} entries")));
    }
    Ok(Polynomial::from_terms(n, p.iter().map(|(c, e)| (c.0.clone(), e.clone()))))
}

fn poly_map(n: usize, m: &MapSpec) -> Result<PolyMap, LoadError> {
    let comps = m.iter().map(|p| poly(n, p)).collect::<Result<Vec<_>, _>>()?;
    Ok(PolyMap::new(n, comps)?)
}

fn form(n: usize, f: &FormSpec) -> Result<PolyForm, LoadError> {
    let mut out = PolyForm::zero(n);
    for t in f {
        let mut mask = 0u32;
        for &i in &t.dx {
            if i >= n {
                return Err(semantic(format!("dx index {i} out of range for dimension {n}")));
            }
            if mask & (1 << i) != 0 {
                return Err(semantic(format!("repeated dx index {i}")));
            }
            mask |= 1 << i;
        }
        // dx lists in any order: sort into the basis order with the permutation sign.
        let mut sorted = t.dx.clone();
        let mut sign = 1i64;
        for a in 0..sorted.len() {
            for b in 0..sorted.len() - 1 - a {
                if sorted[b] > sorted[b + 1] {
                    sorted.swap(b, b + 1);
                    sign = -sign;
                }
            }
        }
        out.add_scaled(&PolyForm::term(mask, poly(n, &t.poly)?), &Rational::from_integer(sign.into()));
    }
    Ok(out)
}

fn group_element(n: usize, g: &GroupElementSpec) -> Result<AffineGroupElement, LoadError> {
    let m = g.matrix.iter().map(|r| r.iter().map(|q| q.0.clone()).collect()).collect::<Vec<Vec<_>>>();
    if m.len() != n || m.iter().any(|r| r.len() != n) || g.translation.len() != n {
        return Err(semantic(format!("group element is not {n}-dimensional")));
    }
    Ok(AffineGroupElement::new(m, g.translation.iter().map(|q| q.0.clone()).collect())?)
}

fn resolve_atlas(a: &AtlasSpec) -> Result<GoodAtlas, LoadError> {
    let v = VertexSet::new(a.vertices.iter().cloned()).map_err(|e| semantic(e.to_string()))?;
    let n = a.dim;
    let mut b = GoodAtlas::builder(&a.name, v.clone(), n);
    for c in &a.charts {
        let gens = c.group.iter().map(|g| group_element(n, g)).collect::<Result<Vec<_>, _>>()?;
        let group = FiniteGroup::generate(n, &gens, DEFAULT_ORDER_BOUND)?;
        b = b.chart(subset(&v, &c.index)?, group, c.empty, c.contractible)?;
    }
    let declared: Vec<(IndexSubset, IndexSubset)> =
        a.containments.iter().map(|(i, j)| Ok((subset(&v, i)?, subset(&v, j)?))).collect::<Result<_, LoadError>>()?;
    for e in &a.embeddings {
        let (i, j) = (subset(&v, &e.source)?, subset(&v, &e.target)?);
        if !j.is_subset(i) && !declared.contains(&(i, j)) {
            return Err(semantic(format!(
                "atlas `{}`: embedding {} -> {} is neither an inclusion nor a declared containment",
                a.name,
                v.format_subset(i),
                v.format_subset(j)
            )));
        }
        b = b.embedding(i, j, poly_map(n, &e.map)?)?;
    }
    let atlas = b.build()?;
    for &(i, j) in &declared {
        if !atlas.has_embedding(i, j) {
            return Err(semantic(format!(
                "atlas `{}`: declared containment {} -> {} has no embedding",
                a.name,
                v.format_subset(i),
                v.format_subset(j)
            )));
        }
    }
    Ok(atlas)
}

fn unique<'a>(kind: &str, names: impl Iterator<Item = &'a str>) -> Result<(), LoadError> {
    let mut seen = std::collections::BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(semantic(format!("duplicate {kind} name `{n}`")));
        }
    }
    Ok(())
}

pub fn resolve(doc: &AtlasDocument) -> Result<Loaded, LoadError> {
    unique("atlas", doc.atlases.iter().map(|a| a.name.as_str()))?;
    unique("system", doc.systems.iter().map(|a| a.name.as_str()))?;
    unique("transformation", doc.transformations.iter().map(|a| a.name.as_str()))?;
    unique("cochain", doc.cochains.iter().map(|a| a.name.as_str()))?;
    let mut out = Loaded::default();
    for a in &doc.atlases {
        out.atlases.push(Arc::new(resolve_atlas(a)?));
    }
    for s in &doc.systems {
        let (src, tgt) = (out.atlas(&s.source)?.clone(), out.atlas(&s.target)?.clone());
        let (sv, tv) = (src.vertices(), tgt.vertices());
        let index_map = s
            .index_map
            .iter()
            .map(|m| Ok((subset(sv, &m.from)?, subset(tv, &m.to)?)))
            .collect::<Result<BTreeMap<_, _>, LoadError>>()?;
        let lifts = s
            .liftings
            .iter()
            .map(|l| Ok((subset(sv, &l.index)?, poly_map(src.dimension(), &l.map)?)))
            .collect::<Result<BTreeMap<_, _>, LoadError>>()?;
        let arrows = s
            .arrows
            .iter()
            .map(|e| Ok(((subset(sv, &e.source)?, subset(sv, &e.target)?), poly_map(tgt.dimension(), &e.map)?)))
            .collect::<Result<BTreeMap<_, _>, LoadError>>()?;
        out.systems.push(Arc::new(CompatibleSystem::new(&s.name, src, tgt, index_map, lifts, arrows)?));
    }
    for t in &doc.transformations {
        let (f1, f2) = (out.system(&t.source)?.clone(), out.system(&t.target)?.clone());
        let tgt = f1.target().clone();
        let comps = t
            .components
            .iter()
            .map(|c| Ok((subset(f1.source().vertices(), &c.index)?, poly_map(tgt.dimension(), &c.map)?)))
            .collect::<Result<BTreeMap<_, _>, LoadError>>()?;
        out.transformations.push(Arc::new(NaturalTransformation::new(&t.name, f1, f2, comps)?));
    }
    for c in &doc.cochains {
        let atlas = out.atlas(&c.atlas)?.clone();
        let domain = Domain::from(c.complex);
        let n = atlas.dimension();
        let mut max_len = 0;
        let mut terms = Vec::new();
        for t in &c.terms {
            let s = IndexString::new(t.string.iter().map(|i| subset(atlas.vertices(), i)).collect::<Result<_, _>>()?)?;
            max_len = max_len.max(s.len());
            terms.push((s, form(n, &t.form)?));
        }
        let value = if c.ordered {
            let mut o = OrderedCochain::zero(atlas.clone(), domain);
            for (s, f) in terms {
                let mut v = o.get(&s);
                v.add_scaled(&f, &Rational::from_integer(1.into()));
                o.insert(&s, v)?;
            }
            o
        } else {
            let mut a = Cochain::zero(atlas.clone(), domain);
            for (s, f) in terms {
                let mut v = a.value(&s);
                v.add_scaled(&f, &Rational::from_integer(1.into()));
                a.insert(&s, v)?;
            }
            OrderedCochain::from_cochain(&a, max_len)
        };
        out.cochains.push(NamedCochain { name: c.name.clone(), value });
    }
    Ok(out)
}

fn labels(v: &VertexSet, i: IndexSubset) -> IndexSpec {
    i.members().map(|m| v.label(m).to_string()).collect()
}

fn poly_spec(p: &Polynomial) -> PolySpec {
    p.terms().map(|(e, c)| (Q(c.clone()), e.clone())).collect()
}

fn map_spec(m: &PolyMap) -> MapSpec {
    m.components().iter().map(poly_spec).collect()
}

pub fn form_spec(f: &PolyForm) -> FormSpec {
    f.terms()
        .map(|(mask, p)| FormTerm { dx: (0..32).filter(|i| mask & (1 << i) != 0).collect(), poly: poly_spec(p) })
        .collect()
}

pub fn atlas_spec(a: &GoodAtlas) -> AtlasSpec {
    let v = a.vertices();
    let charts = a
        .charts()
        .map(|c| ChartSpec {
            index: labels(v, c.index),
            group: c
                .group
                .elements()
                .iter()
                .filter(|g| !g.is_identity())
                .map(|g| GroupElementSpec {
                    matrix: g.matrix().iter().map(|r| r.iter().cloned().map(Q).collect()).collect(),
                    translation: g.translation().iter().cloned().map(Q).collect(),
                })
                .collect(),
            empty: c.empty,
            contractible: c.contractible,
        })
        .collect();
    let embeddings: Vec<EmbeddingSpec> = a
        .embeddings()
        .filter(|e| e.source != e.target)
        .map(|e| EmbeddingSpec { source: labels(v, e.source), target: labels(v, e.target), map: map_spec(&e.map) })
        .collect();
    let containments = a
        .embeddings()
        .filter(|e| !e.target.is_subset(e.source))
        .map(|e| (labels(v, e.source), labels(v, e.target)))
        .collect();
    AtlasSpec {
        name: a.name().to_string(),
        dim: a.dimension(),
        vertices: v.labels().to_vec(),
        charts,
        embeddings,
        containments,
    }
}

pub fn system_spec(s: &CompatibleSystem) -> SystemSpec {
    let (sv, tv) = (s.source().vertices(), s.target().vertices());
    SystemSpec {
        name: s.name().to_string(),
        source: s.source().name().to_string(),
        target: s.target().name().to_string(),
        index_map: s.index_map().iter().map(|(&i, &k)| IndexImage { from: labels(sv, i), to: labels(tv, k) }).collect(),
        liftings: s.liftings().map(|(i, m)| IndexedMap { index: labels(sv, i), map: map_spec(m) }).collect(),
        arrows: s
            .arrows()
            .filter(|((i, j), _)| i != j)
            .map(|((i, j), m)| EmbeddingSpec { source: labels(sv, i), target: labels(sv, j), map: map_spec(m) })
            .collect(),
    }
}

pub fn transformation_spec(t: &NaturalTransformation) -> TransformationSpec {
    let sv = t.source_cs().source().vertices();
    TransformationSpec {
        name: t.name().to_string(),
        source: t.source_cs().name().to_string(),
        target: t.target_cs().name().to_string(),
        components: t.components().map(|(i, m)| IndexedMap { index: labels(sv, i), map: map_spec(m) }).collect(),
    }
}

/// A literal for `c`: alternating on canonical strings when possible, ordered otherwise.
pub fn cochain_spec(name: &str, c: &OrderedCochain) -> CochainSpec {
    let v = c.atlas().vertices();
    let term = |s: &IndexString, f: &PolyForm| CochainTerm {
        string: s.entries().iter().map(|&i| labels(v, i)).collect(),
        form: form_spec(f),
    };
    let (ordered, terms) = match c.to_alternating() {
        Some(a) => (false, a.terms().map(|(s, f)| term(s, f)).collect()),
        None => (true, c.terms().filter(|(_, f)| !f.is_zero()).map(|(s, f)| term(s, f)).collect()),
    };
    CochainSpec {
        name: name.to_string(),
        atlas: c.atlas().name().to_string(),
        complex: c.domain().into(),
        ordered,
        terms,
    }
}

/// The document describing `loaded`.
pub fn document(loaded: &Loaded) -> AtlasDocument {
    AtlasDocument {
        schema: SCHEMA_VERSION,
        atlases: loaded.atlases.iter().map(|a| atlas_spec(a)).collect(),
        systems: loaded.systems.iter().map(|s| system_spec(s)).collect(),
        transformations: loaded.transformations.iter().map(|t| transformation_spec(t)).collect(),
        cochains: loaded.cochains.iter().map(|c| cochain_spec(&c.name, &c.value)).collect(),
    }
}

/// Indented JSON keeping any value that fits in the line width on one line.
pub fn to_json(doc: &AtlasDocument) -> String {
    let value = serde_json::to_value(doc).expect("documents serialize");
    let mut out = String::new();
    write_compact(&value, 0, &mut out);
    out.push('\n');
    out
}

const LINE_WIDTH: usize = 100;

fn write_compact(v: &serde_json::Value, indent: usize, out: &mut String) {
    use serde_json::Value;
    let flat = v.to_string();
    if indent + flat.len() <= LINE_WIDTH {
        out.push_str(&flat);
        return;
    }
    let pad = " ".repeat(indent + 2);
    match v {
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, x) in items.iter().enumerate() {
                out.push_str(&pad);
                write_compact(x, indent + 2, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&" ".repeat(indent));
            out.push(']');
        }
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, x)) in map.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_compact(x, indent + 2, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&" ".repeat(indent));
            out.push('}');
        }
        _ => out.push_str(&flat),
    }
}

impl fmt::Display for ComplexSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComplexSpec::Big => "big",
            ComplexSpec::Small => "small",
        })
    }
}
