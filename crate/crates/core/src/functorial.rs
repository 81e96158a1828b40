//! Maps of spark complexes induced by morphisms of atlases.
//!
//! All operators are lazy [`Expr`] nodes: they evaluate at arbitrary words,
//! so compositions such as `D ᾱ + ᾱ D` can be compared directly.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::One;

use crate::atlas::GoodAtlas;
use crate::cochain::{memo, same_space, CochainExpr, Domain, Expr, Node};
use crate::indexcomb::{IndexString, IndexSubset};
use crate::morphisms::{CompatibleSystem, NaturalTransformation};
use crate::polyform::{PolyForm, Rational};
use crate::{Error, Result};

fn sign(k: usize) -> Rational {
    if k.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

fn image_entries(f: &CompatibleSystem, s: &IndexString) -> Result<Vec<IndexSubset>> {
    s.entries().iter().map(|&i| f.image(i)).collect()
}

fn check_target(e: &dyn CochainExpr, target: &Arc<GoodAtlas>) -> Result<()> {
    if !Arc::ptr_eq(e.atlas(), target) && **e.atlas() != **target {
        return Err(Error::AtlasMismatch(e.atlas().name().into(), target.name().into()));
    }
    if e.domain() != Domain::Subsets {
        return Err(Error::DomainMismatch);
    }
    Ok(())
}

struct Pullback<'a> {
    system: &'a CompatibleSystem,
    inner: Expr<'a>,
}

impl Node for Pullback<'_> {
    fn atlas(&self) -> &Arc<GoodAtlas> {
        self.system.source()
    }
    fn domain(&self) -> Domain {
        Domain::Subsets
    }
    fn max_len(&self) -> usize {
        self.inner.max_len()
    }
    fn compute(&self, s: &IndexString) -> Result<PolyForm> {
        let t = IndexString::new(image_entries(self.system, s)?)?;
        let v = self.inner.value(&t)?;
        if v.is_zero() {
            return Ok(PolyForm::zero(self.system.source().dimension()));
        }
        self.system.lifting(s.union())?.pullback(&v)
    }
}

/// `(ū ω)_I = f̃*_{∪I}(ω_{fI})`.
pub fn pullback_system<'a>(system: &'a CompatibleSystem, e: Expr<'a>) -> Result<Expr<'a>> {
    check_target(&*e, system.target())?;
    Ok(memo(Pullback { system, inner: e }))
}

/// Sum over the interleavings `w(i, j)` of the images of a source word,
/// restricted to `∪ f¹I` and pulled back by the given lifting chain.
fn interleaved_sum(
    source: &GoodAtlas,
    target: &GoodAtlas,
    inner: &dyn CochainExpr,
    words: &[(Rational, IndexString)],
    base: IndexSubset,
    pull: &dyn Fn(&PolyForm) -> Result<PolyForm>,
) -> Result<PolyForm> {
    let mut acc = PolyForm::zero(target.dimension());
    for (c, w) in words {
        let v = inner.value(w)?;
        if v.is_zero() {
            continue;
        }
        acc.add_scaled(&target.restrict(&v, base, w.union())?, c);
    }
    if acc.is_zero() {
        return Ok(PolyForm::zero(source.dimension()));
    }
    pull(&acc)
}

struct Alpha<'a> {
    nt: &'a NaturalTransformation,
    inner: Expr<'a>,
}

impl Node for Alpha<'_> {
    fn atlas(&self) -> &Arc<GoodAtlas> {
        self.nt.source_cs().source()
    }
    fn domain(&self) -> Domain {
        Domain::Subsets
    }
    fn max_len(&self) -> usize {
        self.inner.max_len().saturating_sub(1)
    }
    fn compute(&self, s: &IndexString) -> Result<PolyForm> {
        let (f1, f2) = (&**self.nt.source_cs(), &**self.nt.target_cs());
        let (a, b) = (image_entries(f1, s)?, image_entries(f2, s)?);
        let p = s.len() - 1;
        let mut words = Vec::with_capacity(p + 1);
        for j in 0..=p {
            let w: Vec<_> = a[..=j].iter().chain(&b[j..]).copied().collect();
            words.push((sign(j), IndexString::new(w)?));
        }
        let u = s.union();
        let lift = f1.lifting(u)?;
        interleaved_sum(f1.source(), f1.target(), &*self.inner, &words, f1.image(u)?, &|x| lift.pullback(x))
    }
}

/// The homotopy `ᾱ` between `ū f̃¹` and `ū f̃²` induced by `α: f̃¹ ⇒ f̃²`.
pub fn homotopy_alpha<'a>(nt: &'a NaturalTransformation, e: Expr<'a>) -> Result<Expr<'a>> {
    check_target(&*e, nt.source_cs().target())?;
    Ok(memo(Alpha { nt, inner: e }))
}

struct Gamma<'a> {
    beta: &'a NaturalTransformation,
    alpha: &'a NaturalTransformation,
    inner: Expr<'a>,
}

impl Node for Gamma<'_> {
    fn atlas(&self) -> &Arc<GoodAtlas> {
        self.alpha.source_cs().source()
    }
    fn domain(&self) -> Domain {
        Domain::Subsets
    }
    fn max_len(&self) -> usize {
        self.inner.max_len().saturating_sub(2)
    }
    fn compute(&self, s: &IndexString) -> Result<PolyForm> {
        let f1 = &**self.alpha.source_cs();
        let a = image_entries(f1, s)?;
        let b = image_entries(self.alpha.target_cs(), s)?;
        let c = image_entries(self.beta.target_cs(), s)?;
        let p = s.len() - 1;
        let mut words = Vec::new();
        for j in 0..=p {
            for i in 0..=j {
                let w: Vec<_> = a[..=i].iter().chain(&b[i..=j]).chain(&c[j..]).copied().collect();
                words.push((sign(i + j), IndexString::new(w)?));
            }
        }
        let u = s.union();
        let lift = f1.lifting(u)?;
        interleaved_sum(f1.source(), f1.target(), &*self.inner, &words, f1.image(u)?, &|x| lift.pullback(x))
    }
}

/// The homotopy `Γ` from `ᾱ + β̄` to the homotopy of `β ∘ α`.
pub fn homotopy_gamma<'a>(
    beta: &'a NaturalTransformation,
    alpha: &'a NaturalTransformation,
    e: Expr<'a>,
) -> Result<Expr<'a>> {
    if alpha.target_cs().name() != beta.source_cs().name() {
        return Err(Error::Malformed(alloc::format!(
            "{} ends at {} but {} starts at {}",
            alpha.name(),
            alpha.target_cs().name(),
            beta.name(),
            beta.source_cs().name()
        )));
    }
    check_target(&*e, alpha.source_cs().target())?;
    Ok(memo(Gamma { beta, alpha, inner: e }))
}

struct Xi<'a> {
    alpha: &'a NaturalTransformation,
    beta: &'a NaturalTransformation,
    inner: Expr<'a>,
}

impl Node for Xi<'_> {
    fn atlas(&self) -> &Arc<GoodAtlas> {
        self.alpha.source_cs().source()
    }
    fn domain(&self) -> Domain {
        Domain::Subsets
    }
    fn max_len(&self) -> usize {
        self.inner.max_len().saturating_sub(2)
    }
    fn compute(&self, s: &IndexString) -> Result<PolyForm> {
        let (f1, f2) = (&**self.alpha.source_cs(), &**self.alpha.target_cs());
        let (g1, g2) = (&**self.beta.source_cs(), &**self.beta.target_cs());
        let mut words = Vec::new();
        let p = s.len() - 1;
        let a: Vec<_> = s.entries().iter().map(|&i| g1.image(f1.image(i)?)).collect::<Result<_>>()?;
        let b: Vec<_> = s.entries().iter().map(|&i| g1.image(f2.image(i)?)).collect::<Result<_>>()?;
        let c: Vec<_> = s.entries().iter().map(|&i| g2.image(f2.image(i)?)).collect::<Result<_>>()?;
        for j in 0..=p {
            for i in 0..=j {
                let w: Vec<_> = a[..=i].iter().chain(&b[i..=j]).chain(&c[j..]).copied().collect();
                words.push((sign(i + j), IndexString::new(w)?));
            }
        }
        let u = s.union();
        let fu = f1.image(u)?;
        let (lf, lg) = (f1.lifting(u)?, g1.lifting(fu)?);
        interleaved_sum(f1.source(), g1.target(), &*self.inner, &words, g1.image(fu)?, &|x| {
            lf.pullback(&lg.pullback(x)?)
        })
    }
}

/// The homotopy of homotopies `Ξ` for the horizontal composite of
/// `α: f̃¹ ⇒ f̃²` (over `U → V`) and `β: g̃¹ ⇒ g̃²` (over `V → W`).
pub fn homotopy_xi<'a>(
    alpha: &'a NaturalTransformation,
    beta: &'a NaturalTransformation,
    e: Expr<'a>,
) -> Result<Expr<'a>> {
    let (v1, v2) = (alpha.source_cs().target(), beta.source_cs().source());
    if !Arc::ptr_eq(v1, v2) && **v1 != **v2 {
        return Err(Error::AtlasMismatch(v1.name().into(), v2.name().into()));
    }
    check_target(&*e, beta.source_cs().target())?;
    Ok(memo(Xi { alpha, beta, inner: e }))
}

/// A choice of vertex `φ(I) ∈ I` for every nonempty chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceMap {
    choice: BTreeMap<IndexSubset, usize>,
}

impl ChoiceMap {
    pub fn new(atlas: &GoodAtlas, choice: BTreeMap<IndexSubset, usize>) -> Result<Self> {
        for &i in atlas.nonempty_indices() {
            let v = *choice
                .get(&i)
                .ok_or_else(|| Error::UnknownVertex(alloc::format!("no choice for {}", atlas.fmt_index(i))))?;
            if !i.contains(v) {
                return Err(Error::OutsideDomain(alloc::format!(
                    "{} is not a vertex of {}",
                    atlas.vertices().label(v),
                    atlas.fmt_index(i)
                )));
            }
        }
        Ok(ChoiceMap { choice })
    }

    /// `φ(I) = min I` in vertex order.
    pub fn min_vertex(atlas: &GoodAtlas) -> Self {
        ChoiceMap { choice: atlas.nonempty_indices().iter().map(|&i| (i, i.min_vertex())).collect() }
    }

    /// `φ(I) = max I` in vertex order.
    pub fn max_vertex(atlas: &GoodAtlas) -> Self {
        ChoiceMap { choice: atlas.nonempty_indices().iter().map(|&i| (i, i.max_vertex())).collect() }
    }

    pub fn get(&self, i: IndexSubset) -> Result<usize> {
        self.choice.get(&i).copied().ok_or_else(|| Error::OutsideDomain("no choice for an empty chart".into()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (IndexSubset, usize)> + '_ {
        self.choice.iter().map(|(&i, &v)| (i, v))
    }

    /// `φ I` as a word of singletons.
    pub fn apply(&self, atlas: &GoodAtlas, s: &IndexString) -> Result<IndexString> {
        let w =
            s.entries().iter().map(|&i| Ok(atlas.vertices().singleton(self.get(i)?))).collect::<Result<Vec<_>>>()?;
        IndexString::new(w)
    }
}

struct PhiExtend<'a> {
    phi: &'a ChoiceMap,
    inner: Expr<'a>,
}

impl Node for PhiExtend<'_> {
    fn atlas(&self) -> &Arc<GoodAtlas> {
        self.inner.atlas()
    }
    fn domain(&self) -> Domain {
        Domain::Subsets
    }
    fn max_len(&self) -> usize {
        self.inner.max_len()
    }
    fn compute(&self, s: &IndexString) -> Result<PolyForm> {
        let atlas = self.inner.atlas();
        let t = self.phi.apply(atlas, s)?;
        let v = self.inner.value(&t)?;
        if v.is_zero() {
            return Ok(v);
        }
        atlas.restrict(&v, s.union(), t.union())
    }
}

/// `(φ̄ ω)_I = ω_{φI}|`, from the small complex to the big one.
pub fn phi_extend<'a>(phi: &'a ChoiceMap, e: Expr<'a>) -> Result<Expr<'a>> {
    if e.domain() != Domain::Vertices {
        return Err(Error::DomainMismatch);
    }
    Ok(memo(PhiExtend { phi, inner: e }))
}

/// A spark complex: the big complex over index subsets or the small one over vertices.
#[derive(Clone, Debug)]
pub struct SparkTriple {
    pub atlas: Arc<GoodAtlas>,
    pub domain: Domain,
}

impl SparkTriple {
    pub fn big(atlas: Arc<GoodAtlas>) -> Self {
        SparkTriple { atlas, domain: Domain::Subsets }
    }

    /// Number of canonical generators of `C^p` (strings with nonempty chart).
    pub fn generators(&self, p: usize) -> usize {
        crate::cochain::canonical_support(&self.atlas, self.domain, p + 1).len()
    }

    /// Largest Čech degree that can carry data.
    pub fn top_degree(&self) -> usize {
        self.domain.alphabet(&self.atlas).len().saturating_sub(1)
    }
}

/// The small complex over vertex strings.
pub fn small_complex_build(atlas: Arc<GoodAtlas>) -> SparkTriple {
    SparkTriple { atlas, domain: Domain::Vertices }
}

/// Whether two expressions live on the same complex.
pub fn comparable(a: &dyn CochainExpr, b: &dyn CochainExpr) -> Result<()> {
    same_space(a, b)
}
