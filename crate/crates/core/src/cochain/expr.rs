//! Lazily evaluated cochain operators.
//!
//! A stored [`Cochain`] is alternating: its value at any string is read off the
//! canonical string with the permutation sign. Operators such as the cup
//! product or the homotopy operators do not preserve alternation, so they are
//! evaluated at arbitrary words of the free monoid instead, where all of the
//! operator identities hold on the nose. [`materialize`] reads an expression
//! back on canonical strings.

use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::RefCell;

use num_traits::One;

use super::{Cochain, Domain};
use crate::atlas::GoodAtlas;
use crate::indexcomb::{canonical_strings, free_strings, sort_with_sign, IndexString, IndexSubset};
use crate::polyform::{PolyForm, Rational};
use crate::{Error, Result};

/// A cochain given by its values on all strings.
pub trait CochainExpr {
    fn atlas(&self) -> &Arc<GoodAtlas>;
    fn domain(&self) -> Domain;
    /// Longest string that can carry data when the inputs are alternating.
    fn max_len(&self) -> usize;
    /// The form on the chart of `∪s`.
    fn value(&self, s: &IndexString) -> Result<PolyForm>;
}

pub type Expr<'a> = Rc<dyn CochainExpr + 'a>;

/// Operator nodes compute values from their inputs; [`Memo`] caches them.
pub(crate) trait Node {
    fn atlas(&self) -> &Arc<GoodAtlas>;
    fn domain(&self) -> Domain;
    fn max_len(&self) -> usize;
    fn compute(&self, s: &IndexString) -> Result<PolyForm>;
}

pub(crate) struct Memo<N> {
    node: N,
    cache: RefCell<BTreeMap<IndexString, PolyForm>>,
}

impl<N: Node> CochainExpr for Memo<N> {
    fn atlas(&self) -> &Arc<GoodAtlas> {
        self.node.atlas()
    }

    fn domain(&self) -> Domain {
        self.node.domain()
    }

    fn max_len(&self) -> usize {
        self.node.max_len()
    }

    fn value(&self, s: &IndexString) -> Result<PolyForm> {
        if let Some(v) = self.cache.borrow().get(s) {
            return Ok(v.clone());
        }
        let atlas = self.node.atlas();
        let v = if atlas.is_empty_chart(s.union()) || !self.node.domain().admits(s) {
            PolyForm::zero(atlas.dimension())
        } else {
            self.node.compute(s)?
        };
        self.cache.borrow_mut().insert(s.clone(), v.clone());
        Ok(v)
    }
}

pub(crate) fn memo<'a, N: Node + 'a>(node: N) -> Expr<'a> {
    Rc::new(Memo { node, cache: RefCell::new(BTreeMap::new()) })
}

struct Stored<'a>(&'a Cochain);

impl CochainExpr for Stored<'_> {
    fn atlas(&self) -> &Arc<GoodAtlas> {
        self.0.atlas()
    }

    fn domain(&self) -> Domain {
        self.0.domain()
    }

    fn max_len(&self) -> usize {
        self.0.max_len()
    }

    fn value(&self, s: &IndexString) -> Result<PolyForm> {
        Ok(self.0.value(s))
    }
}

/// View a stored cochain as an expression.
pub fn stored(c: &Cochain) -> Expr<'_> {
    Rc::new(Stored(c))
}

struct Borrowed<'a>(&'a dyn CochainExpr);

impl CochainExpr for Borrowed<'_> {
    fn atlas(&self) -> &Arc<GoodAtlas> {
        self.0.atlas()
    }

    fn domain(&self) -> Domain {
        self.0.domain()
    }

    fn max_len(&self) -> usize {
        self.0.max_len()
    }

    fn value(&self, s: &IndexString) -> Result<PolyForm> {
        self.0.value(s)
    }
}

/// Use any cochain-like value as an expression without copying it.
pub fn view<'a>(e: &'a dyn CochainExpr) -> Expr<'a> {
    Rc::new(Borrowed(e))
}

/// Restrict `form`, living on the chart of `∪from`, to the chart of `∪to`.
pub(crate) fn restrict_to(atlas: &GoodAtlas, form: &PolyForm, to: IndexSubset, from: IndexSubset) -> Result<PolyForm> {
    atlas.restrict(form, to, from)
}

struct Delta<'a>(Expr<'a>);

fn delta_value(inner: &dyn CochainExpr, s: &IndexString) -> Result<PolyForm> {
    let atlas = inner.atlas();
    let mut out = PolyForm::zero(atlas.dimension());
    if s.len() < 2 {
        return Ok(out);
    }
    let u = s.union();
    for k in 0..s.len() {
        let mut face = s.entries().to_vec();
        face.remove(k);
        let face = IndexString::new(face)?;
        let v = inner.value(&face)?;
        if v.is_zero() {
            continue;
        }
        let r = restrict_to(atlas, &v, u, face.union())?;
        let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
        out.add_scaled(&r, &sign);
    }
    Ok(out)
}

impl Node for Delta<'_> {
    fn atlas(&self) -> &Arc<GoodAtlas> {
        self.0.atlas()
    }
    fn domain(&self) -> Domain {
        self.0.domain()
    }
    fn max_len(&self) -> usize {
        self.0.max_len() + 1
    }
    fn compute(&self, s: &IndexString) -> Result<PolyForm> {
        delta_value(&*self.0, s)
    }
}

struct ExtD<'a>(Expr<'a>);

impl Node for ExtD<'_> {
    fn atlas(&self) -> &Arc<GoodAtlas> {
        self.0.atlas()
    }
    fn domain(&self) -> Domain {
        self.0.domain()
    }
    fn max_len(&self) -> usize {
        self.0.max_len()
    }
    fn compute(&self, s: &IndexString) -> Result<PolyForm> {
        Ok(self.0.value(s)?.exterior_d())
    }
}

struct TotalD<'a>(Expr<'a>);

impl Node for TotalD<'_> {
    fn atlas(&self) -> &Arc<GoodAtlas> {
        self.0.atlas()
    }
    fn domain(&self) -> Domain {
        self.0.domain()
    }
    fn max_len(&self) -> usize {
        self.0.max_len() + 1
    }
    fn compute(&self, s: &IndexString) -> Result<PolyForm> {
        let mut out = delta_value(&*self.0, s)?;
        let d = self.0.value(s)?.exterior_d();
        // The d-part of a (p, q) component enters with sign (-1)^p.
        let sign = if s.degree().is_multiple_of(2) { Rational::one() } else { -Rational::one() };
        out.add_scaled(&d, &sign);
        Ok(out)
    }
}

struct Cup<'a>(Expr<'a>, Expr<'a>);

impl Node for Cup<'_> {
    fn atlas(&self) -> &Arc<GoodAtlas> {
        self.0.atlas()
    }
    fn domain(&self) -> Domain {
        self.0.domain()
    }
    fn max_len(&self) -> usize {
        (self.0.max_len() + self.1.max_len()).saturating_sub(1)
    }
    fn compute(&self, s: &IndexString) -> Result<PolyForm> {
        let atlas = self.0.atlas();
        let u = s.union();
        let mut out = PolyForm::zero(atlas.dimension());
        for m in 0..s.len() {
            let front = s.prefix(m);
            let back = s.suffix(m);
            let a = self.0.value(&front)?;
            if a.is_zero() {
                continue;
            }
            let b = self.1.value(&back)?;
            if b.is_zero() {
                continue;
            }
            let a = restrict_to(atlas, &a, u, front.union())?;
            let b = restrict_to(atlas, &b, u, back.union())?;
            let n = back.degree();
            for j in a.degrees() {
                let sign = if (j * n).is_multiple_of(2) { Rational::one() } else { -Rational::one() };
                out.add_scaled(&a.part(j).wedge(&b)?, &sign);
            }
        }
        Ok(out)
    }
}

struct Combination<'a> {
    atlas: Arc<GoodAtlas>,
    domain: Domain,
    terms: Vec<(Rational, Expr<'a>)>,
}

impl Node for Combination<'_> {
    fn atlas(&self) -> &Arc<GoodAtlas> {
        &self.atlas
    }
    fn domain(&self) -> Domain {
        self.domain
    }
    fn max_len(&self) -> usize {
        self.terms.iter().map(|(_, e)| e.max_len()).max().unwrap_or(0)
    }
    fn compute(&self, s: &IndexString) -> Result<PolyForm> {
        let mut out = PolyForm::zero(self.atlas.dimension());
        for (c, e) in &self.terms {
            out.add_scaled(&e.value(s)?, c);
        }
        Ok(out)
    }
}

pub(crate) fn same_space(a: &dyn CochainExpr, b: &dyn CochainExpr) -> Result<()> {
    if !Arc::ptr_eq(a.atlas(), b.atlas()) && **a.atlas() != **b.atlas() {
        return Err(Error::AtlasMismatch(a.atlas().name().into(), b.atlas().name().into()));
    }
    if a.domain() != b.domain() {
        return Err(Error::DomainMismatch);
    }
    Ok(())
}

/// Čech differential `δ`.
pub fn delta(e: Expr<'_>) -> Expr<'_> {
    memo(Delta(e))
}

/// Exterior derivative applied chartwise.
pub fn ext_d(e: Expr<'_>) -> Expr<'_> {
    memo(ExtD(e))
}

/// Total differential `D = δ + (-1)^p d`.
pub fn total_d(e: Expr<'_>) -> Expr<'_> {
    memo(TotalD(e))
}

/// Cup product `(ω ∪ η)_I = (-1)^{jn} ω_{I≤m}| ∧ η_{I≥m}|`, summed over splittings.
pub fn cup<'a>(a: Expr<'a>, b: Expr<'a>) -> Result<Expr<'a>> {
    same_space(&*a, &*b)?;
    Ok(memo(Cup(a, b)))
}

/// `Σ c_i e_i`; all terms must share the atlas and domain of `first`.
pub fn combination<'a>(terms: Vec<(Rational, Expr<'a>)>) -> Result<Expr<'a>> {
    let first = terms.first().ok_or_else(|| Error::Malformed("empty combination".into()))?.1.clone();
    for (_, e) in &terms {
        same_space(&*first, &**e)?;
    }
    Ok(memo(Combination { atlas: first.atlas().clone(), domain: first.domain(), terms }))
}

pub fn difference<'a>(a: Expr<'a>, b: Expr<'a>) -> Result<Expr<'a>> {
    combination(alloc::vec![(Rational::one(), a), (-Rational::one(), b)])
}

pub fn sum<'a>(a: Expr<'a>, b: Expr<'a>) -> Result<Expr<'a>> {
    combination(alloc::vec![(Rational::one(), a), (Rational::one(), b)])
}

pub fn scaled(c: Rational, e: Expr<'_>) -> Result<Expr<'_>> {
    combination(alloc::vec![(c, e)])
}

/// Canonical strings of the domain of `atlas` with nonempty union chart.
pub fn canonical_support(atlas: &GoodAtlas, domain: Domain, len: usize) -> Vec<IndexString> {
    let alphabet = domain.alphabet(atlas);
    let keep = |prefix: &[IndexSubset]| {
        let u = prefix.iter().fold(prefix[0], |acc, x| acc.union(*x));
        !atlas.is_empty_chart(u)
    };
    canonical_strings(&alphabet, len, &keep)
}

/// Words with repeats allowed and nonempty union chart, at most `limit` of them.
pub fn free_support(atlas: &GoodAtlas, domain: Domain, len: usize, limit: usize) -> Vec<IndexString> {
    let alphabet = domain.alphabet(atlas);
    let keep = |prefix: &[IndexSubset]| {
        let u = prefix.iter().fold(prefix[0], |acc, x| acc.union(*x));
        !atlas.is_empty_chart(u)
    };
    free_strings(&alphabet, len, &keep, limit)
}

/// Evaluate on all canonical strings and store the nonzero values.
pub fn materialize(e: &dyn CochainExpr) -> Result<Cochain> {
    let atlas = e.atlas().clone();
    let domain = e.domain();
    let max = e.max_len().min(domain.alphabet(&atlas).len());
    let mut out = Cochain::zero(atlas.clone(), domain);
    for len in 1..=max {
        for s in canonical_support(&atlas, domain, len) {
            let v = e.value(&s)?;
            if !v.is_zero() {
                out.insert_canonical(s, v);
            }
        }
    }
    Ok(out)
}

/// First string where two expressions differ, checked over `strings`.
pub fn first_difference(
    a: &dyn CochainExpr,
    b: &dyn CochainExpr,
    strings: &[IndexString],
) -> Result<Option<IndexString>> {
    for s in strings {
        if a.value(s)? != b.value(s)? {
            return Ok(Some(s.clone()));
        }
    }
    Ok(None)
}

/// Whether a (lazy) value is consistent with alternation at `s`: permuting
/// entries multiplies by the sign and repeats vanish.
pub fn alternates_at(e: &dyn CochainExpr, s: &IndexString) -> Result<bool> {
    let v = e.value(s)?;
    match sort_with_sign(s) {
        None => Ok(v.is_zero()),
        Some((canon, sign)) => Ok(e.value(&canon)?.scale(&Rational::from_integer(sign.into())) == v),
    }
}

impl Domain {
    pub(crate) fn admits(self, s: &IndexString) -> bool {
        match self {
            Domain::Subsets => true,
            Domain::Vertices => s.entries().iter().all(|e| e.len() == 1),
        }
    }

    /// The letters strings are drawn from, restricted to nonempty charts.
    pub fn alphabet(self, atlas: &GoodAtlas) -> Vec<IndexSubset> {
        match self {
            Domain::Subsets => atlas.nonempty_indices().to_vec(),
            Domain::Vertices => atlas.nonempty_indices().iter().copied().filter(|i| i.len() == 1).collect(),
        }
    }
}
