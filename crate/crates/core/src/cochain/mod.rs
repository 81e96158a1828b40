//! The Čech–de Rham double complex on a good atlas.
//!
//! A [`Cochain`] is a finite sum of components of bidegree `(p, q)`: a
//! `G`-invariant `q`-form on the chart of `∪I` for each canonical string
//! `I = I_0 … I_p`. The same machinery with singleton strings gives the
//! small complex over vertex strings.

mod expr;
pub mod linear;
mod ordered;
pub mod random;

pub use expr::{
    alternates_at, canonical_support, combination, cup as cup_expr, delta as delta_expr, difference,
    ext_d as ext_d_expr, first_difference, free_support, materialize, scaled, stored, sum, total_d as total_d_expr,
    view, CochainExpr, Expr,
};
pub(crate) use expr::{memo, same_space, Node};
pub use ordered::OrderedCochain;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::atlas::GoodAtlas;
use crate::indexcomb::{sort_with_sign, IndexString, VertexString};
use crate::morphisms::CompatibleSystem;
use crate::polyform::{PolyForm, Rational};
use crate::{Error, Result};

/// Which strings index the complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Domain {
    /// Strings over all nonempty index subsets.
    Subsets,
    /// Strings over vertices, read as strings of singletons.
    Vertices,
}

#[derive(Clone, Debug)]
pub struct Cochain {
    atlas: Arc<GoodAtlas>,
    domain: Domain,
    terms: BTreeMap<IndexString, PolyForm>,
}

impl PartialEq for Cochain {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.atlas.name() == other.atlas.name() && self.terms == other.terms
    }
}

impl Eq for Cochain {}

impl Cochain {
    pub fn zero(atlas: Arc<GoodAtlas>, domain: Domain) -> Self {
        Cochain { atlas, domain, terms: BTreeMap::new() }
    }

    pub fn atlas(&self) -> &Arc<GoodAtlas> {
        &self.atlas
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexString, &PolyForm)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(IndexString::len).max().unwrap_or(0)
    }

    /// Set the value at `s` (any order; stored canonically with its sign).
    ///
    /// Rejects repeated entries, strings outside the domain, nonempty data on
    /// empty charts and forms that are not invariant under the chart group.
    pub fn insert(&mut self, s: &IndexString, form: PolyForm) -> Result<()> {
        let atlas = self.atlas.clone();
        let (canon, sign) = sort_with_sign(s).ok_or_else(|| {
            Error::Malformed(alloc::format!("repeated entry in {}", atlas.vertices().format_string(s)))
        })?;
        if !self.domain.admits(&canon) {
            return Err(Error::Malformed("string outside the vertex domain".into()));
        }
        if form.dim() != atlas.dimension() {
            return Err(Error::DimensionMismatch { expected: atlas.dimension(), found: form.dim() });
        }
        if form.is_zero() {
            self.terms.remove(&canon);
            return Ok(());
        }
        let u = canon.union();
        if atlas.is_empty_chart(u) {
            return Err(Error::Malformed(alloc::format!("data on the empty chart {}", atlas.fmt_index(u))));
        }
        let group = atlas.group(u).expect("nonempty chart");
        if !group.is_invariant(&form) {
            return Err(Error::Malformed(alloc::format!(
                "form at {} is not invariant under its chart group",
                atlas.vertices().format_string(&canon)
            )));
        }
        self.terms.insert(canon, form.scale(&Rational::from_integer(sign.into())));
        Ok(())
    }

    pub(crate) fn insert_canonical(&mut self, s: IndexString, form: PolyForm) {
        debug_assert!(s.is_canonical());
        if form.is_zero() {
            self.terms.remove(&s);
        } else {
            self.terms.insert(s, form);
        }
    }

    /// Value at any string: sign times the canonical value, zero on repeats.
    pub fn value(&self, s: &IndexString) -> PolyForm {
        match sort_with_sign(s) {
            None => PolyForm::zero(self.atlas.dimension()),
            Some((canon, sign)) => match self.terms.get(&canon) {
                None => PolyForm::zero(self.atlas.dimension()),
                Some(f) if sign == 1 => f.clone(),
                Some(f) => -f,
            },
        }
    }

    pub fn vertex_value(&self, s: &VertexString) -> PolyForm {
        self.value(&s.to_index_string())
    }

    fn check_same(&self, other: &Cochain) -> Result<()> {
        if self.atlas.name() != other.atlas.name() {
            return Err(Error::AtlasMismatch(self.atlas.name().into(), other.atlas.name().into()));
        }
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, other: &Cochain, c: &Rational) -> Result<Cochain> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (s, f) in &other.terms {
            let mut v = out.terms.remove(s).unwrap_or_else(|| PolyForm::zero(self.atlas.dimension()));
            v.add_scaled(f, c);
            out.insert_canonical(s.clone(), v);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.add_scaled(other, &Rational::one())
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.add_scaled(other, &-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Cochain {
        let mut out = Cochain::zero(self.atlas.clone(), self.domain);
        if c.is_zero() {
            return out;
        }
        for (s, f) in &self.terms {
            out.terms.insert(s.clone(), f.scale(c));
        }
        out
    }

    pub fn neg(&self) -> Cochain {
        self.scale(&-Rational::one())
    }

    /// Bidegrees `(p, q)` that occur.
    pub fn bidegrees(&self) -> BTreeSet<(usize, usize)> {
        self.terms.iter().flat_map(|(s, f)| f.degrees().into_iter().map(move |q| (s.degree(), q))).collect()
    }

    /// Total degrees `p + q` that occur.
    pub fn total_degrees(&self) -> BTreeSet<usize> {
        self.bidegrees().into_iter().map(|(p, q)| p + q).collect()
    }

    pub fn part(&self, p: usize, q: usize) -> Cochain {
        let mut out = Cochain::zero(self.atlas.clone(), self.domain);
        for (s, f) in &self.terms {
            if s.degree() == p {
                out.insert_canonical(s.clone(), f.part(q));
            }
        }
        out
    }

    /// The component of total degree `k`.
    pub fn total_part(&self, k: usize) -> Cochain {
        let mut out = Cochain::zero(self.atlas.clone(), self.domain);
        for (s, f) in &self.terms {
            if s.degree() <= k {
                out.insert_canonical(s.clone(), f.part(k - s.degree()));
            }
        }
        out
    }

    /// Split into homogeneous components; they add back up to `self`.
    pub fn decompose_bidegree(&self) -> BTreeMap<(usize, usize), Cochain> {
        self.bidegrees().into_iter().map(|(p, q)| ((p, q), self.part(p, q))).collect()
    }

    /// Largest coefficient degree of any stored form.
    pub fn max_poly_degree(&self) -> u32 {
        self.terms.values().filter_map(PolyForm::max_poly_degree).max().unwrap_or(0)
    }

    pub fn format(&self) -> String {
        let v = self.atlas.vertices();
        let mut out = String::new();
        for (k, (s, f)) in self.terms.iter().enumerate() {
            if k > 0 {
                out.push_str("; ");
            }
            out.push_str(&v.format_string(s));
            out.push_str(": ");
            out.push_str(&alloc::format!("{} terms", f.terms().count()));
        }
        out
    }
}

/// `δ ω`.
pub fn cech_delta(c: &Cochain) -> Cochain {
    materialize(&*delta_expr(stored(c))).expect("δ only uses stored inclusions")
}

/// Chartwise exterior derivative.
pub fn exterior_d(c: &Cochain) -> Cochain {
    materialize(&*ext_d_expr(stored(c))).expect("d needs no embeddings")
}

/// `D ω = δ ω + (-1)^p d ω`.
pub fn total_d(c: &Cochain) -> Cochain {
    materialize(&*total_d_expr(stored(c))).expect("D only uses stored inclusions")
}

/// Cup product read back on canonical strings.
pub fn cup(a: &Cochain, b: &Cochain) -> Result<Cochain> {
    materialize(&*cup_expr(stored(a), stored(b))?)
}

/// An integer cochain, i.e. constant integer 0-forms on canonical strings.
#[derive(Clone, Debug)]
pub struct IntCochain {
    atlas: Arc<GoodAtlas>,
    domain: Domain,
    values: BTreeMap<IndexString, BigInt>,
}

impl PartialEq for IntCochain {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.atlas.name() == other.atlas.name() && self.values == other.values
    }
}

impl Eq for IntCochain {}

impl IntCochain {
    pub fn zero(atlas: Arc<GoodAtlas>, domain: Domain) -> Self {
        IntCochain { atlas, domain, values: BTreeMap::new() }
    }

    pub fn atlas(&self) -> &Arc<GoodAtlas> {
        &self.atlas
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> impl Iterator<Item = (&IndexString, &BigInt)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn insert(&mut self, s: &IndexString, v: BigInt) -> Result<()> {
        let (canon, sign) = sort_with_sign(s).ok_or_else(|| Error::Malformed("repeated entry".into()))?;
        if !self.domain.admits(&canon) {
            return Err(Error::Malformed("string outside the vertex domain".into()));
        }
        if v.is_zero() {
            self.values.remove(&canon);
            return Ok(());
        }
        if self.atlas.is_empty_chart(canon.union()) {
            return Err(Error::Malformed("integer data on an empty chart".into()));
        }
        self.values.insert(canon, if sign == 1 { v } else { -v });
        Ok(())
    }

    pub fn value(&self, s: &IndexString) -> BigInt {
        match sort_with_sign(s) {
            None => BigInt::zero(),
            Some((canon, sign)) => {
                let v = self.values.get(&canon).cloned().unwrap_or_default();
                if sign == 1 {
                    v
                } else {
                    -v
                }
            }
        }
    }

    /// The injection into the form complex.
    pub fn to_cochain(&self) -> Cochain {
        let mut out = Cochain::zero(self.atlas.clone(), self.domain);
        let n = self.atlas.dimension();
        for (s, v) in &self.values {
            out.insert_canonical(s.clone(), PolyForm::constant(n, Rational::from_integer(v.clone())));
        }
        out
    }

    /// Inverse of [`IntCochain::to_cochain`] on constant integer 0-form cochains.
    pub fn from_cochain(c: &Cochain) -> Option<IntCochain> {
        let mut out = IntCochain::zero(c.atlas.clone(), c.domain);
        for (s, f) in &c.terms {
            let v = f.as_constant()?;
            if !v.is_integer() {
                return None;
            }
            out.values.insert(s.clone(), v.to_integer());
        }
        Some(out)
    }

    pub fn neg(&self) -> IntCochain {
        IntCochain {
            atlas: self.atlas.clone(),
            domain: self.domain,
            values: self.values.iter().map(|(s, v)| (s.clone(), -v)).collect(),
        }
    }
}

/// A global form: a `δ`-closed cochain of bidegree `(0, q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalForm {
    cochain: Cochain,
}

impl GlobalForm {
    pub fn new(cochain: Cochain) -> Result<Self> {
        if cochain.terms().any(|(s, _)| s.degree() != 0) {
            return Err(Error::Malformed("global forms live in Čech degree zero".into()));
        }
        if !cech_delta(&cochain).is_zero() {
            return Err(Error::Malformed("local forms do not agree on overlaps".into()));
        }
        Ok(GlobalForm { cochain })
    }

    pub fn zero(atlas: Arc<GoodAtlas>, domain: Domain) -> Self {
        GlobalForm { cochain: Cochain::zero(atlas, domain) }
    }

    pub fn cochain(&self) -> &Cochain {
        &self.cochain
    }

    pub fn into_cochain(self) -> Cochain {
        self.cochain
    }
}

/// Whether `(f̃*_J ω_{f̃J})|_{Ũ_I} = f̃*_I (ω_{f̃J}|_{Ṽ_{f̃I}})` for a stored pair `J ⊆ I`.
pub fn lift_pullback_check(
    system: &CompatibleSystem,
    omega: &Cochain,
    i: crate::indexcomb::IndexSubset,
    j: crate::indexcomb::IndexSubset,
) -> Result<bool> {
    let (src, tgt) = (system.source(), system.target());
    if src.is_empty_chart(i) {
        return Ok(true);
    }
    let (fi, fj) = (system.image(i)?, system.image(j)?);
    let w = omega.value(&IndexString::single(fj));
    let left = src.restrict(&system.lifting(j)?.pullback(&w)?, i, j)?;
    let right = system.lifting(i)?.pullback(&tgt.restrict(&w, fi, fj)?)?;
    Ok(left == right)
}

#[cfg(test)]
mod tests;
