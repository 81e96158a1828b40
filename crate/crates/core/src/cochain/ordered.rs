//! Ordered cochains: values on arbitrary words, no alternation imposed.
//!
//! Cup products and the homotopy operators leave the alternating subcomplex,
//! so sparks and their witnesses are kept here. An alternating cochain embeds
//! by reading it at every word.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use super::{free_support, Cochain, CochainExpr, Domain, GlobalForm, IntCochain};
use crate::atlas::GoodAtlas;
use crate::indexcomb::IndexString;
use crate::polyform::{PolyForm, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct OrderedCochain {
    atlas: Arc<GoodAtlas>,
    domain: Domain,
    terms: BTreeMap<IndexString, PolyForm>,
}

impl PartialEq for OrderedCochain {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.atlas.name() == other.atlas.name() && self.terms == other.terms
    }
}

impl Eq for OrderedCochain {}

impl OrderedCochain {
    pub fn zero(atlas: Arc<GoodAtlas>, domain: Domain) -> Self {
        OrderedCochain { atlas, domain, terms: BTreeMap::new() }
    }

    /// Evaluate `e` on every word of length at most `max_len`.
    pub fn tabulate(e: &dyn CochainExpr, max_len: usize) -> Result<Self> {
        let mut out = OrderedCochain::zero(e.atlas().clone(), e.domain());
        for len in 1..=max_len {
            for s in free_support(e.atlas(), e.domain(), len, usize::MAX) {
                let v = e.value(&s)?;
                if !v.is_zero() {
                    out.terms.insert(s, v);
                }
            }
        }
        Ok(out)
    }

    /// The alternating extension of `c` to words of length at most `max_len`.
    pub fn from_cochain(c: &Cochain, max_len: usize) -> Self {
        OrderedCochain::tabulate(c, max_len).expect("stored values need no embeddings")
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

    pub fn stored_max_len(&self) -> usize {
        self.terms.keys().map(IndexString::len).max().unwrap_or(0)
    }

    /// Set the value at the word `s`, checking invariance under the chart group.
    pub fn insert(&mut self, s: &IndexString, form: PolyForm) -> Result<()> {
        if !self.domain.admits(s) {
            return Err(Error::Malformed("string outside the vertex domain".into()));
        }
        if form.dim() != self.atlas.dimension() {
            return Err(Error::DimensionMismatch { expected: self.atlas.dimension(), found: form.dim() });
        }
        if form.is_zero() {
            self.terms.remove(s);
            return Ok(());
        }
        let u = s.union();
        let group =
            self.atlas.group(u).filter(|_| !self.atlas.is_empty_chart(u)).ok_or_else(|| {
                Error::Malformed(alloc::format!("data on the empty chart {}", self.atlas.fmt_index(u)))
            })?;
        if !group.is_invariant(&form) {
            return Err(Error::Malformed(alloc::format!(
                "form at {} is not invariant under its chart group",
                self.atlas.vertices().format_string(s)
            )));
        }
        self.terms.insert(s.clone(), form);
        Ok(())
    }

    pub fn get(&self, s: &IndexString) -> PolyForm {
        self.terms.get(s).cloned().unwrap_or_else(|| PolyForm::zero(self.atlas.dimension()))
    }

    fn check_same(&self, other: &OrderedCochain) -> Result<()> {
        if self.atlas.name() != other.atlas.name() {
            return Err(Error::AtlasMismatch(self.atlas.name().into(), other.atlas.name().into()));
        }
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    pub fn add_scaled(&self, other: &OrderedCochain, c: &Rational) -> Result<OrderedCochain> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (s, f) in &other.terms {
            let mut v = out.get(s);
            v.add_scaled(f, c);
            if v.is_zero() {
                out.terms.remove(s);
            } else {
                out.terms.insert(s.clone(), v);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &OrderedCochain) -> Result<OrderedCochain> {
        self.add_scaled(other, &Rational::one())
    }

    pub fn sub(&self, other: &OrderedCochain) -> Result<OrderedCochain> {
        self.add_scaled(other, &-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> OrderedCochain {
        let mut out = OrderedCochain::zero(self.atlas.clone(), self.domain);
        for (s, f) in &self.terms {
            let v = f.scale(c);
            if !v.is_zero() {
                out.terms.insert(s.clone(), v);
            }
        }
        out
    }

    pub fn neg(&self) -> OrderedCochain {
        self.scale(&-Rational::one())
    }

    pub fn bidegrees(&self) -> BTreeSet<(usize, usize)> {
        self.terms.iter().flat_map(|(s, f)| f.degrees().into_iter().map(move |q| (s.degree(), q))).collect()
    }

    pub fn total_degrees(&self) -> BTreeSet<usize> {
        self.bidegrees().into_iter().map(|(p, q)| p + q).collect()
    }

    pub fn part(&self, p: usize, q: usize) -> OrderedCochain {
        let mut out = OrderedCochain::zero(self.atlas.clone(), self.domain);
        for (s, f) in &self.terms {
            if s.degree() == p {
                let v = f.part(q);
                if !v.is_zero() {
                    out.terms.insert(s.clone(), v);
                }
            }
        }
        out
    }

    /// Whether every value is a constant integer function.
    pub fn is_integral(&self) -> bool {
        self.integer_values().is_some()
    }

    pub fn integer_values(&self) -> Option<BTreeMap<IndexString, BigInt>> {
        let mut out = BTreeMap::new();
        for (s, f) in &self.terms {
            let c = f.as_constant()?;
            if !c.is_integer() {
                return None;
            }
            out.insert(s.clone(), c.to_integer());
        }
        Some(out)
    }

    /// The alternating cochain agreeing with `self` on every word, if there is one.
    pub fn to_alternating(&self) -> Option<Cochain> {
        let mut out = Cochain::zero(self.atlas.clone(), self.domain);
        for (s, f) in &self.terms {
            if s.is_canonical() {
                out.insert_canonical(s.clone(), f.clone());
            }
        }
        let back = OrderedCochain::from_cochain(&out, self.stored_max_len());
        (back == *self).then_some(out)
    }

    /// Read a global form off the Čech degree zero part.
    pub fn to_global_form(&self) -> Result<GlobalForm> {
        let c = self.to_alternating().ok_or_else(|| Error::Malformed("not alternating".into()))?;
        GlobalForm::new(c)
    }

    /// Read an integer cochain, if `self` is alternating and integral.
    pub fn to_int_cochain(&self) -> Option<IntCochain> {
        IntCochain::from_cochain(&self.to_alternating()?)
    }

    pub fn format(&self) -> String {
        let v = self.atlas.vertices();
        let mut out = String::new();
        for (s, f) in &self.terms {
            if !out.is_empty() {
                out.push_str("; ");
            }
            out.push_str(&v.format_string(s));
            out.push_str(": ");
            match f.as_constant() {
                Some(c) => out.push_str(&crate::polyform::format_rational(&c)),
                None => out.push_str(&alloc::format!("{} terms", f.terms().count())),
            }
        }
        out
    }
}

impl CochainExpr for OrderedCochain {
    fn atlas(&self) -> &Arc<GoodAtlas> {
        &self.atlas
    }

    fn domain(&self) -> Domain {
        self.domain
    }

    fn max_len(&self) -> usize {
        self.stored_max_len()
    }

    fn value(&self, s: &IndexString) -> Result<PolyForm> {
        Ok(self.get(s))
    }
}

impl CochainExpr for Cochain {
    fn atlas(&self) -> &Arc<GoodAtlas> {
        Cochain::atlas(self)
    }

    fn domain(&self) -> Domain {
        Cochain::domain(self)
    }

    fn max_len(&self) -> usize {
        Cochain::max_len(self)
    }

    fn value(&self, s: &IndexString) -> Result<PolyForm> {
        Ok(Cochain::value(self, s))
    }
}
