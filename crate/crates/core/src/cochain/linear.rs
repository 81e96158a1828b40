//! Finite coordinate systems on truncated cochain spaces.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{canonical_support, cech_delta, Cochain, Domain, GlobalForm};
use crate::atlas::GoodAtlas;
use crate::indexcomb::IndexString;
use crate::linalg::{nullspace, Echelon, SparseRow};
use crate::polyform::{FiniteGroup, Monomial, PolyForm, Polynomial, Rational};

/// One scalar coordinate of a cochain: string, basis covector mask, monomial.
pub type Coord = (IndexString, u32, Monomial);

/// Assigns column indices to coordinates on first use.
#[derive(Clone, Debug, Default)]
pub struct Coordinates {
    index: BTreeMap<Coord, usize>,
}

impl Coordinates {
    pub fn new() -> Self {
        Coordinates::default()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn index_of(&mut self, c: Coord) -> usize {
        let next = self.index.len();
        *self.index.entry(c).or_insert(next)
    }

    /// Existing index, without allocating a new one.
    pub fn get(&self, c: &Coord) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn vectorize(&mut self, c: &Cochain) -> SparseRow {
        self.vectorize_terms(c.terms())
    }

    pub fn vectorize_terms<'a>(&mut self, terms: impl Iterator<Item = (&'a IndexString, &'a PolyForm)>) -> SparseRow {
        let mut row = SparseRow::new();
        for (s, f) in terms {
            for (mask, p) in f.terms() {
                for (e, x) in p.terms() {
                    let j = self.index_of((s.clone(), mask, e.clone()));
                    row.insert(j, x.clone());
                }
            }
        }
        row
    }
}

/// Exponent vectors in `n` variables of total degree at most `max_deg`.
pub fn monomials(n: usize, max_deg: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = alloc::vec![0u32; n];
    fn rec(i: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == current.len() {
            out.push(current.clone());
            return;
        }
        for k in 0..=left {
            current[i] = k;
            rec(i + 1, left - k, current, out);
        }
        current[i] = 0;
    }
    rec(0, max_deg, &mut current, &mut out);
    out
}

/// Monomial `q`-forms `x^e dx_K` in `n` variables with `|e| ≤ max_deg`.
pub fn monomial_forms(n: usize, q: usize, max_deg: u32) -> Vec<PolyForm> {
    let masks: Vec<u32> = (0u32..(1 << n)).filter(|m| m.count_ones() as usize == q).collect();
    let mut out = Vec::new();
    for mask in masks {
        for e in monomials(n, max_deg) {
            out.push(PolyForm::term(mask, Polynomial::monomial(e, Rational::one())));
        }
    }
    out
}

fn form_row(f: &PolyForm, coords: &mut BTreeMap<(u32, Monomial), usize>) -> SparseRow {
    let mut row = SparseRow::new();
    for (mask, p) in f.terms() {
        for (e, x) in p.terms() {
            let next = coords.len();
            let j = *coords.entry((mask, e.clone())).or_insert(next);
            row.insert(j, x.clone());
        }
    }
    row
}

/// A basis of the `group`-invariant `q`-forms with coefficient degree at most `max_deg`.
pub fn invariant_forms(group: &FiniteGroup, q: usize, max_deg: u32) -> Vec<PolyForm> {
    let mut coords = BTreeMap::new();
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for f in monomial_forms(group.dim(), q, max_deg) {
        let avg = group.average(&f);
        if avg.is_zero() {
            continue;
        }
        if ech.insert(form_row(&avg, &mut coords)).is_some() {
            out.push(avg);
        }
    }
    out
}

/// A basis of the truncated space of `(p, q)` cochains: one invariant form on one string each.
pub fn cochain_basis(atlas: &Arc<GoodAtlas>, domain: Domain, p: usize, q: usize, max_deg: u32) -> Vec<Cochain> {
    let mut out = Vec::new();
    let mut per_chart: BTreeMap<crate::indexcomb::IndexSubset, Vec<PolyForm>> = BTreeMap::new();
    for s in canonical_support(atlas, domain, p + 1) {
        let u = s.union();
        let forms =
            per_chart.entry(u).or_insert_with(|| invariant_forms(atlas.group(u).expect("nonempty chart"), q, max_deg));
        for f in forms.iter() {
            let mut c = Cochain::zero(atlas.clone(), domain);
            c.insert_canonical(s.clone(), f.clone());
            out.push(c);
        }
    }
    out
}

/// Linear combination of cochains.
pub fn combine(atlas: &Arc<GoodAtlas>, domain: Domain, basis: &[Cochain], coeffs: &[Rational]) -> Cochain {
    let mut out = Cochain::zero(atlas.clone(), domain);
    for (b, c) in basis.iter().zip(coeffs) {
        if !c.is_zero() {
            out = out.add_scaled(b, c).expect("basis shares the atlas");
        }
    }
    out
}

/// A basis of the global `q`-forms with coefficient degree at most `max_deg`.
pub fn global_forms(atlas: &Arc<GoodAtlas>, domain: Domain, q: usize, max_deg: u32) -> Vec<GlobalForm> {
    let basis = cochain_basis(atlas, domain, 0, q, max_deg);
    let mut coords = Coordinates::new();
    // Rows of the δ matrix are coordinates of the image, columns basis elements.
    let mut rows: BTreeMap<usize, SparseRow> = BTreeMap::new();
    for (j, b) in basis.iter().enumerate() {
        for (i, x) in coords.vectorize(&cech_delta(b)) {
            rows.entry(i).or_default().insert(j, x);
        }
    }
    nullspace(rows.into_values(), basis.len())
        .into_iter()
        .map(|k| GlobalForm::new(combine(atlas, domain, &basis, &k)).expect("kernel vectors are δ-closed"))
        .collect()
}

/// Rank of a family of cochains.
pub fn rank_of(cochains: &[Cochain]) -> usize {
    let mut coords = Coordinates::new();
    let mut ech = Echelon::new();
    for c in cochains {
        ech.insert(coords.vectorize(c));
    }
    ech.rank()
}
