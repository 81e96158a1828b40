//! Seeded random invariant cochains.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::linear::monomials;
use super::{canonical_support, free_support, Cochain, Domain, IntCochain, OrderedCochain};
use crate::atlas::GoodAtlas;
use crate::indexcomb::IndexString;
use crate::polyform::{PolyForm, Polynomial, Rational};

/// Deterministic generator of random forms and cochains.
pub struct CochainSampler {
    rng: ChaCha8Rng,
    pub max_deg: u32,
}

impl CochainSampler {
    pub fn new(seed: u64, max_deg: u32) -> Self {
        CochainSampler { rng: ChaCha8Rng::seed_from_u64(seed), max_deg }
    }

    fn coefficient(&mut self) -> Rational {
        let n: i64 = self.rng.gen_range(1..=4) * if self.rng.gen_bool(0.5) { 1 } else { -1 };
        let d: i64 = if self.rng.gen_bool(0.25) { self.rng.gen_range(2..=3) } else { 1 };
        Rational::new(n.into(), d.into())
    }

    /// A sparse random `q`-form on `R^n`.
    pub fn form(&mut self, n: usize, q: usize) -> PolyForm {
        let mut out = PolyForm::zero(n);
        for mask in (0u32..(1 << n)).filter(|m| m.count_ones() as usize == q) {
            for e in monomials(n, self.max_deg) {
                if self.rng.gen_bool(0.4) {
                    let c = self.coefficient();
                    out.add_term(mask, &Polynomial::monomial(e, c), &Rational::from_integer(1.into()));
                }
            }
        }
        out
    }

    /// Random invariant components in each listed bidegree.
    pub fn cochain(&mut self, atlas: &Arc<GoodAtlas>, domain: Domain, bidegrees: &[(usize, usize)]) -> Cochain {
        let mut out = Cochain::zero(atlas.clone(), domain);
        let n = atlas.dimension();
        for &(p, q) in bidegrees {
            if q > n {
                continue;
            }
            for s in canonical_support(atlas, domain, p + 1) {
                if !self.rng.gen_bool(0.75) {
                    continue;
                }
                let group = atlas.group(s.union()).expect("nonempty chart");
                let f = group.average(&self.form(n, q));
                let mut v = out.value(&s);
                v.add_scaled(&f, &Rational::from_integer(1.into()));
                out.insert_canonical(s, v);
            }
        }
        out
    }

    /// A random integer cochain in Čech degree `p`.
    pub fn int_cochain(&mut self, atlas: &Arc<GoodAtlas>, domain: Domain, p: usize) -> IntCochain {
        let mut out = IntCochain::zero(atlas.clone(), domain);
        for s in canonical_support(atlas, domain, p + 1) {
            let v: i64 = self.rng.gen_range(-3..=3);
            out.insert(&s, BigInt::from(v)).expect("canonical string on a nonempty chart");
        }
        out
    }

    /// Random invariant values on words, with no alternation.
    ///
    /// At most about `max_words` words carry data in each bidegree.
    pub fn ordered_cochain(
        &mut self,
        atlas: &Arc<GoodAtlas>,
        domain: Domain,
        bidegrees: &[(usize, usize)],
        max_words: usize,
    ) -> OrderedCochain {
        let mut out = OrderedCochain::zero(atlas.clone(), domain);
        let n = atlas.dimension();
        for &(p, q) in bidegrees {
            if q > n {
                continue;
            }
            let words = free_support(atlas, domain, p + 1, usize::MAX);
            let keep = (max_words as f64 / words.len().max(1) as f64).min(1.0);
            for w in words {
                if !self.rng.gen_bool(keep) {
                    continue;
                }
                let group = atlas.group(w.union()).expect("nonempty chart");
                let mut v = out.get(&w);
                v.add_scaled(&group.average(&self.form(n, q)), &Rational::from_integer(1.into()));
                out.insert(&w, v).expect("averaged forms are invariant");
            }
        }
        out
    }

    /// Up to `count` distinct random words of length `len` with nonempty chart.
    pub fn words(&mut self, atlas: &GoodAtlas, domain: Domain, len: usize, count: usize) -> Vec<IndexString> {
        let alphabet = domain.alphabet(atlas);
        let mut out = alloc::collections::BTreeSet::new();
        if alphabet.is_empty() {
            return Vec::new();
        }
        for _ in 0..count * 4 {
            if out.len() >= count {
                break;
            }
            let w: Vec<_> = (0..len).map(|_| alphabet[self.rng.gen_range(0..alphabet.len())]).collect();
            let w = IndexString::new(w).expect("len is positive");
            if !atlas.is_empty_chart(w.union()) {
                out.insert(w);
            }
        }
        out.into_iter().collect()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn flip(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }
}
