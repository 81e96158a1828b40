use alloc::collections::BTreeMap;
use core::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use super::{Polynomial, Rational};
use crate::{Error, Result};

/// Largest supported chart dimension (basis covectors are a 32-bit mask).
pub const MAX_DIMENSION: usize = 32;

/// A differential form on a patch of `R^n` with polynomial coefficients.
///
/// Keys are bitmasks of the basis covectors, so `0b101` is `dx_0 ∧ dx_2`.
/// Forms need not be homogeneous; the degree of a term is the popcount of
/// its key.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolyForm {
    dim: usize,
    terms: BTreeMap<u32, Polynomial>,
}

/// Sign of `dx_a ∧ dx_b` relative to `dx_{a ∪ b}`, or 0 if the masks overlap.
pub fn wedge_sign(a: u32, b: u32) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> j).count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

impl PolyForm {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIMENSION, "chart dimension too large");
        PolyForm { dim, terms: BTreeMap::new() }
    }

    /// The 0-form `f`.
    pub fn function(f: Polynomial) -> Self {
        PolyForm::term(0, f)
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        PolyForm::function(Polynomial::constant(dim, c))
    }

    /// `f dx_{mask}`.
    pub fn term(mask: u32, f: Polynomial) -> Self {
        let mut out = PolyForm::zero(f.nvars());
        assert!(mask >> out.dim == 0, "basis covector out of range");
        if !f.is_zero() {
            out.terms.insert(mask, f);
        }
        out
    }

    /// The 1-form `dx_i`.
    pub fn dx(dim: usize, i: usize) -> Self {
        PolyForm::term(1 << i, Polynomial::one(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Polynomial)> {
        self.terms.iter().map(|(&k, p)| (k, p))
    }

    pub fn coefficient(&self, mask: u32) -> Option<&Polynomial> {
        self.terms.get(&mask)
    }

    /// Degree if homogeneous; `None` for the zero form or mixed degrees.
    pub fn degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(|k| k.count_ones() as usize);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// The degree-`q` part.
    pub fn part(&self, q: usize) -> PolyForm {
        PolyForm {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.count_ones() as usize == q)
                .map(|(&k, p)| (k, p.clone()))
                .collect(),
        }
    }

    /// Form degrees that occur, ascending.
    pub fn degrees(&self) -> alloc::vec::Vec<usize> {
        let mut d: alloc::vec::Vec<usize> = self.terms.keys().map(|k| k.count_ones() as usize).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Value of a constant 0-form.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&0).and_then(Polynomial::as_constant),
            _ => None,
        }
    }

    /// Largest total degree of any coefficient.
    pub fn max_poly_degree(&self) -> Option<u32> {
        self.terms.values().filter_map(Polynomial::degree).max()
    }

    fn check_dim(&self, other: &PolyForm) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn add_term(&mut self, mask: u32, f: &Polynomial, c: &Rational) {
        if f.is_zero() || c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mask).or_insert_with(|| Polynomial::zero(self.dim));
        entry.add_assign_scaled(f, c);
        if entry.is_zero() {
            self.terms.remove(&mask);
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &PolyForm, c: &Rational) {
        assert_eq!(self.dim, other.dim, "forms on patches of different dimension");
        for (&k, p) in &other.terms {
            self.add_term(k, p, c);
        }
    }

    pub fn scale(&self, c: &Rational) -> PolyForm {
        let mut out = PolyForm::zero(self.dim);
        out.add_scaled(self, c);
        out
    }

    /// Multiply every coefficient by the polynomial `f`.
    pub fn mul_function(&self, f: &Polynomial) -> PolyForm {
        let mut out = PolyForm::zero(self.dim);
        for (&k, p) in &self.terms {
            out.add_term(k, &p.mul_poly(f), &Rational::one());
        }
        out
    }

    pub fn wedge(&self, other: &PolyForm) -> Result<PolyForm> {
        self.check_dim(other)?;
        let mut out = PolyForm::zero(self.dim);
        for (&a, p) in &self.terms {
            for (&b, q) in &other.terms {
                let s = wedge_sign(a, b);
                if s != 0 {
                    out.add_term(a | b, &p.mul_poly(q), &Rational::from_integer(s.into()));
                }
            }
        }
        Ok(out)
    }

    pub fn exterior_d(&self) -> PolyForm {
        let mut out = PolyForm::zero(self.dim);
        for (&k, p) in &self.terms {
            for i in 0..self.dim {
                if k & (1 << i) != 0 {
                    continue;
                }
                let dp = p.derivative(i);
                if dp.is_zero() {
                    continue;
                }
                let s = wedge_sign(1 << i, k);
                out.add_term(k | 1 << i, &dp, &Rational::from_integer(s.into()));
            }
        }
        out
    }
}

impl Add for &PolyForm {
    type Output = PolyForm;
    fn add(self, rhs: &PolyForm) -> PolyForm {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &PolyForm {
    type Output = PolyForm;
    fn sub(self, rhs: &PolyForm) -> PolyForm {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &PolyForm {
    type Output = PolyForm;
    fn neg(self) -> PolyForm {
        self.scale(&-Rational::one())
    }
}
