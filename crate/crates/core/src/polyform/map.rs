use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{PolyForm, Polynomial, Rational};
use crate::{Error, Result};

/// A polynomial map `R^m -> R^n`, given by `n` components in `m` variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolyMap {
    source_dim: usize,
    components: Vec<Polynomial>,
    identity: bool,
}

impl PolyMap {
    pub fn new(source_dim: usize, components: Vec<Polynomial>) -> Result<Self> {
        if let Some(bad) = components.iter().find(|p| p.nvars() != source_dim) {
            return Err(Error::DimensionMismatch { expected: source_dim, found: bad.nvars() });
        }
        let identity = components.len() == source_dim
            && components.iter().enumerate().all(|(i, p)| *p == Polynomial::var(source_dim, i));
        Ok(PolyMap { source_dim, components, identity })
    }

    pub fn identity(dim: usize) -> Self {
        PolyMap { source_dim: dim, components: (0..dim).map(|i| Polynomial::var(dim, i)).collect(), identity: true }
    }

    /// `x ↦ A x + b`.
    pub fn affine(matrix: &[Vec<Rational>], translation: &[Rational]) -> Result<Self> {
        let m = matrix.first().map_or(0, Vec::len);
        if matrix.len() != translation.len() {
            return Err(Error::DimensionMismatch { expected: matrix.len(), found: translation.len() });
        }
        let mut components = Vec::with_capacity(matrix.len());
        for (row, b) in matrix.iter().zip(translation) {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, found: row.len() });
            }
            let mut p = Polynomial::constant(m, b.clone());
            for (j, a) in row.iter().enumerate() {
                p.add_assign_scaled(&Polynomial::var(m, j), a);
            }
            components.push(p);
        }
        PolyMap::new(m, components)
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap> {
        if inner.target_dim() != self.source_dim {
            return Err(Error::DimensionMismatch { expected: self.source_dim, found: inner.target_dim() });
        }
        if self.identity {
            return Ok(inner.clone());
        }
        if inner.identity {
            return Ok(self.clone());
        }
        let components = self.components.iter().map(|p| p.compose(&inner.components, inner.source_dim)).collect();
        PolyMap::new(inner.source_dim, components)
    }

    pub fn eval(&self, point: &[Rational]) -> Vec<Rational> {
        self.components.iter().map(|p| p.eval(point)).collect()
    }

    /// `(A, b)` when every component has degree at most one.
    pub fn as_affine(&self) -> Option<(Vec<Vec<Rational>>, Vec<Rational>)> {
        let m = self.source_dim;
        let mut matrix = Vec::with_capacity(self.components.len());
        let mut translation = Vec::with_capacity(self.components.len());
        for p in &self.components {
            if p.degree().unwrap_or(0) > 1 {
                return None;
            }
            let mut row = alloc::vec![Rational::zero(); m];
            let mut b = Rational::zero();
            for (e, c) in p.terms() {
                match e.iter().position(|&k| k == 1) {
                    Some(j) => row[j] = c.clone(),
                    None => b = c.clone(),
                }
            }
            matrix.push(row);
            translation.push(b);
        }
        Some((matrix, translation))
    }

    /// Partial derivatives `∂φ_i/∂x_j`.
    pub fn jacobian(&self) -> Vec<Vec<Polynomial>> {
        self.components.iter().map(|p| (0..self.source_dim).map(|j| p.derivative(j)).collect()).collect()
    }

    /// `φ^* ω` for `ω` on the target patch.
    pub fn pullback(&self, form: &PolyForm) -> Result<PolyForm> {
        if form.dim() != self.target_dim() {
            return Err(Error::DimensionMismatch { expected: self.target_dim(), found: form.dim() });
        }
        if self.identity {
            return Ok(form.clone());
        }
        let m = self.source_dim;
        let differentials: Vec<PolyForm> =
            self.components.iter().map(|p| PolyForm::function(p.clone()).exterior_d()).collect();
        // Wedges of the component differentials, built up one covector at a time.
        let mut wedges: BTreeMap<u32, PolyForm> = BTreeMap::new();
        wedges.insert(0, PolyForm::constant(m, Rational::one()));
        let mut out = PolyForm::zero(m);
        for (mask, f) in form.terms() {
            let dphi = wedge_of(mask, &differentials, &mut wedges, m);
            if dphi.is_zero() {
                continue;
            }
            let g = f.compose(&self.components, m);
            out.add_scaled(&dphi.mul_function(&g), &Rational::one());
        }
        Ok(out)
    }
}

fn wedge_of(mask: u32, differentials: &[PolyForm], cache: &mut BTreeMap<u32, PolyForm>, m: usize) -> PolyForm {
    if let Some(w) = cache.get(&mask) {
        return w.clone();
    }
    let top = 31 - mask.leading_zeros();
    let rest = mask & !(1 << top);
    let w = wedge_of(rest, differentials, cache, m)
        .wedge(&differentials[top as usize])
        .expect("component differentials share the source dimension");
    debug_assert_eq!(w.dim(), m);
    cache.insert(mask, w.clone());
    w
}

#[cfg(test)]
mod tests {
    use super::super::integer;
    use super::*;
    use alloc::vec;

    #[test]
    fn pullback_examples() {
        // t ↦ t^2 pulls dx back to 2t dt.
        let sq = PolyMap::new(1, vec![Polynomial::monomial(vec![2], integer(1))]).unwrap();
        let dt = sq.pullback(&PolyForm::dx(1, 0)).unwrap();
        assert_eq!(dt, PolyForm::term(1, Polynomial::var(1, 0).scale(&integer(2))));
        // Rotation preserves x dy - y dx.
        let rot =
            PolyMap::affine(&[vec![integer(0), integer(-1)], vec![integer(1), integer(0)]], &[integer(0), integer(0)])
                .unwrap();
        let w = &PolyForm::term(0b10, Polynomial::var(2, 0)) - &PolyForm::term(0b01, Polynomial::var(2, 1));
        assert_eq!(rot.pullback(&w).unwrap(), w);
        assert_eq!(PolyMap::identity(2).pullback(&w).unwrap(), w);
    }

    #[test]
    fn affine_round_trip() {
        let a = vec![vec![integer(2), integer(1)], vec![integer(0), integer(-1)]];
        let b = vec![integer(3), integer(0)];
        let m = PolyMap::affine(&a, &b).unwrap();
        assert_eq!(m.as_affine(), Some((a, b)));
        assert!(!m.is_identity());
        assert!(PolyMap::affine(&[vec![integer(1)]], &[integer(0)]).unwrap().is_identity());
    }

    #[test]
    fn composition_order() {
        let shift = PolyMap::affine(&[vec![integer(1)]], &[integer(1)]).unwrap();
        let double = PolyMap::affine(&[vec![integer(2)]], &[integer(0)]).unwrap();
        // shift ∘ double: x ↦ 2x + 1
        let c = shift.compose(&double).unwrap();
        assert_eq!(c.eval(&[integer(1)]), vec![integer(3)]);
    }
}
