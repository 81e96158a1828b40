use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{PolyForm, PolyMap, Rational};
use crate::linalg::rank;
use crate::{Error, Result};

/// Bound on the order of a single group element.
pub const DEFAULT_ORDER_BOUND: usize = 64;

/// Bound on the size of a generated group.
const MAX_GROUP_SIZE: usize = 4096;

/// An invertible rational affine map `x ↦ A x + b`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffineGroupElement {
    matrix: Vec<Vec<Rational>>,
    translation: Vec<Rational>,
}

impl AffineGroupElement {
    pub fn new(matrix: Vec<Vec<Rational>>, translation: Vec<Rational>) -> Result<Self> {
        let n = translation.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGroup("matrix and translation sizes differ".into()));
        }
        if rank(&matrix) != n {
            return Err(Error::InvalidGroup("matrix is singular".into()));
        }
        Ok(AffineGroupElement { matrix, translation })
    }

    pub fn identity(n: usize) -> Self {
        let matrix =
            (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
        AffineGroupElement { matrix, translation: alloc::vec![Rational::zero(); n] }
    }

    /// `x ↦ -x`.
    pub fn negation(n: usize) -> Self {
        let mut g = AffineGroupElement::identity(n);
        for (i, row) in g.matrix.iter_mut().enumerate() {
            row[i] = -Rational::one();
        }
        g
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    pub fn translation(&self) -> &[Rational] {
        &self.translation
    }

    pub fn is_identity(&self) -> bool {
        *self == AffineGroupElement::identity(self.dim())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineGroupElement) -> AffineGroupElement {
        let n = self.dim();
        let mut matrix = alloc::vec![alloc::vec![Rational::zero(); n]; n];
        let mut translation = self.translation.clone();
        for i in 0..n {
            for k in 0..n {
                if self.matrix[i][k].is_zero() {
                    continue;
                }
                for (m, o) in matrix[i].iter_mut().zip(&other.matrix[k]) {
                    *m += &self.matrix[i][k] * o;
                }
                translation[i] += &self.matrix[i][k] * &other.translation[k];
            }
        }
        AffineGroupElement { matrix, translation }
    }

    pub fn to_map(&self) -> PolyMap {
        PolyMap::affine(&self.matrix, &self.translation).expect("square affine data")
    }

    /// Smallest `k ≥ 1` with `g^k = id`, if at most `bound`.
    pub fn order(&self, bound: usize) -> Option<usize> {
        let mut power = self.clone();
        for k in 1..=bound {
            if power.is_identity() {
                return Some(k);
            }
            power = power.compose(self);
        }
        None
    }
}

/// A finite group of affine maps, closed under composition, identity first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    dim: usize,
    elements: Vec<AffineGroupElement>,
    maps: Vec<PolyMap>,
}

impl FiniteGroup {
    pub fn trivial(dim: usize) -> Self {
        let id = AffineGroupElement::identity(dim);
        FiniteGroup { dim, maps: alloc::vec![id.to_map()], elements: alloc::vec![id] }
    }

    /// The group generated by `generators`, each of order at most `order_bound`.
    pub fn generate(dim: usize, generators: &[AffineGroupElement], order_bound: usize) -> Result<Self> {
        for g in generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: g.dim() });
            }
            if g.order(order_bound).is_none() {
                return Err(Error::InvalidGroup(alloc::format!("a generator has order above {order_bound}")));
            }
        }
        let id = AffineGroupElement::identity(dim);
        let mut seen: BTreeSet<AffineGroupElement> = BTreeSet::new();
        seen.insert(id.clone());
        let mut elements = alloc::vec![id];
        let mut frontier = 0;
        while frontier < elements.len() {
            let current = elements[frontier].clone();
            frontier += 1;
            for g in generators {
                let next = g.compose(&current);
                if seen.insert(next.clone()) {
                    if elements.len() >= MAX_GROUP_SIZE {
                        return Err(Error::InvalidGroup("generated group is not finite".into()));
                    }
                    elements.push(next);
                }
            }
        }
        let maps = elements.iter().map(AffineGroupElement::to_map).collect();
        Ok(FiniteGroup { dim, elements, maps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn elements(&self) -> &[AffineGroupElement] {
        &self.elements
    }

    pub fn maps(&self) -> &[PolyMap] {
        &self.maps
    }

    pub fn contains(&self, g: &AffineGroupElement) -> bool {
        self.elements.contains(g)
    }

    /// Reynolds operator `(1/|G|) Σ g^* ω`.
    pub fn average(&self, form: &PolyForm) -> PolyForm {
        if self.is_trivial() {
            return form.clone();
        }
        let mut out = PolyForm::zero(form.dim());
        for m in &self.maps {
            out.add_scaled(&m.pullback(form).expect("group acts on the chart"), &Rational::one());
        }
        out.scale(&Rational::new(1.into(), self.order().into()))
    }

    pub fn is_invariant(&self, form: &PolyForm) -> bool {
        self.maps.iter().all(|m| m.pullback(form).as_ref() == Ok(form))
    }
}

/// Reynolds operator over an explicit list of group elements.
pub fn group_average(group: &[AffineGroupElement], form: &PolyForm) -> PolyForm {
    let mut out = PolyForm::zero(form.dim());
    if group.is_empty() {
        return out;
    }
    for g in group {
        out.add_scaled(&g.to_map().pullback(form).expect("group acts on the chart"), &Rational::one());
    }
    out.scale(&Rational::new(1.into(), group.len().into()))
}

/// Whether `g^* ω = ω` for every listed element.
pub fn is_invariant(group: &[AffineGroupElement], form: &PolyForm) -> bool {
    group.iter().all(|g| g.to_map().pullback(form).as_ref() == Ok(form))
}

#[cfg(test)]
mod tests {
    use super::super::{integer, Polynomial};
    use super::*;
    use alloc::vec;

    fn rotation() -> AffineGroupElement {
        AffineGroupElement::new(
            vec![vec![integer(0), integer(-1)], vec![integer(1), integer(0)]],
            vec![integer(0), integer(0)],
        )
        .unwrap()
    }

    #[test]
    fn generated_groups() {
        let z4 = FiniteGroup::generate(2, &[rotation()], DEFAULT_ORDER_BOUND).unwrap();
        assert_eq!(z4.order(), 4);
        assert!(z4.elements()[0].is_identity());
        let z2 = FiniteGroup::generate(1, &[AffineGroupElement::negation(1)], 64).unwrap();
        assert_eq!(z2.order(), 2);
        let shift = AffineGroupElement::new(vec![vec![integer(1)]], vec![integer(1)]).unwrap();
        assert!(FiniteGroup::generate(1, &[shift], 64).is_err());
        assert!(AffineGroupElement::new(vec![vec![integer(0)]], vec![integer(0)]).is_err());
    }

    #[test]
    fn averaging_examples() {
        let z2 = FiniteGroup::generate(1, &[AffineGroupElement::negation(1)], 64).unwrap();
        let x = PolyForm::function(Polynomial::var(1, 0));
        assert!(z2.average(&x).is_zero());
        assert!(!z2.is_invariant(&x));
        let xdx = PolyForm::term(1, Polynomial::var(1, 0));
        assert_eq!(z2.average(&xdx), xdx);
        let trivial = FiniteGroup::trivial(1);
        assert_eq!(trivial.average(&x), x);
        assert!(trivial.is_invariant(&x));
        assert_eq!(group_average(z2.elements(), &xdx), xdx);
        assert!(is_invariant(z2.elements(), &xdx));
    }

    #[test]
    fn rotation_invariant_form() {
        let z4 = FiniteGroup::generate(2, &[rotation()], 64).unwrap();
        let w = &PolyForm::term(0b10, Polynomial::var(2, 0)) - &PolyForm::term(0b01, Polynomial::var(2, 1));
        assert!(z4.is_invariant(&w));
        assert!(!z4.is_invariant(&PolyForm::dx(2, 0)));
    }
}
