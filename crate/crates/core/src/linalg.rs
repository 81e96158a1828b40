//! Exact linear algebra over the rationals on sparse rows.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::polyform::Rational;

/// A sparse row: column index to nonzero entry.
pub type SparseRow = BTreeMap<usize, Rational>;

/// Row echelon form built incrementally; each stored row has leading entry 1.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Leading columns in increasing order.
    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &SparseRow)> {
        self.pivots.iter().map(|(&c, r)| (c, r))
    }

    /// Reduce `row` against the stored pivots.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        let mut from = 0;
        loop {
            let next = row.range(from..).map(|(&c, _)| c).find(|c| self.pivots.contains_key(c));
            let Some(c) = next else { return row };
            let factor = row.remove(&c).expect("entry present");
            for (&j, v) in self.pivots[&c].range(c + 1..) {
                let e = row.entry(j).or_insert_with(Rational::zero);
                *e -= &factor * v;
                if e.is_zero() {
                    row.remove(&j);
                }
            }
            from = c + 1;
        }
    }

    /// Insert a row; returns the new leading column if it was independent.
    pub fn insert(&mut self, row: SparseRow) -> Option<usize> {
        let row = self.reduce(row);
        let (&lead, v) = row.iter().next()?;
        let inv = v.recip();
        let row = row.into_iter().map(|(j, x)| (j, x * &inv)).collect();
        self.pivots.insert(lead, row);
        Some(lead)
    }

    /// Back-substitute with free columns set to zero. Columns at or beyond
    /// `ncols` are read as the right-hand side, entry `ncols` only.
    pub fn back_substitute(&self, ncols: usize) -> Option<Vec<Rational>> {
        if self.pivots.keys().any(|&c| c >= ncols) {
            return None;
        }
        let mut x = alloc::vec![Rational::zero(); ncols];
        for (&c, row) in self.pivots.iter().rev() {
            let mut v = row.get(&ncols).cloned().unwrap_or_else(Rational::zero);
            for (&j, a) in row.range(c + 1..ncols) {
                v -= a * &x[j];
            }
            x[c] = v;
        }
        Some(x)
    }
}

/// Any solution of the augmented system whose right-hand side sits in column `ncols`.
pub fn solve_sparse(rows: impl IntoIterator<Item = SparseRow>, ncols: usize) -> Option<Vec<Rational>> {
    let mut e = Echelon::new();
    for r in rows {
        if let Some(lead) = e.insert(r) {
            if lead >= ncols {
                return None;
            }
        }
    }
    e.back_substitute(ncols)
}

/// Basis of the right null space of the matrix with the given sparse rows.
pub fn nullspace(rows: impl IntoIterator<Item = SparseRow>, ncols: usize) -> Vec<Vec<Rational>> {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    let pivots: Vec<usize> = e.pivot_columns().collect();
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = alloc::vec![Rational::zero(); ncols];
        x[free] = Rational::one();
        for (&c, row) in e.pivots.iter().rev() {
            let mut v = Rational::zero();
            for (&j, a) in row.range(c + 1..ncols) {
                v -= a * &x[j];
            }
            x[c] = v;
        }
        basis.push(x);
    }
    basis
}

pub fn dense_to_sparse(row: &[Rational]) -> SparseRow {
    row.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v.clone())).collect()
}

/// Rank of a dense matrix.
pub fn rank(matrix: &[Vec<Rational>]) -> usize {
    let mut e = Echelon::new();
    for r in matrix {
        e.insert(dense_to_sparse(r));
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::integer;
    use alloc::vec;

    fn row(v: &[i64]) -> SparseRow {
        dense_to_sparse(&v.iter().map(|&x| integer(x)).collect::<Vec<_>>())
    }

    #[test]
    fn ranks() {
        let m = vec![vec![integer(1), integer(2)], vec![integer(2), integer(4)]];
        assert_eq!(rank(&m), 1);
        assert_eq!(rank(&[vec![integer(0), integer(1)], vec![integer(1), integer(0)]]), 2);
    }

    #[test]
    fn solving() {
        // x + y = 3, x - y = 1
        let x = solve_sparse([row(&[1, 1, 3]), row(&[1, -1, 1])], 2).unwrap();
        assert_eq!(x, vec![integer(2), integer(1)]);
        assert!(solve_sparse([row(&[1, 1, 1]), row(&[2, 2, 3])], 2).is_none());
    }

    #[test]
    fn kernels() {
        let rows = [row(&[1, 1, 0]), row(&[0, 1, 1])];
        let k = nullspace(rows.clone(), 3);
        assert_eq!(k.len(), 1);
        for r in &rows {
            let dot: Rational = r.iter().map(|(&j, a)| a * &k[0][j]).sum();
            assert!(dot.is_zero());
        }
    }
}
