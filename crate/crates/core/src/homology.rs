//! Integer Čech cohomology via Smith normal form.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::atlas::GoodAtlas;
use crate::cochain::linear::{global_forms, rank_of};
use crate::cochain::{canonical_support, materialize, stored, Domain, GlobalForm};
use crate::functorial::{phi_extend, ChoiceMap};
use crate::indexcomb::{sort_with_sign, IndexString};
use crate::report::{Check, Status, ValidationReport};
use crate::Result;

/// A dense integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![vec![BigInt::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    /// Rows of equal length; `cols` is needed when there are no rows.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        IntMatrix { rows: rows.len(), cols, data: rows }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        IntMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(), cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        self.data.iter().map(|r| r[j].clone()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k][j];
                    if !b.is_zero() {
                        out.data[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len(), "shape mismatch");
        self.data.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// Rows `from..` as a new matrix.
    pub fn rows_from(&self, from: usize) -> IntMatrix {
        IntMatrix::from_rows(self.data[from.min(self.rows)..].to_vec(), self.cols)
    }

    /// Columns `from..` as a new matrix.
    pub fn columns_from(&self, from: usize) -> IntMatrix {
        let from = from.min(self.cols);
        IntMatrix::from_rows(self.data.iter().map(|r| r[from..].to_vec()).collect(), self.cols - from)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(Zero::is_zero))
    }

    pub fn permute_rows(&self, order: &[usize]) -> IntMatrix {
        IntMatrix::from_rows(order.iter().map(|&i| self.data[i].clone()).collect(), self.cols)
    }
}

/// `D = U M V` with `U`, `V` unimodular and `D` diagonal, each diagonal
/// entry dividing the next. The inverses are kept for change of basis.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.data[i][i].clone()).collect()
    }
}

struct Elimination {
    d: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Elimination {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.d.data.swap(a, b);
        self.u.data.swap(a, b);
        for r in &mut self.u_inv.data {
            r.swap(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in &mut self.d.data {
            r.swap(a, b);
        }
        for r in &mut self.v.data {
            r.swap(a, b);
        }
        self.v_inv.data.swap(a, b);
    }

    /// `row_i -= q · row_t`.
    fn sub_row(&mut self, i: usize, t: usize, q: &BigInt) {
        for m in [&mut self.d, &mut self.u] {
            let (src, dst) = two_rows(&mut m.data, t, i);
            for (x, y) in dst.iter_mut().zip(src.iter()) {
                if !y.is_zero() {
                    *x -= q * y;
                }
            }
        }
        for r in &mut self.u_inv.data {
            let add = q * &r[i];
            r[t] += add;
        }
    }

    /// `col_j -= q · col_t`.
    fn sub_col(&mut self, j: usize, t: usize, q: &BigInt) {
        for m in [&mut self.d, &mut self.v] {
            for r in &mut m.data {
                let sub = q * &r[t];
                r[j] -= sub;
            }
        }
        let (src, dst) = two_rows(&mut self.v_inv.data, j, t);
        for (x, y) in dst.iter_mut().zip(src.iter()) {
            if !y.is_zero() {
                *x += q * y;
            }
        }
    }

    fn negate_row(&mut self, t: usize) {
        for x in self.d.data[t].iter_mut().chain(self.u.data[t].iter_mut()) {
            *x = -core::mem::take(x);
        }
        for r in &mut self.u_inv.data {
            r[t] = -core::mem::take(&mut r[t]);
        }
    }
}

/// Borrow row `a` immutably and row `b` mutably.
fn two_rows(data: &mut [Vec<BigInt>], a: usize, b: usize) -> (&Vec<BigInt>, &mut Vec<BigInt>) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = data.split_at_mut(b);
        (&lo[a], &mut hi[0])
    } else {
        let (lo, hi) = data.split_at_mut(a);
        (&hi[0], &mut lo[b])
    }
}

/// Quotient rounding to the nearest integer, so remainders are as small as possible.
fn nearest_quotient(a: &BigInt, p: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(p);
    let twice = &r * BigInt::from(2);
    // a = (q + 1) p + (r - p), and r - p is the smaller remainder here.
    if twice.abs() > p.abs() {
        q + 1
    } else {
        q
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let (rows, cols) = (m.rows, m.cols);
    let mut e = Elimination {
        d: m.clone(),
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        v_inv: IntMatrix::identity(cols),
    };
    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest nonzero entry of the remaining block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = &e.d.data[i][j];
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < e.d.data[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        e.swap_rows(t, pi);
        e.swap_cols(t, pj);
        loop {
            let p = e.d.data[t][t].clone();
            for i in t + 1..rows {
                if !e.d.data[i][t].is_zero() {
                    let q = nearest_quotient(&e.d.data[i][t], &p);
                    e.sub_row(i, t, &q);
                }
            }
            for j in t + 1..cols {
                if !e.d.data[t][j].is_zero() {
                    let q = nearest_quotient(&e.d.data[t][j], &p);
                    e.sub_col(j, t, &q);
                }
            }
            let mut smaller: Option<(usize, usize)> = None;
            for i in t + 1..rows {
                if !e.d.data[i][t].is_zero() && smaller.is_none_or(|(a, b)| e.d.data[i][t].abs() < e.d.data[a][b].abs())
                {
                    smaller = Some((i, t));
                }
            }
            for j in t + 1..cols {
                if !e.d.data[t][j].is_zero() && smaller.is_none_or(|(a, b)| e.d.data[t][j].abs() < e.d.data[a][b].abs())
                {
                    smaller = Some((t, j));
                }
            }
            if let Some((i, j)) = smaller {
                e.swap_rows(t, i);
                e.swap_cols(t, j);
                continue;
            }
            // Enforce divisibility by folding an offending row into the pivot row.
            let offending = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !e.d.data[i][j].is_multiple_of(&p)));
            match offending {
                Some(i) => {
                    e.sub_row(t, i, &-BigInt::one());
                }
                None => break,
            }
        }
        if e.d.data[t][t].is_negative() {
            e.negate_row(t);
        }
        t += 1;
    }
    let rank = (0..rows.min(cols)).take_while(|&i| !e.d.data[i][i].is_zero()).count();
    Snf { u: e.u, u_inv: e.u_inv, d: e.d, v: e.v, v_inv: e.v_inv, rank }
}

/// A finitely generated abelian group `Z^r ⊕ Z/t_1 ⊕ … ⊕ Z/t_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyGroup {
    pub free_rank: usize,
    /// Each at least 2, each dividing the next.
    pub torsion: Vec<BigInt>,
}

impl CohomologyGroup {
    pub fn zero() -> Self {
        CohomologyGroup { free_rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        CohomologyGroup { free_rank: rank, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for CohomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(alloc::format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(alloc::format!("Z/{t}"));
        }
        f.write_str(&parts.join(" + "))
    }
}

/// The integer coboundary `C^k → C^{k+1}` on canonical strings with nonempty chart.
pub fn coboundary_matrix(atlas: &GoodAtlas, domain: Domain, k: usize) -> IntMatrix {
    let cols = canonical_support(atlas, domain, k + 1);
    let rows = canonical_support(atlas, domain, k + 2);
    let index: BTreeMap<&IndexString, usize> = cols.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut m = IntMatrix::zero(rows.len(), cols.len());
    for (r, s) in rows.iter().enumerate() {
        for k in 0..s.len() {
            let mut face = s.entries().to_vec();
            face.remove(k);
            let face = IndexString::new(face).expect("faces of strings of length two or more are nonempty");
            if let Some(&c) = index.get(&face) {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                m.data[r][c] += sign;
            }
        }
    }
    m
}

/// `H^k`, with a basis of cocycles and a way to read off classes.
#[derive(Clone, Debug)]
pub struct CohomologyData {
    pub degree: usize,
    pub group: CohomologyGroup,
    /// Kernel basis of `δ_k`, as columns in the canonical basis of `C^k`.
    kernel: IntMatrix,
    /// Rows `rank..` of `V⁻¹` for `δ_k`: coordinates of a cocycle in `kernel`.
    kernel_coords: IntMatrix,
    /// SNF of the image of `δ_{k-1}` in kernel coordinates.
    image: Snf,
    /// Positions in `image.d` of the nontrivial summands.
    summands: Vec<usize>,
}

impl CohomologyData {
    pub fn compute(atlas: &GoodAtlas, domain: Domain, k: usize) -> Self {
        let n = canonical_support(atlas, domain, k + 1).len();
        let dk = coboundary_matrix(atlas, domain, k);
        let snf_k = smith_normal_form(&dk);
        let kernel = snf_k.v.columns_from(snf_k.rank);
        let kernel_coords = snf_k.v_inv.rows_from(snf_k.rank);
        let image_full = if k == 0 { IntMatrix::zero(n, 0) } else { coboundary_matrix(atlas, domain, k - 1) };
        let r = kernel_coords.mul(&image_full);
        let image = smith_normal_form(&r);
        let diag = image.diagonal();
        let mut summands = Vec::new();
        let mut torsion = Vec::new();
        for (i, d) in diag.iter().enumerate() {
            if !d.is_one() {
                summands.push(i);
                torsion.push(d.clone());
            }
        }
        let free_rank = kernel.cols() - image.rank;
        summands.extend(image.rank..kernel.cols());
        CohomologyData {
            degree: k,
            group: CohomologyGroup { free_rank, torsion },
            kernel,
            kernel_coords,
            image,
            summands,
        }
    }

    /// Cocycles representing the generators of each summand, torsion first.
    pub fn generators(&self) -> Vec<Vec<BigInt>> {
        self.summands
            .iter()
            .map(|&i| {
                let e: Vec<BigInt> =
                    (0..self.image.u_inv.cols()).map(|j| if j == i { BigInt::one() } else { BigInt::zero() }).collect();
                let c = self.image.u_inv.mul_vec(&e);
                self.kernel.mul_vec(&c)
            })
            .collect()
    }

    /// Class of a cocycle: residues for torsion summands, integers for free ones.
    /// `None` if `x` is not a cocycle.
    pub fn class_of(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = self.kernel_coords.mul_vec(x);
        if self.kernel.mul_vec(&c) != x {
            return None;
        }
        let z = self.image.u.mul_vec(&c);
        Some(
            self.summands
                .iter()
                .map(|&i| if i < self.image.rank { z[i].mod_floor(&self.image.d.data[i][i]) } else { z[i].clone() })
                .collect(),
        )
    }

    pub fn torsion_count(&self) -> usize {
        self.group.torsion.len()
    }
}

pub fn cech_integer_cohomology(atlas: &GoodAtlas, domain: Domain, k: usize) -> CohomologyGroup {
    CohomologyData::compute(atlas, domain, k).group
}

/// All degrees up to the support bound.
pub fn cohomology_all(atlas: &GoodAtlas, domain: Domain) -> Vec<CohomologyGroup> {
    let top = domain.alphabet(atlas).len();
    (0..top).map(|k| cech_integer_cohomology(atlas, domain, k)).collect()
}

/// The matrix of `φ̄` on integer cochains from the small complex to the big one.
pub fn phi_matrix(atlas: &GoodAtlas, phi: &ChoiceMap, k: usize) -> Result<IntMatrix> {
    let small = canonical_support(atlas, Domain::Vertices, k + 1);
    let big = canonical_support(atlas, Domain::Subsets, k + 1);
    let index: BTreeMap<&IndexString, usize> = small.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut m = IntMatrix::zero(big.len(), small.len());
    for (r, s) in big.iter().enumerate() {
        if let Some((canon, sign)) = sort_with_sign(&phi.apply(atlas, s)?) {
            if let Some(&c) = index.get(&canon) {
                m.data[r][c] = BigInt::from(sign);
            }
        }
    }
    Ok(m)
}

/// The map induced by `φ̄` on `H^k`, in the summand coordinates of both sides.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub small: CohomologyData,
    pub big: CohomologyData,
    /// One column per small summand.
    pub columns: Vec<Vec<BigInt>>,
}

pub fn induced_map(atlas: &GoodAtlas, phi: &ChoiceMap, k: usize) -> Result<InducedMap> {
    let small = CohomologyData::compute(atlas, Domain::Vertices, k);
    let big = CohomologyData::compute(atlas, Domain::Subsets, k);
    let m = phi_matrix(atlas, phi, k)?;
    let mut columns = Vec::new();
    for g in small.generators() {
        let image = m.mul_vec(&g);
        let class =
            big.class_of(&image).ok_or_else(|| crate::Error::Malformed("φ̄ of a cocycle is not a cocycle".into()))?;
        columns.push(class);
    }
    Ok(InducedMap { small, big, columns })
}

/// Largest torsion subgroup enumerated when testing bijectivity.
pub const TORSION_ENUMERATION_LIMIT: usize = 4096;

impl InducedMap {
    /// `Some(true)` if an isomorphism, `None` if torsion is too large to decide.
    pub fn is_isomorphism(&self) -> Option<bool> {
        if self.small.group != self.big.group {
            return Some(false);
        }
        let t = self.small.torsion_count();
        let f = self.small.group.free_rank;
        // Free block: rows and columns t.. must be unimodular.
        let free = IntMatrix::from_rows(
            (t..t + f).map(|i| (t..t + f).map(|j| self.columns[j][i].clone()).collect()).collect(),
            f,
        );
        let snf = smith_normal_form(&free);
        if snf.rank != f || !snf.diagonal().iter().all(One::is_one) {
            return Some(false);
        }
        // Torsion block: injective on the finite group, which has the same order as the target.
        let orders: Vec<BigInt> = self.small.group.torsion.clone();
        let mut total = 1usize;
        for o in &orders {
            let o: usize = o.try_into().ok()?;
            total = total.checked_mul(o)?;
            if total > TORSION_ENUMERATION_LIMIT {
                return None;
            }
        }
        let mut element = vec![BigInt::zero(); t];
        for _ in 1..total {
            // Advance the mixed-radix counter.
            for (x, o) in element.iter_mut().zip(&orders) {
                *x += 1;
                if *x < *o {
                    break;
                }
                *x = BigInt::zero();
            }
            let image: Vec<BigInt> = (0..t)
                .map(|i| {
                    let s: BigInt = (0..t).map(|j| &self.columns[j][i] * &element[j]).sum();
                    s.mod_floor(&orders[i])
                })
                .collect();
            if image.iter().all(Zero::is_zero) {
                return Some(false);
            }
        }
        Some(true)
    }
}

/// Checks that `φ̄` is a quasi-isomorphism from the small complex to the big one.
pub fn compare_quasi_iso(
    atlas: &alloc::sync::Arc<GoodAtlas>,
    phi: &ChoiceMap,
    max_deg: u32,
) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    let top = Domain::Subsets.alphabet(atlas).len();

    let mut failure = None;
    let mut probes = 0;
    for k in 0..top {
        let m = phi_matrix(atlas, phi, k)?;
        probes += m.cols();
        if smith_normal_form(&m).rank != m.cols() {
            failure.get_or_insert_with(|| alloc::format!("φ̄ has a kernel in degree {k}"));
        }
    }
    report.push(Check::from_outcome("appendix.phi-injective", "φ̄ injective on integer cochains", probes, failure));

    for k in 0..top {
        let map = induced_map(atlas, phi, k)?;
        if map.small.group.is_zero() && map.big.group.is_zero() {
            continue;
        }
        let name = alloc::format!("appendix.cohomology-iso[H{k}]");
        let detail = alloc::format!("{} -> {}", map.small.group, map.big.group);
        let status = match map.is_isomorphism() {
            Some(true) => Status::Pass,
            Some(false) => Status::Fail,
            None => Status::Unknown,
        };
        report.push(Check::new(
            &name,
            "φ̄ induces isomorphisms on integer cohomology",
            status,
            map.columns.len(),
            detail,
        ));
    }

    let mut failure = None;
    let mut probes = 0;
    for q in 0..=atlas.dimension() {
        let small = global_forms(atlas, Domain::Vertices, q, max_deg);
        let big = global_forms(atlas, Domain::Subsets, q, max_deg);
        let mut images = Vec::new();
        for g in &small {
            probes += 1;
            let image = materialize(&*phi_extend(phi, stored(g.cochain()))?)?;
            if image.max_poly_degree() > max_deg {
                failure.get_or_insert_with(|| alloc::format!("φ̄ raises polynomial degree in form degree {q}"));
            }
            if GlobalForm::new(image.clone()).is_err() {
                failure.get_or_insert_with(|| alloc::format!("φ̄ of a global {q}-form is not global"));
            }
            images.push(image);
        }
        let r = rank_of(&images);
        if r != small.len() || small.len() != big.len() {
            failure.get_or_insert_with(|| {
                alloc::format!("form degree {q}: {} small, {} big, image rank {r}", small.len(), big.len())
            });
        }
    }
    report.push(Check::from_outcome(
        "appendix.global-forms-iso",
        "φ̄ restricts to a bijection of global forms",
        probes,
        failure,
    ));
    Ok(report)
}
