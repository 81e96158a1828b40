//! Vertex sets, the lattice of nonempty index subsets, and strings over it.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Write as _;

use crate::{Error, Result};

/// Maximum number of vertices; subsets are stored as 64-bit masks.
pub const MAX_VERTICES: usize = 63;

/// A finite ordered set of vertex labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    labels: Vec<String>,
}

impl VertexSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::Malformed("vertex set is empty".into()));
        }
        if labels.len() > MAX_VERTICES {
            return Err(Error::Malformed(alloc::format!("at most {MAX_VERTICES} vertices are supported")));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Malformed(alloc::format!("duplicate vertex `{l}`")));
            }
        }
        Ok(VertexSet { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, position: usize) -> &str {
        &self.labels[position]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// The subset with the given member labels.
    pub fn subset<S: AsRef<str>>(&self, members: &[S]) -> Result<IndexSubset> {
        let mut bits = 0u64;
        for m in members {
            let p = self.position(m.as_ref()).ok_or_else(|| Error::UnknownVertex(m.as_ref().to_string()))?;
            bits |= 1 << p;
        }
        IndexSubset::from_bits(bits).ok_or_else(|| Error::Malformed("empty index subset".into()))
    }

    pub fn singleton(&self, position: usize) -> IndexSubset {
        assert!(position < self.len());
        IndexSubset(1 << position)
    }

    pub fn full(&self) -> IndexSubset {
        IndexSubset((1u64 << self.len()) - 1)
    }

    /// All nonempty subsets in canonical order.
    pub fn nonempty_subsets(&self) -> Vec<IndexSubset> {
        let mut out: Vec<_> = (1..=self.full().0).map(IndexSubset).collect();
        out.sort();
        out
    }

    pub fn format_subset(&self, s: IndexSubset) -> String {
        let mut out = String::from("{");
        for (k, v) in s.members().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(self.label(v));
        }
        out.push('}');
        out
    }

    pub fn format_string(&self, s: &IndexString) -> String {
        let mut out = String::from("(");
        for (k, e) in s.entries().iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&self.format_subset(*e));
        }
        out.push(')');
        out
    }

    pub fn format_vertex_string(&self, s: &VertexString) -> String {
        let mut out = String::from("(");
        for (k, v) in s.entries().iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", self.label(*v));
        }
        out.push(')');
        out
    }
}

/// A nonempty subset of a vertex set, as a bitmask over vertex positions.
///
/// Ordered lexicographically on the sorted member lists, so `{1} < {1,2} < {2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IndexSubset(u64);

impl IndexSubset {
    pub fn from_bits(bits: u64) -> Option<Self> {
        (bits != 0).then_some(IndexSubset(bits))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    /// Member positions in increasing order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        core::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(v)
        })
    }

    pub fn contains(self, position: usize) -> bool {
        position < 64 && self.0 & (1 << position) != 0
    }

    pub fn is_subset(self, other: IndexSubset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: IndexSubset) -> IndexSubset {
        IndexSubset(self.0 | other.0)
    }

    pub fn min_vertex(self) -> usize {
        self.0.trailing_zeros() as usize
    }

    pub fn max_vertex(self) -> usize {
        63 - self.0.leading_zeros() as usize
    }
}

impl Ord for IndexSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut a, mut b) = (self.0, other.0);
        loop {
            if a == b {
                return Ordering::Equal;
            }
            if a == 0 {
                return Ordering::Less;
            }
            if b == 0 {
                return Ordering::Greater;
            }
            let (la, lb) = (a.trailing_zeros(), b.trailing_zeros());
            if la != lb {
                return la.cmp(&lb);
            }
            a &= a - 1;
            b &= b - 1;
        }
    }
}

impl PartialOrd for IndexSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A word `I_0 … I_p` in the free monoid on index subsets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexString(Vec<IndexSubset>);

impl IndexString {
    pub fn new(entries: Vec<IndexSubset>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Malformed("index strings have length at least one".into()));
        }
        Ok(IndexString(entries))
    }

    pub fn single(entry: IndexSubset) -> Self {
        IndexString(alloc::vec![entry])
    }

    pub fn entries(&self) -> &[IndexSubset] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Čech degree `p` of a string of length `p + 1`.
    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn union(&self) -> IndexSubset {
        union_of(self)
    }

    /// The prefix `I_0 … I_m`.
    pub fn prefix(&self, m: usize) -> IndexString {
        IndexString(self.0[..=m].to_vec())
    }

    /// The suffix `I_m … I_p`.
    pub fn suffix(&self, m: usize) -> IndexString {
        IndexString(self.0[m..].to_vec())
    }

    pub fn has_repeat(&self) -> bool {
        let mut sorted = self.0.clone();
        sorted.sort_unstable_by_key(|s| s.0);
        sorted.windows(2).any(|w| w[0] == w[1])
    }

    pub fn is_canonical(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }
}

/// A word `i_0 … i_p` of vertex positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexString(Vec<usize>);

impl VertexString {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Malformed("vertex strings have length at least one".into()));
        }
        if entries.iter().any(|&v| v >= MAX_VERTICES) {
            return Err(Error::Malformed("vertex position out of range".into()));
        }
        Ok(VertexString(entries))
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The set `{i_0, …, i_p}` whose chart carries the string.
    pub fn support(&self) -> IndexSubset {
        IndexSubset(self.0.iter().fold(0, |acc, &v| acc | 1 << v))
    }

    /// The same word read as a string of singletons.
    pub fn to_index_string(&self) -> IndexString {
        IndexString(self.0.iter().map(|&v| IndexSubset(1 << v)).collect())
    }

    /// Inverse of [`VertexString::to_index_string`]; `None` unless every entry is a singleton.
    pub fn from_index_string(s: &IndexString) -> Option<VertexString> {
        s.0.iter().map(|e| (e.len() == 1).then(|| e.min_vertex())).collect::<Option<Vec<_>>>().map(VertexString)
    }
}

/// `I_0 ∪ … ∪ I_p`.
pub fn union_of(s: &IndexString) -> IndexSubset {
    IndexSubset(s.0.iter().fold(0, |acc, e| acc | e.0))
}

/// Delete the entry at position `k`.
pub fn remove_at(s: &IndexString, k: usize) -> Result<IndexString> {
    if k >= s.len() {
        return Err(Error::OutOfRange { position: k, len: s.len() });
    }
    if s.len() == 1 {
        return Err(Error::Malformed("removal would leave the empty string".into()));
    }
    let mut entries = s.0.clone();
    entries.remove(k);
    Ok(IndexString(entries))
}

/// Sort a string into canonical order, returning the permutation sign, or
/// `None` when an entry repeats.
pub fn sort_with_sign(s: &IndexString) -> Option<(IndexString, i32)> {
    let mut entries = s.0.clone();
    let mut sign = 1;
    // Insertion sort: each adjacent swap is a transposition.
    for i in 1..entries.len() {
        let mut j = i;
        while j > 0 {
            match entries[j - 1].cmp(&entries[j]) {
                Ordering::Greater => {
                    entries.swap(j - 1, j);
                    sign = -sign;
                    j -= 1;
                }
                Ordering::Equal => return None,
                Ordering::Less => break,
            }
        }
    }
    Some((IndexString(entries), sign))
}

/// Entrywise image of a string under an index map.
pub fn map_string(f: impl Fn(IndexSubset) -> Option<IndexSubset>, s: &IndexString) -> Result<IndexString> {
    s.0.iter()
        .map(|&e| f(e).ok_or_else(|| Error::OutsideDomain(alloc::format!("{:#x}", e.0))))
        .collect::<Result<Vec<_>>>()
        .map(IndexString)
}

/// All strictly increasing strings of the given length drawn from `alphabet`
/// (which must be sorted), keeping only those accepted by `keep`.
///
/// `keep` is applied to prefixes as well, so it must be monotone: rejecting a
/// prefix rejects every extension.
pub fn canonical_strings(
    alphabet: &[IndexSubset],
    len: usize,
    keep: &dyn Fn(&[IndexSubset]) -> bool,
) -> Vec<IndexString> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    fn rec(
        alphabet: &[IndexSubset],
        start: usize,
        len: usize,
        current: &mut Vec<IndexSubset>,
        keep: &dyn Fn(&[IndexSubset]) -> bool,
        out: &mut Vec<IndexString>,
    ) {
        if current.len() == len {
            out.push(IndexString(current.clone()));
            return;
        }
        for i in start..alphabet.len() {
            if alphabet.len() - i < len - current.len() {
                break;
            }
            current.push(alphabet[i]);
            if keep(current) {
                rec(alphabet, i + 1, len, current, keep, out);
            }
            current.pop();
        }
    }
    if len > 0 {
        rec(alphabet, 0, len, &mut current, keep, &mut out);
    }
    out
}

/// All strings (repeats allowed) of the given length over `alphabet`,
/// filtered by the monotone predicate `keep`, stopping after `limit` strings.
pub fn free_strings(
    alphabet: &[IndexSubset],
    len: usize,
    keep: &dyn Fn(&[IndexSubset]) -> bool,
    limit: usize,
) -> Vec<IndexString> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    fn rec(
        alphabet: &[IndexSubset],
        len: usize,
        current: &mut Vec<IndexSubset>,
        keep: &dyn Fn(&[IndexSubset]) -> bool,
        limit: usize,
        out: &mut Vec<IndexString>,
    ) {
        if out.len() >= limit {
            return;
        }
        if current.len() == len {
            out.push(IndexString(current.clone()));
            return;
        }
        for &a in alphabet {
            current.push(a);
            if keep(current) {
                rec(alphabet, len, current, keep, limit, out);
            }
            current.pop();
            if out.len() >= limit {
                return;
            }
        }
    }
    if len > 0 {
        rec(alphabet, len, &mut current, keep, limit, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v3() -> VertexSet {
        VertexSet::new(["1", "2", "3"]).unwrap()
    }

    fn s(v: &VertexSet, m: &[&str]) -> IndexSubset {
        v.subset(m).unwrap()
    }

    #[test]
    fn unions() {
        let v = v3();
        let a = IndexString::new(alloc::vec![s(&v, &["1"]), s(&v, &["2"])]).unwrap();
        assert_eq!(union_of(&a), s(&v, &["1", "2"]));
        let b = IndexString::new(alloc::vec![s(&v, &["1", "2"]), s(&v, &["2", "3"])]).unwrap();
        assert_eq!(union_of(&b), v.full());
        assert_eq!(union_of(&IndexString::single(s(&v, &["1"]))), s(&v, &["1"]));
    }

    #[test]
    fn removal() {
        let v = v3();
        let (a, b, c) = (s(&v, &["1"]), s(&v, &["2"]), s(&v, &["3"]));
        let abc = IndexString::new(alloc::vec![a, b, c]).unwrap();
        assert_eq!(remove_at(&abc, 1).unwrap().entries(), &[a, c]);
        let ab = IndexString::new(alloc::vec![a, b]).unwrap();
        assert_eq!(remove_at(&ab, 0).unwrap().entries(), &[b]);
        assert!(matches!(remove_at(&abc, 3), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn sorting() {
        let v = v3();
        let (a, b, c) = (s(&v, &["1"]), s(&v, &["2"]), s(&v, &["3"]));
        let (canon, sign) = sort_with_sign(&IndexString::new(alloc::vec![b, a]).unwrap()).unwrap();
        assert_eq!((canon.entries(), sign), (&[a, b][..], -1));
        assert!(sort_with_sign(&IndexString::new(alloc::vec![a, a]).unwrap()).is_none());
        let abc = IndexString::new(alloc::vec![a, b, c]).unwrap();
        assert_eq!(sort_with_sign(&abc), Some((abc.clone(), 1)));
    }

    #[test]
    fn subset_order_is_lexicographic() {
        let v = v3();
        let order: Vec<String> = v.nonempty_subsets().into_iter().map(|x| v.format_subset(x)).collect();
        assert_eq!(order, ["{1}", "{1,2}", "{1,2,3}", "{1,3}", "{2}", "{2,3}", "{3}"]);
    }

    #[test]
    fn mapping() {
        let v = v3();
        let (a, b, ab) = (s(&v, &["1"]), s(&v, &["2"]), s(&v, &["1", "2"]));
        let k = s(&v, &["3"]);
        let st = IndexString::new(alloc::vec![a, b]).unwrap();
        assert_eq!(map_string(Some, &st).unwrap(), st);
        let collapse = |x: IndexSubset| (x == a || x == b).then_some(k);
        assert_eq!(map_string(collapse, &st).unwrap().entries(), &[k, k]);
        let g = |x: IndexSubset| (x == ab).then_some(k);
        assert_eq!(map_string(g, &IndexString::single(ab)).unwrap().entries(), &[k]);
        assert!(map_string(g, &st).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let v = v3();
        let all = v.nonempty_subsets();
        let yes = |_: &[IndexSubset]| true;
        assert_eq!(canonical_strings(&all, 2, &yes).len(), 21);
        assert_eq!(free_strings(&all, 2, &yes, usize::MAX).len(), 49);
        assert_eq!(free_strings(&all, 2, &yes, 10).len(), 10);
    }

    fn arb_string() -> impl Strategy<Value = IndexString> {
        proptest::collection::vec(1u64..16, 1..7)
            .prop_map(|v| IndexString::new(v.into_iter().map(IndexSubset).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn sort_is_idempotent(st in arb_string()) {
            if let Some((canon, _)) = sort_with_sign(&st) {
                prop_assert!(canon.is_canonical());
                prop_assert_eq!(sort_with_sign(&canon), Some((canon.clone(), 1)));
            } else {
                prop_assert!(st.has_repeat());
            }
        }

        #[test]
        fn sign_is_permutation_parity(st in arb_string(), k in 0usize..6) {
            // Swapping two entries flips the sign.
            prop_assume!(st.len() >= 2);
            let k = k % (st.len() - 1);
            let mut swapped = st.entries().to_vec();
            swapped.swap(k, k + 1);
            let swapped = IndexString::new(swapped).unwrap();
            match (sort_with_sign(&st), sort_with_sign(&swapped)) {
                (Some((c1, s1)), Some((c2, s2))) => {
                    prop_assert_eq!(c1, c2);
                    prop_assert_eq!(s1, -s2);
                }
                (None, None) => {}
                _ => prop_assert!(false),
            }
        }

        #[test]
        fn simplicial_identity(st in arb_string(), k in 0usize..6, j in 0usize..6) {
            prop_assume!(st.len() >= 3);
            let j = j % st.len();
            let k = k % st.len();
            prop_assume!(k < j);
            let a = remove_at(&remove_at(&st, j).unwrap(), k).unwrap();
            let b = remove_at(&remove_at(&st, k).unwrap(), j - 1).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn union_preserving_maps_commute(st in arb_string(), images in proptest::collection::vec(1u64..64, 4)) {
            // A map induced by vertex images preserves unions.
            let f = |x: IndexSubset| {
                Some(IndexSubset(x.members().fold(0, |acc, m| acc | images[m])))
            };
            let mapped = map_string(f, &st).unwrap();
            prop_assert_eq!(union_of(&mapped), f(union_of(&st)).unwrap());
        }
    }
}
