//! Finite partial orders and their s-, q- and f-sets.
//!
//! Elements carry string labels; internally they are indexed by the sorted
//! order of those labels and subsets are bitmasks over the indices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Hard limit on the number of elements of a [`FinitePoset`].
pub const MAX_ELEMENTS: usize = 16;

/// Limit for exact linear-extension counting.
pub const MAX_LINEAR_EXTENSION_ELEMENTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("AntisymmetryViolation: {0} and {1} are related both ways")]
    AntisymmetryViolation(String, String),
    #[error("UnknownElement: {0}")]
    UnknownElement(String),
    #[error("DuplicateElement: {0}")]
    DuplicateElement(String),
    #[error("TooManyElements: {0} elements (limit {MAX_ELEMENTS})")]
    TooManyElements(usize),
    #[error("ElementMismatch: posets are on different element sets")]
    ElementMismatch,
    #[error("NotCoveringPair: ({0}, {1})")]
    NotCoveringPair(String, String),
    #[error("NotDominating: the coarse order does not contain the fine order")]
    NotDominating,
    #[error("InvalidGluing: {0}")]
    InvalidGluing(String),
    #[error("TooLarge: {0} elements (limit {MAX_LINEAR_EXTENSION_ELEMENTS})")]
    TooLarge(usize),
}

/// A subset of the elements of a poset, as a bitmask over element indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Subset {
        if n >= 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Subset {
        Subset(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Subset {
        Subset(it.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn with(self, i: usize) -> Subset {
        Subset(self.0 | (1 << i))
    }

    /// Element indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

/// A finite partial order on labelled elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinitePoset {
    labels: Vec<String>,
    /// `down[j]` is the set of `i` with `i <= j`.
    down: Vec<u32>,
    /// `up[i]` is the set of `j` with `i <= j`.
    up: Vec<u32>,
}

/// Result of comparing a fine order against a coarser one on the same set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominationReport {
    pub dominates: bool,
    pub steps: usize,
    /// Pairs `(i, j)` related in the coarse order but not in the fine one.
    pub witness_pairs: Vec<(usize, usize)>,
}

/// Input for gluing a poset `(J, <~)` into the f-set `L` of `(K, <|)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingSpec {
    pub sub_poset: FinitePoset,
    pub ambient_poset: FinitePoset,
    pub glue_fset: Subset,
    /// `psi[j]` is the ambient index that element `j` of `sub_poset` maps to.
    pub psi: Vec<usize>,
}

impl FinitePoset {
    /// Build a poset from labels and arbitrary relation pairs, taking the
    /// reflexive-transitive closure.
    pub fn new<S: AsRef<str>>(elements: &[S], relation_pairs: &[(S, S)]) -> Result<Self, PosetError> {
        let mut labels: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        labels.sort();
        for w in labels.windows(2) {
            if w[0] == w[1] {
                return Err(PosetError::DuplicateElement(w[0].clone()));
            }
        }
        if labels.len() > MAX_ELEMENTS {
            return Err(PosetError::TooManyElements(labels.len()));
        }
        let index: BTreeMap<&str, usize> =
            labels.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut pairs = Vec::with_capacity(relation_pairs.len());
        for (a, b) in relation_pairs {
            let ia = *index
                .get(a.as_ref())
                .ok_or_else(|| PosetError::UnknownElement(a.as_ref().to_string()))?;
            let ib = *index
                .get(b.as_ref())
                .ok_or_else(|| PosetError::UnknownElement(b.as_ref().to_string()))?;
            pairs.push((ia, ib));
        }
        Self::from_index_pairs(labels, &pairs)
    }

    /// Closure of index pairs over already-sorted, distinct labels.
    pub(crate) fn from_index_pairs(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self, PosetError> {
        let n = labels.len();
        if n > MAX_ELEMENTS {
            return Err(PosetError::TooManyElements(n));
        }
        let mut down: Vec<u32> = (0..n).map(|j| 1u32 << j).collect();
        for &(i, j) in pairs {
            down[j] |= 1 << i;
        }
        // Warshall over bit rows: if k <= j then everything below k is below j.
        for k in 0..n {
            for j in 0..n {
                if down[j] >> k & 1 == 1 {
                    down[j] |= down[k];
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if down[j] >> i & 1 == 1 && down[i] >> j & 1 == 1 {
                    return Err(PosetError::AntisymmetryViolation(labels[i].clone(), labels[j].clone()));
                }
            }
        }
        Ok(Self::from_down(labels, down))
    }

    /// Build from a relation table that is already a partial order.
    fn from_down(labels: Vec<String>, down: Vec<u32>) -> Self {
        let n = labels.len();
        let mut up = vec![0u32; n];
        for (j, &d) in down.iter().enumerate() {
            for i in Subset(d).iter() {
                up[i] |= 1 << j;
            }
        }
        FinitePoset { labels, down, up }
    }

    /// Check the partial-order axioms on a raw table without closing it.
    fn checked_from_down(labels: Vec<String>, down: Vec<u32>) -> Result<Self, String> {
        let n = labels.len();
        for j in 0..n {
            if down[j] >> j & 1 == 0 {
                return Err(format!("not reflexive at {}", labels[j]));
            }
            for k in Subset(down[j]).iter() {
                if down[k] & !down[j] != 0 {
                    return Err(format!("not transitive through {} <= {}", labels[k], labels[j]));
                }
                if k != j && down[k] >> j & 1 == 1 {
                    return Err(format!("not antisymmetric on {}, {}", labels[k], labels[j]));
                }
            }
        }
        Ok(Self::from_down(labels, down))
    }

    pub fn discrete<S: AsRef<str>>(elements: &[S]) -> Result<Self, PosetError> {
        Self::new::<S>(elements, &[])
    }

    /// The chain `elements[0] <= elements[1] <= ...` (in the given order).
    pub fn chain<S: AsRef<str>>(elements: &[S]) -> Result<Self, PosetError> {
        let pairs: Vec<(&str, &str)> = elements
            .windows(2)
            .map(|w| (w[0].as_ref(), w[1].as_ref()))
            .collect();
        let labels: Vec<&str> = elements.iter().map(|s| s.as_ref()).collect();
        FinitePoset::new(&labels, &pairs)
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

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.len())
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.down[j] >> i & 1 == 1
    }

    pub fn down_set(&self, j: usize) -> Subset {
        Subset(self.down[j])
    }

    pub fn up_set(&self, i: usize) -> Subset {
        Subset(self.up[i])
    }

    /// All `i` below some element of `s`.
    pub fn down_closure(&self, s: Subset) -> Subset {
        Subset(s.iter().fold(0, |m, j| m | self.down[j]))
    }

    /// All `j` above some element of `s`.
    pub fn up_closure(&self, s: Subset) -> Subset {
        Subset(s.iter().fold(0, |m, i| m | self.up[i]))
    }

    /// All related pairs `(i, j)` with `i <= j`, reflexive pairs included.
    pub fn relation_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.leq(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn strict_pair_count(&self) -> usize {
        self.down.iter().map(|d| d.count_ones() as usize).sum::<usize>() - self.len()
    }

    pub fn is_total(&self) -> bool {
        (0..self.len()).all(|i| (0..self.len()).all(|j| self.leq(i, j) || self.leq(j, i)))
    }

    pub fn is_sset(&self, s: Subset) -> bool {
        s.iter().all(|j| self.down[j] & !s.0 == 0)
    }

    pub fn is_qset(&self, s: Subset) -> bool {
        s.iter().all(|i| self.up[i] & !s.0 == 0)
    }

    pub fn is_fset(&self, s: Subset) -> bool {
        if !s.is_subset(self.full()) {
            return false;
        }
        (0..self.len())
            .filter(|&i| !s.contains(i))
            .all(|i| self.down[i] & s.0 == 0 || self.up[i] & s.0 == 0)
    }

    fn all_subsets(&self) -> impl Iterator<Item = Subset> {
        (0..=self.full().0).map(Subset)
    }

    /// Downward-closed subsets, sorted by bitmask value.
    pub fn ssets(&self) -> Vec<Subset> {
        self.all_subsets().filter(|&s| self.is_sset(s)).collect()
    }

    /// Upward-closed subsets, sorted by bitmask value.
    pub fn qsets(&self) -> Vec<Subset> {
        self.all_subsets().filter(|&s| self.is_qset(s)).collect()
    }

    /// Betweenness-closed subsets, sorted by bitmask value.
    pub fn fsets(&self) -> Vec<Subset> {
        self.all_subsets().filter(|&s| self.is_fset(s)).collect()
    }

    /// Membership in the set of pairs carrying injections.
    pub fn is_g_pair(&self, j: Subset, k: Subset) -> bool {
        self.is_fset(j) && self.is_fset(k) && j.is_subset(k) && j.iter().all(|x| self.down[x] & k.0 & !j.0 == 0)
    }

    /// Membership in the set of pairs carrying surjections.
    pub fn is_h_pair(&self, j: Subset, k: Subset) -> bool {
        self.is_fset(j) && self.is_fset(k) && k.is_subset(j) && k.iter().all(|x| self.up[x] & j.0 & !k.0 == 0)
    }

    /// All injection pairs, in lexicographic order of (first, second) masks.
    pub fn g_pairs(&self) -> Vec<(Subset, Subset)> {
        let f = self.fsets();
        let mut out = Vec::new();
        for &j in &f {
            for &k in &f {
                if self.is_g_pair(j, k) {
                    out.push((j, k));
                }
            }
        }
        out
    }

    pub fn h_pairs(&self) -> Vec<(Subset, Subset)> {
        let f = self.fsets();
        let mut out = Vec::new();
        for &j in &f {
            for &k in &f {
                if self.is_h_pair(j, k) {
                    out.push((j, k));
                }
            }
        }
        out
    }

    /// Pairs `i != j` with `i <= j` and nothing strictly between, in
    /// lexicographic order of indices.
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.is_covering_pair(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_covering_pair(&self, i: usize, j: usize) -> bool {
        i != j
            && i < self.len()
            && j < self.len()
            && self.leq(i, j)
            && self.up[i] & self.down[j] == (1 << i | 1 << j)
    }

    /// Remove the single relation `i <= j` of a covering pair.
    pub fn remove_covering_pair(&self, i: usize, j: usize) -> Result<FinitePoset, PosetError> {
        if !self.is_covering_pair(i, j) {
            let name = |x: usize| self.labels.get(x).cloned().unwrap_or_else(|| x.to_string());
            return Err(PosetError::NotCoveringPair(name(i), name(j)));
        }
        let mut down = self.down.clone();
        down[j] &= !(1 << i);
        Ok(Self::from_down(self.labels.clone(), down))
    }

    /// Compare `fine` against `coarse` on the same labelled set.
    pub fn domination(fine: &FinitePoset, coarse: &FinitePoset) -> Result<DominationReport, PosetError> {
        if fine.labels != coarse.labels {
            return Err(PosetError::ElementMismatch);
        }
        let n = fine.len();
        let mut dominates = true;
        let mut witness_pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                match (fine.leq(i, j), coarse.leq(i, j)) {
                    (true, false) => dominates = false,
                    (false, true) => witness_pairs.push((i, j)),
                    _ => {}
                }
            }
        }
        Ok(DominationReport {
            dominates,
            steps: witness_pairs.len(),
            witness_pairs,
        })
    }

    /// A chain of posets from `coarse` down to `fine`, each one step finer
    /// than the previous. Always removes the least removable covering pair.
    pub fn interpolate(fine: &FinitePoset, coarse: &FinitePoset) -> Result<Vec<FinitePoset>, PosetError> {
        let report = Self::domination(fine, coarse)?;
        if !report.dominates {
            return Err(PosetError::NotDominating);
        }
        let mut chain = vec![coarse.clone()];
        let mut current = coarse.clone();
        for _ in 0..report.steps {
            let (i, j) = current
                .covering_pairs()
                .into_iter()
                .find(|&(i, j)| !fine.leq(i, j))
                .expect("a strictly dominating order has a removable covering pair");
            current = current.remove_covering_pair(i, j)?;
            chain.push(current.clone());
        }
        debug_assert_eq!(&current, fine);
        Ok(chain)
    }

    /// The sub-poset on `s`, plus the map from its indices to ours.
    pub fn restrict(&self, s: Subset) -> (FinitePoset, Vec<usize>) {
        let map: Vec<usize> = s.iter().collect();
        let labels = map.iter().map(|&i| self.labels[i].clone()).collect();
        let down = map
            .iter()
            .map(|&j| {
                map.iter()
                    .enumerate()
                    .filter(|&(_, &i)| self.leq(i, j))
                    .fold(0u32, |m, (a, _)| m | 1 << a)
            })
            .collect();
        (Self::from_down(labels, down), map)
    }

    /// Count total orders containing this order, by backtracking.
    pub fn count_linear_extensions(&self) -> Result<u64, PosetError> {
        if self.len() > MAX_LINEAR_EXTENSION_ELEMENTS {
            return Err(PosetError::TooLarge(self.len()));
        }
        fn go(p: &FinitePoset, placed: u32, full: u32) -> u64 {
            if placed == full {
                return 1;
            }
            let mut total = 0;
            for i in Subset(full & !placed).iter() {
                // i is minimal among the remaining elements
                if p.down[i] & !placed == 1 << i {
                    total += go(p, placed | 1 << i, full);
                }
            }
            total
        }
        Ok(go(self, 0, self.full().0))
    }

    /// Every linear extension, as a list of element indices bottom first.
    pub fn linear_extensions(&self) -> Result<Vec<Vec<usize>>, PosetError> {
        if self.len() > MAX_LINEAR_EXTENSION_ELEMENTS {
            return Err(PosetError::TooLarge(self.len()));
        }
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        fn go(p: &FinitePoset, placed: u32, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if placed == p.full().0 {
                out.push(prefix.clone());
                return;
            }
            for i in Subset(p.full().0 & !placed).iter() {
                if p.down[i] & !placed == 1 << i {
                    prefix.push(i);
                    go(p, placed | 1 << i, prefix, out);
                    prefix.pop();
                }
            }
        }
        go(self, 0, &mut prefix, &mut out);
        Ok(out)
    }

    /// Glue `(J, <~)` into the f-set `L` of `(K, <|)` along `psi`.
    ///
    /// Returns the poset on `J ∪ (K \ L)` and the map `phi` from its
    /// indices to indices of `K`.
    pub fn glue(spec: &GluingSpec) -> Result<(FinitePoset, Vec<usize>), PosetError> {
        let bad = |m: String| Err(PosetError::InvalidGluing(m));
        let sub = &spec.sub_poset;
        let amb = &spec.ambient_poset;
        let l = spec.glue_fset;
        if !l.is_subset(amb.full()) || !amb.is_fset(l) {
            return bad("glue set is not an f-set of the ambient poset".into());
        }
        if spec.psi.len() != sub.len() {
            return bad("psi must be defined on every element of the sub-poset".into());
        }
        if spec.psi.iter().any(|&k| k >= amb.len() || !l.contains(k)) {
            return bad("psi must map into the glue set".into());
        }
        if Subset::from_indices(spec.psi.iter().copied()) != l {
            return bad("psi is not surjective onto the glue set".into());
        }
        for a in 0..sub.len() {
            for b in 0..sub.len() {
                if sub.leq(a, b) && !amb.leq(spec.psi[a], spec.psi[b]) {
                    return bad(format!("psi is not monotone on ({}, {})", sub.label(a), sub.label(b)));
                }
            }
        }
        let outside = amb.full().difference(l);
        let sub_labels: BTreeSet<&str> = sub.labels.iter().map(String::as_str).collect();
        for k in outside.iter() {
            if sub_labels.contains(amb.label(k)) {
                return bad(format!("label {} occurs in both J and K \\ L", amb.label(k)));
            }
        }

        // Origin of each glued element: Left(j in J) or Right(k in K \ L).
        #[derive(Clone, Copy)]
        enum Origin {
            Sub(usize),
            Amb(usize),
        }
        let mut entries: Vec<(String, Origin)> = sub
            .labels
            .iter()
            .enumerate()
            .map(|(j, s)| (s.clone(), Origin::Sub(j)))
            .chain(outside.iter().map(|k| (amb.label(k).to_string(), Origin::Amb(k))))
            .collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let n = entries.len();
        if n > MAX_ELEMENTS {
            return Err(PosetError::TooManyElements(n));
        }
        let rel = |x: Origin, y: Origin| match (x, y) {
            (Origin::Sub(a), Origin::Sub(b)) => sub.leq(a, b),
            (Origin::Amb(a), Origin::Amb(b)) => amb.leq(a, b),
            (Origin::Sub(a), Origin::Amb(b)) => amb.leq(spec.psi[a], b),
            (Origin::Amb(a), Origin::Sub(b)) => amb.leq(a, spec.psi[b]),
        };
        let down: Vec<u32> = (0..n)
            .map(|j| (0..n).filter(|&i| rel(entries[i].1, entries[j].1)).fold(0, |m, i| m | 1 << i))
            .collect();
        let labels: Vec<String> = entries.iter().map(|e| e.0.clone()).collect();
        let glued = match Self::checked_from_down(labels, down) {
            Ok(p) => p,
            Err(m) => return bad(format!("glued relation is not a partial order: {m}")),
        };
        let phi: Vec<usize> = entries
            .iter()
            .map(|e| match e.1 {
                Origin::Sub(a) => spec.psi[a],
                Origin::Amb(k) => k,
            })
            .collect();

        let j_mask = Subset::from_indices(
            entries
                .iter()
                .enumerate()
                .filter(|(_, e)| matches!(e.1, Origin::Sub(_)))
                .map(|(i, _)| i),
        );
        if !glued.is_fset(j_mask) {
            return bad("J is not an f-set of the glued poset".into());
        }
        let (restricted, _) = glued.restrict(j_mask);
        if &restricted != sub {
            return bad("glued order does not restrict to the sub-poset order".into());
        }
        for i in 0..n {
            for j in 0..n {
                if glued.leq(i, j) && !amb.leq(phi[i], phi[j]) {
                    return bad("phi is not monotone".into());
                }
            }
        }
        Ok((glued, phi))
    }

    /// Image of a subset under an index map (e.g. from `restrict`).
    pub fn push_subset(map: &[usize], s: Subset) -> Subset {
        Subset::from_indices(s.iter().map(|i| map[i]))
    }

    /// Preimage of a subset under an index map.
    pub fn pull_subset(map: &[usize], s: Subset) -> Subset {
        Subset::from_indices((0..map.len()).filter(|&i| s.contains(map[i])))
    }

    /// Labels of a subset in sorted order; indices outside the poset are
    /// shown as `#i`.
    pub fn subset_labels(&self, s: Subset) -> Vec<String> {
        s.iter()
            .map(|i| self.labels.get(i).cloned().unwrap_or_else(|| format!("#{i}")))
            .collect()
    }

    pub fn subset_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Subset, PosetError> {
        let mut s = Subset::EMPTY;
        for l in labels {
            let i = self
                .index_of(l.as_ref())
                .ok_or_else(|| PosetError::UnknownElement(l.as_ref().to_string()))?;
            s = s.with(i);
        }
        Ok(s)
    }
}

impl fmt::Display for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for (i, j) in self.relation_pairs() {
            if i != j {
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(f, "{}<={}", self.labels[i], self.labels[j])?;
            }
        }
        write!(f, "}} on [{}]", self.labels.join(", "))
    }
}
