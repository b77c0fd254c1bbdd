//! The isotropic matroid of a graph, represented over GF(2) by the `n x 3n`
//! matrix `(I | A(G) | A(G)+I)`.
//!
//! Ground elements come in three kinds per vertex: `phi(v)` (identity
//! column), `chi(v)` (the `A(G)` column) and `psi(v)` (the `A(G)+I` column).
//! Subsets of the ground set are [`ElementSet`]s, three vertex masks side by
//! side, so that vertex triples and subtransversals are cheap to express.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{Gf2Matrix, WordBasis};
use crate::graph::{low_mask, Graph, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsotropicError {
    #[error("operation needs a nonempty graph")]
    EmptyGraph,
    #[error("operation is limited to n <= {max}, got n = {n}")]
    TooLarge { n: usize, max: usize },
    #[error("set is not an ordinary 3-separation (lambda = {lambda}, sizes {size} / {co_size})")]
    NotThreeSeparation {
        lambda: usize,
        size: usize,
        co_size: usize,
    },
    #[error("vertex {0} is outside the ground set")]
    VertexOutOfRange(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Phi,
    Chi,
    Psi,
}

impl Kind {
    pub const ALL: [Kind; 3] = [Kind::Phi, Kind::Chi, Kind::Psi];

    fn block(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundElement {
    pub vertex: usize,
    pub kind: Kind,
}

impl GroundElement {
    pub fn new(vertex: usize, kind: Kind) -> Self {
        Self { vertex, kind }
    }

    /// Element for column index `kind * n + v`.
    pub fn from_index(n: usize, index: usize) -> Self {
        Self::new(index % n, Kind::ALL[index / n])
    }
}

impl fmt::Display for GroundElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            Kind::Phi => "phi",
            Kind::Chi => "chi",
            Kind::Psi => "psi",
        };
        write!(f, "{k}({})", self.vertex)
    }
}

/// A subset of the ground set: one vertex mask per element kind.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet {
    pub phi: u64,
    pub chi: u64,
    pub psi: u64,
}

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet {
        phi: 0,
        chi: 0,
        psi: 0,
    };

    /// `tau(X)`: the union of the vertex triples of `X`.
    pub fn triples(x: VertexSet) -> Self {
        Self {
            phi: x.0,
            chi: x.0,
            psi: x.0,
        }
    }

    pub fn singleton(e: GroundElement) -> Self {
        let mut s = Self::EMPTY;
        s.insert(e);
        s
    }

    fn mask_mut(&mut self, kind: Kind) -> &mut u64 {
        match kind {
            Kind::Phi => &mut self.phi,
            Kind::Chi => &mut self.chi,
            Kind::Psi => &mut self.psi,
        }
    }

    pub fn mask(&self, kind: Kind) -> u64 {
        match kind {
            Kind::Phi => self.phi,
            Kind::Chi => self.chi,
            Kind::Psi => self.psi,
        }
    }

    pub fn insert(&mut self, e: GroundElement) {
        *self.mask_mut(e.kind) |= 1 << e.vertex;
    }

    pub fn remove(&mut self, e: GroundElement) {
        *self.mask_mut(e.kind) &= !(1 << e.vertex);
    }

    pub fn contains(&self, e: GroundElement) -> bool {
        (self.mask(e.kind) >> e.vertex) & 1 == 1
    }

    pub fn len(&self) -> usize {
        (self.phi.count_ones() + self.chi.count_ones() + self.psi.count_ones()) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.phi | self.chi | self.psi == 0
    }

    pub fn union(&self, o: &Self) -> Self {
        Self {
            phi: self.phi | o.phi,
            chi: self.chi | o.chi,
            psi: self.psi | o.psi,
        }
    }

    pub fn intersection(&self, o: &Self) -> Self {
        Self {
            phi: self.phi & o.phi,
            chi: self.chi & o.chi,
            psi: self.psi & o.psi,
        }
    }

    pub fn difference(&self, o: &Self) -> Self {
        Self {
            phi: self.phi & !o.phi,
            chi: self.chi & !o.chi,
            psi: self.psi & !o.psi,
        }
    }

    /// Symmetric difference.
    pub fn sum(&self, o: &Self) -> Self {
        Self {
            phi: self.phi ^ o.phi,
            chi: self.chi ^ o.chi,
            psi: self.psi ^ o.psi,
        }
    }

    pub fn is_subset(&self, o: &Self) -> bool {
        self.difference(o).is_empty()
    }

    /// Vertices whose triple meets the set.
    pub fn support(&self) -> VertexSet {
        VertexSet(self.phi | self.chi | self.psi)
    }

    /// Vertices whose whole triple lies in the set.
    pub fn full_triples(&self) -> VertexSet {
        VertexSet(self.phi & self.chi & self.psi)
    }

    /// Vertices whose triple meets the set at least twice.
    pub fn doubly_met(&self) -> VertexSet {
        VertexSet((self.phi & self.chi) | (self.phi & self.psi) | (self.chi & self.psi))
    }

    pub fn is_subtransversal(&self) -> bool {
        self.doubly_met().is_empty()
    }

    pub fn is_union_of_triples(&self) -> bool {
        self.phi == self.chi && self.chi == self.psi
    }

    /// Elements in ascending `(vertex, kind)` order.
    pub fn iter(&self) -> impl Iterator<Item = GroundElement> + '_ {
        VertexSet(self.support().0).iter().flat_map(move |v| {
            Kind::ALL
                .into_iter()
                .filter(move |&k| (self.mask(k) >> v) & 1 == 1)
                .map(move |k| GroundElement::new(v, k))
        })
    }

    /// Packs into a `3n`-bit index mask: bit `kind * n + v`. Needs `3n <= 64`.
    pub fn to_index_mask(&self, n: usize) -> u64 {
        debug_assert!(3 * n <= 64);
        self.phi | (self.chi << n) | (self.psi << (2 * n))
    }

    pub fn from_index_mask(n: usize, mask: u64) -> Self {
        let m = low_mask(n);
        Self {
            phi: mask & m,
            chi: (mask >> n) & m,
            psi: (mask >> (2 * n)) & m,
        }
    }
}

impl FromIterator<GroundElement> for ElementSet {
    fn from_iter<T: IntoIterator<Item = GroundElement>>(iter: T) -> Self {
        let mut s = Self::EMPTY;
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

impl Serialize for ElementSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ElementSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<GroundElement>::deserialize(d)?;
        if let Some(e) = v.iter().find(|e| e.vertex >= 64) {
            return Err(serde::de::Error::custom(format!("vertex {} out of range", e.vertex)));
        }
        Ok(v.into_iter().collect())
    }
}

/// A set meeting every vertex triple at most once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Subtransversal(ElementSet);

impl Subtransversal {
    pub fn new(set: ElementSet) -> Option<Self> {
        set.is_subtransversal().then_some(Self(set))
    }

    pub fn set(&self) -> &ElementSet {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Outcome of a smallest-transverse-circuit search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TransverseCircuitSearch {
    Found { q: usize, witness: Subtransversal },
    ExceedsCap { cap: usize },
}

impl TransverseCircuitSearch {
    pub fn q(&self) -> Option<usize> {
        match self {
            Self::Found { q, .. } => Some(*q),
            Self::ExceedsCap { .. } => None,
        }
    }
}

/// Bounded memo of ranks. Cleared wholesale when it fills up.
struct RankCache {
    capacity: usize,
    map: Mutex<HashMap<ElementSet, u8>>,
}

pub struct IsotropicMatroid {
    graph: Graph,
    /// Column vectors indexed by `kind * n + v`.
    cols: Vec<u64>,
    cache: Option<RankCache>,
}

impl fmt::Debug for IsotropicMatroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IsotropicMatroid")
            .field("graph", &self.graph)
            .finish()
    }
}

impl Clone for IsotropicMatroid {
    fn clone(&self) -> Self {
        Self {
            graph: self.graph.clone(),
            cols: self.cols.clone(),
            cache: self.cache.as_ref().map(|c| RankCache {
                capacity: c.capacity,
                map: Mutex::new(HashMap::new()),
            }),
        }
    }
}

impl IsotropicMatroid {
    pub fn build(graph: &Graph) -> Self {
        let n = graph.n();
        let mut cols = vec![0u64; 3 * n];
        for v in 0..n {
            let a = graph.adj_row(v) | ((graph.is_looped(v) as u64) << v);
            cols[v] = 1 << v;
            cols[n + v] = a;
            cols[2 * n + v] = a ^ (1 << v);
        }
        Self {
            graph: graph.clone(),
            cols,
            cache: None,
        }
    }

    /// Same matroid with a rank memo of at most `capacity` entries.
    pub fn with_rank_cache(mut self, capacity: usize) -> Self {
        self.cache = Some(RankCache {
            capacity,
            map: Mutex::new(HashMap::new()),
        });
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn ground_set(&self) -> ElementSet {
        ElementSet::triples(self.graph.vertices())
    }

    #[inline]
    pub fn column(&self, e: GroundElement) -> u64 {
        self.cols[e.kind.block() * self.n() + e.vertex]
    }

    /// Columns in index order `kind * n + v`.
    pub fn columns(&self) -> &[u64] {
        &self.cols
    }

    /// The representing matrix as a labeled GF(2) matrix.
    pub fn matrix(&self) -> Gf2Matrix<usize, GroundElement> {
        let n = self.n();
        let labels: Vec<GroundElement> = Kind::ALL
            .into_iter()
            .flat_map(|k| (0..n).map(move |v| GroundElement::new(v, k)))
            .collect();
        Gf2Matrix::from_fn((0..n).collect(), labels.clone(), |i, j| {
            (self.column(labels[j]) >> i) & 1 == 1
        })
        .expect("distinct labels")
    }

    /// XOR of the columns of `s`.
    #[inline]
    pub fn column_sum(&self, s: &ElementSet) -> u64 {
        let n = self.n();
        let mut acc = 0;
        for k in Kind::ALL {
            for v in VertexSet(s.mask(k)).iter() {
                acc ^= self.cols[k.block() * n + v];
            }
        }
        acc
    }

    fn basis_of(&self, s: &ElementSet) -> WordBasis {
        let n = self.n();
        let mut b = WordBasis::new();
        for k in Kind::ALL {
            for v in VertexSet(s.mask(k)).iter() {
                b.insert(self.cols[k.block() * n + v]);
            }
        }
        b
    }

    fn compute_rank(&self, s: &ElementSet) -> usize {
        self.basis_of(s).rank()
    }

    pub fn rank_of(&self, s: &ElementSet) -> usize {
        let Some(cache) = &self.cache else {
            return self.compute_rank(s);
        };
        if let Some(&r) = cache.map.lock().expect("rank cache poisoned").get(s) {
            return r as usize;
        }
        let r = self.compute_rank(s);
        let mut map = cache.map.lock().expect("rank cache poisoned");
        if map.len() >= cache.capacity {
            map.clear();
        }
        map.insert(*s, r as u8);
        r
    }

    /// `r(M)`.
    pub fn rank(&self) -> usize {
        self.rank_of(&self.ground_set())
    }

    pub fn complement(&self, s: &ElementSet) -> ElementSet {
        self.ground_set().difference(s)
    }

    /// `lambda(S) = r(S) + r(W - S) - r(M)`.
    pub fn lambda(&self, s: &ElementSet) -> usize {
        self.rank_of(s) + self.rank_of(&self.complement(s)) - self.rank()
    }

    pub fn is_dependent(&self, s: &ElementSet) -> bool {
        self.rank_of(s) < s.len()
    }

    /// Minimal dependent set check.
    pub fn is_circuit(&self, s: &ElementSet) -> bool {
        !s.is_empty() && self.rank_of(s) + 1 == s.len() && {
            // A dependent binary set of nullity one is a circuit iff its
            // unique dependency uses every element, i.e. it sums to zero.
            self.column_sum(s) == 0
        }
    }

    pub fn vertex_triple(&self, v: usize) -> ElementSet {
        ElementSet::triples(VertexSet::singleton(v))
    }

    pub fn tau(&self, x: VertexSet) -> ElementSet {
        ElementSet::triples(x)
    }

    /// `phi(w)` for each neighbor `w`, plus `psi(v)` if `v` is looped and
    /// `chi(v)` otherwise.
    pub fn neighborhood_circuit(&self, v: usize) -> ElementSet {
        let mut s = ElementSet {
            phi: self.graph.adj_row(v),
            ..ElementSet::EMPTY
        };
        if self.graph.is_looped(v) {
            s.psi = 1 << v;
        } else {
            s.chi = 1 << v;
        }
        s
    }

    /// The subtransversal associated to `gamma`: full triples are dropped and
    /// a triple met twice is replaced by its third element.
    pub fn associated_subtransversal(&self, gamma: &ElementSet) -> Subtransversal {
        let twice = gamma.doubly_met().0;
        let full = gamma.full_triples().0;
        let flip = twice & !full;
        let mut s = *gamma;
        // Toggling the whole triple turns "two of three" into "the third one".
        s.phi ^= flip;
        s.chi ^= flip;
        s.psi ^= flip;
        s.phi &= !full;
        s.chi &= !full;
        s.psi &= !full;
        Subtransversal::new(s).expect("every triple now met at most once")
    }

    /// Fundamental circuits with respect to the basis `phi(V)`, one for each
    /// `chi` and `psi` element. They span the cycle space.
    pub fn fundamental_circuits(&self) -> Vec<ElementSet> {
        let n = self.n();
        let mut out = Vec::with_capacity(2 * n);
        for kind in [Kind::Chi, Kind::Psi] {
            for v in 0..n {
                let e = GroundElement::new(v, kind);
                let mut s = ElementSet::singleton(e);
                s.phi = self.column(e);
                out.push(s);
            }
        }
        out
    }

    /// The unique zero-sum subtransversal with support `y` whose non-`phi`
    /// elements sit exactly on `b`, if it exists.
    #[inline]
    fn zero_sum_on(&self, y: u64, b: u64) -> Option<ElementSet> {
        let n = self.n();
        let mut s = 0u64;
        let mut bits = b;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            s ^= self.cols[n + v];
        }
        // Outside the support the chi/psi part must cancel; every phi-vertex
        // needs a 1 there to be cancelled by its identity column.
        if s & !y != 0 || (y & !b) & !s != 0 {
            return None;
        }
        Some(ElementSet {
            phi: y & !b,
            chi: b & !s,
            psi: b & s,
        })
    }

    /// Smallest nonempty dependent subtransversal, searched by increasing size
    /// up to `size_cap` (default `n`). In a binary matroid it is a circuit.
    pub fn min_transverse_circuit(
        &self,
        size_cap: Option<usize>,
    ) -> Result<TransverseCircuitSearch, IsotropicError> {
        let n = self.n();
        if n == 0 {
            return Err(IsotropicError::EmptyGraph);
        }
        let cap = size_cap.unwrap_or(n).min(n);
        for size in 1..=cap {
            if let Some(w) = self.transverse_circuit_of_size(size) {
                let witness = Subtransversal::new(w).expect("built as subtransversal");
                return Ok(TransverseCircuitSearch::Found { q: size, witness });
            }
        }
        Ok(TransverseCircuitSearch::ExceedsCap { cap })
    }

    /// A zero-sum subtransversal with exactly `size` elements, scanning
    /// supports in increasing bitmask order.
    pub fn transverse_circuit_of_size(&self, size: usize) -> Option<ElementSet> {
        let n = self.n();
        if size == 0 || size > n {
            return None;
        }
        let full = low_mask(n);
        let mut y = low_mask(size);
        loop {
            // Nonempty submasks of y.
            let mut b = y;
            while b != 0 {
                if let Some(s) = self.zero_sum_on(y, b) {
                    return Some(s);
                }
                b = (b - 1) & y;
            }
            // Gosper's hack: next mask with the same popcount.
            let c = y & y.wrapping_neg();
            let r = y.wrapping_add(c);
            if r == 0 || r & !full != 0 {
                return None;
            }
            y = (((r ^ y) >> 2) / c) | r;
            if y & !full != 0 {
                return None;
            }
        }
    }

    fn zero_sum_subtransversals_in(&self, x: VertexSet) -> Vec<ElementSet> {
        let mut out = Vec::new();
        let mut y = x.0;
        while y != 0 {
            let mut b = y;
            while b != 0 {
                if let Some(s) = self.zero_sum_on(y, b) {
                    out.push(s);
                }
                b = (b - 1) & y;
            }
            y = (y - 1) & x.0;
        }
        out
    }

    /// All transverse circuits contained in `tau(X)`, sorted.
    pub fn transverse_circuits_in(&self, x: VertexSet) -> Vec<ElementSet> {
        let mut out: Vec<ElementSet> = self
            .zero_sum_subtransversals_in(x)
            .into_iter()
            .filter(|s| self.rank_of(s) + 1 == s.len())
            .collect();
        out.sort();
        out
    }

    /// Whether some zero-sum subtransversal lies inside `tau(X)`.
    pub fn has_transverse_circuit_in(&self, x: VertexSet) -> bool {
        let mut y = x.0;
        while y != 0 {
            let mut b = y;
            while b != 0 {
                if self.zero_sum_on(y, b).is_some() {
                    return true;
                }
                b = (b - 1) & y;
            }
            y = (y - 1) & x.0;
        }
        false
    }

    /// `{x : r(S + x) = r(S)}`.
    pub fn closure(&self, s: &ElementSet) -> ElementSet {
        let basis = self.basis_of(s);
        let n = self.n();
        let mut out = *s;
        for k in Kind::ALL {
            for v in 0..n {
                if basis.contains(self.cols[k.block() * n + v]) {
                    *out.mask_mut(k) |= 1 << v;
                }
            }
        }
        out
    }

    /// Rank in the dual matroid: `|T| + r(W - T) - r(M)`.
    pub fn dual_rank(&self, t: &ElementSet) -> usize {
        t.len() + self.rank_of(&self.complement(t)) - self.rank()
    }

    /// Closure in the dual matroid.
    pub fn dual_closure(&self, s: &ElementSet) -> ElementSet {
        let base = self.dual_rank(s);
        let mut out = *s;
        for e in self.complement(s).iter() {
            let mut t = *s;
            t.insert(e);
            if self.dual_rank(&t) == base {
                out.insert(e);
            }
        }
        out
    }

    /// Least superset of `s` closed in both the matroid and its dual.
    pub fn full_closure(&self, s: &ElementSet) -> ElementSet {
        let mut cur = *s;
        loop {
            let next = self.dual_closure(&self.closure(&cur));
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Whether the ordinary 3-separation `s` is sequential: one side admits
    /// an ordering whose every prefix has `lambda < 3`.
    pub fn is_sequential_3sep(&self, s: &ElementSet) -> Result<bool, IsotropicError> {
        let co = self.complement(s);
        let lambda = self.lambda(s);
        if lambda >= 3 || s.len() < 3 || co.len() < 3 {
            return Err(IsotropicError::NotThreeSeparation {
                lambda,
                size: s.len(),
                co_size: co.len(),
            });
        }
        Ok(self.side_is_sequential(s) || self.side_is_sequential(&co))
    }

    fn side_is_sequential(&self, side: &ElementSet) -> bool {
        self.greedy_sequence(side) || self.exhaustive_sequence(side)
    }

    fn greedy_sequence(&self, side: &ElementSet) -> bool {
        let mut prefix = ElementSet::EMPTY;
        let mut rest = *side;
        while !rest.is_empty() {
            let next = rest.iter().find(|&e| {
                let mut t = prefix;
                t.insert(e);
                self.lambda(&t) < 3
            });
            match next {
                Some(e) => {
                    prefix.insert(e);
                    rest.remove(e);
                }
                None => return false,
            }
        }
        true
    }

    /// Exact search: grows every prefix set with `lambda < 3` one element at
    /// a time. Only such sets are stored, so the cost follows their number
    /// rather than `2^|side|`.
    fn exhaustive_sequence(&self, side: &ElementSet) -> bool {
        let mut layer: HashSet<ElementSet> = HashSet::from([ElementSet::EMPTY]);
        for _ in 0..side.len() {
            let mut next = HashSet::new();
            for prefix in &layer {
                for e in side.difference(prefix).iter() {
                    let mut t = *prefix;
                    t.insert(e);
                    if !next.contains(&t) && self.lambda(&t) < 3 {
                        next.insert(t);
                    }
                }
            }
            if next.is_empty() {
                return false;
            }
            layer = next;
        }
        true
    }
}

/// Ranks of every subset of the ground set, for `n <= 6`.
///
/// Spans are tracked as 64-bit membership masks over the whole space
/// `GF(2)^n` (at most 64 vectors), so adding a column is a fixed sequence
/// of block swaps instead of an elimination.
pub struct RankTable {
    n: usize,
    ranks: Vec<u8>,
}

pub const RANK_TABLE_MAX_N: usize = 6;

const BLOCK_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Maps a membership mask `{v}` to `{v ^ e}`.
#[inline]
fn translate(mut set: u64, e: u64) -> u64 {
    for (i, &lo) in BLOCK_MASKS.iter().enumerate() {
        if (e >> i) & 1 == 1 {
            let w = 1 << i;
            set = ((set & lo) << w) | ((set >> w) & lo);
        }
    }
    set
}

impl RankTable {
    pub fn build(m: &IsotropicMatroid) -> Result<Self, IsotropicError> {
        let n = m.n();
        if n > RANK_TABLE_MAX_N {
            return Err(IsotropicError::TooLarge {
                n,
                max: RANK_TABLE_MAX_N,
            });
        }
        let size = 1usize << (3 * n);
        let cols = m.columns();
        let mut spans = vec![0u64; size];
        let mut ranks = vec![0u8; size];
        spans[0] = 1;
        for s in 1..size {
            let low = s.trailing_zeros() as usize;
            let prev = spans[s & (s - 1)];
            let span = prev | translate(prev, cols[low]);
            spans[s] = span;
            ranks[s] = span.count_ones().trailing_zeros() as u8;
        }
        Ok(Self { n, ranks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ground_mask(&self) -> u64 {
        low_mask(3 * self.n)
    }

    #[inline]
    pub fn rank(&self, mask: u64) -> usize {
        self.ranks[mask as usize] as usize
    }

    #[inline]
    pub fn lambda(&self, mask: u64) -> usize {
        let full = self.ground_mask();
        self.rank(mask) + self.rank(full & !mask) - self.rank(full)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::pair_count;
    use proptest::prelude::*;

    fn el(v: usize, k: Kind) -> GroundElement {
        GroundElement::new(v, k)
    }

    fn set(es: &[(usize, Kind)]) -> ElementSet {
        es.iter().map(|&(v, k)| el(v, k)).collect()
    }

    #[test]
    fn single_vertex_columns() {
        let m = IsotropicMatroid::build(&Graph::empty(1).unwrap());
        assert_eq!(m.columns(), &[1, 0, 1]);
        assert!(m.is_circuit(&set(&[(0, Kind::Chi)])));
        assert!(m.is_circuit(&set(&[(0, Kind::Phi), (0, Kind::Psi)])));
        let looped = IsotropicMatroid::build(&Graph::from_edges(1, &[], &[0]).unwrap());
        assert_eq!(looped.columns(), &[1, 1, 0]);
    }

    #[test]
    fn rank_basics() {
        let g = Graph::cycle(5);
        let m = IsotropicMatroid::build(&g);
        assert_eq!(m.rank_of(&ElementSet::EMPTY), 0);
        assert_eq!(m.rank(), 5);
        assert_eq!(m.column_sum(&m.ground_set()), 0);
        for v in 0..5 {
            assert!(m.rank_of(&m.vertex_triple(v)) <= 2);
            let triple: Vec<_> = m.vertex_triple(v).iter().collect();
            assert!(m.matrix().column_dependency(&triple).unwrap().is_some());
        }
        assert_eq!(m.lambda(&ElementSet::EMPTY), 0);
    }

    #[test]
    fn lambda_of_component_is_zero() {
        let g = Graph::from_edges(5, &[(0, 1), (2, 3), (3, 4)], &[1]).unwrap();
        let m = IsotropicMatroid::build(&g);
        assert_eq!(m.lambda(&m.tau(VertexSet(0b00011))), 0);
    }

    #[test]
    fn neighborhood_circuits() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 3)], &[1]).unwrap();
        let m = IsotropicMatroid::build(&g);
        assert_eq!(
            m.neighborhood_circuit(0),
            set(&[(0, Kind::Chi), (1, Kind::Phi), (2, Kind::Phi)])
        );
        assert_eq!(
            m.neighborhood_circuit(1),
            set(&[(1, Kind::Psi), (0, Kind::Phi), (3, Kind::Phi)])
        );
        for v in 0..4 {
            let z = m.neighborhood_circuit(v);
            assert_eq!(m.column_sum(&z), 0);
            assert!(m.is_circuit(&z));
            assert!(z.is_subtransversal());
        }
    }

    #[test]
    fn associated_subtransversal_rules() {
        let m = IsotropicMatroid::build(&Graph::cycle(5));
        assert!(m.associated_subtransversal(&m.vertex_triple(2)).is_empty());
        assert_eq!(
            *m.associated_subtransversal(&set(&[(1, Kind::Phi), (1, Kind::Chi)])).set(),
            set(&[(1, Kind::Psi)])
        );
        let st = set(&[(0, Kind::Chi), (3, Kind::Psi)]);
        assert_eq!(*m.associated_subtransversal(&st).set(), st);
    }

    #[test]
    fn smallest_transverse_circuits_of_named_graphs() {
        let q = |g: &Graph| {
            IsotropicMatroid::build(g)
                .min_transverse_circuit(None)
                .unwrap()
                .q()
                .unwrap()
        };
        assert_eq!(q(&Graph::cycle(5)), 3);
        assert_eq!(q(&Graph::wheel(5)), 4);
        assert_eq!(q(&Graph::path(3)), 2);
        assert_eq!(q(&Graph::empty(2).unwrap()), 1);
        assert!(matches!(
            IsotropicMatroid::build(&Graph::empty(0).unwrap()).min_transverse_circuit(None),
            Err(IsotropicError::EmptyGraph)
        ));
        assert_eq!(
            IsotropicMatroid::build(&Graph::wheel(5))
                .min_transverse_circuit(Some(3))
                .unwrap(),
            TransverseCircuitSearch::ExceedsCap { cap: 3 }
        );
    }

    #[test]
    fn transverse_circuits_in_small_sets() {
        let g = Graph::cycle(5);
        let m = IsotropicMatroid::build(&g);
        assert!(m.transverse_circuits_in(VertexSet::EMPTY).is_empty());
        let big = VertexSet(0b00111);
        let found = m.transverse_circuits_in(big);
        assert!(!found.is_empty());
        assert!(found.contains(&m.neighborhood_circuit(1)));
        assert!(found.iter().all(|c| m.is_circuit(c) && c.is_subtransversal()));
        assert!(m.transverse_circuits_in(VertexSet(0b00011)).is_empty());
    }

    #[test]
    fn closures() {
        let m = IsotropicMatroid::build(&Graph::cycle(5));
        let w = m.ground_set();
        assert_eq!(m.full_closure(&w), w);
        let pair = set(&[(2, Kind::Phi), (2, Kind::Chi)]);
        assert!(m.closure(&pair).contains(el(2, Kind::Psi)));
        let fcl = m.full_closure(&pair);
        assert_eq!(m.full_closure(&fcl), fcl);
        assert!(pair.is_subset(&fcl));
    }

    #[test]
    fn sequential_three_separations() {
        let m = IsotropicMatroid::build(&Graph::cycle(5));
        let t = m.vertex_triple(0);
        assert!(m.is_sequential_3sep(&t).unwrap());
        assert!(m.is_sequential_3sep(&m.complement(&t)).unwrap());
        assert!(matches!(
            m.is_sequential_3sep(&set(&[(0, Kind::Phi)])),
            Err(IsotropicError::NotThreeSeparation { .. })
        ));
    }

    /// Tries every ordering of `side`, abandoning a branch as soon as a
    /// prefix has `lambda >= 3`.
    fn orderable(m: &IsotropicMatroid, prefix: ElementSet, rest: ElementSet) -> bool {
        rest.is_empty()
            || rest.iter().any(|e| {
                let mut p = prefix;
                p.insert(e);
                let mut r = rest;
                r.remove(e);
                m.lambda(&p) < 3 && orderable(m, p, r)
            })
    }

    #[test]
    fn sequential_check_matches_ordering_search() {
        let mut nonsequential = 0;
        for code in 0..1u128 << 6 {
            let m = IsotropicMatroid::build(&Graph::from_code(3, code).unwrap());
            for mask in 0..1u64 << 9 {
                let s = ElementSet::from_index_mask(3, mask);
                let co = m.complement(&s);
                if m.lambda(&s) >= 3 || s.len() < 3 || co.len() < 3 {
                    continue;
                }
                let oracle = orderable(&m, ElementSet::EMPTY, s) || orderable(&m, ElementSet::EMPTY, co);
                assert_eq!(m.is_sequential_3sep(&s).unwrap(), oracle, "code {code} S={mask:#x}");
                nonsequential += !oracle as usize;
            }
        }
        // With at most rank 3 every 3-separation is sequential.
        assert_eq!(nonsequential, 0);
        let m = IsotropicMatroid::build(&Graph::cycle(4));
        let mut seen = [false; 2];
        for mask in 0..1u64 << 12 {
            let s = ElementSet::from_index_mask(4, mask);
            let co = m.complement(&s);
            if m.lambda(&s) >= 3 || s.len() < 3 || co.len() < 3 {
                continue;
            }
            let oracle = orderable(&m, ElementSet::EMPTY, s) || orderable(&m, ElementSet::EMPTY, co);
            assert_eq!(m.is_sequential_3sep(&s).unwrap(), oracle, "S={mask:#x}");
            seen[oracle as usize] = true;
        }
        assert!(seen[1]);
    }

    #[test]
    fn rank_cache_agrees() {
        let g = Graph::wheel(5);
        let plain = IsotropicMatroid::build(&g);
        let cached = IsotropicMatroid::build(&g).with_rank_cache(16);
        for mask in (0u64..(1 << 18)).step_by(97) {
            let s = ElementSet::from_index_mask(6, mask);
            assert_eq!(plain.rank_of(&s), cached.rank_of(&s));
            assert_eq!(cached.rank_of(&s), cached.rank_of(&s));
        }
    }

    #[test]
    fn rank_table_matches_elimination() {
        for g in [Graph::cycle(5), Graph::wheel(5), Graph::from_edges(3, &[(0, 1)], &[2]).unwrap()] {
            let m = IsotropicMatroid::build(&g);
            let t = RankTable::build(&m).unwrap();
            let n = g.n();
            for mask in (0u64..(1 << (3 * n))).step_by(7) {
                assert_eq!(t.rank(mask), m.rank_of(&ElementSet::from_index_mask(n, mask)));
            }
        }
        assert!(RankTable::build(&IsotropicMatroid::build(&Graph::cycle(7))).is_err());
    }

    fn arb_graph(lo: usize, hi: usize) -> impl Strategy<Value = Graph> {
        (lo..=hi).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), pair_count(n) + n).prop_map(move |bits| {
                let code = bits.iter().enumerate().fold(0u128, |c, (k, &b)| c | ((b as u128) << k));
                Graph::from_code(n, code).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn triples_rank_and_lambda_detect_cut_rank(g in arb_graph(0, 10), x in any::<u64>()) {
            let n = g.n();
            let x = VertexSet(x & low_mask(n));
            let m = IsotropicMatroid::build(&g);
            let c = g.cut_rank(x);
            prop_assert_eq!(m.rank_of(&m.tau(x)), x.len() + c);
            prop_assert_eq!(m.lambda(&m.tau(x)), 2 * c);
            prop_assert_eq!(m.rank(), n);
        }

        #[test]
        fn lambda_symmetric(g in arb_graph(1, 8), mask in any::<u64>()) {
            let m = IsotropicMatroid::build(&g);
            let s = ElementSet::from_index_mask(g.n(), mask);
            prop_assert_eq!(m.lambda(&s), m.lambda(&m.complement(&s)));
        }

        #[test]
        fn transverse_rank_equivalence(g in arb_graph(1, 6), x in any::<u64>()) {
            let n = g.n();
            let x = VertexSet(x & low_mask(n));
            let m = IsotropicMatroid::build(&g);
            let r = m.rank_of(&m.tau(x));
            let none = m.transverse_circuits_in(x).is_empty();
            prop_assert!(r <= 2 * x.len());
            prop_assert_eq!(r >= 2 * x.len(), none);
            prop_assert_eq!(none, !m.has_transverse_circuit_in(x));
            if 2 * x.len() > n {
                prop_assert!(!none);
            }
        }

        #[test]
        fn smallest_circuit_is_minimal(g in arb_graph(1, 7)) {
            let m = IsotropicMatroid::build(&g);
            if let TransverseCircuitSearch::Found { q, witness } = m.min_transverse_circuit(None).unwrap() {
                prop_assert_eq!(witness.len(), q);
                prop_assert!(m.is_circuit(witness.set()));
                for s in 1..q {
                    prop_assert!(m.transverse_circuit_of_size(s).is_none());
                }
            } else {
                prop_assert!(false, "every nonempty graph has a transverse circuit");
            }
        }

        #[test]
        fn full_closure_is_idempotent(g in arb_graph(1, 5), mask in any::<u64>()) {
            let m = IsotropicMatroid::build(&g);
            let s = ElementSet::from_index_mask(g.n(), mask);
            let f = m.full_closure(&s);
            prop_assert!(s.is_subset(&f));
            prop_assert_eq!(m.full_closure(&f), f);
            prop_assert_eq!(m.closure(&f), f);
            prop_assert_eq!(m.dual_closure(&f), f);
        }
    }
}
