//! Looped simple graphs on the vertex set `{0, .., n-1}`.
//!
//! Adjacency is stored as one `u64` bit-row per vertex, so graphs are limited
//! to 64 vertices. Loop status lives in a separate mask and never appears in
//! the adjacency rows: a looped vertex is not its own neighbor.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{rank_of_words, Gf2Matrix};

pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graphs are limited to {MAX_VERTICES} vertices, got {0}")]
    TooManyVertices(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge {0}-{0} is a loop; use the loop mask")]
    SelfEdge(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A set of vertices, as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn full(n: usize) -> Self {
        VertexSet(low_mask(n))
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1 << v)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && (self.0 >> v) & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1 << v);
    }

    pub fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        VertexSet(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> Self {
        VertexSet(!self.0 & low_mask(n))
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if let Some(&bad) = v.iter().find(|&&x| x >= MAX_VERTICES) {
            return Err(serde::de::Error::custom(format!("vertex {bad} out of range")));
        }
        Ok(v.into_iter().collect())
    }
}

#[inline]
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Number of vertex pairs, i.e. the length of the upper-triangle bit string.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
    loops: u64,
}

/// Certificate that a graph has a pendant vertex or a pair of twins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StructureWitness {
    /// `vertex` has `on` as its only neighbor.
    Pendant { vertex: usize, on: usize },
    /// `N(a) - {b} = N(b) - {a}`.
    Twins { a: usize, b: usize },
}

/// A split `(V1, W1; V2, W2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub v1: VertexSet,
    pub w1: VertexSet,
    pub v2: VertexSet,
    pub w2: VertexSet,
}

impl Graph {
    /// Edgeless, loopless graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        Ok(Self {
            n,
            adj: vec![0; n],
            loops: 0,
        })
    }

    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize)],
        looped: &[usize],
    ) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        for &v in looped {
            g.check(v)?;
            g.loops |= 1 << v;
        }
        Ok(g)
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges, &[]).expect("cycle needs n >= 3")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges, &[]).expect("valid path")
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n).expect("valid size");
        for u in 0..n {
            g.adj[u] = low_mask(n) & !(1 << u);
        }
        g
    }

    /// Wheel with `rim` rim vertices `0..rim` and hub `rim`.
    pub fn wheel(rim: usize) -> Self {
        let mut edges: Vec<_> = (0..rim).map(|i| (i, (i + 1) % rim)).collect();
        edges.extend((0..rim).map(|i| (i, rim)));
        Self::from_edges(rim + 1, &edges, &[]).expect("wheel needs rim >= 3")
    }

    fn check(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::SelfEdge(u));
        }
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
        Ok(())
    }

    pub fn set_loop(&mut self, v: usize, looped: bool) -> Result<(), GraphError> {
        self.check(v)?;
        if looped {
            self.loops |= 1 << v;
        } else {
            self.loops &= !(1 << v);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && (self.adj[u] >> v) & 1 == 1
    }

    pub fn is_looped(&self, v: usize) -> bool {
        (self.loops >> v) & 1 == 1
    }

    pub fn loops(&self) -> VertexSet {
        VertexSet(self.loops)
    }

    /// Adjacency bit-row of `v` (diagonal excluded).
    #[inline]
    pub fn adj_row(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        VertexSet(self.adj[v])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn min_degree(&self) -> Option<usize> {
        (0..self.n).map(|v| self.degree(v)).min()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            VertexSet(self.adj[u] & !low_mask(u + 1))
                .iter()
                .map(move |v| (u, v))
        })
    }

    /// Same edges, no loops.
    pub fn unlooped(&self) -> Self {
        Self {
            loops: 0,
            ..self.clone()
        }
    }

    /// `A(G)`: symmetric, with the loop mask on the diagonal.
    pub fn adjacency_matrix(&self) -> Gf2Matrix {
        Gf2Matrix::from_fn((0..self.n).collect(), (0..self.n).collect(), |i, j| {
            if i == j {
                self.is_looped(i)
            } else {
                self.has_edge(i, j)
            }
        })
        .expect("distinct vertex labels")
    }

    pub fn loop_complement(&self, v: usize) -> Result<Self, GraphError> {
        self.check(v)?;
        let mut g = self.clone();
        g.loops ^= 1 << v;
        Ok(g)
    }

    pub fn simple_local_complement(&self, v: usize) -> Result<Self, GraphError> {
        self.check(v)?;
        let mut g = self.clone();
        g.toggle_neighborhood(v);
        Ok(g)
    }

    /// Simple local complement at `v`, then loop complement at every vertex of
    /// `N(v)`. The neighborhood is read once, from `self`.
    pub fn nonsimple_local_complement(&self, v: usize) -> Result<Self, GraphError> {
        self.check(v)?;
        let nbhd = self.adj[v];
        let mut g = self.clone();
        g.toggle_neighborhood(v);
        g.loops ^= nbhd;
        Ok(g)
    }

    #[inline]
    pub(crate) fn toggle_neighborhood(&mut self, v: usize) {
        let nbhd = self.adj[v];
        let mut bits = nbhd;
        while bits != 0 {
            let u = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            self.adj[u] ^= nbhd & !(1 << u);
        }
    }

    /// Cut-rank `c_G(X) = r(A[V - X, X])`.
    #[inline]
    pub fn cut_rank(&self, x: VertexSet) -> usize {
        let xm = x.0 & low_mask(self.n);
        let outside = !xm & low_mask(self.n);
        rank_of_words(VertexSet(outside).iter().map(|v| self.adj[v] & xm))
    }

    pub fn components(&self) -> Vec<VertexSet> {
        let mut seen = 0u64;
        let mut out = Vec::new();
        for s in 0..self.n {
            if (seen >> s) & 1 == 1 {
                continue;
            }
            let mut comp = 1u64 << s;
            let mut frontier = comp;
            while frontier != 0 {
                let mut next = 0;
                for v in VertexSet(frontier).iter() {
                    next |= self.adj[v];
                }
                frontier = next & !comp;
                comp |= next;
            }
            seen |= comp;
            out.push(VertexSet(comp));
        }
        out
    }

    /// The empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Largest shortest-path distance; `None` for disconnected graphs.
    pub fn diameter(&self) -> Option<usize> {
        if !self.is_connected() {
            return None;
        }
        let mut diam = 0;
        for s in 0..self.n {
            let mut reached = 1u64 << s;
            let mut frontier = reached;
            let mut d = 0;
            while reached != low_mask(self.n) {
                let mut next = 0;
                for v in VertexSet(frontier).iter() {
                    next |= self.adj[v];
                }
                frontier = next & !reached;
                reached |= next;
                d += 1;
            }
            diam = diam.max(d);
        }
        Some(diam)
    }

    /// A pendant vertex (checked first) or a pair of twins, ignoring loops.
    pub fn find_pendant_or_twins(&self) -> Option<StructureWitness> {
        for v in 0..self.n {
            if self.degree(v) == 1 {
                let on = self.adj[v].trailing_zeros() as usize;
                return Some(StructureWitness::Pendant { vertex: v, on });
            }
        }
        for a in 0..self.n {
            for b in a + 1..self.n {
                let mask = !((1u64 << a) | (1u64 << b));
                if self.adj[a] & mask == self.adj[b] & mask {
                    return Some(StructureWitness::Twins { a, b });
                }
            }
        }
        None
    }

    /// First split found when scanning sides `V1` that contain vertex 0, in
    /// increasing bitmask order. `None` means the graph is prime.
    pub fn find_split(&self) -> Option<Split> {
        let n = self.n;
        if n < 4 {
            return None;
        }
        let full = low_mask(n);
        // Bits 1..n of `rest` choose the other members of V1.
        for rest in 0..(1u64 << (n - 1)) {
            let v1 = (rest << 1) | 1;
            let k = v1.count_ones() as usize;
            if k < 2 || n - k < 2 {
                continue;
            }
            let x = VertexSet(v1);
            if self.cut_rank(x) <= 1 {
                return Some(self.split_from_side(x));
            }
            debug_assert!(v1 & !full == 0);
        }
        None
    }

    /// Reconstructs `W1, W2` for a side `V1` of cut-rank at most one.
    pub fn split_from_side(&self, v1: VertexSet) -> Split {
        let v2 = v1.complement(self.n);
        let mut w1 = VertexSet::EMPTY;
        let mut w2 = VertexSet::EMPTY;
        for v in v1.iter() {
            let across = self.adj[v] & v2.0;
            if across != 0 {
                w1.insert(v);
                w2 = VertexSet(across);
            }
        }
        Split { v1, w1, v2, w2 }
    }

    pub fn is_prime(&self) -> bool {
        self.find_split().is_none()
    }

    /// Relabels so that vertex `v` of `self` becomes vertex `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut g = Self::empty(self.n).expect("same size");
        for (u, v) in self.edges() {
            g.adj[perm[u]] |= 1 << perm[v];
            g.adj[perm[v]] |= 1 << perm[u];
        }
        for v in self.loops().iter() {
            g.loops |= 1 << perm[v];
        }
        g
    }

    /// Smallest [`Graph::code`] over all relabelings: equal for exactly the
    /// isomorphic graphs. Brute force over `n!` permutations, so `n <= 8`.
    pub fn canonical_code(&self) -> u128 {
        assert!(self.n <= 8, "canonical code needs n <= 8");
        let n = self.n;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = self.code();
        // Heap's algorithm.
        let mut c = vec![0usize; n];
        let mut i = 0;
        while i < n {
            if c[i] < i {
                let j = if i % 2 == 0 { 0 } else { c[i] };
                perm.swap(j, i);
                best = best.min(self.relabel(&perm).code());
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        best
    }

    /// Upper-triangle bit string as an integer: bit `k` is the `k`-th pair
    /// `(i, j)`, `i < j`, in lexicographic order. Needs `n <= 16`.
    pub fn edge_code(&self) -> u128 {
        assert!(self.n <= 16, "edge code needs n <= 16");
        let mut code = 0u128;
        let mut k = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has_edge(i, j) {
                    code |= 1 << k;
                }
                k += 1;
            }
        }
        code
    }

    /// Edge code with the loop mask appended above the pair bits. Needs `n <= 15`.
    pub fn code(&self) -> u128 {
        assert!(self.n <= 15, "full code needs n <= 15");
        self.edge_code() | ((self.loops as u128) << pair_count(self.n))
    }

    /// Inverse of [`Graph::code`] (an edge code is a code with no loop bits).
    pub fn from_code(n: usize, code: u128) -> Result<Self, GraphError> {
        if n > 15 {
            return Err(GraphError::TooManyVertices(n));
        }
        let m = pair_count(n);
        if m + n < 128 && code >> (m + n) != 0 {
            return Err(GraphError::Parse(format!(
                "code {code:#x} has bits beyond {} for n={n}",
                m + n
            )));
        }
        let mut g = Self::empty(n)?;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                if (code >> k) & 1 == 1 {
                    g.adj[i] |= 1 << j;
                    g.adj[j] |= 1 << i;
                }
                k += 1;
            }
        }
        g.loops = (code >> m) as u64 & low_mask(n);
        Ok(g)
    }

    /// Bit string `pairs ∥ loops`: pair bits in lexicographic order, then one
    /// bit per vertex for the loop mask.
    fn bit_string(&self) -> Vec<bool> {
        let mut bits = Vec::with_capacity(pair_count(self.n) + self.n);
        for i in 0..self.n {
            for j in i + 1..self.n {
                bits.push(self.has_edge(i, j));
            }
        }
        bits.extend((0..self.n).map(|v| self.is_looped(v)));
        bits
    }

    /// Compact hex form `<n>:<digits>`.
    ///
    /// The digits are the bit string `pairs ∥ loops` read as a little-endian
    /// binary integer (bit `k` of the string has weight `2^k`), printed in
    /// lowercase hex, most significant digit first, zero-padded to
    /// `ceil((C(n,2) + n) / 4)` digits.
    pub fn to_hex(&self) -> String {
        let bits = self.bit_string();
        let digits = bits.len().div_ceil(4);
        let mut s = format!("{}:", self.n);
        for d in (0..digits).rev() {
            let mut nib = 0u8;
            for b in 0..4 {
                if bits.get(4 * d + b).copied().unwrap_or(false) {
                    nib |= 1 << b;
                }
            }
            s.push(char::from_digit(nib as u32, 16).unwrap());
        }
        s
    }

    pub fn from_hex(s: &str) -> Result<Self, GraphError> {
        let s = s.trim();
        let (n, digits) = s
            .split_once(':')
            .ok_or_else(|| GraphError::Parse(format!("expected <n>:<hex>, got {s:?}")))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| GraphError::Parse(format!("bad vertex count {n:?}")))?;
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        let m = pair_count(n) + n;
        let digits = digits.trim();
        if digits.len() != m.div_ceil(4) {
            return Err(GraphError::Parse(format!(
                "expected {} hex digits for n={n}, got {}",
                m.div_ceil(4),
                digits.len()
            )));
        }
        let mut bits = vec![false; digits.len() * 4];
        for (i, ch) in digits.chars().rev().enumerate() {
            let nib = ch
                .to_digit(16)
                .ok_or_else(|| GraphError::Parse(format!("bad hex digit {ch:?}")))?;
            for b in 0..4 {
                bits[4 * i + b] = (nib >> b) & 1 == 1;
            }
        }
        if bits[m..].iter().any(|&b| b) {
            return Err(GraphError::Parse("padding bits must be zero".into()));
        }
        let mut g = Self::empty(n)?;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                if bits[k] {
                    g.adj[i] |= 1 << j;
                    g.adj[j] |= 1 << i;
                }
                k += 1;
            }
        }
        for v in 0..n {
            if bits[k + v] {
                g.loops |= 1 << v;
            }
        }
        Ok(g)
    }

    /// Text form: a header `n=<k> loops=<bitstring>` (character `v` is `1`
    /// iff `v` is looped) followed by one `u v` line per edge, `u < v`,
    /// in lexicographic order.
    pub fn to_text(&self) -> String {
        let loops: String = (0..self.n)
            .map(|v| if self.is_looped(v) { '1' } else { '0' })
            .collect();
        let mut s = format!("n={} loops={}\n", self.n, loops);
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// Parses the text form. Blank lines and `#` comments are ignored; edges
    /// may appear in any order and orientation.
    pub fn parse_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| GraphError::Parse("missing header".into()))?;
        let mut n = None;
        let mut loops = None;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("n", v)) => {
                    n = Some(
                        v.parse::<usize>()
                            .map_err(|_| GraphError::Parse(format!("bad n {v:?}")))?,
                    )
                }
                Some(("loops", v)) => loops = Some(v.to_string()),
                _ => return Err(GraphError::Parse(format!("bad header field {field:?}"))),
            }
        }
        let n = n.ok_or_else(|| GraphError::Parse("header lacks n=".into()))?;
        let mut g = Self::empty(n)?;
        let loops = loops.unwrap_or_default();
        if !loops.is_empty() && loops.len() != n {
            return Err(GraphError::Parse(format!(
                "loop bitstring has length {}, expected {n}",
                loops.len()
            )));
        }
        for (v, ch) in loops.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => g.loops |= 1 << v,
                _ => return Err(GraphError::Parse(format!("bad loop flag {ch:?}"))),
            }
        }
        for line in lines {
            let mut it = line.split_whitespace();
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(GraphError::Parse(format!("bad edge line {line:?}")));
            };
            let parse = |t: &str| {
                t.parse::<usize>()
                    .map_err(|_| GraphError::Parse(format!("bad vertex {t:?}")))
            };
            g.add_edge(parse(a)?, parse(b)?)?;
        }
        Ok(g)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({})", self.to_hex())
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Graph {
    type Err = GraphError;

    /// Accepts either the text form or the hex form.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim_start().starts_with("n=") {
            Self::parse_text(s)
        } else {
            Self::from_hex(s)
        }
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Graph::from_hex(&s).map_err(serde::de::Error::custom)
    }
}
