//! Local-equivalence classes on a fixed vertex set.
//!
//! Loop complementation and simple local complementation at every vertex
//! generate the class (non-simple local complementation is a composite of
//! the two). Members are keyed by their exact labeled encoding.
//!
//! Loop flips commute with everything else and act freely, so a class is the
//! product of its simple slice with all `2^n` loop patterns. Degree questions
//! and isomorphism with unlooped targets only look at the simple slice.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexSet};
use crate::isotropic::{IsotropicMatroid, TransverseCircuitSearch};

pub const DEFAULT_MEMBER_CAP: usize = 5_000_000;
pub const MAX_ORBIT_VERTICES: usize = 15;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalEqError {
    #[error("orbit keys support at most {MAX_ORBIT_VERTICES} vertices, got {0}")]
    TooLarge(usize),
    #[error("operation needs a nonempty graph")]
    EmptyGraph,
    #[error("family recognition needs n in 5..=6, got {0}")]
    UnsupportedSize(usize),
    #[error("class exceeded the member cap of {0} before finishing")]
    Truncated(usize),
    #[error("orbit minimum degree {orbit} disagrees with smallest transverse circuit size minus one ({circuit})")]
    Disagreement { orbit: usize, circuit: usize },
}

#[derive(Clone, Debug)]
pub struct Orbit {
    pub seed: Graph,
    /// Member codes in BFS discovery order; the seed comes first.
    pub members: Vec<u128>,
    pub min_degree: Option<usize>,
    pub representative: Option<Graph>,
    pub truncated: bool,
}

impl Orbit {
    pub fn contains(&self, g: &Graph) -> bool {
        g.n() == self.seed.n() && self.members.contains(&g.code())
    }

    pub fn graphs(&self) -> impl Iterator<Item = Graph> + '_ {
        let n = self.seed.n();
        self.members
            .iter()
            .map(move |&c| Graph::from_code(n, c).expect("valid member code"))
    }

    pub fn summary(&self) -> OrbitSummary {
        OrbitSummary {
            seed: self.seed.clone(),
            size: self.members.len(),
            min_degree: self.min_degree,
            representative: self.representative.clone(),
            truncated: self.truncated,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub seed: Graph,
    pub size: usize,
    pub min_degree: Option<usize>,
    pub representative: Option<Graph>,
    pub truncated: bool,
}

fn bfs(
    seed: &Graph,
    member_cap: usize,
    with_loops: bool,
) -> Result<(Vec<u128>, bool), LocalEqError> {
    let n = seed.n();
    if n > MAX_ORBIT_VERTICES {
        return Err(LocalEqError::TooLarge(n));
    }
    let start = if with_loops { seed.clone() } else { seed.unlooped() };
    let key = |g: &Graph| if with_loops { g.code() } else { g.edge_code() };
    let mut seen = HashSet::new();
    let mut order = vec![key(&start)];
    seen.insert(order[0]);
    let mut queue = VecDeque::from([start]);
    while let Some(g) = queue.pop_front() {
        for v in 0..n {
            let mut next = Vec::with_capacity(2);
            if with_loops {
                next.push(g.loop_complement(v).expect("vertex in range"));
            }
            if g.degree(v) >= 2 {
                next.push(g.simple_local_complement(v).expect("vertex in range"));
            }
            for h in next {
                let k = key(&h);
                if seen.insert(k) {
                    if order.len() >= member_cap {
                        return Ok((order, true));
                    }
                    order.push(k);
                    queue.push_back(h);
                }
            }
        }
    }
    Ok((order, false))
}

fn degree_stats(n: usize, codes: &[u128]) -> (Option<usize>, Option<Graph>) {
    let mut best: Option<(usize, Graph)> = None;
    for &c in codes {
        let g = Graph::from_code(n, c).expect("valid member code");
        let d = g.min_degree().unwrap_or(0);
        if best.as_ref().is_none_or(|(b, _)| d < *b) {
            best = Some((d, g));
        }
    }
    match best {
        Some((d, g)) if n > 0 => (Some(d), Some(g)),
        _ => (None, None),
    }
}

/// Full local-equivalence class of `g` (loop patterns included). Stops and
/// flags `truncated` once `member_cap` members have been found.
pub fn orbit(g: &Graph, member_cap: usize) -> Result<Orbit, LocalEqError> {
    let (members, truncated) = bfs(g, member_cap, true)?;
    let (min_degree, representative) = degree_stats(g.n(), &members);
    Ok(Orbit {
        seed: g.clone(),
        members,
        min_degree,
        representative,
        truncated,
    })
}

/// Edge codes of the unlooped members of the class of `g`.
pub fn simple_class(g: &Graph, member_cap: usize) -> Result<(Vec<u128>, bool), LocalEqError> {
    bfs(g, member_cap, false)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinDegree {
    pub degree: usize,
    pub representative: Graph,
}

/// Smallest vertex degree over the class of `g`, computed by BFS and checked
/// against the smallest transverse circuit size `q` (it must equal `q - 1`).
pub fn min_degree_over_class(g: &Graph) -> Result<MinDegree, LocalEqError> {
    if g.n() == 0 {
        return Err(LocalEqError::EmptyGraph);
    }
    let (codes, truncated) = simple_class(g, DEFAULT_MEMBER_CAP)?;
    if truncated {
        return Err(LocalEqError::Truncated(DEFAULT_MEMBER_CAP));
    }
    let (Some(d), Some(rep)) = degree_stats(g.n(), &codes) else {
        return Err(LocalEqError::EmptyGraph);
    };
    let q = match IsotropicMatroid::build(g).min_transverse_circuit(None) {
        Ok(TransverseCircuitSearch::Found { q, .. }) => q,
        _ => return Err(LocalEqError::EmptyGraph),
    };
    if d + 1 != q {
        return Err(LocalEqError::Disagreement {
            orbit: d,
            circuit: q - 1,
        });
    }
    Ok(MinDegree {
        degree: d,
        representative: rep,
    })
}

/// Isomorphism by backtracking over degree-compatible assignments. Loops
/// must correspond as well.
pub fn is_isomorphic(a: &Graph, b: &Graph) -> bool {
    let n = a.n();
    if n != b.n() || a.edge_count() != b.edge_count() || a.loops().len() != b.loops().len() {
        return false;
    }
    let mut da: Vec<usize> = (0..n).map(|v| a.degree(v)).collect();
    let mut db: Vec<usize> = (0..n).map(|v| b.degree(v)).collect();
    let (ra, rb) = (da.clone(), db.clone());
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return false;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = 0u64;
    extend(a, b, &ra, &rb, 0, &mut map, &mut used)
}

fn extend(
    a: &Graph,
    b: &Graph,
    da: &[usize],
    db: &[usize],
    v: usize,
    map: &mut [usize],
    used: &mut u64,
) -> bool {
    let n = a.n();
    if v == n {
        return true;
    }
    for w in 0..n {
        if (*used >> w) & 1 == 1 || da[v] != db[w] || a.is_looped(v) != b.is_looped(w) {
            continue;
        }
        let consistent = (0..v).all(|u| a.has_edge(u, v) == b.has_edge(map[u], w));
        if !consistent {
            continue;
        }
        map[v] = w;
        *used |= 1 << w;
        if extend(a, b, da, db, v + 1, map, used) {
            return true;
        }
        *used &= !(1 << w);
    }
    map[v] = usize::MAX;
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    C5,
    W5,
}

impl Family {
    pub fn graph(self) -> Graph {
        match self {
            Family::C5 => Graph::cycle(5),
            Family::W5 => Graph::wheel(5),
        }
    }
}

/// Whether some member of the class of `g` is isomorphic to the family's
/// graph. Defined for `n` in `5..=6`.
pub fn locally_equivalent_to(g: &Graph, family: Family) -> Result<bool, LocalEqError> {
    if !(5..=6).contains(&g.n()) {
        return Err(LocalEqError::UnsupportedSize(g.n()));
    }
    let target = family.graph();
    if g.n() != target.n() {
        return Ok(false);
    }
    let (codes, _) = simple_class(g, DEFAULT_MEMBER_CAP)?;
    Ok(class_contains_copy(g.n(), &codes, &target))
}

fn class_contains_copy(n: usize, codes: &[u128], target: &Graph) -> bool {
    codes.iter().any(|&c| {
        let h = Graph::from_code(n, c).expect("valid member code");
        is_isomorphic(&h, target)
    })
}

/// [`locally_equivalent_to`] with a memo shared across calls: once a class
/// has been decided, every member of it answers from the cache.
pub struct FamilyRecognizer {
    family: Family,
    target: Graph,
    verdicts: Mutex<HashMap<u128, bool>>,
}

impl FamilyRecognizer {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            target: family.graph(),
            verdicts: Mutex::new(HashMap::new()),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn recognizes(&self, g: &Graph) -> Result<bool, LocalEqError> {
        if !(5..=6).contains(&g.n()) {
            return Err(LocalEqError::UnsupportedSize(g.n()));
        }
        if g.n() != self.target.n() {
            return Ok(false);
        }
        let key = g.edge_code();
        if let Some(&v) = self.verdicts.lock().expect("memo poisoned").get(&key) {
            return Ok(v);
        }
        let (codes, _) = simple_class(g, DEFAULT_MEMBER_CAP)?;
        let verdict = class_contains_copy(g.n(), &codes, &self.target);
        let mut memo = self.verdicts.lock().expect("memo poisoned");
        for c in codes {
            memo.insert(c, verdict);
        }
        Ok(verdict)
    }
}

/// Minimum vertex degree over the simple class of every labeled simple graph
/// on `n` vertices, indexed by edge code. Each class is explored once.
pub fn class_min_degree_table(n: usize) -> Result<Vec<u8>, LocalEqError> {
    if n > 8 {
        return Err(LocalEqError::TooLarge(n));
    }
    let total = 1usize << crate::graph::pair_count(n);
    const UNSEEN: u8 = u8::MAX;
    let mut table = vec![UNSEEN; total];
    let mut class: Vec<u128> = Vec::new();
    let mut queue: VecDeque<Graph> = VecDeque::new();
    for start in 0..total {
        if table[start] != UNSEEN {
            continue;
        }
        // Mark members with a provisional value while exploring.
        const EXPLORING: u8 = u8::MAX - 1;
        class.clear();
        let g = Graph::from_code(n, start as u128).expect("valid code");
        table[start] = EXPLORING;
        class.push(start as u128);
        queue.push_back(g);
        let mut best = usize::MAX;
        while let Some(g) = queue.pop_front() {
            best = best.min(g.min_degree().unwrap_or(0));
            for v in 0..n {
                if g.degree(v) < 2 {
                    continue;
                }
                let h = g.simple_local_complement(v).expect("vertex in range");
                let c = h.edge_code() as usize;
                if table[c] == UNSEEN {
                    table[c] = EXPLORING;
                    class.push(c as u128);
                    queue.push_back(h);
                }
            }
        }
        let d = if n == 0 { 0 } else { best as u8 };
        for &c in &class {
            table[c as usize] = d;
        }
    }
    Ok(table)
}

/// Degree-minimal vertex set helper for reporting: vertices of minimum degree.
pub fn min_degree_vertices(g: &Graph) -> VertexSet {
    let Some(d) = g.min_degree() else {
        return VertexSet::EMPTY;
    };
    (0..g.n()).filter(|&v| g.degree(v) == d).collect()
}
