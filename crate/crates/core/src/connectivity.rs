//! Ordinary, cyclic and vertical connectivity of isotropic matroids, and the
//! isotropic (Bouchet) connectivity of graphs.
//!
//! The closed forms work on the graph: `tau = kappa*` is read off from
//! connectedness, pendants and twins, and `kappa` is `1 + 2 min c_G(X)` over
//! the sets `X` with `c_G(X) < min(|X|, |V - X|)`, or `n` if there are none.
//! [`brute_force_separations`] and [`brute_force_connectivity`] scan every
//! subset of the ground set instead and serve as the oracle for small `n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{low_mask, Graph, VertexSet};
use crate::isotropic::{
    ElementSet, GroundElement, IsotropicError, IsotropicMatroid, RankTable, RANK_TABLE_MAX_N,
};
use crate::localeq::{self, Family};

/// A connectivity value that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended {
    Finite(usize),
    Infinite,
}

impl Extended {
    pub fn finite(self) -> Option<usize> {
        match self {
            Extended::Finite(k) => Some(k),
            Extended::Infinite => None,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(k) => write!(f, "{k}"),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(k) => s.serialize_u64(*k as u64),
            Extended::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(k) => Ok(Extended::Finite(k as usize)),
            Raw::S(s) if s == "inf" => Ok(Extended::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeparationKind {
    Ordinary,
    Cyclic,
    Vertical,
    Isotropic,
}

/// A set `S` of ground elements (or a vertex set `X` for isotropic
/// separations, and for vertical separations of the form `tau(X)`) with
/// `lambda(S) < k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationWitness {
    pub kind: SeparationKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elements: Option<ElementSet>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub vertices: Option<VertexSet>,
    pub lambda_value: usize,
    pub k: usize,
}

impl SeparationWitness {
    /// Re-checks the defining conditions against the matroid.
    pub fn is_valid(&self, m: &IsotropicMatroid) -> bool {
        let g = m.graph();
        let n = g.n();
        if self.kind == SeparationKind::Isotropic {
            let Some(x) = self.vertices else { return false };
            let c = g.cut_rank(x);
            return c == self.lambda_value
                && c < self.k
                && x.len() >= self.k
                && n - x.len() >= self.k;
        }
        let s = match (self.elements, self.vertices) {
            (Some(s), _) => s,
            (None, Some(x)) => m.tau(x),
            (None, None) => return false,
        };
        let co = m.complement(&s);
        let lambda = m.lambda(&s);
        if lambda != self.lambda_value || lambda >= self.k {
            return false;
        }
        match self.kind {
            SeparationKind::Ordinary => s.len() >= self.k && co.len() >= self.k,
            SeparationKind::Cyclic => m.is_dependent(&s) && m.is_dependent(&co),
            SeparationKind::Vertical => m.rank_of(&s) >= self.k && m.rank_of(&co) >= self.k,
            SeparationKind::Isotropic => unreachable!(),
        }
    }
}

/// `tau` and `kappa*` with the case of the four-way classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicConnectivity {
    pub tau: Extended,
    pub kappa_star: usize,
    pub case: u8,
    pub witness: Option<SeparationWitness>,
}

/// Case of the four-way classification by `n`, connectedness, pendants and twins.
pub fn cconnect_case(g: &Graph) -> u8 {
    if g.n() == 0 {
        1
    } else if g.n() == 1 || !g.is_connected() {
        2
    } else if g.find_pendant_or_twins().is_some() {
        3
    } else {
        4
    }
}

fn measured(m: &IsotropicMatroid, kind: SeparationKind, s: ElementSet, k: usize) -> SeparationWitness {
    SeparationWitness {
        kind,
        elements: Some(s),
        vertices: None,
        lambda_value: m.lambda(&s),
        k,
    }
}

pub fn tau_and_kappa_star(g: &Graph) -> CyclicConnectivity {
    let m = IsotropicMatroid::build(g);
    let case = cconnect_case(g);
    let (tau, kappa_star, witness) = match case {
        1 => (Extended::Infinite, 0, None),
        2 => {
            let s = if g.n() == 1 {
                // The zero column: chi for an unlooped vertex, psi for a looped one.
                let mut s = ElementSet::EMPTY;
                if g.is_looped(0) {
                    s.psi = 1;
                } else {
                    s.chi = 1;
                }
                s
            } else {
                m.tau(g.components()[0])
            };
            (Extended::Finite(1), 1, Some(measured(&m, SeparationKind::Ordinary, s, 1)))
        }
        3 => {
            let w = parallel_pair(&m).map(|s| measured(&m, SeparationKind::Ordinary, s, 2));
            (Extended::Finite(2), 2, w)
        }
        _ => {
            let w = measured(&m, SeparationKind::Ordinary, m.vertex_triple(0), 3);
            (Extended::Finite(3), 3, Some(w))
        }
    };
    CyclicConnectivity {
        tau,
        kappa_star,
        case,
        witness,
    }
}

/// Two distinct elements with identical nonzero columns.
pub fn parallel_pair(m: &IsotropicMatroid) -> Option<ElementSet> {
    let n = m.n();
    let cols = m.columns();
    let mut order: Vec<usize> = (0..cols.len()).filter(|&i| cols[i] != 0).collect();
    order.sort_by_key(|&i| (cols[i], i));
    order
        .windows(2)
        .find(|w| cols[w[0]] == cols[w[1]])
        .map(|w| w.iter().map(|&i| GroundElement::from_index(n, i)).collect())
}

/// `kappa` with a minimizing `X`, if one exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VerticalConnectivity {
    pub kappa: usize,
    /// The least bitmask `X` (containing vertex 0) realizing the minimum.
    pub witness: Option<VertexSet>,
    pub cut_rank: Option<usize>,
}

impl VerticalConnectivity {
    pub fn separation(&self, g: &Graph) -> Option<SeparationWitness> {
        let x = self.witness?;
        let m = IsotropicMatroid::build(g);
        Some(SeparationWitness {
            kind: SeparationKind::Vertical,
            elements: Some(m.tau(x)),
            vertices: Some(x),
            lambda_value: 2 * g.cut_rank(x),
            k: self.kappa,
        })
    }
}

pub fn kappa(g: &Graph) -> VerticalConnectivity {
    let n = g.n();
    let mut best: Option<(usize, VertexSet)> = None;
    if n >= 2 {
        for rest in 0..(1u64 << (n - 1)) {
            let x = VertexSet((rest << 1) | 1);
            let size = x.len();
            let bound = size.min(n - size);
            if bound == 0 {
                continue;
            }
            if let Some((c0, _)) = best {
                if c0 == 0 {
                    break;
                }
            }
            let c = g.cut_rank(x);
            if c < bound && best.is_none_or(|(c0, _)| c < c0) {
                best = Some((c, x));
            }
        }
    }
    match best {
        Some((c, x)) => VerticalConnectivity {
            kappa: 1 + 2 * c,
            witness: Some(x),
            cut_rank: Some(c),
        },
        None => VerticalConnectivity {
            kappa: n,
            witness: None,
            cut_rank: None,
        },
    }
}

/// `(kappa + 1) / 2` when `kappa < n`, otherwise infinite.
pub fn kappa_b_from_kappa(kappa: usize, n: usize) -> Extended {
    if kappa < n {
        Extended::Finite(kappa.div_ceil(2))
    } else {
        Extended::Infinite
    }
}

pub fn kappa_b(g: &Graph) -> Extended {
    kappa_b_from_kappa(kappa(g).kappa, g.n())
}

/// Least `k` admitting an isotropic `k`-separation, by scanning all `X`:
/// an `X` works for every `k` with `c_G(X) < k <= min(|X|, |V - X|)`.
pub fn kappa_b_direct(g: &Graph) -> (Extended, Option<VertexSet>) {
    let n = g.n();
    let mut best: Option<(usize, VertexSet)> = None;
    for x in 0..(1u64 << n) {
        let x = VertexSet(x);
        let k = g.cut_rank(x) + 1;
        if k <= x.len().min(n - x.len()) && best.is_none_or(|(b, _)| k < b) {
            best = Some((k, x));
        }
    }
    match best {
        Some((k, x)) => (Extended::Finite(k), Some(x)),
        None => (Extended::Infinite, None),
    }
}

/// Hypotheses of the five-way classification of `kappa`, in order.
pub fn vconnect_hypotheses(g: &Graph, kappa: usize) -> [bool; 5] {
    let n = g.n();
    let connected = g.is_connected();
    let prime = g.is_prime();
    [
        n <= 3 && connected,
        !connected,
        n >= 4 && connected && !prime,
        n >= 5 && prime && kappa < n,
        n >= 5 && kappa == n,
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VconnectClass {
    pub case: u8,
    pub kappa: usize,
    /// For the maximal case at `n` in `{5, 6}`: the family `g` is locally
    /// equivalent to, if any.
    pub family: Option<Family>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("graph satisfies {0:?} of the five hypotheses instead of exactly one")]
pub struct ClassificationError(pub [bool; 5]);

pub fn classify_vconnect(g: &Graph) -> Result<VconnectClass, ClassificationError> {
    let k = kappa(g).kappa;
    let hyps = vconnect_hypotheses(g, k);
    if hyps.iter().filter(|&&h| h).count() != 1 {
        return Err(ClassificationError(hyps));
    }
    let case = hyps.iter().position(|&h| h).unwrap() as u8 + 1;
    let family = if case == 5 {
        match g.n() {
            5 if localeq::locally_equivalent_to(g, Family::C5).unwrap_or(false) => Some(Family::C5),
            6 if localeq::locally_equivalent_to(g, Family::W5).unwrap_or(false) => Some(Family::W5),
            _ => None,
        }
    } else {
        None
    };
    Ok(VconnectClass {
        case,
        kappa: k,
        family,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witnesses {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<SeparationWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<SeparationWitness>,
    #[serde(rename = "kappa_B", skip_serializing_if = "Option::is_none")]
    pub kappa_b: Option<SeparationWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectivityReport {
    pub n: usize,
    pub tau: Extended,
    pub kappa_star: usize,
    pub kappa: usize,
    #[serde(rename = "kappa_B")]
    pub kappa_b: Extended,
    pub case_thm1: u8,
    pub case_thm2: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    pub witnesses: Witnesses,
}

pub fn analyze(g: &Graph) -> ConnectivityReport {
    let cyc = tau_and_kappa_star(g);
    let vert = kappa(g);
    let kb = kappa_b_from_kappa(vert.kappa, g.n());
    let class = classify_vconnect(g).ok();
    let iso = match (kb, vert.witness, vert.cut_rank) {
        (Extended::Finite(k), Some(x), Some(c)) => Some(SeparationWitness {
            kind: SeparationKind::Isotropic,
            elements: None,
            vertices: Some(x),
            lambda_value: c,
            k,
        }),
        _ => None,
    };
    ConnectivityReport {
        n: g.n(),
        tau: cyc.tau,
        kappa_star: cyc.kappa_star,
        kappa: vert.kappa,
        kappa_b: kb,
        case_thm1: cyc.case,
        case_thm2: class.map(|c| c.case),
        family: class.and_then(|c| c.family),
        witnesses: Witnesses {
            tau: cyc.witness,
            kappa: vert.separation(g),
            kappa_b: iso,
        },
    }
}

fn guard(m: &IsotropicMatroid) -> Result<RankTable, IsotropicError> {
    RankTable::build(m)
}

/// Every `S` satisfying the chosen separation condition at level `k`, in
/// increasing index-mask order (bit `kind * n + v`). Isotropic separations
/// are vertex sets. Needs `n <= 6`.
pub fn brute_force_separations(
    m: &IsotropicMatroid,
    kind: SeparationKind,
    k: usize,
) -> Result<Vec<SeparationWitness>, IsotropicError> {
    let n = m.n();
    if kind == SeparationKind::Isotropic {
        if n > RANK_TABLE_MAX_N {
            return Err(IsotropicError::TooLarge {
                n,
                max: RANK_TABLE_MAX_N,
            });
        }
        let g = m.graph();
        return Ok((0..(1u64 << n))
            .map(VertexSet)
            .filter_map(|x| {
                let c = g.cut_rank(x);
                (c < k && x.len() >= k && n - x.len() >= k).then_some(SeparationWitness {
                    kind,
                    elements: None,
                    vertices: Some(x),
                    lambda_value: c,
                    k,
                })
            })
            .collect());
    }
    let table = guard(m)?;
    let full = table.ground_mask();
    let mut out = Vec::new();
    for mask in 0..=full {
        let co = full & !mask;
        let (r, rc) = (table.rank(mask), table.rank(co));
        let lambda = r + rc - table.rank(full);
        if lambda >= k {
            continue;
        }
        let (size, co_size) = (mask.count_ones() as usize, co.count_ones() as usize);
        let ok = match kind {
            SeparationKind::Ordinary => size >= k && co_size >= k,
            SeparationKind::Cyclic => r < size && rc < co_size,
            SeparationKind::Vertical => r >= k && rc >= k,
            SeparationKind::Isotropic => unreachable!(),
        };
        if ok {
            out.push(SeparationWitness {
                kind,
                elements: Some(ElementSet::from_index_mask(n, mask)),
                vertices: None,
                lambda_value: lambda,
                k,
            });
        }
    }
    Ok(out)
}

/// The three matroid connectivities by exhaustive subset scan, with the
/// no-separation defaults `kappa* = |W| - r(M)` and `kappa = r(M)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BruteForceConnectivity {
    pub tau: Extended,
    pub kappa_star: usize,
    pub kappa: usize,
}

pub fn brute_force_connectivity(m: &IsotropicMatroid) -> Result<BruteForceConnectivity, IsotropicError> {
    let table = guard(m)?;
    Ok(connectivity_from_table(&table))
}

pub fn connectivity_from_table(table: &RankTable) -> BruteForceConnectivity {
    let n = table.n();
    let full = table.ground_mask();
    let rm = table.rank(full);
    let width = 3 * n;
    let mut tau = usize::MAX;
    let mut cyc = width - rm;
    let mut vert = rm;
    // Every condition is symmetric in S and W - S, so fix the top element
    // outside S.
    let half = if width == 0 { 1 } else { 1u64 << (width - 1) };
    for mask in 0..half {
        let co = full & !mask;
        let (r, rc) = (table.rank(mask), table.rank(co));
        let k = r + rc - rm + 1;
        let size = mask.count_ones() as usize;
        let co_size = width - size;
        if k < tau && size.min(co_size) >= k {
            tau = k;
        }
        if k < cyc && r < size && rc < co_size {
            cyc = k;
        }
        if k < vert && r.min(rc) >= k {
            vert = k;
        }
    }
    BruteForceConnectivity {
        tau: if tau == usize::MAX {
            Extended::Infinite
        } else {
            Extended::Finite(tau)
        },
        kappa_star: cyc,
        kappa: vert,
    }
}

/// Index-mask helper for callers that scan subsets of `W(G)` directly.
pub fn ground_mask(n: usize) -> u64 {
    low_mask(3 * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::pair_count;
    use proptest::prelude::*;

    #[test]
    fn thm1_examples() {
        let e = tau_and_kappa_star(&Graph::empty(0).unwrap());
        assert_eq!((e.tau, e.kappa_star, e.case), (Extended::Infinite, 0, 1));
        let p4 = tau_and_kappa_star(&Graph::path(4));
        assert_eq!((p4.tau, p4.kappa_star, p4.case), (Extended::Finite(2), 2, 3));
        let c5 = tau_and_kappa_star(&Graph::cycle(5));
        assert_eq!((c5.tau, c5.kappa_star, c5.case), (Extended::Finite(3), 3, 4));
        for g in [Graph::path(4), Graph::cycle(5), Graph::empty(3).unwrap(), Graph::empty(1).unwrap()] {
            let m = IsotropicMatroid::build(&g);
            let w = tau_and_kappa_star(&g).witness.unwrap();
            assert!(w.is_valid(&m), "{g:?} {w:?}");
        }
    }

    #[test]
    fn kappa_examples() {
        let disc = Graph::from_edges(4, &[(0, 1), (2, 3)], &[]).unwrap();
        let k = kappa(&disc);
        assert_eq!(k.kappa, 1);
        assert_eq!(k.witness, Some(VertexSet(0b0011)));
        assert_eq!(kappa(&Graph::cycle(5)).kappa, 5);
        assert_eq!(kappa(&Graph::wheel(5)).kappa, 6);
        assert_eq!(kappa(&Graph::wheel(7)).kappa, 7);
        assert_eq!(kappa(&Graph::path(4)).kappa, 3);
        assert_eq!(kappa(&Graph::empty(0).unwrap()).kappa, 0);
        assert_eq!(kappa(&Graph::complete(2)).kappa, 2);
    }

    #[test]
    fn kappa_b_examples() {
        assert_eq!(kappa_b(&Graph::wheel(5)), Extended::Infinite);
        assert_eq!(kappa_b(&Graph::wheel(7)), Extended::Finite(4));
        assert_eq!(kappa_b(&Graph::empty(3).unwrap()), Extended::Finite(1));
        assert_eq!(kappa_b(&Graph::empty(0).unwrap()), Extended::Infinite);
        for g in [Graph::wheel(5), Graph::wheel(7), Graph::path(5), Graph::empty(0).unwrap()] {
            assert_eq!(kappa_b(&g), kappa_b_direct(&g).0);
        }
    }

    #[test]
    fn classification_examples() {
        let k2 = classify_vconnect(&Graph::complete(2)).unwrap();
        assert_eq!((k2.case, k2.kappa), (1, 2));
        let c5 = classify_vconnect(&Graph::cycle(5)).unwrap();
        assert_eq!((c5.case, c5.family), (5, Some(Family::C5)));
        let w5 = classify_vconnect(&Graph::wheel(5)).unwrap();
        assert_eq!((w5.case, w5.family), (5, Some(Family::W5)));
        let w7 = classify_vconnect(&Graph::wheel(7)).unwrap();
        assert_eq!((w7.case, w7.kappa), (4, 7));
        assert_eq!(classify_vconnect(&Graph::path(5)).unwrap().case, 3);
        assert_eq!(classify_vconnect(&Graph::empty(4).unwrap()).unwrap().case, 2);
    }

    #[test]
    fn brute_force_single_vertex() {
        let m = IsotropicMatroid::build(&Graph::empty(1).unwrap());
        let seps = brute_force_separations(&m, SeparationKind::Ordinary, 1).unwrap();
        let chi = ElementSet { chi: 1, ..ElementSet::EMPTY };
        assert!(seps.iter().any(|w| w.elements == Some(chi)));
        let b = brute_force_connectivity(&m).unwrap();
        assert_eq!((b.tau, b.kappa_star, b.kappa), (Extended::Finite(1), 1, 1));
        let empty = brute_force_connectivity(&IsotropicMatroid::build(&Graph::empty(0).unwrap())).unwrap();
        assert_eq!((empty.tau, empty.kappa_star, empty.kappa), (Extended::Infinite, 0, 0));
        assert!(brute_force_separations(
            &IsotropicMatroid::build(&Graph::cycle(7)),
            SeparationKind::Vertical,
            2
        )
        .is_err());
    }

    #[test]
    fn extended_json() {
        assert_eq!(serde_json::to_string(&Extended::Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&Extended::Finite(3)).unwrap(), "3");
        assert_eq!(serde_json::from_str::<Extended>("\"inf\"").unwrap(), Extended::Infinite);
        assert_eq!(serde_json::from_str::<Extended>("4").unwrap(), Extended::Finite(4));
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
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn vertical_witness_checks(g in arb_graph(0, 4), kind in 0usize..3, k in 1usize..5) {
            let m = IsotropicMatroid::build(&g);
            let kind = [SeparationKind::Ordinary, SeparationKind::Cyclic, SeparationKind::Vertical][kind];
            for w in brute_force_separations(&m, kind, k).unwrap() {
                prop_assert!(w.is_valid(&m));
                if kind == SeparationKind::Vertical {
                    let s = w.elements.unwrap();
                    prop_assert!(m.rank_of(&s) >= k && m.rank_of(&m.complement(&s)) >= k);
                }
            }
        }

        #[test]
        fn pure_vertical_separations(g in arb_graph(1, 9), x in any::<u64>()) {
            let n = g.n();
            let x = VertexSet(x & low_mask(n));
            let m = IsotropicMatroid::build(&g);
            let c = g.cut_rank(x);
            let s = m.tau(x);
            let co = m.complement(&s);
            let lambda = m.lambda(&s);
            let least = (1..=3 * n).find(|&k| lambda < k && m.rank_of(&s) >= k && m.rank_of(&co) >= k);
            prop_assert_eq!(least.is_some(), c < x.len().min(n - x.len()));
            if let Some(k) = least {
                prop_assert_eq!(k, 2 * c + 1);
            }
        }

        #[test]
        fn kappa_invariants(g in arb_graph(1, 9)) {
            let n = g.n();
            let v = kappa(&g);
            let t = tau_and_kappa_star(&g);
            prop_assert_eq!(t.tau, Extended::Finite(t.kappa_star));
            prop_assert!(v.kappa >= t.kappa_star);
            prop_assert!(v.kappa % 2 == 1 || (v.kappa == n && v.witness.is_none()));
            if v.kappa < n {
                let w = v.separation(&g).unwrap();
                prop_assert!(w.is_valid(&IsotropicMatroid::build(&g)));
            }
            prop_assert_eq!(kappa_b(&g), kappa_b_direct(&g).0);
        }
    }
}
