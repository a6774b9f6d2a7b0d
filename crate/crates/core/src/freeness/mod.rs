//! Matchings, covered cores and homomorphisms of extensions.

mod core;
mod search;

pub use self::core::{is_core_free, is_hom_free, is_hom_free_direct};
pub use search::{enumerate_left_compressed_free, extremal_lambda_search, ExtremalReport};

use std::fmt;

use crate::error::{Error, Result};
use crate::hypergraph::{fmt_edge, Hypergraph};

/// Hard limit from the `u128` vertex masks used by the searches.
pub const MASK_LIMIT: usize = 128;

pub(crate) fn vertex_masks(g: &Hypergraph) -> Result<Vec<u128>> {
    if g.n() > MASK_LIMIT {
        return Err(Error::UnsupportedSize {
            what: "vertex count for bitmask search",
            value: g.n(),
            guard: MASK_LIMIT,
        });
    }
    Ok(g.edges().iter().map(|e| mask_of(e)).collect())
}

pub(crate) fn mask_of(vs: &[usize]) -> u128 {
    vs.iter().fold(0, |m, &v| m | 1 << v)
}

/// `adj[v]`: vertices sharing an edge with `v`.
pub(crate) fn covered_masks(g: &Hypergraph, masks: &[u128]) -> Vec<u128> {
    let mut adj = vec![0u128; g.n()];
    for &m in masks {
        let mut rest = m;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            adj[v] |= m & !(1 << v);
            rest &= rest - 1;
        }
    }
    adj
}

pub(crate) fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(v)
    })
}

/// A forbidden configuration found in a host graph.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// Pairwise disjoint edges.
    Matching { edges: Vec<Vec<usize>> },
    /// A vertex set whose pairs are all covered, with `pattern` embedded
    /// inside it by `embedding[f_vertex] = host_vertex` (non-isolated
    /// pattern vertices only; isolated ones map to `usize::MAX`).
    Core {
        core: Vec<usize>,
        pattern: Hypergraph,
        embedding: Vec<usize>,
    },
    /// A homomorphism `map[h_vertex] = host_vertex` from `extension`.
    Hom { extension: Hypergraph, map: Vec<usize> },
}

impl Witness {
    /// Re-checks the witness against `host` from scratch.
    pub fn verify(&self, host: &Hypergraph) -> bool {
        match self {
            Witness::Matching { edges } => {
                let mut seen = vec![false; host.n()];
                edges.iter().all(|e| {
                    host.contains_edge(e)
                        && e.iter().all(|&v| v < host.n() && !std::mem::replace(&mut seen[v], true))
                })
            }
            Witness::Core {
                core,
                pattern,
                embedding,
            } => {
                let cov = host.covered_matrix();
                let distinct = core.windows(2).all(|w| w[0] < w[1]);
                let covered = core.iter().enumerate().all(|(a, &u)| {
                    u < host.n() && core[a + 1..].iter().all(|&v| cov[u][v])
                });
                let used: Vec<usize> = embedding.iter().copied().filter(|&v| v != usize::MAX).collect();
                let mut sorted = used.clone();
                sorted.sort_unstable();
                sorted.dedup();
                let injective = sorted.len() == used.len();
                let inside = used.iter().all(|v| core.binary_search(v).is_ok());
                let isolated_ok = pattern
                    .degrees()
                    .iter()
                    .zip(embedding)
                    .all(|(&d, &v)| (d == 0) == (v == usize::MAX));
                let edges_ok = pattern
                    .edges()
                    .iter()
                    .all(|e| host.contains_unsorted(&e.iter().map(|&v| embedding[v]).collect::<Vec<_>>()));
                distinct
                    && covered
                    && injective
                    && inside
                    && isolated_ok
                    && edges_ok
                    && embedding.len() == pattern.n()
                    && core.len() >= pattern.n()
                    && pattern.r() == host.r()
            }
            Witness::Hom { extension, map } => {
                map.len() == extension.n()
                    && map.iter().all(|&v| v < host.n())
                    && extension.edges().iter().all(|e| {
                        let img: Vec<usize> = e.iter().map(|&v| map[v]).collect();
                        let mut s = img.clone();
                        s.sort_unstable();
                        s.dedup();
                        s.len() == img.len() && host.contains_edge(&s)
                    })
            }
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Matching { edges } => {
                let parts: Vec<String> = edges.iter().map(|e| fmt_edge(e)).collect();
                write!(f, "disjoint edges {}", parts.join(" "))
            }
            Witness::Core { core, .. } => write!(f, "covered core {}", fmt_edge(core)),
            Witness::Hom { map, .. } => {
                let parts: Vec<String> = map.iter().map(|v| (v + 1).to_string()).collect();
                write!(f, "homomorphism [{}]", parts.join(" "))
            }
        }
    }
}

/// The configuration a freeness check looks for.
#[derive(Clone, Debug, PartialEq)]
pub enum Pattern {
    Matching { t: usize },
    Core { p: usize, f: Hypergraph },
    Hom { p: usize, f: Hypergraph },
}

impl Pattern {
    pub fn tag(&self) -> String {
        match self {
            Pattern::Matching { t } => format!("M_{t}"),
            Pattern::Core { p, .. } => format!("core({p})"),
            Pattern::Hom { p, .. } => format!("hom(H_{p})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FreenessReport {
    pub pattern: String,
    pub free: bool,
    pub witness: Option<Witness>,
}

impl FreenessReport {
    pub(crate) fn from_witness(pattern: String, witness: Option<Witness>) -> Self {
        Self {
            pattern,
            free: witness.is_none(),
            witness,
        }
    }
}

/// Runs the check named by `pattern`.
pub fn check(g: &Hypergraph, pattern: &Pattern) -> Result<FreenessReport> {
    match pattern {
        Pattern::Matching { t } => is_matching_free(g, *t),
        Pattern::Core { p, f } => is_core_free(g, *p, f),
        Pattern::Hom { p, f } => is_hom_free(g, f, *p),
    }
}

/// The largest number of pairwise disjoint edges.
pub fn matching_number(g: &Hypergraph) -> Result<usize> {
    let masks = vertex_masks(g)?;
    Ok(max_matching(&masks, g.r(), usize::MAX).len())
}

/// `M_t`-freeness, with `t` disjoint edges as the witness.
pub fn is_matching_free(g: &Hypergraph, t: usize) -> Result<FreenessReport> {
    let masks = vertex_masks(g)?;
    let tag = format!("M_{t}");
    if t == 0 {
        return Ok(FreenessReport::from_witness(tag, Some(Witness::Matching { edges: Vec::new() })));
    }
    let found = max_matching(&masks, g.r(), t);
    let witness = (found.len() >= t).then(|| Witness::Matching {
        edges: found[..t].iter().map(|&k| g.edges()[k].clone()).collect(),
    });
    Ok(FreenessReport::from_witness(tag, witness))
}

/// Branch and bound over the lowest vertex still in an available edge:
/// either it stays unmatched or one of its edges is taken. Stops as soon as
/// `target` edges are found. Returns edge indices.
pub(crate) fn max_matching(masks: &[u128], r: usize, target: usize) -> Vec<usize> {
    struct Search<'a> {
        masks: &'a [u128],
        r: usize,
        target: usize,
        stack: Vec<usize>,
        best: Vec<usize>,
    }

    impl Search<'_> {
        fn run(&mut self, blocked: u128, from: &[usize]) {
            if self.best.len() >= self.target {
                return;
            }
            let avail: Vec<usize> = from.iter().copied().filter(|&k| self.masks[k] & blocked == 0).collect();
            if self.stack.len() > self.best.len() {
                self.best = self.stack.clone();
                if self.best.len() >= self.target {
                    return;
                }
            }
            if avail.is_empty() {
                return;
            }
            let union = avail.iter().fold(0u128, |m, &k| m | self.masks[k]);
            let bound = self.stack.len() + avail.len().min(union.count_ones() as usize / self.r);
            if bound <= self.best.len() {
                return;
            }
            let v = union.trailing_zeros();
            for &k in avail.iter().filter(|&&k| self.masks[k] >> v & 1 == 1) {
                self.stack.push(k);
                self.run(blocked | self.masks[k], &avail);
                self.stack.pop();
            }
            self.run(blocked | 1 << v, &avail);
        }
    }

    let greedy = {
        let mut used = 0u128;
        let mut out = Vec::new();
        for (k, &m) in masks.iter().enumerate() {
            if m & used == 0 {
                used |= m;
                out.push(k);
            }
        }
        out
    };
    let all: Vec<usize> = (0..masks.len()).collect();
    let mut s = Search {
        masks,
        r,
        target,
        stack: Vec::new(),
        best: greedy,
    };
    s.run(0, &all);
    s.best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete, matching, split, star};

    #[test]
    fn matching_numbers() {
        for n in 4..12 {
            assert_eq!(matching_number(&star(n, 4).unwrap()).unwrap(), 1);
        }
        assert_eq!(matching_number(&split(8, 4, Some(2)).unwrap()).unwrap(), 2);
        assert_eq!(matching_number(&matching(3, 4).unwrap()).unwrap(), 3);
        assert_eq!(matching_number(&complete(7, 4).unwrap()).unwrap(), 1);
        assert_eq!(matching_number(&complete(12, 3).unwrap()).unwrap(), 4);
        assert_eq!(matching_number(&Hypergraph::empty(4, 5)).unwrap(), 0);
    }

    #[test]
    fn matching_witness_verifies() {
        let g = split(9, 4, None).unwrap();
        let rep = is_matching_free(&g, 2).unwrap();
        assert!(!rep.free);
        assert!(rep.witness.unwrap().verify(&g));
        assert!(is_matching_free(&star(9, 4).unwrap(), 2).unwrap().free);
    }

    #[test]
    fn forged_witnesses_fail() {
        let g = complete(8, 4).unwrap();
        let bad = Witness::Matching {
            edges: vec![vec![0, 1, 2, 3], vec![3, 4, 5, 6]],
        };
        assert!(!bad.verify(&g));
        let absent = Witness::Matching {
            edges: vec![vec![0, 1, 2, 8]],
        };
        assert!(!absent.verify(&g));
    }
}
