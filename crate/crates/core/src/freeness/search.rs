use std::collections::HashMap;

use rayon::prelude::*;

use super::{mask_of, max_matching};
use crate::error::{invalid, Error, Result};
use crate::families::combinations;
use crate::hypergraph::Hypergraph;
use crate::lagrangian::{maximize, SolverConfig};

/// The `r`-subsets of `0..n` in colex order, each with the indices of the
/// sets obtained by lowering one element by one. Those come earlier in colex
/// order, and a family is left-compressed exactly when it is closed under
/// these unit shifts.
struct Colex {
    sets: Vec<Vec<usize>>,
    masks: Vec<u128>,
    preds: Vec<Vec<usize>>,
}

impl Colex {
    fn new(n: usize, r: usize) -> Self {
        let mut sets = combinations(&(0..n).collect::<Vec<_>>(), r);
        sets.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
        let index: HashMap<&[usize], usize> = sets.iter().enumerate().map(|(k, s)| (s.as_slice(), k)).collect();
        let preds = sets
            .iter()
            .map(|s| {
                (0..s.len())
                    .filter(|&a| s[a] > 0 && (a == 0 || s[a - 1] != s[a] - 1))
                    .map(|a| {
                        let mut p = s.clone();
                        p[a] -= 1;
                        index[p.as_slice()]
                    })
                    .collect()
            })
            .collect();
        let masks = sets.iter().map(|s| mask_of(s)).collect();
        Self { sets, masks, preds }
    }
}

#[derive(Clone)]
struct State {
    next: usize,
    included: Vec<bool>,
    chosen: Vec<usize>,
}

struct Enumerator<'a> {
    colex: &'a Colex,
    r: usize,
    t: usize,
}

impl Enumerator<'_> {
    fn can_include(&self, s: &State) -> bool {
        let k = s.next;
        if !self.colex.preds[k].iter().all(|&p| s.included[p]) {
            return false;
        }
        let m = self.colex.masks[k];
        if self.t == 2 {
            return s.chosen.iter().all(|&c| self.colex.masks[c] & m != 0);
        }
        let mut masks: Vec<u128> = s.chosen.iter().map(|&c| self.colex.masks[c]).collect();
        masks.push(m);
        max_matching(&masks, self.r, self.t).len() < self.t
    }

    fn children(&self, s: &State) -> Vec<State> {
        let mut out = Vec::with_capacity(2);
        let mut skip = s.clone();
        skip.next += 1;
        if self.can_include(s) {
            let mut take = s.clone();
            take.included[s.next] = true;
            take.chosen.push(s.next);
            take.next += 1;
            out.push(skip);
            out.push(take);
        } else {
            out.push(skip);
        }
        out
    }

    fn finish(&self, s: State, out: &mut Vec<Vec<usize>>) {
        if s.next == self.colex.sets.len() {
            out.push(s.chosen);
            return;
        }
        for c in self.children(&s) {
            self.finish(c, out);
        }
    }
}

/// Every left-compressed `M_t^r`-free `r`-graph on the vertex set `0..n`
/// (graphs on fewer vertices appear with trailing isolated vertices), each
/// exactly once, in a fixed order.
pub fn enumerate_left_compressed_free(n: usize, r: usize, t: usize, guard: usize) -> Result<Vec<Hypergraph>> {
    if n > guard {
        return Err(Error::UnsupportedSize {
            what: "vertex count for enumeration",
            value: n,
            guard,
        });
    }
    if r < 2 || t < 1 || n > 128 {
        return Err(invalid("enumeration needs r ≥ 2, t ≥ 1 and at most 128 vertices"));
    }
    if n < r {
        return Ok(vec![Hypergraph::empty(r, n)]);
    }
    let colex = Colex::new(n, r);
    let en = Enumerator { colex: &colex, r, t };
    let root = State {
        next: 0,
        included: vec![false; colex.sets.len()],
        chosen: Vec::new(),
    };
    // expand breadth-first to get independent subtrees for the workers
    let mut frontier = vec![root];
    while frontier.len() < 256 && frontier.iter().all(|s| s.next < colex.sets.len()) {
        frontier = frontier.iter().flat_map(|s| en.children(s)).collect();
    }
    let chunks: Vec<Vec<Vec<usize>>> = frontier
        .into_par_iter()
        .map(|s| {
            let mut out = Vec::new();
            en.finish(s, &mut out);
            out
        })
        .collect();
    Ok(chunks
        .into_iter()
        .flatten()
        .map(|idx| Hypergraph::new(r, n, idx.iter().map(|&k| &colex.sets[k])).expect("colex sets are valid edges"))
        .collect())
}

/// Result of maximizing `λ` over the enumerated graphs at one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalReport {
    pub n: usize,
    pub r: usize,
    pub t: usize,
    pub graphs: usize,
    pub max_lambda: f64,
    pub witness: Hypergraph,
    pub witness_is_star_subgraph: bool,
    /// Best graph whose edges share no common vertex.
    pub best_non_star: Option<(f64, Hypergraph)>,
    /// Best graph whose edges all share a vertex.
    pub best_star: Option<(f64, Hypergraph)>,
}

fn is_star_subgraph(g: &Hypergraph) -> bool {
    g.is_empty() || g.common_vertex().is_some()
}

fn better(a: &(f64, Hypergraph), b: &(f64, Hypergraph)) -> bool {
    a.0 > b.0 + 1e-12 || ((a.0 - b.0).abs() <= 1e-12 && a.1.edges() < b.1.edges())
}

fn keep_best(slot: &mut Option<(f64, Hypergraph)>, cand: (f64, Hypergraph)) {
    match slot {
        Some(cur) if !better(&cand, cur) => {}
        _ => *slot = Some(cand),
    }
}

/// Maximizes `λ` over every left-compressed `M_t^r`-free graph on `n`
/// vertices. Ties go to the lexicographically smallest edge list.
pub fn extremal_lambda_search(n: usize, r: usize, t: usize, cfg: &SolverConfig, guard: usize) -> Result<ExtremalReport> {
    let graphs = enumerate_left_compressed_free(n, r, t, guard)?;
    let values: Vec<f64> = graphs
        .par_iter()
        .map(|g| {
            if g.is_empty() {
                Ok(0.0)
            } else {
                maximize(g, cfg).map(|res| res.value)
            }
        })
        .collect::<Result<_>>()?;
    let count = graphs.len();
    let mut best: Option<(f64, Hypergraph)> = None;
    let mut best_star = None;
    let mut best_non_star = None;
    for (g, v) in graphs.into_iter().zip(values) {
        let star = is_star_subgraph(&g);
        let cand = (v, g);
        if star {
            keep_best(&mut best_star, cand.clone());
        } else {
            keep_best(&mut best_non_star, cand.clone());
        }
        keep_best(&mut best, cand);
    }
    let (max_lambda, witness) = best.expect("the empty graph is always enumerated");
    Ok(ExtremalReport {
        n,
        r,
        t,
        graphs: count,
        max_lambda,
        witness_is_star_subgraph: is_star_subgraph(&witness),
        witness,
        best_non_star,
        best_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::is_left_compressed;
    use crate::families::complete;
    use crate::freeness::matching_number;
    use std::collections::HashSet;

    /// Every subset of the `r`-sets filtered by the two predicates.
    fn brute_force(n: usize, r: usize, t: usize) -> HashSet<Hypergraph> {
        let sets = combinations(&(0..n).collect::<Vec<_>>(), r);
        let mut out = HashSet::new();
        for bitsel in 0u32..(1 << sets.len()) {
            let edges = (0..sets.len()).filter(|&k| bitsel >> k & 1 == 1).map(|k| &sets[k]);
            let g = Hypergraph::new(r, n, edges).unwrap();
            if is_left_compressed(&g) && matching_number(&g).unwrap() < t {
                out.insert(g);
            }
        }
        out
    }

    #[test]
    fn matches_brute_force() {
        for (n, r, t) in [(5, 4, 2), (6, 4, 2), (6, 3, 2), (6, 2, 3), (5, 2, 2)] {
            let got = enumerate_left_compressed_free(n, r, t, 9).unwrap();
            let set: HashSet<Hypergraph> = got.iter().cloned().collect();
            assert_eq!(set.len(), got.len(), "duplicates at n={n} r={r} t={t}");
            assert_eq!(set, brute_force(n, r, t), "n={n} r={r} t={t}");
        }
    }

    #[test]
    fn counts() {
        let counts: Vec<usize> = (4..=7)
            .map(|n| enumerate_left_compressed_free(n, 4, 2, 9).unwrap().len())
            .collect();
        assert_eq!(counts, vec![2, 6, 32, 352]);
    }

    #[test]
    fn seven_vertices_contain_k7() {
        let all = enumerate_left_compressed_free(7, 4, 2, 9).unwrap();
        assert!(all.contains(&complete(7, 4).unwrap()));
    }

    #[test]
    fn guard() {
        assert!(matches!(
            enumerate_left_compressed_free(10, 4, 2, 9),
            Err(Error::UnsupportedSize { value: 10, guard: 9, .. })
        ));
    }

    #[test]
    fn extremal_at_seven() {
        let rep = extremal_lambda_search(7, 4, 2, &SolverConfig::default(), 9).unwrap();
        assert_eq!(rep.witness, complete(7, 4).unwrap());
        assert!(!rep.witness_is_star_subgraph);
        assert!((rep.max_lambda - 5.0 / 343.0).abs() < 1e-12);
    }
}
