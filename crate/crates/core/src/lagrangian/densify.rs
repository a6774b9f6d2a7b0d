use super::solver::{maximize, LagrangianResult, SolverConfig};
use crate::error::Result;
use crate::hypergraph::{Hypergraph, VertexSet};

/// A subgraph with the same Lagrangian whose optimum has full support and
/// covers every pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Densified {
    pub graph: Hypergraph,
    pub result: LagrangianResult,
    /// `map[new] = old` into the input graph.
    pub map: Vec<usize>,
}

/// Restricts `g` to the support of an optimum until the optimum found has
/// full support.
///
/// Inside a support, two vertices that share no edge have equal gradients,
/// so the weight of the later one can be moved onto the earlier without
/// changing `λ`. Doing that first makes every kept pair covered.
pub fn densify(g: &Hypergraph, cfg: &SolverConfig) -> Result<Densified> {
    let mut graph = g.clone();
    let mut map: Vec<usize> = (0..g.n()).collect();
    loop {
        let result = maximize(&graph, cfg)?;
        if graph.is_empty() {
            return Ok(Densified { graph, result, map });
        }
        let covered = graph.covered_matrix();
        let mut x = result.weighting.as_slice().to_vec();
        'shrink: loop {
            let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] > 0.0).collect();
            for (a, &i) in support.iter().enumerate() {
                for &j in &support[a + 1..] {
                    if !covered[i][j] {
                        x[i] += x[j];
                        x[j] = 0.0;
                        continue 'shrink;
                    }
                }
            }
            break;
        }
        let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] > 0.0).collect();
        if support.len() == graph.n() {
            return Ok(Densified { graph, result, map });
        }
        let ind = graph.induced(&VertexSet::from_sorted(support));
        map = ind.map.iter().map(|&v| map[v]).collect();
        graph = ind.graph;
    }
}

/// One deletion made by [`uncovered_reduce`]; labels refer to the input graph.
#[derive(Clone, Debug, PartialEq)]
pub enum ReduceStep {
    /// `L(removed) ⊆ L(by)` for the uncovered pair, so `λ` is unchanged.
    Dominated { removed: usize, by: usize },
    /// Neither link contains the other; both deletions were solved and the
    /// one keeping the larger value was taken.
    Branch {
        i: usize,
        j: usize,
        without_i: f64,
        without_j: f64,
        removed: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReduceReport {
    pub graph: Hypergraph,
    /// `map[new] = old` into the input graph.
    pub map: Vec<usize>,
    pub steps: Vec<ReduceStep>,
}

/// Deletes vertices of uncovered pairs until every pair is covered, keeping
/// `λ` unchanged: a vertex whose link lies inside its partner's goes first,
/// otherwise the better of the two deletions is kept (the larger label on
/// a tie).
pub fn uncovered_reduce(g: &Hypergraph, cfg: &SolverConfig) -> Result<ReduceReport> {
    let mut graph = g.clone();
    let mut map: Vec<usize> = (0..g.n()).collect();
    let mut steps = Vec::new();
    loop {
        let pairs = graph.uncovered_pairs();
        if pairs.is_empty() {
            return Ok(ReduceReport { graph, map, steps });
        }
        let links = sorted_links(&graph);
        let dominated = pairs.iter().find_map(|&(i, j)| {
            if is_subset(&links[j], &links[i]) {
                Some((j, i))
            } else if is_subset(&links[i], &links[j]) {
                Some((i, j))
            } else {
                None
            }
        });
        let removed = match dominated {
            Some((v, by)) => {
                steps.push(ReduceStep::Dominated {
                    removed: map[v],
                    by: map[by],
                });
                v
            }
            None => {
                let (i, j) = pairs[0];
                let without_i = maximize(&graph.delete_vertices(&[i]).graph, cfg)?.value;
                let without_j = maximize(&graph.delete_vertices(&[j]).graph, cfg)?.value;
                let v = if without_i > without_j + 1e-9 { i } else { j };
                steps.push(ReduceStep::Branch {
                    i: map[i],
                    j: map[j],
                    without_i,
                    without_j,
                    removed: map[v],
                });
                v
            }
        };
        let ind = graph.delete_vertices(&[removed]);
        map = ind.map.iter().map(|&v| map[v]).collect();
        graph = ind.graph;
    }
}

fn sorted_links(g: &Hypergraph) -> Vec<Vec<Vec<usize>>> {
    let mut links: Vec<Vec<Vec<usize>>> = vec![Vec::new(); g.n()];
    for e in g.edges() {
        for &v in e {
            links[v].push(e.iter().copied().filter(|&u| u != v).collect());
        }
    }
    links.iter_mut().for_each(|l| l.sort_unstable());
    links
}

fn is_subset(a: &[Vec<usize>], b: &[Vec<usize>]) -> bool {
    a.iter().all(|s| b.binary_search(s).is_ok())
}
