//! Shifting: the compression `π_ij`, left-compression and the combined
//! densify-and-compress procedure.

use std::collections::BTreeSet;

use crate::error::{invalid, Error, Result};
use crate::freeness::is_matching_free;
use crate::hypergraph::{Hypergraph, VertexSet, Weighting};
use crate::lagrangian::{densify, eval, LagrangianResult, SolverConfig};

/// Weights closer than this are treated as equal when relabeling.
pub const WEIGHT_TIE: f64 = 1e-10;

/// `π_ij(G)`: every edge `{j} ∪ F` with `F ∈ L(j∖i)` becomes `{i} ∪ F`.
///
/// ```
/// use hyperlag::{compression::compress_pair, families::star};
///
/// // a star with apex 2 compresses onto apex 1
/// let apex2 = star(6, 4).unwrap().relabel(&[1, 0, 2, 3, 4, 5]).unwrap();
/// assert_eq!(compress_pair(&apex2, 0, 1).unwrap(), star(6, 4).unwrap());
/// ```
pub fn compress_pair(g: &Hypergraph, i: usize, j: usize) -> Result<Hypergraph> {
    Ok(compress_counted(g, i, j)?.0)
}

fn compress_counted(g: &Hypergraph, i: usize, j: usize) -> Result<(Hypergraph, usize)> {
    let moving = g.link_diff(j, i)?;
    if moving.is_empty() {
        return Ok((g.clone(), 0));
    }
    let mut set: BTreeSet<Vec<usize>> = g.edges().iter().cloned().collect();
    for f in &moving {
        let mut old = f.clone();
        old.push(j);
        old.sort_unstable();
        set.remove(&old);
        let mut new = f.clone();
        new.push(i);
        new.sort_unstable();
        set.insert(new);
    }
    Ok((Hypergraph::from_set(g.r(), g.n(), set), moving.len()))
}

/// `L(j∖i) = ∅` for all `i < j`.
pub fn is_left_compressed(g: &Hypergraph) -> bool {
    first_uncompressed(g).is_none()
}

/// The pair `(i, j)`, `i < j`, with `L(j∖i) ≠ ∅`, smallest `j` first and
/// then smallest `i`.
pub fn first_uncompressed(g: &Hypergraph) -> Option<(usize, usize)> {
    (1..g.n()).find_map(|j| (0..j).find(|&i| !g.link_diff_unchecked(j, i).is_empty()).map(|i| (i, j)))
}

/// `s(G)`: the sum of the 1-based labels over all edges.
pub fn potential(g: &Hypergraph) -> u64 {
    g.edges()
        .iter()
        .flat_map(|e| e.iter().map(|&v| v as u64 + 1))
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub enum CompressionStep {
    /// Vertices (labels before the step) outside the optimum's support.
    Densify { removed: Vec<usize>, lambda: f64 },
    /// Relabeling by decreasing weight; `order[new] = old`.
    Relabel { order: Vec<usize> },
    /// `π_ij` moved `moved` edges; `lambda_at_x` is `λ(π_ij(G), x)` at the
    /// weighting that justified the move.
    Compress {
        i: usize,
        j: usize,
        moved: usize,
        potential_before: u64,
        potential_after: u64,
        lambda_at_x: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompressionTrace {
    pub steps: Vec<CompressionStep>,
    pub initial: Hypergraph,
    pub final_graph: Hypergraph,
    pub initial_lambda: f64,
    pub final_lambda: f64,
}

/// Vertex order by decreasing weight: a sweep over the sorted weights
/// starts a new group whenever a weight drops more than [`WEIGHT_TIE`]
/// below the group's first, and each group is ordered by label.
pub fn weight_order(x: &[f64]) -> Vec<usize> {
    let mut by_weight: Vec<usize> = (0..x.len()).collect();
    by_weight.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    let mut order = Vec::with_capacity(x.len());
    let mut group: Vec<usize> = Vec::new();
    for v in by_weight {
        if let Some(&head) = group.first() {
            if x[head] - x[v] > WEIGHT_TIE {
                group.sort_unstable();
                order.append(&mut group);
            }
        }
        group.push(v);
    }
    group.sort_unstable();
    order.append(&mut group);
    order
}

fn permute_result(res: LagrangianResult, perm: &[usize]) -> LagrangianResult {
    let x = res.weighting.as_slice();
    let mut y = vec![0.0; x.len()];
    for (old, &new) in perm.iter().enumerate() {
        y[new] = x[old];
    }
    let support = VertexSet::new(x.len(), res.support.iter().map(|v| perm[v])).expect("permuted support");
    let uncovered_support_pairs = res
        .uncovered_support_pairs
        .iter()
        .map(|&(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b])))
        .collect();
    LagrangianResult {
        weighting: Weighting::new(y).expect("permuted weighting"),
        support,
        uncovered_support_pairs,
        ..res
    }
}

/// Alternates densification with a single compression, relabeling by
/// weight in between, until the graph is dense and left-compressed.
///
/// Refuses inputs that contain `M_t^r`, returning the matching.
pub fn dense_and_compress(
    g: &Hypergraph,
    t: usize,
    cfg: &SolverConfig,
) -> Result<(Hypergraph, LagrangianResult, CompressionTrace)> {
    if t == 0 {
        return Err(invalid("t must be at least 1"));
    }
    let report = is_matching_free(g, t)?;
    if let Some(w) = report.witness {
        return Err(Error::NotFree(Box::new(w)));
    }
    let cap = (g.n() as u64) * potential(g).max(1) + g.n() as u64 + 1;
    let mut steps = Vec::new();
    let mut cur = g.clone();
    let mut initial_lambda = None;
    let mut counted = 0u64;
    loop {
        let d = densify(&cur, cfg)?;
        // the first densification solves the input graph itself
        initial_lambda.get_or_insert(d.result.value);
        let removed: Vec<usize> = (0..cur.n()).filter(|v| d.map.binary_search(v).is_err()).collect();
        if !removed.is_empty() {
            counted += 1;
            steps.push(CompressionStep::Densify {
                removed,
                lambda: d.result.value,
            });
        }
        cur = d.graph;
        let mut res = d.result;
        let order = weight_order(res.weighting.as_slice());
        if order.iter().enumerate().any(|(k, &v)| k != v) {
            let mut perm = vec![0; order.len()];
            for (new, &old) in order.iter().enumerate() {
                perm[old] = new;
            }
            cur = cur.relabel(&perm)?;
            res = permute_result(res, &perm);
            steps.push(CompressionStep::Relabel { order });
        }
        let Some((i, j)) = first_uncompressed(&cur) else {
            let trace = CompressionTrace {
                steps,
                initial: g.clone(),
                final_graph: cur.clone(),
                initial_lambda: initial_lambda.unwrap_or(0.0),
                final_lambda: res.value,
            };
            return Ok((cur, res, trace));
        };
        counted += 1;
        if counted > cap {
            return Err(Error::NoConvergence(format!("no fixed point after {cap} steps")));
        }
        let before = potential(&cur);
        let (next, moved) = compress_counted(&cur, i, j)?;
        let lambda_at_x = eval(&next, &res.weighting)?;
        steps.push(CompressionStep::Compress {
            i,
            j,
            moved,
            potential_before: before,
            potential_after: potential(&next),
            lambda_at_x,
        });
        cur = next;
    }
}
