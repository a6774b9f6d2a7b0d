//! The partition score `Σ′` of a 4-graph and its minimization.
//!
//! For a bipartition `(W₁, W₂)` an edge is good when it meets `W₁` once,
//! bad when it meets `W₁` twice or not at all, very bad with three vertices
//! in `W₁` and worst inside `W₁`. `Σ′ = bad + 2·very bad + 3·worst`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::hypergraph::{Hypergraph, VertexSet};

/// Cost of an edge with `k` vertices in `W₁`.
const WEIGHT: [i64; 5] = [1, 0, 1, 2, 3];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionScore {
    pub w1: VertexSet,
    pub w2: VertexSet,
    pub good: usize,
    pub bad: usize,
    pub very_bad: usize,
    pub worst: usize,
    pub sigma: u64,
}

fn check_r(g: &Hypergraph) -> Result<()> {
    if g.r() != 4 {
        return Err(invalid("the partition score is defined for 4-graphs"));
    }
    Ok(())
}

/// Edge classes and `Σ′` for `W₁`.
///
/// ```
/// use hyperlag::{families::split, partition::classify_edges, VertexSet};
///
/// let g = split(8, 4, Some(2)).unwrap();
/// let s = classify_edges(&g, &VertexSet::new(8, [0, 1]).unwrap()).unwrap();
/// assert_eq!((s.good, s.sigma), (40, 0));
/// ```
pub fn classify_edges(g: &Hypergraph, w1: &VertexSet) -> Result<PartitionScore> {
    check_r(g)?;
    if w1.iter().any(|v| v >= g.n()) {
        return Err(invalid("W1 has a vertex outside the graph"));
    }
    let mut counts = [0usize; 5];
    for e in g.edges() {
        counts[e.iter().filter(|&&v| w1.contains(v)).count()] += 1;
    }
    let sigma = counts.iter().zip(WEIGHT).map(|(&c, w)| c as u64 * w as u64).sum();
    Ok(PartitionScore {
        w2: VertexSet::from_sorted((0..g.n()).filter(|&v| !w1.contains(v)).collect()),
        w1: w1.clone(),
        good: counts[1],
        bad: counts[0] + counts[2],
        very_bad: counts[3],
        worst: counts[4],
        sigma,
    })
}

pub fn sigma_score(g: &Hypergraph, w1: &VertexSet) -> Result<u64> {
    Ok(classify_edges(g, w1)?.sigma)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionConfig {
    pub restarts: usize,
    pub seed: u64,
    pub exhaustive: bool,
    /// Largest vertex count for exhaustive mode.
    pub guard: usize,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            exhaustive: false,
            guard: 20,
        }
    }
}

/// Incremental state: per-edge counts `|e ∩ W₁|` and the running score.
struct Scorer<'a> {
    incident: &'a [Vec<usize>],
    inside: Vec<usize>,
    in_w1: Vec<bool>,
    sigma: i64,
}

impl<'a> Scorer<'a> {
    fn new(g: &Hypergraph, incident: &'a [Vec<usize>], in_w1: Vec<bool>) -> Self {
        let inside: Vec<usize> = g.edges().iter().map(|e| e.iter().filter(|&&v| in_w1[v]).count()).collect();
        let sigma = inside.iter().map(|&k| WEIGHT[k]).sum();
        Self {
            incident,
            inside,
            in_w1,
            sigma,
        }
    }

    fn delta(&self, v: usize) -> i64 {
        let step: isize = if self.in_w1[v] { -1 } else { 1 };
        self.incident[v]
            .iter()
            .map(|&e| {
                let k = self.inside[e];
                WEIGHT[(k as isize + step) as usize] - WEIGHT[k]
            })
            .sum()
    }

    fn flip(&mut self, v: usize) {
        self.sigma += self.delta(v);
        let add = !self.in_w1[v];
        for &e in &self.incident[v] {
            if add {
                self.inside[e] += 1;
            } else {
                self.inside[e] -= 1;
            }
        }
        self.in_w1[v] = add;
    }

    fn w1(&self) -> Vec<usize> {
        (0..self.in_w1.len()).filter(|&v| self.in_w1[v]).collect()
    }
}

fn incidence(g: &Hypergraph) -> Vec<Vec<usize>> {
    let mut inc = vec![Vec::new(); g.n()];
    for (k, e) in g.edges().iter().enumerate() {
        for &v in e {
            inc[v].push(k);
        }
    }
    inc
}

/// Minimizes `Σ′` over bipartitions; ties go to the lexicographically
/// smallest `W₁`.
///
/// Exhaustive mode walks all `2^n` subsets in Gray-code order, updating the
/// score one vertex flip at a time. Otherwise seeded random starts descend
/// by the best single-vertex flip until no flip helps.
pub fn min_sigma_partition(g: &Hypergraph, cfg: &PartitionConfig) -> Result<PartitionScore> {
    check_r(g)?;
    let n = g.n();
    let inc = incidence(g);
    let best_w1 = if cfg.exhaustive {
        if n > cfg.guard || n > 40 {
            return Err(Error::UnsupportedSize {
                what: "vertex count for exhaustive partition",
                value: n,
                guard: cfg.guard.min(40),
            });
        }
        exhaustive(g, &inc)
    } else {
        if cfg.restarts == 0 {
            return Err(invalid("at least one restart is required"));
        }
        let runs: Vec<(i64, Vec<usize>)> = (0..cfg.restarts)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(k as u64);
                let start: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
                descend(g, &inc, start)
            })
            .collect();
        runs.into_iter().min().map(|(_, w)| w).unwrap_or_default()
    };
    classify_edges(g, &VertexSet::from_sorted(best_w1))
}

fn descend(g: &Hypergraph, inc: &[Vec<usize>], start: Vec<bool>) -> (i64, Vec<usize>) {
    let mut s = Scorer::new(g, inc, start);
    loop {
        let best = (0..g.n()).map(|v| (s.delta(v), v)).min();
        match best {
            Some((d, v)) if d < 0 => s.flip(v),
            _ => return (s.sigma, s.w1()),
        }
    }
}

fn exhaustive(g: &Hypergraph, inc: &[Vec<usize>]) -> Vec<usize> {
    let n = g.n();
    let mut s = Scorer::new(g, inc, vec![false; n]);
    let mut best = (s.sigma, s.w1());
    for step in 1u64..(1u64 << n) {
        s.flip(step.trailing_zeros() as usize);
        if s.sigma < best.0 || (s.sigma == best.0 && s.w1() < best.1) {
            best = (s.sigma, s.w1());
        }
    }
    best.1
}
