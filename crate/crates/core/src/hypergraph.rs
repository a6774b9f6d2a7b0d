//! Uniform hypergraphs, vertex sets and simplex weightings.
//!
//! Vertices are `0..n` inside the library. Every textual format and every
//! report prints them 1-based.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{invalid, Result};

/// Tolerance on `|Σ x_i − 1|` for a vector to count as a point of the simplex.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// An `r`-uniform hypergraph on the vertices `0..n`.
///
/// Edges are kept as strictly increasing vertex lists, sorted
/// lexicographically, without duplicates. Two hypergraphs are equal when
/// they have the same uniformity, vertex count and edge set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    r: usize,
    n: usize,
    edges: Vec<Vec<usize>>,
}

/// An induced or otherwise relabeled subgraph together with the map from
/// new vertex labels to the labels of the parent graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Induced {
    pub graph: Hypergraph,
    /// `map[new] = old`; strictly increasing.
    pub map: Vec<usize>,
}

impl Hypergraph {
    /// Builds a hypergraph, sorting every edge.
    ///
    /// Fails on edges of the wrong size, repeated vertices inside an edge,
    /// vertices outside `0..n` and duplicate edges.
    pub fn new<I, E>(r: usize, n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[usize]>,
    {
        if r == 0 {
            return Err(invalid("uniformity must be at least 1"));
        }
        let mut set = BTreeSet::new();
        for (k, e) in edges.into_iter().enumerate() {
            let e = e.as_ref();
            let edge = check_edge(r, n, e).map_err(|m| invalid(format!("edge #{}: {m}", k + 1)))?;
            if !set.insert(edge) {
                return Err(invalid(format!(
                    "edge #{} {} is repeated",
                    k + 1,
                    fmt_edge(e)
                )));
            }
        }
        Ok(Self {
            r,
            n,
            edges: set.into_iter().collect(),
        })
    }

    /// Same as [`Hypergraph::new`] but with 1-based vertex labels.
    pub fn from_one_based<I, E>(r: usize, n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[usize]>,
    {
        let shifted: Vec<Vec<usize>> = edges
            .into_iter()
            .map(|e| {
                e.as_ref()
                    .iter()
                    .map(|&v| v.checked_sub(1).ok_or_else(|| invalid("vertex 0 in 1-based input")))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Self::new(r, n, shifted)
    }

    /// Builds from an already canonical edge set.
    pub(crate) fn from_set(r: usize, n: usize, edges: BTreeSet<Vec<usize>>) -> Self {
        debug_assert!(edges
            .iter()
            .all(|e| e.len() == r && e.windows(2).all(|w| w[0] < w[1]) && e.iter().all(|&v| v < n)));
        Self {
            r,
            n,
            edges: edges.into_iter().collect(),
        }
    }

    pub fn empty(r: usize, n: usize) -> Self {
        assert!(r >= 1);
        Self {
            r,
            n,
            edges: Vec::new(),
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Membership test for a sorted edge.
    pub fn contains_edge(&self, edge: &[usize]) -> bool {
        self.edges
            .binary_search_by(|e| e.as_slice().cmp(edge))
            .is_ok()
    }

    /// Membership test for an edge given in any order.
    pub fn contains_unsorted(&self, edge: &[usize]) -> bool {
        let mut e = edge.to_vec();
        e.sort_unstable();
        self.contains_edge(&e)
    }

    /// `true` when every edge of `self` is an edge of `other` (same `r`, `n`).
    pub fn is_subgraph_of(&self, other: &Hypergraph) -> bool {
        self.r == other.r
            && self.n <= other.n
            && self.edges.iter().all(|e| other.contains_edge(e))
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(invalid(format!(
                "vertex {} outside 1..{}",
                v + 1,
                self.n
            )));
        }
        Ok(())
    }

    /// The link of `t`: the `(r − |t|)`-graph `{e : e ∪ t ∈ E}` on the same
    /// vertex labels.
    pub fn link(&self, t: &[usize]) -> Result<Hypergraph> {
        let t = VertexSet::new(self.n, t.iter().copied())?;
        if t.len() >= self.r {
            return Err(invalid(format!(
                "link of a {}-set in a {}-graph",
                t.len(),
                self.r
            )));
        }
        let set = self
            .edges
            .iter()
            .filter(|e| t.iter().all(|v| e.binary_search(&v).is_ok()))
            .map(|e| e.iter().copied().filter(|v| !t.contains(*v)).collect())
            .collect();
        Ok(Hypergraph::from_set(self.r - t.len(), self.n, set))
    }

    /// `L(i∖j)`: the `(r−1)`-sets `e` with `j ∉ e`, `e ∪ {i} ∈ E` and
    /// `e ∪ {j} ∉ E`, in lexicographic order.
    pub fn link_diff(&self, i: usize, j: usize) -> Result<Vec<Vec<usize>>> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        if i == j {
            return Err(invalid("link_diff needs two distinct vertices"));
        }
        Ok(self.link_diff_unchecked(i, j))
    }

    pub(crate) fn link_diff_unchecked(&self, i: usize, j: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.binary_search(&i).is_err() || e.binary_search(&j).is_ok() {
                continue;
            }
            let rest: Vec<usize> = e.iter().copied().filter(|&v| v != i).collect();
            let mut with_j = rest.clone();
            with_j.push(j);
            with_j.sort_unstable();
            if !self.contains_edge(&with_j) {
                out.push(rest);
            }
        }
        out
    }

    /// The subgraph induced by `vs`, relabeled to `0..|vs|` in order.
    pub fn induced(&self, vs: &VertexSet) -> Induced {
        let mut new_label = vec![usize::MAX; self.n];
        for (k, &v) in vs.as_slice().iter().enumerate() {
            assert!(v < self.n, "vertex {} outside the graph", v + 1);
            new_label[v] = k;
        }
        let set = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&v| new_label[v] != usize::MAX))
            .map(|e| e.iter().map(|&v| new_label[v]).collect())
            .collect();
        Induced {
            graph: Hypergraph::from_set(self.r, vs.len(), set),
            map: vs.as_slice().to_vec(),
        }
    }

    /// Deletes the given vertices and relabels the rest in order.
    pub fn delete_vertices(&self, gone: &[usize]) -> Induced {
        let keep: Vec<usize> = (0..self.n).filter(|v| !gone.contains(v)).collect();
        self.induced(&VertexSet::from_sorted(keep))
    }

    /// Applies a permutation, `perm[old] = new`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Hypergraph> {
        if perm.len() != self.n {
            return Err(invalid("permutation length differs from vertex count"));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(invalid("not a permutation"));
            }
        }
        let set = self
            .edges
            .iter()
            .map(|e| {
                let mut f: Vec<usize> = e.iter().map(|&v| perm[v]).collect();
                f.sort_unstable();
                f
            })
            .collect();
        Ok(Hypergraph::from_set(self.r, self.n, set))
    }

    /// `covered[i][j]` is true when some edge contains both `i` and `j`.
    pub fn covered_matrix(&self) -> Vec<Vec<bool>> {
        let mut m = vec![vec![false; self.n]; self.n];
        for e in &self.edges {
            for (a, &u) in e.iter().enumerate() {
                for &v in &e[a + 1..] {
                    m[u][v] = true;
                    m[v][u] = true;
                }
            }
        }
        m
    }

    pub fn is_pair_covered(&self, i: usize, j: usize) -> bool {
        self.edges
            .iter()
            .any(|e| e.binary_search(&i).is_ok() && e.binary_search(&j).is_ok())
    }

    /// Pairs `(i, j)`, `i < j`, contained in no edge.
    pub fn uncovered_pairs(&self) -> Vec<(usize, usize)> {
        let m = self.covered_matrix();
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !m[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn covers_pairs(&self) -> bool {
        self.uncovered_pairs().is_empty()
    }

    /// Replaces vertex `v` by a block of `sizes[v]` consecutive vertices;
    /// edges become every transversal of the blocks of an original edge.
    pub fn blowup(&self, sizes: &[usize]) -> Result<Hypergraph> {
        if sizes.len() != self.n {
            return Err(invalid(format!(
                "blowup needs {} class sizes, got {}",
                self.n,
                sizes.len()
            )));
        }
        if let Some(v) = sizes.iter().position(|&s| s == 0) {
            return Err(invalid(format!("class of vertex {} is empty", v + 1)));
        }
        let mut offset = Vec::with_capacity(self.n + 1);
        offset.push(0);
        for &s in sizes {
            offset.push(offset.last().unwrap() + s);
        }
        let mut set = BTreeSet::new();
        for e in &self.edges {
            let mut idx = vec![0usize; self.r];
            'odometer: loop {
                set.insert(e.iter().zip(&idx).map(|(&v, &k)| offset[v] + k).collect::<Vec<_>>());
                let mut pos = self.r;
                loop {
                    if pos == 0 {
                        break 'odometer;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < sizes[e[pos]] {
                        continue 'odometer;
                    }
                    idx[pos] = 0;
                }
            }
        }
        Ok(Hypergraph::from_set(self.r, offset[self.n], set))
    }

    /// `i ∼ j`: `L(i∖j) = L(j∖i)` and no edge contains both.
    pub fn equivalent(&self, i: usize, j: usize) -> Result<bool> {
        if i == j {
            return Err(invalid("equivalence needs two distinct vertices"));
        }
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        Ok(!self.is_pair_covered(i, j) && self.link_diff_unchecked(i, j) == self.link_diff_unchecked(j, i))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.binary_search(&v).is_ok()).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            for &v in e {
                d[v] += 1;
            }
        }
        d
    }

    /// Minimum degree; 0 for a graph without vertices.
    pub fn min_degree(&self) -> usize {
        self.degrees().into_iter().min().unwrap_or(0)
    }

    /// Vertices that lie in at least one edge.
    pub fn non_isolated(&self) -> VertexSet {
        let d = self.degrees();
        VertexSet::from_sorted((0..self.n).filter(|&v| d[v] > 0).collect())
    }

    /// The vertex lying in every edge, if there is one (smallest label wins).
    /// An edgeless graph has none.
    pub fn common_vertex(&self) -> Option<usize> {
        let first = self.edges.first()?;
        first
            .iter()
            .copied()
            .find(|v| self.edges.iter().all(|e| e.binary_search(v).is_ok()))
    }

    /// Edges as 1-based lists, for reports.
    pub fn edges_one_based(&self) -> Vec<Vec<usize>> {
        self.edges
            .iter()
            .map(|e| e.iter().map(|v| v + 1).collect())
            .collect()
    }
}

impl fmt::Display for Hypergraph {
    /// The `.hg` text format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.r, self.n)?;
        for e in &self.edges {
            let line: Vec<String> = e.iter().map(|v| (v + 1).to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

fn check_edge(r: usize, n: usize, e: &[usize]) -> std::result::Result<Vec<usize>, String> {
    if e.len() != r {
        return Err(format!("has {} vertices, expected {r}", e.len()));
    }
    let mut edge = e.to_vec();
    edge.sort_unstable();
    if let Some(&v) = edge.iter().find(|&&v| v >= n) {
        return Err(format!("vertex {} outside 1..{n}", v + 1));
    }
    if edge.windows(2).any(|w| w[0] == w[1]) {
        return Err("repeats a vertex".into());
    }
    Ok(edge)
}

pub(crate) fn fmt_edge(e: &[usize]) -> String {
    let parts: Vec<String> = e.iter().map(|v| (v + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// A sorted set of distinct vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    /// Validates membership in `0..n`; duplicates are an error.
    pub fn new(n: usize, vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = vertices.into_iter().collect();
        v.sort_unstable();
        if let Some(&bad) = v.iter().find(|&&x| x >= n) {
            return Err(invalid(format!("vertex {} outside 1..{n}", bad + 1)));
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("vertex set repeats a vertex"));
        }
        Ok(Self(v))
    }

    pub fn full(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub(crate) fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Self(v)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

/// A point of the standard simplex `Δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Weighting(Vec<f64>);

impl Weighting {
    /// Accepts nonnegative finite entries summing to 1 within [`SIMPLEX_TOL`].
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(invalid("a weighting needs at least one vertex"));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid(format!("weight of vertex {} is {}", i + 1, x[i])));
        }
        let s: f64 = x.iter().sum();
        if (s - 1.0).abs() > SIMPLEX_TOL {
            return Err(invalid(format!("weights sum to {s}, not 1")));
        }
        Ok(Self(x))
    }

    /// Scales a nonnegative vector with positive sum onto the simplex.
    pub fn normalized(mut x: Vec<f64>) -> Result<Self> {
        let s: f64 = x.iter().sum();
        if !(s > 0.0) || x.iter().any(|v| *v < 0.0) {
            return Err(invalid("cannot normalize: need nonnegative entries with positive sum"));
        }
        x.iter_mut().for_each(|v| *v /= s);
        Self::new(x)
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        Self(vec![1.0 / n as f64; n])
    }

    /// Uniform on `support`, zero elsewhere.
    pub fn uniform_on(n: usize, support: &[usize]) -> Self {
        assert!(!support.is_empty());
        let mut x = vec![0.0; n];
        let w = 1.0 / support.len() as f64;
        for &v in support {
            x[v] = w;
        }
        Self(x)
    }

    pub(crate) fn from_vec_unchecked(x: Vec<f64>) -> Self {
        Self(x)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Vertices with weight strictly above `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > threshold).collect()
    }
}
