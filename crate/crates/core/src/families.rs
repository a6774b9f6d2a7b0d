//! Constructors for the named hypergraph families.
//!
//! All constructors take sizes, not labels; the resulting graphs use the
//! library's 0-based vertices. Doc comments quote the family in the usual
//! 1-based notation.

use std::collections::BTreeSet;

use crate::error::{invalid, Result};
use crate::hypergraph::Hypergraph;

/// A family name plus its parameters, as accepted by the CLI.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Complete { t: usize, r: usize },
    Matching { t: usize, r: usize },
    Star { n: usize, r: usize },
    Split { n: usize, r: usize, a: Option<usize> },
    /// Extension of the matching `M_t^r` with a core of `p` vertices.
    Extension { t: usize, r: usize, p: usize },
    Case { k: usize, n: usize },
    K53Minus2,
}

impl FamilySpec {
    pub fn build(&self) -> Result<Hypergraph> {
        match *self {
            FamilySpec::Complete { t, r } => complete(t, r),
            FamilySpec::Matching { t, r } => matching(t, r),
            FamilySpec::Star { n, r } => star(n, r),
            FamilySpec::Split { n, r, a } => split(n, r, a),
            FamilySpec::Extension { t, r, p } => extension(&matching(t, r)?, p),
            FamilySpec::Case { k, n } => case_family(k, n),
            FamilySpec::K53Minus2 => Ok(k53minus2()),
        }
    }
}

/// All `k`-subsets of `lo..=hi` (1-based bounds), returned 0-based.
fn subsets(lo: usize, hi: usize, k: usize) -> Vec<Vec<usize>> {
    let pool: Vec<usize> = (lo..=hi).map(|v| v - 1).collect();
    combinations(&pool, k)
}

pub(crate) fn combinations(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(pool: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..pool.len() {
            if pool.len() - i < need {
                break;
            }
            cur.push(pool[i]);
            rec(pool, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(pool, k, 0, &mut cur, &mut out);
    out
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `K_t^r`: every `r`-subset of `t` vertices.
pub fn complete(t: usize, r: usize) -> Result<Hypergraph> {
    if r == 0 || t < r {
        return Err(invalid(format!("complete graph needs t ≥ r ≥ 1, got t={t}, r={r}")));
    }
    Ok(Hypergraph::from_set(r, t, subsets(1, t, r).into_iter().collect()))
}

/// `M_t^r` on `rt` vertices: edges `{(k−1)r+1, …, kr}`.
pub fn matching(t: usize, r: usize) -> Result<Hypergraph> {
    if t == 0 || r == 0 {
        return Err(invalid("matching needs t ≥ 1 and r ≥ 1"));
    }
    let set = (0..t).map(|k| (k * r..(k + 1) * r).collect()).collect();
    Ok(Hypergraph::from_set(r, r * t, set))
}

/// The star `{1} ∪ f` over all `(r−1)`-subsets `f` of `{2..n}`.
pub fn star(n: usize, r: usize) -> Result<Hypergraph> {
    if r < 2 || n < r {
        return Err(invalid(format!("star needs n ≥ r ≥ 2, got n={n}, r={r}")));
    }
    let set = subsets(2, n, r - 1)
        .into_iter()
        .map(|mut f| {
            f.insert(0, 0);
            f
        })
        .collect();
    Ok(Hypergraph::from_set(r, n, set))
}

/// The `|A|` maximizing `a·C(n−a, r−1)`, smallest on ties.
pub fn split_part_size(n: usize, r: usize) -> usize {
    (1..=n + 1 - r)
        .max_by(|&a, &b| {
            let ea = a as u128 * binomial(n - a, r - 1);
            let eb = b as u128 * binomial(n - b, r - 1);
            // reversed on ties so the smaller size wins under max_by
            ea.cmp(&eb).then(b.cmp(&a))
        })
        .unwrap_or(1)
}

/// `S^r(n)`: parts `A = {1..a}` and `B`, edges are one `A`-vertex plus
/// `r−1` vertices of `B`. Without `a`, the edge-maximizing size is used.
pub fn split(n: usize, r: usize, a: Option<usize>) -> Result<Hypergraph> {
    if r < 2 || n < r {
        return Err(invalid(format!("split graph needs n ≥ r ≥ 2, got n={n}, r={r}")));
    }
    let a = match a {
        Some(a) if a == 0 || a > n + 1 - r => {
            return Err(invalid(format!("|A| must lie in 1..={}, got {a}", n + 1 - r)))
        }
        Some(a) => a,
        None => split_part_size(n, r),
    };
    let mut set = BTreeSet::new();
    for f in subsets(a + 1, n, r - 1) {
        for v in 0..a {
            let mut e = f.clone();
            e.insert(0, v);
            set.insert(e);
        }
    }
    Ok(Hypergraph::from_set(r, n, set))
}

/// The extension `H_p^F`: the vertices of `F` plus `p − |V(F)|` new core
/// vertices, and for each uncovered core pair `{v_i, v_j}` (lexicographic
/// order) a fresh pad `B_ij` of `r − 2` vertices with the edge
/// `{v_i, v_j} ∪ B_ij`.
pub fn extension(f: &Hypergraph, p: usize) -> Result<Hypergraph> {
    if f.r() < 3 {
        return Err(invalid("extension needs uniformity at least 3"));
    }
    if p < f.n() {
        return Err(invalid(format!("core size {p} is smaller than |V(F)| = {}", f.n())));
    }
    let r = f.r();
    let covered = f.covered_matrix();
    let mut edges: BTreeSet<Vec<usize>> = f.edges().iter().cloned().collect();
    let mut next = p;
    for i in 0..p {
        for j in i + 1..p {
            let is_covered = i < f.n() && j < f.n() && covered[i][j];
            if is_covered {
                continue;
            }
            let mut e = vec![i, j];
            e.extend(next..next + r - 2);
            next += r - 2;
            edges.insert(e);
        }
    }
    Ok(Hypergraph::from_set(r, next, edges))
}

/// `K_5^3` minus the two edges `245` and `345`.
pub fn k53minus2() -> Hypergraph {
    let set = subsets(1, 5, 3)
        .into_iter()
        .filter(|e| e != &[1, 3, 4] && e != &[2, 3, 4])
        .collect();
    Hypergraph::from_set(3, 5, set)
}

/// Builder for the case displays: unions of "fixed prefix plus any
/// `k`-subset of a range" blocks and literal edges, all 1-based.
struct CaseBuilder {
    n: usize,
    edges: BTreeSet<Vec<usize>>,
}

impl CaseBuilder {
    fn new(n: usize) -> Self {
        let mut b = Self {
            n,
            edges: BTreeSet::new(),
        };
        // 12ij, 3 ≤ i < j ≤ n: shared by every case display
        b.block(&[1, 2], 3, n, 2);
        b
    }

    fn block(&mut self, prefix: &[usize], lo: usize, hi: usize, k: usize) -> &mut Self {
        for tail in subsets(lo, hi, k) {
            let mut e: Vec<usize> = prefix.iter().map(|v| v - 1).collect();
            e.extend(tail);
            e.sort_unstable();
            debug_assert!(e.windows(2).all(|w| w[0] < w[1]));
            self.edges.insert(e);
        }
        self
    }

    /// `prefix` plus every `k`-subset of `lo..=n`.
    fn upto_n(&mut self, prefix: &[usize], lo: usize, k: usize) -> &mut Self {
        let n = self.n;
        self.block(prefix, lo, n, k)
    }

    fn lit(&mut self, edges: &[[usize; 4]]) -> &mut Self {
        for e in edges {
            self.edges.insert(e.iter().map(|v| v - 1).collect());
        }
        self
    }

    fn finish(&mut self) -> Hypergraph {
        Hypergraph::from_set(4, self.n, std::mem::take(&mut self.edges))
    }
}

/// The case families `F_1..F_15` on `n ≥ 8` vertices (4-uniform).
///
/// Each arm transcribes its display; `12ij, 3 ≤ i<j ≤ n` is added by the
/// builder for every `k ≤ 14`.
pub fn case_family(k: usize, n: usize) -> Result<Hypergraph> {
    if n < 8 {
        return Err(invalid(format!("case families need n ≥ 8, got {n}")));
    }
    let mut b = CaseBuilder::new(n);
    match k {
        // {12ij} ∪ {ijkl : i ∈ [2], 3 ≤ j<k<l ≤ 7}
        1 => b.block(&[1], 3, 7, 3).block(&[2], 3, 7, 3),
        // {12ij, 134k, 13lm, 14lm, 1567, 234k, 23lm, 24lm :
        //  5 ≤ k ≤ n, 5 ≤ l<m ≤ 7}
        2 => b
            .upto_n(&[1, 3, 4], 5, 1)
            .block(&[1, 3], 5, 7, 2)
            .block(&[1, 4], 5, 7, 2)
            .lit(&[[1, 5, 6, 7]])
            .upto_n(&[2, 3, 4], 5, 1)
            .block(&[2, 3], 5, 7, 2)
            .block(&[2, 4], 5, 7, 2),
        // {12i1j1, 13i2j2, 1456, 23i3j3, 2456 :
        //  4 ≤ i2<j2 ≤ n, 4 ≤ i3<j3 ≤ n}
        3 => b
            .upto_n(&[1, 3], 4, 2)
            .lit(&[[1, 4, 5, 6]])
            .upto_n(&[2, 3], 4, 2)
            .lit(&[[2, 4, 5, 6]]),
        // {12ij, 134k, 135l, 145l, 234k, 235l, 245l : 5 ≤ k ≤ n, 6 ≤ l ≤ n}
        4 => b
            .upto_n(&[1, 3, 4], 5, 1)
            .upto_n(&[1, 3, 5], 6, 1)
            .upto_n(&[1, 4, 5], 6, 1)
            .upto_n(&[2, 3, 4], 5, 1)
            .upto_n(&[2, 3, 5], 6, 1)
            .upto_n(&[2, 4, 5], 6, 1),
        // {12ij, 13kl, 1456, 1457, 1567, 2345, 234m, 235m, 2367, 2456, 2457 :
        //  4 ≤ k<l ≤ n, 6 ≤ m ≤ n}
        5 => b
            .upto_n(&[1, 3], 4, 2)
            .lit(&[[1, 4, 5, 6], [1, 4, 5, 7], [1, 5, 6, 7], [2, 3, 4, 5]])
            .upto_n(&[2, 3, 4], 6, 1)
            .upto_n(&[2, 3, 5], 6, 1)
            .lit(&[[2, 3, 6, 7], [2, 4, 5, 6], [2, 4, 5, 7]]),
        // {12ij, 134k, 135l, 1367, 145l, 1467, 1567, 234k, 235l, 2456, 2457 :
        //  5 ≤ k ≤ n, 6 ≤ l ≤ n}
        6 => b
            .upto_n(&[1, 3, 4], 5, 1)
            .upto_n(&[1, 3, 5], 6, 1)
            .lit(&[[1, 3, 6, 7]])
            .upto_n(&[1, 4, 5], 6, 1)
            .lit(&[[1, 4, 6, 7], [1, 5, 6, 7]])
            .upto_n(&[2, 3, 4], 5, 1)
            .upto_n(&[2, 3, 5], 6, 1)
            .lit(&[[2, 4, 5, 6], [2, 4, 5, 7]]),
        // {12ij, 13kl, 145m, 2345, 234m, 235m, 2456 : 4 ≤ k<l ≤ n, 6 ≤ m ≤ n}
        7 => b
            .upto_n(&[1, 3], 4, 2)
            .upto_n(&[1, 4, 5], 6, 1)
            .lit(&[[2, 3, 4, 5]])
            .upto_n(&[2, 3, 4], 6, 1)
            .upto_n(&[2, 3, 5], 6, 1)
            .lit(&[[2, 4, 5, 6]]),
        // {12ij, 13kl, 145m, 1467, 234m, 2345, 2356, 2357, 2456 :
        //  4 ≤ k<l ≤ n, 6 ≤ m ≤ n}
        8 => b
            .upto_n(&[1, 3], 4, 2)
            .upto_n(&[1, 4, 5], 6, 1)
            .lit(&[[1, 4, 6, 7]])
            .upto_n(&[2, 3, 4], 6, 1)
            .lit(&[[2, 3, 4, 5], [2, 3, 5, 6], [2, 3, 5, 7], [2, 4, 5, 6]]),
        // {12ij, 13kl, 14st, 234p, 2356, 2456 :
        //  4 ≤ k<l ≤ n, 5 ≤ s<t ≤ n, 5 ≤ p ≤ n}
        9 => b
            .upto_n(&[1, 3], 4, 2)
            .upto_n(&[1, 4], 5, 2)
            .upto_n(&[2, 3, 4], 5, 1)
            .lit(&[[2, 3, 5, 6], [2, 4, 5, 6]]),
        // {12ij, 134k, 135l, 136m, 145l, 146m, 156m, 2345, 2346, 2347, 2356, 2456 :
        //  5 ≤ k ≤ n, 6 ≤ l ≤ n, 7 ≤ m ≤ n}
        10 => b
            .upto_n(&[1, 3, 4], 5, 1)
            .upto_n(&[1, 3, 5], 6, 1)
            .upto_n(&[1, 3, 6], 7, 1)
            .upto_n(&[1, 4, 5], 6, 1)
            .upto_n(&[1, 4, 6], 7, 1)
            .upto_n(&[1, 5, 6], 7, 1)
            .lit(&[[2, 3, 4, 5], [2, 3, 4, 6], [2, 3, 4, 7], [2, 3, 5, 6], [2, 4, 5, 6]]),
        // {12i1j1, 13i2j2, 145k, 146l, 156l, 2345, 2346, 2347, 2356 :
        //  4 ≤ i2<j2 ≤ n, 6 ≤ k ≤ n, 7 ≤ l ≤ n}
        11 => b
            .upto_n(&[1, 3], 4, 2)
            .upto_n(&[1, 4, 5], 6, 1)
            .upto_n(&[1, 4, 6], 7, 1)
            .upto_n(&[1, 5, 6], 7, 1)
            .lit(&[[2, 3, 4, 5], [2, 3, 4, 6], [2, 3, 4, 7], [2, 3, 5, 6]]),
        // {12i1j1, 13i2j2, 14i3j3, 1567, 2345, 2346, 2347 :
        //  4 ≤ i2<j2 ≤ n, 5 ≤ i3<j3 ≤ n}
        12 => b
            .upto_n(&[1, 3], 4, 2)
            .upto_n(&[1, 4], 5, 2)
            .lit(&[[1, 5, 6, 7], [2, 3, 4, 5], [2, 3, 4, 6], [2, 3, 4, 7]]),
        // {12i1j1, 13i2j2, 14i3j3, 156k, 2345, 2346 :
        //  4 ≤ i2<j2 ≤ n, 5 ≤ i3<j3 ≤ n, 7 ≤ k ≤ n}
        13 => b
            .upto_n(&[1, 3], 4, 2)
            .upto_n(&[1, 4], 5, 2)
            .upto_n(&[1, 5, 6], 7, 1)
            .lit(&[[2, 3, 4, 5], [2, 3, 4, 6]]),
        // {12i1j1, 13i2j2, 14i3j3, 15i4j4, 2345 :
        //  4 ≤ i2<j2 ≤ n, 5 ≤ i3<j3 ≤ n, 6 ≤ i4<j4 ≤ n}
        14 => b
            .upto_n(&[1, 3], 4, 2)
            .upto_n(&[1, 4], 5, 2)
            .upto_n(&[1, 5], 6, 2)
            .lit(&[[2, 3, 4, 5]]),
        // {1ijk : 2 ≤ i<j<k ≤ n}, the star
        15 => return star(n, 4),
        _ => return Err(invalid(format!("case index must lie in 1..=15, got {k}"))),
    };
    Ok(b.finish())
}

/// The link vertex each case lemma reduces through (0-based): vertex 1 for
/// `F_4`, vertex 8 otherwise.
pub fn case_link_vertex(k: usize) -> usize {
    if k == 4 {
        0
    } else {
        7
    }
}
