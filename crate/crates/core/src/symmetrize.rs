//! Symmetrization of 4-graphs: Cleaning, Merging and the invariant audit.
//!
//! All states keep the labels of the input graph; deleted vertices simply
//! stop belonging to any part and lose their edges.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::families::matching;
use crate::freeness::is_core_free;
use crate::hypergraph::{fmt_edge, Hypergraph, VertexSet};

/// `9/128`, the edge density scale of the cleaning threshold.
pub const DENSITY: f64 = 9.0 / 128.0;

/// A 4-graph with an ordered partition of its live vertices; the keys of
/// `parts` are the representatives `U` and each part starts with its key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedHypergraph {
    pub graph: Hypergraph,
    pub parts: BTreeMap<usize, Vec<usize>>,
}

impl PointedHypergraph {
    /// Every vertex is its own part.
    pub fn trivial(graph: Hypergraph) -> Self {
        let parts = (0..graph.n()).map(|v| (v, vec![v])).collect();
        Self { graph, parts }
    }

    /// The transversal `U`.
    pub fn reps(&self) -> Vec<usize> {
        self.parts.keys().copied().collect()
    }

    /// The live vertex set `V`.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.parts.values().flatten().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn vertex_count(&self) -> usize {
        self.parts.values().map(Vec::len).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.num_edges()
    }

    fn part_of(&self, v: usize) -> Option<usize> {
        self.parts.iter().find(|(_, p)| p.contains(&v)).map(|(&u, _)| u)
    }

    /// Removes `v` and its edges.
    fn delete(&mut self, v: usize) {
        let u = self.part_of(v).expect("deleting a live vertex");
        let part = self.parts.get_mut(&u).expect("part exists");
        part.retain(|&w| w != v);
        if part.is_empty() {
            self.parts.remove(&u);
        }
        let edges = self.graph.edges().iter().filter(|e| !e.contains(&v));
        self.graph = Hypergraph::new(self.graph.r(), self.graph.n(), edges).expect("subset of valid edges");
    }

    /// `true` when every pair of representatives lies in an edge.
    pub fn reps_covered(&self) -> bool {
        self.first_uncovered_rep_pair().is_none()
    }

    fn first_uncovered_rep_pair(&self) -> Option<(usize, usize)> {
        let cov = self.graph.covered_matrix();
        let reps = self.reps();
        reps.iter()
            .enumerate()
            .find_map(|(a, &u)| reps[a + 1..].iter().find(|&&v| !cov[u][v]).map(|&v| (u, v)))
    }

    /// The blowup of `graph[U]` over the current parts.
    fn reblown(&self) -> Hypergraph {
        let reps: BTreeSet<usize> = self.parts.keys().copied().collect();
        let mut set = BTreeSet::new();
        for e in self.graph.edges().iter().filter(|e| e.iter().all(|v| reps.contains(v))) {
            let classes: Vec<&Vec<usize>> = e.iter().map(|u| &self.parts[u]).collect();
            let mut idx = vec![0usize; e.len()];
            'odometer: loop {
                let mut f: Vec<usize> = classes.iter().zip(&idx).map(|(c, &k)| c[k]).collect();
                f.sort_unstable();
                set.insert(f);
                for pos in (0..e.len()).rev() {
                    idx[pos] += 1;
                    if idx[pos] < classes[pos].len() {
                        continue 'odometer;
                    }
                    idx[pos] = 0;
                }
                break;
            }
        }
        Hypergraph::new(self.graph.r(), self.graph.n(), set).expect("blowup edges are valid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymConfig {
    pub alpha: f64,
    /// Evaluate the cleaning threshold at the input size instead of the
    /// current size.
    pub fixed_n: bool,
    pub gamma: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub delta: f64,
}

impl Default for SymConfig {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            fixed_n: false,
            gamma: 0.05,
            beta: 0.02,
            epsilon: 0.002,
            delta: 0.0005,
        }
    }
}

impl SymConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < DENSITY) {
            return Err(invalid(format!("alpha must lie in (0, 9/128), got {}", self.alpha)));
        }
        Ok(())
    }
}

/// One record of the trace, serialized as
/// `{index, kind, detail, vertex_count, edge_count}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymEvent {
    pub index: usize,
    pub kind: String,
    pub detail: String,
    pub vertex_count: usize,
    pub edge_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MergeRecord {
    /// Index into `states` of the state the merge was applied to.
    pub state: usize,
    pub u: usize,
    pub v: usize,
    pub part_u: Vec<usize>,
    pub part_v: Vec<usize>,
}

/// The states `H_0, H'_1, H_1, …`, the events between them and the merge
/// history. The last state is the fixed point `F*`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTrace {
    pub input: Hypergraph,
    pub config: SymConfig,
    pub states: Vec<PointedHypergraph>,
    /// `true` for cleaned states `H'_i`, `false` for `H_0` and merged states.
    pub cleaned: Vec<bool>,
    pub events: Vec<SymEvent>,
    pub merges: Vec<MergeRecord>,
    /// Vertices in the order Cleaning deleted them.
    pub deleted: Vec<usize>,
}

impl SymTrace {
    pub fn fixed_point(&self) -> &PointedHypergraph {
        self.states.last().expect("at least the input state")
    }

    /// Whether `|V(F*)| ≥ (1 − α)n`.
    pub fn kept_most_vertices(&self) -> bool {
        self.fixed_point().vertex_count() as f64 >= (1.0 - self.config.alpha) * self.input.n() as f64
    }

    /// Whether `F*[U]` has a vertex common to all its edges (or no edges).
    pub fn reps_form_star(&self) -> bool {
        let f = self.fixed_point();
        let reps = VertexSet::from_sorted(f.reps());
        let sub = f.graph.induced(&reps).graph;
        sub.is_empty() || sub.common_vertex().is_some()
    }
}

fn threshold(cfg: &SymConfig, n: usize) -> f64 {
    (DENSITY - cfg.alpha) * (n as f64).powi(3)
}

/// Deletes low-degree vertices until the minimum degree reaches the
/// threshold or nothing is left. Among representatives below the threshold
/// the one of least degree (then least label) is chosen; its part loses its
/// last vertex. Returns the deleted vertices in order.
pub fn clean(pg: &mut PointedHypergraph, cfg: &SymConfig, initial_n: usize) -> Vec<usize> {
    let mut deleted = Vec::new();
    clean_with(pg, cfg, initial_n, |v, _| deleted.push(v));
    deleted
}

fn clean_with(
    pg: &mut PointedHypergraph,
    cfg: &SymConfig,
    initial_n: usize,
    mut on_delete: impl FnMut(usize, &PointedHypergraph),
) {
    loop {
        let n = if cfg.fixed_n { initial_n } else { pg.vertex_count() };
        if n == 0 || pg.parts.is_empty() {
            return;
        }
        let limit = threshold(cfg, n);
        let deg = pg.graph.degrees();
        let pick = pg
            .parts
            .keys()
            .copied()
            .filter(|&u| (deg[u] as f64) < limit)
            .min_by_key(|&u| (deg[u], u));
        let Some(u) = pick else {
            return;
        };
        let v = *pg.parts[&u].last().expect("parts are nonempty");
        pg.delete(v);
        on_delete(v, pg);
    }
}

/// One Merging step. Returns the merged pair `(u, v)`, or `None` when the
/// representatives are covered. The pair is the lexicographically least
/// uncovered one; the endpoint of larger degree (the smaller label on a tie)
/// absorbs the other.
pub fn merge(pg: &mut PointedHypergraph) -> Option<(usize, usize)> {
    let (a, b) = pg.first_uncovered_rep_pair()?;
    let (da, db) = (pg.graph.degree(a), pg.graph.degree(b));
    let (u, v) = if da >= db { (a, b) } else { (b, a) };
    let pv = pg.parts.remove(&v).expect("representative has a part");
    pg.parts.get_mut(&u).expect("representative has a part").extend(pv);
    pg.graph = pg.reblown();
    Some((u, v))
}

/// Alternates Cleaning and Merging until a merge changes nothing.
///
/// Refuses 4-graphs that contain a covered 8-core with two disjoint edges.
pub fn symmetrize(g: &Hypergraph, cfg: &SymConfig) -> Result<SymTrace> {
    cfg.validate()?;
    if g.r() != 4 {
        return Err(invalid("symmetrization is defined for 4-graphs"));
    }
    let rep = is_core_free(g, 8, &matching(2, 4)?)?;
    if let Some(w) = rep.witness {
        return Err(Error::NotFree(Box::new(w)));
    }
    let n0 = g.n();
    let mut cur = PointedHypergraph::trivial(g.clone());
    let mut trace = SymTrace {
        input: g.clone(),
        config: *cfg,
        states: vec![cur.clone()],
        cleaned: vec![false],
        events: Vec::new(),
        merges: Vec::new(),
        deleted: Vec::new(),
    };
    let push_event = |trace: &mut SymTrace, kind: &str, detail: String, pg: &PointedHypergraph| {
        trace.events.push(SymEvent {
            index: trace.events.len(),
            kind: kind.into(),
            detail,
            vertex_count: pg.vertex_count(),
            edge_count: pg.edge_count(),
        });
    };
    push_event(&mut trace, "start", format!("alpha={}", cfg.alpha), &cur);
    loop {
        let mut cleaned = Vec::new();
        clean_with(&mut cur, cfg, n0, |v, pg| cleaned.push((v, pg.vertex_count(), pg.edge_count())));
        for (v, vertex_count, edge_count) in cleaned {
            trace.deleted.push(v);
            trace.events.push(SymEvent {
                index: trace.events.len(),
                kind: "clean".into(),
                detail: format!("deleted {}", v + 1),
                vertex_count,
                edge_count,
            });
        }
        trace.states.push(cur.clone());
        trace.cleaned.push(true);
        let state = trace.states.len() - 1;
        let parts = cur.parts.clone();
        match merge(&mut cur) {
            Some((u, v)) => {
                trace.merges.push(MergeRecord {
                    state,
                    u,
                    v,
                    part_u: parts[&u].clone(),
                    part_v: parts[&v].clone(),
                });
                push_event(&mut trace, "merge", format!("{} -> {}", v + 1, u + 1), &cur);
                trace.states.push(cur.clone());
                trace.cleaned.push(false);
            }
            None => {
                push_event(&mut trace, "fixed", format!("representatives {}", fmt_edge(&cur.reps())), &cur);
                return Ok(trace);
            }
        }
    }
}

/// One failed check of the audit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub state: usize,
    pub property: &'static str,
    pub detail: String,
}

/// Re-checks every structural invariant of the trace:
/// transversals of earlier partitions, `H[U] = F[U]`, edges meeting parts at
/// most once, equivalence inside parts, shrinking `U` and `V`, merges not
/// losing edges, and the order in which merged parts disappear.
pub fn audit(trace: &SymTrace) -> Vec<Violation> {
    let mut out = Vec::new();
    let states = &trace.states;
    let f = &trace.input;
    for (i, s) in states.iter().enumerate() {
        let vi: BTreeSet<usize> = s.vertices().into_iter().collect();
        let vi_count = s.vertex_count();
        if vi.len() != vi_count {
            out.push(Violation {
                state: i,
                property: "partition",
                detail: "parts overlap".into(),
            });
        }
        for (&u, part) in &s.parts {
            if part.first() != Some(&u) {
                out.push(Violation {
                    state: i,
                    property: "transversal",
                    detail: format!("representative {} does not head its part", u + 1),
                });
            }
        }
        if s.graph.edges().iter().any(|e| e.iter().any(|v| !vi.contains(v))) {
            out.push(Violation {
                state: i,
                property: "partition",
                detail: "an edge uses a deleted vertex".into(),
            });
        }
        // every earlier partition stays transversal and meets each edge at most once
        for (j, sj) in states[..=i].iter().enumerate() {
            let uj: BTreeSet<usize> = sj.parts.keys().copied().collect();
            let mut seen = BTreeSet::new();
            for (&v, part) in &sj.parts {
                let kept: Vec<usize> = part.iter().copied().filter(|w| vi.contains(w)).collect();
                if kept.is_empty() {
                    continue;
                }
                if !vi.contains(&v) {
                    out.push(Violation {
                        state: i,
                        property: "transversal",
                        detail: format!("part of {} in state {j} survives without its representative", v + 1),
                    });
                }
                seen.extend(kept);
                for e in s.graph.edges() {
                    if e.iter().filter(|w| part.contains(w)).count() > 1 {
                        out.push(Violation {
                            state: i,
                            property: "edge-meets-part-once",
                            detail: format!("edge {} meets part of {} from state {j} twice", fmt_edge(e), v + 1),
                        });
                    }
                }
            }
            if seen != vi || !uj.iter().filter(|u| vi.contains(u)).all(|u| sj.parts.contains_key(u)) {
                out.push(Violation {
                    state: i,
                    property: "transversal",
                    detail: format!("parts of state {j} do not cover the live vertices"),
                });
            }
        }
        // representatives induce the input graph
        let reps = VertexSet::from_sorted(s.reps());
        if s.graph.induced(&reps).graph != f.induced(&reps).graph {
            out.push(Violation {
                state: i,
                property: "H[U]=F[U]",
                detail: format!("induced graphs on {} differ", fmt_edge(reps.as_slice())),
            });
        }
        // parts are equivalence classes
        for (&u, part) in &s.parts {
            for (a, &v) in part.iter().enumerate() {
                for &w in &part[a + 1..] {
                    if !s.graph.equivalent(v, w).unwrap_or(false) {
                        out.push(Violation {
                            state: i,
                            property: "equivalent-in-part",
                            detail: format!("{} and {} in the part of {}", v + 1, w + 1, u + 1),
                        });
                    }
                }
            }
        }
        // U and V only shrink
        if i > 0 {
            let prev = &states[i - 1];
            let u_prev: BTreeSet<usize> = prev.parts.keys().copied().collect();
            let v_prev: BTreeSet<usize> = prev.vertices().into_iter().collect();
            if !s.parts.keys().all(|u| u_prev.contains(u)) || !vi.is_subset(&v_prev) {
                out.push(Violation {
                    state: i,
                    property: "monotone",
                    detail: "U or V grew".into(),
                });
            }
        }
    }
    // merge edge counts and the disappearance order of merged parts
    let fixed: BTreeSet<usize> = trace.fixed_point().vertices().into_iter().collect();
    for m in &trace.merges {
        let (before, after) = (&states[m.state], states.get(m.state + 1));
        if let Some(after) = after {
            if after.edge_count() < before.edge_count() {
                out.push(Violation {
                    state: m.state + 1,
                    property: "merge-keeps-edges",
                    detail: format!("{} < {}", after.edge_count(), before.edge_count()),
                });
            }
        }
        let u_gone = m.part_u.iter().all(|w| !fixed.contains(w));
        let v_gone = m.part_v.iter().all(|w| !fixed.contains(w));
        if u_gone && !v_gone {
            out.push(Violation {
                state: m.state + 1,
                property: "merged-parts-vanish-together",
                detail: format!("part of {} vanished before the part of {}", m.u + 1, m.v + 1),
            });
        }
    }
    out
}
