use std::collections::{BTreeMap, HashSet};

use proptest::prelude::*;

use hyperlag::compression::{compress_pair, dense_and_compress, is_left_compressed, potential, CompressionStep};
use hyperlag::families::{complete, matching, split, star};
use hyperlag::freeness::{
    enumerate_left_compressed_free, is_core_free, is_hom_free, is_hom_free_direct, is_matching_free, matching_number,
};
use hyperlag::lagrangian::{eval, grad, maximize, Method, SolverConfig};
use hyperlag::partition::classify_edges;
use hyperlag::symmetrize::{clean, merge, PointedHypergraph, SymConfig, DENSITY};
use hyperlag::{Hypergraph, VertexSet, Weighting};

fn graph_with(r: impl Strategy<Value = usize>, extra: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Hypergraph> {
    (r, extra)
        .prop_flat_map(|(r, extra)| {
            let all = complete(r + extra, r).unwrap();
            let m = all.num_edges();
            (Just(all), proptest::collection::vec(proptest::bool::weighted(0.5), m))
        })
        .prop_map(|(all, keep)| {
            let edges = all.edges().iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| e.clone());
            Hypergraph::new(all.r(), all.n(), edges).unwrap()
        })
}

fn small_graph() -> impl Strategy<Value = Hypergraph> {
    graph_with(2usize..=4, 1..=5)
}

fn weighting(n: usize) -> impl Strategy<Value = Weighting> {
    proptest::collection::vec(0.001f64..1.0, n).prop_map(|x| Weighting::normalized(x).unwrap())
}

fn graph_and_weighting() -> impl Strategy<Value = (Hypergraph, Weighting)> {
    small_graph().prop_flat_map(|g| {
        let n = g.n();
        (Just(g), weighting(n))
    })
}

fn solver() -> SolverConfig {
    SolverConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn link_sizes_are_degrees(g in small_graph()) {
        for v in 0..g.n() {
            prop_assert_eq!(g.link(&[v]).unwrap().num_edges(), g.degree(v));
        }
    }

    #[test]
    fn link_differences_are_disjoint(g in small_graph()) {
        for i in 0..g.n() {
            for j in 0..g.n() {
                if i == j {
                    continue;
                }
                let a: HashSet<Vec<usize>> = g.link_diff(i, j).unwrap().into_iter().collect();
                let b: HashSet<Vec<usize>> = g.link_diff(j, i).unwrap().into_iter().collect();
                prop_assert!(a.is_disjoint(&b));
            }
        }
    }

    #[test]
    fn induced_subgraphs(g in small_graph(), keep in proptest::collection::vec(any::<bool>(), 9)) {
        prop_assert_eq!(&g.induced(&VertexSet::full(g.n())).graph, &g);
        let vs = VertexSet::new(g.n(), (0..g.n()).filter(|&v| keep[v])).unwrap();
        let ind = g.induced(&vs);
        for e in ind.graph.edges() {
            let back: Vec<usize> = e.iter().map(|&v| ind.map[v]).collect();
            prop_assert!(g.contains_edge(&back));
        }
    }

    #[test]
    fn trivial_blowup_is_identity(g in small_graph()) {
        prop_assert_eq!(g.blowup(&vec![1; g.n()]).unwrap(), g);
    }

    #[test]
    fn equivalent_vertices_swap(g in small_graph()) {
        for i in 0..g.n() {
            for j in i + 1..g.n() {
                if g.equivalent(i, j).unwrap() {
                    let mut perm: Vec<usize> = (0..g.n()).collect();
                    perm.swap(i, j);
                    prop_assert_eq!(&g.relabel(&perm).unwrap(), &g);
                }
            }
        }
    }

    #[test]
    fn euler_identity((g, x) in graph_and_weighting()) {
        let lhs: f64 = grad(&g, &x).unwrap().iter().zip(x.as_slice()).map(|(l, w)| l * w).sum();
        prop_assert!((lhs - g.r() as f64 * eval(&g, &x).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn subgraphs_have_smaller_lagrangians(g in graph_with(2usize..=4, 1..=4), keep in proptest::collection::vec(any::<bool>(), 70)) {
        let h = Hypergraph::new(g.r(), g.n(), g.edges().iter().zip(&keep).filter(|(_, k)| **k).map(|(e, _)| e.clone())).unwrap();
        let (lg, lh) = (maximize(&g, &solver()).unwrap().value, maximize(&h, &solver()).unwrap().value);
        prop_assert!(lh <= lg + 1e-7, "{} > {}", lh, lg);
    }

    #[test]
    fn blowups_keep_the_lagrangian(g in graph_with(2usize..=4, 1..=3), sizes in proptest::collection::vec(1usize..=2, 7)) {
        let b = g.blowup(&sizes[..g.n()]).unwrap();
        let (lg, lb) = (maximize(&g, &solver()).unwrap().value, maximize(&b, &solver()).unwrap().value);
        prop_assert!((lg - lb).abs() <= 1e-7);
    }

    #[test]
    fn equivalent_vertices_get_equal_weights(g in graph_with(2usize..=4, 1..=4)) {
        let res = maximize(&g, &solver()).unwrap();
        let x = res.weighting.as_slice();
        for i in 0..g.n() {
            for j in i + 1..g.n() {
                if g.equivalent(i, j).unwrap() {
                    prop_assert!((x[i] - x[j]).abs() <= 1e-8);
                }
            }
        }
        prop_assert!((eval(&g, &res.weighting).unwrap() - res.value).abs() <= 1e-10);
    }

    #[test]
    fn solvers_agree(g in graph_with(2usize..=4, 1..=4)) {
        let run = |method| maximize(&g, &SolverConfig { method, ..solver() }).unwrap().value;
        prop_assert!((run(Method::MultistartAscent) - run(Method::SupportEnum)).abs() <= 1e-6);
    }

    #[test]
    fn compression_keeps_size_and_freeness(g in graph_with(3usize..=4, 1..=4), i in 0usize..8, j in 0usize..8, t in 2usize..=3) {
        let (i, j) = (i % g.n(), j % g.n());
        prop_assume!(i != j);
        let c = compress_pair(&g, i, j).unwrap();
        prop_assert_eq!(c.num_edges(), g.num_edges());
        if is_matching_free(&g, t).unwrap().free {
            prop_assert!(is_matching_free(&c, t).unwrap().free);
        }
    }

    #[test]
    fn compression_helps_heavier_vertex(g in graph_with(2usize..=4, 1..=4), xs in proptest::collection::vec(weighting(8), 50)) {
        for x in xs {
            let x = Weighting::normalized(x.as_slice()[..g.n()].to_vec()).unwrap();
            let w = x.as_slice();
            let (i, j) = if w[0] >= w[1] { (0, 1) } else { (1, 0) };
            let c = compress_pair(&g, i, j).unwrap();
            prop_assert!(eval(&c, &x).unwrap() >= eval(&g, &x).unwrap() - 1e-15);
        }
    }

    #[test]
    fn dense_and_compress_reaches_a_left_compressed_graph(g in graph_with(3usize..=4, 1..=4)) {
        let t = matching_number(&g).unwrap() + 1;
        let (out, res, trace) = dense_and_compress(&g, t, &solver()).unwrap();
        prop_assert!(is_left_compressed(&out));
        prop_assert!(matching_number(&out).unwrap() < t);
        prop_assert!(res.value >= trace.initial_lambda - 1e-7);
        let work = trace.steps.iter().filter(|s| !matches!(s, CompressionStep::Relabel { .. })).count() as u64;
        prop_assert!(work <= g.n() as u64 * potential(&g).max(1) + g.n() as u64 + 1);
    }

    #[test]
    fn matching_number_matches_pair_scan(g in small_graph()) {
        let disjoint = g.edges().iter().enumerate().any(|(a, e)| {
            g.edges()[a + 1..].iter().any(|f| e.iter().all(|v| !f.contains(v)))
        });
        prop_assert_eq!(matching_number(&g).unwrap() >= 2, disjoint);
    }

    #[test]
    fn core_and_hom_agree(g in graph_with(3usize..=4, 5..=6)) {
        let r = g.r();
        let f = matching(2, r).unwrap();
        for p in 2 * r..=(2 * r + 1).min(g.n()) {
            let core = is_core_free(&g, p, &f).unwrap().free;
            prop_assert_eq!(core, is_hom_free(&g, &f, p).unwrap().free);
            prop_assert_eq!(core, is_hom_free_direct(&g, &f, p, g.n()).unwrap().free);
        }
    }

    #[test]
    fn matching_free_graphs_are_core_free(g in graph_with(3usize..=4, 3..=5)) {
        let r = g.r();
        prop_assume!(g.n() >= 2 * r);
        if is_matching_free(&g, 2).unwrap().free {
            prop_assert!(is_core_free(&g, 2 * r, &matching(2, r).unwrap()).unwrap().free);
        }
    }

    #[test]
    fn covering_hosts_with_disjoint_edges_have_cores(g in graph_with(Just(4usize), 4..=5)) {
        // add one edge through every uncovered pair
        let n = g.n();
        let mut edges: Vec<Vec<usize>> = g.edges().to_vec();
        for (a, b) in g.uncovered_pairs() {
            let rest: Vec<usize> = (0..n).filter(|&v| v != a && v != b).take(2).collect();
            edges.push(vec![a, b, rest[0], rest[1]]);
        }
        edges.push(vec![0, 1, 2, 3]);
        edges.push(vec![4, 5, 6, 7]);
        let mut seen = HashSet::new();
        let edges: Vec<Vec<usize>> = edges
            .into_iter()
            .map(|mut e| { e.sort_unstable(); e })
            .filter(|e| seen.insert(e.clone()))
            .collect();
        let h = Hypergraph::new(4, n, edges).unwrap();
        prop_assert!(h.covers_pairs());
        prop_assert!(!is_core_free(&h, 8, &matching(2, 4).unwrap()).unwrap().free);
    }

    #[test]
    fn cleaning_leaves_high_degrees(g in graph_with(Just(4usize), 3..=6), alpha in 0.001f64..0.07) {
        let cfg = SymConfig::with_alpha(alpha);
        let mut pg = PointedHypergraph::trivial(g.clone());
        clean(&mut pg, &cfg, g.n());
        let n = pg.vertex_count() as f64;
        for v in pg.vertices() {
            prop_assert!(pg.graph.degree(v) as f64 >= (DENSITY - alpha) * n * n * n);
        }
    }

    #[test]
    fn merging_keeps_a_blowup(g in graph_with(Just(4usize), 2..=6)) {
        let mut pg = PointedHypergraph::trivial(g);
        while merge(&mut pg).is_some() {
            let rep_of: BTreeMap<usize, usize> = pg.parts.iter().flat_map(|(&u, p)| p.iter().map(move |&v| (v, u))).collect();
            // every edge projects onto a transversal edge, and each such
            // edge is blown up completely
            let mut expected = 0usize;
            for e in pg.graph.edges() {
                let mut img: Vec<usize> = e.iter().map(|v| rep_of[v]).collect();
                img.sort_unstable();
                img.dedup();
                prop_assert_eq!(img.len(), 4);
                prop_assert!(pg.graph.contains_edge(&img));
                if img == *e {
                    expected += img.iter().map(|u| pg.parts[u].len()).product::<usize>();
                }
            }
            prop_assert_eq!(pg.graph.num_edges(), expected);
        }
    }

    #[test]
    fn sigma_zero_means_one_vertex_in_w1(g in graph_with(Just(4usize), 1..=6), mask in proptest::collection::vec(any::<bool>(), 10)) {
        let w1 = VertexSet::new(g.n(), (0..g.n()).filter(|&v| mask[v])).unwrap();
        let s = classify_edges(&g, &w1).unwrap();
        let fits = g.edges().iter().all(|e| e.iter().filter(|&&v| w1.contains(v)).count() == 1);
        prop_assert_eq!(s.sigma == 0, fits);
        prop_assert_eq!(s.good + s.bad + s.very_bad + s.worst, g.num_edges());
    }

    #[test]
    fn classify_ignores_relabeling_inside_sides(
        g in graph_with(Just(4usize), 2..=6),
        mask in proptest::collection::vec(any::<bool>(), 10),
        seed in any::<u64>(),
    ) {
        let n = g.n();
        let w1: Vec<usize> = (0..n).filter(|&v| mask[v]).collect();
        let w2: Vec<usize> = (0..n).filter(|&v| !mask[v]).collect();
        let rotate = |side: &[usize], by: usize| -> Vec<(usize, usize)> {
            (0..side.len()).map(|k| (side[k], side[(k + by) % side.len()])).collect()
        };
        let mut perm = vec![0; n];
        for (from, to) in rotate(&w1, seed as usize % w1.len().max(1)).into_iter().chain(rotate(&w2, (seed >> 32) as usize % w2.len().max(1))) {
            perm[from] = to;
        }
        let before = classify_edges(&g, &VertexSet::new(n, w1.iter().copied()).unwrap()).unwrap();
        let after = classify_edges(&g.relabel(&perm).unwrap(), &VertexSet::new(n, w1.iter().copied()).unwrap()).unwrap();
        prop_assert_eq!(
            (before.good, before.bad, before.very_bad, before.worst),
            (after.good, after.bad, after.very_bad, after.worst)
        );
    }
}

#[test]
fn stars_are_matching_free() {
    for n in 5..=12 {
        for r in 2..=4 {
            assert!(is_matching_free(&star(n, r).unwrap(), 2).unwrap().free);
        }
    }
}

#[test]
fn split_graphs_and_star_blowups_are_core_free() {
    let m2 = matching(2, 4).unwrap();
    for n in 8..=14 {
        assert!(is_core_free(&split(n, 4, None).unwrap(), 8, &m2).unwrap().free, "split({n})");
        let mut sizes = vec![1; 6];
        for k in 6..n {
            sizes[k % 6] += 1;
        }
        let b = star(6, 4).unwrap().blowup(&sizes).unwrap();
        assert!(is_core_free(&b, 8, &m2).unwrap().free);
        assert!(b.num_edges() as f64 <= 9.0 / 512.0 * (n as f64).powi(4));
    }
}

#[test]
fn enumeration_has_no_duplicates() {
    for n in 4..=7 {
        let graphs = enumerate_left_compressed_free(n, 4, 2, 9).unwrap();
        let set: HashSet<Vec<Vec<usize>>> = graphs.iter().map(|g| g.edges().to_vec()).collect();
        assert_eq!(set.len(), graphs.len());
        assert!(graphs.iter().all(|g| is_left_compressed(g) && matching_number(g).unwrap() < 2));
    }
}
