use super::{bits, covered_masks, mask_of, vertex_masks, FreenessReport, Witness};
use crate::error::{invalid, Error, Result};
use crate::families::extension;
use crate::hypergraph::Hypergraph;

fn check_pattern(g: &Hypergraph, p: usize, f: &Hypergraph) -> Result<()> {
    if f.r() != g.r() {
        return Err(invalid(format!(
            "pattern is {}-uniform but the host is {}-uniform",
            f.r(),
            g.r()
        )));
    }
    if p < f.n() {
        return Err(invalid(format!("core size {p} is smaller than |V(F)| = {}", f.n())));
    }
    Ok(())
}

/// `𝒦_p^F`-freeness: no `p` vertices with every pair covered whose induced
/// subgraph contains `F`.
///
/// When `F` is a matching, candidate edge tuples are tried first and then
/// grown into a covered `p`-set; otherwise `F` is embedded vertex by vertex.
pub fn is_core_free(g: &Hypergraph, p: usize, f: &Hypergraph) -> Result<FreenessReport> {
    check_pattern(g, p, f)?;
    let masks = vertex_masks(g)?;
    let adj = covered_masks(g, &masks);
    let tag = format!("core({p})");
    let witness = if is_matching(f) {
        matching_core(g, p, f, &masks, &adj)
    } else {
        embedded_core(g, p, f, &adj)
    };
    Ok(FreenessReport::from_witness(tag, witness))
}

fn is_matching(f: &Hypergraph) -> bool {
    let mut used = 0u128;
    f.n() <= 128
        && f.edges().iter().all(|e| {
            let m = mask_of(e);
            let fresh = m & used == 0;
            used |= m;
            fresh
        })
}

fn matching_core(g: &Hypergraph, p: usize, f: &Hypergraph, masks: &[u128], adj: &[u128]) -> Option<Witness> {
    let t = f.num_edges();
    let mut chosen: Vec<usize> = Vec::with_capacity(t);

    fn rec(
        masks: &[u128],
        adj: &[u128],
        t: usize,
        need: usize,
        start: usize,
        used: u128,
        common: u128,
        chosen: &mut Vec<usize>,
    ) -> Option<u128> {
        if chosen.len() == t {
            return extend_clique(adj, used, common & !used, need);
        }
        for k in start..masks.len() {
            let m = masks[k];
            // the new edge must miss the chosen ones and be covered against them
            if m & used != 0 || m & !common != 0 {
                continue;
            }
            let common2 = bits(m).fold(common, |c, v| c & adj[v]);
            chosen.push(k);
            if let Some(core) = rec(masks, adj, t, need, k + 1, used | m, common2, chosen) {
                return Some(core);
            }
            chosen.pop();
        }
        None
    }

    // `common` starts as everything: no constraint before the first edge
    let need = p.checked_sub(g.r() * t)?;
    let all = if g.n() == 128 { u128::MAX } else { (1u128 << g.n()) - 1 };
    let core = rec(masks, adj, t, need, 0, 0, all, &mut chosen)?;
    let mut embedding = vec![usize::MAX; f.n()];
    for (fe, &k) in f.edges().iter().zip(&chosen) {
        for (&a, &b) in fe.iter().zip(&g.edges()[k]) {
            embedding[a] = b;
        }
    }
    Some(Witness::Core {
        core: bits(core).collect(),
        pattern: f.clone(),
        embedding,
    })
}

/// Grows `base` by `need` vertices from `cand` into a set with all pairs
/// covered; returns the whole set.
fn extend_clique(adj: &[u128], base: u128, cand: u128, need: usize) -> Option<u128> {
    if need == 0 {
        return Some(base);
    }
    if (cand.count_ones() as usize) < need {
        return None;
    }
    let mut rest = cand;
    while rest != 0 {
        if (rest.count_ones() as usize) < need {
            return None;
        }
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if let Some(c) = extend_clique(adj, base | 1 << v, rest & adj[v], need - 1) {
            return Some(c);
        }
    }
    None
}

fn embedded_core(g: &Hypergraph, p: usize, f: &Hypergraph, adj: &[u128]) -> Option<Witness> {
    let deg = f.degrees();
    let order: Vec<usize> = (0..f.n()).filter(|&v| deg[v] > 0).collect();
    // edges of F checked when their last vertex (in `order`) is placed
    let mut closing: Vec<Vec<&Vec<usize>>> = vec![Vec::new(); f.n()];
    let rank: Vec<usize> = {
        let mut rank = vec![usize::MAX; f.n()];
        for (k, &v) in order.iter().enumerate() {
            rank[v] = k;
        }
        rank
    };
    for e in f.edges() {
        let last = *e.iter().max_by_key(|&&v| rank[v]).expect("nonempty edge");
        closing[last].push(e);
    }
    let mut emb = vec![usize::MAX; f.n()];

    fn rec(
        g: &Hypergraph,
        adj: &[u128],
        order: &[usize],
        closing: &[Vec<&Vec<usize>>],
        need: usize,
        k: usize,
        used: u128,
        cand: u128,
        emb: &mut Vec<usize>,
    ) -> Option<u128> {
        if k == order.len() {
            return extend_clique(adj, used, cand, need);
        }
        let v = order[k];
        for w in bits(cand) {
            emb[v] = w;
            let ok = closing[v]
                .iter()
                .all(|e| g.contains_unsorted(&e.iter().map(|&u| emb[u]).collect::<Vec<_>>()));
            if ok {
                if let Some(c) = rec(g, adj, order, closing, need, k + 1, used | 1 << w, cand & adj[w], emb) {
                    return Some(c);
                }
            }
            emb[v] = usize::MAX;
        }
        None
    }

    let need = p - order.len();
    let all = if g.n() == 128 { u128::MAX } else { (1u128 << g.n()) - 1 };
    let core = rec(g, adj, &order, &closing, need, 0, 0, all, &mut emb)?;
    Some(Witness::Core {
        core: bits(core).collect(),
        pattern: f.clone(),
        embedding: emb,
    })
}

/// `H_p^F`-hom-freeness, which coincides with `𝒦_p^F`-freeness; the witness
/// is converted into an explicit homomorphism.
pub fn is_hom_free(g: &Hypergraph, f: &Hypergraph, p: usize) -> Result<FreenessReport> {
    let rep = is_core_free(g, p, f)?;
    let tag = format!("hom(H_{p})");
    let Some(Witness::Core { core, embedding, .. }) = rep.witness else {
        return Ok(FreenessReport::from_witness(tag, None));
    };
    // core vertices of the extension: F's vertices, then the added ones
    let mut image = embedding;
    let spare: Vec<usize> = core.iter().copied().filter(|v| !image.contains(v)).collect();
    let mut spare = spare.into_iter();
    for slot in image.iter_mut().filter(|v| **v == usize::MAX) {
        *slot = spare.next().expect("core has room for isolated vertices");
    }
    image.extend(spare.take(p - f.n()));
    let h = extension(f, p)?;
    let map = complete_pads(g, &h, image, p).expect("covered core pairs always extend to pads");
    Ok(FreenessReport::from_witness(tag, Some(Witness::Hom { extension: h, map })))
}

/// Maps each pad `B_ij` onto the rest of some host edge through the images
/// of `v_i` and `v_j`.
fn complete_pads(g: &Hypergraph, h: &Hypergraph, mut map: Vec<usize>, p: usize) -> Option<Vec<usize>> {
    map.resize(h.n(), usize::MAX);
    for e in h.edges() {
        if e.iter().all(|&v| v < p) {
            continue;
        }
        let (a, b) = (map[e[0]], map[e[1]]);
        let host = g
            .edges()
            .iter()
            .find(|he| he.binary_search(&a).is_ok() && he.binary_search(&b).is_ok())?;
        let rest = host.iter().copied().filter(|&v| v != a && v != b);
        for (&pad, w) in e[2..].iter().zip(rest) {
            map[pad] = w;
        }
    }
    Some(map)
}

/// Direct search for a homomorphism from `H_p^F` into `g`.
///
/// Every pair of core vertices of the extension lies in an edge, so core
/// images are distinct and covered; the search assigns core vertices one at
/// a time under those constraints and checks the edges of `F` as they close.
/// Pads are then completed edge by edge.
pub fn is_hom_free_direct(g: &Hypergraph, f: &Hypergraph, p: usize, guard: usize) -> Result<FreenessReport> {
    check_pattern(g, p, f)?;
    if g.n() > guard {
        return Err(Error::UnsupportedSize {
            what: "host vertex count for the direct homomorphism search",
            value: g.n(),
            guard,
        });
    }
    let masks = vertex_masks(g)?;
    let adj = covered_masks(g, &masks);
    let h = extension(f, p)?;
    let tag = format!("hom(H_{p})");

    // core edges of H are the edges of F; vertex v closes the edges whose
    // largest vertex is v
    let mut closing: Vec<Vec<&Vec<usize>>> = vec![Vec::new(); p];
    for e in f.edges() {
        closing[*e.last().expect("nonempty edge")].push(e);
    }

    fn rec(
        g: &Hypergraph,
        adj: &[u128],
        closing: &[Vec<&Vec<usize>>],
        k: usize,
        cand: u128,
        map: &mut Vec<usize>,
    ) -> bool {
        if k == closing.len() {
            return true;
        }
        for w in bits(cand) {
            map.push(w);
            let ok = closing[k]
                .iter()
                .all(|e| g.contains_unsorted(&e.iter().map(|&u| map[u]).collect::<Vec<_>>()));
            if ok && rec(g, adj, closing, k + 1, cand & adj[w], map) {
                return true;
            }
            map.pop();
        }
        false
    }

    let all = if g.n() == 128 { u128::MAX } else { (1u128 << g.n()) - 1 };
    let mut map = Vec::with_capacity(h.n());
    if !rec(g, &adj, &closing, 0, all, &mut map) {
        return Ok(FreenessReport::from_witness(tag, None));
    }
    let map = complete_pads(g, &h, map, p).expect("covered core pairs always extend to pads");
    Ok(FreenessReport::from_witness(tag, Some(Witness::Hom { extension: h, map })))
}
