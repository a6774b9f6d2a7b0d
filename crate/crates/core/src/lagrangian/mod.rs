//! The Lagrangian polynomial `λ(G, x) = Σ_e Π_{i∈e} x_i` on the simplex.

mod densify;
mod newton;
mod solver;

pub use densify::{densify, uncovered_reduce, Densified, ReduceReport, ReduceStep};
pub use solver::{maximize, LagrangianResult, Method, SolverConfig, DEFAULT_SUPPORT_ENUM_GUARD};

use crate::error::{invalid, Result};
use crate::hypergraph::{Hypergraph, Weighting};

/// `λ(G, x)`, accumulated over the edges in sorted order.
pub fn eval(g: &Hypergraph, x: &Weighting) -> Result<f64> {
    check_len(g, x)?;
    Ok(eval_raw(g.edges(), x.as_slice()))
}

/// The partial derivatives `L_G(x_i) = ∂λ/∂x_i`.
pub fn grad(g: &Hypergraph, x: &Weighting) -> Result<Vec<f64>> {
    check_len(g, x)?;
    let mut out = vec![0.0; g.n()];
    grad_raw(g.edges(), x.as_slice(), &mut out);
    Ok(out)
}

fn check_len(g: &Hypergraph, x: &Weighting) -> Result<()> {
    if x.len() != g.n() {
        return Err(invalid(format!(
            "weighting has {} entries for a graph on {} vertices",
            x.len(),
            g.n()
        )));
    }
    Ok(())
}

pub(crate) fn eval_raw(edges: &[Vec<usize>], x: &[f64]) -> f64 {
    edges
        .iter()
        .map(|e| e.iter().map(|&v| x[v]).product::<f64>())
        .sum()
}

/// Writes the gradient into `out` (overwritten). Products of the other
/// coordinates come from prefix and suffix products so zero weights are
/// handled exactly.
pub(crate) fn grad_raw(edges: &[Vec<usize>], x: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut prefix = Vec::new();
    for e in edges {
        prefix.clear();
        let mut acc = 1.0;
        for &v in e {
            prefix.push(acc);
            acc *= x[v];
        }
        let mut suffix = 1.0;
        for (k, &v) in e.iter().enumerate().rev() {
            out[v] += prefix[k] * suffix;
            suffix *= x[v];
        }
    }
}

/// Outcome of a first-order optimality check.
#[derive(Clone, Debug, PartialEq)]
pub struct KktReport {
    /// `max_i |L(x_i) − rλ|` over positive coordinates, together with
    /// `max(0, L(x_i) − rλ)` over zero coordinates.
    pub residual: f64,
    /// Pairs of positive-weight vertices that no edge covers.
    pub uncovered_support_pairs: Vec<(usize, usize)>,
}

/// First-order optimality residual of `x` on the simplex.
pub fn kkt_residual(g: &Hypergraph, x: &Weighting) -> Result<KktReport> {
    check_len(g, x)?;
    let x = x.as_slice();
    let lambda = eval_raw(g.edges(), x);
    let mut l = vec![0.0; g.n()];
    grad_raw(g.edges(), x, &mut l);
    let target = g.r() as f64 * lambda;
    let residual = (0..g.n())
        .map(|i| {
            if x[i] > 0.0 {
                (l[i] - target).abs()
            } else {
                (l[i] - target).max(0.0)
            }
        })
        .fold(0.0, f64::max);
    let covered = g.covered_matrix();
    let support: Vec<usize> = (0..g.n()).filter(|&i| x[i] > 0.0).collect();
    let mut uncovered_support_pairs = Vec::new();
    for (a, &i) in support.iter().enumerate() {
        for &j in &support[a + 1..] {
            if !covered[i][j] {
                uncovered_support_pairs.push((i, j));
            }
        }
    }
    Ok(KktReport {
        residual,
        uncovered_support_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete, star};

    #[test]
    fn single_edge_at_uniform() {
        let g = complete(4, 4).unwrap();
        let x = Weighting::uniform(4);
        assert!((eval(&g, &x).unwrap() - 1.0 / 256.0).abs() < 1e-18);
        for v in grad(&g, &x).unwrap() {
            assert!((v - 1.0 / 64.0).abs() < 1e-18);
        }
    }

    #[test]
    fn star_at_its_optimum() {
        for n in 5..15 {
            let g = star(n, 4).unwrap();
            let mut x = vec![3.0 / (4.0 * (n - 1) as f64); n];
            x[0] = 0.25;
            let x = Weighting::new(x).unwrap();
            let nf = n as f64;
            let expected = 9.0 * (nf - 2.0) * (nf - 3.0) / (512.0 * (nf - 1.0) * (nf - 1.0));
            let value = eval(&g, &x).unwrap();
            assert!((value - expected).abs() < 1e-15);
            let l = grad(&g, &x).unwrap();
            assert!((l[0] - 4.0 * value).abs() < 1e-15);
            assert!(kkt_residual(&g, &x).unwrap().residual < 1e-8);
        }
    }

    #[test]
    fn vertex_of_the_simplex_is_worthless() {
        let g = complete(6, 4).unwrap();
        for v in 0..6 {
            let mut x = vec![0.0; 6];
            x[v] = 1.0;
            assert_eq!(eval(&g, &Weighting::new(x).unwrap()).unwrap(), 0.0);
        }
    }

    #[test]
    fn residual_at_a_simplex_vertex() {
        // For graphs the co-edge term L(x_j) = x_i is positive; with r ≥ 3
        // every gradient entry vanishes at a vertex of the simplex.
        let x = Weighting::new(vec![1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let g2 = complete(5, 2).unwrap();
        assert!((kkt_residual(&g2, &x).unwrap().residual - 1.0).abs() < 1e-15);
        let g4 = complete(5, 4).unwrap();
        assert_eq!(kkt_residual(&g4, &x).unwrap().residual, 0.0);
    }

    #[test]
    fn uniform_on_complete_is_stationary() {
        for t in 4..9 {
            let g = complete(t, 4).unwrap();
            let rep = kkt_residual(&g, &Weighting::uniform(t)).unwrap();
            assert!(rep.residual <= 1e-12);
            assert!(rep.uncovered_support_pairs.is_empty());
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let g = complete(5, 4).unwrap();
        assert!(eval(&g, &Weighting::uniform(4)).is_err());
        assert!(grad(&g, &Weighting::uniform(6)).is_err());
    }
}
