use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use super::newton::{self, NewtonOutcome};
use super::{eval_raw, grad_raw, kkt_residual};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{Hypergraph, VertexSet, Weighting};

/// Largest vertex count for which support enumeration runs by default.
pub const DEFAULT_SUPPORT_ENUM_GUARD: usize = 12;

/// Weights at or below this fraction of the largest weight are treated as
/// leaving the support when the ascent hands over to Newton.
const SUPPORT_CUTOFF: f64 = 1e-8;
const RESEED_WEIGHT: f64 = 1e-3;
const POLISH_ROUNDS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    MultistartAscent,
    SupportEnum,
    Auto,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::MultistartAscent => "multistart-ascent",
            Method::SupportEnum => "support-enum",
            Method::Auto => "auto",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multistart-ascent" | "multistart" | "ascent" => Ok(Method::MultistartAscent),
            "support-enum" | "enum" => Ok(Method::SupportEnum),
            "auto" => Ok(Method::Auto),
            _ => Err(invalid(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    /// Dirichlet(1) starts, in addition to the uniform start.
    pub restarts: usize,
    /// Cap on ascent iterations per start.
    pub max_iterations: usize,
    /// Relative improvement in `λ` below which the ascent stops.
    pub tol: f64,
    /// Stationarity tolerance used to decide whether a zero coordinate
    /// must re-enter the support.
    pub kkt_tol: f64,
    pub seed: u64,
    pub support_enum_guard: usize,
    /// Average the weights inside each class of equivalent vertices.
    pub equalize: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            restarts: 64,
            max_iterations: 10_000,
            tol: 1e-12,
            kkt_tol: 1e-8,
            seed: 0,
            support_enum_guard: DEFAULT_SUPPORT_ENUM_GUARD,
            equalize: true,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.kkt_tol > 0.0) {
            return Err(invalid("tolerances must be positive"));
        }
        if self.restarts == 0 && self.method != Method::SupportEnum {
            return Err(invalid("at least one restart is required"));
        }
        Ok(())
    }
}

/// A maximizer together with its optimality certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianResult {
    pub value: f64,
    pub weighting: Weighting,
    /// Vertices with positive weight.
    pub support: VertexSet,
    pub kkt_residual: f64,
    /// Positive-weight pairs covered by no edge.
    pub uncovered_support_pairs: Vec<(usize, usize)>,
    /// The method that produced the reported point.
    pub method: Method,
    /// Ascent starts run, counting the uniform start.
    pub restarts_used: usize,
    pub seed: u64,
}

struct Candidate {
    value: f64,
    x: Vec<f64>,
    support: Vec<usize>,
    method: Method,
}

impl Candidate {
    fn new(edges: &[Vec<usize>], x: Vec<f64>, method: Method) -> Self {
        let value = eval_raw(edges, &x);
        let support = (0..x.len()).filter(|&i| x[i] > 0.0).collect();
        Self {
            value,
            x,
            support,
            method,
        }
    }

    /// Larger value wins; values within `tol` tie and the
    /// lexicographically smaller support wins.
    fn beats(&self, other: &Candidate, tol: f64) -> bool {
        if self.value > other.value + tol {
            return true;
        }
        (self.value - other.value).abs() <= tol && self.support < other.support
    }
}

fn pick_best(cands: impl IntoIterator<Item = Candidate>, tol: f64) -> Option<Candidate> {
    cands.into_iter().fold(None, |best, c| match best {
        Some(b) if !c.beats(&b, tol) => Some(b),
        _ => Some(c),
    })
}

/// `λ(G)`, the maximum of the Lagrangian over the simplex.
///
/// ```
/// use hyperlag::{families, lagrangian::{maximize, SolverConfig}};
///
/// let k7 = families::complete(7, 4).unwrap();
/// let res = maximize(&k7, &SolverConfig::default()).unwrap();
/// assert!((res.value - 5.0 / 343.0).abs() < 1e-12);
/// ```
pub fn maximize(g: &Hypergraph, cfg: &SolverConfig) -> Result<LagrangianResult> {
    cfg.validate()?;
    let n = g.n();
    if n == 0 {
        return Err(invalid("the Lagrangian needs at least one vertex"));
    }
    if g.is_empty() {
        return Ok(LagrangianResult {
            value: 0.0,
            weighting: Weighting::uniform(n),
            support: VertexSet::full(n),
            kkt_residual: 0.0,
            uncovered_support_pairs: Vec::new(),
            method: cfg.method,
            restarts_used: 0,
            seed: cfg.seed,
        });
    }
    let tie = 1e-12;
    let mut restarts_used = 0;
    let best = match cfg.method {
        Method::MultistartAscent => {
            restarts_used = cfg.restarts + 1;
            multistart(g, cfg)
        }
        Method::SupportEnum => support_enum(g, cfg)?,
        Method::Auto => {
            restarts_used = cfg.restarts + 1;
            let ms = multistart(g, cfg);
            if n <= cfg.support_enum_guard {
                let se = support_enum(g, cfg)?;
                pick_best([ms, se], tie).expect("two candidates")
            } else {
                ms
            }
        }
    };
    let best = if cfg.equalize { equalize(g, best) } else { best };
    let weighting = Weighting::from_vec_unchecked(best.x);
    let kkt = kkt_residual(g, &weighting)?;
    Ok(LagrangianResult {
        value: best.value,
        support: VertexSet::from_sorted(best.support),
        weighting,
        kkt_residual: kkt.residual,
        uncovered_support_pairs: kkt.uncovered_support_pairs,
        method: best.method,
        restarts_used,
        seed: cfg.seed,
    })
}

fn multistart(g: &Hypergraph, cfg: &SolverConfig) -> Candidate {
    let n = g.n();
    let cands: Vec<Candidate> = (0..=cfg.restarts)
        .into_par_iter()
        .map(|k| {
            let start = if k == 0 {
                vec![1.0 / n as f64; n]
            } else {
                dirichlet_start(cfg.seed, k as u64, n)
            };
            let x = ascend(g.edges(), g.r(), start, cfg);
            let x = polish(g.edges(), g.r(), x, cfg, true);
            Candidate::new(g.edges(), x, Method::MultistartAscent)
        })
        .collect();
    pick_best(cands, 1e-12).expect("at least the uniform start")
}

/// A Dirichlet(1) point from normalized exponentials; restart `k` uses its
/// own ChaCha stream so runs do not depend on scheduling.
fn dirichlet_start(seed: u64, k: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    let mut x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    x
}

/// Exponentiated-gradient ascent `x_i ← x_i·exp(η(L(x_i)/rλ − 1))` with
/// renormalization and a backtracked step size. Zero coordinates stay zero.
pub(crate) fn ascend(edges: &[Vec<usize>], r: usize, mut x: Vec<f64>, cfg: &SolverConfig) -> Vec<f64> {
    let n = x.len();
    let mut l = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut lambda = eval_raw(edges, &x);
    if lambda <= 0.0 {
        return x;
    }
    let mut eta = 1.0;
    for _ in 0..cfg.max_iterations {
        grad_raw(edges, &x, &mut l);
        let target = r as f64 * lambda;
        let shift = (0..n)
            .filter(|&i| x[i] > 0.0)
            .map(|i| eta * (l[i] / target - 1.0))
            .fold(f64::NEG_INFINITY, f64::max);
        loop {
            for i in 0..n {
                y[i] = if x[i] > 0.0 {
                    x[i] * (eta * (l[i] / target - 1.0) - shift).exp()
                } else {
                    0.0
                };
            }
            let s: f64 = y.iter().sum();
            y.iter_mut().for_each(|v| *v /= s);
            let ly = eval_raw(edges, &y);
            if ly >= lambda {
                let gain = ly - lambda;
                std::mem::swap(&mut x, &mut y);
                lambda = ly;
                eta = (eta * 1.5).min(1e4);
                if gain <= cfg.tol * lambda {
                    return x;
                }
                break;
            }
            eta *= 0.5;
            if eta < 1e-14 {
                return x;
            }
        }
    }
    x
}

/// Newton refinement on the support of an ascent point. Supports shrink when
/// Newton drives a weight negative; with `reseed`, zero coordinates whose
/// gradient exceeds `rλ` are given weight again and the ascent resumes.
fn polish(edges: &[Vec<usize>], r: usize, mut x: Vec<f64>, cfg: &SolverConfig, reseed: bool) -> Vec<f64> {
    let n = x.len();
    let mut l = vec![0.0; n];
    for _ in 0..POLISH_ROUNDS {
        let top = x.iter().copied().fold(0.0, f64::max);
        let mut support: Vec<usize> = (0..n).filter(|&i| x[i] > SUPPORT_CUTOFF * top).collect();
        let y = loop {
            match newton::solve(edges, n, &support, &x) {
                NewtonOutcome::Converged(y) => break Some(y),
                NewtonOutcome::Negative(v) => {
                    support.retain(|&u| u != v);
                    if support.is_empty() {
                        break None;
                    }
                }
                NewtonOutcome::Failed => break None,
            }
        };
        let Some(y) = y else {
            return x;
        };
        let value_y = eval_raw(edges, &y);
        if value_y < eval_raw(edges, &x) - 1e-12 {
            return x;
        }
        grad_raw(edges, &y, &mut l);
        let target = r as f64 * value_y;
        let violators: Vec<usize> = (0..n)
            .filter(|&i| y[i] == 0.0 && l[i] > target + cfg.kkt_tol * 1e-2)
            .collect();
        if violators.is_empty() || !reseed {
            return y;
        }
        let mut z = y;
        for &v in &violators {
            z[v] = RESEED_WEIGHT;
        }
        let s: f64 = z.iter().sum();
        z.iter_mut().for_each(|v| *v /= s);
        x = ascend(edges, r, z, cfg);
    }
    x
}

/// Solves the stationarity system on every support whose induced subgraph
/// covers all its pairs. Some optimum has such a support: weight moves
/// linearly between two vertices that share no edge.
fn support_enum(g: &Hypergraph, cfg: &SolverConfig) -> Result<Candidate> {
    let n = g.n();
    if n > cfg.support_enum_guard || n > 63 {
        return Err(Error::UnsupportedSize {
            what: "vertex count for support enumeration",
            value: n,
            guard: cfg.support_enum_guard.min(63),
        });
    }
    let r = g.r();
    let edge_masks: Vec<u64> = g
        .edges()
        .iter()
        .map(|e| e.iter().fold(0u64, |m, &v| m | 1 << v))
        .collect();
    let mut best: Option<Candidate> = None;
    let mut cover = vec![0u64; n];
    for mask in 1u64..(1u64 << n) {
        if (mask.count_ones() as usize) < r {
            continue;
        }
        cover.iter_mut().for_each(|c| *c = 0);
        for &em in &edge_masks {
            if em & !mask == 0 {
                let mut rest = em;
                while rest != 0 {
                    let v = rest.trailing_zeros() as usize;
                    cover[v] |= em;
                    rest &= rest - 1;
                }
            }
        }
        let support: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if support.iter().any(|&v| mask & !cover[v] & !(1 << v) != 0) {
            continue;
        }
        let start = Weighting::uniform_on(n, &support).into_vec();
        let mut found = Vec::with_capacity(3);
        match newton::solve(g.edges(), n, &support, &start) {
            NewtonOutcome::Converged(y) => {
                if let Some(d) = newton::uphill_direction(g.edges(), n, &support, &y) {
                    for sign in [1.0, -1.0] {
                        found.push(polish(g.edges(), r, ascend(g.edges(), r, step_inside(&y, &d, sign), cfg), cfg, false));
                    }
                }
                found.push(y);
            }
            _ => found.push(polish(g.edges(), r, ascend(g.edges(), r, start, cfg), cfg, false)),
        }
        for x in found {
            let cand = Candidate::new(g.edges(), x, Method::SupportEnum);
            best = match best {
                Some(b) if !cand.beats(&b, 1e-12) => Some(b),
                _ => Some(cand),
            };
        }
    }
    Ok(best.unwrap_or_else(|| Candidate::new(g.edges(), vec![1.0 / n as f64; n], Method::SupportEnum)))
}

/// `y + t·sign·d` for the largest `t ≤ 1` keeping half of every weight.
fn step_inside(y: &[f64], d: &[f64], sign: f64) -> Vec<f64> {
    let t = y
        .iter()
        .zip(d)
        .filter(|(_, &dv)| sign * dv < 0.0)
        .map(|(&yv, &dv)| 0.5 * yv / dv.abs())
        .fold(1.0, f64::min);
    y.iter().zip(d).map(|(&yv, &dv)| yv + t * sign * dv).collect()
}

/// Replaces the weights inside each class of equivalent vertices by their
/// mean. Two vertices are equivalent exactly when their links coincide, and
/// `λ` depends on such a pair only through `x_i + x_j`.
fn equalize(g: &Hypergraph, c: Candidate) -> Candidate {
    let n = g.n();
    let mut links: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n];
    for e in g.edges() {
        for &v in e {
            links[v].push(e.iter().copied().filter(|&u| u != v).collect());
        }
    }
    let mut classes: HashMap<&[Vec<usize>], Vec<usize>> = HashMap::new();
    for (v, link) in links.iter().enumerate() {
        if !link.is_empty() {
            classes.entry(link.as_slice()).or_default().push(v);
        }
    }
    let mut x = c.x.clone();
    let mut changed = false;
    for class in classes.values().filter(|c| c.len() > 1) {
        let mean = class.iter().map(|&v| x[v]).sum::<f64>() / class.len() as f64;
        for &v in class {
            changed |= x[v] != mean;
            x[v] = mean;
        }
    }
    if !changed {
        return c;
    }
    let method = c.method;
    let eq = Candidate::new(g.edges(), x, method);
    if eq.value >= c.value - 1e-10 {
        eq
    } else {
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete, k53minus2, matching, star};

    fn with(method: Method) -> SolverConfig {
        SolverConfig {
            method,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn closed_forms() {
        let cfg = SolverConfig::default();
        let v = maximize(&complete(7, 4).unwrap(), &cfg).unwrap();
        assert!((v.value - 5.0 / 343.0).abs() < 1e-12);
        let v = maximize(&complete(4, 3).unwrap(), &cfg).unwrap();
        assert!((v.value - 1.0 / 16.0).abs() < 1e-12);
        for n in 4..=14 {
            let nf = n as f64;
            let expected = 9.0 * (nf - 2.0) * (nf - 3.0) / (512.0 * (nf - 1.0) * (nf - 1.0));
            let res = maximize(&star(n, 4).unwrap(), &cfg).unwrap();
            assert!((res.value - expected).abs() < 1e-12, "n = {n}");
            assert!(res.kkt_residual < 1e-10);
        }
    }

    #[test]
    fn matching_concentrates_on_the_first_edge() {
        for m in [Method::MultistartAscent, Method::SupportEnum, Method::Auto] {
            let res = maximize(&matching(2, 4).unwrap(), &with(m)).unwrap();
            assert!((res.value - 1.0 / 256.0).abs() < 1e-14, "{m}");
            assert_eq!(res.support.as_slice(), &[0, 1, 2, 3], "{m}");
        }
    }

    #[test]
    fn k53_minus_two_methods_agree() {
        let g = k53minus2();
        let a = maximize(&g, &with(Method::MultistartAscent)).unwrap();
        let b = maximize(&g, &with(Method::SupportEnum)).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
        assert!(a.value <= 0.0673);
        assert!(a.kkt_residual < 1e-8);
    }

    #[test]
    fn empty_graph_is_degenerate() {
        let res = maximize(&Hypergraph::empty(4, 6), &SolverConfig::default()).unwrap();
        assert_eq!(res.value, 0.0);
        assert_eq!(res.kkt_residual, 0.0);
        assert_eq!(res.weighting, Weighting::uniform(6));
        assert!(maximize(&Hypergraph::empty(4, 0), &SolverConfig::default()).is_err());
    }

    #[test]
    fn support_enum_guard() {
        let g = star(13, 4).unwrap();
        let err = maximize(&g, &with(Method::SupportEnum)).unwrap_err();
        assert!(matches!(err, Error::UnsupportedSize { value: 13, guard: 12, .. }));
        // auto skips enumeration above the guard
        assert!(maximize(&g, &with(Method::Auto)).is_ok());
    }

    #[test]
    fn equivalent_vertices_get_equal_weight() {
        let g = complete(5, 4).unwrap().blowup(&[3, 2, 2, 1, 1]).unwrap();
        let res = maximize(&g, &with(Method::MultistartAscent)).unwrap();
        assert!((res.value - 1.0 / 125.0).abs() < 1e-12);
        let x = res.weighting.as_slice();
        for (a, b) in [(0, 1), (1, 2), (3, 4), (5, 6)] {
            assert!((x[a] - x[b]).abs() < 1e-12);
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let g = k53minus2();
        let cfg = SolverConfig::with_seed(7);
        assert_eq!(maximize(&g, &cfg).unwrap(), maximize(&g, &cfg).unwrap());
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::MultistartAscent, Method::SupportEnum, Method::Auto] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("newton".parse::<Method>().is_err());
    }
}
