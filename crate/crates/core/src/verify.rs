//! Checks computed Lagrangians against the known bounds and closed forms.
//!
//! Every bound is stored as an integer pair so the printed value is exactly
//! the one being compared against.

use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::families::{case_family, case_link_vertex, complete, k53minus2, star};
use crate::freeness::extremal_lambda_search;
use crate::hypergraph::Hypergraph;
use crate::lagrangian::{grad, maximize, uncovered_reduce, SolverConfig};

/// Slack allowed on every upper bound.
pub const BOUND_TOL: f64 = 1e-7;
/// The threshold separating star subgraphs from everything else.
pub const NON_STAR_BOUND: Exact = Exact::decimal(169, 4);
/// `4!·λ` of large stars tends to this.
pub const STAR_DENSITY: Exact = Exact::ratio(27, 64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Exact {
    pub num: u64,
    pub den: u64,
    /// Rendered as a decimal with this many places instead of `num/den`.
    pub places: Option<u32>,
}

impl Exact {
    /// `num/den` in lowest terms.
    pub const fn ratio(num: u64, den: u64) -> Self {
        let (mut a, mut b) = (num, den);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        Self {
            num: num / a,
            den: den / a,
            places: None,
        }
    }

    pub const fn decimal(num: u64, places: u32) -> Self {
        Self {
            num,
            den: 10u64.pow(places),
            places: Some(places),
        }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.places {
            Some(p) => write!(f, "{:.*}", p as usize, self.value()),
            None => write!(f, "{}/{}", self.num, self.den),
        }
    }
}

/// The upper bound claimed for each case family `F_1..F_14`.
pub const CASE_BOUNDS: [Exact; 14] = [
    Exact::ratio(1, 108),
    Exact::ratio(1, 64),
    Exact::ratio(1, 64),
    Exact::ratio(4, 243),
    Exact::ratio(1, 64),
    NON_STAR_BOUND,
    NON_STAR_BOUND,
    Exact::ratio(1, 64),
    Exact::ratio(1, 64),
    Exact::ratio(2, 135),
    Exact::ratio(2, 135),
    Exact::ratio(1, 72),
    Exact::ratio(2, 135),
    Exact::ratio(2, 135),
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `computed ≤ bound + tolerance`
    AtMost,
    /// `|computed − bound| ≤ tolerance`
    Equal,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationRow {
    pub id: String,
    pub family: String,
    pub n: Option<usize>,
    pub relation: Relation,
    pub exact: Option<Exact>,
    pub bound: f64,
    pub computed: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerificationRow {
    pub fn new(
        id: impl Into<String>,
        family: impl Into<String>,
        n: Option<usize>,
        relation: Relation,
        bound: f64,
        computed: f64,
        tolerance: f64,
    ) -> Self {
        let pass = match relation {
            Relation::AtMost => computed <= bound + tolerance,
            Relation::Equal => (computed - bound).abs() <= tolerance,
        };
        Self {
            id: id.into(),
            family: family.into(),
            n,
            relation,
            exact: None,
            bound,
            computed,
            margin: bound - computed,
            tolerance,
            pass,
        }
    }

    fn exact(mut self, e: Exact) -> Self {
        self.exact = Some(e);
        self
    }

    fn against(id: impl Into<String>, family: impl Into<String>, n: Option<usize>, relation: Relation, e: Exact, computed: f64, tol: f64) -> Self {
        Self::new(id, family, n, relation, e.value(), computed, tol).exact(e)
    }
}

impl fmt::Display for VerificationRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::Equal => "==",
        };
        let n = self.n.map_or_else(|| "-".to_string(), |n| n.to_string());
        let bound = match self.exact {
            Some(e) => e.to_string(),
            None if self.bound.abs() < 1e-4 => format!("{:.1e}", self.bound),
            None => format!("{:.12}", self.bound),
        };
        write!(
            f,
            "{:<14} {:>3}  {:.12} {rel} {:<14} margin {:+.3e}  {}",
            self.id,
            n,
            self.computed,
            bound,
            self.margin,
            if self.pass { "pass" } else { "FAIL" }
        )
    }
}

/// `9(n−2)(n−3) / 512(n−1)²`, the Lagrangian of the 4-uniform star.
pub fn star_lambda(n: usize) -> Exact {
    let n = n as u64;
    Exact::ratio(9 * (n - 2) * (n - 3), 512 * (n - 1) * (n - 1))
}

/// Maximizes a unimodal `f` on `[lo, hi]` by golden-section search.
///
/// ```
/// let (x, v) = hyperlag::verify::golden_max(|x| 0.4 * x * (1.0 - x).powi(2), 0.0, 1.0);
/// assert!((x - 1.0 / 3.0).abs() < 1e-7);
/// assert!((v - 8.0 / 135.0).abs() < 1e-12);
/// ```
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > 1e-12 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = f(a);
        }
    }
    let x = (lo + hi) / 2.0;
    (x, f(x))
}

fn check_range(ns: &RangeInclusive<usize>) -> Result<()> {
    if *ns.start() < 8 || ns.is_empty() {
        return Err(invalid("case families need n ≥ 8"));
    }
    Ok(())
}

/// Bound rows for `F_1..F_14` over `ns`, each followed by the link identity
/// `λ(F) = ¼·L_v(x)` at the optimum `x` and by a check that deleting
/// vertices of uncovered pairs from the link keeps its Lagrangian.
pub fn verify_cases(ns: RangeInclusive<usize>, cfg: &SolverConfig) -> Result<Vec<VerificationRow>> {
    check_range(&ns)?;
    let jobs: Vec<(usize, usize)> = (1..=14).flat_map(|k| ns.clone().map(move |n| (k, n))).collect();
    let rows: Result<Vec<Vec<VerificationRow>>> = jobs.into_par_iter().map(|(k, n)| case_rows(k, n, cfg)).collect();
    Ok(rows?.into_iter().flatten().collect())
}

fn case_rows(k: usize, n: usize, cfg: &SolverConfig) -> Result<Vec<VerificationRow>> {
    let f = case_family(k, n)?;
    let name = format!("F{k}");
    let res = maximize(&f, cfg)?;
    let v = case_link_vertex(k);
    let lv = grad(&f, &res.weighting)?[v];
    let link = f.link(&[v])?;
    let link_lambda = maximize(&link, cfg)?.value;
    let reduced = uncovered_reduce(&link, cfg)?;
    let reduced_lambda = maximize(&reduced.graph, cfg)?.value;
    Ok(vec![
        VerificationRow::against(name.clone(), name.clone(), Some(n), Relation::AtMost, CASE_BOUNDS[k - 1], res.value, BOUND_TOL),
        VerificationRow::new(format!("{name} link"), name.clone(), Some(n), Relation::Equal, lv / 4.0, res.value, 1e-6),
        VerificationRow::new(format!("{name} reduce"), format!("{name} link"), Some(n), Relation::Equal, link_lambda, reduced_lambda, BOUND_TOL),
    ])
}

/// Closed forms: stars over `ns`, `K_7^4`, `K_4^3`, the bound for
/// `K_5^3` minus two edges, and the one-variable maximum `8/135`.
pub fn verify_closed_forms(ns: RangeInclusive<usize>, cfg: &SolverConfig) -> Result<Vec<VerificationRow>> {
    if *ns.start() < 4 {
        return Err(invalid("stars need n ≥ 4"));
    }
    let mut rows = Vec::new();
    for n in ns {
        let s = maximize(&star(n, 4)?, cfg)?;
        rows.push(VerificationRow::against("star", "star(n,4)", Some(n), Relation::Equal, star_lambda(n), s.value, 1e-9));
    }
    let k7 = maximize(&complete(7, 4)?, cfg)?.value;
    rows.push(VerificationRow::against("K7^4", "K7^4", Some(7), Relation::Equal, Exact::ratio(5, 343), k7, 1e-9));
    let k43 = maximize(&complete(4, 3)?, cfg)?.value;
    rows.push(VerificationRow::against("K4^3", "K4^3", Some(4), Relation::Equal, Exact::ratio(1, 16), k43, 1e-9));
    let k5 = maximize(&k53minus2(), cfg)?;
    rows.push(VerificationRow::against("K5^3-2", "K5^3 - {245,345}", Some(5), Relation::AtMost, Exact::decimal(673, 4), k5.value, BOUND_TOL));
    rows.push(VerificationRow::new("K5^3-2 kkt", "K5^3 - {245,345}", Some(5), Relation::AtMost, 1e-8, k5.kkt_residual, 0.0));
    let (x, v) = golden_max(|x| 0.4 * x * (1.0 - x).powi(2), 0.0, 1.0);
    rows.push(VerificationRow::against("quartic-1d", "2x(1-x)^2/5", None, Relation::Equal, Exact::ratio(8, 135), v, 1e-10));
    rows.push(VerificationRow::against("quartic-argmax", "2x(1-x)^2/5", None, Relation::Equal, Exact::ratio(1, 3), x, 1e-6));
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremRow {
    pub n: usize,
    pub graphs: usize,
    pub max_lambda: f64,
    pub witness_is_star_subgraph: bool,
    pub best_non_star: Option<f64>,
    pub best_star: Option<f64>,
    pub star_lambda: f64,
    /// `4!·λ(star(n,4))`.
    pub scaled_star: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremSummary {
    pub rows: Vec<TheoremRow>,
    pub limit: f64,
    pub monotone: bool,
    pub pass: bool,
    /// A non-star graph at or above the threshold, if one turned up.
    #[serde(skip)]
    pub violation: Option<Hypergraph>,
}

impl TheoremSummary {
    /// The summary as table rows, one check per line.
    pub fn verification_rows(&self) -> Vec<VerificationRow> {
        let mut out = Vec::new();
        for r in &self.rows {
            if let Some(l) = r.best_non_star {
                let mut row = VerificationRow::against("non-star", "left-compressed M2^4-free", Some(r.n), Relation::AtMost, NON_STAR_BOUND, l, 0.0);
                row.pass = l < NON_STAR_BOUND.value();
                out.push(row);
            }
            if let Some(l) = r.best_star {
                out.push(VerificationRow::against("star-sub", "left-compressed M2^4-free", Some(r.n), Relation::AtMost, star_lambda(r.n), l, BOUND_TOL));
            }
            if r.n == 7 {
                out.push(VerificationRow::against("max at 7", "left-compressed M2^4-free", Some(7), Relation::Equal, Exact::ratio(5, 343), r.max_lambda, 1e-9));
            }
        }
        if let Some(last) = self.rows.last() {
            let mut row = VerificationRow::against("4!*star", "star(n,4)", Some(last.n), Relation::AtMost, STAR_DENSITY, last.scaled_star, 0.0);
            row.pass = self.monotone;
            out.push(row);
        }
        out
    }
}

/// Runs the exhaustive left-compressed `M_2^4`-free search for
/// `n = 5..=n_max` and checks that only star subgraphs reach `0.0169`, that
/// star subgraphs stay under the star formula, and that the best graph on 7
/// vertices is `K_7^4`.
pub fn verify_theorem(n_max: usize, cfg: &SolverConfig, guard: usize) -> Result<TheoremSummary> {
    if n_max < 5 {
        return Err(invalid("n_max must be at least 5"));
    }
    let mut rows = Vec::new();
    let mut violation = None;
    for n in 5..=n_max {
        let rep = extremal_lambda_search(n, 4, 2, cfg, guard)?;
        let star_l = star_lambda(n).value();
        let mut pass = true;
        if let Some((l, g)) = &rep.best_non_star {
            if *l >= NON_STAR_BOUND.value() {
                pass = false;
                violation.get_or_insert_with(|| g.clone());
            }
        }
        if let Some((l, _)) = &rep.best_star {
            pass &= *l <= star_l + BOUND_TOL;
        }
        if n == 7 {
            pass &= (rep.max_lambda - 5.0 / 343.0).abs() <= 1e-9 && rep.witness == complete(7, 4)?;
        }
        rows.push(TheoremRow {
            n,
            graphs: rep.graphs,
            max_lambda: rep.max_lambda,
            witness_is_star_subgraph: rep.witness_is_star_subgraph,
            best_non_star: rep.best_non_star.map(|b| b.0),
            best_star: rep.best_star.map(|b| b.0),
            star_lambda: star_l,
            scaled_star: 24.0 * star_l,
            pass,
        });
    }
    let monotone = rows.windows(2).all(|w| w[0].scaled_star < w[1].scaled_star) && rows.iter().all(|r| r.scaled_star < STAR_DENSITY.value());
    let pass = monotone && rows.iter().all(|r| r.pass);
    Ok(TheoremSummary {
        rows,
        limit: STAR_DENSITY.value(),
        monotone,
        pass,
        violation,
    })
}
