//! The `.hg` text format and its JSON twin.
//!
//! ```text
//! # comments and blank lines are ignored
//! 4 6          <- r n
//! 1 2 3 4      <- one edge per line, 1-based, increasing
//! 1 2 5 6
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses the `.hg` text format.
///
/// ```
/// let g = hyperlag::io::parse_hg("3 4\n1 2 3\n# skip\n2 3 4\n").unwrap();
/// assert_eq!(g.num_edges(), 2);
/// assert!(hyperlag::io::parse_hg("3 4\n1 2 5\n").is_err());
/// ```
pub fn parse_hg(text: &str) -> Result<Hypergraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header `r n`"))?;
    let nums = parse_ints(hline, header)?;
    let [r, n] = nums[..] else {
        return Err(parse_err(hline, "header must be `r n`"));
    };
    if r < 1 {
        return Err(parse_err(hline, "uniformity must be at least 1"));
    }
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for (ln, l) in lines {
        let e = parse_ints(ln, l)?;
        if e.len() != r {
            return Err(parse_err(ln, format!("edge has {} vertices, expected {r}", e.len())));
        }
        if let Some(&v) = e.iter().find(|&&v| v == 0 || v > n) {
            return Err(parse_err(ln, format!("vertex {v} outside 1..{n}")));
        }
        if e.windows(2).any(|w| w[0] >= w[1]) {
            return Err(parse_err(ln, "edge vertices must be strictly increasing"));
        }
        let e: Vec<usize> = e.into_iter().map(|v| v - 1).collect();
        if !seen.insert(e.clone()) {
            return Err(parse_err(ln, "duplicate edge"));
        }
        edges.push(e);
    }
    Hypergraph::new(r, n, edges)
}

fn parse_ints(line: usize, text: &str) -> Result<Vec<usize>> {
    text.split_whitespace()
        .map(|w| {
            w.parse::<usize>()
                .map_err(|_| parse_err(line, format!("not a nonnegative integer: {w:?}")))
        })
        .collect()
}

/// The `.hg` text of `g` (same as its `Display`).
pub fn to_hg(g: &Hypergraph) -> String {
    g.to_string()
}

#[derive(Serialize, Deserialize)]
struct JsonGraph {
    r: usize,
    n: usize,
    edges: Vec<Vec<usize>>,
}

/// Parses `{"r": .., "n": .., "edges": [[..], ..]}` with 1-based vertices.
pub fn parse_json(text: &str) -> Result<Hypergraph> {
    let j: JsonGraph = serde_json::from_str(text)?;
    Hypergraph::from_one_based(j.r, j.n, j.edges)
}

pub fn to_json(g: &Hypergraph) -> String {
    serde_json::to_string(&JsonGraph {
        r: g.r(),
        n: g.n(),
        edges: g.edges_one_based(),
    })
    .expect("plain integers serialize")
}

/// Picks the format from the first non-blank character.
pub fn parse_auto(text: &str) -> Result<Hypergraph> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_hg(text)
    }
}

/// A weights file: `n` whitespace-separated decimals.
pub fn parse_weights(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        for w in line.split_whitespace() {
            out.push(
                w.parse::<f64>()
                    .map_err(|_| parse_err(k + 1, format!("not a number: {w:?}")))?,
            );
        }
    }
    Ok(out)
}
