//! Lagrangians of uniform hypergraphs and the combinatorial machinery around
//! them: compression, covered cores, symmetrization and partition scoring.
//!
//! Vertices are `0..n` in the API and 1-based in every text format.
//!
//! ```
//! use hyperlag::{families, lagrangian::{maximize, SolverConfig}};
//!
//! let s = families::star(12, 4).unwrap();
//! let res = maximize(&s, &SolverConfig::default()).unwrap();
//! assert!((res.value - 810.0 / 61952.0).abs() < 1e-12);
//! assert!((res.weighting.as_slice()[0] - 0.25).abs() < 1e-9);
//! ```

pub mod compression;
pub mod config;
pub mod error;
pub mod families;
pub mod freeness;
pub mod hypergraph;
pub mod io;
pub mod lagrangian;
pub mod partition;
pub mod symmetrize;
pub mod verify;

pub use error::{Error, Result};
pub use hypergraph::{Hypergraph, Induced, VertexSet, Weighting};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/hypergraphs.md")]
    mod hypergraphs {}
    #[doc = include_str!("../../../book/src/lagrangian.md")]
    mod lagrangian {}
    #[doc = include_str!("../../../book/src/compression.md")]
    mod compression {}
    #[doc = include_str!("../../../book/src/freeness.md")]
    mod freeness {}
    #[doc = include_str!("../../../book/src/symmetrization.md")]
    mod symmetrization {}
    #[doc = include_str!("../../../book/src/partitions.md")]
    mod partitions {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
