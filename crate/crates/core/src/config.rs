//! Size guards for the exponential-time searches.

use crate::lagrangian::DEFAULT_SUPPORT_ENUM_GUARD;

/// Environment variable that raises every guard to at least its value.
pub const GUARD_ENV: &str = "HLAG_GUARD_N";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guards {
    /// Vertex count for exact support enumeration.
    pub support_enum: usize,
    /// Vertex count for the left-compressed enumeration.
    pub enumerate: usize,
    /// Vertex count for exhaustive partition search.
    pub partition: usize,
    /// Host vertex count for the direct homomorphism search.
    pub hom: usize,
}

impl Default for Guards {
    fn default() -> Self {
        Self {
            support_enum: DEFAULT_SUPPORT_ENUM_GUARD,
            enumerate: 9,
            partition: 20,
            hom: 10,
        }
    }
}

impl Guards {
    /// Defaults, raised by [`GUARD_ENV`] when it holds an integer.
    pub fn from_env() -> Self {
        let g = Self::default();
        match std::env::var(GUARD_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            Some(n) => g.raised_to(n),
            None => g,
        }
    }

    pub fn raised_to(self, n: usize) -> Self {
        Self {
            support_enum: self.support_enum.max(n),
            enumerate: self.enumerate.max(n),
            partition: self.partition.max(n),
            hom: self.hom.max(n),
        }
    }

    /// No guard at all; only hard representation limits remain.
    pub fn unlimited() -> Self {
        Self::default().raised_to(usize::MAX)
    }
}
