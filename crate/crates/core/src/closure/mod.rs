//! Degree-bounded vanishing ideals of matrix images of languages: the
//! polynomial layer, the Veronese span engines, the cover/reach/zero
//! pipelines and the brute-force oracle.

pub mod chain;
pub mod engine;
pub mod oracle;
pub mod pipelines;
pub mod poly;
pub mod summary;
pub mod veronese;
pub mod zero;

use thiserror::Error;

use crate::automata::{AutomataError, DEFAULT_MAX_STATES};
use crate::lang::LangError;

pub use engine::regular_closure;
pub use oracle::{oracle_closure, oracle_explore, OracleReport};
pub use pipelines::{
    check_eta_policy, cover_closure, cover_closure_blocks, cover_closure_constrained, reach_closure, reach_closure_blocks,
    reach_closure_constrained, vass_closure, zero_closure, zero_closure_constrained, Route,
};
pub use poly::{finite_vanishing_space, ideal_slice, space_to_generators, IdealGens, MonomialBasis, PolySpace, Polynomial};

/// Default bound on the Veronese dimension.
pub const DEFAULT_MAX_VERONESE: usize = 10_000;
/// Default bound on enumerated oracle configurations.
pub const DEFAULT_MAX_WORDS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClosureError {
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Lang(#[from] LangError),
}

/// Resource bounds; exceeding one is an error, never a silent truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_states: usize,
    pub max_veronese: usize,
    pub max_words: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self { max_states: DEFAULT_MAX_STATES, max_veronese: DEFAULT_MAX_VERONESE, max_words: DEFAULT_MAX_WORDS }
    }
}

impl Caps {
    /// Defaults overridden by `CLOSURE_MAX_STATES`, `CLOSURE_MAX_VERONESE`
    /// and `CLOSURE_MAX_WORDS` when set to integers.
    pub fn from_env() -> Self {
        let read = |key: &str, fallback: usize| {
            std::env::var(key).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(fallback)
        };
        let d = Self::default();
        Self {
            max_states: read("CLOSURE_MAX_STATES", d.max_states),
            max_veronese: read("CLOSURE_MAX_VERONESE", d.max_veronese),
            max_words: read("CLOSURE_MAX_WORDS", d.max_words),
        }
    }
}
