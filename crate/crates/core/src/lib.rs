//! Exact algorithms for Zariski closures of matrix images of one-counter
//! and weighted languages.

pub mod exactlin;
pub mod automata;
pub mod corpus;
pub mod error;
pub mod closure;
pub mod exterior;
pub mod facttree;
pub mod instance;
pub mod lang;
pub mod reduce;

pub use exactlin::{LinAlgError, Rational, RationalMatrix, SpanBuilder, Subspace};
pub use automata::{AutomataError, GammaLetter, Nfa};
pub use error::Error;
pub use exterior::{ExtVector, ExteriorError};
pub use facttree::{FactTree, StabilityRule, TreeError};
pub use lang::{Language, LangError, MorphismPair, Vass, Word, WordClass};
