//! Brute-force oracle: vanishing spaces of the images of all words up to a
//! length bound, optionally intersected with a regular constraint.
//!
//! Words are explored breadth-first by length. Two prefixes with the same
//! constraint state set, counter value and matrix have the same future, so
//! such configurations are merged; the result is the same as enumerating
//! every word.

use std::collections::HashSet;

use serde::Serialize;

use super::poly::{MonomialBasis, PolySpace};
use super::{Caps, ClosureError};
use crate::automata::Nfa;
use crate::exactlin::{RationalMatrix, SpanBuilder};
use crate::lang::{Language, MorphismPair};

/// Oracle outcome with its stabilization evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub space: PolySpace,
    /// Longest word length fully explored.
    pub achieved_len: usize,
    pub requested_len: usize,
    /// Dimension of the vanishing space after each length.
    pub dims_by_len: Vec<usize>,
    /// The space did not change over the last three length increments.
    pub stabilized: bool,
    /// Exploration stopped early at the configuration cap.
    pub capped: bool,
    pub configurations: usize,
}

/// Configurations reachable after each length; the last complete length
/// is reported when the cap is hit.
pub fn oracle_explore(
    mp: &MorphismPair,
    lang: Language,
    constraint: Option<&Nfa<String>>,
    degree: usize,
    max_len: usize,
    caps: &Caps,
) -> Result<OracleReport, ClosureError> {
    if let Some(nfa) = constraint {
        if nfa.alphabet() != mp.alphabet() {
            return Err(ClosureError::Argument("constraint alphabet differs from the morphism alphabet".into()));
        }
    }
    let basis = MonomialBasis::new(mp.dim(), degree, caps.max_veronese)?;
    let eta = i64::try_from(mp.eta()).unwrap_or(i64::MAX);
    let start_states: Vec<usize> = constraint.map_or_else(|| vec![0], |n| sorted(n.initial().to_vec()));
    let accepting = |states: &[usize]| constraint.is_none_or(|n| states.iter().any(|&q| n.is_accepting(q)));

    let mut span = SpanBuilder::new(basis.len());
    let mut level: HashSet<(Vec<usize>, i64, RationalMatrix)> = HashSet::new();
    if !start_states.is_empty() && lang.viable(0, max_len, eta) {
        level.insert((start_states, 0, RationalMatrix::identity(mp.dim())));
    }
    let mut dims = Vec::new();
    let mut configurations = 0usize;
    let mut achieved = 0usize;
    let mut capped = false;
    for len in 0..=max_len {
        for (states, weight, m) in &level {
            if lang.is_final(*weight) && accepting(states) {
                span.insert(basis.embed(m));
            }
        }
        dims.push(basis.len() - span.dim());
        achieved = len;
        if len == max_len || level.is_empty() {
            for _ in len + 1..=max_len {
                dims.push(basis.len() - span.dim());
            }
            achieved = max_len;
            break;
        }
        let mut next = HashSet::new();
        for (states, weight, m) in &level {
            for a in 0..mp.len() {
                let w = weight + i64::from(mp.omega(a));
                if !lang.viable(w, max_len - len - 1, eta) {
                    continue;
                }
                let succ = match constraint {
                    Some(n) => sorted(states.iter().flat_map(|&q| n.successors(q, a)).collect()),
                    None => vec![0],
                };
                if succ.is_empty() {
                    continue;
                }
                next.insert((succ, w, m.mul(mp.phi(a))));
            }
        }
        if configurations + next.len() > caps.max_words {
            capped = true;
            break;
        }
        configurations += next.len();
        level = next;
    }
    let space = PolySpace::from_evaluations(mp.dim(), degree, &span.to_subspace());
    let stabilized = achieved >= 3 && {
        let tail = &dims[achieved - 3..=achieved];
        tail.iter().all(|&d| d == tail[0])
    };
    Ok(OracleReport {
        space,
        achieved_len: achieved,
        requested_len: max_len,
        dims_by_len: dims,
        stabilized,
        capped,
        configurations,
    })
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Vanishing space of `φ` over the selected language (and constraint) up
/// to length `max_len`; errors if the configuration cap stops exploration.
pub fn oracle_closure(
    mp: &MorphismPair,
    lang: Language,
    constraint: Option<&Nfa<String>>,
    degree: usize,
    max_len: usize,
    caps: &Caps,
) -> Result<OracleReport, ClosureError> {
    let report = oracle_explore(mp, lang, constraint, degree, max_len, caps)?;
    if report.capped {
        return Err(ClosureError::Infeasible(format!(
            "oracle stopped at length {} of {max_len}: more than {} configurations",
            report.achieved_len, caps.max_words
        )));
    }
    Ok(report)
}
