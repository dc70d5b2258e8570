//! Span fixpoint over automaton states: per-state spans of Veronese
//! vectors, seeded at the initial states and closed under letter actions.

use std::collections::VecDeque;

use super::poly::{MonomialBasis, PolySpace};
use super::veronese::{right_map, SparseMap};
use super::{Caps, ClosureError};
use crate::automata::Nfa;
use crate::exactlin::{Rational, RationalMatrix, SpanBuilder, Subspace};

/// Least family of per-state spans containing `seed` at initial states and
/// closed under `action(letter, ·)` along transitions.
pub fn span_fixpoint<L: Clone + Eq>(
    nfa: &Nfa<L>,
    dim: usize,
    seed: &[Rational],
    action: impl Fn(usize, &[Rational]) -> Vec<Rational>,
) -> Vec<SpanBuilder> {
    let mut spans: Vec<SpanBuilder> = (0..nfa.num_states()).map(|_| SpanBuilder::new(dim)).collect();
    let mut queue: VecDeque<(usize, Vec<Rational>)> = VecDeque::new();
    for &q in nfa.initial() {
        if let Some(row) = spans[q].insert(seed.to_vec()) {
            queue.push_back((q, row));
        }
    }
    while let Some((p, v)) = queue.pop_front() {
        for &(a, q) in nfa.transitions_from(p) {
            let image = action(a, &v);
            if let Some(row) = spans[q].insert(image) {
                queue.push_back((q, row));
            }
        }
    }
    spans
}

/// Span of the Veronese vectors of `φ(w)` over all accepted words.
pub fn regular_span<L: Clone + Eq>(nfa: &Nfa<L>, mats: &[RationalMatrix], basis: &MonomialBasis) -> Subspace {
    let trimmed = nfa.trim();
    if trimmed.num_states() == 0 {
        return Subspace::zero(basis.len());
    }
    let mut used = vec![false; mats.len()];
    for q in 0..trimmed.num_states() {
        for &(a, _) in trimmed.transitions_from(q) {
            used[a] = true;
        }
    }
    let maps: Vec<Option<SparseMap>> =
        mats.iter().zip(&used).map(|(m, &u)| u.then(|| right_map(basis, m))).collect();
    let seed = basis.embed(&RationalMatrix::identity(basis.dim()));
    let spans = span_fixpoint(&trimmed, basis.len(), &seed, |a, v| maps[a].as_ref().expect("used letter").apply(v));
    let mut total = SpanBuilder::new(basis.len());
    for q in trimmed.accepting_states() {
        for row in spans[q].basis() {
            total.insert(row.clone());
        }
    }
    total.to_subspace()
}

/// Exact degree-`<= degree` vanishing space of `φ(L(nfa))`, where letter
/// `a` of the automaton maps to `mats[a]`.
pub fn regular_closure<L: Clone + Eq>(
    nfa: &Nfa<L>,
    mats: &[RationalMatrix],
    degree: usize,
    caps: &Caps,
) -> Result<PolySpace, ClosureError> {
    let dim = check_letter_matrices(nfa.alphabet().len(), mats)?;
    let basis = MonomialBasis::new(dim, degree, caps.max_veronese)?;
    let span = regular_span(nfa, mats, &basis);
    Ok(PolySpace::from_evaluations(dim, degree, &span))
}

pub(crate) fn check_letter_matrices(letters: usize, mats: &[RationalMatrix]) -> Result<usize, ClosureError> {
    if mats.len() != letters {
        return Err(ClosureError::Argument(format!(
            "automaton has {letters} letters but {} matrices were given",
            mats.len()
        )));
    }
    let dim = mats.first().map_or(0, RationalMatrix::rows);
    if dim == 0 || mats.iter().any(|m| m.rows() != dim || m.cols() != dim) {
        return Err(ClosureError::Argument("letter matrices must be square of one positive size".into()));
    }
    Ok(dim)
}
