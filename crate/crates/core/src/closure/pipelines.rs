//! End-to-end cover, reach and zero pipelines, with and without a regular
//! constraint, and the threshold feasibility policy.
//!
//! Two routes exist for constrained problems. The direct route runs the
//! exact engines on the original dimension with the constraint automaton
//! in place. The block route folds the constraint into block matrices,
//! solves the stateless problem on the lifted morphism and extracts the
//! answer; it is exact as well, but the lifted dimension makes it feasible
//! only for small automata.

use super::engine::regular_closure;
use super::poly::{monomial_count, MonomialBasis, PolySpace};
use super::summary::{counter_span, CounterKind};
use super::veronese::ProductTable;
use super::zero::zero_closure_literal;
use super::{Caps, ClosureError};
use crate::automata::{build_cover_automaton, build_reach_automaton, Nfa};
use crate::lang::{default_eta, MorphismPair, Vass};
use crate::reduce::{blockify_regular, extract_block_closure, vass_to_transitions};

/// Which construction produced a pipeline result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Exact engines at the original dimension.
    Direct,
    /// Block folding, stateless solve on the lifted morphism, extraction.
    Blocks,
}

/// Refuses default-threshold runs for `d >= 2`: the threshold `η(d)` is
/// doubly exponential in practice and the automata built from it are far
/// beyond desk scale. Overridden thresholds are accepted; callers are
/// expected to validate such runs against the oracle.
pub fn check_eta_policy(mp: &MorphismPair, pipeline: &str, degree: usize) -> Result<(), ClosureError> {
    let d = mp.dim();
    if d < 2 || mp.eta_overridden() {
        return Ok(());
    }
    let eta = default_eta(d);
    let states = match pipeline {
        "reach" => format!("{} reach-automaton states before determinization", eta.saturating_mul(2).saturating_add(1)),
        "zero" => format!("{} four-track counter states", eta.saturating_mul(4).saturating_add(1)),
        _ => format!("{} cover-automaton states", eta.saturating_add(1)),
    };
    Err(ClosureError::Infeasible(format!(
        "{pipeline} pipeline at the default threshold η({d}) = {eta} needs {states} over a Veronese space of \
         dimension {} at degree {degree}; this is not desk-feasible. Set eta_override (the result is then \
         cross-validated against the oracle)",
        monomial_count(d * d, degree)
    )))
}

fn check_alphabet(mp: &MorphismPair, constraint: Option<&Nfa<String>>) -> Result<(), ClosureError> {
    match constraint {
        Some(nfa) if nfa.alphabet() != mp.alphabet() => {
            Err(ClosureError::Argument("constraint alphabet differs from the morphism alphabet".into()))
        }
        _ => Ok(()),
    }
}

fn universal(mp: &MorphismPair) -> Nfa<String> {
    Nfa::new(vec!["q".into()], mp.alphabet().to_vec(), [0], [0], (0..mp.len()).map(|a| (0, a, 0)))
        .expect("one-state automaton is valid")
}

fn with_constraint(a: Nfa<String>, constraint: Option<&Nfa<String>>, caps: &Caps) -> Result<Nfa<String>, ClosureError> {
    Ok(match constraint {
        Some(c) => a.product(c, caps.max_states)?.trim(),
        None => a,
    })
}

/// Exact counter span on `nfa`, after checking that the state-pair grid fits.
fn counter_closure(
    mp: &MorphismPair,
    nfa: &Nfa<String>,
    kind: CounterKind,
    degree: usize,
    caps: &Caps,
) -> Result<PolySpace, ClosureError> {
    let nfa = nfa.trim();
    let n = nfa.num_states();
    let cells = n.saturating_mul(n);
    if cells > caps.max_states {
        return Err(ClosureError::Infeasible(format!(
            "counter engine needs {cells} state-pair spans for a {n}-state automaton, above the state cap {}",
            caps.max_states
        )));
    }
    let basis = MonomialBasis::new(mp.dim(), degree, caps.max_veronese)?;
    let table = ProductTable::new(&basis);
    let span = counter_span(&nfa, mp.phis(), mp.omegas(), kind, &basis, &table);
    Ok(PolySpace::from_evaluations(mp.dim(), degree, &span))
}

/// Degree-`<= degree` vanishing space of `φ(L(A_cover))`, the cover
/// automaton at the morphism's threshold.
pub fn cover_closure(mp: &MorphismPair, degree: usize, caps: &Caps) -> Result<PolySpace, ClosureError> {
    cover_closure_constrained(mp, None, degree, caps)
}

/// As [`cover_closure`], intersected with a regular constraint.
pub fn cover_closure_constrained(
    mp: &MorphismPair,
    constraint: Option<&Nfa<String>>,
    degree: usize,
    caps: &Caps,
) -> Result<PolySpace, ClosureError> {
    check_alphabet(mp, constraint)?;
    check_eta_policy(mp, "cover", degree)?;
    let a = with_constraint(build_cover_automaton(mp, caps.max_states)?, constraint, caps)?;
    regular_closure(&a, mp.phis(), degree, caps)
}

/// Whether the literal four-track construction fits the caps.
pub fn zero_literal_feasible(mp: &MorphismPair, degree: usize, caps: &Caps) -> bool {
    let Ok(basis) = MonomialBasis::new(mp.dim(), degree, caps.max_veronese) else { return false };
    let tensor: usize = (0..=degree).map(|e| basis.of_degree(e).len().saturating_pow(4)).fold(0, usize::saturating_add);
    let states = mp.eta().saturating_mul(4).saturating_add(1);
    tensor <= caps.max_veronese && states <= caps.max_states as u64
}

/// Degree-`<= degree` vanishing space of the zero-weight image. Uses the
/// literal bounded-zero plus four-track construction when it fits the
/// caps, and the exact counter engine otherwise.
pub fn zero_closure(mp: &MorphismPair, degree: usize, caps: &Caps) -> Result<PolySpace, ClosureError> {
    check_eta_policy(mp, "zero", degree)?;
    if zero_literal_feasible(mp, degree, caps) {
        zero_closure_literal(mp, degree, caps)
    } else {
        counter_closure(mp, &universal(mp), CounterKind::Zero, degree, caps)
    }
}

/// Zero-weight words of a regular constraint, by the exact counter engine.
pub fn zero_closure_constrained(
    mp: &MorphismPair,
    constraint: Option<&Nfa<String>>,
    degree: usize,
    caps: &Caps,
) -> Result<PolySpace, ClosureError> {
    check_alphabet(mp, constraint)?;
    check_eta_policy(mp, "zero", degree)?;
    let nfa = constraint.cloned().unwrap_or_else(|| universal(mp));
    counter_closure(mp, &nfa, CounterKind::Zero, degree, caps)
}

/// The deterministic reach automaton, intersected with the constraint.
pub fn reach_constraint(mp: &MorphismPair, constraint: Option<&Nfa<String>>, caps: &Caps) -> Result<Nfa<String>, ClosureError> {
    let reach = build_reach_automaton(mp, caps.max_states)?.determinize(caps.max_states)?;
    with_constraint(reach, constraint, caps)
}

/// Degree-`<= degree` vanishing space of `φ(L(A_reach) ∩ L_Z)`.
pub fn reach_closure(mp: &MorphismPair, degree: usize, caps: &Caps) -> Result<PolySpace, ClosureError> {
    reach_closure_constrained(mp, None, degree, caps)
}

/// As [`reach_closure`], intersected with a regular constraint. Zero-weight
/// words of the reach automaton are handled by the exact counter engine on
/// the automaton itself, which equals folding it into block matrices and
/// extracting.
pub fn reach_closure_constrained(
    mp: &MorphismPair,
    constraint: Option<&Nfa<String>>,
    degree: usize,
    caps: &Caps,
) -> Result<PolySpace, ClosureError> {
    check_alphabet(mp, constraint)?;
    check_eta_policy(mp, "reach", degree)?;
    let a = reach_constraint(mp, constraint, caps)?;
    counter_closure(mp, &a, CounterKind::Zero, degree, caps)
}

fn complete_dfa(nfa: &Nfa<String>, caps: &Caps) -> Result<Nfa<String>, ClosureError> {
    let dfa = nfa.determinize(caps.max_states)?;
    Ok(if dfa.is_complete() { dfa } else { dfa.complete()? })
}

fn check_lifted(dim: usize, degree: usize, caps: &Caps) -> Result<(), ClosureError> {
    let needed = monomial_count(dim * dim, degree);
    if needed > caps.max_veronese {
        return Err(ClosureError::Infeasible(format!(
            "block route needs a Veronese space of dimension {needed} for lifted dimension {dim}, above the cap {}",
            caps.max_veronese
        )));
    }
    Ok(())
}

/// Reach closure by the block route: fold the deterministic reach
/// automaton (and constraint) into the matrices, take the zero-weight
/// closure of the lifted morphism and extract.
pub fn reach_closure_blocks(
    mp: &MorphismPair,
    constraint: Option<&Nfa<String>>,
    degree: usize,
    caps: &Caps,
) -> Result<PolySpace, ClosureError> {
    check_alphabet(mp, constraint)?;
    check_eta_policy(mp, "reach", degree)?;
    let dfa = complete_dfa(&reach_constraint(mp, constraint, caps)?, caps)?;
    let bm = blockify_regular(mp, &dfa)?;
    check_lifted(bm.lifted_dim(), degree, caps)?;
    let lifted = bm.lifted_pair()?;
    let space = counter_closure(&lifted, &universal(&lifted), CounterKind::Zero, degree, caps)?;
    extract_block_closure(&space, &bm, degree, caps)
}

/// Cover closure by the block route: fold the constraint into the
/// matrices, take the stateless cover closure of the lifted morphism and
/// extract.
pub fn cover_closure_blocks(
    mp: &MorphismPair,
    constraint: Option<&Nfa<String>>,
    degree: usize,
    caps: &Caps,
) -> Result<PolySpace, ClosureError> {
    check_alphabet(mp, constraint)?;
    check_eta_policy(mp, "cover", degree)?;
    let dfa = complete_dfa(&constraint.cloned().unwrap_or_else(|| universal(mp)), caps)?;
    let bm = blockify_regular(mp, &dfa)?;
    check_lifted(bm.lifted_dim(), degree, caps)?;
    let lifted = bm.lifted_pair()?;
    let a = build_cover_automaton(&lifted, caps.max_states)?;
    let space = regular_closure(&a, lifted.phis(), degree, caps)?;
    extract_block_closure(&space, &bm, degree, caps)
}

/// Closure of the images of accepted VASS runs: cover acceptance needs a
/// nonnegative counter throughout, reach acceptance also ends at zero.
pub fn vass_closure(
    vass: &Vass,
    letters: &MorphismPair,
    reach: bool,
    route: Route,
    degree: usize,
    caps: &Caps,
) -> Result<PolySpace, ClosureError> {
    let (mp, paths) = vass_to_transitions(vass, letters)?;
    match (reach, route) {
        (false, Route::Direct) => cover_closure_constrained(&mp, Some(&paths), degree, caps),
        (false, Route::Blocks) => cover_closure_blocks(&mp, Some(&paths), degree, caps),
        (true, Route::Direct) => reach_closure_constrained(&mp, Some(&paths), degree, caps),
        (true, Route::Blocks) => reach_closure_blocks(&mp, Some(&paths), degree, caps),
    }
}
