//! Folding a deterministic automaton into the matrix morphism as block
//! matrices, extracting the constrained closure back out of the block
//! closure, and turning a 1-VASS into a transition alphabet with a path
//! automaton.

use std::collections::HashMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::automata::Nfa;
use crate::closure::poly::{MonomialBasis, PolySpace};
use crate::closure::{Caps, ClosureError};
use crate::exactlin::{dot, Rational, RationalMatrix, Subspace};
use crate::lang::{LangError, MorphismPair, Vass};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Lang(#[from] LangError),
}

impl From<ReduceError> for ClosureError {
    fn from(e: ReduceError) -> Self {
        ClosureError::Argument(e.to_string())
    }
}

/// A morphism with a complete deterministic automaton folded in: letter
/// `σ` maps to a `k(d+1)` square matrix whose block `(i, j)` is
/// `[[φ(σ), 0], [0, 1]]` when `δ(i, σ) = j` and zero otherwise.
#[derive(Clone, Debug)]
pub struct BlockMorphism {
    base: MorphismPair,
    dfa: Nfa<String>,
    lifted: Vec<RationalMatrix>,
}

impl BlockMorphism {
    pub fn base(&self) -> &MorphismPair {
        &self.base
    }

    pub fn dfa(&self) -> &Nfa<String> {
        &self.dfa
    }

    pub fn lifted(&self) -> &[RationalMatrix] {
        &self.lifted
    }

    pub fn block_size(&self) -> usize {
        self.base.dim() + 1
    }

    pub fn lifted_dim(&self) -> usize {
        self.dfa.num_states() * self.block_size()
    }

    /// The lifted letters with the original weights and threshold.
    pub fn lifted_pair(&self) -> Result<MorphismPair, ReduceError> {
        let mp = MorphismPair::new(
            self.base.alphabet().to_vec(),
            self.lifted.clone(),
            self.base.omegas().iter().map(|&w| i64::from(w)).collect(),
        )?;
        Ok(if self.base.eta_overridden() { mp.with_eta(self.base.eta())? } else { mp })
    }

    /// Block `(i, j)` of a lifted matrix.
    pub fn block(&self, m: &RationalMatrix, i: usize, j: usize) -> RationalMatrix {
        let b = self.block_size();
        let rows = (0..b).map(|r| (0..b).map(|c| m.get(i * b + r, j * b + c).clone()).collect()).collect();
        RationalMatrix::from_rows(rows).expect("square block")
    }
}

/// Folds a complete deterministic automaton over the morphism's alphabet
/// into the letter matrices.
pub fn blockify_regular(mp: &MorphismPair, dfa: &Nfa<String>) -> Result<BlockMorphism, ReduceError> {
    if dfa.alphabet() != mp.alphabet() {
        return Err(ReduceError::Argument("automaton alphabet differs from the morphism alphabet".into()));
    }
    if !dfa.is_deterministic() {
        return Err(ReduceError::Argument("automaton is not deterministic; determinize first".into()));
    }
    if !dfa.is_complete() {
        return Err(ReduceError::Argument("automaton is not complete; complete it first".into()));
    }
    let d = mp.dim();
    let b = d + 1;
    let k = dfa.num_states();
    let lifted = (0..mp.len())
        .map(|a| {
            let mut m = RationalMatrix::zeros(k * b, k * b);
            for i in 0..k {
                for j in dfa.successors(i, a) {
                    for r in 0..d {
                        for c in 0..d {
                            m.set(i * b + r, j * b + c, mp.phi(a).get(r, c).clone());
                        }
                    }
                    m.set(i * b + d, j * b + d, Rational::one());
                }
            }
            m
        })
        .collect();
    Ok(BlockMorphism { base: mp.clone(), dfa: dfa.clone(), lifted })
}

type Poly = HashMap<usize, Rational>;

fn times_linear(basis: &MonomialBasis, p: &Poly, form: &[usize]) -> Poly {
    let mut out = Poly::new();
    for (m, c) in p {
        for &v in form {
            let t = basis.times_var(*m, v).expect("within degree");
            *out.entry(t).or_insert_with(Rational::zero) += c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Degree-`<= degree` vanishing space of `φ(L(dfa) ∩ L_*)` from the
/// vanishing space of `φ'(L_*)`, where `φ'` is the block morphism.
///
/// A base polynomial `p = Σ c_α x^α` is pulled back to the homogeneous
/// `Σ c_α ι^{D-|α|} T^α`, with `T` the sum of the top-left parts of the
/// initial-row blocks at accepting columns and `ι` the sum of their
/// corner entries. On every lifted image `ι` is 1 or 0, and `T` is `φ(w)`
/// or 0 accordingly, so `p` vanishes on the constrained image exactly when
/// its pullback lies in the lifted vanishing space.
pub fn extract_block_closure(
    space: &PolySpace,
    bm: &BlockMorphism,
    degree: usize,
    caps: &Caps,
) -> Result<PolySpace, ClosureError> {
    if space.degree() != degree {
        return Err(ClosureError::Argument(format!(
            "space has degree {} but extraction was asked for degree {degree}",
            space.degree()
        )));
    }
    if space.dim() != bm.lifted_dim() {
        return Err(ClosureError::Argument("space is not over the lifted dimension".into()));
    }
    let d = bm.base.dim();
    let b = bm.block_size();
    let big_d = bm.lifted_dim();
    let lifted_basis = MonomialBasis::new(big_d, degree, caps.max_veronese)?;
    let base_basis = MonomialBasis::new(d, degree, caps.max_veronese)?;
    let row0 = bm.dfa.initial()[0] * b;
    let accepting = bm.dfa.accepting_states();
    let var = |r: usize, c: usize| r * big_d + c;
    let t_forms: Vec<Vec<usize>> = (0..d * d)
        .map(|v| {
            let (i, j) = (v / d, v % d);
            accepting.iter().map(|&f| var(row0 + i, f * b + j)).collect()
        })
        .collect();
    let iota_form: Vec<usize> = accepting.iter().map(|&f| var(row0 + d, f * b + d)).collect();

    // Pullbacks of every base monomial, built by ascending degree.
    let mut pulled: Vec<Option<Poly>> = vec![None; base_basis.len()];
    let mut order: Vec<usize> = (0..base_basis.len()).collect();
    order.sort_by_key(|&i| base_basis.degree_of(i));
    let one = Poly::from([(lifted_basis.constant(), Rational::one())]);
    for &m in &order {
        pulled[m] = Some(match base_basis.split(m) {
            None => one.clone(),
            Some((parent, v)) => times_linear(&lifted_basis, pulled[parent].as_ref().expect("parents first"), &t_forms[v]),
        });
    }
    let homogenized: Vec<Vec<Rational>> = (0..base_basis.len())
        .map(|m| {
            let mut p = pulled[m].clone().expect("filled");
            for _ in base_basis.degree_of(m)..degree {
                p = times_linear(&lifted_basis, &p, &iota_form);
            }
            let mut dense = vec![Rational::zero(); lifted_basis.len()];
            for (i, c) in p {
                dense[i] = c;
            }
            dense
        })
        .collect();
    let evaluations = space.space().orthogonal_complement();
    let rows = evaluations.basis().iter().map(|s| homogenized.iter().map(|h| dot(h, s)).collect::<Vec<_>>());
    let constraints = Subspace::span(base_basis.len(), rows);
    Ok(PolySpace::new(d, degree, constraints.orthogonal_complement()))
}

/// The transition alphabet of a 1-VASS: one letter per transition, carrying
/// the matrix of its label and its counter update, plus the automaton of
/// valid paths.
pub fn vass_to_transitions(vass: &Vass, letters: &MorphismPair) -> Result<(MorphismPair, Nfa<String>), ReduceError> {
    let state = |name: &str| {
        vass.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| ReduceError::Argument(format!("unknown VASS state {name:?}")))
    };
    if vass.transitions.is_empty() {
        return Err(ReduceError::Argument("VASS has no transitions".into()));
    }
    let mut names = Vec::new();
    let mut phis = Vec::new();
    let mut weights = Vec::new();
    let mut edges = Vec::new();
    for (i, (from, label, weight, to)) in vass.transitions.iter().enumerate() {
        let a = letters
            .letter_index(label)
            .ok_or_else(|| ReduceError::Argument(format!("transition {i} uses unknown letter {label:?}")))?;
        if !(-1..=1).contains(weight) {
            return Err(ReduceError::Lang(LangError::WeightOutOfRange { letter: label.clone(), weight: *weight }));
        }
        names.push(format!("t{i}:{label}"));
        phis.push(letters.phi(a).clone());
        weights.push(*weight);
        edges.push((state(from)?, i, state(to)?));
    }
    let mut mp = MorphismPair::new(names.clone(), phis, weights)?;
    if letters.eta_overridden() {
        mp = mp.with_eta(letters.eta())?;
    }
    let initial = vass.initial.iter().map(|s| state(s)).collect::<Result<Vec<_>, _>>()?;
    let accepting = vass.accepting.iter().map(|s| state(s)).collect::<Result<Vec<_>, _>>()?;
    let nfa = Nfa::new(vass.states.clone(), names, initial, accepting, edges)
        .map_err(|e| ReduceError::Argument(e.to_string()))?;
    Ok((mp, nfa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::engine::regular_closure;
    use crate::closure::poly::finite_vanishing_space;

    fn parity_dfa(alphabet: &[String]) -> Nfa<String> {
        let n = alphabet.len();
        Nfa::new(
            vec!["even".into(), "odd".into()],
            alphabet.to_vec(),
            [0],
            [0],
            (0..n).flat_map(|a| [(0, a, 1), (1, a, 0)]),
        )
        .unwrap()
    }

    fn pair() -> MorphismPair {
        MorphismPair::from_i64(&[("a", &[&[2, 0], &[0, 4]], 1), ("b", &[&[1, 0], &[1, 1]], -1)]).unwrap()
    }

    #[test]
    fn block_dimensions() {
        let mp = pair();
        let one = Nfa::new(vec!["q".into()], mp.alphabet().to_vec(), [0], [0], [(0, 0, 0), (0, 1, 0)]).unwrap();
        assert_eq!(blockify_regular(&mp, &one).unwrap().lifted_dim(), 3);
        let bm = blockify_regular(&mp, &parity_dfa(mp.alphabet())).unwrap();
        assert_eq!(bm.lifted_dim(), 6);
        let partial = Nfa::new(vec!["q".into()], mp.alphabet().to_vec(), [0], [0], [(0, 0, 0)]).unwrap();
        assert!(blockify_regular(&mp, &partial).is_err());
    }

    #[test]
    fn single_nonzero_block_in_first_row() {
        let mp = pair();
        let dfa = parity_dfa(mp.alphabet());
        let bm = blockify_regular(&mp, &dfa).unwrap();
        for w in [vec![], vec![0], vec![0, 1], vec![1, 1, 0], vec![0, 0, 1, 0, 1]] {
            let m = RationalMatrix::product(w.iter().map(|&a| &bm.lifted()[a]), bm.lifted_dim());
            let target = w.len() % 2;
            for j in 0..2 {
                let block = bm.block(&m, 0, j);
                if j == target {
                    let mut expected = RationalMatrix::zeros(3, 3);
                    let phi = mp.phi_word(&w);
                    for r in 0..2 {
                        for c in 0..2 {
                            expected.set(r, c, phi.get(r, c).clone());
                        }
                    }
                    expected.set(2, 2, Rational::one());
                    assert_eq!(block, expected);
                } else {
                    assert!(block.is_zero());
                }
            }
        }
    }

    #[test]
    fn extraction_matches_constrained_closure() {
        // Even-length words over {a, b}: closure computed directly and via blocks.
        let mp = pair();
        let dfa = parity_dfa(mp.alphabet());
        let bm = blockify_regular(&mp, &dfa).unwrap();
        let caps = Caps::default();
        let everything =
            Nfa::new(vec!["q".into()], mp.alphabet().to_vec(), [0], [0], [(0, 0, 0), (0, 1, 0)]).unwrap();
        let lifted_space = regular_closure(&everything, bm.lifted(), 1, &caps).unwrap();
        let extracted = extract_block_closure(&lifted_space, &bm, 1, &caps).unwrap();
        let direct = regular_closure(&dfa, mp.phis(), 1, &caps).unwrap();
        assert_eq!(extracted, direct);
        assert!(extract_block_closure(&lifted_space, &bm, 2, &caps).is_err());
    }

    #[test]
    fn extraction_of_full_space_is_full() {
        let mp = pair();
        let bm = blockify_regular(&mp, &parity_dfa(mp.alphabet())).unwrap();
        let full = PolySpace::full(6, 1);
        assert_eq!(extract_block_closure(&full, &bm, 1, &Caps::default()).unwrap(), PolySpace::full(2, 1));
    }

    #[test]
    fn finite_language_round_trip() {
        // A dead-end sink makes the constrained language {ε, a, ab}.
        let mp = pair();
        let dfa = Nfa::new(
            vec!["s".into(), "t".into(), "u".into(), "dead".into()],
            mp.alphabet().to_vec(),
            [0],
            [0, 1, 2],
            [(0, 0, 1), (0, 1, 3), (1, 1, 2), (1, 0, 3), (2, 0, 3), (2, 1, 3), (3, 0, 3), (3, 1, 3)],
        )
        .unwrap();
        let bm = blockify_regular(&mp, &dfa).unwrap();
        let caps = Caps::default();
        let everything =
            Nfa::new(vec!["q".into()], mp.alphabet().to_vec(), [0], [0], [(0, 0, 0), (0, 1, 0)]).unwrap();
        let lifted = regular_closure(&everything, bm.lifted(), 1, &caps).unwrap();
        let extracted = extract_block_closure(&lifted, &bm, 1, &caps).unwrap();
        let points: Vec<RationalMatrix> = [vec![], vec![0], vec![0, 1]].iter().map(|w| mp.phi_word(w)).collect();
        assert_eq!(extracted, finite_vanishing_space(2, &points, 1).unwrap());
    }

    #[test]
    fn vass_conversion() {
        let mp = pair();
        let vass = Vass {
            states: vec!["s".into(), "t".into()],
            initial: vec!["s".into()],
            accepting: vec!["t".into()],
            transitions: vec![
                ("s".into(), "a".into(), 1, "s".into()),
                ("s".into(), "b".into(), -1, "t".into()),
                ("t".into(), "b".into(), -1, "s".into()),
            ],
        };
        let (tmp, nfa) = vass_to_transitions(&vass, &mp).unwrap();
        assert_eq!(tmp.len(), 3);
        assert_eq!(tmp.omegas(), &[1, -1, -1]);
        assert!(nfa.is_deterministic());
        assert!(nfa.accepts(&[0, 1]));
        assert!(!nfa.accepts(&[0, 1, 2]));
        let mut bad = vass.clone();
        bad.transitions[0].2 = 2;
        assert!(vass_to_transitions(&bad, &mp).is_err());
    }
}
