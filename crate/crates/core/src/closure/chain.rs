//! A chain of finite matrix monoids that never stabilizes.
//!
//! With `α = diag(2, 1)` and `β = diag(1/2, 1)`, start from the monoid
//! generated by `0` and the nilpotent `E12`, and let `S_{i+1}` be the
//! monoid generated by `S_i` together with `α s β` for `s ∈ S_i`. Then
//! `S_i = {0, I} ∪ {2^j E12 : j <= i}`, so the chain grows forever.

use std::collections::BTreeSet;

use super::poly::PolySpace;
use super::{finite_vanishing_space, ClosureError};
use crate::exactlin::{ratio, Rational, RationalMatrix};

const MONOID_CAP: usize = 10_000;

/// The two conjugating matrices of the recurrence.
pub fn chain_conjugators() -> (RationalMatrix, RationalMatrix) {
    let alpha = diag(ratio(2, 1), ratio(1, 1));
    let beta = diag(ratio(1, 2), ratio(1, 1));
    (alpha, beta)
}

fn diag(a: Rational, b: Rational) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(2, 2);
    m.set(0, 0, a);
    m.set(1, 1, b);
    m
}

fn nilpotent(scale: Rational) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(2, 2);
    m.set(0, 1, scale);
    m
}

fn monoid(generators: impl IntoIterator<Item = RationalMatrix>) -> Result<BTreeSet<Vec<String>>, ClosureError> {
    let gens: Vec<RationalMatrix> = generators.into_iter().collect();
    let mut seen: Vec<RationalMatrix> = vec![RationalMatrix::identity(2)];
    let mut keys: BTreeSet<Vec<String>> = BTreeSet::from([key(&seen[0])]);
    let mut frontier = seen.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for m in &frontier {
            for g in &gens {
                let p = m.mul(g);
                if keys.insert(key(&p)) {
                    if keys.len() > MONOID_CAP {
                        return Err(ClosureError::Infeasible(format!("monoid exceeds {MONOID_CAP} elements")));
                    }
                    seen.push(p.clone());
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    Ok(keys)
}

fn key(m: &RationalMatrix) -> Vec<String> {
    m.to_strings().concat()
}

fn from_key(k: &[String]) -> RationalMatrix {
    let rows = vec![k[0..2].to_vec(), k[2..4].to_vec()];
    RationalMatrix::from_strings(&rows).expect("stored from a 2x2 matrix")
}

/// `S_0, ..., S_steps`, each as a sorted list of matrices.
pub fn chain_sets(steps: usize) -> Result<Vec<Vec<RationalMatrix>>, ClosureError> {
    let (alpha, beta) = chain_conjugators();
    let mut current = monoid([RationalMatrix::zeros(2, 2), nilpotent(ratio(1, 1))])?;
    let mut out = vec![current.iter().map(|k| from_key(k)).collect::<Vec<_>>()];
    for _ in 0..steps {
        let members: Vec<RationalMatrix> = current.iter().map(|k| from_key(k)).collect();
        let conjugated = members.iter().map(|s| alpha.mul(s).mul(&beta));
        current = monoid(members.iter().cloned().chain(conjugated).collect::<Vec<_>>())?;
        out.push(current.iter().map(|k| from_key(k)).collect());
    }
    Ok(out)
}

/// The closed form `{0, I} ∪ {2^j E12 : j <= i}`, sorted like [`chain_sets`].
pub fn chain_expected(i: usize) -> Vec<RationalMatrix> {
    let mut keys: BTreeSet<Vec<String>> =
        [RationalMatrix::zeros(2, 2), RationalMatrix::identity(2)].iter().map(key).collect();
    for j in 0..=i {
        keys.insert(key(&nilpotent(Rational::from_integer(num_bigint::BigInt::from(1u8) << j))));
    }
    keys.iter().map(|k| from_key(k)).collect()
}

/// Vanishing spaces of the chain members at one degree.
pub fn chain_vanishing_spaces(sets: &[Vec<RationalMatrix>], degree: usize) -> Result<Vec<PolySpace>, ClosureError> {
    sets.iter().map(|s| finite_vanishing_space(2, s, degree)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sets_match_closed_form() {
        let sets = chain_sets(6).unwrap();
        for (i, s) in sets.iter().enumerate() {
            assert_eq!(s, &chain_expected(i), "S_{i}");
            assert_eq!(s.len(), i + 3);
        }
    }

    #[test]
    fn vanishing_spaces_shrink_only_at_high_degree() {
        let sets = chain_sets(6).unwrap();
        let linear = chain_vanishing_spaces(&sets, 1).unwrap();
        assert!(linear.windows(2).all(|w| w[0] == w[1]));
        let high = chain_vanishing_spaces(&sets, 8).unwrap();
        for w in high.windows(2) {
            assert!(w[1].is_subspace_of(&w[0]) && w[1].len() < w[0].len());
        }
    }
}
