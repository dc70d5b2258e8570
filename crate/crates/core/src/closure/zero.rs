//! The literal zero-closure construction: the bounded-zero part plus the
//! flattened image of the four-track automaton.
//!
//! For a four-track word with component products `A, B, C, D`, a
//! polynomial `p` of degree `<= D` satisfies `p(ABCD) = Σ_e p_e(ABCD)` with
//! `p_e` homogeneous of degree `e`, and `p_e(ABCD)` is linear in
//! `ν_e(A) ⊗ ν_e(B) ⊗ ν_e(C) ⊗ ν_e(D)`. So the fixpoint runs over
//! `⊕_{e <= D} H_e^{⊗4}` with `H_e` the degree-`e` Veronese block, and the
//! readout contracts each accepting tensor back to `ν(ABCD)` using the
//! bilinear product table.

use super::engine::{regular_span, span_fixpoint};
use super::poly::{MonomialBasis, PolySpace};
use super::veronese::{right_map, ProductTable};
use super::{Caps, ClosureError};
use crate::automata::{build_bz_automaton, build_zero_automaton};
use crate::exactlin::{Rational, RationalMatrix, SpanBuilder, Subspace};
use crate::lang::MorphismPair;

use num_traits::Zero;

type LocalMap = Vec<Vec<(usize, Rational)>>;

/// Degree-`e` layout of the tensor space.
struct Layout {
    /// Global basis indices of each degree block.
    blocks: Vec<Vec<usize>>,
    /// Offset of each block's tensor in the concatenated vector.
    offsets: Vec<usize>,
    total: usize,
}

impl Layout {
    fn new(basis: &MonomialBasis, cap: usize) -> Result<Self, ClosureError> {
        let mut blocks = Vec::new();
        let mut offsets = Vec::new();
        let mut total: usize = 0;
        for e in 0..=basis.degree() {
            let idx = basis.of_degree(e);
            let size = idx.len().checked_pow(4).unwrap_or(usize::MAX);
            offsets.push(total);
            total = total.saturating_add(size);
            blocks.push(idx);
        }
        if total > cap {
            return Err(ClosureError::Infeasible(format!(
                "four-track tensor space has dimension {total}, above the Veronese cap {cap}"
            )));
        }
        Ok(Self { blocks, offsets, total })
    }
}

/// Applies `map` along tensor mode `mode` of an `h^4` block.
fn apply_mode(block: &[Rational], h: usize, mode: usize, map: &LocalMap) -> Vec<Rational> {
    let inner = h.pow(3 - mode as u32);
    let outer = h.pow(mode as u32);
    let mut out = vec![Rational::zero(); block.len()];
    for o in 0..outer {
        for (i, row) in map.iter().enumerate() {
            for (j, c) in row {
                let src = (o * h + j) * inner;
                let dst = (o * h + i) * inner;
                for k in 0..inner {
                    if !block[src + k].is_zero() {
                        out[dst + k] += c * &block[src + k];
                    }
                }
            }
        }
    }
    out
}

/// Span of the Veronese vectors of `φ(flat(w))` over accepted four-track words.
pub fn zero_flat_span(mp: &MorphismPair, basis: &MonomialBasis, caps: &Caps) -> Result<Subspace, ClosureError> {
    let layout = Layout::new(basis, caps.max_veronese)?;
    let automaton = build_zero_automaton(mp, caps.max_states)?.trim();
    let table = ProductTable::new(basis);
    let local: Vec<Vec<usize>> = layout
        .blocks
        .iter()
        .map(|idx| {
            let mut pos = vec![usize::MAX; basis.len()];
            for (p, &g) in idx.iter().enumerate() {
                pos[g] = p;
            }
            pos
        })
        .collect();
    // maps[σ][e]: the degree-e block of right multiplication by φ(σ).
    let maps: Vec<Vec<LocalMap>> = mp
        .phis()
        .iter()
        .map(|m| {
            let full = right_map(basis, m);
            layout
                .blocks
                .iter()
                .enumerate()
                .map(|(e, idx)| {
                    idx.iter()
                        .map(|&g| full.rows()[g].iter().map(|(j, c)| (local[e][*j], c.clone())).collect())
                        .collect()
                })
                .collect()
        })
        .collect();

    let identity = basis.embed(&RationalMatrix::identity(basis.dim()));
    let mut seed = vec![Rational::zero(); layout.total];
    for (e, idx) in layout.blocks.iter().enumerate() {
        let v: Vec<&Rational> = idx.iter().map(|&g| &identity[g]).collect();
        let h = v.len();
        for a in 0..h {
            for b in 0..h {
                for c in 0..h {
                    for d in 0..h {
                        let x = v[a] * v[b] * v[c] * v[d];
                        if !x.is_zero() {
                            seed[layout.offsets[e] + ((a * h + b) * h + c) * h + d] = x;
                        }
                    }
                }
            }
        }
    }

    let letters = automaton.alphabet().to_vec();
    let action = |letter: usize, v: &[Rational]| {
        let g = letters[letter];
        let mut out = Vec::with_capacity(v.len());
        for (e, idx) in layout.blocks.iter().enumerate() {
            let h = idx.len();
            let start = layout.offsets[e];
            let mut block = v[start..start + h.pow(4)].to_vec();
            for (mode, slot) in g.0.iter().enumerate() {
                if let Some(a) = slot {
                    block = apply_mode(&block, h, mode, &maps[*a][e]);
                }
            }
            out.extend(block);
        }
        out
    };
    let spans = span_fixpoint(&automaton, layout.total, &seed, action);

    let mut result = SpanBuilder::new(basis.len());
    for q in automaton.accepting_states() {
        for t in spans[q].basis() {
            result.insert(contract(t, &layout, &local, &table, basis.len()));
        }
    }
    Ok(result.to_subspace())
}

/// `ν(ABCD)` from `ν(A) ⊗ ν(B) ⊗ ν(C) ⊗ ν(D)`, block by block.
fn contract(t: &[Rational], layout: &Layout, local: &[Vec<usize>], table: &ProductTable, len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (e, idx) in layout.blocks.iter().enumerate() {
        let h = idx.len();
        let block = &t[layout.offsets[e]..layout.offsets[e] + h.pow(4)];
        if block.iter().all(Zero::is_zero) {
            continue;
        }
        let pos = &local[e];
        // (c, d) -> ν(CD)
        let mut t1 = vec![Rational::zero(); h * h * h];
        for ab in 0..h * h {
            for (gl, &g) in idx.iter().enumerate() {
                let mut acc = Rational::zero();
                for (c, d, k) in table.triples(g) {
                    let x = &block[(ab * h + pos[*c]) * h + pos[*d]];
                    if !x.is_zero() {
                        acc += k * x;
                    }
                }
                t1[ab * h + gl] = acc;
            }
        }
        // (a, b) -> ν(AB)
        let mut t2 = vec![Rational::zero(); h * h];
        for (bl, &b) in idx.iter().enumerate() {
            for gl in 0..h {
                let mut acc = Rational::zero();
                for (a, bb, k) in table.triples(b) {
                    let x = &t1[(pos[*a] * h + pos[*bb]) * h + gl];
                    if !x.is_zero() {
                        acc += k * x;
                    }
                }
                t2[bl * h + gl] = acc;
            }
        }
        // (AB, CD) -> ν(ABCD)
        for &m in idx {
            let mut acc = Rational::zero();
            for (b, g, k) in table.triples(m) {
                let x = &t2[pos[*b] * h + pos[*g]];
                if !x.is_zero() {
                    acc += k * x;
                }
            }
            out[m] = acc;
        }
    }
    out
}

/// Vanishing space of `φ(L_BZ) ∪ φ(flat(L(A)))` at degree `<= degree`,
/// computed by the literal construction at the morphism's threshold.
pub fn zero_closure_literal(mp: &MorphismPair, degree: usize, caps: &Caps) -> Result<PolySpace, ClosureError> {
    let basis = MonomialBasis::new(mp.dim(), degree, caps.max_veronese)?;
    let bz = build_bz_automaton(mp, caps.max_states)?;
    let bounded = regular_span(&bz, mp.phis(), &basis);
    let flat = zero_flat_span(mp, &basis, caps)?;
    Ok(PolySpace::from_evaluations(mp.dim(), degree, &bounded.sum(&flat)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::flatten;
    use crate::exactlin::ratio;

    fn halves() -> MorphismPair {
        MorphismPair::new(
            vec!["a".into(), "b".into()],
            vec![RationalMatrix::scalar(ratio(2, 1)), RationalMatrix::scalar(ratio(1, 2))],
            vec![1, -1],
        )
        .unwrap()
    }

    #[test]
    fn contraction_matches_product() {
        let basis = MonomialBasis::new(2, 2, usize::MAX).unwrap();
        let layout = Layout::new(&basis, usize::MAX).unwrap();
        let table = ProductTable::new(&basis);
        let local: Vec<Vec<usize>> = layout
            .blocks
            .iter()
            .map(|idx| {
                let mut pos = vec![usize::MAX; basis.len()];
                for (p, &g) in idx.iter().enumerate() {
                    pos[g] = p;
                }
                pos
            })
            .collect();
        let ms = [
            RationalMatrix::from_i64(&[&[1, 2], &[0, 1]]),
            RationalMatrix::from_i64(&[&[0, 1], &[1, 3]]),
            RationalMatrix::from_i64(&[&[2, 0], &[-1, 1]]),
            RationalMatrix::from_i64(&[&[1, 1], &[1, 0]]),
        ];
        let vs: Vec<Vec<Rational>> = ms.iter().map(|m| basis.embed(m)).collect();
        let mut t = vec![Rational::zero(); layout.total];
        for (e, idx) in layout.blocks.iter().enumerate() {
            let h = idx.len();
            for a in 0..h {
                for b in 0..h {
                    for c in 0..h {
                        for d in 0..h {
                            t[layout.offsets[e] + ((a * h + b) * h + c) * h + d] =
                                &vs[0][idx[a]] * &vs[1][idx[b]] * &vs[2][idx[c]] * &vs[3][idx[d]];
                        }
                    }
                }
            }
        }
        let product = ms[0].mul(&ms[1]).mul(&ms[2]).mul(&ms[3]);
        assert_eq!(contract(&t, &layout, &local, &table, basis.len()), basis.embed(&product));
    }

    #[test]
    fn flat_span_contains_accepted_flat_words() {
        let mp = MorphismPair::from_i64(&[("a", &[&[1, 1], &[0, 1]], 1), ("b", &[&[1, 0], &[1, 1]], -1)])
            .unwrap()
            .with_eta(1)
            .unwrap();
        let basis = MonomialBasis::new(2, 1, usize::MAX).unwrap();
        let span = zero_flat_span(&mp, &basis, &Caps::default()).unwrap();
        let automaton = build_zero_automaton(&mp, 100).unwrap();
        let letters = automaton.alphabet().to_vec();
        let find = |g: [Option<usize>; 4]| letters.iter().position(|l| l.0 == g).unwrap();
        let words = [
            vec![find([Some(0), Some(1), None, None])],
            vec![find([Some(0), None, None, None]), find([None, None, Some(1), None])],
            vec![find([None, Some(0), Some(0), None]), find([Some(1), None, None, Some(1)])],
            vec![find([None, None, None, Some(1)]), find([Some(0), Some(0), None, None]), find([None, None, Some(1), None])],
        ];
        for w in words {
            assert!(automaton.accepts(&w));
            let (_, flat) = flatten(&w.iter().map(|&i| letters[i]).collect::<Vec<_>>());
            assert!(span.contains(&basis.embed(&mp.phi_word(&flat))), "{flat:?}");
        }
    }

    #[test]
    fn scalar_halves_at_default_threshold() {
        let got = zero_closure_literal(&halves(), 1, &Caps::default()).unwrap();
        assert_eq!(got.generators(), vec!["x11 - 1"]);
    }

    #[test]
    fn weightless_letters_give_free_closure() {
        let mp = MorphismPair::new(vec!["s".into()], vec![RationalMatrix::scalar(ratio(3, 1))], vec![0]).unwrap();
        assert!(zero_closure_literal(&mp, 2, &Caps::default()).unwrap().is_empty());
    }

    #[test]
    fn tensor_cap_is_reported() {
        let mp = MorphismPair::from_i64(&[("a", &[&[1, 1], &[0, 1]], 1), ("b", &[&[1, 0], &[1, 1]], -1)])
            .unwrap()
            .with_eta(2)
            .unwrap();
        let err = zero_closure_literal(&mp, 2, &Caps::default()).unwrap_err();
        assert!(matches!(err, ClosureError::Infeasible(_)));
    }
}
