use closure_core::automata::{
    build_cover_automaton, build_zero_automaton, construct_zero_witness, flatten, GammaLetter, DEFAULT_MAX_STATES,
};
use closure_core::exactlin::is_stable;
use closure_core::lang::{classify_word, enumerate_words, Language, MorphismPair};
use closure_core::Nfa;
use proptest::prelude::*;
use rand::Rng;

mod common;

fn letters(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// Accepted words of length at most `max_len`, found by walking the automaton.
fn accepted_words<L: Clone + Eq>(nfa: &Nfa<L>, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut frontier: Vec<(Vec<usize>, Vec<usize>)> = vec![(Vec::new(), nfa.initial().to_vec())];
    for len in 0..=max_len {
        let mut next = Vec::new();
        for (word, states) in frontier {
            if states.iter().any(|&q| nfa.is_accepting(q)) {
                out.push(word.clone());
            }
            if len == max_len {
                continue;
            }
            for a in 0..nfa.alphabet().len() {
                let mut succ: Vec<usize> = states.iter().flat_map(|&q| nfa.successors(q, a)).collect();
                succ.sort_unstable();
                succ.dedup();
                if !succ.is_empty() {
                    let mut w = word.clone();
                    w.push(a);
                    next.push((w, succ));
                }
            }
        }
        frontier = next;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn determinization_preserves_acceptance(seed in any::<u64>(), states in 1usize..=8, k in 1usize..=3) {
        let mut rng = common::rng(seed);
        let nfa = common::random_nfa(&mut rng, &letters(k), states, 0.25);
        let dfa = nfa.determinize(1 << 16).unwrap();
        prop_assert!(dfa.is_deterministic());
        for _ in 0..1000 {
            let len = rng.gen_range(0..=12);
            let w = common::random_word(&mut rng, k, len);
            prop_assert_eq!(nfa.accepts(&w), dfa.accepts(&w));
        }
    }

    #[test]
    fn cover_automaton_escapes_through_stable_positive_factors(seed in any::<u64>(), d in 1usize..=2, eta in 1u64..=3) {
        let mut rng = common::rng(seed);
        let mp = common::random_morphism(&mut rng, d, 2, -1, 1).with_eta(eta).unwrap();
        let cover = build_cover_automaton(&mp, DEFAULT_MAX_STATES).unwrap();
        for w in enumerate_words(&mp, Language::All, 10, 1 << 20).unwrap() {
            if !cover.accepts(&w) || classify_word(&w, &mp).unwrap().in_lc {
                continue;
            }
            prop_assert!(has_escape_factorization(&w, &mp), "no factorization for {:?}", w);
        }
    }

    #[test]
    fn zero_witnesses_for_scalar_morphisms(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let phis = (0..3).map(|_| common::random_matrix(&mut rng, 1, -2, 2)).collect();
        let mp = MorphismPair::new(letters(3), phis, vec![1, -1, 0]).unwrap().with_eta(1).unwrap();
        let zero = build_zero_automaton(&mp, DEFAULT_MAX_STATES).unwrap();
        let pos = |g: &GammaLetter| zero.alphabet().iter().position(|h| h == g).unwrap();
        for w in enumerate_words(&mp, Language::Zero, 8, 1 << 20).unwrap() {
            if classify_word(&w, &mp).unwrap().in_lbz {
                continue;
            }
            let wit = construct_zero_witness(&w, &mp).unwrap();
            let mut gamma = wit.w_word.clone();
            for k in 0..=2 {
                let idx: Vec<usize> = gamma.iter().map(pos).collect();
                prop_assert!(zero.accepts(&idx));
                prop_assert_eq!(flatten(&gamma).1, wit.expected_flat(k));
                gamma.extend(wit.u_word.iter().copied());
            }
            prop_assert!(mp.weight(&wit.u) * mp.weight(&wit.v) < 0);
            let parts = [&wit.x1, &wit.u, &wit.x2, &wit.w1, &wit.y2, &wit.v, &wit.y1, &wit.w2];
            prop_assert_eq!(parts.into_iter().flatten().copied().collect::<Vec<_>>(), w);
            prop_assert!(is_stable(&mp.phi_word(&wit.u)).unwrap() && is_stable(&mp.phi_word(&wit.v)).unwrap());
        }
    }
}

/// `w = w1 u w2` with `φ(u)` stable, `ω(u) > 0` and every prefix of `w1 u`
/// of nonnegative weight.
fn has_escape_factorization(w: &[usize], mp: &MorphismPair) -> bool {
    let mut prefix = vec![0i64];
    for &a in w {
        prefix.push(prefix[prefix.len() - 1] + i64::from(mp.omega(a)));
    }
    (0..w.len()).any(|i| {
        (i + 1..=w.len()).any(|j| {
            prefix[..=j].iter().all(|&p| p >= 0)
                && prefix[j] - prefix[i] > 0
                && is_stable(&mp.phi_word(&w[i..j])).unwrap()
        })
    })
}

#[test]
fn zero_automaton_flattens_into_zero_weight_words() {
    for (seed, eta) in [(1u64, 1u64), (2, 2), (3, 1)] {
        let mut rng = common::rng(seed);
        let mp = MorphismPair::new(letters(2), vec![common::random_matrix(&mut rng, 1, -2, 2), common::random_matrix(&mut rng, 1, -2, 2)], vec![1, -1])
            .unwrap()
            .with_eta(eta)
            .unwrap();
        let zero = build_zero_automaton(&mp, DEFAULT_MAX_STATES).unwrap();
        let words = accepted_words(&zero, 3);
        assert!(words.len() > 1);
        for idx in words {
            let gamma: Vec<GammaLetter> = idx.iter().map(|&i| zero.alphabet()[i]).collect();
            let flat = flatten(&gamma).1;
            assert!(classify_word(&flat, &mp).unwrap().in_lz, "{gamma:?}");
        }
    }
}

#[test]
fn zero_automaton_length_four_samples() {
    let mp = MorphismPair::from_i64(&[("a", &[&[2]], 1), ("b", &[&[1]], -1)]).unwrap().with_eta(1).unwrap();
    let zero = build_zero_automaton(&mp, DEFAULT_MAX_STATES).unwrap();
    let words = accepted_words(&zero, 4);
    assert!(words.iter().any(|w| w.len() == 4));
    for idx in words {
        let gamma: Vec<GammaLetter> = idx.iter().map(|&i| zero.alphabet()[i]).collect();
        assert!(classify_word(&flatten(&gamma).1, &mp).unwrap().in_lz);
    }
}
