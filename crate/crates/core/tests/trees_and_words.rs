use closure_core::exactlin::{rank_decomp, rat, RationalMatrix};
use closure_core::facttree::{build_rank_tree, build_tree, extract_stable_factor, validate_tree, FactTree};
use closure_core::lang::{classify_word, enumerate_words, theta, Language, MorphismPair};
use proptest::prelude::*;

mod common;

fn matrix_sequence() -> impl Strategy<Value = Vec<RationalMatrix>> {
    (1usize..=3).prop_flat_map(|d| {
        prop::collection::vec(
            prop::collection::vec(-2i64..=2, d * d)
                .prop_map(move |es| RationalMatrix::new(d, d, es.into_iter().map(rat).collect()).unwrap()),
            1..=50,
        )
    })
}

fn product(ms: &[RationalMatrix]) -> RationalMatrix {
    RationalMatrix::product(ms, ms[0].rows())
}

fn leaf_positions(t: &FactTree) -> Vec<usize> {
    t.preorder().into_iter().filter(|n| n.is_leaf()).map(|n| n.span.0).collect()
}

fn unit_morphism(seed: u64, d: usize) -> MorphismPair {
    let mut rng = common::rng(seed);
    let phis = vec![common::random_matrix(&mut rng, d, -1, 1), common::random_matrix(&mut rng, d, -1, 1), common::random_matrix(&mut rng, d, -1, 1)];
    MorphismPair::new(vec!["a".into(), "b".into(), "c".into()], phis, vec![1, -1, 0]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trees_are_valid_and_height_bounded(ms in matrix_sequence()) {
        let d = ms[0].rows();
        let t = build_tree(&ms).unwrap();
        prop_assert!(validate_tree(&t, &ms));
        prop_assert!(t.height() <= theta(d));
        prop_assert_eq!(&t.label, &product(&ms));
    }

    #[test]
    fn tree_yield_reproduces_the_sequence(ms in matrix_sequence()) {
        let t = build_tree(&ms).unwrap();
        let labels: Vec<RationalMatrix> = t.yield_labels().into_iter().cloned().collect();
        prop_assert_eq!(labels, ms.clone());
        prop_assert_eq!(leaf_positions(&t), (0..ms.len()).collect::<Vec<_>>());
    }

    #[test]
    fn rank_trees_are_shallow(seed in any::<u64>(), d in 1usize..=3, len in 1usize..=30) {
        let mut rng = common::rng(seed);
        let r = (seed % (d as u64 + 1)) as usize;
        let ms = common::rank_sequence(&mut rng, d, r, len);
        let t = build_rank_tree(&ms).unwrap();
        prop_assert!(validate_tree(&t, &ms));
        prop_assert!(t.height() <= d + 2);
    }

    #[test]
    fn consecutive_segments_compose_without_rank_loss(seed in any::<u64>(), d in 2usize..=3, len in 2usize..=12) {
        let mut rng = common::rng(seed);
        let ms = common::rank_sequence(&mut rng, d, 1 + (seed % (d as u64 - 1)) as usize, len);
        for i in 0..len {
            for j in i + 1..len {
                for k in j + 1..=len {
                    let left = product(&ms[i..j]);
                    let right = product(&ms[j..k]);
                    let (_, image, _) = rank_decomp(&right).unwrap();
                    let (_, _, kernel) = rank_decomp(&left).unwrap();
                    prop_assert!(image.intersect(&kernel).is_zero());
                }
            }
        }
    }

    #[test]
    fn classification_composes(seed in any::<u64>(), lu in 0usize..12, lv in 0usize..12) {
        let mp = unit_morphism(seed, 1);
        let mut rng = common::rng(seed ^ 0xabcdef);
        let u = common::random_word(&mut rng, 3, lu);
        let v = common::random_word(&mut rng, 3, lv);
        let cu = classify_word(&u, &mp).unwrap();
        let cv = classify_word(&v, &mp).unwrap();
        let uv: Vec<usize> = u.iter().chain(&v).copied().collect();
        let cuv = classify_word(&uv, &mp).unwrap();
        prop_assert_eq!(cuv.weight, cu.weight + cv.weight);
        prop_assert_eq!(cuv.min_prefix_weight, cu.min_prefix_weight.min(cu.weight + cv.min_prefix_weight));
        prop_assert_eq!(cuv.max_prefix_weight, cu.max_prefix_weight.max(cu.weight + cv.max_prefix_weight));
    }

    #[test]
    fn stable_factors_have_the_requested_sign(seed in any::<u64>(), sign in prop::sample::select(vec![1i32, -1])) {
        let mp = unit_morphism(seed, 2);
        let mut rng = common::rng(seed);
        let mut w = common::random_word(&mut rng, 3, 20);
        let target = if sign == 1 { 0usize } else { 1 };
        w.extend(std::iter::repeat_n(target, 25));
        if i64::from(sign) * mp.weight(&w) > 0 {
            if let Ok((i, j)) = extract_stable_factor(&w, &mp, sign) {
                prop_assert!(i64::from(sign) * mp.weight(&w[i..j]) > 0);
                prop_assert!(closure_core::exactlin::is_stable(&mp.phi_word(&w[i..j])).unwrap());
            }
        }
    }
}

#[test]
fn empty_word_is_in_every_language() {
    let mp = unit_morphism(1, 1);
    let c = classify_word(&[], &mp).unwrap();
    assert_eq!(c.weight, 0);
    assert!(c.in_lc && c.in_lr && c.in_lz && c.in_lbz);
}

#[test]
fn language_inclusions_hold_on_enumerations() {
    for seed in 0..5 {
        let mp = unit_morphism(seed, 1).with_eta(2).unwrap();
        let reach = enumerate_words(&mp, Language::Reach, 8, 1 << 20).unwrap();
        let cover = enumerate_words(&mp, Language::Cover, 8, 1 << 20).unwrap();
        let zero = enumerate_words(&mp, Language::Zero, 8, 1 << 20).unwrap();
        let bounded = enumerate_words(&mp, Language::BoundedZero, 8, 1 << 20).unwrap();
        for w in &reach {
            assert!(cover.contains(w) && zero.contains(w));
        }
        for w in &bounded {
            assert!(zero.contains(w));
        }
        for (lang, words) in [(Language::Reach, &reach), (Language::Cover, &cover), (Language::Zero, &zero), (Language::BoundedZero, &bounded)] {
            for w in words {
                assert!(lang.accepts(&classify_word(w, &mp).unwrap()));
            }
        }
    }
}
