//! Seeded generators shared by the integration suites.
#![allow(dead_code)]

use closure_core::automata::Nfa;
use closure_core::exactlin::{rat, RationalMatrix};
use closure_core::lang::MorphismPair;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, d: usize, lo: i64, hi: i64) -> RationalMatrix {
    let entries = (0..d * d).map(|_| rat(rng.gen_range(lo..=hi))).collect();
    RationalMatrix::new(d, d, entries).expect("square")
}

/// Random invertible integer matrix: a product of elementary row operations.
pub fn random_invertible(rng: &mut impl Rng, d: usize) -> RationalMatrix {
    let mut m = RationalMatrix::identity(d);
    if d == 1 {
        return RationalMatrix::from_i64(&[&[[1i64, -1, 2][rng.gen_range(0..3)]]]);
    }
    for _ in 0..2 * d {
        let i = rng.gen_range(0..d);
        let j = (i + rng.gen_range(1..d)) % d;
        let mut e = RationalMatrix::identity(d);
        e.set(i, j, rat(rng.gen_range(-1..=1)));
        m = m.mul(&e);
    }
    m
}

/// A sequence whose members and prefix products all have rank `r`:
/// `P_i [[A_i, 0], [C_i, 0]] P_{i+1}^{-1}` with `A_i` invertible.
pub fn rank_sequence(rng: &mut impl Rng, d: usize, r: usize, len: usize) -> Vec<RationalMatrix> {
    let ps: Vec<RationalMatrix> = (0..=len).map(|_| random_invertible(rng, d)).collect();
    (0..len)
        .map(|i| {
            let a = random_invertible(rng, r.max(1));
            let mut core = RationalMatrix::zeros(d, d);
            for row in 0..d {
                for col in 0..r {
                    let v = if row < r { a.get(row, col).clone() } else { rat(rng.gen_range(-2..=2)) };
                    core.set(row, col, v);
                }
            }
            ps[i].mul(&core).mul(&ps[i + 1].inverse().expect("invertible"))
        })
        .collect()
}

/// Morphism over `letters` letters with small integer matrices and unit weights.
pub fn random_morphism(rng: &mut impl Rng, d: usize, letters: usize, lo: i64, hi: i64) -> MorphismPair {
    let alphabet: Vec<String> = (0..letters).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let phis = (0..letters).map(|_| random_matrix(rng, d, lo, hi)).collect();
    let omegas = (0..letters).map(|_| rng.gen_range(-1..=1)).collect();
    MorphismPair::new(alphabet, phis, omegas).expect("valid morphism")
}

/// Random NFA with at least one initial and one accepting state.
pub fn random_nfa(rng: &mut impl Rng, alphabet: &[String], states: usize, density: f64) -> Nfa<String> {
    let names: Vec<String> = (0..states).map(|i| format!("q{i}")).collect();
    let mut transitions = Vec::new();
    for p in 0..states {
        for a in 0..alphabet.len() {
            for q in 0..states {
                if rng.gen_bool(density) {
                    transitions.push((p, a, q));
                }
            }
        }
    }
    let mut accepting: Vec<usize> = (0..states).filter(|_| rng.gen_bool(0.5)).collect();
    if accepting.is_empty() {
        accepting.push(rng.gen_range(0..states));
    }
    Nfa::new(names, alphabet.to_vec(), vec![0], accepting, transitions).expect("valid nfa")
}

pub fn random_word(rng: &mut impl Rng, letters: usize, len: usize) -> Vec<usize> {
    (0..len).map(|_| rng.gen_range(0..letters)).collect()
}
