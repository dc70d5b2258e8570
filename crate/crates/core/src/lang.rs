//! Weighted-language semantics: morphism pairs, word classification and
//! bounded enumeration of the coverability, reachability, zero-weight and
//! bounded-zero languages.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlin::RationalMatrix;

/// A word as a list of letter positions in the alphabet.
pub type Word = Vec<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LangError {
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    #[error("letter {letter:?} has weight {weight}; weights must lie in {{-1, 0, 1}} (split heavier letters with `normalize_weights`)")]
    WeightOutOfRange { letter: String, weight: i64 },
    #[error("invalid morphism: {0}")]
    Invalid(String),
    #[error("enumeration exceeded the cap of {0} words")]
    CapExceeded(usize),
}

/// `2^{d(d+3)} + 1`, saturating at `u64::MAX`.
pub fn default_eta(d: usize) -> u64 {
    let exp = d.saturating_mul(d + 3);
    if exp >= 64 {
        u64::MAX
    } else {
        (1u64 << exp).saturating_add(1)
    }
}

/// `d(d+3)`, the height bound of factorization trees.
pub fn theta(d: usize) -> usize {
    d * (d + 3)
}

/// Letter images in M_d(Q) and unit weights, plus the threshold η in use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismPair {
    alphabet: Vec<String>,
    dim: usize,
    phi: Vec<RationalMatrix>,
    omega: Vec<i32>,
    eta: u64,
    eta_overridden: bool,
}

impl MorphismPair {
    pub fn new(alphabet: Vec<String>, phi: Vec<RationalMatrix>, omega: Vec<i64>) -> Result<Self, LangError> {
        if alphabet.is_empty() {
            return Err(LangError::Invalid("empty alphabet".into()));
        }
        if phi.len() != alphabet.len() || omega.len() != alphabet.len() {
            return Err(LangError::Invalid("every letter needs a matrix and a weight".into()));
        }
        for (i, a) in alphabet.iter().enumerate() {
            if a.is_empty() {
                return Err(LangError::Invalid("letters must be nonempty strings".into()));
            }
            if alphabet[..i].contains(a) {
                return Err(LangError::Invalid(format!("duplicate letter {a:?}")));
            }
        }
        let dim = phi[0].rows();
        if phi.iter().any(|m| m.rows() != dim || m.cols() != dim) || dim == 0 {
            return Err(LangError::Invalid("letter images must share one square shape".into()));
        }
        let omega = alphabet
            .iter()
            .zip(&omega)
            .map(|(a, &w)| {
                if (-1..=1).contains(&w) {
                    Ok(w as i32)
                } else {
                    Err(LangError::WeightOutOfRange { letter: a.clone(), weight: w })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { alphabet, dim, phi, omega, eta: default_eta(dim), eta_overridden: false })
    }

    /// Convenience constructor from integer matrices.
    pub fn from_i64(letters: &[(&str, &[&[i64]], i64)]) -> Result<Self, LangError> {
        Self::new(
            letters.iter().map(|(a, _, _)| a.to_string()).collect(),
            letters.iter().map(|(_, m, _)| RationalMatrix::from_i64(m)).collect(),
            letters.iter().map(|(_, _, w)| *w).collect(),
        )
    }

    /// Replaces η; theorem-level guarantees hold only at the default.
    pub fn with_eta(mut self, eta: u64) -> Result<Self, LangError> {
        if eta == 0 {
            return Err(LangError::Invalid("eta must be at least 1".into()));
        }
        self.eta_overridden = eta != default_eta(self.dim);
        self.eta = eta;
        Ok(self)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn phi(&self, letter: usize) -> &RationalMatrix {
        &self.phi[letter]
    }

    pub fn phis(&self) -> &[RationalMatrix] {
        &self.phi
    }

    pub fn omega(&self, letter: usize) -> i32 {
        self.omega[letter]
    }

    pub fn omegas(&self) -> &[i32] {
        &self.omega
    }

    pub fn eta(&self) -> u64 {
        self.eta
    }

    pub fn eta_overridden(&self) -> bool {
        self.eta_overridden
    }

    pub fn letter_index(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|a| a == name)
    }

    pub fn parse_word<S: AsRef<str>>(&self, letters: &[S]) -> Result<Word, LangError> {
        letters
            .iter()
            .map(|s| self.letter_index(s.as_ref()).ok_or_else(|| LangError::UnknownLetter(s.as_ref().to_string())))
            .collect()
    }

    pub fn render_word(&self, w: &[usize]) -> Vec<String> {
        w.iter().map(|&i| self.alphabet[i].clone()).collect()
    }

    pub fn weight(&self, w: &[usize]) -> i64 {
        w.iter().map(|&i| i64::from(self.omega[i])).sum()
    }

    pub fn phi_word(&self, w: &[usize]) -> RationalMatrix {
        RationalMatrix::product(w.iter().map(|&i| &self.phi[i]), self.dim)
    }

    fn check_word(&self, w: &[usize]) -> Result<(), LangError> {
        match w.iter().find(|&&i| i >= self.alphabet.len()) {
            Some(&i) => Err(LangError::UnknownLetter(format!("#{i}"))),
            None => Ok(()),
        }
    }
}

/// Prefix-weight profile and language memberships of a word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordClass {
    pub weight: i64,
    pub min_prefix_weight: i64,
    pub max_prefix_weight: i64,
    pub in_lc: bool,
    pub in_lr: bool,
    pub in_lz: bool,
    pub in_lbz: bool,
}

pub fn classify_word(w: &[usize], mp: &MorphismPair) -> Result<WordClass, LangError> {
    mp.check_word(w)?;
    let (mut weight, mut lo, mut hi) = (0i64, 0i64, 0i64);
    for &a in w {
        weight += i64::from(mp.omega[a]);
        lo = lo.min(weight);
        hi = hi.max(weight);
    }
    let eta = i64::try_from(mp.eta).unwrap_or(i64::MAX);
    let in_lc = lo >= 0;
    Ok(WordClass {
        weight,
        min_prefix_weight: lo,
        max_prefix_weight: hi,
        in_lc,
        in_lr: in_lc && weight == 0,
        in_lz: weight == 0,
        in_lbz: weight == 0 && lo >= -eta && hi <= eta,
    })
}

/// Language selector for enumeration and the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Language {
    /// L_C: every prefix has nonnegative weight.
    Cover,
    /// L_R: coverability words of weight zero.
    Reach,
    /// L_Z: words of weight zero.
    Zero,
    /// L_BZ: weight zero with every prefix weight in [-η, η].
    BoundedZero,
    /// Every word.
    All,
}

impl Language {
    pub fn accepts(self, class: &WordClass) -> bool {
        match self {
            Language::Cover => class.in_lc,
            Language::Reach => class.in_lr,
            Language::Zero => class.in_lz,
            Language::BoundedZero => class.in_lbz,
            Language::All => true,
        }
    }

    /// Whether a prefix ending at weight `weight`, with `remaining` letters
    /// still to read, can extend to a member.
    pub fn viable(self, weight: i64, remaining: usize, eta: i64) -> bool {
        let rem = remaining as i64;
        match self {
            Language::Cover => weight >= 0,
            Language::Reach => weight >= 0 && weight <= rem,
            Language::Zero => weight.abs() <= rem,
            Language::BoundedZero => weight.abs() <= eta && weight.abs() <= rem,
            Language::All => true,
        }
    }

    pub fn is_final(self, weight: i64) -> bool {
        match self {
            Language::Cover | Language::All => true,
            Language::Reach | Language::Zero | Language::BoundedZero => weight == 0,
        }
    }
}

/// All words of length at most `max_len` in the selected language, in
/// length-then-lexicographic order; errors once more than `cap` words match.
pub fn enumerate_words(
    mp: &MorphismPair,
    lang: Language,
    max_len: usize,
    cap: usize,
) -> Result<Vec<Word>, LangError> {
    let mut out = Vec::new();
    for_each_word(mp, lang, max_len, |w| {
        if out.len() == cap {
            return Err(LangError::CapExceeded(cap));
        }
        out.push(w.to_vec());
        Ok(())
    })?;
    Ok(out)
}

/// Streams the words of [`enumerate_words`] to a visitor.
pub fn for_each_word<F>(mp: &MorphismPair, lang: Language, max_len: usize, mut visit: F) -> Result<(), LangError>
where
    F: FnMut(&[usize]) -> Result<(), LangError>,
{
    let eta = i64::try_from(mp.eta).unwrap_or(i64::MAX);
    let mut word = Vec::with_capacity(max_len);
    for len in 0..=max_len {
        extend(mp, lang, eta, len, 0, &mut word, &mut visit)?;
    }
    Ok(())
}

fn extend<F>(
    mp: &MorphismPair,
    lang: Language,
    eta: i64,
    len: usize,
    weight: i64,
    word: &mut Vec<usize>,
    visit: &mut F,
) -> Result<(), LangError>
where
    F: FnMut(&[usize]) -> Result<(), LangError>,
{
    if word.len() == len {
        return if lang.is_final(weight) { visit(word) } else { Ok(()) };
    }
    for a in 0..mp.len() {
        let w = weight + i64::from(mp.omega[a]);
        if !lang.viable(w, len - word.len() - 1, eta) {
            continue;
        }
        word.push(a);
        extend(mp, lang, eta, len, w, word, visit)?;
        word.pop();
    }
    Ok(())
}

/// A one-dimensional vector addition system with states: transitions carry
/// a letter and a counter update.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vass {
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub accepting: Vec<String>,
    /// `(from, letter, weight, to)`.
    pub transitions: Vec<(String, String, i64, String)>,
}

/// Rewrites letters of arbitrary integer weight into a 1-VASS over unit
/// weights. A letter of weight `k` with `|k| > 1` becomes a chain of `|k|`
/// transitions through fresh intermediate states: the first carries the
/// letter, the rest carry a fresh identity letter. Coverability and
/// reachability languages map onto the original ones.
pub fn normalize_weights(
    alphabet: &[String],
    phi: &[RationalMatrix],
    weights: &[i64],
) -> Result<(MorphismPair, Vass), LangError> {
    if alphabet.is_empty() || phi.len() != alphabet.len() || weights.len() != alphabet.len() {
        return Err(LangError::Invalid("every letter needs a matrix and a weight".into()));
    }
    let dim = phi[0].rows();
    let mut identity_name = String::from("id");
    while alphabet.contains(&identity_name) {
        identity_name.push('_');
    }
    let needs_identity = weights.iter().any(|w| w.abs() > 1);
    let mut letters = alphabet.to_vec();
    let mut images = phi.to_vec();
    let mut unit = Vec::with_capacity(alphabet.len() + 1);
    for &w in weights {
        unit.push(w.signum());
    }
    if needs_identity {
        letters.push(identity_name.clone());
        images.push(RationalMatrix::identity(dim));
        unit.push(0);
    }
    let mp = MorphismPair::new(letters, images, unit)?;
    let hub = "hub".to_string();
    let mut states = vec![hub.clone()];
    let mut transitions = Vec::new();
    for (i, (a, &w)) in alphabet.iter().zip(weights).enumerate() {
        let step = w.signum();
        if w.abs() <= 1 {
            transitions.push((hub.clone(), a.clone(), w, hub.clone()));
            continue;
        }
        let mut from = hub.clone();
        for j in 0..w.unsigned_abs() {
            let last = j + 1 == w.unsigned_abs();
            let to = if last { hub.clone() } else { format!("{a}#{i}.{j}") };
            if !last {
                states.push(to.clone());
            }
            let label = if j == 0 { a.clone() } else { identity_name.clone() };
            transitions.push((from, label, step, to.clone()));
            from = to;
        }
    }
    let vass = Vass { states, initial: vec![hub.clone()], accepting: vec![hub], transitions };
    Ok((mp, vass))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> MorphismPair {
        MorphismPair::from_i64(&[("a", &[&[2]], 1), ("b", &[&[1]], -1)]).unwrap()
    }

    #[test]
    fn eta_values() {
        assert_eq!(default_eta(1), 17);
        assert_eq!(default_eta(2), 1025);
        assert_eq!(default_eta(3), 262_145);
        assert_eq!(default_eta(8), u64::MAX);
        assert_eq!(theta(2), 10);
    }

    #[test]
    fn classify_examples() {
        let mp = ab();
        let c = classify_word(&[0, 1], &mp).unwrap();
        assert_eq!(c.weight, 0);
        assert!(c.in_lc && c.in_lr && c.in_lz && c.in_lbz);
        let c = classify_word(&[1, 0], &mp).unwrap();
        assert_eq!(c.weight, 0);
        assert!(!c.in_lc && !c.in_lr && c.in_lz && c.in_lbz);
        let c = classify_word(&[0], &mp).unwrap();
        assert_eq!(c.weight, 1);
        assert!(c.in_lc && !c.in_lr && !c.in_lz && !c.in_lbz);
        assert!(classify_word(&[2], &mp).is_err());
        assert!(mp.parse_word(&["c"]).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let mp = ab();
        assert_eq!(enumerate_words(&mp, Language::Reach, 2, 100).unwrap(), vec![vec![], vec![0, 1]]);
        assert_eq!(enumerate_words(&mp, Language::Zero, 2, 100).unwrap(), vec![vec![], vec![0, 1], vec![1, 0]]);
        assert_eq!(enumerate_words(&mp, Language::Cover, 1, 100).unwrap(), vec![vec![], vec![0]]);
        assert_eq!(enumerate_words(&mp, Language::Zero, 4, 3), Err(LangError::CapExceeded(3)));
    }

    #[test]
    fn rejects_heavy_weights() {
        let err = MorphismPair::from_i64(&[("a", &[&[1]], 2)]).unwrap_err();
        assert!(matches!(err, LangError::WeightOutOfRange { weight: 2, .. }));
    }

    #[test]
    fn normalization_splits_heavy_letters() {
        let (mp, vass) =
            normalize_weights(&["a".into(), "b".into()], &vec![RationalMatrix::from_i64(&[&[2]]); 2], &[3, -1])
                .unwrap();
        assert_eq!(mp.alphabet(), &["a".to_string(), "b".into(), "id".into()]);
        assert_eq!(vass.states.len(), 3);
        assert_eq!(vass.transitions.len(), 4);
        assert!(vass.transitions.iter().all(|t| t.2.abs() <= 1));
    }
}
