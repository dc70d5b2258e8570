//! Finite automata over indexed alphabets, the counter-tracking automata for
//! the cover, reach, zero and bounded-zero languages, the four-track
//! alphabet with its `prod`/`flat` maps, and the zero-language witness builder.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde_json::{json, Value};
use thiserror::Error;

use crate::exactlin::is_stable;
use crate::facttree::{extract_stable_factor, TreeError};
use crate::lang::{classify_word, MorphismPair, Word};

/// Default bound on materialized automaton states.
pub const DEFAULT_MAX_STATES: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomataError {
    #[error("infeasible: {what} needs {needed} states, above the cap of {cap}; set eta_override or raise the cap")]
    Infeasible { what: String, needed: usize, cap: usize },
    #[error("invalid automaton: {0}")]
    Invalid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Nondeterministic automaton without epsilon moves. Letters are indices
/// into `alphabet`; states are `0..num_states()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa<L> {
    state_names: Vec<String>,
    alphabet: Vec<L>,
    initial: Vec<usize>,
    accepting: Vec<bool>,
    delta: Vec<Vec<(usize, usize)>>,
}

impl<L: Clone + Eq> Nfa<L> {
    /// Builds from `(from, letter, to)` triples over `state_names.len()` states.
    pub fn new(
        state_names: Vec<String>,
        alphabet: Vec<L>,
        initial: impl IntoIterator<Item = usize>,
        accepting: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self, AutomataError> {
        let n = state_names.len();
        let mut acc = vec![false; n];
        for q in accepting {
            *acc.get_mut(q).ok_or_else(|| AutomataError::Invalid(format!("accepting state {q} out of range")))? =
                true;
        }
        let initial: BTreeSet<usize> = initial.into_iter().collect();
        if initial.iter().any(|&q| q >= n) {
            return Err(AutomataError::Invalid("initial state out of range".into()));
        }
        let mut delta = vec![Vec::new(); n];
        for (p, a, q) in transitions {
            if p >= n || q >= n || a >= alphabet.len() {
                return Err(AutomataError::Invalid(format!("transition ({p}, {a}, {q}) out of range")));
            }
            delta[p].push((a, q));
        }
        for row in &mut delta {
            row.sort_unstable();
            row.dedup();
        }
        Ok(Self { state_names, alphabet, initial: initial.into_iter().collect(), accepting: acc, delta })
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn alphabet(&self) -> &[L] {
        &self.alphabet
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&q| self.accepting[q]).collect()
    }

    /// Outgoing `(letter, target)` pairs, sorted.
    pub fn transitions_from(&self, q: usize) -> &[(usize, usize)] {
        &self.delta[q]
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().map(Vec::len).sum()
    }

    pub fn successors(&self, q: usize, letter: usize) -> impl Iterator<Item = usize> + '_ {
        self.delta[q].iter().filter(move |(a, _)| *a == letter).map(|&(_, t)| t)
    }

    fn step(&self, current: &BTreeSet<usize>, letter: usize) -> BTreeSet<usize> {
        current.iter().flat_map(|&q| self.successors(q, letter)).collect()
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut current: BTreeSet<usize> = self.initial.iter().copied().collect();
        for &a in word {
            current = self.step(&current, a);
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|&q| self.accepting[q])
    }

    pub fn is_deterministic(&self) -> bool {
        self.initial.len() == 1 && self.delta.iter().all(|row| row.windows(2).all(|w| w[0].0 != w[1].0))
    }

    pub fn is_complete(&self) -> bool {
        self.is_deterministic() && self.delta.iter().all(|row| row.len() == self.alphabet.len())
    }

    /// Subset construction over reachable subsets only.
    pub fn determinize(&self, max_states: usize) -> Result<Self, AutomataError> {
        let start: Vec<usize> = self.initial.clone();
        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut subsets = vec![start.clone()];
        index.insert(start, 0);
        let mut transitions = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let current: BTreeSet<usize> = subsets[i].iter().copied().collect();
            for a in 0..self.alphabet.len() {
                let next: Vec<usize> = self.step(&current, a).into_iter().collect();
                if next.is_empty() {
                    continue;
                }
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        let j = subsets.len();
                        if j >= max_states {
                            return Err(AutomataError::Infeasible {
                                what: "determinization".into(),
                                needed: j + 1,
                                cap: max_states,
                            });
                        }
                        index.insert(next.clone(), j);
                        subsets.push(next);
                        queue.push_back(j);
                        j
                    }
                };
                transitions.push((i, a, j));
            }
        }
        let names = subsets
            .iter()
            .map(|s| format!("{{{}}}", s.iter().map(|&q| self.state_names[q].as_str()).collect::<Vec<_>>().join(",")))
            .collect();
        let accepting: Vec<usize> =
            (0..subsets.len()).filter(|&i| subsets[i].iter().any(|&q| self.accepting[q])).collect();
        Self::new(names, self.alphabet.clone(), [0], accepting, transitions)
    }

    /// Adds a rejecting sink receiving every missing transition.
    pub fn complete(&self) -> Result<Self, AutomataError> {
        if !self.is_deterministic() {
            return Err(AutomataError::Precondition("completion needs a deterministic automaton".into()));
        }
        if self.is_complete() {
            return Ok(self.clone());
        }
        let sink = self.num_states();
        let mut names = self.state_names.clone();
        names.push("sink".into());
        let mut transitions = self.triples();
        for q in 0..=sink {
            for a in 0..self.alphabet.len() {
                if q == sink || !self.delta[q].iter().any(|&(b, _)| b == a) {
                    transitions.push((q, a, sink));
                }
            }
        }
        Self::new(names, self.alphabet.clone(), self.initial.clone(), self.accepting_states(), transitions)
    }

    fn triples(&self) -> Vec<(usize, usize, usize)> {
        self.delta.iter().enumerate().flat_map(|(p, row)| row.iter().map(move |&(a, q)| (p, a, q))).collect()
    }

    /// Synchronous product over a common alphabet, reachable pairs only.
    pub fn product(&self, other: &Self, max_states: usize) -> Result<Self, AutomataError> {
        if self.alphabet != other.alphabet {
            return Err(AutomataError::Invalid("product of automata over different alphabets".into()));
        }
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut pairs = Vec::new();
        let mut queue = VecDeque::new();
        let mut intern = |pair: (usize, usize),
                          pairs: &mut Vec<(usize, usize)>,
                          queue: &mut VecDeque<usize>|
         -> Result<usize, AutomataError> {
            if let Some(&i) = index.get(&pair) {
                return Ok(i);
            }
            let i = pairs.len();
            if i >= max_states {
                return Err(AutomataError::Infeasible { what: "product automaton".into(), needed: i + 1, cap: max_states });
            }
            index.insert(pair, i);
            pairs.push(pair);
            queue.push_back(i);
            Ok(i)
        };
        let mut initial = Vec::new();
        for &p in &self.initial {
            for &q in &other.initial {
                initial.push(intern((p, q), &mut pairs, &mut queue)?);
            }
        }
        let mut transitions = Vec::new();
        while let Some(i) = queue.pop_front() {
            let (p, q) = pairs[i];
            for &(a, p2) in &self.delta[p] {
                for q2 in other.successors(q, a) {
                    let j = intern((p2, q2), &mut pairs, &mut queue)?;
                    transitions.push((i, a, j));
                }
            }
        }
        let names = pairs
            .iter()
            .map(|&(p, q)| format!("({},{})", self.state_names[p], other.state_names[q]))
            .collect();
        let accepting: Vec<usize> =
            (0..pairs.len()).filter(|&i| self.accepting[pairs[i].0] && other.accepting[pairs[i].1]).collect();
        Self::new(names, self.alphabet.clone(), initial, accepting, transitions)
    }

    /// Restricts to states both reachable and co-reachable.
    pub fn trim(&self) -> Self {
        let n = self.num_states();
        let mut reach = vec![false; n];
        let mut stack: Vec<usize> = self.initial.clone();
        for &q in &stack {
            reach[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &(_, t) in &self.delta[q] {
                if !reach[t] {
                    reach[t] = true;
                    stack.push(t);
                }
            }
        }
        let mut reverse = vec![Vec::new(); n];
        for (p, row) in self.delta.iter().enumerate() {
            for &(_, q) in row {
                reverse[q].push(p);
            }
        }
        let mut coreach = self.accepting.clone();
        let mut stack: Vec<usize> = self.accepting_states();
        while let Some(q) = stack.pop() {
            for &p in &reverse[q] {
                if !coreach[p] {
                    coreach[p] = true;
                    stack.push(p);
                }
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&q| reach[q] && coreach[q]).collect();
        let mut renumber = vec![usize::MAX; n];
        for (i, &q) in keep.iter().enumerate() {
            renumber[q] = i;
        }
        let names = keep.iter().map(|&q| self.state_names[q].clone()).collect();
        let transitions = self
            .triples()
            .into_iter()
            .filter(|&(p, _, q)| renumber[p] != usize::MAX && renumber[q] != usize::MAX)
            .map(|(p, a, q)| (renumber[p], a, renumber[q]));
        let initial = self.initial.iter().filter(|&&q| renumber[q] != usize::MAX).map(|&q| renumber[q]);
        let accepting = keep.iter().filter(|&&q| self.accepting[q]).map(|&q| renumber[q]);
        Self::new(names, self.alphabet.clone(), initial, accepting.collect::<Vec<_>>(), transitions)
            .expect("renumbered states stay in range")
    }

    /// Replaces the letter labels, keeping the transition structure.
    pub fn relabel<M: Clone + Eq>(&self, alphabet: Vec<M>) -> Result<Nfa<M>, AutomataError> {
        if alphabet.len() != self.alphabet.len() {
            return Err(AutomataError::Invalid("relabeling changes the alphabet size".into()));
        }
        Ok(Nfa {
            state_names: self.state_names.clone(),
            alphabet,
            initial: self.initial.clone(),
            accepting: self.accepting.clone(),
            delta: self.delta.clone(),
        })
    }

    /// JSON dump with states as names and transitions as triples.
    pub fn to_json_with(&self, letter_name: impl Fn(&L) -> String) -> Value {
        let name = |q: usize| self.state_names[q].clone();
        json!({
            "states": self.state_names,
            "alphabet": self.alphabet.iter().map(&letter_name).collect::<Vec<_>>(),
            "initial": self.initial.iter().map(|&q| name(q)).collect::<Vec<_>>(),
            "accepting": self.accepting_states().into_iter().map(name).collect::<Vec<_>>(),
            "transitions": self
                .triples()
                .into_iter()
                .map(|(p, a, q)| json!([name(p), letter_name(&self.alphabet[a]), name(q)]))
                .collect::<Vec<_>>(),
        })
    }
}

fn check_cap(what: &str, needed: usize, cap: usize) -> Result<(), AutomataError> {
    if needed > cap {
        Err(AutomataError::Infeasible { what: what.into(), needed, cap })
    } else {
        Ok(())
    }
}

fn eta_usize(mp: &MorphismPair) -> usize {
    usize::try_from(mp.eta()).unwrap_or(usize::MAX)
}

/// Counter automaton over `0..η` plus an absorbing state `inf` entered from
/// `η-1` on a weight-1 letter. Every state accepts.
pub fn build_cover_automaton(mp: &MorphismPair, max_states: usize) -> Result<Nfa<String>, AutomataError> {
    let eta = eta_usize(mp);
    check_cap("cover automaton", eta.saturating_add(1), max_states)?;
    let inf = eta;
    let mut names: Vec<String> = (0..eta).map(|c| c.to_string()).collect();
    names.push("inf".into());
    let mut transitions = Vec::new();
    for c in 0..eta {
        for (a, &w) in mp.omegas().iter().enumerate() {
            let next = c as i64 + i64::from(w);
            if (0..eta as i64).contains(&next) {
                transitions.push((c, a, next as usize));
            } else if c == eta - 1 && w == 1 {
                transitions.push((c, a, inf));
            }
        }
    }
    transitions.extend((0..mp.len()).map(|a| (inf, a, inf)));
    Nfa::new(names, mp.alphabet().to_vec(), [0], 0..=inf, transitions)
}

/// Counter automaton on `{0..η} x {0,1}` plus `inf`; state `(c, b)` has
/// index `2c + b` and `inf` has index `2η`.
pub fn build_reach_automaton(mp: &MorphismPair, max_states: usize) -> Result<Nfa<String>, AutomataError> {
    let eta = eta_usize(mp);
    check_cap("reach automaton", eta.saturating_mul(2).saturating_add(1), max_states)?;
    let idx = |c: usize, b: usize| 2 * c + b;
    let inf = 2 * eta;
    let mut names = Vec::with_capacity(inf + 1);
    for c in 0..eta {
        for b in 0..2 {
            names.push(format!("({c},{b})"));
        }
    }
    names.push("inf".into());
    let mut transitions = Vec::new();
    for c in 0..eta {
        for (a, &w) in mp.omegas().iter().enumerate() {
            let next = c as i64 + i64::from(w);
            if (0..eta as i64).contains(&next) {
                for b in 0..2 {
                    transitions.push((idx(c, b), a, idx(next as usize, b)));
                }
            }
        }
    }
    for (a, &w) in mp.omegas().iter().enumerate() {
        transitions.push((inf, a, inf));
        if w == 1 {
            transitions.push((idx(eta - 1, 0), a, inf));
        }
        if w == -1 {
            transitions.push((inf, a, idx(eta - 1, 1)));
        }
    }
    Nfa::new(names, mp.alphabet().to_vec(), [idx(0, 0)], [idx(0, 0), idx(0, 1)], transitions)
}

/// Counter automaton on `-η..=η`, initial and accepting at 0; it accepts
/// exactly the bounded-zero language.
pub fn build_bz_automaton(mp: &MorphismPair, max_states: usize) -> Result<Nfa<String>, AutomataError> {
    let eta = eta_usize(mp);
    check_cap("bounded-zero automaton", eta.saturating_mul(2).saturating_add(1), max_states)?;
    counter_automaton(mp.alphabet().to_vec(), mp.omegas(), eta as i64)
}

fn counter_automaton<L: Clone + Eq>(alphabet: Vec<L>, weights: &[i32], bound: i64) -> Result<Nfa<L>, AutomataError> {
    let names = (-bound..=bound).map(|c| c.to_string()).collect();
    let mut transitions = Vec::new();
    for c in -bound..=bound {
        for (a, &w) in weights.iter().enumerate() {
            let next = c + i64::from(w);
            if (-bound..=bound).contains(&next) {
                transitions.push(((c + bound) as usize, a, (next + bound) as usize));
            }
        }
    }
    let zero = bound as usize;
    Nfa::new(names, alphabet, [zero], [zero], transitions)
}

/// A letter of the four-track alphabet: each track holds a letter index or
/// nothing, and at least one track is nonempty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GammaLetter(pub [Option<usize>; 4]);

impl GammaLetter {
    /// A letter with a single nonempty track.
    pub fn single(track: usize, letter: usize) -> Self {
        let mut tracks = [None; 4];
        tracks[track] = Some(letter);
        Self(tracks)
    }

    pub fn weight(&self, mp: &MorphismPair) -> i64 {
        self.0.iter().flatten().map(|&a| i64::from(mp.omega(a))).sum()
    }

    pub fn render(&self, alphabet: &[String]) -> String {
        let parts: Vec<&str> = self.0.iter().map(|t| t.map_or("eps", |a| alphabet[a].as_str())).collect();
        format!("({})", parts.join(","))
    }
}

/// All letters of the four-track alphabet over `n` base letters, in order.
pub fn gamma_alphabet(n: usize) -> Vec<GammaLetter> {
    let choices: Vec<Option<usize>> = std::iter::once(None).chain((0..n).map(Some)).collect();
    let mut out = Vec::with_capacity((n + 1).pow(4) - 1);
    for &a in &choices {
        for &b in &choices {
            for &c in &choices {
                for &d in &choices {
                    if a.is_some() || b.is_some() || c.is_some() || d.is_some() {
                        out.push(GammaLetter([a, b, c, d]));
                    }
                }
            }
        }
    }
    out
}

/// Counter automaton over the four-track alphabet on `-2η..=2η`, with
/// `flat(L(A))` inside the zero-weight language.
pub fn build_zero_automaton(mp: &MorphismPair, max_states: usize) -> Result<Nfa<GammaLetter>, AutomataError> {
    let eta = eta_usize(mp);
    let bound = eta.saturating_mul(2);
    check_cap("zero automaton", bound.saturating_mul(2).saturating_add(1), max_states)?;
    let alphabet = gamma_alphabet(mp.len());
    let weights: Vec<i32> = alphabet.iter().map(|g| g.weight(mp) as i32).collect();
    counter_automaton(alphabet, &weights, bound as i64)
}

/// Componentwise concatenation and its flattening.
pub fn flatten(ws: &[GammaLetter]) -> ([Word; 4], Word) {
    let mut tracks: [Word; 4] = Default::default();
    for g in ws {
        for (t, slot) in g.0.iter().enumerate() {
            if let Some(a) = slot {
                tracks[t].push(*a);
            }
        }
    }
    let flat = tracks.concat();
    (tracks, flat)
}

/// Decomposition of a zero-weight word leaving the bounded band, together
/// with the pumpable four-track words built from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroWitness {
    pub x1: Word,
    pub u: Word,
    pub x2: Word,
    pub w1: Word,
    pub y2: Word,
    pub v: Word,
    pub y1: Word,
    pub w2: Word,
    /// Copies of `u` and `v` added by one pass of `w_word` beyond the first.
    pub m: usize,
    pub n: usize,
    pub w_word: Vec<GammaLetter>,
    pub u_word: Vec<GammaLetter>,
}

impl ZeroWitness {
    /// The expected flattening of `w_word` followed by `k` copies of `u_word`.
    pub fn expected_flat(&self, k: usize) -> Word {
        let repeat = |w: &Word, times: usize| w.repeat(times);
        [
            self.x1.clone(),
            repeat(&self.u, 1 + (k + 1) * self.m),
            self.x2.clone(),
            self.w1.clone(),
            self.y2.clone(),
            repeat(&self.v, 1 + (k + 1) * self.n),
            self.y1.clone(),
            self.w2.clone(),
        ]
        .concat()
    }
}

fn prefix_weights(w: &[usize], mp: &MorphismPair) -> Vec<i64> {
    let mut out = vec![0i64];
    for &a in w {
        out.push(out[out.len() - 1] + i64::from(mp.omega(a)));
    }
    out
}

/// Builds the four-track words `W` and `U` with `W U^k` accepted by the zero
/// automaton for every `k`, from a zero-weight word whose prefix weights
/// reach `±η`. The `-η` case mirrors the `+η` one by swapping weight signs.
pub fn construct_zero_witness(w: &[usize], mp: &MorphismPair) -> Result<ZeroWitness, AutomataError> {
    let class = classify_word(w, mp).map_err(|e| AutomataError::Precondition(e.to_string()))?;
    if !class.in_lz || class.in_lbz {
        return Err(AutomataError::Precondition("word must have weight 0 and leave the band [-eta, eta]".into()));
    }
    let eta = mp.eta() as i64;
    let pw = prefix_weights(w, mp);
    let x_end = (1..pw.len()).find(|&i| pw[i].abs() == eta).expect("band is left");
    let sign: i32 = if pw[x_end] > 0 { 1 } else { -1 };
    let zero_end = (x_end + 1..pw.len()).find(|&i| pw[i] == 0).expect("total weight is zero");
    // Shortest suffix of the zero prefix with weight -ω(x).
    let y_start = (x_end..zero_end).rev().find(|&i| pw[i] == pw[x_end]).expect("x end qualifies");

    let x = &w[..x_end];
    let y = &w[y_start..zero_end];
    let (ui, uj) = extract_stable_factor(x, mp, sign)?;
    let (vi, vj) = extract_stable_factor(y, mp, -sign)?;
    let part = |s: &[usize]| s.to_vec();
    let witness_parts = (
        part(&x[..ui]),
        part(&x[ui..uj]),
        part(&x[uj..]),
        part(&w[x_end..y_start]),
        part(&y[..vi]),
        part(&y[vi..vj]),
        part(&y[vj..]),
        part(&w[zero_end..]),
    );
    let (x1, u, x2, w1, y2, v, y1, w2) = witness_parts;
    debug_assert!(is_stable(&mp.phi_word(&u)).unwrap_or(false));

    let weight = |s: &[usize]| mp.weight(s);
    let (wu, wv) = (weight(&u), weight(&v));
    let single = |track: usize, s: &[usize]| s.iter().map(|&a| GammaLetter::single(track, a)).collect::<Vec<_>>();

    // Phase 1: the band-bounded frame.
    let mut w_word = [single(0, &x1), single(0, &u), single(1, &x2), single(2, &y2), single(2, &v), single(3, &y1)]
        .concat();
    // Phase 2: the zero-weight middles, rebalanced by u and v.
    let mut state = 0i64;
    let (mut m0, mut n0) = (0usize, 0usize);
    for (track, letters) in [(1usize, &w1), (3usize, &w2)] {
        for &a in letters.iter() {
            w_word.push(GammaLetter::single(track, a));
            state += i64::from(mp.omega(a));
            if state == -wu {
                w_word.extend(single(0, &u));
                state = 0;
                m0 += 1;
            } else if state == -wv {
                w_word.extend(single(2, &v));
                state = 0;
                n0 += 1;
            }
        }
    }
    // Phase 3: reach the smallest balanced totals dominating the counts.
    let g = num_integer::gcd(wu.abs(), wv.abs());
    let (step_m, step_n) = ((wv.abs() / g) as usize, (wu.abs() / g) as usize);
    let scale = [m0.div_ceil(step_m), n0.div_ceil(step_n), 1].into_iter().max().expect("nonempty");
    let (m, n) = (scale * step_m, scale * step_n);
    let tracks = (single(0, &u), single(2, &v), wu, wv);
    let phase3 = greedy_balance(&tracks, state, m - m0, n - n0);
    w_word.extend(phase3);
    let u_word = greedy_balance(&tracks, 0, m, n);

    Ok(ZeroWitness { x1, u, x2, w1, y2, v, y1, w2, m, n, w_word, u_word })
}

/// Interleaves `mu` copies of the u-track word and `nv` copies of the
/// v-track word, reading the factor whose weight pushes the state toward 0.
fn greedy_balance(
    (u_track, v_track, wu, wv): &(Vec<GammaLetter>, Vec<GammaLetter>, i64, i64),
    mut state: i64,
    mut mu: usize,
    mut nv: usize,
) -> Vec<GammaLetter> {
    let mut out = Vec::new();
    while mu > 0 || nv > 0 {
        let toward_zero_is_u = (state <= 0) == (*wu > 0);
        let take_u = nv == 0 || (mu > 0 && toward_zero_is_u);
        if take_u {
            out.extend_from_slice(u_track);
            state += wu;
            mu -= 1;
        } else {
            out.extend_from_slice(v_track);
            state += wv;
            nv -= 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{enumerate_words, Language};

    fn scalar_pair(eta: Option<u64>) -> MorphismPair {
        let mp = MorphismPair::from_i64(&[("a", &[&[2]], 1), ("b", &[&[1]], -1)]).unwrap();
        match eta {
            Some(e) => mp.with_eta(e).unwrap(),
            None => mp,
        }
    }

    fn word(mp: &MorphismPair, s: &str) -> Word {
        let letters: Vec<String> = s.chars().map(|c| c.to_string()).collect();
        mp.parse_word(&letters).unwrap()
    }

    #[test]
    fn cover_automaton_examples() {
        let mp = scalar_pair(None);
        let a = build_cover_automaton(&mp, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(a.num_states(), 18);
        assert!(!a.accepts(&word(&mp, "ba")));
        // With η = 2 the trace 0 -> 1 -> 0 blocks on the second b, while
        // "aabbb" reaches inf and is accepted despite leaving the cover language.
        let small_mp = scalar_pair(Some(2));
        let small = build_cover_automaton(&small_mp, DEFAULT_MAX_STATES).unwrap();
        assert!(!small.accepts(&word(&mp, "abb")));
        let escaped = word(&mp, "aabbb");
        assert!(small.accepts(&escaped));
        assert!(!classify_word(&escaped, &small_mp).unwrap().in_lc);
    }

    #[test]
    fn reach_automaton_examples() {
        let mp = scalar_pair(None);
        let a = build_reach_automaton(&mp, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(a.num_states(), 35);
        assert!(a.accepts(&[]));
        assert!(a.accepts(&word(&mp, "ab")));
        assert!(!a.accepts(&word(&mp, "ba")));
    }

    #[test]
    fn reach_automaton_determinizes_to_linear_size() {
        let mp = scalar_pair(Some(5));
        let dfa = build_reach_automaton(&mp, DEFAULT_MAX_STATES).unwrap().determinize(DEFAULT_MAX_STATES).unwrap();
        assert!(dfa.is_deterministic());
        assert!(dfa.num_states() <= 4 * 5 + 2);
    }

    #[test]
    fn zero_automaton_examples() {
        let mp = scalar_pair(None);
        let a = build_zero_automaton(&mp, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(a.num_states(), 69);
        assert_eq!(a.alphabet().len(), 80);
        let ab = a.alphabet().iter().position(|g| *g == GammaLetter([Some(0), Some(1), None, None])).unwrap();
        assert!(a.accepts(&[ab]));
        assert!(a.accepts(&[ab, ab, ab]));
    }

    #[test]
    fn bz_automaton_examples() {
        let mp = scalar_pair(Some(2));
        let a = build_bz_automaton(&mp, DEFAULT_MAX_STATES).unwrap();
        assert!(a.accepts(&word(&mp, "ab")));
        assert!(a.accepts(&word(&mp, "ba")));
        assert!(!a.accepts(&word(&mp, "aaabbb")));
        for w in enumerate_words(&mp, Language::All, 8, 1 << 20).unwrap() {
            let c = classify_word(&w, &mp).unwrap();
            assert_eq!(a.accepts(&w), c.in_lbz);
        }
    }

    #[test]
    fn infeasible_cap() {
        let mp = scalar_pair(None);
        let err = build_reach_automaton(&mp, 10).unwrap_err();
        assert!(matches!(err, AutomataError::Infeasible { needed: 35, cap: 10, .. }));
    }

    #[test]
    fn flatten_examples() {
        let (prod, flat) = flatten(&[GammaLetter([Some(0), Some(1), None, None])]);
        assert_eq!(prod, [vec![0], vec![1], vec![], vec![]]);
        assert_eq!(flat, vec![0, 1]);
        let (prod, flat) = flatten(&[]);
        assert!(prod.iter().all(Vec::is_empty) && flat.is_empty());
        let (_, flat) = flatten(&[GammaLetter::single(1, 1), GammaLetter::single(0, 0)]);
        assert_eq!(flat, vec![0, 1]);
    }

    #[test]
    fn determinize_complete_product() {
        let mp = scalar_pair(Some(3));
        let cover = build_cover_automaton(&mp, 100).unwrap();
        let reach = build_reach_automaton(&mp, 100).unwrap();
        let prod = cover.product(&reach, 1000).unwrap();
        let dfa = prod.determinize(1000).unwrap().complete().unwrap();
        assert!(dfa.is_complete());
        for w in enumerate_words(&mp, Language::All, 7, 1 << 20).unwrap() {
            let both = cover.accepts(&w) && reach.accepts(&w);
            assert_eq!(prod.accepts(&w), both);
            assert_eq!(dfa.accepts(&w), both);
            assert_eq!(prod.trim().accepts(&w), both);
        }
    }

    fn check_witness(w: &[usize], mp: &MorphismPair) {
        let wit = construct_zero_witness(w, mp).unwrap();
        let zero = build_zero_automaton(mp, DEFAULT_MAX_STATES).unwrap();
        let pos = |g: &GammaLetter| zero.alphabet().iter().position(|h| h == g).unwrap();
        let mut word: Vec<GammaLetter> = wit.w_word.clone();
        for k in 0..=3 {
            let idx: Vec<usize> = word.iter().map(pos).collect();
            assert!(zero.accepts(&idx), "W U^{k} rejected for {w:?}");
            assert_eq!(flatten(&word).1, wit.expected_flat(k));
            word.extend(wit.u_word.iter().copied());
        }
        assert!(is_stable(&mp.phi_word(&wit.u)).unwrap());
        assert!(is_stable(&mp.phi_word(&wit.v)).unwrap());
        assert_eq!(
            [&wit.x1, &wit.u, &wit.x2, &wit.w1, &wit.y2, &wit.v, &wit.y1, &wit.w2]
                .into_iter()
                .flatten()
                .copied()
                .collect::<Vec<_>>(),
            w
        );
    }

    #[test]
    fn zero_witness_examples() {
        let mp = scalar_pair(Some(1));
        let w = word(&mp, "aabb");
        let wit = construct_zero_witness(&w, &mp).unwrap();
        assert_eq!(wit.x1.len() + wit.u.len() + wit.x2.len(), 1);
        check_witness(&w, &mp);
        check_witness(&word(&mp, "bbaa"), &mp);
        assert!(construct_zero_witness(&[], &mp).is_err());
        let wide = scalar_pair(Some(3));
        assert!(construct_zero_witness(&word(&wide, "ab"), &wide).is_err());
    }

    #[test]
    fn zero_witness_all_short_words() {
        let mp = scalar_pair(Some(1));
        for w in enumerate_words(&mp, Language::Zero, 10, 1 << 20).unwrap() {
            if !classify_word(&w, &mp).unwrap().in_lbz {
                check_witness(&w, &mp);
            }
        }
    }
}
