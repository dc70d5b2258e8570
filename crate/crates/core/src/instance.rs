//! JSON problem instances, their validation, and pipeline dispatch with
//! oracle cross-validation.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::automata::{build_bz_automaton, build_cover_automaton, build_reach_automaton, build_zero_automaton, Nfa};
use crate::closure::{
    cover_closure_blocks, cover_closure_constrained, oracle_explore, reach_closure_blocks, reach_closure_constrained,
    regular_closure, vass_closure, zero_closure, zero_closure_constrained, Caps, OracleReport, PolySpace, Route,
};
use crate::error::Error;
use crate::exactlin::RationalMatrix;
use crate::lang::{Language, MorphismPair, Vass};
use crate::reduce::vass_to_transitions;

/// Default oracle length bound for cross-validation.
pub const DEFAULT_ORACLE_MAX_LEN: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Cover,
    Reach,
    Zero,
    Regular,
    VassCover,
    VassReach,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Cover => "cover",
            Mode::Reach => "reach",
            Mode::Zero => "zero",
            Mode::Regular => "regular",
            Mode::VassCover => "vass-cover",
            Mode::VassReach => "vass-reach",
        }
    }

    /// The language the oracle enumerates for this mode.
    pub fn oracle_language(self) -> Language {
        match self {
            Mode::Cover | Mode::VassCover => Language::Cover,
            Mode::Reach | Mode::VassReach => Language::Reach,
            Mode::Zero => Language::Zero,
            Mode::Regular => Language::All,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    /// Exact engines at the original dimension.
    #[default]
    Direct,
    /// Fold the state structure into block matrices and extract.
    Blocks,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NfaSpec {
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub accepting: Vec<String>,
    /// `[from, letter, to]`.
    pub transitions: Vec<(String, String, String)>,
}

/// A VASS counter update: an integer, or a string for unsupported
/// transition kinds such as zero tests.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VassUpdate {
    Add(i64),
    Other(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VassSpec {
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub accepting: Vec<String>,
    /// `[from, letter, update, to]`.
    pub transitions: Vec<(String, String, VassUpdate, String)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_states: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_veronese: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_words: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub dimension: usize,
    pub alphabet: Vec<String>,
    /// Letter to matrix of rational strings such as `"-3/4"`.
    pub phi: BTreeMap<String, Vec<Vec<String>>>,
    /// Letter to weight in `{-1, 0, 1}`; VASS modes take weights from the
    /// transitions and regular mode ignores them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<BTreeMap<String, i64>>,
    pub mode: Mode,
    /// Regular language for `regular` mode; an extra constraint otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nfa: Option<NfaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vass: Option<VassSpec>,
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_override: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<CapsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<Reduction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_max_len: Option<usize>,
    /// A word over the alphabet, used by the factorization-tree demo.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<String>>,
}

/// Command-line style overrides applied on top of an instance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub eta_override: Option<u64>,
    pub oracle_max_len: Option<usize>,
    pub skip_oracle: bool,
}

/// A validated instance ready for the pipelines.
#[derive(Clone, Debug)]
pub struct Problem {
    pub mode: Mode,
    pub degree: usize,
    pub caps: Caps,
    pub reduction: Reduction,
    /// The letter morphism (with weights; zero weights in regular and VASS modes).
    pub letters: MorphismPair,
    pub nfa: Option<Nfa<String>>,
    pub vass: Option<Vass>,
}

impl Problem {
    /// The morphism and constraint the pipeline and oracle actually run on:
    /// transition letters and the path automaton for VASS modes.
    pub fn effective(&self) -> Result<(MorphismPair, Option<Nfa<String>>), Error> {
        match &self.vass {
            Some(v) if matches!(self.mode, Mode::VassCover | Mode::VassReach) => {
                let (mp, paths) = vass_to_transitions(v, &self.letters)?;
                Ok((mp, Some(paths)))
            }
            _ => Ok((self.letters.clone(), self.nfa.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Timings {
    pub pipeline_ms: u128,
    pub oracle_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub mode: Mode,
    pub dimension: usize,
    pub degree: usize,
    pub eta_used: u64,
    pub eta_overridden: bool,
    pub method: String,
    pub generators: Vec<String>,
    pub oracle_checked: bool,
    pub oracle_max_len: Option<usize>,
    pub oracle_achieved_len: Option<usize>,
    pub oracle_stabilized: Option<bool>,
    pub timings: Timings,
    #[serde(skip)]
    pub space: PolySpace,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Schema(format!("instance: {e}")))
    }

    /// Accepts a bare instance or a corpus entry that wraps one.
    pub fn from_json_value(value: Value) -> Result<Self, Error> {
        let inner = match value.get("instance") {
            Some(inner) if value.get("kind").is_some() => inner.clone(),
            _ => value,
        };
        serde_json::from_value(inner).map_err(|e| Error::Schema(format!("instance: {e}")))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    /// Checks the schema and builds the morphism, automaton and VASS.
    pub fn validate(&self, opts: &RunOptions) -> Result<Problem, Error> {
        let d = self.dimension;
        if d == 0 {
            return Err(Error::Schema("dimension must be positive".into()));
        }
        if self.alphabet.is_empty() {
            return Err(Error::Schema("alphabet is empty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = self.alphabet.iter().find(|a| !seen.insert(*a)) {
            return Err(Error::Schema(format!("letter {dup:?} appears twice in the alphabet")));
        }
        for key in self.phi.keys() {
            if !self.alphabet.contains(key) {
                return Err(Error::Schema(format!("phi has an entry for unknown letter {key:?}")));
            }
        }
        let mut phis = Vec::with_capacity(self.alphabet.len());
        for a in &self.alphabet {
            let rows = self.phi.get(a).ok_or_else(|| Error::Schema(format!("letter {a:?} has no phi entry")))?;
            let m = RationalMatrix::from_strings(rows).map_err(|e| Error::Schema(format!("phi[{a:?}]: {e}")))?;
            if m.rows() != d || m.cols() != d {
                return Err(Error::Schema(format!("phi[{a:?}] is {}x{}, expected {d}x{d}", m.rows(), m.cols())));
            }
            phis.push(m);
        }
        let weighted = matches!(self.mode, Mode::Cover | Mode::Reach | Mode::Zero);
        let weights: Vec<i64> = match (&self.omega, weighted) {
            (Some(omega), _) => {
                for key in omega.keys() {
                    if !self.alphabet.contains(key) {
                        return Err(Error::Schema(format!("omega has an entry for unknown letter {key:?}")));
                    }
                }
                let mut ws = Vec::new();
                for a in &self.alphabet {
                    let w = *omega.get(a).ok_or_else(|| Error::Schema(format!("letter {a:?} has no omega entry")))?;
                    if !(-1..=1).contains(&w) {
                        return Err(Error::Schema(format!(
                            "omega[{a:?}] = {w}; weights must lie in {{-1, 0, 1}}. Normalize heavier weights by \
                             splitting the letter into a chain of unit-weight transitions (a VASS instance)"
                        )));
                    }
                    ws.push(if weighted { w } else { 0 });
                }
                ws
            }
            (None, true) => return Err(Error::Schema(format!("mode {} requires omega", self.mode.name()))),
            (None, false) => vec![0; self.alphabet.len()],
        };
        let mut letters = MorphismPair::new(self.alphabet.clone(), phis, weights)?;
        if let Some(eta) = opts.eta_override.or(self.eta_override) {
            if eta == 0 {
                return Err(Error::Schema("eta_override must be positive".into()));
            }
            letters = letters.with_eta(eta)?;
        }

        let nfa = self.nfa.as_ref().map(|spec| build_nfa(spec, &self.alphabet)).transpose()?;
        if self.mode == Mode::Regular && nfa.is_none() {
            return Err(Error::Schema("mode regular requires nfa".into()));
        }
        let vass_mode = matches!(self.mode, Mode::VassCover | Mode::VassReach);
        let vass = match (&self.vass, vass_mode) {
            (Some(spec), _) => Some(build_vass(spec, &self.alphabet)?),
            (None, true) => return Err(Error::Schema(format!("mode {} requires vass", self.mode.name()))),
            (None, false) => None,
        };
        if vass_mode && nfa.is_some() {
            return Err(Error::Schema("VASS modes take their constraint from the VASS; drop nfa".into()));
        }
        if !vass_mode && vass.is_some() {
            return Err(Error::Schema(format!("mode {} does not use vass", self.mode.name())));
        }

        let mut caps = Caps::from_env();
        if let Some(c) = &self.caps {
            caps.max_states = c.max_states.unwrap_or(caps.max_states);
            caps.max_veronese = c.max_veronese.unwrap_or(caps.max_veronese);
            caps.max_words = c.max_words.unwrap_or(caps.max_words);
        }
        let reduction = self.reduction.unwrap_or_default();
        if reduction == Reduction::Blocks && !matches!(self.mode, Mode::Reach | Mode::VassCover | Mode::VassReach | Mode::Cover) {
            return Err(Error::Schema(format!("reduction blocks is not available for mode {}", self.mode.name())));
        }
        Ok(Problem { mode: self.mode, degree: self.degree, caps, reduction, letters, nfa, vass })
    }
}

fn build_nfa(spec: &NfaSpec, alphabet: &[String]) -> Result<Nfa<String>, Error> {
    let state = |name: &str| {
        spec.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::Schema(format!("nfa: unknown state {name:?}")))
    };
    let letter = |name: &str| {
        alphabet.iter().position(|s| s == name).ok_or_else(|| Error::Schema(format!("nfa: unknown letter {name:?}")))
    };
    let initial = spec.initial.iter().map(|s| state(s)).collect::<Result<Vec<_>, _>>()?;
    let accepting = spec.accepting.iter().map(|s| state(s)).collect::<Result<Vec<_>, _>>()?;
    let transitions = spec
        .transitions
        .iter()
        .map(|(p, a, q)| Ok((state(p)?, letter(a)?, state(q)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(Nfa::new(spec.states.clone(), alphabet.to_vec(), initial, accepting, transitions)?)
}

fn build_vass(spec: &VassSpec, alphabet: &[String]) -> Result<Vass, Error> {
    let mut transitions = Vec::with_capacity(spec.transitions.len());
    for (i, (from, letter, update, to)) in spec.transitions.iter().enumerate() {
        let w = match update {
            VassUpdate::Add(w) => *w,
            VassUpdate::Other(s) => {
                return Err(Error::Schema(format!(
                    "vass transition {i} has update {s:?}; zero tests and other non-additive updates are not \
                     supported (split the run at each zero test into reachability segments by hand)"
                )))
            }
        };
        if !(-1..=1).contains(&w) {
            return Err(Error::Schema(format!(
                "vass transition {i} has update {w}; updates must lie in {{-1, 0, 1}}. Normalize by replacing it \
                 with a chain of unit-update transitions through fresh states"
            )));
        }
        if !alphabet.contains(letter) {
            return Err(Error::Schema(format!("vass transition {i} uses unknown letter {letter:?}")));
        }
        for s in [from, to] {
            if !spec.states.contains(s) {
                return Err(Error::Schema(format!("vass transition {i} uses unknown state {s:?}")));
            }
        }
        transitions.push((from.clone(), letter.clone(), w, to.clone()));
    }
    for s in spec.initial.iter().chain(&spec.accepting) {
        if !spec.states.contains(s) {
            return Err(Error::Schema(format!("vass: unknown state {s:?}")));
        }
    }
    if spec.initial.is_empty() {
        return Err(Error::Schema("vass: no initial state".into()));
    }
    Ok(Vass {
        states: spec.states.clone(),
        initial: spec.initial.clone(),
        accepting: spec.accepting.clone(),
        transitions,
    })
}

/// Runs the pipeline for a validated problem and returns the space with a
/// label naming the construction used.
pub fn solve(problem: &Problem) -> Result<(PolySpace, String), Error> {
    let (mode, d, caps) = (problem.mode, problem.degree, &problem.caps);
    let mp = &problem.letters;
    let constraint = problem.nfa.as_ref();
    let blocks = problem.reduction == Reduction::Blocks;
    let out = match mode {
        Mode::Regular => {
            let nfa = constraint.expect("validated");
            (regular_closure(nfa, mp.phis(), d, caps)?, "regular fixpoint".to_string())
        }
        Mode::Cover if blocks => (cover_closure_blocks(mp, constraint, d, caps)?, "cover automaton, block route".into()),
        Mode::Cover => (cover_closure_constrained(mp, constraint, d, caps)?, "cover automaton".into()),
        Mode::Reach if blocks => (reach_closure_blocks(mp, constraint, d, caps)?, "reach automaton, block route".into()),
        Mode::Reach => (reach_closure_constrained(mp, constraint, d, caps)?, "reach automaton, counter engine".into()),
        Mode::Zero if constraint.is_none() => {
            let literal = crate::closure::pipelines::zero_literal_feasible(mp, d, caps);
            let label = if literal { "bounded-zero and four-track automata" } else { "counter engine" };
            (zero_closure(mp, d, caps)?, label.into())
        }
        Mode::Zero => (zero_closure_constrained(mp, constraint, d, caps)?, "counter engine".into()),
        Mode::VassCover | Mode::VassReach => {
            let vass = problem.vass.as_ref().expect("validated");
            let route = if blocks { Route::Blocks } else { Route::Direct };
            let reach = mode == Mode::VassReach;
            let label = match (reach, blocks) {
                (false, false) => "transition alphabet, cover automaton",
                (false, true) => "transition alphabet, cover automaton, block route",
                (true, false) => "transition alphabet, reach automaton, counter engine",
                (true, true) => "transition alphabet, reach automaton, block route",
            };
            (vass_closure(vass, mp, reach, route, d, caps)?, label.into())
        }
    };
    Ok(out)
}

/// Oracle over the problem's effective language.
pub fn oracle_for(problem: &Problem, max_len: usize) -> Result<OracleReport, Error> {
    let (mp, constraint) = problem.effective()?;
    Ok(oracle_explore(&mp, problem.mode.oracle_language(), constraint.as_ref(), problem.degree, max_len, &problem.caps)?)
}

/// Compares an engine result with an oracle report. The oracle space can
/// only shrink as the length grows, so the engine must be inside it; once
/// the oracle has stabilized the two must be equal.
pub fn check_against_oracle(space: &PolySpace, oracle: &OracleReport) -> Result<(), Error> {
    if !space.is_subspace_of(&oracle.space) {
        let witness = space
            .space()
            .basis()
            .iter()
            .zip(space.polynomials())
            .find(|(v, _)| !oracle.space.space().contains(v))
            .map(|(_, p)| p.render())
            .unwrap_or_default();
        return Err(Error::OracleDisagreement(format!(
            "the result claims {witness} vanishes, but it fails on a word of length <= {}",
            oracle.achieved_len
        )));
    }
    if oracle.stabilized && space != &oracle.space {
        return Err(Error::OracleDisagreement(format!(
            "the oracle stabilized at length {} with {} generators, the result has {}",
            oracle.achieved_len,
            oracle.space.len(),
            space.len()
        )));
    }
    Ok(())
}

/// Validates, solves and cross-validates one instance.
pub fn run_pipeline(instance: &InstanceFile, opts: &RunOptions) -> Result<Report, Error> {
    let problem = instance.validate(opts)?;
    let start = Instant::now();
    let (space, method) = solve(&problem)?;
    let pipeline_ms = start.elapsed().as_millis();
    let max_len = opts.oracle_max_len.or(instance.oracle_max_len).unwrap_or(DEFAULT_ORACLE_MAX_LEN);
    let mut report = Report {
        mode: problem.mode,
        dimension: problem.letters.dim(),
        degree: problem.degree,
        eta_used: problem.letters.eta(),
        eta_overridden: problem.letters.eta_overridden(),
        method,
        generators: space.generators(),
        oracle_checked: false,
        oracle_max_len: None,
        oracle_achieved_len: None,
        oracle_stabilized: None,
        timings: Timings { pipeline_ms, oracle_ms: 0 },
        space,
    };
    if opts.skip_oracle {
        return Ok(report);
    }
    let start = Instant::now();
    let oracle = oracle_for(&problem, max_len)?;
    report.timings.oracle_ms = start.elapsed().as_millis();
    check_against_oracle(&report.space, &oracle)?;
    report.oracle_checked = true;
    report.oracle_max_len = Some(max_len);
    report.oracle_achieved_len = Some(oracle.achieved_len);
    report.oracle_stabilized = Some(oracle.stabilized);
    Ok(report)
}

/// Which automaton to dump.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Cover,
    Reach,
    Zero,
    Bz,
}

/// JSON dump of one of the counter automata for the instance's morphism.
pub fn dump_automaton(problem: &Problem, which: Which) -> Result<Value, Error> {
    let (mp, _) = problem.effective()?;
    let cap = problem.caps.max_states;
    Ok(match which {
        Which::Cover => build_cover_automaton(&mp, cap)?.to_json_with(Clone::clone),
        Which::Reach => build_reach_automaton(&mp, cap)?.to_json_with(Clone::clone),
        Which::Bz => build_bz_automaton(&mp, cap)?.to_json_with(Clone::clone),
        Which::Zero => {
            let alphabet = mp.alphabet().to_vec();
            build_zero_automaton(&mp, cap)?.to_json_with(|g| g.render(&alphabet))
        }
    })
}
