//! Corpus of worked examples with their published ideals, and the
//! verification that compares engine, oracle and published answers.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::closure::chain::{chain_expected, chain_sets, chain_vanishing_spaces};
use crate::closure::{ideal_slice, IdealGens};
use crate::error::Error;
use crate::instance::{run_pipeline, InstanceFile, RunOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Discrepancy,
}

/// What an instance entry is expected to produce.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    /// Generators of the published ideal, if one is stated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub published_ideal: Option<Vec<String>>,
    /// `PASS` when the engine must reproduce the published ideal,
    /// `DISCREPANCY` when the published ideal is known to be inconsistent
    /// and the oracle decides.
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntryBody {
    Instance { instance: InstanceFile, expect: Expectation },
    /// The non-stabilizing chain of finite monoids.
    Chain { steps: usize, degree: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(flatten)]
    pub body: EntryBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryResult {
    pub name: String,
    pub file: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<String>,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorpusReport {
    pub entries: Vec<EntryResult>,
}

impl CorpusReport {
    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| e.status == Status::Fail).count()
    }
}

impl CorpusEntry {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Schema(format!("corpus entry: {e}")))
    }
}

/// JSON files of a corpus directory, sorted by name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, Error> {
    let read = fs::read_dir(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = read
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every entry of the directory; failures are entries, not errors.
pub fn verify_corpus(dir: &Path) -> Result<CorpusReport, Error> {
    let mut report = CorpusReport::default();
    for file in corpus_files(dir)? {
        let shown = file.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        let start = std::time::Instant::now();
        let parsed = fs::read_to_string(&file)
            .map_err(|e| Error::Io(e.to_string()))
            .and_then(|text| CorpusEntry::from_json(&text));
        let mut result = match parsed {
            Ok(entry) => verify_entry(&entry),
            Err(e) => EntryResult {
                name: shown.clone(),
                file: String::new(),
                status: Status::Fail,
                detail: e.to_string(),
                generators: Vec::new(),
                elapsed_ms: 0,
            },
        };
        result.file = shown;
        result.elapsed_ms = start.elapsed().as_millis();
        report.entries.push(result);
    }
    Ok(report)
}

fn outcome(name: &str, status: Status, detail: String, generators: Vec<String>) -> EntryResult {
    EntryResult { name: name.to_string(), file: String::new(), status, detail, generators, elapsed_ms: 0 }
}

/// Verifies one entry.
pub fn verify_entry(entry: &CorpusEntry) -> EntryResult {
    match &entry.body {
        EntryBody::Instance { instance, expect } => verify_instance(&entry.name, instance, expect),
        EntryBody::Chain { steps, degree } => verify_chain(&entry.name, *steps, *degree),
    }
}

fn verify_instance(name: &str, instance: &InstanceFile, expect: &Expectation) -> EntryResult {
    let report = match run_pipeline(instance, &RunOptions::default()) {
        Ok(r) => r,
        Err(e) => return outcome(name, Status::Fail, e.to_string(), Vec::new()),
    };
    let oracle_note = match (report.oracle_achieved_len, report.oracle_stabilized) {
        (Some(len), Some(true)) => format!("oracle agrees, stabilized by length {len}"),
        (Some(len), _) => format!("oracle consistent up to length {len}, not stabilized"),
        _ => "oracle not run".to_string(),
    };
    let gens = report.generators.clone();
    let Some(published) = &expect.published_ideal else {
        return outcome(name, Status::Pass, oracle_note, gens);
    };
    let slice = match ideal_slice(&IdealGens::new(instance.dimension, published.iter().cloned()), instance.degree) {
        Ok(s) => s,
        Err(e) => return outcome(name, Status::Fail, format!("published ideal: {e}"), gens),
    };
    let matches = slice == report.space;
    match (expect.status, matches) {
        (_, true) => outcome(name, Status::Pass, format!("matches the published ideal; {oracle_note}"), gens),
        (Status::Discrepancy, false) => {
            let note = expect.note.clone().unwrap_or_default();
            outcome(name, Status::Discrepancy, format!("differs from the published ideal; {oracle_note}. {note}"), gens)
        }
        (_, false) => outcome(
            name,
            Status::Fail,
            format!("differs from the published ideal (slice has {} generators, result {}); {oracle_note}", slice.len(), report.space.len()),
            gens,
        ),
    }
}

fn verify_chain(name: &str, steps: usize, degree: usize) -> EntryResult {
    let sets = match chain_sets(steps) {
        Ok(s) => s,
        Err(e) => return outcome(name, Status::Fail, e.to_string(), Vec::new()),
    };
    for (i, s) in sets.iter().enumerate() {
        if s != &chain_expected(i) {
            return outcome(name, Status::Fail, format!("S_{i} differs from the closed form"), Vec::new());
        }
    }
    let spaces = match chain_vanishing_spaces(&sets, degree) {
        Ok(s) => s,
        Err(e) => return outcome(name, Status::Fail, e.to_string(), Vec::new()),
    };
    let strict = spaces.windows(2).all(|w| w[1].is_subspace_of(&w[0]) && w[1].len() < w[0].len());
    if !strict {
        return outcome(name, Status::Fail, format!("vanishing spaces at degree {degree} are not strictly shrinking"), Vec::new());
    }
    let sizes: Vec<String> = sets.iter().map(|s| s.len().to_string()).collect();
    outcome(
        name,
        Status::Pass,
        format!("S_0..S_{steps} have sizes {}; vanishing spaces strictly shrink at degree {degree}", sizes.join(", ")),
        Vec::new(),
    )
}
