use std::path::PathBuf;

use closure_core::corpus::{corpus_files, CorpusEntry, EntryBody};
use closure_core::instance::{run_pipeline, InstanceFile, RunOptions};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn entries() -> Vec<CorpusEntry> {
    corpus_files(&corpus_dir())
        .unwrap()
        .iter()
        .map(|f| CorpusEntry::from_json(&std::fs::read_to_string(f).unwrap()).unwrap())
        .collect()
}

#[test]
fn corpus_is_present() {
    assert!(entries().len() >= 10);
}

#[test]
fn instances_round_trip_through_rendering() {
    for entry in entries() {
        let rendered = serde_json::to_string_pretty(&entry).unwrap();
        assert_eq!(CorpusEntry::from_json(&rendered).unwrap(), entry, "{}", entry.name);
        if let EntryBody::Instance { instance, .. } = &entry.body {
            let again = InstanceFile::from_json(&instance.to_json_pretty()).unwrap();
            assert_eq!(&again, instance, "{}", entry.name);
        }
    }
}

#[test]
fn generator_lists_are_deterministic() {
    let opts = RunOptions { skip_oracle: true, ..RunOptions::default() };
    for entry in entries() {
        let EntryBody::Instance { instance, .. } = &entry.body else { continue };
        if instance.reduction.is_some() {
            continue;
        }
        let first = run_pipeline(instance, &opts).unwrap();
        let second = run_pipeline(instance, &opts).unwrap();
        assert_eq!(first.generators, second.generators, "{}", entry.name);
    }
}
