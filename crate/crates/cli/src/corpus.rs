//! Corpus ingestion, training-file emission, and test-set files.
//!
//! Training and test-set files are line-delimited `{"messages":[…]}`
//! records. Each test set additionally gets a manifest
//! `{name, provenance, form, seed, ids}` whose `ids` align with the record
//! file's line order; test-set records keep their assistant answer so runs
//! can be scored offline.

use std::path::{Path, PathBuf};

use proplang_core::{
    build_record, plan_dataset, sample_test_sets, validate_record, ConversationRecord, Corpus,
    DatasetSpec, EvalItem, Form, Origin, Provenance, SamplePlan, SymbolInventory, TestSet,
    TranslationKey,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub fn read_corpus(path: &Path, origin: Origin) -> Result<Corpus, CliError> {
    let text = crate::read_to_string(path)?;
    Corpus::from_lines(text.lines(), origin)
        .map_err(|e| CliError::data(format!("corpus {}: {e}", path.display())))
}

/// Counts reported by a dataset emission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EmissionSummary {
    pub written: usize,
    pub skipped: usize,
}

/// Write a seeded, size-controlled training file. Every record is
/// re-validated before writing; any violation aborts the emission.
pub fn emit_dataset(
    corpus: &Corpus,
    spec: &DatasetSpec,
    key: Option<&TranslationKey>,
    inventory: &SymbolInventory,
    system_prompt: &str,
    out: &Path,
) -> Result<EmissionSummary, CliError> {
    let selected = plan_dataset(corpus, spec).map_err(|e| CliError::data(e.to_string()))?;
    let mut lines = String::new();
    for problem in selected {
        let record = build_record(problem, key, inventory, system_prompt)
            .map_err(|e| CliError::data(format!("problem {}: {e}", problem.id)))?;
        push_validated_line(&mut lines, &record, &problem.id)?;
    }
    crate::write_string(out, &lines)?;
    Ok(EmissionSummary {
        written: spec.size,
        skipped: 0,
    })
}

fn push_validated_line(
    lines: &mut String,
    record: &ConversationRecord,
    id: &str,
) -> Result<(), CliError> {
    let violations = validate_record(record);
    if !violations.is_empty() {
        return Err(CliError::data(format!(
            "record {id} failed validation: {violations:?}"
        )));
    }
    let line = serde_json::to_string(record)
        .map_err(|e| CliError::data(format!("serializing record {id}: {e}")))?;
    lines.push_str(&line);
    lines.push('\n');
    Ok(())
}

/// Test-set sidecar: provenance plus the id of every record, in file order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestSetManifest {
    pub name: String,
    pub provenance: Provenance,
    pub form: Form,
    pub seed: u64,
    pub ids: Vec<String>,
}

pub fn records_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("testset-{name}.jsonl"))
}

pub fn manifest_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("testset-{name}.manifest.json"))
}

/// Materialize one test set as a record file plus manifest.
pub fn write_test_set(set: &TestSet, dir: &Path) -> Result<(), CliError> {
    let mut lines = String::new();
    for item in &set.items {
        push_validated_line(&mut lines, &item.record, &item.id)?;
    }
    crate::write_string(&records_path(dir, &set.name), &lines)?;
    let manifest = TestSetManifest {
        name: set.name.clone(),
        provenance: set.provenance,
        form: set.form,
        seed: set.seed,
        ids: set.items.iter().map(|i| i.id.clone()).collect(),
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::data(format!("serializing manifest {}: {e}", set.name)))?;
    crate::write_string(&manifest_path(dir, &set.name), &json)
}

/// Sample and write all test sets for one corpus. Returns the set names.
pub fn build_test_sets(
    corpus: &Corpus,
    provenance: Provenance,
    key: &TranslationKey,
    inventory: &SymbolInventory,
    system_prompt: &str,
    plan: &SamplePlan,
    dir: &Path,
) -> Result<Vec<String>, CliError> {
    let sets = sample_test_sets(corpus, provenance, key, inventory, system_prompt, plan)
        .map_err(|e| CliError::data(e.to_string()))?;
    let mut names = Vec::new();
    for set in &sets {
        write_test_set(set, dir)?;
        names.push(set.name.clone());
    }
    Ok(names)
}

/// Load a test set back from its manifest and record file.
pub fn load_test_set(dir: &Path, name: &str) -> Result<TestSet, CliError> {
    let manifest_text = crate::read_to_string(&manifest_path(dir, name))?;
    let manifest: TestSetManifest = serde_json::from_str(&manifest_text)
        .map_err(|e| CliError::data(format!("manifest {name}: {e}")))?;
    let records_text = crate::read_to_string(&records_path(dir, name))?;
    let mut items = Vec::new();
    for (i, line) in records_text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let record: ConversationRecord = serde_json::from_str(line)
            .map_err(|e| CliError::data(format!("test set {name} line {}: {e}", i + 1)))?;
        let id = manifest.ids.get(i).cloned().ok_or_else(|| {
            CliError::data(format!("test set {name}: more records than manifest ids"))
        })?;
        let expected = record.expected_label().ok_or_else(|| {
            CliError::data(format!("test set {name} record {id}: no True/False answer"))
        })?;
        items.push(EvalItem {
            id,
            record,
            expected,
        });
    }
    if items.len() != manifest.ids.len() {
        return Err(CliError::data(format!(
            "test set {name}: manifest lists {} ids but file has {} records",
            manifest.ids.len(),
            items.len()
        )));
    }
    Ok(TestSet {
        name: manifest.name,
        provenance: manifest.provenance,
        form: manifest.form,
        seed: manifest.seed,
        items,
    })
}

/// Names of every test set with a manifest in `dir`, sorted.
pub fn list_test_sets(dir: &Path) -> Result<Vec<String>, CliError> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(format!("listing {}", dir.display()), e))?;
    let mut names = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| CliError::io("reading directory entry", e))?;
        let file_name = entry.file_name();
        let file_name = file_name.to_string_lossy();
        if let Some(rest) = file_name.strip_prefix("testset-") {
            if let Some(name) = rest.strip_suffix(".manifest.json") {
                names.push(name.to_string());
            }
        }
    }
    names.sort();
    Ok(names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proplang_core::record::DEFAULT_SYSTEM_PROMPT;
    use proplang_core::Message;

    fn small_corpus() -> Corpus {
        let jsonl = crate::synth::corpus_jsonl(30, 5, "p");
        Corpus::from_lines(jsonl.lines(), Origin::TrainingCorpus).unwrap()
    }

    #[test]
    fn emission_is_deterministic_and_sized() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = small_corpus();
        let key = TranslationKey::builtin_focused();
        let inv = SymbolInventory::default_lean();
        let spec = DatasetSpec {
            key_name: "focused-default".into(),
            size: 20,
            seed: 9,
        };
        let a = dir.path().join("a.jsonl");
        let b = dir.path().join("b.jsonl");
        let summary =
            emit_dataset(&corpus, &spec, Some(&key), &inv, DEFAULT_SYSTEM_PROMPT, &a).unwrap();
        emit_dataset(&corpus, &spec, Some(&key), &inv, DEFAULT_SYSTEM_PROMPT, &b).unwrap();
        assert_eq!(summary, EmissionSummary { written: 20, skipped: 0 });
        let bytes_a = std::fs::read(&a).unwrap();
        assert_eq!(bytes_a, std::fs::read(&b).unwrap());
        assert_eq!(String::from_utf8(bytes_a).unwrap().lines().count(), 20);
    }

    #[test]
    fn invalid_record_aborts_emission() {
        let mut lines = String::new();
        let bad = ConversationRecord {
            messages: vec![Message::new("narrator", "once upon a time")],
        };
        let err = push_validated_line(&mut lines, &bad, "p1").unwrap_err();
        assert!(matches!(err, CliError::Data(_)));
        assert!(lines.is_empty());
    }

    #[test]
    fn emitted_user_messages_detranslate_to_their_sources() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = small_corpus();
        let key = TranslationKey::builtin_focused();
        let inv = SymbolInventory::default_lean();
        let spec = DatasetSpec {
            key_name: "focused-default".into(),
            size: 30,
            seed: 13,
        };
        let path = dir.path().join("train.jsonl");
        emit_dataset(&corpus, &spec, Some(&key), &inv, DEFAULT_SYSTEM_PROMPT, &path).unwrap();

        let selected = plan_dataset(&corpus, &spec).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        for (line, problem) in text.lines().zip(selected) {
            let record: ConversationRecord = serde_json::from_str(line).unwrap();
            let restored =
                proplang_core::detranslate(record.user_content().unwrap(), &key, &inv).unwrap();
            assert_eq!(restored, problem.statement);
        }
    }

    #[test]
    fn test_sets_round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = small_corpus();
        let key = TranslationKey::builtin_random();
        let inv = SymbolInventory::default_lean();
        let plan = SamplePlan {
            n: 8,
            seed: 2,
            replicas: 2,
            disjoint: false,
        };
        let names = build_test_sets(
            &corpus,
            Provenance::Seen,
            &key,
            &inv,
            DEFAULT_SYSTEM_PROMPT,
            &plan,
            dir.path(),
        )
        .unwrap();
        assert_eq!(names.len(), 4);
        assert_eq!(list_test_sets(dir.path()).unwrap().len(), 4);

        for name in &names {
            let set = load_test_set(dir.path(), name).unwrap();
            assert_eq!(set.items.len(), 8);
            assert_eq!(&set.name, name);
        }

        // lean/translated pairs share ids in order
        let lean = load_test_set(dir.path(), "seen-lean-1").unwrap();
        let translated = load_test_set(dir.path(), "seen-translated-1").unwrap();
        assert_eq!(lean.ids(), translated.ids());
    }
}
