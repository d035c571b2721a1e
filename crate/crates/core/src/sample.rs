//! Seeded selection of training datasets and test sets.
//!
//! All randomness flows through ChaCha20 seeded from a caller-supplied
//! 64-bit seed, with Fisher–Yates shuffles over index vectors, so every
//! selection is reproducible across runs and platforms. Replica `r` of a
//! test-set plan draws from a generator seeded with `seed + r`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::key::TranslationKey;
use crate::record::{build_record, ConversationRecord, Corpus, SourceProblem};
use crate::token::SymbolInventory;
use crate::transform::TransformError;

/// Which training file to emit: key name (or `lean`), size, and seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSpec {
    pub key_name: String,
    pub size: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SampleError {
    #[error("requested {requested} records but the corpus holds {available}")]
    SizeExceedsCorpus { requested: usize, available: usize },
}

fn shuffled_indices(len: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..len).collect();
    indices.shuffle(&mut rng);
    indices
}

/// Select `spec.size` problems by seeded shuffle. Deterministic for a fixed
/// corpus and spec; the full corpus at `size == len` comes back in seeded
/// order rather than input order.
pub fn plan_dataset<'a>(
    corpus: &'a Corpus,
    spec: &DatasetSpec,
) -> Result<Vec<&'a SourceProblem>, SampleError> {
    if spec.size > corpus.len() {
        return Err(SampleError::SizeExceedsCorpus {
            requested: spec.size,
            available: corpus.len(),
        });
    }
    let indices = shuffled_indices(corpus.len(), spec.seed);
    Ok(indices[..spec.size]
        .iter()
        .map(|&i| &corpus.problems()[i])
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Seen,
    Unseen,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Seen => "seen",
            Provenance::Unseen => "unseen",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Lean,
    Translated,
}

impl Form {
    pub fn as_str(&self) -> &'static str {
        match self {
            Form::Lean => "lean",
            Form::Translated => "translated",
        }
    }
}

/// One evaluation example: id, full conversation record (assistant answer
/// included), and the ground-truth label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalItem {
    pub id: String,
    pub record: ConversationRecord,
    pub expected: bool,
}

/// A named, seeded sample of records in one form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSet {
    pub name: String,
    pub provenance: Provenance,
    pub form: Form,
    pub seed: u64,
    pub items: Vec<EvalItem>,
}

impl TestSet {
    pub fn ids(&self) -> Vec<&str> {
        self.items.iter().map(|i| i.id.as_str()).collect()
    }
}

/// How to draw test sets from a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePlan {
    pub n: usize,
    pub seed: u64,
    pub replicas: u32,
    /// With `false` (the default) replicas are sampled independently and
    /// may overlap each other; with `true` later replicas exclude ids
    /// already drawn. Within one set there are never duplicates.
    pub disjoint: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TestSetError {
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// Draw `plan.replicas` seeded samples and materialize each in both forms
/// (Lean and translated) over the same problems in the same order. Set
/// names follow `{provenance}-{form}-{replica}` with 1-based replicas.
pub fn sample_test_sets(
    corpus: &Corpus,
    provenance: Provenance,
    key: &TranslationKey,
    inventory: &SymbolInventory,
    system_prompt: &str,
    plan: &SamplePlan,
) -> Result<Vec<TestSet>, TestSetError> {
    let needed = if plan.disjoint {
        plan.n * plan.replicas as usize
    } else {
        plan.n
    };
    if needed > corpus.len() {
        return Err(SampleError::SizeExceedsCorpus {
            requested: needed,
            available: corpus.len(),
        }
        .into());
    }

    let mut sets = Vec::new();
    let mut excluded: alloc::collections::BTreeSet<usize> = alloc::collections::BTreeSet::new();
    for replica in 0..plan.replicas {
        let replica_seed = plan.seed.wrapping_add(replica as u64);
        let pool: Vec<usize> = if plan.disjoint {
            (0..corpus.len()).filter(|i| !excluded.contains(i)).collect()
        } else {
            (0..corpus.len()).collect()
        };
        let mut rng = ChaCha20Rng::seed_from_u64(replica_seed);
        let mut pool = pool;
        pool.shuffle(&mut rng);
        let chosen = &pool[..plan.n];
        if plan.disjoint {
            excluded.extend(chosen.iter().copied());
        }

        let problems: Vec<&SourceProblem> = chosen.iter().map(|&i| &corpus.problems()[i]).collect();
        for form in [Form::Lean, Form::Translated] {
            let form_key = match form {
                Form::Lean => None,
                Form::Translated => Some(key),
            };
            let mut items = Vec::with_capacity(problems.len());
            for p in &problems {
                let record = build_record(p, form_key, inventory, system_prompt)?;
                items.push(EvalItem {
                    id: p.id.clone(),
                    record,
                    expected: p.truth_label,
                });
            }
            sets.push(TestSet {
                name: set_name(provenance, form, replica + 1),
                provenance,
                form,
                seed: replica_seed,
                items,
            });
        }
    }
    Ok(sets)
}

pub fn set_name(provenance: Provenance, form: Form, replica: u32) -> String {
    format!("{}-{}-{}", provenance.as_str(), form.as_str(), replica)
}

/// Parse a `{provenance}-{form}-{replica}` set name back into its parts.
pub fn parse_set_name(name: &str) -> Option<(Provenance, Form, u32)> {
    let mut parts = name.splitn(3, '-');
    let provenance = match parts.next()? {
        "seen" => Provenance::Seen,
        "unseen" => Provenance::Unseen,
        _ => return None,
    };
    let form = match parts.next()? {
        "lean" => Form::Lean,
        "translated" => Form::Translated,
        _ => return None,
    };
    let replica = parts.next()?.parse().ok()?;
    Some((provenance, form, replica))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::{Origin, DEFAULT_SYSTEM_PROMPT};

    fn corpus(n: usize) -> Corpus {
        let lines: Vec<String> = (0..n)
            .map(|i| {
                format!(
                    r#"{{"id":"p{i:04}","statement":"x{i} > {i}","label":{}}}"#,
                    i % 2 == 0
                )
            })
            .collect();
        Corpus::from_lines(lines.iter().map(String::as_str), Origin::TrainingCorpus).unwrap()
    }

    #[test]
    fn plan_rejects_oversized_requests() {
        let c = corpus(10);
        let spec = DatasetSpec {
            key_name: "lean".to_string(),
            size: 11,
            seed: 1,
        };
        assert_eq!(
            plan_dataset(&c, &spec).unwrap_err(),
            SampleError::SizeExceedsCorpus {
                requested: 11,
                available: 10
            }
        );
    }

    #[test]
    fn plan_is_deterministic_and_shuffled() {
        let c = corpus(100);
        let spec = DatasetSpec {
            key_name: "lean".to_string(),
            size: 100,
            seed: 7,
        };
        let a = plan_dataset(&c, &spec).unwrap();
        let b = plan_dataset(&c, &spec).unwrap();
        let ids = |v: &[&SourceProblem]| -> Vec<String> {
            v.iter().map(|p| p.id.clone()).collect()
        };
        assert_eq!(ids(&a), ids(&b));
        // full corpus, seeded order: same multiset, different arrangement
        let input_order: Vec<String> = c.problems().iter().map(|p| p.id.clone()).collect();
        assert_ne!(ids(&a), input_order);
        let mut sorted = ids(&a);
        sorted.sort();
        let mut expected = input_order;
        expected.sort();
        assert_eq!(sorted, expected);
    }

    #[test]
    fn different_seeds_give_different_orders() {
        let c = corpus(50);
        let mk = |seed| DatasetSpec {
            key_name: "lean".to_string(),
            size: 20,
            seed,
        };
        let a: Vec<String> = plan_dataset(&c, &mk(1))
            .unwrap()
            .iter()
            .map(|p| p.id.clone())
            .collect();
        let b: Vec<String> = plan_dataset(&c, &mk(2))
            .unwrap()
            .iter()
            .map(|p| p.id.clone())
            .collect();
        assert_ne!(a, b);
    }

    #[test]
    fn replicas_share_ids_across_forms() {
        let c = corpus(40);
        let key = TranslationKey::builtin_focused();
        let inv = SymbolInventory::default_lean();
        let plan = SamplePlan {
            n: 10,
            seed: 3,
            replicas: 3,
            disjoint: false,
        };
        let sets = sample_test_sets(
            &c,
            Provenance::Seen,
            &key,
            &inv,
            DEFAULT_SYSTEM_PROMPT,
            &plan,
        )
        .unwrap();
        assert_eq!(sets.len(), 6);
        for pair in sets.chunks(2) {
            assert_eq!(pair[0].form, Form::Lean);
            assert_eq!(pair[1].form, Form::Translated);
            assert_eq!(pair[0].ids(), pair[1].ids());
            assert_eq!(pair[0].items.len(), 10);
            // no duplicates within a set
            let mut ids = pair[0].ids();
            ids.sort();
            ids.dedup();
            assert_eq!(ids.len(), 10);
        }
        assert_eq!(sets[0].name, "seen-lean-1");
        assert_eq!(sets[5].name, "seen-translated-3");
    }

    #[test]
    fn disjoint_mode_prevents_overlap_between_replicas() {
        let c = corpus(30);
        let key = TranslationKey::builtin_focused();
        let inv = SymbolInventory::default_lean();
        let plan = SamplePlan {
            n: 10,
            seed: 9,
            replicas: 3,
            disjoint: true,
        };
        let sets = sample_test_sets(
            &c,
            Provenance::Unseen,
            &key,
            &inv,
            DEFAULT_SYSTEM_PROMPT,
            &plan,
        )
        .unwrap();
        let mut all_ids: Vec<String> = sets
            .iter()
            .filter(|s| s.form == Form::Lean)
            .flat_map(|s| s.items.iter().map(|i| i.id.clone()))
            .collect();
        assert_eq!(all_ids.len(), 30);
        all_ids.sort();
        all_ids.dedup();
        assert_eq!(all_ids.len(), 30, "disjoint replicas must not overlap");

        // and the plan must refuse when the corpus cannot cover it
        let too_big = SamplePlan {
            n: 11,
            seed: 9,
            replicas: 3,
            disjoint: true,
        };
        assert!(sample_test_sets(
            &c,
            Provenance::Unseen,
            &key,
            &inv,
            DEFAULT_SYSTEM_PROMPT,
            &too_big
        )
        .is_err());
    }

    #[test]
    fn whole_corpus_sample_is_seeded_order() {
        let c = corpus(12);
        let key = TranslationKey::builtin_random();
        let inv = SymbolInventory::default_lean();
        let plan = SamplePlan {
            n: 12,
            seed: 5,
            replicas: 1,
            disjoint: false,
        };
        let sets = sample_test_sets(
            &c,
            Provenance::Seen,
            &key,
            &inv,
            DEFAULT_SYSTEM_PROMPT,
            &plan,
        )
        .unwrap();
        assert_eq!(sets[0].items.len(), 12);
        let mut ids = sets[0].ids();
        ids.sort();
        let mut expected: Vec<&str> = c.problems().iter().map(|p| p.id.as_str()).collect();
        expected.sort();
        assert_eq!(ids, expected);
    }

    #[test]
    fn set_names_round_trip() {
        for (p, f, r) in [
            (Provenance::Seen, Form::Lean, 1),
            (Provenance::Unseen, Form::Translated, 3),
        ] {
            let name = set_name(p, f, r);
            assert_eq!(parse_set_name(&name), Some((p, f, r)));
        }
        assert_eq!(parse_set_name("bogus-name-1"), None);
    }

    #[test]
    fn expected_labels_flow_into_items() {
        let c = corpus(6);
        let key = TranslationKey::builtin_focused();
        let inv = SymbolInventory::default_lean();
        let plan = SamplePlan {
            n: 6,
            seed: 1,
            replicas: 1,
            disjoint: false,
        };
        let sets = sample_test_sets(
            &c,
            Provenance::Seen,
            &key,
            &inv,
            DEFAULT_SYSTEM_PROMPT,
            &plan,
        )
        .unwrap();
        for item in &sets[0].items {
            assert_eq!(item.record.expected_label(), Some(item.expected));
        }
    }
}
