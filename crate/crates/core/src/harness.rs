//! Verdict normalization, run scoring, and the model-client interface.
//!
//! Scoring is a pure fold over (item, response) pairs and is independent of
//! the order responses arrived in, which is what lets the concurrent driver
//! in the companion crate produce identical results at any parallelism.
//! Unknown verdicts count as incorrect — the accuracy definition has no
//! third bucket.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::sample::EvalItem;

/// Normalized model answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    pub fn matches(&self, expected: bool) -> bool {
        matches!(
            (self, expected),
            (Verdict::True, true) | (Verdict::False, false)
        )
    }
}

/// Extract a verdict from free-form response text: the first standalone
/// `true`/`false` word, case-insensitive, wins; anything else is unknown.
/// Words are maximal alphanumeric runs, so "untrue" does not match.
pub fn normalize_verdict(response_text: &str) -> Verdict {
    let mut word = String::new();
    for ch in response_text.chars().chain(core::iter::once(' ')) {
        if ch.is_alphanumeric() {
            word.extend(ch.to_lowercase());
            continue;
        }
        match word.as_str() {
            "true" => return Verdict::True,
            "false" => return Verdict::False,
            _ => word.clear(),
        }
    }
    Verdict::Unknown
}

/// Outcome for one queried item; the raw response is kept verbatim so a
/// run can be re-scored offline under a different normalization policy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemResult {
    pub id: String,
    pub expected: bool,
    pub verdict: Verdict,
    pub raw_response: String,
}

/// Scored results for one test set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub test_set_name: String,
    pub total: usize,
    pub correct: usize,
    pub per_item: Vec<ItemResult>,
}

impl RunResult {
    /// Score a complete response set. `responses` must align with `items`.
    pub fn from_responses(
        test_set_name: impl Into<String>,
        items: &[EvalItem],
        responses: &[String],
    ) -> RunResult {
        debug_assert_eq!(items.len(), responses.len());
        let per_item: Vec<ItemResult> = items
            .iter()
            .zip(responses)
            .map(|(item, raw)| ItemResult {
                id: item.id.clone(),
                expected: item.expected,
                verdict: normalize_verdict(raw),
                raw_response: raw.clone(),
            })
            .collect();
        let correct = per_item
            .iter()
            .filter(|r| r.verdict.matches(r.expected))
            .count();
        RunResult {
            test_set_name: test_set_name.into(),
            total: per_item.len(),
            correct,
            per_item,
        }
    }

    /// A result carrying only counts, with a synthesized transcript that
    /// satisfies the type's invariants. Used for aggregate fixtures where
    /// the per-item transcripts were never recorded.
    pub fn from_counts(test_set_name: impl Into<String>, total: usize, correct: usize) -> RunResult {
        debug_assert!(correct <= total);
        let per_item = (0..total)
            .map(|i| ItemResult {
                id: alloc::format!("fixture-{i}"),
                expected: true,
                verdict: if i < correct {
                    Verdict::True
                } else {
                    Verdict::False
                },
                raw_response: String::new(),
            })
            .collect();
        RunResult {
            test_set_name: test_set_name.into(),
            total,
            correct,
            per_item,
        }
    }

    pub fn accuracy(&self) -> Result<f64, ScoreError> {
        accuracy(self.correct, self.total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ScoreError {
    #[error("cannot compute accuracy over zero queries")]
    ZeroTotal,
}

/// Percent of correctly answered queries, full precision.
pub fn accuracy(correct: usize, total: usize) -> Result<f64, ScoreError> {
    if total == 0 {
        return Err(ScoreError::ZeroTotal);
    }
    debug_assert!(correct <= total);
    Ok(100.0 * correct as f64 / total as f64)
}

/// Client failure modes. Transport errors are retryable; permanent errors
/// abort the run immediately.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClientError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("permanent: {0}")]
    Permanent(String),
}

/// A chat-completion endpoint, real or mock. Implementations must be safe
/// for concurrent use; mocks are deterministic by construction.
pub trait ModelClient: Sync {
    fn complete(&self, item: &EvalItem) -> Result<String, ClientError>;
}

/// Echoes the ground-truth label. Upper bound: always scores 100%.
pub struct OracleClient;

impl ModelClient for OracleClient {
    fn complete(&self, item: &EvalItem) -> Result<String, ClientError> {
        Ok(if item.expected { "True" } else { "False" }.to_string())
    }
}

/// Echoes the wrong label. Lower bound: always scores 0%.
pub struct InvertedOracleClient;

impl ModelClient for InvertedOracleClient {
    fn complete(&self, item: &EvalItem) -> Result<String, ClientError> {
        Ok(if item.expected { "False" } else { "True" }.to_string())
    }
}

/// Answers the same text for every item; scores the label base rate.
pub struct ConstantClient {
    pub answer: String,
}

impl ConstantClient {
    pub fn new(answer: impl Into<String>) -> Self {
        ConstantClient {
            answer: answer.into(),
        }
    }
}

impl ModelClient for ConstantClient {
    fn complete(&self, _item: &EvalItem) -> Result<String, ClientError> {
        Ok(self.answer.clone())
    }
}

/// Replays recorded responses keyed by item id. The fixture format is
/// line-delimited `{"id":…,"response":…}`.
pub struct ReplayClient {
    responses: BTreeMap<String, String>,
}

impl ReplayClient {
    pub fn new(responses: BTreeMap<String, String>) -> Self {
        ReplayClient { responses }
    }

    pub fn parse(text: &str) -> Result<Self, ReplayParseError> {
        #[derive(Deserialize)]
        struct Line {
            id: String,
            response: String,
        }
        let mut responses = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let line: Line = serde_json::from_str(raw).map_err(|e| ReplayParseError {
                line: idx + 1,
                message: e.to_string(),
            })?;
            responses.insert(line.id, line.response);
        }
        Ok(ReplayClient { responses })
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("replay fixture line {line}: {message}")]
pub struct ReplayParseError {
    pub line: usize,
    pub message: String,
}

impl ModelClient for ReplayClient {
    fn complete(&self, item: &EvalItem) -> Result<String, ClientError> {
        self.responses
            .get(&item.id)
            .cloned()
            .ok_or_else(|| ClientError::Permanent(alloc::format!("no recorded response for {}", item.id)))
    }
}
