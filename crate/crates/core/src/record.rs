//! Source corpora and conversation records.
//!
//! A source problem is a labeled statement; a conversation record is one
//! training or evaluation example in chat form: a system prompt, exactly
//! one user message carrying the (translated or untranslated) statement,
//! and exactly one assistant message carrying the truth label as `True` or
//! `False`. Truth labels are consumed from input metadata, never computed.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::key::TranslationKey;
use crate::token::SymbolInventory;
use crate::transform::{translate_text, TransformError};

/// Default system prompt used when the config supplies none.
pub const DEFAULT_SYSTEM_PROMPT: &str =
    "Decide whether the given statement is true or false. Answer with exactly one word: True or False.";

/// Roles accepted by the validator. The builder only ever emits the first
/// three; `function` is accepted on input but never produced.
pub const VALID_ROLES: &[&str] = &["system", "user", "assistant", "function"];

pub const ROLE_SYSTEM: &str = "system";
pub const ROLE_USER: &str = "user";
pub const ROLE_ASSISTANT: &str = "assistant";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: String,
    pub content: String,
}

impl Message {
    pub fn new(role: &str, content: impl Into<String>) -> Self {
        Message {
            role: role.to_string(),
            content: content.into(),
        }
    }
}

/// One line of a chat-format dataset file: `{"messages":[…]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConversationRecord {
    pub messages: Vec<Message>,
}

impl ConversationRecord {
    /// Messages to send to a model: everything except the assistant answer.
    pub fn prompt_messages(&self) -> impl Iterator<Item = &Message> {
        self.messages.iter().filter(|m| m.role != ROLE_ASSISTANT)
    }

    pub fn user_content(&self) -> Option<&str> {
        self.messages
            .iter()
            .find(|m| m.role == ROLE_USER)
            .map(|m| m.content.as_str())
    }

    pub fn assistant_content(&self) -> Option<&str> {
        self.messages
            .iter()
            .find(|m| m.role == ROLE_ASSISTANT)
            .map(|m| m.content.as_str())
    }

    /// Ground-truth label recovered from the assistant message.
    pub fn expected_label(&self) -> Option<bool> {
        match self.assistant_content() {
            Some("True") => Some(true),
            Some("False") => Some(false),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    TrainingCorpus,
    UnseenCorpus,
}

/// A labeled statement from an input corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceProblem {
    pub id: String,
    pub statement: String,
    pub truth_label: bool,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { id: String, line: usize },
    #[error("line {line}: missing truth label")]
    MissingLabel { line: usize },
}

/// An ingested corpus with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub origin: Origin,
    problems: Vec<SourceProblem>,
}

impl Corpus {
    /// Parse line-delimited `{"id":…,"statement":…,"label":…}` records.
    /// Blank lines are skipped; line numbers in errors are 1-based.
    pub fn from_lines<'a, I>(lines: I, origin: Origin) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut problems: Vec<SourceProblem> = Vec::new();
        let mut seen = alloc::collections::BTreeSet::new();
        for (idx, raw) in lines.into_iter().enumerate() {
            let line = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let problem = parse_source_line(raw, line, origin)?;
            if !seen.insert(problem.id.clone()) {
                return Err(CorpusError::DuplicateId {
                    id: problem.id,
                    line,
                });
            }
            problems.push(problem);
        }
        Ok(Corpus { origin, problems })
    }

    pub fn len(&self) -> usize {
        self.problems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.problems.is_empty()
    }

    pub fn problems(&self) -> &[SourceProblem] {
        &self.problems
    }
}

fn parse_source_line(raw: &str, line: usize, origin: Origin) -> Result<SourceProblem, CorpusError> {
    let value: serde_json::Value =
        serde_json::from_str(raw).map_err(|e| CorpusError::Parse {
            line,
            message: e.to_string(),
        })?;
    let obj = value.as_object().ok_or_else(|| CorpusError::Parse {
        line,
        message: "expected a JSON object".to_string(),
    })?;
    let label = obj
        .get("label")
        .ok_or(CorpusError::MissingLabel { line })?
        .as_bool()
        .ok_or_else(|| CorpusError::Parse {
            line,
            message: "label must be a boolean".to_string(),
        })?;
    let id = obj
        .get("id")
        .and_then(|v| v.as_str())
        .ok_or_else(|| CorpusError::Parse {
            line,
            message: "missing string field `id`".to_string(),
        })?;
    let statement = obj
        .get("statement")
        .and_then(|v| v.as_str())
        .ok_or_else(|| CorpusError::Parse {
            line,
            message: "missing string field `statement`".to_string(),
        })?;
    if statement.is_empty() {
        return Err(CorpusError::Parse {
            line,
            message: "statement must be non-empty".to_string(),
        });
    }
    Ok(SourceProblem {
        id: id.to_string(),
        statement: statement.to_string(),
        truth_label: label,
        origin,
    })
}

/// Build a record for one problem. `key: None` keeps the statement in its
/// source (Lean) form; otherwise the user content is the translation.
pub fn build_record(
    problem: &SourceProblem,
    key: Option<&TranslationKey>,
    inventory: &SymbolInventory,
    system_prompt: &str,
) -> Result<ConversationRecord, TransformError> {
    let user_content = match key {
        Some(k) => translate_text(&problem.statement, k, inventory)?,
        None => problem.statement.clone(),
    };
    let label = if problem.truth_label { "True" } else { "False" };
    Ok(ConversationRecord {
        messages: alloc::vec![
            Message::new(ROLE_SYSTEM, system_prompt),
            Message::new(ROLE_USER, user_content),
            Message::new(ROLE_ASSISTANT, label),
        ],
    })
}

/// A reason a record fails validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyMessages,
    FirstNotSystem,
    InvalidRole { index: usize, role: String },
    MissingUser,
    MultipleUser { count: usize },
    MissingAssistant,
    MultipleAssistant { count: usize },
    BadAssistantContent { content: String },
}

/// Check every record invariant; an empty list means the record is valid.
/// Violations are returned, not thrown, so callers can report them all.
pub fn validate_record(record: &ConversationRecord) -> Vec<Violation> {
    let mut violations = Vec::new();
    if record.messages.is_empty() {
        violations.push(Violation::EmptyMessages);
        return violations;
    }
    if record.messages[0].role != ROLE_SYSTEM {
        violations.push(Violation::FirstNotSystem);
    }
    for (index, m) in record.messages.iter().enumerate() {
        if !VALID_ROLES.contains(&m.role.as_str()) {
            violations.push(Violation::InvalidRole {
                index,
                role: m.role.clone(),
            });
        }
    }
    let users = record
        .messages
        .iter()
        .filter(|m| m.role == ROLE_USER)
        .count();
    match users {
        0 => violations.push(Violation::MissingUser),
        1 => {}
        count => violations.push(Violation::MultipleUser { count }),
    }
    let assistants: Vec<&Message> = record
        .messages
        .iter()
        .filter(|m| m.role == ROLE_ASSISTANT)
        .collect();
    match assistants.len() {
        0 => violations.push(Violation::MissingAssistant),
        1 => {
            let content = assistants[0].content.as_str();
            if content != "True" && content != "False" {
                violations.push(Violation::BadAssistantContent {
                    content: content.to_string(),
                });
            }
        }
        count => violations.push(Violation::MultipleAssistant { count }),
    }
    violations
}
