//! Core algorithms for translating Lean-style logical statements into
//! constructed propositional languages and measuring model accuracy on them.
//!
//! Everything in this crate is pure computation over owned data: lossless
//! tokenization, paren/chain structure, the two reversible translation
//! strategies (symbol-map + scramble, codepoint shift + chain inversion),
//! conversation-record construction and validation, seeded sampling plans,
//! response scoring, and run aggregation. File formats, HTTP, and the CLI
//! live in the companion `proplang` crate.
//!
//! The crate is `no_std` (with `alloc`) so the transforms can be embedded
//! anywhere; nothing here touches the filesystem or clock.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod harness;
pub mod key;
pub mod record;
pub mod report;
pub mod sample;
pub mod structure;
pub mod token;
pub mod transform;

pub use harness::{
    accuracy, normalize_verdict, ClientError, ConstantClient, InvertedOracleClient, ItemResult,
    ModelClient, OracleClient, ReplayClient, ReplayParseError, RunResult, ScoreError, Verdict,
};
pub use key::{FocusedKey, KeyError, RandomKey, ScrambleSpec, TranslationKey};
pub use record::{
    build_record, validate_record, ConversationRecord, Corpus, CorpusError, Message, Origin,
    SourceProblem, Violation, DEFAULT_SYSTEM_PROMPT,
};
pub use report::{
    aggregate_runs, binomial_se, compare_size_effect, cross_model_average, cross_set_average,
    cross_set_average_weighted, figure_matrix_csv, format_sig10, provenance_mean, render_report,
    sem, uncertainty, ModelSummary, ReportError, ReportFormat, SetFamily, SetSummary, SizeEffect,
    Uncertainty,
};
pub use sample::{
    parse_set_name, plan_dataset, sample_test_sets, set_name, DatasetSpec, EvalItem, Form,
    Provenance, SampleError, SamplePlan, TestSet, TestSetError,
};
pub use structure::{parse_structure, render, ChainView, Node, StmtTree, StructureError};
pub use token::{render_tokens, tokenize, SymbolInventory, Token, TokenKind};
pub use transform::{
    apply_symbol_map, detranslate, invert_chains, scramble, shift_codepoints, translate,
    translate_text, unapply_symbol_map, unscramble, ScrambleFault, Statement, TransformError,
};
