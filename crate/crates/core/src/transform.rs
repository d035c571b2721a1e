//! The two reversible translation strategies over tokens and trees.
//!
//! Focused keys rewrite symbol tokens through the key map, then scramble:
//! the token sequence gets a separator and its own reversal appended.
//! Random keys mirror the statement around its top-level chain operators
//! and then shift every Unicode scalar by the key's offset. Inversion runs
//! before shifting because the operators are only recognizable pre-shift.
//!
//! Every transform has an exact inverse; `detranslate(translate(s, k), k)`
//! is the identity for any statement the pipeline accepts.

use alloc::string::String;
use alloc::vec::Vec;

use crate::key::{FocusedKey, ScrambleSpec, TranslationKey};
use crate::structure::{parse_structure, Node, StmtTree, StructureError};
use crate::token::{render_tokens, tokenize, SymbolInventory, Token, TokenKind};

/// A statement held as raw text plus its token form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub text: String,
    pub tokens: Vec<Token>,
}

impl Statement {
    pub fn new(text: impl Into<String>, inventory: &SymbolInventory) -> Self {
        let text = text.into();
        let tokens = tokenize(&text, inventory);
        Statement { text, tokens }
    }
}

/// Why an unscramble rejected its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScrambleFault {
    NoSeparator,
    BadLength,
    HalvesMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("separator {separator:?} occurs in the payload")]
    SeparatorCollision { separator: String },
    #[error("malformed scramble: {0:?}")]
    MalformedScramble(ScrambleFault),
    #[error("token {text:?} looks translated but has no preimage in the key")]
    UnknownTargetSymbol { text: String },
    #[error("shifting {ch:?} by {shift} leaves the valid scalar range")]
    InvalidCodepoint { ch: char, shift: i32 },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Replace each symbol token that the key maps; identifiers, numbers,
/// whitespace, and unmapped symbols pass through unchanged.
pub fn apply_symbol_map(tokens: &[Token], key: &FocusedKey) -> Vec<Token> {
    tokens
        .iter()
        .map(|t| {
            if t.kind == TokenKind::Symbol {
                if let Some(target) = key.target_of(&t.text) {
                    return Token::new(TokenKind::Symbol, target, t.position);
                }
            }
            t.clone()
        })
        .collect()
}

/// Inverse of [`apply_symbol_map`]. A symbol token built entirely from the
/// key's target alphabet but absent from the map is reported as
/// [`TransformError::UnknownTargetSymbol`] — it claims to be translated
/// material yet has no preimage.
pub fn unapply_symbol_map(tokens: &[Token], key: &FocusedKey) -> Result<Vec<Token>, TransformError> {
    tokens
        .iter()
        .map(|t| {
            if t.kind == TokenKind::Symbol {
                if let Some(source) = key.source_of(&t.text) {
                    return Ok(Token::new(TokenKind::Symbol, source, t.position));
                }
                if key.looks_like_target(&t.text) {
                    return Err(TransformError::UnknownTargetSymbol {
                        text: t.text.clone(),
                    });
                }
            }
            Ok(t.clone())
        })
        .collect()
}

/// Append the separator and the reversed token sequence:
/// `t₀ … tₙ` becomes `t₀ … tₙ S tₙ … t₀` (length `2n + 1`).
pub fn scramble(tokens: &[Token], spec: &ScrambleSpec) -> Result<Vec<Token>, TransformError> {
    if render_tokens(tokens).contains(&spec.separator) {
        return Err(TransformError::SeparatorCollision {
            separator: spec.separator.clone(),
        });
    }
    let mut out = Vec::with_capacity(tokens.len() * 2 + 1);
    out.extend_from_slice(tokens);
    out.push(Token::symbol(spec.separator.clone(), 0));
    out.extend(tokens.iter().rev().cloned());
    Ok(out)
}

/// Undo [`scramble`], verifying the tail really is the reversed head.
/// Comparison is by kind and text; positions differ after re-tokenizing.
pub fn unscramble(tokens: &[Token], spec: &ScrambleSpec) -> Result<Vec<Token>, TransformError> {
    let sep_idx = tokens
        .iter()
        .position(|t| t.is_symbol(&spec.separator))
        .ok_or(TransformError::MalformedScramble(ScrambleFault::NoSeparator))?;
    let head = &tokens[..sep_idx];
    let tail = &tokens[sep_idx + 1..];
    if head.len() != tail.len() {
        return Err(TransformError::MalformedScramble(ScrambleFault::BadLength));
    }
    let mirrored = head
        .iter()
        .rev()
        .zip(tail.iter())
        .all(|(a, b)| a.kind == b.kind && a.text == b.text);
    if !mirrored {
        return Err(TransformError::MalformedScramble(
            ScrambleFault::HalvesMismatch,
        ));
    }
    Ok(head.to_vec())
}

/// Add `n` to every Unicode scalar value in `text`. Errs when a shifted
/// value lands in the surrogate range or outside the scalar range.
pub fn shift_codepoints(text: &str, n: i32) -> Result<String, TransformError> {
    text.chars()
        .map(|ch| {
            let shifted = ch as i64 + n as i64;
            u32::try_from(shifted)
                .ok()
                .and_then(char::from_u32)
                .ok_or(TransformError::InvalidCodepoint { ch, shift: n })
        })
        .collect()
}

/// Mirror the top-level chain `seg₀ op₁ seg₁ … opₙ segₙ` into
/// `segₙ opₙ … op₁ seg₀`, recursively inside every parenthesized group.
///
/// Whitespace runs occupy fixed slots between content positions and never
/// move; only the content sequence — segments and operators — mirrors.
/// That keeps `A > B > C` rendering as `C > B > A` with the segments'
/// internal content untouched, and makes the function an involution on
/// every tree.
pub fn invert_chains(tree: &StmtTree, ops: &[String]) -> StmtTree {
    StmtTree {
        nodes: invert_nodes(tree.nodes.clone(), ops),
    }
}

fn is_chain_op(node: &Node, ops: &[String]) -> bool {
    match node {
        Node::Leaf(t) => t.kind == TokenKind::Symbol && ops.contains(&t.text),
        Node::Group { .. } => false,
    }
}

fn invert_nodes(nodes: Vec<Node>, ops: &[String]) -> Vec<Node> {
    let nodes: Vec<Node> = nodes
        .into_iter()
        .map(|n| match n {
            Node::Group {
                open,
                children,
                close,
            } => Node::Group {
                open,
                children: invert_nodes(children, ops),
                close,
            },
            leaf => leaf,
        })
        .collect();

    // Whitespace runs go into slot i between content items i and i+1;
    // slots never move.
    let is_ws = |n: &Node| matches!(n, Node::Leaf(t) if t.kind == TokenKind::Whitespace);
    let mut slots: Vec<Vec<Node>> = alloc::vec![Vec::new()];
    let mut content: Vec<Node> = Vec::new();
    for n in nodes {
        if is_ws(&n) {
            slots.last_mut().expect("slots never empty").push(n);
        } else {
            content.push(n);
            slots.push(Vec::new());
        }
    }

    // Mirror the content: segments and operators both reverse, segments
    // staying internally intact.
    let mut segments: Vec<Vec<Node>> = alloc::vec![Vec::new()];
    let mut operators: Vec<Node> = Vec::new();
    for n in content {
        if is_chain_op(&n, ops) {
            operators.push(n);
            segments.push(Vec::new());
        } else {
            segments.last_mut().expect("segments never empty").push(n);
        }
    }
    segments.reverse();
    operators.reverse();
    let mut mirrored: Vec<Node> = Vec::new();
    let mut op_iter = operators.into_iter();
    for seg in segments {
        mirrored.extend(seg);
        if let Some(op) = op_iter.next() {
            mirrored.push(op);
        }
    }

    // Reinterleave mirrored content with the stationary whitespace slots.
    let mut slot_iter = slots.into_iter();
    let mut out = slot_iter.next().expect("leading slot");
    for c in mirrored {
        out.push(c);
        out.extend(slot_iter.next().expect("one slot per content item"));
    }
    out
}

/// Translate a statement with either key kind.
///
/// Focused: map symbols, scramble, render. Random: parse, invert chains,
/// render, shift codepoints.
pub fn translate(statement: &Statement, key: &TranslationKey) -> Result<String, TransformError> {
    match key {
        TranslationKey::Focused(k) => {
            let mapped = apply_symbol_map(&statement.tokens, k);
            let scrambled = scramble(&mapped, &k.scramble)?;
            Ok(render_tokens(&scrambled))
        }
        TranslationKey::Random(k) => {
            let tree = parse_structure(&statement.tokens)?;
            let inverted = invert_chains(&tree, &k.inversion_ops);
            shift_codepoints(&inverted.render(), k.shift)
        }
    }
}

/// Invert [`translate`]. `inventory` must be the symbol inventory the
/// statement was originally tokenized with.
pub fn detranslate(
    text: &str,
    key: &TranslationKey,
    inventory: &SymbolInventory,
) -> Result<String, TransformError> {
    match key {
        TranslationKey::Focused(k) => {
            let tokens = tokenize(text, &k.detranslate_inventory(inventory));
            let head = unscramble(&tokens, &k.scramble)?;
            let restored = unapply_symbol_map(&head, k)?;
            Ok(render_tokens(&restored))
        }
        TranslationKey::Random(k) => {
            let unshifted = shift_codepoints(text, -k.shift)?;
            let tree = parse_structure(&tokenize(&unshifted, inventory))?;
            Ok(invert_chains(&tree, &k.inversion_ops).render())
        }
    }
}

/// Convenience for translating raw text in one call.
pub fn translate_text(
    text: &str,
    key: &TranslationKey,
    inventory: &SymbolInventory,
) -> Result<String, TransformError> {
    translate(&Statement::new(text, inventory), key)
}
