//! Lossless tokenization of Lean-subset statements.
//!
//! The tokenizer never fails and never drops a byte: concatenating the
//! `text` of every token in order reproduces the input exactly. Symbols are
//! matched against a configurable inventory with maximal munch, so `>=`
//! lexes as one token wherever the inventory lists it, never as `>` `=`.
//! Whitespace is kept as explicit run tokens because the codepoint-shift
//! strategy transforms spaces like any other character.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Classification of a lexed token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Identifier,
    Number,
    Symbol,
    Whitespace,
}

/// One token: kind, exact source characters, and the byte offset it was
/// lexed from. `position` is provenance only; rendering ignores it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub position: usize,
}

impl Token {
    pub fn new(kind: TokenKind, text: impl Into<String>, position: usize) -> Self {
        Token {
            kind,
            text: text.into(),
            position,
        }
    }

    pub fn symbol(text: impl Into<String>, position: usize) -> Self {
        Token::new(TokenKind::Symbol, text, position)
    }

    pub fn is_symbol(&self, text: &str) -> bool {
        self.kind == TokenKind::Symbol && self.text == text
    }
}

/// The set of recognized symbols, matched longest-first.
///
/// Inventories are data, not code: the file format is one symbol per line,
/// UTF-8, with `#` starting a comment line. Multi-character symbols win
/// over their prefixes regardless of file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolInventory {
    // sorted by byte length descending, then lexicographically, deduplicated
    symbols: Vec<String>,
}

/// Symbols appearing in the worked translation examples and result tables:
/// comparison/implication operators, arithmetic, the turnstile header, and
/// parentheses. Fuller Lean symbol sets are supplied by the user as config.
const DEFAULT_SYMBOLS: &[&str] = &[
    "->", ">=", "<=", ">", "<", "=", "+", "-", "*", "/", "^", ":", ",", "(", ")", "⊢", "ℕ",
];

impl SymbolInventory {
    pub fn new<I, S>(symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = symbols
            .into_iter()
            .map(Into::into)
            .filter(|s| !s.is_empty())
            .collect();
        let mut symbols: Vec<String> = set.into_iter().collect();
        symbols.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        SymbolInventory { symbols }
    }

    /// Parse the one-symbol-per-line config format. Blank lines and lines
    /// starting with `#` are skipped; surrounding whitespace is trimmed.
    pub fn parse(text: &str) -> Self {
        SymbolInventory::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(ToString::to_string),
        )
    }

    /// Inventory covering the symbols used by the worked examples.
    pub fn default_lean() -> Self {
        SymbolInventory::new(DEFAULT_SYMBOLS.iter().copied())
    }

    /// A copy of this inventory with extra symbols added.
    pub fn extended<I, S>(&self, extra: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SymbolInventory::new(
            self.symbols
                .iter()
                .cloned()
                .chain(extra.into_iter().map(Into::into)),
        )
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.symbols.iter().any(|s| s == symbol)
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.symbols.iter().map(String::as_str)
    }

    /// Longest inventory symbol starting at byte offset `pos`, if any.
    fn match_at<'a>(&'a self, text: &str, pos: usize) -> Option<&'a str> {
        let rest = &text[pos..];
        self.symbols
            .iter()
            .find(|s| rest.starts_with(s.as_str()))
            .map(String::as_str)
    }
}

/// Split `text` into a lossless token sequence.
///
/// At each position the longest inventory symbol wins; otherwise whitespace,
/// digit, and identifier runs are collected, stopping a run early when an
/// inventory symbol begins inside it (so a symbol like `ℕ` is recognized
/// even though it is an alphabetic character). Anything else becomes a
/// single-character symbol token, which makes the function total.
pub fn tokenize(text: &str, inventory: &SymbolInventory) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < text.len() {
        if let Some(sym) = inventory.match_at(text, pos) {
            tokens.push(Token::symbol(sym, pos));
            pos += sym.len();
            continue;
        }
        let ch = text[pos..].chars().next().expect("pos is a char boundary");
        let start = pos;
        let kind = if ch.is_whitespace() {
            pos = run_end(text, pos, inventory, char::is_whitespace);
            TokenKind::Whitespace
        } else if ch.is_ascii_digit() {
            pos = run_end(text, pos, inventory, |c| c.is_ascii_digit());
            TokenKind::Number
        } else if ch.is_alphabetic() || ch == '_' {
            pos = run_end(text, pos, inventory, |c| c.is_alphanumeric() || c == '_');
            TokenKind::Identifier
        } else {
            pos += ch.len_utf8();
            TokenKind::Symbol
        };
        tokens.push(Token::new(kind, &text[start..pos], start));
    }
    tokens
}

fn run_end(
    text: &str,
    start: usize,
    inventory: &SymbolInventory,
    keep: impl Fn(char) -> bool,
) -> usize {
    let mut pos = start;
    for (off, ch) in text[start..].char_indices() {
        if off > 0 && inventory.match_at(text, start + off).is_some() {
            break;
        }
        if !keep(ch) {
            break;
        }
        pos = start + off + ch.len_utf8();
    }
    pos
}

/// Concatenate token texts back into a string.
pub fn render_tokens(tokens: &[Token]) -> String {
    let mut out = String::new();
    for t in tokens {
        out.push_str(&t.text);
    }
    out
}
