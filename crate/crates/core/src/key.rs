//! Translation key definitions and the key-file format.
//!
//! Two key kinds exist. A *focused* key rewrites symbols through an
//! injective map (related sources get visibly related targets) and appends
//! a separator plus the reversed token sequence. A *random* key shifts
//! every Unicode scalar by a fixed offset after mirroring the statement
//! around its top-level comparison/implication operators.
//!
//! Key files are plain UTF-8 text. The first significant line declares the
//! kind; `#` lines are comments:
//!
//! ```text
//! kind: focused
//! separator: ##SEP##
//! >\t>>
//! <\t<<
//! ```
//!
//! ```text
//! kind: random
//! shift: 10
//! inversion_ops: ->,>,<,>=,<=
//! ```

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::token::{tokenize, SymbolInventory};

pub const DEFAULT_SEPARATOR: &str = "##SEP##";
pub const DEFAULT_SHIFT: i32 = 10;
pub const DEFAULT_INVERSION_OPS: &[&str] = &["->", ">", "<", ">=", "<="];

/// Structural step of a focused key: a separator token is inserted between
/// the statement and its reversed duplicate. The unit of reversal is the
/// token, so multi-character symbols stay intact in the duplicated tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScrambleSpec {
    pub separator: String,
}

impl Default for ScrambleSpec {
    fn default() -> Self {
        ScrambleSpec {
            separator: DEFAULT_SEPARATOR.to_string(),
        }
    }
}

/// Symbol-map key: injective source→target rewriting plus scrambling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FocusedKey {
    pub name: String,
    map: BTreeMap<String, String>,
    inverse: BTreeMap<String, String>,
    target_chars: BTreeSet<char>,
    pub scramble: ScrambleSpec,
}

impl FocusedKey {
    /// Build and validate a key. Rejects non-injective maps, separators
    /// that could collide with targets, and target sets whose
    /// concatenations re-tokenize differently than they were emitted
    /// (probed pairwise and for triple runs — see [`KeyError::AmbiguousTarget`]).
    pub fn new<I>(name: impl Into<String>, entries: I, scramble: ScrambleSpec) -> Result<Self, KeyError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut map = BTreeMap::new();
        let mut inverse: BTreeMap<String, String> = BTreeMap::new();
        for (src, dst) in entries {
            if let Some(prev) = inverse.get(&dst) {
                return Err(KeyError::NonInjectiveMap {
                    first: prev.clone(),
                    second: src,
                    target: dst,
                });
            }
            inverse.insert(dst.clone(), src.clone());
            map.insert(src, dst);
        }
        for target in inverse.keys() {
            if target.contains(&scramble.separator) || scramble.separator.contains(target.as_str())
            {
                return Err(KeyError::SeparatorInTarget {
                    target: target.clone(),
                });
            }
        }
        let target_chars = inverse.keys().flat_map(|t| t.chars()).collect();
        let key = FocusedKey {
            name: name.into(),
            map,
            inverse,
            target_chars,
            scramble,
        };
        key.check_decodable()?;
        Ok(key)
    }

    pub fn target_of(&self, source: &str) -> Option<&str> {
        self.map.get(source).map(String::as_str)
    }

    pub fn source_of(&self, target: &str) -> Option<&str> {
        self.inverse.get(target).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// True when every character of `text` comes from some target symbol.
    /// Used to spot tokens that look like translated material but have no
    /// preimage in the key.
    pub fn looks_like_target(&self, text: &str) -> bool {
        !text.is_empty() && text.chars().all(|c| self.target_chars.contains(&c))
    }

    /// Inventory for re-tokenizing translated text: the source inventory
    /// plus every target symbol and the separator.
    pub fn detranslate_inventory(&self, source: &SymbolInventory) -> SymbolInventory {
        source.extended(
            self.inverse
                .keys()
                .cloned()
                .chain(core::iter::once(self.scramble.separator.clone())),
        )
    }

    // Probe that translated output re-tokenizes on the boundaries it was
    // emitted with: every adjacent target pair, triple runs of one target,
    // and targets flanking the separator must lex back to themselves.
    fn check_decodable(&self) -> Result<(), KeyError> {
        let inv = SymbolInventory::new(
            self.inverse
                .keys()
                .cloned()
                .chain(core::iter::once(self.scramble.separator.clone())),
        );
        let targets: Vec<&str> = self.inverse.keys().map(String::as_str).collect();
        let sep = self.scramble.separator.as_str();
        let probe = |parts: &[&str]| -> Result<(), KeyError> {
            let joined: String = parts.concat();
            let lexed: Vec<String> = tokenize(&joined, &inv)
                .into_iter()
                .map(|t| t.text)
                .collect();
            if lexed != parts {
                return Err(KeyError::AmbiguousTarget {
                    first: parts[0].to_string(),
                    second: parts[parts.len() - 1].to_string(),
                });
            }
            Ok(())
        };
        for &a in &targets {
            probe(&[a, a, a])?;
            probe(&[a, sep])?;
            probe(&[sep, a])?;
            for &b in &targets {
                probe(&[a, b])?;
            }
        }
        Ok(())
    }
}

/// Codepoint-shift key with chain inversion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomKey {
    pub name: String,
    pub shift: i32,
    pub inversion_ops: Vec<String>,
}

impl RandomKey {
    pub fn new(
        name: impl Into<String>,
        shift: i32,
        inversion_ops: Vec<String>,
    ) -> Result<Self, KeyError> {
        if shift == 0 {
            return Err(KeyError::BadShift);
        }
        Ok(RandomKey {
            name: name.into(),
            shift,
            inversion_ops,
        })
    }

    pub fn default_ops() -> Vec<String> {
        DEFAULT_INVERSION_OPS.iter().map(|s| s.to_string()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranslationKey {
    Focused(FocusedKey),
    Random(RandomKey),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KeyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("sources {first:?} and {second:?} both map to {target:?}")]
    NonInjectiveMap {
        first: String,
        second: String,
        target: String,
    },
    #[error("shift must be a non-zero integer")]
    BadShift,
    #[error("targets {first:?} and {second:?} do not re-tokenize unambiguously")]
    AmbiguousTarget { first: String, second: String },
    #[error("separator collides with target {target:?}")]
    SeparatorInTarget { target: String },
}

/// Built-in focused key. Anchored on `>`→`>>` and `<`→`<<`; every other
/// target doubles one distinctive character so that no concatenation of
/// targets can be re-tokenized on different boundaries.
pub const BUILTIN_FOCUSED_KEY: &str = "\
kind: focused
name: focused-default
separator: ##SEP##
>\t>>
<\t<<
>=\t≥≥
<=\t≤≤
->\t⇒⇒
=\t≡≡
+\t⊕⊕
-\t⊖⊖
*\t€€
^\t∧∧
:\t¬¬
⊢\t⊩⊩
";

/// Built-in random key: shift 10, inverted around the comparison and
/// implication operators.
pub const BUILTIN_RANDOM_KEY: &str = "\
kind: random
name: random-default
shift: 10
inversion_ops: ->,>,<,>=,<=
";

impl TranslationKey {
    /// Parse a key definition from the text format described at module
    /// level. Line numbers in errors are 1-based.
    pub fn parse(text: &str) -> Result<Self, KeyError> {
        let mut kind: Option<(&str, usize)> = None;
        let mut name: Option<String> = None;
        let mut separator: Option<String> = None;
        let mut shift: Option<i32> = None;
        let mut ops: Option<Vec<String>> = None;
        let mut entries: Vec<(String, String)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            if kind.is_none() {
                match line.strip_prefix("kind:").map(str::trim) {
                    Some(k @ ("focused" | "random")) => {
                        kind = Some((k, line_no));
                        continue;
                    }
                    Some(other) => {
                        return Err(KeyError::Parse {
                            line: line_no,
                            message: alloc::format!("unknown kind {other:?}"),
                        })
                    }
                    None => {
                        return Err(KeyError::Parse {
                            line: line_no,
                            message: "expected `kind: focused` or `kind: random`".to_string(),
                        })
                    }
                }
            }
            if let Some(v) = line.strip_prefix("name:") {
                name = Some(v.trim().to_string());
                continue;
            }
            match kind.expect("kind set above").0 {
                "focused" => {
                    if let Some(v) = line.strip_prefix("separator:") {
                        separator = Some(v.trim().to_string());
                    } else if let Some((src, dst)) = line.split_once('\t') {
                        if src.is_empty() || dst.is_empty() {
                            return Err(KeyError::Parse {
                                line: line_no,
                                message: "empty source or target".to_string(),
                            });
                        }
                        entries.push((src.to_string(), dst.to_string()));
                    } else {
                        return Err(KeyError::Parse {
                            line: line_no,
                            message: "expected SOURCE<TAB>TARGET".to_string(),
                        });
                    }
                }
                "random" => {
                    if let Some(v) = line.strip_prefix("shift:") {
                        shift = Some(v.trim().parse::<i32>().map_err(|_| KeyError::Parse {
                            line: line_no,
                            message: "shift must be an integer".to_string(),
                        })?);
                    } else if let Some(v) = line.strip_prefix("inversion_ops:") {
                        ops = Some(
                            v.split(',')
                                .map(str::trim)
                                .filter(|s| !s.is_empty())
                                .map(ToString::to_string)
                                .collect(),
                        );
                    } else {
                        return Err(KeyError::Parse {
                            line: line_no,
                            message: "expected `shift:` or `inversion_ops:`".to_string(),
                        });
                    }
                }
                _ => unreachable!(),
            }
        }

        match kind {
            Some(("focused", _)) => {
                let scramble = ScrambleSpec {
                    separator: separator.unwrap_or_else(|| DEFAULT_SEPARATOR.to_string()),
                };
                let key = FocusedKey::new(
                    name.unwrap_or_else(|| "focused".to_string()),
                    entries,
                    scramble,
                )?;
                Ok(TranslationKey::Focused(key))
            }
            Some(("random", _)) => {
                let key = RandomKey::new(
                    name.unwrap_or_else(|| "random".to_string()),
                    shift.unwrap_or(DEFAULT_SHIFT),
                    ops.unwrap_or_else(RandomKey::default_ops),
                )?;
                Ok(TranslationKey::Random(key))
            }
            _ => Err(KeyError::Parse {
                line: 1,
                message: "missing `kind:` header".to_string(),
            }),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            TranslationKey::Focused(k) => &k.name,
            TranslationKey::Random(k) => &k.name,
        }
    }

    pub fn builtin_focused() -> Self {
        TranslationKey::parse(BUILTIN_FOCUSED_KEY).expect("builtin focused key is valid")
    }

    pub fn builtin_random() -> Self {
        TranslationKey::parse(BUILTIN_RANDOM_KEY).expect("builtin random key is valid")
    }
}
