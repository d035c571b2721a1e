//! Parenthesis structure over token sequences.
//!
//! A statement tree is a flat sequence of nodes, each either a leaf token or
//! a `( … )` group with nested children. Rendering a tree reproduces the
//! original token stream byte for byte; whitespace tokens are ordinary
//! leaves. Only parentheses delimit groups — brackets and braces stay plain
//! symbol leaves.

use alloc::string::String;
use alloc::vec::Vec;

use crate::token::{render_tokens, Token};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Leaf(Token),
    Group {
        open: Token,
        children: Vec<Node>,
        close: Token,
    },
}

impl Node {
    fn write_tokens(&self, out: &mut Vec<Token>) {
        match self {
            Node::Leaf(t) => out.push(t.clone()),
            Node::Group {
                open,
                children,
                close,
            } => {
                out.push(open.clone());
                for c in children {
                    c.write_tokens(out);
                }
                out.push(close.clone());
            }
        }
    }
}

/// A parsed statement: top-level node sequence with balanced groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StmtTree {
    pub nodes: Vec<Node>,
}

impl StmtTree {
    /// Flatten back to the token sequence the tree was parsed from.
    pub fn tokens(&self) -> Vec<Token> {
        let mut out = Vec::new();
        for n in &self.nodes {
            n.write_tokens(&mut out);
        }
        out
    }

    pub fn render(&self) -> String {
        render_tokens(&self.tokens())
    }

    /// Top-level alternation of segments and chain operators; see
    /// [`chain_view`].
    pub fn chain_view<'a>(&'a self, ops: &[String]) -> ChainView<'a> {
        chain_view(&self.nodes, ops)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("unbalanced parenthesis at byte {position}")]
    UnbalancedParens { position: usize },
}

/// Build the group structure from a token sequence.
///
/// Errors with the byte position of a `)` that has no matching `(`, or of
/// the first `(` left open at end of input.
pub fn parse_structure(tokens: &[Token]) -> Result<StmtTree, StructureError> {
    let mut stack: Vec<(Token, Vec<Node>)> = Vec::new();
    let mut current: Vec<Node> = Vec::new();
    for tok in tokens {
        if tok.is_symbol("(") {
            stack.push((tok.clone(), core::mem::take(&mut current)));
        } else if tok.is_symbol(")") {
            let (open, parent) = stack.pop().ok_or(StructureError::UnbalancedParens {
                position: tok.position,
            })?;
            let children = core::mem::replace(&mut current, parent);
            current.push(Node::Group {
                open,
                children,
                close: tok.clone(),
            });
        } else {
            current.push(Node::Leaf(tok.clone()));
        }
    }
    if let Some((open, _)) = stack.first() {
        return Err(StructureError::UnbalancedParens {
            position: open.position,
        });
    }
    Ok(StmtTree { nodes: current })
}

/// Render a tree back to its source string.
pub fn render(tree: &StmtTree) -> String {
    tree.render()
}

/// The top level of a node sequence split on chain operators: `n` operators
/// give `n + 1` segments (segments keep their whitespace and may be empty).
/// Operators inside groups never appear here.
#[derive(Debug)]
pub struct ChainView<'a> {
    pub segments: Vec<&'a [Node]>,
    pub operators: Vec<&'a Token>,
}

pub fn chain_view<'a>(nodes: &'a [Node], ops: &[String]) -> ChainView<'a> {
    let mut segments = Vec::new();
    let mut operators = Vec::new();
    let mut seg_start = 0;
    for (i, n) in nodes.iter().enumerate() {
        if let Node::Leaf(t) = n {
            if t.kind == crate::token::TokenKind::Symbol && ops.contains(&t.text) {
                segments.push(&nodes[seg_start..i]);
                operators.push(t);
                seg_start = i + 1;
            }
        }
    }
    segments.push(&nodes[seg_start..]);
    ChainView {
        segments,
        operators,
    }
}
