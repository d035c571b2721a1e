//! Deterministic synthetic statements and corpora for tests and demos.
//!
//! Statements use the default symbol inventory: identifiers, small numbers,
//! arithmetic and comparison operators, balanced parentheses, and an
//! optional `… : ℕ ⊢` header. Generation is seeded ChaCha20, so the same
//! seed always yields the same corpus bytes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

const IDENTIFIERS: &[&str] = &["x", "y", "z", "a", "b", "n", "m"];
const OPERATORS: &[&str] = &["+", "-", "*", "^", "=", "->", ">", "<", ">=", "<="];

fn atom(rng: &mut ChaCha20Rng) -> String {
    if rng.gen_bool(0.4) {
        rng.gen_range(0..100u32).to_string()
    } else {
        IDENTIFIERS[rng.gen_range(0..IDENTIFIERS.len())].to_string()
    }
}

fn term(rng: &mut ChaCha20Rng, depth: u32) -> String {
    if depth > 0 && rng.gen_bool(0.3) {
        format!("( {} )", expression(rng, depth - 1))
    } else {
        atom(rng)
    }
}

fn expression(rng: &mut ChaCha20Rng, depth: u32) -> String {
    let terms = rng.gen_range(1..=4);
    let mut out = term(rng, depth);
    for _ in 1..terms {
        let op = OPERATORS[rng.gen_range(0..OPERATORS.len())];
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        out.push_str(&term(rng, depth));
    }
    out
}

fn statement(rng: &mut ChaCha20Rng) -> String {
    let mut out = String::new();
    if rng.gen_bool(0.5) {
        let vars = rng.gen_range(1..=3);
        for i in 0..vars {
            out.push_str(IDENTIFIERS[(i as usize) % IDENTIFIERS.len()]);
            out.push(' ');
        }
        out.push_str(": ℕ ⊢ ");
    }
    out.push_str(&expression(rng, 3));
    out
}

/// `n` seeded statements.
pub fn statements(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n).map(|_| statement(&mut rng)).collect()
}

/// A line-delimited `{"id","statement","label"}` corpus as one string.
/// Ids are `{prefix}{index:05}`; labels are seeded coin flips.
pub fn corpus_jsonl(n: usize, seed: u64, prefix: &str) -> String {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = String::new();
    for i in 0..n {
        let stmt = statement(&mut rng);
        let label = rng.gen_bool(0.5);
        let line = serde_json::json!({
            "id": format!("{prefix}{i:05}"),
            "statement": stmt,
            "label": label,
        });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}
