use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text (bad header, bad transition line, unknown name).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A transition table misses some (state, letter) pairs.
    #[error("incomplete transition table, missing: {}", format_pairs(.missing))]
    Incomplete { missing: Vec<(String, String)> },

    /// The same (state, letter) pair is defined twice.
    #[error("duplicate transition for ({state}, {letter})")]
    Duplicate { state: String, letter: String },

    /// An operation that needs per-state output permutations got a state
    /// whose output row is not a permutation.
    #[error("state {state} is not invertible: its outputs are not a permutation of the alphabet")]
    NotInvertible { state: String },

    /// An operation that needs a sink (identity state) found none.
    #[error("automaton has no sink state")]
    NoSink,

    /// The declared sink is not actually a sink.
    #[error("declared sink {state} has a transition leaving it or a non-copy output")]
    BadSink { state: String },

    /// A state, letter or word referenced by name does not exist.
    #[error("unknown identifier: {0}")]
    Unknown(String),

    /// A search or construction hit its configured budget before deciding.
    #[error("budget exhausted: {0}")]
    Budget(String),

    /// The operation's precondition does not hold for this input.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

fn format_pairs(pairs: &[(String, String)]) -> String {
    let mut s = String::new();
    for (i, (q, a)) in pairs.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push('(');
        s.push_str(q);
        s.push_str(", ");
        s.push_str(a);
        s.push(')');
        if i == 7 && pairs.len() > 8 {
            s.push_str(&format!(", ... ({} total)", pairs.len()));
            break;
        }
    }
    s
}

pub type Result<T> = std::result::Result<T, Error>;
