//! Text, JSON and DOT formats for automata.
//!
//! The text format:
//!
//! ```text
//! # comment
//! states: a b id
//! alphabet: 0 1
//! sink: id            # optional; must be a real sink
//! partial: true       # optional; allows missing transitions
//! a 0 -> b 0
//! ```
//!
//! Identifiers are free-form (no whitespace, `#`, or commas); state and
//! letter names must not overlap.  A complete table is required unless the
//! `partial: true` header is present.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::automaton::{MealyAutomaton, PartialMealy};
use crate::error::{Error, Result};

struct RawAutomaton {
    states: Vec<String>,
    alphabet: Vec<String>,
    sink: Option<String>,
    partial: bool,
    /// (state, letter) -> (state, letter), insertion-ordered
    transitions: Vec<(String, String, String, String)>,
}

fn parse_raw(text: &str) -> Result<RawAutomaton> {
    let mut raw = RawAutomaton {
        states: Vec::new(),
        alphabet: Vec::new(),
        sink: None,
        partial: false,
        transitions: Vec::new(),
    };
    for (i, mut line) in text.lines().enumerate() {
        let lineno = i + 1;
        if let Some(pos) = line.find('#') {
            line = &line[..pos];
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: lineno, msg };
        if let Some(rest) = line.strip_prefix("states:") {
            if !raw.states.is_empty() {
                return Err(err("states declared twice".into()));
            }
            raw.states = rest.split_whitespace().map(String::from).collect();
            if raw.states.is_empty() {
                return Err(err("empty states declaration".into()));
            }
        } else if let Some(rest) = line.strip_prefix("alphabet:") {
            if !raw.alphabet.is_empty() {
                return Err(err("alphabet declared twice".into()));
            }
            raw.alphabet = rest.split_whitespace().map(String::from).collect();
            if raw.alphabet.is_empty() {
                return Err(err("empty alphabet declaration".into()));
            }
        } else if let Some(rest) = line.strip_prefix("sink:") {
            let name = rest.trim();
            if name.is_empty() || name.split_whitespace().count() != 1 {
                return Err(err("sink wants exactly one state name".into()));
            }
            raw.sink = Some(name.to_string());
        } else if let Some(rest) = line.strip_prefix("partial:") {
            match rest.trim() {
                "true" => raw.partial = true,
                "false" => raw.partial = false,
                other => return Err(err(format!("partial wants true or false, got `{other}`"))),
            }
        } else {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 5 || tokens[2] != "->" {
                return Err(err(format!("expected `state letter -> state letter`, got `{line}`")));
            }
            if raw.states.is_empty() || raw.alphabet.is_empty() {
                return Err(err("transitions must come after states: and alphabet:".into()));
            }
            raw.transitions.push((
                tokens[0].to_string(),
                tokens[1].to_string(),
                tokens[3].to_string(),
                tokens[4].to_string(),
            ));
        }
    }
    if raw.states.is_empty() {
        return Err(Error::Parse { line: 0, msg: "missing states: declaration".into() });
    }
    if raw.alphabet.is_empty() {
        return Err(Error::Parse { line: 0, msg: "missing alphabet: declaration".into() });
    }
    Ok(raw)
}

struct Tables {
    states: Vec<String>,
    alphabet: Vec<String>,
    sink: Option<usize>,
    trans: Vec<Option<(usize, usize)>>,
    partial: bool,
}

fn raw_to_tables(raw: RawAutomaton) -> Result<Tables> {
    let state_index: HashMap<&str, usize> =
        raw.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let letter_index: HashMap<&str, usize> =
        raw.alphabet.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    if state_index.len() != raw.states.len() {
        return Err(Error::Parse { line: 0, msg: "duplicate state name".into() });
    }
    if letter_index.len() != raw.alphabet.len() {
        return Err(Error::Parse { line: 0, msg: "duplicate letter name".into() });
    }
    for s in &raw.states {
        if letter_index.contains_key(s.as_str()) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("`{s}` is both a state and a letter"),
            });
        }
    }
    let l = raw.alphabet.len();
    let mut trans: Vec<Option<(usize, usize)>> = vec![None; raw.states.len() * l];
    for (q, a, p, b) in &raw.transitions {
        let &qi = state_index
            .get(q.as_str())
            .ok_or_else(|| Error::Unknown(format!("state `{q}`")))?;
        let &ai = letter_index
            .get(a.as_str())
            .ok_or_else(|| Error::Unknown(format!("letter `{a}`")))?;
        let &pi = state_index
            .get(p.as_str())
            .ok_or_else(|| Error::Unknown(format!("state `{p}`")))?;
        let &bi = letter_index
            .get(b.as_str())
            .ok_or_else(|| Error::Unknown(format!("letter `{b}`")))?;
        if trans[qi * l + ai].is_some() {
            return Err(Error::Duplicate { state: q.clone(), letter: a.clone() });
        }
        trans[qi * l + ai] = Some((pi, bi));
    }
    let sink = match &raw.sink {
        Some(name) => Some(
            *state_index
                .get(name.as_str())
                .ok_or_else(|| Error::Unknown(format!("state `{name}`")))?,
        ),
        None => None,
    };
    Ok(Tables { states: raw.states, alphabet: raw.alphabet, sink, trans, partial: raw.partial })
}

fn tables_to_automaton(t: Tables) -> Result<MealyAutomaton> {
    let l = t.alphabet.len();
    let missing: Vec<(String, String)> = t
        .trans
        .iter()
        .enumerate()
        .filter(|(_, tr)| tr.is_none())
        .map(|(i, _)| (t.states[i / l].clone(), t.alphabet[i % l].clone()))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Incomplete { missing });
    }
    let delta = t.trans.iter().map(|tr| tr.unwrap().0).collect();
    let rho = t.trans.iter().map(|tr| tr.unwrap().1).collect();
    MealyAutomaton::from_tables(t.states, t.alphabet, delta, rho, t.sink)
}

/// Parse the text format into a complete automaton.
pub fn parse_automaton(text: &str) -> Result<MealyAutomaton> {
    let raw = parse_raw(text)?;
    if raw.partial {
        return Err(Error::Parse {
            line: 0,
            msg: "partial: true is only accepted by the partial-transducer reader".into(),
        });
    }
    tables_to_automaton(raw_to_tables(raw)?)
}

/// Parse the text format, allowing a partial transition table.
pub fn parse_partial_automaton(text: &str) -> Result<PartialMealy> {
    let t = raw_to_tables(parse_raw(text)?)?;
    if !t.partial {
        return tables_to_automaton(t).map(|m| PartialMealy::from_automaton(&m));
    }
    PartialMealy::from_parts(t.states, t.alphabet, t.trans)
}

/// Render the text format.
pub fn to_mealy_text(m: &MealyAutomaton) -> String {
    let mut out = String::new();
    out.push_str(&format!("states: {}\n", m.state_names().join(" ")));
    out.push_str(&format!("alphabet: {}\n", m.alphabet().join(" ")));
    if let Some(e) = m.sink() {
        out.push_str(&format!("sink: {}\n", m.state_name(e)));
    }
    for q in 0..m.n_states() {
        for a in 0..m.n_letters() {
            let (p, b) = m.step(q, a);
            out.push_str(&format!(
                "{} {} -> {} {}\n",
                m.state_name(q),
                m.letter_name(a),
                m.state_name(p),
                m.letter_name(b)
            ));
        }
    }
    out
}

/// Render a partial transducer; emits `partial: true` when the table has
/// holes.
pub fn partial_to_mealy_text(p: &PartialMealy) -> String {
    let mut out = String::new();
    out.push_str(&format!("states: {}\n", p.state_names().join(" ")));
    out.push_str(&format!("alphabet: {}\n", p.alphabet().join(" ")));
    if !p.is_total() {
        out.push_str("partial: true\n");
    }
    for q in 0..p.n_states() {
        for a in 0..p.n_letters() {
            if let Some((t, b)) = p.step(q, a) {
                out.push_str(&format!(
                    "{} {} -> {} {}\n",
                    p.state_name(q),
                    p.letter_name(a),
                    p.state_name(t),
                    p.letter_name(b)
                ));
            }
        }
    }
    out
}

/// JSON mirror of the text format.
pub fn to_json(m: &MealyAutomaton) -> Value {
    let transitions: Vec<Value> = (0..m.n_states())
        .flat_map(|q| {
            (0..m.n_letters()).map(move |a| {
                let (p, b) = m.step(q, a);
                json!({
                    "from": m.state_name(q),
                    "input": m.letter_name(a),
                    "to": m.state_name(p),
                    "output": m.letter_name(b),
                })
            })
        })
        .collect();
    json!({
        "states": m.state_names(),
        "alphabet": m.alphabet(),
        "sink": m.sink().map(|e| m.state_name(e)),
        "transitions": transitions,
    })
}

/// Parse the JSON mirror.
pub fn from_json(text: &str) -> Result<MealyAutomaton> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse { line: 0, msg: format!("bad JSON: {e}") })?;
    let arr = |v: &Value, key: &str| -> Result<Vec<String>> {
        v.get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse { line: 0, msg: format!("missing array `{key}`") })?
            .iter()
            .map(|x| {
                x.as_str().map(String::from).ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: format!("`{key}` must hold strings"),
                })
            })
            .collect()
    };
    let states = arr(&v, "states")?;
    let alphabet = arr(&v, "alphabet")?;
    let sink = match v.get("sink") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(Error::Parse { line: 0, msg: "`sink` must be a string".into() }),
    };
    let mut transitions = Vec::new();
    for t in v
        .get("transitions")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse { line: 0, msg: "missing array `transitions`".into() })?
    {
        let field = |key: &str| -> Result<String> {
            t.get(key).and_then(Value::as_str).map(String::from).ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("transition missing `{key}`"),
            })
        };
        transitions.push((field("from")?, field("input")?, field("to")?, field("output")?));
    }
    let raw = RawAutomaton { states, alphabet, sink, partial: false, transitions };
    tables_to_automaton(raw_to_tables(raw)?)
}

/// GraphViz rendering; the sink gets a double border.
pub fn to_dot(m: &MealyAutomaton) -> String {
    let mut out = String::from("digraph mealy {\n  rankdir=LR;\n  node [shape=circle];\n");
    for q in 0..m.n_states() {
        let extra = if m.sink() == Some(q) { " shape=doublecircle" } else { "" };
        out.push_str(&format!("  \"{}\" [label=\"{}\"{}];\n", m.state_name(q), m.state_name(q), extra));
    }
    for q in 0..m.n_states() {
        for a in 0..m.n_letters() {
            let (p, b) = m.step(q, a);
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}|{}\"];\n",
                m.state_name(q),
                m.state_name(p),
                m.letter_name(a),
                m.letter_name(b)
            ));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAMPLIGHTER: &str = include_str!("../../../corpus/lamplighter.mealy");
    const BASILICA: &str = include_str!("../../../corpus/basilica.mealy");
    const HANOI: &str = include_str!("../../../corpus/hanoi3.mealy");

    #[test]
    fn parses_corpus_files() {
        let l = parse_automaton(LAMPLIGHTER).unwrap();
        assert_eq!(l.n_states(), 2);
        assert_eq!(l.n_letters(), 2);
        assert_eq!(l.sink(), None);
        assert_eq!(l.step(0, 0), (1, 1)); // x --0|1--> y

        let b = parse_automaton(BASILICA).unwrap();
        assert_eq!(b.sink(), b.state_index("id"));
        assert_eq!(b.step(b.state_index("b").unwrap(), 0), (0, 1));

        let h = parse_automaton(HANOI).unwrap();
        assert_eq!(h.n_states(), 4);
        assert_eq!(h.n_letters(), 3);
        assert!(h.classify().is_s_a);
    }

    #[test]
    fn text_round_trip() {
        for src in [LAMPLIGHTER, BASILICA, HANOI] {
            let m = parse_automaton(src).unwrap();
            let text = to_mealy_text(&m);
            let m2 = parse_automaton(&text).unwrap();
            assert_eq!(m.state_names(), m2.state_names());
            assert_eq!(m.alphabet(), m2.alphabet());
            assert_eq!(m.sink(), m2.sink());
            for q in 0..m.n_states() {
                for a in 0..m.n_letters() {
                    assert_eq!(m.step(q, a), m2.step(q, a));
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        for src in [LAMPLIGHTER, BASILICA, HANOI] {
            let m = parse_automaton(src).unwrap();
            let text = serde_json::to_string(&to_json(&m)).unwrap();
            let m2 = from_json(&text).unwrap();
            assert_eq!(m.state_names(), m2.state_names());
            for q in 0..m.n_states() {
                for a in 0..m.n_letters() {
                    assert_eq!(m.step(q, a), m2.step(q, a));
                }
            }
        }
    }

    #[test]
    fn parse_errors() {
        // incomplete table, missing pair reported
        let r = parse_automaton("states: a\nalphabet: 0 1\na 0 -> a 0\n");
        match r {
            Err(Error::Incomplete { missing }) => {
                assert_eq!(missing, vec![("a".to_string(), "1".to_string())]);
            }
            other => panic!("expected Incomplete, got {other:?}"),
        }
        // duplicate transition
        let r = parse_automaton("states: a\nalphabet: 0\na 0 -> a 0\na 0 -> a 0\n");
        assert!(matches!(r, Err(Error::Duplicate { .. })));
        // unknown name
        let r = parse_automaton("states: a\nalphabet: 0\nb 0 -> a 0\n");
        assert!(matches!(r, Err(Error::Unknown(_))));
        // state/letter name clash
        let r = parse_automaton("states: a\nalphabet: a\na a -> a a\n");
        assert!(matches!(r, Err(Error::Parse { .. })));
        // declared sink that is not one
        let r = parse_automaton("states: a b\nalphabet: 0\nsink: a\na 0 -> b 0\nb 0 -> b 0\n");
        assert!(matches!(r, Err(Error::BadSink { .. })));
        // malformed transition line mentions its line number
        let r = parse_automaton("states: a\nalphabet: 0\na 0 a 0\n");
        match r {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected Parse, got {other:?}"),
        }
    }

    #[test]
    fn partial_dialect() {
        let src = "states: a e\nalphabet: 0 1\npartial: true\na 0 -> e 0\n";
        let p = parse_partial_automaton(src).unwrap();
        assert!(!p.is_total());
        assert_eq!(p.step(0, 0), Some((1, 0)));
        assert_eq!(p.step(0, 1), None);
        // round trip
        let text = partial_to_mealy_text(&p);
        let p2 = parse_partial_automaton(&text).unwrap();
        assert_eq!(p2.step(0, 0), Some((1, 0)));
        assert_eq!(p2.step(1, 1), None);
        // the strict reader refuses it
        assert!(parse_automaton(src).is_err());
        // ... and refuses missing transitions without the header
        assert!(matches!(
            parse_partial_automaton("states: a\nalphabet: 0 1\na 0 -> a 0\n"),
            Err(Error::Incomplete { .. })
        ));
        // a complete file parses through the partial reader too
        let t = parse_partial_automaton(LAMPLIGHTER).unwrap();
        assert!(t.is_total());
    }

    #[test]
    fn comments_and_spacing_are_ignored() {
        let src = "  # header comment\nstates: a   # trailing\nalphabet: 0\n\n  a 0 -> a 0  \n";
        let m = parse_automaton(src).unwrap();
        assert_eq!(m.n_states(), 1);
        assert_eq!(m.step(0, 0), (0, 0));
    }
}
