//! Complete deterministic letter-to-letter transducers and their structural
//! transforms: classification, dual, inverse, enrichment, sink-identified
//! union, minimization, and the action of state words on letter words.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::words::{Epw, LetterWord, SignedState, StateWord};

/// A complete Mealy automaton: every (state, letter) pair has exactly one
/// transition `q --a|rho(q,a)--> delta(q,a)`.
///
/// State and letter names are arbitrary identifiers; the two name sets are
/// kept disjoint so transition lines and word tokens are unambiguous.
#[derive(Clone, Debug)]
pub struct MealyAutomaton {
    states: Vec<String>,
    alphabet: Vec<String>,
    /// Flat row-major tables indexed by `q * |X| + a`.
    delta: Vec<usize>,
    rho: Vec<usize>,
    sink: Option<usize>,
}

impl MealyAutomaton {
    /// Build from explicit tables. `sink` may be declared (validated) or left
    /// to auto-detection, which fires only when the structural sink is unique.
    pub fn from_tables(
        states: Vec<String>,
        alphabet: Vec<String>,
        delta: Vec<usize>,
        rho: Vec<usize>,
        sink: Option<usize>,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Precondition("automaton needs at least one state".into()));
        }
        if alphabet.is_empty() {
            return Err(Error::Precondition("automaton needs at least one letter".into()));
        }
        let mut seen = HashMap::new();
        for name in states.iter().chain(alphabet.iter()) {
            if seen.insert(name.clone(), ()).is_some() {
                return Err(Error::Precondition(format!(
                    "state and letter names must be pairwise distinct, `{name}` repeats"
                )));
            }
        }
        let size = states.len() * alphabet.len();
        if delta.len() != size || rho.len() != size {
            return Err(Error::Precondition("transition tables have the wrong size".into()));
        }
        if delta.iter().any(|&p| p >= states.len()) || rho.iter().any(|&b| b >= alphabet.len()) {
            return Err(Error::Precondition("transition table entry out of range".into()));
        }
        let mut m = MealyAutomaton { states, alphabet, delta, rho, sink: None };
        match sink {
            Some(e) => {
                if e >= m.states.len() {
                    return Err(Error::Precondition("declared sink out of range".into()));
                }
                if !m.is_structural_sink(e) {
                    return Err(Error::BadSink { state: m.states[e].clone() });
                }
                m.sink = Some(e);
            }
            None => m.sink = m.unique_structural_sink(),
        }
        Ok(m)
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn letter_name(&self, a: usize) -> &str {
        &self.alphabet[a]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn letter_index(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|s| s == name)
    }

    pub fn delta(&self, q: usize, a: usize) -> usize {
        self.delta[q * self.alphabet.len() + a]
    }

    pub fn rho(&self, q: usize, a: usize) -> usize {
        self.rho[q * self.alphabet.len() + a]
    }

    /// Target and output in one step.
    pub fn step(&self, q: usize, a: usize) -> (usize, usize) {
        (self.delta(q, a), self.rho(q, a))
    }

    pub fn sink(&self) -> Option<usize> {
        self.sink
    }

    pub fn is_structural_sink(&self, q: usize) -> bool {
        (0..self.alphabet.len()).all(|a| self.delta(q, a) == q && self.rho(q, a) == a)
    }

    fn unique_structural_sink(&self) -> Option<usize> {
        let mut found = None;
        for q in 0..self.states.len() {
            if self.is_structural_sink(q) {
                if found.is_some() {
                    return None;
                }
                found = Some(q);
            }
        }
        found
    }

    /// States that act as the identity on every word (their whole forward
    /// closure copies letters through unchanged).
    pub fn trivial_states(&self) -> Vec<bool> {
        let n = self.states.len();
        let mut trivial: Vec<bool> =
            (0..n).map(|q| (0..self.alphabet.len()).all(|a| self.rho(q, a) == a)).collect();
        loop {
            let mut changed = false;
            for q in 0..n {
                if trivial[q]
                    && (0..self.alphabet.len()).any(|a| !trivial[self.delta(q, a)])
                {
                    trivial[q] = false;
                    changed = true;
                }
            }
            if !changed {
                return trivial;
            }
        }
    }

    // ------------------------------------------------------------------
    // Tokens and word parsing
    // ------------------------------------------------------------------

    /// Printable token for a possibly inverted state.
    pub fn state_token(&self, s: SignedState) -> String {
        if s.inverse {
            format!("{}^-1", self.states[s.index])
        } else {
            self.states[s.index].clone()
        }
    }

    pub fn parse_state_token(&self, token: &str) -> Result<SignedState> {
        // exact names win, so an automaton whose states are themselves called
        // `x^-1` (an inverse automaton, a nucleus) parses its own names
        if let Some(i) = self.state_index(token) {
            return Ok(SignedState::pos(i));
        }
        if let Some(base) = token.strip_suffix("^-1") {
            if let Some(i) = self.state_index(base) {
                return Ok(SignedState::neg(i));
            }
        }
        Err(Error::Unknown(token.to_string()))
    }

    /// Parse a state word: split on whitespace/commas; a single unsplittable
    /// token falls back to per-character tokens when every character names a
    /// state. The empty string is the identity word.
    pub fn parse_state_word(&self, input: &str) -> Result<StateWord> {
        let tokens = tokenize(input);
        if tokens.is_empty() {
            return Ok(StateWord::identity());
        }
        if tokens.len() == 1 {
            let tok = &tokens[0];
            if let Ok(s) = self.parse_state_token(tok) {
                return Ok(StateWord(vec![s]));
            }
            let mut word = Vec::new();
            for ch in tok.chars() {
                match self.state_index(&ch.to_string()) {
                    Some(i) => word.push(SignedState::pos(i)),
                    None => return Err(Error::Unknown(tok.clone())),
                }
            }
            return Ok(StateWord(word));
        }
        tokens.iter().map(|t| self.parse_state_token(t)).collect::<Result<Vec<_>>>().map(StateWord)
    }

    /// Parse a letter word with the same tokenization rules.
    pub fn parse_letter_word(&self, input: &str) -> Result<LetterWord> {
        let tokens = tokenize(input);
        if tokens.is_empty() {
            return Ok(LetterWord(Vec::new()));
        }
        if tokens.len() == 1 {
            let tok = &tokens[0];
            if let Some(a) = self.letter_index(tok) {
                return Ok(LetterWord(vec![a]));
            }
            let mut word = Vec::new();
            for ch in tok.chars() {
                match self.letter_index(&ch.to_string()) {
                    Some(a) => word.push(a),
                    None => return Err(Error::Unknown(tok.clone())),
                }
            }
            return Ok(LetterWord(word));
        }
        tokens
            .iter()
            .map(|t| self.letter_index(t).ok_or_else(|| Error::Unknown(t.clone())))
            .collect::<Result<Vec<_>>>()
            .map(LetterWord)
    }

    /// Parse `pre|period` into an eventually periodic word.
    pub fn parse_epw(&self, input: &str) -> Result<Epw> {
        let Some((pre, per)) = input.split_once('|') else {
            return Err(Error::Parse {
                line: 0,
                msg: format!("expected `pre|period`, got `{input}`"),
            });
        };
        let pre = self.parse_letter_word(pre)?;
        let per = self.parse_letter_word(per)?;
        Epw::new(pre.0, per.0)
    }

    pub fn display_state_word(&self, w: &StateWord) -> String {
        if w.is_empty() {
            return "id".to_string();
        }
        w.0.iter().map(|&s| self.state_token(s)).collect::<Vec<_>>().join("*")
    }

    pub fn display_letter_word(&self, w: &LetterWord) -> String {
        let glue = if self.alphabet.iter().all(|a| a.chars().count() == 1) { "" } else { "," };
        w.0.iter().map(|&a| self.alphabet[a].clone()).collect::<Vec<_>>().join(glue)
    }

    pub fn display_epw(&self, e: &Epw) -> String {
        format!(
            "{}|{}",
            self.display_letter_word(&LetterWord(e.pre().to_vec())),
            self.display_letter_word(&LetterWord(e.period().to_vec()))
        )
    }

    // ------------------------------------------------------------------
    // Classification
    // ------------------------------------------------------------------

    /// Is every state's output row a permutation of the alphabet?
    pub fn is_invertible(&self) -> bool {
        self.first_non_invertible().is_none()
    }

    pub(crate) fn first_non_invertible(&self) -> Option<usize> {
        let l = self.alphabet.len();
        let mut seen = vec![false; l];
        for q in 0..self.states.len() {
            seen.iter_mut().for_each(|s| *s = false);
            for a in 0..l {
                let b = self.rho(q, a);
                if seen[b] {
                    return Some(q);
                }
                seen[b] = true;
            }
        }
        None
    }

    /// Is every letter's transition column a permutation of the states?
    pub fn is_reversible(&self) -> bool {
        let n = self.states.len();
        let mut seen = vec![false; n];
        for a in 0..self.alphabet.len() {
            seen.iter_mut().for_each(|s| *s = false);
            for q in 0..n {
                let p = self.delta(q, a);
                if seen[p] {
                    return false;
                }
                seen[p] = true;
            }
        }
        true
    }

    /// Invertible, reversible, and no two transitions share (output, target).
    pub fn is_bireversible(&self) -> bool {
        self.is_invertible() && self.is_reversible() && self.en_unique()
    }

    fn en_unique(&self) -> bool {
        let mut seen = vec![false; self.states.len() * self.alphabet.len()];
        for q in 0..self.states.len() {
            for a in 0..self.alphabet.len() {
                let key = self.delta(q, a) * self.alphabet.len() + self.rho(q, a);
                if seen[key] {
                    return false;
                }
                seen[key] = true;
            }
        }
        true
    }

    /// Weakly connected components of the state graph, each sorted, listed in
    /// order of their smallest state index.
    fn weak_components(&self) -> Vec<Vec<usize>> {
        let n = self.states.len();
        let mut adj = vec![Vec::new(); n];
        for q in 0..n {
            for a in 0..self.alphabet.len() {
                let p = self.delta(q, a);
                adj[q].push(p);
                adj[p].push(q);
            }
        }
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = next;
            while let Some(q) = stack.pop() {
                for &p in &adj[q] {
                    if comp[p] == usize::MAX {
                        comp[p] = next;
                        stack.push(p);
                    }
                }
            }
            next += 1;
        }
        let mut out = vec![Vec::new(); next];
        for q in 0..n {
            out[comp[q]].push(q);
        }
        out
    }

    /// Sub-automaton induced on a delta-closed state set.
    fn induced(&self, comp: &[usize]) -> MealyAutomaton {
        let back: HashMap<usize, usize> =
            comp.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let mut delta = Vec::with_capacity(comp.len() * self.alphabet.len());
        let mut rho = Vec::with_capacity(comp.len() * self.alphabet.len());
        for &q in comp {
            for a in 0..self.alphabet.len() {
                delta.push(back[&self.delta(q, a)]);
                rho.push(self.rho(q, a));
            }
        }
        MealyAutomaton {
            states: comp.iter().map(|&q| self.states[q].clone()).collect(),
            alphabet: self.alphabet.clone(),
            delta,
            rho,
            sink: None,
        }
    }

    pub fn classify(&self) -> ClassReport {
        let invertible = self.is_invertible();
        let reversible = self.is_reversible();
        let bireversible = invertible && reversible && self.en_unique();
        let has_sink = self.sink.is_some();
        let sink_accessible = self.sink.map(|e| self.accessible_from_all(e)).unwrap_or(false);
        let components = self
            .weak_components()
            .into_iter()
            .map(|comp| {
                let sub = self.induced(&comp);
                ComponentReport {
                    states: comp.iter().map(|&q| self.states[q].clone()).collect(),
                    bireversible: sub.is_bireversible(),
                }
            })
            .collect();
        ClassReport {
            invertible,
            reversible,
            bireversible,
            has_sink,
            sink_accessible_from_all: sink_accessible,
            is_s_a: invertible && has_sink && sink_accessible,
            components,
        }
    }

    fn accessible_from_all(&self, target: usize) -> bool {
        // Reverse reachability from the target along delta edges.
        let n = self.states.len();
        let mut reach = vec![false; n];
        reach[target] = true;
        loop {
            let mut changed = false;
            for q in 0..n {
                if !reach[q]
                    && (0..self.alphabet.len()).any(|a| reach[self.delta(q, a)])
                {
                    reach[q] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        reach.into_iter().all(|r| r)
    }

    // ------------------------------------------------------------------
    // Structural transforms
    // ------------------------------------------------------------------

    /// Exchange the roles of states and letters: the dual runs letters as
    /// states and states as letters, with `delta` and `rho` transposed.
    pub fn dual(&self) -> MealyAutomaton {
        let n = self.states.len();
        let l = self.alphabet.len();
        let mut delta = vec![0usize; l * n];
        let mut rho = vec![0usize; l * n];
        for a in 0..l {
            for q in 0..n {
                delta[a * n + q] = self.rho(q, a);
                rho[a * n + q] = self.delta(q, a);
            }
        }
        let mut m = MealyAutomaton {
            states: self.alphabet.clone(),
            alphabet: self.states.clone(),
            delta,
            rho,
            sink: None,
        };
        m.sink = m.unique_structural_sink();
        m
    }

    /// The inverse automaton on states `q^-1`, defined for invertible input:
    /// `q --a|b--> p` becomes `q^-1 --b|a--> p^-1`.
    pub fn inverse(&self) -> Result<MealyAutomaton> {
        if let Some(q) = self.first_non_invertible() {
            return Err(Error::NotInvertible { state: self.states[q].clone() });
        }
        let n = self.states.len();
        let l = self.alphabet.len();
        let mut delta = vec![0usize; n * l];
        let mut rho = vec![0usize; n * l];
        for q in 0..n {
            for a in 0..l {
                let (p, b) = self.step(q, a);
                delta[q * l + b] = p;
                rho[q * l + b] = a;
            }
        }
        MealyAutomaton::from_tables(
            (0..n).map(|q| self.state_token(SignedState::neg(q))).collect(),
            self.alphabet.clone(),
            delta,
            rho,
            self.sink,
        )
    }

    /// Disjoint union of the automaton and its inverse on states
    /// `q_0..q_{n-1}, q_0^-1..q_{n-1}^-1`.
    pub fn enrich(&self) -> Result<MealyAutomaton> {
        if let Some(q) = self.first_non_invertible() {
            return Err(Error::NotInvertible { state: self.states[q].clone() });
        }
        let n = self.states.len();
        let l = self.alphabet.len();
        let mut delta = vec![0usize; 2 * n * l];
        let mut rho = vec![0usize; 2 * n * l];
        for q in 0..n {
            for a in 0..l {
                let (p, b) = self.step(q, a);
                delta[q * l + a] = p;
                rho[q * l + a] = b;
                // inverse state reads b, writes a, moves to p^-1
                delta[(n + q) * l + b] = n + p;
                rho[(n + q) * l + b] = a;
            }
        }
        let mut names: Vec<String> = self.states.clone();
        names.extend((0..n).map(|q| self.state_token(SignedState::neg(q))));
        MealyAutomaton::from_tables(names, self.alphabet.clone(), delta, rho, self.sink)
    }

    /// Enrichment with the two sink copies identified: states are
    /// `Q` followed by the inverses of the non-sink states, and `e^-1 = e`.
    pub fn union_identify_sinks(&self) -> Result<MealyAutomaton> {
        let e = self.sink.ok_or(Error::NoSink)?;
        let en = self.enrich()?;
        let n = self.states.len();
        // enriched index -> merged index
        let mut names: Vec<String> = self.states.clone();
        let mut remap = vec![0usize; 2 * n];
        for q in 0..n {
            remap[q] = q;
        }
        for q in 0..n {
            if q == e {
                remap[n + q] = e;
            } else {
                remap[n + q] = names.len();
                names.push(self.state_token(SignedState::neg(q)));
            }
        }
        let l = self.alphabet.len();
        let mut delta = vec![0usize; names.len() * l];
        let mut rho = vec![0usize; names.len() * l];
        for old in 0..2 * n {
            // the merged sink keeps the positive copy's (identity) row
            if old == n + e {
                continue;
            }
            let new = remap[old];
            for a in 0..l {
                delta[new * l + a] = remap[en.delta(old, a)];
                rho[new * l + a] = en.rho(old, a);
            }
        }
        MealyAutomaton::from_tables(names, self.alphabet.clone(), delta, rho, Some(e))
    }

    /// Merge behaviourally equivalent states (standard partition refinement).
    pub fn minimize(&self) -> MealyAutomaton {
        let n = self.states.len();
        let l = self.alphabet.len();
        // initial partition: by output row
        let mut block: Vec<usize> = {
            let mut key_to_block: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            let mut blocks = Vec::with_capacity(n);
            for q in 0..n {
                let key: Vec<usize> = (0..l).map(|a| self.rho(q, a)).collect();
                let next = key_to_block.len();
                blocks.push(*key_to_block.entry(key).or_insert(next));
            }
            blocks
        };
        loop {
            let mut key_to_block: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
            let mut next_blocks = Vec::with_capacity(n);
            for q in 0..n {
                let key = (block[q], (0..l).map(|a| block[self.delta(q, a)]).collect::<Vec<_>>());
                let next = key_to_block.len();
                next_blocks.push(*key_to_block.entry(key).or_insert(next));
            }
            let stable = next_blocks == block;
            block = next_blocks;
            if stable {
                break;
            }
        }
        // representative = first member; blocks ordered by first member
        let mut rep_of_block: BTreeMap<usize, usize> = BTreeMap::new();
        let mut order: Vec<usize> = Vec::new();
        for q in 0..n {
            rep_of_block.entry(block[q]).or_insert_with(|| {
                order.push(block[q]);
                q
            });
        }
        let new_index: HashMap<usize, usize> =
            order.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let mut delta = Vec::with_capacity(order.len() * l);
        let mut rho = Vec::with_capacity(order.len() * l);
        let mut names = Vec::with_capacity(order.len());
        for &b in &order {
            let rep = rep_of_block[&b];
            names.push(self.states[rep].clone());
            for a in 0..l {
                delta.push(new_index[&block[self.delta(rep, a)]]);
                rho.push(self.rho(rep, a));
            }
        }
        let sink = self.sink.map(|e| new_index[&block[e]]);
        let mut m = MealyAutomaton { states: names, alphabet: self.alphabet.clone(), delta, rho, sink };
        if m.sink.is_none() {
            m.sink = m.unique_structural_sink();
        }
        m
    }

    // ------------------------------------------------------------------
    // Action
    // ------------------------------------------------------------------

    /// Run an index word through the tables in place: `states` is the word
    /// (rightmost acts first) and becomes the residual, `letters` becomes the
    /// output word.
    pub(crate) fn act_indices(&self, states: &mut [usize], letters: &mut [usize]) {
        for qi in (0..states.len()).rev() {
            let mut q = states[qi];
            for a in letters.iter_mut() {
                let (p, b) = self.step(q, *a);
                *a = b;
                q = p;
            }
            states[qi] = q;
        }
    }

    /// Apply a (possibly signed) state word to a letter word.  Returns the
    /// output word and the residual state word.  Signed words require the
    /// automaton to be invertible; evaluation then runs in the enrichment.
    pub fn act(&self, u: &StateWord, v: &LetterWord) -> Result<(LetterWord, StateWord)> {
        for s in &u.0 {
            if s.index >= self.states.len() {
                return Err(Error::Unknown(format!("state #{}", s.index)));
            }
        }
        for &a in &v.0 {
            if a >= self.alphabet.len() {
                return Err(Error::Unknown(format!("letter #{a}")));
            }
        }
        if u.is_positive() {
            let mut st: Vec<usize> = u.0.iter().map(|s| s.index).collect();
            let mut ls = v.0.clone();
            self.act_indices(&mut st, &mut ls);
            return Ok((LetterWord(ls), StateWord(st.into_iter().map(SignedState::pos).collect())));
        }
        let en = self.enrich()?;
        let n = self.states.len();
        let mut st: Vec<usize> =
            u.0.iter().map(|s| if s.inverse { n + s.index } else { s.index }).collect();
        let mut ls = v.0.clone();
        en.act_indices(&mut st, &mut ls);
        let residual = st
            .into_iter()
            .map(|i| if i < n { SignedState::pos(i) } else { SignedState::neg(i - n) })
            .collect();
        Ok((LetterWord(ls), StateWord(residual)))
    }
}

/// Aggregate classification of one automaton.
#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub invertible: bool,
    pub reversible: bool,
    pub bireversible: bool,
    pub has_sink: bool,
    pub sink_accessible_from_all: bool,
    pub is_s_a: bool,
    pub components: Vec<ComponentReport>,
}

/// Classification of one weakly connected component.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentReport {
    pub states: Vec<String>,
    pub bireversible: bool,
}

fn tokenize(input: &str) -> Vec<String> {
    input
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.to_string())
        .collect()
}

/// A partial transducer: transitions may be missing.  Used for restricted
/// helices, stable automata and inverse-letter (bidual) actions, where the
/// underlying map is only partially defined.
#[derive(Clone, Debug)]
pub struct PartialMealy {
    states: Vec<String>,
    alphabet: Vec<String>,
    trans: Vec<Option<(usize, usize)>>,
}

impl PartialMealy {
    pub fn from_parts(
        states: Vec<String>,
        alphabet: Vec<String>,
        trans: Vec<Option<(usize, usize)>>,
    ) -> Result<Self> {
        if states.is_empty() || alphabet.is_empty() {
            return Err(Error::Precondition("partial transducer needs states and letters".into()));
        }
        if trans.len() != states.len() * alphabet.len() {
            return Err(Error::Precondition("transition table has the wrong size".into()));
        }
        for t in trans.iter().flatten() {
            if t.0 >= states.len() || t.1 >= alphabet.len() {
                return Err(Error::Precondition("transition table entry out of range".into()));
            }
        }
        Ok(PartialMealy { states, alphabet, trans })
    }

    pub fn from_automaton(m: &MealyAutomaton) -> Self {
        let l = m.n_letters();
        let mut trans = Vec::with_capacity(m.n_states() * l);
        for q in 0..m.n_states() {
            for a in 0..l {
                trans.push(Some(m.step(q, a)));
            }
        }
        PartialMealy {
            states: m.state_names().to_vec(),
            alphabet: m.alphabet().to_vec(),
            trans,
        }
    }

    /// Sub-transducer on a subset of states: transitions leaving the subset
    /// are dropped.
    pub fn restrict(m: &MealyAutomaton, allowed: &[usize]) -> Self {
        let back: HashMap<usize, usize> =
            allowed.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let l = m.n_letters();
        let mut trans = Vec::with_capacity(allowed.len() * l);
        for &q in allowed {
            for a in 0..l {
                let (p, b) = m.step(q, a);
                trans.push(back.get(&p).map(|&p2| (p2, b)));
            }
        }
        PartialMealy {
            states: allowed.iter().map(|&q| m.state_name(q).to_string()).collect(),
            alphabet: m.alphabet().to_vec(),
            trans,
        }
    }

    /// Extend an automaton with inverse letters.  For `q --a|b--> p` the
    /// inverse-letter transition `p --a^-1|b^-1--> q` exists when `q` is the
    /// unique delta-preimage of `p` under `a`; ambiguous or missing preimages
    /// leave the transition undefined.
    pub fn with_inverse_letters(m: &MealyAutomaton) -> Self {
        let n = m.n_states();
        let l = m.n_letters();
        let mut alphabet = m.alphabet().to_vec();
        alphabet.extend(m.alphabet().iter().map(|a| format!("{a}^-1")));
        let mut trans = vec![None; n * 2 * l];
        // preimage[(p, a)]: unique q with delta(q, a) = p, if any
        let mut pre: Vec<Option<Option<usize>>> = vec![None; n * l];
        for q in 0..n {
            for a in 0..l {
                let p = m.delta(q, a);
                pre[p * l + a] = match pre[p * l + a] {
                    None => Some(Some(q)),
                    Some(_) => Some(None),
                };
            }
        }
        for q in 0..n {
            for a in 0..l {
                trans[q * 2 * l + a] = Some(m.step(q, a));
            }
        }
        for p in 0..n {
            for a in 0..l {
                if let Some(Some(q)) = pre[p * l + a] {
                    let b = m.rho(q, a);
                    trans[p * 2 * l + (l + a)] = Some((q, l + b));
                }
            }
        }
        PartialMealy { states: m.state_names().to_vec(), alphabet, trans }
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn letter_name(&self, a: usize) -> &str {
        &self.alphabet[a]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn step(&self, q: usize, a: usize) -> Option<(usize, usize)> {
        self.trans[q * self.alphabet.len() + a]
    }

    pub fn is_total(&self) -> bool {
        self.trans.iter().all(|t| t.is_some())
    }

    /// As `MealyAutomaton::act_indices`, but partial: `None` when any step is
    /// undefined (the buffers are left in an unspecified state then).
    pub fn act_indices(&self, states: &mut [usize], letters: &mut [usize]) -> Option<()> {
        for qi in (0..states.len()).rev() {
            let mut q = states[qi];
            for a in letters.iter_mut() {
                let (p, b) = self.step(q, *a)?;
                *a = b;
                q = p;
            }
            states[qi] = q;
        }
        Some(())
    }
}
