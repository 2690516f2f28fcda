//! Helix graphs: the finite dynamics of simultaneous residuation on pairs
//! (state word, letter word), their cycle structure, commuting pairs read
//! off the cycles, bounded commuting-pair searches over restricted state
//! sets, elementary-relation tests, and the singularity shape predicates.

use crate::automaton::{MealyAutomaton, PartialMealy};
use crate::error::{Error, Result};
use crate::group::{is_identity, DEFAULT_CLOSURE_CAP};
use crate::words::{LetterWord, SignedState, StateWord};

/// The directed graph on pairs (u, v) ∈ Q^k × X^n with the single move
/// (u, v) → (u·v, u∘v).  Built over a possibly partial carrier, so the
/// out-degree is at most one; for total carriers it is exactly one.
#[derive(Clone, Debug)]
pub struct HelixGraph {
    k: usize,
    n: usize,
    state_names: Vec<String>,
    letter_names: Vec<String>,
    succ: Vec<Option<usize>>,
}

impl HelixGraph {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    pub fn succ(&self, node: usize) -> Option<usize> {
        self.succ[node]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn letter_names(&self) -> &[String] {
        &self.letter_names
    }

    /// Node id of the pair with the given digit vectors.  Ids order nodes
    /// lexicographically by (u, v), leftmost digit most significant.
    pub fn encode(&self, u: &[usize], v: &[usize]) -> usize {
        debug_assert_eq!(u.len(), self.k);
        debug_assert_eq!(v.len(), self.n);
        let s = self.state_names.len();
        let l = self.letter_names.len();
        let mut id = 0usize;
        for &q in u {
            id = id * s + q;
        }
        for &a in v {
            id = id * l + a;
        }
        id
    }

    pub fn decode(&self, node: usize) -> (Vec<usize>, Vec<usize>) {
        let s = self.state_names.len();
        let l = self.letter_names.len();
        let mut id = node;
        let mut v = vec![0usize; self.n];
        for i in (0..self.n).rev() {
            v[i] = id % l;
            id /= l;
        }
        let mut u = vec![0usize; self.k];
        for i in (0..self.k).rev() {
            u[i] = id % s;
            id /= s;
        }
        (u, v)
    }

    pub fn node_name(&self, node: usize) -> String {
        let (u, v) = self.decode(node);
        let glue = if self.letter_names.iter().all(|a| a.chars().count() == 1) { "" } else { "," };
        format!(
            "{}|{}",
            u.iter().map(|&q| self.state_names[q].clone()).collect::<Vec<_>>().join("*"),
            v.iter().map(|&a| self.letter_names[a].clone()).collect::<Vec<_>>().join(glue)
        )
    }

    /// All cycles, each rotated to start at its least node id and the list
    /// ordered by that anchor.  Functional graph, so plain pointer chasing
    /// with visitation stamps finds every cycle once.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let total = self.succ.len();
        let mut state = vec![0u8; total]; // 0 new, 1 on current walk, 2 settled
        let mut cycles = Vec::new();
        for start in 0..total {
            if state[start] != 0 {
                continue;
            }
            let mut path = Vec::new();
            let mut cur = start;
            loop {
                match state[cur] {
                    1 => {
                        let pos = path.iter().position(|&x| x == cur).unwrap();
                        let mut cyc = path[pos..].to_vec();
                        let min_pos =
                            cyc.iter().enumerate().min_by_key(|&(_, &v)| v).unwrap().0;
                        cyc.rotate_left(min_pos);
                        cycles.push(cyc);
                        break;
                    }
                    2 => break,
                    _ => {}
                }
                state[cur] = 1;
                path.push(cur);
                match self.succ[cur] {
                    Some(next) => cur = next,
                    None => break,
                }
            }
            for &v in &path {
                state[v] = 2;
            }
        }
        cycles.sort_by_key(|c| c[0]);
        cycles
    }

    /// Nodes with succ(node) == node.
    pub fn self_loops(&self) -> Vec<usize> {
        (0..self.succ.len()).filter(|&i| self.succ[i] == Some(i)).collect()
    }

    /// GraphViz rendering with cycle nodes drawn double-circled.
    pub fn to_dot(&self, name: &str) -> String {
        let mut on_cycle = vec![false; self.succ.len()];
        for c in self.cycles() {
            for v in c {
                on_cycle[v] = true;
            }
        }
        let mut out = format!("digraph {name} {{\n  node [shape=circle];\n");
        for i in 0..self.succ.len() {
            let shape = if on_cycle[i] { " [shape=doublecircle]" } else { "" };
            out.push_str(&format!("  \"{}\"{};\n", self.node_name(i), shape));
        }
        for i in 0..self.succ.len() {
            if let Some(j) = self.succ[i] {
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\";\n",
                    self.node_name(i),
                    self.node_name(j)
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// The helix of a (partial) carrier at word lengths (k, n).
pub fn helix_of_partial(
    pm: &PartialMealy,
    k: usize,
    n: usize,
    node_cap: usize,
) -> Result<HelixGraph> {
    if k == 0 || n == 0 {
        return Err(Error::Precondition("helix needs positive word lengths".into()));
    }
    let s = pm.n_states();
    let l = pm.n_letters();
    let count = (|| {
        let a = s.checked_pow(k.try_into().ok()?)?;
        let b = l.checked_pow(n.try_into().ok()?)?;
        a.checked_mul(b)
    })();
    let count = match count {
        Some(c) if c <= node_cap => c,
        _ => {
            return Err(Error::Budget(format!(
                "helix at ({k}, {n}) would have more than {node_cap} nodes"
            )))
        }
    };
    let mut h = HelixGraph {
        k,
        n,
        state_names: pm.state_names().to_vec(),
        letter_names: pm.alphabet().to_vec(),
        succ: vec![None; count],
    };
    for node in 0..count {
        let (mut u, mut v) = h.decode(node);
        if pm.act_indices(&mut u, &mut v).is_some() {
            h.succ[node] = Some(h.encode(&u, &v));
        }
    }
    Ok(h)
}

/// The helix of a complete automaton; `signed` moves the state axis to Q̃.
pub fn build_helix(
    m: &MealyAutomaton,
    k: usize,
    n: usize,
    signed: bool,
    node_cap: usize,
) -> Result<HelixGraph> {
    let carrier = if signed {
        PartialMealy::from_automaton(&m.enrich()?)
    } else {
        PartialMealy::from_automaton(m)
    };
    helix_of_partial(&carrier, k, n, node_cap)
}

/// A pair with u·v = u and u∘v = v, re-validated on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutingPair {
    pub u: StateWord,
    pub v: LetterWord,
}

impl CommutingPair {
    pub(crate) fn validated(m: &MealyAutomaton, u: StateWord, v: LetterWord) -> Result<Self> {
        let (out, res) = m.act(&u, &v)?;
        assert_eq!(out, v, "commuting pair: output word must reproduce v");
        assert_eq!(res, u, "commuting pair: residual word must reproduce u");
        Ok(CommutingPair { u, v })
    }
}

/// Read one commuting pair off every cycle: a cycle (u_0,v_0) → … → (u_m,v_m)
/// composes to the pair (u_m⋯u_0, v_0⋯v_m).  State and letter names of the
/// helix are resolved against `m`, so this also works for helices over
/// sub-automata or the enrichment of `m`.
pub fn cycles_to_pairs(m: &MealyAutomaton, h: &HelixGraph) -> Result<Vec<CommutingPair>> {
    let states: Vec<SignedState> = h
        .state_names()
        .iter()
        .map(|name| m.parse_state_token(name))
        .collect::<Result<_>>()?;
    let letters: Vec<usize> = h
        .letter_names()
        .iter()
        .map(|name| m.letter_index(name).ok_or_else(|| Error::Unknown(name.clone())))
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for cycle in h.cycles() {
        let mut u = Vec::new();
        let mut v = Vec::new();
        for &node in &cycle {
            let (du, dv) = h.decode(node);
            // composition: later cycle steps act later, so they go in front
            let mut front: Vec<SignedState> = du.iter().map(|&q| states[q]).collect();
            front.extend_from_slice(&u);
            u = front;
            v.extend(dv.iter().map(|&a| letters[a]));
        }
        pairs.push(CommutingPair::validated(m, StateWord(u), LetterWord(v))?);
    }
    Ok(pairs)
}

/// Outcome of a bounded commuting-pair search.
#[derive(Debug, Clone)]
pub struct PairReport {
    pub found: bool,
    pub pair: Option<CommutingPair>,
    /// For the e-free searches: does the found u act as the identity?
    /// `None` when nothing was found or the identity test blew its budget.
    pub u_is_identity: Option<bool>,
    pub budget_exhausted: bool,
}

impl PairReport {
    fn not_found(budget_exhausted: bool) -> Self {
        PairReport { found: false, pair: None, u_is_identity: None, budget_exhausted }
    }
}

/// Search the helices of the sub-automaton on `allowed` states for cycles,
/// smallest k + n first, and return the first composed pair.  Missing
/// transitions (leaving the allowed set) prune paths, so any cycle found
/// stays inside the allowed states; the pair is re-validated in `m`.
pub fn restricted_commuting_pair(
    m: &MealyAutomaton,
    allowed: &[usize],
    k_max: usize,
    n_max: usize,
    node_cap: usize,
) -> Result<PairReport> {
    if allowed.is_empty() {
        return Err(Error::Precondition("restricted search needs allowed states".into()));
    }
    for &q in allowed {
        if q >= m.n_states() {
            return Err(Error::Unknown(format!("state #{q}")));
        }
    }
    let carrier = PartialMealy::restrict(m, allowed);
    search_pairs(m, &carrier, k_max, n_max, node_cap, false)
}

fn search_pairs(
    m: &MealyAutomaton,
    carrier: &PartialMealy,
    k_max: usize,
    n_max: usize,
    node_cap: usize,
    reduced_only: bool,
) -> Result<PairReport> {
    let mut budget_exhausted = false;
    for total in 2..=k_max.saturating_add(n_max) {
        for k in 1..=k_max.min(total.saturating_sub(1)) {
            let n = total - k;
            if n == 0 || n > n_max {
                continue;
            }
            let h = match helix_of_partial(carrier, k, n, node_cap) {
                Ok(h) => h,
                Err(Error::Budget(_)) => {
                    budget_exhausted = true;
                    continue;
                }
                Err(e) => return Err(e),
            };
            for pair in cycles_to_pairs(m, &h)? {
                if reduced_only && !pair.u.is_reduced() {
                    continue;
                }
                return Ok(PairReport {
                    found: true,
                    pair: Some(pair),
                    u_is_identity: None,
                    budget_exhausted: false,
                });
            }
        }
    }
    Ok(PairReport::not_found(budget_exhausted))
}

/// Commuting pairs with u free of the sink state: the restricted search on
/// Q∖{e}, or — signed — on reduced words over Q̃∖{e, e⁻¹}.  The report says
/// whether the found u nevertheless acts as the identity.
pub fn non_elementary_commuting_pair(
    m: &MealyAutomaton,
    k_max: usize,
    n_max: usize,
    signed: bool,
    node_cap: usize,
    closure_cap: usize,
) -> Result<PairReport> {
    let class = m.classify();
    if !class.is_s_a {
        return Err(Error::Precondition(
            "e-free pair search needs an invertible automaton with an accessible sink".into(),
        ));
    }
    let e = m.sink().expect("S_a implies a sink");
    let mut report = if signed {
        let en = m.enrich()?;
        let base = m.n_states();
        let allowed: Vec<usize> =
            (0..en.n_states()).filter(|&q| q != e && q != base + e).collect();
        if allowed.is_empty() {
            return Ok(PairReport::not_found(false));
        }
        let carrier = PartialMealy::restrict(&en, &allowed);
        search_pairs(m, &carrier, k_max, n_max, node_cap, true)?
    } else {
        let allowed: Vec<usize> = (0..m.n_states()).filter(|&q| q != e).collect();
        if allowed.is_empty() {
            return Ok(PairReport::not_found(false));
        }
        restricted_commuting_pair(m, &allowed, k_max, n_max, node_cap)?
    };
    if let Some(pair) = &report.pair {
        match is_identity(m, &pair.u, closure_cap) {
            Ok(t) => report.u_is_identity = Some(t),
            Err(Error::Budget(_)) => {
                report.u_is_identity = None;
                report.budget_exhausted = true;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// Is the relation u (a positive sink-free identity word) elementary: do all
/// its deep enough sections collapse to sink words?  Exact via the finite
/// section-word digraph — elementary iff every cycle there stays inside
/// all-sink words.
pub fn is_elementary_relation(
    m: &MealyAutomaton,
    u: &StateWord,
    closure_cap: usize,
) -> Result<bool> {
    let class = m.classify();
    if !class.is_s_a {
        return Err(Error::Precondition(
            "elementary-relation test needs an invertible automaton with a sink".into(),
        ));
    }
    let e = m.sink().expect("S_a implies a sink");
    if !u.is_positive() || u.0.iter().any(|s| s.index == e) {
        return Err(Error::Precondition(
            "elementary-relation test wants a positive sink-free word".into(),
        ));
    }
    if !is_identity(m, u, closure_cap)? {
        return Err(Error::Precondition("the word is not a relation".into()));
    }
    // closure of the raw (unnormalized) section words, |Q|^|u| at most
    let start: Vec<usize> = u.0.iter().map(|s| s.index).collect();
    let mut index = std::collections::HashMap::new();
    let mut nodes: Vec<Vec<usize>> = Vec::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    index.insert(start.clone(), 0usize);
    nodes.push(start);
    let mut head = 0;
    while head < nodes.len() {
        if nodes.len() > closure_cap {
            return Err(Error::Budget(format!(
                "elementary-relation test: section closure exceeded {closure_cap} words"
            )));
        }
        let w = nodes[head].clone();
        let mut out = Vec::with_capacity(m.n_letters());
        for a in 0..m.n_letters() {
            let mut sec = w.clone();
            let mut letters = [a];
            m.act_indices(&mut sec, &mut letters);
            debug_assert_eq!(letters[0], a, "sections of a relation preserve letters");
            let next = *index.entry(sec.clone()).or_insert_with(|| {
                nodes.push(sec);
                nodes.len() - 1
            });
            out.push(next);
        }
        edges.push(out);
        head += 1;
    }
    // elementary iff the subgraph without the all-sink words is acyclic
    let trivial: Vec<bool> = nodes.iter().map(|w| w.iter().all(|&q| q == e)).collect();
    let mut color = vec![0u8; nodes.len()];
    for start in 0..nodes.len() {
        if trivial[start] || color[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        color[start] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < edges[v].len() {
                let w = edges[v][*next];
                *next += 1;
                if trivial[w] {
                    continue;
                }
                match color[w] {
                    0 => {
                        color[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return Ok(false),
                    _ => {}
                }
            } else {
                color[v] = 2;
                stack.pop();
            }
        }
    }
    Ok(true)
}

/// Which cycles a helix is allowed to have.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeMode {
    /// Plain helix: every cycle is a self-loop at some (e^k, v).
    Singular,
    /// Signed helix: every cycle's state word is over {e, e⁻¹} or acts as
    /// the identity.
    StronglySingular,
    /// Signed helix with signed letters: cycles whose letter word does not
    /// freely vanish must have a sink word or an identity-acting state word.
    EssentiallySingular,
}

/// Check every cycle of the requested helix against the shape predicate.
pub fn helix_shape(
    m: &MealyAutomaton,
    k: usize,
    n: usize,
    mode: ShapeMode,
    node_cap: usize,
    closure_cap: usize,
) -> Result<bool> {
    let class = m.classify();
    if !class.is_s_a {
        return Err(Error::Precondition(
            "shape predicates need an invertible automaton with an accessible sink".into(),
        ));
    }
    let e = m.sink().expect("S_a implies a sink");
    let base = m.n_states();
    let h = match mode {
        ShapeMode::Singular => build_helix(m, k, n, false, node_cap)?,
        ShapeMode::StronglySingular => build_helix(m, k, n, true, node_cap)?,
        ShapeMode::EssentiallySingular => {
            let carrier = PartialMealy::with_inverse_letters(&m.enrich()?);
            helix_of_partial(&carrier, k, n, node_cap)?
        }
    };
    let decode_signed = |u: &[usize]| -> StateWord {
        StateWord(
            u.iter()
                .map(|&q| if q < base { SignedState::pos(q) } else { SignedState::neg(q - base) })
                .collect(),
        )
    };
    let sink_word =
        |u: &[usize]| -> bool { u.iter().all(|&q| q == e || q == base + e) };
    for cycle in h.cycles() {
        let (u, _) = h.decode(cycle[0]);
        match mode {
            ShapeMode::Singular => {
                if !u.iter().all(|&q| q == e) {
                    return Ok(false);
                }
            }
            ShapeMode::StronglySingular => {
                if sink_word(&u) {
                    continue;
                }
                if !is_identity(m, &decode_signed(&u), closure_cap)? {
                    return Ok(false);
                }
            }
            ShapeMode::EssentiallySingular => {
                // a cycle only matters when some node carries a letter word
                // that survives free reduction: those are the cycles whose
                // periodic boundary word is essentially non-trivial
                let l = m.n_letters();
                let survives = cycle.iter().any(|&node| {
                    let (_, v) = h.decode(node);
                    let mut stack: Vec<usize> = Vec::new();
                    for &x in &v {
                        let inv = if x >= l { x - l } else { x + l };
                        if stack.last() == Some(&inv) {
                            stack.pop();
                        } else {
                            stack.push(x);
                        }
                    }
                    !stack.is_empty()
                });
                if !survives || sink_word(&u) {
                    continue;
                }
                if !is_identity(m, &decode_signed(&u), closure_cap)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Convenience wrapper: default identity budget.
pub fn helix_shape_default(
    m: &MealyAutomaton,
    k: usize,
    n: usize,
    mode: ShapeMode,
    node_cap: usize,
) -> Result<bool> {
    helix_shape(m, k, n, mode, node_cap, DEFAULT_CLOSURE_CAP)
}
