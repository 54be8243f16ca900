//! Minimal partial automata by the residual method, with the bounded
//! pairwise Myhill–Nerode test kept as an independent cross-check.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::function::{table_len, ColoredFunction, Word};

/// Index of a state in a [`Pdfa`].
pub type StateId = usize;

/// A leveled, acyclic partial DFA accepting a [`ColoredFunction`].
///
/// Every state is live: it is reachable from the start state and some word
/// through it reaches a special state. Special state `q_i` (stored at index
/// `i - 1`) is where words of color `i` end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pdfa {
    alphabet: u32,
    arity: u32,
    colors: u32,
    start: StateId,
    depth: Vec<u32>,
    transitions: Vec<Vec<Option<StateId>>>,
    special: Vec<Option<StateId>>,
}

impl Pdfa {
    pub fn state_count(&self) -> usize {
        self.depth.len()
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn colors(&self) -> u32 {
        self.colors
    }

    pub fn depth(&self, state: StateId) -> u32 {
        self.depth[state]
    }

    pub fn transition(&self, state: StateId, symbol: u32) -> Option<StateId> {
        self.transitions[state]
            .get(symbol as usize)
            .copied()
            .flatten()
    }

    /// The special state for `color` (1-based), if that color is used.
    pub fn special(&self, color: u32) -> Option<StateId> {
        if color == 0 {
            return None;
        }
        self.special.get(color as usize - 1).copied().flatten()
    }

    fn color_of(&self, state: StateId) -> u32 {
        self.special
            .iter()
            .position(|&s| s == Some(state))
            .map_or(0, |i| i as u32 + 1)
    }

    /// Number of states at each depth `0..=n`.
    pub fn states_by_depth(&self) -> Vec<usize> {
        let mut counts = vec![0; self.arity as usize + 1];
        for &d in &self.depth {
            counts[d as usize] += 1;
        }
        counts
    }
}

/// Distinct nonzero residual blocks at each depth `0..=n`.
fn residual_classes(f: &ColoredFunction) -> Vec<HashMap<&[u32], usize>> {
    let (b, n) = (f.alphabet(), f.arity());
    let table = f.table();
    (0..=n)
        .map(|d| {
            let block = table_len(b, n - d).expect("block fits inside an existing table");
            let mut seen: HashMap<&[u32], usize> = HashMap::new();
            for chunk in table.chunks(block) {
                if chunk.iter().any(|&v| v != 0) {
                    let next = seen.len();
                    seen.entry(chunk).or_insert(next);
                }
            }
            seen
        })
        .collect()
}

/// Number of distinct nonzero residuals at each depth `0..=n`.
pub fn states_by_depth(f: &ColoredFunction) -> Vec<usize> {
    residual_classes(f).iter().map(HashMap::len).collect()
}

/// Size of the minimal partial DFA accepting `f`; 0 for the zero function.
pub fn state_complexity(f: &ColoredFunction) -> usize {
    states_by_depth(f).into_iter().sum()
}

/// The minimal partial DFA of a nonzero function.
///
/// States are numbered by depth, then by the least prefix reaching them.
pub fn minimal_pdfa(f: &ColoredFunction) -> Result<Pdfa> {
    let (b, n, c) = (f.alphabet(), f.arity(), f.colors());
    let classes = residual_classes(f);
    if classes[0].is_empty() {
        return Err(Error::NoAutomaton);
    }
    let table = f.table();
    let mut offset = 0;
    let mut depth = Vec::new();
    let mut level_ids: Vec<HashMap<&[u32], StateId>> = Vec::with_capacity(classes.len());
    for (d, level) in classes.iter().enumerate() {
        let ids: HashMap<&[u32], StateId> = level.iter().map(|(&k, &v)| (k, offset + v)).collect();
        depth.extend(std::iter::repeat_n(d as u32, level.len()));
        offset += level.len();
        level_ids.push(ids);
    }
    let mut transitions = vec![vec![None; b as usize]; offset];
    for d in 0..n {
        let block = table_len(b, n - d)?;
        let child = block / b as usize;
        for chunk in table.chunks(block) {
            let Some(&from) = level_ids[d as usize].get(chunk) else {
                continue;
            };
            for (sym, sub) in chunk.chunks(child).enumerate() {
                if let Some(&to) = level_ids[d as usize + 1].get(sub) {
                    transitions[from][sym] = Some(to);
                }
            }
        }
    }
    let mut special = vec![None; c.saturating_sub(1) as usize];
    for (chunk, &id) in &level_ids[n as usize] {
        special[chunk[0] as usize - 1] = Some(id);
    }
    Ok(Pdfa {
        alphabet: b,
        arity: n,
        colors: c,
        start: 0,
        depth,
        transitions,
        special,
    })
}

/// Runs `w` through `a`; the color of the special state it ends in, else 0.
pub fn run(a: &Pdfa, w: &Word) -> Result<u32> {
    if w.len() != a.arity as usize {
        return Err(Error::InvalidInput(format!(
            "word {w} has length {}, automaton reads words of length {}",
            w.len(),
            a.arity
        )));
    }
    let mut state = a.start;
    for &sym in w.digits() {
        if sym >= a.alphabet {
            return Err(Error::InvalidInput(format!(
                "symbol {sym} outside alphabet of size {}",
                a.alphabet
            )));
        }
        match a.transition(state, sym) {
            Some(next) => state = next,
            None => return Ok(0),
        }
    }
    Ok(a.color_of(state))
}

/// How a candidate word is tested for membership in the pairwise oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Membership {
    /// A word of length `n` has its color; shorter words have color 0.
    #[default]
    Plain,
    /// A word of length `n` is accepted iff it lies above some accepted word
    /// (binary functions only).
    UpClosure,
}

fn membership_table(f: &ColoredFunction, membership: Membership) -> Result<Vec<u32>> {
    match membership {
        Membership::Plain => Ok(f.table().to_vec()),
        Membership::UpClosure => {
            if f.alphabet() != 2 || f.colors() != 2 {
                return Err(Error::Unsupported(
                    "up-closure membership needs b = 2, c = 2".into(),
                ));
            }
            let mut t = f.table().to_vec();
            // rank order visits every subset before its supersets
            for x in 0..t.len() {
                if t[x] == 1 {
                    continue;
                }
                t[x] =
                    (0..f.arity()).any(|bit| x & (1 << bit) != 0 && t[x & !(1 << bit)] == 1) as u32;
            }
            Ok(t)
        }
    }
}

struct PairOracle<'a> {
    b: u32,
    n: usize,
    table: &'a [u32],
}

impl PairOracle<'_> {
    fn color(&self, prefix: &[u32], suffix: &[u32]) -> u32 {
        if prefix.len() + suffix.len() != self.n {
            return 0;
        }
        let r = prefix
            .iter()
            .chain(suffix)
            .fold(0usize, |r, &d| r * self.b as usize + d as usize);
        self.table[r]
    }

    /// No extension `u` with both `s·u` and `t·u` of length at most `n`
    /// separates `s` from `t`.
    fn equivalent(&self, s: &[u32], t: &[u32]) -> bool {
        let longest = s.len().max(t.len());
        if longest > self.n {
            return true;
        }
        for len in 0..=self.n - longest {
            let count = (self.b as usize).pow(len as u32);
            for r in 0..count {
                let u = Word::unrank(r, len, self.b);
                if self.color(s, u.digits()) != self.color(t, u.digits()) {
                    return false;
                }
            }
        }
        true
    }

    fn live(&self, s: &[u32]) -> bool {
        if s.len() > self.n {
            return false;
        }
        let len = self.n - s.len();
        (0..(self.b as usize).pow(len as u32))
            .any(|r| self.color(s, Word::unrank(r, len, self.b).digits()) != 0)
    }
}

/// Bounded Myhill–Nerode equivalence of `s` and `t` with plain membership.
pub fn mn_equivalent(s: &Word, t: &Word, f: &ColoredFunction) -> Result<bool> {
    mn_equivalent_with(s, t, f, Membership::Plain)
}

pub fn mn_equivalent_with(
    s: &Word,
    t: &Word,
    f: &ColoredFunction,
    membership: Membership,
) -> Result<bool> {
    let (b, n) = (f.alphabet(), f.arity() as usize);
    for w in [s, t] {
        if w.len() > n {
            return Err(Error::InvalidInput(format!(
                "word {w} is longer than n = {n}"
            )));
        }
        w.rank(b)?;
    }
    let table = membership_table(f, membership)?;
    Ok(PairOracle {
        b,
        n,
        table: &table,
    }
    .equivalent(s.digits(), t.digits()))
}

/// Number of bounded Myhill–Nerode classes among live prefixes of length
/// `0..=n`, computed by pairwise tests against class representatives.
pub fn mn_class_count(f: &ColoredFunction, membership: Membership) -> Result<usize> {
    let (b, n) = (f.alphabet(), f.arity() as usize);
    let table = membership_table(f, membership)?;
    let oracle = PairOracle {
        b,
        n,
        table: &table,
    };
    let mut reps: Vec<Word> = Vec::new();
    for len in 0..=n {
        for r in 0..table_len(b, len as u32)? {
            let w = Word::unrank(r, len, b);
            if !oracle.live(w.digits()) {
                continue;
            }
            if !reps
                .iter()
                .any(|rep| oracle.equivalent(rep.digits(), w.digits()))
            {
                reps.push(w);
            }
        }
    }
    Ok(reps.len())
}

/// Graphviz rendering; parallel edges are merged into one labelled with the
/// sorted symbol list.
pub fn export_dot(a: &Pdfa) -> String {
    let mut out = String::from("digraph pdfa {\n  rankdir=LR;\n  node [shape=circle];\n");
    out.push_str("  start [shape=point];\n");
    let _ = writeln!(out, "  start -> s{};", a.start);
    for s in 0..a.state_count() {
        let color = a.color_of(s);
        if color > 0 {
            let _ = writeln!(out, "  s{s} [shape=doublecircle, label=\"q_{color}\"];");
        } else {
            let _ = writeln!(out, "  s{s} [label=\"{s}\"];");
        }
    }
    for (from, row) in a.transitions.iter().enumerate() {
        let mut targets: Vec<(StateId, Vec<usize>)> = Vec::new();
        for (sym, to) in row.iter().enumerate() {
            let Some(to) = *to else { continue };
            match targets.iter_mut().find(|(t, _)| *t == to) {
                Some((_, syms)) => syms.push(sym),
                None => targets.push((to, vec![sym])),
            }
        }
        for (to, syms) in targets {
            let label = syms
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let _ = writeln!(out, "  s{from} -> s{to} [label=\"{label}\"];");
        }
    }
    out.push_str("}\n");
    out
}
