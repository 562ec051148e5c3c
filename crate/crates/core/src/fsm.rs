//! Complete deterministic finite state machines over the ternary alphabet.
//!
//! A machine is a total transition table over dense state indices, a start
//! state, and a set of accepting states. Machines are plain values: cloning
//! is cheap, mutation happens only through the explicit editing methods, and
//! shared references are safe to evaluate from many threads at once.
//!
//! The snapshot text format is one header line
//! `states=<N> start=<i> accepting=<comma-list>` followed by `N` lines of
//! three target indices (the successors on `a`, `b`, `c`).

use std::fmt;

use thiserror::Error;

/// Input symbol. The alphabet is fixed to three letters ordered `a < b < c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Symbol {
    A = 0,
    B = 1,
    C = 2,
}

impl Symbol {
    /// All symbols in alphabetical order.
    pub const ALL: [Symbol; 3] = [Symbol::A, Symbol::B, Symbol::C];

    /// Alphabet size. Derived from [`Symbol::ALL`]; nothing else hard-codes it.
    pub const COUNT: usize = Symbol::ALL.len();

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Symbol> {
        Symbol::ALL.get(index).copied()
    }

    pub fn as_char(self) -> char {
        match self {
            Symbol::A => 'a',
            Symbol::B => 'b',
            Symbol::C => 'c',
        }
    }

    pub fn from_char(c: char) -> Option<Symbol> {
        match c {
            'a' => Some(Symbol::A),
            'b' => Some(Symbol::B),
            'c' => Some(Symbol::C),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Parse a word like `"abca"` into symbols. The empty string is valid.
pub fn parse_symbols(s: &str) -> Result<Vec<Symbol>, FsmError> {
    s.chars()
        .map(|c| Symbol::from_char(c).ok_or(FsmError::BadSymbol(c)))
        .collect()
}

/// Render symbols back to a plain string.
pub fn format_symbols(s: &[Symbol]) -> String {
    s.iter().map(|sym| sym.as_char()).collect()
}

/// Dense state index, valid only for the machine it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(u32);

impl StateId {
    pub const fn new(index: u32) -> StateId {
        StateId(index)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FsmError {
    #[error("a machine needs at least one state")]
    NoStates,
    #[error("state index {index} out of range for a {states}-state machine")]
    StateOutOfRange { index: u32, states: usize },
    #[error("'{0}' is not an alphabet symbol")]
    BadSymbol(char),
    #[error("malformed machine text: {0}")]
    Malformed(String),
}

/// A complete deterministic finite state machine.
///
/// Invariants, established at construction and preserved by the editing
/// methods: the transition table is total (one target per state and symbol),
/// every target is a valid state, the start state is valid, and there is at
/// least one state.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Fsm {
    /// Row-major table: `transitions[q * Symbol::COUNT + c]`.
    transitions: Vec<StateId>,
    accepting: Vec<bool>,
    start: StateId,
}

impl Fsm {
    /// Build a machine from per-state transition rows (targets for `a`, `b`,
    /// `c` in order) plus the start state and the accepting set.
    pub fn from_parts(
        rows: Vec<[u32; Symbol::COUNT]>,
        start: u32,
        accepting_states: impl IntoIterator<Item = u32>,
    ) -> Result<Fsm, FsmError> {
        let states = rows.len();
        if states == 0 {
            return Err(FsmError::NoStates);
        }
        let check = |index: u32| {
            if (index as usize) < states {
                Ok(StateId(index))
            } else {
                Err(FsmError::StateOutOfRange { index, states })
            }
        };
        let mut transitions = Vec::with_capacity(states * Symbol::COUNT);
        for row in &rows {
            for &target in row {
                transitions.push(check(target)?);
            }
        }
        let start = check(start)?;
        let mut accepting = vec![false; states];
        for q in accepting_states {
            accepting[check(q)?.index()] = true;
        }
        Ok(Fsm {
            transitions,
            accepting,
            start,
        })
    }

    /// The one-state machine that rejects every string: all arcs self-loop
    /// and the single state is non-accepting.
    pub fn reject_all() -> Fsm {
        Fsm {
            transitions: vec![StateId(0); Symbol::COUNT],
            accepting: vec![false],
            start: StateId(0),
        }
    }

    #[inline]
    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    #[inline]
    pub fn start(&self) -> StateId {
        self.start
    }

    #[inline]
    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q.index()]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.accepting
            .iter()
            .enumerate()
            .filter(|(_, &acc)| acc)
            .map(|(i, _)| StateId(i as u32))
    }

    /// One transition: the successor of `q` on `c`.
    #[inline]
    pub fn step(&self, q: StateId, c: Symbol) -> StateId {
        self.transitions[q.index() * Symbol::COUNT + c.index()]
    }

    /// Run the machine on `s` starting from `q`.
    #[inline]
    pub fn run_from(&self, q: StateId, s: &[Symbol]) -> StateId {
        let mut state = q;
        for &c in s {
            state = self.step(state, c);
        }
        state
    }

    /// Run the machine on `s` from the start state; the empty string stays
    /// at the start state.
    #[inline]
    pub fn run(&self, s: &[Symbol]) -> StateId {
        self.run_from(self.start, s)
    }

    /// Whether the machine accepts `s`.
    #[inline]
    pub fn accepts(&self, s: &[Symbol]) -> bool {
        self.is_accepting(self.run(s))
    }

    /// Redirect the arc from `q` on `c` to `target`.
    pub fn set_transition(&mut self, q: StateId, c: Symbol, target: StateId) {
        assert!(target.index() < self.state_count(), "invalid target state");
        self.transitions[q.index() * Symbol::COUNT + c.index()] = target;
    }

    /// Append a fresh non-accepting state whose arcs all self-loop; returns
    /// its id (the previous state count).
    pub fn add_state(&mut self) -> StateId {
        let id = StateId(self.state_count() as u32);
        self.transitions.extend([id; Symbol::COUNT]);
        self.accepting.push(false);
        id
    }

    pub fn set_accepting(&mut self, q: StateId, accepting: bool) {
        self.accepting[q.index()] = accepting;
    }

    /// States reachable from the start, in breadth-first discovery order
    /// (symbol order `a < b < c`).
    fn reachable(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.state_count()];
        let mut order = Vec::with_capacity(self.state_count());
        seen[self.start.index()] = true;
        order.push(self.start);
        let mut head = 0;
        while head < order.len() {
            let q = order[head];
            head += 1;
            for c in Symbol::ALL {
                let t = self.step(q, c);
                if !seen[t.index()] {
                    seen[t.index()] = true;
                    order.push(t);
                }
            }
        }
        order
    }

    /// The canonical minimal machine recognizing the same language.
    ///
    /// Unreachable states are dropped, Nerode-equivalent states are merged by
    /// partition refinement, and the result is renumbered in breadth-first
    /// order from the start state with symbol order `a < b < c`. Equal
    /// languages therefore yield identical values, so [`Fsm::equivalent`]
    /// can compare minimized machines directly.
    pub fn minimize(&self) -> Fsm {
        let order = self.reachable();
        // dense index within the reachable subset
        let mut dense = vec![usize::MAX; self.state_count()];
        for (i, q) in order.iter().enumerate() {
            dense[q.index()] = i;
        }

        // Moore refinement: split classes by (own class, successor classes)
        // until stable.
        let mut class: Vec<usize> = order
            .iter()
            .map(|&q| usize::from(self.is_accepting(q)))
            .collect();
        let mut class_count = relabel(&mut class);
        loop {
            let signatures: Vec<[usize; 1 + Symbol::COUNT]> = order
                .iter()
                .enumerate()
                .map(|(i, &q)| {
                    let mut sig = [0; 1 + Symbol::COUNT];
                    sig[0] = class[i];
                    for c in Symbol::ALL {
                        sig[1 + c.index()] = class[dense[self.step(q, c).index()]];
                    }
                    sig
                })
                .collect();
            let mut next: Vec<usize> = vec![0; order.len()];
            let mut map = std::collections::HashMap::new();
            for (i, sig) in signatures.iter().enumerate() {
                let fresh = map.len();
                next[i] = *map.entry(*sig).or_insert(fresh);
            }
            let next_count = map.len();
            if next_count == class_count {
                break;
            }
            class = next;
            class_count = next_count;
        }

        // Quotient machine over the classes.
        let mut rep = vec![usize::MAX; class_count];
        for (i, &cl) in class.iter().enumerate() {
            if rep[cl] == usize::MAX {
                rep[cl] = i;
            }
        }
        let quot_step = |cl: usize, c: Symbol| -> usize {
            let q = order[rep[cl]];
            class[dense[self.step(q, c).index()]]
        };
        let start_class = class[dense[self.start.index()]];

        // Canonical renumbering: BFS over classes from the start class.
        let mut number = vec![usize::MAX; class_count];
        let mut bfs = vec![start_class];
        number[start_class] = 0;
        let mut head = 0;
        while head < bfs.len() {
            let cl = bfs[head];
            head += 1;
            for c in Symbol::ALL {
                let t = quot_step(cl, c);
                if number[t] == usize::MAX {
                    number[t] = bfs.len();
                    bfs.push(t);
                }
            }
        }

        let mut transitions = Vec::with_capacity(bfs.len() * Symbol::COUNT);
        let mut accepting = Vec::with_capacity(bfs.len());
        for &cl in &bfs {
            for c in Symbol::ALL {
                transitions.push(StateId(number[quot_step(cl, c)] as u32));
            }
            accepting.push(self.is_accepting(order[rep[cl]]));
        }
        Fsm {
            transitions,
            accepting,
            start: StateId(0),
        }
    }

    /// Whether both machines recognize the same language.
    pub fn equivalent(&self, other: &Fsm) -> bool {
        self.minimize() == other.minimize()
    }

    /// Snapshot in the plain-text format described in the module docs.
    pub fn to_text(&self) -> String {
        use fmt::Write;
        let accepting = self
            .accepting_states()
            .map(|q| q.index().to_string())
            .collect::<Vec<_>>()
            .join(",");
        let mut out = format!(
            "states={} start={} accepting={}\n",
            self.state_count(),
            self.start.index(),
            accepting
        );
        for q in 0..self.state_count() {
            let row = Symbol::ALL
                .map(|c| self.step(StateId(q as u32), c).index().to_string())
                .join(" ");
            writeln!(out, "{row}").unwrap();
        }
        out
    }

    /// Parse a snapshot produced by [`Fsm::to_text`].
    pub fn from_text(text: &str) -> Result<Fsm, FsmError> {
        let malformed = |msg: &str| FsmError::Malformed(msg.to_string());
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| malformed("empty input"))?;
        let mut states = None;
        let mut start = None;
        let mut accepting = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| malformed("header fields must look like key=value"))?;
            match key {
                "states" => {
                    states = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| malformed(&format!("bad state count {value:?}")))?,
                    );
                }
                "start" => {
                    start = Some(
                        value
                            .parse::<u32>()
                            .map_err(|_| malformed(&format!("bad start state {value:?}")))?,
                    );
                }
                "accepting" => {
                    let list: Result<Vec<u32>, _> = value
                        .split(',')
                        .filter(|part| !part.is_empty())
                        .map(str::parse::<u32>)
                        .collect();
                    accepting = Some(
                        list.map_err(|_| malformed(&format!("bad accepting list {value:?}")))?,
                    );
                }
                other => return Err(malformed(&format!("unknown header field {other:?}"))),
            }
        }
        let states = states.ok_or_else(|| malformed("missing states="))?;
        let start = start.ok_or_else(|| malformed("missing start="))?;
        let accepting = accepting.ok_or_else(|| malformed("missing accepting="))?;

        let mut rows = Vec::with_capacity(states);
        for _ in 0..states {
            let line = lines
                .next()
                .ok_or_else(|| malformed("fewer transition rows than states"))?;
            let targets: Result<Vec<u32>, _> =
                line.split_whitespace().map(str::parse::<u32>).collect();
            let targets =
                targets.map_err(|_| malformed(&format!("bad transition row {line:?}")))?;
            let row: [u32; Symbol::COUNT] = targets
                .try_into()
                .map_err(|_| malformed("each row needs one target per symbol"))?;
            rows.push(row);
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(malformed("trailing content after transition rows"));
        }
        Fsm::from_parts(rows, start, accepting)
    }
}

impl fmt::Debug for Fsm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fsm({})", self.to_text().replace('\n', "; "))
    }
}

/// Renumber labels to dense 0.. order of first appearance; returns the count.
fn relabel(labels: &mut [usize]) -> usize {
    let mut map = std::collections::HashMap::new();
    for l in labels.iter_mut() {
        let fresh = map.len();
        *l = *map.entry(*l).or_insert(fresh);
    }
    map.len()
}
