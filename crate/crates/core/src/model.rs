//! Kripke structures with a dedicated initial state and direction-indexed,
//! total transition functions.
//!
//! State index 0 is always the initial state. It is not part of the state set
//! proper: no transition may enter it.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::text::{Cursor, ParseError};
use crate::word::UpWord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

impl StateId {
    pub const INIT: StateId = StateId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirId(pub u32);

impl DirId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Set of atomic propositions as a bitmask over [`KripkeStructure::aps`].
pub type ApSet = u64;

pub const MAX_APS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("syntax error at {0}")]
    Syntax(#[from] ParseError),
    #[error("state '{state}' has no transition for direction '{direction}'")]
    MissingTransition { state: String, direction: String },
    #[error("state '{state}' has two transitions for direction '{direction}'")]
    DuplicateTransition { state: String, direction: String },
    #[error("state '{state}' is labelled with undeclared proposition '{ap}'")]
    UndeclaredAp { state: String, ap: String },
    #[error("unknown state '{0}'")]
    UnknownState(String),
    #[error("unknown direction '{0}'")]
    UnknownDirection(String),
    #[error("state '{0}' is not reachable from the initial state")]
    Unreachable(String),
    #[error("state '{0}' is declared twice")]
    DuplicateState(String),
    #[error("expected exactly one initial state, found {0}")]
    InitCount(usize),
    #[error("transition from '{from}' enters the initial state")]
    TransitionIntoInit { from: String },
    #[error("at most {MAX_APS} atomic propositions are supported")]
    TooManyAps,
    #[error("the direction set must be nonempty")]
    NoDirections,
    #[error("'{0}' is declared twice")]
    DuplicateName(String),
    #[error("no direction leads from '{from}' to '{to}'")]
    NoEdge { from: String, to: String },
    #[error("lasso must start in the initial state and have a nonempty loop")]
    MalformedLasso,
}

/// Per-state input to [`KripkeStructure::new`].
#[derive(Debug, Clone)]
pub struct StateSpec {
    pub name: String,
    pub labels: Vec<String>,
    /// `(direction, successor)` pairs.
    pub edges: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeStructure {
    aps: Vec<String>,
    directions: Vec<String>,
    names: Vec<String>,
    trans: Vec<StateId>,
    labels: Vec<ApSet>,
}

impl KripkeStructure {
    /// Validates and builds a structure. `init` names the initial state, which
    /// must be among `states`.
    pub fn new(
        aps: Vec<String>,
        directions: Vec<String>,
        states: Vec<StateSpec>,
        init: &str,
    ) -> Result<Self, ModelError> {
        if aps.len() > MAX_APS {
            return Err(ModelError::TooManyAps);
        }
        if directions.is_empty() {
            return Err(ModelError::NoDirections);
        }
        check_unique(&aps)?;
        check_unique(&directions)?;

        let mut order: Vec<&StateSpec> = Vec::with_capacity(states.len());
        let init_spec = states
            .iter()
            .find(|s| s.name == init)
            .ok_or_else(|| ModelError::UnknownState(init.to_string()))?;
        order.push(init_spec);
        order.extend(states.iter().filter(|s| s.name != init));

        let mut index: HashMap<&str, StateId> = HashMap::new();
        for (i, s) in order.iter().enumerate() {
            if index.insert(s.name.as_str(), StateId(i as u32)).is_some() {
                return Err(ModelError::DuplicateState(s.name.clone()));
            }
        }
        let ap_index: HashMap<&str, usize> =
            aps.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
        let dir_index: HashMap<&str, usize> = directions
            .iter()
            .enumerate()
            .map(|(i, d)| (d.as_str(), i))
            .collect();

        let nd = directions.len();
        let mut trans = vec![None; order.len() * nd];
        let mut labels = Vec::with_capacity(order.len());
        for (i, s) in order.iter().enumerate() {
            let mut mask = 0;
            for ap in &s.labels {
                let bit = ap_index.get(ap.as_str()).ok_or_else(|| ModelError::UndeclaredAp {
                    state: s.name.clone(),
                    ap: ap.clone(),
                })?;
                mask |= 1u64 << bit;
            }
            labels.push(mask);
            for (d, t) in &s.edges {
                let di = *dir_index
                    .get(d.as_str())
                    .ok_or_else(|| ModelError::UnknownDirection(d.clone()))?;
                let ti = *index
                    .get(t.as_str())
                    .ok_or_else(|| ModelError::UnknownState(t.clone()))?;
                if ti == StateId::INIT {
                    return Err(ModelError::TransitionIntoInit {
                        from: s.name.clone(),
                    });
                }
                let slot = &mut trans[i * nd + di];
                if slot.is_some() {
                    return Err(ModelError::DuplicateTransition {
                        state: s.name.clone(),
                        direction: d.clone(),
                    });
                }
                *slot = Some(ti);
            }
        }
        let mut total = Vec::with_capacity(trans.len());
        for (k, t) in trans.into_iter().enumerate() {
            match t {
                Some(t) => total.push(t),
                None => {
                    return Err(ModelError::MissingTransition {
                        state: order[k / nd].name.clone(),
                        direction: directions[k % nd].clone(),
                    })
                }
            }
        }
        let ks = KripkeStructure {
            aps,
            directions,
            names: order.iter().map(|s| s.name.clone()).collect(),
            trans: total,
            labels,
        };
        let reach = ks.reachable();
        if let Some(i) = reach.iter().position(|r| !r) {
            return Err(ModelError::Unreachable(ks.names[i].clone()));
        }
        Ok(ks)
    }

    /// Builds a structure from a relational successor presentation. Directions
    /// are named `d0..d{k-1}` where `k` is the maximal out-degree; states with
    /// fewer successors repeat their last successor to pad.
    pub fn from_successor_lists(
        aps: Vec<String>,
        names: Vec<String>,
        init: usize,
        labels: Vec<Vec<String>>,
        successors: Vec<Vec<usize>>,
    ) -> Result<Self, ModelError> {
        let k = successors.iter().map(|s| s.len()).max().unwrap_or(0);
        if k == 0 {
            return Err(ModelError::NoDirections);
        }
        let directions: Vec<String> = (0..k).map(|i| format!("d{i}")).collect();
        let mut specs = Vec::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            let succ = &successors[i];
            if succ.is_empty() {
                return Err(ModelError::MissingTransition {
                    state: name.clone(),
                    direction: directions[0].clone(),
                });
            }
            let edges = (0..k)
                .map(|d| {
                    let t = succ[d.min(succ.len() - 1)];
                    (directions[d].clone(), names[t].clone())
                })
                .collect();
            specs.push(StateSpec {
                name: name.clone(),
                labels: labels[i].clone(),
                edges,
            });
        }
        let init_name = names[init].clone();
        KripkeStructure::new(aps, directions, specs, &init_name)
    }

    pub fn aps(&self) -> &[String] {
        &self.aps
    }

    pub fn ap_index(&self, name: &str) -> Option<usize> {
        self.aps.iter().position(|a| a == name)
    }

    pub fn directions(&self) -> &[String] {
        &self.directions
    }

    pub fn num_directions(&self) -> usize {
        self.directions.len()
    }

    pub fn dir_id(&self, name: &str) -> Option<DirId> {
        self.directions
            .iter()
            .position(|d| d == name)
            .map(|i| DirId(i as u32))
    }

    pub fn dir_name(&self, d: DirId) -> &str {
        &self.directions[d.index()]
    }

    /// Number of states including the initial state.
    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.names.len() as u32).map(StateId)
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| StateId(i as u32))
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.names[s.index()]
    }

    pub fn init(&self) -> StateId {
        StateId::INIT
    }

    /// Transition function; indices are assumed valid.
    #[inline]
    pub fn succ(&self, s: StateId, d: DirId) -> StateId {
        self.trans[s.index() * self.directions.len() + d.index()]
    }

    /// Checked transition function.
    pub fn step(&self, s: StateId, d: DirId) -> Result<StateId, ModelError> {
        if s.index() >= self.names.len() {
            return Err(ModelError::UnknownState(format!("#{}", s.0)));
        }
        if d.index() >= self.directions.len() {
            return Err(ModelError::UnknownDirection(format!("#{}", d.0)));
        }
        Ok(self.succ(s, d))
    }

    pub fn step_named(&self, s: &str, d: &str) -> Result<&str, ModelError> {
        let si = self
            .state_id(s)
            .ok_or_else(|| ModelError::UnknownState(s.to_string()))?;
        let di = self
            .dir_id(d)
            .ok_or_else(|| ModelError::UnknownDirection(d.to_string()))?;
        Ok(self.state_name(self.succ(si, di)))
    }

    #[inline]
    pub fn label(&self, s: StateId) -> ApSet {
        self.labels[s.index()]
    }

    pub fn label_names(&self, s: StateId) -> Vec<&str> {
        let mask = self.label(s);
        self.aps
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, a)| a.as_str())
            .collect()
    }

    /// Some direction leading from `s` to `t`, the smallest one if several do.
    pub fn direction_between(&self, s: StateId, t: StateId) -> Option<DirId> {
        (0..self.directions.len() as u32)
            .map(DirId)
            .find(|&d| self.succ(s, d) == t)
    }

    /// Distinct successors of `s` in direction order.
    pub fn successors(&self, s: StateId) -> Vec<StateId> {
        let mut out: Vec<StateId> = Vec::new();
        for d in 0..self.directions.len() as u32 {
            let t = self.succ(s, DirId(d));
            if !out.contains(&t) {
                out.push(t);
            }
        }
        out
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.names.len()];
        let mut queue = VecDeque::from([StateId::INIT]);
        seen[0] = true;
        while let Some(s) = queue.pop_front() {
            for t in self.successors(s) {
                if !seen[t.index()] {
                    seen[t.index()] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    pub fn lasso_trace(&self, lasso: &Lasso) -> Result<UpWord<ApSet>, ModelError> {
        lasso.validate(self)?;
        Ok(UpWord::new(
            lasso.stem.iter().map(|&s| self.label(s)).collect(),
            lasso.cycle.iter().map(|&s| self.label(s)).collect(),
        ))
    }

    /// Canonical text rendering; `parse_ks(render_ks(k)) == k`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "aps: {};", self.aps.join(", "));
        let _ = writeln!(out, "directions: {};", self.directions.join(", "));
        for s in self.states() {
            let init = if s == StateId::INIT { " init" } else { "" };
            let _ = write!(
                out,
                "state {}{} {{ labels {{{}}};",
                self.state_name(s),
                init,
                self.label_names(s).join(", ")
            );
            for d in 0..self.directions.len() as u32 {
                let _ = write!(
                    out,
                    " {} -> {};",
                    self.directions[d as usize],
                    self.state_name(self.succ(s, DirId(d)))
                );
            }
            out.push_str(" }\n");
        }
        out
    }
}

fn check_unique(xs: &[String]) -> Result<(), ModelError> {
    for (i, x) in xs.iter().enumerate() {
        if xs[..i].contains(x) {
            return Err(ModelError::DuplicateName(x.clone()));
        }
    }
    Ok(())
}

/// Finite presentation `stem · cycle^ω` of an ultimately periodic path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub stem: Vec<StateId>,
    pub cycle: Vec<StateId>,
}

impl Lasso {
    pub fn new(stem: Vec<StateId>, cycle: Vec<StateId>) -> Self {
        Lasso { stem, cycle }
    }

    pub fn validate(&self, ks: &KripkeStructure) -> Result<(), ModelError> {
        if self.cycle.is_empty() {
            return Err(ModelError::MalformedLasso);
        }
        let first = self.stem.first().or(self.cycle.first()).copied();
        if first != Some(StateId::INIT) {
            return Err(ModelError::MalformedLasso);
        }
        for s in self.stem.iter().chain(&self.cycle) {
            if s.index() >= ks.num_states() {
                return Err(ModelError::UnknownState(format!("#{}", s.0)));
            }
        }
        let path: Vec<StateId> = self
            .stem
            .iter()
            .chain(&self.cycle)
            .copied()
            .chain(std::iter::once(self.cycle[0]))
            .collect();
        for w in path.windows(2) {
            if ks.direction_between(w[0], w[1]).is_none() {
                return Err(ModelError::NoEdge {
                    from: ks.state_name(w[0]).to_string(),
                    to: ks.state_name(w[1]).to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn as_word(&self) -> UpWord<StateId> {
        UpWord::new(self.stem.clone(), self.cycle.clone())
    }
}

/// Parses the line-oriented model grammar:
///
/// ```text
/// aps: a, b;
/// directions: A, B;
/// state s_init init { labels {}; A -> s_A; B -> s_A; }
/// state s_A { labels {a}; A -> s_A; B -> s_A; }
/// ```
pub fn parse_ks(src: &str) -> Result<KripkeStructure, ModelError> {
    let mut cur = Cursor::new(src)?;
    cur.expect_keyword("aps")?;
    cur.expect_sym(":")?;
    let aps = ident_list(&mut cur, ";")?;
    cur.expect_keyword("directions")?;
    cur.expect_sym(":")?;
    let directions = ident_list(&mut cur, ";")?;

    let mut states = Vec::new();
    let mut inits = Vec::new();
    while !cur.at_end() {
        cur.expect_keyword("state")?;
        let (name, _, _) = cur.expect_ident()?;
        if cur.eat_keyword("init") {
            inits.push(name.clone());
        }
        cur.expect_sym("{")?;
        let mut labels = Vec::new();
        let mut edges = Vec::new();
        while !cur.eat_sym("}") {
            if cur.eat_keyword("labels") {
                cur.expect_sym("{")?;
                labels = ident_list(&mut cur, "}")?;
                cur.expect_sym(";")?;
            } else {
                let (dir, _, _) = cur.expect_ident()?;
                cur.expect_sym("->")?;
                let (target, _, _) = cur.expect_ident()?;
                cur.expect_sym(";")?;
                edges.push((dir, target));
            }
        }
        states.push(StateSpec {
            name,
            labels,
            edges,
        });
    }
    if inits.len() != 1 {
        return Err(ModelError::InitCount(inits.len()));
    }
    KripkeStructure::new(aps, directions, states, &inits[0])
}

/// Comma-separated identifiers terminated by `end` (consumed). May be empty.
fn ident_list(cur: &mut Cursor, end: &str) -> Result<Vec<String>, ParseError> {
    let mut out = Vec::new();
    if cur.eat_sym(end) {
        return Ok(out);
    }
    loop {
        let (id, _, _) = cur.expect_ident()?;
        out.push(id);
        if cur.eat_sym(end) {
            return Ok(out);
        }
        cur.expect_sym(",")?;
    }
}

pub fn render_ks(ks: &KripkeStructure) -> String {
    ks.render()
}
