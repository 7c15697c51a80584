//! Game arenas: the two-player verifier/refuter game for `∀π₁∃π₂`, and the
//! multiplayer game under partial information with one player per trace
//! variable.

use std::collections::{HashMap, VecDeque};
use std::fmt::{self, Write as _};
use std::sync::OnceLock;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::automata::Dpa;
use crate::logic::{indexed_aps, HyperLtl, Quantifier};
use crate::model::{ApSet, DirId, KripkeStructure, StateId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArenaError {
    #[error("the two-player game needs a prefix of the form forall p1. exists p2.")]
    PrefixShape,
    #[error("automaton alphabet does not match the formula: {0}")]
    AlphabetMismatch(String),
    #[error("proposition '{0}' is not declared by the model")]
    UnknownAp(String),
    #[error("game has {0} vertices, above the supported maximum")]
    TooLarge(usize),
}

/// Vertex limit for materialized games.
pub const MAX_VERTICES: usize = 20_000_000;

/// Common view of a perfect-information parity game used by the solvers. The
/// even side is the verifier or coalition.
pub trait ParityArena {
    fn num_vertices(&self) -> usize;
    fn num_directions(&self) -> usize;
    fn successor(&self, v: usize, d: usize) -> usize;
    fn color(&self, v: usize) -> u32;
    fn is_even_owned(&self, v: usize) -> bool;
    fn initial(&self) -> usize;
}

/// Maps every bit of the automaton alphabet to a (trace copy, model AP) pair.
#[derive(Debug, Clone)]
pub struct LetterBinding {
    bits: Vec<(usize, usize)>,
}

impl LetterBinding {
    pub fn new(ks: &KripkeStructure, f: &HyperLtl, dpa: &Dpa) -> Result<Self, ArenaError> {
        let body_aps = indexed_aps(&f.body);
        for a in &body_aps {
            if !dpa.alphabet().contains(a) {
                return Err(ArenaError::AlphabetMismatch(format!("{a} missing from automaton")));
            }
        }
        let mut bits = Vec::with_capacity(dpa.alphabet().len());
        for a in dpa.alphabet() {
            let k = f
                .var_index(&a.var)
                .ok_or_else(|| ArenaError::AlphabetMismatch(format!("{a} names no quantified trace")))?;
            let ap = ks.ap_index(&a.ap).ok_or_else(|| ArenaError::UnknownAp(a.ap.clone()))?;
            bits.push((k, ap));
        }
        Ok(LetterBinding { bits })
    }

    /// Letter read when the copies carry the given labels.
    pub fn letter(&self, labels: &[ApSet]) -> u64 {
        let mut l = 0;
        for (i, &(k, ap)) in self.bits.iter().enumerate() {
            if labels[k] >> ap & 1 == 1 {
                l |= 1 << i;
            }
        }
        l
    }

    /// Highest copy index read by the automaton.
    pub fn max_copy(&self) -> Option<usize> {
        self.bits.iter().map(|&(k, _)| k).max()
    }

    pub fn letter_of_states(&self, ks: &KripkeStructure, states: &[StateId]) -> u64 {
        let mut l = 0;
        for (i, &(k, ap)) in self.bits.iter().enumerate() {
            if ks.label(states[k]) >> ap & 1 == 1 {
                l |= 1 << i;
            }
        }
        l
    }
}

/// Owner of a vertex in the two-player game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Verifier,
    Refuter,
}

/// The full two-player game over all `⟨s₁, s₂, q, owner⟩`.
#[derive(Debug, Clone)]
pub struct TwoPlayerGame {
    ks: KripkeStructure,
    dpa: Dpa,
    binding: LetterBinding,
}

impl TwoPlayerGame {
    pub fn ks(&self) -> &KripkeStructure {
        &self.ks
    }

    pub fn dpa(&self) -> &Dpa {
        &self.dpa
    }

    /// Index of `⟨s₁, s₂, q, side⟩`.
    pub fn index(&self, s1: StateId, s2: StateId, q: u32, side: Side) -> usize {
        let ns = self.ks.num_states();
        let nq = self.dpa.num_states();
        let o = match side {
            Side::Refuter => 0,
            Side::Verifier => 1,
        };
        ((o * ns + s1.index()) * ns + s2.index()) * nq + q as usize
    }

    pub fn vertex(&self, v: usize) -> (StateId, StateId, u32, Side) {
        let ns = self.ks.num_states();
        let nq = self.dpa.num_states();
        let q = (v % nq) as u32;
        let rest = v / nq;
        let s2 = StateId((rest % ns) as u32);
        let rest = rest / ns;
        let s1 = StateId((rest % ns) as u32);
        let side = if rest / ns == 0 {
            Side::Refuter
        } else {
            Side::Verifier
        };
        (s1, s2, q, side)
    }

    pub fn render_vertex(&self, v: usize) -> String {
        let (s1, s2, q, side) = self.vertex(v);
        let who = match side {
            Side::Verifier => "V",
            Side::Refuter => "R",
        };
        format!(
            "⟨{},{}|{}|{}⟩",
            self.ks.state_name(s1),
            self.ks.state_name(s2),
            q,
            who
        )
    }
}

impl ParityArena for TwoPlayerGame {
    fn num_vertices(&self) -> usize {
        2 * self.ks.num_states() * self.ks.num_states() * self.dpa.num_states()
    }

    fn num_directions(&self) -> usize {
        self.ks.num_directions()
    }

    fn successor(&self, v: usize, d: usize) -> usize {
        let (s1, s2, q, side) = self.vertex(v);
        let d = DirId(d as u32);
        match side {
            Side::Verifier => self.index(s1, self.ks.succ(s2, d), q, Side::Refuter),
            Side::Refuter => {
                let letter = self.binding.letter(&[self.ks.label(s1), self.ks.label(s2)]);
                self.index(
                    self.ks.succ(s1, d),
                    s2,
                    self.dpa.step(q, letter),
                    Side::Verifier,
                )
            }
        }
    }

    fn color(&self, v: usize) -> u32 {
        self.dpa.color(self.vertex(v).2)
    }

    fn is_even_owned(&self, v: usize) -> bool {
        self.vertex(v).3 == Side::Verifier
    }

    fn initial(&self) -> usize {
        self.index(StateId::INIT, StateId::INIT, self.dpa.initial(), Side::Refuter)
    }
}

pub fn build_two_player_game(
    ks: &KripkeStructure,
    f: &HyperLtl,
    a: &Dpa,
) -> Result<TwoPlayerGame, ArenaError> {
    if f.quantifiers() != [Quantifier::Forall, Quantifier::Exists] {
        return Err(ArenaError::PrefixShape);
    }
    let binding = LetterBinding::new(ks, f, a)?;
    let size = 2 * ks.num_states() * ks.num_states() * a.num_states();
    if size > MAX_VERTICES {
        return Err(ArenaError::TooLarge(size));
    }
    Ok(TwoPlayerGame {
        ks: ks.clone(),
        dpa: a.clone(),
        binding,
    })
}

/// What a player sees of a vertex: whose turn it is and the states of the
/// copies quantified up to and including its own. Under full observation the
/// class also carries every copy and the automaton state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObsClass {
    pub turn: usize,
    pub states: Vec<StateId>,
    pub q: Option<u32>,
}

impl ObsClass {
    /// `turn:s1,s2,...` with state names, plus `|q` under full observation.
    pub fn render(&self, ks: &KripkeStructure) -> String {
        let names: Vec<&str> = self.states.iter().map(|&s| ks.state_name(s)).collect();
        match self.q {
            Some(q) => format!("{}:{}|{}", self.turn, names.join(","), q),
            None => format!("{}:{}", self.turn, names.join(",")),
        }
    }

    pub fn parse(text: &str, ks: &KripkeStructure) -> Option<ObsClass> {
        let (turn, rest) = text.split_once(':')?;
        let turn: usize = turn.trim().parse().ok()?;
        let (states, q) = match rest.split_once('|') {
            Some((s, q)) => (s, Some(q.trim().parse().ok()?)),
            None => (rest, None),
        };
        let states = if states.trim().is_empty() {
            vec![]
        } else {
            states
                .split(',')
                .map(|s| ks.state_id(s.trim()))
                .collect::<Option<Vec<_>>>()?
        };
        Some(ObsClass { turn, states, q })
    }
}

/// The multiplayer game under partial information, materialized on the
/// vertices reachable from the initial vertex. Vertex `0` is initial and
/// vertices are numbered in breadth-first order.
#[derive(Debug, Clone)]
pub struct MpgGame {
    ks: KripkeStructure,
    formula: HyperLtl,
    dpa: Dpa,
    binding: LetterBinding,
    n: usize,
    coalition: Vec<usize>,
    full_info: bool,
    /// `n` states per vertex.
    states: Vec<StateId>,
    qs: Vec<u32>,
    turns: Vec<u8>,
    succ: Vec<u32>,
    /// Per player (0-based), the interned class of every vertex.
    obs: Vec<Vec<u32>>,
    classes: Vec<Vec<ObsClass>>,
    hash: OnceLock<String>,
}

fn mpg_key(states: &[StateId], q: u32, turn: usize, ns: usize, nq: usize) -> u128 {
    let mut k: u128 = (turn - 1) as u128;
    k = k * nq as u128 + q as u128;
    for s in states {
        k = k * ns as u128 + s.0 as u128;
    }
    k
}

const DENSE_LIMIT: u128 = 1 << 27;

enum VertexIndex {
    Dense(Vec<u32>),
    Sparse(HashMap<u128, u32>),
}

impl VertexIndex {
    fn get(&self, key: u128) -> Option<u32> {
        match self {
            VertexIndex::Dense(v) => Some(v[key as usize]).filter(|&i| i != u32::MAX),
            VertexIndex::Sparse(m) => m.get(&key).copied(),
        }
    }

    fn insert(&mut self, key: u128, i: u32) {
        match self {
            VertexIndex::Dense(v) => v[key as usize] = i,
            VertexIndex::Sparse(m) => {
                m.insert(key, i);
            }
        }
    }
}

fn build(
    ks: &KripkeStructure,
    f: &HyperLtl,
    a: &Dpa,
    full_info: bool,
) -> Result<MpgGame, ArenaError> {
    let binding = LetterBinding::new(ks, f, a)?;
    let n = f.num_vars();
    let nd = ks.num_directions();
    let ns = ks.num_states();
    let nq = a.num_states();
    let declared = n as u128 * (ns as u128).pow(n as u32) * nq as u128;
    let mut index = if declared <= DENSE_LIMIT {
        VertexIndex::Dense(vec![u32::MAX; declared as usize])
    } else {
        VertexIndex::Sparse(HashMap::new())
    };
    let mut states: Vec<StateId> = Vec::new();
    let mut qs = Vec::new();
    let mut turns = Vec::new();
    let mut succ: Vec<u32> = Vec::new();
    let mut queue = VecDeque::new();

    let mut add = |st: &[StateId],
                   q: u32,
                   turn: usize,
                   states: &mut Vec<StateId>,
                   qs: &mut Vec<u32>,
                   turns: &mut Vec<u8>,
                   queue: &mut VecDeque<u32>|
     -> Result<u32, ArenaError> {
        let key = mpg_key(st, q, turn, ns, nq);
        if let Some(i) = index.get(key) {
            return Ok(i);
        }
        let i = qs.len();
        if i >= MAX_VERTICES {
            return Err(ArenaError::TooLarge(i));
        }
        index.insert(key, i as u32);
        states.extend_from_slice(st);
        qs.push(q);
        turns.push(turn as u8);
        queue.push_back(i as u32);
        Ok(i as u32)
    };
    let init_states = vec![StateId::INIT; n.max(0)];
    add(&init_states, a.initial(), 1, &mut states, &mut qs, &mut turns, &mut queue)?;
    let mut buf = vec![StateId::INIT; n];
    while let Some(v) = queue.pop_front() {
        let v = v as usize;
        buf.copy_from_slice(&states[v * n..(v + 1) * n]);
        let q = qs[v];
        let turn = turns[v] as usize;
        let next_turn = if turn == n { 1 } else { turn + 1 };
        let next_q = if turn == 1 {
            a.step(q, binding.letter_of_states(ks, &buf))
        } else {
            q
        };
        let own = buf[turn - 1];
        let row = succ.len();
        succ.resize(row + nd, 0);
        for d in 0..nd {
            buf[turn - 1] = ks.succ(own, DirId(d as u32));
            let t = add(&buf, next_q, next_turn, &mut states, &mut qs, &mut turns, &mut queue)?;
            succ[row + d] = t;
        }
    }

    let nv = qs.len();
    let mut obs = Vec::with_capacity(n);
    let mut classes = Vec::with_capacity(n);
    for p in 1..=n {
        let mut ids: HashMap<ObsClass, u32> = HashMap::new();
        let mut list = Vec::new();
        let mut row = Vec::with_capacity(nv);
        for v in 0..nv {
            let c = make_class(&states[v * n..(v + 1) * n], qs[v], turns[v] as usize, p, full_info);
            let id = *ids.entry(c.clone()).or_insert_with(|| {
                list.push(c);
                (list.len() - 1) as u32
            });
            row.push(id);
        }
        obs.push(row);
        classes.push(list);
    }
    Ok(MpgGame {
        ks: ks.clone(),
        formula: f.clone(),
        dpa: a.clone(),
        binding,
        n,
        coalition: f.existential_players(),
        full_info,
        states,
        qs,
        turns,
        succ,
        obs,
        classes,
        hash: OnceLock::new(),
    })
}

fn make_class(states: &[StateId], q: u32, turn: usize, p: usize, full_info: bool) -> ObsClass {
    if full_info {
        ObsClass {
            turn,
            states: states.to_vec(),
            q: Some(q),
        }
    } else {
        ObsClass {
            turn,
            states: states[..p].to_vec(),
            q: None,
        }
    }
}

pub fn build_mpg(ks: &KripkeStructure, f: &HyperLtl, a: &Dpa) -> Result<MpgGame, ArenaError> {
    build(ks, f, a, false)
}

/// Same arena as `build_mpg` with every player observing the whole vertex.
pub fn build_full_info_game(
    ks: &KripkeStructure,
    f: &HyperLtl,
    a: &Dpa,
) -> Result<MpgGame, ArenaError> {
    build(ks, f, a, true)
}

/// Borrowed view of one game vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexRef<'a> {
    pub states: &'a [StateId],
    pub q: u32,
    pub turn: usize,
}

impl MpgGame {
    pub fn num_vertices(&self) -> usize {
        self.qs.len()
    }

    pub fn ks(&self) -> &KripkeStructure {
        &self.ks
    }

    pub fn formula(&self) -> &HyperLtl {
        &self.formula
    }

    pub fn dpa(&self) -> &Dpa {
        &self.dpa
    }

    pub fn binding(&self) -> &LetterBinding {
        &self.binding
    }

    pub fn num_players(&self) -> usize {
        self.n
    }

    /// 1-based players controlling existentially quantified copies.
    pub fn coalition(&self) -> &[usize] {
        &self.coalition
    }

    pub fn in_coalition(&self, p: usize) -> bool {
        self.coalition.contains(&p)
    }

    pub fn is_full_info(&self) -> bool {
        self.full_info
    }

    pub fn vertex(&self, v: usize) -> VertexRef<'_> {
        VertexRef {
            states: &self.states[v * self.n..(v + 1) * self.n],
            q: self.qs[v],
            turn: self.turns[v] as usize,
        }
    }

    pub fn turn(&self, v: usize) -> usize {
        self.turns[v] as usize
    }

    /// Vertex holding exactly these components, if reachable.
    pub fn find_vertex(&self, states: &[StateId], q: u32, turn: usize) -> Option<usize> {
        (0..self.num_vertices()).find(|&v| {
            let x = self.vertex(v);
            x.states == states && x.q == q && x.turn == turn
        })
    }

    /// `nxt(p)`.
    pub fn next_player(&self, p: usize) -> usize {
        if p == self.n {
            1
        } else {
            p + 1
        }
    }

    /// Size of the vertex set as defined over all tuples:
    /// `n · (|S|+1)^n · |Q|`.
    pub fn declared_vertex_count(&self) -> u128 {
        self.n as u128 * (self.ks.num_states() as u128).pow(self.n as u32) * self.dpa.num_states() as u128
    }

    pub fn observation_class(&self, v: usize, p: usize) -> &ObsClass {
        &self.classes[p - 1][self.obs[p - 1][v] as usize]
    }

    /// Interned class id of `v` for player `p`.
    pub fn obs_id(&self, v: usize, p: usize) -> u32 {
        self.obs[p - 1][v]
    }

    pub fn classes(&self, p: usize) -> &[ObsClass] {
        &self.classes[p - 1]
    }

    pub fn class_id(&self, p: usize, c: &ObsClass) -> Option<u32> {
        self.classes[p - 1].iter().position(|x| x == c).map(|i| i as u32)
    }

    pub fn render_vertex(&self, v: usize) -> String {
        let x = self.vertex(v);
        let names: Vec<&str> = x.states.iter().map(|&s| self.ks.state_name(s)).collect();
        format!("⟨{}|{}|{}⟩", names.join(","), x.q, x.turn)
    }

    /// One line per vertex in vertex order:
    /// `⟨states|q|turn⟩ color owner -> dir:target …`, targets given by their
    /// vertex number.
    pub fn write_dump(&self, out: &mut dyn fmt::Write) -> fmt::Result {
        for v in 0..self.num_vertices() {
            self.dump_line(v, out)?;
        }
        Ok(())
    }

    fn dump_line(&self, v: usize, out: &mut dyn fmt::Write) -> fmt::Result {
        write!(out, "{} {} {} ->", self.render_vertex(v), self.color(v), self.turn(v))?;
        for d in 0..self.num_directions() {
            write!(
                out,
                " {}:{}",
                self.ks.dir_name(DirId(d as u32)),
                self.successor(v, d)
            )?;
        }
        writeln!(out)
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        self.write_dump(&mut s).unwrap();
        s
    }

    /// First 64 bits of the SHA-256 digest of the dump, as 16 hex digits.
    pub fn hash(&self) -> String {
        self.hash.get_or_init(|| self.compute_hash()).clone()
    }

    fn compute_hash(&self) -> String {
        let mut h = Sha256::new();
        let mut line = String::new();
        if self.full_info {
            h.update(b"full-information\n");
        }
        for v in 0..self.num_vertices() {
            line.clear();
            self.dump_line(v, &mut line).unwrap();
            h.update(line.as_bytes());
        }
        let digest = h.finalize();
        digest[..8].iter().fold(String::new(), |mut s, b| {
            write!(s, "{b:02x}").unwrap();
            s
        })
    }
}

impl ParityArena for MpgGame {
    fn num_vertices(&self) -> usize {
        self.qs.len()
    }

    fn num_directions(&self) -> usize {
        self.ks.num_directions()
    }

    fn successor(&self, v: usize, d: usize) -> usize {
        self.succ[v * self.ks.num_directions() + d] as usize
    }

    fn color(&self, v: usize) -> u32 {
        self.dpa.color(self.qs[v])
    }

    fn is_even_owned(&self, v: usize) -> bool {
        self.in_coalition(self.turn(v))
    }

    fn initial(&self) -> usize {
        0
    }
}

/// Per-player observation keys over a finite vertex set.
pub trait ObservationStructure {
    fn num_vertices(&self) -> usize;
    fn num_players(&self) -> usize;
    /// Two vertices look alike to player `p` (1-based) iff their keys agree.
    fn observation_key(&self, v: usize, p: usize) -> u64;
}

impl ObservationStructure for MpgGame {
    fn num_vertices(&self) -> usize {
        self.qs.len()
    }

    fn num_players(&self) -> usize {
        self.n
    }

    fn observation_key(&self, v: usize, p: usize) -> u64 {
        self.obs_id(v, p) as u64
    }
}

/// Two players whose indistinguishability relations are incomparable, with a
/// vertex pair for each direction of non-inclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyWitness {
    pub players: (usize, usize),
    /// Same for the first player, different for the second.
    pub first_blind: (usize, usize),
    /// Same for the second player, different for the first.
    pub second_blind: (usize, usize),
}

/// `Some((u, v))` with equal keys for `p` but different keys for `p2`, i.e.
/// a reason why `~_p ⊄ ~_p2`.
fn non_inclusion<G: ObservationStructure + ?Sized>(g: &G, p: usize, p2: usize) -> Option<(usize, usize)> {
    let mut rep: HashMap<u64, (usize, u64)> = HashMap::new();
    for v in 0..g.num_vertices() {
        let k = g.observation_key(v, p);
        let k2 = g.observation_key(v, p2);
        match rep.get(&k) {
            Some(&(u, k2u)) if k2u != k2 => return Some((u, v)),
            Some(_) => {}
            None => {
                rep.insert(k, (v, k2));
            }
        }
    }
    None
}

/// Orders the players from least to most informed, so that `~_p ⊆ ~_p'`
/// whenever `p'` precedes `p`; fails with a witness when two players are
/// incomparable.
pub fn is_hierarchical<G: ObservationStructure + ?Sized>(g: &G) -> Result<Vec<usize>, HierarchyWitness> {
    let n = g.num_players();
    // finer[p][p2]: ~_p ⊆ ~_p2.
    let mut finer = vec![vec![true; n + 1]; n + 1];
    for p in 1..=n {
        for p2 in 1..=n {
            if p != p2 {
                finer[p][p2] = non_inclusion(g, p, p2).is_none();
            }
        }
    }
    for p in 1..=n {
        for p2 in p + 1..=n {
            if !finer[p][p2] && !finer[p2][p] {
                return Err(HierarchyWitness {
                    players: (p, p2),
                    first_blind: non_inclusion(g, p, p2).unwrap(),
                    second_blind: non_inclusion(g, p2, p).unwrap(),
                });
            }
        }
    }
    let mut order: Vec<usize> = (1..=n).collect();
    // Fewer coarser-than relations means less informed; ties keep index order.
    let rank = |p: usize| (1..=n).filter(|&p2| p2 != p && finer[p][p2]).count();
    order.sort_by_key(|&p| (rank(p), p));
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::body_dpa;
    use crate::logic::parse_hyperltl;
    use crate::model::parse_ks;

    pub(crate) const BRANCHING: &str = "aps: a;\ndirections: A, B;\n\
        state s_init init { labels {}; A -> s_A; B -> s_A; }\n\
        state s_A { labels {}; A -> s_A; B -> s_B; }\n\
        state s_B { labels {a}; A -> s_A; B -> s_B; }\n";

    #[test]
    fn two_player_game_shape() {
        let ks = parse_ks(BRANCHING).unwrap();
        let f = parse_hyperltl("forall p1. exists p2. G (a[p1] <-> a[p2])").unwrap();
        let d = body_dpa(&f.body).unwrap();
        let g = build_two_player_game(&ks, &f, &d).unwrap();
        assert_eq!(g.num_vertices(), 18 * d.num_states());
        let init = g.initial();
        assert_eq!(g.vertex(init), (StateId::INIT, StateId::INIT, d.initial(), Side::Refuter));
        for v in 0..g.num_vertices() {
            assert_eq!(g.color(v), d.color(g.vertex(v).2));
        }
        let shifted = parse_hyperltl("exists p1. forall p2. (X X X a[p1]) <-> (X X a[p2])").unwrap();
        assert_eq!(
            build_two_player_game(&ks, &shifted, &body_dpa(&shifted.body).unwrap()).unwrap_err(),
            ArenaError::PrefixShape
        );
    }

    #[test]
    fn mpg_basics() {
        let ks = parse_ks(BRANCHING).unwrap();
        let f = parse_hyperltl("exists p1. forall p2. (X X X a[p1]) <-> (X X a[p2])").unwrap();
        let d = body_dpa(&f.body).unwrap();
        let g = build_mpg(&ks, &f, &d).unwrap();
        assert_eq!(g.coalition(), &[1]);
        assert_eq!(g.next_player(2), 1);
        assert_eq!(g.declared_vertex_count(), 2 * 9 * d.num_states() as u128);
        let v0 = g.vertex(0);
        assert_eq!(v0.states, &[StateId::INIT, StateId::INIT]);
        assert_eq!((v0.q, v0.turn), (d.initial(), 1));
        assert_eq!(is_hierarchical(&g).unwrap(), vec![1, 2]);
        let full = build_full_info_game(&ks, &f, &d).unwrap();
        assert_eq!(full.num_vertices(), g.num_vertices());
        assert_ne!(full.hash(), g.hash());
    }

    #[test]
    fn observation_classes() {
        let ks = parse_ks(BRANCHING).unwrap();
        let a = ks.state_id("s_A").unwrap();
        let b = ks.state_id("s_B").unwrap();
        let c1 = make_class(&[a, b], 3, 2, 1, false);
        let c2 = make_class(&[a, a], 0, 2, 1, false);
        assert_eq!(c1, c2);
        assert_ne!(make_class(&[a, b], 0, 1, 2, false), make_class(&[a, b], 0, 2, 2, false));
        let last = make_class(&[a, b], 7, 2, 2, false);
        assert_eq!(last.states, vec![a, b]);
        assert_eq!(last.q, None);
        assert_eq!(ObsClass::parse(&last.render(&ks), &ks), Some(last));
    }

    struct Crossing;

    impl ObservationStructure for Crossing {
        fn num_vertices(&self) -> usize {
            4
        }
        fn num_players(&self) -> usize {
            2
        }
        // Vertex v = (x, y) with x = v / 2, y = v % 2.
        fn observation_key(&self, v: usize, p: usize) -> u64 {
            if p == 1 {
                (v / 2) as u64
            } else {
                (v % 2) as u64
            }
        }
    }

    #[test]
    fn crossing_observations_are_not_hierarchical() {
        let w = is_hierarchical(&Crossing).unwrap_err();
        assert_eq!(w.players, (1, 2));
        let (u, v) = w.first_blind;
        assert_eq!(u / 2, v / 2);
        assert_ne!(u % 2, v % 2);
    }
}
