//! Backtracking search for finite-memory, observation-based coalition
//! strategies.
//!
//! Table entries are fixed lazily while the product of the game with the
//! partial profile is explored breadth-first. Branches die when the product
//! leaves the full-information winning region of the coalition or closes a
//! cycle with odd least color. Candidate moves are ordered by the
//! full-information strategy.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet, VecDeque};

use crate::arena::{is_hierarchical, MpgGame, ParityArena};
use crate::automata::tarjan;
use crate::certificate::{PlayerStrategy, StrategyProfile};
use crate::model::DirId;

use super::{solve_zielonka, BoundInfo, Guarantee, Method, Outcome, SolverError, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundedOptions {
    pub memory_bound: u32,
    /// Maximum number of tentative table entries.
    pub budget: u64,
    /// Also try players that follow the automaton state in their memory.
    pub automaton_memory: bool,
}

impl Default for BoundedOptions {
    fn default() -> Self {
        BoundedOptions {
            memory_bound: 3,
            budget: 10_000_000,
            automaton_memory: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mem {
    /// `k` memory values, updated on the player's own moves.
    Free(u32),
    /// Memory is the automaton state, updated at the start of every round.
    Tracker,
}

#[derive(Debug, Clone)]
struct PlayerCfg {
    player: usize,
    mode: Mem,
    size: u32,
    shift: u32,
    mask: u64,
    classes: usize,
}

const NONE8: u8 = u8::MAX;
const NONE32: u32 = u32::MAX;

enum Trail {
    Out(usize, usize),
    Upd(usize, usize),
    MaxMem(usize, u32),
}

/// `Fail` carries the decision levels the failure depends on.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Res {
    Found,
    Fail(Vec<u32>),
    Budget,
    Restart,
}

struct Search<'a> {
    g: &'a MpgGame,
    win: &'a [bool],
    /// Per coalition index and class: directions by preference.
    votes: &'a [Vec<Vec<u8>>],
    cfg: Vec<PlayerCfg>,
    index_of: Vec<Option<usize>>,
    out: Vec<Vec<u8>>,
    upd: Vec<Vec<u32>>,
    /// Decision level at which each entry was fixed.
    level: Vec<Vec<u32>>,
    depth: u32,
    /// Entry fixed at each open decision level.
    decisions: Vec<(usize, usize)>,
    /// Per coalition index, slot and direction: conflicts it took part in.
    blame: Vec<Vec<f32>>,
    bump: f32,
    conflicts: u64,
    restart_at: u64,
    max_mem: Vec<u32>,
    trail: Vec<Trail>,
    nodes: Vec<(u32, u64)>,
    parent: Vec<u32>,
    ids: HashMap<(u32, u64), u32>,
    processed: usize,
    checked: usize,
    evaluations: u64,
    budget: u64,
    odd_colors: Vec<u32>,
}

impl Search<'_> {
    fn mem(&self, packed: u64, i: usize) -> u32 {
        ((packed >> self.cfg[i].shift) & self.cfg[i].mask) as u32
    }

    fn slot(&self, v: usize, packed: u64, i: usize) -> usize {
        let c = &self.cfg[i];
        self.mem(packed, i) as usize * c.classes + self.g.obs_id(v, c.player) as usize
    }

    /// Moves and next memory at a node whose entries are fixed.
    fn step(&self, v: usize, packed: u64) -> (Vec<usize>, u64) {
        let g = self.g;
        let turn = g.turn(v);
        let mut next = 0u64;
        let mut dirs: Vec<usize> = (0..g.num_directions()).collect();
        for (i, c) in self.cfg.iter().enumerate() {
            let m = self.mem(packed, i);
            let slot = self.slot(v, packed, i);
            if c.player == turn {
                dirs = vec![self.out[i][slot] as usize];
            }
            let m2 = match c.mode {
                Mem::Free(k) if k > 1 && c.player == turn => self.upd[i][slot],
                Mem::Free(_) => m,
                Mem::Tracker if turn == 1 => {
                    let x = g.vertex(v);
                    g.dpa().step(m, g.binding().letter_of_states(g.ks(), x.states))
                }
                Mem::Tracker => m,
            };
            next |= (m2 as u64) << c.shift;
        }
        (dirs, next)
    }

    fn intern(&mut self, key: (u32, u64), parent: u32) {
        if !self.ids.contains_key(&key) {
            self.ids.insert(key, self.nodes.len() as u32);
            self.nodes.push(key);
            self.parent.push(parent);
        }
    }

    /// Level of the entry used at node `x`, if a coalition player moves there.
    fn level_at(&self, x: usize) -> Option<u32> {
        let (v, packed) = self.nodes[x];
        let i = self.index_of[self.g.turn(v as usize)]?;
        Some(self.level[i][self.slot(v as usize, packed, i)])
    }

    /// Levels of the entries along the tree path to `x`.
    fn path_levels(&self, x: usize, with_self: bool, acc: &mut Vec<u32>) {
        let mut y = if with_self { x as u32 } else { self.parent[x] };
        while y != NONE32 {
            acc.extend(self.level_at(y as usize));
            y = self.parent[y as usize];
        }
    }

    fn undo(&mut self, nodes: usize, processed: usize, trail: usize) {
        for key in self.nodes.drain(nodes..) {
            self.ids.remove(&key);
        }
        self.parent.truncate(nodes);
        self.processed = processed;
        self.checked = self.checked.min(processed);
        while self.trail.len() > trail {
            match self.trail.pop().unwrap() {
                Trail::Out(i, s) => self.out[i][s] = NONE8,
                Trail::Upd(i, s) => self.upd[i][s] = NONE32,
                Trail::MaxMem(i, m) => self.max_mem[i] = m,
            }
        }
    }

    /// Levels responsible for a cycle with odd least color among the first
    /// `upto` nodes, if there is one.
    fn odd_cycle(&self, upto: usize) -> Option<Vec<u32>> {
        let succ: Vec<Vec<usize>> = (0..upto)
            .map(|x| {
                let (v, packed) = self.nodes[x];
                let (dirs, next) = self.step(v as usize, packed);
                dirs.into_iter()
                    .filter_map(|d| self.ids.get(&(self.g.successor(v as usize, d) as u32, next)))
                    .map(|&y| y as usize)
                    .filter(|&y| y < upto)
                    .collect()
            })
            .collect();
        let color = |x: usize| self.g.color(self.nodes[x].0 as usize);
        for &c in &self.odd_colors {
            let keep_v: Vec<bool> = (0..upto).map(|x| color(x) >= c).collect();
            let keep = &keep_v;
            let comps = tarjan(upto, |x| {
                let ok = keep[x];
                succ[x].iter().copied().filter(move |&y| ok && keep[y])
            });
            for comp in comps {
                let cyclic = comp.len() > 1 || succ[comp[0]].contains(&comp[0]);
                if !cyclic {
                    continue;
                }
                let Some(&h) = comp.iter().find(|&&x| keep[x] && color(x) == c) else {
                    continue;
                };
                // Shortest cycle through h inside the component.
                let inside: HashSet<usize> = comp.iter().copied().collect();
                let mut prev: HashMap<usize, usize> = HashMap::new();
                let mut queue = VecDeque::from([h]);
                let mut last = None;
                'bfs: while let Some(x) = queue.pop_front() {
                    for &y in &succ[x] {
                        if !keep[y] || !inside.contains(&y) {
                            continue;
                        }
                        if y == h {
                            last = Some(x);
                            break 'bfs;
                        }
                        if let Entry::Vacant(e) = prev.entry(y) {
                            e.insert(x);
                            queue.push_back(y);
                        }
                    }
                }
                let mut acc = vec![];
                let mut x = last.expect("cyclic component has a cycle through each node");
                while x != h {
                    acc.extend(self.level_at(x));
                    x = prev[&x];
                }
                acc.extend(self.level_at(h));
                self.path_levels(h, false, &mut acc);
                return Some(acc);
            }
        }
        None
    }

    fn run(&mut self) -> Res {
        loop {
            if self.processed == self.nodes.len() {
                return match self.odd_cycle(self.processed) {
                    Some(c) => Res::Fail(c),
                    None => Res::Found,
                };
            }
            let x = self.processed;
            let (v, packed) = self.nodes[x];
            let v = v as usize;
            let turn = self.g.turn(v);
            if let Some(i) = self.index_of[turn] {
                let slot = self.slot(v, packed, i);
                if self.out[i][slot] == NONE8 {
                    return self.branch(x, i, slot);
                }
            }
            let (dirs, next) = self.step(v, packed);
            for d in dirs {
                let w = self.g.successor(v, d);
                if !self.win[w] {
                    let mut acc = vec![];
                    self.path_levels(x, true, &mut acc);
                    return Res::Fail(acc);
                }
                self.intern((w as u32, next), x as u32);
            }
            self.processed += 1;
            if self.processed >= 2 * self.checked.max(512) {
                self.checked = self.processed;
                if let Some(c) = self.odd_cycle(self.processed) {
                    return Res::Fail(c);
                }
            }
        }
    }

    /// Raises the blame of the entries at the given levels, with decaying
    /// weight for older conflicts.
    fn blame_levels(&mut self, levels: &[u32]) {
        let nd = self.g.num_directions();
        for &l in levels {
            let (i, slot) = self.decisions[l as usize];
            let d = self.out[i][slot] as usize;
            self.blame[i][slot * nd + d] += self.bump;
        }
        self.bump *= 1.05;
        if self.bump > 1e20 {
            for b in self.blame.iter_mut().flatten() {
                *b *= 1e-20;
            }
            self.bump *= 1e-20;
        }
    }

    fn branch(&mut self, x: usize, i: usize, slot: usize) -> Res {
        let g = self.g;
        let v = self.nodes[x].0 as usize;
        let class = g.obs_id(v, self.cfg[i].player) as usize;
        let nd = g.num_directions();
        let mut dirs: Vec<u8> = self.votes[i][class].clone();
        dirs.retain(|&d| self.win[g.successor(v, d as usize)]);
        let blame = &self.blame[i][slot * nd..(slot + 1) * nd];
        dirs.sort_by(|&a, &b| blame[a as usize].total_cmp(&blame[b as usize]));
        let updates: Vec<u32> = match self.cfg[i].mode {
            Mem::Free(k) if k > 1 => (0..k.min(self.max_mem[i] + 2)).collect(),
            _ => vec![NONE32],
        };
        let d_level = self.depth;
        self.depth += 1;
        self.decisions.push((i, slot));
        let mut conflict = vec![];
        self.path_levels(x, false, &mut conflict);
        for d in dirs {
            for &u in &updates {
                if self.evaluations >= self.budget {
                    return Res::Budget;
                }
                self.evaluations += 1;
                let mark = (self.nodes.len(), self.processed, self.trail.len());
                self.out[i][slot] = d;
                self.level[i][slot] = d_level;
                self.trail.push(Trail::Out(i, slot));
                if u != NONE32 {
                    self.upd[i][slot] = u;
                    self.trail.push(Trail::Upd(i, slot));
                    if u > self.max_mem[i] {
                        self.trail.push(Trail::MaxMem(i, self.max_mem[i]));
                        self.max_mem[i] = u;
                    }
                }
                match self.run() {
                    Res::Fail(c) => {
                        self.blame_levels(&c);
                        self.undo(mark.0, mark.1, mark.2);
                        self.conflicts += 1;
                        if self.conflicts >= self.restart_at {
                            return Res::Restart;
                        }
                        if !c.contains(&d_level) {
                            self.depth = d_level;
                            self.decisions.truncate(d_level as usize);
                            return Res::Fail(c);
                        }
                        conflict.extend(c.into_iter().filter(|&l| l != d_level));
                    }
                    r => return r,
                }
            }
        }
        self.depth = d_level;
        self.decisions.truncate(d_level as usize);
        conflict.sort_unstable();
        conflict.dedup();
        Res::Fail(conflict)
    }

    fn profile(&self, manifest: Vec<String>) -> StrategyProfile {
        let g = self.g;
        let mut sp = StrategyProfile::for_game(g, manifest);
        for (i, c) in self.cfg.iter().enumerate() {
            let mut ps = PlayerStrategy {
                player: c.player,
                memory: c.size,
                initial: if c.mode == Mem::Tracker { g.dpa().initial() } else { 0 },
                ..Default::default()
            };
            for (slot, &d) in self.out[i].iter().enumerate() {
                if d != NONE8 {
                    let (m, cl) = ((slot / c.classes) as u32, (slot % c.classes) as u32);
                    ps.set_output(g, m, cl, DirId(d as u32));
                    if self.upd[i][slot] != NONE32 {
                        ps.set_update(g, m, cl, self.upd[i][slot]);
                    }
                }
            }
            if c.mode == Mem::Tracker {
                for &(v, packed) in &self.nodes {
                    let v = v as usize;
                    if g.turn(v) == 1 {
                        let m = self.mem(packed, i);
                        let x = g.vertex(v);
                        let t = g.dpa().step(m, g.binding().letter_of_states(g.ks(), x.states));
                        ps.set_update(g, m, g.obs_id(v, c.player), t);
                    }
                }
            }
            sp.players.push(ps);
        }
        sp
    }
}

fn bits_for(n: u32) -> u32 {
    32 - n.saturating_sub(1).leading_zeros()
}

/// Directions per class ordered by how often the full-information strategy
/// picks them where the outcome is still open.
fn compute_votes(g: &MpgGame, win: &[bool], strategy: &[u32]) -> Vec<Vec<Vec<u8>>> {
    let dpa = g.dpa();
    // States from which some word is rejected.
    let nq = dpa.num_states();
    let mut can_fail = vec![false; nq];
    let mut rev: Vec<Vec<u32>> = vec![vec![]; nq];
    for q in 0..nq as u32 {
        for l in 0..dpa.num_letters() as u64 {
            rev[dpa.step(q, l) as usize].push(q);
        }
    }
    let mut stack: Vec<u32> = (0..nq as u32).filter(|&q| dpa.color(q) % 2 == 1).collect();
    for &q in &stack {
        can_fail[q as usize] = true;
    }
    while let Some(q) = stack.pop() {
        for &p in &rev[q as usize] {
            if !can_fail[p as usize] {
                can_fail[p as usize] = true;
                stack.push(p);
            }
        }
    }
    let nd = g.num_directions();
    g.coalition()
        .iter()
        .map(|&p| {
            let mut counts = vec![vec![0u64; nd]; g.classes(p).len()];
            for v in 0..g.num_vertices() {
                if g.turn(v) == p && win[v] && can_fail[g.vertex(v).q as usize] {
                    counts[g.obs_id(v, p) as usize][strategy[v] as usize] += 1;
                }
            }
            counts
                .into_iter()
                .map(|row| {
                    let mut ds: Vec<u8> = (0..nd as u8).collect();
                    ds.sort_by_key(|&d| std::cmp::Reverse(row[d as usize]));
                    ds
                })
                .collect()
        })
        .collect()
}

/// Searches coalition profiles with at most `memory_bound` memory values per
/// player. Never disproves: a failed search is `Unknown`.
pub fn solve_bounded_coalition(
    g: &MpgGame,
    opts: &BoundedOptions,
    manifest: Vec<String>,
) -> Result<Verdict, SolverError> {
    is_hierarchical(g).map_err(|_| SolverError::NotHierarchical)?;
    let sol = solve_zielonka(g);
    let mut bound = BoundInfo {
        memory_bound: opts.memory_bound,
        budget: opts.budget,
        evaluations: 0,
        budget_exhausted: false,
    };
    let mut unknown = Verdict::new(Outcome::Unknown, Method::BoundedCoalition, Guarantee::GameLevel);
    if !sol.even_wins[g.initial()] {
        unknown.game_won = Some(false);
        unknown.bound = Some(bound);
        unknown.notes.push(
            "the coalition loses even with full information, so it has no winning strategy of any memory size"
                .into(),
        );
        return Ok(unknown);
    }
    let votes = compute_votes(g, &sol.even_wins, &sol.strategy);
    let coalition = g.coalition().to_vec();
    let max_copy = g.binding().max_copy();
    let can_track = |p: usize| max_copy.map_or(true, |c| c < p);

    let mut schedule: Vec<Vec<Mem>> = vec![vec![Mem::Free(1); coalition.len()]];
    let nq = g.dpa().num_states() as u32;
    if opts.automaton_memory && nq > 1 && nq <= opts.memory_bound && coalition.iter().any(|&p| can_track(p)) {
        schedule.push(
            coalition
                .iter()
                .map(|&p| if can_track(p) { Mem::Tracker } else { Mem::Free(1) })
                .collect(),
        );
    }
    for k in 2..=opts.memory_bound.min(254) {
        schedule.push(vec![Mem::Free(k); coalition.len()]);
    }

    let mut index_of = vec![None; g.num_players() + 1];
    for (i, &p) in coalition.iter().enumerate() {
        index_of[p] = Some(i);
    }
    let mut odd_colors: Vec<u32> = g.dpa().color_set().into_iter().filter(|c| c % 2 == 1).collect();
    odd_colors.sort_unstable();

    for modes in schedule {
        let mut cfg = Vec::new();
        let mut shift = 0;
        for (i, &p) in coalition.iter().enumerate() {
            let size = match modes[i] {
                Mem::Free(k) => k,
                Mem::Tracker => nq,
            };
            let bits = bits_for(size);
            cfg.push(PlayerCfg {
                player: p,
                mode: modes[i],
                size,
                shift,
                mask: (1u64 << bits) - 1,
                classes: g.classes(p).len(),
            });
            shift += bits;
        }
        if shift > 64 {
            continue;
        }
        let remaining = opts.budget - bound.evaluations;
        let result = std::thread::scope(|s| {
            std::thread::Builder::new()
                .stack_size(1 << 30)
                .spawn_scoped(s, || {
                    let mut init = 0u64;
                    for c in &cfg {
                        if c.mode == Mem::Tracker {
                            init |= (g.dpa().initial() as u64) << c.shift;
                        }
                    }
                    let mut search = Search {
                        g,
                        win: &sol.even_wins,
                        votes: &votes,
                        out: cfg.iter().map(|c| vec![NONE8; c.size as usize * c.classes]).collect(),
                        upd: cfg.iter().map(|c| vec![NONE32; c.size as usize * c.classes]).collect(),
                        level: cfg.iter().map(|c| vec![0; c.size as usize * c.classes]).collect(),
                        depth: 0,
                        decisions: vec![],
                        blame: cfg
                            .iter()
                            .map(|c| vec![0.0; c.size as usize * c.classes * g.num_directions()])
                            .collect(),
                        bump: 1.0,
                        conflicts: 0,
                        restart_at: 64,
                        max_mem: vec![0; cfg.len()],
                        cfg: cfg.clone(),
                        index_of: index_of.clone(),
                        trail: vec![],
                        nodes: vec![],
                        parent: vec![],
                        ids: HashMap::new(),
                        processed: 0,
                        checked: 0,
                        evaluations: 0,
                        budget: remaining,
                        odd_colors: odd_colors.clone(),
                    };
                    search.intern((g.initial() as u32, init), NONE32);
                    let r = loop {
                        match search.run() {
                            Res::Restart => {
                                search.undo(1, 0, 0);
                                search.depth = 0;
                                search.decisions.clear();
                                search.conflicts = 0;
                                search.restart_at += search.restart_at / 2;
                            }
                            r => break r,
                        }
                    };
                    let profile = (r == Res::Found).then(|| search.profile(manifest.clone()));
                    (r, search.evaluations, profile)
                })
                .expect("spawn search thread")
                .join()
                .expect("search thread panicked")
        });
        let (r, evals, profile) = result;
        bound.evaluations += evals;
        match r {
            Res::Found => {
                let mut v = Verdict::new(Outcome::Proven, Method::BoundedCoalition, Guarantee::Semantic);
                let size = cfg.iter().map(|c| c.size).max().unwrap_or(1);
                v.notes.push(if modes.contains(&Mem::Tracker) {
                    "winning profile found with memory tracking the automaton state".to_string()
                } else {
                    format!("winning profile found with {size} memory value(s) per player")
                });
                v.bound = Some(bound);
                v.witness = profile;
                v.game_won = Some(true);
                return Ok(v);
            }
            Res::Budget => {
                bound.budget_exhausted = true;
                break;
            }
            Res::Fail(_) | Res::Restart => {}
        }
    }
    unknown.bound = Some(bound);
    unknown.notes.push(if bound.budget_exhausted {
        format!("search budget of {} table entries exhausted", opts.budget)
    } else {
        format!(
            "no winning profile with at most {} memory values per player",
            opts.memory_bound
        )
    });
    Ok(unknown)
}
