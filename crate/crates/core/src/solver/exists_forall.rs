//! Exact decision for prefixes `∃π₁…∃π_k ∀π_{k+1}…∀π_{k+m}`.
//!
//! Words over joint directions of the existential copies are read by a
//! nondeterministic automaton that guesses universal paths and an odd
//! recurring color of the body automaton. Its complement contains exactly the
//! direction sequences whose paths satisfy the formula against every choice
//! of universal paths.

use std::collections::{HashMap, VecDeque};

use crate::arena::{build_mpg, LetterBinding};
use crate::automata::{determinize_nba_to_dpa, tarjan, Dpa, Nba, MAX_ALPHABET_APS};
use crate::certificate::{PlayerStrategy, StrategyProfile};
use crate::logic::{HyperLtl, IndexedAp, Quantifier};
use crate::model::{DirId, KripkeStructure, StateId};

use super::{Guarantee, Method, Outcome, SolverError, Verdict};

/// Joint existential directions: `stem` then `cycle` repeated forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionLasso {
    pub stem: Vec<Vec<DirId>>,
    pub cycle: Vec<Vec<DirId>>,
}

impl DirectionLasso {
    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn at(&self, i: usize) -> &[DirId] {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Paths of the existential copies.
    pub fn paths(&self, ks: &KripkeStructure) -> Vec<Vec<StateId>> {
        let k = self.stem.first().or(self.cycle.first()).map_or(0, Vec::len);
        (0..k)
            .map(|c| {
                let mut s = ks.init();
                let mut out = vec![s];
                for i in 0..self.len() {
                    s = ks.succ(s, self.at(i)[c]);
                    out.push(s);
                }
                out
            })
            .collect()
    }
}

fn bits_for(n: usize) -> usize {
    let mut b = 0;
    while (1usize << b) < n {
        b += 1;
    }
    b
}

const SINK: u32 = u32::MAX;
const GUESS: u32 = u32::MAX - 1;

/// Searches a direction lasso witnessing the formula, or `None` when the
/// formula is false on `ks`.
pub fn exists_forall_witness(
    ks: &KripkeStructure,
    f: &HyperLtl,
    a: &Dpa,
) -> Result<Option<DirectionLasso>, SolverError> {
    if !f.is_exists_forall() {
        return Err(SolverError::Prefix("expected existential quantifiers followed by universal ones".into()));
    }
    let k = f.quantifiers().iter().take_while(|&&q| q == Quantifier::Exists).count();
    let n = f.num_vars();
    let nd = ks.num_directions();
    let bits = bits_for(nd);
    if k * bits > MAX_ALPHABET_APS {
        return Err(SolverError::TooLarge(format!("{} direction bits", k * bits)));
    }
    let binding = LetterBinding::new(ks, f, a)?;
    let alphabet: Vec<IndexedAp> = (0..k)
        .flat_map(|c| (0..bits).map(move |b| IndexedAp::new(format!("dir{b}"), f.prefix[c].1.clone())))
        .collect();
    let nl = 1usize << alphabet.len();
    let decode = |l: usize| -> Option<Vec<DirId>> {
        (0..k)
            .map(|c| {
                let d = (l >> (c * bits)) & ((1 << bits) - 1);
                (d < nd).then_some(DirId(d as u32))
            })
            .collect()
    };
    let odd: Vec<u32> = a.color_set().into_iter().filter(|c| c % 2 == 1).collect();

    // Universal successor tuples, memoized per tuple.
    let mut uni_succ: HashMap<Vec<StateId>, Vec<Vec<StateId>>> = HashMap::new();
    let mut universal_successors = |y: &[StateId]| -> Vec<Vec<StateId>> {
        uni_succ
            .entry(y.to_vec())
            .or_insert_with(|| {
                let mut acc: Vec<Vec<StateId>> = vec![vec![]];
                for &s in y {
                    let mut nexts = ks.successors(s);
                    nexts.sort();
                    nexts.dedup();
                    acc = acc
                        .into_iter()
                        .flat_map(|p| {
                            nexts.iter().map(move |&t| {
                                let mut p = p.clone();
                                p.push(t);
                                p
                            })
                        })
                        .collect();
                }
                acc
            })
            .clone()
    };

    type Key = (Vec<StateId>, u32, u32);
    let mut ids: HashMap<Key, u32> = HashMap::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |key: Key, keys: &mut Vec<Key>, queue: &mut VecDeque<u32>| -> Result<u32, SolverError> {
        if let Some(&i) = ids.get(&key) {
            return Ok(i);
        }
        let i = keys.len() as u32;
        if keys.len() >= crate::automata::STATE_CAP {
            return Err(SolverError::TooLarge("complement automaton".into()));
        }
        ids.insert(key.clone(), i);
        keys.push(key);
        queue.push_back(i);
        Ok(i)
    };
    let allowed = |q: u32, mode: u32| mode == GUESS || a.color(q) >= mode;
    let init_tuple = vec![ks.init(); n];
    let mut initial = vec![intern((init_tuple.clone(), a.initial(), GUESS), &mut keys, &mut queue)?];
    for &j in &odd {
        if allowed(a.initial(), j) {
            initial.push(intern((init_tuple.clone(), a.initial(), j), &mut keys, &mut queue)?);
        }
    }
    let mut trans: Vec<Vec<Vec<u32>>> = Vec::new();
    while let Some(s) = queue.pop_front() {
        let (tuple, q, mode) = keys[s as usize].clone();
        let mut row: Vec<Vec<u32>> = vec![Vec::new(); nl];
        if mode == SINK {
            for cell in row.iter_mut() {
                cell.push(s);
            }
        } else {
            let labels: Vec<u64> = tuple.iter().map(|&x| ks.label(x)).collect();
            let q2 = a.step(q, binding.letter(&labels));
            let ys = universal_successors(&tuple[k..]);
            for (l, cell) in row.iter_mut().enumerate() {
                let Some(dirs) = decode(l) else {
                    cell.push(intern((vec![], 0, SINK), &mut keys, &mut queue)?);
                    continue;
                };
                let xs: Vec<StateId> = (0..k).map(|c| ks.succ(tuple[c], dirs[c])).collect();
                for y in &ys {
                    let mut t = xs.clone();
                    t.extend_from_slice(y);
                    let modes: Vec<u32> = if mode == GUESS {
                        std::iter::once(GUESS).chain(odd.iter().copied()).collect()
                    } else {
                        vec![mode]
                    };
                    for md in modes {
                        if allowed(q2, md) {
                            let id = intern((t.clone(), q2, md), &mut keys, &mut queue)?;
                            if !cell.contains(&id) {
                                cell.push(id);
                            }
                        }
                    }
                }
            }
        }
        if trans.len() <= s as usize {
            trans.resize(s as usize + 1, Vec::new());
        }
        trans[s as usize] = row;
    }
    trans.resize(keys.len(), vec![Vec::new(); nl]);
    let accepting = keys
        .iter()
        .map(|(_, q, mode)| *mode == SINK || (*mode != GUESS && a.color(*q) == *mode))
        .collect();
    let nba = Nba {
        alphabet,
        initial,
        trans,
        accepting,
    }
    .prune();
    let violations = determinize_nba_to_dpa(&nba)?.simplify();
    let good = violations.complement();
    Ok(find_accepting_lasso(&good).map(|(stem, cycle)| DirectionLasso {
        stem: stem.into_iter().map(|l| decode(l as usize).unwrap()).collect(),
        cycle: cycle.into_iter().map(|l| decode(l as usize).unwrap()).collect(),
    }))
}

/// A word `stem · cycle^ω` accepted by `d`, if any.
pub fn find_accepting_lasso(d: &Dpa) -> Option<(Vec<u64>, Vec<u64>)> {
    let n = d.num_states();
    let nl = d.num_letters();
    let mut parent: Vec<Option<(u32, u64)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([d.initial()]);
    seen[d.initial() as usize] = true;
    while let Some(q) = queue.pop_front() {
        for l in 0..nl as u64 {
            let t = d.step(q, l);
            if !seen[t as usize] {
                seen[t as usize] = true;
                parent[t as usize] = Some((q, l));
                queue.push_back(t);
            }
        }
    }
    for c in d.color_set().into_iter().filter(|c| c % 2 == 0) {
        let keep_v: Vec<bool> = (0..n).map(|q| seen[q] && d.color(q as u32) >= c).collect();
        let keep = &keep_v;
        let comps = tarjan(n, |q| {
            let ok = keep[q];
            (0..nl as u64)
                .map(move |l| d.step(q as u32, l) as usize)
                .filter(move |&t| ok && keep[t])
                .collect::<Vec<_>>()
                .into_iter()
        });
        let mut comp_of = vec![usize::MAX; n];
        for (i, comp) in comps.iter().enumerate() {
            for &q in comp {
                comp_of[q] = i;
            }
        }
        for comp in &comps {
            let Some(&h) = comp.iter().find(|&&q| keep[q] && d.color(q as u32) == c) else {
                continue;
            };
            // Shortest cycle through h inside the component.
            let cid = comp_of[h];
            let mut prev: HashMap<usize, (usize, u64)> = HashMap::new();
            let mut queue = VecDeque::from([h]);
            let mut cycle = None;
            'bfs: while let Some(q) = queue.pop_front() {
                for l in 0..nl as u64 {
                    let t = d.step(q as u32, l) as usize;
                    if !keep[t] || comp_of[t] != cid {
                        continue;
                    }
                    if t == h {
                        let mut letters = vec![l];
                        let mut w = q;
                        while w != h {
                            let (p, pl) = prev[&w];
                            letters.push(pl);
                            w = p;
                        }
                        letters.reverse();
                        cycle = Some(letters);
                        break 'bfs;
                    }
                    if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(t) {
                        e.insert((q, l));
                        queue.push_back(t);
                    }
                }
            }
            let Some(cycle) = cycle else { continue };
            let mut stem = Vec::new();
            let mut q = h;
            while let Some((p, l)) = parent[q] {
                stem.push(l);
                q = p as usize;
            }
            stem.reverse();
            return Some((stem, cycle));
        }
    }
    None
}

/// Players follow the lasso blindly, counting rounds in their memory.
fn lasso_profile(
    g: &crate::arena::MpgGame,
    lasso: &DirectionLasso,
    manifest: Vec<String>,
) -> StrategyProfile {
    let mut sp = StrategyProfile::for_game(g, manifest);
    let len = lasso.len().max(1) as u32;
    let loop_start = lasso.stem.len() as u32;
    for &p in g.coalition() {
        let mut ps = PlayerStrategy {
            player: p,
            memory: len,
            initial: 0,
            ..Default::default()
        };
        for (ci, class) in g.classes(p).iter().enumerate() {
            if class.turn != p {
                continue;
            }
            for m in 0..len {
                ps.set_output(g, m, ci as u32, lasso.at(m as usize)[p - 1]);
                let next = if m + 1 == len { loop_start } else { m + 1 };
                ps.set_update(g, m, ci as u32, next);
            }
        }
        sp.players.push(ps);
    }
    sp
}

pub fn solve_exists_forall(ks: &KripkeStructure, f: &HyperLtl, a: &Dpa) -> Result<Verdict, SolverError> {
    solve_exists_forall_with(ks, f, a, vec![])
}

pub(crate) fn solve_exists_forall_with(
    ks: &KripkeStructure,
    f: &HyperLtl,
    a: &Dpa,
    manifest: Vec<String>,
) -> Result<Verdict, SolverError> {
    let witness = exists_forall_witness(ks, f, a)?;
    let mut v = Verdict::new(
        if witness.is_some() {
            Outcome::Proven
        } else {
            Outcome::Disproven
        },
        Method::ExistsForall,
        Guarantee::Semantic,
    );
    if let Some(lasso) = witness {
        let g = build_mpg(ks, f, a)?;
        v.witness = Some(lasso_profile(&g, &lasso, manifest));
        v.game_won = Some(true);
        v.notes.push(format!(
            "witness paths: stem of {} steps, loop of {} steps",
            lasso.stem.len(),
            lasso.cycle.len()
        ));
    }
    Ok(v)
}
