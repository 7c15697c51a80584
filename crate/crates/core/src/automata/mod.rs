//! Word automata over letters that are subsets of indexed propositions.
//!
//! A letter is a bitmask: bit `i` is set when the `i`-th proposition of the
//! automaton's alphabet holds. LTL bodies are compiled by a tableau into a
//! Büchi automaton, determinized into a parity automaton with state colors
//! under the min-even condition, then recolored and minimized.

mod hoa;
mod product;
mod safra;
mod tableau;

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::logic::{indexed_aps, IndexedAp, Ltl};
use crate::word::UpWord;

pub use hoa::{export_hoa, import_hoa};
pub use safra::determinize_nba_to_dpa;
pub use tableau::ltl_to_nba;

/// Constructions abort beyond this many automaton states.
pub const STATE_CAP: usize = 200_000;

/// Largest alphabet handled explicitly.
pub const MAX_ALPHABET_APS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomataError {
    #[error("automaton exceeds {STATE_CAP} states")]
    TooManyStates,
    #[error("alphabet of {0} propositions is too large")]
    AlphabetTooLarge(usize),
    #[error("proposition {0} is not in the alphabet")]
    MissingAp(String),
    #[error("letter {letter} outside alphabet of size {size}")]
    LetterOutOfRange { letter: u64, size: u64 },
    #[error("HOA input: {0}")]
    Hoa(String),
}

/// Nondeterministic Büchi automaton with state-based acceptance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nba {
    pub alphabet: Vec<IndexedAp>,
    pub initial: Vec<u32>,
    /// `trans[q][letter]` lists successors.
    pub trans: Vec<Vec<Vec<u32>>>,
    pub accepting: Vec<bool>,
}

impl Nba {
    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn num_letters(&self) -> usize {
        1 << self.alphabet.len()
    }

    /// Emptiness-based acceptance of an ultimately periodic word: some run
    /// visits an accepting state infinitely often.
    pub fn accepts(&self, word: &UpWord<u64>) -> bool {
        // Product of the automaton with the word positions folded onto the
        // lasso; look for a reachable accepting cycle.
        let stem = word.stem.len();
        let span = word.span();
        let n = self.num_states();
        let id = |q: usize, i: usize| i * n + q;
        let succ = |v: usize| -> Vec<usize> {
            let (q, i) = (v % n, v / n);
            let j = if i + 1 < span { i + 1 } else { stem };
            self.trans[q][*word.at(i) as usize]
                .iter()
                .map(|&t| id(t as usize, j))
                .collect()
        };
        let total = n * span;
        let mut reach = vec![false; total];
        let mut stack: Vec<usize> = self.initial.iter().map(|&q| id(q as usize, 0)).collect();
        for &v in &stack {
            reach[v] = true;
        }
        while let Some(v) = stack.pop() {
            for w in succ(v) {
                if !reach[w] {
                    reach[w] = true;
                    stack.push(w);
                }
            }
        }
        let adj: Vec<Vec<usize>> = (0..total)
            .map(|v| if reach[v] { succ(v) } else { vec![] })
            .collect();
        let sccs = tarjan(total, |v| adj[v].iter().copied());
        for comp in &sccs {
            let nontrivial = comp.len() > 1 || adj[comp[0]].contains(&comp[0]);
            if nontrivial && reach[comp[0]] && comp.iter().any(|&v| self.accepting[v % n]) {
                return true;
            }
        }
        false
    }

    /// Drops states from which no accepting cycle is reachable.
    pub fn prune(&self) -> Nba {
        let n = self.num_states();
        let nl = self.num_letters();
        let adj: Vec<Vec<u32>> = (0..n)
            .map(|q| {
                let mut v: Vec<u32> = self.trans[q].iter().flatten().copied().collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        let sccs = tarjan(n, |q| adj[q].iter().map(|&t| t as usize));
        let mut good = vec![false; n];
        for comp in &sccs {
            let nontrivial = comp.len() > 1 || adj[comp[0]].contains(&(comp[0] as u32));
            if nontrivial && comp.iter().any(|&q| self.accepting[q]) {
                for &q in comp {
                    good[q] = true;
                }
            }
        }
        // Backward closure.
        let mut rev = vec![Vec::new(); n];
        for q in 0..n {
            for &t in &adj[q] {
                rev[t as usize].push(q);
            }
        }
        let mut live = good.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&q| good[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if !live[p] {
                    live[p] = true;
                    stack.push(p);
                }
            }
        }
        // Forward reachability from initial states restricted to live states.
        let mut keep = vec![false; n];
        let mut stack: Vec<usize> = self
            .initial
            .iter()
            .map(|&q| q as usize)
            .filter(|&q| live[q])
            .collect();
        for &q in &stack {
            keep[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &t in &adj[q] {
                let t = t as usize;
                if live[t] && !keep[t] {
                    keep[t] = true;
                    stack.push(t);
                }
            }
        }
        let mut map = vec![u32::MAX; n];
        let mut next = 0;
        for q in 0..n {
            if keep[q] {
                map[q] = next;
                next += 1;
            }
        }
        let mut initial: Vec<u32> = self
            .initial
            .iter()
            .filter(|&&q| keep[q as usize])
            .map(|&q| map[q as usize])
            .collect();
        initial.sort_unstable();
        initial.dedup();
        let mut trans = Vec::with_capacity(next as usize);
        let mut accepting = Vec::with_capacity(next as usize);
        for q in 0..n {
            if !keep[q] {
                continue;
            }
            trans.push(
                (0..nl)
                    .map(|l| {
                        self.trans[q][l]
                            .iter()
                            .filter(|&&t| keep[t as usize])
                            .map(|&t| map[t as usize])
                            .collect()
                    })
                    .collect(),
            );
            accepting.push(self.accepting[q]);
        }
        Nba {
            alphabet: self.alphabet.clone(),
            initial,
            trans,
            accepting,
        }
    }
}

/// Deterministic, complete parity automaton with state colors; a run is
/// accepting when the least color seen infinitely often is even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dpa {
    alphabet: Vec<IndexedAp>,
    initial: u32,
    /// Row-major `state * num_letters + letter`.
    trans: Vec<u32>,
    colors: Vec<u32>,
    max_color: u32,
}

impl Dpa {
    /// Panics when the table is not total or mentions unknown states.
    pub fn new(alphabet: Vec<IndexedAp>, initial: u32, trans: Vec<u32>, colors: Vec<u32>) -> Dpa {
        let nl = 1usize << alphabet.len();
        assert_eq!(trans.len(), colors.len() * nl, "transition table not total");
        assert!((initial as usize) < colors.len());
        assert!(trans.iter().all(|&t| (t as usize) < colors.len()));
        let max_color = colors.iter().copied().max().unwrap_or(0);
        Dpa {
            alphabet,
            initial,
            trans,
            colors,
            max_color,
        }
    }

    /// One state with the given color looping on every letter.
    pub fn constant(alphabet: Vec<IndexedAp>, color: u32) -> Dpa {
        let nl = 1usize << alphabet.len();
        Dpa::new(alphabet, 0, vec![0; nl], vec![color])
    }

    pub fn alphabet(&self) -> &[IndexedAp] {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.colors.len()
    }

    pub fn num_letters(&self) -> usize {
        1 << self.alphabet.len()
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn step(&self, q: u32, letter: u64) -> u32 {
        self.trans[q as usize * self.num_letters() + letter as usize]
    }

    pub fn color(&self, q: u32) -> u32 {
        self.colors[q as usize]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn max_color(&self) -> u32 {
        self.max_color
    }

    /// Distinct colors in use, ascending.
    pub fn color_set(&self) -> Vec<u32> {
        let mut c = self.colors.clone();
        c.sort_unstable();
        c.dedup();
        c
    }

    /// Runs the word until a (state, cycle position) pair repeats and reads
    /// the least color on the repeated segment.
    pub fn accepts(&self, word: &UpWord<u64>) -> Result<bool, AutomataError> {
        let size = self.num_letters() as u64;
        for &l in word.stem.iter().chain(&word.cycle) {
            if l >= size {
                return Err(AutomataError::LetterOutOfRange { letter: l, size });
            }
        }
        let mut q = self.initial;
        for &l in &word.stem {
            q = self.step(q, l);
        }
        let period = word.cycle.len();
        let mut seen: HashMap<(u32, usize), usize> = HashMap::new();
        let mut trace = Vec::new();
        let mut i = 0;
        loop {
            let pos = i % period;
            if let Some(&start) = seen.get(&(q, pos)) {
                let m = trace[start..].iter().map(|&s| self.color(s)).min().unwrap();
                return Ok(m % 2 == 0);
            }
            seen.insert((q, pos), i);
            trace.push(q);
            q = self.step(q, word.cycle[pos]);
            i += 1;
        }
    }

    /// Same structure with every color raised by one.
    pub fn complement(&self) -> Dpa {
        Dpa {
            alphabet: self.alphabet.clone(),
            initial: self.initial,
            trans: self.trans.clone(),
            colors: self.colors.iter().map(|c| c + 1).collect(),
            max_color: self.max_color + 1,
        }
    }

    /// Minimal recoloring that preserves the acceptance of every run: colors
    /// are recomputed from the nesting of strongly connected subgraphs.
    pub fn recolor(&self) -> Dpa {
        let n = self.num_states();
        let nl = self.num_letters();
        let mut adj: Vec<Vec<u32>> = (0..n)
            .map(|q| self.trans[q * nl..(q + 1) * nl].to_vec())
            .collect();
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        let mut out = vec![0u32; n];
        let all: Vec<usize> = (0..n).collect();
        recolor_rec(&adj, &self.colors, &all, 0, &mut out);
        let max_color = out.iter().copied().max().unwrap_or(0);
        Dpa {
            alphabet: self.alphabet.clone(),
            initial: self.initial,
            trans: self.trans.clone(),
            colors: out,
            max_color,
        }
    }

    /// Keeps only states reachable from the initial state.
    pub fn restrict_reachable(&self) -> Dpa {
        let n = self.num_states();
        let nl = self.num_letters();
        let mut map = vec![u32::MAX; n];
        let mut order = vec![self.initial as usize];
        map[self.initial as usize] = 0;
        let mut head = 0;
        while head < order.len() {
            let q = order[head];
            head += 1;
            for l in 0..nl {
                let t = self.trans[q * nl + l] as usize;
                if map[t] == u32::MAX {
                    map[t] = order.len() as u32;
                    order.push(t);
                }
            }
        }
        let mut trans = Vec::with_capacity(order.len() * nl);
        for &q in &order {
            for l in 0..nl {
                trans.push(map[self.trans[q * nl + l] as usize]);
            }
        }
        let colors = order.iter().map(|&q| self.colors[q]).collect();
        Dpa::new(self.alphabet.clone(), 0, trans, colors)
    }

    /// Quotient by the coarsest color-respecting bisimulation, renumbered in
    /// breadth-first order from the initial state.
    pub fn minimize(&self) -> Dpa {
        let n = self.num_states();
        let nl = self.num_letters();
        let mut block: Vec<u32> = {
            let mut ids: HashMap<u32, u32> = HashMap::new();
            self.colors
                .iter()
                .map(|c| {
                    let k = ids.len() as u32;
                    *ids.entry(*c).or_insert(k)
                })
                .collect()
        };
        let mut count = block.iter().copied().max().map(|m| m + 1).unwrap_or(0);
        loop {
            let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut next = Vec::with_capacity(n);
            for q in 0..n {
                let mut sig = Vec::with_capacity(nl + 1);
                sig.push(block[q]);
                sig.extend((0..nl).map(|l| block[self.trans[q * nl + l] as usize]));
                let k = ids.len() as u32;
                next.push(*ids.entry(sig).or_insert(k));
            }
            let new_count = ids.len() as u32;
            block = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        let mut trans = vec![0u32; count as usize * nl];
        let mut colors = vec![0u32; count as usize];
        for q in 0..n {
            let b = block[q] as usize;
            colors[b] = self.colors[q];
            for l in 0..nl {
                trans[b * nl + l] = block[self.trans[q * nl + l] as usize];
            }
        }
        Dpa::new(self.alphabet.clone(), block[self.initial as usize], trans, colors).restrict_reachable()
    }

    /// Recoloring and minimization until neither changes the automaton.
    pub fn simplify(&self) -> Dpa {
        let mut cur = self.restrict_reachable().recolor().minimize();
        loop {
            let next = cur.recolor().minimize();
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Re-expresses the automaton over a larger alphabet that contains its own;
    /// the extra propositions are ignored.
    pub fn widen(&self, alphabet: &[IndexedAp]) -> Result<Dpa, AutomataError> {
        let pos: Vec<usize> = self
            .alphabet
            .iter()
            .map(|a| {
                alphabet
                    .iter()
                    .position(|b| b == a)
                    .ok_or_else(|| AutomataError::MissingAp(a.to_string()))
            })
            .collect::<Result<_, _>>()?;
        if alphabet.len() > MAX_ALPHABET_APS {
            return Err(AutomataError::AlphabetTooLarge(alphabet.len()));
        }
        let nl = 1usize << alphabet.len();
        let project = |l: usize| -> u64 {
            pos.iter()
                .enumerate()
                .filter(|(_, &p)| l >> p & 1 == 1)
                .fold(0, |acc, (i, _)| acc | 1 << i)
        };
        let mut trans = Vec::with_capacity(self.num_states() * nl);
        for q in 0..self.num_states() as u32 {
            for l in 0..nl {
                trans.push(self.step(q, project(l)));
            }
        }
        Ok(Dpa::new(alphabet.to_vec(), self.initial, trans, self.colors.clone()))
    }
}

fn recolor_rec(adj: &[Vec<u32>], colors: &[u32], nodes: &[usize], base: u32, out: &mut [u32]) {
    let mut inside = vec![false; adj.len()];
    for &v in nodes {
        inside[v] = true;
    }
    let sccs = tarjan_subset(adj, nodes, &inside);
    for comp in sccs {
        let cyclic = comp.len() > 1 || adj[comp[0]].contains(&(comp[0] as u32));
        if !cyclic {
            out[comp[0]] = base;
            continue;
        }
        let m = comp.iter().map(|&v| colors[v]).min().unwrap();
        let c = if base % 2 == m % 2 { base } else { base + 1 };
        let mut rest = Vec::new();
        for &v in &comp {
            if colors[v] == m {
                out[v] = c;
            } else {
                rest.push(v);
            }
        }
        if !rest.is_empty() {
            recolor_rec(adj, colors, &rest, c, out);
        }
    }
}

fn tarjan_subset(adj: &[Vec<u32>], nodes: &[usize], inside: &[bool]) -> Vec<Vec<usize>> {
    let index_of: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let local = tarjan(nodes.len(), |i| {
        adj[nodes[i]]
            .iter()
            .filter(|&&t| inside[t as usize])
            .map(|&t| index_of[&(t as usize)])
            .collect::<Vec<_>>()
            .into_iter()
    });
    local
        .into_iter()
        .map(|c| c.into_iter().map(|i| nodes[i]).collect())
        .collect()
}

/// Iterative Tarjan; components are returned in reverse topological order.
pub(crate) fn tarjan<I, F>(n: usize, succ: F) -> Vec<Vec<usize>>
where
    I: Iterator<Item = usize>,
    F: Fn(usize) -> I,
{
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut work: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        work.push((root, succ(root).collect(), 0));
        while let Some((v, succs, i)) = work.last_mut() {
            let v = *v;
            if *i < succs.len() {
                let w = succs[*i];
                *i += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, succ(w).collect(), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some((p, _, _)) = work.last() {
                    low[*p] = low[*p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Compiles `body` into a parity automaton over `alphabet`, which must contain
/// every indexed proposition of the body.
///
/// Conjunctions and disjunctions are built as products when one operand
/// compiles to a Büchi or co-Büchi automaton; everything else goes through
/// the tableau and determinization.
pub fn ltl_to_dpa(body: &Ltl, alphabet: &[IndexedAp]) -> Result<Dpa, AutomataError> {
    for a in indexed_aps(body) {
        if !alphabet.contains(&a) {
            return Err(AutomataError::MissingAp(a.to_string()));
        }
    }
    compile_nnf(&body.nnf(), alphabet)
}

fn compile_nnf(f: &Ltl, alphabet: &[IndexedAp]) -> Result<Dpa, AutomataError> {
    let op = match f {
        Ltl::And(..) => Some(product::BoolOp::And),
        Ltl::Or(..) => Some(product::BoolOp::Or),
        _ => None,
    };
    if let (Some(op), Ltl::And(x, y) | Ltl::Or(x, y)) = (op, f) {
        let dx = compile_nnf(x, alphabet)?;
        let dy = compile_nnf(y, alphabet)?;
        if let Some(d) = product::combine(&dx, &dy, op)? {
            return Ok(d.simplify());
        }
    }
    let nba = ltl_to_nba(f, alphabet)?;
    Ok(determinize_nba_to_dpa(&nba)?.simplify())
}

/// `ltl_to_dpa` over exactly the body's indexed propositions, in sorted order.
pub fn body_dpa(body: &Ltl) -> Result<Dpa, AutomataError> {
    let aps: Vec<IndexedAp> = indexed_aps(body).into_iter().collect();
    ltl_to_dpa(body, &aps)
}

pub fn dpa_lasso_accepts(a: &Dpa, word: &UpWord<u64>) -> Result<bool, AutomataError> {
    a.accepts(word)
}

pub fn complement_dpa(a: &Dpa) -> Dpa {
    a.complement()
}

/// Breadth-first explorer shared by the determinization constructions.
pub(crate) struct Explorer<K> {
    pub ids: HashMap<K, u32>,
    pub keys: Vec<K>,
    pub queue: VecDeque<u32>,
}

impl<K: Clone + Eq + std::hash::Hash> Explorer<K> {
    pub fn new() -> Self {
        Explorer {
            ids: HashMap::new(),
            keys: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    pub fn intern(&mut self, k: K) -> Result<u32, AutomataError> {
        if let Some(&i) = self.ids.get(&k) {
            return Ok(i);
        }
        if self.keys.len() >= STATE_CAP {
            return Err(AutomataError::TooManyStates);
        }
        let i = self.keys.len() as u32;
        self.ids.insert(k.clone(), i);
        self.keys.push(k);
        self.queue.push_back(i);
        Ok(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_ltl, BodyEvaluator};

    fn aps(names: &[(&str, &str)]) -> Vec<IndexedAp> {
        names.iter().map(|(a, v)| IndexedAp::new(*a, *v)).collect()
    }

    fn all_lassos(bits: usize, max_stem: usize, max_loop: usize) -> Vec<UpWord<u64>> {
        let letters = 1u64 << bits;
        let mut out = Vec::new();
        let seqs = |len: usize| -> Vec<Vec<u64>> {
            let mut v = vec![vec![]];
            for _ in 0..len {
                v = v
                    .into_iter()
                    .flat_map(|s| {
                        (0..letters).map(move |l| {
                            let mut t = s.clone();
                            t.push(l);
                            t
                        })
                    })
                    .collect();
            }
            v
        };
        for s in 0..=max_stem {
            for l in 1..=max_loop {
                for stem in seqs(s) {
                    for cycle in seqs(l) {
                        out.push(UpWord::new(stem.clone(), cycle));
                    }
                }
            }
        }
        out
    }

    fn cross_check(body: &str, alphabet: &[IndexedAp], max_stem: usize, max_loop: usize) {
        let f = parse_ltl(body).unwrap();
        let dpa = ltl_to_dpa(&f, alphabet).unwrap();
        let nba = ltl_to_nba(&f, alphabet).unwrap();
        let ev = BodyEvaluator::new(&f, alphabet);
        for w in all_lassos(alphabet.len(), max_stem, max_loop) {
            let expect = ev.eval(&w);
            assert_eq!(nba.accepts(&w), expect, "nba {body} on {w:?}");
            assert_eq!(dpa.accepts(&w).unwrap(), expect, "dpa {body} on {w:?}");
        }
    }

    #[test]
    fn true_is_single_accepting_state() {
        let nba = ltl_to_nba(&Ltl::True, &[]).unwrap();
        assert_eq!(nba.num_states(), 1);
        assert!(nba.accepting[0]);
        let dpa = ltl_to_dpa(&Ltl::True, &[]).unwrap();
        assert_eq!(dpa.num_states(), 1);
        assert_eq!(dpa.color(0), 0);
    }

    #[test]
    fn small_bodies_agree_with_evaluator() {
        let a = aps(&[("a", "p1")]);
        for body in ["a[p1]", "G F a[p1]", "F a[p1]", "F G a[p1]", "G a[p1]", "X !a[p1]"] {
            cross_check(body, &a, 3, 3);
        }
        let ab = aps(&[("a", "p1"), ("a", "p2")]);
        for body in [
            "G F (a[p2] <-> X a[p1])",
            "a[p1] U a[p2]",
            "(G F a[p1]) -> (G F a[p2])",
            "F G a[p1] || G F a[p2]",
        ] {
            cross_check(body, &ab, 2, 3);
        }
    }

    #[test]
    fn ex2_body_exhaustive() {
        let ab = aps(&[("a", "p1"), ("a", "p2")]);
        cross_check("(X X X a[p1]) <-> (X X a[p2])", &ab, 4, 2);
    }

    #[test]
    fn gf_dpa_examples() {
        let a = aps(&[("a", "p1")]);
        let dpa = ltl_to_dpa(&parse_ltl("G F a[p1]").unwrap(), &a).unwrap();
        assert!(!dpa.accepts(&UpWord::constant(0)).unwrap());
        assert!(dpa.accepts(&UpWord::constant(1)).unwrap());
        assert!(dpa.accepts(&UpWord::new(vec![], vec![1, 0])).unwrap());
        let comp = complement_dpa(&dpa);
        assert!(comp.accepts(&UpWord::constant(0)).unwrap());
        assert!(dpa.accepts(&UpWord::constant(2)).is_err());
    }

    #[test]
    fn constant_automata() {
        let d = Dpa::constant(vec![], 0);
        assert!(d.accepts(&UpWord::constant(0)).unwrap());
        let r = Dpa::constant(vec![], 1);
        assert!(!r.accepts(&UpWord::constant(0)).unwrap());
        assert!(!d.complement().accepts(&UpWord::constant(0)).unwrap());
    }

    #[test]
    fn safety_bodies_use_two_colors() {
        let ab = aps(&[("a", "p1"), ("a", "p2")]);
        for body in ["G (a[p1] <-> a[p2])", "X X a[p1]", "G (a[p1] -> X a[p2])", "a[p1] R a[p2]"] {
            let f = parse_ltl(body).unwrap();
            assert!(f.is_syntactic_safety());
            let d = ltl_to_dpa(&f, &ab).unwrap();
            assert!(d.colors().iter().all(|&c| c <= 1), "{body}: {:?}", d.colors());
        }
    }

    #[test]
    fn widen_ignores_new_props() {
        let a = aps(&[("a", "p1")]);
        let ab = aps(&[("b", "p0"), ("a", "p1")]);
        let d = ltl_to_dpa(&parse_ltl("G F a[p1]").unwrap(), &a).unwrap();
        let w = d.widen(&ab).unwrap();
        assert!(w.accepts(&UpWord::constant(2)).unwrap());
        assert!(!w.accepts(&UpWord::constant(1)).unwrap());
    }
}
