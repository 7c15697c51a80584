//! Tableau translation of LTL into a generalized Büchi automaton, followed by
//! counter degeneralization.

use std::collections::{BTreeSet, HashMap};

use super::{AutomataError, Explorer, Nba, MAX_ALPHABET_APS};
use crate::logic::{IndexedAp, Ltl};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(u32, bool),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
}

struct Arena {
    nodes: Vec<Node>,
    ids: HashMap<Node, usize>,
}

impl Arena {
    fn add(&mut self, n: Node) -> usize {
        if let Some(&i) = self.ids.get(&n) {
            return i;
        }
        self.nodes.push(n.clone());
        self.ids.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    /// Input must be in negation normal form.
    fn build(&mut self, f: &Ltl, alphabet: &[IndexedAp]) -> Result<usize, AutomataError> {
        let lit = |a: &IndexedAp| -> Result<u32, AutomataError> {
            alphabet
                .iter()
                .position(|b| b == a)
                .map(|i| i as u32)
                .ok_or_else(|| AutomataError::MissingAp(a.to_string()))
        };
        let node = match f {
            Ltl::True => Node::True,
            Ltl::False => Node::False,
            Ltl::Atom(a) => Node::Lit(lit(a)?, true),
            Ltl::Not(inner) => match inner.as_ref() {
                Ltl::Atom(a) => Node::Lit(lit(a)?, false),
                other => unreachable!("negation of {other} in nnf"),
            },
            Ltl::And(a, b) => {
                let (x, y) = (self.build(a, alphabet)?, self.build(b, alphabet)?);
                Node::And(x, y)
            }
            Ltl::Or(a, b) => {
                let (x, y) = (self.build(a, alphabet)?, self.build(b, alphabet)?);
                Node::Or(x, y)
            }
            Ltl::Next(a) => Node::Next(self.build(a, alphabet)?),
            Ltl::Until(a, b) => {
                let (x, y) = (self.build(a, alphabet)?, self.build(b, alphabet)?);
                Node::Until(x, y)
            }
            Ltl::Release(a, b) => {
                let (x, y) = (self.build(a, alphabet)?, self.build(b, alphabet)?);
                Node::Release(x, y)
            }
            Ltl::Eventually(a) => {
                let (x, y) = (self.add(Node::True), self.build(a, alphabet)?);
                Node::Until(x, y)
            }
            Ltl::Globally(a) => {
                let (x, y) = (self.add(Node::False), self.build(a, alphabet)?);
                Node::Release(x, y)
            }
            Ltl::Implies(..) | Ltl::Iff(..) => unreachable!("not in nnf"),
        };
        Ok(self.add(node))
    }
}

/// One way of satisfying a set of obligations at the current position.
#[derive(Debug, Clone)]
struct Cover {
    pos: u64,
    neg: u64,
    next: BTreeSet<usize>,
    /// Until nodes whose eventuality was deferred to the next position.
    deferred: BTreeSet<usize>,
}

fn expand(arena: &Arena, todo: &mut Vec<usize>, cur: Cover, out: &mut Vec<Cover>) {
    let mut cur = cur;
    while let Some(f) = todo.pop() {
        match arena.nodes[f] {
            Node::True => {}
            Node::False => return,
            Node::Lit(bit, positive) => {
                if positive {
                    cur.pos |= 1 << bit;
                } else {
                    cur.neg |= 1 << bit;
                }
                if cur.pos & cur.neg != 0 {
                    return;
                }
            }
            Node::And(a, b) => {
                todo.push(a);
                todo.push(b);
            }
            Node::Or(a, b) => {
                let mut left = todo.clone();
                left.push(a);
                expand(arena, &mut left, cur.clone(), out);
                todo.push(b);
            }
            Node::Next(a) => {
                cur.next.insert(a);
            }
            Node::Until(a, b) => {
                let mut now = todo.clone();
                now.push(b);
                expand(arena, &mut now, cur.clone(), out);
                todo.push(a);
                cur.next.insert(f);
                cur.deferred.insert(f);
            }
            Node::Release(a, b) => {
                let mut now = todo.clone();
                now.push(a);
                now.push(b);
                expand(arena, &mut now, cur.clone(), out);
                todo.push(b);
                cur.next.insert(f);
            }
        }
    }
    out.push(cur);
}

/// Translates `body` into a Büchi automaton over `alphabet`.
pub fn ltl_to_nba(body: &Ltl, alphabet: &[IndexedAp]) -> Result<Nba, AutomataError> {
    if alphabet.len() > MAX_ALPHABET_APS {
        return Err(AutomataError::AlphabetTooLarge(alphabet.len()));
    }
    let mut arena = Arena {
        nodes: Vec::new(),
        ids: HashMap::new(),
    };
    let root = arena.build(&body.nnf(), alphabet)?;
    let untils: Vec<usize> = (0..arena.nodes.len())
        .filter(|&i| matches!(arena.nodes[i], Node::Until(..)))
        .collect();
    let nl = 1usize << alphabet.len();
    let k = untils.len();

    // Generalized automaton over obligation sets with transition marks.
    let mut ex: Explorer<BTreeSet<usize>> = Explorer::new();
    let tt = arena.add(Node::True);
    let norm = |mut s: BTreeSet<usize>| {
        s.remove(&tt);
        s
    };
    let init = ex.intern(norm(BTreeSet::from([root])))?;
    let mut gtrans: Vec<Vec<(u64, u64, u32, Vec<bool>)>> = Vec::new();
    while let Some(s) = ex.queue.pop_front() {
        let set = ex.keys[s as usize].clone();
        let mut covers = Vec::new();
        let mut todo: Vec<usize> = set.iter().copied().collect();
        expand(
            &arena,
            &mut todo,
            Cover {
                pos: 0,
                neg: 0,
                next: BTreeSet::new(),
                deferred: BTreeSet::new(),
            },
            &mut covers,
        );
        let mut edges = Vec::new();
        for c in covers {
            let t = ex.intern(norm(c.next))?;
            let marks = untils.iter().map(|u| !c.deferred.contains(u)).collect();
            edges.push((c.pos, c.neg, t, marks));
        }
        if gtrans.len() <= s as usize {
            gtrans.resize(s as usize + 1, Vec::new());
        }
        gtrans[s as usize] = edges;
    }

    // Counter degeneralization: level k means every mark was seen since the
    // last reset; those states are accepting.
    let mut dx: Explorer<(u32, usize)> = Explorer::new();
    let start = dx.intern((init, 0))?;
    let mut trans: Vec<Vec<Vec<u32>>> = Vec::new();
    while let Some(d) = dx.queue.pop_front() {
        let (s, level) = dx.keys[d as usize];
        let mut row: Vec<Vec<u32>> = vec![Vec::new(); nl];
        for (pos, neg, t, marks) in &gtrans[s as usize] {
            let mut lv = if level == k { 0 } else { level };
            while lv < k && marks[lv] {
                lv += 1;
            }
            let target = dx.intern((*t, lv))?;
            for (l, cell) in row.iter_mut().enumerate() {
                let l = l as u64;
                if l & pos == *pos && l & neg == 0 && !cell.contains(&target) {
                    cell.push(target);
                }
            }
        }
        if trans.len() <= d as usize {
            trans.resize(d as usize + 1, Vec::new());
        }
        trans[d as usize] = row;
    }
    let accepting = dx.keys.iter().map(|&(_, lv)| lv == k).collect();
    let nba = Nba {
        alphabet: alphabet.to_vec(),
        initial: vec![start],
        trans,
        accepting,
    };
    Ok(nba.prune())
}
