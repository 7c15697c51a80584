//! Safra-tree determinization producing parity colors from node ranks.
//!
//! Nodes are kept in age order, and a node's rank is its position in that
//! order. A step reports the least rank that turned green (vertical merge)
//! and the least rank of an old node that was removed, which also shifts every
//! younger rank. Color `2g` for a green rank `g` below every removal, `2r - 1`
//! for a removal at rank `r`, and an odd neutral color above all ranks when
//! nothing happened.

use super::{AutomataError, Dpa, Explorer, Nba};

type Bits = Vec<u64>;

fn words(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

fn is_empty(b: &[u64]) -> bool {
    b.iter().all(|&w| w == 0)
}

fn union_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d |= s;
    }
}

fn minus_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d &= !s;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Tree {
    /// `(parent, label)` in age order; the root is first and has parent `u32::MAX`.
    nodes: Vec<(u32, Bits)>,
}

struct Ctx {
    w: usize,
    acc: Bits,
    /// `succ[q][letter]` as a bitset.
    succ: Vec<Vec<Bits>>,
}

impl Ctx {
    fn post(&self, label: &[u64], letter: usize) -> Bits {
        let mut out = vec![0u64; self.w];
        for (wi, &word) in label.iter().enumerate() {
            let mut rest = word;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                union_into(&mut out, &self.succ[wi * 64 + b][letter]);
            }
        }
        out
    }

    /// Successor tree and the color of the step.
    fn step(&self, tree: &Tree, letter: usize, neutral: u32) -> (Tree, u32) {
        let old = tree.nodes.len();
        let mut nodes: Vec<(u32, Bits)> = tree.nodes.clone();
        // Spawn accepting children.
        for i in 0..old {
            let mut l = nodes[i].1.clone();
            for (a, b) in l.iter_mut().zip(&self.acc) {
                *a &= b;
            }
            if !is_empty(&l) {
                nodes.push((i as u32, l));
            }
        }
        for node in nodes.iter_mut() {
            node.1 = self.post(&node.1, letter);
        }
        let n = nodes.len();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, (p, _)) in nodes.iter().enumerate().skip(1) {
            children[*p as usize].push(i);
        }
        // Horizontal merge: a state stays only in the oldest branch holding it.
        let mut stack: Vec<(usize, Bits)> = vec![(0, vec![0u64; self.w])];
        while let Some((v, forbidden)) = stack.pop() {
            minus_into(&mut nodes[v].1, &forbidden);
            let mut acc = forbidden;
            let mut pending = Vec::new();
            for &c in &children[v] {
                pending.push((c, acc.clone()));
                let mut cl = nodes[c].1.clone();
                minus_into(&mut cl, &acc);
                union_into(&mut acc, &cl);
            }
            stack.extend(pending.into_iter().rev());
        }
        let mut alive: Vec<bool> = nodes.iter().map(|(_, l)| !is_empty(l)).collect();
        // Vertical merge in pre-order.
        let mut green = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut st = vec![0usize];
        while let Some(v) = st.pop() {
            order.push(v);
            for &c in children[v].iter().rev() {
                st.push(c);
            }
        }
        let mut killed_by_merge = vec![false; n];
        for &v in &order {
            if !alive[v] || killed_by_merge[v] {
                continue;
            }
            let live_children: Vec<usize> =
                children[v].iter().copied().filter(|&c| alive[c]).collect();
            if live_children.is_empty() {
                continue;
            }
            let mut u = vec![0u64; self.w];
            for &c in &live_children {
                union_into(&mut u, &nodes[c].1);
            }
            if u == nodes[v].1 {
                green[v] = true;
                let mut desc = live_children;
                while let Some(d) = desc.pop() {
                    killed_by_merge[d] = true;
                    desc.extend(children[d].iter().copied());
                }
            }
        }
        for i in 0..n {
            if killed_by_merge[i] {
                alive[i] = false;
            }
        }
        // Dead parents imply dead descendants since labels are nested.
        let mut red = u32::MAX;
        for (i, &a) in alive.iter().enumerate().take(old) {
            if !a {
                red = red.min(i as u32 + 1);
                break;
            }
        }
        let mut map = vec![u32::MAX; n];
        let mut out: Vec<(u32, Bits)> = Vec::new();
        let mut green_rank = u32::MAX;
        for i in 0..n {
            if alive[i] {
                map[i] = out.len() as u32;
                if green[i] {
                    green_rank = green_rank.min(out.len() as u32 + 1);
                }
                let p = if i == 0 { u32::MAX } else { map[nodes[i].0 as usize] };
                out.push((p, std::mem::take(&mut nodes[i].1)));
            }
        }
        let color = if green_rank == u32::MAX && red == u32::MAX {
            neutral
        } else if green_rank < red {
            2 * green_rank
        } else {
            2 * red - 1
        };
        (Tree { nodes: out }, color)
    }
}

/// Determinizes a Büchi automaton into an equivalent parity automaton.
pub fn determinize_nba_to_dpa(nba: &Nba) -> Result<Dpa, AutomataError> {
    let nq = nba.num_states();
    let nl = nba.num_letters();
    let w = words(nq);
    let bits_of = |qs: &mut dyn Iterator<Item = u32>| {
        let mut b = vec![0u64; w];
        for q in qs {
            b[q as usize / 64] |= 1 << (q % 64);
        }
        b
    };
    let ctx = Ctx {
        w,
        acc: bits_of(&mut (0..nq as u32).filter(|&q| nba.accepting[q as usize])),
        succ: (0..nq)
            .map(|q| {
                (0..nl)
                    .map(|l| bits_of(&mut nba.trans[q][l].iter().copied()))
                    .collect()
            })
            .collect(),
    };
    let neutral = 2 * (nq as u32 + 1) + 1;
    let init_label = bits_of(&mut nba.initial.iter().copied());
    let init_tree = Tree {
        nodes: if is_empty(&init_label) {
            vec![]
        } else {
            vec![(u32::MAX, init_label)]
        },
    };
    // States pair a tree with the color of the step that produced it.
    let mut ex: Explorer<(Tree, u32)> = Explorer::new();
    ex.intern((init_tree, neutral))?;
    let mut trans: Vec<u32> = Vec::new();
    let mut cache: std::collections::HashMap<Tree, Vec<(Tree, u32)>> = Default::default();
    while let Some(s) = ex.queue.pop_front() {
        let tree = ex.keys[s as usize].0.clone();
        let succs = match cache.get(&tree) {
            Some(v) => v.clone(),
            None => {
                let v: Vec<(Tree, u32)> = (0..nl)
                    .map(|l| {
                        if tree.nodes.is_empty() {
                            (tree.clone(), 1)
                        } else {
                            ctx.step(&tree, l, neutral)
                        }
                    })
                    .collect();
                cache.insert(tree.clone(), v.clone());
                v
            }
        };
        if trans.len() < (s as usize + 1) * nl {
            trans.resize((s as usize + 1) * nl, 0);
        }
        for (l, (t, c)) in succs.into_iter().enumerate() {
            let id = ex.intern((t, c))?;
            trans[s as usize * nl + l] = id;
        }
    }
    let colors: Vec<u32> = ex
        .keys
        .iter()
        .map(|(t, c)| if t.nodes.is_empty() { 1 } else { *c })
        .collect();
    trans.resize(colors.len() * nl, 0);
    Ok(Dpa::new(nba.alphabet.clone(), 0, trans, colors))
}
