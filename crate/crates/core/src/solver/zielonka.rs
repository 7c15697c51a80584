//! Recursive Zielonka algorithm for min-even parity games.

use std::collections::VecDeque;

use crate::arena::ParityArena;

/// Winning regions and positional strategies. `strategy[v]` is a winning
/// direction for the owner of `v` when the owner wins from `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZielonkaSolution {
    pub even_wins: Vec<bool>,
    pub strategy: Vec<u32>,
}

impl ZielonkaSolution {
    pub fn even_wins_from(&self, v: usize) -> bool {
        self.even_wins[v]
    }
}

struct Graph {
    n: usize,
    nd: usize,
    succ: Vec<u32>,
    pred_start: Vec<u32>,
    pred: Vec<u32>,
    color: Vec<u32>,
    even: Vec<bool>,
}

impl Graph {
    fn new<G: ParityArena + ?Sized>(g: &G) -> Graph {
        let n = g.num_vertices();
        let nd = g.num_directions();
        let mut succ = Vec::with_capacity(n * nd);
        let mut indeg = vec![0u32; n + 1];
        for v in 0..n {
            for d in 0..nd {
                let w = g.successor(v, d);
                succ.push(w as u32);
                indeg[w] += 1;
            }
        }
        let mut pred_start = vec![0u32; n + 1];
        for v in 0..n {
            pred_start[v + 1] = pred_start[v] + indeg[v];
        }
        let mut fill = pred_start.clone();
        let mut pred = vec![0u32; n * nd];
        for v in 0..n {
            for d in 0..nd {
                let w = succ[v * nd + d] as usize;
                pred[fill[w] as usize] = v as u32;
                fill[w] += 1;
            }
        }
        Graph {
            n,
            nd,
            succ,
            pred_start,
            pred,
            color: (0..n).map(|v| g.color(v)).collect(),
            even: (0..n).map(|v| g.is_even_owned(v)).collect(),
        }
    }

    fn succs(&self, v: usize) -> &[u32] {
        &self.succ[v * self.nd..(v + 1) * self.nd]
    }

    fn preds(&self, v: usize) -> &[u32] {
        &self.pred[self.pred_start[v] as usize..self.pred_start[v + 1] as usize]
    }
}

struct Solver<'a> {
    g: &'a Graph,
    alive: Vec<bool>,
    strategy: Vec<u32>,
    /// Scratch: remaining escape count during attractor computation.
    count: Vec<u32>,
    in_attr: Vec<bool>,
}

impl Solver<'_> {
    /// Attractor of `target` for the even player iff `even`, within the
    /// alive vertices. Records attracting moves.
    fn attractor(&mut self, target: &[u32], even: bool) -> Vec<u32> {
        let g = self.g;
        let mut out: Vec<u32> = Vec::new();
        let mut queue = VecDeque::new();
        for &v in target {
            if !self.in_attr[v as usize] {
                self.in_attr[v as usize] = true;
                out.push(v);
                queue.push_back(v);
            }
        }
        let mut touched: Vec<u32> = Vec::new();
        while let Some(w) = queue.pop_front() {
            for &u in g.preds(w as usize) {
                let ui = u as usize;
                if !self.alive[ui] || self.in_attr[ui] {
                    continue;
                }
                if g.even[ui] == even {
                    self.in_attr[ui] = true;
                    let d = g.succs(ui).iter().position(|&x| x == w).unwrap();
                    self.strategy[ui] = d as u32;
                    out.push(u);
                    queue.push_back(u);
                } else {
                    if self.count[ui] == u32::MAX {
                        self.count[ui] = g.succs(ui).iter().filter(|&&x| self.alive[x as usize]).count() as u32;
                        touched.push(u);
                    }
                    self.count[ui] -= 1;
                    if self.count[ui] == 0 {
                        self.in_attr[ui] = true;
                        out.push(u);
                        queue.push_back(u);
                    }
                }
            }
        }
        for u in touched {
            self.count[u as usize] = u32::MAX;
        }
        for &v in &out {
            self.in_attr[v as usize] = false;
        }
        out
    }

    /// Solves the subgame on `verts` (exactly the alive vertices). Returns
    /// the even player's winning set; the rest is won by odd.
    fn solve(&mut self, verts: &[u32]) -> Vec<u32> {
        if verts.is_empty() {
            return vec![];
        }
        let g = self.g;
        let p = verts.iter().map(|&v| g.color[v as usize]).min().unwrap();
        let even = p % 2 == 0;
        let top: Vec<u32> = verts.iter().copied().filter(|&v| g.color[v as usize] == p).collect();
        let a = self.attractor(&top, even);
        for &v in &a {
            self.alive[v as usize] = false;
        }
        let rest: Vec<u32> = verts.iter().copied().filter(|&v| self.alive[v as usize]).collect();
        let w_even = self.solve(&rest);
        for &v in &a {
            self.alive[v as usize] = true;
        }
        let opp_sub: Vec<u32> = if even {
            for &v in &w_even {
                self.in_attr[v as usize] = true;
            }
            let o = rest.iter().copied().filter(|&v| !self.in_attr[v as usize]).collect();
            for &v in &w_even {
                self.in_attr[v as usize] = false;
            }
            o
        } else {
            w_even.clone()
        };
        if opp_sub.is_empty() {
            // The player of color p wins everywhere; top vertices it owns
            // stay inside the subgame.
            for &v in &top {
                let vi = v as usize;
                if g.even[vi] == even {
                    let d = g.succs(vi).iter().position(|&x| self.alive[x as usize]).unwrap();
                    self.strategy[vi] = d as u32;
                }
            }
            return if even { verts.to_vec() } else { vec![] };
        }
        let b = self.attractor(&opp_sub, !even);
        for &v in &b {
            self.alive[v as usize] = false;
        }
        let rest2: Vec<u32> = verts.iter().copied().filter(|&v| self.alive[v as usize]).collect();
        let w2 = self.solve(&rest2);
        for &v in &b {
            self.alive[v as usize] = true;
        }
        if even {
            // Odd wins b, even wins w2.
            w2
        } else {
            let mut w = w2;
            w.extend_from_slice(&b);
            w
        }
    }
}

/// Solves the whole arena. Runs on a dedicated thread with a large stack.
pub fn solve_zielonka<G: ParityArena + ?Sized>(g: &G) -> ZielonkaSolution {
    let graph = Graph::new(g);
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(512 << 20)
            .spawn_scoped(s, || {
                let n = graph.n;
                let mut solver = Solver {
                    g: &graph,
                    alive: vec![true; n],
                    strategy: vec![0; n],
                    count: vec![u32::MAX; n],
                    in_attr: vec![false; n],
                };
                let all: Vec<u32> = (0..n as u32).collect();
                let w = solver.solve(&all);
                let mut even_wins = vec![false; n];
                for v in w {
                    even_wins[v as usize] = true;
                }
                ZielonkaSolution {
                    even_wins,
                    strategy: solver.strategy,
                }
            })
            .expect("spawn solver thread")
            .join()
            .expect("solver thread panicked")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Explicit arena for tests.
    pub(crate) struct Explicit {
        pub succ: Vec<Vec<usize>>,
        pub color: Vec<u32>,
        pub even: Vec<bool>,
    }

    impl ParityArena for Explicit {
        fn num_vertices(&self) -> usize {
            self.succ.len()
        }
        fn num_directions(&self) -> usize {
            self.succ[0].len()
        }
        fn successor(&self, v: usize, d: usize) -> usize {
            self.succ[v][d]
        }
        fn color(&self, v: usize) -> u32 {
            self.color[v]
        }
        fn is_even_owned(&self, v: usize) -> bool {
            self.even[v]
        }
        fn initial(&self) -> usize {
            0
        }
    }

    #[test]
    fn single_vertex() {
        let g = Explicit {
            succ: vec![vec![0]],
            color: vec![0],
            even: vec![true],
        };
        assert!(solve_zielonka(&g).even_wins[0]);
        let g = Explicit {
            succ: vec![vec![0]],
            color: vec![1],
            even: vec![true],
        };
        assert!(!solve_zielonka(&g).even_wins[0]);
    }

    #[test]
    fn choice_matters() {
        // 0 (even) can go to 1 (color 0 loop) or 2 (color 1 loop).
        let g = Explicit {
            succ: vec![vec![2, 1], vec![1, 1], vec![2, 2]],
            color: vec![3, 0, 1],
            even: vec![true, true, true],
        };
        let s = solve_zielonka(&g);
        assert_eq!(s.even_wins, vec![true, true, false]);
        assert_eq!(s.strategy[0], 1);
        let mut g = g;
        g.even[0] = false;
        let s = solve_zielonka(&g);
        assert!(!s.even_wins[0]);
        assert_eq!(s.strategy[0], 0);
    }
}
