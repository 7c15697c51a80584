//! Brute-force HyperLTL evaluation over the traces of bounded lassos.
//!
//! Quantifiers range over the traces induced by lassos whose stem and loop
//! respect a [`LassoBudget`]. The result is exact for that trace set and an
//! approximation of `K ⊨ φ` in general.

use std::collections::HashSet;

use thiserror::Error;

use crate::logic::{indexed_aps, BodyEvaluator, HyperLtl, IndexedAp, Quantifier};
use crate::model::{KripkeStructure, Lasso, StateId};
use crate::word::{zip_with, UpWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("lasso budget needs stem and loop bounds of at least 1 (got {stem}/{loop_})")]
    Budget { stem: usize, loop_: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LassoBudget {
    pub stem_bound: usize,
    pub loop_bound: usize,
}

impl LassoBudget {
    pub fn new(stem_bound: usize, loop_bound: usize) -> Result<Self, OracleError> {
        if stem_bound == 0 || loop_bound == 0 {
            return Err(OracleError::Budget {
                stem: stem_bound,
                loop_: loop_bound,
            });
        }
        Ok(LassoBudget {
            stem_bound,
            loop_bound,
        })
    }

    pub fn square(n: usize) -> Result<Self, OracleError> {
        LassoBudget::new(n, n)
    }
}

/// Lassos `stem · loop^ω` starting in the initial state with
/// `1 ≤ |stem| ≤ stem_bound` and `1 ≤ |loop| ≤ loop_bound`, one per induced
/// trace. Shorter lassos come first; within a length, paths are ordered by
/// state index.
pub fn enumerate_lassos(ks: &KripkeStructure, b: LassoBudget) -> Vec<Lasso> {
    let succ: Vec<Vec<StateId>> = ks
        .states()
        .map(|s| {
            let mut v = ks.successors(s);
            v.sort();
            v.dedup();
            v
        })
        .collect();
    // Paths from the initial state, by length.
    let mut stems: Vec<Vec<Vec<StateId>>> = vec![vec![], vec![vec![ks.init()]]];
    for len in 2..=b.stem_bound {
        let next = stems[len - 1]
            .iter()
            .flat_map(|p| {
                succ[p.last().unwrap().index()].iter().map(move |&t| {
                    let mut q = p.clone();
                    q.push(t);
                    q
                })
            })
            .collect();
        stems.push(next);
    }
    let mut seen: HashSet<UpWord<u64>> = HashSet::new();
    let mut out = Vec::new();
    for total in 2..=b.stem_bound + b.loop_bound {
        for stem_len in 1..=b.stem_bound.min(total - 1) {
            let loop_len = total - stem_len;
            if loop_len > b.loop_bound {
                continue;
            }
            for stem in &stems[stem_len] {
                let last = *stem.last().unwrap();
                for &first in &succ[last.index()] {
                    let mut cycle = vec![first];
                    extend_cycles(&succ, &mut cycle, loop_len, &mut |cycle| {
                        let lasso = Lasso::new(stem.clone(), cycle.to_vec());
                        let trace = UpWord::new(
                            stem.iter().map(|&s| ks.label(s)).collect(),
                            cycle.iter().map(|&s| ks.label(s)).collect(),
                        )
                        .canonical();
                        if seen.insert(trace) {
                            out.push(lasso);
                        }
                    });
                }
            }
        }
    }
    out
}

/// Calls `emit` for every extension of `cycle` to `len` states whose last
/// state leads back to the first.
fn extend_cycles(succ: &[Vec<StateId>], cycle: &mut Vec<StateId>, len: usize, emit: &mut dyn FnMut(&[StateId])) {
    let last = *cycle.last().unwrap();
    if cycle.len() == len {
        if succ[last.index()].contains(&cycle[0]) {
            emit(cycle);
        }
        return;
    }
    for &t in &succ[last.index()] {
        cycle.push(t);
        extend_cycles(succ, cycle, len, emit);
        cycle.pop();
    }
}

/// Traces of [`enumerate_lassos`] as label words.
pub fn lasso_traces(ks: &KripkeStructure, b: LassoBudget) -> Vec<UpWord<u64>> {
    enumerate_lassos(ks, b)
        .iter()
        .map(|l| {
            UpWord::new(
                l.stem.iter().map(|&s| ks.label(s)).collect(),
                l.cycle.iter().map(|&s| ks.label(s)).collect(),
            )
        })
        .collect()
}

/// Truth of `f` when every quantifier ranges over the traces of the lassos
/// within budget `b`. Atoms over propositions unknown to `ks` never hold.
pub fn oracle_check(ks: &KripkeStructure, f: &HyperLtl, b: LassoBudget) -> bool {
    let traces = lasso_traces(ks, b);
    let atoms: Vec<IndexedAp> = indexed_aps(&f.body).into_iter().collect();
    // (variable index, bit in the system's labels) per atom.
    let bind: Vec<(usize, Option<usize>)> = atoms
        .iter()
        .map(|a| (f.var_index(&a.var).expect("body variables are quantified"), ks.ap_index(&a.ap)))
        .collect();
    let eval = BodyEvaluator::new(&f.body, &atoms);
    let quants = f.quantifiers();
    let mut chosen: Vec<usize> = Vec::with_capacity(quants.len());
    decide(&quants, &traces, &mut chosen, &mut |chosen| {
        let words: Vec<&UpWord<u64>> = chosen.iter().map(|&t| &traces[t]).collect();
        let joint = zip_with(&words, |letters| {
            let mut mask = 0u64;
            for (bit, &(var, ap)) in bind.iter().enumerate() {
                if ap.is_some_and(|ap| letters[var] >> ap & 1 == 1) {
                    mask |= 1 << bit;
                }
            }
            mask
        });
        eval.eval(&joint)
    })
}

fn decide(
    quants: &[Quantifier],
    traces: &[UpWord<u64>],
    chosen: &mut Vec<usize>,
    body: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    let Some(&q) = quants.get(chosen.len()) else {
        return body(chosen);
    };
    let want = q == Quantifier::Exists;
    for t in 0..traces.len() {
        chosen.push(t);
        let r = decide(quants, traces, chosen, body);
        chosen.pop();
        if r == want {
            return want;
        }
    }
    !want
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_hyperltl;
    use crate::model::parse_ks;

    fn branching() -> KripkeStructure {
        parse_ks(
            "aps: a; directions: A, B;
             state s_init init { labels {}; A -> s_A; B -> s_A; }
             state s_A { labels {}; A -> s_A; B -> s_B; }
             state s_B { labels {a}; A -> s_A; B -> s_B; }",
        )
        .unwrap()
    }

    #[test]
    fn smallest_budget() {
        let ks = branching();
        let ls = enumerate_lassos(&ks, LassoBudget::square(1).unwrap());
        let names: Vec<String> = ls
            .iter()
            .map(|l| ks.state_name(l.cycle[0]).to_string())
            .collect();
        assert_eq!(names, vec!["s_A"]);
        assert_eq!(ls[0].stem, vec![ks.init()]);
    }

    #[test]
    fn zero_budget_rejected() {
        assert!(LassoBudget::new(0, 3).is_err());
        assert!(LassoBudget::new(3, 0).is_err());
    }

    #[test]
    fn trivially_true() {
        let f = parse_hyperltl("forall p. true").unwrap();
        assert!(oracle_check(&branching(), &f, LassoBudget::square(2).unwrap()));
    }
}
