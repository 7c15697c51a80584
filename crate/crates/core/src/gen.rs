//! Seeded random instances for property tests and benchmark sweeps.

use rand::Rng;

use crate::logic::{HyperLtl, IndexedAp, Ltl, Quantifier};
use crate::model::{KripkeStructure, StateSpec};
use crate::word::UpWord;

/// A structure with `2..=max_states` states (the initial one included),
/// `dirs` directions and propositions `a`, `b`, ... (`aps` of them). Every
/// state is reachable and the initial state has no incoming edge.
pub fn random_ks<R: Rng>(rng: &mut R, max_states: usize, dirs: usize, aps: usize) -> KripkeStructure {
    assert!(max_states >= 2 && dirs >= 1);
    let ap_names: Vec<String> = (0..aps).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let dir_names: Vec<String> = (0..dirs).map(|i| ((b'A' + i as u8) as char).to_string()).collect();
    loop {
        let n = rng.gen_range(2..=max_states);
        let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let specs: Vec<StateSpec> = (0..n)
            .map(|i| StateSpec {
                name: names[i].clone(),
                labels: ap_names.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect(),
                edges: dir_names
                    .iter()
                    .map(|d| (d.clone(), names[rng.gen_range(1..n)].clone()))
                    .collect(),
            })
            .collect();
        if let Ok(ks) = KripkeStructure::new(ap_names.clone(), dir_names.clone(), specs, "s0") {
            return ks;
        }
    }
}

/// A body of nesting depth at most `depth` over `atoms`, using every operator
/// of the grammar.
pub fn random_body<R: Rng>(rng: &mut R, depth: usize, atoms: &[IndexedAp]) -> Ltl {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..10) {
            0 => Ltl::True,
            1 => Ltl::False,
            _ => Ltl::Atom(atoms[rng.gen_range(0..atoms.len())].clone()),
        };
    }
    let sub = |rng: &mut R| Box::new(random_body(rng, depth - 1, atoms));
    match rng.gen_range(0..11) {
        0 => Ltl::Not(sub(rng)),
        1 => Ltl::And(sub(rng), sub(rng)),
        2 => Ltl::Or(sub(rng), sub(rng)),
        3 => Ltl::Implies(sub(rng), sub(rng)),
        4 => Ltl::Iff(sub(rng), sub(rng)),
        5 => Ltl::Next(sub(rng)),
        6 => Ltl::Until(sub(rng), sub(rng)),
        7 => Ltl::Release(sub(rng), sub(rng)),
        8 => Ltl::Eventually(sub(rng)),
        9 => Ltl::Globally(sub(rng)),
        _ => Ltl::Not(sub(rng)),
    }
}

/// Trace variables `p1..pn` for `prefix` and a random body over every
/// proposition of `aps` on every variable.
pub fn random_formula<R: Rng>(rng: &mut R, prefix: &[Quantifier], aps: &[String], depth: usize) -> HyperLtl {
    let vars: Vec<String> = (1..=prefix.len()).map(|i| format!("p{i}")).collect();
    let atoms: Vec<IndexedAp> = vars
        .iter()
        .flat_map(|v| aps.iter().map(move |a| IndexedAp::new(a.clone(), v.clone())))
        .collect();
    let body = random_body(rng, depth, &atoms);
    HyperLtl::new(prefix.iter().copied().zip(vars).collect(), body).expect("variables are distinct")
}

/// A lasso word over letters of `bits` bits.
pub fn random_word<R: Rng>(rng: &mut R, bits: u32, max_stem: usize, max_loop: usize) -> UpWord<u64> {
    let letter = |rng: &mut R| rng.gen_range(0..1u64 << bits);
    let stem = (0..rng.gen_range(0..=max_stem)).map(|_| letter(rng)).collect();
    let cycle = (0..rng.gen_range(1..=max_loop)).map(|_| letter(rng)).collect();
    UpWord::new(stem, cycle)
}
