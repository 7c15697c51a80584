//! Conjunction and disjunction of parity automata when one operand uses at
//! most two colors.

use super::{AutomataError, Dpa, Explorer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BoolOp {
    And,
    Or,
}

impl BoolOp {
    fn dual(self) -> BoolOp {
        match self {
            BoolOp::And => BoolOp::Or,
            BoolOp::Or => BoolOp::And,
        }
    }
}

/// Colors within `{0, 1}`.
fn is_buchi(d: &Dpa) -> bool {
    d.colors().iter().all(|&c| c <= 1)
}

/// Colors within `{1, 2}`.
fn is_co_buchi(d: &Dpa) -> bool {
    d.colors().iter().all(|&c| (1..=2).contains(&c))
}

fn shift_down(d: &Dpa, by: u32) -> Dpa {
    let nl = d.num_letters();
    let mut trans = Vec::with_capacity(d.num_states() * nl);
    for q in 0..d.num_states() as u32 {
        for l in 0..nl {
            trans.push(d.step(q, l as u64));
        }
    }
    Dpa::new(
        d.alphabet().to_vec(),
        d.initial(),
        trans,
        d.colors().iter().map(|c| c - by).collect(),
    )
}

/// `a op b` over a shared alphabet; `None` when neither side has two colors.
pub(crate) fn combine(a: &Dpa, b: &Dpa, op: BoolOp) -> Result<Option<Dpa>, AutomataError> {
    debug_assert_eq!(a.alphabet(), b.alphabet());
    if is_buchi(b) {
        return Ok(Some(with_buchi(a, b, op)?));
    }
    if is_buchi(a) {
        return Ok(Some(with_buchi(b, a, op)?));
    }
    // A co-Büchi side becomes Büchi under complement.
    if is_co_buchi(b) {
        let nb = shift_down(&b.complement(), 2);
        return Ok(Some(with_buchi(&a.complement(), &nb, op.dual())?.complement()));
    }
    if is_co_buchi(a) {
        let na = shift_down(&a.complement(), 2);
        return Ok(Some(with_buchi(&b.complement(), &na, op.dual())?.complement()));
    }
    Ok(None)
}

/// `b` must use colors `{0, 1}` only.
///
/// For a disjunction the product shows `0` whenever `b` does and the color of
/// `a` lifted by two otherwise. For a conjunction the product remembers the
/// least color of `a` since `b` last showed `0` and emits it at the next such
/// visit, showing a large odd color in between.
fn with_buchi(a: &Dpa, b: &Dpa, op: BoolOp) -> Result<Dpa, AutomataError> {
    let nl = a.num_letters();
    const NONE: u32 = u32::MAX;
    let big_odd = (a.max_color() + 1) | 1;
    let mut ex: Explorer<(u32, u32, u32)> = Explorer::new();
    ex.intern((a.initial(), b.initial(), NONE))?;
    let mut trans: Vec<u32> = Vec::new();
    let mut colors: Vec<u32> = Vec::new();
    while let Some(s) = ex.queue.pop_front() {
        let (qa, qb, m) = ex.keys[s as usize];
        let (ca, cb) = (a.color(qa), b.color(qb));
        let (color, next_m) = match op {
            BoolOp::Or => (if cb == 0 { 0 } else { ca + 2 }, NONE),
            BoolOp::And => {
                let seen = m.min(ca);
                if cb == 0 {
                    (seen, NONE)
                } else {
                    (big_odd, seen)
                }
            }
        };
        if colors.len() <= s as usize {
            colors.resize(s as usize + 1, 0);
            trans.resize((s as usize + 1) * nl, 0);
        }
        colors[s as usize] = color;
        for l in 0..nl {
            let t = ex.intern((a.step(qa, l as u64), b.step(qb, l as u64), next_m))?;
            trans[s as usize * nl + l] = t;
        }
    }
    let n = ex.keys.len();
    colors.resize(n, 0);
    trans.resize(n * nl, 0);
    Ok(Dpa::new(a.alphabet().to_vec(), 0, trans, colors))
}
