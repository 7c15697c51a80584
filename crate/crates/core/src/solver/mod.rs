//! Verdicts for model-checking queries, and the dispatcher choosing a method
//! from the quantifier prefix.

mod bounded;
mod exists_forall;
mod zielonka;

use std::fmt;

use thiserror::Error;

use crate::arena::{
    build_full_info_game, build_mpg, build_two_player_game, ArenaError, MpgGame, ParityArena, Side,
    TwoPlayerGame,
};
use crate::automata::{body_dpa, AutomataError, Dpa};
use crate::certificate::{PlayerStrategy, StrategyProfile};
use crate::logic::{negate_hyperltl, HyperLtl};
use crate::model::{DirId, KripkeStructure};

pub use bounded::{solve_bounded_coalition, BoundedOptions};
pub use exists_forall::{exists_forall_witness, find_accepting_lasso, solve_exists_forall, DirectionLasso};
pub use zielonka::{solve_zielonka, ZielonkaSolution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("unsupported quantifier prefix: {0}")]
    Prefix(String),
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("observations are not hierarchical")]
    NotHierarchical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Proven,
    Disproven,
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Proven => "proven",
            Outcome::Disproven => "disproven",
            Outcome::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Zielonka on the verifier/refuter game.
    TwoPlayerZielonka,
    /// Zielonka on the multiplayer game with every player fully informed.
    FullInformationZielonka,
    ExistsForall,
    /// The negated formula decided by the exists-forall procedure.
    NegatedExistsForall,
    BoundedCoalition,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::TwoPlayerZielonka => "two-player game, Zielonka",
            Method::FullInformationZielonka => "full-information game, Zielonka",
            Method::ExistsForall => "exists-forall determinization",
            Method::NegatedExistsForall => "exists-forall determinization on the negation",
            Method::BoundedCoalition => "bounded-memory coalition search",
        })
    }
}

/// What a verdict says about `K ⊨ φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Guarantee {
    /// The outcome is the truth value of `K ⊨ φ`.
    Semantic,
    /// The outcome is the winner of the game; a win implies `K ⊨ φ`, a loss
    /// implies nothing.
    GameLevel,
    /// The outcome is the winner of the full-information game, which implies
    /// nothing about `K ⊨ φ`.
    FullInformationGame,
}

impl fmt::Display for Guarantee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Guarantee::Semantic => "semantic (exact for K |= phi)",
            Guarantee::GameLevel => "game-level (a win implies K |= phi, a loss is inconclusive)",
            Guarantee::FullInformationGame => {
                "full-information game only (not sound for K |= phi)"
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundInfo {
    pub memory_bound: u32,
    pub budget: u64,
    pub evaluations: u64,
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub method: Method,
    pub guarantee: Guarantee,
    pub bound: Option<BoundInfo>,
    /// Coalition profile for the partial-information game of the checked
    /// formula (or the full-information game under that method).
    pub witness: Option<StrategyProfile>,
    /// Winner of the game when determined: `Some(true)` when the coalition
    /// wins.
    pub game_won: Option<bool>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn new(outcome: Outcome, method: Method, guarantee: Guarantee) -> Verdict {
        Verdict {
            outcome,
            method,
            guarantee,
            bound: None,
            witness: None,
            game_won: None,
            notes: vec![],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Auto,
    Zielonka,
    ExistsForall,
    Bounded,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub mode: Mode,
    pub bounded: BoundedOptions,
    /// Prophecy manifest lines embedded in certificates.
    pub manifest: Vec<String>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            mode: Mode::Auto,
            bounded: BoundedOptions::default(),
            manifest: vec![],
        }
    }
}

/// Profile for player 2 of the partial-information game read off a
/// positional strategy of the two-player game. Player 2's memory tracks the
/// automaton state, which it can follow since it sees both copies.
pub fn tracker_profile(
    g2: &TwoPlayerGame,
    sol: &ZielonkaSolution,
    mpg: &MpgGame,
    manifest: Vec<String>,
) -> StrategyProfile {
    let mut sp = StrategyProfile::for_game(mpg, manifest);
    let dpa = g2.dpa();
    let mut ps = PlayerStrategy {
        player: 2,
        memory: dpa.num_states() as u32,
        initial: dpa.initial(),
        ..Default::default()
    };
    for v in 0..mpg.num_vertices() {
        let x = mpg.vertex(v);
        let class = mpg.obs_id(v, 2);
        match x.turn {
            1 => {
                let letter = mpg.binding().letter_of_states(mpg.ks(), x.states);
                ps.set_update(mpg, x.q, class, dpa.step(x.q, letter));
            }
            _ => {
                let u = g2.index(x.states[0], x.states[1], x.q, Side::Verifier);
                ps.set_output(mpg, x.q, class, DirId(sol.strategy[u]));
            }
        }
    }
    sp.players.push(ps);
    sp
}

/// Memoryless profile for the full-information game.
fn full_info_profile(g: &MpgGame, sol: &ZielonkaSolution, manifest: Vec<String>) -> StrategyProfile {
    let mut sp = StrategyProfile::for_game(g, manifest);
    for &p in g.coalition() {
        let mut ps = PlayerStrategy {
            player: p,
            memory: 1,
            initial: 0,
            ..Default::default()
        };
        for v in 0..g.num_vertices() {
            if g.turn(v) == p {
                ps.set_output(g, 0, g.obs_id(v, p), DirId(sol.strategy[v]));
            }
        }
        sp.players.push(ps);
    }
    sp
}

fn solve_two_player(
    ks: &KripkeStructure,
    f: &HyperLtl,
    a: &Dpa,
    manifest: &[String],
) -> Result<Verdict, SolverError> {
    let g2 = build_two_player_game(ks, f, a)?;
    let sol = solve_zielonka(&g2);
    let won = sol.even_wins[g2.initial()];
    let mut v = Verdict::new(
        if won {
            Outcome::Proven
        } else {
            Outcome::Disproven
        },
        Method::TwoPlayerZielonka,
        Guarantee::GameLevel,
    );
    v.game_won = Some(won);
    if won {
        let mpg = build_mpg(ks, f, a)?;
        v.witness = Some(tracker_profile(&g2, &sol, &mpg, manifest.to_vec()));
    }
    Ok(v)
}

fn solve_full_info(
    ks: &KripkeStructure,
    f: &HyperLtl,
    a: &Dpa,
    manifest: &[String],
) -> Result<Verdict, SolverError> {
    let g = build_full_info_game(ks, f, a)?;
    let sol = solve_zielonka(&g);
    let won = sol.even_wins[g.initial()];
    let mut v = Verdict::new(
        if won {
            Outcome::Proven
        } else {
            Outcome::Disproven
        },
        Method::FullInformationZielonka,
        Guarantee::FullInformationGame,
    );
    v.game_won = Some(won);
    if won {
        v.witness = Some(full_info_profile(&g, &sol, manifest.to_vec()));
    }
    Ok(v)
}

/// `K ⊨ φ` through `K ⊭ ¬φ`, where `¬φ` has an `∃*∀*` prefix.
fn solve_by_negation(ks: &KripkeStructure, f: &HyperLtl) -> Result<Verdict, SolverError> {
    let neg = negate_hyperltl(f);
    let a = body_dpa(&neg.body)?;
    let witness = exists_forall_witness(ks, &neg, &a)?;
    let mut v = Verdict::new(
        if witness.is_some() {
            Outcome::Disproven
        } else {
            Outcome::Proven
        },
        Method::NegatedExistsForall,
        Guarantee::Semantic,
    );
    if let Some(l) = witness {
        v.notes.push(format!(
            "the negation holds: counterexample paths with a stem of {} and a loop of {} steps",
            l.stem.len(),
            l.cycle.len()
        ));
    }
    Ok(v)
}

pub fn solve(ks: &KripkeStructure, f: &HyperLtl, opts: &SolveOptions) -> Result<Verdict, SolverError> {
    let a = body_dpa(&f.body)?;
    let manifest = &opts.manifest;
    match opts.mode {
        Mode::Zielonka => {
            if f.is_forall_exists_pair() {
                solve_two_player(ks, f, &a, manifest)
            } else {
                solve_full_info(ks, f, &a, manifest)
            }
        }
        Mode::ExistsForall => {
            if f.is_exists_forall() {
                exists_forall::solve_exists_forall_with(ks, f, &a, manifest.clone())
            } else if f.is_forall_exists() {
                solve_by_negation(ks, f)
            } else {
                Err(SolverError::Prefix(
                    "exists-forall mode needs an exists*forall* or forall*exists* prefix".into(),
                ))
            }
        }
        Mode::Bounded => {
            let g = build_mpg(ks, f, &a)?;
            solve_bounded_coalition(&g, &opts.bounded, manifest.clone())
        }
        Mode::Auto => {
            if f.is_forall_exists_pair() {
                let v = solve_two_player(ks, f, &a, manifest)?;
                if v.outcome == Outcome::Proven {
                    let mut v = v;
                    v.guarantee = Guarantee::Semantic;
                    return Ok(v);
                }
                let mut exact = solve_by_negation(ks, f)?;
                exact.game_won = Some(false);
                exact
                    .notes
                    .insert(0, "the verifier loses the two-player game".into());
                Ok(exact)
            } else if f.is_exists_forall() {
                exists_forall::solve_exists_forall_with(ks, f, &a, manifest.clone())
            } else if f.is_forall_exists() {
                solve_by_negation(ks, f)
            } else {
                let g = build_mpg(ks, f, &a)?;
                let mut v = solve_bounded_coalition(&g, &opts.bounded, manifest.clone())?;
                if v.outcome == Outcome::Proven {
                    v.guarantee = Guarantee::Semantic;
                }
                Ok(v)
            }
        }
    }
}
