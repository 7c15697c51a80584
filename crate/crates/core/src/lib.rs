//! Game-based model checking of HyperLTL on finite Kripke structures.
//!
//! The pipeline compiles the quantifier-free body of a formula into a
//! deterministic parity automaton, composes it with one copy of the system per
//! trace variable into a multiplayer parity game under partial information,
//! and solves that game for the coalition of existentially quantified copies.
//! Winning coalition strategies are exported as certificates that can be
//! checked without the solver.

pub mod arena;
pub mod automata;
pub mod gen;
pub mod certificate;
pub mod logic;
pub mod model;
pub mod oracle;
pub mod prophecy;
pub mod session;
pub mod solver;
pub mod text;
pub mod word;

pub use logic::{
    eval_body_on_lassos, indexed_aps, negate_hyperltl, parse_hyperltl, parse_ltl, HyperLtl,
    IndexedAp, Ltl, Quantifier,
};
pub use model::{parse_ks, render_ks, DirId, KripkeStructure, Lasso, StateId};
pub use word::UpWord;

/// Versions of the accepted file grammars.
pub const FORMAT_VERSIONS: &[(&str, &str)] = &[
    ("model", "1"),
    ("formula", "1"),
    ("prophecy", "1"),
    ("certificate", "1"),
    ("automaton", "HOA v1"),
];
