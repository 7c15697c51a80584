//! Interactive plays of the multiplayer game.
//!
//! Human players see only their observation class; every other player is
//! driven by a policy. Infinite plays are cut after a horizon and judged by
//! the least color on the last cycle of repeated vertices.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arena::{build_mpg, MpgGame, ParityArena};
use crate::automata::body_dpa;
use crate::certificate::{import_profile, StrategyProfile};
use crate::logic::HyperLtl;
use crate::model::{DirId, KripkeStructure};
use crate::prophecy::{parse_prophecy_family, with_prophecies, ProphecyFamily};
use crate::solver::{solve_zielonka, ZielonkaSolution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SessionError {
    #[error("{0}")]
    Setup(String),
    #[error("player {0} is not a human player of this session")]
    NotHuman(usize),
    #[error("it is player {turn}'s turn, not player {player}'s")]
    NotYourTurn { player: usize, turn: usize },
    #[error("'{0}' is not a direction of the model")]
    IllegalDirection(String),
    #[error("the play is over")]
    Finished,
    #[error("no engine policy configured for this session")]
    NoPolicy,
    #[error("the strategy has no move for player {player} at {class}")]
    NoMove { player: usize, class: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OpponentPolicy {
    #[default]
    Random,
    /// Spoils with a strategy of the full-information game where it can.
    Adversarial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnginePolicy {
    Random,
    /// Certificate text for the session's game.
    Certificate(String),
}

#[derive(Debug, Clone)]
pub struct SessionOptions {
    /// Prophecy family text (`at <index>: <ltl>` lines).
    pub prophecies: Option<String>,
    pub human_players: Vec<usize>,
    pub opponent: OpponentPolicy,
    /// Plays for coalition players without a human and on request for
    /// humans. Automated coalition players fall back to random play.
    pub engine: Option<EnginePolicy>,
    pub seed: u64,
    /// Number of moves after which the play is cut.
    pub horizon: usize,
}

impl Default for SessionOptions {
    fn default() -> Self {
        SessionOptions {
            prophecies: None,
            human_players: vec![],
            opponent: OpponentPolicy::Random,
            engine: None,
            seed: 0,
            horizon: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub step: usize,
    pub round: usize,
    pub player: usize,
    /// The mover's observation class.
    pub class: String,
    pub direction: String,
    /// Chosen by a policy rather than a human.
    pub engine: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CopyView {
    pub copy: usize,
    pub var: String,
    pub state: String,
    pub labels: Vec<String>,
    pub prophecies: BTreeMap<String, bool>,
}

/// What a player may know: its observation class and its own moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct View {
    pub player: usize,
    pub round: usize,
    pub turn: usize,
    pub your_turn: bool,
    pub finished: bool,
    pub class: String,
    pub copies: Vec<CopyView>,
    pub legal: Vec<String>,
    pub transcript: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub finished: bool,
    pub rows: Vec<Row>,
    pub vertices: Vec<String>,
    pub colors: Vec<u32>,
    /// Least color on the last cycle of repeated vertices.
    pub cycle_color: Option<u32>,
    pub coalition_wins: Option<bool>,
}

pub struct Session {
    game: MpgGame,
    family: ProphecyFamily,
    humans: Vec<usize>,
    engine: Option<EnginePolicy>,
    profile: Option<StrategyProfile>,
    adversary: Option<ZielonkaSolution>,
    horizon: usize,
    rng: ChaCha8Rng,
    /// Memory per profile player, advanced at every step.
    memory: Vec<u32>,
    path: Vec<usize>,
    last_seen: HashMap<usize, usize>,
    cycle_color: Option<u32>,
    rows: Vec<Row>,
}

impl Session {
    pub fn new(ks: &KripkeStructure, f: &HyperLtl, opts: SessionOptions) -> Result<Session, SessionError> {
        let setup = |e: &dyn std::fmt::Display| SessionError::Setup(e.to_string());
        let family = match &opts.prophecies {
            Some(text) => parse_prophecy_family(text, f).map_err(|e| setup(&e))?,
            None => ProphecyFamily::default(),
        };
        let (kp, g) = with_prophecies(ks, f, &family).map_err(|e| setup(&e))?;
        let dpa = body_dpa(&g.body).map_err(|e| setup(&e))?;
        let game = build_mpg(&kp, &g, &dpa).map_err(|e| setup(&e))?;
        let mut humans = opts.human_players.clone();
        humans.sort_unstable();
        humans.dedup();
        if let Some(&p) = humans.iter().find(|&&p| !game.in_coalition(p)) {
            return Err(SessionError::Setup(format!(
                "player {p} is not in the coalition {:?}",
                game.coalition()
            )));
        }
        let profile = match &opts.engine {
            Some(EnginePolicy::Certificate(text)) => Some(import_profile(text, &game).map_err(|e| setup(&e))?),
            _ => None,
        };
        let adversary = (opts.opponent == OpponentPolicy::Adversarial).then(|| solve_zielonka(&game));
        let memory = profile.iter().flat_map(|sp| sp.players.iter().map(|p| p.initial)).collect();
        let mut s = Session {
            family,
            humans,
            engine: opts.engine,
            profile,
            adversary,
            horizon: opts.horizon,
            rng: ChaCha8Rng::seed_from_u64(opts.seed),
            memory,
            path: vec![game.initial()],
            last_seen: HashMap::from([(game.initial(), 0)]),
            cycle_color: None,
            rows: vec![],
            game,
        };
        s.advance()?;
        Ok(s)
    }

    pub fn game(&self) -> &MpgGame {
        &self.game
    }

    pub fn prophecies(&self) -> &ProphecyFamily {
        &self.family
    }

    pub fn human_players(&self) -> &[usize] {
        &self.humans
    }

    pub fn vertex(&self) -> usize {
        *self.path.last().unwrap()
    }

    pub fn turn(&self) -> usize {
        self.game.turn(self.vertex())
    }

    pub fn round(&self) -> usize {
        self.rows.len() / self.game.num_players()
    }

    pub fn finished(&self) -> bool {
        self.rows.len() >= self.horizon
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn view(&self, player: usize) -> Result<View, SessionError> {
        if !self.humans.contains(&player) {
            return Err(SessionError::NotHuman(player));
        }
        let g = &self.game;
        let ks = g.ks();
        let v = self.vertex();
        let class = g.observation_class(v, player);
        let vars = g.formula().vars();
        let prophecy_names = self.family.names();
        let copies = class
            .states
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let names = ks.label_names(s);
                CopyView {
                    copy: i + 1,
                    var: vars[i].to_string(),
                    state: ks.state_name(s).to_string(),
                    labels: names
                        .iter()
                        .filter(|n| !prophecy_names.contains(n))
                        .map(|n| n.to_string())
                        .collect(),
                    prophecies: prophecy_names
                        .iter()
                        .map(|&p| (p.to_string(), names.contains(&p)))
                        .collect(),
                }
            })
            .collect();
        let your_turn = self.turn() == player && !self.finished();
        Ok(View {
            player,
            round: self.round(),
            turn: self.turn(),
            your_turn,
            finished: self.finished(),
            class: class.render(ks),
            copies,
            legal: if your_turn {
                ks.directions().to_vec()
            } else {
                vec![]
            },
            transcript: self.rows.iter().filter(|r| r.player == player).cloned().collect(),
        })
    }

    /// A human move followed by automated moves up to the next human turn.
    pub fn apply_move(&mut self, player: usize, direction: &str) -> Result<View, SessionError> {
        self.check_turn(player)?;
        let d = self
            .game
            .ks()
            .dir_id(direction)
            .ok_or_else(|| SessionError::IllegalDirection(direction.to_string()))?;
        self.step(d, false);
        self.advance()?;
        self.view(player)
    }

    /// Lets the engine policy move for a human player.
    pub fn auto_move(&mut self, player: usize) -> Result<View, SessionError> {
        self.check_turn(player)?;
        if self.engine.is_none() {
            return Err(SessionError::NoPolicy);
        }
        let d = self.engine_move(player)?;
        self.step(d, true);
        self.advance()?;
        self.view(player)
    }

    pub fn transcript(&self) -> Transcript {
        let g = &self.game;
        let cycle_color = self.cycle_color;
        Transcript {
            finished: self.finished(),
            rows: self.rows.clone(),
            vertices: self.path.iter().map(|&v| g.render_vertex(v)).collect(),
            colors: self.path.iter().map(|&v| g.color(v)).collect(),
            cycle_color,
            coalition_wins: if self.finished() {
                cycle_color.map(|c| c % 2 == 0)
            } else {
                None
            },
        }
    }

    fn check_turn(&self, player: usize) -> Result<(), SessionError> {
        if !self.humans.contains(&player) {
            return Err(SessionError::NotHuman(player));
        }
        if self.finished() {
            return Err(SessionError::Finished);
        }
        if self.turn() != player {
            return Err(SessionError::NotYourTurn {
                player,
                turn: self.turn(),
            });
        }
        Ok(())
    }

    fn advance(&mut self) -> Result<(), SessionError> {
        while !self.finished() && !self.humans.contains(&self.turn()) {
            let p = self.turn();
            let d = if self.game.in_coalition(p) {
                self.engine_move(p)?
            } else {
                self.opponent_move()
            };
            self.step(d, true);
        }
        Ok(())
    }

    fn random_direction(&mut self) -> DirId {
        DirId(self.rng.gen_range(0..self.game.num_directions() as u32))
    }

    fn opponent_move(&mut self) -> DirId {
        let v = self.vertex();
        match &self.adversary {
            Some(sol) if !sol.even_wins[v] => DirId(sol.strategy[v]),
            _ => self.random_direction(),
        }
    }

    fn engine_move(&mut self, player: usize) -> Result<DirId, SessionError> {
        let Some(sp) = &self.profile else {
            return Ok(self.random_direction());
        };
        let g = &self.game;
        let class = g.observation_class(self.vertex(), player).render(g.ks());
        let (i, ps) = sp
            .players
            .iter()
            .enumerate()
            .find(|(_, ps)| ps.player == player)
            .ok_or(SessionError::NoPolicy)?;
        let name = ps.choice(self.memory[i], &class).ok_or_else(|| SessionError::NoMove {
            player,
            class: class.clone(),
        })?;
        Ok(g.ks().dir_id(name).expect("certificate directions are validated"))
    }

    fn step(&mut self, d: DirId, engine: bool) {
        let v = self.vertex();
        let round = self.round();
        let g = &self.game;
        let player = g.turn(v);
        if let Some(sp) = &self.profile {
            for (i, ps) in sp.players.iter().enumerate() {
                let class = g.observation_class(v, ps.player).render(g.ks());
                self.memory[i] = ps.next_memory(self.memory[i], &class);
            }
        }
        self.rows.push(Row {
            step: self.rows.len(),
            round,
            player,
            class: g.observation_class(v, player).render(g.ks()),
            direction: g.ks().dir_name(d).to_string(),
            engine,
        });
        let w = g.successor(v, d.index());
        let t = self.path.len();
        if let Some(&t0) = self.last_seen.get(&w) {
            self.cycle_color = self.path[t0..].iter().map(|&x| g.color(x)).min();
        }
        self.last_seen.insert(w, t);
        self.path.push(w);
    }
}

/// Final vertex and last cycle color of a play replayed from its rows.
pub fn replay(g: &MpgGame, rows: &[Row]) -> Result<(usize, Option<u32>), SessionError> {
    let mut v = g.initial();
    let mut path = vec![v];
    let mut last_seen = HashMap::from([(v, 0usize)]);
    let mut cycle = None;
    for r in rows {
        if g.turn(v) != r.player {
            return Err(SessionError::NotYourTurn {
                player: r.player,
                turn: g.turn(v),
            });
        }
        let d = g
            .ks()
            .dir_id(&r.direction)
            .ok_or_else(|| SessionError::IllegalDirection(r.direction.clone()))?;
        v = g.successor(v, d.index());
        if let Some(&t0) = last_seen.get(&v) {
            cycle = path[t0..].iter().map(|&x| g.color(x)).min();
        }
        last_seen.insert(v, path.len());
        path.push(v);
    }
    Ok((v, cycle))
}
