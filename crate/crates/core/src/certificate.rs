//! Coalition strategy profiles: text format and an independent checker.
//!
//! A player's strategy is a Mealy machine over its observation classes. At a
//! vertex `v` with memory `m` the player, if it is its turn, plays
//! `output(m, obs(v))`; afterwards its memory becomes `update(m, obs(v))`,
//! where a missing update entry leaves the memory unchanged.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::arena::{MpgGame, ParityArena};
use crate::automata::tarjan;
use crate::model::DirId;

pub const CERT_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "hypergame-certificate";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlayerStrategy {
    pub player: usize,
    pub memory: u32,
    pub initial: u32,
    /// `(memory, rendered observation class) -> direction name`.
    pub output: BTreeMap<(u32, String), String>,
    /// `(memory, rendered observation class) -> memory`.
    pub update: BTreeMap<(u32, String), u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StrategyProfile {
    pub game_hash: String,
    pub formula: String,
    /// Prophecy manifest lines, empty without prophecies.
    pub manifest: Vec<String>,
    pub players: Vec<PlayerStrategy>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("certificate is for game {found}, expected {expected}")]
    HashMismatch { expected: String, found: String },
    #[error("player {player}: '{direction}' is not a direction of the model")]
    IllegalDirection { player: usize, direction: String },
    #[error("player {player}: '{class}' is not an observation class of the player")]
    UnknownClass { player: usize, class: String },
    #[error("player {player}: memory value {value} out of range")]
    MemoryRange { player: usize, value: u32 },
    #[error("profile covers players {found:?}, the coalition is {expected:?}")]
    Coalition { expected: Vec<usize>, found: Vec<usize> },
    #[error("player {player} has no move for memory {memory} at '{class}'")]
    CoverageGap {
        player: usize,
        memory: u32,
        class: String,
    },
    #[error("strategy product exceeds {0} states")]
    TooLarge(usize),
}

pub fn export_profile(sp: &StrategyProfile) -> String {
    let mut s = String::new();
    writeln!(s, "{MAGIC} {CERT_FORMAT_VERSION}").unwrap();
    writeln!(s, "game-hash {}", sp.game_hash).unwrap();
    writeln!(s, "formula {}", sp.formula).unwrap();
    for line in &sp.manifest {
        writeln!(s, "prophecy {line}").unwrap();
    }
    for p in &sp.players {
        writeln!(s, "player {} memory {} initial {}", p.player, p.memory, p.initial).unwrap();
        for ((m, c), d) in &p.output {
            writeln!(s, "  out {m} {c} -> {d}").unwrap();
        }
        for ((m, c), t) in &p.update {
            writeln!(s, "  upd {m} {c} -> {t}").unwrap();
        }
        writeln!(s, "end").unwrap();
    }
    s
}

fn squash(words: &[&str]) -> String {
    words.concat()
}

/// Parses a certificate without reference to a game.
pub fn parse_profile(text: &str) -> Result<StrategyProfile, CertificateError> {
    let mut sp = StrategyProfile::default();
    let mut cur: Option<PlayerStrategy> = None;
    let mut saw_magic = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: &str| CertificateError::Syntax {
            line,
            message: message.to_string(),
        };
        let words: Vec<&str> = raw.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        let num = |w: &str| w.parse::<u32>().map_err(|_| err(&format!("expected a number, found '{w}'")));
        if !saw_magic {
            if words.len() != 2 || words[0] != MAGIC {
                return Err(err("missing certificate header"));
            }
            if num(words[1])? != CERT_FORMAT_VERSION {
                return Err(err("unsupported certificate format version"));
            }
            saw_magic = true;
            continue;
        }
        match (words[0], cur.as_mut()) {
            ("game-hash", None) if words.len() == 2 => sp.game_hash = words[1].to_string(),
            ("formula", None) => sp.formula = words[1..].join(" "),
            ("prophecy", None) => sp.manifest.push(words[1..].join(" ")),
            ("player", None) => {
                if words.len() != 6 || words[2] != "memory" || words[4] != "initial" {
                    return Err(err("expected 'player <p> memory <n> initial <m>'"));
                }
                let player = num(words[1])? as usize;
                let memory = num(words[3])?;
                let initial = num(words[5])?;
                if memory == 0 || initial >= memory {
                    return Err(err("memory must be positive and contain the initial value"));
                }
                cur = Some(PlayerStrategy {
                    player,
                    memory,
                    initial,
                    ..Default::default()
                });
            }
            (kind @ ("out" | "upd"), Some(p)) => {
                let arrow = words
                    .iter()
                    .position(|&w| w == "->")
                    .ok_or_else(|| err("missing '->'"))?;
                if arrow < 3 || arrow + 2 != words.len() {
                    return Err(err("expected '<memory> <class> -> <target>'"));
                }
                let m = num(words[1])?;
                let class = squash(&words[2..arrow]);
                let target = words[arrow + 1];
                let key = (m, class);
                let dup = if kind == "out" {
                    p.output.insert(key, target.to_string()).is_some()
                } else {
                    p.update.insert(key, num(target)?).is_some()
                };
                if dup {
                    return Err(err("duplicate table entry"));
                }
            }
            ("end", Some(_)) => sp.players.push(cur.take().unwrap()),
            _ => return Err(err(&format!("unexpected '{}'", words[0]))),
        }
    }
    if !saw_magic {
        return Err(CertificateError::Syntax {
            line: 1,
            message: "missing certificate header".into(),
        });
    }
    if cur.is_some() {
        return Err(CertificateError::Syntax {
            line: text.lines().count(),
            message: "missing 'end'".into(),
        });
    }
    Ok(sp)
}

/// Parses and validates a certificate against `g`.
pub fn import_profile(text: &str, g: &MpgGame) -> Result<StrategyProfile, CertificateError> {
    let sp = parse_profile(text)?;
    validate(&sp, g)?;
    Ok(sp)
}

/// Hash, coalition, directions, classes and memory ranges.
pub fn validate(sp: &StrategyProfile, g: &MpgGame) -> Result<(), CertificateError> {
    let expected = g.hash();
    if sp.game_hash != expected {
        return Err(CertificateError::HashMismatch {
            expected,
            found: sp.game_hash.clone(),
        });
    }
    let found: Vec<usize> = sp.players.iter().map(|p| p.player).collect();
    if found != g.coalition() {
        return Err(CertificateError::Coalition {
            expected: g.coalition().to_vec(),
            found,
        });
    }
    for p in &sp.players {
        let known: HashMap<String, ()> = g
            .classes(p.player)
            .iter()
            .map(|c| (c.render(g.ks()), ()))
            .collect();
        let check_key = |m: u32, c: &String| {
            if m >= p.memory {
                return Err(CertificateError::MemoryRange {
                    player: p.player,
                    value: m,
                });
            }
            if !known.contains_key(c) {
                return Err(CertificateError::UnknownClass {
                    player: p.player,
                    class: c.clone(),
                });
            }
            Ok(())
        };
        for ((m, c), d) in &p.output {
            check_key(*m, c)?;
            if g.ks().dir_id(d).is_none() {
                return Err(CertificateError::IllegalDirection {
                    player: p.player,
                    direction: d.clone(),
                });
            }
        }
        for ((m, c), t) in &p.update {
            check_key(*m, c)?;
            if *t >= p.memory {
                return Err(CertificateError::MemoryRange {
                    player: p.player,
                    value: *t,
                });
            }
        }
    }
    Ok(())
}

/// A reachable play prefix followed by a cycle whose least color is odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddLasso {
    pub color: u32,
    pub stem: Vec<String>,
    pub cycle: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass { product_states: usize },
    Fail(OddLasso),
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CheckOutcome::Pass { .. })
    }
}

/// Product state limit for checking.
pub const MAX_PRODUCT: usize = 50_000_000;

struct Tables {
    /// Per coalition player: `memory * classes + class -> direction`.
    output: Vec<Vec<u32>>,
    update: Vec<Vec<u32>>,
    classes: Vec<usize>,
    initial: Vec<u32>,
}

const NONE: u32 = u32::MAX;

fn compile(sp: &StrategyProfile, g: &MpgGame) -> Tables {
    let mut t = Tables {
        output: vec![],
        update: vec![],
        classes: vec![],
        initial: vec![],
    };
    for p in &sp.players {
        let index: HashMap<String, usize> = g
            .classes(p.player)
            .iter()
            .enumerate()
            .map(|(i, c)| (c.render(g.ks()), i))
            .collect();
        let nc = index.len();
        let size = p.memory as usize * nc;
        let mut out = vec![NONE; size];
        let mut upd: Vec<u32> = (0..size).map(|i| (i / nc) as u32).collect();
        for ((m, c), d) in &p.output {
            out[*m as usize * nc + index[c]] = g.ks().dir_id(d).unwrap().0;
        }
        for ((m, c), x) in &p.update {
            upd[*m as usize * nc + index[c]] = *x;
        }
        t.output.push(out);
        t.update.push(upd);
        t.classes.push(nc);
        t.initial.push(p.initial);
    }
    t
}

/// Decides whether every play consistent with `sp` has an even least
/// recurring color.
pub fn check_profile(g: &MpgGame, sp: &StrategyProfile) -> Result<CheckOutcome, CertificateError> {
    validate(sp, g)?;
    let t = compile(sp, g);
    let coalition = g.coalition();
    let k = coalition.len();
    let nd = g.num_directions();

    let mut ids: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
    let mut nodes: Vec<(u32, Vec<u32>)> = Vec::new();
    let mut succ: Vec<Vec<u32>> = Vec::new();
    let mut parent: Vec<u32> = Vec::new();
    let start = (g.initial() as u32, t.initial.clone());
    ids.insert(start.clone(), 0);
    nodes.push(start);
    parent.push(NONE);
    let mut queue = VecDeque::from([0u32]);
    while let Some(x) = queue.pop_front() {
        let (v, mem) = nodes[x as usize].clone();
        let v = v as usize;
        let turn = g.turn(v);
        let mut next_mem = mem.clone();
        let mut dirs: Vec<usize> = (0..nd).collect();
        for (i, &p) in coalition.iter().enumerate() {
            let slot = mem[i] as usize * t.classes[i] + g.obs_id(v, p) as usize;
            next_mem[i] = t.update[i][slot];
            if p == turn {
                let d = t.output[i][slot];
                if d == NONE {
                    return Err(CertificateError::CoverageGap {
                        player: p,
                        memory: mem[i],
                        class: g.observation_class(v, p).render(g.ks()),
                    });
                }
                dirs = vec![d as usize];
            }
        }
        let mut out = Vec::with_capacity(dirs.len());
        for d in dirs {
            let key = (g.successor(v, d) as u32, next_mem.clone());
            let y = match ids.get(&key) {
                Some(&y) => y,
                None => {
                    let y = nodes.len() as u32;
                    if nodes.len() >= MAX_PRODUCT {
                        return Err(CertificateError::TooLarge(MAX_PRODUCT));
                    }
                    ids.insert(key.clone(), y);
                    nodes.push(key);
                    parent.push(x);
                    queue.push_back(y);
                    y
                }
            };
            if !out.contains(&y) {
                out.push(y);
            }
        }
        succ.push(out);
    }
    debug_assert_eq!(k, t.initial.len());

    let n = nodes.len();
    let color = |x: usize| g.color(nodes[x].0 as usize);
    let mut odd: Vec<u32> = (0..n).map(color).filter(|c| c % 2 == 1).collect();
    odd.sort_unstable();
    odd.dedup();
    for c in odd {
        let keep_v: Vec<bool> = (0..n).map(|x| color(x) >= c).collect();
        let keep = &keep_v;
        let comps = tarjan(n, |x| {
            let ok = keep[x];
            succ[x]
                .iter()
                .map(|&y| y as usize)
                .filter(move |&y| ok && keep[y])
                .collect::<Vec<_>>()
                .into_iter()
        });
        let mut comp_of = vec![usize::MAX; n];
        for (i, comp) in comps.iter().enumerate() {
            for &x in comp {
                comp_of[x] = i;
            }
        }
        for comp in &comps {
            let Some(&hit) = comp.iter().find(|&&x| keep[x] && color(x) == c) else {
                continue;
            };
            let cid = comp_of[hit];
            let cyclic = comp.len() > 1 || succ[hit].contains(&(hit as u32));
            if !cyclic {
                continue;
            }
            let cycle = cycle_through(hit, |x| {
                succ[x]
                    .iter()
                    .map(|&y| y as usize)
                    .filter(|&y| keep[y] && comp_of[y] == cid)
                    .collect()
            });
            let mut stem = Vec::new();
            let mut x = parent[hit];
            while x != NONE {
                stem.push(x as usize);
                x = parent[x as usize];
            }
            stem.reverse();
            let render = |xs: &[usize]| -> Vec<String> {
                xs.iter().map(|&x| g.render_vertex(nodes[x].0 as usize)).collect()
            };
            return Ok(CheckOutcome::Fail(OddLasso {
                color: c,
                stem: render(&stem),
                cycle: render(&cycle),
            }));
        }
    }
    Ok(CheckOutcome::Pass { product_states: n })
}

/// Shortest cycle from `x` back to itself inside one component.
fn cycle_through(x: usize, succ: impl Fn(usize) -> Vec<usize>) -> Vec<usize> {
    let mut prev: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::from([x]);
    while let Some(y) = queue.pop_front() {
        for z in succ(y) {
            if z == x {
                let mut path = vec![y];
                let mut w = y;
                while w != x {
                    w = prev[&w];
                    path.push(w);
                }
                path.reverse();
                return path;
            }
            if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(z) {
                e.insert(y);
                queue.push_back(z);
            }
        }
    }
    vec![x]
}

impl StrategyProfile {
    /// Profile header for `g` with no players filled in.
    pub fn for_game(g: &MpgGame, manifest: Vec<String>) -> StrategyProfile {
        StrategyProfile {
            game_hash: g.hash(),
            formula: g.formula().to_string(),
            manifest,
            players: vec![],
        }
    }

    pub fn player(&self, p: usize) -> Option<&PlayerStrategy> {
        self.players.iter().find(|s| s.player == p)
    }
}

impl PlayerStrategy {
    /// Direction name played with memory `memory` at the rendered class.
    pub fn choice(&self, memory: u32, class: &str) -> Option<&str> {
        self.output.get(&(memory, class.to_string())).map(String::as_str)
    }

    pub fn next_memory(&self, memory: u32, class: &str) -> u32 {
        self.update.get(&(memory, class.to_string())).copied().unwrap_or(memory)
    }

    pub fn set_output(&mut self, g: &MpgGame, memory: u32, class: u32, dir: DirId) {
        let c = g.classes(self.player)[class as usize].render(g.ks());
        self.output.insert((memory, c), g.ks().dir_name(dir).to_string());
    }

    pub fn set_update(&mut self, g: &MpgGame, memory: u32, class: u32, target: u32) {
        let c = g.classes(self.player)[class as usize].render(g.ks());
        if target == memory {
            self.update.remove(&(memory, c));
        } else {
            self.update.insert((memory, c), target);
        }
    }
}
