//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Time limits are wall clock on the test profile.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hypergame::arena::{build_mpg, build_two_player_game, is_hierarchical, MpgGame, ParityArena};
use hypergame::automata::{body_dpa, complement_dpa, export_hoa, import_hoa};
use hypergame::certificate::{check_profile, export_profile, import_profile};
use hypergame::gen::{random_formula, random_ks, random_word};
use hypergame::logic::BodyEvaluator;
use hypergame::oracle::{oracle_check, LassoBudget};
use hypergame::prophecy::{parse_prophecy_family, with_prophecies};
use hypergame::solver::{
    solve, solve_bounded_coalition, solve_exists_forall, solve_zielonka, BoundedOptions, Guarantee, Method, Mode,
    Outcome, SolveOptions,
};
use hypergame::{parse_hyperltl, parse_ks, HyperLtl, KripkeStructure, Quantifier};

use Quantifier::{Exists as E, Forall as A};

type Check = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn load(ks: &str, f: &str) -> (KripkeStructure, HyperLtl) {
    (parse_ks(&read(ks)).unwrap(), parse_hyperltl(&read(f)).unwrap())
}

fn oracle(ks: &KripkeStructure, f: &HyperLtl, n: usize) -> bool {
    oracle_check(ks, f, LassoBudget::square(n).unwrap())
}

fn mode(m: Mode, memory: u32) -> SolveOptions {
    SolveOptions {
        mode: m,
        bounded: BoundedOptions {
            memory_bound: memory,
            ..Default::default()
        },
        manifest: vec![],
    }
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Games built along the way, for the hierarchy criterion.
#[derive(Default)]
struct Games(Vec<(String, MpgGame)>);

fn shifted_witness() -> Check {
    let (ks, f) = load("branching.ks", "shifted_witness.hltl");
    let full = solve(&ks, &f, &mode(Mode::Zielonka, 1)).map_err(|e| e.to_string())?;
    ensure(
        full.outcome == Outcome::Proven && full.guarantee == Guarantee::FullInformationGame,
        format!("full-information game: {:?} {:?}", full.outcome, full.guarantee),
    )?;
    for n in [4, 5] {
        ensure(!oracle(&ks, &f, n), format!("oracle true at {n}/{n}"))?;
    }
    let v = solve(&ks, &f, &SolveOptions::default()).map_err(|e| e.to_string())?;
    ensure(
        v.outcome == Outcome::Disproven && v.guarantee == Guarantee::Semantic,
        format!("auto: {:?} {:?}", v.outcome, v.guarantee),
    )?;
    Ok("full-information game won, oracle false at 4/4 and 5/5, auto disproves exactly".into())
}

fn incompleteness() -> Check {
    let (ks, f) = load("branching.ks", "predict_next.hltl");
    for n in [4, 5] {
        ensure(oracle(&ks, &f, n), format!("predict_next: oracle false at {n}/{n}"))?;
    }
    let z = solve(&ks, &f, &mode(Mode::Zielonka, 1)).map_err(|e| e.to_string())?;
    ensure(
        z.method == Method::TwoPlayerZielonka && z.game_won == Some(false),
        format!("predict_next: two-player game {:?}", z.game_won),
    )?;
    let v = solve(&ks, &f, &SolveOptions::default()).map_err(|e| e.to_string())?;
    ensure(
        v.outcome == Outcome::Proven && v.guarantee == Guarantee::Semantic && v.method == Method::NegatedExistsForall,
        format!("predict_next: auto {:?} {:?} {:?}", v.outcome, v.method, v.guarantee),
    )?;
    let (ks, f) = load("branching.ks", "two_rounds.hltl");
    for n in [4, 5] {
        ensure(oracle(&ks, &f, n), format!("two_rounds: oracle false at {n}/{n}"))?;
    }
    let b = solve(&ks, &f, &mode(Mode::Bounded, 1)).map_err(|e| e.to_string())?;
    ensure(b.game_won == Some(false), format!("two_rounds: game {:?}", b.game_won))?;
    Ok("both formulas hold per oracle, both direct games are lost, auto proves predict_next".into())
}

fn prophecy_certify() -> Check {
    let (ks, f) = load("branching.ks", "predict_next.hltl");
    let fam = parse_prophecy_family(&read("predict_next.proph"), &f).map_err(|e| e.to_string())?;
    let (kp, g) = with_prophecies(&ks, &f, &fam).map_err(|e| e.to_string())?;
    let mut opts = mode(Mode::Zielonka, 1);
    opts.manifest = fam.manifest().lines().map(str::to_string).collect();
    let v = solve(&kp, &g, &opts).map_err(|e| e.to_string())?;
    ensure(
        v.outcome == Outcome::Proven && v.method == Method::TwoPlayerZielonka,
        format!("with prophecy: {:?} {:?}", v.outcome, v.method),
    )?;
    let w = v.witness.ok_or("no certificate")?;
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("predict_next.cert");
    std::fs::write(&cert, export_profile(&w)).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hypergame"))
        .arg("certify")
        .arg(fixture("branching.ks"))
        .arg(fixture("predict_next.hltl"))
        .arg(&cert)
        .output()
        .unwrap();
    ensure(out.status.code() == Some(0), format!("certify exit {:?}", out.status.code()))?;
    Ok(format!(
        "two-player game won, {}",
        String::from_utf8_lossy(&out.stdout).trim()
    ))
}

fn two_rounds(games: &mut Games) -> Check {
    let (ks, f) = load("branching.ks", "two_rounds.hltl");
    for m in 1..=3 {
        let v = solve(&ks, &f, &mode(Mode::Bounded, m)).map_err(|e| e.to_string())?;
        ensure(v.outcome != Outcome::Proven, format!("bare game proven at memory {m}"))?;
    }
    let fam = parse_prophecy_family(&read("two_rounds.proph"), &f).map_err(|e| e.to_string())?;
    let (kp, g) = with_prophecies(&ks, &f, &fam).map_err(|e| e.to_string())?;
    let manifest: Vec<String> = fam.manifest().lines().map(str::to_string).collect();
    let dpa = body_dpa(&g.body).map_err(|e| e.to_string())?;
    let game = build_mpg(&kp, &g, &dpa).map_err(|e| e.to_string())?;
    let mut found = None;
    for m in 1..=2 {
        let opts = BoundedOptions {
            memory_bound: m,
            ..Default::default()
        };
        let v = solve_bounded_coalition(&game, &opts, manifest.clone()).map_err(|e| e.to_string())?;
        if v.outcome == Outcome::Proven {
            found = Some((m, v.witness.ok_or("proven without a profile")?));
            break;
        }
    }
    let (m, w) = found.ok_or("no profile with memory at most 2")?;
    let text = export_profile(&w);
    let back = import_profile(&text, &game).map_err(|e| e.to_string())?;
    ensure(back == w, "certificate changed in a round trip")?;
    let c = check_profile(&game, &back).map_err(|e| e.to_string())?;
    ensure(c.passed(), "certificate check failed")?;
    games.0.push(("two_rounds+prophecies".into(), game));
    Ok(format!(
        "bare game: nothing up to memory 3; with prophecies: proven at memory {m}, certificate round-trips and passes"
    ))
}

/// Random forall-exists instances: the verifier/refuter game and the
/// multiplayer game agree on the winner.
fn two_player_vs_mpg(games: &mut Games, proven: &mut Vec<(KripkeStructure, HyperLtl)>) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e3);
    let (mut wins, mut losses) = (0, 0);
    for i in 0..50 {
        let aps = rng.gen_range(1..=2);
        let ks = random_ks(&mut rng, 4, 2, aps);
        let depth = rng.gen_range(1..=3);
        let f = random_formula(&mut rng, &[A, E], ks.aps(), depth);
        let dpa = body_dpa(&f.body).map_err(|e| e.to_string())?;
        let g2 = build_two_player_game(&ks, &f, &dpa).map_err(|e| e.to_string())?;
        let won2 = solve_zielonka(&g2).even_wins[g2.initial()];
        let mpg = build_mpg(&ks, &f, &dpa).map_err(|e| e.to_string())?;
        let opts = BoundedOptions {
            memory_bound: dpa.num_states().max(1) as u32,
            budget: 1_000_000,
            automaton_memory: true,
        };
        let v = solve_bounded_coalition(&mpg, &opts, vec![]).map_err(|e| e.to_string())?;
        let won_mpg = match (v.outcome, v.game_won) {
            (Outcome::Proven, _) => true,
            (_, Some(false)) => false,
            _ => return Err(format!("instance {i}: multiplayer game undecided for {f}")),
        };
        ensure(won2 == won_mpg, format!("instance {i}: {won2} vs {won_mpg} for {f}"))?;
        if won2 {
            wins += 1;
            proven.push((ks, f.clone()));
        } else {
            losses += 1;
        }
        games.0.push((format!("forall-exists #{i}"), mpg));
    }
    Ok(format!("50 instances agree ({wins} won, {losses} lost)"))
}

/// Random exists-forall instances: the exact procedure matches the oracle at
/// budget |S|·|Q| capped at 6.
fn exists_forall_vs_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xef);
    let mut holds = 0;
    for (prefix, label) in [(&[E, A][..], "EA"), (&[E, E, A][..], "EEA")] {
        for i in 0..50 {
            let ks = random_ks(&mut rng, 3, 2, 1);
            let depth = rng.gen_range(1..=3);
            let f = random_formula(&mut rng, prefix, ks.aps(), depth);
            let dpa = body_dpa(&f.body).map_err(|e| e.to_string())?;
            let v = solve_exists_forall(&ks, &f, &dpa).map_err(|e| e.to_string())?;
            let n = (ks.num_states() * dpa.num_states()).min(6);
            let o = oracle(&ks, &f, n);
            ensure(
                (v.outcome == Outcome::Proven) == o,
                format!("{label} #{i}: solver {:?}, oracle {o} at {n}/{n} for {f}", v.outcome),
            )?;
            holds += o as usize;
        }
    }
    Ok(format!("100 instances agree ({holds} hold)"))
}

/// Every game-level win is confirmed by the oracle on the original input.
fn soundness(games: &mut Games, proven: &[(KripkeStructure, HyperLtl)]) -> Check {
    let mut checked = 0;
    for (ks, f) in proven {
        ensure(oracle(ks, f, 4), format!("won game but oracle false for {f}"))?;
        checked += 1;
    }
    let fixtures = [
        ("mirror.hltl", None, 1),
        ("predict_next.hltl", Some("predict_next.proph"), 1),
        ("two_rounds.hltl", Some("two_rounds.proph"), 2),
    ];
    for (fname, proph, memory) in fixtures {
        let (ks, f) = load("branching.ks", fname);
        let (kp, g) = match proph {
            Some(p) => {
                let fam = parse_prophecy_family(&read(p), &f).map_err(|e| e.to_string())?;
                with_prophecies(&ks, &f, &fam).map_err(|e| e.to_string())?
            }
            None => (ks.clone(), f.clone()),
        };
        let m = if g.is_forall_exists_pair() { Mode::Zielonka } else { Mode::Bounded };
        let v = solve(&kp, &g, &mode(m, memory)).map_err(|e| e.to_string())?;
        ensure(v.outcome == Outcome::Proven && v.witness.is_some(), format!("{fname}: {:?}", v.outcome))?;
        ensure(oracle(&ks, &f, 4), format!("{fname}: oracle false"))?;
        checked += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x4a);
    for i in 0..20 {
        let ks = random_ks(&mut rng, 3, 2, 1);
        let f = random_formula(&mut rng, &[A, E, A, E], ks.aps(), 2);
        let dpa = body_dpa(&f.body).map_err(|e| e.to_string())?;
        let game = build_mpg(&ks, &f, &dpa).map_err(|e| e.to_string())?;
        let opts = BoundedOptions {
            memory_bound: 2,
            budget: 200_000,
            automaton_memory: true,
        };
        let v = solve_bounded_coalition(&game, &opts, vec![]).map_err(|e| e.to_string())?;
        if v.outcome == Outcome::Proven {
            let sp = v.witness.as_ref().ok_or("proven without a profile")?;
            ensure(check_profile(&game, sp).map_err(|e| e.to_string())?.passed(), format!("#{i}: bad profile"))?;
            ensure(oracle(&ks, &f, 3), format!("alternating #{i}: won game but oracle false for {f}"))?;
            checked += 1;
        }
        games.0.push((format!("alternating #{i}"), game));
    }
    Ok(format!("{checked} wins, none refuted by the oracle"))
}

fn automata() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa7);
    let aps = vec!["a".to_string(), "b".to_string()];
    for i in 0..200 {
        let depth = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=2);
        let f = random_formula(&mut rng, &[A, E], &aps[..k], depth);
        let d = body_dpa(&f.body).map_err(|e| e.to_string())?;
        let c = complement_dpa(&d);
        let cc = complement_dpa(&c);
        let h = import_hoa(&export_hoa(&d)).map_err(|e| e.to_string())?;
        let eval = BodyEvaluator::new(&f.body, d.alphabet());
        let bits = d.alphabet().len() as u32;
        for _ in 0..20 {
            let w = random_word(&mut rng, bits, 4, 4);
            let want = eval.eval(&w);
            let got = d.accepts(&w).map_err(|e| e.to_string())?;
            ensure(got == want, format!("#{i}: automaton {got}, evaluator {want} for {} on {w:?}", f.body))?;
            ensure(c.accepts(&w).unwrap() != want, format!("#{i}: complement agrees with original"))?;
            ensure(cc.accepts(&w).unwrap() == want, format!("#{i}: double complement differs"))?;
            ensure(h.accepts(&w).unwrap() == want, format!("#{i}: HOA round trip differs"))?;
        }
    }
    Ok("4000 lassos: automaton = evaluator, complement and HOA round trip consistent".into())
}

fn hierarchy(games: &Games) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x41e);
    for (name, g) in &games.0 {
        let n = g.num_players();
        let order = is_hierarchical(g).map_err(|w| format!("{name}: not hierarchical {w:?}"))?;
        ensure(order == (1..=n).collect::<Vec<_>>(), format!("{name}: order {order:?}"))?;
        // Vertices by class, per player, to draw indistinguishable pairs.
        let by_class: Vec<HashMap<u32, Vec<usize>>> = (0..=n)
            .map(|p| {
                let mut m: HashMap<u32, Vec<usize>> = HashMap::new();
                if p > 0 {
                    for v in 0..g.num_vertices() {
                        m.entry(g.obs_id(v, p)).or_default().push(v);
                    }
                }
                m
            })
            .collect();
        for _ in 0..1000 {
            let v = rng.gen_range(0..g.num_vertices());
            let w = if rng.gen_bool(0.5) {
                rng.gen_range(0..g.num_vertices())
            } else {
                let p = rng.gen_range(1..=n);
                let class = &by_class[p][&g.obs_id(v, p)];
                class[rng.gen_range(0..class.len())]
            };
            for hi in 1..=n {
                if g.obs_id(v, hi) == g.obs_id(w, hi) {
                    for lo in 1..hi {
                        ensure(
                            g.obs_id(v, lo) == g.obs_id(w, lo),
                            format!("{name}: player {hi} confuses {v},{w} but player {lo} does not"),
                        )?;
                    }
                }
            }
        }
    }
    Ok(format!("{} games ordered 1..n, 1000 sampled pairs each", games.0.len()))
}

struct Run {
    failed: usize,
}

impl Run {
    fn criterion(&mut self, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Check) {
        let t = Instant::now();
        let r = f();
        let el = t.elapsed();
        let timing = match limit {
            Some(l) => format!("{:.2}s, limit {}s", el.as_secs_f64(), l.as_secs()),
            None => format!("{:.2}s", el.as_secs_f64()),
        };
        let r = match r {
            Ok(d) if limit.is_some_and(|l| el > l) => Err(format!("{d}; over time")),
            r => r,
        };
        match r {
            Ok(d) => println!("PASS {name}: {d} ({timing})"),
            Err(d) => {
                self.failed += 1;
                println!("FAIL {name}: {d} ({timing})");
            }
        }
    }
}

fn main() {
    let secs = Duration::from_secs;
    let mut run = Run { failed: 0 };
    let mut games = Games::default();
    let mut proven = Vec::new();
    run.criterion("shifted-witness regression", Some(secs(5)), shifted_witness);
    run.criterion("forall-exists incompleteness", Some(secs(10)), incompleteness);
    run.criterion("prophecy repairs predict_next", Some(secs(5)), prophecy_certify);
    run.criterion("two_rounds with prophecies", Some(secs(60)), || two_rounds(&mut games));
    run.criterion("two-player game vs multiplayer game", None, || {
        two_player_vs_mpg(&mut games, &mut proven)
    });
    run.criterion("exists-forall exactness", None, exists_forall_vs_oracle);
    run.criterion("soundness of game wins", None, || soundness(&mut games, &proven));
    run.criterion("automata consistency", Some(secs(120)), automata);
    run.criterion("observation hierarchy", None, || hierarchy(&games));
    if run.failed > 0 {
        println!("{} criteria failed", run.failed);
        std::process::exit(1);
    }
}
