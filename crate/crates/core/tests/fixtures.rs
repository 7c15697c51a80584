mod common;

use common::{load, read};
use hypergame::arena::build_mpg;
use hypergame::automata::body_dpa;
use hypergame::certificate::{check_profile, export_profile, import_profile, CertificateError, CheckOutcome};
use hypergame::oracle::{oracle_check, LassoBudget};
use hypergame::prophecy::{parse_prophecy_family, with_prophecies};
use hypergame::solver::{solve, Guarantee, Method, Mode, Outcome, SolveOptions};

fn opts(mode: Mode) -> SolveOptions {
    SolveOptions {
        mode,
        ..Default::default()
    }
}

#[test]
fn mirror_is_proven_with_a_checkable_certificate() {
    let (ks, f) = load("branching.ks", "mirror.hltl");
    let v = solve(&ks, &f, &SolveOptions::default()).unwrap();
    assert_eq!(v.outcome, Outcome::Proven);
    assert_eq!(v.method, Method::TwoPlayerZielonka);
    let game = build_mpg(&ks, &f, &body_dpa(&f.body).unwrap()).unwrap();
    let sp = import_profile(&export_profile(v.witness.as_ref().unwrap()), &game).unwrap();
    assert!(check_profile(&game, &sp).unwrap().passed());
}

#[test]
fn shifted_witness_full_information_disagrees_with_truth() {
    let (ks, f) = load("branching.ks", "shifted_witness.hltl");
    let full = solve(&ks, &f, &opts(Mode::Zielonka)).unwrap();
    assert_eq!(full.outcome, Outcome::Proven);
    assert_eq!(full.guarantee, Guarantee::FullInformationGame);
    let exact = solve(&ks, &f, &opts(Mode::ExistsForall)).unwrap();
    assert_eq!(exact.outcome, Outcome::Disproven);
    assert_eq!(exact.guarantee, Guarantee::Semantic);
    assert!(!oracle_check(&ks, &f, LassoBudget::square(4).unwrap()));
}

#[test]
fn predict_next_needs_the_negation_route() {
    let (ks, f) = load("branching.ks", "predict_next.hltl");
    let z = solve(&ks, &f, &opts(Mode::Zielonka)).unwrap();
    assert_eq!(z.outcome, Outcome::Disproven);
    assert_eq!(z.guarantee, Guarantee::GameLevel);
    let v = solve(&ks, &f, &SolveOptions::default()).unwrap();
    assert_eq!((v.outcome, v.method), (Outcome::Proven, Method::NegatedExistsForall));
    assert_eq!(v.game_won, Some(false));
    assert!(v.witness.is_none());
}

#[test]
fn predict_next_with_prophecy_is_won() {
    let (ks, f) = load("branching.ks", "predict_next.hltl");
    let fam = parse_prophecy_family(&read("predict_next.proph"), &f).unwrap();
    let (kp, g) = with_prophecies(&ks, &f, &fam).unwrap();
    assert_eq!(kp.num_directions(), 4);
    let v = solve(&kp, &g, &opts(Mode::Zielonka)).unwrap();
    assert_eq!(v.outcome, Outcome::Proven);
}

#[test]
fn two_rounds_bare_game_is_lost_even_with_full_information() {
    let (ks, f) = load("branching.ks", "two_rounds.hltl");
    let v = solve(&ks, &f, &opts(Mode::Bounded)).unwrap();
    assert_eq!(v.outcome, Outcome::Unknown);
    assert_eq!(v.game_won, Some(false));
}

#[test]
fn mutated_certificate_is_rejected() {
    let (ks, f) = load("branching.ks", "mirror.hltl");
    let game = build_mpg(&ks, &f, &body_dpa(&f.body).unwrap()).unwrap();
    let text = export_profile(&solve(&ks, &f, &SolveOptions::default()).unwrap().witness.unwrap());
    let mut failures = 0;
    for (i, line) in text.lines().enumerate() {
        if !line.trim_start().starts_with("out ") {
            continue;
        }
        let flipped = if line.ends_with("-> A") {
            line.replace("-> A", "-> B")
        } else {
            line.replace("-> B", "-> A")
        };
        let mutant: Vec<&str> = text.lines().enumerate().map(|(j, l)| if i == j { flipped.as_str() } else { l }).collect();
        let sp = import_profile(&mutant.join("\n"), &game).unwrap();
        if let CheckOutcome::Fail(l) = check_profile(&game, &sp).unwrap() {
            assert_eq!(l.color % 2, 1);
            failures += 1;
        }
    }
    assert!(failures > 0);
}

#[test]
fn certificate_for_another_game_is_rejected() {
    let (ks, f) = load("branching.ks", "mirror.hltl");
    let text = export_profile(&solve(&ks, &f, &SolveOptions::default()).unwrap().witness.unwrap());
    let (ks2, f2) = load("branching.ks", "predict_next.hltl");
    let other = build_mpg(&ks2, &f2, &body_dpa(&f2.body).unwrap()).unwrap();
    assert!(matches!(import_profile(&text, &other), Err(CertificateError::HashMismatch { .. })));
}

#[test]
fn two_rounds_with_prophecies_is_proven_by_auto() {
    let (ks, f) = load("branching.ks", "two_rounds.hltl");
    let fam = parse_prophecy_family(&read("two_rounds.proph"), &f).unwrap();
    let (kp, g) = with_prophecies(&ks, &f, &fam).unwrap();
    assert_eq!(kp.num_directions(), 8);
    let mut o = SolveOptions::default();
    o.bounded.memory_bound = 2;
    let v = solve(&kp, &g, &o).unwrap();
    assert_eq!((v.outcome, v.method), (Outcome::Proven, Method::BoundedCoalition));
    let game = build_mpg(&kp, &g, &body_dpa(&g.body).unwrap()).unwrap();
    assert!(check_profile(&game, v.witness.as_ref().unwrap()).unwrap().passed());
}
