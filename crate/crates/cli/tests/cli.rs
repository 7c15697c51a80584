use std::io::{BufRead, BufReader};
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypergame")).args(args).output().unwrap()
}

fn f(name: &str) -> String {
    fixture(name).to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("m.cert");
    let o = run(&["check", &f("branching.ks"), &f("mirror.hltl"), "-o", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(cert.exists());
    let o = run(&["check", &f("branching.ks"), &f("shifted_witness.hltl")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("semantic"));
    let o = run(&["check", &f("branching.ks"), &f("two_rounds.hltl"), "--memory", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["check", &f("branching.ks"), "/nonexistent.hltl"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["check", &f("branching.ks"), &f("mirror.hltl"), "--mode", "telepathy"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn certify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("p.cert");
    let cs = cert.to_str().unwrap();
    let o = run(&["check", &f("branching.ks"), &f("predict_next.hltl"), "--prophecy", &f("predict_next.proph"), "--mode", "zielonka", "-o", cs]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["certify", &f("branching.ks"), &f("predict_next.hltl"), cs]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("pass"));
    // Same certificate against another formula.
    let o = run(&["certify", &f("branching.ks"), &f("mirror.hltl"), cs]);
    assert_eq!(o.status.code(), Some(3));
    // Every output flipped: some play now escapes.
    let text = std::fs::read_to_string(&cert).unwrap();
    let flipped: String = text
        .lines()
        .map(|l| {
            if l.trim_start().starts_with("out ") {
                let (head, dir) = l.rsplit_once("-> ").unwrap();
                let swapped = if dir.starts_with('A') { dir.replacen('A', "B", 1) } else { dir.replacen('B', "A", 1) };
                format!("{head}-> {swapped}\n")
            } else {
                format!("{l}\n")
            }
        })
        .collect();
    let bad = dir.path().join("bad.cert");
    std::fs::write(&bad, flipped).unwrap();
    let o = run(&["certify", &f("branching.ks"), &f("predict_next.hltl"), bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("fail"));
}

#[test]
fn oracle_exit_codes() {
    let o = run(&["oracle", &f("branching.ks"), &f("predict_next.hltl")]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["oracle", &f("branching.ks"), &f("shifted_witness.hltl"), "--stem", "5", "--loop", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["oracle", &f("branching.ks"), &f("mirror.hltl"), "--stem", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn version_lists_formats() {
    let o = run(&["--version"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("certificate 1"));
}

#[test]
fn serve_on_an_ephemeral_port() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hypergame"))
        .args(["serve", "--port", "0", "--ks", &f("branching.ks"), "--formula", &f("mirror.hltl")])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut lines = BufReader::new(child.stdout.take().unwrap()).lines();
    let first = lines.next().unwrap().unwrap();
    let port: u16 = lines.next().unwrap().unwrap().strip_prefix("port ").unwrap().parse().unwrap();
    assert!(first.starts_with("listening on http://127.0.0.1:"));
    use std::io::{Read, Write};
    let mut s = std::net::TcpStream::connect(("127.0.0.1", port)).unwrap();
    s.write_all(b"GET /healthz HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n").unwrap();
    let mut resp = String::new();
    s.read_to_string(&mut resp).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
}

#[test]
fn serve_reports_bind_failures() {
    let l = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = l.local_addr().unwrap().port().to_string();
    let o = run(&["serve", "--port", &port]);
    assert_eq!(o.status.code(), Some(3));
}
