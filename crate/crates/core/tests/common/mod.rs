#![allow(dead_code)]

use std::path::PathBuf;

use hypergame::{parse_hyperltl, parse_ks, HyperLtl, KripkeStructure};

pub fn read(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(p).unwrap()
}

pub fn load(ks: &str, f: &str) -> (KripkeStructure, HyperLtl) {
    (parse_ks(&read(ks)).unwrap(), parse_hyperltl(&read(f)).unwrap())
}
