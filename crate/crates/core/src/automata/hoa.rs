//! Parity automata in the Hanoi Omega-Automata text format, restricted to
//! deterministic complete automata with state-based `parity min even`
//! acceptance. Proposition names are written as `a[p]`.

use std::fmt::Write;

use super::{AutomataError, Dpa};
use crate::logic::IndexedAp;

fn acceptance_expr(sets: u32) -> String {
    fn go(i: u32, sets: u32) -> String {
        let atom = if i % 2 == 0 {
            format!("Inf({i})")
        } else {
            format!("Fin({i})")
        };
        if i + 1 == sets {
            atom
        } else if i % 2 == 0 {
            format!("{atom} | ({})", go(i + 1, sets))
        } else {
            format!("{atom} & ({})", go(i + 1, sets))
        }
    }
    go(0, sets)
}

fn letter_label(letter: usize, n: usize) -> String {
    if n == 0 {
        return "t".to_string();
    }
    (0..n)
        .map(|i| {
            if letter >> i & 1 == 1 {
                format!("{i}")
            } else {
                format!("!{i}")
            }
        })
        .collect::<Vec<_>>()
        .join("&")
}

pub fn export_hoa(a: &Dpa) -> String {
    let n = a.alphabet().len();
    let sets = a.max_color() + 1;
    let mut out = String::new();
    writeln!(out, "HOA: v1").unwrap();
    writeln!(out, "States: {}", a.num_states()).unwrap();
    writeln!(out, "Start: {}", a.initial()).unwrap();
    write!(out, "AP: {n}").unwrap();
    for ap in a.alphabet() {
        write!(out, " \"{ap}\"").unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "acc-name: parity min even {sets}").unwrap();
    writeln!(out, "Acceptance: {sets} {}", acceptance_expr(sets)).unwrap();
    writeln!(out, "properties: trans-labels explicit-labels state-acc deterministic complete").unwrap();
    writeln!(out, "--BODY--").unwrap();
    for q in 0..a.num_states() as u32 {
        writeln!(out, "State: {q} {{{}}}", a.color(q)).unwrap();
        for l in 0..a.num_letters() {
            writeln!(out, "[{}] {}", letter_label(l, n), a.step(q, l as u64)).unwrap();
        }
    }
    writeln!(out, "--END--").unwrap();
    out
}

fn err(msg: impl Into<String>) -> AutomataError {
    AutomataError::Hoa(msg.into())
}

/// Guard expressions over proposition indices with `t f ! & | ( )`.
struct Guard<'a> {
    s: &'a [u8],
    i: usize,
}

impl Guard<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn or(&mut self, letter: usize, n: usize) -> Result<bool, AutomataError> {
        let mut v = self.and(letter, n)?;
        loop {
            self.ws();
            if self.i < self.s.len() && self.s[self.i] == b'|' {
                self.i += 1;
                v |= self.and(letter, n)?;
            } else {
                return Ok(v);
            }
        }
    }

    fn and(&mut self, letter: usize, n: usize) -> Result<bool, AutomataError> {
        let mut v = self.unary(letter, n)?;
        loop {
            self.ws();
            if self.i < self.s.len() && self.s[self.i] == b'&' {
                self.i += 1;
                v &= self.unary(letter, n)?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self, letter: usize, n: usize) -> Result<bool, AutomataError> {
        self.ws();
        match self.s.get(self.i) {
            Some(b'!') => {
                self.i += 1;
                Ok(!self.unary(letter, n)?)
            }
            Some(b'(') => {
                self.i += 1;
                let v = self.or(letter, n)?;
                self.ws();
                if self.s.get(self.i) != Some(&b')') {
                    return Err(err("unbalanced parenthesis in label"));
                }
                self.i += 1;
                Ok(v)
            }
            Some(b't') => {
                self.i += 1;
                Ok(true)
            }
            Some(b'f') => {
                self.i += 1;
                Ok(false)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    self.i += 1;
                }
                let k: usize = std::str::from_utf8(&self.s[start..self.i])
                    .unwrap()
                    .parse()
                    .map_err(|_| err("bad proposition index"))?;
                if k >= n {
                    return Err(err(format!("proposition index {k} out of range")));
                }
                Ok(letter >> k & 1 == 1)
            }
            _ => Err(err("malformed label")),
        }
    }
}

fn eval_guard(src: &str, letter: usize, n: usize) -> Result<bool, AutomataError> {
    let mut g = Guard {
        s: src.as_bytes(),
        i: 0,
    };
    let v = g.or(letter, n)?;
    g.ws();
    if g.i != g.s.len() {
        return Err(err(format!("trailing input in label '{src}'")));
    }
    Ok(v)
}

fn parse_indexed_ap(name: &str) -> Result<IndexedAp, AutomataError> {
    let open = name.find('[').ok_or_else(|| err(format!("AP '{name}' is not of the form a[p]")))?;
    if !name.ends_with(']') || open == 0 {
        return Err(err(format!("AP '{name}' is not of the form a[p]")));
    }
    Ok(IndexedAp::new(&name[..open], &name[open + 1..name.len() - 1]))
}

pub fn import_hoa(text: &str) -> Result<Dpa, AutomataError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let mut states: Option<usize> = None;
    let mut start: Option<u32> = None;
    let mut aps: Option<Vec<IndexedAp>> = None;
    let mut parity = false;
    let mut saw_header = false;
    for line in lines.by_ref() {
        if line == "--BODY--" {
            break;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| err(format!("malformed header line '{line}'")))?;
        let rest = rest.trim();
        match key {
            "HOA" => {
                if rest != "v1" {
                    return Err(err("only HOA v1 is supported"));
                }
                saw_header = true;
            }
            "States" => states = Some(rest.parse().map_err(|_| err("bad States"))?),
            "Start" => {
                if start.is_some() {
                    return Err(err("multiple start states"));
                }
                start = Some(rest.parse().map_err(|_| err("bad Start"))?)
            }
            "AP" => {
                let mut parts = rest.splitn(2, ' ');
                let n: usize = parts
                    .next()
                    .unwrap_or("")
                    .parse()
                    .map_err(|_| err("bad AP count"))?;
                let names: Vec<&str> = parts
                    .next()
                    .unwrap_or("")
                    .split('"')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .collect();
                if names.len() != n {
                    return Err(err("AP count does not match names"));
                }
                aps = Some(names.into_iter().map(parse_indexed_ap).collect::<Result<_, _>>()?);
            }
            "acc-name" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() < 3 || parts[..3] != ["parity", "min", "even"] {
                    return Err(err("only 'parity min even' acceptance is supported"));
                }
                parity = true;
            }
            _ => {}
        }
    }
    if !saw_header {
        return Err(err("missing 'HOA: v1' header"));
    }
    if !parity {
        return Err(err("missing 'acc-name: parity min even'"));
    }
    let states = states.ok_or_else(|| err("missing States"))?;
    let aps = aps.unwrap_or_default();
    if aps.len() > super::MAX_ALPHABET_APS {
        return Err(AutomataError::AlphabetTooLarge(aps.len()));
    }
    let nl = 1usize << aps.len();
    let mut colors: Vec<Option<u32>> = vec![None; states];
    let mut trans: Vec<Option<u32>> = vec![None; states * nl];
    let mut cur: Option<usize> = None;
    let mut ended = false;
    for line in lines {
        if line == "--END--" {
            ended = true;
            break;
        }
        if let Some(rest) = line.strip_prefix("State:") {
            let rest = rest.trim();
            let (id, acc) = match rest.find('{') {
                Some(i) => (rest[..i].trim(), Some(&rest[i..])),
                None => (rest, None),
            };
            let id: usize = id
                .split_whitespace()
                .next()
                .unwrap_or("")
                .parse()
                .map_err(|_| err("bad state id"))?;
            if id >= states {
                return Err(err(format!("state {id} out of range")));
            }
            let acc = acc.ok_or_else(|| err(format!("state {id} has no color")))?;
            let inner = acc.trim_start_matches('{').trim_end_matches('}').trim();
            let c: u32 = inner
                .parse()
                .map_err(|_| err(format!("state {id} needs exactly one color")))?;
            colors[id] = Some(c);
            cur = Some(id);
            continue;
        }
        let q = cur.ok_or_else(|| err("edge before any state"))?;
        let line = line.strip_prefix('[').ok_or_else(|| err("edges need explicit labels"))?;
        let (guard, target) = line.split_once(']').ok_or_else(|| err("unterminated label"))?;
        let t: usize = target
            .trim()
            .parse()
            .map_err(|_| err(format!("bad edge target '{}'", target.trim())))?;
        if t >= states {
            return Err(err(format!("edge target {t} out of range")));
        }
        for l in 0..nl {
            if eval_guard(guard, l, aps.len())? {
                let slot = &mut trans[q * nl + l];
                if slot.is_some_and(|old| old as usize != t) {
                    return Err(err(format!("state {q} is not deterministic")));
                }
                *slot = Some(t as u32);
            }
        }
    }
    if !ended {
        return Err(err("missing --END--"));
    }
    let start = start.ok_or_else(|| err("missing Start"))?;
    if start as usize >= states {
        return Err(err("start state out of range"));
    }
    let colors = colors
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| err(format!("state {i} never declared"))))
        .collect::<Result<Vec<_>, _>>()?;
    let trans = trans
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.ok_or_else(|| err(format!("state {} is not complete", i / nl))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Dpa::new(aps, start, trans, colors))
}
