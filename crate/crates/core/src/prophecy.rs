//! Prophecy families, the system extended with prophecy propositions, and the
//! formula rewriting that ties each prophecy proposition to its LTL meaning.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::logic::{parse_body, HyperLtl, IndexedAp, Ltl, Quantifier};
use crate::model::{DirId, KripkeStructure, ModelError, StateId, StateSpec};
use crate::text::Cursor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProphecyError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: prophecy at index {index} mentions '{var}', quantified at index {var_index}")]
    Scope {
        line: usize,
        index: usize,
        var: String,
        var_index: usize,
    },
    #[error("prophecy proposition '{0}' collides with a model proposition")]
    NameCollision(String),
    #[error("prophecies need a prefix that alternates forall/exists starting with forall")]
    PrefixShape,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One prophecy proposition and the formula it predicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prophecy {
    pub name: String,
    /// 1-based odd position in the quantifier prefix.
    pub index: usize,
    pub formula: Ltl,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProphecyFamily {
    pub entries: Vec<Prophecy>,
}

impl ProphecyFamily {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|p| p.name.as_str()).collect()
    }

    pub fn by_index(&self) -> BTreeMap<usize, Vec<&Prophecy>> {
        let mut m: BTreeMap<usize, Vec<&Prophecy>> = BTreeMap::new();
        for p in &self.entries {
            m.entry(p.index).or_default().push(p);
        }
        m
    }

    /// `name = at <index>: <formula>` per line.
    pub fn manifest(&self) -> String {
        let mut s = String::new();
        for p in &self.entries {
            writeln!(s, "{} = at {}: {}", p.name, p.index, p.formula).unwrap();
        }
        s
    }

    /// Reads a manifest back. Names must be the generated ones in order.
    pub fn from_manifest(text: &str, f: &HyperLtl) -> Result<ProphecyFamily, ProphecyError> {
        let mut plain = String::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                plain.push('\n');
                continue;
            }
            let (name, rest) = line.split_once('=').ok_or_else(|| ProphecyError::Syntax {
                line: i + 1,
                message: "expected 'name = at <index>: <formula>'".into(),
            })?;
            let expected = prophecy_name(text.lines().take(i).filter(|l| !l.trim().is_empty()).count() + 1);
            if name.trim() != expected {
                return Err(ProphecyError::Syntax {
                    line: i + 1,
                    message: format!("expected prophecy name '{expected}'"),
                });
            }
            plain.push_str(rest);
            plain.push('\n');
        }
        parse_prophecy_family(&plain, f)
    }
}

/// The system and formula the game is built from: `K^P` and the rewritten
/// formula, or the inputs themselves for an empty family.
pub fn with_prophecies(
    ks: &KripkeStructure,
    f: &HyperLtl,
    fam: &ProphecyFamily,
) -> Result<(KripkeStructure, HyperLtl), ProphecyError> {
    if fam.is_empty() {
        return Ok((ks.clone(), f.clone()));
    }
    Ok((extend_ks(ks, fam)?, rewrite_formula(f, fam)?))
}

pub fn prophecy_name(k: usize) -> String {
    format!("__p{k}")
}

/// Parses lines of the form `at <odd-index>: <ltl>`; `#` starts a comment.
pub fn parse_prophecy_family(text: &str, f: &HyperLtl) -> Result<ProphecyFamily, ProphecyError> {
    if !f.is_strictly_alternating() {
        return Err(ProphecyError::PrefixShape);
    }
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let syntax = |message: String| ProphecyError::Syntax { line, message };
        let mut cur = Cursor::new(content).map_err(|e| syntax(e.message))?;
        cur.expect_keyword("at").map_err(|e| syntax(e.message))?;
        let index = cur.expect_int().map_err(|e| syntax(e.message))? as usize;
        cur.expect_sym(":").map_err(|e| syntax(e.message))?;
        let formula = parse_body(&mut cur).map_err(|e| syntax(e.message))?;
        if !cur.at_end() {
            return Err(syntax("unexpected input after formula".into()));
        }
        if index % 2 == 0 || index == 0 || index > f.num_vars() {
            return Err(syntax(format!(
                "index must be odd and within 1..={}",
                f.num_vars()
            )));
        }
        for var in formula.trace_vars() {
            match f.var_index(&var) {
                None => return Err(syntax(format!("trace variable '{var}' is not quantified"))),
                Some(j) if j + 1 > index => {
                    return Err(ProphecyError::Scope {
                        line,
                        index,
                        var,
                        var_index: j + 1,
                    })
                }
                Some(_) => {}
            }
        }
        entries.push(Prophecy {
            name: prophecy_name(entries.len() + 1),
            index,
            formula,
        });
    }
    Ok(ProphecyFamily { entries })
}

/// Pads a prefix into strict `∀∃` alternation by inserting unused variables.
/// Returns the padded formula and the inserted names.
pub fn normalize_alternating(f: &HyperLtl) -> (HyperLtl, Vec<String>) {
    let mut prefix = Vec::new();
    let mut inserted = Vec::new();
    let mut fresh = 0;
    let mut next_name = |f: &HyperLtl| loop {
        fresh += 1;
        let name = format!("pad{fresh}");
        if f.var_index(&name).is_none() {
            return name;
        }
    };
    for (q, v) in &f.prefix {
        let want = if prefix.len() % 2 == 0 {
            Quantifier::Forall
        } else {
            Quantifier::Exists
        };
        if *q != want {
            let name = next_name(f);
            prefix.push((want, name.clone()));
            inserted.push(name);
        }
        prefix.push((*q, v.clone()));
    }
    if prefix.len() % 2 == 1 {
        let name = next_name(f);
        prefix.push((Quantifier::Exists, name.clone()));
        inserted.push(name);
    }
    (
        HyperLtl {
            prefix,
            body: f.body.clone(),
        },
        inserted,
    )
}

fn join_name(base: &str, extra: &[&str]) -> String {
    let mut s = base.to_string();
    for e in extra {
        s.push('+');
        s.push_str(e);
    }
    s
}

/// The system with every non-initial state and every direction paired with a
/// subset of the prophecy propositions.
pub fn extend_ks(ks: &KripkeStructure, fam: &ProphecyFamily) -> Result<KripkeStructure, ProphecyError> {
    let names = fam.names();
    for n in &names {
        if ks.ap_index(n).is_some() {
            return Err(ProphecyError::NameCollision(n.to_string()));
        }
    }
    let k = names.len();
    let subset = |mask: usize| -> Vec<&str> {
        (0..k).filter(|i| mask >> i & 1 == 1).map(|i| names[i]).collect()
    };
    let mut aps: Vec<String> = ks.aps().to_vec();
    aps.extend(names.iter().map(|s| s.to_string()));
    let mut directions = Vec::new();
    for d in ks.directions() {
        for mask in 0..1usize << k {
            directions.push(join_name(d, &subset(mask)));
        }
    }
    let edges = |s: StateId| -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (di, d) in ks.directions().iter().enumerate() {
            let t = ks.succ(s, DirId(di as u32));
            for mask in 0..1usize << k {
                let extra = subset(mask);
                out.push((join_name(d, &extra), join_name(ks.state_name(t), &extra)));
            }
        }
        out
    };
    let init = ks.init();
    let mut states = vec![StateSpec {
        name: ks.state_name(init).to_string(),
        labels: ks.label_names(init).into_iter().map(String::from).collect(),
        edges: edges(init),
    }];
    for s in ks.states().filter(|&s| s != init) {
        for mask in 0..1usize << k {
            let extra = subset(mask);
            let mut labels: Vec<String> = ks.label_names(s).into_iter().map(String::from).collect();
            labels.extend(extra.iter().map(|x| x.to_string()));
            states.push(StateSpec {
                name: join_name(ks.state_name(s), &extra),
                labels,
                edges: edges(s),
            });
        }
    }
    let init_name = ks.state_name(init).to_string();
    Ok(KripkeStructure::new(aps, directions, states, &init_name)?)
}

/// `(X G ⋀ (p[π_i] <-> ξ)) -> ψ` with one conjunct per prophecy.
pub fn rewrite_formula(f: &HyperLtl, fam: &ProphecyFamily) -> Result<HyperLtl, ProphecyError> {
    if !f.is_strictly_alternating() {
        return Err(ProphecyError::PrefixShape);
    }
    let mut conj = Vec::new();
    for p in &fam.entries {
        let var = &f.prefix[p.index - 1].1;
        conj.push(Ltl::iff(
            Ltl::Atom(IndexedAp::new(p.name.clone(), var.clone())),
            p.formula.clone(),
        ));
    }
    let premise = Ltl::next(Ltl::globally(Ltl::conjunction(conj)));
    Ok(HyperLtl {
        prefix: f.prefix.clone(),
        body: Ltl::implies(premise, f.body.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_hyperltl;
    use crate::model::parse_ks;

    const BRANCHING: &str = "aps: a;\ndirections: A, B;\n\
        state s_init init { labels {}; A -> s_A; B -> s_A; }\n\
        state s_A { labels {}; A -> s_A; B -> s_B; }\n\
        state s_B { labels {a}; A -> s_A; B -> s_B; }\n";

    const TWO_ROUNDS: &str = "forall p1. exists p2. forall p3. exists p4. \
        G F (a[p2] <-> X a[p1]) && X X (a[p4] <-> G ((a[p1] <-> a[p2]) && (a[p2] <-> a[p3])))";

    const TWO_ROUNDS_HINTS: &str = "# hints for the second and fourth copy\n\
        at 1: X a[p1]\n\
        at 3: G ((a[p1] <-> a[p2]) && (a[p2] <-> a[p3]))\n";

    #[test]
    fn parses_family() {
        let f = parse_hyperltl(TWO_ROUNDS).unwrap();
        let fam = parse_prophecy_family(TWO_ROUNDS_HINTS, &f).unwrap();
        assert_eq!(fam.names(), vec!["__p1", "__p2"]);
        assert_eq!(fam.entries[1].index, 3);
        assert!(parse_prophecy_family("", &f).unwrap().is_empty());
        assert!(matches!(
            parse_prophecy_family("at 1: a[p2]", &f),
            Err(ProphecyError::Scope { var_index: 2, .. })
        ));
        assert!(parse_prophecy_family("at 2: a[p1]", &f).is_err());
        assert!(parse_prophecy_family("at 1 a[p1]", &f).is_err());
        let ef = parse_hyperltl("exists p1. forall p2. G a[p1]").unwrap();
        assert_eq!(parse_prophecy_family("", &ef), Err(ProphecyError::PrefixShape));
        assert_eq!(ProphecyFamily::from_manifest(&fam.manifest(), &f).unwrap(), fam);
    }

    #[test]
    fn extension() {
        let ks = parse_ks(BRANCHING).unwrap();
        let f = parse_hyperltl(TWO_ROUNDS).unwrap();
        let fam = parse_prophecy_family("at 1: X a[p1]", &f).unwrap();
        let kp = extend_ks(&ks, &fam).unwrap();
        assert_eq!(kp.num_states(), 5);
        assert_eq!(kp.num_directions(), 4);
        assert_eq!(kp.step_named("s_A+__p1", "B").unwrap(), "s_B");
        assert_eq!(kp.step_named("s_init", "A+__p1").unwrap(), "s_A+__p1");
        let sb = kp.state_id("s_B+__p1").unwrap();
        assert_eq!(kp.label_names(sb), vec!["a", "__p1"]);
        assert!(kp.label_names(kp.init()).is_empty());
        let clash = parse_ks(&BRANCHING.replace("aps: a;", "aps: a, __p1;")).unwrap();
        assert_eq!(
            extend_ks(&clash, &fam),
            Err(ProphecyError::NameCollision("__p1".into()))
        );
    }

    #[test]
    fn rewriting() {
        let f = parse_hyperltl(TWO_ROUNDS).unwrap();
        let fam = parse_prophecy_family(TWO_ROUNDS_HINTS, &f).unwrap();
        let expected = parse_hyperltl(
            "forall p1. exists p2. forall p3. exists p4. \
             (X G ((__p1[p1] <-> X a[p1]) && (__p2[p3] <-> G ((a[p1] <-> a[p2]) && (a[p2] <-> a[p3]))))) -> \
             (G F (a[p2] <-> X a[p1]) && X X (a[p4] <-> G ((a[p1] <-> a[p2]) && (a[p2] <-> a[p3]))))",
        )
        .unwrap();
        assert_eq!(rewrite_formula(&f, &fam).unwrap(), expected);
        let empty = rewrite_formula(&f, &ProphecyFamily::default()).unwrap();
        assert_eq!(
            empty.body,
            Ltl::implies(Ltl::next(Ltl::globally(Ltl::True)), f.body.clone())
        );
    }

    #[test]
    fn padding() {
        let f = parse_hyperltl("exists p1. forall p2. forall p3. G (a[p1] <-> a[p3])").unwrap();
        let (g, inserted) = normalize_alternating(&f);
        assert!(g.is_strictly_alternating());
        assert_eq!(inserted.len(), 3);
        assert_eq!(g.vars(), vec!["pad1", "p1", "p2", "pad2", "p3", "pad3"]);
    }
}
