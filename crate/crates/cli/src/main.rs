use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::OnceLock;

use clap::{Parser, Subcommand, ValueEnum};

use hypergame::automata::body_dpa;
use hypergame::arena::build_mpg;
use hypergame::certificate::{check_profile, export_profile, import_profile, parse_profile, CheckOutcome};
use hypergame::oracle::{oracle_check, LassoBudget};
use hypergame::prophecy::{parse_prophecy_family, with_prophecies, ProphecyFamily};
use hypergame::solver::{solve, BoundedOptions, Mode, Outcome, SolveOptions, SolverError};
use hypergame::{parse_hyperltl, parse_ks, HyperLtl, KripkeStructure, FORMAT_VERSIONS};
use hypergame_server::{AppState, Defaults};

const EXIT_INPUT: u8 = 3;

fn long_version() -> &'static str {
    static V: OnceLock<String> = OnceLock::new();
    V.get_or_init(|| {
        let formats: Vec<String> = FORMAT_VERSIONS.iter().map(|(k, v)| format!("{k} {v}")).collect();
        format!("{} (formats: {})", env!("CARGO_PKG_VERSION"), formats.join(", "))
    })
}

#[derive(Parser)]
#[command(name = "hypergame", version = long_version(), about = "Game-based HyperLTL model checking")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Zielonka,
    ExistsForall,
    Bounded,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide K |= phi; exit 0 proven, 1 disproven, 2 unknown, 3 input error.
    Check {
        ks: PathBuf,
        formula: PathBuf,
        #[arg(long)]
        prophecy: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        /// Memory bound of the coalition search.
        #[arg(long, default_value_t = 3)]
        memory: u32,
        /// Table entries the coalition search may try.
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Certificate path; defaults to the formula path with `.cert` appended.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check a certificate; exit 0 pass, 1 fail, 3 input error.
    Certify {
        ks: PathBuf,
        formula: PathBuf,
        certificate: PathBuf,
        /// Prophecy family, when the certificate does not embed one.
        #[arg(long)]
        prophecy: Option<PathBuf>,
    },
    /// Evaluate over bounded lassos; exit 0 true, 1 false, 3 input error.
    Oracle {
        ks: PathBuf,
        formula: PathBuf,
        #[arg(long, default_value_t = 4)]
        stem: usize,
        #[arg(long = "loop", default_value_t = 4)]
        loop_: usize,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        /// Model used by sessions that do not send one.
        #[arg(long)]
        ks: Option<PathBuf>,
        #[arg(long)]
        formula: Option<PathBuf>,
        #[arg(long)]
        prophecy: Option<PathBuf>,
    },
}

struct Fail(u8, String);

fn read(p: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(p).map_err(|e| Fail(EXIT_INPUT, format!("{}: {e}", p.display())))
}

fn load(ks: &Path, formula: &Path) -> Result<(KripkeStructure, HyperLtl), Fail> {
    let k = parse_ks(&read(ks)?).map_err(|e| Fail(EXIT_INPUT, format!("{}: {e}", ks.display())))?;
    let f = parse_hyperltl(&read(formula)?).map_err(|e| Fail(EXIT_INPUT, format!("{}: {e}", formula.display())))?;
    Ok((k, f))
}

fn family(f: &HyperLtl, text: Option<String>) -> Result<ProphecyFamily, Fail> {
    match text {
        Some(t) => parse_prophecy_family(&t, f).map_err(|e| Fail(EXIT_INPUT, format!("prophecy: {e}"))),
        None => Ok(ProphecyFamily::default()),
    }
}

fn input<E: std::fmt::Display>(e: E) -> Fail {
    Fail(EXIT_INPUT, e.to_string())
}

fn check(
    ks: &Path,
    formula: &Path,
    prophecy: Option<&Path>,
    mode: ModeArg,
    memory: u32,
    budget: u64,
    out: Option<PathBuf>,
) -> Result<u8, Fail> {
    let (k, f) = load(ks, formula)?;
    let fam = family(&f, prophecy.map(read).transpose()?)?;
    let (kp, g) = with_prophecies(&k, &f, &fam).map_err(input)?;
    let opts = SolveOptions {
        mode: match mode {
            ModeArg::Auto => Mode::Auto,
            ModeArg::Zielonka => Mode::Zielonka,
            ModeArg::ExistsForall => Mode::ExistsForall,
            ModeArg::Bounded => Mode::Bounded,
        },
        bounded: BoundedOptions {
            memory_bound: memory,
            budget,
            ..Default::default()
        },
        manifest: fam.manifest().lines().map(str::to_string).collect(),
    };
    let v = match solve(&kp, &g, &opts) {
        Ok(v) => v,
        Err(e @ SolverError::TooLarge(_)) => {
            println!("verdict: unknown");
            println!("note: {e}");
            return Ok(2);
        }
        Err(e) => return Err(input(e)),
    };
    println!("verdict: {}", v.outcome);
    println!("method: {}", v.method);
    println!("guarantee: {}", v.guarantee);
    if let Some(b) = v.bound {
        println!(
            "search: memory bound {}, {} of {} table entries tried{}",
            b.memory_bound,
            b.evaluations,
            b.budget,
            if b.budget_exhausted { " (budget exhausted)" } else { "" }
        );
    }
    for n in &v.notes {
        println!("note: {n}");
    }
    if v.outcome == Outcome::Proven {
        if let Some(w) = &v.witness {
            let path = out.unwrap_or_else(|| {
                let mut p = formula.as_os_str().to_owned();
                p.push(".cert");
                PathBuf::from(p)
            });
            std::fs::write(&path, export_profile(w)).map_err(|e| input(format!("{}: {e}", path.display())))?;
            println!("certificate: {}", path.display());
        }
    }
    Ok(match v.outcome {
        Outcome::Proven => 0,
        Outcome::Disproven => 1,
        Outcome::Unknown => 2,
    })
}

fn certify(ks: &Path, formula: &Path, cert: &Path, prophecy: Option<&Path>) -> Result<u8, Fail> {
    let (k, f) = load(ks, formula)?;
    let text = read(cert)?;
    let sp = parse_profile(&text).map_err(input)?;
    let fam = if sp.manifest.is_empty() {
        family(&f, prophecy.map(read).transpose()?)?
    } else {
        ProphecyFamily::from_manifest(&sp.manifest.join("\n"), &f).map_err(input)?
    };
    let (kp, g) = with_prophecies(&k, &f, &fam).map_err(input)?;
    let dpa = body_dpa(&g.body).map_err(input)?;
    let game = build_mpg(&kp, &g, &dpa).map_err(input)?;
    let sp = import_profile(&text, &game).map_err(input)?;
    match check_profile(&game, &sp).map_err(input)? {
        CheckOutcome::Pass { product_states } => {
            println!("certificate: pass ({product_states} product states)");
            Ok(0)
        }
        CheckOutcome::Fail(l) => {
            println!("certificate: fail, a play with least recurring color {} is consistent with it", l.color);
            for v in &l.stem {
                println!("  stem  {v}");
            }
            for v in &l.cycle {
                println!("  cycle {v}");
            }
            Ok(1)
        }
    }
}

fn oracle(ks: &Path, formula: &Path, stem: usize, loop_: usize) -> Result<u8, Fail> {
    let (k, f) = load(ks, formula)?;
    let b = LassoBudget::new(stem, loop_).map_err(input)?;
    let r = oracle_check(&k, &f, b);
    println!("oracle: {r} (stem bound {stem}, loop bound {loop_})");
    Ok(if r { 0 } else { 1 })
}

fn serve(
    port: u16,
    bind: &str,
    ks: Option<&Path>,
    formula: Option<&Path>,
    prophecy: Option<&Path>,
) -> Result<u8, Fail> {
    let defaults = Defaults {
        ks: ks.map(read).transpose()?,
        formula: formula.map(read).transpose()?,
        prophecies: prophecy.map(read).transpose()?,
    };
    let rt = tokio::runtime::Runtime::new().map_err(input)?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((bind, port))
            .await
            .map_err(|e| input(format!("cannot bind {bind}:{port}: {e}")))?;
        let addr = listener.local_addr().map_err(input)?;
        println!("listening on http://{addr}");
        println!("port {}", addr.port());
        hypergame_server::serve(listener, AppState::new(defaults))
            .await
            .map_err(input)?;
        Ok(0)
    })
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let r = match &cli.cmd {
        Cmd::Check {
            ks,
            formula,
            prophecy,
            mode,
            memory,
            budget,
            out,
        } => check(ks, formula, prophecy.as_deref(), *mode, *memory, *budget, out.clone()),
        Cmd::Certify {
            ks,
            formula,
            certificate,
            prophecy,
        } => certify(ks, formula, certificate, prophecy.as_deref()),
        Cmd::Oracle {
            ks,
            formula,
            stem,
            loop_,
        } => oracle(ks, formula, *stem, *loop_),
        Cmd::Serve {
            port,
            bind,
            ks,
            formula,
            prophecy,
        } => serve(*port, bind, ks.as_deref(), formula.as_deref(), prophecy.as_deref()),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
