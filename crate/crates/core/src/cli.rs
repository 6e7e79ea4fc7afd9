//! Command-line front end. Every input is a JSON file path; output is one
//! versioned JSON document on stdout, or in the `--out` file.
//!
//! Exit codes: 0 on success, 1 on a domain error (printed as
//! `{"version":1,"error":kind,"message":…}`), 2 on a usage error.

use crate::codes::horiz::HorizCode;
use crate::codes::{check_dominates_exit, ChallengeCode, FunctionFamilyCode, DEFAULT_MAX_LEVEL};
use crate::crrel::{check_morphism, FiniteRelation, MorphismWitness};
use crate::decode::{decode_from_domination, horiz_decode, DecodeParams};
use crate::encode::{encode_f, prefix_code, ASet, DEFAULT_MAX_BITS};
use crate::error::Error;
use crate::games::{ensures, limit_ensure, play_fusion, Baire1Family, EnsureReport, GameBounds};
use crate::hechler::{check_certificate, fuse, Condition, FuseBounds, FusionCertificate, ToyModel};
use crate::json;
use crate::nat::{as_json, vec_json, Nat};
use crate::reach::{HFun, QuotientAutomaton};
use crate::seq::{EventuallyPeriodicSeq, NodeSeq};
use crate::tree::PresentedTree;
use crate::{gen, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "baire", version, about = "Coding, decoding, reachability and fusion on Baire space")]
struct Cli {
    /// Seed for the `gen` subcommand.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override a search bound, as NAME=N. Repeatable.
    #[arg(long = "bound", global = true, value_name = "NAME=N")]
    bounds: Vec<String>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// f_a(x)(n), or with --t the prefix code of a node.
    Encode {
        #[arg(long, conflicts_with_all = ["a", "x", "n"], required_unless_present_all = ["a", "x", "n"])]
        t: Option<PathBuf>,
        #[arg(long, requires_all = ["x", "n"])]
        a: Option<PathBuf>,
        #[arg(long)]
        x: Option<PathBuf>,
        #[arg(long)]
        n: Option<u64>,
    },
    /// The chain e_0, …, e_L coding the prefixes of a.
    Aset {
        #[arg(long)]
        a: PathBuf,
        #[arg(long, visible_alias = "levels")]
        upto: usize,
    },
    /// Value of a code at an eventually periodic point.
    Eval {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        x: PathBuf,
    },
    /// Inf and sup of a code over a cylinder.
    Inf {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        t: PathBuf,
    },
    /// Whether a code dominates Exit([[a]]).
    Dominates {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        a: PathBuf,
    },
    /// Recover a↾N from a code dominating Exit([[a]]).
    Decode {
        #[arg(long)]
        g: PathBuf,
        #[arg(long = "N")]
        n: usize,
        /// Longest seed tried (the thresholdSearchBound bound).
        #[arg(long)]
        l0: Option<usize>,
        /// Largest child tried at each step (the childSearchBound bound).
        #[arg(long = "child-bound")]
        child_bound: Option<u64>,
    },
    /// Recover a hidden subset of a finite alphabet.
    HorizDecode {
        #[arg(long)]
        g: PathBuf,
        #[arg(long, visible_alias = "size")]
        alphabet: usize,
    },
    /// Reachability ranks of every state.
    ReachRank {
        #[arg(long)]
        automaton: PathBuf,
    },
    /// Blocking side condition for the unreachable states.
    Block {
        #[arg(long)]
        automaton: PathBuf,
    },
    /// Extend a node into the accepted set, avoiding A and respecting h.
    Extend {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        t: PathBuf,
        #[arg(long)]
        h: Option<PathBuf>,
    },
    /// Fusion certificate for a toy model.
    Fuse {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "N")]
        n: usize,
    },
    /// Independently re-validate a fusion certificate.
    CheckCert {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Whether a condition ensures j(x) = m.
    Ensure {
        #[arg(long)]
        j: PathBuf,
        #[arg(long)]
        m: u8,
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        a: Option<PathBuf>,
    },
    /// Fusion driven by per-coordinate strategies.
    PlayFusion {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long = "N")]
        n: usize,
    },
    /// Alternation procedure for an eventually constant family.
    LimitEnsure {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        a: Option<PathBuf>,
    },
    /// Norm of a finite relation.
    CrrelNorm {
        #[arg(long)]
        r: PathBuf,
    },
    /// Check a morphism between finite relations.
    CrrelMorph {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        w: PathBuf,
    },
    /// Random instance from the seeded generators.
    Gen {
        #[arg(long)]
        kind: GenKind,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GenKind {
    Seq,
    Automaton,
    BitCode,
    Model,
    Family,
    Relation,
    Morphism,
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

struct Outcome {
    doc: Value,
    code: i32,
}

fn ok<T: Serialize>(v: &T) -> std::result::Result<Outcome, Failure> {
    Ok(Outcome { doc: json::document(v)?, code: 0 })
}

fn read<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn read_a(path: &Option<PathBuf>) -> Result<EventuallyPeriodicSeq> {
    match path {
        Some(p) => read(p),
        None => Ok(EventuallyPeriodicSeq::constant(Nat::from(0u32))),
    }
}

/// `--bound NAME=N` values, restricted to the names a command understands.
struct Bounds(BTreeMap<String, u64>);

impl Bounds {
    fn parse(raw: &[String], allowed: &[&str]) -> std::result::Result<Self, Failure> {
        let mut map = BTreeMap::new();
        for item in raw {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("--bound expects NAME=N, got {item}")))?;
            if !allowed.contains(&name) {
                return Err(Failure::Usage(format!(
                    "unknown bound {name}; this command accepts: {}",
                    if allowed.is_empty() { "none".to_string() } else { allowed.join(", ") }
                )));
            }
            let v = value.parse().map_err(|_| Failure::Usage(format!("bound {name} needs a natural, got {value}")))?;
            map.insert(name.to_string(), v);
        }
        Ok(Bounds(map))
    }

    fn get(&self, name: &str, default: u64) -> u64 {
        self.0.get(name).copied().unwrap_or(default)
    }

    fn size(&self, name: &str, default: usize) -> usize {
        self.get(name, default as u64) as usize
    }
}

const GAME_BOUNDS: &[&str] = &["maxNodes", "extraDepth", "increasingBumps"];
const FUSE_BOUNDS: &[&str] = &["witnessBound", "extraDepth", "maxNodes", "increasingBumps"];

fn game_bounds(b: &Bounds) -> GameBounds {
    let d = GameBounds::default();
    GameBounds {
        max_nodes: b.size("maxNodes", d.max_nodes),
        extra_depth: b.size("extraDepth", d.extra_depth),
        increasing_bumps: b.get("increasingBumps", 0) != 0,
    }
}

fn fuse_bounds(b: &Bounds) -> FuseBounds {
    let d = FuseBounds::default();
    FuseBounds {
        witness_bound: b.get("witnessBound", d.witness_bound),
        extra_depth: b.size("extraDepth", d.extra_depth),
        max_nodes: b.size("maxNodes", d.max_nodes),
        increasing_bumps: b.get("increasingBumps", 0) != 0,
    }
}

#[derive(Serialize)]
struct NatDoc<'a> {
    #[serde(with = "as_json")]
    code: &'a Nat,
}

#[derive(Serialize)]
struct ChainDoc {
    #[serde(with = "vec_json")]
    chain: Vec<Nat>,
}

fn run(cli: Cli) -> std::result::Result<Outcome, Failure> {
    let raw = &cli.bounds;
    match cli.cmd {
        Cmd::Encode { t: Some(t), .. } => {
            Bounds::parse(raw, &[])?;
            let t: NodeSeq = read(&t)?;
            ok(&NatDoc { code: &prefix_code(&t) })
        }
        Cmd::Encode { a, x, n, .. } => {
            let b = Bounds::parse(raw, &["maxBits"])?;
            let (Some(a), Some(x), Some(n)) = (a, x, n) else {
                return Err(Failure::Usage("encode needs --t, or --a, --x and --n".into()));
            };
            let set = ASet::with_max_bits(read(&a)?, b.get("maxBits", DEFAULT_MAX_BITS));
            let x: EventuallyPeriodicSeq = read(&x)?;
            ok(&json!({ "value": crate::nat::JsonNat(encode_f(&set, &x, &Nat::from(n))) }))
        }
        Cmd::Aset { a, upto: levels } => {
            let b = Bounds::parse(raw, &["maxBits"])?;
            let set = ASet::with_max_bits(read(&a)?, b.get("maxBits", DEFAULT_MAX_BITS));
            let mut chain = vec![set.element(0)?];
            chain.extend(set.chain(levels)?);
            ok(&ChainDoc { chain })
        }
        Cmd::Eval { code, x } => {
            Bounds::parse(raw, &[])?;
            let code: ChallengeCode = read(&code)?;
            let x: EventuallyPeriodicSeq = read(&x)?;
            ok(&json!({ "value": crate::nat::JsonNat(code.eval(&x)) }))
        }
        Cmd::Inf { code, t } => {
            Bounds::parse(raw, &[])?;
            let code: ChallengeCode = read(&code)?;
            let t: NodeSeq = read(&t)?;
            let inf = code.inf_over_cylinder(&t);
            let sup = code.sup_over_cylinder(&t).map(crate::nat::JsonNat);
            ok(&json!({
                "inf": crate::nat::JsonNat(inf.value),
                "witness": inf.witness,
                "sup": sup,
            }))
        }
        Cmd::Dominates { code, a } => {
            let b = Bounds::parse(raw, &["maxLevel"])?;
            let code: ChallengeCode = read(&code)?;
            let tree = PresentedTree::single(read(&a)?);
            ok(&check_dominates_exit(&code, &tree, b.size("maxLevel", DEFAULT_MAX_LEVEL))?)
        }
        Cmd::Decode { g, n, l0, child_bound } => {
            let b = Bounds::parse(raw, &["thresholdSearchBound", "childSearchBound", "candidateBound"])?;
            let d = DecodeParams::default();
            let params = DecodeParams {
                target_length: n,
                threshold_search_bound: l0.unwrap_or(b.size("thresholdSearchBound", d.threshold_search_bound)),
                child_search_bound: child_bound.unwrap_or(b.get("childSearchBound", d.child_search_bound)),
                candidate_bound: b.size("candidateBound", d.candidate_bound),
            };
            let g: ChallengeCode = read(&g)?;
            let found = decode_from_domination(&g, &params)?;
            let candidates: Vec<String> = found.iter().map(|c| c.node.to_string()).collect();
            let thresholds: Vec<usize> = found.iter().map(|c| c.threshold).collect();
            ok(&json!({ "candidates": candidates, "thresholds": thresholds }))
        }
        Cmd::HorizDecode { g, alphabet: size } => {
            let b = Bounds::parse(raw, &["iterations"])?;
            let g: HorizCode = read(&g)?;
            ok(&horiz_decode(&g, size, b.size("iterations", size + 1))?)
        }
        Cmd::ReachRank { automaton } => {
            Bounds::parse(raw, &[])?;
            let aut: QuotientAutomaton = read(&automaton)?;
            ok(&json!({ "ranks": aut.ranks() }))
        }
        Cmd::Block { automaton } => {
            Bounds::parse(raw, &[])?;
            let aut: QuotientAutomaton = read(&automaton)?;
            let ranks = aut.ranks();
            let blocked: Vec<usize> = (0..ranks.len()).filter(|&q| ranks[q].is_none()).collect();
            ok(&json!({ "blockedStates": blocked, "h": aut.blocking_h() }))
        }
        Cmd::Extend { automaton, a, t, h } => {
            let b = Bounds::parse(raw, &["witnessBound"])?;
            let aut: QuotientAutomaton = read(&automaton)?;
            let set = ASet::new(read(&a)?);
            let t: NodeSeq = read(&t)?;
            let h: HFun = match h {
                Some(p) => read(&p)?,
                None => HFun::zero(),
            };
            h.validate()?;
            let stem = aut.find_extension(&t, &set, &h, &Nat::from(b.get("witnessBound", 1_000_000)))?;
            ok(&json!({ "stem": stem }))
        }
        Cmd::Fuse { a, model, n } => {
            let b = Bounds::parse(raw, FUSE_BOUNDS)?;
            let a: EventuallyPeriodicSeq = read(&a)?;
            let model: ToyModel = read(&model)?;
            ok(&fuse(&a, &model, n, &fuse_bounds(&b))?)
        }
        Cmd::CheckCert { cert } => {
            Bounds::parse(raw, &[])?;
            let cert: FusionCertificate = read(&cert)?;
            let report = check_certificate(&cert);
            let code = if report.valid { 0 } else { 1 };
            Ok(Outcome { doc: json::document(&report)?, code })
        }
        Cmd::Ensure { j, m, p, a } => {
            let b = Bounds::parse(raw, GAME_BOUNDS)?;
            let j: ChallengeCode = read(&j)?;
            let p: Condition = read(&p)?;
            let set = ASet::new(read_a(&a)?);
            let strategy = ensures(&p, &j, m, &set, &game_bounds(&b))?;
            ok(&EnsureReport::new(&p, &j, m, &strategy))
        }
        Cmd::PlayFusion { a, g, n } => {
            let b = Bounds::parse(raw, GAME_BOUNDS)?;
            let a: EventuallyPeriodicSeq = read(&a)?;
            let g: FunctionFamilyCode = read(&g)?;
            ok(&play_fusion(&a, &g, n, &game_bounds(&b))?)
        }
        Cmd::LimitEnsure { family, p, a } => {
            let b = Bounds::parse(raw, GAME_BOUNDS)?;
            let fam: Baire1Family = read(&family)?;
            let p: Condition = read(&p)?;
            let set = ASet::new(read_a(&a)?);
            ok(&limit_ensure(&fam, &p, &set, &game_bounds(&b))?)
        }
        Cmd::CrrelNorm { r } => {
            Bounds::parse(raw, &[])?;
            let r: FiniteRelation = read(&r)?;
            ok(&json!({ "norm": r.norm()? }))
        }
        Cmd::CrrelMorph { a, b, w } => {
            Bounds::parse(raw, &[])?;
            let a: FiniteRelation = read(&a)?;
            let b: FiniteRelation = read(&b)?;
            let w: MorphismWitness = read(&w)?;
            let morphism = check_morphism(&a, &b, &w)?;
            ok(&json!({ "morphism": morphism, "normA": a.norm().ok(), "normB": b.norm().ok() }))
        }
        Cmd::Gen { kind } => {
            Bounds::parse(raw, &[])?;
            let r = &mut gen::rng(cli.seed);
            match kind {
                GenKind::Seq => ok(&gen::seq(r, 3, 4, 9)),
                GenKind::Automaton => ok(&gen::automaton(r, 5, 4)),
                GenKind::BitCode => ok(&gen::bit_code(r)),
                GenKind::Model => ok(&gen::toy_model(r, 8)),
                GenKind::Family => ok(&gen::family(r, 4)),
                GenKind::Relation => ok(&gen::relation(r, 6, 5)),
                GenKind::Morphism => {
                    let (a, b, w) = gen::relation_with_morphism(r);
                    ok(&json!({ "a": a, "b": b, "w": w }))
                }
            }
        }
    }
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code. Documents go to `stdout`, diagnostics to `stderr`.
pub fn dispatch(argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let out = cli.out.clone();
    let (doc, code) = match run(cli) {
        Ok(o) => (o.doc, o.code),
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return 2;
        }
        Err(Failure::Domain(e)) => (
            json!({ "version": json::VERSION, "error": e.kind(), "message": e.to_string() }),
            1,
        ),
    };
    let text = json::render(&doc);
    let written = match out {
        Some(path) if code == 0 => std::fs::write(&path, &text).map_err(|e| e.to_string()),
        _ => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return 1;
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let argv: Vec<String> = std::iter::once("baire").chain(args.iter().copied()).map(String::from).collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = dispatch(&argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(&["--frobnicate"]).0, 2);
        assert_eq!(run_args(&["gen", "--kind", "seq", "--bound", "nope=3"]).0, 2);
        assert_eq!(run_args(&["gen", "--kind", "seq", "--bound", "x"]).0, 2);
    }

    #[test]
    fn gen_is_deterministic() {
        let a = run_args(&["gen", "--kind", "model", "--seed", "9"]);
        let b = run_args(&["gen", "--kind", "model", "--seed", "9"]);
        assert_eq!(a.0, 0);
        assert_eq!(a, b);
        assert!(a.1.contains("\"version\": 1"));
    }

    #[test]
    fn missing_file_is_a_domain_error() {
        let (code, out) = run_args(&["crrel-norm", "--r", "/nonexistent/r.json"]);
        assert_eq!(code, 1);
        assert!(out.contains("\"error\": \"InvalidInput\""));
    }
}
