mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use intersub::axiomatic::{ax_to_isc, check_ax, inversion_arrow, inversion_product, isc_to_ax, AxDerivation, AxError};
use intersub::harness::{run_difftest, GenConfig};
use intersub::isc::{invert_constr, prove, prove_exhaustive, Mutation, Search};
use intersub::lambda::{
    check_typing, parse_path, subject_expansion, subject_reduction, Expansion, Judgement, LambdaError, RedexInfo,
    RedexKind, Term, TypingDerivation,
};
use intersub::syntax::parse_sequent_with;
use intersub::types::{ARROW, PROD};
use intersub::{check_isc, IscDerivation, IscError, Sequent, Signature, Type, Undeclared};

use input::{located, named, read};

/// Intersection subtyping: proof search, translations, inversion and
/// typing-derivation transforms.
///
/// Exit status: 0 on success, 1 when the answer is negative (not derivable,
/// rule violation, failed property), 2 on unreadable or invalid input.
#[derive(Parser)]
#[command(name = "intersub", version)]
struct Cli {
    /// Signature file; without it the arrow/product instance is used and
    /// unknown base types are declared on first use.
    #[arg(long, global = true, value_name = "FILE")]
    sig: Option<PathBuf>,
    /// Print only machine-oriented output, one item per line.
    #[arg(long, global = true)]
    compact: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Subtyping in the sequent calculus.
    Sub {
        #[command(subcommand)]
        cmd: SubCmd,
    },
    /// Inverts `⋂ κ(Ai; Bi) <= κ(A; B)` for the arrow or product head.
    Invert {
        #[arg(long, value_enum)]
        head: Head,
        /// `LHS <= RHS`
        input: String,
    },
    /// Typing derivations.
    Type {
        #[command(subcommand)]
        cmd: TypeCmd,
    },
    /// Contracts the redex at a path and transports the derivation.
    Reduce {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Dot-separated child indices, or `root`.
        #[arg(long, default_value = "root")]
        path: String,
        /// Re-check the output and compare its context and type.
        #[arg(long)]
        check_preservation: bool,
    },
    /// Replaces the subterm at a path by a redex contracting to it.
    Expand(ExpandArgs),
    /// Random differential testing of every component.
    Difftest(DifftestArgs),
}

#[derive(Subcommand)]
enum SubCmd {
    /// Decides `A <= B` or `A1, ..., An |- C` with the prover.
    Prove {
        input: String,
        /// Print the cut-free derivation.
        #[arg(long)]
        emit: bool,
    },
    /// Decides with the exhaustive reference search.
    Oracle {
        input: String,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        #[arg(long)]
        emit: bool,
    },
    /// Translates a derivation between the two presentations.
    Translate {
        #[arg(long, value_enum)]
        dir: Direction,
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum TypeCmd {
    /// Checks a typing derivation, optionally preceded by the judgement it
    /// should conclude.
    Check {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, default_value = "root")]
    path: String,
    /// The redex, which must contract to the subterm at the path.
    #[arg(long, conflicts_with = "kind", required_unless_present = "kind")]
    redex: Option<String>,
    /// Projection redex to build around the subterm.
    #[arg(long, value_enum)]
    kind: Option<ProjKind>,
    /// The pair component that the projection discards.
    #[arg(long, default_value = "\\z. z", requires = "kind")]
    erased: String,
}

#[derive(Args)]
struct DifftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum type size.
    #[arg(long, default_value_t = 4)]
    size: usize,
    /// Cases per property.
    #[arg(long, default_value_t = 200)]
    cases: usize,
    #[arg(long, default_value_t = 2)]
    ctx: usize,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long)]
    json: bool,
    #[arg(long, hide = true, value_enum)]
    mutant: Option<Mutant>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Head {
    Arrow,
    Prod,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Isc2ax,
    Ax2isc,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProjKind {
    Proj1,
    Proj2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mutant {
    SkipWidth,
    FirstSingleton,
}

/// A negative answer: printed, then exit status 1.
struct Negative(String);

type Outcome = Result<Result<(), Negative>>;

struct Ctx {
    sig: Signature,
    mode: Undeclared,
    compact: bool,
}

impl Ctx {
    fn say(&self, line: impl AsRef<str>) {
        if !self.compact {
            println!("{}", line.as_ref());
        }
    }

    fn sequent(&mut self, text: &str) -> Result<Sequent> {
        let (ctx, goal) = parse_sequent_with(text, &mut self.sig, self.mode).map_err(|e| located(&e, text, "input"))?;
        Ok(Sequent::new(ctx, goal))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = input::signature(cli.sig.as_deref()).and_then(|(sig, mode)| {
        let mut ctx = Ctx {
            sig,
            mode,
            compact: cli.compact,
        };
        run(cli.cmd, &mut ctx)
    });
    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Negative(msg))) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd, cx: &mut Ctx) -> Outcome {
    match cmd {
        Cmd::Sub { cmd } => match cmd {
            SubCmd::Prove { input, emit } => sub_prove(cx, &input, emit),
            SubCmd::Oracle { input, budget, emit } => sub_oracle(cx, &input, budget, emit),
            SubCmd::Translate { dir, input } => translate(cx, dir, &input),
        },
        Cmd::Invert { head, input } => invert(cx, head, &input),
        Cmd::Type {
            cmd: TypeCmd::Check { input },
        } => type_check(cx, &input),
        Cmd::Reduce {
            input,
            path,
            check_preservation,
        } => reduce(cx, &input, &path, check_preservation),
        Cmd::Expand(args) => expand(cx, &args),
        Cmd::Difftest(args) => difftest(cx, &args),
    }
}

fn emit_isc(cx: &Ctx, d: &IscDerivation) {
    println!("{}", d.to_text(cx.compact).trim_end());
}

fn sub_prove(cx: &mut Ctx, text: &str, emit: bool) -> Outcome {
    let s = cx.sequent(text)?;
    match prove(&s, &cx.sig)? {
        Some(d) => {
            cx.say(format!("derivable: {s}"));
            if emit {
                emit_isc(cx, &d);
            }
            Ok(Ok(()))
        }
        None => Ok(Err(Negative(format!("not derivable: {s}")))),
    }
}

fn sub_oracle(cx: &mut Ctx, text: &str, budget: usize, emit: bool) -> Outcome {
    let s = cx.sequent(text)?;
    match prove_exhaustive(&s, &cx.sig, budget)? {
        Search::Proved(d) => {
            cx.say(format!("derivable: {s}"));
            if emit {
                emit_isc(cx, &d);
            }
            Ok(Ok(()))
        }
        Search::NotDerivable => Ok(Err(Negative(format!("not derivable: {s}")))),
        Search::BudgetExceeded => bail!("search budget of {budget} nodes exhausted on `{s}`"),
    }
}

/// Rule violations are negative answers; everything else is bad input.
fn isc_verdict(e: IscError, origin: &str, text: &str) -> Outcome {
    match e {
        IscError::RuleViolation { .. } => Ok(Err(Negative(format!("{origin}: {e}")))),
        other => Err(located(&other, text, origin)),
    }
}

fn ax_verdict(e: AxError, origin: &str, text: &str) -> Outcome {
    match e {
        AxError::RuleViolation { .. } | AxError::Isc(IscError::RuleViolation { .. }) | AxError::NotDerivable => {
            Ok(Err(Negative(format!("{origin}: {e}"))))
        }
        other => Err(located(&other, text, origin)),
    }
}

fn lambda_verdict(e: LambdaError, origin: &str, text: &str) -> Outcome {
    match e {
        LambdaError::RuleViolation { .. } | LambdaError::Isc(IscError::RuleViolation { .. }) => {
            Ok(Err(Negative(format!("{origin}: {e}"))))
        }
        other => Err(located(&other, text, origin)),
    }
}

fn translate(cx: &mut Ctx, dir: Direction, path: &PathBuf) -> Outcome {
    let text = read(path)?;
    let origin = named(path);
    match dir {
        Direction::Isc2ax => {
            let d = match IscDerivation::from_text(&text, &mut cx.sig, cx.mode) {
                Ok(d) => d,
                Err(e) => return isc_verdict(e, &origin, &text),
            };
            if let Err(e) = check_isc(&d, &cx.sig) {
                return isc_verdict(e, &origin, &text);
            }
            let a = isc_to_ax(&d, &cx.sig).map_err(|e| anyhow!("{origin}: {e}"))?;
            cx.say(format!("{} <= {}", a.lhs(), a.rhs()));
            println!("{}", a.to_text(cx.compact).trim_end());
        }
        Direction::Ax2isc => {
            let d = match AxDerivation::from_text(&text, &mut cx.sig, cx.mode) {
                Ok(d) => d,
                Err(e) => return ax_verdict(e, &origin, &text),
            };
            if let Err(e) = check_ax(&d, &cx.sig) {
                return ax_verdict(e, &origin, &text);
            }
            let i = ax_to_isc(&d, &cx.sig).map_err(|e| anyhow!("{origin}: {e}"))?;
            cx.say(i.conclusion().to_string());
            emit_isc(cx, &i);
        }
    }
    Ok(Ok(()))
}

fn flatten(t: &Type, out: &mut Vec<Type>) {
    match t {
        Type::Inter(a, b) => {
            flatten(a, out);
            flatten(b, out);
        }
        other => out.push(other.clone()),
    }
}

fn invert(cx: &mut Ctx, head: Head, text: &str) -> Outcome {
    let s = cx.sequent(text)?;
    let name = match head {
        Head::Arrow => ARROW,
        Head::Prod => PROD,
    };
    let mut family = Vec::new();
    for t in &s.context {
        flatten(t, &mut family);
    }
    let top = cx.sig.top_type().ok();
    family.retain(|t| Some(t) != top.as_ref());
    for t in family.iter().chain([&s.goal]) {
        if t.head() != Some(name) {
            bail!("`{t}` does not have the {name} head");
        }
    }
    let seq = Sequent::new(family.clone(), s.goal.clone());
    let w = match invert_constr(&seq, &cx.sig) {
        Ok(w) => w,
        Err(IscError::NotDerivable) => return Ok(Err(Negative(format!("not derivable: {s}")))),
        Err(e) => return Err(anyhow!(e)),
    };
    let arg = |t: &Type, contra: bool, i: usize| match t {
        Type::Constr { contra: c, co, .. } => (if contra { c } else { co })[i].clone(),
        Type::Inter(..) => unreachable!("heads checked"),
    };
    let ax = |e: AxError| anyhow!("axiomatic inversion: {e}");
    match head {
        Head::Arrow => {
            let doms: Vec<Type> = family.iter().map(|t| arg(t, true, 0)).collect();
            let cods: Vec<Type> = family.iter().map(|t| arg(t, false, 0)).collect();
            let (a, b) = (arg(&s.goal, true, 0), arg(&s.goal, false, 0));
            let inv = inversion_arrow(&doms, &cods, &a, &b, &cx.sig).map_err(ax)?;
            let selected: Vec<String> = inv.selected.iter().map(|j| j.to_string()).collect();
            println!("selected: {}", selected.join(" "));
            for (q, d) in inv.domains.iter().enumerate() {
                cx.say(format!("domain {}: {} <= {}", inv.selected[q], d.lhs(), d.rhs()));
                println!("{}", d.to_text(cx.compact).trim_end());
            }
            cx.say(format!("codomain: {} <= {}", inv.codomain.lhs(), inv.codomain.rhs()));
            println!("{}", inv.codomain.to_text(cx.compact).trim_end());
        }
        Head::Prod => {
            let firsts: Vec<Type> = family.iter().map(|t| arg(t, false, 0)).collect();
            let seconds: Vec<Type> = family.iter().map(|t| arg(t, false, 1)).collect();
            let (a, b) = (arg(&s.goal, false, 0), arg(&s.goal, false, 1));
            let inv = inversion_product(&firsts, &seconds, &a, &b, &cx.sig).map_err(ax)?;
            let selected: Vec<String> = w.selected.iter().map(|j| j.to_string()).collect();
            println!("selected: {}", selected.join(" "));
            for (label, d) in [("first", &inv.first), ("second", &inv.second)] {
                cx.say(format!("{label}: {} <= {}", d.lhs(), d.rhs()));
                println!("{}", d.to_text(cx.compact).trim_end());
            }
        }
    }
    Ok(Ok(()))
}

/// A typing derivation file, optionally led by a line holding the judgement
/// it concludes.
fn load_checked(cx: &mut Ctx, path: &PathBuf) -> Result<Result<TypingDerivation, Outcome>> {
    let text = read(path)?;
    let origin = named(path);
    let trimmed = text.trim_start();
    let (head, body) = match trimmed.starts_with('(') {
        true => ("", trimmed),
        false => trimmed.split_once('\n').unwrap_or((trimmed, "")),
    };
    let expected = match head.trim() {
        "" => None,
        j => Some(Judgement::parse_with(j, &mut cx.sig, cx.mode).map_err(|e| located(&e, j, &origin))?),
    };
    let d = match TypingDerivation::from_text(body, &mut cx.sig, cx.mode) {
        Ok(d) => d,
        Err(e) => return Ok(Err(lambda_verdict(e, &origin, body))),
    };
    if let Err(e) = check_typing(&d, &cx.sig) {
        return Ok(Err(lambda_verdict(e, &origin, body)));
    }
    if let Some(j) = expected {
        if &j != d.judgement() {
            return Ok(Err(Ok(Err(Negative(format!(
                "{origin}: derivation concludes `{}`, not `{j}`",
                d.judgement()
            ))))));
        }
    }
    Ok(Ok(d))
}

fn type_check(cx: &mut Ctx, path: &PathBuf) -> Outcome {
    let d = match load_checked(cx, path)? {
        Ok(d) => d,
        Err(outcome) => return outcome,
    };
    println!(
        "{}",
        if cx.compact {
            d.judgement().to_string()
        } else {
            format!("ok: {}", d.judgement())
        }
    );
    Ok(Ok(()))
}

fn reduce(cx: &mut Ctx, path: &PathBuf, at: &str, check: bool) -> Outcome {
    let d = match load_checked(cx, path)? {
        Ok(d) => d,
        Err(outcome) => return outcome,
    };
    let p = parse_path(at).map_err(|e| anyhow!("--path: {e}"))?;
    let kind: RedexKind = d
        .term()
        .at(&p)
        .ok_or_else(|| anyhow!("--path {at}: no subterm of `{}` there", d.term()))?
        .redex_kind()
        .ok_or_else(|| anyhow!("--path {at}: `{}` is not a redex", d.term().at(&p).expect("exists")))?;
    let r = subject_reduction(&d, &p, kind, &cx.sig).map_err(|e| anyhow!(e))?;
    if check {
        if let Err(e) = check_typing(&r, &cx.sig) {
            return Ok(Err(Negative(format!("reduct derivation rejected: {e}"))));
        }
        if r.context() != d.context() || r.ty() != d.ty() {
            return Ok(Err(Negative(format!("type not preserved: {}", r.judgement()))));
        }
    }
    cx.say(format!("{kind} at {at}: {}", r.judgement()));
    println!("{}", r.to_text(cx.compact).trim_end());
    if check {
        cx.say("preservation: ok");
    }
    Ok(Ok(()))
}

fn expand(cx: &mut Ctx, args: &ExpandArgs) -> Outcome {
    let d = match load_checked(cx, &args.input)? {
        Ok(d) => d,
        Err(outcome) => return outcome,
    };
    let p = parse_path(&args.path).map_err(|e| anyhow!("--path: {e}"))?;
    let at = d
        .term()
        .at(&p)
        .ok_or_else(|| anyhow!("--path {}: no subterm of `{}` there", args.path, d.term()))?
        .clone();
    let parse = |flag: &str, text: &str| Term::parse(text).map_err(|e| located(&e, text, flag));
    let info = match (&args.redex, args.kind) {
        (Some(r), _) => {
            let redex = parse("--redex", r)?;
            let (contractum, _) = redex
                .contract()
                .ok_or_else(|| anyhow!("--redex: `{redex}` is not a redex"))?;
            if contractum != at {
                bail!("--redex: `{redex}` contracts to `{contractum}`, not to `{at}`");
            }
            RedexInfo::from_redex(p, &redex).expect("checked to be a redex")
        }
        (None, Some(kind)) => {
            let erased = parse("--erased", &args.erased)?;
            let expansion = match kind {
                ProjKind::Proj1 => Expansion::Proj1 { erased },
                ProjKind::Proj2 => Expansion::Proj2 { erased },
            };
            RedexInfo { path: p, expansion }
        }
        (None, None) => unreachable!("clap requires one of them"),
    };
    let e = subject_expansion(&d, &info, &cx.sig).map_err(|e| anyhow!(e))?;
    cx.say(format!("expanded: {}", e.judgement()));
    println!("{}", e.to_text(cx.compact).trim_end());
    Ok(Ok(()))
}

fn difftest(cx: &mut Ctx, args: &DifftestArgs) -> Outcome {
    let mut sig = cx.sig.clone();
    if cx.mode == Undeclared::DeclareAtoms {
        for atom in ["X", "Y"] {
            if !sig.contains(atom) {
                sig.declare_atom(atom)?;
            }
        }
    }
    let cfg = GenConfig {
        seed: args.seed,
        max_type_size: args.size,
        max_ctx_len: args.ctx,
        max_term_depth: args.depth,
        signature: sig,
        cases: args.cases,
        mutation: match args.mutant {
            None => Mutation::None,
            Some(Mutant::SkipWidth) => Mutation::SkipWidthCheck,
            Some(Mutant::FirstSingleton) => Mutation::FirstQualifiedSingleton,
        },
        ..GenConfig::default()
    };
    let rep = run_difftest(&cfg);
    if args.json {
        println!("{}", rep.to_json());
    } else {
        println!("{}", rep.to_text());
    }
    if rep.passed() {
        Ok(Ok(()))
    } else {
        Ok(Err(Negative(format!("{} property failures", rep.total_failures()))))
    }
}
