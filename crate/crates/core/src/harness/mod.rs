//! Random generators and the differential tester.
//!
//! Every case draws from its own ChaCha8 stream, seeded from the run seed,
//! the generator it belongs to and its index, so a counterexample can be
//! regenerated from the seed printed next to it.

mod gen;
mod report;
mod sweep;
mod typed;

use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::axiomatic::{ax_to_isc, check_ax, inversion_arrow, inversion_product, isc_to_ax, AxDerivation, AxRule};
use crate::isc::{
    check_isc, decide_with, derive_contract, derive_cut, invert_constr, prove, prove_exhaustive, IscDerivation,
    Mutation, Sequent,
};
use crate::lambda::{check_typing, reduce_at, subject_expansion, subject_reduction, RedexInfo, Term, TypingDerivation};
use crate::types::{big_inter, Signature, Type, ARROW};

pub use report::{Counterexample, PropertyReport, Report};
pub use sweep::{enumerate_types, shrink_sequent, sweep, SweepReport};

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub seed: u64,
    pub max_type_size: usize,
    pub max_ctx_len: usize,
    /// Depth bound for λ-terms and for axiomatic derivations.
    pub max_term_depth: usize,
    pub signature: Signature,
    /// Cases per property in [`run_difftest`].
    pub cases: usize,
    /// Probability that a generated λ-term node is a redex.
    pub redex_bias: f64,
    /// Node budget of the reference search.
    pub budget: usize,
    #[doc(hidden)]
    pub mutation: Mutation,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_type_size: 4,
            max_ctx_len: 2,
            max_term_depth: 4,
            signature: Signature::arrow_product(["X", "Y"]),
            cases: 200,
            redex_bias: 0.5,
            budget: 200_000,
            mutation: Mutation::None,
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of case `index` of generator `stream` in a run seeded with `seed`.
pub fn case_seed(seed: u64, stream: u64, index: usize) -> u64 {
    splitmix(seed ^ splitmix(stream.wrapping_mul(0x1_0000_0001) ^ splitmix(index as u64)))
}

fn case_rng(seed: u64, stream: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(case_seed(seed, stream, index))
}

mod stream {
    pub const TYPE: u64 = 1;
    pub const SEQUENT: u64 = 2;
    pub const DERIVABLE: u64 = 3;
    pub const AX: u64 = 4;
    pub const RULE: u64 = 5;
    pub const TERM: u64 = 6;
    pub const TYPED: u64 = 7;
    pub const EXPANSION: u64 = 8;
    pub const ARROW_FAMILY: u64 = 9;
    pub const CUT: u64 = 10;
    pub const CONTRACT: u64 = 11;
    pub const PROD_FAMILY: u64 = 12;
}

fn collect<T>(n: usize, mut f: impl FnMut(usize) -> Option<T>) -> Vec<T> {
    (0..n).map_while(&mut f).collect()
}

pub fn gen_type(cfg: &GenConfig, n: usize) -> Vec<Type> {
    collect(n, |i| {
        gen::ty(
            &mut case_rng(cfg.seed, stream::TYPE, i),
            &cfg.signature,
            cfg.max_type_size,
        )
    })
}

pub fn gen_sequent(cfg: &GenConfig, n: usize) -> Vec<Sequent> {
    collect(n, |i| {
        let mut rng = case_rng(cfg.seed, stream::SEQUENT, i);
        gen::sequent(&mut rng, &cfg.signature, cfg.max_type_size, cfg.max_ctx_len)
    })
}

/// Sequents that are derivable by construction.
pub fn gen_derivable(cfg: &GenConfig, n: usize) -> Vec<Sequent> {
    collect(n, |i| {
        let mut rng = case_rng(cfg.seed, stream::DERIVABLE, i);
        gen::derivable(&mut rng, &cfg.signature, cfg.max_type_size, cfg.max_ctx_len)
    })
}

pub fn gen_ax_derivation(cfg: &GenConfig, n: usize) -> Vec<AxDerivation> {
    collect(n, |i| {
        let rng = case_rng(cfg.seed, stream::AX, i);
        gen::ax_derivation(rng, &cfg.signature, cfg.max_type_size, cfg.max_term_depth)
    })
}

/// Derivations ending in `rule`; empty when the signature has no
/// constructor the rule applies to.
pub fn gen_rule_instance(cfg: &GenConfig, rule: AxRule, n: usize) -> Vec<AxDerivation> {
    collect(n, |i| {
        let rng = case_rng(cfg.seed ^ rule as u64, stream::RULE, i);
        gen::rule_instance(rng, &cfg.signature, rule, cfg.max_type_size, cfg.max_term_depth.min(2))
    })
}

/// Sequents `κ(A1;B1), ..., κ(Ak;Bk) ⊢ κ(A;B)` that are derivable, for the
/// arrow (`arrow = true`) or the product constructor.
pub fn gen_homogeneous(cfg: &GenConfig, arrow: bool, n: usize) -> Vec<Sequent> {
    collect(n, |i| {
        let family = if arrow {
            stream::ARROW_FAMILY
        } else {
            stream::PROD_FAMILY
        };
        let mut rng = case_rng(cfg.seed, family, i);
        gen::homogeneous(
            &mut rng,
            &cfg.signature,
            arrow,
            cfg.max_type_size,
            cfg.max_ctx_len.max(1),
        )
    })
}

/// Pairs `(Γ ⊢ A, Δ,A,Σ ⊢ C, |Δ|)` of cut-free derivations.
pub fn gen_cut_pair(cfg: &GenConfig, n: usize) -> Vec<(IscDerivation, IscDerivation, usize)> {
    collect(n, |i| {
        let mut rng = case_rng(cfg.seed, stream::CUT, i);
        gen::cut_pair(&mut rng, &cfg.signature, cfg.max_type_size, cfg.max_ctx_len)
    })
}

/// Derivations with equal hypotheses at `pos` and `pos + 1`.
pub fn gen_contraction_case(cfg: &GenConfig, n: usize) -> Vec<(IscDerivation, usize)> {
    collect(n, |i| {
        let mut rng = case_rng(cfg.seed, stream::CONTRACT, i);
        gen::contraction_case(&mut rng, &cfg.signature, cfg.max_type_size, cfg.max_ctx_len)
    })
}

/// Closed or open λ-terms over the variables `a`, `b`, `c`, `d`.
pub fn gen_term(cfg: &GenConfig, n: usize) -> Vec<Term> {
    collect(n, |i| {
        let mut rng = case_rng(cfg.seed, stream::TERM, i);
        let mut g = typed::TypedGen::new(&cfg.signature, &mut rng, cfg.max_type_size, cfg.redex_bias)?;
        let ctx = g.context(cfg.max_ctx_len);
        let mut scope = ctx.into_iter().map(|(x, _)| x).collect();
        Some(g.term(&mut scope, cfg.max_term_depth))
    })
}

/// Typing derivations; empty unless the signature declares arrows,
/// products and a top type.
pub fn gen_typing_derivation(cfg: &GenConfig, n: usize) -> Vec<TypingDerivation> {
    collect(n, |i| {
        let mut rng = case_rng(cfg.seed, stream::TYPED, i);
        let mut g = typed::TypedGen::new(&cfg.signature, &mut rng, cfg.max_type_size, cfg.redex_bias)?;
        Some(g.typed(cfg.max_ctx_len, cfg.max_term_depth))
    })
}

pub fn gen_expansion_case(cfg: &GenConfig, n: usize) -> Vec<(TypingDerivation, RedexInfo)> {
    collect(n, |i| {
        let mut rng = case_rng(cfg.seed, stream::EXPANSION, i);
        let mut g = typed::TypedGen::new(&cfg.signature, &mut rng, cfg.max_type_size, cfg.redex_bias)?;
        Some(g.expansion_case(cfg.max_ctx_len, cfg.max_term_depth))
    })
}

type Outcome = Result<(), String>;

fn guarded(f: impl FnOnce() -> Result<Outcome, ()>) -> Result<Outcome, ()> {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Ok(Err(format!("panic: {msg}")))
    })
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_property<T>(
    name: &str,
    cfg: &GenConfig,
    stream: u64,
    cases: Vec<T>,
    mut check: impl FnMut(&T) -> Option<Outcome>,
) -> PropertyReport {
    let mut rep = PropertyReport::new(name);
    for (i, case) in cases.iter().enumerate() {
        match guarded(|| check(case).ok_or(())) {
            Ok(Ok(())) => {}
            Ok(Err(detail)) => rep.fail(i, case_seed(cfg.seed, stream, i), detail),
            Err(()) => rep.inconclusive += 1,
        }
        rep.runs += 1;
    }
    rep
}

fn decision(cfg: &GenConfig) -> PropertyReport {
    let sig = &cfg.signature;
    let half = cfg.cases / 2;
    let disagrees = |s: &Sequent| -> Option<bool> {
        let fast = decide_with(s, sig, cfg.mutation).ok()?;
        let slow = prove_exhaustive(s, sig, cfg.budget).ok()?.verdict()?;
        Some(fast != slow)
    };
    let check = |s: &Sequent| -> Option<Outcome> {
        if disagrees(s)? {
            let small = shrink_sequent(s, sig, |t| disagrees(t) == Some(true));
            let fast = decide_with(&small, sig, cfg.mutation).unwrap_or(false);
            return Some(Err(format!("prover says {fast} on `{small}` (shrunk from `{s}`)")));
        }
        if cfg.mutation == Mutation::None {
            if let Ok(Some(d)) = prove(s, sig) {
                return Some(
                    check_isc(&d, sig)
                        .map_err(|e| format!("proof of `{s}` rejected: {e}"))
                        .and_then(|()| {
                            ensure(d.conclusion() == s, || {
                                format!("proof of `{s}` has the wrong conclusion")
                            })
                        }),
                );
            }
        }
        Some(Ok(()))
    };
    let mut rep = run_property(
        "decision",
        cfg,
        stream::SEQUENT,
        gen_sequent(cfg, cfg.cases - half),
        check,
    );
    rep.absorb(run_property(
        "decision",
        cfg,
        stream::DERIVABLE,
        gen_derivable(cfg, half),
        check,
    ));
    rep
}

fn translation(cfg: &GenConfig) -> PropertyReport {
    let sig = &cfg.signature;
    if !sig.has_trivial_order() || sig.top().is_none() {
        return PropertyReport::new("translation");
    }
    let half = cfg.cases / 2;
    let ax = gen_ax_derivation(cfg, cfg.cases - half);
    let mut rep = run_property("translation", cfg, stream::AX, ax, |d| {
        Some((|| {
            check_ax(d, sig).map_err(|e| format!("generated derivation rejected: {e}"))?;
            let s = Sequent::single(d.lhs().clone(), d.rhs().clone());
            let i = ax_to_isc(d, sig).map_err(|e| e.to_string())?;
            check_isc(&i, sig).map_err(|e| format!("translation of `{s}` rejected: {e}"))?;
            ensure(i.conclusion() == &s && i.is_cut_free(), || {
                format!("translation of `{s}` has the wrong shape")
            })?;
            let back = isc_to_ax(&i, sig).map_err(|e| e.to_string())?;
            check_ax(&back, sig).map_err(|e| format!("back-translation of `{s}` rejected: {e}"))?;
            ensure(back.lhs() == d.lhs() && back.rhs() == d.rhs(), || {
                format!("back-translation of `{s}` changed the ends")
            })
        })())
    });
    let seqs = gen_derivable(cfg, half);
    let other = run_property("translation", cfg, stream::DERIVABLE, seqs, |s| {
        Some((|| {
            let d = prove(s, sig)
                .map_err(|e| e.to_string())?
                .ok_or_else(|| format!("generated sequent `{s}` is not derivable"))?;
            let a = isc_to_ax(&d, sig).map_err(|e| e.to_string())?;
            check_ax(&a, sig).map_err(|e| format!("translation of `{s}` rejected: {e}"))?;
            let lhs = big_inter(&s.context, sig).map_err(|e| e.to_string())?;
            ensure(a.lhs() == &lhs && a.rhs() == &s.goal, || {
                format!("translation of `{s}` changed the ends")
            })
        })())
    });
    rep.absorb(other);
    rep
}

fn cut(cfg: &GenConfig) -> PropertyReport {
    let sig = &cfg.signature;
    run_property("cut", cfg, stream::CUT, gen_cut_pair(cfg, cfg.cases), |(l, r, pos)| {
        Some((|| {
            let d = derive_cut(l, r, *pos).map_err(|e| e.to_string())?;
            check_isc(&d, sig).map_err(|e| format!("cut result rejected: {e}"))?;
            let mut ctx = r.context()[..*pos].to_vec();
            ctx.extend_from_slice(l.context());
            ctx.extend_from_slice(&r.context()[pos + 1..]);
            let want = Sequent::new(ctx, r.goal().clone());
            ensure(d.conclusion() == &want && d.is_cut_free(), || {
                format!(
                    "cut of `{}` into `{}` gave `{}`",
                    l.conclusion(),
                    r.conclusion(),
                    d.conclusion()
                )
            })
        })())
    })
}

fn contraction(cfg: &GenConfig) -> PropertyReport {
    let sig = &cfg.signature;
    run_property(
        "contraction",
        cfg,
        stream::CONTRACT,
        gen_contraction_case(cfg, cfg.cases),
        |(d, pos)| {
            Some((|| {
                let c = derive_contract(d, *pos).map_err(|e| e.to_string())?;
                check_isc(&c, sig).map_err(|e| format!("contraction result rejected: {e}"))?;
                let mut ctx = d.context().to_vec();
                ctx.remove(pos + 1);
                ensure(c.conclusion() == &Sequent::new(ctx, d.goal().clone()), || {
                    format!("contraction of `{}` gave `{}`", d.conclusion(), c.conclusion())
                })
            })())
        },
    )
}

fn inversion(cfg: &GenConfig) -> PropertyReport {
    let sig = &cfg.signature;
    let half = cfg.cases / 2;
    let check = |s: &Sequent| Some(check_inversion(s, sig).map_err(|e| format!("`{s}`: {e}")));
    let mut rep = run_property(
        "inversion",
        cfg,
        stream::ARROW_FAMILY,
        gen_homogeneous(cfg, true, cfg.cases - half),
        check,
    );
    rep.absorb(run_property(
        "inversion",
        cfg,
        stream::PROD_FAMILY,
        gen_homogeneous(cfg, false, half),
        check,
    ));
    rep
}

/// Inverts a derivable sequent whose hypotheses and goal all have the arrow
/// (or all the product) head, with both the ISC and the axiomatic inversion,
/// and checks every witness against the shape it is supposed to have.
pub fn check_inversion(s: &Sequent, sig: &Signature) -> Result<(), String> {
    let arrow = s.goal.head() == Some(ARROW);
    let w = invert_constr(s, sig).map_err(|e| e.to_string())?;
    let fam_args = |t: &Type| match t {
        Type::Constr { contra, co, .. } => (contra.clone(), co.clone()),
        Type::Inter(..) => (vec![], vec![]),
    };
    let (g_contra, g_co) = fam_args(&s.goal);
    let members: Vec<(Vec<Type>, Vec<Type>)> = s.context.iter().map(fam_args).collect();
    for (i, row) in w.contra.iter().enumerate() {
        for (q, c) in row.iter().enumerate() {
            check_isc(c, sig).map_err(|e| e.to_string())?;
            let want = Sequent::single(g_contra[i].clone(), members[w.selected[q]].0[i].clone());
            ensure(c.conclusion() == &want, || {
                format!("contravariant witness concludes `{}`", c.conclusion())
            })?;
        }
    }
    for (i, c) in w.co.iter().enumerate() {
        check_isc(c, sig).map_err(|e| e.to_string())?;
        let ctx = w.selected.iter().map(|&j| members[j].1[i].clone()).collect();
        ensure(c.conclusion() == &Sequent::new(ctx, g_co[i].clone()), || {
            format!("covariant witness concludes `{}`", c.conclusion())
        })?;
    }
    let whole = w.reassemble(s);
    check_isc(&whole, sig).map_err(|e| format!("reassembly rejected: {e}"))?;
    ensure(whole.conclusion() == s, || {
        "reassembly has the wrong conclusion".to_string()
    })?;

    let firsts: Vec<Type> = members
        .iter()
        .map(|(c, o)| if arrow { c[0].clone() } else { o[0].clone() })
        .collect();
    let seconds: Vec<Type> = members
        .iter()
        .map(|(_, o)| if arrow { o[0].clone() } else { o[1].clone() })
        .collect();
    if arrow {
        let (a, b) = (&g_contra[0], &g_co[0]);
        let inv = inversion_arrow(&firsts, &seconds, a, b, sig).map_err(|e| e.to_string())?;
        ensure(inv.domains.len() == inv.selected.len(), || {
            "domain witnesses do not match the selection".to_string()
        })?;
        for (q, dq) in inv.domains.iter().enumerate() {
            check_ax(dq, sig).map_err(|e| e.to_string())?;
            ensure(dq.lhs() == a && dq.rhs() == &firsts[inv.selected[q]], || {
                "domain witness has the wrong ends".to_string()
            })?;
        }
        let sel: Vec<Type> = inv.selected.iter().map(|&j| seconds[j].clone()).collect();
        check_ax(&inv.codomain, sig).map_err(|e| e.to_string())?;
        let lhs = big_inter(&sel, sig).map_err(|e| e.to_string())?;
        ensure(inv.codomain.lhs() == &lhs && inv.codomain.rhs() == b, || {
            "codomain witness has the wrong ends".to_string()
        })
    } else {
        let (a, b) = (&g_co[0], &g_co[1]);
        let inv = inversion_product(&firsts, &seconds, a, b, sig).map_err(|e| e.to_string())?;
        for (d, column, end) in [(&inv.first, &firsts, a), (&inv.second, &seconds, b)] {
            check_ax(d, sig).map_err(|e| e.to_string())?;
            let lhs = big_inter(column, sig).map_err(|e| e.to_string())?;
            ensure(d.lhs() == &lhs && d.rhs() == end, || {
                "component witness has the wrong ends".to_string()
            })?;
        }
        Ok(())
    }
}

/// Reductions checked per derivation when following a reduction sequence.
const CHAIN: usize = 6;

fn reduction(cfg: &GenConfig) -> PropertyReport {
    let sig = &cfg.signature;
    let cases = gen_typing_derivation(cfg, cfg.cases);
    run_property("subject_reduction", cfg, stream::TYPED, cases, |d| {
        Some((|| {
            check_typing(d, sig).map_err(|e| format!("generated derivation rejected: {e}"))?;
            for (path, kind) in d.term().find_redexes() {
                reduce_checked(d, &path, kind, sig)?;
            }
            let mut cur = d.clone();
            for _ in 0..CHAIN {
                let Some((path, kind)) = cur.term().find_redexes().into_iter().next() else {
                    break;
                };
                cur = reduce_checked(&cur, &path, kind, sig)?;
            }
            Ok(())
        })())
    })
}

fn reduce_checked(
    d: &TypingDerivation,
    path: &[usize],
    kind: crate::lambda::RedexKind,
    sig: &Signature,
) -> Result<TypingDerivation, String> {
    let what = || format!("{kind} at {path:?} in `{}`", d.judgement());
    let r = subject_reduction(d, path, kind, sig).map_err(|e| format!("{}: {e}", what()))?;
    check_typing(&r, sig).map_err(|e| format!("{}: result rejected: {e}", what()))?;
    let reduct = reduce_at(d.term(), path).map(|(t, _)| t);
    ensure(
        r.context() == d.context() && r.ty() == d.ty() && Some(r.term()) == reduct.as_ref(),
        || format!("{}: result concludes `{}`", what(), r.judgement()),
    )?;
    Ok(r)
}

fn expansion(cfg: &GenConfig) -> PropertyReport {
    let sig = &cfg.signature;
    let cases = gen_expansion_case(cfg, cfg.cases);
    run_property("subject_expansion", cfg, stream::EXPANSION, cases, |(d, info)| {
        Some((|| {
            let what = || format!("{:?} in `{}`", info, d.judgement());
            let e = subject_expansion(d, info, sig).map_err(|err| format!("{}: {err}", what()))?;
            check_typing(&e, sig).map_err(|err| format!("{}: result rejected: {err}", what()))?;
            let want = info.expand_term(d.term());
            ensure(
                e.context() == d.context() && e.ty() == d.ty() && Some(e.term()) == want.as_ref(),
                || format!("{}: result concludes `{}`", what(), e.judgement()),
            )?;
            let back = reduce_checked(&e, &info.path, info.expansion.kind(), sig)?;
            ensure(back.judgement() == d.judgement(), || {
                format!("{}: reducing back gave `{}`", what(), back.judgement())
            })
        })())
    })
}

/// Runs every property on `cfg.cases` cases each.
pub fn run_difftest(cfg: &GenConfig) -> Report {
    Report {
        seed: cfg.seed,
        cases: cfg.cases,
        properties: vec![
            decision(cfg),
            translation(cfg),
            cut(cfg),
            contraction(cfg),
            inversion(cfg),
            reduction(cfg),
            expansion(cfg),
        ],
    }
}
