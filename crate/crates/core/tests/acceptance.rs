//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use intersub::axiomatic::{ax_to_isc, check_ax, isc_to_ax, AxDerivation, AxRule};
use intersub::harness::{
    check_inversion, gen_ax_derivation, gen_cut_pair, gen_derivable, gen_expansion_case, gen_homogeneous,
    gen_rule_instance, gen_term, gen_type, gen_typing_derivation, sweep, GenConfig,
};
use intersub::isc::{derive_cut, prove, Mutation};
use intersub::lambda::{check_typing, reduce_at, subject_expansion, subject_reduction, Term, TypingDerivation};
use intersub::{check_isc, parse_type, ConstructorDecl, IscDerivation, Sequent, Signature, Type, Undeclared, Width};

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: String) -> Outcome {
    Outcome { passed, summary }
}

/// Runs `f`, turning a panic into a failure message.
fn guarded(f: impl FnOnce() -> Result<(), String>) -> Result<(), String> {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panic: {msg}"))
    })
}

/// Counts failures over `cases`, keeping the first message.
fn tally<T>(cases: &[T], mut check: impl FnMut(&T) -> Result<(), String>) -> (usize, Option<String>) {
    let mut failures = 0;
    let mut first = None;
    for c in cases {
        if let Err(e) = guarded(|| check(c)) {
            failures += 1;
            first.get_or_insert(e);
        }
    }
    (failures, first)
}

fn derives(s: &Sequent, sig: &Signature) -> Result<(), String> {
    let d = prove(s, sig)
        .map_err(|e| e.to_string())?
        .ok_or_else(|| format!("`{s}` not derived"))?;
    check_isc(&d, sig).map_err(|e| format!("proof of `{s}` rejected: {e}"))?;
    if d.conclusion() != s {
        return Err(format!("proof of `{s}` concludes `{}`", d.conclusion()));
    }
    Ok(())
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn with_unary() -> Signature {
    let mut sig = Signature::arrow_product(["X", "Y"]);
    sig.declare(ConstructorDecl::new("U", 0, 1, Width::One))
        .expect("fresh name");
    sig
}

/// Instances of the sequent rules built from sequents derivable by
/// construction, one list per rule.
fn sequent_rule_instances(cfg: &GenConfig, n: usize) -> Vec<(&'static str, Vec<Sequent>)> {
    let types = gen_type(cfg, n);
    let derivable = gen_derivable(cfg, 2 * n);
    let (firsts, seconds) = derivable.split_at(n);
    let ax = types.iter().map(|a| Sequent::single(a.clone(), a.clone())).collect();
    let wk = firsts
        .iter()
        .zip(&types)
        .map(|(s, a)| {
            let mut ctx = s.context.clone();
            ctx.insert(a.size() % (ctx.len() + 1), a.clone());
            Sequent::new(ctx, s.goal.clone())
        })
        .collect();
    let inter_r = firsts
        .iter()
        .zip(seconds)
        .map(|(s, t)| {
            let mut ctx = s.context.clone();
            ctx.extend(t.context.iter().cloned());
            Sequent::new(ctx, Type::inter(s.goal.clone(), t.goal.clone()))
        })
        .collect();
    let inter_l = derivable
        .iter()
        .filter(|s| s.context.len() >= 2)
        .take(n)
        .map(|s| {
            let mut ctx = s.context.clone();
            let b = ctx.remove(1);
            ctx[0] = Type::inter(ctx[0].clone(), b);
            Sequent::new(ctx, s.goal.clone())
        })
        .collect();
    let unary = derivable
        .iter()
        .filter(|s| !s.context.is_empty())
        .take(n)
        .map(|s| {
            let wrap = |t: &Type| Type::constr("U", vec![], vec![t.clone()]);
            Sequent::new(s.context.iter().map(wrap).collect(), wrap(&s.goal))
        })
        .collect();
    vec![
        ("ax", ax),
        ("wk", wk),
        ("interR", inter_r),
        ("interL", inter_l),
        ("constr/arrow", gen_homogeneous(cfg, true, n)),
        ("constr/prod", gen_homogeneous(cfg, false, n)),
        ("constr/unary", unary),
    ]
}

fn criterion_1() -> Outcome {
    const N: usize = 1000;
    let start = Instant::now();
    let sig = with_unary();
    let cfg = GenConfig {
        seed: 1,
        max_type_size: 6,
        max_ctx_len: 3,
        signature: sig.clone(),
        ..GenConfig::default()
    };
    let mut total = 0;
    let mut problems = Vec::new();
    for rule in AxRule::ALL {
        let ds = gen_rule_instance(&cfg, rule, N);
        total += ds.len();
        if ds.len() != N {
            problems.push(format!("{}: only {} instances", rule.tag(), ds.len()));
        }
        let (failures, first) = tally(&ds, |d: &AxDerivation| {
            check_ax(d, &sig).map_err(|e| format!("instance rejected: {e}"))?;
            derives(&Sequent::single(d.lhs().clone(), d.rhs().clone()), &sig)
        });
        if failures > 0 {
            problems.push(format!(
                "{}: {failures} failures, e.g. {}",
                rule.tag(),
                first.unwrap_or_default()
            ));
        }
    }
    for (name, seqs) in sequent_rule_instances(&cfg, N) {
        total += seqs.len();
        if seqs.len() != N {
            problems.push(format!("{name}: only {} instances", seqs.len()));
        }
        let (failures, first) = tally(&seqs, |s| derives(s, &sig));
        if failures > 0 {
            problems.push(format!(
                "{name}: {failures} failures, e.g. {}",
                first.unwrap_or_default()
            ));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(60) {
        problems.push(format!("took {}", secs(elapsed)));
    }
    let rules = AxRule::ALL.len() + 7;
    match problems.first() {
        None => outcome(
            true,
            format!("{total} instances of {rules} rules derived in {}", secs(elapsed)),
        ),
        Some(p) => outcome(false, format!("{} problems, first: {p}", problems.len())),
    }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let sig = Signature::arrow_product(["X", "Y"]);
    let rep = sweep(&sig, 2, 4, Mutation::None, 1_000_000);
    let elapsed = start.elapsed();
    let ok =
        rep.disagreements == 0 && rep.inconclusive == 0 && rep.checked == 27_930 && elapsed < Duration::from_secs(300);
    outcome(
        ok,
        format!(
            "{} sequents, {} disagreements, {} inconclusive in {}{}",
            rep.checked,
            rep.disagreements,
            rep.inconclusive,
            secs(elapsed),
            rep.examples
                .first()
                .map(|e| format!(", e.g. `{e}`"))
                .unwrap_or_default()
        ),
    )
}

fn criterion_3() -> Outcome {
    let cfg = GenConfig {
        seed: 3,
        ..GenConfig::default()
    };
    let sig = &cfg.signature;
    let ds = gen_ax_derivation(&cfg, 1000);
    let (failures, first) = tally(&ds, |d| {
        check_ax(d, sig).map_err(|e| format!("generated derivation rejected: {e}"))?;
        let s = Sequent::single(d.lhs().clone(), d.rhs().clone());
        let i = ax_to_isc(d, sig).map_err(|e| format!("(a) `{s}`: {e}"))?;
        check_isc(&i, sig).map_err(|e| format!("(a) `{s}`: {e}"))?;
        if i.conclusion() != &s {
            return Err(format!("(a) `{s}` translated to `{}`", i.conclusion()));
        }
        let back = isc_to_ax(&i, sig).map_err(|e| format!("(b) `{s}`: {e}"))?;
        check_ax(&back, sig).map_err(|e| format!("(b) `{s}`: {e}"))?;
        if back.lhs() != d.lhs() || back.rhs() != d.rhs() {
            return Err(format!("(b) `{s}` changed its ends"));
        }
        derives(&s, sig).map_err(|e| format!("(c) {e}"))
    });
    outcome(
        ds.len() == 1000 && failures == 0,
        format!(
            "{} derivations, {failures} failures{}",
            ds.len(),
            first.map(|e| format!(", e.g. {e}")).unwrap_or_default()
        ),
    )
}

fn criterion_4() -> Outcome {
    let cfg = GenConfig {
        seed: 4,
        max_ctx_len: 3,
        ..GenConfig::default()
    };
    let sig = &cfg.signature;
    let pairs = gen_cut_pair(&cfg, 500);
    let (failures, first) = tally(&pairs, |(l, r, pos): &(IscDerivation, IscDerivation, usize)| {
        let d = derive_cut(l, r, *pos).map_err(|e| e.to_string())?;
        check_isc(&d, sig).map_err(|e| format!("result rejected: {e}"))?;
        if !d.is_cut_free() {
            return Err("result is not cut-free".into());
        }
        let mut ctx = r.context()[..*pos].to_vec();
        ctx.extend_from_slice(l.context());
        ctx.extend_from_slice(&r.context()[pos + 1..]);
        let want = Sequent::new(ctx, r.goal().clone());
        if d.conclusion() != &want {
            return Err(format!("expected `{want}`, got `{}`", d.conclusion()));
        }
        Ok(())
    });
    outcome(
        pairs.len() == 500 && failures == 0,
        format!(
            "{} pairs, {failures} failures{}",
            pairs.len(),
            first.map(|e| format!(", e.g. {e}")).unwrap_or_default()
        ),
    )
}

fn criterion_5() -> Outcome {
    let cfg = GenConfig {
        seed: 5,
        max_ctx_len: 3,
        ..GenConfig::default()
    };
    let sig = &cfg.signature;
    let arrows = gen_homogeneous(&cfg, true, 500);
    let prods = gen_homogeneous(&cfg, false, 500);
    let (fa, ea) = tally(&arrows, |s| check_inversion(s, sig).map_err(|e| format!("`{s}`: {e}")));
    let (fp, ep) = tally(&prods, |s| check_inversion(s, sig).map_err(|e| format!("`{s}`: {e}")));
    let omega_arrow = Sequent::parse("Omega |- Omega -> Omega", sig).expect("parses");
    let omega_prod = Sequent::parse("Omega |- Omega * Omega", sig).expect("parses");
    let pair_ok = derives(&omega_arrow, sig).is_ok() && matches!(prove(&omega_prod, sig), Ok(None));
    let first = ea.or(ep).map(|e| format!(", e.g. {e}")).unwrap_or_default();
    outcome(
        arrows.len() == 500 && prods.len() == 500 && fa + fp == 0 && pair_ok,
        format!(
            "{} arrow and {} product sequents, {} failures; Ω ⊢ Ω→Ω derivable and Ω ⊢ Ω×Ω not: {pair_ok}{first}",
            arrows.len(),
            prods.len(),
            fa + fp
        ),
    )
}

fn reduce_checked(d: &TypingDerivation, path: &[usize], sig: &Signature) -> Result<TypingDerivation, String> {
    let kind = d
        .term()
        .at(path)
        .and_then(Term::redex_kind)
        .ok_or_else(|| format!("no redex at {path:?}"))?;
    let what = || format!("{kind} at {path:?} in `{}`", d.judgement());
    let r = subject_reduction(d, path, kind, sig).map_err(|e| format!("{}: {e}", what()))?;
    check_typing(&r, sig).map_err(|e| format!("{}: output rejected: {e}", what()))?;
    let reduct = reduce_at(d.term(), path).map(|(t, _)| t);
    if r.context() != d.context() || r.ty() != d.ty() || Some(r.term()) != reduct.as_ref() {
        return Err(format!("{}: output concludes `{}`", what(), r.judgement()));
    }
    Ok(r)
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let cfg = GenConfig {
        seed: 6,
        ..GenConfig::default()
    };
    let sig = &cfg.signature;
    let with_redex: Vec<TypingDerivation> = gen_typing_derivation(&cfg, 3000)
        .into_iter()
        .filter(|d| !d.term().find_redexes().is_empty())
        .take(300)
        .collect();
    let (fr, er) = tally(&with_redex, |d| {
        check_typing(d, sig).map_err(|e| format!("generated derivation rejected: {e}"))?;
        for (path, _) in d.term().find_redexes() {
            reduce_checked(d, &path, sig)?;
        }
        let mut cur = d.clone();
        for _ in 0..8 {
            match cur.term().find_redexes().into_iter().next() {
                Some((path, _)) => cur = reduce_checked(&cur, &path, sig)?,
                None => break,
            }
        }
        Ok(())
    });
    let cases = gen_expansion_case(&cfg, 300);
    let (fe, ee) = tally(&cases, |(d, info)| {
        let e = subject_expansion(d, info, sig).map_err(|err| format!("{info:?} on `{}`: {err}", d.judgement()))?;
        check_typing(&e, sig).map_err(|err| format!("expansion rejected: {err}"))?;
        if e.context() != d.context() || e.ty() != d.ty() || Some(e.term()) != info.expand_term(d.term()).as_ref() {
            return Err(format!("expansion concludes `{}`", e.judgement()));
        }
        let back = reduce_checked(&e, &info.path, sig)?;
        if back.judgement() != d.judgement() {
            return Err(format!(
                "round trip gave `{}` for `{}`",
                back.judgement(),
                d.judgement()
            ));
        }
        Ok(())
    });
    let elapsed = start.elapsed();
    let ok = with_redex.len() == 300 && cases.len() == 300 && fr + fe == 0 && elapsed < Duration::from_secs(120);
    outcome(
        ok,
        format!(
            "{} reductions and {} expansions, {} failures in {}{}",
            with_redex.len(),
            cases.len(),
            fr + fe,
            secs(elapsed),
            er.or(ee).map(|e| format!(", e.g. {e}")).unwrap_or_default()
        ),
    )
}

fn criterion_7() -> Outcome {
    let sig = Signature::arrow_product(["X", "Y"]);
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, mutation) in [
        ("width check skipped", Mutation::SkipWidthCheck),
        ("first qualified singleton", Mutation::FirstQualifiedSingleton),
    ] {
        let rep = sweep(&sig, 2, 4, mutation, 1_000_000);
        ok &= rep.disagreements > 0;
        parts.push(format!(
            "{name}: {} disagreements{}",
            rep.disagreements,
            rep.examples
                .first()
                .map(|e| format!(" (e.g. `{e}`)"))
                .unwrap_or_default()
        ));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let sig = with_unary();
    let cfg = GenConfig {
        seed: 8,
        max_type_size: 9,
        max_term_depth: 5,
        signature: sig.clone(),
        ..GenConfig::default()
    };
    let types = gen_type(&cfg, 10_000);
    let (ft, et) = tally(&types, |t| {
        let text = t.to_string();
        let back = parse_type(&text, &sig).map_err(|e| format!("`{text}`: {e}"))?;
        if &back != t || back.to_string() != text {
            return Err(format!("`{text}` re-parsed as `{back}`"));
        }
        Ok(())
    });
    let terms = gen_term(&cfg, 2000);
    let (fm, em) = tally(&terms, |t| {
        let text = t.to_string();
        let back = Term::parse(&text).map_err(|e| format!("`{text}`: {e}"))?;
        if &back != t || back.to_string() != text {
            return Err(format!("`{text}` re-parsed as `{back}`"));
        }
        Ok(())
    });

    let small = GenConfig {
        seed: 8,
        ..GenConfig::default()
    };
    let ssig = &small.signature;
    let mut emitted = 0;
    let mut fd = 0;
    let mut ed = None;
    let mut note = |r: Result<(), String>| {
        emitted += 1;
        if let Err(e) = r {
            fd += 1;
            ed.get_or_insert(e);
        }
    };
    for s in gen_derivable(&small, 300) {
        note(guarded(|| {
            let d = prove(&s, ssig).map_err(|e| e.to_string())?.ok_or("not derivable")?;
            for compact in [false, true] {
                let back = IscDerivation::from_text(&d.to_text(compact), &mut ssig.clone(), Undeclared::Reject)
                    .map_err(|e| format!("ISC proof of `{s}`: {e}"))?;
                check_isc(&back, ssig).map_err(|e| e.to_string())?;
                if back != d {
                    return Err(format!("ISC proof of `{s}` changed"));
                }
            }
            Ok(())
        }));
    }
    for d in gen_ax_derivation(&small, 300) {
        note(guarded(|| {
            for compact in [false, true] {
                let back = AxDerivation::from_text(&d.to_text(compact), &mut ssig.clone(), Undeclared::Reject)
                    .map_err(|e| e.to_string())?;
                check_ax(&back, ssig).map_err(|e| e.to_string())?;
                if back != d {
                    return Err("axiomatic derivation changed".into());
                }
            }
            Ok(())
        }));
    }
    for d in gen_typing_derivation(&small, 300) {
        note(guarded(|| {
            for compact in [false, true] {
                let back = TypingDerivation::from_text(&d.to_text(compact), &mut ssig.clone(), Undeclared::Reject)
                    .map_err(|e| e.to_string())?;
                check_typing(&back, ssig).map_err(|e| e.to_string())?;
                if back != d {
                    return Err(format!("typing derivation of `{}` changed", d.judgement()));
                }
            }
            Ok(())
        }));
    }
    let first = et.or(em).or(ed).map(|e| format!(", e.g. {e}")).unwrap_or_default();
    outcome(
        types.len() == 10_000 && terms.len() == 2000 && ft + fm + fd == 0,
        format!(
            "{} types, {} terms, {emitted} emitted derivations, {} failures{first}",
            types.len(),
            terms.len(),
            ft + fm + fd
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("axiom coverage", criterion_1),
        ("decision agreement", criterion_2),
        ("translation round trip", criterion_3),
        ("cut admissibility", criterion_4),
        ("inversion", criterion_5),
        ("subject reduction and expansion", criterion_6),
        ("mutation sensitivity", criterion_7),
        ("round trips", criterion_8),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        all &= o.passed;
        println!(
            "criterion {} ({name}): {} : {}",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.summary
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
