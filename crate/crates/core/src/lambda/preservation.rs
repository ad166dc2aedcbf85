//! Subject reduction and subject expansion as derivation transformers.
//!
//! Both walk the derivation along the redex path. `leq` and `inter` nodes
//! are crossed without consuming the path, `omega` nodes are retyped on the
//! new subject directly, and the syntax-directed rules consume one step.
//! At the redex itself reduction reassembles the reduct from the generation
//! lemmas and ISC inversion, while expansion splits the contractum with
//! [`decompose_substitution`] or pads the missing pair component with `omega`.

use std::collections::{BTreeSet, HashMap};

use super::term::{fresh_name, RedexKind, Term};
use super::transform::{
    generation_abs, generation_app, generation_pair, generation_proj1, generation_proj2, rename_hypothesis,
    strengthen_typing, substitute_typing, transport, weaken_typing,
};
use super::typing::{lookup, TypingDerivation, TypingRule};
use super::LambdaError;
use crate::isc::admissible::fold_context;
use crate::isc::{derive_ax, derive_weaken_gen, invert_derivation, IscDerivation};
use crate::types::{Signature, Type};

/// Subsumption, omitted when the evidence is an identity `A ⊢ A`.
pub(crate) fn coerce(d: TypingDerivation, sub: IscDerivation) -> TypingDerivation {
    if sub.context() == std::slice::from_ref(d.ty()) && sub.goal() == d.ty() {
        d
    } else {
        TypingDerivation::leq(d, sub)
    }
}

/// Right-nested `inter` over `parts`, or `omega` when there are none.
fn meet_all(
    parts: Vec<TypingDerivation>,
    ctx: &[(String, Type)],
    term: &Term,
    sig: &Signature,
) -> Result<TypingDerivation, LambdaError> {
    let mut it = parts.into_iter().rev();
    match it.next() {
        None => Ok(TypingDerivation::omega(ctx.to_vec(), term.clone(), sig.top_type()?)),
        Some(last) => Ok(it.fold(last, |acc, d| TypingDerivation::inter(d, acc))),
    }
}

/// Derivation of the same context and type for the subject with the redex
/// at `path` contracted.
pub fn subject_reduction(
    d: &TypingDerivation,
    path: &[usize],
    kind: RedexKind,
    sig: &Signature,
) -> Result<TypingDerivation, LambdaError> {
    match d.term().at(path).and_then(Term::redex_kind) {
        Some(k) if k == kind => reduce(d, path, sig),
        _ => Err(LambdaError::NotARedex(path.to_vec())),
    }
}

fn reduce(d: &TypingDerivation, path: &[usize], sig: &Signature) -> Result<TypingDerivation, LambdaError> {
    let not_redex = || LambdaError::NotARedex(path.to_vec());
    if let TypingRule::Omega = d.rule() {
        let (reduct, _) = super::term::reduce_at(d.term(), path).ok_or_else(not_redex)?;
        return Ok(TypingDerivation::omega(d.context().to_vec(), reduct, d.ty().clone()));
    }
    let Some((&i, rest)) = path.split_first() else {
        return match d.term().redex_kind() {
            Some(RedexKind::Beta) => reduce_beta(d, sig),
            Some(RedexKind::Proj1) => reduce_proj(d, true, sig),
            Some(RedexKind::Proj2) => reduce_proj(d, false, sig),
            None => Err(not_redex()),
        };
    };
    Ok(match (d.rule(), i) {
        (TypingRule::Leq { premise, sub }, _) => TypingDerivation::leq(reduce(premise, path, sig)?, sub.clone()),
        (TypingRule::Inter { left, right }, _) => {
            TypingDerivation::inter(reduce(left, path, sig)?, reduce(right, path, sig)?)
        }
        (TypingRule::App { fun, arg }, 0) => TypingDerivation::app(reduce(fun, rest, sig)?, (**arg).clone()),
        (TypingRule::App { fun, arg }, 1) => TypingDerivation::app((**fun).clone(), reduce(arg, rest, sig)?),
        (TypingRule::Pair { left, right }, 0) => TypingDerivation::pair(reduce(left, rest, sig)?, (**right).clone()),
        (TypingRule::Pair { left, right }, 1) => TypingDerivation::pair((**left).clone(), reduce(right, rest, sig)?),
        (TypingRule::Proj1 { premise }, 0) => TypingDerivation::proj1(reduce(premise, rest, sig)?),
        (TypingRule::Proj2 { premise }, 0) => TypingDerivation::proj2(reduce(premise, rest, sig)?),
        // the premise subject is the body up to the binder name, so the path carries over
        (TypingRule::Abs { premise }, 0) => TypingDerivation::abs(reduce(premise, rest, sig)?),
        _ => return Err(not_redex()),
    })
}

/// `Γ ⊢ (λx.t) u : A` to `Γ ⊢ t[u/x] : A`.
///
/// Generation for application gives `Γ ⊢ λx.t : A_i → B_i` and `Γ ⊢ u : A_i`
/// with `⋂ B_i ⊢ A`. Generation for abstraction turns each function premise
/// into bodies `Γ, y:C_k ⊢ t : D_k` with `C_k → D_k, ... ⊢ A_i → B_i`, and
/// inverting that sequent selects the `k` with `A_i ⊢ C_k` together with
/// `D_k, ... ⊢ B_i`. Substituting the coerced argument into the selected
/// bodies and reassembling with `inter` and `leq` gives the reduct.
fn reduce_beta(d: &TypingDerivation, sig: &Signature) -> Result<TypingDerivation, LambdaError> {
    let (reduct, _) = d.term().contract().expect("caller checked the redex");
    let ctx = d.context();
    let outer = generation_app(d, sig)?;
    let mut parts = Vec::with_capacity(outer.items.len());
    for item in &outer.items {
        let [fun, arg] = item.premises.as_slice() else {
            unreachable!("app items have two premises")
        };
        let inner = generation_abs(fun, sig)?;
        let w = invert_derivation(&inner.family_evidence, sig)?;
        let mut bodies = Vec::with_capacity(w.selected.len());
        for (q, &k) in w.selected.iter().enumerate() {
            let arg_k = coerce(arg.clone(), w.contra[0][q].clone());
            bodies.push(substitute_typing(&inner.items[k].premises[0], &arg_k)?);
        }
        let joined = meet_all(bodies, ctx, &reduct, sig)?;
        parts.push(coerce(joined, fold_context(&w.co[0], sig)?));
    }
    Ok(coerce(meet_all(parts, ctx, &reduct, sig)?, outer.evidence))
}

/// `Γ ⊢ fst <t, u> : A` to `Γ ⊢ t : A`, and symmetrically for `snd`.
fn reduce_proj(d: &TypingDerivation, first: bool, sig: &Signature) -> Result<TypingDerivation, LambdaError> {
    let (reduct, _) = d.term().contract().expect("caller checked the redex");
    let ctx = d.context();
    let outer = if first {
        generation_proj1(d, sig)?
    } else {
        generation_proj2(d, sig)?
    };
    let side = usize::from(!first);
    let mut parts = Vec::with_capacity(outer.items.len());
    for item in &outer.items {
        let inner = generation_pair(&item.premises[0], sig)?;
        let w = invert_derivation(&inner.family_evidence, sig)?;
        let kept = w
            .selected
            .iter()
            .map(|&k| inner.items[k].premises[side].clone())
            .collect();
        let joined = meet_all(kept, ctx, &reduct, sig)?;
        parts.push(coerce(joined, fold_context(&w.co[side], sig)?));
    }
    Ok(coerce(meet_all(parts, ctx, &reduct, sig)?, outer.evidence))
}

/// Splits `Γ ⊢ t[u/x] : B` into `Γ, x:A ⊢ t : B` and `Γ ⊢ u : A`.
///
/// When `x` does not occur in `t` the type `A` is the top type. Otherwise
/// `A` is the intersection of the types demanded at the occurrences of `x`,
/// and each part of the derivation of `t` is coerced from `A` to its own
/// component.
pub fn decompose_substitution(
    d: &TypingDerivation,
    t: &Term,
    u: &Term,
    x: &str,
    sig: &Signature,
) -> Result<(Type, TypingDerivation, TypingDerivation), LambdaError> {
    let pre = |m: String| Err(LambdaError::PreconditionViolated(m));
    if lookup(d.context(), x).is_some() {
        return pre(format!("`{x}` is already declared"));
    }
    if let Some(y) = u.free_vars().iter().find(|y| lookup(d.context(), y).is_none()) {
        return pre(format!("free variable `{y}` of the argument is not declared"));
    }
    if d.term() != &t.subst(x, u) {
        return pre(format!("`{}` is not `{}` with `{x}` replaced by `{}`", d.term(), t, u));
    }
    Decomposer { top: sig.top_type()? }.run(d, t, u, x)
}

struct Decomposer {
    top: Type,
}

type Parts = (Type, TypingDerivation, TypingDerivation);

fn extended(ctx: &[(String, Type)], x: &str, a: &Type) -> Vec<(String, Type)> {
    let mut out = ctx.to_vec();
    out.push((x.to_string(), a.clone()));
    out
}

impl Decomposer {
    fn run(&self, d: &TypingDerivation, t: &Term, u: &Term, x: &str) -> Result<Parts, LambdaError> {
        let ctx = d.context();
        if !t.occurs_free(x) {
            let d_t = transport(d, &extended(ctx, x, &self.top))?;
            let d_u = TypingDerivation::omega(ctx.to_vec(), u.clone(), self.top.clone());
            return Ok((self.top.clone(), d_t, d_u));
        }
        if matches!(t, Term::Var(y) if y == x) {
            let a = d.ty().clone();
            let d_t = TypingDerivation::var(extended(ctx, x, &a), x, a.clone());
            return Ok((a, d_t, d.clone()));
        }
        let shape =
            || LambdaError::PreconditionViolated(format!("`{}` node does not match the subterm `{t}`", d.tag()));
        match (d.rule(), t) {
            (TypingRule::Omega, _) => {
                let d_t = TypingDerivation::omega(extended(ctx, x, &self.top), t.clone(), d.ty().clone());
                let d_u = TypingDerivation::omega(ctx.to_vec(), u.clone(), self.top.clone());
                Ok((self.top.clone(), d_t, d_u))
            }
            (TypingRule::Leq { premise, sub }, _) => {
                let (a, d_t, d_u) = self.run(premise, t, u, x)?;
                Ok((a, TypingDerivation::leq(d_t, sub.clone()), d_u))
            }
            (TypingRule::Inter { left, right }, _) => {
                self.combine(ctx, [(&**left, t), (&**right, t)], u, x, |mut v| {
                    let r = v.pop().unwrap();
                    TypingDerivation::inter(v.pop().unwrap(), r)
                })
            }
            (TypingRule::App { fun, arg }, Term::App(t1, t2)) => {
                self.combine(ctx, [(&**fun, &**t1), (&**arg, &**t2)], u, x, |mut v| {
                    let r = v.pop().unwrap();
                    TypingDerivation::app(v.pop().unwrap(), r)
                })
            }
            (TypingRule::Pair { left, right }, Term::Pair(t1, t2)) => {
                self.combine(ctx, [(&**left, &**t1), (&**right, &**t2)], u, x, |mut v| {
                    let r = v.pop().unwrap();
                    TypingDerivation::pair(v.pop().unwrap(), r)
                })
            }
            (TypingRule::Proj1 { premise }, Term::Fst(t1)) => {
                let (a, d_t, d_u) = self.run(premise, t1, u, x)?;
                Ok((a, TypingDerivation::proj1(d_t), d_u))
            }
            (TypingRule::Proj2 { premise }, Term::Snd(t1)) => {
                let (a, d_t, d_u) = self.run(premise, t1, u, x)?;
                Ok((a, TypingDerivation::proj2(d_t), d_u))
            }
            (TypingRule::Abs { premise }, Term::Abs(z, body)) => {
                let (y, _) = premise.context().last().ok_or_else(shape)?;
                let premise = if y == x {
                    let mut avoid: BTreeSet<String> = ctx.iter().map(|(v, _)| v.clone()).collect();
                    avoid.insert(x.to_string());
                    avoid.extend(t.all_names());
                    avoid.extend(u.all_names());
                    let y2 = fresh_name(y, &avoid);
                    rename_hypothesis(premise, y, &y2)?
                } else {
                    (**premise).clone()
                };
                let (y, c) = premise.context().last().cloned().expect("abs premise binds a variable");
                let body = body.subst(z, &Term::var(&y));
                let (a, d_t, d_u) = self.run(&premise, &body, u, x)?;
                // Γ, y:C, x:A  to  Γ, x:A, y:C
                let mut order = extended(ctx, x, &a);
                order.push((y.clone(), c));
                let d_t = TypingDerivation::abs(transport(&d_t, &order)?);
                Ok((a, d_t, strengthen_typing(&d_u, &y)?))
            }
            _ => Err(shape()),
        }
    }

    /// Decomposes the children containing `x`, intersects their argument
    /// types and moves every child into `Γ, x:A`.
    fn combine(
        &self,
        ctx: &[(String, Type)],
        children: [(&TypingDerivation, &Term); 2],
        u: &Term,
        x: &str,
        build: impl FnOnce(Vec<TypingDerivation>) -> TypingDerivation,
    ) -> Result<Parts, LambdaError> {
        let mut found = Vec::new();
        for (i, (c, ct)) in children.iter().enumerate() {
            if ct.occurs_free(x) {
                found.push((i, self.run(c, ct, u, x)?));
            }
        }
        let (a, d_u, coerced) = match found.as_slice() {
            [] => unreachable!("`x` occurs in some child"),
            [(i, (a, dt, du))] => (a.clone(), du.clone(), vec![(*i, dt.clone())]),
            [(i, (a1, dt1, du1)), (j, (a2, dt2, du2))] => {
                if a1 == a2 {
                    (a1.clone(), du1.clone(), vec![(*i, dt1.clone()), (*j, dt2.clone())])
                } else {
                    let a = Type::inter(a1.clone(), a2.clone());
                    let c1 = IscDerivation::inter_l(0, derive_weaken_gen(&derive_ax(a1), 1, a2)?);
                    let c2 = IscDerivation::inter_l(0, derive_weaken_gen(&derive_ax(a2), 0, a1)?);
                    let target = extended(ctx, x, &a);
                    let dt1 = self.recast(dt1, &target, x, c1)?;
                    let dt2 = self.recast(dt2, &target, x, c2)?;
                    let d_u = TypingDerivation::inter(du1.clone(), du2.clone());
                    (a, d_u, vec![(*i, dt1), (*j, dt2)])
                }
            }
            _ => unreachable!("two children"),
        };
        let target = extended(ctx, x, &a);
        let mut out = Vec::with_capacity(2);
        for (i, (c, _)) in children.iter().enumerate() {
            match coerced.iter().find(|(j, _)| *j == i) {
                Some((_, dt)) => out.push(dt.clone()),
                None => out.push(transport(c, &target)?),
            }
        }
        Ok((a, build(out), d_u))
    }

    /// Moves `d : Γ, x:A_i ⊢ t : B` to `Γ, x:A ⊢ t : B` using `A ⊢ A_i`.
    fn recast(
        &self,
        d: &TypingDerivation,
        target: &[(String, Type)],
        x: &str,
        coercion: IscDerivation,
    ) -> Result<TypingDerivation, LambdaError> {
        let mut witness: HashMap<String, IscDerivation> =
            d.context().iter().map(|(y, b)| (y.clone(), derive_ax(b))).collect();
        witness.insert(x.to_string(), coercion);
        weaken_typing(d, target, &witness)
    }
}

/// How a reduct is expanded back into a redex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expansion {
    /// The redex `(λvar. body) arg`, whose contractum is `body[arg/var]`.
    Beta { var: String, body: Term, arg: Term },
    /// The redex `fst <kept, erased>`.
    Proj1 { erased: Term },
    /// The redex `snd <erased, kept>`.
    Proj2 { erased: Term },
}

impl Expansion {
    pub fn kind(&self) -> RedexKind {
        match self {
            Expansion::Beta { .. } => RedexKind::Beta,
            Expansion::Proj1 { .. } => RedexKind::Proj1,
            Expansion::Proj2 { .. } => RedexKind::Proj2,
        }
    }

    /// The redex that contracts to `kept`.
    pub fn redex(&self, kept: &Term) -> Term {
        match self {
            Expansion::Beta { var, body, arg } => Term::app(Term::abs(var, body.clone()), arg.clone()),
            Expansion::Proj1 { erased } => Term::fst(Term::pair(kept.clone(), erased.clone())),
            Expansion::Proj2 { erased } => Term::snd(Term::pair(erased.clone(), kept.clone())),
        }
    }

    fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Expansion::Beta { var, body, arg } => {
                let mut fv = Term::abs(var, body.clone()).free_vars();
                fv.extend(arg.free_vars());
                fv
            }
            Expansion::Proj1 { erased } | Expansion::Proj2 { erased } => erased.free_vars(),
        }
    }

    fn rename_free(&self, from: &str, to: &str) -> Expansion {
        let to = Term::var(to);
        match self {
            Expansion::Beta { var, body, arg } => {
                let Term::Abs(var, body) = Term::abs(var, body.clone()).subst(from, &to) else {
                    unreachable!("substitution preserves the root")
                };
                Expansion::Beta {
                    var,
                    body: *body,
                    arg: arg.subst(from, &to),
                }
            }
            Expansion::Proj1 { erased } => Expansion::Proj1 {
                erased: erased.subst(from, &to),
            },
            Expansion::Proj2 { erased } => Expansion::Proj2 {
                erased: erased.subst(from, &to),
            },
        }
    }
}

/// Where and how the subject of a derivation is expanded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedexInfo {
    pub path: Vec<usize>,
    pub expansion: Expansion,
}

impl RedexInfo {
    /// Reads the expansion off a redex term placed at `path`.
    pub fn from_redex(path: Vec<usize>, redex: &Term) -> Option<RedexInfo> {
        let expansion = match redex {
            Term::App(f, arg) => match &**f {
                Term::Abs(var, body) => Expansion::Beta {
                    var: var.clone(),
                    body: (**body).clone(),
                    arg: (**arg).clone(),
                },
                _ => return None,
            },
            Term::Fst(p) => match &**p {
                Term::Pair(_, erased) => Expansion::Proj1 {
                    erased: (**erased).clone(),
                },
                _ => return None,
            },
            Term::Snd(p) => match &**p {
                Term::Pair(erased, _) => Expansion::Proj2 {
                    erased: (**erased).clone(),
                },
                _ => return None,
            },
            _ => return None,
        };
        Some(RedexInfo { path, expansion })
    }

    /// The subject after expansion, if the path exists.
    pub fn expand_term(&self, t: &Term) -> Option<Term> {
        let kept = t.at(&self.path)?;
        t.replace_at(&self.path, self.expansion.redex(kept))
    }
}

/// Derivation of the same context and type for the subject with the
/// subterm at `info.path` replaced by a redex contracting to it.
pub fn subject_expansion(
    d: &TypingDerivation,
    info: &RedexInfo,
    sig: &Signature,
) -> Result<TypingDerivation, LambdaError> {
    let at = d
        .term()
        .at(&info.path)
        .ok_or_else(|| LambdaError::PreconditionViolated(format!("no subterm at {:?}", info.path)))?;
    if let Expansion::Beta { var, body, arg } = &info.expansion {
        if at != &body.subst(var, arg) {
            return Err(LambdaError::PreconditionViolated(format!(
                "`{at}` is not the contractum of `{}`",
                info.expansion.redex(at)
            )));
        }
    }
    expand(d, &info.path, &info.expansion, sig)
}

fn expand(
    d: &TypingDerivation,
    path: &[usize],
    exp: &Expansion,
    sig: &Signature,
) -> Result<TypingDerivation, LambdaError> {
    let ctx = d.context();
    if let TypingRule::Omega = d.rule() {
        let kept = d.term().at(path).expect("path checked");
        let term = d.term().replace_at(path, exp.redex(kept)).expect("path checked");
        if let Some(y) = term.free_vars().iter().find(|y| lookup(ctx, y).is_none()) {
            return Err(LambdaError::PreconditionViolated(format!("`{y}` is not declared")));
        }
        return Ok(TypingDerivation::omega(ctx.to_vec(), term, d.ty().clone()));
    }
    let Some((&i, rest)) = path.split_first() else {
        return expand_root(d, exp, sig);
    };
    let bad = || LambdaError::PreconditionViolated(format!("`{}` node does not lead to {:?}", d.tag(), path));
    Ok(match (d.rule(), i) {
        (TypingRule::Leq { premise, sub }, _) => TypingDerivation::leq(expand(premise, path, exp, sig)?, sub.clone()),
        (TypingRule::Inter { left, right }, _) => {
            TypingDerivation::inter(expand(left, path, exp, sig)?, expand(right, path, exp, sig)?)
        }
        (TypingRule::App { fun, arg }, 0) => TypingDerivation::app(expand(fun, rest, exp, sig)?, (**arg).clone()),
        (TypingRule::App { fun, arg }, 1) => TypingDerivation::app((**fun).clone(), expand(arg, rest, exp, sig)?),
        (TypingRule::Pair { left, right }, 0) => {
            TypingDerivation::pair(expand(left, rest, exp, sig)?, (**right).clone())
        }
        (TypingRule::Pair { left, right }, 1) => {
            TypingDerivation::pair((**left).clone(), expand(right, rest, exp, sig)?)
        }
        (TypingRule::Proj1 { premise }, 0) => TypingDerivation::proj1(expand(premise, rest, exp, sig)?),
        (TypingRule::Proj2 { premise }, 0) => TypingDerivation::proj2(expand(premise, rest, exp, sig)?),
        (TypingRule::Abs { premise }, 0) => {
            let Term::Abs(z, _) = d.term() else { return Err(bad()) };
            let (y, _) = premise.context().last().ok_or_else(bad)?;
            let exp = if z == y { exp.clone() } else { exp.rename_free(z, y) };
            TypingDerivation::abs(expand(premise, rest, &exp, sig)?)
        }
        _ => return Err(bad()),
    })
}

fn expand_root(d: &TypingDerivation, exp: &Expansion, sig: &Signature) -> Result<TypingDerivation, LambdaError> {
    let ctx = d.context();
    if let Some(y) = exp.free_vars().iter().find(|y| lookup(ctx, y).is_none()) {
        return Err(LambdaError::PreconditionViolated(format!("`{y}` is not declared")));
    }
    let top = sig.top_type()?;
    Ok(match exp {
        Expansion::Beta { var, body, arg } => {
            let (x, body) = if lookup(ctx, var).is_some() {
                let mut avoid: BTreeSet<String> = ctx.iter().map(|(v, _)| v.clone()).collect();
                avoid.extend(body.all_names());
                let x = fresh_name(var, &avoid);
                let renamed = body.subst(var, &Term::var(&x));
                (x, renamed)
            } else {
                (var.clone(), body.clone())
            };
            let (_, d_t, d_u) = decompose_substitution(d, &body, arg, &x, sig)?;
            TypingDerivation::app(TypingDerivation::abs(d_t), d_u)
        }
        Expansion::Proj1 { erased } => {
            let pad = TypingDerivation::omega(ctx.to_vec(), erased.clone(), top);
            TypingDerivation::proj1(TypingDerivation::pair(d.clone(), pad))
        }
        Expansion::Proj2 { erased } => {
            let pad = TypingDerivation::omega(ctx.to_vec(), erased.clone(), top);
            TypingDerivation::proj2(TypingDerivation::pair(pad, d.clone()))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isc::{prove, Sequent};
    use crate::lambda::check_typing;
    use crate::lambda::typing::Context;

    fn sig() -> Signature {
        Signature::arrow_product(["A", "B", "C"])
    }

    fn ty(s: &str) -> Type {
        crate::syntax::parse_type(s, &sig()).unwrap()
    }

    fn ctx(entries: &[(&str, &str)]) -> Context {
        entries.iter().map(|(x, t)| (x.to_string(), ty(t))).collect()
    }

    fn sub(a: &str, b: &str) -> IscDerivation {
        prove(&Sequent::single(ty(a), ty(b)), &sig()).unwrap().unwrap()
    }

    fn ok(d: &TypingDerivation) {
        check_typing(d, &sig()).unwrap_or_else(|e| panic!("{e}\n{}", d.to_text(false)));
    }

    fn var(g: &Context, x: &str) -> TypingDerivation {
        TypingDerivation::var_in(g, x).unwrap()
    }

    fn identity_redex() -> TypingDerivation {
        let g = ctx(&[("y", "A")]);
        let id = TypingDerivation::abs(var(&ctx(&[("y", "A"), ("x", "A")]), "x"));
        TypingDerivation::app(id, var(&g, "y"))
    }

    #[test]
    fn beta_on_identity() {
        let d = identity_redex();
        ok(&d);
        let r = subject_reduction(&d, &[], RedexKind::Beta, &sig()).unwrap();
        ok(&r);
        assert_eq!(r.judgement().to_string(), "y:A |- y : A");
        assert_eq!(
            subject_reduction(&d, &[], RedexKind::Proj1, &sig()).unwrap_err(),
            LambdaError::NotARedex(vec![])
        );
    }

    #[test]
    fn beta_with_self_application() {
        // (\x. x x) w  with the function typed at a weaker arrow via leq
        let both = "(A -> B) /\\ A";
        let arg_ty = format!("({both}) /\\ C");
        let g = ctx(&[("w", &arg_ty)]);
        let inner = ctx(&[("w", &arg_ty), ("x", both)]);
        let body = TypingDerivation::app(
            TypingDerivation::leq(var(&inner, "x"), sub(both, "A -> B")),
            TypingDerivation::leq(var(&inner, "x"), sub(both, "A")),
        );
        let fun = TypingDerivation::leq(
            TypingDerivation::abs(body),
            sub(&format!("({both}) -> B"), &format!("{arg_ty} -> B")),
        );
        let d = TypingDerivation::app(fun, var(&g, "w"));
        ok(&d);
        let r = subject_reduction(&d, &[], RedexKind::Beta, &sig()).unwrap();
        ok(&r);
        assert_eq!(r.term(), &Term::parse("w w").unwrap());
        assert_eq!(r.ty(), d.ty());
    }

    #[test]
    fn projection() {
        let g = ctx(&[("y", "A"), ("z", "B")]);
        let d = TypingDerivation::proj1(TypingDerivation::pair(var(&g, "y"), var(&g, "z")));
        let r = subject_reduction(&d, &[], RedexKind::Proj1, &sig()).unwrap();
        ok(&r);
        assert_eq!(r.judgement().to_string(), "y:A, z:B |- y : A");
        let d = TypingDerivation::proj2(TypingDerivation::pair(var(&g, "y"), var(&g, "z")));
        let r = subject_reduction(&d, &[], RedexKind::Proj2, &sig()).unwrap();
        assert_eq!(r.judgement().to_string(), "y:A, z:B |- z : B");
    }

    #[test]
    fn omega_stays_omega() {
        let d = TypingDerivation::omega(ctx(&[("y", "A")]), Term::parse("(\\x. x) y").unwrap(), ty("Omega"));
        let r = subject_reduction(&d, &[], RedexKind::Beta, &sig()).unwrap();
        assert!(matches!(r.rule(), TypingRule::Omega));
        assert_eq!(r.term(), &Term::var("y"));
    }

    #[test]
    fn reduction_under_binder_and_intersection() {
        let d = identity_redex();
        let wrapped = TypingDerivation::inter(d.clone(), TypingDerivation::leq(d, sub("A", "A /\\ Omega")));
        let lam = TypingDerivation::abs(transport(&wrapped, &ctx(&[("y", "A"), ("q", "B")])).unwrap());
        ok(&lam);
        let redexes = lam.term().find_redexes();
        assert_eq!(redexes, vec![(vec![0], RedexKind::Beta)]);
        let r = subject_reduction(&lam, &[0], RedexKind::Beta, &sig()).unwrap();
        ok(&r);
        assert_eq!(r.judgement().context, lam.judgement().context);
        assert_eq!(r.ty(), lam.ty());
        assert_eq!(r.term(), &Term::parse("\\q. y").unwrap());
    }

    #[test]
    fn decomposition() {
        let g = ctx(&[("y", "A")]);
        let d = var(&g, "y");
        let (a, dt, du) = decompose_substitution(&d, &Term::var("x"), &Term::var("y"), "x", &sig()).unwrap();
        assert_eq!(a, ty("A"));
        ok(&dt);
        ok(&du);
        let (a, dt, du) = decompose_substitution(&d, &Term::var("y"), &Term::var("y"), "x", &sig()).unwrap();
        assert_eq!(a, ty("Omega"));
        ok(&dt);
        ok(&du);
        assert!(matches!(du.rule(), TypingRule::Omega));

        let both = "(A -> B) /\\ A";
        let g = ctx(&[("w", both)]);
        let d = TypingDerivation::app(
            TypingDerivation::leq(var(&g, "w"), sub(both, "A -> B")),
            TypingDerivation::leq(var(&g, "w"), sub(both, "A")),
        );
        let t = Term::parse("x x").unwrap();
        let (a, dt, du) = decompose_substitution(&d, &t, &Term::var("w"), "x", &sig()).unwrap();
        assert_eq!(a, ty(both));
        ok(&dt);
        ok(&du);

        let g = ctx(&[("f", "A -> B"), ("a", "A")]);
        let d = TypingDerivation::app(var(&g, "f"), var(&g, "a"));
        let (a, dt, du) =
            decompose_substitution(&d, &Term::parse("x a").unwrap(), &Term::var("f"), "x", &sig()).unwrap();
        assert_eq!(a, ty("A -> B"));
        ok(&dt);
        ok(&du);
        let t = Term::parse("x x").unwrap();
        assert!(decompose_substitution(&d, &t, &Term::var("f"), "x", &sig()).is_err());
    }

    #[test]
    fn decomposition_intersects_distinct_demands() {
        // <a, a> typed with components A and Omega, split as <x, x>[a/x]
        let g = ctx(&[("a", "A"), ("b", "B")]);
        let d = TypingDerivation::pair(
            var(&g, "a"),
            TypingDerivation::omega(g.clone(), Term::var("a"), ty("Omega")),
        );
        let (a, dt, du) =
            decompose_substitution(&d, &Term::parse("<x, x>").unwrap(), &Term::var("a"), "x", &sig()).unwrap();
        assert_eq!(a, ty("A /\\ Omega"));
        ok(&dt);
        ok(&du);
    }

    #[test]
    fn expansion() {
        let g = ctx(&[("y", "A")]);
        let d = var(&g, "y");
        let info = RedexInfo::from_redex(vec![], &Term::parse("(\\x. x) y").unwrap()).unwrap();
        let e = subject_expansion(&d, &info, &sig()).unwrap();
        ok(&e);
        assert_eq!(e.judgement().to_string(), "y:A |- (\\x. x) y : A");
        let back = subject_reduction(&e, &[], RedexKind::Beta, &sig()).unwrap();
        assert_eq!(back.judgement(), d.judgement());

        let info = RedexInfo {
            path: vec![],
            expansion: Expansion::Proj1 {
                erased: Term::parse("\\z. z").unwrap(),
            },
        };
        let e = subject_expansion(&d, &info, &sig()).unwrap();
        ok(&e);
        assert_eq!(e.term(), &Term::parse("fst <y, \\z. z>").unwrap());
        let TypingRule::Proj1 { premise } = e.rule() else {
            panic!()
        };
        assert_eq!(premise.ty(), &ty("A * Omega"));

        // binder clash: the redex variable is already declared
        let info = RedexInfo::from_redex(vec![], &Term::parse("(\\y. y) y").unwrap()).unwrap();
        let e = subject_expansion(&d, &info, &sig()).unwrap();
        ok(&e);
        assert_eq!(e.term(), &Term::parse("(\\y. y) y").unwrap());
    }

    #[test]
    fn expansion_under_congruence() {
        let g = ctx(&[("f", "A -> B"), ("a", "A")]);
        let d = TypingDerivation::app(var(&g, "f"), var(&g, "a"));
        let info = RedexInfo::from_redex(vec![1], &Term::parse("snd <f, a>").unwrap()).unwrap();
        let e = subject_expansion(&d, &info, &sig()).unwrap();
        ok(&e);
        assert_eq!(e.term(), &Term::parse("f (snd <f, a>)").unwrap());
        let back = subject_reduction(&e, &[1], RedexKind::Proj2, &sig()).unwrap();
        assert_eq!(back.judgement(), d.judgement());

        // under a binder whose premise uses another name
        let lam = TypingDerivation::abs(var(&ctx(&[("a", "A"), ("v", "A")]), "v"));
        let lam = TypingDerivation::from_parts(
            crate::lambda::Judgement::new(ctx(&[("a", "A")]), Term::parse("\\u. u").unwrap(), ty("A -> A")),
            lam.rule().clone(),
        );
        ok(&lam);
        let info = RedexInfo::from_redex(vec![0], &Term::parse("(\\k. k) u").unwrap()).unwrap();
        let e = subject_expansion(&lam, &info, &sig()).unwrap();
        ok(&e);
        assert_eq!(e.term(), &Term::parse("\\u. (\\k. k) u").unwrap());
    }
}
