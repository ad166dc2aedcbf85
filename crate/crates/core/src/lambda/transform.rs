//! Structural transformations of typing derivations and the generation lemmas.
//!
//! Weakening, strengthening, transport and substitution are all instances
//! of one engine that rebuilds a derivation over a new context while mapping
//! every hypothesis either to a (possibly coerced) variable of the new
//! context or to a derivation typing the substituted term there.

use std::collections::{BTreeSet, HashMap};

use super::term::{fresh_name, Term};
use super::typing::{lookup, Context, TypingDerivation, TypingRule};
use super::LambdaError;
use crate::isc::admissible::{fold_context, weaken_many};
use crate::isc::{derive_ax, derive_cut, derive_weaken_gen, IscDerivation};
use crate::types::{Signature, Type};

#[derive(Clone)]
enum Binding {
    /// Maps the hypothesis to `to`; `coercion` concludes `B' ⊢ B` when the
    /// new declaration `B'` differs from the old one `B`.
    Rename {
        to: String,
        coercion: Option<IscDerivation>,
    },
    /// Substitutes the subject of the derivation, whose context is contained
    /// in the target context.
    Replace(TypingDerivation),
}

fn binding<'a>(sigma: &'a [(String, Binding)], x: &str) -> Option<&'a Binding> {
    sigma.iter().rev().find(|(y, _)| y == x).map(|(_, b)| b)
}

fn term_map(sigma: &[(String, Binding)]) -> HashMap<String, Term> {
    sigma
        .iter()
        .map(|(x, b)| {
            let t = match b {
                Binding::Rename { to, .. } => Term::var(to),
                Binding::Replace(d) => d.term().clone(),
            };
            (x.clone(), t)
        })
        .collect()
}

fn apply(
    d: &TypingDerivation,
    target: &[(String, Type)],
    sigma: &mut Vec<(String, Binding)>,
) -> Result<TypingDerivation, LambdaError> {
    Ok(match d.rule() {
        TypingRule::Var => {
            let Term::Var(x) = d.term() else {
                return Err(LambdaError::PreconditionViolated(
                    "var node without a variable subject".into(),
                ));
            };
            match binding(sigma, x) {
                None => return Err(LambdaError::MissingWitness(x.clone())),
                Some(Binding::Rename { to, coercion: None }) => {
                    TypingDerivation::var(target.to_vec(), to, d.ty().clone())
                }
                Some(Binding::Rename { to, coercion: Some(c) }) => {
                    let leaf = TypingDerivation::var(target.to_vec(), to, c.context()[0].clone());
                    TypingDerivation::leq(leaf, c.clone())
                }
                Some(Binding::Replace(e)) => {
                    let e = e.clone();
                    transport(&e, target)?
                }
            }
        }
        TypingRule::Omega => {
            let term = d.term().subst_many(&term_map(sigma));
            TypingDerivation::omega(target.to_vec(), term, d.ty().clone())
        }
        TypingRule::Leq { premise, sub } => TypingDerivation::leq(apply(premise, target, sigma)?, sub.clone()),
        TypingRule::Inter { left, right } => {
            TypingDerivation::inter(apply(left, target, sigma)?, apply(right, target, sigma)?)
        }
        TypingRule::App { fun, arg } => TypingDerivation::app(apply(fun, target, sigma)?, apply(arg, target, sigma)?),
        TypingRule::Pair { left, right } => {
            TypingDerivation::pair(apply(left, target, sigma)?, apply(right, target, sigma)?)
        }
        TypingRule::Proj1 { premise } => TypingDerivation::proj1(apply(premise, target, sigma)?),
        TypingRule::Proj2 { premise } => TypingDerivation::proj2(apply(premise, target, sigma)?),
        TypingRule::Abs { premise } => {
            let (y, a) = premise
                .context()
                .last()
                .ok_or_else(|| LambdaError::PreconditionViolated("abs premise context is empty".into()))?;
            let y2 = if lookup(target, y).is_none() {
                y.clone()
            } else {
                let avoid: BTreeSet<String> = target.iter().map(|(z, _)| z.clone()).collect();
                fresh_name(y, &avoid)
            };
            let mut inner = target.to_vec();
            inner.push((y2.clone(), a.clone()));
            sigma.push((y.clone(), Binding::Rename { to: y2, coercion: None }));
            let body = apply(premise, &inner, sigma);
            sigma.pop();
            TypingDerivation::abs(body?)
        }
    })
}

fn identity(ctx: &[(String, Type)], skip: Option<&str>) -> Vec<(String, Binding)> {
    ctx.iter()
        .filter(|(x, _)| Some(x.as_str()) != skip)
        .map(|(x, _)| {
            let b = Binding::Rename {
                to: x.clone(),
                coercion: None,
            };
            (x.clone(), b)
        })
        .collect()
}

/// Moves `d` into any context containing each of its declarations with the
/// same type: extension, permutation, or both.
pub fn transport(d: &TypingDerivation, target: &[(String, Type)]) -> Result<TypingDerivation, LambdaError> {
    for (x, b) in d.context() {
        match lookup(target, x) {
            None => return Err(LambdaError::MissingWitness(x.clone())),
            Some(t) if t != b => {
                return Err(LambdaError::PreconditionViolated(format!(
                    "`{x}` is declared at {t} instead of {b}"
                )))
            }
            Some(_) => {}
        }
    }
    apply(d, target, &mut identity(d.context(), None))
}

/// Renames the declaration `from` to `to`, which must be unused.
pub(crate) fn rename_hypothesis(d: &TypingDerivation, from: &str, to: &str) -> Result<TypingDerivation, LambdaError> {
    let target: Context = d
        .context()
        .iter()
        .map(|(y, b)| (if y == from { to.to_string() } else { y.clone() }, b.clone()))
        .collect();
    let mut sigma = identity(d.context(), Some(from));
    sigma.push((
        from.to_string(),
        Binding::Rename {
            to: to.to_string(),
            coercion: None,
        },
    ));
    apply(d, &target, &mut sigma)
}

/// Rebuilds `d : Γ ⊢ t : A` over `target` where every `x:B` in Γ has a
/// witness concluding `B' ⊢ B` and `x:B'` is in `target`.
pub fn weaken_typing(
    d: &TypingDerivation,
    target: &[(String, Type)],
    witness: &HashMap<String, IscDerivation>,
) -> Result<TypingDerivation, LambdaError> {
    let mut sigma = Vec::with_capacity(d.context().len());
    for (x, b) in d.context() {
        let w = witness.get(x).ok_or_else(|| LambdaError::MissingWitness(x.clone()))?;
        let b2 = lookup(target, x).ok_or_else(|| LambdaError::MissingWitness(x.clone()))?;
        if w.context() != std::slice::from_ref(b2) || w.goal() != b {
            return Err(LambdaError::PreconditionViolated(format!(
                "witness for `{x}` concludes {} instead of {b2} |- {b}",
                w.conclusion()
            )));
        }
        let coercion = (b2 != b).then(|| w.clone());
        sigma.push((
            x.clone(),
            Binding::Rename {
                to: x.clone(),
                coercion,
            },
        ));
    }
    apply(d, target, &mut sigma)
}

/// Removes the declaration of `x`, which must not occur free in the subject.
pub fn strengthen_typing(d: &TypingDerivation, x: &str) -> Result<TypingDerivation, LambdaError> {
    if d.term().occurs_free(x) {
        return Err(LambdaError::VariableOccurs(x.to_string()));
    }
    let target: Context = d.context().iter().filter(|(y, _)| y != x).cloned().collect();
    apply(d, &target, &mut identity(d.context(), Some(x)))
}

/// From `Γ, x:A, Δ ⊢ t : B` and `Γ, Δ ⊢ u : A` builds `Γ, Δ ⊢ t[u/x] : B`.
pub fn substitute_typing(d_t: &TypingDerivation, d_u: &TypingDerivation) -> Result<TypingDerivation, LambdaError> {
    let (g, h) = (d_t.context(), d_u.context());
    let mismatch = || LambdaError::PreconditionViolated("contexts do not have the shape Γ,x:A,Δ and Γ,Δ".into());
    if g.len() != h.len() + 1 {
        return Err(mismatch());
    }
    let p = (0..h.len()).find(|&i| g[i] != h[i]).unwrap_or(h.len());
    if g[p + 1..] != h[p..] {
        return Err(mismatch());
    }
    let (x, a) = &g[p];
    if a != d_u.ty() {
        return Err(LambdaError::PreconditionViolated(format!(
            "`{x}` is declared at {a} but the argument is typed at {}",
            d_u.ty()
        )));
    }
    let mut sigma = identity(g, Some(x));
    sigma.push((x.clone(), Binding::Replace(d_u.clone())));
    apply(d_t, h, &mut sigma)
}

/// One index of a generation lemma.
///
/// | lemma | `first` | `second` | `premises` | family member |
/// |-------|---------|----------|------------|---------------|
/// | app   | `A_i` | `B_i` | `Γ ⊢ t : A_i→B_i`, `Γ ⊢ u : A_i` | `B_i` |
/// | abs   | `B_i` | `C_i` | `Γ, y:B_i ⊢ t' : C_i` | `B_i→C_i` |
/// | pair  | `B_i` | `C_i` | `Γ ⊢ t : B_i`, `Γ ⊢ u : C_i` | `B_i×C_i` |
/// | proj1 | `B_i` | `C_i` | `Γ ⊢ t : B_i×C_i` | `B_i` |
/// | proj2 | `B_i` | `C_i` | `Γ ⊢ t : B_i×C_i` | `C_i` |
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationItem {
    pub first: Type,
    pub second: Type,
    pub premises: Vec<TypingDerivation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generation {
    pub items: Vec<GenerationItem>,
    /// One member per item, as listed in [`GenerationItem`].
    pub family: Vec<Type>,
    /// Concludes `family ⊢ A` with the family as a list.
    pub family_evidence: IscDerivation,
    /// Concludes `⋂ family ⊢ A`; the intersection of no types is the top type.
    pub evidence: IscDerivation,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Lemma {
    App,
    Abs,
    Pair,
    Proj1,
    Proj2,
}

fn extract(d: &TypingDerivation, lemma: Lemma) -> Option<(GenerationItem, Type)> {
    let item = |first: &Type, second: &Type, premises: Vec<&TypingDerivation>| GenerationItem {
        first: first.clone(),
        second: second.clone(),
        premises: premises.into_iter().cloned().collect(),
    };
    match (d.rule(), lemma) {
        (TypingRule::App { fun, arg }, Lemma::App) => {
            let (a, b) = fun.ty().as_arrow()?;
            Some((item(a, b, vec![fun, arg]), b.clone()))
        }
        (TypingRule::Abs { premise }, Lemma::Abs) => {
            let (_, b) = premise.context().last()?;
            Some((item(b, premise.ty(), vec![premise]), d.ty().clone()))
        }
        (TypingRule::Pair { left, right }, Lemma::Pair) => {
            Some((item(left.ty(), right.ty(), vec![left, right]), d.ty().clone()))
        }
        (TypingRule::Proj1 { premise }, Lemma::Proj1) => {
            let (b, c) = premise.ty().as_prod()?;
            Some((item(b, c, vec![premise]), b.clone()))
        }
        (TypingRule::Proj2 { premise }, Lemma::Proj2) => {
            let (b, c) = premise.ty().as_prod()?;
            Some((item(b, c, vec![premise]), c.clone()))
        }
        _ => None,
    }
}

type Core = (Vec<GenerationItem>, Vec<Type>, IscDerivation);

fn core(d: &TypingDerivation, lemma: Lemma) -> Result<Core, LambdaError> {
    if let Some((item, member)) = extract(d, lemma) {
        return Ok((vec![item], vec![member.clone()], derive_ax(&member)));
    }
    match d.rule() {
        TypingRule::Leq { premise, sub } => {
            let (items, family, e) = core(premise, lemma)?;
            let e = derive_cut(&e, sub, 0)?;
            Ok((items, family, e))
        }
        TypingRule::Inter { left, right } => {
            let (mut items, mut family, el) = core(left, lemma)?;
            let (items_r, family_r, er) = core(right, lemma)?;
            let l = weaken_many(&el, family.len(), &family_r);
            let r = weaken_many(&er, 0, &family);
            items.extend(items_r);
            family.extend(family_r);
            Ok((items, family, IscDerivation::inter_r(l, r)))
        }
        TypingRule::Omega => Ok((vec![], vec![], top_from_nothing(d.ty()))),
        _ => Err(LambdaError::PreconditionViolated(format!(
            "`{}` node cannot conclude `{}`",
            d.tag(),
            d.judgement()
        ))),
    }
}

/// `⊢ Ω` for a top-like `Ω`.
pub(crate) fn top_from_nothing(top: &Type) -> IscDerivation {
    IscDerivation::constr(vec![], top.clone(), vec![], vec![])
}

fn generation(d: &TypingDerivation, sig: &Signature, lemma: Lemma, shape_ok: bool) -> Result<Generation, LambdaError> {
    if !shape_ok {
        return Err(LambdaError::PreconditionViolated(format!(
            "subject `{}` has the wrong shape for this lemma",
            d.term()
        )));
    }
    let (items, family, family_evidence) = core(d, lemma)?;
    let evidence = fold_context(&family_evidence, sig)?;
    Ok(Generation {
        items,
        family,
        family_evidence,
        evidence,
    })
}

pub fn generation_app(d: &TypingDerivation, sig: &Signature) -> Result<Generation, LambdaError> {
    generation(d, sig, Lemma::App, matches!(d.term(), Term::App(..)))
}

pub fn generation_abs(d: &TypingDerivation, sig: &Signature) -> Result<Generation, LambdaError> {
    generation(d, sig, Lemma::Abs, matches!(d.term(), Term::Abs(..)))
}

pub fn generation_pair(d: &TypingDerivation, sig: &Signature) -> Result<Generation, LambdaError> {
    generation(d, sig, Lemma::Pair, matches!(d.term(), Term::Pair(..)))
}

pub fn generation_proj1(d: &TypingDerivation, sig: &Signature) -> Result<Generation, LambdaError> {
    generation(d, sig, Lemma::Proj1, matches!(d.term(), Term::Fst(..)))
}

pub fn generation_proj2(d: &TypingDerivation, sig: &Signature) -> Result<Generation, LambdaError> {
    generation(d, sig, Lemma::Proj2, matches!(d.term(), Term::Snd(..)))
}

/// For `Γ ⊢ x : A` with `x:B` in Γ, a derivation of `B ⊢ A`.
pub fn generation_var(d: &TypingDerivation) -> Result<IscDerivation, LambdaError> {
    let Term::Var(x) = d.term() else {
        return Err(LambdaError::PreconditionViolated("subject is not a variable".into()));
    };
    let b = lookup(d.context(), x).ok_or_else(|| LambdaError::MissingWitness(x.clone()))?;
    var_evidence(d, b)
}

fn var_evidence(d: &TypingDerivation, b: &Type) -> Result<IscDerivation, LambdaError> {
    Ok(match d.rule() {
        TypingRule::Var => derive_ax(b),
        TypingRule::Leq { premise, sub } => derive_cut(&var_evidence(premise, b)?, sub, 0)?,
        TypingRule::Inter { left, right } => IscDerivation::inter_r(var_evidence(left, b)?, var_evidence(right, b)?),
        TypingRule::Omega => derive_weaken_gen(&top_from_nothing(d.ty()), 0, b)?,
        _ => {
            return Err(LambdaError::PreconditionViolated(format!(
                "`{}` node cannot type a variable",
                d.tag()
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isc::{prove, Sequent};
    use crate::lambda::check_typing;

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

    #[test]
    fn weakening_with_witnesses() {
        let d = TypingDerivation::var_in(&ctx(&[("x", "A")]), "x").unwrap();
        let target = ctx(&[("x", "A /\\ B")]);
        let w: HashMap<_, _> = [("x".to_string(), sub("A /\\ B", "A"))].into();
        let e = weaken_typing(&d, &target, &w).unwrap();
        ok(&e);
        assert_eq!(e.judgement().to_string(), "x:A /\\ B |- x : A");

        let same: HashMap<_, _> = [("x".to_string(), derive_ax(&ty("A")))].into();
        let e = weaken_typing(&d, &ctx(&[("x", "A")]), &same).unwrap();
        assert_eq!(e.judgement(), d.judgement());

        let err = weaken_typing(&d, &target, &HashMap::new()).unwrap_err();
        assert_eq!(err, LambdaError::MissingWitness("x".into()));
    }

    #[test]
    fn strengthening() {
        let g = ctx(&[("y", "B"), ("x", "A")]);
        let d = TypingDerivation::var_in(&g, "x").unwrap();
        let e = strengthen_typing(&d, "y").unwrap();
        ok(&e);
        assert_eq!(e.judgement().to_string(), "x:A |- x : A");
        assert_eq!(
            strengthen_typing(&d, "x").unwrap_err(),
            LambdaError::VariableOccurs("x".into())
        );

        let g = ctx(&[("f", "A -> B"), ("y", "C"), ("x", "A")]);
        let d = TypingDerivation::app(
            TypingDerivation::var_in(&g, "f").unwrap(),
            TypingDerivation::var_in(&g, "x").unwrap(),
        );
        let e = strengthen_typing(&d, "y").unwrap();
        ok(&e);
        assert_eq!(e.context().len(), 2);
    }

    #[test]
    fn substitution() {
        let g = ctx(&[("y", "B"), ("x", "B")]);
        let lam =
            TypingDerivation::abs(TypingDerivation::var_in(&ctx(&[("y", "B"), ("x", "B"), ("z", "C")]), "x").unwrap());
        assert_eq!(lam.context(), g.as_slice());
        let arg = TypingDerivation::var_in(&ctx(&[("y", "B")]), "y").unwrap();
        let r = substitute_typing(&lam, &arg).unwrap();
        ok(&r);
        assert_eq!(r.term(), &Term::parse("\\z. y").unwrap());

        // x x  with  x := w
        let both = "(A -> B) /\\ A";
        let g = ctx(&[("w", both), ("x", both)]);
        let x = || TypingDerivation::var_in(&g, "x").unwrap();
        let d = TypingDerivation::app(
            TypingDerivation::leq(x(), sub(both, "A -> B")),
            TypingDerivation::leq(x(), sub(both, "A")),
        );
        ok(&d);
        let w = TypingDerivation::var_in(&ctx(&[("w", both)]), "w").unwrap();
        let r = substitute_typing(&d, &w).unwrap();
        ok(&r);
        assert_eq!(r.term(), &Term::parse("w w").unwrap());

        let closed = TypingDerivation::omega(vec![], Term::var("q"), ty("Omega"));
        assert!(substitute_typing(&lam, &closed).is_err());
    }

    #[test]
    fn transport_renames_clashing_binders() {
        let lam = TypingDerivation::abs(TypingDerivation::var_in(&ctx(&[("x", "B"), ("y", "C")]), "x").unwrap());
        let moved = transport(&lam, &ctx(&[("y", "A"), ("x", "B")])).unwrap();
        ok(&moved);
        assert_eq!(moved.term(), lam.term());
        let TypingRule::Abs { premise } = moved.rule() else {
            unreachable!()
        };
        assert_eq!(premise.context().last().unwrap().0, "y1");
    }

    #[test]
    fn generation_lemmas() {
        let g = ctx(&[("f", "(A -> B) /\\ (A -> C)"), ("x", "A")]);
        let f = TypingDerivation::var_in(&g, "f").unwrap();
        let x = TypingDerivation::var_in(&g, "x").unwrap();
        let app1 = TypingDerivation::app(
            TypingDerivation::leq(f.clone(), sub("(A -> B) /\\ (A -> C)", "A -> B")),
            x.clone(),
        );
        let app2 = TypingDerivation::app(TypingDerivation::leq(f, sub("(A -> B) /\\ (A -> C)", "A -> C")), x);
        let both = TypingDerivation::inter(app1.clone(), app2);
        let d = TypingDerivation::leq(both, sub("B /\\ C", "C /\\ B"));
        ok(&d);
        let gen = generation_app(&d, &sig()).unwrap();
        assert_eq!(gen.items.len(), 2);
        assert_eq!(gen.family, vec![ty("B"), ty("C")]);
        assert_eq!(gen.evidence.conclusion().to_string(), "B /\\ C |- C /\\ B");
        crate::isc::check_isc(&gen.evidence, &sig()).unwrap();
        crate::isc::check_isc(&gen.family_evidence, &sig()).unwrap();
        gen.items.iter().flat_map(|i| &i.premises).for_each(ok);

        let single = generation_app(&app1, &sig()).unwrap();
        assert_eq!(single.items.len(), 1);

        let om = TypingDerivation::omega(g.clone(), Term::parse("f x").unwrap(), ty("Omega"));
        let gen = generation_app(&om, &sig()).unwrap();
        assert!(gen.items.is_empty());
        assert_eq!(gen.evidence.conclusion().to_string(), "Omega |- Omega");
        assert!(generation_abs(&om, &sig()).is_err());
    }

    #[test]
    fn variable_generation() {
        let g = ctx(&[("x", "A /\\ B")]);
        let x = TypingDerivation::var_in(&g, "x").unwrap();
        assert_eq!(generation_var(&x).unwrap(), derive_ax(&ty("A /\\ B")));
        let om = TypingDerivation::omega(g.clone(), Term::var("x"), ty("Omega"));
        assert_eq!(
            generation_var(&om).unwrap().conclusion().to_string(),
            "A /\\ B |- Omega"
        );
        let d = TypingDerivation::inter(
            TypingDerivation::leq(x.clone(), sub("A /\\ B", "B")),
            TypingDerivation::leq(x, sub("A /\\ B", "A")),
        );
        let e = generation_var(&d).unwrap();
        crate::isc::check_isc(&e, &sig()).unwrap();
        assert_eq!(e.conclusion().to_string(), "A /\\ B |- B /\\ A");
    }
}
