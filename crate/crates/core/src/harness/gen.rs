//! Random types, sequents and subtyping derivations.
//!
//! Derivable sequents are built by moving from `⋂ Γ` to a supertype with
//! [`sup`], which only applies steps that hold in every signature: dropping
//! to a conjunct or to the top type, raising the head along the preorder,
//! merging two atoms that share head and contravariant arguments, and
//! recursing with [`sub`] into contravariant and [`sup`] into covariant
//! positions.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::axiomatic::{shape, AxDerivation, AxGen, AxRule, Shape};
use crate::isc::{prove, IscDerivation, Sequent};
use crate::types::{big_inter, random_type, Signature, Type, ARROW, PROD};

pub(crate) fn ty<R: Rng>(rng: &mut R, sig: &Signature, max_size: usize) -> Option<Type> {
    random_type(rng, sig, max_size)
}

pub(crate) fn context<R: Rng>(rng: &mut R, sig: &Signature, max_size: usize, len: usize) -> Option<Vec<Type>> {
    (0..len).map(|_| ty(rng, sig, max_size)).collect()
}

pub(crate) fn sequent<R: Rng>(rng: &mut R, sig: &Signature, max_size: usize, max_len: usize) -> Option<Sequent> {
    let len = rng.gen_range(0..=max_len);
    let ctx = context(rng, sig, max_size, len)?;
    Some(Sequent::new(ctx, ty(rng, sig, max_size)?))
}

/// A supertype of `t`.
pub(crate) fn sup<R: Rng>(rng: &mut R, sig: &Signature, t: &Type, depth: usize) -> Type {
    if depth == 0 {
        return t.clone();
    }
    let top = sig.top_type().ok();
    match t {
        Type::Inter(a, b) => match rng.gen_range(0..6) {
            0 => sup(rng, sig, a, depth - 1),
            1 => sup(rng, sig, b, depth - 1),
            2 => Type::inter(sup(rng, sig, a, depth - 1), sup(rng, sig, b, depth - 1)),
            3 => merge(a, b).unwrap_or_else(|| t.clone()),
            4 => top.unwrap_or_else(|| t.clone()),
            _ => t.clone(),
        },
        Type::Constr { head, contra, co } => match rng.gen_range(0..5) {
            0 => top.unwrap_or_else(|| t.clone()),
            1 | 2 => {
                let heads: Vec<&str> = sig
                    .decls()
                    .map(|d| d.name.as_str())
                    .filter(|h| sig.below(head, h))
                    .collect();
                let head = heads.choose(rng).copied().unwrap_or(head);
                let contra = contra
                    .iter()
                    .map(|c| {
                        if rng.gen_bool(0.5) {
                            sub(rng, sig, c, depth - 1)
                        } else {
                            c.clone()
                        }
                    })
                    .collect();
                let co = co
                    .iter()
                    .map(|c| {
                        if rng.gen_bool(0.5) {
                            sup(rng, sig, c, depth - 1)
                        } else {
                            c.clone()
                        }
                    })
                    .collect();
                Type::constr(head, contra, co)
            }
            _ => t.clone(),
        },
    }
}

/// A subtype of `t`.
pub(crate) fn sub<R: Rng>(rng: &mut R, sig: &Signature, t: &Type, depth: usize) -> Type {
    if depth == 0 {
        return t.clone();
    }
    match rng.gen_range(0..4) {
        0 => match ty(rng, sig, 2) {
            Some(extra) => Type::inter(t.clone(), extra),
            None => t.clone(),
        },
        1 | 2 => match t {
            Type::Inter(a, b) => Type::inter(sub(rng, sig, a, depth - 1), sub(rng, sig, b, depth - 1)),
            Type::Constr { head, contra, co } => {
                let contra = contra.iter().map(|c| sup(rng, sig, c, depth - 1)).collect();
                let co = co.iter().map(|c| sub(rng, sig, c, depth - 1)).collect();
                Type::constr(head, contra, co)
            }
        },
        _ => t.clone(),
    }
}

/// `κ(A; B) ∩ κ(A; B')` to `κ(A; B ∩ B')`.
fn merge(a: &Type, b: &Type) -> Option<Type> {
    match (a, b) {
        (
            Type::Constr { head, contra, co },
            Type::Constr {
                head: h2,
                contra: c2,
                co: co2,
            },
        ) if head == h2 && contra == c2 && !co.is_empty() && co.len() == co2.len() => {
            let co = co
                .iter()
                .zip(co2)
                .map(|(x, y)| Type::inter(x.clone(), y.clone()))
                .collect();
            Some(Type::constr(head, contra.clone(), co))
        }
        _ => None,
    }
}

/// A sequent `Γ ⊢ C` derivable by construction.
pub(crate) fn derivable<R: Rng>(rng: &mut R, sig: &Signature, max_size: usize, max_len: usize) -> Option<Sequent> {
    let min = usize::from(sig.top().is_none());
    let len = rng.gen_range(min..=max_len.max(min));
    let ctx = context(rng, sig, max_size, len)?;
    let goal = sup(rng, sig, &big_inter(&ctx, sig).ok()?, 3);
    Some(Sequent::new(ctx, goal))
}

/// A derivation of `Γ ⊢ A` and one of `Δ, A, Σ ⊢ C`, with the position of `A`.
pub(crate) fn cut_pair<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    max_size: usize,
    max_len: usize,
) -> Option<(IscDerivation, IscDerivation, usize)> {
    let left = derivable(rng, sig, max_size, max_len)?;
    let before = rng.gen_range(0..=max_len);
    let after = rng.gen_range(0..=max_len - before.min(max_len));
    let mut ctx = context(rng, sig, max_size, before)?;
    ctx.push(left.goal.clone());
    ctx.extend(context(rng, sig, max_size, after)?);
    let goal = sup(rng, sig, &big_inter(&ctx, sig).ok()?, 3);
    let l = prove(&left, sig).ok()??;
    let r = prove(&Sequent::new(ctx, goal), sig).ok()??;
    Some((l, r, before))
}

/// A derivation whose context holds the same type at `pos` and `pos + 1`.
pub(crate) fn contraction_case<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    max_size: usize,
    max_len: usize,
) -> Option<(IscDerivation, usize)> {
    let len = rng.gen_range(1..=max_len.max(1));
    let mut ctx = context(rng, sig, max_size, len)?;
    let pos = rng.gen_range(0..len);
    ctx.insert(pos + 1, ctx[pos].clone());
    let goal = sup(rng, sig, &big_inter(&ctx, sig).ok()?, 3);
    Some((prove(&Sequent::new(ctx, goal), sig).ok()??, pos))
}

/// A derivable sequent `κ(A1;B1), ..., κ(Ak;Bk) ⊢ κ(A;B)` for the arrow or
/// the product constructor, with `k ≥ 1`.
pub(crate) fn homogeneous<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    arrow: bool,
    max_size: usize,
    max_len: usize,
) -> Option<Sequent> {
    let (head, want) = if arrow {
        (ARROW, Shape::Arrow)
    } else {
        (PROD, Shape::Prod)
    };
    if shape(sig, head) != want {
        return None;
    }
    let k = rng.gen_range(1..=max_len.clamp(1, 3));
    let mut firsts = Vec::with_capacity(k);
    let mut seconds = Vec::with_capacity(k);
    for _ in 0..k {
        firsts.push(ty(rng, sig, max_size)?);
        seconds.push(ty(rng, sig, max_size)?);
    }
    let mut chosen: Vec<usize> = (0..k).filter(|_| rng.gen_bool(0.6)).collect();
    if chosen.is_empty() && (!arrow || rng.gen_bool(0.5)) {
        chosen.push(rng.gen_range(0..k));
    }
    let pick = |v: &[Type]| chosen.iter().map(|&j| v[j].clone()).collect::<Vec<_>>();
    let ctx: Vec<Type> = if arrow {
        firsts
            .iter()
            .zip(&seconds)
            .map(|(a, b)| Type::arrow(a.clone(), b.clone()))
            .collect()
    } else {
        firsts
            .iter()
            .zip(&seconds)
            .map(|(a, b)| Type::prod(a.clone(), b.clone()))
            .collect()
    };
    let goal = if arrow {
        let dom = if chosen.is_empty() {
            ty(rng, sig, max_size)?
        } else {
            sub(rng, sig, &big_inter(&pick(&firsts), sig).ok()?, 2)
        };
        let cod = sup(rng, sig, &big_inter(&pick(&seconds), sig).ok()?, 2);
        Type::arrow(dom, cod)
    } else {
        let a = sup(rng, sig, &big_inter(&pick(&firsts), sig).ok()?, 2);
        let b = sup(rng, sig, &big_inter(&pick(&seconds), sig).ok()?, 2);
        Type::prod(a, b)
    };
    Some(Sequent::new(ctx, goal))
}

fn head_with(sig: &Signature, want: Shape) -> Option<String> {
    sig.decls().map(|d| d.name.clone()).find(|n| shape(sig, n) == want)
}

/// A derivation whose last rule is `rule`, with random types; `None` when
/// the signature has no constructor the rule applies to.
pub(crate) fn rule_instance<R: Rng>(
    rng: R,
    sig: &Signature,
    rule: AxRule,
    type_size: usize,
    depth: usize,
) -> Option<AxDerivation> {
    sig.decls().find(|d| d.convar == 0 && d.covar == 0)?;
    let top = sig.top_type().ok();
    let mut g = AxGen { sig, rng, type_size };
    let arrow = head_with(sig, Shape::Arrow);
    let prod = head_with(sig, Shape::Prod);
    let unary = head_with(sig, Shape::Unary);
    Some(match rule {
        AxRule::Refl => AxDerivation::refl(g.ty()),
        AxRule::Trans => {
            let lhs = g.ty();
            let d1 = g.with_lhs(lhs, depth);
            let d2 = g.with_lhs(d1.rhs().clone(), depth);
            AxDerivation::trans_raw(d1, d2)
        }
        AxRule::OmegaR => AxDerivation::omega_r(g.ty(), top?),
        AxRule::InterL1 => AxDerivation::inter_l1(g.ty(), g.ty()),
        AxRule::InterL2 => AxDerivation::inter_l2(g.ty(), g.ty()),
        AxRule::InterIdem => AxDerivation::inter_idem(g.ty()),
        AxRule::InterMono => {
            let (a, b) = (g.ty(), g.ty());
            let d1 = g.with_lhs(a, depth);
            let d2 = g.with_lhs(b, depth);
            AxDerivation::inter_mono(d1, d2)
        }
        AxRule::ArrowMono => {
            let (c, b) = (g.ty(), g.ty());
            let d1 = g.with_lhs(c, depth);
            let d2 = g.with_lhs(b, depth);
            AxDerivation::arrow_mono(&arrow?, d1, d2)
        }
        AxRule::ArrowDistrib => AxDerivation::arrow_distrib(&arrow?, g.ty(), g.ty(), g.ty()),
        AxRule::OmegaArrow => AxDerivation::omega_arrow(&arrow?, top?),
        AxRule::ProdMono => {
            let (a, b) = (g.ty(), g.ty());
            let d1 = g.with_lhs(a, depth);
            let d2 = g.with_lhs(b, depth);
            AxDerivation::prod_mono(&prod?, d1, d2)
        }
        AxRule::ProdDistrib => AxDerivation::prod_distrib(&prod?, g.ty(), g.ty(), g.ty(), g.ty()),
        AxRule::UnaryMono => {
            let a = g.ty();
            let d = g.with_lhs(a, depth);
            AxDerivation::unary_mono(&unary?, d)
        }
        AxRule::UnaryDistrib => AxDerivation::unary_distrib(&unary?, g.ty(), g.ty()),
    })
}

pub(crate) fn ax_derivation<R: Rng>(rng: R, sig: &Signature, type_size: usize, depth: usize) -> Option<AxDerivation> {
    sig.decls().find(|d| d.convar == 0 && d.covar == 0)?;
    let mut g = AxGen { sig, rng, type_size };
    let lhs = g.ty();
    Some(g.with_lhs(lhs, depth))
}
