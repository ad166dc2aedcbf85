//! Admissible rules compiled into primitive derivations.
//!
//! All functions expect checked input derivations; on well-formed input the
//! output checks as well. Contraction and cut recurse on a lexicographic
//! measure which is asserted to strictly decrease in debug builds.

use super::{IscDerivation, IscError, Rule, Sequent};
use crate::types::{Signature, Type};

/// `A ⊢ A`.
pub fn derive_ax(a: &Type) -> IscDerivation {
    match a {
        Type::Constr { contra, co, .. } => {
            let contra = contra.iter().map(|t| vec![derive_ax(t)]).collect();
            let co = co.iter().map(derive_ax).collect();
            IscDerivation::constr(vec![a.clone()], a.clone(), contra, co)
        }
        Type::Inter(l, r) => {
            let left = derive_weaken_gen_unchecked(&derive_ax(l), 1, r);
            let right = derive_weaken_gen_unchecked(&derive_ax(r), 0, l);
            IscDerivation::inter_l(0, IscDerivation::inter_r(left, right))
        }
    }
}

/// `Γ, A, Δ ⊢ C` from `Γ, Δ ⊢ C`, with `A` inserted at `pos`.
pub fn derive_weaken_gen(d: &IscDerivation, pos: usize, a: &Type) -> Result<IscDerivation, IscError> {
    if pos > d.context().len() {
        return Err(IscError::PositionOutOfRange(pos));
    }
    Ok(derive_weaken_gen_unchecked(d, pos, a))
}

pub(crate) fn derive_weaken_gen_unchecked(d: &IscDerivation, pos: usize, a: &Type) -> IscDerivation {
    match a {
        Type::Constr { .. } => IscDerivation::wk(pos, a.clone(), d.clone()),
        Type::Inter(l, r) => {
            let inner = derive_weaken_gen_unchecked(d, pos, r);
            IscDerivation::inter_l(pos, derive_weaken_gen_unchecked(&inner, pos, l))
        }
    }
}

/// Inserts every type of `ts` starting at `pos`, keeping their order.
pub(crate) fn weaken_many(d: &IscDerivation, pos: usize, ts: &[Type]) -> IscDerivation {
    ts.iter()
        .enumerate()
        .fold(d.clone(), |acc, (j, t)| derive_weaken_gen_unchecked(&acc, pos + j, t))
}

/// Derivation of the permuted sequent whose context is
/// `[Γ[perm[0]], ..., Γ[perm[n-1]]]`. The height is unchanged.
pub fn derive_exchange(d: &IscDerivation, perm: &[usize]) -> Result<IscDerivation, IscError> {
    let n = d.context().len();
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(IscError::BadPermutation);
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(IscError::BadPermutation);
        }
        seen[p] = true;
    }
    Ok(exchange(d, perm))
}

fn exchange(d: &IscDerivation, perm: &[usize]) -> IscDerivation {
    let ctx = d.context();
    let new_ctx: Vec<Type> = perm.iter().map(|&i| ctx[i].clone()).collect();
    let position_of = |old: usize| perm.iter().position(|&q| q == old).expect("permutation");
    let conclusion = Sequent::new(new_ctx, d.goal().clone());
    let rule = match d.rule() {
        Rule::Wk { pos, premise } => {
            let sub: Vec<usize> = perm
                .iter()
                .filter(|&&q| q != *pos)
                .map(|&q| if q > *pos { q - 1 } else { q })
                .collect();
            Rule::Wk {
                pos: position_of(*pos),
                premise: Box::new(exchange(premise, &sub)),
            }
        }
        Rule::InterR { left, right } => Rule::InterR {
            left: Box::new(exchange(left, perm)),
            right: Box::new(exchange(right, perm)),
        },
        Rule::InterL { pos, premise } => {
            let sub: Vec<usize> = perm
                .iter()
                .flat_map(|&q| match q.cmp(pos) {
                    std::cmp::Ordering::Less => vec![q],
                    std::cmp::Ordering::Equal => vec![q, q + 1],
                    std::cmp::Ordering::Greater => vec![q + 1],
                })
                .collect();
            Rule::InterL {
                pos: position_of(*pos),
                premise: Box::new(exchange(premise, &sub)),
            }
        }
        Rule::Constr { contra, co } => Rule::Constr {
            contra: contra
                .iter()
                .map(|row| perm.iter().map(|&j| row[j].clone()).collect())
                .collect(),
            co: co.iter().map(|p| exchange(p, perm)).collect(),
        },
    };
    IscDerivation::from_parts(conclusion, rule)
}

/// `Γ, A, B, Δ ⊢ C` from `Γ, A ∩ B, Δ ⊢ C` where the intersection is at `pos`.
pub fn derive_interl_e(d: &IscDerivation, pos: usize) -> Result<IscDerivation, IscError> {
    match d.context().get(pos) {
        Some(Type::Inter(..)) => Ok(interl_e(d, pos)),
        Some(_) => Err(IscError::PositionNotIntersection(pos)),
        None => Err(IscError::PositionOutOfRange(pos)),
    }
}

fn interl_e(d: &IscDerivation, pos: usize) -> IscDerivation {
    match d.rule() {
        Rule::Wk { pos: p, premise } => {
            let p = *p;
            let dropped = d.context()[p].clone();
            let inner = interl_e(premise, if p < pos { pos - 1 } else { pos });
            IscDerivation::wk(if p < pos { p } else { p + 1 }, dropped, inner)
        }
        Rule::InterR { left, right } => IscDerivation::inter_r(interl_e(left, pos), interl_e(right, pos)),
        Rule::InterL { pos: p, premise } => {
            let p = *p;
            if p == pos {
                return (**premise).clone();
            }
            let inner = interl_e(premise, if p < pos { pos + 1 } else { pos });
            IscDerivation::inter_l(if p < pos { p } else { p + 1 }, inner)
        }
        Rule::Constr { .. } => unreachable!("constr contexts hold no intersections"),
    }
}

/// `Γ, A, Δ ⊢ C` from `Γ, A, A, Δ ⊢ C` where the copies are at `pos`, `pos + 1`.
pub fn derive_contract(d: &IscDerivation, pos: usize) -> Result<IscDerivation, IscError> {
    let ctx = d.context();
    if pos + 1 >= ctx.len() {
        return Err(IscError::PositionOutOfRange(pos));
    }
    if ctx[pos] != ctx[pos + 1] {
        return Err(IscError::NotDuplicated(pos));
    }
    Ok(contract(d, pos, None))
}

fn contract(d: &IscDerivation, pos: usize, parent: Option<(usize, usize)>) -> IscDerivation {
    let measure = (d.context()[pos].size(), d.height());
    debug_assert!(
        parent.is_none_or(|p| measure < p),
        "contraction measure did not decrease: {measure:?} vs {parent:?}"
    );
    let me = Some(measure);
    match d.rule() {
        Rule::Wk { pos: p, premise } => {
            let p = *p;
            if p == pos || p == pos + 1 {
                return (**premise).clone();
            }
            let dropped = d.context()[p].clone();
            let inner = contract(premise, if p < pos { pos - 1 } else { pos }, me);
            IscDerivation::wk(if p < pos { p } else { p - 1 }, dropped, inner)
        }
        Rule::InterR { left, right } => IscDerivation::inter_r(contract(left, pos, me), contract(right, pos, me)),
        Rule::InterL { pos: p, premise } => {
            let p = *p;
            if p != pos && p != pos + 1 {
                let inner = contract(premise, if p < pos { pos + 1 } else { pos }, me);
                return IscDerivation::inter_l(if p < pos { p } else { p - 1 }, inner);
            }
            // premise holds A1, A2 and the other copy of A1 ∩ A2
            let other = if p == pos { pos + 2 } else { pos };
            let split = interl_e(premise, other);
            // Γ, A1, A2, A1, A2, Δ  ->  Γ, A1, A1, A2, A2, Δ
            let n = split.context().len();
            let mut perm: Vec<usize> = (0..n).collect();
            perm[pos + 1] = pos + 2;
            perm[pos + 2] = pos + 1;
            let swapped = exchange(&split, &perm);
            let first = contract(&swapped, pos, me);
            let second = contract(&first, pos + 1, me);
            IscDerivation::inter_l(pos, second)
        }
        Rule::Constr { contra, co } => {
            let mut ctx = d.context().to_vec();
            ctx.remove(pos + 1);
            let contra = contra
                .iter()
                .map(|row| {
                    let mut row = row.clone();
                    row.remove(pos + 1);
                    row
                })
                .collect();
            let co = co.iter().map(|p| contract(p, pos, me)).collect();
            IscDerivation::constr(ctx, d.goal().clone(), contra, co)
        }
    }
}

/// Cut: from `Γ ⊢ A` and `Δ, A, Σ ⊢ C` (with `A` at `pos`) builds a
/// cut-free derivation of `Δ, Γ, Σ ⊢ C`.
pub fn derive_cut(left: &IscDerivation, right: &IscDerivation, pos: usize) -> Result<IscDerivation, IscError> {
    match right.context().get(pos) {
        Some(a) if a == left.goal() => Ok(cut(left, right, pos, None)),
        _ => Err(IscError::CutFormulaMismatch(pos)),
    }
}

type CutMeasure = (usize, usize, usize);

fn cut(left: &IscDerivation, right: &IscDerivation, pos: usize, parent: Option<CutMeasure>) -> IscDerivation {
    let measure = (left.goal().size(), left.height(), right.height());
    debug_assert!(
        parent.is_none_or(|p| measure < p),
        "cut measure did not decrease: {measure:?} vs {parent:?}"
    );
    let me = Some(measure);
    let g = left.context().len();
    // position in the result of a right-context index other than `pos`
    let shift = |q: usize| if q < pos { q } else { q + g - 1 };

    // the cut formula is not principal on the right
    match right.rule() {
        Rule::Wk { pos: p, premise } if *p != pos => {
            let p = *p;
            let inner = cut(left, premise, if p < pos { pos - 1 } else { pos }, me);
            return IscDerivation::wk(shift(p), right.context()[p].clone(), inner);
        }
        Rule::Wk { premise, .. } => {
            return weaken_many(premise, pos, left.context());
        }
        Rule::InterR { left: r1, right: r2 } => {
            return IscDerivation::inter_r(cut(left, r1, pos, me), cut(left, r2, pos, me));
        }
        Rule::InterL { pos: p, premise } if *p != pos => {
            let p = *p;
            let inner = cut(left, premise, if p < pos { pos + 1 } else { pos }, me);
            return IscDerivation::inter_l(shift(p), inner);
        }
        Rule::InterL { .. } | Rule::Constr { .. } => {}
    }

    // principal on the right: permute left rules of the left premise down
    match left.rule() {
        Rule::Wk { pos: q, premise } => {
            let inner = cut(premise, right, pos, me);
            return IscDerivation::wk(pos + q, left.context()[*q].clone(), inner);
        }
        Rule::InterL { pos: q, premise } => {
            let inner = cut(premise, right, pos, me);
            return IscDerivation::inter_l(pos + q, inner);
        }
        _ => {}
    }

    match (left.rule(), right.rule()) {
        (Rule::InterR { left: l1, right: l2 }, Rule::InterL { premise, .. }) => {
            // Δ, A1, A2, Σ  ->  Δ, A1, Γ, Σ  ->  Δ, Γ, Γ, Σ  ->  Δ, Γ, Σ
            let once = cut(l2, premise, pos + 1, me);
            let twice = cut(l1, &once, pos, me);
            contract_block(&twice, pos, g)
        }
        (
            Rule::Constr {
                contra: lcontra,
                co: lco,
            },
            Rule::Constr {
                contra: rcontra,
                co: rco,
            },
        ) => {
            let rctx = right.context();
            let mut ctx = rctx[..pos].to_vec();
            ctx.extend_from_slice(left.context());
            ctx.extend_from_slice(&rctx[pos + 1..]);
            let contra = rcontra
                .iter()
                .zip(lcontra)
                .map(|(rrow, lrow)| {
                    let mut row = rrow[..pos].to_vec();
                    // C_p ⊢ A_p  against  A_p ⊢ A_p^i
                    row.extend(lrow.iter().map(|l| cut(&rrow[pos], l, 0, me)));
                    row.extend_from_slice(&rrow[pos + 1..]);
                    row
                })
                .collect();
            let co = rco.iter().zip(lco).map(|(r, l)| cut(l, r, pos, me)).collect();
            IscDerivation::constr(ctx, right.goal().clone(), contra, co)
        }
        _ => unreachable!("cut formula is both an intersection and constructor-rooted"),
    }
}

/// `Δ, Γ, Γ, Σ ⊢ C` to `Δ, Γ, Σ ⊢ C` where the first copy of Γ starts at
/// `pos` and has length `g`.
fn contract_block(d: &IscDerivation, pos: usize, g: usize) -> IscDerivation {
    if g == 0 {
        return d.clone();
    }
    let n = d.context().len();
    let mut perm: Vec<usize> = (0..pos).collect();
    for j in 0..g {
        perm.push(pos + j);
        perm.push(pos + g + j);
    }
    perm.extend(pos + 2 * g..n);
    let interleaved = exchange(d, &perm);
    (0..g).fold(interleaved, |acc, j| contract(&acc, pos + j, None))
}

/// `⋂ Γ ⊢ C` from `Γ ⊢ C`: folds the context into its right-nested
/// intersection, or weakens in the top type when the context is empty.
pub fn fold_context(d: &IscDerivation, sig: &Signature) -> Result<IscDerivation, IscError> {
    let n = d.context().len();
    if n == 0 {
        let top = sig.top_type()?;
        return Ok(IscDerivation::wk(0, top, d.clone()));
    }
    Ok((0..n - 1)
        .rev()
        .fold(d.clone(), |acc, i| IscDerivation::inter_l(i, acc)))
}
