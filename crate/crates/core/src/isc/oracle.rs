//! Exhaustive backward search over the four rules, used as an independent
//! check on [`super::prove`].
//!
//! Every applicable rule instance is tried: `interL` at every intersection,
//! `interR` on an intersection goal, `wk` on every atom and `constr` on the
//! whole context. Trying `wk` on each atom before `constr` reaches every
//! sub-multiset of the context, so no subset strategy is assumed. Sequents
//! are memoised after sorting and deduplicating the context.

use std::collections::HashMap;

use super::{IscDerivation, Sequent};
use crate::types::{Signature, Type, TypeError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Search {
    Proved(IscDerivation),
    NotDerivable,
    BudgetExceeded,
}

impl Search {
    /// `Some(verdict)` unless the budget ran out.
    pub fn verdict(&self) -> Option<bool> {
        match self {
            Search::Proved(_) => Some(true),
            Search::NotDerivable => Some(false),
            Search::BudgetExceeded => None,
        }
    }
}

struct OutOfBudget;

struct Oracle<'a> {
    sig: &'a Signature,
    budget: usize,
    spent: usize,
    memo: HashMap<Sequent, bool>,
}

fn canonical(ctx: &[Type], goal: &Type) -> Sequent {
    let mut context = ctx.to_vec();
    context.sort();
    context.dedup();
    Sequent::new(context, goal.clone())
}

fn without(ctx: &[Type], j: usize) -> Vec<Type> {
    let mut out = ctx.to_vec();
    out.remove(j);
    out
}

fn split_at(ctx: &[Type], i: usize) -> Vec<Type> {
    let (a, b) = ctx[i].as_inter().expect("intersection");
    let mut out = ctx[..i].to_vec();
    out.push(a.clone());
    out.push(b.clone());
    out.extend_from_slice(&ctx[i + 1..]);
    out
}

impl Oracle<'_> {
    fn derivable(&mut self, ctx: &[Type], goal: &Type) -> Result<bool, OutOfBudget> {
        let key = canonical(ctx, goal);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        if self.spent >= self.budget {
            return Err(OutOfBudget);
        }
        self.spent += 1;
        let v = self.expand(&key.context, goal)?;
        self.memo.insert(key, v);
        Ok(v)
    }

    fn expand(&mut self, ctx: &[Type], goal: &Type) -> Result<bool, OutOfBudget> {
        for i in 0..ctx.len() {
            if ctx[i].is_inter() && self.derivable(&split_at(ctx, i), goal)? {
                return Ok(true);
            }
        }
        if let Type::Inter(a, b) = goal {
            if self.derivable(ctx, a)? && self.derivable(ctx, b)? {
                return Ok(true);
            }
        }
        for j in 0..ctx.len() {
            if !ctx[j].is_inter() && self.derivable(&without(ctx, j), goal)? {
                return Ok(true);
            }
        }
        self.constr_applies(ctx, goal)
    }

    /// Whether `constr` with exactly `ctx` as its context has derivable premises.
    fn constr_applies(&mut self, ctx: &[Type], goal: &Type) -> Result<bool, OutOfBudget> {
        let Type::Constr { head, contra, co } = goal else {
            return Ok(false);
        };
        let width = self.sig.lookup(head).map_or(1, |d| d.width.as_usize());
        if ctx.len() < width {
            return Ok(false);
        }
        for t in ctx {
            match t {
                Type::Constr {
                    head: h,
                    contra: tc,
                    co: tco,
                } if self.sig.below(h, head) => {
                    if tc.len() != contra.len() || tco.len() != co.len() {
                        return Ok(false);
                    }
                }
                _ => return Ok(false),
            }
        }
        for (i, a) in contra.iter().enumerate() {
            for t in ctx {
                let Type::Constr { contra: tc, .. } = t else {
                    unreachable!()
                };
                if !self.derivable(std::slice::from_ref(a), &tc[i])? {
                    return Ok(false);
                }
            }
        }
        for (i, b) in co.iter().enumerate() {
            if !self.derivable(&co_column(ctx, i), b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn build(&mut self, ctx: &[Type], goal: &Type) -> Result<IscDerivation, OutOfBudget> {
        for i in 0..ctx.len() {
            if ctx[i].is_inter() {
                let split = split_at(ctx, i);
                if self.derivable(&split, goal)? {
                    return Ok(IscDerivation::inter_l(i, self.build(&split, goal)?));
                }
            }
        }
        if let Type::Inter(a, b) = goal {
            if self.derivable(ctx, a)? && self.derivable(ctx, b)? {
                return Ok(IscDerivation::inter_r(self.build(ctx, a)?, self.build(ctx, b)?));
            }
        }
        if self.constr_applies(ctx, goal)? {
            let Type::Constr { contra, co, .. } = goal else {
                unreachable!()
            };
            let mut contra_premises = Vec::with_capacity(contra.len());
            for (i, a) in contra.iter().enumerate() {
                let mut row = Vec::with_capacity(ctx.len());
                for t in ctx {
                    let Type::Constr { contra: tc, .. } = t else {
                        unreachable!()
                    };
                    row.push(self.build(std::slice::from_ref(a), &tc[i])?);
                }
                contra_premises.push(row);
            }
            let mut co_premises = Vec::with_capacity(co.len());
            for (i, b) in co.iter().enumerate() {
                co_premises.push(self.build(&co_column(ctx, i), b)?);
            }
            return Ok(IscDerivation::constr(
                ctx.to_vec(),
                goal.clone(),
                contra_premises,
                co_premises,
            ));
        }
        for j in 0..ctx.len() {
            let rest = without(ctx, j);
            if self.derivable(&rest, goal)? {
                return Ok(IscDerivation::wk(j, ctx[j].clone(), self.build(&rest, goal)?));
            }
        }
        unreachable!("build called on a sequent that is not derivable")
    }
}

fn co_column(ctx: &[Type], i: usize) -> Vec<Type> {
    ctx.iter()
        .map(|t| match t {
            Type::Constr { co, .. } => co[i].clone(),
            Type::Inter(..) => unreachable!(),
        })
        .collect()
}

/// Searches for a derivation of `s`, expanding at most `budget` distinct
/// canonical sequents.
pub fn prove_exhaustive(s: &Sequent, sig: &Signature, budget: usize) -> Result<Search, TypeError> {
    s.validate(sig)?;
    let mut o = Oracle {
        sig,
        budget,
        spent: 0,
        memo: HashMap::new(),
    };
    let run = |o: &mut Oracle| -> Result<Search, OutOfBudget> {
        if !o.derivable(&s.context, &s.goal)? {
            return Ok(Search::NotDerivable);
        }
        Ok(Search::Proved(o.build(&s.context, &s.goal)?))
    };
    Ok(run(&mut o).unwrap_or(Search::BudgetExceeded))
}
