//! Decision procedure.
//!
//! The context is first split into constructor-rooted atoms. An intersection
//! goal is split into both conjuncts. For a goal `κ(A; B)` the qualified set
//! is every atom `κ'(A'; B')` with `κ' ≼ κ` whose contravariant subgoals
//! `Ai ⊢ A'i` all hold; the goal holds iff the set has at least `ω(κ)`
//! members and every covariant subgoal holds with the whole set on the left.
//! Taking the whole qualified set loses nothing: a covariant premise that
//! holds for a subset still holds for a superset by weakening.

use std::collections::HashMap;

use super::{IscDerivation, Sequent};
use crate::types::{Signature, Type, TypeError};

/// Deliberate defects, used to show that the test suites detect them.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Ignore the `ω(κ) ≤ k` side condition.
    SkipWidthCheck,
    /// Keep only the first qualified atom instead of all of them.
    FirstQualifiedSingleton,
}

/// Sorted, duplicate-free list of the atoms of `ts`.
pub(crate) fn canonical_atoms<'a>(ts: impl IntoIterator<Item = &'a Type>) -> Vec<Type> {
    let mut atoms: Vec<Type> = ts.into_iter().flat_map(|t| t.atomize()).map(Type::from).collect();
    atoms.sort();
    atoms.dedup();
    atoms
}

struct Prover<'a> {
    sig: &'a Signature,
    mutation: Mutation,
    memo: HashMap<(Vec<Type>, Type), bool>,
}

impl Prover<'_> {
    fn decide(&mut self, atoms: Vec<Type>, goal: &Type) -> bool {
        let key = (atoms, goal.clone());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = match goal {
            Type::Inter(a, b) => self.decide(key.0.clone(), a) && self.decide(key.0.clone(), b),
            Type::Constr { head, co, .. } => {
                let selected = self.qualified(&key.0, goal);
                let width = self.sig.lookup(head).map_or(1, |d| d.width.as_usize());
                if self.mutation != Mutation::SkipWidthCheck && selected.len() < width {
                    false
                } else {
                    (0..co.len()).all(|i| {
                        let left = canonical_atoms(selected.iter().map(|&j| co_arg(&key.0[j], i)));
                        self.decide(left, &co[i])
                    })
                }
            }
        };
        self.memo.insert(key, v);
        v
    }

    /// Indices of the atoms that may take part in a `constr` step for `goal`.
    fn qualified(&mut self, atoms: &[Type], goal: &Type) -> Vec<usize> {
        let Type::Constr { head, contra, .. } = goal else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for (j, t) in atoms.iter().enumerate() {
            let Type::Constr {
                head: h, contra: tc, ..
            } = t
            else {
                continue;
            };
            if !self.sig.below(h, head) || tc.len() != contra.len() {
                continue;
            }
            let ok = contra
                .iter()
                .zip(tc)
                .all(|(a, aj)| self.decide(canonical_atoms([a]), aj));
            if ok {
                out.push(j);
                if self.mutation == Mutation::FirstQualifiedSingleton {
                    break;
                }
            }
        }
        out
    }

    /// Derivation for a sequent already known to be derivable.
    fn build(&mut self, ctx: &[Type], goal: &Type) -> IscDerivation {
        if let Some(i) = ctx.iter().position(Type::is_inter) {
            let (a, b) = ctx[i].as_inter().unwrap();
            let mut split = ctx[..i].to_vec();
            split.push(a.clone());
            split.push(b.clone());
            split.extend_from_slice(&ctx[i + 1..]);
            return IscDerivation::inter_l(i, self.build(&split, goal));
        }
        match goal {
            Type::Inter(a, b) => IscDerivation::inter_r(self.build(ctx, a), self.build(ctx, b)),
            Type::Constr { contra, co, .. } => {
                let selected = self.qualified(ctx, goal);
                let kept: Vec<Type> = selected.iter().map(|&j| ctx[j].clone()).collect();
                let contra_premises = contra
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        kept.iter()
                            .map(|t| self.build(std::slice::from_ref(a), contra_arg(t, i)))
                            .collect()
                    })
                    .collect();
                let co_premises = co
                    .iter()
                    .enumerate()
                    .map(|(i, b)| {
                        let left: Vec<Type> = kept.iter().map(|t| co_arg(t, i).clone()).collect();
                        self.build(&left, b)
                    })
                    .collect();
                let mut d = IscDerivation::constr(kept, goal.clone(), contra_premises, co_premises);
                for (j, t) in ctx.iter().enumerate() {
                    if !selected.contains(&j) {
                        d = IscDerivation::wk(j, t.clone(), d);
                    }
                }
                d
            }
        }
    }
}

fn contra_arg(t: &Type, i: usize) -> &Type {
    match t {
        Type::Constr { contra, .. } => &contra[i],
        Type::Inter(..) => unreachable!("atoms only"),
    }
}

fn co_arg(t: &Type, i: usize) -> &Type {
    match t {
        Type::Constr { co, .. } => &co[i],
        Type::Inter(..) => unreachable!("atoms only"),
    }
}

/// Returns a derivation of `s`, or `None` when no derivation exists.
pub fn prove(s: &Sequent, sig: &Signature) -> Result<Option<IscDerivation>, TypeError> {
    s.validate(sig)?;
    let mut p = Prover {
        sig,
        mutation: Mutation::None,
        memo: HashMap::new(),
    };
    if !p.decide(canonical_atoms(&s.context), &s.goal) {
        return Ok(None);
    }
    Ok(Some(p.build(&s.context, &s.goal)))
}

/// Verdict of the prover, optionally with a seeded defect.
#[doc(hidden)]
pub fn decide_with(s: &Sequent, sig: &Signature, mutation: Mutation) -> Result<bool, TypeError> {
    s.validate(sig)?;
    let mut p = Prover {
        sig,
        mutation,
        memo: HashMap::new(),
    };
    Ok(p.decide(canonical_atoms(&s.context), &s.goal))
}
