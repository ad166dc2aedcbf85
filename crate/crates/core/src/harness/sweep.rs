use serde::Serialize;

use crate::isc::{decide_with, prove_exhaustive, Mutation, Sequent};
use crate::types::{Signature, Type};

/// Every type of `sig` with at most `max_size` nodes, smallest first.
pub fn enumerate_types(sig: &Signature, max_size: usize) -> Vec<Type> {
    let mut by_size: Vec<Vec<Type>> = vec![Vec::new()];
    for n in 1..=max_size {
        let mut here = Vec::new();
        for d in sig.decls() {
            let m = d.convar + d.covar;
            if m == 0 {
                if n == 1 {
                    here.push(Type::atom(&d.name));
                }
                continue;
            }
            for args in tuples(&by_size, m, n - 1) {
                let (contra, co) = args.split_at(d.convar);
                here.push(Type::constr(&d.name, contra.to_vec(), co.to_vec()));
            }
        }
        for args in tuples(&by_size, 2, n - 1) {
            here.push(Type::inter(args[0].clone(), args[1].clone()));
        }
        by_size.push(here);
    }
    by_size.into_iter().flatten().collect()
}

/// All `m`-tuples of types whose sizes sum to `total`.
fn tuples(by_size: &[Vec<Type>], m: usize, total: usize) -> Vec<Vec<Type>> {
    if m == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(m - 1) {
        for t in by_size.get(first).into_iter().flatten() {
            for mut rest in tuples(by_size, m - 1, total - first) {
                rest.insert(0, t.clone());
                out.push(rest);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SweepReport {
    pub checked: usize,
    pub inconclusive: usize,
    pub disagreements: usize,
    /// The first few sequents on which the prover and the search disagree.
    pub examples: Vec<String>,
}

/// Compares the prover with the exhaustive search on every sequent whose
/// context has at most `max_ctx` entries and whose types have at most
/// `max_size` nodes.
pub fn sweep(sig: &Signature, max_ctx: usize, max_size: usize, mutation: Mutation, budget: usize) -> SweepReport {
    let types = enumerate_types(sig, max_size);
    let mut contexts: Vec<Vec<Type>> = vec![vec![]];
    let mut layer = contexts.clone();
    for _ in 0..max_ctx {
        layer = layer
            .iter()
            .flat_map(|c| {
                types.iter().map(move |t| {
                    let mut c = c.clone();
                    c.push(t.clone());
                    c
                })
            })
            .collect();
        contexts.extend(layer.iter().cloned());
    }
    let mut rep = SweepReport::default();
    for ctx in &contexts {
        for goal in &types {
            let s = Sequent::new(ctx.clone(), goal.clone());
            rep.checked += 1;
            let slow = match prove_exhaustive(&s, sig, budget).ok().and_then(|r| r.verdict()) {
                Some(v) => v,
                None => {
                    rep.inconclusive += 1;
                    continue;
                }
            };
            if decide_with(&s, sig, mutation).ok() != Some(slow) {
                rep.disagreements += 1;
                if rep.examples.len() < 5 {
                    rep.examples.push(s.to_string());
                }
            }
        }
    }
    rep
}

/// Greedily shrinks `s` while `fails` keeps holding: first by replacing a
/// type with one of its immediate subterms, then by dropping hypotheses.
pub fn shrink_sequent(s: &Sequent, sig: &Signature, fails: impl Fn(&Sequent) -> bool) -> Sequent {
    let mut cur = s.clone();
    'outer: loop {
        for cand in candidates(&cur, sig) {
            if fails(&cand) {
                cur = cand;
                continue 'outer;
            }
        }
        return cur;
    }
}

fn candidates(s: &Sequent, sig: &Signature) -> Vec<Sequent> {
    let mut out = Vec::new();
    let slots = s.context.len() + 1;
    for i in 0..slots {
        let t = if i < s.context.len() { &s.context[i] } else { &s.goal };
        let mut smaller: Vec<Type> = t.children().into_iter().cloned().collect();
        if let Ok(top) = sig.top_type() {
            if t != &top {
                smaller.push(top);
            }
        }
        for c in smaller {
            let mut n = s.clone();
            if i < s.context.len() {
                n.context[i] = c;
            } else {
                n.goal = c;
            }
            out.push(n);
        }
    }
    for i in 0..s.context.len() {
        let mut n = s.clone();
        n.context.remove(i);
        out.push(n);
    }
    out
}
