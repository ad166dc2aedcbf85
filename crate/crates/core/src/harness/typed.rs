//! Random λ-terms and typing derivations for them.
//!
//! A term is generated first, then typed bottom-up. Applications and
//! projections are typed by collecting the arrow or product atoms of the
//! function (or pair) type that fit, and proving the corresponding
//! subsumption with the ISC prover; when nothing fits the node is given the
//! top type. Nodes are occasionally decorated with an extra `inter`, `leq`
//! or `omega` step so that every rule appears above every other.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::gen;
use crate::isc::{prove, Sequent};
use crate::lambda::preservation::coerce;
use crate::lambda::term::fresh_name;
use crate::lambda::typing::lookup;
use crate::lambda::{Context, Expansion, RedexInfo, Term, TypingDerivation};
use crate::types::{big_inter, Signature, Type, ARROW, PROD};

const NAMES: [&str; 4] = ["a", "b", "c", "d"];
const BINDERS: [&str; 4] = ["x", "y", "z", "a"];

pub(crate) struct TypedGen<'a, R: Rng> {
    pub sig: &'a Signature,
    pub rng: &'a mut R,
    pub type_size: usize,
    pub redex_bias: f64,
    top: Type,
}

impl<'a, R: Rng> TypedGen<'a, R> {
    /// `None` unless the signature has a top type, arrows, products and a
    /// 0-ary constructor.
    pub fn new(sig: &'a Signature, rng: &'a mut R, type_size: usize, redex_bias: f64) -> Option<Self> {
        let top = sig.top_type().ok()?;
        if !sig.has_shape(ARROW, 1, 1) || !sig.has_shape(PROD, 0, 2) {
            return None;
        }
        sig.decls().find(|d| d.convar == 0 && d.covar == 0)?;
        Some(TypedGen {
            sig,
            rng,
            type_size,
            redex_bias,
            top,
        })
    }

    fn ty(&mut self) -> Type {
        gen::ty(self.rng, self.sig, self.type_size).expect("checked in new")
    }

    pub fn context(&mut self, max_len: usize) -> Context {
        let len = self.rng.gen_range(0..=max_len.min(NAMES.len()));
        (0..len).map(|i| (NAMES[i].to_string(), self.ty())).collect()
    }

    /// A term whose free variables are among `scope`.
    pub fn term(&mut self, scope: &mut Vec<String>, depth: usize) -> Term {
        if depth == 0 {
            return match scope.choose(self.rng) {
                Some(x) => Term::var(x),
                None => Term::abs("x", Term::var("x")),
            };
        }
        if self.rng.gen_bool(self.redex_bias) {
            return match self.rng.gen_range(0..4) {
                0 | 1 => {
                    let f = self.abstraction(scope, depth - 1);
                    let u = self.term(scope, depth - 1);
                    Term::app(f, u)
                }
                2 => Term::fst(self.pair(scope, depth - 1)),
                _ => Term::snd(self.pair(scope, depth - 1)),
            };
        }
        match self.rng.gen_range(0..7) {
            0 | 1 if !scope.is_empty() => Term::var(scope.choose(self.rng).expect("nonempty")),
            0..=2 => self.abstraction(scope, depth - 1),
            3 => {
                let f = self.term(scope, depth - 1);
                let u = self.term(scope, depth - 1);
                Term::app(f, u)
            }
            4 => self.pair(scope, depth - 1),
            5 => Term::fst(self.term(scope, depth - 1)),
            _ => Term::snd(self.term(scope, depth - 1)),
        }
    }

    fn abstraction(&mut self, scope: &mut Vec<String>, depth: usize) -> Term {
        let x = *BINDERS.choose(self.rng).expect("nonempty");
        scope.push(x.to_string());
        let body = self.term(scope, depth);
        scope.pop();
        Term::abs(x, body)
    }

    fn pair(&mut self, scope: &mut Vec<String>, depth: usize) -> Term {
        let l = self.term(scope, depth);
        let r = self.term(scope, depth);
        Term::pair(l, r)
    }

    /// A derivation of `ctx ⊢ t : T` for some `T`; `t` must be well scoped.
    pub fn derive(&mut self, ctx: &Context, t: &Term, fuel: usize) -> TypingDerivation {
        let base = match t {
            Term::Var(x) => TypingDerivation::var_in(ctx, x).expect("well scoped"),
            Term::Abs(x, body) => {
                let a = self.ty();
                self.abs_with(ctx, x, body, a, fuel)
            }
            Term::App(f, u) => {
                let du = self.derive(ctx, u, fuel);
                let df = match &**f {
                    Term::Abs(x, body) if self.rng.gen_bool(0.85) => {
                        let a = if self.rng.gen_bool(0.5) {
                            gen::sup(self.rng, self.sig, du.ty(), 2)
                        } else {
                            du.ty().clone()
                        };
                        self.abs_with(ctx, x, body, a, fuel)
                    }
                    _ => self.derive(ctx, f, fuel),
                };
                self.app_join(ctx, t, df, du)
            }
            Term::Pair(l, r) => {
                let dl = self.derive(ctx, l, fuel);
                let dr = self.derive(ctx, r, fuel);
                TypingDerivation::pair(dl, dr)
            }
            Term::Fst(p) | Term::Snd(p) => {
                let dp = self.derive(ctx, p, fuel);
                self.proj_join(ctx, t, dp, matches!(t, Term::Fst(_)))
            }
        };
        self.decorate(ctx, t, base, fuel)
    }

    fn decorate(&mut self, ctx: &Context, t: &Term, base: TypingDerivation, fuel: usize) -> TypingDerivation {
        let roll = self.rng.gen_range(0..100);
        if roll < 10 && fuel > 0 {
            let other = self.derive(ctx, t, fuel - 1);
            TypingDerivation::inter(base, other)
        } else if roll < 25 {
            let target = gen::sup(self.rng, self.sig, base.ty(), 2);
            match prove(&Sequent::single(base.ty().clone(), target), self.sig) {
                Ok(Some(ev)) => coerce(base, ev),
                _ => base,
            }
        } else if roll < 28 {
            TypingDerivation::omega(ctx.clone(), t.clone(), self.top.clone())
        } else {
            base
        }
    }

    fn abs_with(&mut self, ctx: &Context, x: &str, body: &Term, a: Type, fuel: usize) -> TypingDerivation {
        let (y, body) = if lookup(ctx, x).is_some() {
            let mut avoid: BTreeSet<String> = ctx.iter().map(|(n, _)| n.clone()).collect();
            avoid.extend(body.all_names());
            let y = fresh_name(x, &avoid);
            let renamed = body.subst(x, &Term::var(&y));
            (y, renamed)
        } else {
            (x.to_string(), body.clone())
        };
        let mut inner = ctx.clone();
        inner.push((y, a));
        TypingDerivation::abs(self.derive(&inner, &body, fuel))
    }

    fn app_join(&mut self, ctx: &Context, t: &Term, df: TypingDerivation, du: TypingDerivation) -> TypingDerivation {
        let u = du.ty().clone();
        let mut cods = Vec::new();
        for atom in df.ty().atomize() {
            if let Some((c, d)) = atom.as_type().as_arrow() {
                if matches!(prove(&Sequent::single(u.clone(), c.clone()), self.sig), Ok(Some(_))) {
                    cods.push(d.clone());
                }
            }
        }
        let b = big_inter(&cods, self.sig).expect("top exists");
        match prove(&Sequent::single(df.ty().clone(), Type::arrow(u, b)), self.sig) {
            Ok(Some(ev)) => TypingDerivation::app(coerce(df, ev), du),
            _ => TypingDerivation::omega(ctx.clone(), t.clone(), self.top.clone()),
        }
    }

    fn proj_join(&mut self, ctx: &Context, t: &Term, dp: TypingDerivation, first: bool) -> TypingDerivation {
        let (mut ls, mut rs) = (Vec::new(), Vec::new());
        for atom in dp.ty().atomize() {
            if let Some((l, r)) = atom.as_type().as_prod() {
                ls.push(l.clone());
                rs.push(r.clone());
            }
        }
        if ls.is_empty() {
            return TypingDerivation::omega(ctx.clone(), t.clone(), self.top.clone());
        }
        let target = Type::prod(
            big_inter(&ls, self.sig).expect("nonempty"),
            big_inter(&rs, self.sig).expect("nonempty"),
        );
        match prove(&Sequent::single(dp.ty().clone(), target), self.sig) {
            Ok(Some(ev)) => {
                let dp = coerce(dp, ev);
                if first {
                    TypingDerivation::proj1(dp)
                } else {
                    TypingDerivation::proj2(dp)
                }
            }
            _ => TypingDerivation::omega(ctx.clone(), t.clone(), self.top.clone()),
        }
    }

    /// A fresh context, term and derivation.
    pub fn typed(&mut self, max_len: usize, depth: usize) -> TypingDerivation {
        let ctx = self.context(max_len);
        let mut scope: Vec<String> = ctx.iter().map(|(x, _)| x.clone()).collect();
        let t = self.term(&mut scope, depth);
        self.derive(&ctx, &t, 2)
    }

    /// A derivation together with a valid expansion of a random subterm.
    pub fn expansion_case(&mut self, max_len: usize, depth: usize) -> (TypingDerivation, RedexInfo) {
        let d = self.typed(max_len, depth);
        let mut paths = Vec::new();
        collect_paths(d.term(), &mut Vec::new(), &mut paths);
        let path = paths.choose(self.rng).expect("root path").clone();
        let mut scope: Vec<String> = d.context().iter().map(|(x, _)| x.clone()).collect();
        scope.extend(binders_along(d.term(), &path));
        let s = d.term().at(&path).expect("collected").clone();
        let expansion = match self.rng.gen_range(0..5) {
            0 => Expansion::Proj1 {
                erased: self.term(&mut scope.clone(), 2),
            },
            1 => Expansion::Proj2 {
                erased: self.term(&mut scope.clone(), 2),
            },
            roll => self.beta_expansion(&s, &scope, roll),
        };
        (d, RedexInfo { path, expansion })
    }

    fn beta_expansion(&mut self, s: &Term, scope: &[String], roll: usize) -> Expansion {
        let mut avoid: BTreeSet<String> = scope.iter().cloned().collect();
        avoid.extend(s.all_names());
        let var = fresh_name("x", &avoid);
        if roll == 2 {
            return Expansion::Beta {
                var: var.clone(),
                body: s.clone(),
                arg: self.term(&mut scope.to_vec(), 2),
            };
        }
        if roll == 3 {
            let mut inner = Vec::new();
            collect_paths(s, &mut Vec::new(), &mut inner);
            let q = inner.choose(self.rng).expect("root path").clone();
            let u = s.at(&q).expect("collected");
            let between: BTreeSet<String> = binders_along(s, &q).into_iter().collect();
            if u.free_vars().is_disjoint(&between) {
                return Expansion::Beta {
                    var: var.clone(),
                    body: s.replace_at(&q, Term::var(&var)).expect("collected"),
                    arg: u.clone(),
                };
            }
        }
        Expansion::Beta {
            var: var.clone(),
            body: Term::var(&var),
            arg: s.clone(),
        }
    }
}

pub(crate) fn collect_paths(t: &Term, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(prefix.clone());
    for (i, c) in t.children().into_iter().enumerate() {
        prefix.push(i);
        collect_paths(c, prefix, out);
        prefix.pop();
    }
}

/// Names bound by the abstractions strictly above `path`.
fn binders_along(t: &Term, path: &[usize]) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = t;
    for &i in path {
        if let Term::Abs(x, _) = cur {
            out.push(x.clone());
        }
        cur = cur.children()[i];
    }
    out
}
