//! Typing judgements, derivations and the node-local checker.

use std::collections::BTreeSet;
use std::fmt;

use super::term::{parse_term, print_term, Term};
use super::LambdaError;
use crate::isc::{check_isc, IscDerivation};
use crate::sexpr;
use crate::syntax::{finish_types, print_type, Cursor, Tok, Undeclared};
use crate::types::{Signature, Type, TypeError};

/// Ordered typing declarations with distinct names.
pub type Context = Vec<(String, Type)>;

#[derive(Clone, PartialEq, Eq)]
pub struct Judgement {
    pub context: Context,
    pub term: Term,
    pub ty: Type,
}

impl Judgement {
    pub fn new(context: Context, term: Term, ty: Type) -> Judgement {
        Judgement { context, term, ty }
    }

    pub fn lookup(&self, x: &str) -> Option<&Type> {
        lookup(&self.context, x)
    }

    pub fn parse(text: &str, sig: &Signature) -> Result<Judgement, TypeError> {
        let mut sig = sig.clone();
        Judgement::parse_with(text, &mut sig, Undeclared::Reject)
    }

    /// Parses `x1:T1, ..., xn:Tn |- term : T`.
    pub fn parse_with(text: &str, sig: &mut Signature, mode: Undeclared) -> Result<Judgement, TypeError> {
        let mut cur = Cursor::new(text)?;
        let mut context = Vec::new();
        if !cur.eat(&Tok::Turnstile) {
            loop {
                let x = cur.ident()?;
                cur.expect(&Tok::Colon)?;
                context.push((x, cur.parse_type()?));
                if cur.eat(&Tok::Turnstile) {
                    break;
                }
                cur.expect(&Tok::Comma)?;
            }
        }
        let term = parse_term(&mut cur)?;
        cur.expect(&Tok::Colon)?;
        let ty = cur.parse_type()?;
        cur.finish()?;
        let all: Vec<&Type> = context.iter().map(|(_, t)| t).chain([&ty]).collect();
        finish_types(&cur, &all, sig, mode)?;
        Ok(Judgement { context, term, ty })
    }
}

pub(crate) fn lookup<'a>(ctx: &'a [(String, Type)], x: &str) -> Option<&'a Type> {
    ctx.iter().find(|(y, _)| y == x).map(|(_, t)| t)
}

pub(crate) fn print_context(ctx: &[(String, Type)]) -> String {
    ctx.iter()
        .map(|(x, t)| format!("{x}:{}", print_type(t)))
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.context.is_empty() {
            write!(f, "{} ", print_context(&self.context))?;
        }
        write!(f, "|- {} : {}", print_term(&self.term), print_type(&self.ty))
    }
}

impl fmt::Debug for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypingRule {
    Var,
    /// `sub` concludes `A ⊢ B` where `A` is the premise type.
    Leq {
        premise: Box<TypingDerivation>,
        sub: IscDerivation,
    },
    Inter {
        left: Box<TypingDerivation>,
        right: Box<TypingDerivation>,
    },
    Omega,
    /// The binder is the last declaration of the premise context.
    Abs {
        premise: Box<TypingDerivation>,
    },
    App {
        fun: Box<TypingDerivation>,
        arg: Box<TypingDerivation>,
    },
    Pair {
        left: Box<TypingDerivation>,
        right: Box<TypingDerivation>,
    },
    Proj1 {
        premise: Box<TypingDerivation>,
    },
    Proj2 {
        premise: Box<TypingDerivation>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypingDerivation {
    judgement: Judgement,
    rule: TypingRule,
}

impl TypingDerivation {
    /// Assembles a node without computing or checking anything.
    pub fn from_parts(judgement: Judgement, rule: TypingRule) -> TypingDerivation {
        TypingDerivation { judgement, rule }
    }

    pub fn var(context: Context, x: &str, ty: Type) -> TypingDerivation {
        TypingDerivation::from_parts(Judgement::new(context, Term::var(x), ty), TypingRule::Var)
    }

    /// A variable leaf typed at its declared type; `None` if `x` is undeclared.
    pub fn var_in(context: &[(String, Type)], x: &str) -> Option<TypingDerivation> {
        let ty = lookup(context, x)?.clone();
        Some(TypingDerivation::var(context.to_vec(), x, ty))
    }

    pub fn leq(premise: TypingDerivation, sub: IscDerivation) -> TypingDerivation {
        let j = Judgement::new(premise.context().to_vec(), premise.term().clone(), sub.goal().clone());
        TypingDerivation::from_parts(
            j,
            TypingRule::Leq {
                premise: Box::new(premise),
                sub,
            },
        )
    }

    pub fn inter(left: TypingDerivation, right: TypingDerivation) -> TypingDerivation {
        let ty = Type::inter(left.ty().clone(), right.ty().clone());
        let j = Judgement::new(left.context().to_vec(), left.term().clone(), ty);
        TypingDerivation::from_parts(
            j,
            TypingRule::Inter {
                left: Box::new(left),
                right: Box::new(right),
            },
        )
    }

    pub fn omega(context: Context, term: Term, ty: Type) -> TypingDerivation {
        TypingDerivation::from_parts(Judgement::new(context, term, ty), TypingRule::Omega)
    }

    /// # Panics
    /// If the premise context is empty.
    pub fn abs(premise: TypingDerivation) -> TypingDerivation {
        let mut context = premise.context().to_vec();
        let (y, a) = context.pop().expect("abs premise binds a variable");
        let term = Term::abs(&y, premise.term().clone());
        let ty = Type::arrow(a, premise.ty().clone());
        TypingDerivation::from_parts(
            Judgement::new(context, term, ty),
            TypingRule::Abs {
                premise: Box::new(premise),
            },
        )
    }

    /// # Panics
    /// If the function premise is not arrow-typed.
    pub fn app(fun: TypingDerivation, arg: TypingDerivation) -> TypingDerivation {
        let (_, b) = fun.ty().as_arrow().expect("function premise has an arrow type");
        let j = Judgement::new(
            fun.context().to_vec(),
            Term::app(fun.term().clone(), arg.term().clone()),
            b.clone(),
        );
        TypingDerivation::from_parts(
            j,
            TypingRule::App {
                fun: Box::new(fun),
                arg: Box::new(arg),
            },
        )
    }

    pub fn pair(left: TypingDerivation, right: TypingDerivation) -> TypingDerivation {
        let j = Judgement::new(
            left.context().to_vec(),
            Term::pair(left.term().clone(), right.term().clone()),
            Type::prod(left.ty().clone(), right.ty().clone()),
        );
        TypingDerivation::from_parts(
            j,
            TypingRule::Pair {
                left: Box::new(left),
                right: Box::new(right),
            },
        )
    }

    /// # Panics
    /// If the premise is not product-typed.
    pub fn proj1(premise: TypingDerivation) -> TypingDerivation {
        let (a, _) = premise.ty().as_prod().expect("premise has a product type");
        let j = Judgement::new(premise.context().to_vec(), Term::fst(premise.term().clone()), a.clone());
        TypingDerivation::from_parts(
            j,
            TypingRule::Proj1 {
                premise: Box::new(premise),
            },
        )
    }

    /// # Panics
    /// If the premise is not product-typed.
    pub fn proj2(premise: TypingDerivation) -> TypingDerivation {
        let (_, b) = premise.ty().as_prod().expect("premise has a product type");
        let j = Judgement::new(premise.context().to_vec(), Term::snd(premise.term().clone()), b.clone());
        TypingDerivation::from_parts(
            j,
            TypingRule::Proj2 {
                premise: Box::new(premise),
            },
        )
    }

    pub fn judgement(&self) -> &Judgement {
        &self.judgement
    }

    pub fn context(&self) -> &[(String, Type)] {
        &self.judgement.context
    }

    pub fn term(&self) -> &Term {
        &self.judgement.term
    }

    pub fn ty(&self) -> &Type {
        &self.judgement.ty
    }

    pub fn rule(&self) -> &TypingRule {
        &self.rule
    }

    pub fn tag(&self) -> &'static str {
        match self.rule {
            TypingRule::Var => "var",
            TypingRule::Leq { .. } => "leq",
            TypingRule::Inter { .. } => "inter",
            TypingRule::Omega => "omega",
            TypingRule::Abs { .. } => "abs",
            TypingRule::App { .. } => "app",
            TypingRule::Pair { .. } => "pair",
            TypingRule::Proj1 { .. } => "proj1",
            TypingRule::Proj2 { .. } => "proj2",
        }
    }

    /// Typing premises in order (the ISC evidence of `leq` is not included).
    pub fn premises(&self) -> Vec<&TypingDerivation> {
        match &self.rule {
            TypingRule::Var | TypingRule::Omega => vec![],
            TypingRule::Leq { premise, .. }
            | TypingRule::Abs { premise }
            | TypingRule::Proj1 { premise }
            | TypingRule::Proj2 { premise } => vec![premise],
            TypingRule::Inter { left, right } | TypingRule::Pair { left, right } => vec![left, right],
            TypingRule::App { fun, arg } => vec![fun, arg],
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises().iter().map(|p| p.node_count()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.premises().iter().map(|p| p.depth()).max().unwrap_or(0)
    }

    pub fn to_sexpr(&self) -> sexpr::Node {
        let mut children: Vec<sexpr::Node> = self.premises().into_iter().map(|p| p.to_sexpr()).collect();
        if let TypingRule::Leq { sub, .. } = &self.rule {
            children.push(sub.to_sexpr());
        }
        sexpr::Node::new(self.tag(), vec![], self.judgement.to_string(), children)
    }

    pub fn to_text(&self, compact: bool) -> String {
        self.to_sexpr().render(compact)
    }

    /// Reads the text form; the result is not checked.
    pub fn from_text(text: &str, sig: &mut Signature, mode: Undeclared) -> Result<TypingDerivation, LambdaError> {
        let node = sexpr::parse(text)?;
        TypingDerivation::from_sexpr(&node, sig, mode)
    }

    pub fn from_sexpr(
        node: &sexpr::Node,
        sig: &mut Signature,
        mode: Undeclared,
    ) -> Result<TypingDerivation, LambdaError> {
        let judgement = Judgement::parse_with(&node.conclusion, sig, mode)?;
        let bad = |msg: &str| LambdaError::RuleViolation {
            path: vec![],
            description: format!("malformed `{}` node: {msg}", node.tag),
        };
        if !node.args.is_empty() {
            return Err(bad("unexpected arguments"));
        }
        let arity = match node.tag.as_str() {
            "var" | "omega" => 0,
            "abs" | "proj1" | "proj2" => 1,
            "leq" | "inter" | "app" | "pair" => 2,
            other => return Err(bad(&format!("unknown tag `{other}`"))),
        };
        if node.children.len() != arity {
            return Err(bad(&format!("expected {arity} children")));
        }
        let mut kid = |i: usize| -> Result<Box<TypingDerivation>, LambdaError> {
            TypingDerivation::from_sexpr(&node.children[i], sig, mode).map(Box::new)
        };
        let rule = match node.tag.as_str() {
            "var" => TypingRule::Var,
            "omega" => TypingRule::Omega,
            "abs" => TypingRule::Abs { premise: kid(0)? },
            "proj1" => TypingRule::Proj1 { premise: kid(0)? },
            "proj2" => TypingRule::Proj2 { premise: kid(0)? },
            "inter" => TypingRule::Inter {
                left: kid(0)?,
                right: kid(1)?,
            },
            "app" => TypingRule::App {
                fun: kid(0)?,
                arg: kid(1)?,
            },
            "pair" => TypingRule::Pair {
                left: kid(0)?,
                right: kid(1)?,
            },
            _ => {
                let premise = kid(0)?;
                let sub = IscDerivation::from_sexpr(&node.children[1], sig, mode)?;
                TypingRule::Leq { premise, sub }
            }
        };
        Ok(TypingDerivation::from_parts(judgement, rule))
    }
}

/// Checks every node against its schema, reporting the first bad node.
///
/// Besides the rule schemas, every node must have a context with distinct
/// names whose domain covers the free variables of the subject.
pub fn check_typing(d: &TypingDerivation, sig: &Signature) -> Result<(), LambdaError> {
    check_node(d, sig, &mut Vec::new())
}

fn check_node(d: &TypingDerivation, sig: &Signature, path: &mut Vec<usize>) -> Result<(), LambdaError> {
    let fail = |path: &[usize], msg: String| LambdaError::RuleViolation {
        path: path.to_vec(),
        description: msg,
    };
    let j = d.judgement();
    check_scope(j, sig).map_err(|m| fail(path, format!("{m} in `{j}`")))?;
    let same_ctx = |p: &TypingDerivation, path: &[usize]| {
        if p.context() == j.context.as_slice() {
            Ok(())
        } else {
            Err(fail(path, format!("premise context differs: `{}`", p.judgement())))
        }
    };
    match d.rule() {
        TypingRule::Var => match &j.term {
            Term::Var(x) => match j.lookup(x) {
                Some(t) if t == &j.ty => {}
                Some(t) => return Err(fail(path, format!("`{x}` is declared at {t}, not {}", j.ty))),
                None => return Err(fail(path, format!("`{x}` is not declared"))),
            },
            _ => return Err(fail(path, "var needs a variable subject".into())),
        },
        TypingRule::Omega => {
            if !sig.is_top_like(&j.ty) {
                return Err(fail(path, format!("omega needs a top type, got {}", j.ty)));
            }
        }
        TypingRule::Leq { premise, sub } => {
            same_ctx(premise, path)?;
            if premise.term() != &j.term {
                return Err(fail(path, "leq premise has a different subject".into()));
            }
            if sub.context() != std::slice::from_ref(premise.ty()) || sub.goal() != &j.ty {
                return Err(fail(
                    path,
                    format!(
                        "leq evidence concludes {} instead of {} |- {}",
                        sub.conclusion(),
                        premise.ty(),
                        j.ty
                    ),
                ));
            }
            path.push(1);
            let checked = check_isc(sub, sig).map_err(|e| fail(path, format!("leq evidence: {e}")));
            path.pop();
            checked?;
        }
        TypingRule::Inter { left, right } => {
            same_ctx(left, path)?;
            same_ctx(right, path)?;
            if left.term() != &j.term || right.term() != &j.term {
                return Err(fail(path, "inter premises have a different subject".into()));
            }
            if Type::inter(left.ty().clone(), right.ty().clone()) != j.ty {
                return Err(fail(
                    path,
                    "inter conclusion is not the meet of the premise types".into(),
                ));
            }
        }
        TypingRule::Abs { premise } => {
            let Term::Abs(x, body) = &j.term else {
                return Err(fail(path, "abs needs an abstraction subject".into()));
            };
            let pctx = premise.context();
            let Some(((y, a), init)) = pctx.split_last() else {
                return Err(fail(path, "abs premise context is empty".into()));
            };
            if init != j.context.as_slice() {
                return Err(fail(
                    path,
                    "abs premise context must extend the conclusion context by one".into(),
                ));
            }
            if lookup(&j.context, y).is_some() {
                return Err(fail(path, format!("abs binder `{y}` is already declared")));
            }
            if premise.term() != &body.subst(x, &Term::var(y)) {
                return Err(fail(path, "abs premise subject is not the renamed body".into()));
            }
            if Type::arrow(a.clone(), premise.ty().clone()) != j.ty {
                return Err(fail(
                    path,
                    format!("abs conclusion type should be {} -> {}", a, premise.ty()),
                ));
            }
        }
        TypingRule::App { fun, arg } => {
            same_ctx(fun, path)?;
            same_ctx(arg, path)?;
            let Term::App(t, u) = &j.term else {
                return Err(fail(path, "app needs an application subject".into()));
            };
            if fun.term() != &**t || arg.term() != &**u {
                return Err(fail(path, "app premises do not type the subterms".into()));
            }
            match fun.ty().as_arrow() {
                Some((a, b)) if a == arg.ty() && b == &j.ty => {}
                _ => {
                    return Err(fail(
                        path,
                        format!("app needs {} -> {}, got {}", arg.ty(), j.ty, fun.ty()),
                    ))
                }
            }
        }
        TypingRule::Pair { left, right } => {
            same_ctx(left, path)?;
            same_ctx(right, path)?;
            let Term::Pair(t, u) = &j.term else {
                return Err(fail(path, "pair needs a pair subject".into()));
            };
            if left.term() != &**t || right.term() != &**u {
                return Err(fail(path, "pair premises do not type the components".into()));
            }
            if Type::prod(left.ty().clone(), right.ty().clone()) != j.ty {
                return Err(fail(
                    path,
                    "pair conclusion is not the product of the premise types".into(),
                ));
            }
        }
        TypingRule::Proj1 { premise } | TypingRule::Proj2 { premise } => {
            same_ctx(premise, path)?;
            let first = matches!(d.rule(), TypingRule::Proj1 { .. });
            let inner = match (&j.term, first) {
                (Term::Fst(t), true) | (Term::Snd(t), false) => t,
                _ => return Err(fail(path, format!("{} needs a projection subject", d.tag()))),
            };
            if premise.term() != &**inner {
                return Err(fail(path, "projection premise does not type the subterm".into()));
            }
            match premise.ty().as_prod() {
                Some((a, b)) if (if first { a } else { b }) == &j.ty => {}
                _ => {
                    return Err(fail(
                        path,
                        format!("{} premise type {} does not match", d.tag(), premise.ty()),
                    ))
                }
            }
        }
    }
    for (i, p) in d.premises().into_iter().enumerate() {
        path.push(i);
        check_node(p, sig, path)?;
        path.pop();
    }
    Ok(())
}

fn check_scope(j: &Judgement, sig: &Signature) -> Result<(), String> {
    let mut names = BTreeSet::new();
    for (x, t) in &j.context {
        if !names.insert(x.as_str()) {
            return Err(format!("`{x}` is declared twice"));
        }
        t.validate(sig).map_err(|e| e.to_string())?;
    }
    j.ty.validate(sig).map_err(|e| e.to_string())?;
    if let Some(x) = j.term.free_vars().iter().find(|x| !names.contains(x.as_str())) {
        return Err(format!("free variable `{x}` is not declared"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isc::prove;
    use crate::isc::Sequent;

    fn sig() -> Signature {
        Signature::arrow_product(["A", "B", "C"])
    }

    fn ty(s: &str) -> Type {
        crate::syntax::parse_type(s, &sig()).unwrap()
    }

    fn ctx(entries: &[(&str, &str)]) -> Context {
        entries.iter().map(|(x, t)| (x.to_string(), ty(t))).collect()
    }

    #[test]
    fn var_and_omega() {
        let d = TypingDerivation::var(ctx(&[("x", "A")]), "x", ty("A"));
        check_typing(&d, &sig()).unwrap();
        let d = TypingDerivation::omega(vec![], Term::parse("\\x. x").unwrap(), ty("Omega"));
        check_typing(&d, &sig()).unwrap();
        let d = TypingDerivation::omega(vec![], Term::parse("\\x. x").unwrap(), ty("A"));
        assert!(matches!(
            check_typing(&d, &sig()),
            Err(LambdaError::RuleViolation { .. })
        ));
    }

    #[test]
    fn app_mismatch_is_reported() {
        let g = ctx(&[("f", "A -> B"), ("x", "C")]);
        let f = TypingDerivation::var_in(&g, "f").unwrap();
        let x = TypingDerivation::var_in(&g, "x").unwrap();
        let d = TypingDerivation::app(f, x);
        let err = check_typing(&d, &sig()).unwrap_err();
        assert!(matches!(err, LambdaError::RuleViolation { ref path, .. } if path.is_empty()));
    }

    #[test]
    fn abs_with_renamed_binder() {
        let body = TypingDerivation::var(ctx(&[("y", "A")]), "y", ty("A"));
        let d = TypingDerivation::abs(body);
        check_typing(&d, &sig()).unwrap();
        // the same premise justifies the conclusion written with another binder
        let renamed = TypingDerivation::from_parts(
            Judgement::new(vec![], Term::parse("\\z. z").unwrap(), ty("A -> A")),
            d.rule().clone(),
        );
        check_typing(&renamed, &sig()).unwrap();
    }

    #[test]
    fn leq_and_text_round_trip() {
        let g = ctx(&[("x", "A /\\ B")]);
        let sub = prove(&Sequent::single(ty("A /\\ B"), ty("B")), &sig())
            .unwrap()
            .unwrap();
        let d = TypingDerivation::leq(TypingDerivation::var_in(&g, "x").unwrap(), sub);
        let d = TypingDerivation::pair(
            d.clone(),
            TypingDerivation::omega(g.clone(), Term::var("x"), ty("Omega")),
        );
        let d = TypingDerivation::proj1(d);
        check_typing(&d, &sig()).unwrap();
        assert_eq!(d.judgement().to_string(), "x:A /\\ B |- fst <x, x> : B");
        for compact in [true, false] {
            let text = d.to_text(compact);
            let back = TypingDerivation::from_text(&text, &mut sig(), Undeclared::Reject).unwrap();
            assert_eq!(back, d);
        }
    }

    #[test]
    fn scope_errors() {
        let d = TypingDerivation::omega(vec![], Term::var("x"), ty("Omega"));
        assert!(check_typing(&d, &sig()).is_err());
        let d = TypingDerivation::var(ctx(&[("x", "A"), ("x", "B")]), "x", ty("A"));
        assert!(check_typing(&d, &sig()).is_err());
    }

    #[test]
    fn judgement_parsing() {
        let j = Judgement::parse("f:A -> B, x:A |- f x : B", &sig()).unwrap();
        assert_eq!(j.context.len(), 2);
        assert_eq!(j.to_string(), "f:A -> B, x:A |- f x : B");
        let j = Judgement::parse("|- \\x. x : A -> A", &sig()).unwrap();
        assert!(j.context.is_empty());
        assert!(Judgement::parse("x:Q |- x : Q", &sig()).is_err());
    }
}
