//! λ-terms with pairs, compared up to α-equivalence.
//!
//! ```text
//! term   ::= "\" IDENT "." term | app
//! app    ::= factor+
//! factor ::= IDENT | "<" term "," term ">" | "fst" factor | "snd" factor | "(" term ")"
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::syntax::{Cursor, Tok};
use crate::types::TypeError;

/// Terms keep their binder names; `==` is α-equivalence.
#[derive(Clone, Eq)]
pub enum Term {
    Var(String),
    Abs(String, Box<Term>),
    App(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Fst(Box<Term>),
    Snd(Box<Term>),
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        alpha_eq(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

fn alpha_eq(a: &Term, b: &Term, env_a: &mut Vec<String>, env_b: &mut Vec<String>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            let i = env_a.iter().rposition(|v| v == x);
            let j = env_b.iter().rposition(|v| v == y);
            match (i, j) {
                (None, None) => x == y,
                (Some(i), Some(j)) => i == j,
                _ => false,
            }
        }
        (Term::Abs(x, s), Term::Abs(y, t)) => {
            env_a.push(x.clone());
            env_b.push(y.clone());
            let r = alpha_eq(s, t, env_a, env_b);
            env_a.pop();
            env_b.pop();
            r
        }
        (Term::App(s1, s2), Term::App(t1, t2)) | (Term::Pair(s1, s2), Term::Pair(t1, t2)) => {
            alpha_eq(s1, t1, env_a, env_b) && alpha_eq(s2, t2, env_a, env_b)
        }
        (Term::Fst(s), Term::Fst(t)) | (Term::Snd(s), Term::Snd(t)) => alpha_eq(s, t, env_a, env_b),
        _ => false,
    }
}

/// Kind of a contractible subterm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RedexKind {
    Beta,
    Proj1,
    Proj2,
}

impl fmt::Display for RedexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RedexKind::Beta => "beta",
            RedexKind::Proj1 => "proj1",
            RedexKind::Proj2 => "proj2",
        })
    }
}

/// Picks `base`, or `base` with a numeric suffix, avoiding every name in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() || is_keyword(stem) { "v" } else { stem };
    if !avoid.contains(stem) && !is_keyword(stem) {
        return stem.to_string();
    }
    (1..)
        .map(|n| format!("{stem}{n}"))
        .find(|c| !avoid.contains(c))
        .expect("unbounded supply")
}

pub(crate) fn is_keyword(s: &str) -> bool {
    s == "fst" || s == "snd"
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }

    pub fn abs(x: &str, body: Term) -> Term {
        Term::Abs(x.to_string(), Box::new(body))
    }

    pub fn app(t: Term, u: Term) -> Term {
        Term::App(Box::new(t), Box::new(u))
    }

    pub fn pair(t: Term, u: Term) -> Term {
        Term::Pair(Box::new(t), Box::new(u))
    }

    pub fn fst(t: Term) -> Term {
        Term::Fst(Box::new(t))
    }

    pub fn snd(t: Term) -> Term {
        Term::Snd(Box::new(t))
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Immediate subterms, in path order.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) => vec![],
            Term::Abs(_, b) | Term::Fst(b) | Term::Snd(b) => vec![b],
            Term::App(a, b) | Term::Pair(a, b) => vec![a, b],
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Abs(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            _ => self.children().iter().for_each(|c| c.collect_free(bound, out)),
        }
    }

    pub fn occurs_free(&self, x: &str) -> bool {
        self.free_vars().contains(x)
    }

    /// Every name appearing in the term, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Abs(x, b) => {
                out.insert(x.clone());
                b.collect_names(out);
            }
            _ => self.children().iter().for_each(|c| c.collect_names(out)),
        }
    }

    /// Capture-avoiding `t[u/x]`.
    pub fn subst(&self, x: &str, u: &Term) -> Term {
        let mut sigma = HashMap::new();
        sigma.insert(x.to_string(), u.clone());
        self.subst_many(&sigma)
    }

    /// Capture-avoiding simultaneous substitution.
    pub fn subst_many(&self, sigma: &HashMap<String, Term>) -> Term {
        match self {
            Term::Var(x) => sigma.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::Abs(y, body) => {
                let mut inner = sigma.clone();
                inner.remove(y);
                let body_free = body.free_vars();
                let mut range_free = BTreeSet::new();
                for (z, t) in &inner {
                    if body_free.contains(z) {
                        range_free.extend(t.free_vars());
                    }
                }
                if range_free.contains(y) {
                    let mut avoid = range_free;
                    avoid.extend(body_free);
                    let y2 = fresh_name(y, &avoid);
                    inner.insert(y.clone(), Term::Var(y2.clone()));
                    Term::Abs(y2, Box::new(body.subst_many(&inner)))
                } else {
                    Term::Abs(y.clone(), Box::new(body.subst_many(&inner)))
                }
            }
            Term::App(a, b) => Term::app(a.subst_many(sigma), b.subst_many(sigma)),
            Term::Pair(a, b) => Term::pair(a.subst_many(sigma), b.subst_many(sigma)),
            Term::Fst(a) => Term::fst(a.subst_many(sigma)),
            Term::Snd(a) => Term::snd(a.subst_many(sigma)),
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&Term> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children().get(i).and_then(|c| c.at(rest)),
        }
    }

    /// Replaces the subterm at `path`; `None` if the path does not exist.
    pub fn replace_at(&self, path: &[usize], new: Term) -> Option<Term> {
        let Some((&i, rest)) = path.split_first() else {
            return Some(new);
        };
        Some(match (self, i) {
            (Term::Abs(x, b), 0) => Term::Abs(x.clone(), Box::new(b.replace_at(rest, new)?)),
            (Term::App(a, b), 0) => Term::app(a.replace_at(rest, new)?, (**b).clone()),
            (Term::App(a, b), 1) => Term::app((**a).clone(), b.replace_at(rest, new)?),
            (Term::Pair(a, b), 0) => Term::pair(a.replace_at(rest, new)?, (**b).clone()),
            (Term::Pair(a, b), 1) => Term::pair((**a).clone(), b.replace_at(rest, new)?),
            (Term::Fst(a), 0) => Term::fst(a.replace_at(rest, new)?),
            (Term::Snd(a), 0) => Term::snd(a.replace_at(rest, new)?),
            _ => return None,
        })
    }

    /// Redex kind of the term itself, if it is one.
    pub fn redex_kind(&self) -> Option<RedexKind> {
        match self {
            Term::App(f, _) if matches!(**f, Term::Abs(..)) => Some(RedexKind::Beta),
            Term::Fst(p) if matches!(**p, Term::Pair(..)) => Some(RedexKind::Proj1),
            Term::Snd(p) if matches!(**p, Term::Pair(..)) => Some(RedexKind::Proj2),
            _ => None,
        }
    }

    /// The contractum of the term, if it is a redex.
    pub fn contract(&self) -> Option<(Term, RedexKind)> {
        match self {
            Term::App(f, u) => match &**f {
                Term::Abs(x, body) => Some((body.subst(x, u), RedexKind::Beta)),
                _ => None,
            },
            Term::Fst(p) => match &**p {
                Term::Pair(a, _) => Some(((**a).clone(), RedexKind::Proj1)),
                _ => None,
            },
            Term::Snd(p) => match &**p {
                Term::Pair(_, b) => Some(((**b).clone(), RedexKind::Proj2)),
                _ => None,
            },
            _ => None,
        }
    }

    /// Every redex position, in pre-order.
    pub fn find_redexes(&self) -> Vec<(Vec<usize>, RedexKind)> {
        let mut out = Vec::new();
        self.collect_redexes(&mut Vec::new(), &mut out);
        out
    }

    fn collect_redexes(&self, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, RedexKind)>) {
        if let Some(k) = self.redex_kind() {
            out.push((path.clone(), k));
        }
        for (i, c) in self.children().into_iter().enumerate() {
            path.push(i);
            c.collect_redexes(path, out);
            path.pop();
        }
    }

    pub fn parse(text: &str) -> Result<Term, TypeError> {
        let mut cur = Cursor::new(text)?;
        let t = parse_term(&mut cur)?;
        cur.finish()?;
        Ok(t)
    }
}

/// One β-step at `path`.
pub fn beta_step(t: &Term, path: &[usize]) -> Option<Term> {
    step_of(t, path, |k| k == RedexKind::Beta)
}

/// One π-step at `path`.
pub fn pi_step(t: &Term, path: &[usize]) -> Option<Term> {
    step_of(t, path, |k| k != RedexKind::Beta)
}

/// Contracts whichever redex sits at `path`.
pub fn reduce_at(t: &Term, path: &[usize]) -> Option<(Term, RedexKind)> {
    let (c, k) = t.at(path)?.contract()?;
    Some((t.replace_at(path, c)?, k))
}

fn step_of(t: &Term, path: &[usize], accept: impl Fn(RedexKind) -> bool) -> Option<Term> {
    let (r, k) = reduce_at(t, path)?;
    accept(k).then_some(r)
}

pub(crate) fn parse_term(cur: &mut Cursor) -> Result<Term, TypeError> {
    if cur.eat(&Tok::Backslash) {
        let x = binder(cur)?;
        cur.expect(&Tok::Dot)?;
        return Ok(Term::abs(&x, parse_term(cur)?));
    }
    let mut t = parse_factor(cur)?;
    while starts_factor(cur.peek()) {
        t = Term::app(t, parse_factor(cur)?);
    }
    Ok(t)
}

fn binder(cur: &mut Cursor) -> Result<String, TypeError> {
    if matches!(cur.peek(), Some(Tok::Ident(s)) if is_keyword(s)) {
        return Err(cur.unexpected("expected a variable"));
    }
    cur.ident()
}

fn starts_factor(t: Option<&Tok>) -> bool {
    matches!(t, Some(Tok::Ident(_)) | Some(Tok::LAngle) | Some(Tok::LParen))
}

fn parse_factor(cur: &mut Cursor) -> Result<Term, TypeError> {
    match cur.peek() {
        Some(Tok::Ident(s)) if s == "fst" => {
            cur.bump();
            Ok(Term::fst(parse_factor(cur)?))
        }
        Some(Tok::Ident(s)) if s == "snd" => {
            cur.bump();
            Ok(Term::snd(parse_factor(cur)?))
        }
        Some(Tok::Ident(_)) => Ok(Term::Var(cur.ident()?)),
        Some(Tok::LAngle) => {
            cur.bump();
            let a = parse_term(cur)?;
            cur.expect(&Tok::Comma)?;
            let b = parse_term(cur)?;
            cur.expect(&Tok::RAngle)?;
            Ok(Term::pair(a, b))
        }
        Some(Tok::LParen) => {
            cur.bump();
            let t = parse_term(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(t)
        }
        _ => Err(cur.unexpected("expected a term")),
    }
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, 0, &mut out);
    out
}

// levels: 0 term, 1 application, 2 factor
fn write_term(t: &Term, level: u8, out: &mut String) {
    let needs = match t {
        Term::Abs(..) => level > 0,
        Term::App(..) | Term::Fst(_) | Term::Snd(_) => level > 1,
        _ => false,
    };
    if needs {
        out.push('(');
    }
    match t {
        Term::Var(x) => out.push_str(x),
        Term::Abs(x, b) => {
            out.push('\\');
            out.push_str(x);
            out.push_str(". ");
            write_term(b, 0, out);
        }
        Term::App(a, b) => {
            write_term(a, 1, out);
            out.push(' ');
            write_term(b, 2, out);
        }
        Term::Pair(a, b) => {
            out.push('<');
            write_term(a, 0, out);
            out.push_str(", ");
            write_term(b, 0, out);
            out.push('>');
        }
        Term::Fst(a) | Term::Snd(a) => {
            out.push_str(if matches!(t, Term::Fst(_)) { "fst " } else { "snd " });
            write_term(a, 2, out);
        }
    }
    if needs {
        out.push(')');
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

/// Parses `0.1.0`; `root` and the empty string denote the empty path.
pub fn parse_path(text: &str) -> Result<Vec<usize>, String> {
    let text = text.trim();
    if text.is_empty() || text == "root" {
        return Ok(vec![]);
    }
    text.split('.')
        .map(|s| s.parse::<usize>().map_err(|_| format!("bad path component `{s}`")))
        .collect()
}
