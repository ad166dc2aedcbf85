//! Surface syntax for types, sequents and signature files.
//!
//! ```text
//! type  ::= arrow
//! arrow ::= inter ("->" arrow)?
//! inter ::= prod ("/\" inter)?
//! prod  ::= atom ("*" prod)?
//! atom  ::= IDENT | IDENT "(" typelist? ";" typelist? ")" | "(" type ")"
//! ```
//!
//! `->` and `*` are available only when the signature declares `arrow` with
//! arities 1;1 and `prod` with arities 0;2.

use crate::types::{undeclared_atoms, ConstructorDecl, Signature, Type, TypeError, Width, ARROW, PROD};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    LParen,
    RParen,
    Semi,
    Comma,
    Arrow,
    Meet,
    Star,
    Turnstile,
    Leq,
    Backslash,
    Dot,
    LAngle,
    RAngle,
    Colon,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Meet => "`/\\`".into(),
            Tok::Star => "`*`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Leq => "`<=`".into(),
            Tok::Backslash => "`\\`".into(),
            Tok::Dot => "`.`".into(),
            Tok::LAngle => "`<`".into(),
            Tok::RAngle => "`>`".into(),
            Tok::Colon => "`:`".into(),
        }
    }
}

pub(crate) fn syntax_error(position: usize, message: impl Into<String>) -> TypeError {
    TypeError::Syntax {
        position,
        message: message.into(),
    }
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub(crate) fn lex(text: &str) -> Result<Vec<(usize, Tok)>, TypeError> {
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        let next = bytes.get(i + 1).map(|&(_, c)| c);
        let tok = match (c, next) {
            (c, _) if c.is_whitespace() => {
                i += 1;
                continue;
            }
            ('-', Some('>')) => {
                i += 1;
                Tok::Arrow
            }
            ('/', Some('\\')) => {
                i += 1;
                Tok::Meet
            }
            ('|', Some('-')) => {
                i += 1;
                Tok::Turnstile
            }
            ('<', Some('=')) => {
                i += 1;
                Tok::Leq
            }
            ('(', _) => Tok::LParen,
            (')', _) => Tok::RParen,
            (';', _) => Tok::Semi,
            (',', _) => Tok::Comma,
            ('*', _) => Tok::Star,
            ('\\', _) => Tok::Backslash,
            ('.', _) => Tok::Dot,
            ('<', _) => Tok::LAngle,
            ('>', _) => Tok::RAngle,
            (':', _) => Tok::Colon,
            (c, _) if is_ident_start(c) => {
                let mut j = i;
                while j < bytes.len() && is_ident_char(bytes[j].1) {
                    j += 1;
                }
                let end = bytes.get(j).map_or(text.len(), |&(p, _)| p);
                out.push((pos, Tok::Ident(text[pos..end].to_string())));
                i = j;
                continue;
            }
            (c, _) => return Err(syntax_error(pos, format!("unexpected character `{c}`"))),
        };
        out.push((pos, tok));
        i += 1;
    }
    Ok(out)
}

/// Token cursor shared by the type and term parsers.
pub(crate) struct Cursor {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    // (position, operator) for every infix arrow/product used
    pub(crate) infix_uses: Vec<(usize, &'static str)>,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Cursor, TypeError> {
        Ok(Cursor {
            toks: lex(text)?,
            pos: 0,
            end: text.len(),
            infix_uses: Vec::new(),
        })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    pub(crate) fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    pub(crate) fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<(), TypeError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {}", tok.describe())))
        }
    }

    pub(crate) fn unexpected(&self, what: &str) -> TypeError {
        let found = self.peek().map_or_else(|| "end of input".to_string(), Tok::describe);
        syntax_error(self.offset(), format!("{what}, found {found}"))
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn finish(&self) -> Result<(), TypeError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("expected end of input"))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String, TypeError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("expected identifier")),
        }
    }

    pub(crate) fn parse_type(&mut self) -> Result<Type, TypeError> {
        let lhs = self.parse_inter()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.infix_uses.push((self.offset(), ARROW));
            self.pos += 1;
            let rhs = self.parse_type()?;
            return Ok(Type::arrow(lhs, rhs));
        }
        Ok(lhs)
    }

    fn parse_inter(&mut self) -> Result<Type, TypeError> {
        let lhs = self.parse_prod()?;
        if self.eat(&Tok::Meet) {
            let rhs = self.parse_inter()?;
            return Ok(Type::inter(lhs, rhs));
        }
        Ok(lhs)
    }

    fn parse_prod(&mut self) -> Result<Type, TypeError> {
        let lhs = self.parse_atom()?;
        if self.peek() == Some(&Tok::Star) {
            self.infix_uses.push((self.offset(), PROD));
            self.pos += 1;
            let rhs = self.parse_prod()?;
            return Ok(Type::prod(lhs, rhs));
        }
        Ok(lhs)
    }

    fn parse_atom(&mut self) -> Result<Type, TypeError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.parse_type()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Ident(_)) => {
                let head = self.ident()?;
                if !self.eat(&Tok::LParen) {
                    return Ok(Type::atom(&head));
                }
                let contra = self.parse_typelist(&Tok::Semi)?;
                self.expect(&Tok::Semi)?;
                let co = self.parse_typelist(&Tok::RParen)?;
                self.expect(&Tok::RParen)?;
                Ok(Type::constr(&head, contra, co))
            }
            _ => Err(self.unexpected("expected a type")),
        }
    }

    fn parse_typelist(&mut self, stop: &Tok) -> Result<Vec<Type>, TypeError> {
        let mut out = Vec::new();
        if self.peek() == Some(stop) {
            return Ok(out);
        }
        loop {
            out.push(self.parse_type()?);
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    /// Comma-separated types, stopping before `stop` (not consumed).
    pub(crate) fn parse_context(&mut self, stop: &Tok) -> Result<Vec<Type>, TypeError> {
        self.parse_typelist(stop)
    }

    /// Rejects infix operators the signature does not support.
    pub(crate) fn check_infix(&self, sig: &Signature) -> Result<(), TypeError> {
        for &(pos, op) in &self.infix_uses {
            let ok = match op {
                ARROW => sig.has_shape(ARROW, 1, 1),
                _ => sig.has_shape(PROD, 0, 2),
            };
            if !ok {
                let sym = if op == ARROW { "->" } else { "*" };
                return Err(syntax_error(
                    pos,
                    format!("`{sym}` requires `{op}` in the signature with its standard arities"),
                ));
            }
        }
        Ok(())
    }
}

/// How identifiers missing from the signature are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Undeclared {
    Reject,
    /// Bare identifiers become 0-ary width-1 constructors.
    DeclareAtoms,
}

pub(crate) fn finish_types(
    cur: &Cursor,
    types: &[&Type],
    sig: &mut Signature,
    mode: Undeclared,
) -> Result<(), TypeError> {
    if mode == Undeclared::DeclareAtoms {
        let mut fresh = Vec::new();
        for t in types {
            undeclared_atoms(t, sig, &mut fresh);
        }
        for name in fresh {
            sig.declare_atom(&name)?;
        }
    }
    cur.check_infix(sig)?;
    types.iter().try_for_each(|t| t.validate(sig))
}

pub fn parse_type(text: &str, sig: &Signature) -> Result<Type, TypeError> {
    let mut sig = sig.clone();
    parse_type_with(text, &mut sig, Undeclared::Reject)
}

pub fn parse_type_with(text: &str, sig: &mut Signature, mode: Undeclared) -> Result<Type, TypeError> {
    let mut cur = Cursor::new(text)?;
    let t = cur.parse_type()?;
    cur.finish()?;
    finish_types(&cur, &[&t], sig, mode)?;
    Ok(t)
}

/// Parses `T1, ..., Tn |- T` (or `A <= B`, read as the one-element sequent).
pub fn parse_sequent_with(text: &str, sig: &mut Signature, mode: Undeclared) -> Result<(Vec<Type>, Type), TypeError> {
    let mut cur = Cursor::new(text)?;
    let (ctx, goal) = if cur.peek() == Some(&Tok::Turnstile) {
        cur.bump();
        (Vec::new(), cur.parse_type()?)
    } else {
        let first = cur.parse_context(&Tok::Turnstile)?;
        match cur.bump() {
            Some(Tok::Turnstile) => (first, cur.parse_type()?),
            Some(Tok::Leq) if first.len() == 1 => (first, cur.parse_type()?),
            _ => {
                cur.pos -= 1;
                return Err(cur.unexpected("expected `|-` or `<=`"));
            }
        }
    };
    cur.finish()?;
    let all: Vec<&Type> = ctx.iter().chain(std::iter::once(&goal)).collect();
    finish_types(&cur, &all, sig, mode)?;
    Ok((ctx, goal))
}

/// Parses `A <= B`.
pub fn parse_subtyping_with(text: &str, sig: &mut Signature, mode: Undeclared) -> Result<(Type, Type), TypeError> {
    let mut cur = Cursor::new(text)?;
    let lhs = cur.parse_type()?;
    cur.expect(&Tok::Leq)?;
    let rhs = cur.parse_type()?;
    cur.finish()?;
    finish_types(&cur, &[&lhs, &rhs], sig, mode)?;
    Ok((lhs, rhs))
}

pub fn print_type(t: &Type) -> String {
    let mut out = String::new();
    write_type(t, 0, &mut out);
    out
}

/// Left operand, infix, right operand and the levels they are printed at.
type Infix<'a> = (&'a Type, &'static str, &'a Type, u8, u8);

// levels: 0 arrow, 1 intersection, 2 product, 3 atom
fn write_type(t: &Type, level: u8, out: &mut String) {
    let (own, parts): (u8, Option<Infix>) = if let Some((a, b)) = t.as_arrow() {
        (0, Some((a, " -> ", b, 1, 0)))
    } else if let Some((a, b)) = t.as_inter() {
        (1, Some((a, " /\\ ", b, 2, 1)))
    } else if let Some((a, b)) = t.as_prod() {
        (2, Some((a, " * ", b, 3, 2)))
    } else {
        (3, None)
    };
    let paren = level > own;
    if paren {
        out.push('(');
    }
    match (parts, t) {
        (Some((a, op, b, la, lb)), _) => {
            write_type(a, la, out);
            out.push_str(op);
            write_type(b, lb, out);
        }
        (None, Type::Constr { head, contra, co }) => {
            out.push_str(head);
            if !contra.is_empty() || !co.is_empty() {
                out.push('(');
                write_list(contra, out);
                out.push(';');
                if !co.is_empty() {
                    out.push(' ');
                }
                write_list(co, out);
                out.push(')');
            }
        }
        (None, Type::Inter(..)) => unreachable!("intersections carry parts"),
    }
    if paren {
        out.push(')');
    }
}

fn write_list(ts: &[Type], out: &mut String) {
    for (i, t) in ts.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_type(t, 0, out);
    }
}

pub fn print_context(ctx: &[Type]) -> String {
    ctx.iter().map(print_type).collect::<Vec<_>>().join(", ")
}

pub fn print_sequent(ctx: &[Type], goal: &Type) -> String {
    if ctx.is_empty() {
        format!("|- {}", print_type(goal))
    } else {
        format!("{} |- {}", print_context(ctx), print_type(goal))
    }
}

/// Reads the line-based signature format:
///
/// ```text
/// # comment
/// arrow 1 1 0
/// prec Nat <= Int
/// ```
pub fn parse_signature(text: &str) -> Result<Signature, TypeError> {
    let mut sig = Signature::new();
    let mut orders = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let here = offset;
        offset += line.len();
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        match fields.as_slice() {
            ["prec", lo, "<=", hi] => orders.push((here, lo.to_string(), hi.to_string())),
            [name, convar, covar, width] if *name != "prec" => {
                let num = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| syntax_error(here, format!("`{s}` is not a natural number")))
                };
                if !name.chars().next().is_some_and(is_ident_start) || !name.chars().all(is_ident_char) {
                    return Err(syntax_error(here, format!("`{name}` is not an identifier")));
                }
                let width = match num(width)? {
                    0 => Width::Zero,
                    1 => Width::One,
                    _ => return Err(TypeError::BadWidth(name.to_string())),
                };
                sig.declare(ConstructorDecl::new(*name, num(convar)?, num(covar)?, width))?;
            }
            _ => {
                return Err(syntax_error(
                    here,
                    "expected `name convar covar width` or `prec a <= b`",
                ))
            }
        }
    }
    for (_, lo, hi) in orders {
        sig.add_order(&lo, &hi)?;
    }
    Ok(sig)
}

pub fn print_signature(sig: &Signature) -> String {
    let mut out = String::new();
    for d in sig.decls() {
        out.push_str(&format!("{} {} {} {}\n", d.name, d.convar, d.covar, d.width.as_usize()));
    }
    for (lo, hi) in sig.order_pairs() {
        out.push_str(&format!("prec {lo} <= {hi}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        let mut s = Signature::arrow_product(["X", "Y", "Z", "A", "B", "C"]);
        s.declare(ConstructorDecl::new("k", 1, 2, Width::One)).unwrap();
        s
    }

    fn ty(s: &str) -> Type {
        parse_type(s, &sig()).unwrap()
    }

    #[test]
    fn intersection_binds_tighter_than_arrow() {
        let t = ty("X /\\ Y -> Z");
        assert_eq!(
            t,
            Type::arrow(Type::inter(Type::atom("X"), Type::atom("Y")), Type::atom("Z"))
        );
    }

    #[test]
    fn arrow_is_right_associative() {
        let t = ty("A -> B -> C");
        assert_eq!(
            t,
            Type::arrow(Type::atom("A"), Type::arrow(Type::atom("B"), Type::atom("C")))
        );
    }

    #[test]
    fn generic_constructor_syntax() {
        let t = ty("k(A; B, C)");
        assert_eq!(
            t,
            Type::constr("k", vec![Type::atom("A")], vec![Type::atom("B"), Type::atom("C")])
        );
        assert_eq!(print_type(&t), "k(A; B, C)");
        assert_eq!(ty("arrow(A; B)"), ty("A -> B"));
        assert_eq!(ty("prod(; A, B)"), ty("A * B"));
    }

    #[test]
    fn product_binds_tighter_than_intersection() {
        let t = ty("A * B /\\ C");
        assert_eq!(
            t,
            Type::inter(Type::prod(Type::atom("A"), Type::atom("B")), Type::atom("C"))
        );
    }

    #[test]
    fn printer_parenthesizes_minimally() {
        for s in [
            "X /\\ Y -> Z",
            "(X -> Y) -> Z",
            "(X /\\ Y) /\\ Z",
            "X /\\ Y /\\ Z",
            "X * (Y /\\ Z)",
            "(X * Y) * Z",
            "X * Y * Z",
            "(X -> Y) * Omega",
            "k(A -> B; B /\\ C, C)",
        ] {
            assert_eq!(print_type(&ty(s)), s);
        }
    }

    #[test]
    fn infix_needs_standard_constructor() {
        let mut s = Signature::new();
        s.declare_atom("X").unwrap();
        s.declare(ConstructorDecl::new(ARROW, 2, 1, Width::Zero)).unwrap();
        assert!(matches!(parse_type("X -> X", &s), Err(TypeError::Syntax { .. })));
        assert!(matches!(parse_type("X * X", &s), Err(TypeError::Syntax { .. })));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_type("X /\\ ", &sig()) {
            Err(TypeError::Syntax { position, .. }) => assert_eq!(position, 5),
            other => panic!("{other:?}"),
        }
        match parse_type("X $ Y", &sig()) {
            Err(TypeError::Syntax { position, .. }) => assert_eq!(position, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_type("X Y", &sig()), Err(TypeError::Syntax { .. })));
    }

    #[test]
    fn undeclared_atoms_on_request() {
        let mut s = Signature::arrow_product([]);
        let t = parse_type_with("P -> Q /\\ P", &mut s, Undeclared::DeclareAtoms).unwrap();
        assert_eq!(t.size(), 5);
        assert!(s.contains("P") && s.contains("Q"));
        assert!(parse_type("R", &s).is_err());
    }

    #[test]
    fn sequents() {
        let mut s = sig();
        let (ctx, goal) = parse_sequent_with("k(A; B, C), X |- Y", &mut s, Undeclared::Reject).unwrap();
        assert_eq!(ctx.len(), 2);
        assert_eq!(print_sequent(&ctx, &goal), "k(A; B, C), X |- Y");
        let (ctx, _) = parse_sequent_with("|- Omega", &mut s, Undeclared::Reject).unwrap();
        assert!(ctx.is_empty());
        let (ctx, goal) = parse_sequent_with("X <= Y", &mut s, Undeclared::Reject).unwrap();
        assert_eq!((ctx.len(), goal), (1, Type::atom("Y")));
    }

    #[test]
    fn signature_file() {
        let text = "# demo\nOmega 0 0 0\narrow 1 1 0\nprod 0 2 1\nNat 0 0 1\nInt 0 0 1\nprec Nat <= Int\n";
        let s = parse_signature(text).unwrap();
        assert!(s.below("Nat", "Int"));
        assert_eq!(parse_signature(&print_signature(&s)).unwrap(), s);
        assert!(matches!(parse_signature("X 0 0 2\n"), Err(TypeError::BadWidth(_))));
        assert!(matches!(
            parse_signature("X 0 0 1\nX 0 0 1\n"),
            Err(TypeError::DuplicateConstructor(_))
        ));
        assert!(matches!(parse_signature("X 0 0\n"), Err(TypeError::Syntax { .. })));
    }
}
