//! Constructor signatures and the type AST.
//!
//! Types are built from binary intersection and applications of declared
//! constructors `k(A1, ..., Am; B1, ..., Bn)` where the first group is
//! contravariant and the second covariant. Base types, the top type and the
//! arrow/product constructors are all ordinary constructors.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use rand::Rng;
use thiserror::Error;

/// Name under which the binary arrow constructor is recognised by the
/// surface syntax and the typing rules.
pub const ARROW: &str = "arrow";
/// Name under which the binary product constructor is recognised.
pub const PROD: &str = "prod";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("constructor `{name}` expects {expected} arguments, got {got}")]
    ArityMismatch {
        name: String,
        expected: String,
        got: String,
    },
    #[error("no 0-ary constructor of width 0 in the signature")]
    NoTopType,
    #[error("constructor `{0}` declared twice")]
    DuplicateConstructor(String),
    #[error("width of `{0}` must be 0 or 1")]
    BadWidth(String),
    #[error("preorder relates `{0}` and `{1}`, which differ in arity or width")]
    IncompatiblePreorder(String, String),
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
}

/// Behaviour of a constructor with respect to the top type: width 0 means the
/// constructor can be derived from an empty context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Width {
    Zero,
    One,
}

impl Width {
    pub fn as_usize(self) -> usize {
        match self {
            Width::Zero => 0,
            Width::One => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstructorDecl {
    pub name: String,
    pub convar: usize,
    pub covar: usize,
    pub width: Width,
}

impl ConstructorDecl {
    pub fn new(name: impl Into<String>, convar: usize, covar: usize, width: Width) -> Self {
        ConstructorDecl {
            name: name.into(),
            convar,
            covar,
            width,
        }
    }

    fn same_shape(&self, other: &ConstructorDecl) -> bool {
        self.convar == other.convar && self.covar == other.covar && self.width == other.width
    }
}

/// A set of constructors together with a preorder on them.
///
/// The preorder is stored as its reflexive-transitive closure; only
/// constructors with equal arities and equal width may be related.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    decls: IndexMap<String, ConstructorDecl>,
    // strict part of the closure: (below, above), below != above
    order: BTreeSet<(String, String)>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    /// The arrow/product instance: `Omega`, `arrow` and `prod`, plus the given
    /// base types with width 1.
    pub fn arrow_product<'a>(atoms: impl IntoIterator<Item = &'a str>) -> Self {
        let mut sig = Signature::new();
        sig.declare(ConstructorDecl::new("Omega", 0, 0, Width::Zero))
            .expect("fresh signature");
        sig.declare(ConstructorDecl::new(ARROW, 1, 1, Width::Zero))
            .expect("fresh signature");
        sig.declare(ConstructorDecl::new(PROD, 0, 2, Width::One))
            .expect("fresh signature");
        for a in atoms {
            sig.declare_atom(a).expect("distinct atom names");
        }
        sig
    }

    pub fn declare(&mut self, decl: ConstructorDecl) -> Result<(), TypeError> {
        if self.decls.contains_key(&decl.name) {
            return Err(TypeError::DuplicateConstructor(decl.name));
        }
        self.decls.insert(decl.name.clone(), decl);
        Ok(())
    }

    /// Declares a 0-ary width-1 constructor.
    pub fn declare_atom(&mut self, name: &str) -> Result<(), TypeError> {
        self.declare(ConstructorDecl::new(name, 0, 0, Width::One))
    }

    /// Adds `below ≼ above` and recomputes the closure.
    pub fn add_order(&mut self, below: &str, above: &str) -> Result<(), TypeError> {
        let lo = self.get(below)?;
        let hi = self.get(above)?;
        if !lo.same_shape(hi) {
            return Err(TypeError::IncompatiblePreorder(below.into(), above.into()));
        }
        if below == above {
            return Ok(());
        }
        self.order.insert((below.to_string(), above.to_string()));
        self.close_order();
        Ok(())
    }

    fn close_order(&mut self) {
        loop {
            let mut fresh = Vec::new();
            for (a, b) in &self.order {
                for (c, d) in self.order.range((b.clone(), String::new())..) {
                    if c != b {
                        break;
                    }
                    if a != d && !self.order.contains(&(a.clone(), d.clone())) {
                        fresh.push((a.clone(), d.clone()));
                    }
                }
            }
            if fresh.is_empty() {
                return;
            }
            self.order.extend(fresh);
        }
    }

    pub fn get(&self, name: &str) -> Result<&ConstructorDecl, TypeError> {
        self.decls
            .get(name)
            .ok_or_else(|| TypeError::UnknownConstructor(name.to_string()))
    }

    pub fn lookup(&self, name: &str) -> Option<&ConstructorDecl> {
        self.decls.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.decls.contains_key(name)
    }

    pub fn decls(&self) -> impl Iterator<Item = &ConstructorDecl> {
        self.decls.values()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    /// `below ≼ above` in the reflexive-transitive closure.
    pub fn below(&self, below: &str, above: &str) -> bool {
        below == above || self.order.contains(&(below.to_string(), above.to_string()))
    }

    /// Generating pairs of the strict preorder (already closed).
    pub fn order_pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.order.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn has_trivial_order(&self) -> bool {
        self.order.is_empty()
    }

    /// The designated top constructor: the first declared 0-ary width-0 one.
    pub fn top(&self) -> Option<&str> {
        self.decls
            .values()
            .find(|d| d.convar == 0 && d.covar == 0 && d.width == Width::Zero)
            .map(|d| d.name.as_str())
    }

    pub fn top_type(&self) -> Result<Type, TypeError> {
        self.top().map(Type::atom).ok_or(TypeError::NoTopType)
    }

    /// Whether `name` is declared with the given shape.
    pub fn has_shape(&self, name: &str, convar: usize, covar: usize) -> bool {
        self.decls
            .get(name)
            .is_some_and(|d| d.convar == convar && d.covar == covar)
    }

    pub fn is_top_like(&self, t: &Type) -> bool {
        match t {
            Type::Constr { head, contra, co } if contra.is_empty() && co.is_empty() => self
                .lookup(head)
                .is_some_and(|d| d.width == Width::Zero && d.convar == 0 && d.covar == 0),
            _ => false,
        }
    }
}

/// Intersection and constructor application.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Inter(Box<Type>, Box<Type>),
    Constr {
        head: String,
        contra: Vec<Type>,
        co: Vec<Type>,
    },
}

impl Type {
    pub fn atom(name: &str) -> Type {
        Type::Constr {
            head: name.to_string(),
            contra: Vec::new(),
            co: Vec::new(),
        }
    }

    pub fn constr(head: &str, contra: Vec<Type>, co: Vec<Type>) -> Type {
        Type::Constr {
            head: head.to_string(),
            contra,
            co,
        }
    }

    pub fn inter(a: Type, b: Type) -> Type {
        Type::Inter(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::constr(ARROW, vec![a], vec![b])
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::constr(PROD, vec![], vec![a, b])
    }

    pub fn is_inter(&self) -> bool {
        matches!(self, Type::Inter(..))
    }

    pub fn head(&self) -> Option<&str> {
        match self {
            Type::Constr { head, .. } => Some(head),
            Type::Inter(..) => None,
        }
    }

    /// Number of `Inter` and `Constr` nodes.
    pub fn size(&self) -> usize {
        match self {
            Type::Inter(a, b) => 1 + a.size() + b.size(),
            Type::Constr { contra, co, .. } => 1 + contra.iter().chain(co).map(Type::size).sum::<usize>(),
        }
    }

    /// Immediate subterms, contravariant arguments first.
    pub fn children(&self) -> Vec<&Type> {
        match self {
            Type::Inter(a, b) => vec![a, b],
            Type::Constr { contra, co, .. } => contra.iter().chain(co).collect(),
        }
    }

    /// All subterms in pre-order, including `self`.
    pub fn subformulas(&self) -> Vec<&Type> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let kids = out[i].children();
            out.extend(kids);
            i += 1;
        }
        out
    }

    /// `Some((a, b))` when the type is `arrow(a; b)`.
    pub fn as_arrow(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::Constr { head, contra, co } if head == ARROW && contra.len() == 1 && co.len() == 1 => {
                Some((&contra[0], &co[0]))
            }
            _ => None,
        }
    }

    /// `Some((a, b))` when the type is `prod(; a, b)`.
    pub fn as_prod(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::Constr { head, contra, co } if head == PROD && contra.is_empty() && co.len() == 2 => {
                Some((&co[0], &co[1]))
            }
            _ => None,
        }
    }

    pub fn as_inter(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::Inter(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn validate(&self, sig: &Signature) -> Result<(), TypeError> {
        match self {
            Type::Inter(a, b) => {
                a.validate(sig)?;
                b.validate(sig)
            }
            Type::Constr { head, contra, co } => {
                let d = sig.get(head)?;
                if d.convar != contra.len() || d.covar != co.len() {
                    return Err(TypeError::ArityMismatch {
                        name: head.clone(),
                        expected: format!("{};{}", d.convar, d.covar),
                        got: format!("{};{}", contra.len(), co.len()),
                    });
                }
                contra.iter().chain(co).try_for_each(|t| t.validate(sig))
            }
        }
    }

    /// Left-to-right maximal constructor-rooted subterms obtained by
    /// flattening every intersection node.
    pub fn atomize(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.atomize_into(&mut out);
        out
    }

    fn atomize_into(&self, out: &mut Vec<Atom>) {
        match self {
            Type::Inter(a, b) => {
                a.atomize_into(out);
                b.atomize_into(out);
            }
            t => out.push(Atom(t.clone())),
        }
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::print_type(self))
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_type(self))
    }
}

/// A constructor-rooted type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(Type);

impl Atom {
    pub fn new(t: Type) -> Option<Atom> {
        match t {
            Type::Inter(..) => None,
            t => Some(Atom(t)),
        }
    }

    pub fn head(&self) -> &str {
        self.0.head().expect("atoms are constructor-rooted")
    }

    pub fn as_type(&self) -> &Type {
        &self.0
    }

    pub fn into_type(self) -> Type {
        self.0
    }
}

impl From<Atom> for Type {
    fn from(a: Atom) -> Type {
        a.0
    }
}

/// Right-nested intersection; the designated top type for an empty list.
pub fn big_inter(ts: &[Type], sig: &Signature) -> Result<Type, TypeError> {
    match ts.split_last() {
        None => sig.top_type(),
        Some((last, init)) => Ok(init
            .iter()
            .rev()
            .fold(last.clone(), |acc, t| Type::inter(t.clone(), acc))),
    }
}

/// Collects the names of bare identifiers not present in `sig`.
pub(crate) fn undeclared_atoms(t: &Type, sig: &Signature, out: &mut Vec<String>) {
    match t {
        Type::Inter(a, b) => {
            undeclared_atoms(a, sig, out);
            undeclared_atoms(b, sig, out);
        }
        Type::Constr { head, contra, co } => {
            if contra.is_empty() && co.is_empty() && !sig.contains(head) && !out.contains(head) {
                out.push(head.clone());
            }
            for c in contra.iter().chain(co) {
                undeclared_atoms(c, sig, out);
            }
        }
    }
}

/// Random type of at most `max_size` nodes over the constructors of `sig`;
/// `None` when `sig` has no 0-ary constructor.
pub fn random_type<R: Rng + ?Sized>(rng: &mut R, sig: &Signature, max_size: usize) -> Option<Type> {
    let leaves: Vec<&str> = sig
        .decls()
        .filter(|d| d.convar == 0 && d.covar == 0)
        .map(|d| d.name.as_str())
        .collect();
    if leaves.is_empty() {
        return None;
    }
    let target = rng.gen_range(1..=max_size.max(1));
    Some(sized_type(rng, sig, &leaves, target))
}

fn sized_type<R: Rng + ?Sized>(rng: &mut R, sig: &Signature, leaves: &[&str], size: usize) -> Type {
    if size <= 1 {
        return Type::atom(leaves[rng.gen_range(0..leaves.len())]);
    }
    // one option per constructor whose argument count fits, plus intersection
    let mut options: Vec<Option<&ConstructorDecl>> = sig
        .decls()
        .filter(|d| {
            let m = d.convar + d.covar;
            m >= 1 && m < size
        })
        .map(Some)
        .collect();
    if size >= 3 {
        options.push(None);
    }
    if options.is_empty() {
        return sized_type(rng, sig, leaves, size - 1);
    }
    match options[rng.gen_range(0..options.len())] {
        None => {
            let left = rng.gen_range(1..=size - 2);
            Type::inter(
                sized_type(rng, sig, leaves, left),
                sized_type(rng, sig, leaves, size - 1 - left),
            )
        }
        Some(d) => {
            let m = d.convar + d.covar;
            // split size - 1 into m positive parts
            let mut parts = vec![1; m];
            for _ in 0..size - 1 - m {
                parts[rng.gen_range(0..m)] += 1;
            }
            let mut args: Vec<Type> = parts.into_iter().map(|n| sized_type(rng, sig, leaves, n)).collect();
            let co = args.split_off(d.convar);
            Type::constr(&d.name, args, co)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Type {
        Type::atom("X")
    }
    fn y() -> Type {
        Type::atom("Y")
    }

    #[test]
    fn validate_examples() {
        let mut sig = Signature::new();
        sig.declare_atom("X").unwrap();
        assert!(x().validate(&sig).is_ok());
        assert!(Type::inter(x(), x()).validate(&sig).is_ok());

        let sig = Signature::arrow_product(["A", "B", "C"]);
        let bad = Type::constr(ARROW, vec![Type::atom("A")], vec![Type::atom("B"), Type::atom("C")]);
        assert!(matches!(bad.validate(&sig), Err(TypeError::ArityMismatch { .. })));
        assert_eq!(
            Type::atom("Q").validate(&sig),
            Err(TypeError::UnknownConstructor("Q".into()))
        );
    }

    #[test]
    fn size_examples() {
        assert_eq!(x().size(), 1);
        assert_eq!(Type::inter(x(), y()).size(), 3);
        let t = Type::inter(Type::arrow(x(), y()), Type::atom("Omega"));
        assert_eq!(t.size(), 5);
    }

    #[test]
    fn atomize_examples() {
        let xy = Type::arrow(x(), y());
        let t = Type::inter(Type::inter(x(), y()), xy.clone());
        let atoms: Vec<Type> = t.atomize().into_iter().map(Type::from).collect();
        assert_eq!(atoms, vec![x(), y(), xy]);
        assert_eq!(x().atomize(), vec![Atom::new(x()).unwrap()]);
        let (a, b, c, d) = (Type::atom("A"), Type::atom("B"), Type::atom("C"), Type::atom("D"));
        let t = Type::inter(Type::prod(a.clone(), b.clone()), Type::prod(c.clone(), d.clone()));
        let atoms: Vec<Type> = t.atomize().into_iter().map(Type::from).collect();
        assert_eq!(atoms, vec![Type::prod(a, b), Type::prod(c, d)]);
    }

    #[test]
    fn big_inter_examples() {
        let sig = Signature::arrow_product(["A", "B", "C"]);
        let (a, b, c) = (Type::atom("A"), Type::atom("B"), Type::atom("C"));
        assert_eq!(
            big_inter(&[a.clone(), b.clone(), c.clone()], &sig).unwrap(),
            Type::inter(a, Type::inter(b, c))
        );
        assert_eq!(big_inter(&[], &sig).unwrap(), Type::atom("Omega"));
        let mut only_x = Signature::new();
        only_x.declare_atom("X").unwrap();
        assert_eq!(big_inter(&[], &only_x), Err(TypeError::NoTopType));
    }

    #[test]
    fn preorder_closure_and_shape() {
        let mut sig = Signature::new();
        for n in ["P", "Q", "R"] {
            sig.declare_atom(n).unwrap();
        }
        sig.declare(ConstructorDecl::new("Top", 0, 0, Width::Zero)).unwrap();
        sig.add_order("P", "Q").unwrap();
        sig.add_order("Q", "R").unwrap();
        assert!(sig.below("P", "R"));
        assert!(sig.below("P", "P"));
        assert!(!sig.below("R", "P"));
        assert!(matches!(
            sig.add_order("P", "Top"),
            Err(TypeError::IncompatiblePreorder(..))
        ));
    }

    #[test]
    fn size_decreases_to_children() {
        let t = Type::inter(Type::arrow(x(), Type::prod(x(), y())), y());
        for s in t.subformulas() {
            assert!(s.size() >= 1);
            for c in s.children() {
                assert!(c.size() < s.size());
            }
        }
    }
}
