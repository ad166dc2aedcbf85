//! Axiomatic subtyping and its translations to and from the
//! sequent calculus.
//!
//! The rules are reflexivity, transitivity, `A ≤ Ω`, the two intersection
//! projections, `A ≤ A ∩ A`, intersection monotonicity, and for every
//! constructor family a monotonicity rule and a distribution rule over
//! intersection (plus `Ω ≤ Ω → Ω` for arrows). Constructor rules are matched
//! by the shape of the head, so any constructor of arrow shape `(1, 1, ω=0)`,
//! product shape `(0, 2, ω=1)` or unary shape `(0, 1, ω=1)` is covered.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::isc::{
    derive_ax, derive_cut, derive_interl_e, derive_weaken_gen, invert_derivation, prove, IscDerivation, IscError, Rule,
    Sequent,
};
use crate::sexpr;
use crate::syntax::{parse_subtyping_with, print_type, Undeclared};
use crate::types::{big_inter, random_type, Signature, Type, TypeError, Width, ARROW, PROD};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxError {
    #[error("rule violation at {}: {description}", crate::isc::fmt_path(.path))]
    RuleViolation { path: Vec<usize>, description: String },
    #[error("unsupported signature: {0}")]
    UnsupportedSignature(String),
    #[error("subtyping does not hold")]
    NotDerivable,
    #[error(transparent)]
    Isc(#[from] IscError),
    #[error(transparent)]
    Type(#[from] TypeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxRule {
    Refl,
    Trans,
    OmegaR,
    InterL1,
    InterL2,
    InterIdem,
    InterMono,
    ArrowMono,
    ArrowDistrib,
    OmegaArrow,
    ProdMono,
    ProdDistrib,
    UnaryMono,
    UnaryDistrib,
}

impl AxRule {
    pub const ALL: [AxRule; 14] = [
        AxRule::Refl,
        AxRule::Trans,
        AxRule::OmegaR,
        AxRule::InterL1,
        AxRule::InterL2,
        AxRule::InterIdem,
        AxRule::InterMono,
        AxRule::ArrowMono,
        AxRule::ArrowDistrib,
        AxRule::OmegaArrow,
        AxRule::ProdMono,
        AxRule::ProdDistrib,
        AxRule::UnaryMono,
        AxRule::UnaryDistrib,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            AxRule::Refl => "refl",
            AxRule::Trans => "trans",
            AxRule::OmegaR => "omegaR",
            AxRule::InterL1 => "interL1",
            AxRule::InterL2 => "interL2",
            AxRule::InterIdem => "interIdem",
            AxRule::InterMono => "interMono",
            AxRule::ArrowMono => "arrowMono",
            AxRule::ArrowDistrib => "arrowDistrib",
            AxRule::OmegaArrow => "omegaArrow",
            AxRule::ProdMono => "prodMono",
            AxRule::ProdDistrib => "prodDistrib",
            AxRule::UnaryMono => "unaryMono",
            AxRule::UnaryDistrib => "unaryDistrib",
        }
    }

    pub fn from_tag(tag: &str) -> Option<AxRule> {
        AxRule::ALL.into_iter().find(|r| r.tag() == tag)
    }

    pub fn arity(self) -> usize {
        match self {
            AxRule::Trans | AxRule::InterMono | AxRule::ArrowMono | AxRule::ProdMono => 2,
            AxRule::UnaryMono => 1,
            _ => 0,
        }
    }
}

/// How a constructor takes part in the axiomatic rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Base,
    Top,
    Arrow,
    Prod,
    Unary,
    Other,
}

pub fn shape(sig: &Signature, head: &str) -> Shape {
    match sig.lookup(head) {
        Some(d) => match (d.convar, d.covar, d.width) {
            (0, 0, Width::One) => Shape::Base,
            (0, 0, Width::Zero) => Shape::Top,
            (1, 1, Width::Zero) => Shape::Arrow,
            (0, 2, Width::One) => Shape::Prod,
            (0, 1, Width::One) => Shape::Unary,
            _ => Shape::Other,
        },
        None => Shape::Other,
    }
}

/// A derivation `lhs ≤ rhs`; every node stores its conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxDerivation {
    lhs: Type,
    rhs: Type,
    rule: AxRule,
    premises: Vec<AxDerivation>,
}

impl AxDerivation {
    /// Builds a node without checking it.
    pub fn new(rule: AxRule, lhs: Type, rhs: Type, premises: Vec<AxDerivation>) -> AxDerivation {
        AxDerivation {
            lhs,
            rhs,
            rule,
            premises,
        }
    }

    pub fn lhs(&self) -> &Type {
        &self.lhs
    }

    pub fn rhs(&self) -> &Type {
        &self.rhs
    }

    pub fn rule(&self) -> AxRule {
        self.rule
    }

    pub fn premises(&self) -> &[AxDerivation] {
        &self.premises
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(AxDerivation::node_count).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(AxDerivation::depth).max().unwrap_or(0)
    }

    pub fn refl(a: Type) -> AxDerivation {
        AxDerivation::new(AxRule::Refl, a.clone(), a, vec![])
    }

    /// Composes `A ≤ B` and `B ≤ C`; reflexivity steps are dropped.
    pub fn trans(d1: AxDerivation, d2: AxDerivation) -> AxDerivation {
        if d1.rule == AxRule::Refl {
            return d2;
        }
        if d2.rule == AxRule::Refl {
            return d1;
        }
        AxDerivation::new(AxRule::Trans, d1.lhs.clone(), d2.rhs.clone(), vec![d1, d2])
    }

    pub fn omega_r(a: Type, top: Type) -> AxDerivation {
        AxDerivation::new(AxRule::OmegaR, a, top, vec![])
    }

    pub fn inter_l1(a: Type, b: Type) -> AxDerivation {
        AxDerivation::new(AxRule::InterL1, Type::inter(a.clone(), b), a, vec![])
    }

    pub fn inter_l2(a: Type, b: Type) -> AxDerivation {
        AxDerivation::new(AxRule::InterL2, Type::inter(a, b.clone()), b, vec![])
    }

    pub fn inter_idem(a: Type) -> AxDerivation {
        AxDerivation::new(AxRule::InterIdem, a.clone(), Type::inter(a.clone(), a), vec![])
    }

    /// `A ∩ B ≤ C ∩ D` from `A ≤ C` and `B ≤ D`.
    pub fn inter_mono(d1: AxDerivation, d2: AxDerivation) -> AxDerivation {
        AxDerivation::new(
            AxRule::InterMono,
            Type::inter(d1.lhs.clone(), d2.lhs.clone()),
            Type::inter(d1.rhs.clone(), d2.rhs.clone()),
            vec![d1, d2],
        )
    }

    /// `C ≤ A ∩ B` from `C ≤ A` and `C ≤ B`, derived as `C ≤ C ∩ C` followed
    /// by monotonicity.
    pub fn meet(d1: AxDerivation, d2: AxDerivation) -> AxDerivation {
        let c = d1.lhs.clone();
        AxDerivation::trans(AxDerivation::inter_idem(c), AxDerivation::inter_mono(d1, d2))
    }

    /// `κ(A; B) ≤ κ(C; D)` from `C ≤ A` and `B ≤ D`.
    pub fn arrow_mono(head: &str, d1: AxDerivation, d2: AxDerivation) -> AxDerivation {
        AxDerivation::new(
            AxRule::ArrowMono,
            Type::constr(head, vec![d1.rhs.clone()], vec![d2.lhs.clone()]),
            Type::constr(head, vec![d1.lhs.clone()], vec![d2.rhs.clone()]),
            vec![d1, d2],
        )
    }

    /// `κ(A; B) ∩ κ(A; C) ≤ κ(A; B ∩ C)`.
    pub fn arrow_distrib(head: &str, a: Type, b: Type, c: Type) -> AxDerivation {
        AxDerivation::new(
            AxRule::ArrowDistrib,
            Type::inter(
                Type::constr(head, vec![a.clone()], vec![b.clone()]),
                Type::constr(head, vec![a.clone()], vec![c.clone()]),
            ),
            Type::constr(head, vec![a], vec![Type::inter(b, c)]),
            vec![],
        )
    }

    /// `Ω ≤ κ(Ω; Ω)`.
    pub fn omega_arrow(head: &str, top: Type) -> AxDerivation {
        AxDerivation::new(
            AxRule::OmegaArrow,
            top.clone(),
            Type::constr(head, vec![top.clone()], vec![top]),
            vec![],
        )
    }

    /// `κ(A, B) ≤ κ(C, D)` from `A ≤ C` and `B ≤ D`.
    pub fn prod_mono(head: &str, d1: AxDerivation, d2: AxDerivation) -> AxDerivation {
        AxDerivation::new(
            AxRule::ProdMono,
            Type::constr(head, vec![], vec![d1.lhs.clone(), d2.lhs.clone()]),
            Type::constr(head, vec![], vec![d1.rhs.clone(), d2.rhs.clone()]),
            vec![d1, d2],
        )
    }

    /// `κ(A, B) ∩ κ(C, D) ≤ κ(A ∩ C, B ∩ D)`.
    pub fn prod_distrib(head: &str, a: Type, b: Type, c: Type, d: Type) -> AxDerivation {
        AxDerivation::new(
            AxRule::ProdDistrib,
            Type::inter(
                Type::constr(head, vec![], vec![a.clone(), b.clone()]),
                Type::constr(head, vec![], vec![c.clone(), d.clone()]),
            ),
            Type::constr(head, vec![], vec![Type::inter(a, c), Type::inter(b, d)]),
            vec![],
        )
    }

    pub fn unary_mono(head: &str, d: AxDerivation) -> AxDerivation {
        AxDerivation::new(
            AxRule::UnaryMono,
            Type::constr(head, vec![], vec![d.lhs.clone()]),
            Type::constr(head, vec![], vec![d.rhs.clone()]),
            vec![d],
        )
    }

    /// `κ(A) ∩ κ(B) ≤ κ(A ∩ B)`.
    pub fn unary_distrib(head: &str, a: Type, b: Type) -> AxDerivation {
        AxDerivation::new(
            AxRule::UnaryDistrib,
            Type::inter(
                Type::constr(head, vec![], vec![a.clone()]),
                Type::constr(head, vec![], vec![b.clone()]),
            ),
            Type::constr(head, vec![], vec![Type::inter(a, b)]),
            vec![],
        )
    }

    pub fn to_sexpr(&self) -> sexpr::Node {
        sexpr::Node::new(
            self.rule.tag(),
            vec![],
            format!("{} <= {}", print_type(&self.lhs), print_type(&self.rhs)),
            self.premises.iter().map(AxDerivation::to_sexpr).collect(),
        )
    }

    pub fn to_text(&self, compact: bool) -> String {
        self.to_sexpr().render(compact)
    }

    /// Reads the text form; the result is not checked.
    pub fn from_text(text: &str, sig: &mut Signature, mode: Undeclared) -> Result<AxDerivation, AxError> {
        AxDerivation::from_sexpr(&sexpr::parse(text)?, sig, mode)
    }

    pub fn from_sexpr(node: &sexpr::Node, sig: &mut Signature, mode: Undeclared) -> Result<AxDerivation, AxError> {
        let bad = |msg: String| AxError::RuleViolation {
            path: vec![],
            description: msg,
        };
        let rule = AxRule::from_tag(&node.tag).ok_or_else(|| bad(format!("unknown tag `{}`", node.tag)))?;
        if !node.args.is_empty() {
            return Err(bad(format!("`{}` takes no arguments", node.tag)));
        }
        let (lhs, rhs) = parse_subtyping_with(&node.conclusion, sig, mode)?;
        let premises = node
            .children
            .iter()
            .map(|c| AxDerivation::from_sexpr(c, sig, mode))
            .collect::<Result<_, _>>()?;
        Ok(AxDerivation::new(rule, lhs, rhs, premises))
    }
}

fn violation(path: &[usize], description: impl Into<String>) -> AxError {
    AxError::RuleViolation {
        path: path.to_vec(),
        description: description.into(),
    }
}

/// Checks every node against its rule schema.
pub fn check_ax(d: &AxDerivation, sig: &Signature) -> Result<(), AxError> {
    let mut path = Vec::new();
    check_node(d, sig, &mut path)
}

fn check_node(d: &AxDerivation, sig: &Signature, path: &mut Vec<usize>) -> Result<(), AxError> {
    d.lhs.validate(sig)?;
    d.rhs.validate(sig)?;
    let rule = d.rule;
    if d.premises.len() != rule.arity() {
        return Err(violation(
            path,
            format!(
                "`{}` expects {} premises, got {}",
                rule.tag(),
                rule.arity(),
                d.premises.len()
            ),
        ));
    }
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_node(p, sig, path)?;
        path.pop();
    }
    if schema_holds(d, sig) {
        Ok(())
    } else {
        Err(violation(
            path,
            format!(
                "`{}` does not conclude {} <= {}",
                rule.tag(),
                print_type(&d.lhs),
                print_type(&d.rhs)
            ),
        ))
    }
}

fn constr_parts<'a>(t: &'a Type, sig: &Signature, want: Shape) -> Option<(&'a str, &'a [Type], &'a [Type])> {
    match t {
        Type::Constr { head, contra, co } if shape(sig, head) == want => Some((head, contra, co)),
        _ => None,
    }
}

fn schema_holds(d: &AxDerivation, sig: &Signature) -> bool {
    let (l, r, p) = (&d.lhs, &d.rhs, &d.premises);
    let conclude = |i: usize, a: &Type, b: &Type| &p[i].lhs == a && &p[i].rhs == b;
    match d.rule {
        AxRule::Refl => l == r,
        AxRule::Trans => &p[0].lhs == l && p[0].rhs == p[1].lhs && &p[1].rhs == r,
        AxRule::OmegaR => sig.is_top_like(r),
        AxRule::InterL1 => l.as_inter().is_some_and(|(a, _)| a == r),
        AxRule::InterL2 => l.as_inter().is_some_and(|(_, b)| b == r),
        AxRule::InterIdem => r.as_inter().is_some_and(|(a, b)| a == l && b == l),
        AxRule::InterMono => match (l.as_inter(), r.as_inter()) {
            (Some((a, b)), Some((c, dd))) => conclude(0, a, c) && conclude(1, b, dd),
            _ => false,
        },
        AxRule::ArrowMono => match (constr_parts(l, sig, Shape::Arrow), constr_parts(r, sig, Shape::Arrow)) {
            (Some((h1, a, b)), Some((h2, c, dd))) => {
                h1 == h2 && conclude(0, &c[0], &a[0]) && conclude(1, &b[0], &dd[0])
            }
            _ => false,
        },
        AxRule::ArrowDistrib => {
            let Some((x, y)) = l.as_inter() else { return false };
            match (
                constr_parts(x, sig, Shape::Arrow),
                constr_parts(y, sig, Shape::Arrow),
                constr_parts(r, sig, Shape::Arrow),
            ) {
                (Some((h1, a1, b)), Some((h2, a2, c)), Some((h3, a3, bc))) => {
                    h1 == h2 && h2 == h3 && a1 == a2 && a2 == a3 && bc[0] == Type::inter(b[0].clone(), c[0].clone())
                }
                _ => false,
            }
        }
        AxRule::OmegaArrow => {
            sig.is_top_like(l)
                && constr_parts(r, sig, Shape::Arrow)
                    .is_some_and(|(_, a, b)| sig.is_top_like(&a[0]) && sig.is_top_like(&b[0]))
        }
        AxRule::ProdMono => match (constr_parts(l, sig, Shape::Prod), constr_parts(r, sig, Shape::Prod)) {
            (Some((h1, _, ab)), Some((h2, _, cd))) => {
                h1 == h2 && conclude(0, &ab[0], &cd[0]) && conclude(1, &ab[1], &cd[1])
            }
            _ => false,
        },
        AxRule::ProdDistrib => {
            let Some((x, y)) = l.as_inter() else { return false };
            match (
                constr_parts(x, sig, Shape::Prod),
                constr_parts(y, sig, Shape::Prod),
                constr_parts(r, sig, Shape::Prod),
            ) {
                (Some((h1, _, ab)), Some((h2, _, cd)), Some((h3, _, m))) => {
                    h1 == h2
                        && h2 == h3
                        && m[0] == Type::inter(ab[0].clone(), cd[0].clone())
                        && m[1] == Type::inter(ab[1].clone(), cd[1].clone())
                }
                _ => false,
            }
        }
        AxRule::UnaryMono => match (constr_parts(l, sig, Shape::Unary), constr_parts(r, sig, Shape::Unary)) {
            (Some((h1, _, a)), Some((h2, _, b))) => h1 == h2 && conclude(0, &a[0], &b[0]),
            _ => false,
        },
        AxRule::UnaryDistrib => {
            let Some((x, y)) = l.as_inter() else { return false };
            match (
                constr_parts(x, sig, Shape::Unary),
                constr_parts(y, sig, Shape::Unary),
                constr_parts(r, sig, Shape::Unary),
            ) {
                (Some((h1, _, a)), Some((h2, _, b)), Some((h3, _, ab))) => {
                    h1 == h2 && h2 == h3 && ab[0] == Type::inter(a[0].clone(), b[0].clone())
                }
                _ => false,
            }
        }
    }
}

fn require_supported(sig: &Signature) -> Result<(), AxError> {
    if !sig.has_trivial_order() {
        return Err(AxError::UnsupportedSignature(
            "the axiomatic rules have no counterpart for a constructor preorder".into(),
        ));
    }
    if sig.top().is_none() {
        return Err(AxError::UnsupportedSignature("no top type declared".into()));
    }
    Ok(())
}

/// `⊢` derivation of the sequent `lhs(d) ⊢ rhs(d)`.
pub fn ax_to_isc(d: &AxDerivation, sig: &Signature) -> Result<IscDerivation, AxError> {
    check_ax(d, sig)?;
    require_supported(sig)?;
    to_isc(d)
}

/// `A, B ⊢ A ∩ B`, the shared core of the distribution cases.
fn pair_meet(a: &Type, b: &Type) -> Result<IscDerivation, AxError> {
    Ok(IscDerivation::inter_r(
        derive_weaken_gen(&derive_ax(a), 1, b)?,
        derive_weaken_gen(&derive_ax(b), 0, a)?,
    ))
}

fn to_isc(d: &AxDerivation) -> Result<IscDerivation, AxError> {
    let (l, r) = (&d.lhs, &d.rhs);
    let sub = |i: usize| to_isc(&d.premises[i]);
    let out = match d.rule {
        AxRule::Refl => derive_ax(l),
        AxRule::Trans => derive_cut(&sub(0)?, &sub(1)?, 0)?,
        AxRule::OmegaR => {
            let top = IscDerivation::constr(vec![], r.clone(), vec![], vec![]);
            derive_weaken_gen(&top, 0, l)?
        }
        AxRule::InterL1 => {
            let (a, b) = l.as_inter().unwrap();
            IscDerivation::inter_l(0, derive_weaken_gen(&derive_ax(a), 1, b)?)
        }
        AxRule::InterL2 => {
            let (a, b) = l.as_inter().unwrap();
            IscDerivation::inter_l(0, derive_weaken_gen(&derive_ax(b), 0, a)?)
        }
        AxRule::InterIdem => IscDerivation::inter_r(derive_ax(l), derive_ax(l)),
        AxRule::InterMono => {
            let (a, b) = l.as_inter().unwrap();
            let left = derive_weaken_gen(&sub(0)?, 1, b)?;
            let right = derive_weaken_gen(&sub(1)?, 0, a)?;
            IscDerivation::inter_l(0, IscDerivation::inter_r(left, right))
        }
        AxRule::ArrowMono | AxRule::ProdMono => {
            let (contra, co) = if d.rule == AxRule::ArrowMono {
                (vec![vec![sub(0)?]], vec![sub(1)?])
            } else {
                (vec![], vec![sub(0)?, sub(1)?])
            };
            IscDerivation::constr(vec![l.clone()], r.clone(), contra, co)
        }
        AxRule::UnaryMono => IscDerivation::constr(vec![l.clone()], r.clone(), vec![], vec![sub(0)?]),
        AxRule::ArrowDistrib => {
            let (x, y) = l.as_inter().unwrap();
            let a = &contra_args(x)[0];
            let (b, c) = (&co_args(x)[0], &co_args(y)[0]);
            let constr = IscDerivation::constr(
                vec![x.clone(), y.clone()],
                r.clone(),
                vec![vec![derive_ax(a), derive_ax(a)]],
                vec![pair_meet(b, c)?],
            );
            IscDerivation::inter_l(0, constr)
        }
        AxRule::OmegaArrow => {
            let top = co_args(r)[0].clone();
            let omega = IscDerivation::constr(vec![], top, vec![], vec![]);
            let arrow = IscDerivation::constr(vec![], r.clone(), vec![vec![]], vec![omega]);
            IscDerivation::wk(0, l.clone(), arrow)
        }
        AxRule::ProdDistrib => {
            let (x, y) = l.as_inter().unwrap();
            let (ab, cd) = (co_args(x), co_args(y));
            let constr = IscDerivation::constr(
                vec![x.clone(), y.clone()],
                r.clone(),
                vec![],
                vec![pair_meet(&ab[0], &cd[0])?, pair_meet(&ab[1], &cd[1])?],
            );
            IscDerivation::inter_l(0, constr)
        }
        AxRule::UnaryDistrib => {
            let (x, y) = l.as_inter().unwrap();
            let constr = IscDerivation::constr(
                vec![x.clone(), y.clone()],
                r.clone(),
                vec![],
                vec![pair_meet(&co_args(x)[0], &co_args(y)[0])?],
            );
            IscDerivation::inter_l(0, constr)
        }
    };
    Ok(out)
}

fn contra_args(t: &Type) -> &[Type] {
    match t {
        Type::Constr { contra, .. } => contra,
        Type::Inter(..) => &[],
    }
}

fn co_args(t: &Type) -> &[Type] {
    match t {
        Type::Constr { co, .. } => co,
        Type::Inter(..) => &[],
    }
}

/// Axiomatic derivation of `⋂ Γ ≤ C` from a derivation of `Γ ⊢ C`, where the
/// empty intersection is the designated top type.
pub fn isc_to_ax(d: &IscDerivation, sig: &Signature) -> Result<AxDerivation, AxError> {
    require_supported(sig)?;
    Translator { sig }.translate(d)
}

struct Translator<'a> {
    sig: &'a Signature,
}

impl Translator<'_> {
    fn meet_of(&self, ts: &[Type]) -> Type {
        big_inter(ts, self.sig).expect("top type checked on entry")
    }

    fn top(&self) -> Type {
        self.sig.top_type().expect("top type checked on entry")
    }

    /// `⋂ L ≤ L[i]`.
    fn pick(&self, l: &[Type], i: usize) -> AxDerivation {
        if l.len() == 1 {
            return AxDerivation::refl(l[0].clone());
        }
        let rest = self.meet_of(&l[1..]);
        if i == 0 {
            AxDerivation::inter_l1(l[0].clone(), rest)
        } else {
            AxDerivation::trans(AxDerivation::inter_l2(l[0].clone(), rest), self.pick(&l[1..], i - 1))
        }
    }

    /// `C ≤ ⋂ T` from derivations `C ≤ T_i`.
    fn combine(&self, c: &Type, mut parts: Vec<AxDerivation>) -> AxDerivation {
        match parts.len() {
            0 => AxDerivation::omega_r(c.clone(), self.top()),
            1 => parts.pop().unwrap(),
            _ => {
                let first = parts.remove(0);
                AxDerivation::meet(first, self.combine(c, parts))
            }
        }
    }

    /// `⋂ X ≤ ⋂ Y` from derivations `X_i ≤ Y_i` (non-empty).
    fn mono_all(&self, mut ds: Vec<AxDerivation>) -> AxDerivation {
        if ds.len() == 1 {
            return ds.pop().unwrap();
        }
        let first = ds.remove(0);
        AxDerivation::inter_mono(first, self.mono_all(ds))
    }

    /// `⋂_j κ(A; B_j) ≤ κ(A; ⋂_j B_j)` (non-empty).
    fn distrib_arrow(&self, head: &str, a: &Type, bs: &[Type]) -> AxDerivation {
        let one = |b: &Type| Type::constr(head, vec![a.clone()], vec![b.clone()]);
        if bs.len() == 1 {
            return AxDerivation::refl(one(&bs[0]));
        }
        let inner = self.distrib_arrow(head, a, &bs[1..]);
        let mono = AxDerivation::inter_mono(AxDerivation::refl(one(&bs[0])), inner);
        let rest = self.meet_of(&bs[1..]);
        AxDerivation::trans(mono, AxDerivation::arrow_distrib(head, a.clone(), bs[0].clone(), rest))
    }

    /// `⋂_j κ(B_j1, ..., B_jn) ≤ κ(⋂_j B_j1, ..., ⋂_j B_jn)` for product and
    /// unary shapes (non-empty).
    fn distrib_co(&self, head: &str, cols: &[Vec<Type>]) -> AxDerivation {
        let k = cols[0].len();
        let row = |j: usize| Type::constr(head, vec![], cols.iter().map(|c| c[j].clone()).collect());
        if k == 1 {
            return AxDerivation::refl(row(0));
        }
        let rest: Vec<Vec<Type>> = cols.iter().map(|c| c[1..].to_vec()).collect();
        let inner = self.distrib_co(head, &rest);
        let mono = AxDerivation::inter_mono(AxDerivation::refl(row(0)), inner);
        let firsts: Vec<Type> = cols.iter().map(|c| c[0].clone()).collect();
        let meets: Vec<Type> = cols.iter().map(|c| self.meet_of(&c[1..])).collect();
        let step = if cols.len() == 2 {
            AxDerivation::prod_distrib(
                head,
                firsts[0].clone(),
                firsts[1].clone(),
                meets[0].clone(),
                meets[1].clone(),
            )
        } else {
            AxDerivation::unary_distrib(head, firsts[0].clone(), meets[0].clone())
        };
        AxDerivation::trans(mono, step)
    }

    fn translate(&self, d: &IscDerivation) -> Result<AxDerivation, AxError> {
        let ctx = d.context();
        let whole = self.meet_of(ctx);
        match d.rule() {
            Rule::Wk { pos, premise } => {
                let parts = (0..ctx.len()).filter(|q| q != pos).map(|q| self.pick(ctx, q)).collect();
                let select = self.combine(&whole, parts);
                Ok(AxDerivation::trans(select, self.translate(premise)?))
            }
            Rule::InterR { left, right } => Ok(AxDerivation::meet(self.translate(left)?, self.translate(right)?)),
            Rule::InterL { pos, premise } => {
                let pos = *pos;
                let (a, b) = ctx[pos].as_inter().expect("checked derivation");
                let n = premise.context().len();
                let parts = (0..n)
                    .map(|q| {
                        if q < pos {
                            self.pick(ctx, q)
                        } else if q == pos {
                            AxDerivation::trans(self.pick(ctx, pos), AxDerivation::inter_l1(a.clone(), b.clone()))
                        } else if q == pos + 1 {
                            AxDerivation::trans(self.pick(ctx, pos), AxDerivation::inter_l2(a.clone(), b.clone()))
                        } else {
                            self.pick(ctx, q - 1)
                        }
                    })
                    .collect();
                let split = self.combine(&whole, parts);
                Ok(AxDerivation::trans(split, self.translate(premise)?))
            }
            Rule::Constr { contra, co } => self.translate_constr(d, contra, co),
        }
    }

    fn translate_constr(
        &self,
        d: &IscDerivation,
        contra: &[Vec<IscDerivation>],
        co: &[IscDerivation],
    ) -> Result<AxDerivation, AxError> {
        let ctx = d.context();
        let goal = d.goal();
        let whole = self.meet_of(ctx);
        let Type::Constr { head, .. } = goal else {
            unreachable!("constr concludes a constructor-rooted goal")
        };
        match shape(self.sig, head) {
            Shape::Top => Ok(AxDerivation::omega_r(whole, goal.clone())),
            Shape::Base => Ok(self.pick(ctx, 0)),
            Shape::Arrow => {
                let a = contra_args(goal)[0].clone();
                let co_ax = self.translate(&co[0])?;
                if ctx.is_empty() {
                    let top = self.top();
                    let widen = AxDerivation::arrow_mono(head, AxDerivation::omega_r(a, top.clone()), co_ax);
                    return Ok(AxDerivation::trans(AxDerivation::omega_arrow(head, top), widen));
                }
                let bs: Vec<Type> = ctx.iter().map(|t| co_args(t)[0].clone()).collect();
                let monos = contra[0]
                    .iter()
                    .zip(&bs)
                    .map(|(c, bj)| {
                        Ok(AxDerivation::arrow_mono(
                            head,
                            self.translate(c)?,
                            AxDerivation::refl(bj.clone()),
                        ))
                    })
                    .collect::<Result<Vec<_>, AxError>>()?;
                let step1 = self.mono_all(monos);
                let step2 = self.distrib_arrow(head, &a, &bs);
                let step3 = AxDerivation::arrow_mono(head, AxDerivation::refl(a), co_ax);
                Ok(AxDerivation::trans(AxDerivation::trans(step1, step2), step3))
            }
            Shape::Prod | Shape::Unary => {
                let n = co.len();
                let cols: Vec<Vec<Type>> = (0..n)
                    .map(|i| ctx.iter().map(|t| co_args(t)[i].clone()).collect())
                    .collect();
                let step1 = self.distrib_co(head, &cols);
                let ihs = co.iter().map(|c| self.translate(c)).collect::<Result<Vec<_>, _>>()?;
                let step2 = if n == 2 {
                    let mut it = ihs.into_iter();
                    AxDerivation::prod_mono(head, it.next().unwrap(), it.next().unwrap())
                } else {
                    AxDerivation::unary_mono(head, ihs.into_iter().next().unwrap())
                };
                Ok(AxDerivation::trans(step1, step2))
            }
            Shape::Other => Err(AxError::UnsupportedSignature(format!(
                "constructor `{head}` has no axiomatic rules"
            ))),
        }
    }
}

/// Result of inverting `⋂_I (A_i → B_i) ≤ A → B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowInversion {
    /// 0-based indices of the selected family members.
    pub selected: Vec<usize>,
    /// `A ≤ A_i` for each selected `i`, in order.
    pub domains: Vec<AxDerivation>,
    /// `⋂_J B_i ≤ B`.
    pub codomain: AxDerivation,
}

/// Result of inverting `⋂_I (A_i × B_i) ≤ A × B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductInversion {
    /// `⋂_I A_i ≤ A`.
    pub first: AxDerivation,
    /// `⋂_I B_i ≤ B`.
    pub second: AxDerivation,
}

/// Proves `fam ⊢ goal` in list form, going through the single-type sequent
/// `⋂ fam ⊢ goal` and flattening the intersection.
fn prove_family(fam: &[Type], goal: &Type, sig: &Signature) -> Result<IscDerivation, AxError> {
    let lhs = big_inter(fam, sig)?;
    let d = prove(&Sequent::single(lhs, goal.clone()), sig)?.ok_or(AxError::NotDerivable)?;
    if fam.is_empty() {
        let top = IscDerivation::constr(vec![], sig.top_type()?, vec![], vec![]);
        return Ok(derive_cut(&top, &d, 0)?);
    }
    let mut d = d;
    for i in 0..fam.len() - 1 {
        d = derive_interl_e(&d, i)?;
    }
    Ok(d)
}

fn family_head(sig: &Signature, name: &str, want: Shape) -> Result<(), AxError> {
    require_supported(sig)?;
    if shape(sig, name) != want {
        return Err(AxError::UnsupportedSignature(format!(
            "`{name}` is not declared with the expected arities"
        )));
    }
    Ok(())
}

/// Inversion of `⋂_I (A_i → B_i) ≤ A → B`. The selected subset is the one
/// used by the derivation that the prover finds.
pub fn inversion_arrow(
    domains: &[Type],
    codomains: &[Type],
    a: &Type,
    b: &Type,
    sig: &Signature,
) -> Result<ArrowInversion, AxError> {
    family_head(sig, ARROW, Shape::Arrow)?;
    assert_eq!(domains.len(), codomains.len(), "families must have equal length");
    let fam: Vec<Type> = domains
        .iter()
        .zip(codomains)
        .map(|(x, y)| Type::arrow(x.clone(), y.clone()))
        .collect();
    let goal = Type::arrow(a.clone(), b.clone());
    let d = prove_family(&fam, &goal, sig)?;
    let w = invert_derivation(&d, sig)?;
    let tr = Translator { sig };
    let domains = w.contra[0].iter().map(|c| tr.translate(c)).collect::<Result<_, _>>()?;
    Ok(ArrowInversion {
        selected: w.selected,
        domains,
        codomain: tr.translate(&w.co[0])?,
    })
}

/// Inversion of `⋂_I (A_i × B_i) ≤ A × B`, over the full index set.
pub fn inversion_product(
    firsts: &[Type],
    seconds: &[Type],
    a: &Type,
    b: &Type,
    sig: &Signature,
) -> Result<ProductInversion, AxError> {
    family_head(sig, PROD, Shape::Prod)?;
    assert_eq!(firsts.len(), seconds.len(), "families must have equal length");
    let fam: Vec<Type> = firsts
        .iter()
        .zip(seconds)
        .map(|(x, y)| Type::prod(x.clone(), y.clone()))
        .collect();
    let goal = Type::prod(a.clone(), b.clone());
    let d = prove_family(&fam, &goal, sig)?;
    let w = invert_derivation(&d, sig)?;
    let tr = Translator { sig };
    let widen = |c: &IscDerivation, column: &[Type]| -> Result<AxDerivation, AxError> {
        // put the unselected members back, in increasing index order
        let mut full = c.clone();
        for (j, t) in column.iter().enumerate() {
            if !w.selected.contains(&j) {
                full = derive_weaken_gen(&full, j, t)?;
            }
        }
        tr.translate(&full)
    };
    Ok(ProductInversion {
        first: widen(&w.co[0], firsts)?,
        second: widen(&w.co[1], seconds)?,
    })
}

/// Random checkable derivation, reproducible from `seed`.
pub fn random_ax_derivation(sig: &Signature, seed: u64, max_depth: usize) -> AxDerivation {
    let mut g = AxGen {
        sig,
        rng: ChaCha8Rng::seed_from_u64(seed),
        type_size: 3,
    };
    let lhs = g.ty();
    g.with_lhs(lhs, max_depth)
}

/// Random derivation generator: `with_lhs` builds a derivation with a fixed
/// left-hand side, `with_rhs` one with a fixed right-hand side.
pub(crate) struct AxGen<'a, R: Rng> {
    pub sig: &'a Signature,
    pub rng: R,
    pub type_size: usize,
}

impl<R: Rng> AxGen<'_, R> {
    pub fn ty(&mut self) -> Type {
        random_type(&mut self.rng, self.sig, self.type_size).expect("signature has 0-ary constructors")
    }

    fn head_of(&mut self, want: Shape) -> Option<String> {
        let names: Vec<&str> = self
            .sig
            .decls()
            .filter(|d| shape(self.sig, &d.name) == want)
            .map(|d| d.name.as_str())
            .collect();
        names.choose(&mut self.rng).map(|s| s.to_string())
    }

    pub fn with_lhs(&mut self, lhs: Type, depth: usize) -> AxDerivation {
        let sig = self.sig;
        let mut options: Vec<AxRule> = vec![AxRule::Refl, AxRule::InterIdem];
        if sig.top().is_some() {
            options.push(AxRule::OmegaR);
        }
        if sig.is_top_like(&lhs) && self.head_of(Shape::Arrow).is_some() {
            options.push(AxRule::OmegaArrow);
        }
        if let Some((x, y)) = lhs.as_inter() {
            options.extend([AxRule::InterL1, AxRule::InterL2]);
            if depth > 0 {
                options.push(AxRule::InterMono);
            }
            if let (Some((h1, a1, _)), Some((h2, a2, _))) =
                (constr_parts(x, sig, Shape::Arrow), constr_parts(y, sig, Shape::Arrow))
            {
                if h1 == h2 && a1 == a2 {
                    options.push(AxRule::ArrowDistrib);
                }
            }
            for (s, rule) in [(Shape::Prod, AxRule::ProdDistrib), (Shape::Unary, AxRule::UnaryDistrib)] {
                if let (Some((h1, ..)), Some((h2, ..))) = (constr_parts(x, sig, s), constr_parts(y, sig, s)) {
                    if h1 == h2 {
                        options.push(rule);
                    }
                }
            }
        }
        if depth > 0 {
            options.push(AxRule::Trans);
            for (s, rule) in [
                (Shape::Arrow, AxRule::ArrowMono),
                (Shape::Prod, AxRule::ProdMono),
                (Shape::Unary, AxRule::UnaryMono),
            ] {
                if constr_parts(&lhs, sig, s).is_some() {
                    options.push(rule);
                }
            }
        }
        let rule = *options.choose(&mut self.rng).unwrap();
        let sub = depth.saturating_sub(1);
        match rule {
            AxRule::Refl => AxDerivation::refl(lhs),
            AxRule::InterIdem => AxDerivation::inter_idem(lhs),
            AxRule::OmegaR => AxDerivation::omega_r(lhs, sig.top_type().unwrap()),
            AxRule::OmegaArrow => {
                let h = self.head_of(Shape::Arrow).unwrap();
                AxDerivation::omega_arrow(&h, lhs)
            }
            AxRule::InterL1 | AxRule::InterL2 | AxRule::InterMono => {
                let (x, y) = lhs.as_inter().unwrap();
                match rule {
                    AxRule::InterL1 => AxDerivation::inter_l1(x.clone(), y.clone()),
                    AxRule::InterL2 => AxDerivation::inter_l2(x.clone(), y.clone()),
                    _ => {
                        let (x, y) = (x.clone(), y.clone());
                        AxDerivation::inter_mono(self.with_lhs(x, sub), self.with_lhs(y, sub))
                    }
                }
            }
            AxRule::ArrowDistrib | AxRule::ProdDistrib | AxRule::UnaryDistrib => {
                let (x, y) = lhs.as_inter().unwrap();
                let (Type::Constr { head, contra, co: c1 }, Type::Constr { co: c2, .. }) = (x, y) else {
                    unreachable!()
                };
                match rule {
                    AxRule::ArrowDistrib => {
                        AxDerivation::arrow_distrib(head, contra[0].clone(), c1[0].clone(), c2[0].clone())
                    }
                    AxRule::ProdDistrib => {
                        AxDerivation::prod_distrib(head, c1[0].clone(), c1[1].clone(), c2[0].clone(), c2[1].clone())
                    }
                    _ => AxDerivation::unary_distrib(head, c1[0].clone(), c2[0].clone()),
                }
            }
            AxRule::Trans => {
                let first = self.with_lhs(lhs, sub);
                let mid = first.rhs.clone();
                AxDerivation::trans_raw(first, self.with_lhs(mid, sub))
            }
            AxRule::ArrowMono | AxRule::ProdMono | AxRule::UnaryMono => {
                let Type::Constr { head, contra, co } = &lhs else {
                    unreachable!()
                };
                match rule {
                    AxRule::ArrowMono => {
                        let d1 = self.with_rhs(contra[0].clone(), sub);
                        let d2 = self.with_lhs(co[0].clone(), sub);
                        AxDerivation::arrow_mono(head, d1, d2)
                    }
                    AxRule::ProdMono => {
                        let d1 = self.with_lhs(co[0].clone(), sub);
                        let d2 = self.with_lhs(co[1].clone(), sub);
                        AxDerivation::prod_mono(head, d1, d2)
                    }
                    _ => {
                        let d = self.with_lhs(co[0].clone(), sub);
                        AxDerivation::unary_mono(head, d)
                    }
                }
            }
        }
    }

    pub fn with_rhs(&mut self, rhs: Type, depth: usize) -> AxDerivation {
        let sig = self.sig;
        let mut options: Vec<AxRule> = vec![AxRule::Refl, AxRule::InterL1, AxRule::InterL2];
        if sig.is_top_like(&rhs) {
            options.push(AxRule::OmegaR);
        }
        if let Some((x, y)) = rhs.as_inter() {
            if x == y {
                options.push(AxRule::InterIdem);
            }
            if depth > 0 {
                options.push(AxRule::InterMono);
            }
        }
        if let Some((_, a, b)) = constr_parts(&rhs, sig, Shape::Arrow) {
            if sig.is_top_like(&a[0]) && sig.is_top_like(&b[0]) && a[0] == b[0] {
                options.push(AxRule::OmegaArrow);
            }
            if b[0].is_inter() {
                options.push(AxRule::ArrowDistrib);
            }
        }
        if let Some((_, _, m)) = constr_parts(&rhs, sig, Shape::Prod) {
            if m[0].is_inter() && m[1].is_inter() {
                options.push(AxRule::ProdDistrib);
            }
        }
        if let Some((_, _, m)) = constr_parts(&rhs, sig, Shape::Unary) {
            if m[0].is_inter() {
                options.push(AxRule::UnaryDistrib);
            }
        }
        if depth > 0 {
            options.push(AxRule::Trans);
            for (s, rule) in [
                (Shape::Arrow, AxRule::ArrowMono),
                (Shape::Prod, AxRule::ProdMono),
                (Shape::Unary, AxRule::UnaryMono),
            ] {
                if constr_parts(&rhs, sig, s).is_some() {
                    options.push(rule);
                }
            }
        }
        let rule = *options.choose(&mut self.rng).unwrap();
        let sub = depth.saturating_sub(1);
        match rule {
            AxRule::Refl => AxDerivation::refl(rhs),
            AxRule::InterL1 => {
                let other = self.ty();
                AxDerivation::inter_l1(rhs, other)
            }
            AxRule::InterL2 => {
                let other = self.ty();
                AxDerivation::inter_l2(other, rhs)
            }
            AxRule::OmegaR => {
                let lhs = self.ty();
                AxDerivation::omega_r(lhs, rhs)
            }
            AxRule::InterIdem => AxDerivation::inter_idem(rhs.as_inter().unwrap().0.clone()),
            AxRule::InterMono => {
                let (x, y) = rhs.as_inter().unwrap();
                let (x, y) = (x.clone(), y.clone());
                AxDerivation::inter_mono(self.with_rhs(x, sub), self.with_rhs(y, sub))
            }
            AxRule::OmegaArrow => {
                let Type::Constr { head, contra, .. } = &rhs else {
                    unreachable!()
                };
                AxDerivation::omega_arrow(head, contra[0].clone())
            }
            AxRule::ArrowDistrib => {
                let Type::Constr { head, contra, co } = &rhs else {
                    unreachable!()
                };
                let (b, c) = co[0].as_inter().unwrap();
                AxDerivation::arrow_distrib(head, contra[0].clone(), b.clone(), c.clone())
            }
            AxRule::ProdDistrib => {
                let Type::Constr { head, co, .. } = &rhs else {
                    unreachable!()
                };
                let (a, c) = co[0].as_inter().unwrap();
                let (b, d) = co[1].as_inter().unwrap();
                AxDerivation::prod_distrib(head, a.clone(), b.clone(), c.clone(), d.clone())
            }
            AxRule::UnaryDistrib => {
                let Type::Constr { head, co, .. } = &rhs else {
                    unreachable!()
                };
                let (a, b) = co[0].as_inter().unwrap();
                AxDerivation::unary_distrib(head, a.clone(), b.clone())
            }
            AxRule::Trans => {
                let second = self.with_rhs(rhs, sub);
                let mid = second.lhs.clone();
                AxDerivation::trans_raw(self.with_rhs(mid, sub), second)
            }
            AxRule::ArrowMono | AxRule::ProdMono | AxRule::UnaryMono => {
                let Type::Constr { head, contra, co } = &rhs else {
                    unreachable!()
                };
                match rule {
                    AxRule::ArrowMono => {
                        let d1 = self.with_lhs(contra[0].clone(), sub);
                        let d2 = self.with_rhs(co[0].clone(), sub);
                        AxDerivation::arrow_mono(head, d1, d2)
                    }
                    AxRule::ProdMono => {
                        let d1 = self.with_rhs(co[0].clone(), sub);
                        let d2 = self.with_rhs(co[1].clone(), sub);
                        AxDerivation::prod_mono(head, d1, d2)
                    }
                    _ => {
                        let d = self.with_rhs(co[0].clone(), sub);
                        AxDerivation::unary_mono(head, d)
                    }
                }
            }
        }
    }
}

impl AxDerivation {
    /// `trans` without dropping reflexivity steps.
    pub(crate) fn trans_raw(d1: AxDerivation, d2: AxDerivation) -> AxDerivation {
        AxDerivation::new(AxRule::Trans, d1.lhs.clone(), d2.rhs.clone(), vec![d1, d2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isc::check_isc;
    use crate::syntax::parse_type;
    use crate::types::ConstructorDecl;

    fn sig() -> Signature {
        Signature::arrow_product(["X", "Y", "Z", "A", "B", "C", "D"])
    }

    fn ty(s: &str) -> Type {
        parse_type(s, &sig()).unwrap()
    }

    fn round_trip(d: &AxDerivation, sig: &Signature) {
        check_ax(d, sig).unwrap();
        let i = ax_to_isc(d, sig).unwrap();
        check_isc(&i, sig).unwrap();
        assert_eq!(i.conclusion(), &Sequent::single(d.lhs.clone(), d.rhs.clone()));
        let back = isc_to_ax(&i, sig).unwrap();
        check_ax(&back, sig).unwrap();
        assert_eq!((&back.lhs, &back.rhs), (&d.lhs, &d.rhs));
    }

    #[test]
    fn leaf_rules() {
        let s = sig();
        check_ax(&AxDerivation::refl(ty("A")), &s).unwrap();
        check_ax(&AxDerivation::omega_arrow(ARROW, ty("Omega")), &s).unwrap();
        let bad = AxDerivation::trans_raw(AxDerivation::refl(ty("A")), AxDerivation::refl(ty("B")));
        assert!(matches!(check_ax(&bad, &s), Err(AxError::RuleViolation { .. })));
    }

    #[test]
    fn axiom_translations() {
        let s = sig();
        for d in [
            AxDerivation::prod_distrib(PROD, ty("A"), ty("B"), ty("C"), ty("D")),
            AxDerivation::arrow_distrib(ARROW, ty("C"), ty("A"), ty("B")),
            AxDerivation::omega_arrow(ARROW, ty("Omega")),
            AxDerivation::inter_l1(ty("A"), ty("B")),
            AxDerivation::inter_l2(ty("A"), ty("B -> C")),
            AxDerivation::inter_idem(ty("A * B")),
            AxDerivation::omega_r(ty("A /\\ B"), ty("Omega")),
        ] {
            round_trip(&d, &s);
        }
    }

    #[test]
    fn translation_of_composite() {
        let s = sig();
        let d = AxDerivation::trans_raw(
            AxDerivation::inter_l1(ty("A /\\ B"), ty("C")),
            AxDerivation::inter_l2(ty("A"), ty("B")),
        );
        round_trip(&d, &s);
        let m = AxDerivation::arrow_mono(
            ARROW,
            AxDerivation::inter_l1(ty("A"), ty("C")),
            AxDerivation::omega_r(ty("B"), ty("Omega")),
        );
        round_trip(&m, &s);
    }

    #[test]
    fn prover_output_translates() {
        let s = sig();
        for text in [
            "(C -> A) /\\ (C -> B) |- C -> A /\\ B",
            "A, B |- A",
            "|- Omega -> Omega",
            "(A * B) /\\ (C * D) |- (A /\\ C) * (B /\\ D)",
            "X /\\ (Y /\\ Z), Z |- Z /\\ X",
        ] {
            let q = Sequent::parse(text, &s).unwrap();
            let d = prove(&q, &s).unwrap().unwrap();
            let ax = isc_to_ax(&d, &s).unwrap();
            check_ax(&ax, &s).unwrap();
            assert_eq!(ax.lhs, big_inter(&q.context, &s).unwrap());
            assert_eq!(ax.rhs, q.goal);
        }
    }

    #[test]
    fn weakening_gives_projection() {
        let s = sig();
        let q = Sequent::parse("A, B |- A", &s).unwrap();
        let d = prove(&q, &s).unwrap().unwrap();
        let ax = isc_to_ax(&d, &s).unwrap();
        assert_eq!(ax.rule, AxRule::InterL1);
    }

    #[test]
    fn arrow_inversion() {
        let s = sig();
        let r = inversion_arrow(&[ty("C"), ty("C")], &[ty("A"), ty("B")], &ty("C"), &ty("A /\\ B"), &s).unwrap();
        assert_eq!(r.selected, vec![0, 1]);
        for d in r.domains.iter().chain([&r.codomain]) {
            check_ax(d, &s).unwrap();
        }
        assert_eq!(r.codomain.lhs, ty("A /\\ B"));
        let r = inversion_arrow(&[ty("X")], &[ty("Y")], &ty("X"), &ty("Y"), &s).unwrap();
        assert_eq!(r.selected, vec![0]);
        assert_eq!(
            inversion_arrow(&[ty("X")], &[ty("Y")], &ty("Z"), &ty("Y"), &s),
            Err(AxError::NotDerivable)
        );
        let r = inversion_arrow(&[], &[], &ty("X"), &ty("Omega"), &s).unwrap();
        assert!(r.selected.is_empty());
        check_ax(&r.codomain, &s).unwrap();
    }

    #[test]
    fn product_inversion() {
        let s = sig();
        let r = inversion_product(
            &[ty("A"), ty("C")],
            &[ty("B"), ty("D")],
            &ty("A /\\ C"),
            &ty("B /\\ D"),
            &s,
        )
        .unwrap();
        check_ax(&r.first, &s).unwrap();
        check_ax(&r.second, &s).unwrap();
        assert_eq!((&r.first.lhs, &r.first.rhs), (&ty("A /\\ C"), &ty("A /\\ C")));
        assert_eq!((&r.second.lhs, &r.second.rhs), (&ty("B /\\ D"), &ty("B /\\ D")));
        let r = inversion_product(&[ty("A"), ty("X")], &[ty("B"), ty("Y")], &ty("A"), &ty("Omega"), &s).unwrap();
        assert_eq!(r.first.lhs, ty("A /\\ X"));
        assert_eq!(
            inversion_product(&[ty("X")], &[ty("Y")], &ty("Y"), &ty("Y"), &s),
            Err(AxError::NotDerivable)
        );
    }

    #[test]
    fn unary_constructors() {
        let mut s = sig();
        s.declare(ConstructorDecl::new("k", 0, 1, Width::One)).unwrap();
        let k = |t: &str| Type::constr("k", vec![], vec![ty(t)]);
        round_trip(&AxDerivation::unary_distrib("k", ty("A"), ty("B")), &s);
        round_trip(
            &AxDerivation::unary_mono("k", AxDerivation::inter_l1(ty("A"), ty("B"))),
            &s,
        );
        // the derived constr rule: k(A1) ∩ k(A2) ∩ k(A3) ≤ k(A1 ∩ A2)
        let q = Sequent::new(vec![k("A"), k("B"), k("C")], k("A /\\ B"));
        let d = prove(&q, &s).unwrap().unwrap();
        let ax = isc_to_ax(&d, &s).unwrap();
        check_ax(&ax, &s).unwrap();
        assert!(ax.node_count() > 1);
    }

    #[test]
    fn unsupported() {
        let mut s = sig();
        s.declare(ConstructorDecl::new("f", 1, 1, Width::One)).unwrap();
        let q = Sequent::parse("f(X; Y) |- f(X; Y)", &s).unwrap();
        let d = prove(&q, &s).unwrap().unwrap();
        assert!(matches!(isc_to_ax(&d, &s), Err(AxError::UnsupportedSignature(_))));
        let mut s = sig();
        s.add_order("X", "Y").unwrap();
        assert!(matches!(
            isc_to_ax(&derive_ax(&ty("X")), &s),
            Err(AxError::UnsupportedSignature(_))
        ));
    }

    #[test]
    fn generator_is_checkable_and_deterministic() {
        let s = sig();
        for seed in 0..200 {
            let d = random_ax_derivation(&s, seed, 4);
            check_ax(&d, &s).unwrap();
            assert_eq!(d, random_ax_derivation(&s, seed, 4));
        }
        assert_eq!(random_ax_derivation(&s, 0, 0).depth(), 1);
    }

    #[test]
    fn text_round_trip() {
        let mut s = sig();
        let d = random_ax_derivation(&s, 7, 4);
        for compact in [false, true] {
            let back = AxDerivation::from_text(&d.to_text(compact), &mut s, Undeclared::Reject).unwrap();
            assert_eq!(back, d);
        }
    }
}
