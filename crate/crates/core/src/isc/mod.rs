//! Cut-free sequent calculus for intersection subtyping.
//!
//! ```text
//!   Γ, Δ ⊢ C                Γ ⊢ A   Γ ⊢ B           Γ, A, B, Δ ⊢ C
//! ------------------ wk     -------------- interR    ---------------- interL
//! Γ, κ(A;B), Δ ⊢ C            Γ ⊢ A ∩ B              Γ, A ∩ B, Δ ⊢ C
//!
//!   Ai ⊢ Ai^j  (i ≤ ar-, j ≤ k)    Bi^1, ..., Bi^k ⊢ Bi  (i ≤ ar+)    ω(κ) ≤ k
//! ------------------------------------------------------------------------- constr
//!           κ1(A^1; B^1), ..., κk(A^k; B^k) ⊢ κ(A; B)        κj ≼ κ
//! ```
//!
//! Every node stores its conclusion so that checking is local. Exchange,
//! general weakening, identity, intersection-left inversion, contraction and
//! cut are admissible and provided in [`admissible`] as transformations that
//! produce primitive derivations.

pub mod admissible;
pub mod inversion;
pub mod oracle;
pub mod prover;

use std::fmt;

use thiserror::Error;

use crate::sexpr;
use crate::syntax::{parse_sequent_with, print_sequent, Undeclared};
use crate::types::{Signature, Type, TypeError};

pub use admissible::{derive_ax, derive_contract, derive_cut, derive_exchange, derive_interl_e, derive_weaken_gen};
pub use inversion::{invert_constr, invert_derivation, InversionWitness};
pub use oracle::{prove_exhaustive, Search};
pub use prover::{decide_with, prove, Mutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IscError {
    #[error("rule violation at {}: {description}", fmt_path(.path))]
    RuleViolation { path: Vec<usize>, description: String },
    #[error("not a permutation of the context")]
    BadPermutation,
    #[error("context position {0} does not hold an intersection")]
    PositionNotIntersection(usize),
    #[error("context positions {0} and {0}+1 do not hold equal types")]
    NotDuplicated(usize),
    #[error("context position {0} is out of range")]
    PositionOutOfRange(usize),
    #[error("cut formula does not match the context at position {0}")]
    CutFormulaMismatch(usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("sequent is not derivable")]
    NotDerivable,
    #[error(transparent)]
    Type(#[from] TypeError),
}

pub(crate) fn fmt_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// `Γ ⊢ C` with Γ an ordered list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequent {
    pub context: Vec<Type>,
    pub goal: Type,
}

impl Sequent {
    pub fn new(context: Vec<Type>, goal: Type) -> Sequent {
        Sequent { context, goal }
    }

    pub fn single(lhs: Type, rhs: Type) -> Sequent {
        Sequent::new(vec![lhs], rhs)
    }

    pub fn validate(&self, sig: &Signature) -> Result<(), TypeError> {
        self.context.iter().try_for_each(|t| t.validate(sig))?;
        self.goal.validate(sig)
    }

    pub fn parse(text: &str, sig: &Signature) -> Result<Sequent, TypeError> {
        let mut sig = sig.clone();
        Sequent::parse_with(text, &mut sig, Undeclared::Reject)
    }

    pub fn parse_with(text: &str, sig: &mut Signature, mode: Undeclared) -> Result<Sequent, TypeError> {
        let (context, goal) = parse_sequent_with(text, sig, mode)?;
        Ok(Sequent { context, goal })
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_sequent(&self.context, &self.goal))
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// Drops the constructor-rooted type at `pos` of the conclusion context.
    Wk { pos: usize, premise: Box<IscDerivation> },
    InterR {
        left: Box<IscDerivation>,
        right: Box<IscDerivation>,
    },
    /// Splits the intersection at `pos` of the conclusion context.
    InterL { pos: usize, premise: Box<IscDerivation> },
    /// `contra[i][j]` concludes `Ai ⊢ Ai^j`; `co[i]` concludes `Bi^1..Bi^k ⊢ Bi`.
    Constr {
        contra: Vec<Vec<IscDerivation>>,
        co: Vec<IscDerivation>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IscDerivation {
    conclusion: Sequent,
    rule: Rule,
    height: usize,
}

impl IscDerivation {
    pub fn conclusion(&self) -> &Sequent {
        &self.conclusion
    }

    pub fn context(&self) -> &[Type] {
        &self.conclusion.context
    }

    pub fn goal(&self) -> &Type {
        &self.conclusion.goal
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    /// Leaves have height 1.
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn premises(&self) -> Vec<&IscDerivation> {
        match &self.rule {
            Rule::Wk { premise, .. } | Rule::InterL { premise, .. } => vec![premise],
            Rule::InterR { left, right } => vec![left, right],
            Rule::Constr { contra, co } => contra.iter().flatten().chain(co).collect(),
        }
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        1 + self.premises().iter().map(|p| p.node_count()).sum::<usize>()
    }

    pub fn tag(&self) -> &'static str {
        match self.rule {
            Rule::Wk { .. } => "wk",
            Rule::InterR { .. } => "interR",
            Rule::InterL { .. } => "interL",
            Rule::Constr { .. } => "constr",
        }
    }

    /// Builds a node with an explicit conclusion; nothing is checked.
    pub fn from_parts(conclusion: Sequent, rule: Rule) -> IscDerivation {
        let height = 1 + match &rule {
            Rule::Wk { premise, .. } | Rule::InterL { premise, .. } => premise.height,
            Rule::InterR { left, right } => left.height.max(right.height),
            Rule::Constr { contra, co } => contra.iter().flatten().chain(co).map(|d| d.height).max().unwrap_or(0),
        };
        IscDerivation {
            conclusion,
            rule,
            height,
        }
    }

    /// `wk` inserting `dropped` at `pos` of the premise context.
    pub fn wk(pos: usize, dropped: Type, premise: IscDerivation) -> IscDerivation {
        let mut context = premise.context().to_vec();
        context.insert(pos, dropped);
        let goal = premise.goal().clone();
        IscDerivation::from_parts(
            Sequent::new(context, goal),
            Rule::Wk {
                pos,
                premise: Box::new(premise),
            },
        )
    }

    pub fn inter_r(left: IscDerivation, right: IscDerivation) -> IscDerivation {
        debug_assert_eq!(left.context(), right.context());
        let conclusion = Sequent::new(
            left.context().to_vec(),
            Type::inter(left.goal().clone(), right.goal().clone()),
        );
        IscDerivation::from_parts(
            conclusion,
            Rule::InterR {
                left: Box::new(left),
                right: Box::new(right),
            },
        )
    }

    /// `interL` merging premise positions `pos` and `pos + 1`.
    pub fn inter_l(pos: usize, premise: IscDerivation) -> IscDerivation {
        let mut context = premise.context().to_vec();
        let b = context.remove(pos + 1);
        let a = context.remove(pos);
        context.insert(pos, Type::inter(a, b));
        let goal = premise.goal().clone();
        IscDerivation::from_parts(
            Sequent::new(context, goal),
            Rule::InterL {
                pos,
                premise: Box::new(premise),
            },
        )
    }

    pub fn constr(
        context: Vec<Type>,
        goal: Type,
        contra: Vec<Vec<IscDerivation>>,
        co: Vec<IscDerivation>,
    ) -> IscDerivation {
        IscDerivation::from_parts(Sequent::new(context, goal), Rule::Constr { contra, co })
    }

    /// Whether the tree only uses the four primitive rules. Always true for
    /// values of this type; kept as an explicit structural scan for tests.
    pub fn is_cut_free(&self) -> bool {
        self.premises().iter().all(|p| p.is_cut_free())
    }

    pub fn to_sexpr(&self) -> sexpr::Node {
        let args = match &self.rule {
            Rule::Wk { pos, .. } | Rule::InterL { pos, .. } => vec![pos.to_string()],
            _ => vec![],
        };
        sexpr::Node::new(
            self.tag(),
            args,
            self.conclusion.to_string(),
            self.premises().into_iter().map(|p| p.to_sexpr()).collect(),
        )
    }

    pub fn to_text(&self, compact: bool) -> String {
        self.to_sexpr().render(compact)
    }

    /// Reads the text form; the result is not checked.
    pub fn from_text(text: &str, sig: &mut Signature, mode: Undeclared) -> Result<IscDerivation, IscError> {
        let node = sexpr::parse(text)?;
        IscDerivation::from_sexpr(&node, sig, mode)
    }

    pub fn from_sexpr(node: &sexpr::Node, sig: &mut Signature, mode: Undeclared) -> Result<IscDerivation, IscError> {
        let conclusion = Sequent::parse_with(&node.conclusion, sig, mode)?;
        let bad = |msg: &str| IscError::RuleViolation {
            path: vec![],
            description: format!("malformed `{}` node: {msg}", node.tag),
        };
        let pos_arg = || -> Result<usize, IscError> {
            match node.args.as_slice() {
                [p] => p.parse().map_err(|_| bad("position must be a number")),
                _ => Err(bad("expected one position argument")),
            }
        };
        let mut kids = node
            .children
            .iter()
            .map(|c| IscDerivation::from_sexpr(c, sig, mode))
            .collect::<Result<Vec<_>, _>>()?;
        let rule = match node.tag.as_str() {
            "wk" | "interL" => {
                let pos = pos_arg()?;
                if kids.len() != 1 {
                    return Err(bad("expected one premise"));
                }
                let premise = Box::new(kids.pop().unwrap());
                if node.tag == "wk" {
                    Rule::Wk { pos, premise }
                } else {
                    Rule::InterL { pos, premise }
                }
            }
            "interR" => {
                if kids.len() != 2 || !node.args.is_empty() {
                    return Err(bad("expected two premises"));
                }
                let right = Box::new(kids.pop().unwrap());
                let left = Box::new(kids.pop().unwrap());
                Rule::InterR { left, right }
            }
            "constr" => {
                let Type::Constr { head, .. } = &conclusion.goal else {
                    return Err(bad("goal must be constructor-rooted"));
                };
                let decl = sig.get(head)?;
                let k = conclusion.context.len();
                let (convar, covar) = (decl.convar, decl.covar);
                if kids.len() != convar * k + covar || !node.args.is_empty() {
                    return Err(bad("wrong number of premises"));
                }
                let co = kids.split_off(convar * k);
                let mut contra = Vec::with_capacity(convar);
                let mut it = kids.into_iter();
                for _ in 0..convar {
                    contra.push(it.by_ref().take(k).collect());
                }
                Rule::Constr { contra, co }
            }
            other => return Err(bad(&format!("unknown tag `{other}`"))),
        };
        Ok(IscDerivation::from_parts(conclusion, rule))
    }
}

/// Checks every node against its rule schema, reporting the first bad node.
pub fn check_isc(d: &IscDerivation, sig: &Signature) -> Result<(), IscError> {
    let mut path = Vec::new();
    check_node(d, sig, &mut path)
}

fn check_node(d: &IscDerivation, sig: &Signature, path: &mut Vec<usize>) -> Result<(), IscError> {
    let fail = |path: &[usize], msg: String| IscError::RuleViolation {
        path: path.to_vec(),
        description: msg,
    };
    d.conclusion
        .validate(sig)
        .map_err(|e| fail(path, format!("ill-formed conclusion {}: {e}", d.conclusion)))?;
    let ctx = d.context();
    let goal = d.goal();
    match &d.rule {
        Rule::Wk { pos, premise } => {
            let dropped = ctx
                .get(*pos)
                .ok_or_else(|| fail(path, format!("wk position {pos} out of range")))?;
            if dropped.is_inter() {
                return Err(fail(path, "wk may only drop a constructor-rooted type".into()));
            }
            let mut expect = ctx.to_vec();
            expect.remove(*pos);
            expect_conclusion(premise, &expect, goal, path, 0)?;
        }
        Rule::InterR { left, right } => {
            let Some((a, b)) = goal.as_inter() else {
                return Err(fail(path, "interR needs an intersection goal".into()));
            };
            expect_conclusion(left, ctx, a, path, 0)?;
            expect_conclusion(right, ctx, b, path, 1)?;
        }
        Rule::InterL { pos, premise } => {
            let Some((a, b)) = ctx.get(*pos).and_then(Type::as_inter) else {
                return Err(fail(
                    path,
                    format!("interL position {pos} does not hold an intersection"),
                ));
            };
            let mut expect = ctx[..*pos].to_vec();
            expect.push(a.clone());
            expect.push(b.clone());
            expect.extend_from_slice(&ctx[pos + 1..]);
            expect_conclusion(premise, &expect, goal, path, 0)?;
        }
        Rule::Constr { contra, co } => {
            let Type::Constr {
                head,
                contra: goal_contra,
                co: goal_co,
            } = goal
            else {
                return Err(fail(path, "constr needs a constructor-rooted goal".into()));
            };
            let decl = sig.get(head).map_err(|e| fail(path, e.to_string()))?;
            let k = ctx.len();
            if decl.width.as_usize() > k {
                return Err(fail(
                    path,
                    format!("side condition ω({head}) = {} ≤ k = {k} fails", decl.width.as_usize()),
                ));
            }
            let mut ante_contra = Vec::with_capacity(k);
            let mut ante_co = Vec::with_capacity(k);
            for (j, t) in ctx.iter().enumerate() {
                match t {
                    Type::Constr { head: h, contra, co } => {
                        if !sig.below(h, head) {
                            return Err(fail(path, format!("antecedent {j} has head `{h}` not below `{head}`")));
                        }
                        if contra.len() != goal_contra.len() || co.len() != goal_co.len() {
                            return Err(fail(path, format!("antecedent {j} has mismatched arity")));
                        }
                        ante_contra.push(contra);
                        ante_co.push(co);
                    }
                    Type::Inter(..) => {
                        return Err(fail(path, format!("antecedent {j} is an intersection")));
                    }
                }
            }
            if contra.len() != goal_contra.len() || contra.iter().any(|row| row.len() != k) {
                return Err(fail(path, "contravariant premise matrix has the wrong shape".into()));
            }
            if co.len() != goal_co.len() {
                return Err(fail(path, "wrong number of covariant premises".into()));
            }
            let mut child = 0;
            for (i, row) in contra.iter().enumerate() {
                for (j, p) in row.iter().enumerate() {
                    expect_conclusion(p, &[goal_contra[i].clone()], &ante_contra[j][i], path, child)?;
                    child += 1;
                }
            }
            for (i, p) in co.iter().enumerate() {
                let expect: Vec<Type> = ante_co.iter().map(|c| c[i].clone()).collect();
                expect_conclusion(p, &expect, &goal_co[i], path, child)?;
                child += 1;
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

fn expect_conclusion(
    premise: &IscDerivation,
    ctx: &[Type],
    goal: &Type,
    path: &[usize],
    child: usize,
) -> Result<(), IscError> {
    if premise.context() == ctx && premise.goal() == goal {
        return Ok(());
    }
    let mut p = path.to_vec();
    p.push(child);
    Err(IscError::RuleViolation {
        path: p,
        description: format!(
            "premise concludes {} but the rule requires {}",
            premise.conclusion,
            Sequent::new(ctx.to_vec(), goal.clone())
        ),
    })
}
