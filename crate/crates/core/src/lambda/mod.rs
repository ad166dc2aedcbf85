//! λ-terms with pairs, typed with intersections, a top type and subsumption
//! whose subtyping evidence is an ISC derivation.
//!
//! ```text
//!  x:A ∈ Γ          Γ ⊢ t:A   A ⊢ B        Γ ⊢ t:A   Γ ⊢ t:B               A top-like
//! --------- var     ---------------- leq   ------------------ inter   ----------- omega
//! Γ ⊢ x:A              Γ ⊢ t:B               Γ ⊢ t:A∩B                 Γ ⊢ t:A
//!
//!  Γ,y:A ⊢ t[y/x]:B        Γ ⊢ t:A→B   Γ ⊢ u:A      Γ ⊢ t:A   Γ ⊢ u:B      Γ ⊢ t:A×B   Γ ⊢ t:A×B
//! ------------------ abs   ------------------ app   ------------------ pair  ---------   ---------
//!  Γ ⊢ λx.t : A→B             Γ ⊢ t u : B          Γ ⊢ <t,u> : A×B        Γ ⊢ fst t:A  Γ ⊢ snd t:B
//! ```
//!
//! The `abs` premise may use any binder name `y` not already bound in Γ.

pub mod preservation;
pub mod term;
pub mod transform;
pub mod typing;

use thiserror::Error;

use crate::isc::{fmt_path, IscError};
use crate::types::TypeError;

pub use preservation::{decompose_substitution, subject_expansion, subject_reduction, Expansion, RedexInfo};
pub use term::{beta_step, parse_path, pi_step, print_term, reduce_at, RedexKind, Term};
pub use transform::{
    generation_abs, generation_app, generation_pair, generation_proj1, generation_proj2, generation_var,
    strengthen_typing, substitute_typing, transport, weaken_typing, Generation, GenerationItem,
};
pub use typing::{check_typing, Context, Judgement, TypingDerivation, TypingRule};

/// Convenience alias for [`Term::find_redexes`].
pub fn find_redexes(t: &Term) -> Vec<(Vec<usize>, RedexKind)> {
    t.find_redexes()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LambdaError {
    #[error("rule violation at {}: {description}", fmt_path(.path))]
    RuleViolation { path: Vec<usize>, description: String },
    #[error("no witness for variable `{0}`")]
    MissingWitness(String),
    #[error("variable `{0}` occurs free in the subject")]
    VariableOccurs(String),
    #[error("no redex of the requested kind at {}", fmt_path(.0))]
    NotARedex(Vec<usize>),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Isc(#[from] IscError),
    #[error(transparent)]
    Type(#[from] TypeError),
}
