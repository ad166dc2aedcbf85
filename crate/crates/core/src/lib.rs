//! Intersection subtyping over generic type constructors.
//!
//! [`isc`] holds a cut-free sequent calculus with a proof-producing decision
//! procedure; [`axiomatic`] the axiomatic presentation with
//! translations both ways; [`lambda`] a λ-calculus with pairs whose typing
//! derivations can be pushed through reduction and expansion. [`harness`]
//! generates random instances of all of these and cross-checks them.

pub mod axiomatic;
pub mod harness;
pub mod isc;
pub mod lambda;
pub mod sexpr;
pub mod syntax;
pub mod types;

pub use isc::{check_isc, IscDerivation, IscError, Sequent};
pub use syntax::{parse_type, print_type, Undeclared};
pub use types::{big_inter, Atom, ConstructorDecl, Signature, Type, TypeError, Width};
