//! Browser bindings for the subtyping toolkit.
//!
//! Each operation takes plain strings and returns a JSON document, so the
//! page never needs to know the Rust types. The `*_json` functions are the
//! native entry points; the `#[wasm_bindgen]` wrappers only forward to them.

use intersub::axiomatic::{isc_to_ax, AxError};
use intersub::harness::{run_difftest, GenConfig};
use intersub::isc::{invert_constr, prove};
use intersub::syntax::parse_signature;
use intersub::{IscDerivation, IscError, Sequent, Signature, Type, Undeclared};
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

#[derive(Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Answer<T> {
    Ok(T),
    /// The input was well formed and the answer is negative.
    No {
        message: String,
    },
    Error {
        message: String,
    },
}

#[derive(Debug, Serialize)]
pub struct Proof {
    pub sequent: String,
    pub derivation: String,
    /// Absent when the signature has no axiomatic counterpart.
    pub axiomatic: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Premise {
    pub sequent: String,
    pub derivation: String,
}

#[derive(Debug, Serialize)]
pub struct Inversion {
    pub head: String,
    pub family: Vec<String>,
    pub selected: Vec<usize>,
    pub premises: Vec<Premise>,
}

#[derive(Debug, Serialize)]
pub struct Difftest {
    pub passed: bool,
    pub text: String,
}

fn to_json<T: Serialize>(a: &Answer<T>) -> String {
    serde_json::to_string(a).expect("answers serialize")
}

fn error<T>(e: impl std::fmt::Display) -> Answer<T> {
    Answer::Error { message: e.to_string() }
}

/// An empty signature text means the arrow/product instance with base types
/// declared on first use.
fn setup(sig: &str, input: &str) -> Result<(Signature, Sequent), String> {
    let (mut sig, mode) = if sig.trim().is_empty() {
        (Signature::arrow_product([]), Undeclared::DeclareAtoms)
    } else {
        (
            parse_signature(sig).map_err(|e| format!("signature: {e}"))?,
            Undeclared::Reject,
        )
    };
    let s = Sequent::parse_with(input, &mut sig, mode).map_err(|e| e.to_string())?;
    Ok((sig, s))
}

fn text(d: &IscDerivation) -> String {
    d.to_text(false).trim_end().to_string()
}

pub fn prove_json(sig: &str, input: &str) -> String {
    let answer = match setup(sig, input) {
        Err(e) => error(e),
        Ok((sig, s)) => match prove(&s, &sig) {
            Err(e) => error(e),
            Ok(None) => Answer::No {
                message: format!("not derivable: {s}"),
            },
            Ok(Some(d)) => match isc_to_ax(&d, &sig) {
                Err(AxError::UnsupportedSignature(_)) => Answer::Ok(Proof {
                    sequent: s.to_string(),
                    derivation: text(&d),
                    axiomatic: None,
                }),
                Err(e) => error(e),
                Ok(a) => Answer::Ok(Proof {
                    sequent: s.to_string(),
                    derivation: text(&d),
                    axiomatic: Some(a.to_text(false).trim_end().to_string()),
                }),
            },
        },
    };
    to_json(&answer)
}

fn flatten(t: &Type, out: &mut Vec<Type>) {
    match t {
        Type::Inter(a, b) => {
            flatten(a, out);
            flatten(b, out);
        }
        _ => out.push(t.clone()),
    }
}

/// Splits every hypothesis into its conjuncts, drops top, and inverts the
/// resulting homogeneous sequent on the goal's constructor.
pub fn invert_json(sig: &str, input: &str) -> String {
    let answer = match setup(sig, input) {
        Err(e) => error(e),
        Ok((sig, s)) => {
            let mut family = Vec::new();
            for t in &s.context {
                flatten(t, &mut family);
            }
            let top = sig.top_type().ok();
            family.retain(|t| Some(t) != top.as_ref());
            let seq = Sequent::new(family.clone(), s.goal.clone());
            match invert_constr(&seq, &sig) {
                Err(IscError::NotDerivable) => Answer::No {
                    message: format!("not derivable: {s}"),
                },
                Err(e) => error(e),
                Ok(w) => {
                    let premises = w
                        .contra
                        .iter()
                        .flatten()
                        .chain(&w.co)
                        .map(|d| Premise {
                            sequent: d.conclusion().to_string(),
                            derivation: text(d),
                        })
                        .collect();
                    Answer::Ok(Inversion {
                        head: w.head,
                        family: family.iter().map(Type::to_string).collect(),
                        selected: w.selected,
                        premises,
                    })
                }
            }
        }
    };
    to_json(&answer)
}

/// Runs the randomized cross-checks over the default signature.
pub fn difftest_json(seed: u64, cases: usize, max_type_size: usize) -> String {
    let cfg = GenConfig {
        seed,
        cases: cases.clamp(1, 2000),
        max_type_size: max_type_size.clamp(1, 8),
        ..GenConfig::default()
    };
    let report = run_difftest(&cfg);
    to_json(&Answer::Ok(Difftest {
        passed: report.passed(),
        text: report.to_text(),
    }))
}

#[wasm_bindgen]
pub fn prove_sequent(sig: &str, input: &str) -> String {
    prove_json(sig, input)
}

#[wasm_bindgen]
pub fn invert_sequent(sig: &str, input: &str) -> String {
    invert_json(sig, input)
}

#[wasm_bindgen]
pub fn difftest(seed: u32, cases: u32, max_type_size: u32) -> String {
    difftest_json(seed.into(), cases as usize, max_type_size as usize)
}
