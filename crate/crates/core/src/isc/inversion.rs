//! Inversion for sequents whose context holds only atoms below the goal head.
//!
//! Such a sequent can only end in `wk` or `constr`, so peeling the `wk`
//! steps off a derivation exposes the `constr` node together with the
//! indices of the context atoms it kept.

use super::{prove, IscDerivation, IscError, Rule, Sequent};
use crate::types::{Signature, Type};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InversionWitness {
    pub head: String,
    /// Strictly increasing 0-based indices into the inverted context.
    pub selected: Vec<usize>,
    /// `contra[i][q]` concludes `Ai ⊢ Ai^{selected[q]}`.
    pub contra: Vec<Vec<IscDerivation>>,
    /// `co[i]` concludes `Bi^{selected[0]}, ... ⊢ Bi`.
    pub co: Vec<IscDerivation>,
}

impl InversionWitness {
    /// Rebuilds a derivation of `s` from the witness: one `constr` over the
    /// selected atoms, then `wk` for every other position.
    pub fn reassemble(&self, s: &Sequent) -> IscDerivation {
        let kept = self.selected.iter().map(|&j| s.context[j].clone()).collect();
        let mut d = IscDerivation::constr(kept, s.goal.clone(), self.contra.clone(), self.co.clone());
        for (j, t) in s.context.iter().enumerate() {
            if !self.selected.contains(&j) {
                d = IscDerivation::wk(j, t.clone(), d);
            }
        }
        d
    }
}

fn check_homogeneous(s: &Sequent, sig: &Signature) -> Result<String, IscError> {
    let Type::Constr { head, .. } = &s.goal else {
        return Err(IscError::PreconditionViolated("goal is an intersection".into()));
    };
    for (j, t) in s.context.iter().enumerate() {
        match t.head() {
            Some(h) if sig.below(h, head) => {}
            _ => {
                return Err(IscError::PreconditionViolated(format!(
                    "context entry {j} is not headed by a constructor below `{head}`"
                )))
            }
        }
    }
    Ok(head.clone())
}

/// Extracts the witness from a derivation of a homogeneous sequent.
pub fn invert_derivation(d: &IscDerivation, sig: &Signature) -> Result<InversionWitness, IscError> {
    let head = check_homogeneous(d.conclusion(), sig)?;
    // original context index of every position of the current node
    let mut origin: Vec<usize> = (0..d.context().len()).collect();
    let mut node = d;
    loop {
        match node.rule() {
            Rule::Wk { pos, premise } => {
                origin.remove(*pos);
                node = premise;
            }
            Rule::Constr { contra, co } => {
                return Ok(InversionWitness {
                    head,
                    selected: origin,
                    contra: contra.clone(),
                    co: co.clone(),
                })
            }
            _ => {
                return Err(IscError::PreconditionViolated(
                    "derivation uses intersection rules on a homogeneous sequent".into(),
                ))
            }
        }
    }
}

/// Decides `s` and, when derivable, returns its inversion witness.
pub fn invert_constr(s: &Sequent, sig: &Signature) -> Result<InversionWitness, IscError> {
    check_homogeneous(s, sig)?;
    let d = prove(s, sig)?.ok_or(IscError::NotDerivable)?;
    invert_derivation(&d, sig)
}
