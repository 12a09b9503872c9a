//! Binary resolution and factoring, subsumption, the given-clause loop and
//! proof traces.

mod saturate;
mod trace;

pub use saturate::{prove_by_refutation, saturate, Bound, SaturationConfig, SaturationResult, SaturationStats};
pub use trace::{verify_trace, ProofTrace, TraceDocument, TraceError, TraceOutcome, VerifyError};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::syntax::{normalize_variables, Clause, ClauseId, Literal, Provenance, Substitution};
use crate::unify::{apart_map, match_literal, mgu_atoms, UnifyError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("literal position {position} out of range for clause {clause} of length {len}")]
    Position { clause: ClauseId, position: usize, len: usize },
    #[error("literals {0} and {1} are not complementary")]
    NotComplementary(String, String),
    #[error("literals {0} and {1} differ in sign or predicate")]
    NotFactorable(String, String),
    #[error("factoring needs two distinct positions")]
    SamePosition,
    #[error(transparent)]
    Unify(#[from] UnifyError),
}

/// A derived clause that has not been given an id yet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inference {
    pub literals: Vec<Literal>,
    pub provenance: Provenance,
}

impl Inference {
    pub fn into_clause(self, id: ClauseId) -> Clause {
        Clause::new(id, self.literals, self.provenance)
    }
}

fn literal_at(c: &Clause, position: usize) -> Result<&Literal, InferenceError> {
    c.literals.get(position).ok_or(InferenceError::Position { clause: c.id, position, len: c.len() })
}

/// Resolves literal `i` of `c1` against literal `j` of `c2`.
///
/// Variables of `c2` that clash with `c1` are renamed apart first (see
/// [`crate::unify::rename_apart`]); the recorded substitution is the mgu of the
/// two atoms after that renaming. The resolvent keeps the remaining literals of
/// `c1` followed by those of `c2`, with variables renamed canonically.
pub fn resolve(c1: &Clause, i: usize, c2: &Clause, j: usize) -> Result<Inference, InferenceError> {
    literal_at(c1, i)?;
    literal_at(c2, j)?;
    let map = apart_map(&c1.literals, &c2.literals);
    let right: Vec<Literal> = c2.literals.iter().map(|l| l.rename(&map)).collect();
    let (a, b) = (&c1.literals[i], &right[j]);
    if a.positive == b.positive || a.predicate != b.predicate {
        return Err(InferenceError::NotComplementary(a.to_string(), b.to_string()));
    }
    let sigma = mgu_atoms(a, b)?;
    let rest: Vec<Literal> = c1
        .literals
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i)
        .chain(right.iter().enumerate().filter(|&(k, _)| k != j))
        .map(|(_, l)| l.apply(&sigma))
        .collect();
    Ok(Inference {
        literals: normalize_variables(&rest),
        provenance: Provenance::Resolvent { parents: [c1.id, c2.id], positions: [i, j], substitution: sigma },
    })
}

/// Unifies literals `i` and `j` of `c` and drops literal `j` from the instance.
pub fn factor(c: &Clause, i: usize, j: usize) -> Result<Inference, InferenceError> {
    let (a, b) = (literal_at(c, i)?, literal_at(c, j)?);
    if i == j {
        return Err(InferenceError::SamePosition);
    }
    if a.positive != b.positive || a.predicate != b.predicate {
        return Err(InferenceError::NotFactorable(a.to_string(), b.to_string()));
    }
    let sigma = mgu_atoms(a, b)?;
    let rest: Vec<Literal> =
        c.literals.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, l)| l.apply(&sigma)).collect();
    Ok(Inference {
        literals: normalize_variables(&rest),
        provenance: Provenance::Factor { parent: c.id, positions: [i, j], substitution: sigma },
    })
}

/// All resolvents between `c1` and `c2` over every complementary position pair.
pub fn resolvents(c1: &Clause, c2: &Clause) -> Vec<Inference> {
    let mut out = Vec::new();
    for (i, a) in c1.literals.iter().enumerate() {
        for (j, b) in c2.literals.iter().enumerate() {
            if a.positive != b.positive && a.predicate == b.predicate {
                if let Ok(inf) = resolve(c1, i, c2, j) {
                    out.push(inf);
                }
            }
        }
    }
    out
}

/// All binary factors of `c`.
pub fn factors(c: &Clause) -> Vec<Inference> {
    let mut out = Vec::new();
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            if let Ok(inf) = factor(c, i, j) {
                out.push(inf);
            }
        }
    }
    out
}

/// True iff some substitution maps `general` onto a sub-multiset of `specific`.
/// Variables of `specific` are treated as constants.
pub fn subsumes(general: &[Literal], specific: &[Literal]) -> bool {
    if general.len() > specific.len() {
        return false;
    }
    let mut used = vec![false; specific.len()];
    subsume_from(general, specific, 0, &mut used, &mut BTreeMap::new())
}

fn subsume_from(
    general: &[Literal],
    specific: &[Literal],
    k: usize,
    used: &mut [bool],
    subst: &mut BTreeMap<String, crate::syntax::Term>,
) -> bool {
    if k == general.len() {
        return true;
    }
    for m in 0..specific.len() {
        if used[m] {
            continue;
        }
        let snapshot = subst.clone();
        if match_literal(&general[k], &specific[m], subst) {
            used[m] = true;
            if subsume_from(general, specific, k + 1, used, subst) {
                return true;
            }
            used[m] = false;
        }
        *subst = snapshot;
    }
    false
}

/// The recorded substitution of an inference, if any.
pub fn substitution_of(p: &Provenance) -> Option<&Substitution> {
    match p {
        Provenance::Input(_) => None,
        Provenance::Resolvent { substitution, .. } | Provenance::Factor { substitution, .. } => Some(substitution),
    }
}
