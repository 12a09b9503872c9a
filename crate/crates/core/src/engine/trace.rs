//! Proof traces, their JSON form, and an independent step checker.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parser::{parse_clause_text, parse_term, ParseError};
use crate::syntax::{equal_up_to_renaming, literals_text, Clause, ClauseId, Provenance, Substitution};

use super::{factor, resolve, substitution_of};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceOutcome {
    Refutation,
    Saturated,
    ResourceOut,
    /// A derivation of a non-empty target clause.
    Derivation,
}

impl TraceOutcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            TraceOutcome::Refutation => "refutation",
            TraceOutcome::Saturated => "saturated",
            TraceOutcome::ResourceOut => "resource_out",
            TraceOutcome::Derivation => "derivation",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [TraceOutcome::Refutation, TraceOutcome::Saturated, TraceOutcome::ResourceOut, TraceOutcome::Derivation]
            .into_iter()
            .find(|o| o.as_str() == s)
    }
}

/// Derivation steps in topological order, ending at `final_id`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTrace {
    pub steps: Vec<Clause>,
    pub final_id: ClauseId,
    pub outcome: TraceOutcome,
}

impl ProofTrace {
    /// Collects the ancestors of `target` from a clause store indexed by id.
    /// Parents always have smaller ids than children, so ordering by id is
    /// topological.
    pub fn extract(store: &[Clause], target: ClauseId, outcome: TraceOutcome) -> ProofTrace {
        let mut needed = BTreeSet::new();
        let mut stack = vec![target];
        while let Some(id) = stack.pop() {
            if needed.insert(id) {
                stack.extend(store[id.0].provenance.parents());
            }
        }
        ProofTrace { steps: needed.into_iter().map(|id| store[id.0].clone()).collect(), final_id: target, outcome }
    }

    pub fn step(&self, id: ClauseId) -> Option<&Clause> {
        self.steps.iter().find(|c| c.id == id)
    }

    pub fn final_clause(&self) -> Option<&Clause> {
        self.step(self.final_id)
    }

    pub fn to_document(&self, problem: &str) -> TraceDocument {
        TraceDocument {
            problem: problem.to_string(),
            result: self.outcome.as_str().to_string(),
            steps: self.steps.iter().map(TraceStep::from_clause).collect(),
            r#final: self.final_id.0,
        }
    }

    pub fn to_json(&self, problem: &str) -> String {
        self.to_document(problem).to_json()
    }
}

impl fmt::Display for ProofTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.steps.iter().map(|c| c.text().len()).max().unwrap_or(0);
        for c in &self.steps {
            write!(f, "{:>4}. {:<width$}  ", c.id, c.text())?;
            match &c.provenance {
                Provenance::Input(name) => writeln!(f, "[input {name}]")?,
                Provenance::Resolvent { parents, positions, substitution } => writeln!(
                    f,
                    "[resolve {}.{} with {}.{} {}]",
                    parents[0], positions[0], parents[1], positions[1], substitution
                )?,
                Provenance::Factor { parent, positions, substitution } => {
                    writeln!(f, "[factor {}.{},{} {}]", parent, positions[0], positions[1], substitution)?
                }
            }
        }
        Ok(())
    }
}

/// Serialized trace; field order is the on-disk order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub problem: String,
    pub result: String,
    pub steps: Vec<TraceStep>,
    #[serde(rename = "final")]
    pub r#final: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub id: usize,
    pub rule: String,
    pub parents: Vec<usize>,
    pub positions: Vec<usize>,
    pub substitution: BTreeMap<String, String>,
    pub clause: String,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("malformed trace JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("step {id}: {source}")]
    Clause { id: usize, source: ParseError },
    #[error("step {id}: {message}")]
    Shape { id: usize, message: String },
    #[error("unknown result `{0}`")]
    Result(String),
}

impl TraceStep {
    fn from_clause(c: &Clause) -> TraceStep {
        let (rule, parents, positions) = match &c.provenance {
            Provenance::Input(_) => ("input", vec![], vec![]),
            Provenance::Resolvent { parents, positions, .. } => {
                ("resolve", parents.iter().map(|p| p.0).collect(), positions.to_vec())
            }
            Provenance::Factor { parent, positions, .. } => ("factor", vec![parent.0], positions.to_vec()),
        };
        let substitution = substitution_of(&c.provenance)
            .map(|s| s.iter().map(|(v, t)| (v.clone(), t.to_string())).collect())
            .unwrap_or_default();
        TraceStep { id: c.id.0, rule: rule.to_string(), parents, positions, substitution, clause: c.text() }
    }

    fn to_clause(&self) -> Result<Clause, TraceError> {
        let shape = |message: &str| TraceError::Shape { id: self.id, message: message.to_string() };
        let literals = parse_clause_text(&self.clause).map_err(|source| TraceError::Clause { id: self.id, source })?;
        let mut substitution = Substitution::new();
        for (v, t) in &self.substitution {
            let term = parse_term(t).map_err(|source| TraceError::Clause { id: self.id, source })?;
            substitution.insert(v.clone(), term);
        }
        let provenance = match (self.rule.as_str(), self.parents.as_slice(), self.positions.as_slice()) {
            ("input", [], []) if substitution.is_empty() => Provenance::Input(String::new()),
            ("input", ..) => return Err(shape("input step with parents, positions or substitution")),
            ("resolve", &[a, b], &[i, j]) => {
                Provenance::Resolvent { parents: [ClauseId(a), ClauseId(b)], positions: [i, j], substitution }
            }
            ("resolve", ..) => return Err(shape("resolve step needs two parents and two positions")),
            ("factor", &[p], &[i, j]) => Provenance::Factor { parent: ClauseId(p), positions: [i, j], substitution },
            ("factor", ..) => return Err(shape("factor step needs one parent and two positions")),
            (other, ..) => return Err(shape(&format!("unknown rule `{other}`"))),
        };
        Ok(Clause::new(ClauseId(self.id), literals, provenance))
    }
}

impl TraceDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<TraceDocument, TraceError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_trace(&self) -> Result<ProofTrace, TraceError> {
        let outcome = TraceOutcome::parse(&self.result).ok_or_else(|| TraceError::Result(self.result.clone()))?;
        let steps = self.steps.iter().map(TraceStep::to_clause).collect::<Result<Vec<_>, _>>()?;
        Ok(ProofTrace { steps, final_id: ClauseId(self.r#final), outcome })
    }
}

/// Why a trace was rejected, and at which step.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}{reason}", step.map(|s| format!("step {s}: ")).unwrap_or_default())]
pub struct VerifyError {
    pub step: Option<ClauseId>,
    pub reason: String,
}

fn reject(step: Option<ClauseId>, reason: impl Into<String>) -> VerifyError {
    VerifyError { step, reason: reason.into() }
}

/// Re-derives every step of `trace` from its recorded parents, positions and
/// substitution, and checks input steps against `problem` up to renaming.
/// A trace claiming a refutation must end in the empty clause.
pub fn verify_trace(trace: &ProofTrace, problem: &[Clause]) -> Result<(), VerifyError> {
    let mut seen: BTreeMap<ClauseId, &Clause> = BTreeMap::new();
    for step in &trace.steps {
        let at = Some(step.id);
        if seen.contains_key(&step.id) {
            return Err(reject(at, "duplicate step id"));
        }
        let parent = |id: ClauseId| {
            seen.get(&id).copied().ok_or_else(|| reject(at, format!("parent {id} does not precede this step")))
        };
        match &step.provenance {
            Provenance::Input(_) => {
                if !problem.iter().any(|c| equal_up_to_renaming(&c.literals, &step.literals)) {
                    return Err(reject(at, format!("input `{}` is not a problem clause", step.text())));
                }
            }
            Provenance::Resolvent { parents, positions, .. } => {
                let (p1, p2) = (parent(parents[0])?, parent(parents[1])?);
                let redo = resolve(p1, positions[0], p2, positions[1]).map_err(|e| reject(at, e.to_string()))?;
                check_rederived(step, &redo.literals, &redo.provenance)?;
            }
            Provenance::Factor { parent: p, positions, .. } => {
                let p = parent(*p)?;
                let redo = factor(p, positions[0], positions[1]).map_err(|e| reject(at, e.to_string()))?;
                check_rederived(step, &redo.literals, &redo.provenance)?;
            }
        }
        seen.insert(step.id, step);
    }
    if trace.steps.is_empty() {
        return match trace.outcome {
            TraceOutcome::Refutation | TraceOutcome::Derivation => Err(reject(None, "trace has no steps")),
            _ => Ok(()),
        };
    }
    let last =
        seen.get(&trace.final_id).ok_or_else(|| reject(None, format!("final step {} is missing", trace.final_id)))?;
    if trace.outcome == TraceOutcome::Refutation && !last.is_empty() {
        return Err(reject(Some(last.id), format!("refutation ends in non-empty clause `{}`", last.text())));
    }
    Ok(())
}

fn check_rederived(
    step: &Clause,
    literals: &[crate::syntax::Literal],
    provenance: &Provenance,
) -> Result<(), VerifyError> {
    let at = Some(step.id);
    if substitution_of(provenance) != substitution_of(&step.provenance) {
        return Err(reject(
            at,
            format!(
                "recorded substitution {} differs from the unifier {}",
                substitution_of(&step.provenance).expect("inference step"),
                substitution_of(provenance).expect("inference step")
            ),
        ));
    }
    if literals != step.literals.as_slice() {
        return Err(reject(
            at,
            format!("recorded clause `{}` but the inference yields `{}`", step.text(), literals_text(literals)),
        ));
    }
    Ok(())
}
