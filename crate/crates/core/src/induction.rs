//! Finite unfolding of induction schemas and the provability-rule clauses
//! built on top of them.

use std::fmt;

use thiserror::Error;

use crate::cnf::{Clausifier, SkolemSupply};
use crate::formula::Formula;
use crate::oracle::{propositional_equiv, OracleError, ATOM_BUDGET};
use crate::syntax::{Clause, ClauseId, Literal, Provenance, Substitution, Term};

/// Deepest unfolding whose equivalence check fits in the truth-table budget.
pub const MAX_CHECK_DEPTH: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InductionError {
    #[error("base term `{0}` is not ground")]
    BaseNotGround(String),
    #[error("step template `{template}` must contain exactly one variable occurrence, found {found}")]
    Hole { template: String, found: usize },
    #[error("equivalence check depth {depth} exceeds {max}")]
    Depth { depth: usize, max: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// A predicate, a ground base term and a one-hole step template such as
/// `s(X)` or `s(s(X))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InductionSchema {
    predicate: String,
    base: Term,
    step: Term,
    hole: String,
}

impl InductionSchema {
    pub fn new(predicate: impl Into<String>, base: Term, step: Term) -> Result<Self, InductionError> {
        if !base.is_ground() {
            return Err(InductionError::BaseNotGround(base.to_string()));
        }
        let mut holes = Vec::new();
        count_var_occurrences(&step, &mut holes);
        if holes.len() != 1 {
            return Err(InductionError::Hole { template: step.to_string(), found: holes.len() });
        }
        let hole = holes.pop().expect("one hole");
        Ok(InductionSchema { predicate: predicate.into(), base, step, hole })
    }

    /// `P`, `0`, `s(X)`.
    pub fn successor(predicate: impl Into<String>) -> Self {
        Self::new(predicate, Term::constant("0"), Term::app("s", vec![Term::var("X")])).expect("well-formed")
    }

    pub fn predicate(&self) -> &str {
        &self.predicate
    }

    pub fn base(&self) -> &Term {
        &self.base
    }

    pub fn step_template(&self) -> &Term {
        &self.step
    }

    pub fn fill(&self, t: &Term) -> Term {
        let s: Substitution = [(self.hole.clone(), t.clone())].into_iter().collect();
        self.step.apply(&s)
    }

    fn holds(&self, t: &Term) -> Formula {
        Formula::atom(self.predicate.clone(), vec![t.clone()])
    }

    /// Domain of `depth + 1` terms: the base and its successive step images.
    pub fn domain(&self, depth: usize) -> Vec<Term> {
        let mut out = Vec::with_capacity(depth + 1);
        out.push(self.base.clone());
        for k in 0..depth {
            let next = self.fill(&out[k]);
            out.push(next);
        }
        out
    }

    /// `P(base) ∧ (P(d0) → P(d1)) ∧ ... ∧ (P(d_{k-1}) → P(d_k))`.
    pub fn premises(&self, depth: usize) -> Formula {
        let domain = self.domain(depth);
        let steps = domain.windows(2).map(|w| Formula::implies(self.holds(&w[0]), self.holds(&w[1])));
        Formula::conjunction(std::iter::once(self.holds(&domain[0])).chain(steps)).expect("non-empty")
    }
}

fn count_var_occurrences(t: &Term, out: &mut Vec<String>) {
    match t {
        Term::Var(v) => out.push(v.clone()),
        Term::App(_, args) => args.iter().for_each(|a| count_var_occurrences(a, out)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub depth: usize,
    pub domain: Vec<Term>,
    pub conjunction: Formula,
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let domain: Vec<String> = self.domain.iter().map(Term::to_string).collect();
        writeln!(f, "depth: {}", self.depth)?;
        writeln!(f, "domain: {{{}}}", domain.join(", "))?;
        write!(f, "expansion: {}", self.conjunction)
    }
}

pub fn expand(schema: &InductionSchema, depth: usize) -> Expansion {
    let domain = schema.domain(depth);
    let conjunction = Formula::conjunction(domain.iter().map(|t| schema.holds(t))).expect("non-empty domain");
    Expansion { depth, domain, conjunction }
}

/// Truth-table check that the base case plus `depth` instances of the step
/// implication is equivalent to the conjunction over the generated domain.
pub fn check_expansion_equiv(schema: &InductionSchema, depth: usize) -> Result<bool, InductionError> {
    if depth > MAX_CHECK_DEPTH {
        return Err(InductionError::Depth { depth, max: MAX_CHECK_DEPTH });
    }
    debug_assert!(depth < ATOM_BUDGET);
    Ok(propositional_equiv(&schema.premises(depth), &expand(schema, depth).conjunction)?)
}

/// The constant standing for the code of `(∀x) relation(x)`.
pub fn forall_code(relation: &str) -> Term {
    Term::constant(format!("forall_{relation}"))
}

/// `(∀x) bew(relation(x)) → bew(forall_relation)`.
pub fn omega_formula(relation: &str) -> Formula {
    Formula::implies(
        Formula::forall("X", Formula::atom("bew", vec![Term::app(relation, vec![Term::var("X")])])),
        Formula::atom("bew", vec![forall_code(relation)]),
    )
}

/// `bew(forall_relation) → (∀x) bew(relation(x))`.
pub fn specialization_formula(relation: &str) -> Formula {
    Formula::implies(
        Formula::atom("bew", vec![forall_code(relation)]),
        Formula::forall("X", Formula::atom("bew", vec![Term::app(relation, vec![Term::var("X")])])),
    )
}

/// Clausifies [`omega_formula`], drawing the Skolem constant from `supply`:
/// `~bew(relation(skN)) | bew(forall_relation)`.
pub fn build_omega_clause(relation: &str, supply: &mut SkolemSupply) -> Clause {
    let mut clausifier = Clausifier::new(std::mem::take(supply));
    let mut parts = clausifier.clausify(&omega_formula(relation));
    *supply = clausifier.into_supply();
    debug_assert_eq!(parts.len(), 1);
    Clause::new(ClauseId(0), parts.pop().expect("one clause"), Provenance::Input(format!("omega_{relation}")))
}

/// `~bew(forall_relation) | bew(relation(Y))`.
pub fn build_specialization_clause(relation: &str) -> Clause {
    Clause::new(
        ClauseId(0),
        vec![
            Literal::neg("bew", vec![forall_code(relation)]),
            Literal::pos("bew", vec![Term::app(relation, vec![Term::var("Y")])]),
        ],
        Provenance::Input(format!("specialization_{relation}")),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_clause_text, parse_term};
    use crate::syntax::equal_up_to_renaming;

    fn terms(ts: &[Term]) -> Vec<String> {
        ts.iter().map(Term::to_string).collect()
    }

    #[test]
    fn successor_expansion() {
        let e = expand(&InductionSchema::successor("p"), 2);
        assert_eq!(terms(&e.domain), ["0", "s(0)", "s(s(0))"]);
        assert_eq!(e.conjunction.to_string(), "p(0) & p(s(0)) & p(s(s(0)))");
    }

    #[test]
    fn even_numbers() {
        let even = InductionSchema::new("even", Term::constant("0"), parse_term("s(s(X))").unwrap()).unwrap();
        assert_eq!(terms(&expand(&even, 2).domain), ["0", "s(s(0))", "s(s(s(s(0))))"]);
    }

    #[test]
    fn depth_zero() {
        let e = expand(&InductionSchema::successor("q"), 0);
        assert_eq!(terms(&e.domain), ["0"]);
        assert_eq!(e.conjunction.to_string(), "q(0)");
        assert!(check_expansion_equiv(&InductionSchema::successor("q"), 0).unwrap());
    }

    #[test]
    fn equivalence_small_depths() {
        let s = InductionSchema::successor("p");
        assert!(check_expansion_equiv(&s, 2).unwrap());
        assert!(check_expansion_equiv(&s, 8).unwrap());
    }

    #[test]
    fn depth_limit() {
        let s = InductionSchema::successor("p");
        assert!(matches!(check_expansion_equiv(&s, 21), Err(InductionError::Depth { .. })));
    }

    #[test]
    fn template_validation() {
        assert!(matches!(
            InductionSchema::new("p", Term::constant("0"), parse_term("f(X, X)").unwrap()),
            Err(InductionError::Hole { found: 2, .. })
        ));
        assert!(InductionSchema::new("p", Term::constant("0"), parse_term("s(0)").unwrap()).is_err());
        assert!(matches!(
            InductionSchema::new("p", Term::var("Z"), parse_term("s(X)").unwrap()),
            Err(InductionError::BaseNotGround(_))
        ));
    }

    #[test]
    fn omega_clause() {
        let mut supply = SkolemSupply::new();
        let c = build_omega_clause("r", &mut supply);
        assert_eq!(c.text(), "~bew(r(sk1)) | bew(forall_r)");
        let p = build_omega_clause("p", &mut supply);
        assert_eq!(p.text(), "~bew(p(sk2)) | bew(forall_p)");
    }

    #[test]
    fn omega_clause_avoids_reserved_constants() {
        let mut supply = SkolemSupply::new();
        supply.reserve("sk1");
        assert_eq!(build_omega_clause("r", &mut supply).text(), "~bew(r(sk2)) | bew(forall_r)");
    }

    #[test]
    fn specialization_clause() {
        let c = build_specialization_clause("r");
        assert!(equal_up_to_renaming(&c.literals, &parse_clause_text("~bew(forall_r) | bew(r(Y))").unwrap()));
        let via_cnf = crate::cnf::clausify(&specialization_formula("r"));
        assert_eq!(via_cnf.len(), 1);
        assert!(equal_up_to_renaming(&c.literals, &via_cnf[0]));
        assert_eq!(build_specialization_clause("p").text(), "~bew(forall_p) | bew(p(Y))");
    }
}
