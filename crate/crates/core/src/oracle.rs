//! Brute-force ground reasoning: truth tables, Herbrand grounding and
//! checking of finite model certificates.
//!
//! Everything here works by exhaustive enumeration and shares no code with
//! the resolution engine, so it can be used to cross-check it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::formula::Formula;
use crate::syntax::{literals_text, Clause, Literal, Substitution, Term};

/// Largest number of distinct atoms a truth table may range over.
pub const ATOM_BUDGET: usize = 24;
/// Default cap on the number of ground clause instances.
pub const INSTANCE_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("truth table over {atoms} atoms exceeds the budget of {budget}")]
    AtomBudget { atoms: usize, budget: usize },
    #[error("grounding would produce {instances} instances, budget is {budget}")]
    InstanceBudget { instances: u128, budget: usize },
    #[error("formula is not quantifier-free: {0}")]
    Quantified(String),
    #[error("model has no rule for predicate `{0}`")]
    MissingRule(String),
    #[error("model rule for `{predicate}` inspects argument {index}, but the predicate has arity {arity}")]
    RuleIndex { predicate: String, index: usize, arity: usize },
}

/// Decision rule over the ground argument tuple of one predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    False,
    True,
    /// Argument `index` (0-based) has head symbol `functor`.
    HeadIs {
        index: usize,
        functor: String,
    },
    And(Box<Rule>, Box<Rule>),
    Or(Box<Rule>, Box<Rule>),
    Not(Box<Rule>),
}

impl Rule {
    pub fn eval(&self, args: &[Term]) -> bool {
        match self {
            Rule::False => false,
            Rule::True => true,
            Rule::HeadIs { index, functor } => args.get(*index).and_then(Term::head) == Some(functor.as_str()),
            Rule::And(a, b) => a.eval(args) && b.eval(args),
            Rule::Or(a, b) => a.eval(args) || b.eval(args),
            Rule::Not(a) => !a.eval(args),
        }
    }

    fn max_index(&self) -> Option<usize> {
        match self {
            Rule::False | Rule::True => None,
            Rule::HeadIs { index, .. } => Some(*index),
            Rule::And(a, b) | Rule::Or(a, b) => a.max_index().max(b.max_index()),
            Rule::Not(a) => a.max_index(),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::False => f.write_str("false"),
            Rule::True => f.write_str("true"),
            Rule::HeadIs { index, functor } => write!(f, "head({index}, {functor})"),
            Rule::And(a, b) => write!(f, "({a} & {b})"),
            Rule::Or(a, b) => write!(f, "({a} | {b})"),
            Rule::Not(a) => write!(f, "~{a}"),
        }
    }
}

/// A finite symbolic model: one decision rule per predicate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interpretation {
    rules: BTreeMap<String, Rule>,
}

impl Interpretation {
    pub fn from_rules(rules: BTreeMap<String, Rule>) -> Self {
        Interpretation { rules }
    }

    /// Every listed predicate is false everywhere.
    pub fn all_false<'a>(predicates: impl IntoIterator<Item = &'a str>) -> Self {
        Interpretation { rules: predicates.into_iter().map(|p| (p.to_string(), Rule::False)).collect() }
    }

    pub fn with_rule(mut self, predicate: impl Into<String>, rule: Rule) -> Self {
        self.rules.insert(predicate.into(), rule);
        self
    }

    pub fn rule(&self, predicate: &str) -> Option<&Rule> {
        self.rules.get(predicate)
    }

    pub fn holds(&self, lit: &Literal) -> Option<bool> {
        self.rules.get(&lit.predicate).map(|r| r.eval(&lit.args) == lit.positive)
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, r) in &self.rules {
            writeln!(f, "model({p}, {r}).")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelVerdict {
    Satisfied { instances: usize },
    Violated { clause: String, instance: Vec<Literal> },
}

impl ModelVerdict {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, ModelVerdict::Satisfied { .. })
    }
}

impl fmt::Display for ModelVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelVerdict::Satisfied { instances } => write!(f, "satisfied ({instances} ground instances)"),
            ModelVerdict::Violated { clause, instance } => {
                write!(f, "violated by instance `{}` of {clause}", literals_text(instance))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// truth tables

#[derive(Debug)]
enum Prop {
    Var(usize),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Implies(Box<Prop>, Box<Prop>),
    Iff(Box<Prop>, Box<Prop>),
}

impl Prop {
    fn eval(&self, row: u64) -> bool {
        match self {
            Prop::Var(k) => row >> k & 1 == 1,
            Prop::Not(a) => !a.eval(row),
            Prop::And(a, b) => a.eval(row) && b.eval(row),
            Prop::Or(a, b) => a.eval(row) || b.eval(row),
            Prop::Implies(a, b) => !a.eval(row) || b.eval(row),
            Prop::Iff(a, b) => a.eval(row) == b.eval(row),
        }
    }
}

#[derive(Default)]
struct AtomTable {
    index: HashMap<(String, Vec<Term>), usize>,
}

impl AtomTable {
    fn id(&mut self, pred: &str, args: &[Term]) -> usize {
        let next = self.index.len();
        *self.index.entry((pred.to_string(), args.to_vec())).or_insert(next)
    }

    fn len(&self) -> usize {
        self.index.len()
    }

    fn compile(&mut self, f: &Formula) -> Result<Prop, OracleError> {
        let bin = |t: &mut Self, a: &Formula, b: &Formula| -> Result<(Box<Prop>, Box<Prop>), OracleError> {
            Ok((Box::new(t.compile(a)?), Box::new(t.compile(b)?)))
        };
        Ok(match f {
            Formula::Atom(p, args) => Prop::Var(self.id(p, args)),
            Formula::Not(a) => Prop::Not(Box::new(self.compile(a)?)),
            Formula::And(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Prop::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Prop::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Prop::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Prop::Iff(a, b)
            }
            Formula::ForAll(..) | Formula::Exists(..) => return Err(OracleError::Quantified(f.to_string())),
        })
    }

    fn rows(&self) -> Result<u64, OracleError> {
        if self.len() > ATOM_BUDGET {
            return Err(OracleError::AtomBudget { atoms: self.len(), budget: ATOM_BUDGET });
        }
        Ok(1u64 << self.len())
    }
}

/// True iff the two quantifier-free formulas agree on every assignment to
/// their atoms. Each distinct atom is one propositional variable.
pub fn propositional_equiv(f1: &Formula, f2: &Formula) -> Result<bool, OracleError> {
    let mut table = AtomTable::default();
    let a = table.compile(f1)?;
    let b = table.compile(f2)?;
    let rows = table.rows()?;
    Ok((0..rows).all(|row| a.eval(row) == b.eval(row)))
}

pub fn satisfiable(f: &Formula) -> Result<bool, OracleError> {
    let mut table = AtomTable::default();
    let a = table.compile(f)?;
    Ok((0..table.rows()?).any(|row| a.eval(row)))
}

pub fn valid(f: &Formula) -> Result<bool, OracleError> {
    let mut table = AtomTable::default();
    let a = table.compile(f)?;
    Ok((0..table.rows()?).all(|row| a.eval(row)))
}

type CompiledClause = Vec<(usize, bool)>;

fn compile_clauses(table: &mut AtomTable, clauses: &[&[Literal]]) -> Vec<CompiledClause> {
    clauses.iter().map(|c| c.iter().map(|l| (table.id(&l.predicate, &l.args), l.positive)).collect()).collect()
}

fn clause_true(c: &CompiledClause, row: u64) -> bool {
    c.iter().any(|&(k, pos)| (row >> k & 1 == 1) == pos)
}

/// Truth-table satisfiability of a set of clauses read propositionally.
pub fn clauses_satisfiable(clauses: &[&[Literal]]) -> Result<bool, OracleError> {
    let mut table = AtomTable::default();
    let compiled = compile_clauses(&mut table, clauses);
    Ok((0..table.rows()?).any(|row| compiled.iter().all(|c| clause_true(c, row))))
}

/// Every assignment satisfying all premises satisfies the conclusion.
pub fn entails(premises: &[&[Literal]], conclusion: &[Literal]) -> Result<bool, OracleError> {
    let mut table = AtomTable::default();
    let prem = compile_clauses(&mut table, premises);
    let concl = compile_clauses(&mut table, &[conclusion]).pop().expect("one clause");
    Ok((0..table.rows()?).all(|row| !prem.iter().all(|c| clause_true(c, row)) || clause_true(&concl, row)))
}

// ---------------------------------------------------------------------------
// Herbrand grounding

/// Ground terms of height at most `depth` over the functors occurring in
/// `clauses`. A constant is injected when the signature has none.
pub fn herbrand_universe(clauses: &[Clause], depth: usize, budget: usize) -> Result<Vec<Term>, OracleError> {
    let mut functors = BTreeMap::new();
    for c in clauses {
        for l in &c.literals {
            l.args.iter().for_each(|a| a.collect_functors(&mut functors));
        }
    }
    let mut universe: Vec<Term> =
        functors.iter().filter(|(_, &n)| n == 0).map(|(f, _)| Term::constant(f.clone())).collect();
    if universe.is_empty() {
        let fresh = (0..)
            .map(|k| if k == 0 { "c".to_string() } else { format!("c{k}") })
            .find(|c| !functors.contains_key(c))
            .expect("unbounded supply");
        universe.push(Term::constant(fresh));
    }
    let compound: Vec<(&String, usize)> = functors.iter().filter(|(_, &n)| n > 0).map(|(f, &n)| (f, n)).collect();
    let mut seen: BTreeSet<Term> = universe.iter().cloned().collect();
    for _ in 0..depth {
        let previous = universe.clone();
        for &(f, arity) in &compound {
            let count = (previous.len() as u128).saturating_pow(arity as u32);
            if count + universe.len() as u128 > budget as u128 {
                return Err(OracleError::InstanceBudget { instances: count + universe.len() as u128, budget });
            }
            let _ = for_each_tuple(&previous, arity, &mut |args| {
                let t = Term::app(f.clone(), args.to_vec());
                if seen.insert(t.clone()) {
                    universe.push(t);
                }
                ControlFlow::Continue(())
            });
        }
    }
    Ok(universe)
}

fn for_each_tuple(pool: &[Term], arity: usize, f: &mut impl FnMut(&[Term]) -> ControlFlow<()>) -> ControlFlow<()> {
    if pool.is_empty() && arity > 0 {
        return ControlFlow::Continue(());
    }
    let mut idx = vec![0usize; arity];
    let mut tuple: Vec<Term> = idx.iter().map(|&k| pool[k].clone()).collect();
    loop {
        f(&tuple)?;
        // odometer, last position fastest
        let mut pos = arity;
        loop {
            if pos == 0 {
                return ControlFlow::Continue(());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < pool.len() {
                tuple[pos] = pool[idx[pos]].clone();
                break;
            }
            idx[pos] = 0;
            tuple[pos] = pool[0].clone();
        }
    }
}

fn instance_count(clauses: &[Clause], universe: usize) -> u128 {
    clauses.iter().map(|c| (universe as u128).saturating_pow(c.vars().len() as u32)).fold(0u128, u128::saturating_add)
}

fn for_each_instance(
    clauses: &[Clause],
    universe: &[Term],
    f: &mut impl FnMut(&Clause, Vec<Literal>) -> ControlFlow<()>,
) -> ControlFlow<()> {
    for c in clauses {
        let vars: Vec<String> = c.vars().into_iter().map(str::to_string).collect();
        for_each_tuple(universe, vars.len(), &mut |tuple| {
            let subst: Substitution = vars.iter().cloned().zip(tuple.iter().cloned()).collect();
            f(c, c.literals.iter().map(|l| l.apply(&subst)).collect())
        })?;
    }
    ControlFlow::Continue(())
}

/// All instances of the clauses with variables replaced by ground terms of
/// height at most `depth`. Each instance keeps the id and provenance of the
/// clause it came from.
pub fn ground_instances(clauses: &[Clause], depth: usize, budget: usize) -> Result<Vec<Clause>, OracleError> {
    let universe = herbrand_universe(clauses, depth, budget)?;
    let count = instance_count(clauses, universe.len());
    if count > budget as u128 {
        return Err(OracleError::InstanceBudget { instances: count, budget });
    }
    let mut out = Vec::with_capacity(count as usize);
    let _ = for_each_instance(clauses, &universe, &mut |c, literals| {
        out.push(Clause::new(c.id, literals, c.provenance.clone()));
        ControlFlow::Continue(())
    });
    Ok(out)
}

/// Evaluates every ground instance at `depth` under `model` and reports the
/// first violated instance, if any.
///
/// Rules that only inspect head symbols give the same verdict at every depth
/// at least 1 deeper than the deepest head they test; other rules make the
/// verdict depth-specific.
pub fn check_model(model: &Interpretation, clauses: &[Clause], depth: usize) -> Result<ModelVerdict, OracleError> {
    check_model_with_budget(model, clauses, depth, INSTANCE_BUDGET)
}

pub fn check_model_with_budget(
    model: &Interpretation,
    clauses: &[Clause],
    depth: usize,
    budget: usize,
) -> Result<ModelVerdict, OracleError> {
    for c in clauses {
        for l in &c.literals {
            let rule = model.rule(&l.predicate).ok_or_else(|| OracleError::MissingRule(l.predicate.clone()))?;
            if let Some(index) = rule.max_index().filter(|&k| k >= l.args.len()) {
                return Err(OracleError::RuleIndex { predicate: l.predicate.clone(), index, arity: l.args.len() });
            }
        }
    }
    let universe = herbrand_universe(clauses, depth, budget)?;
    let count = instance_count(clauses, universe.len());
    if count > budget as u128 {
        return Err(OracleError::InstanceBudget { instances: count, budget });
    }
    let mut checked = 0;
    let mut violation = None;
    let _ = for_each_instance(clauses, &universe, &mut |c, literals| {
        checked += 1;
        if literals.iter().any(|l| model.holds(l) == Some(true)) {
            ControlFlow::Continue(())
        } else {
            let name = c.name().map(str::to_string).unwrap_or_else(|| format!("clause {}", c.id));
            violation = Some(ModelVerdict::Violated { clause: name, instance: literals });
            ControlFlow::Break(())
        }
    });
    Ok(violation.unwrap_or(ModelVerdict::Satisfied { instances: checked }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_clause_text, parse_formula};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn clause(id: usize, text: &str) -> Clause {
        Clause::input(id, format!("c{id}"), parse_clause_text(text).unwrap())
    }

    #[test]
    fn base_and_one_step() {
        assert!(propositional_equiv(&f("p(0) & (p(0) => p(s(0)))"), &f("p(0) & p(s(0))")).unwrap());
    }

    #[test]
    fn atom_versus_negation() {
        assert!(!propositional_equiv(&f("p(0)"), &f("~p(0)")).unwrap());
    }

    #[test]
    fn two_step_expansion() {
        let chain = f("p(0) & (p(0) => p(s(0))) & (p(s(0)) => p(s(s(0))))");
        assert!(propositional_equiv(&chain, &f("p(0) & p(s(0)) & p(s(s(0)))")).unwrap());
    }

    #[test]
    fn quantified_input_rejected() {
        assert!(matches!(propositional_equiv(&f("![X]: p(X)"), &f("p(a)")), Err(OracleError::Quantified(_))));
    }

    #[test]
    fn atom_budget() {
        let wide = Formula::conjunction((0..25).map(|k| Formula::atom(format!("p{k}"), vec![]))).unwrap();
        assert!(matches!(propositional_equiv(&wide, &wide), Err(OracleError::AtomBudget { atoms: 25, .. })));
    }

    #[test]
    fn validity_and_satisfiability() {
        assert!(valid(&f("p | ~p")).unwrap());
        assert!(!satisfiable(&f("p & ~p")).unwrap());
        assert!(propositional_equiv(&f("q | ~q"), &f("p | ~p")).unwrap());
    }

    #[test]
    fn grounding_examples() {
        let cs = vec![clause(0, "p(X)"), clause(1, "q(f(c))")];
        let g1 = ground_instances(&cs[..1], 1, INSTANCE_BUDGET);
        // signature of the first clause alone has no constant: one is injected
        assert_eq!(g1.unwrap().len(), 1);
        let g: Vec<String> = ground_instances(&cs, 1, INSTANCE_BUDGET).unwrap().iter().map(|c| c.text()).collect();
        assert_eq!(g, vec!["p(c)", "p(f(c))", "q(f(c))"]);
        let g0: Vec<String> = ground_instances(&cs, 0, INSTANCE_BUDGET).unwrap().iter().map(|c| c.text()).collect();
        assert_eq!(g0, vec!["p(c)", "q(f(c))"]);
    }

    #[test]
    fn grounding_budget() {
        let cs = vec![clause(0, "p(X,Y,Z) | q(f(a),g(a,a))")];
        let err = ground_instances(&cs, 3, 1000).unwrap_err();
        assert!(matches!(err, OracleError::InstanceBudget { .. }));
    }

    #[test]
    fn entailment_by_table() {
        let a = parse_clause_text("p | q").unwrap();
        let b = parse_clause_text("~p | r").unwrap();
        let r = parse_clause_text("q | r").unwrap();
        assert!(entails(&[&a, &b], &r).unwrap());
        assert!(!entails(&[&a], &r).unwrap());
        assert!(!clauses_satisfiable(&[&parse_clause_text("p").unwrap(), &parse_clause_text("~p").unwrap()]).unwrap());
    }

    #[test]
    fn model_checking() {
        let cs = vec![clause(0, "~p(X) | q(X)"), clause(1, "q(f(a))")];
        let m = Interpretation::all_false(["p"]).with_rule("q", Rule::HeadIs { index: 0, functor: "f".into() });
        assert!(check_model(&m, &cs, 1).unwrap().is_satisfied());
        let bad = Interpretation::all_false(["p", "q"]);
        let v = check_model(&bad, &cs, 1).unwrap();
        assert_eq!(v, ModelVerdict::Violated { clause: "c1".into(), instance: parse_clause_text("q(f(a))").unwrap() });
        assert_eq!(check_model(&Interpretation::all_false(["p"]), &cs, 1), Err(OracleError::MissingRule("q".into())));
        let oob = Interpretation::all_false(["p"]).with_rule("q", Rule::HeadIs { index: 3, functor: "f".into() });
        assert!(matches!(check_model(&oob, &cs, 1), Err(OracleError::RuleIndex { .. })));
    }
}
