//! Conversion of first-order formulas to clause normal form.
//!
//! Pipeline: universal closure, elimination of `<=>` and `=>`, negation
//! normal form, renaming bound variables apart, Skolemization, dropping the
//! universal quantifiers, distribution of `|` over `&`.

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::Formula;
use crate::parser::Problem;
use crate::syntax::{Clause, Literal, Substitution, Term};

/// Supplier of fresh Skolem symbols `sk1, sk2, ...` that skips reserved names.
#[derive(Clone, Debug, Default)]
pub struct SkolemSupply {
    next: usize,
    reserved: BTreeSet<String>,
}

impl SkolemSupply {
    pub fn new() -> Self {
        Self::default()
    }

    /// A supply that never hands out a symbol already used by `clauses` or
    /// `formulas`.
    pub fn avoiding<'a>(
        clauses: impl IntoIterator<Item = &'a Clause>,
        formulas: impl IntoIterator<Item = &'a Formula>,
    ) -> Self {
        let mut supply = Self::new();
        for c in clauses {
            for l in &c.literals {
                supply.reserve_literal(l);
            }
        }
        for f in formulas {
            supply.reserve_formula(f);
        }
        supply
    }

    pub fn reserve(&mut self, symbol: impl Into<String>) {
        self.reserved.insert(symbol.into());
    }

    fn reserve_term(&mut self, t: &Term) {
        if let Term::App(f, args) = t {
            self.reserved.insert(f.clone());
            args.iter().for_each(|a| self.reserve_term(a));
        }
    }

    pub fn reserve_literal(&mut self, l: &Literal) {
        self.reserved.insert(l.predicate.clone());
        l.args.iter().for_each(|a| self.reserve_term(a));
    }

    pub fn reserve_formula(&mut self, f: &Formula) {
        let mut terms = Vec::new();
        f.visit(&mut |g| {
            if let Formula::Atom(p, args) = g {
                terms.push(Term::App(p.clone(), args.clone()));
            }
        });
        terms.iter().for_each(|t| self.reserve_term(t));
    }

    pub fn fresh(&mut self) -> String {
        loop {
            self.next += 1;
            let name = format!("sk{}", self.next);
            if self.reserved.insert(name.clone()) {
                return name;
            }
        }
    }
}

/// Clausifier carrying the Skolem supply shared by all formulas of a problem.
#[derive(Clone, Debug, Default)]
pub struct Clausifier {
    supply: SkolemSupply,
}

impl Clausifier {
    pub fn new(supply: SkolemSupply) -> Self {
        Clausifier { supply }
    }

    pub fn supply(&mut self) -> &mut SkolemSupply {
        &mut self.supply
    }

    pub fn into_supply(self) -> SkolemSupply {
        self.supply
    }

    /// Clause normal form of `f`; free variables are read universally.
    pub fn clausify(&mut self, f: &Formula) -> Vec<Vec<Literal>> {
        self.supply.reserve_formula(f);
        let closed = f.free_vars().into_iter().rev().fold(f.clone(), |acc, v| Formula::forall(v, acc));
        let nnf = to_nnf(&eliminate_arrows(&closed), true);
        let mut used = BTreeSet::new();
        let apart = rename_bound(&nnf, &BTreeMap::new(), &mut used);
        let skolemized = self.skolemize(&apart, &mut Vec::new());
        distribute(&skolemized).into_iter().map(|c| tidy_names(&c)).collect()
    }

    fn skolemize(&mut self, f: &Formula, universals: &mut Vec<String>) -> Formula {
        match f {
            Formula::Atom(..) => f.clone(),
            Formula::Not(a) => Formula::not(self.skolemize(a, universals)),
            Formula::And(a, b) => {
                let a = self.skolemize(a, universals);
                Formula::and(a, self.skolemize(b, universals))
            }
            Formula::Or(a, b) => {
                let a = self.skolemize(a, universals);
                Formula::or(a, self.skolemize(b, universals))
            }
            Formula::ForAll(v, body) => {
                universals.push(v.clone());
                let body = self.skolemize(body, universals);
                universals.pop();
                Formula::forall(v.clone(), body)
            }
            Formula::Exists(v, body) => {
                let witness = Term::app(self.supply.fresh(), universals.iter().map(Term::var).collect());
                let subst: Substitution = [(v.clone(), witness)].into_iter().collect();
                self.skolemize(&substitute(body, &subst), universals)
            }
            Formula::Implies(..) | Formula::Iff(..) => unreachable!("arrows eliminated before Skolemization"),
        }
    }

    /// Input clauses of a problem: its clauses, then its clausified axioms,
    /// then the clausified negation of the conjunction of its conjectures.
    pub fn problem_clauses(&mut self, problem: &Problem) -> Vec<Clause> {
        for c in &problem.clauses {
            c.literals.iter().for_each(|l| self.supply.reserve_literal(l));
        }
        for nf in &problem.formulas {
            self.supply.reserve_formula(&nf.formula);
        }
        let mut out: Vec<Clause> = problem.clauses.clone();
        for nf in problem.axioms() {
            let parts = self.clausify(&nf.formula);
            push_named(&mut out, &nf.name, parts);
        }
        if let Some(goal) = Formula::conjunction(problem.conjectures().map(|nf| nf.formula.clone())) {
            let parts = self.clausify(&Formula::not(goal));
            push_named(&mut out, "negated_conjecture", parts);
        }
        for (k, c) in out.iter_mut().enumerate() {
            c.id = crate::syntax::ClauseId(k);
        }
        out
    }
}

fn push_named(out: &mut Vec<Clause>, name: &str, parts: Vec<Vec<Literal>>) {
    let single = parts.len() == 1;
    for (k, literals) in parts.into_iter().enumerate() {
        let name = if single { name.to_string() } else { format!("{name}_{}", k + 1) };
        out.push(Clause::input(out.len(), name, literals));
    }
}

/// Clausifies one formula with a supply that avoids the formula's own symbols.
pub fn clausify(f: &Formula) -> Vec<Vec<Literal>> {
    Clausifier::default().clausify(f)
}

/// Input clauses for a problem using a fresh clausifier.
pub fn problem_clauses(problem: &Problem) -> Vec<Clause> {
    Clausifier::default().problem_clauses(problem)
}

fn eliminate_arrows(f: &Formula) -> Formula {
    match f {
        Formula::Atom(..) => f.clone(),
        Formula::Not(a) => Formula::not(eliminate_arrows(a)),
        Formula::And(a, b) => Formula::and(eliminate_arrows(a), eliminate_arrows(b)),
        Formula::Or(a, b) => Formula::or(eliminate_arrows(a), eliminate_arrows(b)),
        Formula::Implies(a, b) => Formula::or(Formula::not(eliminate_arrows(a)), eliminate_arrows(b)),
        Formula::Iff(a, b) => {
            let (a, b) = (eliminate_arrows(a), eliminate_arrows(b));
            Formula::and(Formula::or(Formula::not(a.clone()), b.clone()), Formula::or(a, Formula::not(b)))
        }
        Formula::ForAll(v, body) => Formula::forall(v.clone(), eliminate_arrows(body)),
        Formula::Exists(v, body) => Formula::exists(v.clone(), eliminate_arrows(body)),
    }
}

/// Negation normal form of an arrow-free formula; `positive` is the polarity.
fn to_nnf(f: &Formula, positive: bool) -> Formula {
    match f {
        Formula::Atom(..) => {
            if positive {
                f.clone()
            } else {
                Formula::not(f.clone())
            }
        }
        Formula::Not(a) => to_nnf(a, !positive),
        Formula::And(a, b) if positive => Formula::and(to_nnf(a, true), to_nnf(b, true)),
        Formula::And(a, b) => Formula::or(to_nnf(a, false), to_nnf(b, false)),
        Formula::Or(a, b) if positive => Formula::or(to_nnf(a, true), to_nnf(b, true)),
        Formula::Or(a, b) => Formula::and(to_nnf(a, false), to_nnf(b, false)),
        Formula::ForAll(v, body) if positive => Formula::forall(v.clone(), to_nnf(body, true)),
        Formula::ForAll(v, body) => Formula::exists(v.clone(), to_nnf(body, false)),
        Formula::Exists(v, body) if positive => Formula::exists(v.clone(), to_nnf(body, true)),
        Formula::Exists(v, body) => Formula::forall(v.clone(), to_nnf(body, false)),
        Formula::Implies(..) | Formula::Iff(..) => unreachable!("arrows eliminated before NNF"),
    }
}

/// Gives every quantifier its own variable name. The first binder of a name
/// keeps it; later ones get `_k` suffixes.
fn rename_bound(f: &Formula, scope: &BTreeMap<String, String>, used: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| a.rename(scope)).collect()),
        Formula::Not(a) => Formula::not(rename_bound(a, scope, used)),
        Formula::And(a, b) => {
            let a = rename_bound(a, scope, used);
            Formula::and(a, rename_bound(b, scope, used))
        }
        Formula::Or(a, b) => {
            let a = rename_bound(a, scope, used);
            Formula::or(a, rename_bound(b, scope, used))
        }
        Formula::ForAll(v, body) | Formula::Exists(v, body) => {
            let fresh = if used.contains(v) {
                (1..).map(|k| format!("{v}_{k}")).find(|c| !used.contains(c)).expect("unbounded supply")
            } else {
                v.clone()
            };
            used.insert(fresh.clone());
            let mut inner = scope.clone();
            inner.insert(v.clone(), fresh.clone());
            let body = rename_bound(body, &inner, used);
            if matches!(f, Formula::ForAll(..)) {
                Formula::forall(fresh, body)
            } else {
                Formula::exists(fresh, body)
            }
        }
        Formula::Implies(..) | Formula::Iff(..) => unreachable!("arrows eliminated before renaming"),
    }
}

/// Applies a substitution to free occurrences; bound variables are distinct
/// from the substituted ones after renaming apart.
fn substitute(f: &Formula, subst: &Substitution) -> Formula {
    match f {
        Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| a.apply(subst)).collect()),
        Formula::Not(a) => Formula::not(substitute(a, subst)),
        Formula::And(a, b) => Formula::and(substitute(a, subst), substitute(b, subst)),
        Formula::Or(a, b) => Formula::or(substitute(a, subst), substitute(b, subst)),
        Formula::Implies(a, b) => Formula::implies(substitute(a, subst), substitute(b, subst)),
        Formula::Iff(a, b) => Formula::iff(substitute(a, subst), substitute(b, subst)),
        Formula::ForAll(v, body) => Formula::forall(v.clone(), substitute(body, subst)),
        Formula::Exists(v, body) => Formula::exists(v.clone(), substitute(body, subst)),
    }
}

/// CNF of a Skolemized NNF formula, universal quantifiers dropped.
fn distribute(f: &Formula) -> Vec<Vec<Literal>> {
    match f {
        Formula::Atom(p, args) => vec![vec![Literal::pos(p.clone(), args.clone())]],
        Formula::Not(a) => match &**a {
            Formula::Atom(p, args) => vec![vec![Literal::neg(p.clone(), args.clone())]],
            _ => unreachable!("NNF negates atoms only"),
        },
        Formula::And(a, b) => {
            let mut out = distribute(a);
            out.extend(distribute(b));
            out
        }
        Formula::Or(a, b) => {
            let (left, right) = (distribute(a), distribute(b));
            let mut out = Vec::with_capacity(left.len() * right.len());
            for l in &left {
                for r in &right {
                    out.push(l.iter().chain(r).cloned().collect());
                }
            }
            out
        }
        Formula::ForAll(_, body) => distribute(body),
        Formula::Exists(..) | Formula::Implies(..) | Formula::Iff(..) => unreachable!("not in Skolem NNF"),
    }
}

/// Strips `_k` suffixes added while renaming apart when the base name is
/// free in the clause.
fn tidy_names(literals: &[Literal]) -> Vec<Literal> {
    let mut vars = Vec::new();
    literals.iter().for_each(|l| l.collect_vars(&mut vars));
    let mut taken: BTreeSet<String> = vars.iter().map(|v| v.to_string()).collect();
    let mut map = BTreeMap::new();
    for v in &vars {
        if let Some((base, suffix)) = v.rsplit_once('_') {
            if !base.is_empty() && suffix.chars().all(|c| c.is_ascii_digit()) && !taken.contains(base) {
                taken.remove(*v);
                taken.insert(base.to_string());
                map.insert(v.to_string(), base.to_string());
            }
        }
    }
    literals.iter().map(|l| l.rename(&map)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::syntax::{equal_up_to_renaming, literals_text};

    fn texts(f: &str) -> Vec<String> {
        clausify(&parse_formula(f).unwrap()).iter().map(|c| literals_text(c)).collect()
    }

    #[test]
    fn deducibility_definition() {
        assert_eq!(texts("![X]: (bew(X) <=> ?[Y]: b(Y, X))"), vec!["~bew(X) | b(sk1(X),X)", "bew(X) | ~b(Y,X)"]);
    }

    #[test]
    fn free_variables_are_universal() {
        assert_eq!(texts("bew(X) <=> ?[Y]: b(Y, X)"), texts("![X]: (bew(X) <=> ?[Y]: b(Y, X))"));
    }

    #[test]
    fn induction_rule_consequence() {
        assert_eq!(texts("(![X]: bew(r(X))) => bew(forall_r)"), vec!["~bew(r(sk1)) | bew(forall_r)"]);
    }

    #[test]
    fn already_clausal() {
        assert_eq!(texts("p & ~p"), vec!["p", "~p"]);
    }

    #[test]
    fn specialization_form() {
        let cs = clausify(&parse_formula("bew(forall_r) => ![X]: bew(r(X))").unwrap());
        assert_eq!(cs.len(), 1);
        let expected = crate::parser::parse_clause_text("~bew(forall_r) | bew(r(Y))").unwrap();
        assert!(equal_up_to_renaming(&cs[0], &expected));
    }

    #[test]
    fn skolem_symbols_avoid_problem_symbols() {
        assert_eq!(texts("?[X]: p(X, sk1)"), vec!["p(sk2,sk1)"]);
    }

    #[test]
    fn skolem_arguments_are_enclosing_universals() {
        assert_eq!(texts("![X]: ![Y]: ?[Z]: p(X, Y, Z)"), vec!["p(X,Y,sk1(X,Y))"]);
        assert_eq!(texts("?[Z]: ![X]: p(X, Z)"), vec!["p(X,sk1)"]);
    }

    #[test]
    fn reused_binder_names_are_separated() {
        assert_eq!(texts("(![X]: p(X)) | (![X]: q(X))"), vec!["p(X) | q(X_1)"]);
    }

    #[test]
    fn distribution() {
        assert_eq!(texts("(a & b) | (c & d)"), vec!["a | c", "a | d", "b | c", "b | d"]);
    }

    #[test]
    fn shared_supply_numbers_left_to_right() {
        let mut cl = Clausifier::default();
        let a = cl.clausify(&parse_formula("?[X]: p(X)").unwrap());
        let b = cl.clausify(&parse_formula("?[X]: q(X)").unwrap());
        assert_eq!(literals_text(&a[0]), "p(sk1)");
        assert_eq!(literals_text(&b[0]), "q(sk2)");
    }
}
