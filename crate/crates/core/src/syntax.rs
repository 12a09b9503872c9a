//! First-order syntax: terms, literals, clauses and substitutions.
//!
//! Variables are uppercase-initial identifiers, functors and predicates are
//! lowercase-initial. A constant is a compound term with no arguments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(functor: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(functor.into(), args)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Head functor of a compound term, `None` for a variable.
    pub fn head(&self) -> Option<&str> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn occurs(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::App(_, args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    /// Number of symbol occurrences (functors and variables).
    pub fn weight(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::weight).sum::<usize>(),
        }
    }

    /// Height of the term; constants and variables have height 0.
    pub fn height(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.height() + 1).max().unwrap_or(0),
        }
    }

    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Term::Var(v) => {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn collect_functors(&self, out: &mut BTreeMap<String, usize>) {
        if let Term::App(f, args) = self {
            out.entry(f.clone()).or_insert(args.len());
            args.iter().for_each(|a| a.collect_functors(out));
        }
    }

    pub fn apply(&self, subst: &Substitution) -> Term {
        match self {
            Term::Var(v) => subst.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.apply(subst)).collect()),
        }
    }

    /// Replaces variables by name; variables missing from `map` are kept.
    pub fn rename(&self, map: &BTreeMap<String, String>) -> Term {
        match self {
            Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.rename(map)).collect()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(name, args) => {
                f.write_str(name)?;
                write_args(f, args)
            }
        }
    }
}

pub(crate) fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    f.write_str("(")?;
    for (k, a) in args.iter().enumerate() {
        if k > 0 {
            f.write_str(",")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn new(positive: bool, predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Literal { positive, predicate: predicate.into(), args }
    }

    pub fn pos(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Literal::new(true, predicate, args)
    }

    pub fn neg(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Literal::new(false, predicate, args)
    }

    pub fn negated(&self) -> Literal {
        Literal { positive: !self.positive, ..self.clone() }
    }

    /// Same predicate and arguments, opposite sign.
    pub fn is_complement_of(&self, other: &Literal) -> bool {
        self.positive != other.positive && self.predicate == other.predicate && self.args == other.args
    }

    /// The atom as a term, so that atoms can be unified like terms.
    pub fn atom_term(&self) -> Term {
        Term::App(self.predicate.clone(), self.args.clone())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn weight(&self) -> usize {
        1 + self.args.iter().map(Term::weight).sum::<usize>()
    }

    pub fn apply(&self, subst: &Substitution) -> Literal {
        Literal {
            positive: self.positive,
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| a.apply(subst)).collect(),
        }
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> Literal {
        Literal {
            positive: self.positive,
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| a.rename(map)).collect(),
        }
    }

    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("~")?;
        }
        f.write_str(&self.predicate)?;
        write_args(f, &self.args)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClauseId(pub usize);

impl fmt::Display for ClauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How a clause came to be.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Input(String),
    Resolvent { parents: [ClauseId; 2], positions: [usize; 2], substitution: Substitution },
    Factor { parent: ClauseId, positions: [usize; 2], substitution: Substitution },
}

impl Provenance {
    pub fn parents(&self) -> Vec<ClauseId> {
        match self {
            Provenance::Input(_) => Vec::new(),
            Provenance::Resolvent { parents, .. } => parents.to_vec(),
            Provenance::Factor { parent, .. } => vec![*parent],
        }
    }
}

/// A multiset of literals. Variables are implicitly universally quantified
/// and local to the clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub id: ClauseId,
    pub literals: Vec<Literal>,
    pub provenance: Provenance,
}

impl Clause {
    pub fn new(id: ClauseId, literals: Vec<Literal>, provenance: Provenance) -> Self {
        Clause { id, literals, provenance }
    }

    pub fn input(id: usize, name: impl Into<String>, literals: Vec<Literal>) -> Self {
        Clause::new(ClauseId(id), literals, Provenance::Input(name.into()))
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_ground(&self) -> bool {
        self.literals.iter().all(Literal::is_ground)
    }

    pub fn weight(&self) -> usize {
        self.literals.iter().map(Literal::weight).sum()
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.literals.iter().for_each(|l| l.collect_vars(&mut out));
        out
    }

    pub fn name(&self) -> Option<&str> {
        match &self.provenance {
            Provenance::Input(name) => Some(name),
            _ => None,
        }
    }

    /// Clause text in the problem grammar; the empty clause prints as `$false`.
    pub fn text(&self) -> String {
        literals_text(&self.literals)
    }

    pub fn is_tautology(&self) -> bool {
        is_tautology(&self.literals)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

pub const EMPTY_CLAUSE_TEXT: &str = "$false";

pub fn literals_text(literals: &[Literal]) -> String {
    if literals.is_empty() {
        return EMPTY_CLAUSE_TEXT.to_string();
    }
    literals.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" | ")
}

/// True iff the literals contain some literal together with its exact negation.
pub fn is_tautology(literals: &[Literal]) -> bool {
    literals.iter().enumerate().any(|(k, a)| literals[k + 1..].iter().any(|b| a.is_complement_of(b)))
}

/// True iff a bijective variable renaming turns `a` into `b` as literal multisets.
pub fn equal_up_to_renaming(a: &[Literal], b: &[Literal]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    let mut fwd = BTreeMap::new();
    let mut bwd = BTreeMap::new();
    match_multiset(a, b, 0, &mut used, &mut fwd, &mut bwd)
}

fn match_multiset(
    a: &[Literal],
    b: &[Literal],
    k: usize,
    used: &mut [bool],
    fwd: &mut BTreeMap<String, String>,
    bwd: &mut BTreeMap<String, String>,
) -> bool {
    if k == a.len() {
        return true;
    }
    for m in 0..b.len() {
        if used[m] {
            continue;
        }
        let (saved_fwd, saved_bwd) = (fwd.clone(), bwd.clone());
        if rename_literal(&a[k], &b[m], fwd, bwd) {
            used[m] = true;
            if match_multiset(a, b, k + 1, used, fwd, bwd) {
                return true;
            }
            used[m] = false;
        }
        *fwd = saved_fwd;
        *bwd = saved_bwd;
    }
    false
}

fn rename_literal(
    a: &Literal,
    b: &Literal,
    fwd: &mut BTreeMap<String, String>,
    bwd: &mut BTreeMap<String, String>,
) -> bool {
    a.positive == b.positive
        && a.predicate == b.predicate
        && a.args.len() == b.args.len()
        && a.args.iter().zip(&b.args).all(|(s, t)| rename_term(s, t, fwd, bwd))
}

fn rename_term(a: &Term, b: &Term, fwd: &mut BTreeMap<String, String>, bwd: &mut BTreeMap<String, String>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => match (fwd.get(x), bwd.get(y)) {
            (None, None) => {
                fwd.insert(x.clone(), y.clone());
                bwd.insert(y.clone(), x.clone());
                true
            }
            (Some(y2), Some(x2)) => y2 == y && x2 == x,
            _ => false,
        },
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(s, t)| rename_term(s, t, fwd, bwd))
        }
        _ => false,
    }
}

const CANONICAL_VARS: [&str; 6] = ["X", "Y", "Z", "U", "V", "W"];

/// Canonical variable name for the `k`-th distinct variable of a clause.
pub fn canonical_var(k: usize) -> String {
    let base = CANONICAL_VARS[k % CANONICAL_VARS.len()];
    match k / CANONICAL_VARS.len() {
        0 => base.to_string(),
        round => format!("{base}{round}"),
    }
}

/// Renames variables to `X, Y, Z, U, V, W, X1, ...` in order of first occurrence.
pub fn normalize_variables(literals: &[Literal]) -> Vec<Literal> {
    let mut vars = Vec::new();
    literals.iter().for_each(|l| l.collect_vars(&mut vars));
    let map: BTreeMap<String, String> =
        vars.iter().enumerate().map(|(k, v)| (v.to_string(), canonical_var(k))).collect();
    literals.iter().map(|l| l.rename(&map)).collect()
}

/// Finite map from variable names to terms, kept idempotent by the unifier.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    bindings: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.bindings.iter()
    }

    pub fn domain(&self) -> BTreeSet<&str> {
        self.bindings.keys().map(String::as_str).collect()
    }

    /// Inserts a raw binding without propagating it; see [`Substitution::bind`].
    pub fn insert(&mut self, var: impl Into<String>, term: Term) {
        self.bindings.insert(var.into(), term);
    }

    /// Adds `var ↦ term`, applying the new binding to the existing range so the
    /// result stays idempotent. `var` must not be bound and must not occur in `term`.
    pub fn bind(&mut self, var: &str, term: Term) {
        let single = Substitution::from_iter([(var.to_string(), term.clone())]);
        for t in self.bindings.values_mut() {
            *t = t.apply(&single);
        }
        self.bindings.insert(var.to_string(), term);
    }

    /// `self` followed by `other`: x(self∘other) = (x self) other.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out: BTreeMap<String, Term> = self.bindings.iter().map(|(v, t)| (v.clone(), t.apply(other))).collect();
        for (v, t) in &other.bindings {
            out.entry(v.clone()).or_insert_with(|| t.clone());
        }
        out.retain(|v, t| !matches!(t, Term::Var(w) if w == v));
        Substitution { bindings: out }
    }

    pub fn is_idempotent(&self) -> bool {
        self.bindings.values().all(|t| self.bindings.keys().all(|v| !t.occurs(v)))
    }
}

impl FromIterator<(String, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Self {
        Substitution { bindings: iter.into_iter().collect() }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (v, t)) in self.bindings.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(args: Vec<Term>) -> Literal {
        Literal::pos("p", args)
    }

    fn x() -> Term {
        Term::var("X")
    }

    #[test]
    fn tautology_detection() {
        assert!(is_tautology(&[p(vec![x()]), p(vec![x()]).negated()]));
        let bew_x = Literal::pos("bew", vec![x()]);
        let not_bew = Literal::neg("bew", vec![Term::app("not", vec![x()])]);
        assert!(!is_tautology(&[bew_x, not_bew]));
        assert!(!is_tautology(&[]));
    }

    #[test]
    fn renaming_equivalence() {
        let y = Term::var("Y");
        assert!(equal_up_to_renaming(&[p(vec![x()])], &[p(vec![y.clone()])]));
        let q = |t: Term| Literal::pos("q", vec![t]);
        assert!(!equal_up_to_renaming(&[p(vec![x()]), q(x())], &[p(vec![x()]), q(y.clone())]));
        // order of literals is irrelevant
        assert!(equal_up_to_renaming(&[p(vec![x()]), q(y.clone())], &[q(x()), p(vec![y])]));
    }

    #[test]
    fn renaming_is_bijective() {
        let y = Term::var("Y");
        let a = [p(vec![x(), y.clone()])];
        let b = [p(vec![x(), x()])];
        assert!(!equal_up_to_renaming(&a, &b));
        assert!(!equal_up_to_renaming(&b, &a));
    }

    #[test]
    fn multiset_not_set() {
        let a = [p(vec![x()]), p(vec![x()])];
        let b = [p(vec![x()])];
        assert!(!equal_up_to_renaming(&a, &b));
    }

    #[test]
    fn canonical_names() {
        assert_eq!(canonical_var(0), "X");
        assert_eq!(canonical_var(5), "W");
        assert_eq!(canonical_var(6), "X1");
        let lits = vec![Literal::pos("q", vec![Term::var("B"), Term::var("A"), Term::var("B")])];
        assert_eq!(literals_text(&normalize_variables(&lits)), "q(X,Y,X)");
    }

    #[test]
    fn bind_keeps_idempotence() {
        let mut s = Substitution::new();
        s.bind("X", Term::app("f", vec![Term::var("Y")]));
        s.bind("Y", Term::constant("a"));
        assert!(s.is_idempotent());
        assert_eq!(s.get("X").unwrap().to_string(), "f(a)");
    }

    #[test]
    fn compose_order() {
        let s: Substitution = [("X".to_string(), Term::var("Y"))].into_iter().collect();
        let t: Substitution = [("Y".to_string(), Term::constant("c"))].into_iter().collect();
        let st = s.compose(&t);
        assert_eq!(x().apply(&st), Term::constant("c"));
        assert_eq!(Term::var("Y").apply(&st), Term::constant("c"));
    }

    #[test]
    fn identity_substitution_is_identity() {
        let t = Term::app("f", vec![x(), Term::constant("a")]);
        assert_eq!(t.apply(&Substitution::new()), t);
    }

    #[test]
    fn empty_clause_text() {
        assert_eq!(literals_text(&[]), EMPTY_CLAUSE_TEXT);
    }
}
