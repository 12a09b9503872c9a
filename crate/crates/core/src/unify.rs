//! Syntactic unification with occurs check, one-way matching, and renaming
//! clauses apart.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{Clause, Literal, Substitution, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("symbol clash: {0} vs {1}")]
    Clash(String, String),
    #[error("occurs check: {var} occurs in {term}")]
    Occurs { var: String, term: String },
}

/// Most general unifier of two terms. The result is idempotent. When two
/// variables meet, the lexicographically smaller name becomes the binding key.
pub fn mgu(t1: &Term, t2: &Term) -> Result<Substitution, UnifyError> {
    let mut subst = Substitution::new();
    unify_into(t1, t2, &mut subst)?;
    Ok(subst)
}

/// Unifies two atoms (ignoring sign).
pub fn mgu_atoms(a: &Literal, b: &Literal) -> Result<Substitution, UnifyError> {
    if a.predicate != b.predicate || a.args.len() != b.args.len() {
        return Err(UnifyError::Clash(
            format!("{}/{}", a.predicate, a.args.len()),
            format!("{}/{}", b.predicate, b.args.len()),
        ));
    }
    let mut subst = Substitution::new();
    for (s, t) in a.args.iter().zip(&b.args) {
        unify_into(s, t, &mut subst)?;
    }
    Ok(subst)
}

/// Extends `subst` so that it also unifies `t1` and `t2`.
pub fn unify_into(t1: &Term, t2: &Term, subst: &mut Substitution) -> Result<(), UnifyError> {
    let mut stack = vec![(t1.clone(), t2.clone())];
    while let Some((a, b)) = stack.pop() {
        let a = a.apply(subst);
        let b = b.apply(subst);
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                if x != y {
                    let (key, val) = if x < y { (x, y) } else { (y, x) };
                    subst.bind(&key, Term::Var(val));
                }
            }
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if t.occurs(&x) {
                    return Err(UnifyError::Occurs { var: x, term: t.to_string() });
                }
                subst.bind(&x, t);
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return Err(UnifyError::Clash(format!("{f}/{}", xs.len()), format!("{g}/{}", ys.len())));
                }
                // reversed so pairs are solved left to right
                stack.extend(xs.into_iter().zip(ys).rev());
            }
        }
    }
    Ok(())
}

/// One-way matching: extends `subst` so that `pattern·subst == target`,
/// binding only variables of `pattern`. Variables of `target` are rigid.
pub fn match_term(pattern: &Term, target: &Term, subst: &mut BTreeMap<String, Term>) -> bool {
    match (pattern, target) {
        (Term::Var(v), t) => match subst.get(v) {
            Some(bound) => bound == t,
            None => {
                subst.insert(v.clone(), t.clone());
                true
            }
        },
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(p, t)| match_term(p, t, subst))
        }
        _ => false,
    }
}

pub fn match_literal(pattern: &Literal, target: &Literal, subst: &mut BTreeMap<String, Term>) -> bool {
    pattern.positive == target.positive
        && pattern.predicate == target.predicate
        && pattern.args.len() == target.args.len()
        && pattern.args.iter().zip(&target.args).all(|(p, t)| match_term(p, t, subst))
}

/// Renames the variables of `c2` that also occur in `c1`, so the returned
/// pair is variable-disjoint. `c1` is returned unchanged. A clashing variable
/// `X` becomes `X_k` for the smallest `k ≥ 1` not already in use.
pub fn rename_apart(c1: &Clause, c2: &Clause) -> (Clause, Clause) {
    let map = apart_map(&c1.literals, &c2.literals);
    let renamed = Clause {
        id: c2.id,
        literals: c2.literals.iter().map(|l| l.rename(&map)).collect(),
        provenance: c2.provenance.clone(),
    };
    (c1.clone(), renamed)
}

/// Renaming for the second literal list that makes it disjoint from the first.
pub fn apart_map(first: &[Literal], second: &[Literal]) -> BTreeMap<String, String> {
    let mut left = Vec::new();
    first.iter().for_each(|l| l.collect_vars(&mut left));
    let mut right = Vec::new();
    second.iter().for_each(|l| l.collect_vars(&mut right));
    let mut taken: BTreeSet<String> = left.iter().chain(&right).map(|v| v.to_string()).collect();
    let mut map = BTreeMap::new();
    for v in right {
        if left.contains(&v) {
            let fresh = (1..).map(|k| format!("{v}_{k}")).find(|cand| !taken.contains(cand)).expect("unbounded supply");
            taken.insert(fresh.clone());
            map.insert(v.to_string(), fresh);
        }
    }
    map
}
