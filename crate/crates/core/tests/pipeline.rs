use resolvere::cnf::problem_clauses;
use resolvere::engine::TraceDocument;
use resolvere::{parse_problem, saturate, verify_trace, SaturationConfig, SaturationResult};

fn prove(text: &str) -> (SaturationResult, Vec<resolvere::Clause>) {
    let problem = parse_problem(text).unwrap();
    let clauses = problem_clauses(&problem);
    (saturate(&clauses, &SaturationConfig::default()), clauses)
}

fn assert_theorem(name: &str, text: &str) {
    let (result, clauses) = prove(text);
    let trace = result.trace().unwrap_or_else(|| panic!("{name}: {result}"));
    verify_trace(trace, &clauses).unwrap();
    let doc = TraceDocument::from_json(&trace.to_json(name)).unwrap();
    assert_eq!(doc.result, "refutation");
    assert_eq!(doc.steps.last().unwrap().clause, "$false");
    verify_trace(&doc.to_trace().unwrap(), &clauses).unwrap();
}

#[test]
fn syllogism() {
    assert_theorem(
        "syllogism",
        "formula(men, axiom, ![X]: (man(X) => mortal(X))).\n\
         formula(socrates, axiom, man(socrates)).\n\
         formula(goal, conjecture, mortal(socrates)).\n",
    );
}

#[test]
fn drinker() {
    assert_theorem("drinker", "formula(goal, conjecture, ?[X]: (d(X) => ![Y]: d(Y))).\n");
}

#[test]
fn quantifier_exchange() {
    assert_theorem("exchange", "formula(goal, conjecture, (?[Y]: ![X]: p(X, Y)) => ![X]: ?[Y]: p(X, Y)).\n");
}

#[test]
fn barber() {
    assert_theorem("barber", "formula(goal, conjecture, ~?[B]: ![X]: (shaves(B, X) <=> ~shaves(X, X))).\n");
}

#[test]
fn transitivity_chain() {
    assert_theorem(
        "chain",
        "clause(trans, ~lt(X,Y) | ~lt(Y,Z) | lt(X,Z)).\n\
         clause(ab, lt(a,b)).\nclause(bc, lt(b,c)).\nclause(cd, lt(c,d)).\n\
         formula(goal, conjecture, lt(a,d)).\n",
    );
}

#[test]
fn pelletier_18_and_factoring() {
    assert_theorem("p18", "formula(goal, conjecture, ?[Y]: ![X]: (f(Y) => f(X))).\n");
    // needs a factor: p(X) | p(Y) with ~p(X) | ~p(Y)
    assert_theorem("factor", "clause(a, p(X) | p(Y)).\nclause(b, ~p(X) | ~p(Y)).\n");
}

#[test]
fn non_theorems_saturate() {
    let (result, _) = prove("formula(a, axiom, ![X]: (p(X) => q(X))).\nformula(goal, conjecture, q(a)).\n");
    assert!(matches!(result, SaturationResult::Saturated { .. }), "{result}");
    let (result, _) = prove("formula(goal, conjecture, (![X]: ?[Y]: p(X, Y)) => ?[Y]: ![X]: p(X, Y)).\n");
    assert!(!result.is_refutation());
}

#[test]
fn runaway_search_hits_its_bound() {
    let problem = parse_problem("clause(a, p(a)).\nclause(b, ~p(X) | p(f(X))).\nclause(c, ~q).\n").unwrap();
    let cfg = SaturationConfig { max_clauses: 40, ..SaturationConfig::default() };
    let result = saturate(&problem_clauses(&problem), &cfg);
    assert!(
        matches!(result, SaturationResult::ResourceOut { bound: resolvere::engine::Bound::Clauses, .. }),
        "{result}"
    );
}
