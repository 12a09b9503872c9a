use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use resolvere::cnf::clausify;
use resolvere::engine::{resolve, resolvents, subsumes};
use resolvere::oracle::{clauses_satisfiable, entails, ground_instances, satisfiable, INSTANCE_BUDGET};
use resolvere::parser::{parse_clause_text, parse_formula, parse_term};
use resolvere::unify::mgu;
use resolvere::{equal_up_to_renaming, saturate, Clause, Formula, Literal, SaturationConfig, Substitution, Term};

const VARS: [&str; 3] = ["X", "Y", "Z"];

fn term(depth: u32) -> impl Strategy<Value = Term> + Clone {
    let leaf = prop_oneof![
        prop::sample::select(VARS.to_vec()).prop_map(Term::var),
        prop::sample::select(vec!["a", "b"]).prop_map(Term::constant),
    ];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("f", vec![t])),
            (inner.clone(), inner).prop_map(|(s, t)| Term::app("g", vec![s, t])),
        ]
    })
}

fn ground_term(depth: u32) -> impl Strategy<Value = Term> + Clone {
    prop::sample::select(vec!["a", "b"])
        .prop_map(Term::constant)
        .prop_recursive(depth, 8, 1, |inner| inner.prop_map(|t| Term::app("f", vec![t])))
}

fn literal_from(arg: impl Strategy<Value = Term> + Clone) -> impl Strategy<Value = Literal> {
    prop_oneof![
        (any::<bool>(), arg.clone()).prop_map(|(s, t)| Literal::new(s, "p", vec![t])),
        (any::<bool>(), arg.clone(), arg).prop_map(|(s, t, u)| Literal::new(s, "q", vec![t, u])),
        any::<bool>().prop_map(|s| Literal::new(s, "r", vec![])),
    ]
}

fn clause_from(lit: impl Strategy<Value = Literal>, max: usize) -> impl Strategy<Value = Vec<Literal>> {
    prop::collection::vec(lit, 0..=max)
}

fn open_literal() -> impl Strategy<Value = Literal> {
    literal_from(term(2))
}

fn ground_literal() -> impl Strategy<Value = Literal> {
    literal_from(ground_term(1))
}

fn prop_formula() -> impl Strategy<Value = Formula> {
    let atom = (1..=5u8).prop_map(|k| Formula::atom(format!("p{k}"), vec![]));
    atom.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
}

fn first_order_formula() -> impl Strategy<Value = Formula> {
    let atom = literal_from(term(1)).prop_map(|l| Formula::atom(l.predicate, l.args));
    atom.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (prop::sample::select(VARS.to_vec()), inner.clone()).prop_map(|(v, f)| Formula::forall(v, f)),
            (prop::sample::select(VARS.to_vec()), inner).prop_map(|(v, f)| Formula::exists(v, f)),
        ]
    })
}

fn input(literals: Vec<Literal>) -> Clause {
    Clause::input(0, "c", literals)
}

/// Every assignment of the given variables to terms of `pool`.
fn assignments(vars: &[String], pool: &[Term]) -> Vec<Substitution> {
    let mut out = vec![Substitution::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                pool.iter().map(move |t| {
                    let mut s = s.clone();
                    s.insert(v.clone(), t.clone());
                    s
                })
            })
            .collect();
    }
    out
}

fn vars_of(terms: &[&Term]) -> Vec<String> {
    let mut vs = Vec::new();
    for t in terms {
        t.collect_vars(&mut vs);
    }
    let mut vs: Vec<String> = vs.into_iter().map(str::to_string).collect();
    vs.sort();
    vs.dedup();
    vs
}

fn small_universe() -> Vec<Term> {
    ["a", "b", "f(a)", "f(b)", "g(a,b)", "f(f(a))"].iter().map(|t| parse_term(t).unwrap()).collect()
}

fn renamed(literals: &[Literal]) -> Vec<Literal> {
    let map: BTreeMap<String, String> = VARS.iter().map(|v| (v.to_string(), format!("{v}_r"))).collect();
    literals.iter().rev().map(|l| l.rename(&map)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn renaming_is_an_equivalence(c in clause_from(open_literal(), 3), d in clause_from(open_literal(), 3)) {
        prop_assert!(equal_up_to_renaming(&c, &c));
        let r = renamed(&c);
        prop_assert!(equal_up_to_renaming(&c, &r));
        prop_assert!(equal_up_to_renaming(&r, &c));
        prop_assert_eq!(equal_up_to_renaming(&c, &d), equal_up_to_renaming(&d, &c));
    }

    #[test]
    fn mgu_unifies_and_is_idempotent(s in term(3), t in term(3)) {
        match (mgu(&s, &t), mgu(&t, &s)) {
            (Ok(sigma), Ok(rho)) => {
                prop_assert_eq!(s.apply(&sigma), t.apply(&sigma));
                prop_assert!(sigma.is_idempotent());
                // the two directions give variants of one another
                let (a, b) = (Literal::pos("e", vec![s.apply(&sigma)]), Literal::pos("e", vec![s.apply(&rho)]));
                prop_assert!(equal_up_to_renaming(&[a], &[b]));
            }
            (Err(_), Err(_)) => {}
            (l, r) => prop_assert!(false, "asymmetric: {:?} vs {:?}", l.is_ok(), r.is_ok()),
        }
    }

    #[test]
    fn mgu_is_most_general(s in term(2), t in term(2)) {
        let vars = vars_of(&[&s, &t]);
        let universe = small_universe();
        let grounders: Vec<Substitution> = assignments(&vars, &universe)
            .into_iter()
            .filter(|theta| s.apply(theta) == t.apply(theta))
            .collect();
        match mgu(&s, &t) {
            Ok(sigma) => {
                for theta in &grounders {
                    for v in &vars {
                        let x = Term::var(v.clone());
                        prop_assert_eq!(x.apply(&sigma).apply(theta), x.apply(theta));
                    }
                }
            }
            Err(_) => prop_assert!(grounders.is_empty()),
        }
    }

    #[test]
    fn terms_and_clauses_round_trip(t in term(3), c in clause_from(open_literal(), 4)) {
        prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t);
        let text = input(c.clone()).text();
        prop_assert_eq!(parse_clause_text(&text).unwrap(), c);
    }

    #[test]
    fn formulas_round_trip(f in first_order_formula()) {
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn clausify_preserves_satisfiability(f in prop_formula()) {
        let clauses = clausify(&f);
        let refs: Vec<&[Literal]> = clauses.iter().map(Vec::as_slice).collect();
        prop_assert_eq!(satisfiable(&f).unwrap(), clauses_satisfiable(&refs).unwrap());
    }

    #[test]
    fn ground_resolvents_are_entailed(c1 in clause_from(ground_literal(), 4), c2 in clause_from(ground_literal(), 4)) {
        for r in resolvents(&input(c1.clone()), &input(c2.clone())) {
            prop_assert!(entails(&[&c1, &c2], &r.literals).unwrap());
        }
    }

    #[test]
    fn lifting(c1 in clause_from(open_literal(), 3), c2 in clause_from(open_literal(), 3),
               a1 in prop::collection::vec(ground_term(1), 3), a2 in prop::collection::vec(ground_term(1), 3)) {
        let theta = |a: &[Term]| -> Substitution { VARS.iter().zip(a).map(|(v, t)| (v.to_string(), t.clone())).collect() };
        let g1: Vec<Literal> = c1.iter().map(|l| l.apply(&theta(&a1))).collect();
        let g2: Vec<Literal> = c2.iter().map(|l| l.apply(&theta(&a2))).collect();
        for i in 0..g1.len() {
            for j in 0..g2.len() {
                if !g1[i].is_complement_of(&g2[j]) {
                    continue;
                }
                let ground = resolve(&input(g1.clone()), i, &input(g2.clone()), j).unwrap();
                let lifted = resolve(&input(c1.clone()), i, &input(c2.clone()), j);
                prop_assert!(lifted.is_ok(), "ground step {}/{} has no lifted counterpart", i, j);
                prop_assert!(subsumes(&lifted.unwrap().literals, &ground.literals));
            }
        }
    }

    #[test]
    fn subsumption_is_entailment(c in clause_from(open_literal(), 2), d in clause_from(ground_literal(), 4)) {
        if subsumes(&c, &d) {
            let universe: Vec<Term> = ["a", "b", "f(a)", "f(b)"].iter().map(|t| parse_term(t).unwrap()).collect();
            let vars = vars_of(&c.iter().flat_map(|l| l.args.iter()).collect::<Vec<_>>());
            let instances: Vec<Vec<Literal>> = assignments(&vars, &universe)
                .iter()
                .map(|s| c.iter().map(|l| l.apply(s)).collect())
                .collect();
            let refs: Vec<&[Literal]> = instances.iter().map(Vec::as_slice).collect();
            prop_assert!(entails(&refs, &d).unwrap());
        }
    }

    #[test]
    fn ground_saturation_matches_truth_tables(cs in prop::collection::vec(clause_from(ground_literal(), 3), 1..7)) {
        let clauses: Vec<Clause> = cs.iter().enumerate().map(|(k, c)| Clause::input(k, format!("c{k}"), c.clone())).collect();
        let refs: Vec<&[Literal]> = cs.iter().map(Vec::as_slice).collect();
        let result = saturate(&clauses, &SaturationConfig::default());
        prop_assert_eq!(result.is_refutation(), !clauses_satisfiable(&refs).unwrap());
        if let Some(trace) = result.trace() {
            prop_assert!(resolvere::verify_trace(trace, &clauses).is_ok());
        }
    }

    #[test]
    fn saturation_is_deterministic(cs in prop::collection::vec(clause_from(open_literal(), 3), 1..6)) {
        let clauses: Vec<Clause> = cs.iter().enumerate().map(|(k, c)| Clause::input(k, format!("c{k}"), c.clone())).collect();
        let cfg = SaturationConfig { max_clauses: 2000, max_iterations: 300, ..SaturationConfig::default() };
        let (r1, r2) = (saturate(&clauses, &cfg), saturate(&clauses, &cfg));
        prop_assert_eq!(r1.label(), r2.label());
        prop_assert_eq!(r1.clauses(), r2.clauses());
        prop_assert_eq!(r1.trace().map(|t| t.to_json("p")), r2.trace().map(|t| t.to_json("p")));
        if let Some(trace) = r1.trace() {
            prop_assert!(resolvere::verify_trace(trace, &clauses).is_ok());
        }
    }

    #[test]
    fn ground_instances_grow_with_depth(cs in prop::collection::vec(clause_from(open_literal(), 2), 1..4)) {
        let clauses: Vec<Clause> = cs.into_iter().map(input).collect();
        let mut previous: Option<BTreeSet<String>> = None;
        for depth in 0..2 {
            let now: BTreeSet<String> = ground_instances(&clauses, depth, INSTANCE_BUDGET)
                .unwrap()
                .iter()
                .map(|c| format!("{}: {}", c.name().unwrap_or_default(), c.text()))
                .collect();
            if let Some(prev) = &previous {
                prop_assert!(prev.is_subset(&now));
            }
            previous = Some(now);
        }
    }
}

#[test]
fn ground_instance_count_of_s() {
    // constants n, n1, forall_r and unary r, not: the universe up to depth 2
    // has 3 + 2 * (3 + 2 * 3) = 21 terms. Four clauses have one variable,
    // two have two, c37 is ground.
    let s = resolvere::corpus::set_s(resolvere::corpus::CorpusVariant::Faithful);
    let count = ground_instances(&s, 2, INSTANCE_BUDGET).unwrap().len();
    assert_eq!(count, 4 * 21 + 2 * 21 * 21 + 1);
}
