use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use crate::cnf::{Clausifier, SkolemSupply};
use crate::formula::Formula;
use crate::syntax::{Clause, ClauseId, Provenance};

use super::trace::{ProofTrace, TraceOutcome};
use super::{factors, resolvents, subsumes, Inference};

/// Limits and redundancy switches for [`saturate`]. Zero bounds are read as 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationConfig {
    pub max_clauses: usize,
    pub max_iterations: usize,
    pub timeout_ms: u64,
    pub forward_subsumption: bool,
    pub tautology_deletion: bool,
}

impl Default for SaturationConfig {
    fn default() -> Self {
        SaturationConfig {
            max_clauses: 100_000,
            max_iterations: 100_000,
            timeout_ms: 10_000,
            forward_subsumption: true,
            tautology_deletion: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Clauses,
    Iterations,
    Time,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bound::Clauses => "clause limit",
            Bound::Iterations => "iteration limit",
            Bound::Time => "time limit",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SaturationStats {
    /// Given clauses selected.
    pub iterations: usize,
    /// Inferences produced, before redundancy deletion.
    pub generated: usize,
    /// Clauses stored, inputs included.
    pub kept: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub enum SaturationResult {
    Refutation {
        trace: ProofTrace,
        clauses: Vec<Clause>,
        stats: SaturationStats,
    },
    /// The processed set at the fixpoint.
    Saturated {
        clauses: Vec<Clause>,
        stats: SaturationStats,
    },
    /// Every clause stored before the bound was hit.
    ResourceOut {
        bound: Bound,
        clauses: Vec<Clause>,
        stats: SaturationStats,
    },
}

impl SaturationResult {
    pub fn is_refutation(&self) -> bool {
        matches!(self, SaturationResult::Refutation { .. })
    }

    pub fn trace(&self) -> Option<&ProofTrace> {
        match self {
            SaturationResult::Refutation { trace, .. } => Some(trace),
            _ => None,
        }
    }

    pub fn clauses(&self) -> &[Clause] {
        match self {
            SaturationResult::Refutation { clauses, .. }
            | SaturationResult::Saturated { clauses, .. }
            | SaturationResult::ResourceOut { clauses, .. } => clauses,
        }
    }

    pub fn stats(&self) -> &SaturationStats {
        match self {
            SaturationResult::Refutation { stats, .. }
            | SaturationResult::Saturated { stats, .. }
            | SaturationResult::ResourceOut { stats, .. } => stats,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SaturationResult::Refutation { .. } => "refutation",
            SaturationResult::Saturated { .. } => "saturated",
            SaturationResult::ResourceOut { .. } => "resource_out",
        }
    }

    /// Whether any stored clause is empty. Only a refutation has one.
    pub fn has_empty_clause(&self) -> bool {
        self.clauses().iter().any(Clause::is_empty)
    }
}

impl fmt::Display for SaturationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.stats();
        match self {
            SaturationResult::ResourceOut { bound, .. } => write!(f, "resource_out ({bound})")?,
            other => f.write_str(other.label())?,
        }
        write!(f, ": {} iterations, {} generated, {} kept", s.iterations, s.generated, s.kept)
    }
}

struct State<'a> {
    cfg: &'a SaturationConfig,
    store: Vec<Clause>,
    queue: BTreeSet<(usize, ClauseId)>,
    processed: Vec<ClauseId>,
    stats: SaturationStats,
    start: Instant,
}

impl State<'_> {
    fn redundant(&self, inf: &Inference) -> bool {
        if self.cfg.tautology_deletion && crate::syntax::is_tautology(&inf.literals) {
            return true;
        }
        self.cfg.forward_subsumption
            && self
                .processed
                .iter()
                .chain(self.queue.iter().map(|(_, id)| id))
                .any(|id| subsumes(&self.store[id.0].literals, &inf.literals))
    }

    fn push(&mut self, inf: Inference) -> ClauseId {
        let id = ClauseId(self.store.len());
        let clause = inf.into_clause(id);
        self.queue.insert((clause.weight(), id));
        self.store.push(clause);
        self.stats.kept = self.store.len();
        id
    }

    fn finish(mut self, outcome: Result<ClauseId, Option<Bound>>) -> SaturationResult {
        self.stats.elapsed = self.start.elapsed();
        let stats = self.stats;
        match outcome {
            Ok(empty) => SaturationResult::Refutation {
                trace: ProofTrace::extract(&self.store, empty, TraceOutcome::Refutation),
                clauses: self.store,
                stats,
            },
            Err(None) => SaturationResult::Saturated {
                clauses: self.processed.iter().map(|id| self.store[id.0].clone()).collect(),
                stats,
            },
            Err(Some(bound)) => SaturationResult::ResourceOut { bound, clauses: self.store, stats },
        }
    }

    fn timed_out(&self) -> bool {
        self.start.elapsed() >= Duration::from_millis(self.cfg.timeout_ms.max(1))
    }
}

/// Given-clause saturation with unrestricted binary resolution and factoring.
///
/// Input clauses receive ids `0..n` in order. Each round selects the queued
/// clause of least weight (ties by lowest id), discards it if a processed
/// clause subsumes it, and otherwise adds its factors and its resolvents with
/// every processed clause (itself included) to the queue. New clauses are
/// dropped when tautological or forward-subsumed, as configured.
pub fn saturate(clauses: &[Clause], cfg: &SaturationConfig) -> SaturationResult {
    let mut st = State {
        cfg,
        store: Vec::with_capacity(clauses.len()),
        queue: BTreeSet::new(),
        processed: Vec::new(),
        stats: SaturationStats::default(),
        start: Instant::now(),
    };
    for c in clauses {
        let id = ClauseId(st.store.len());
        let clause = Clause::new(id, c.literals.clone(), c.provenance.clone());
        if clause.is_empty() {
            st.store.push(clause);
            st.stats.kept = st.store.len();
            return st.finish(Ok(id));
        }
        if !(cfg.tautology_deletion && clause.is_tautology()) {
            st.queue.insert((clause.weight(), id));
        }
        st.store.push(clause);
    }
    st.stats.kept = st.store.len();

    loop {
        let Some(&(weight, given)) = st.queue.iter().next() else {
            return st.finish(Err(None));
        };
        if st.stats.iterations >= cfg.max_iterations.max(1) {
            return st.finish(Err(Some(Bound::Iterations)));
        }
        if st.timed_out() {
            return st.finish(Err(Some(Bound::Time)));
        }
        st.queue.remove(&(weight, given));
        st.stats.iterations += 1;

        let given_clause = st.store[given.0].clone();
        if cfg.forward_subsumption
            && st.processed.iter().any(|id| subsumes(&st.store[id.0].literals, &given_clause.literals))
        {
            continue;
        }
        st.processed.push(given);

        let mut inferences = factors(&given_clause);
        for id in st.processed.clone() {
            inferences.extend(resolvents(&given_clause, &st.store[id.0]));
        }
        for inf in inferences {
            st.stats.generated += 1;
            if inf.literals.is_empty() {
                let id = st.push(inf);
                return st.finish(Ok(id));
            }
            if st.redundant(&inf) {
                continue;
            }
            st.push(inf);
            if st.store.len() >= cfg.max_clauses.max(1) {
                return st.finish(Err(Some(Bound::Clauses)));
            }
            if st.stats.generated.is_multiple_of(1024) && st.timed_out() {
                return st.finish(Err(Some(Bound::Time)));
            }
        }
    }
}

/// Adds the clausified negation of `conjecture` to `axioms` and saturates.
/// A refutation proves the conjecture.
pub fn prove_by_refutation(axioms: &[Clause], conjecture: &Formula, cfg: &SaturationConfig) -> SaturationResult {
    let mut clausifier = Clausifier::new(SkolemSupply::avoiding(axioms, [conjecture]));
    let mut input: Vec<Clause> = axioms.to_vec();
    let negated = clausifier.clausify(&Formula::not(conjecture.clone()));
    let single = negated.len() == 1;
    for (k, literals) in negated.into_iter().enumerate() {
        let name = if single { "negated_conjecture".to_string() } else { format!("negated_conjecture_{}", k + 1) };
        input.push(Clause::new(ClauseId(input.len()), literals, Provenance::Input(name)));
    }
    saturate(&input, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::verify_trace;
    use crate::parser::{parse_clause_text, parse_formula};

    fn clauses(texts: &[&str]) -> Vec<Clause> {
        texts
            .iter()
            .enumerate()
            .map(|(k, t)| Clause::input(k, format!("c{k}"), parse_clause_text(t).unwrap()))
            .collect()
    }

    #[test]
    fn no_opposing_literals_saturates() {
        let r = saturate(&clauses(&["p(c)", "~q(c)"]), &SaturationConfig::default());
        assert!(matches!(r, SaturationResult::Saturated { ref clauses, .. } if clauses.len() == 2), "{r}");
    }

    #[test]
    fn empty_input_saturates() {
        assert!(matches!(saturate(&[], &SaturationConfig::default()), SaturationResult::Saturated { .. }));
    }

    #[test]
    fn empty_input_clause_is_a_refutation() {
        let r = saturate(&clauses(&["p", "$false"]), &SaturationConfig::default());
        let trace = r.trace().unwrap();
        assert_eq!(trace.steps.len(), 1);
    }

    #[test]
    fn unit_conflict() {
        let input = clauses(&["p(X)", "~p(a) | q", "~q"]);
        let r = saturate(&input, &SaturationConfig::default());
        let trace = r.trace().expect("refutation");
        assert!(trace.final_clause().unwrap().is_empty());
        verify_trace(trace, &input).unwrap();
    }

    #[test]
    fn needs_factoring() {
        // unsatisfiable only with factoring: {p(X) | p(Y)}, {~p(U) | ~p(V)}
        let input = clauses(&["p(X) | p(Y)", "~p(U) | ~p(V)"]);
        let r = saturate(&input, &SaturationConfig::default());
        assert!(r.is_refutation(), "{r}");
        verify_trace(r.trace().unwrap(), &input).unwrap();
    }

    #[test]
    fn divergent_set_hits_a_bound() {
        let input = clauses(&["p(a)", "~p(X) | p(s(X))", "~q"]);
        let cfg = SaturationConfig { max_iterations: 50, ..Default::default() };
        let r = saturate(&input, &cfg);
        assert!(matches!(r, SaturationResult::ResourceOut { bound: Bound::Iterations, .. }), "{r}");
        let cfg = SaturationConfig { max_clauses: 20, ..Default::default() };
        assert!(matches!(saturate(&input, &cfg), SaturationResult::ResourceOut { bound: Bound::Clauses, .. }));
    }

    #[test]
    fn refutation_proves_conjecture() {
        let axioms = clauses(&["p(c)"]);
        let cfg = SaturationConfig::default();
        assert!(prove_by_refutation(&axioms, &parse_formula("p(c)").unwrap(), &cfg).is_refutation());
        let r = prove_by_refutation(&axioms, &parse_formula("q(c)").unwrap(), &cfg);
        assert!(matches!(r, SaturationResult::Saturated { .. }), "{r}");
    }

    #[test]
    fn existential_conjecture() {
        let axioms = clauses(&["p(f(a))"]);
        let r = prove_by_refutation(&axioms, &parse_formula("?[X]: p(X)").unwrap(), &SaturationConfig::default());
        assert!(r.is_refutation());
    }

    #[test]
    fn selection_is_lightest_first() {
        let input = clauses(&["~p(f(f(a))) | q", "p(X)", "~q"]);
        let r = saturate(&input, &SaturationConfig::default());
        assert!(r.is_refutation());
        // ~q, p(X), the heavy clause, then the derived unit q
        assert_eq!(r.stats().iterations, 4, "{r}");
    }
}
