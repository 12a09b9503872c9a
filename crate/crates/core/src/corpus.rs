//! The undecidability clause set, its step-by-step resolution replay, the
//! contradiction with the induction-rule clause, and the ablation check.
//!
//! Steps carry the conventional clause numbers: `31`..`37` for S, `38` for
//! the assumption `bew(forall_r)`, `43` for the lemma `~bew(forall_r)`, `48`
//! for the induction-rule clause.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::cnf::{problem_clauses, SkolemSupply};
use crate::engine::{
    prove_by_refutation, resolve, saturate, verify_trace, ProofTrace, SaturationConfig, SaturationResult, TraceOutcome,
    VerifyError,
};
use crate::induction::build_omega_clause;
use crate::oracle::{check_model, Interpretation, ModelVerdict, OracleError, Rule};
use crate::parser::{parse_clause_text, parse_problem, Problem};
use crate::syntax::{equal_up_to_renaming, literals_text, Clause, ClauseId, Literal, Provenance};

pub const FAITHFUL_FILE: &str = include_str!("../corpus/goedel_S_faithful.p");
pub const REDERIVED_FILE: &str = include_str!("../corpus/goedel_S_rederived.p");
pub const OMEGA_FILE: &str = include_str!("../corpus/goedel_omega.p");
pub const PART1_FILE: &str = include_str!("../corpus/goedel_part1.p");
pub const ABLATION_FILE: &str = include_str!("../corpus/goedel_ablation.p");
pub const S_MODEL_FILE: &str = include_str!("../corpus/goedel_S.model");
pub const ALL_FALSE_MODEL_FILE: &str = include_str!("../corpus/all_false.model");

/// Depth at which the model certificates are checked.
pub const CERTIFICATE_DEPTH: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CorpusVariant {
    /// Clauses 31-37 as printed, with Skolem constants `n` and `n1`.
    Faithful,
    /// Clauses obtained by clausifying the source formulas.
    Rederived,
}

impl CorpusVariant {
    pub fn name(&self) -> &'static str {
        match self {
            CorpusVariant::Faithful => "faithful",
            CorpusVariant::Rederived => "rederived",
        }
    }
}

impl fmt::Display for CorpusVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn parse_builtin(text: &str) -> Problem {
    parse_problem(text).expect("built-in corpus parses")
}

fn lits(text: &str) -> Vec<Literal> {
    parse_clause_text(text).expect("built-in clause parses")
}

/// Clause set S, named `c31`..`c37`.
pub fn set_s(variant: CorpusVariant) -> Vec<Clause> {
    match variant {
        CorpusVariant::Faithful => parse_builtin(FAITHFUL_FILE).clauses,
        CorpusVariant::Rederived => {
            let mut clauses = problem_clauses(&parse_builtin(REDERIVED_FILE));
            for (k, c) in clauses.iter_mut().enumerate() {
                c.provenance = Provenance::Input(format!("c{}", 31 + k));
            }
            clauses
        }
    }
}

fn named(id: usize, name: &str, text: &str) -> Clause {
    Clause::input(id, name, lits(text))
}

/// `bew(forall_r)`: the assumption refuted in part 1.
pub fn assumption() -> Clause {
    named(0, "c38", "bew(forall_r)")
}

/// `~bew(forall_r)`: the lemma established by part 1.
pub fn lemma() -> Clause {
    named(0, "c43", "~bew(forall_r)")
}

/// The induction-rule clause for `r`, with a Skolem constant fresh for S.
pub fn omega_clause(variant: CorpusVariant) -> Clause {
    let s = set_s(variant);
    let mut supply = SkolemSupply::avoiding(&s, []);
    let mut c = build_omega_clause("r", &mut supply);
    c.provenance = Provenance::Input("c48".into());
    c
}

/// The expected form of a derived clause, by label.
pub fn expected_clause(variant: CorpusVariant, label: &str) -> Option<Vec<Literal>> {
    let text = match (variant, label) {
        (CorpusVariant::Faithful, "39") => "b(n,forall_r)",
        (CorpusVariant::Faithful, "40") => "bew(not(r(Y)))",
        (CorpusVariant::Faithful, "41") => "~bew(r(Y))",
        (CorpusVariant::Rederived, "39") => "b(sk1(forall_r),forall_r)",
        (CorpusVariant::Rederived, "40") => "bew(not(r(sk1(forall_r))))",
        (CorpusVariant::Rederived, "41") => "~bew(r(sk1(forall_r)))",
        (_, "42") => "bew(r(Y))",
        (_, "43") => "~bew(forall_r)",
        (_, "44") => "~b(Y,forall_r)",
        (_, "45") => "bew(r(X))",
        (_, "46") => "~bew(not(forall_r))",
        (_, "49") => "bew(forall_r)",
        (_, "empty") => "$false",
        _ => return None,
    };
    Some(lits(text))
}

/// One resolution step to reproduce: `label = left ∧ right`.
#[derive(Clone, Copy, Debug)]
struct Step {
    label: &'static str,
    left: &'static str,
    right: &'static str,
}

const PART1_STEPS: [Step; 5] = [
    Step { label: "39", left: "38", right: "31" },
    Step { label: "40", left: "39", right: "34" },
    Step { label: "41", left: "40", right: "36" },
    Step { label: "42", left: "38", right: "35" },
    Step { label: "empty", left: "41", right: "42" },
];

const PART2_STEPS: [Step; 3] = [
    Step { label: "44", left: "43", right: "32" },
    Step { label: "45", left: "44", right: "33" },
    Step { label: "46", left: "45", right: "37" },
];

const OMEGA_STEPS: [Step; 4] = [
    Step { label: "44", left: "43", right: "32" },
    Step { label: "45", left: "44", right: "33" },
    Step { label: "49", left: "45", right: "48" },
    Step { label: "empty", left: "49", right: "43" },
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepReport {
    pub label: String,
    pub parents: [String; 2],
    pub expected: String,
    /// The resolvent that matched, or else the first resolvent found.
    pub derived: Option<String>,
    pub id: Option<ClauseId>,
    pub matched: bool,
}

/// Outcome of an unguided saturation run over a phase's clause set.
#[derive(Clone, Debug)]
pub struct SearchReport {
    pub result: String,
    pub iterations: usize,
    pub elapsed: Duration,
    pub verified: Option<Result<(), VerifyError>>,
    /// For each label of the phase: found in the proof trace, found among all
    /// stored clauses.
    pub found: BTreeMap<String, (bool, bool)>,
    pub refutation: Option<ProofTrace>,
}

#[derive(Clone, Debug)]
pub struct PhaseReport {
    pub name: &'static str,
    pub steps: Vec<StepReport>,
    pub trace: ProofTrace,
    pub verified: Result<(), VerifyError>,
    pub search: SearchReport,
}

impl PhaseReport {
    pub fn steps_matched(&self) -> bool {
        self.steps.iter().all(|s| s.matched)
    }

    pub fn step(&self, label: &str) -> Option<&StepReport> {
        self.steps.iter().find(|s| s.label == label)
    }
}

#[derive(Clone, Debug)]
pub struct ReplayReport {
    pub variant: CorpusVariant,
    pub part1: PhaseReport,
    pub part2: PhaseReport,
    pub omega: PhaseReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("{phase}: step {label} not reproduced")]
    Mismatch { phase: &'static str, label: String },
    #[error("{phase}: trace rejected: {source}")]
    Trace { phase: &'static str, source: VerifyError },
    #[error("{phase}: saturation gave {result}, expected {expected}")]
    Search { phase: &'static str, result: String, expected: &'static str },
}

impl ReplayReport {
    pub fn phases(&self) -> [&PhaseReport; 3] {
        [&self.part1, &self.part2, &self.omega]
    }

    /// Every step reproduced, every trace verified, and the unguided searches
    /// refute exactly the unsatisfiable sets.
    pub fn check(&self) -> Result<(), ReplayError> {
        for phase in self.phases() {
            if let Some(s) = phase.steps.iter().find(|s| !s.matched) {
                return Err(ReplayError::Mismatch { phase: phase.name, label: s.label.clone() });
            }
            if let Err(e) = &phase.verified {
                return Err(ReplayError::Trace { phase: phase.name, source: e.clone() });
            }
            if let Some(Err(e)) = &phase.search.verified {
                return Err(ReplayError::Trace { phase: phase.name, source: e.clone() });
            }
        }
        for (phase, expected) in [(&self.part1, "refutation"), (&self.omega, "refutation")] {
            if phase.search.result != expected {
                return Err(ReplayError::Search { phase: phase.name, result: phase.search.result.clone(), expected });
            }
        }
        if self.part2.search.result == "refutation" {
            return Err(ReplayError::Search {
                phase: self.part2.name,
                result: self.part2.search.result.clone(),
                expected: "no refutation",
            });
        }
        Ok(())
    }
}

impl fmt::Display for ReplayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "variant: {}", self.variant)?;
        for phase in self.phases() {
            writeln!(f)?;
            writeln!(f, "== {}", phase.name)?;
            for s in &phase.steps {
                let label = if s.label == "empty" { "EMPTY CLAUSE".to_string() } else { format!("({})", s.label) };
                let verdict = if s.matched { "ok" } else { "MISMATCH" };
                writeln!(
                    f,
                    "  {:<13} = ({}) & ({}): {:<28} [{verdict}]",
                    label,
                    s.parents[0],
                    s.parents[1],
                    s.derived.as_deref().unwrap_or("<no resolvent>"),
                )?;
                if !s.matched {
                    writeln!(f, "    expected {}", s.expected)?;
                }
            }
            match &phase.verified {
                Ok(()) => writeln!(f, "  step trace: {} steps, verified", phase.trace.steps.len())?,
                Err(e) => writeln!(f, "  step trace: REJECTED ({e})")?,
            }
            let search = &phase.search;
            write!(
                f,
                "  saturation: {} after {} iterations ({:.1} ms)",
                search.result,
                search.iterations,
                search.elapsed.as_secs_f64() * 1e3
            )?;
            match &search.verified {
                Some(Ok(())) => writeln!(f, ", proof verified")?,
                Some(Err(e)) => writeln!(f, ", proof REJECTED ({e})")?,
                None => writeln!(f)?,
            }
            let in_trace: Vec<&str> = search.found.iter().filter(|(_, (t, _))| *t).map(|(l, _)| l.as_str()).collect();
            let stored: Vec<&str> = search.found.iter().filter(|(_, (_, s))| *s).map(|(l, _)| l.as_str()).collect();
            writeln!(f, "    labels in proof: [{}]; labels derived: [{}]", in_trace.join(", "), stored.join(", "))?;
        }
        Ok(())
    }
}

/// Guided derivation: clauses are added by label and resolved along given
/// parent labels.
struct Derivation {
    variant: CorpusVariant,
    store: Vec<Clause>,
    labels: BTreeMap<String, ClauseId>,
}

impl Derivation {
    fn new(variant: CorpusVariant, inputs: &[(&str, Clause)]) -> Self {
        let mut d = Derivation { variant, store: Vec::new(), labels: BTreeMap::new() };
        for (label, c) in inputs {
            let id = ClauseId(d.store.len());
            d.store.push(Clause::new(id, c.literals.clone(), c.provenance.clone()));
            d.labels.insert(label.to_string(), id);
        }
        d
    }

    fn inputs(&self) -> Vec<Clause> {
        self.store.iter().filter(|c| matches!(c.provenance, Provenance::Input(_))).cloned().collect()
    }

    fn step(&mut self, step: Step) -> StepReport {
        let expected = expected_clause(self.variant, step.label).expect("labelled step");
        let mut report = StepReport {
            label: step.label.to_string(),
            parents: [step.left.to_string(), step.right.to_string()],
            expected: literals_text(&expected),
            derived: None,
            id: None,
            matched: false,
        };
        let (Some(&l), Some(&r)) = (self.labels.get(step.left), self.labels.get(step.right)) else {
            return report;
        };
        let (left, right) = (&self.store[l.0], &self.store[r.0]);
        for i in 0..left.len() {
            for j in 0..right.len() {
                let Ok(inf) = resolve(left, i, right, j) else { continue };
                if equal_up_to_renaming(&inf.literals, &expected) {
                    let id = ClauseId(self.store.len());
                    report.derived = Some(literals_text(&inf.literals));
                    report.id = Some(id);
                    report.matched = true;
                    self.store.push(inf.into_clause(id));
                    self.labels.insert(step.label.to_string(), id);
                    return report;
                }
                report.derived.get_or_insert_with(|| literals_text(&inf.literals));
            }
        }
        report
    }

    fn trace(&self, target: &str, outcome: TraceOutcome) -> ProofTrace {
        match self.labels.get(target) {
            Some(&id) => ProofTrace::extract(&self.store, id, outcome),
            None => ProofTrace { steps: Vec::new(), final_id: ClauseId(usize::MAX), outcome },
        }
    }
}

fn search_report(
    result: &SaturationResult,
    problem: &[Clause],
    variant: CorpusVariant,
    labels: &[&str],
) -> SearchReport {
    let trace = result.trace();
    let found = labels
        .iter()
        .map(|&label| {
            let expected = expected_clause(variant, label).expect("labelled step");
            let hit = |cs: &[Clause]| cs.iter().any(|c| equal_up_to_renaming(&c.literals, &expected));
            let in_trace = trace.is_some_and(|t| hit(&t.steps));
            (label.to_string(), (in_trace, hit(result.clauses())))
        })
        .collect();
    SearchReport {
        result: result.label().to_string(),
        iterations: result.stats().iterations,
        elapsed: result.stats().elapsed,
        verified: trace.map(|t| verify_trace(t, problem)),
        found,
        refutation: trace.cloned(),
    }
}

fn labelled_s(variant: CorpusVariant) -> Vec<(String, Clause)> {
    set_s(variant).into_iter().enumerate().map(|(k, c)| ((31 + k).to_string(), c)).collect()
}

/// Bounds for the satisfiable part-2 set, which has no refutation to find.
pub fn part2_search_config() -> SaturationConfig {
    SaturationConfig { max_iterations: 200, timeout_ms: 1000, ..SaturationConfig::default() }
}

pub fn replay(variant: CorpusVariant) -> ReplayReport {
    let cfg = SaturationConfig::default();
    let s = labelled_s(variant);
    let with = |extra: &[(&str, Clause)]| -> Vec<(String, Clause)> {
        s.iter().cloned().chain(extra.iter().map(|(l, c)| (l.to_string(), c.clone()))).collect()
    };
    let run = |name: &'static str, inputs: Vec<(String, Clause)>, steps: &[Step], target: &str, outcome| {
        let borrowed: Vec<(&str, Clause)> = inputs.iter().map(|(l, c)| (l.as_str(), c.clone())).collect();
        let mut d = Derivation::new(variant, &borrowed);
        let reports: Vec<StepReport> = steps.iter().map(|&st| d.step(st)).collect();
        let trace = d.trace(target, outcome);
        let verified = verify_trace(&trace, &d.inputs());
        (name, reports, trace, verified)
    };

    // part 1: refute the assumption bew(forall_r)
    let (name, steps, trace, verified) = run(
        "part 1: (forall x) r(x) is not deducible",
        with(&[("38", assumption())]),
        &PART1_STEPS,
        "empty",
        TraceOutcome::Refutation,
    );
    let axioms = set_s(variant);
    let goal = crate::parser::parse_formula("~bew(forall_r)").expect("built-in formula");
    let result = prove_by_refutation(&axioms, &goal, &cfg);
    let mut problem = axioms.clone();
    problem.push(assumption());
    let search = search_report(&result, &problem, variant, &["39", "40", "41", "42", "empty"]);
    let part1 = PhaseReport { name, steps, trace, verified, search };

    // part 2: continue from the lemma ~bew(forall_r)
    let (name, steps, trace, verified) = run(
        "part 2: the negation is not deducible",
        with(&[("43", lemma())]),
        &PART2_STEPS,
        "46",
        TraceOutcome::Derivation,
    );
    let mut problem = axioms.clone();
    problem.push(lemma());
    let result = saturate(&problem, &part2_search_config());
    let search = search_report(&result, &problem, variant, &["44", "45", "46"]);
    let part2 = PhaseReport { name, steps, trace, verified, search };

    // induction-rule clause added to S
    let omega = omega_clause(variant);
    let (name, steps, trace, verified) = run(
        "induction rule: contradiction",
        with(&[("43", lemma()), ("48", omega.clone())]),
        &OMEGA_STEPS,
        "empty",
        TraceOutcome::Refutation,
    );
    let mut problem = axioms;
    problem.push(omega);
    let result = saturate(&problem, &cfg);
    let search = search_report(&result, &problem, variant, &["43", "45", "49", "empty"]);
    let omega = PhaseReport { name, steps, trace, verified, search };

    ReplayReport { variant, part1, part2, omega }
}

/// Clause set for the ablation: S without `c33` and `c34`, plus the lemma
/// and the induction-rule clause.
pub fn ablation_set(variant: CorpusVariant) -> Vec<Clause> {
    let mut clauses: Vec<Clause> =
        set_s(variant).into_iter().filter(|c| !matches!(c.name(), Some("c33" | "c34"))).collect();
    clauses.push(lemma());
    clauses.push(omega_clause(variant));
    for (k, c) in clauses.iter_mut().enumerate() {
        c.id = ClauseId(k);
    }
    clauses
}

/// Every predicate of the corpus is false everywhere.
pub fn all_false_model() -> Interpretation {
    Interpretation::all_false(["bew", "b"])
}

/// Model of S: `bew` holds of codes headed by `r`; `b(y, x)` holds when `y`
/// is the deduction witness and `x` is headed by `r`.
pub fn satisfying_model(variant: CorpusVariant) -> Interpretation {
    let witness = match variant {
        CorpusVariant::Faithful => "n",
        CorpusVariant::Rederived => "sk1",
    };
    Interpretation::all_false([]).with_rule("bew", Rule::HeadIs { index: 0, functor: "r".into() }).with_rule(
        "b",
        Rule::And(
            Box::new(Rule::HeadIs { index: 0, functor: witness.into() }),
            Box::new(Rule::HeadIs { index: 1, functor: "r".into() }),
        ),
    )
}

#[derive(Clone, Debug)]
pub struct AblationReport {
    pub result: SaturationResult,
    pub verdict: Result<ModelVerdict, OracleError>,
}

impl AblationReport {
    /// No refutation, and the model certificate holds.
    pub fn is_success(&self) -> bool {
        !self.result.is_refutation()
            && !self.result.has_empty_clause()
            && matches!(&self.verdict, Ok(v) if v.is_satisfied())
    }
}

impl fmt::Display for AblationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "saturation: {}", self.result)?;
        match &self.verdict {
            Ok(v) => writeln!(f, "all-false model at depth {CERTIFICATE_DEPTH}: {v}")?,
            Err(e) => writeln!(f, "all-false model at depth {CERTIFICATE_DEPTH}: error: {e}")?,
        }
        write!(f, "ablation {}", if self.is_success() { "holds" } else { "FAILS" })
    }
}

pub fn ablation(variant: CorpusVariant, cfg: &SaturationConfig) -> AblationReport {
    let clauses = ablation_set(variant);
    let verdict = check_model(&all_false_model(), &clauses, CERTIFICATE_DEPTH);
    let result = saturate(&clauses, cfg);
    AblationReport { result, verdict }
}
