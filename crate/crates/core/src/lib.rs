//! A small saturation-based resolution prover for first-order clause logic.
//!
//! The crate covers the whole path from problem text to checked proofs:
//!
//! * [`parser`] reads annotated formulas and clauses, [`cnf`] clausifies them;
//! * [`unify`] and [`engine`] implement binary resolution, factoring,
//!   subsumption and a deterministic given-clause loop whose proofs can be
//!   re-checked step by step with [`engine::verify_trace`];
//! * [`oracle`] decides ground questions by exhaustive enumeration (truth
//!   tables, Herbrand grounding, model certificates) and is used to
//!   cross-check the engine;
//! * [`induction`] unfolds induction schemas over finite domains;
//! * [`corpus`] packages the undecidability clause set with its replay and
//!   ablation runners.

pub mod cnf;
pub mod corpus;
pub mod engine;
pub mod formula;
pub mod induction;
pub mod oracle;
pub mod parser;
pub mod syntax;
pub mod unify;

pub use engine::{prove_by_refutation, saturate, verify_trace, ProofTrace, SaturationConfig, SaturationResult};
pub use formula::Formula;
pub use parser::{parse_problem, Problem};
pub use syntax::{equal_up_to_renaming, is_tautology, Clause, ClauseId, Literal, Provenance, Substitution, Term};
