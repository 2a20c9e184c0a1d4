//! A first-order tableau prover with polarized rewriting, in the style of
//! deduction modulo: axioms that fit an orientable shape are compiled into
//! term and propositional rewrite rules (split into positive and negative
//! sides, with Skolemized right-hand sides) and applied transparently to
//! literals during proof search. Proofs are emitted as self-contained
//! traces that an independent checker replays step by step.

pub mod parser;
pub mod preprocess;
pub mod proofcheck;
pub mod prover;
pub mod rewrite;
pub mod syntax;
pub mod trace;

pub use parser::{ParseError, Problem};
pub use preprocess::{preprocess_problem, PreprocessOptions, Preprocessed};
pub use proofcheck::{check_proof, reconstruct_rewrites, CheckError, Verdict};
pub use prover::{prove, ProofResult, ProveReport, ProverError, SearchConfig, SearchStats};
pub use rewrite::{RuleSet, StepRule};
pub use syntax::{Formula, NameGen, Polarity, Subst, Term};
pub use trace::{ProofTrace, TraceError};
