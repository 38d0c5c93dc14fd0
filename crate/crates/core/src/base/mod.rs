//! Problem abstraction, budget accounting, archive and dominance relations.

pub mod archive;
pub mod budget;
pub mod dominance;
pub mod evaluate;
pub mod external;
pub mod problem;

pub use archive::Archive;
pub use budget::Budget;
pub use dominance::{compare_evaluations, constrained_dominates, dominates, Dominance};
pub use evaluate::{evaluate_approximate, evaluate_expensive, BatchOutcome};
pub use external::{ExternalEvaluator, ExternalProblem};
pub use problem::{
    constraint_violation, Evaluation, FnProblem, IdGen, Problem, ProblemSpec, Provenance,
    Solution,
};
