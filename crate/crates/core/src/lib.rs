//! Refinement modal logic over finite multi-agent Kripke models.
//!
//! The crate parses formulas with refinement quantifiers, checks them on
//! finite pointed models, compiles them down to plain multi-agent K, decides
//! satisfiability and validity, synthesizes witness refinements and executes
//! action models.

pub mod actions;
pub mod bq;
pub mod decision;
pub mod kripke;
pub mod modelcheck;
pub mod normal_forms;
pub mod par;
pub mod reduction;
pub mod syntax;

pub use kripke::{
    check_bisimulation, check_refinement, contract, distinguishing_formula, Model, ModelError, PointedModel,
    RefinementCheck, StateRelation,
};
pub use modelcheck::{evaluate, evaluate_rml};
pub use reduction::{reduce, ReduceError, ReductionTrace};
pub use syntax::{parse, print, Agent, BqFormula, Formula, Prop};
