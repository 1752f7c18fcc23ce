//! Finite models for the Carmo–Jones dyadic deontic logic.
//!
//! The crate evaluates formulas over finite models `⟨W, av, pv, π, V⟩`,
//! decides the semantic conditions on the obligation map `π`, builds `π` by
//! seeded fixpoint closure, and ships the reference models as fixtures.

pub mod closure;
pub mod conditions;
pub mod error;
pub mod evaluator;
pub mod fixtures;
pub mod formula;
pub mod kernel;
pub mod scenario;

pub use closure::{
    close, ctctd_model, seed_conditional, ClosureOptions, ClosureReport, Derivation, Outcome, Rule,
};
pub use conditions::{
    check_all, check_condition, check_union_property, Condition, ConditionReport, Violation,
};
pub use error::{Error, Result};
pub use evaluator::{
    conditional_selection, enumerate_cj_maps, enumerate_models, extension, holds_at, valid_in,
    SelectionReading,
};
pub use fixtures::{fixture, fixture_names, repro, ReproReport};
pub use formula::{atoms_of, parse_formula, render_formula, Formula, ParseError};
pub use kernel::{upset, Family, Model, ObMap, WorldId, WorldSet, MAX_DENSE_WORLDS, MAX_WORLDS};
pub use scenario::{format_ob_listing, parse_scenario, run_scenario, Scenario, ScenarioReport};
