//! Correspondences between model kinds, bounded unraveling, bounded
//! satisfiability and the axiom audit.

mod audit;
mod correspond;
mod sat;
mod unravel;

pub use audit::{
    audit_model, axiom_audit, corrupted_model, AuditConfig, AuditReport, AuditSemantics, Counterexample, SchemeReport,
};
pub use correspond::{
    belief_relation, confluence, evidence_from_kb, kb_from_evidence, recovered_group_leq, same_successors,
    sim_characterizations,
};
pub use sat::{
    bounded_sat, bounded_sat_with, bounded_valid, search_signature, Outcome, SatModel, SatOptions, SatSemantics,
    SatStats, SatVerdict, MAX_SAT_STATES,
};
pub use unravel::{last_pmorphism_check, unravel, History, PMorphismReport, Step, StepKind, Unraveling, MAX_HISTORIES};
