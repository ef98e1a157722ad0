//! Finite evidence models: topological, relational and pseudo-model
//! semantics for group evidence, knowledge and belief, with the
//! translations and representation maps between them.

pub mod error;
pub mod fixtures;
pub mod models;
pub mod random;
pub mod representation;
pub mod semantics;
pub mod syntax;
pub mod topology;

pub use error::{Error, Result};
pub use models::{
    EvPseudoModel, KBPseudoModel, Label, Mask, Relation, RelationalEvidenceModel, Signature, TopoEModel,
    ValidationReport, Valuation,
};
pub use semantics::{eval_ev_pseudo, eval_kb_pseudo, eval_relational, eval_topo, EvalResult};
pub use syntax::{parse, parse_group, Formula, Group, LanguageTag, Modality};
pub use topology::{StateSet, Topology};
