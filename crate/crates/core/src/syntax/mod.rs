//! Formula ASTs, the surface syntax, translation of knowledge and belief into
//! evidence modalities, elimination of sharing, and the closure set.

mod formula;
mod parse;
mod print;
mod transform;

pub use formula::{Formula, Group, LanguageTag, Modality};
pub use parse::{parse, parse_group};
pub use transform::{closure_set, expand_kb, reduce_dynamic, DynSystem};
