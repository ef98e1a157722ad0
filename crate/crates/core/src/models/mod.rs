//! Topo-e-models, relational evidence models, evidence pseudo-models and KB
//! pseudo-models, with validation, group structure, sharing, and the
//! conversions between them.

mod kb;
mod pseudo;
mod relation;
mod relational;
mod topo;

use std::collections::BTreeMap;

pub use kb::{validate_kb_pseudo, Condition, KBPseudoModel, KbReport, KB_CONDITIONS};
pub use pseudo::{
    ev_pseudo_of_rel, is_standard, rel_of_standard_pseudo, validate_ev_pseudo, EvPseudoModel, Label, Signature,
};
pub use relation::{is_max_dense, max_worlds, Relation};
pub use relational::{validate_relational, RelationalEvidenceModel};
pub use topo::{group_structure, rel_of_topo, share_update, topo_of_rel, validate_topo, TopoEModel};

use crate::error::{Error, Result};
use crate::syntax::Group;
use crate::topology::StateSet;

/// A set of agents, as a bitmask over agent indices.
pub type Mask = u32;

/// Default cap on the number of agents.
pub const DEFAULT_AGENT_CAP: usize = 8;

pub type Valuation = BTreeMap<String, StateSet>;

/// List of violated invariants; empty iff the model is valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(&mut self, v: String) {
        self.violations.push(v);
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::Invalid(self.violations))
        }
    }
}

pub fn full_mask(agents: usize) -> Mask {
    if agents >= 32 {
        !0
    } else {
        (1 << agents) - 1
    }
}

/// Agent indices of a mask, increasing.
pub fn members(mask: Mask) -> impl Iterator<Item = usize> {
    (0..32).filter(move |b| mask >> b & 1 == 1)
}

/// Turns a syntactic group into a mask over `agents`.
pub fn resolve_group(group: &Group, agents: &[String]) -> Result<Mask> {
    match group {
        Group::All => {
            if agents.is_empty() {
                return Err(Error::EmptyGroup);
            }
            Ok(full_mask(agents.len()))
        }
        Group::Agents(names) => {
            let mut m = 0;
            for a in names {
                let i = agents.iter().position(|b| b == a).ok_or_else(|| Error::UnknownAgent(a.clone()))?;
                m |= 1 << i;
            }
            if m == 0 {
                return Err(Error::EmptyGroup);
            }
            Ok(m)
        }
    }
}

/// The syntactic group for a mask, written `{A}` when it is the full group.
pub fn group_of_mask(mask: Mask, agents: &[String]) -> Group {
    if mask == full_mask(agents.len()) {
        Group::All
    } else {
        Group::agents(members(mask).map(|i| agents[i].clone())).expect("non-empty mask")
    }
}

pub(crate) fn check_agents(agents: &[String]) -> Result<()> {
    if agents.is_empty() {
        return Err(Error::Unsupported("at least one agent is required".into()));
    }
    if agents.len() > DEFAULT_AGENT_CAP {
        return Err(Error::Unsupported(format!("more than {DEFAULT_AGENT_CAP} agents")));
    }
    for (k, a) in agents.iter().enumerate() {
        if a == "A" {
            return Err(Error::UnknownAgent("A is reserved for the full group".into()));
        }
        if agents[..k].contains(a) {
            return Err(Error::Invalid(vec![format!("duplicate agent `{a}`")]));
        }
    }
    Ok(())
}

pub(crate) fn check_valuation(n: usize, v: &Valuation, report: &mut ValidationReport) {
    for (p, s) in v {
        if s.carrier_size() != n {
            report.push(format!("valuation of `{p}` has carrier {} not {n}", s.carrier_size()));
        }
    }
}
