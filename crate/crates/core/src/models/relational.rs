use super::{check_agents, check_valuation, full_mask, members, Mask, Relation, ValidationReport, Valuation};
use crate::error::{Error, Result};

/// Per-agent evidence preorder `≤_i` and information equivalence `∼_i`.
/// Group relations are intersections and are computed on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationalEvidenceModel {
    n: usize,
    agents: Vec<String>,
    leq: Vec<Relation>,
    sim: Vec<Relation>,
    valuation: Valuation,
}

impl RelationalEvidenceModel {
    pub fn new(
        n: usize,
        agents: Vec<String>,
        leq: Vec<Relation>,
        sim: Vec<Relation>,
        valuation: Valuation,
    ) -> Result<RelationalEvidenceModel> {
        check_agents(&agents)?;
        if leq.len() != agents.len() || sim.len() != agents.len() {
            return Err(Error::Invalid(vec!["one preorder and one equivalence per agent".into()]));
        }
        for r in leq.iter().chain(&sim) {
            if r.size() != n {
                return Err(Error::CarrierMismatch(r.size(), n));
            }
        }
        for s in valuation.values() {
            if s.carrier_size() != n {
                return Err(Error::CarrierMismatch(s.carrier_size(), n));
            }
        }
        Ok(RelationalEvidenceModel { n, agents, leq, sim, valuation })
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn leq(&self, agent: usize) -> &Relation {
        &self.leq[agent]
    }

    pub fn sim(&self, agent: usize) -> &Relation {
        &self.sim[agent]
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    fn intersect(&self, rels: &[Relation], group: Mask) -> Result<Relation> {
        if group == 0 {
            return Err(Error::EmptyGroup);
        }
        if group & !full_mask(self.agents.len()) != 0 {
            return Err(Error::UnknownAgent(format!("mask {group:#b}")));
        }
        let mut it = members(group);
        let first = it.next().expect("non-empty");
        Ok(it.fold(rels[first].clone(), |acc, i| acc.intersection(&rels[i])))
    }

    /// `≤_I = ⋂_{i∈I} ≤_i`.
    pub fn group_leq(&self, group: Mask) -> Result<Relation> {
        self.intersect(&self.leq, group)
    }

    /// `∼_I = ⋂_{i∈I} ∼_i`.
    pub fn group_sim(&self, group: Mask) -> Result<Relation> {
        self.intersect(&self.sim, group)
    }
}

pub fn validate_relational(x: &RelationalEvidenceModel) -> ValidationReport {
    let mut r = ValidationReport::default();
    for (i, a) in x.agents.iter().enumerate() {
        if !x.leq[i].is_preorder() {
            r.push(format!("agent {a}: evidence relation is not a preorder"));
        }
        if !x.sim[i].is_equivalence() {
            r.push(format!("agent {a}: information relation is not an equivalence"));
        }
        if !x.leq[i].is_subset(&x.sim[i]) {
            r.push(format!("agent {a}: evidence relation not included in information relation"));
        }
    }
    check_valuation(x.n, &x.valuation, &mut r);
    r
}
