use super::relational::RelationalEvidenceModel;
use super::{check_agents, check_valuation, full_mask, members, Mask, Relation, ValidationReport, Valuation};
use crate::error::{Error, Result};
use crate::topology::{generate_topology, join, join_partition, Partition, StateSet, Topology};

/// Multi-agent topological evidence model: per agent a partition (hard
/// evidence) and a topology (soft evidence) over a shared carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopoEModel {
    n: usize,
    agents: Vec<String>,
    partitions: Vec<Partition>,
    topologies: Vec<Topology>,
    valuation: Valuation,
}

impl TopoEModel {
    /// Checks shapes and carriers only; whether cells are open is left to
    /// [`validate_topo`], so that broken models can be built on purpose.
    pub fn new(
        n: usize,
        agents: Vec<String>,
        partitions: Vec<Partition>,
        topologies: Vec<Topology>,
        valuation: Valuation,
    ) -> Result<TopoEModel> {
        check_agents(&agents)?;
        if partitions.len() != agents.len() || topologies.len() != agents.len() {
            return Err(Error::Invalid(vec!["one partition and one topology per agent".into()]));
        }
        for p in &partitions {
            if p.carrier_size() != n {
                return Err(Error::CarrierMismatch(p.carrier_size(), n));
            }
        }
        for t in &topologies {
            if t.carrier_size() != n {
                return Err(Error::CarrierMismatch(t.carrier_size(), n));
            }
        }
        for s in valuation.values() {
            if s.carrier_size() != n {
                return Err(Error::CarrierMismatch(s.carrier_size(), n));
            }
        }
        Ok(TopoEModel { n, agents, partitions, topologies, valuation })
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn partition(&self, agent: usize) -> &Partition {
        &self.partitions[agent]
    }

    pub fn topology(&self, agent: usize) -> &Topology {
        &self.topologies[agent]
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    pub fn full_group(&self) -> Mask {
        full_mask(self.agents.len())
    }

    /// Replaces the valuation, keeping the evidence structure.
    pub fn set_valuation(&mut self, valuation: Valuation) -> Result<()> {
        for s in valuation.values() {
            if s.carrier_size() != self.n {
                return Err(Error::CarrierMismatch(s.carrier_size(), self.n));
            }
        }
        self.valuation = valuation;
        Ok(())
    }
}

/// Lists every violated invariant of a topo-e-model.
pub fn validate_topo(m: &TopoEModel) -> ValidationReport {
    let mut r = ValidationReport::default();
    for (i, name) in m.agents.iter().enumerate() {
        for v in Partition::problems(m.n, m.partitions[i].cells()) {
            r.push(format!("agent {name}: {v}"));
        }
        for c in m.partitions[i].cells() {
            if !m.topologies[i].is_open(c) {
                r.push(format!("agent {name}: cell not open: {c}"));
            }
        }
    }
    check_valuation(m.n, &m.valuation, &mut r);
    r
}

fn check_mask(m: &TopoEModel, group: Mask) -> Result<()> {
    if group == 0 {
        return Err(Error::EmptyGroup);
    }
    if group & !m.full_group() != 0 {
        return Err(Error::UnknownAgent(format!("mask {group:#b}")));
    }
    Ok(())
}

/// Group partition (cellwise intersection) and group topology (join).
pub fn group_structure(m: &TopoEModel, group: Mask) -> Result<(Partition, Topology)> {
    check_mask(m, group)?;
    let ps: Vec<Partition> = members(group).map(|i| m.partitions[i].clone()).collect();
    let ts: Vec<Topology> = members(group).map(|i| m.topologies[i].clone()).collect();
    Ok((join_partition(&ps)?, join(&ts)?))
}

/// Evidence sharing within `group`: every member adopts the group's partition
/// and topology; outsiders are untouched.
pub fn share_update(m: &TopoEModel, group: Mask) -> Result<TopoEModel> {
    let (p, t) = group_structure(m, group)?;
    let mut out = m.clone();
    for i in members(group) {
        out.partitions[i] = p.clone();
        out.topologies[i] = t.clone();
    }
    Ok(out)
}

/// Specialization preorder within cells, and the cell equivalence.
pub fn rel_of_topo(m: &TopoEModel) -> Result<RelationalEvidenceModel> {
    validate_topo(m).into_result()?;
    let n = m.n;
    let mut leq = Vec::new();
    let mut sim = Vec::new();
    for i in 0..m.agents.len() {
        let p = &m.partitions[i];
        let t = &m.topologies[i];
        let rows: Vec<StateSet> = (0..n).map(|x| t.neighbourhood(x).intersection(p.cell_of(x))).collect();
        leq.push(Relation::from_rows(rows)?);
        sim.push(Relation::from_cells(n, p.cells()));
    }
    RelationalEvidenceModel::new(n, m.agents.clone(), leq, sim, m.valuation.clone())
}

/// Topology generated by the up-sets of each preorder; cells from the
/// equivalence classes.
pub fn topo_of_rel(x: &RelationalEvidenceModel) -> Result<TopoEModel> {
    super::validate_relational(x).into_result()?;
    let n = x.carrier_size();
    let mut parts = Vec::new();
    let mut tops = Vec::new();
    for i in 0..x.agents().len() {
        let ups: Vec<StateSet> = x.leq(i).rows().to_vec();
        tops.push(generate_topology(&ups, n)?);
        parts.push(Partition::from_classes(x.sim(i).rows())?);
    }
    TopoEModel::new(n, x.agents().to_vec(), parts, tops, x.valuation().clone())
}
