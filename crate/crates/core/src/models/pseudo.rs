use super::relational::RelationalEvidenceModel;
use super::{
    check_agents, check_valuation, full_mask, members, resolve_group, Mask, Relation, ValidationReport, Valuation,
};
use crate::error::{Error, Result};
use crate::syntax::Group;

/// Which group relations a pseudo-model carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Signature {
    /// Every non-empty group.
    Full,
    /// Individuals and the full group.
    Fragment,
}

/// Index of a stored relation pair. In the fragment signature the full group
/// has its own label even when there is a single agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Group(Mask),
    Everyone,
}

/// Relations `≤_I`, `∼_I` stored explicitly per group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvPseudoModel {
    n: usize,
    agents: Vec<String>,
    signature: Signature,
    labels: Vec<Label>,
    leq: Vec<Relation>,
    sim: Vec<Relation>,
    valuation: Valuation,
}

fn labels_of(k: usize, signature: Signature) -> Vec<Label> {
    match signature {
        Signature::Full => (1..=full_mask(k)).map(Label::Group).collect(),
        Signature::Fragment => (0..k).map(|i| Label::Group(1 << i)).chain([Label::Everyone]).collect(),
    }
}

impl EvPseudoModel {
    /// Builds a pseudo-model by asking `rel` for the pair of every label.
    /// Conditions are checked by [`validate_ev_pseudo`], not here.
    pub fn from_fn(
        n: usize,
        agents: Vec<String>,
        signature: Signature,
        valuation: Valuation,
        mut rel: impl FnMut(Label) -> (Relation, Relation),
    ) -> Result<EvPseudoModel> {
        check_agents(&agents)?;
        let labels = labels_of(agents.len(), signature);
        let mut leq = Vec::new();
        let mut sim = Vec::new();
        for &l in &labels {
            let (a, b) = rel(l);
            for r in [&a, &b] {
                if r.size() != n {
                    return Err(Error::CarrierMismatch(r.size(), n));
                }
            }
            leq.push(a);
            sim.push(b);
        }
        for s in valuation.values() {
            if s.carrier_size() != n {
                return Err(Error::CarrierMismatch(s.carrier_size(), n));
            }
        }
        Ok(EvPseudoModel { n, agents, signature, labels, leq, sim, valuation })
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    fn slot(&self, label: Label) -> Result<usize> {
        let label = match (self.signature, label) {
            (Signature::Full, Label::Everyone) => Label::Group(full_mask(self.agents.len())),
            _ => label,
        };
        self.labels.iter().position(|&l| l == label).ok_or_else(|| Error::GroupUnavailable(format!("{label:?}")))
    }

    pub fn leq(&self, label: Label) -> Result<&Relation> {
        Ok(&self.leq[self.slot(label)?])
    }

    pub fn sim(&self, label: Label) -> Result<&Relation> {
        Ok(&self.sim[self.slot(label)?])
    }

    /// Set of agents a label stands for.
    pub fn label_mask(&self, label: Label) -> Mask {
        match label {
            Label::Group(m) => m,
            Label::Everyone => full_mask(self.agents.len()),
        }
    }

    /// Whether the group of `big` contains the group of `small`, as labels:
    /// the full group contains everything, and a named group contains its
    /// subgroups.
    pub fn label_includes(&self, big: Label, small: Label) -> bool {
        match (big, small) {
            (Label::Everyone, _) => true,
            (Label::Group(_), Label::Everyone) => false,
            (Label::Group(b), Label::Group(s)) => s & !b == 0,
        }
    }

    /// The stored label a syntactic group refers to.
    pub fn label_for(&self, group: &Group) -> Result<Label> {
        match self.signature {
            Signature::Full => Ok(Label::Group(resolve_group(group, &self.agents)?)),
            Signature::Fragment => fragment_label(group, &self.agents),
        }
    }

    /// Keeps only the individual and full-group relations.
    pub fn to_fragment(&self) -> EvPseudoModel {
        if self.signature == Signature::Fragment {
            return self.clone();
        }
        EvPseudoModel::from_fn(self.n, self.agents.clone(), Signature::Fragment, self.valuation.clone(), |l| {
            (self.leq(l).expect("label").clone(), self.sim(l).expect("label").clone())
        })
        .expect("same shapes")
    }
}

/// Label of a group in the fragment signature: `{A}` and any group naming all
/// of at least two agents go to the full-group label, singletons to their own.
pub(crate) fn fragment_label(group: &Group, agents: &[String]) -> Result<Label> {
    let mask = resolve_group(group, agents)?;
    let single = mask.count_ones() == 1;
    if group.is_all() || (mask == full_mask(agents.len()) && !single) {
        Ok(Label::Everyone)
    } else if single {
        Ok(Label::Group(mask))
    } else {
        Err(Error::GroupUnavailable(group.to_string()))
    }
}

/// Preorders, equivalences, Anti-Monotonicity and Inclusion.
pub fn validate_ev_pseudo(s: &EvPseudoModel) -> ValidationReport {
    let mut r = ValidationReport::default();
    for (k, &l) in s.labels.iter().enumerate() {
        if !s.leq[k].is_preorder() {
            r.push(format!("{l:?}: evidence relation is not a preorder"));
        }
        if !s.sim[k].is_equivalence() {
            r.push(format!("{l:?}: information relation is not an equivalence"));
        }
        if !s.leq[k].is_subset(&s.sim[k]) {
            r.push(format!("{l:?}: Inclusion violated"));
        }
    }
    for (k, &big) in s.labels.iter().enumerate() {
        for (j, &small) in s.labels.iter().enumerate() {
            if k != j && s.label_includes(big, small) {
                if !s.leq[k].is_subset(&s.leq[j]) {
                    r.push(format!("Anti-Monotonicity violated for evidence: {big:?} vs {small:?}"));
                }
                if !s.sim[k].is_subset(&s.sim[j]) {
                    r.push(format!("Anti-Monotonicity violated for information: {big:?} vs {small:?}"));
                }
            }
        }
    }
    check_valuation(s.n, &s.valuation, &mut r);
    r
}

/// The Intersection condition: group relations are intersections of the
/// individual ones.
pub fn is_standard(s: &EvPseudoModel) -> ValidationReport {
    let mut r = ValidationReport::default();
    for &l in &s.labels {
        let mask = s.label_mask(l);
        let mut leq = Relation::total(s.n);
        let mut sim = Relation::total(s.n);
        for i in members(mask) {
            leq = leq.intersection(s.leq(Label::Group(1 << i)).expect("singleton"));
            sim = sim.intersection(s.sim(Label::Group(1 << i)).expect("singleton"));
        }
        if &leq != s.leq(l).expect("label") {
            r.push(format!("{l:?}: evidence relation is not the intersection"));
        }
        if &sim != s.sim(l).expect("label") {
            r.push(format!("{l:?}: information relation is not the intersection"));
        }
    }
    r
}

/// Materializes every group relation as an intersection.
pub fn ev_pseudo_of_rel(x: &RelationalEvidenceModel) -> Result<EvPseudoModel> {
    super::validate_relational(x).into_result()?;
    EvPseudoModel::from_fn(x.carrier_size(), x.agents().to_vec(), Signature::Full, x.valuation().clone(), |l| {
        let Label::Group(m) = l else { unreachable!() };
        (x.group_leq(m).expect("mask"), x.group_sim(m).expect("mask"))
    })
}

/// Keeps the individual relations of a standard pseudo-model.
pub fn rel_of_standard_pseudo(s: &EvPseudoModel) -> Result<RelationalEvidenceModel> {
    validate_ev_pseudo(s).into_result()?;
    let report = is_standard(s);
    if !report.is_valid() {
        return Err(Error::NotStandard(report.violations.join("; ")));
    }
    let k = s.agents.len();
    let leq = (0..k).map(|i| s.leq(Label::Group(1 << i)).expect("singleton").clone()).collect();
    let sim = (0..k).map(|i| s.sim(Label::Group(1 << i)).expect("singleton").clone()).collect();
    RelationalEvidenceModel::new(s.n, s.agents.clone(), leq, sim, s.valuation.clone())
}
