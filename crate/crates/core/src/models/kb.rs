use super::pseudo::{fragment_label, Label};
use super::{check_agents, full_mask, Relation, Valuation};
use crate::error::{Error, Result};
use crate::syntax::Group;

/// Knowledge relations `⊴_α` and belief relations `→_α` for each agent and
/// the full group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KBPseudoModel {
    n: usize,
    agents: Vec<String>,
    know: Vec<Relation>,
    believe: Vec<Relation>,
    valuation: Valuation,
}

impl KBPseudoModel {
    /// `know` and `believe` list one relation per agent followed by the one for
    /// the full group.
    pub fn new(
        n: usize,
        agents: Vec<String>,
        know: Vec<Relation>,
        believe: Vec<Relation>,
        valuation: Valuation,
    ) -> Result<KBPseudoModel> {
        check_agents(&agents)?;
        let k = agents.len() + 1;
        if know.len() != k || believe.len() != k {
            return Err(Error::Invalid(vec![format!("expected {k} knowledge and belief relations")]));
        }
        for r in know.iter().chain(&believe) {
            if r.size() != n {
                return Err(Error::CarrierMismatch(r.size(), n));
            }
        }
        Ok(KBPseudoModel { n, agents, know, believe, valuation })
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    /// Labels in storage order: agents, then the full group.
    pub fn labels(&self) -> Vec<Label> {
        (0..self.agents.len()).map(|i| Label::Group(1 << i)).chain([Label::Everyone]).collect()
    }

    fn slot(&self, label: Label) -> Result<usize> {
        match label {
            Label::Everyone => Ok(self.agents.len()),
            Label::Group(m) if m.count_ones() == 1 && m & !full_mask(self.agents.len()) == 0 => {
                Ok(m.trailing_zeros() as usize)
            }
            l => Err(Error::GroupUnavailable(format!("{l:?}"))),
        }
    }

    pub fn know(&self, label: Label) -> Result<&Relation> {
        Ok(&self.know[self.slot(label)?])
    }

    pub fn believe(&self, label: Label) -> Result<&Relation> {
        Ok(&self.believe[self.slot(label)?])
    }

    pub fn label_for(&self, group: &Group) -> Result<Label> {
        fragment_label(group, &self.agents)
    }
}

/// Outcome of one condition, with a counterexample when it fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub name: &'static str,
    pub passed: bool,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KbReport {
    pub conditions: Vec<Condition>,
}

impl KbReport {
    pub fn is_valid(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&Condition> {
        self.conditions.iter().filter(|c| !c.passed).collect()
    }
}

pub const KB_CONDITIONS: [&str; 11] = [
    "knowledge preorder",
    "belief seriality",
    "belief transitivity",
    "belief Euclideanity",
    "belief inclusion",
    "strong transitivity",
    "strong Euclideanity",
    "full belief",
    "WM-Condition",
    "Super-Introspection condition",
    "CBD-Condition",
];

/// Checks every defining condition of a KB pseudo-model.
pub fn validate_kb_pseudo(m: &KBPseudoModel) -> KbReport {
    let n = m.n;
    let labels = m.labels();
    let name = |l: Label| match l {
        Label::Everyone => "A".to_string(),
        Label::Group(mask) => m.agents[mask.trailing_zeros() as usize].clone(),
    };
    let triples = || (0..n).flat_map(move |s| (0..n).flat_map(move |t| (0..n).map(move |u| (s, t, u))));
    let mut found: Vec<Option<String>> = vec![None; KB_CONDITIONS.len()];
    let mut note = |k: usize, msg: String| {
        if found[k].is_none() {
            found[k] = Some(msg);
        }
    };

    for &l in &labels {
        let a = name(l);
        let kn = m.know(l).expect("label");
        let be = m.believe(l).expect("label");
        if let Some(s) = (0..n).find(|&s| !kn.contains(s, s)) {
            note(0, format!("α={a}: not reflexive at s={s}"));
        }
        if let Some(s) = (0..n).find(|&s| be.successors(s).is_empty()) {
            note(1, format!("α={a}: seriality violated at s={s}"));
        }
        if let Some((s, t)) = be.pairs().find(|&(s, t)| !kn.contains(s, t)) {
            note(4, format!("α={a}: s={s} → t={t} but not s ⊴ t"));
        }
        for (s, t, u) in triples() {
            if kn.contains(s, t) && kn.contains(t, u) && !kn.contains(s, u) {
                note(0, format!("α={a}: not transitive at ({s},{t},{u})"));
            }
            if be.contains(s, t) && be.contains(t, u) && !be.contains(s, u) {
                note(2, format!("α={a}: ({s},{t},{u})"));
            }
            if be.contains(s, t) && be.contains(s, u) && !be.contains(t, u) {
                note(3, format!("α={a}: ({s},{t},{u})"));
            }
            if kn.contains(s, t) && be.contains(t, u) && !be.contains(s, u) {
                note(5, format!("α={a}: s={s} ⊴ t={t} → u={u} but not s → u"));
            }
            if kn.contains(s, t) && be.contains(s, u) && !be.contains(t, u) {
                note(6, format!("α={a}: s={s} ⊴ t={t}, s → u={u} but not t → u"));
            }
            if be.contains(s, t) && kn.contains(t, u) && !be.contains(s, u) {
                note(7, format!("α={a}: s={s} → t={t} ⊴ u={u} but not s → u"));
            }
        }
    }

    let k = m.agents.len();
    let know_a = &m.know[k];
    let bel_a = &m.believe[k];
    for i in 0..k {
        let allowed = m.know[i].union(bel_a);
        if let Some((s, t)) = know_a.pairs().find(|&(s, t)| !allowed.contains(s, t)) {
            note(8, format!("WM-Condition violated for agent {} at ({s},{t})", m.agents[i]));
        }
        for (s, t) in know_a.pairs() {
            if m.believe[i].successors(s) != m.believe[i].successors(t) {
                let u = m.believe[i]
                    .successors(s)
                    .union(m.believe[i].successors(t))
                    .difference(&m.believe[i].successors(s).intersection(m.believe[i].successors(t)))
                    .first()
                    .expect("sets differ");
                note(9, format!("agent {}: s={s} ⊴_A t={t} disagree on belief successor u={u}", m.agents[i]));
            }
        }
    }
    for s in 0..n {
        let mut w = bel_a.successors(s).clone();
        for i in 0..k {
            w.intersect_with(m.know[i].successors(s));
        }
        if w.is_empty() {
            note(10, format!("CBD-Condition violated at s={s}"));
        }
    }

    let conditions = KB_CONDITIONS
        .iter()
        .zip(found)
        .map(|(&name, c)| Condition { name, passed: c.is_none(), counterexample: c })
        .collect();
    KbReport { conditions }
}
