//! Passing between evidence pseudo-models and knowledge-belief
//! pseudo-models of the individual/full-group fragment.

use crate::error::{Error, Result};
use crate::models::{
    is_max_dense, max_worlds, validate_kb_pseudo, EvPseudoModel, KBPseudoModel, Label, Relation, Signature,
};
use crate::topology::StateSet;

fn fragment_labels(k: usize) -> Vec<Label> {
    (0..k).map(|i| Label::Group(1 << i)).chain([Label::Everyone]).collect()
}

/// `s → w` iff `s ∼ w` and `w` is `≤`-maximal.
pub fn belief_relation(leq: &Relation, sim: &Relation) -> Relation {
    let max = max_worlds(leq);
    let rows = sim.rows().iter().map(|r| r.intersection(&max)).collect();
    Relation::from_rows(rows).expect("same carrier")
}

/// Knowledge `⊴ = ≤ ∪ →` and belief `→` for every fragment label. A model in
/// the full signature is first cut down to the fragment.
pub fn kb_from_evidence(s: &EvPseudoModel) -> Result<KBPseudoModel> {
    let s = s.to_fragment();
    let mut know = Vec::new();
    let mut believe = Vec::new();
    for l in fragment_labels(s.agents().len()) {
        let leq = s.leq(l)?;
        if !is_max_dense(leq)? {
            return Err(Error::NotMaxDense);
        }
        let arrow = belief_relation(leq, s.sim(l)?);
        know.push(leq.union(&arrow));
        believe.push(arrow);
    }
    KBPseudoModel::new(s.carrier_size(), s.agents().to_vec(), know, believe, s.valuation().clone())
}

/// `s ∼ w` iff they have a common `r`-successor.
pub fn confluence(r: &Relation) -> Relation {
    let n = r.size();
    let mut out = Relation::empty(n);
    for s in 0..n {
        for w in 0..n {
            if r.successors(s).intersects(r.successors(w)) {
                out.insert(s, w);
            }
        }
    }
    out
}

/// `s ∼ w` iff they have the same `r`-successors.
pub fn same_successors(r: &Relation) -> Relation {
    let n = r.size();
    let mut out = Relation::empty(n);
    for s in 0..n {
        for w in 0..n {
            if r.successors(s) == r.successors(w) {
                out.insert(s, w);
            }
        }
    }
    out
}

/// The three descriptions of the recovered equivalence at `label`:
/// knowledge confluence, belief confluence and equal belief successors.
/// On a valid model they coincide.
pub fn sim_characterizations(m: &KBPseudoModel, label: Label) -> Result<[Relation; 3]> {
    let know = m.know(label)?;
    let bel = m.believe(label)?;
    Ok([confluence(know), confluence(bel), same_successors(bel)])
}

/// The recovered full-group preorder: `s ≤ w` iff `s` reaches `w` under the
/// full-group knowledge relation and under every agent's, and `w = s`
/// whenever `s` is maximal for full-group knowledge.
pub fn recovered_group_leq(m: &KBPseudoModel) -> Relation {
    let n = m.carrier_size();
    let know_a = m.know(Label::Everyone).expect("full group");
    let mut both = know_a.clone();
    for i in 0..m.agents().len() {
        both = both.intersection(m.know(Label::Group(1 << i)).expect("agent"));
    }
    let max = max_worlds(know_a);
    let rows =
        (0..n).map(|s| if max.contains(s) { StateSet::singleton(n, s) } else { both.successors(s).clone() }).collect();
    Relation::from_rows(rows).expect("same carrier")
}

/// Evidence relations representing a valid KB pseudo-model, in the fragment
/// signature: agents keep `≤ = ⊴` and every `∼` is knowledge confluence.
pub fn evidence_from_kb(m: &KBPseudoModel) -> Result<EvPseudoModel> {
    let report = validate_kb_pseudo(m);
    if !report.is_valid() {
        return Err(Error::Invalid(
            report
                .failed()
                .iter()
                .map(|c| format!("{}: {}", c.name, c.counterexample.clone().unwrap_or_default()))
                .collect(),
        ));
    }
    let group_leq = recovered_group_leq(m);
    EvPseudoModel::from_fn(m.carrier_size(), m.agents().to_vec(), Signature::Fragment, m.valuation().clone(), |l| {
        let know = m.know(l).expect("label");
        let leq = if l == Label::Everyone { group_leq.clone() } else { know.clone() };
        (leq, confluence(know))
    })
}
