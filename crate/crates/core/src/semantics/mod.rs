//! Evaluation of formulas over every model kind.
//!
//! On topo-e-models, knowledge and belief are computed by their set-theoretic
//! definitions; the translation path is available separately as an oracle.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::models::{
    group_structure, resolve_group, share_update, EvPseudoModel, KBPseudoModel, Mask, Relation,
    RelationalEvidenceModel, TopoEModel,
};
use crate::syntax::{expand_kb, Formula, Group, Modality};
use crate::topology::{closure, dense_open, interior, Partition, StateSet, Topology};

/// Extension of a formula, with the extension of every subformula when a
/// trace was requested.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalResult {
    pub extension: StateSet,
    pub trace: Option<BTreeMap<Formula, StateSet>>,
}

trait Interpretation: Sized {
    fn size(&self) -> usize;
    fn atom(&self, p: &str) -> Result<StateSet>;
    fn modal(&mut self, m: Modality, g: &Group, arg: &StateSet) -> Result<StateSet>;
    fn share(&self, g: &Group) -> Result<Self>;
}

fn lookup_atom(v: &BTreeMap<String, StateSet>, p: &str) -> Result<StateSet> {
    v.get(p).cloned().ok_or_else(|| Error::UnknownAtom(p.to_string()))
}

fn eval<S: Interpretation>(
    s: &mut S,
    f: &Formula,
    trace: &mut Option<BTreeMap<Formula, StateSet>>,
) -> Result<StateSet> {
    if let Some(t) = trace.as_ref() {
        if let Some(v) = t.get(f) {
            return Ok(v.clone());
        }
    }
    let v = match f {
        Formula::Atom(p) => s.atom(p)?,
        Formula::Not(a) => eval(s, a, trace)?.complement(),
        Formula::And(a, b) => eval(s, a, trace)?.intersection(&eval(s, b, trace)?),
        Formula::Share(g, a) => {
            let mut updated = s.share(g)?;
            // Subformulas of the updated model live in a separate scope.
            let mut inner = trace.as_ref().map(|_| BTreeMap::new());
            eval(&mut updated, a, &mut inner)?
        }
        other => {
            let (m, g, a) = other.as_modal().expect("modal");
            let arg = eval(s, a, trace)?;
            s.modal(m, g, &arg)?
        }
    };
    if let Some(t) = trace.as_mut() {
        t.insert(f.clone(), v.clone());
    }
    Ok(v)
}

fn run<S: Interpretation>(mut s: S, f: &Formula, traced: bool) -> Result<EvalResult> {
    let mut trace = traced.then(BTreeMap::new);
    let extension = eval(&mut s, f, &mut trace)?;
    debug_assert_eq!(extension.carrier_size(), s.size());
    Ok(EvalResult { extension, trace })
}

/// The six group operators applied to one proposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpTable {
    pub forall: StateSet,
    pub nec: StateSet,
    pub poss: StateSet,
    pub belief: StateSet,
    pub knowledge: StateSet,
    pub knowledge_dual: StateSet,
}

/// `[∀](P) = {x | Π(x) ⊆ P}`.
pub fn forall_op(p: &Partition, a: &StateSet) -> StateSet {
    let mut out = StateSet::empty(a.carrier_size());
    for c in p.cells() {
        if c.is_subset(a) {
            out.union_with(c);
        }
    }
    out
}

/// `B(P) = {x | Π(x) ⊆ Cl(Int(P))}`.
pub fn belief_op(p: &Partition, t: &Topology, a: &StateSet) -> Result<StateSet> {
    Ok(forall_op(p, &closure(t, &interior(t, a)?)?))
}

/// `K(P) = Int(P) ∩ B(P)`, computed from its definition
/// `{x ∈ Int(P) | Π(x) ⊆ Cl(Int(P))}`.
pub fn knowledge_op(p: &Partition, t: &Topology, a: &StateSet) -> Result<StateSet> {
    let int = interior(t, a)?;
    let cl = closure(t, &int)?;
    let mut out = StateSet::empty(a.carrier_size());
    for x in int.iter() {
        if p.cell_of(x).is_subset(&cl) {
            out.insert(x);
        }
    }
    Ok(out)
}

/// All six group operators of `group` on `a`, computed on sets.
pub fn op_table(m: &TopoEModel, group: Mask, a: &StateSet) -> Result<OpTable> {
    if a.carrier_size() != m.carrier_size() {
        return Err(Error::CarrierMismatch(a.carrier_size(), m.carrier_size()));
    }
    let (p, t) = group_structure(m, group)?;
    let knowledge = knowledge_op(&p, &t, a)?;
    Ok(OpTable {
        forall: forall_op(&p, a),
        nec: interior(&t, a)?,
        poss: closure(&t, a)?,
        belief: belief_op(&p, &t, a)?,
        knowledge_dual: knowledge_op(&p, &t, &a.complement())?.complement(),
        knowledge,
    })
}

/// Knowledge as interior in the dense-open topology of the group structure.
pub fn knowledge_dense_interior(m: &TopoEModel, group: Mask, a: &StateSet) -> Result<StateSet> {
    let (p, t) = group_structure(m, group)?;
    interior(&dense_open(&t, &p)?, a)
}

struct TopoInterp<'a> {
    model: std::borrow::Cow<'a, TopoEModel>,
    cache: BTreeMap<Mask, (Partition, Topology)>,
}

impl TopoInterp<'_> {
    fn structure(&mut self, g: &Group) -> Result<&(Partition, Topology)> {
        let mask = resolve_group(g, self.model.agents())?;
        if !self.cache.contains_key(&mask) {
            let s = group_structure(&self.model, mask)?;
            self.cache.insert(mask, s);
        }
        Ok(&self.cache[&mask])
    }
}

impl Interpretation for TopoInterp<'_> {
    fn size(&self) -> usize {
        self.model.carrier_size()
    }

    fn atom(&self, p: &str) -> Result<StateSet> {
        lookup_atom(self.model.valuation(), p)
    }

    fn modal(&mut self, m: Modality, g: &Group, a: &StateSet) -> Result<StateSet> {
        let (p, t) = self.structure(g)?;
        match m {
            Modality::Box => interior(t, a),
            Modality::Forall => Ok(forall_op(p, a)),
            Modality::K => knowledge_op(p, t, a),
            Modality::B => belief_op(p, t, a),
            Modality::Share => unreachable!(),
        }
    }

    fn share(&self, g: &Group) -> Result<Self> {
        let mask = resolve_group(g, self.model.agents())?;
        Ok(TopoInterp { model: std::borrow::Cow::Owned(share_update(&self.model, mask)?), cache: BTreeMap::new() })
    }
}

fn topo_interp(m: &TopoEModel) -> TopoInterp<'_> {
    TopoInterp { model: std::borrow::Cow::Borrowed(m), cache: BTreeMap::new() }
}

/// Evaluates any formula, including knowledge, belief and sharing.
pub fn eval_topo(m: &TopoEModel, f: &Formula) -> Result<EvalResult> {
    run(topo_interp(m), f, false)
}

pub fn eval_topo_traced(m: &TopoEModel, f: &Formula) -> Result<EvalResult> {
    run(topo_interp(m), f, true)
}

/// Oracle path: translate knowledge and belief away first.
pub fn eval_topo_translated(m: &TopoEModel, f: &Formula) -> Result<StateSet> {
    Ok(eval_topo(m, &expand_kb(f)?)?.extension)
}

fn static_only(m: Modality, what: &str) -> Result<StateSet> {
    Err(Error::Unsupported(format!("{m:?} modality is not interpreted on {what}; translate or reduce first")))
}

struct RelInterp<'a> {
    model: &'a RelationalEvidenceModel,
    cache: BTreeMap<Mask, (Relation, Relation)>,
}

impl Interpretation for RelInterp<'_> {
    fn size(&self) -> usize {
        self.model.carrier_size()
    }

    fn atom(&self, p: &str) -> Result<StateSet> {
        lookup_atom(self.model.valuation(), p)
    }

    fn modal(&mut self, m: Modality, g: &Group, a: &StateSet) -> Result<StateSet> {
        if !matches!(m, Modality::Box | Modality::Forall) {
            return static_only(m, "relational evidence models");
        }
        let mask = resolve_group(g, self.model.agents())?;
        if !self.cache.contains_key(&mask) {
            let pair = (self.model.group_leq(mask)?, self.model.group_sim(mask)?);
            self.cache.insert(mask, pair);
        }
        let (leq, sim) = &self.cache[&mask];
        Ok(if m == Modality::Box { leq.universal_preimage(a) } else { sim.universal_preimage(a) })
    }

    fn share(&self, _: &Group) -> Result<Self> {
        Err(Error::Unsupported("sharing on relational models; reduce first".into()))
    }
}

pub fn eval_relational(x: &RelationalEvidenceModel, f: &Formula) -> Result<EvalResult> {
    run(RelInterp { model: x, cache: BTreeMap::new() }, f, false)
}

pub fn eval_relational_traced(x: &RelationalEvidenceModel, f: &Formula) -> Result<EvalResult> {
    run(RelInterp { model: x, cache: BTreeMap::new() }, f, true)
}

struct PseudoInterp<'a>(&'a EvPseudoModel);

impl Interpretation for PseudoInterp<'_> {
    fn size(&self) -> usize {
        self.0.carrier_size()
    }

    fn atom(&self, p: &str) -> Result<StateSet> {
        lookup_atom(self.0.valuation(), p)
    }

    fn modal(&mut self, m: Modality, g: &Group, a: &StateSet) -> Result<StateSet> {
        let l = self.0.label_for(g)?;
        match m {
            Modality::Box => Ok(self.0.leq(l)?.universal_preimage(a)),
            Modality::Forall => Ok(self.0.sim(l)?.universal_preimage(a)),
            _ => static_only(m, "evidence pseudo-models"),
        }
    }

    fn share(&self, _: &Group) -> Result<Self> {
        Err(Error::Unsupported("sharing on pseudo-models; reduce first".into()))
    }
}

pub fn eval_ev_pseudo(s: &EvPseudoModel, f: &Formula) -> Result<EvalResult> {
    run(PseudoInterp(s), f, false)
}

pub fn eval_ev_pseudo_traced(s: &EvPseudoModel, f: &Formula) -> Result<EvalResult> {
    run(PseudoInterp(s), f, true)
}

struct KbInterp<'a>(&'a KBPseudoModel);

impl Interpretation for KbInterp<'_> {
    fn size(&self) -> usize {
        self.0.carrier_size()
    }

    fn atom(&self, p: &str) -> Result<StateSet> {
        lookup_atom(self.0.valuation(), p)
    }

    fn modal(&mut self, m: Modality, g: &Group, a: &StateSet) -> Result<StateSet> {
        let l = self.0.label_for(g)?;
        match m {
            Modality::K => Ok(self.0.know(l)?.universal_preimage(a)),
            Modality::B => Ok(self.0.believe(l)?.universal_preimage(a)),
            _ => static_only(m, "KB pseudo-models"),
        }
    }

    fn share(&self, _: &Group) -> Result<Self> {
        Err(Error::Unsupported("sharing on KB pseudo-models; reduce first".into()))
    }
}

pub fn eval_kb_pseudo(m: &KBPseudoModel, f: &Formula) -> Result<EvalResult> {
    run(KbInterp(m), f, false)
}

pub fn eval_kb_pseudo_traced(m: &KBPseudoModel, f: &Formula) -> Result<EvalResult> {
    run(KbInterp(m), f, true)
}

enum Target<'a> {
    Topo(TopoInterp<'a>),
    Rel(RelInterp<'a>),
    Pseudo(PseudoInterp<'a>),
    Kb(KbInterp<'a>),
}

/// Evaluates many formulas against one model, sharing group structures and
/// subformula extensions between calls.
pub struct Evaluator<'a> {
    target: Target<'a>,
    memo: Option<BTreeMap<Formula, StateSet>>,
}

impl<'a> Evaluator<'a> {
    fn with(target: Target<'a>) -> Self {
        Evaluator { target, memo: Some(BTreeMap::new()) }
    }

    pub fn topo(m: &'a TopoEModel) -> Self {
        Self::with(Target::Topo(topo_interp(m)))
    }

    pub fn relational(x: &'a RelationalEvidenceModel) -> Self {
        Self::with(Target::Rel(RelInterp { model: x, cache: BTreeMap::new() }))
    }

    pub fn ev_pseudo(s: &'a EvPseudoModel) -> Self {
        Self::with(Target::Pseudo(PseudoInterp(s)))
    }

    pub fn kb_pseudo(m: &'a KBPseudoModel) -> Self {
        Self::with(Target::Kb(KbInterp(m)))
    }

    pub fn carrier_size(&self) -> usize {
        match &self.target {
            Target::Topo(s) => s.size(),
            Target::Rel(s) => s.size(),
            Target::Pseudo(s) => s.size(),
            Target::Kb(s) => s.size(),
        }
    }

    pub fn eval(&mut self, f: &Formula) -> Result<StateSet> {
        let memo = &mut self.memo;
        match &mut self.target {
            Target::Topo(s) => eval(s, f, memo),
            Target::Rel(s) => eval(s, f, memo),
            Target::Pseudo(s) => eval(s, f, memo),
            Target::Kb(s) => eval(s, f, memo),
        }
    }

    /// Whether `f` holds at every state.
    pub fn valid(&mut self, f: &Formula) -> Result<bool> {
        Ok(self.eval(f)?.is_full())
    }
}
