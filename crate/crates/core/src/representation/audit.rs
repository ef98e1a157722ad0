//! Soundness audit: instantiate axiom schemes over random models and report
//! every instance that fails somewhere.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::correspond::kb_from_evidence;
use crate::error::Result;
use crate::fixtures::example1;
use crate::models::{members, EvPseudoModel, KBPseudoModel, Signature, TopoEModel, Valuation};
use crate::random::{atom_names, random_ev_pseudo, random_formula, random_topo_model, FormulaSpec};
use crate::semantics::Evaluator;
use crate::syntax::{Formula as F, Group, Modality};
use crate::topology::{Partition, StateSet, Topology};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AuditSemantics {
    Topo,
    EvPseudo,
    KbPseudo,
}

impl AuditSemantics {
    pub const ALL: [AuditSemantics; 3] = [AuditSemantics::Topo, AuditSemantics::EvPseudo, AuditSemantics::KbPseudo];

    pub fn name(self) -> &'static str {
        match self {
            AuditSemantics::Topo => "topo",
            AuditSemantics::EvPseudo => "ev_pseudo",
            AuditSemantics::KbPseudo => "kb_pseudo",
        }
    }
}

#[derive(Clone, Debug)]
pub struct AuditConfig {
    /// Random models per semantics.
    pub models: usize,
    pub seed: u64,
    pub max_states: usize,
    pub max_agents: usize,
    /// Random formulas added to each model's instantiation pool.
    pub pool_random: usize,
    pub pool_depth: usize,
    /// Cap on instances of the distributed-consistency schemes per model.
    pub cbd_cap: usize,
    pub semantics: Vec<AuditSemantics>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            models: 1000,
            seed: 0,
            max_states: 5,
            max_agents: 3,
            pool_random: 3,
            pool_depth: 2,
            cbd_cap: 200,
            semantics: AuditSemantics::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub semantics: AuditSemantics,
    /// Position of the model in its semantics' sequence; the seeded worked
    /// example, when present, is model 0 of the topological run.
    pub model: usize,
    pub state: usize,
    pub instance: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeReport {
    pub name: &'static str,
    pub source: &'static str,
    pub expected_valid: bool,
    pub instances: u64,
    pub failures: u64,
    pub first: Option<Counterexample>,
}

impl SchemeReport {
    /// Valid schemes must never fail; expected-invalid ones must fail at
    /// least once.
    pub fn as_expected(&self) -> bool {
        if self.expected_valid {
            self.failures == 0
        } else {
            self.failures > 0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub schemes: Vec<SchemeReport>,
    pub models: BTreeMap<AuditSemantics, usize>,
}

impl AuditReport {
    pub fn is_ok(&self) -> bool {
        self.schemes.iter().all(SchemeReport::as_expected)
    }

    pub fn false_positives(&self) -> Vec<&SchemeReport> {
        self.schemes.iter().filter(|s| s.expected_valid && s.failures > 0).collect()
    }

    pub fn false_negatives(&self) -> Vec<&SchemeReport> {
        self.schemes.iter().filter(|s| !s.expected_valid && s.failures == 0).collect()
    }

    pub fn scheme(&self, name: &str) -> Option<&SchemeReport> {
        self.schemes.iter().find(|s| s.name == name)
    }
}

const T1: &str = "evidence logic";
const T2: &str = "knowledge and belief";
const T3: &str = "evidence sharing";
const T4: &str = "full-group sharing";
const GEN: &str = "subgroup generalizations";
const BAD: &str = "expected invalid";

// (name, source, expected valid)
const SCHEMES: &[(&str, &str, bool)] = &[
    ("K for Box", T1, true),
    ("T for Box", T1, true),
    ("4 for Box", T1, true),
    ("K for Forall", T1, true),
    ("T for Forall", T1, true),
    ("4 for Forall", T1, true),
    ("5 for Forall", T1, true),
    ("Monotonicity for Box", T1, true),
    ("Monotonicity for Forall", T1, true),
    ("Inclusion", T1, true),
    ("K for K", T2, true),
    ("K for B", T2, true),
    ("Truthfulness of knowledge", T2, true),
    ("Positive introspection of knowledge", T2, true),
    ("Consistency of beliefs", T2, true),
    ("Strong positive introspection of beliefs", T2, true),
    ("Strong negative introspection of beliefs", T2, true),
    ("Knowledge implies belief", T2, true),
    ("Full belief", T2, true),
    ("Super-introspection", T2, true),
    ("Weak monotonicity", T2, true),
    ("Consistency of group belief with distributed knowledge", T2, true),
    ("Atomic reduction", T3, true),
    ("Negation reduction", T3, true),
    ("Conjunction reduction", T3, true),
    ("Box reduction", T3, true),
    ("Forall reduction", T3, true),
    ("Atomic reduction for the full group", T4, true),
    ("Negation reduction for the full group", T4, true),
    ("K reduction", T4, true),
    ("B reduction", T4, true),
    ("Generalized super-introspection", GEN, true),
    ("Generalized weak monotonicity", GEN, true),
    ("Generalized distributed consistency", GEN, true),
    ("Group monotonicity of knowledge", BAD, false),
    ("Joint knowledge implies group belief", BAD, false),
];

fn scheme_id(name: &str) -> usize {
    SCHEMES.iter().position(|s| s.0 == name).expect("registered scheme")
}

/// Two states, discrete hard evidence and no soft evidence: the hard
/// evidence cells are not open, so evidence inclusion fails.
pub fn corrupted_model() -> TopoEModel {
    let n = 2;
    let mut v = Valuation::new();
    v.insert("p".into(), StateSet::singleton(n, 0));
    TopoEModel::new(n, vec!["a".into()], vec![Partition::discrete(n)], vec![Topology::indiscrete(n)], v)
        .expect("shapes agree")
}

struct Instances {
    list: Vec<(usize, F)>,
}

impl Instances {
    fn push(&mut self, name: &str, f: F) {
        self.list.push((scheme_id(name), f));
    }
}

fn pool(rng: &mut ChaCha8Rng, atoms: &[String], spec: Option<FormulaSpec>, extra: usize) -> Vec<F> {
    let p = F::atom(&atoms[0]);
    let mut out = vec![p.clone(), F::not(p.clone())];
    if let Some(q) = atoms.get(1) {
        let q = F::atom(q);
        out.push(q.clone());
        out.push(F::and(p.clone(), F::not(q.clone())));
        out.push(F::or(p, q));
    }
    if let Some(spec) = spec {
        for _ in 0..extra {
            out.push(random_formula(rng, &spec));
        }
    }
    out
}

/// Named groups over `agents` plus `{A}`.
fn all_groups(agents: &[String]) -> Vec<Group> {
    let k = agents.len();
    let mut gs: Vec<Group> =
        (1..(1u32 << k)).map(|m| Group::agents(members(m).map(|i| agents[i].clone())).expect("non-empty")).collect();
    gs.push(Group::All);
    gs
}

fn mask_of(g: &Group, agents: &[String]) -> u32 {
    match g {
        Group::All => (1u32 << agents.len()) - 1,
        Group::Agents(s) => s.iter().map(|a| 1u32 << agents.iter().position(|b| b == a).expect("agent")).sum(),
    }
}

fn evidence_instances(out: &mut Instances, fs: &[F], groups: &[Group], sub: &dyn Fn(&Group, &Group) -> bool) {
    for (k, phi) in fs.iter().enumerate() {
        let psi = &fs[(k + 1) % fs.len()];
        for g in groups {
            let b = |x: F| F::boxed(g.clone(), x);
            let a = |x: F| F::forall(g.clone(), x);
            out.push(
                "K for Box",
                F::implies(b(F::implies(phi.clone(), psi.clone())), F::implies(b(phi.clone()), b(psi.clone()))),
            );
            out.push("T for Box", F::implies(b(phi.clone()), phi.clone()));
            out.push("4 for Box", F::implies(b(phi.clone()), b(b(phi.clone()))));
            out.push(
                "K for Forall",
                F::implies(a(F::implies(phi.clone(), psi.clone())), F::implies(a(phi.clone()), a(psi.clone()))),
            );
            out.push("T for Forall", F::implies(a(phi.clone()), phi.clone()));
            out.push("4 for Forall", F::implies(a(phi.clone()), a(a(phi.clone()))));
            out.push("5 for Forall", F::implies(F::not(a(phi.clone())), a(F::not(a(phi.clone())))));
            out.push("Inclusion", F::implies(a(phi.clone()), b(phi.clone())));
            for j in groups.iter().filter(|j| sub(j, g)) {
                out.push("Monotonicity for Box", F::implies(F::boxed(j.clone(), phi.clone()), b(phi.clone())));
                out.push("Monotonicity for Forall", F::implies(F::forall(j.clone(), phi.clone()), a(phi.clone())));
            }
        }
    }
}

fn kb_instances(out: &mut Instances, rng: &mut ChaCha8Rng, fs: &[F], agents: &[String], cap: usize) {
    let alphas: Vec<Group> = agents.iter().map(|a| Group::single(a)).chain([Group::All]).collect();
    let all = Group::All;
    for (k, phi) in fs.iter().enumerate() {
        let psi = &fs[(k + 1) % fs.len()];
        for al in &alphas {
            let kk = |x: F| F::k(al.clone(), x);
            let bb = |x: F| F::b(al.clone(), x);
            out.push(
                "K for K",
                F::implies(kk(F::implies(phi.clone(), psi.clone())), F::implies(kk(phi.clone()), kk(psi.clone()))),
            );
            out.push(
                "K for B",
                F::implies(bb(F::implies(phi.clone(), psi.clone())), F::implies(bb(phi.clone()), bb(psi.clone()))),
            );
            out.push("Truthfulness of knowledge", F::implies(kk(phi.clone()), phi.clone()));
            out.push("Positive introspection of knowledge", F::implies(kk(phi.clone()), kk(kk(phi.clone()))));
            out.push("Consistency of beliefs", F::implies(bb(phi.clone()), F::not(bb(F::not(phi.clone())))));
            out.push("Strong positive introspection of beliefs", F::implies(bb(phi.clone()), kk(bb(phi.clone()))));
            out.push(
                "Strong negative introspection of beliefs",
                F::implies(F::not(bb(phi.clone())), kk(F::not(bb(phi.clone())))),
            );
            out.push("Knowledge implies belief", F::implies(kk(phi.clone()), bb(phi.clone())));
            out.push("Full belief", F::implies(bb(phi.clone()), bb(kk(phi.clone()))));
        }
        for a in agents {
            let i = Group::single(a);
            out.push(
                "Super-introspection",
                F::implies(F::b(i.clone(), phi.clone()), F::k(all.clone(), F::b(i.clone(), phi.clone()))),
            );
            out.push(
                "Weak monotonicity",
                F::implies(
                    F::and(F::k(i.clone(), phi.clone()), F::b(all.clone(), phi.clone())),
                    F::k(all.clone(), phi.clone()),
                ),
            );
            out.push(
                "Group monotonicity of knowledge",
                F::implies(F::k(i.clone(), phi.clone()), F::k(all.clone(), phi.clone())),
            );
        }
        let joint = F::conj(agents.iter().map(|a| F::k(Group::single(a), phi.clone())).collect());
        out.push("Joint knowledge implies group belief", F::implies(joint, F::b(all.clone(), phi.clone())));
    }
    for _ in 0..cap {
        let chosen: Vec<F> = agents.iter().map(|_| fs.choose(rng).expect("pool").clone()).collect();
        let ks = F::conj(agents.iter().zip(&chosen).map(|(a, f)| F::k(Group::single(a), f.clone())).collect());
        out.push(
            "Consistency of group belief with distributed knowledge",
            F::implies(ks, F::b_dual(all.clone(), F::conj(chosen))),
        );
    }
}

fn dynamic_instances(out: &mut Instances, ev: &[F], kb: &[F], groups: &[Group], agents: &[String]) {
    let atoms: Vec<F> = ev.iter().filter(|f| matches!(f, F::Atom(_))).cloned().collect();
    for i in groups {
        let sh = |x: F| F::share(i.clone(), x);
        for p in &atoms {
            out.push("Atomic reduction", F::iff(sh(p.clone()), p.clone()));
        }
        for (k, phi) in ev.iter().enumerate() {
            let psi = &ev[(k + 1) % ev.len()];
            out.push("Negation reduction", F::iff(sh(F::not(phi.clone())), F::not(sh(phi.clone()))));
            out.push(
                "Conjunction reduction",
                F::iff(sh(F::and(phi.clone(), psi.clone())), F::and(sh(phi.clone()), sh(psi.clone()))),
            );
            for j in groups {
                let ji = j.absorb(i);
                out.push(
                    "Box reduction",
                    F::iff(sh(F::boxed(j.clone(), phi.clone())), F::boxed(ji.clone(), sh(phi.clone()))),
                );
                out.push(
                    "Forall reduction",
                    F::iff(sh(F::forall(j.clone(), phi.clone())), F::forall(ji, sh(phi.clone()))),
                );
            }
        }
    }
    let all = Group::All;
    let sh = |x: F| F::share(all.clone(), x);
    for p in &atoms {
        out.push("Atomic reduction for the full group", F::iff(sh(p.clone()), p.clone()));
    }
    let alphas: Vec<Group> = agents.iter().map(|a| Group::single(a)).chain([Group::All]).collect();
    for phi in kb {
        out.push("Negation reduction for the full group", F::iff(sh(F::not(phi.clone())), F::not(sh(phi.clone()))));
        for al in &alphas {
            out.push("K reduction", F::iff(sh(F::k(al.clone(), phi.clone())), F::k(all.clone(), sh(phi.clone()))));
            out.push("B reduction", F::iff(sh(F::b(al.clone(), phi.clone())), F::b(all.clone(), sh(phi.clone()))));
        }
    }
}

fn generalized_instances(out: &mut Instances, rng: &mut ChaCha8Rng, fs: &[F], agents: &[String], cap: usize) {
    let groups = all_groups(agents);
    let sub = |j: &Group, i: &Group| mask_of(j, agents) & !mask_of(i, agents) == 0;
    for phi in fs {
        for i in &groups {
            for j in groups.iter().filter(|j| sub(j, i)) {
                out.push(
                    "Generalized super-introspection",
                    F::implies(F::b(j.clone(), phi.clone()), F::k(i.clone(), F::b(j.clone(), phi.clone()))),
                );
                out.push(
                    "Generalized weak monotonicity",
                    F::implies(
                        F::and(F::k(j.clone(), phi.clone()), F::b(i.clone(), phi.clone())),
                        F::k(i.clone(), phi.clone()),
                    ),
                );
            }
        }
    }
    let named: Vec<&Group> = groups.iter().filter(|g| !g.is_all()).collect();
    for _ in 0..cap {
        let i = *named.choose(rng).expect("groups");
        let subs: Vec<&Group> = named.iter().copied().filter(|j| sub(j, i)).collect();
        let chosen: Vec<F> = subs.iter().map(|_| fs.choose(rng).expect("pool").clone()).collect();
        let ks = F::conj(subs.iter().zip(&chosen).map(|(j, f)| F::k((*j).clone(), f.clone())).collect());
        out.push("Generalized distributed consistency", F::implies(ks, F::b_dual(i.clone(), F::conj(chosen))));
    }
}

struct Tally {
    reports: Vec<SchemeReport>,
}

impl Tally {
    fn new() -> Tally {
        let reports = SCHEMES
            .iter()
            .map(|&(name, source, expected_valid)| SchemeReport {
                name,
                source,
                expected_valid,
                instances: 0,
                failures: 0,
                first: None,
            })
            .collect();
        Tally { reports }
    }

    fn check(&mut self, ev: &mut Evaluator, inst: &Instances, semantics: AuditSemantics, model: usize) -> Result<()> {
        for (id, f) in &inst.list {
            let ext = ev.eval(f)?;
            let r = &mut self.reports[*id];
            r.instances += 1;
            if !ext.is_full() {
                r.failures += 1;
                if r.first.is_none() {
                    let state = ext.complement().first().expect("non-full");
                    r.first = Some(Counterexample { semantics, model, state, instance: f.to_string() });
                }
            }
        }
        Ok(())
    }
}

fn topo_instances(m: &TopoEModel, rng: &mut ChaCha8Rng, config: &AuditConfig) -> Instances {
    let atoms: Vec<String> = m.valuation().keys().cloned().collect();
    let agents = m.agents();
    let groups = all_groups(agents);
    let ev_spec = FormulaSpec::new(&atoms, agents, &[Modality::Box, Modality::Forall], false, config.pool_depth);
    let kb_spec = FormulaSpec::new(&atoms, agents, &[Modality::K, Modality::B], true, config.pool_depth);
    let kbg_spec = FormulaSpec::new(&atoms, agents, &[Modality::K, Modality::B], false, config.pool_depth);
    let ev = pool(rng, &atoms, Some(ev_spec), config.pool_random);
    let kb = pool(rng, &atoms, Some(kb_spec), config.pool_random);
    let kbg = pool(rng, &atoms, Some(kbg_spec), config.pool_random);
    let mut out = Instances { list: vec![] };
    let sub = |j: &Group, i: &Group| mask_of(j, agents) & !mask_of(i, agents) == 0;
    evidence_instances(&mut out, &ev, &groups, &sub);
    kb_instances(&mut out, rng, &kb, agents, config.cbd_cap / 2);
    dynamic_instances(&mut out, &ev[..ev.len().min(4)], &kb[..kb.len().min(4)], &groups, agents);
    generalized_instances(&mut out, rng, &kbg, agents, config.cbd_cap / 2);
    out
}

fn pseudo_instances(s: &EvPseudoModel, rng: &mut ChaCha8Rng, config: &AuditConfig) -> Instances {
    let atoms: Vec<String> = s.valuation().keys().cloned().collect();
    let agents = s.agents();
    let fragment = s.signature() == Signature::Fragment;
    let groups: Vec<Group> = if fragment {
        agents.iter().map(|a| Group::single(a)).chain([Group::All]).collect()
    } else {
        all_groups(agents)
    };
    let spec = FormulaSpec::new(&atoms, agents, &[Modality::Box, Modality::Forall], fragment, config.pool_depth);
    let ev = pool(rng, &atoms, Some(spec), config.pool_random);
    let mut out = Instances { list: vec![] };
    // Inclusion between labels is what anti-monotonicity speaks about.
    let sub = |j: &Group, i: &Group| {
        let (lj, li) = (s.label_for(j).expect("group"), s.label_for(i).expect("group"));
        s.label_includes(li, lj)
    };
    evidence_instances(&mut out, &ev, &groups, &sub);
    out
}

fn kb_model_instances(m: &KBPseudoModel, rng: &mut ChaCha8Rng, config: &AuditConfig) -> Instances {
    let atoms: Vec<String> = m.valuation().keys().cloned().collect();
    let spec = FormulaSpec::new(&atoms, m.agents(), &[Modality::K, Modality::B], true, config.pool_depth);
    let kb = pool(rng, &atoms, Some(spec), config.pool_random);
    let mut out = Instances { list: vec![] };
    kb_instances(&mut out, rng, &kb, m.agents(), config.cbd_cap);
    out
}

fn dims(rng: &mut ChaCha8Rng, config: &AuditConfig) -> (usize, usize) {
    (rng.gen_range(1..=config.max_states), rng.gen_range(1..=config.max_agents))
}

/// Runs every applicable scheme on `config.models` random models per
/// semantics. The topological run starts with the worked example.
pub fn axiom_audit(config: &AuditConfig) -> Result<AuditReport> {
    let mut tally = Tally::new();
    let mut models = BTreeMap::new();
    let atoms = atom_names(2);
    for &sem in &config.semantics {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(sem as u64 + 1)));
        for idx in 0..config.models {
            match sem {
                AuditSemantics::Topo => {
                    let m = if idx == 0 {
                        example1()
                    } else {
                        let (n, k) = dims(&mut rng, config);
                        random_topo_model(&mut rng, n, k, &atoms)
                    };
                    let inst = topo_instances(&m, &mut rng, config);
                    tally.check(&mut Evaluator::topo(&m), &inst, sem, idx)?;
                }
                AuditSemantics::EvPseudo => {
                    let (n, k) = dims(&mut rng, config);
                    let sig = if idx % 2 == 0 { Signature::Full } else { Signature::Fragment };
                    let s = random_ev_pseudo(&mut rng, n, k, &atoms, sig);
                    let inst = pseudo_instances(&s, &mut rng, config);
                    tally.check(&mut Evaluator::ev_pseudo(&s), &inst, sem, idx)?;
                }
                AuditSemantics::KbPseudo => {
                    let (n, k) = dims(&mut rng, config);
                    let s = random_ev_pseudo(&mut rng, n, k, &atoms, Signature::Fragment);
                    let m = kb_from_evidence(&s)?;
                    let inst = kb_model_instances(&m, &mut rng, config);
                    tally.check(&mut Evaluator::kb_pseudo(&m), &inst, sem, idx)?;
                }
            }
        }
        models.insert(sem, config.models);
    }
    let schemes = tally.reports.into_iter().filter(|r| r.instances > 0).collect();
    Ok(AuditReport { schemes, models })
}

/// Runs the topological schemes on one given model, typically
/// [`corrupted_model`], and returns the schemes with failing instances.
pub fn audit_model(m: &TopoEModel, config: &AuditConfig) -> Result<Vec<SchemeReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let inst = topo_instances(m, &mut rng, config);
    let mut tally = Tally::new();
    tally.check(&mut Evaluator::topo(m), &inst, AuditSemantics::Topo, 0)?;
    Ok(tally.reports.into_iter().filter(|r| r.failures > 0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_audit_is_clean() {
        let config = AuditConfig { models: 40, seed: 9, ..AuditConfig::default() };
        let r = axiom_audit(&config).unwrap();
        assert!(r.false_positives().is_empty(), "{:?}", r.false_positives());
        assert!(r.false_negatives().is_empty(), "{:?}", r.false_negatives());
        assert_eq!(r.schemes.len(), SCHEMES.len());
    }

    #[test]
    fn worked_example_refutes_group_monotonicity() {
        let config = AuditConfig { models: 1, semantics: vec![AuditSemantics::Topo], ..AuditConfig::default() };
        let r = axiom_audit(&config).unwrap();
        for name in ["Group monotonicity of knowledge", "Joint knowledge implies group belief"] {
            let s = r.scheme(name).unwrap();
            assert!(s.failures > 0, "{name}");
            assert_eq!(s.first.as_ref().unwrap().model, 0);
        }
    }

    #[test]
    fn corrupted_model_is_caught() {
        let m = corrupted_model();
        assert!(!crate::models::validate_topo(&m).is_valid());
        let failing = audit_model(&m, &AuditConfig::default()).unwrap();
        let names: Vec<&str> = failing.iter().map(|r| r.name).collect();
        assert!(names.contains(&"Inclusion"), "{names:?}");
        let inc = failing.iter().find(|r| r.name == "Inclusion").unwrap();
        assert!(inc.first.as_ref().unwrap().instance.contains("Forall{a}"));
    }
}
