//! Seeded random generation of models and formulas for property runs and
//! audits.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::models::{
    full_mask, members, EvPseudoModel, Label, Relation, RelationalEvidenceModel, Signature, TopoEModel, Valuation,
};
use crate::syntax::{Formula, Group, Modality};
use crate::topology::{generate_topology, Partition, StateSet};

pub fn agent_names(k: usize) -> Vec<String> {
    (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

pub fn atom_names(k: usize) -> Vec<String> {
    ["p", "q", "r", "s"].iter().take(k).map(|s| s.to_string()).collect()
}

pub fn random_set<R: Rng>(rng: &mut R, n: usize) -> StateSet {
    let mut s = StateSet::empty(n);
    for x in 0..n {
        if rng.gen_bool(0.5) {
            s.insert(x);
        }
    }
    s
}

pub fn random_valuation<R: Rng>(rng: &mut R, n: usize, atoms: &[String]) -> Valuation {
    atoms.iter().map(|p| (p.clone(), random_set(rng, n))).collect()
}

/// Random partition; coarse partitions are favoured so that cells are
/// usually shared by several states.
pub fn random_partition<R: Rng>(rng: &mut R, n: usize) -> Partition {
    let blocks = rng.gen_range(1..=n.max(1));
    let ids: Vec<usize> = (0..n).map(|_| rng.gen_range(0..blocks)).collect();
    let classes: Vec<StateSet> =
        (0..n).map(|x| StateSet::from_members(n, (0..n).filter(|&y| ids[y] == ids[x])).expect("in range")).collect();
    Partition::from_classes(&classes).expect("classes form a partition")
}

/// Random topo-e-model: the cells of each partition are added to the random
/// subbasis so that hard evidence is soft evidence.
pub fn random_topo_model<R: Rng>(rng: &mut R, n: usize, agents: usize, atoms: &[String]) -> TopoEModel {
    let mut parts = Vec::new();
    let mut tops = Vec::new();
    for _ in 0..agents {
        let p = if rng.gen_bool(0.5) { Partition::trivial(n) } else { random_partition(rng, n) };
        let mut sub: Vec<StateSet> = p.cells().to_vec();
        for _ in 0..rng.gen_range(0..=n + 1) {
            let s = random_set(rng, n);
            if !s.is_empty() {
                sub.push(s);
            }
        }
        tops.push(generate_topology(&sub, n).expect("valid subbasis"));
        parts.push(p);
    }
    TopoEModel::new(n, agent_names(agents), parts, tops, random_valuation(rng, n, atoms)).expect("well-formed")
}

/// Random preorder included in the equivalence `within`.
pub fn random_preorder_within<R: Rng>(rng: &mut R, within: &Relation) -> Relation {
    let n = within.size();
    let density = rng.gen_range(0.0..0.6);
    let mut r = Relation::identity(n);
    for (s, t) in within.pairs() {
        if s != t && rng.gen_bool(density) {
            r.insert(s, t);
        }
    }
    r.closure().intersection(within)
}

pub fn random_relational<R: Rng>(rng: &mut R, n: usize, agents: usize, atoms: &[String]) -> RelationalEvidenceModel {
    let mut leq = Vec::new();
    let mut sim = Vec::new();
    for _ in 0..agents {
        let p = if rng.gen_bool(0.4) { Partition::trivial(n) } else { random_partition(rng, n) };
        let e = Relation::from_cells(n, p.cells());
        leq.push(random_preorder_within(rng, &e));
        sim.push(e);
    }
    RelationalEvidenceModel::new(n, agent_names(agents), leq, sim, random_valuation(rng, n, atoms))
        .expect("well-formed")
}

/// Random equivalence refining `e`: each class is split at random.
fn random_refinement<R: Rng>(rng: &mut R, e: &Relation) -> Relation {
    let n = e.size();
    let mut cells = Vec::new();
    let mut seen = StateSet::empty(n);
    for x in 0..n {
        if seen.contains(x) {
            continue;
        }
        let class = e.successors(x).clone();
        seen.union_with(&class);
        let parts = rng.gen_range(1..=class.len());
        let mut split = vec![StateSet::empty(n); parts];
        for y in class.iter() {
            split[rng.gen_range(0..parts)].insert(y);
        }
        cells.extend(split.into_iter().filter(|c| !c.is_empty()));
    }
    Relation::from_cells(n, &cells)
}

/// Random evidence pseudo-model satisfying Anti-Monotonicity and Inclusion by
/// construction: each group relation is the intersection of its subgroups'
/// relations, optionally shrunk further by a random refinement (so that the
/// result is often not standard).
pub fn random_ev_pseudo<R: Rng>(
    rng: &mut R,
    n: usize,
    agents: usize,
    atoms: &[String],
    signature: Signature,
) -> EvPseudoModel {
    let base = random_relational(rng, n, agents, atoms);
    let shrink = rng.gen_bool(0.6);
    let full = full_mask(agents);
    let mut rels: Vec<(Label, Relation, Relation)> = Vec::new();
    let order: Vec<Label> = match signature {
        Signature::Full => {
            let mut masks: Vec<u32> = (1..=full).collect();
            masks.sort_by_key(|m| m.count_ones());
            masks.into_iter().map(Label::Group).collect()
        }
        Signature::Fragment => (0..agents).map(|i| Label::Group(1 << i)).chain([Label::Everyone]).collect(),
    };
    for l in order {
        let (mask, below): (u32, Vec<u32>) = match l {
            Label::Group(m) if m.count_ones() == 1 => (m, vec![]),
            Label::Group(m) => (m, (1..m).filter(|s| s & !m == 0).collect()),
            Label::Everyone => (full, (0..agents).map(|i| 1 << i).collect()),
        };
        let (leq, sim) = if below.is_empty() {
            let i = mask.trailing_zeros() as usize;
            (base.leq(i).clone(), base.sim(i).clone())
        } else {
            let mut leq = Relation::total(n);
            let mut sim = Relation::total(n);
            for (lab, a, b) in &rels {
                let m = match lab {
                    Label::Group(m) => *m,
                    Label::Everyone => full,
                };
                if below.contains(&m) && !matches!(lab, Label::Everyone) {
                    leq = leq.intersection(a);
                    sim = sim.intersection(b);
                }
            }
            if shrink && rng.gen_bool(0.5) {
                sim = random_refinement(rng, &sim);
                let extra = random_preorder_within(rng, &sim);
                leq = leq.intersection(&sim).intersection(&extra);
            }
            (leq, sim)
        };
        rels.push((l, leq, sim));
    }
    let lookup = |l: Label| {
        let (_, a, b) = rels.iter().find(|(x, _, _)| *x == l).expect("generated");
        (a.clone(), b.clone())
    };
    EvPseudoModel::from_fn(n, agent_names(agents), signature, base.valuation().clone(), lookup).expect("well-formed")
}

/// Which operators a random formula may use.
#[derive(Clone, Debug)]
pub struct FormulaSpec {
    pub atoms: Vec<String>,
    pub agents: Vec<String>,
    pub modalities: Vec<Modality>,
    /// Restrict groups to individuals and `{A}`.
    pub fragment: bool,
    pub max_depth: usize,
}

impl FormulaSpec {
    pub fn new(atoms: &[String], agents: &[String], modalities: &[Modality], fragment: bool, max_depth: usize) -> Self {
        FormulaSpec {
            atoms: atoms.to_vec(),
            agents: agents.to_vec(),
            modalities: modalities.to_vec(),
            fragment,
            max_depth,
        }
    }
}

pub fn random_group<R: Rng>(rng: &mut R, agents: &[String], fragment: bool) -> Group {
    let k = agents.len();
    if rng.gen_bool(0.25) {
        return Group::All;
    }
    if fragment {
        return Group::single(agents.choose(rng).expect("agents"));
    }
    let m = rng.gen_range(1..=full_mask(k));
    Group::agents(members(m).map(|i| agents[i].clone())).expect("non-empty")
}

/// Random formula of modal depth at most `spec.max_depth`.
pub fn random_formula<R: Rng>(rng: &mut R, spec: &FormulaSpec) -> Formula {
    gen(rng, spec, spec.max_depth, 3)
}

fn gen<R: Rng>(rng: &mut R, spec: &FormulaSpec, depth: usize, budget: usize) -> Formula {
    let leaf = budget == 0 || rng.gen_bool(0.25);
    if leaf {
        return Formula::Atom(spec.atoms.choose(rng).expect("atoms").clone());
    }
    let modal_ok = depth > 0 && !spec.modalities.is_empty();
    match rng.gen_range(0..if modal_ok { 4 } else { 2 }) {
        0 => Formula::not(gen(rng, spec, depth, budget - 1)),
        1 => Formula::and(gen(rng, spec, depth, budget - 1), gen(rng, spec, depth, budget - 1)),
        _ => {
            let m = *spec.modalities.choose(rng).expect("modalities");
            let g = match m {
                Modality::Share => random_group(rng, &spec.agents, false),
                _ => random_group(rng, &spec.agents, spec.fragment),
            };
            Formula::modal(m, g, gen(rng, spec, depth - 1, budget))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{validate_ev_pseudo, validate_relational, validate_topo};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_models_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let atoms = atom_names(2);
        for _ in 0..200 {
            let n = rng.gen_range(1..=5);
            let k = rng.gen_range(1..=3);
            assert!(validate_topo(&random_topo_model(&mut rng, n, k, &atoms)).is_valid());
            assert!(validate_relational(&random_relational(&mut rng, n, k, &atoms)).is_valid());
            for sig in [Signature::Full, Signature::Fragment] {
                let s = random_ev_pseudo(&mut rng, n, k, &atoms, sig);
                let r = validate_ev_pseudo(&s);
                assert!(r.is_valid(), "{:?}", r.violations);
            }
        }
    }

    #[test]
    fn formulas_respect_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let spec = FormulaSpec::new(&atom_names(2), &agent_names(3), &[Modality::Box, Modality::Forall], true, 2);
        for _ in 0..500 {
            let f = random_formula(&mut rng, &spec);
            assert!(f.modal_depth() <= 2);
            assert!(crate::syntax::LanguageTag::EvIA.contains(&f, None));
        }
    }
}
