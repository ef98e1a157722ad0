//! Bounded satisfiability by enumerating small models up to isomorphism.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::models::{EvPseudoModel, Label, Relation, Signature, TopoEModel, Valuation};
use crate::semantics::{eval_ev_pseudo, eval_topo, Evaluator};
use crate::syntax::{closure_set, expand_kb, Formula, LanguageTag, Modality};
use crate::topology::{generate_topology, Partition, StateSet, Topology};

/// Largest carrier the enumerator accepts.
pub const MAX_SAT_STATES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SatSemantics {
    Topo,
    EvPseudo,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatModel {
    Topo(TopoEModel),
    EvPseudo(EvPseudoModel),
}

impl SatModel {
    pub fn carrier_size(&self) -> usize {
        match self {
            SatModel::Topo(m) => m.carrier_size(),
            SatModel::EvPseudo(s) => s.carrier_size(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Sat { model: SatModel, state: usize },
    UnsatUpTo(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SatStats {
    /// Models on which the formula was evaluated.
    pub models_examined: u64,
    /// Relation structures visited, including pruned prefixes.
    pub steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatVerdict {
    pub outcome: Outcome,
    pub stats: SatStats,
    /// Size of the closure set; `2^closure_size` states always suffice.
    pub closure_size: usize,
    /// The formula actually searched for (knowledge and belief expanded
    /// under the pseudo-model semantics).
    pub searched: Formula,
}

impl SatVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self.outcome, Outcome::Sat { .. })
    }

    pub fn theoretical_bound(&self) -> String {
        format!("2^{}", self.closure_size)
    }
}

#[derive(Clone, Debug)]
pub struct SatOptions {
    pub max_states: usize,
    pub semantics: SatSemantics,
    /// Agent universe; defaults to the agents named in the formula, or a
    /// single agent `a` when only `{A}` occurs.
    pub agents: Option<Vec<String>>,
    /// Skip isomorphic copies. Turning this off gives the naive enumerator.
    pub prune: bool,
}

impl SatOptions {
    pub fn new(max_states: usize, semantics: SatSemantics) -> Self {
        SatOptions { max_states, semantics, agents: None, prune: true }
    }
}

pub fn bounded_sat(phi: &Formula, max_states: usize, semantics: SatSemantics) -> Result<SatVerdict> {
    bounded_sat_with(phi, &SatOptions::new(max_states, semantics))
}

/// `bounded_sat(¬φ)`: valid up to the bound iff the verdict is unsatisfiable.
pub fn bounded_valid(phi: &Formula, options: &SatOptions) -> Result<SatVerdict> {
    bounded_sat_with(&Formula::not(phi.clone()), options)
}

/// Every `(≤, ∼)` with `∼` an equivalence and `≤` a preorder inside it, on
/// `n` states, together with the action of state permutations on them.
struct PairSpace {
    pairs: Vec<(Relation, Relation)>,
    perms: Vec<Vec<usize>>,
    // act[p][i]: index of pair i permuted by perms[p].
    act: Vec<Vec<usize>>,
}

fn key(r: &Relation) -> u64 {
    r.rows().iter().enumerate().fold(0, |acc, (i, row)| acc | (row.bits() << (i * r.size())))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn go(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            go(k + 1, p, out);
            p.swap(k, i);
        }
    }
    go(0, &mut p, &mut out);
    out.sort();
    out
}

fn preorders(n: usize) -> Vec<Relation> {
    let off: Vec<(usize, usize)> = (0..n).flat_map(|s| (0..n).map(move |t| (s, t))).filter(|(s, t)| s != t).collect();
    let mut out = Vec::new();
    for bits in 0u64..(1 << off.len()) {
        let mut r = Relation::identity(n);
        for (i, &(s, t)) in off.iter().enumerate() {
            if bits >> i & 1 == 1 {
                r.insert(s, t);
            }
        }
        if r.is_transitive() {
            out.push(r);
        }
    }
    out
}

fn equivalences(n: usize) -> Vec<Relation> {
    // Restricted growth strings enumerate set partitions.
    let mut out = Vec::new();
    let mut block = vec![0usize; n];
    fn go(i: usize, max: usize, block: &mut Vec<usize>, out: &mut Vec<Relation>) {
        let n = block.len();
        if i == n {
            let pairs = (0..n).flat_map(|s| (0..n).map(move |t| (s, t)));
            let pairs: Vec<_> = pairs.filter(|&(s, t)| block[s] == block[t]).collect();
            out.push(Relation::from_pairs(n, pairs).expect("in range"));
            return;
        }
        for b in 0..=max + 1 {
            block[i] = b;
            go(i + 1, max.max(b), block, out);
        }
    }
    if n > 0 {
        go(1, 0, &mut block, &mut out);
    }
    out
}

impl PairSpace {
    fn new(n: usize) -> PairSpace {
        let pre = preorders(n);
        let mut pairs = Vec::new();
        for e in equivalences(n) {
            for p in &pre {
                if p.is_subset(&e) {
                    pairs.push((p.clone(), e.clone()));
                }
            }
        }
        pairs.sort_by_key(|(a, b)| (key(a), key(b)));
        let index: HashMap<(u64, u64), usize> =
            pairs.iter().enumerate().map(|(i, (a, b))| ((key(a), key(b)), i)).collect();
        let perms = permutations(n);
        let act = perms
            .iter()
            .map(|p| pairs.iter().map(|(a, b)| index[&(key(&a.permuted(p)), key(&b.permuted(p)))]).collect())
            .collect();
        PairSpace { pairs, perms, act }
    }

    fn included(&self, small: usize, big: usize) -> bool {
        let (a, b) = &self.pairs[small];
        let (c, d) = &self.pairs[big];
        a.is_subset(c) && b.is_subset(d)
    }
}

/// Which structure an agent or label draws from the pair space, and how the
/// formula is checked on a finished candidate.
struct Search<'a> {
    space: &'a PairSpace,
    labels: Vec<Label>,
    // For each label position, the earlier positions whose relations must
    // contain its own.
    above: Vec<Vec<usize>>,
    prune: bool,
    stats: SatStats,
}

/// Called on each complete assignment with the permutations fixing it;
/// returns true to stop the search.
type Leaf<'a> = dyn FnMut(&[usize], &[usize], &mut SatStats) -> Result<bool> + 'a;

impl Search<'_> {
    /// Visits every assignment of pair indices to labels, calling `leaf` with
    /// the assignment and the permutations fixing it.
    fn run(&mut self, leaf: &mut Leaf<'_>) -> Result<bool> {
        let tied: Vec<usize> = (0..self.space.perms.len()).collect();
        let mut tuple = Vec::new();
        self.go(&mut tuple, tied, leaf)
    }

    fn go(&mut self, tuple: &mut Vec<usize>, tied: Vec<usize>, leaf: &mut Leaf<'_>) -> Result<bool> {
        let pos = tuple.len();
        if pos == self.labels.len() {
            return leaf(tuple, &tied, &mut self.stats);
        }
        'next: for i in 0..self.space.pairs.len() {
            self.stats.steps += 1;
            for &j in &self.above[pos] {
                if !self.space.included(i, tuple[j]) {
                    continue 'next;
                }
            }
            let mut still = Vec::new();
            if self.prune {
                for &p in &tied {
                    let img = self.space.act[p][i];
                    if img < i {
                        continue 'next;
                    }
                    if img == i {
                        still.push(p);
                    }
                }
            } else {
                still = tied.clone();
            }
            tuple.push(i);
            let found = self.go(tuple, still, leaf)?;
            tuple.pop();
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn valuations(n: usize, atoms: usize) -> impl Iterator<Item = Vec<u64>> {
    let per = 1u64 << n;
    let total = per.pow(atoms as u32);
    (0..total).map(move |mut code| {
        (0..atoms)
            .map(|_| {
                let v = code % per;
                code /= per;
                v
            })
            .collect()
    })
}

fn permute_bits(bits: u64, perm: &[usize]) -> u64 {
    perm.iter().enumerate().fold(0, |acc, (x, &y)| acc | ((bits >> x & 1) << y))
}

/// Lexicographically least among its images under `stabilizer`.
fn least_valuation(v: &[u64], stabilizer: &[usize], perms: &[Vec<usize>]) -> bool {
    stabilizer.iter().all(|&p| {
        let img: Vec<u64> = v.iter().map(|&b| permute_bits(b, &perms[p])).collect();
        img.as_slice() >= v
    })
}

fn default_agents(phi: &Formula) -> Vec<String> {
    let named: Vec<String> = phi.named_agents().into_iter().collect();
    if named.is_empty() {
        vec!["a".into()]
    } else {
        named
    }
}

fn check_static(phi: &Formula) -> Result<()> {
    if phi.uses(Modality::Share) {
        return Err(Error::Unsupported("bounded_sat needs a static formula; reduce sharing first".into()));
    }
    Ok(())
}

pub fn bounded_sat_with(phi: &Formula, options: &SatOptions) -> Result<SatVerdict> {
    check_static(phi)?;
    if options.max_states == 0 || options.max_states > MAX_SAT_STATES {
        return Err(Error::Invalid(vec![format!("state bound must be in 1..={MAX_SAT_STATES}")]));
    }
    let agents = options.agents.clone().unwrap_or_else(|| default_agents(phi));
    for a in phi.named_agents() {
        if !agents.contains(&a) {
            return Err(Error::UnknownAgent(a));
        }
    }
    let searched = match options.semantics {
        SatSemantics::Topo => phi.clone(),
        SatSemantics::EvPseudo => expand_kb(phi)?,
    };
    let closure_size = closure_set(&expand_kb(phi)?, &agents)?.len();
    let atoms: Vec<String> = phi.atoms().into_iter().collect();
    let mut stats = SatStats::default();
    for n in 1..=options.max_states {
        let space = PairSpace::new(n);
        let found = match options.semantics {
            SatSemantics::Topo => search_topo(&searched, n, &agents, &atoms, &space, options.prune, &mut stats)?,
            SatSemantics::EvPseudo => search_pseudo(&searched, n, &agents, &atoms, &space, options.prune, &mut stats)?,
        };
        if let Some((model, state)) = found {
            let holds = match &model {
                SatModel::Topo(m) => eval_topo(m, &searched)?.extension.contains(state),
                SatModel::EvPseudo(s) => eval_ev_pseudo(s, &searched)?.extension.contains(state),
            };
            if !holds {
                return Err(Error::Invalid(vec!["witness failed re-verification".into()]));
            }
            return Ok(SatVerdict { outcome: Outcome::Sat { model, state }, stats, closure_size, searched });
        }
    }
    Ok(SatVerdict { outcome: Outcome::UnsatUpTo(options.max_states), stats, closure_size, searched })
}

fn make_valuation(n: usize, atoms: &[String], v: &[u64]) -> Valuation {
    atoms.iter().zip(v).map(|(p, &b)| (p.clone(), StateSet::from_bits(n, b))).collect()
}

type Found<M> = Option<(M, usize)>;

fn try_valuations(
    n: usize,
    atoms: &[String],
    tied: &[usize],
    space: &PairSpace,
    prune: bool,
    stats: &mut SatStats,
    mut check: impl FnMut(Valuation, &mut SatStats) -> Result<Option<usize>>,
) -> Result<Option<usize>> {
    for v in valuations(n, atoms.len()) {
        if prune && !least_valuation(&v, tied, &space.perms) {
            continue;
        }
        if let Some(x) = check(make_valuation(n, atoms, &v), stats)? {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

fn search_topo(
    phi: &Formula,
    n: usize,
    agents: &[String],
    atoms: &[String],
    space: &PairSpace,
    prune: bool,
    stats: &mut SatStats,
) -> Result<Found<SatModel>> {
    let structures: Vec<(Partition, Topology)> = space
        .pairs
        .iter()
        .map(|(leq, sim)| {
            let t = generate_topology(leq.rows(), n).expect("up-sets");
            (Partition::from_classes(&sim.classes()).expect("equivalence"), t)
        })
        .collect();
    let k = agents.len();
    let mut search = Search {
        space,
        labels: (0..k).map(|i| Label::Group(1 << i)).collect(),
        above: vec![vec![]; k],
        prune,
        stats: *stats,
    };
    let mut found = None;
    search.run(&mut |tuple, tied, stats| {
        let parts = tuple.iter().map(|&i| structures[i].0.clone()).collect();
        let tops = tuple.iter().map(|&i| structures[i].1.clone()).collect();
        let mut model = TopoEModel::new(n, agents.to_vec(), parts, tops, Valuation::new())?;
        let hit = try_valuations(n, atoms, tied, space, prune, stats, |v, stats| {
            stats.models_examined += 1;
            model.set_valuation(v)?;
            Ok(Evaluator::topo(&model).eval(phi)?.first())
        })?;
        if let Some(x) = hit {
            found = Some((SatModel::Topo(model), x));
            return Ok(true);
        }
        Ok(false)
    })?;
    *stats = search.stats;
    Ok(found)
}

fn search_pseudo(
    phi: &Formula,
    n: usize,
    agents: &[String],
    atoms: &[String],
    space: &PairSpace,
    prune: bool,
    stats: &mut SatStats,
) -> Result<Found<SatModel>> {
    let signature = if LanguageTag::EvIA.contains(phi, Some(agents)) { Signature::Fragment } else { Signature::Full };
    let template = EvPseudoModel::from_fn(n, agents.to_vec(), signature, Valuation::new(), |_| {
        (Relation::identity(n), Relation::identity(n))
    })?;
    let mut labels = template.labels().to_vec();
    labels.sort_by_key(|&l| (template.label_mask(l).count_ones(), l == Label::Everyone, l));
    let above = (0..labels.len())
        .map(|i| (0..i).filter(|&j| labels[j] != labels[i] && template.label_includes(labels[i], labels[j])).collect())
        .collect();
    let mut search = Search { space, labels: labels.clone(), above, prune, stats: *stats };
    let mut found = None;
    search.run(&mut |tuple, tied, stats| {
        let lookup = |l: Label| {
            let i = tuple[labels.iter().position(|&x| x == l).expect("label")];
            space.pairs[i].clone()
        };
        let hit = try_valuations(n, atoms, tied, space, prune, stats, |v, stats| {
            stats.models_examined += 1;
            let s = EvPseudoModel::from_fn(n, agents.to_vec(), signature, v, lookup)?;
            let x = Evaluator::ev_pseudo(&s).eval(phi)?.first();
            if let Some(x) = x {
                found = Some((SatModel::EvPseudo(s), x));
            }
            Ok(x)
        })?;
        Ok(hit.is_some())
    })?;
    *stats = search.stats;
    Ok(found)
}

/// Atoms and agents the enumerator would use for `phi`.
pub fn search_signature(phi: &Formula) -> (BTreeSet<String>, Vec<String>) {
    (phi.atoms(), default_agents(phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, reduce_dynamic, DynSystem};

    #[test]
    fn pair_space_sizes() {
        assert_eq!(preorders(3).len(), 29);
        assert_eq!(preorders(4).len(), 355);
        assert_eq!(equivalences(4).len(), 15);
        // Sum over set partitions of the product of per-block preorder counts
        // (1, 4, 29, 355 for blocks of size 1..4).
        assert_eq!(PairSpace::new(1).pairs.len(), 1);
        assert_eq!(PairSpace::new(2).pairs.len(), 4 + 1);
        assert_eq!(PairSpace::new(3).pairs.len(), 29 + 3 * 4 + 1);
        assert_eq!(PairSpace::new(4).pairs.len(), 355 + 4 * 29 + 3 * 4 * 4 + 6 * 4 + 1);
    }

    #[test]
    fn permutation_action_is_a_group_action() {
        let s = PairSpace::new(3);
        let id = s.perms.iter().position(|p| p.iter().enumerate().all(|(i, &x)| i == x)).unwrap();
        assert!((0..s.pairs.len()).all(|i| s.act[id][i] == i));
        for row in &s.act {
            let mut seen: Vec<usize> = row.clone();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), s.pairs.len());
        }
    }

    #[test]
    fn factivity_has_no_countermodel() {
        for src in ["~(K{a}p -> p)", "Box{a}p & ~p"] {
            let v = bounded_sat(&parse(src).unwrap(), 4, SatSemantics::Topo).unwrap();
            assert_eq!(v.outcome, Outcome::UnsatUpTo(4), "{src}");
        }
    }

    #[test]
    fn non_monotone_group_knowledge_is_satisfiable() {
        let f = parse("K{a}p & K{b}p & ~B{A}p").unwrap();
        let v = bounded_sat(&f, 4, SatSemantics::Topo).unwrap();
        let Outcome::Sat { model, .. } = &v.outcome else { panic!("expected a model") };
        assert!(model.carrier_size() <= 4);
    }

    #[test]
    fn sharing_must_be_reduced_first() {
        let f = parse("~([share{a,b}]p <-> p)").unwrap();
        assert!(bounded_sat(&f, 2, SatSemantics::Topo).is_err());
        let r = reduce_dynamic(&f, DynSystem::EvDyn).unwrap();
        let v = bounded_sat_with(
            &r,
            &SatOptions { agents: Some(vec!["a".into(), "b".into()]), ..SatOptions::new(3, SatSemantics::Topo) },
        )
        .unwrap();
        assert!(!v.is_sat());
    }

    #[test]
    fn pruned_and_naive_agree() {
        for src in
            ["Box{a}p & ~Forall{a}p", "Dia{a}p & Dia{a}~p & Box{a}(p | q)", "B{a}p & ~K{a}p", "Box{a,b}p & ~Box{a}p"]
        {
            for sem in [SatSemantics::Topo, SatSemantics::EvPseudo] {
                let f = parse(src).unwrap();
                let mut o = SatOptions::new(3, sem);
                let a = bounded_sat_with(&f, &o).unwrap();
                o.prune = false;
                let b = bounded_sat_with(&f, &o).unwrap();
                let size = |v: &SatVerdict| match &v.outcome {
                    Outcome::Sat { model, .. } => Some(model.carrier_size()),
                    Outcome::UnsatUpTo(_) => None,
                };
                assert_eq!(size(&a), size(&b), "{src} {sem:?}");
                assert!(a.stats.models_examined <= b.stats.models_examined);
            }
        }
    }
}
