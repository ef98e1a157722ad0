//! Depth-bounded unraveling of an evidence pseudo-model into a tree of
//! histories, with the `last` map back to the source.

use std::fmt;

use crate::error::{Error, Result};
use crate::models::{EvPseudoModel, Label, Relation, RelationalEvidenceModel, Valuation};
use crate::topology::StateSet;

/// Largest history tree [`unravel`] will build.
pub const MAX_HISTORIES: usize = 20_000;

/// Which relation a step follows: `P` for the preorder, `E` for the
/// equivalence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    P,
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub kind: StepKind,
    pub label: Label,
    pub state: usize,
}

/// `(s0, R1, s1, ..., Rn, sn)`, stored as the root and its steps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct History {
    pub root: usize,
    pub steps: Vec<Step>,
}

impl History {
    pub fn last(&self) -> usize {
        self.steps.last().map_or(self.root, |s| s.state)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.root)?;
        for s in &self.steps {
            let rel = if s.kind == StepKind::P { "≤" } else { "∼" };
            match s.label {
                Label::Group(m) => write!(f, ", {rel}{m:b}, {}", s.state)?,
                Label::Everyone => write!(f, ", {rel}A, {}", s.state)?,
            }
        }
        write!(f, ")")
    }
}

/// The associated tree model of histories up to a fixed length.
#[derive(Clone, Debug)]
pub struct Unraveling {
    histories: Vec<History>,
    parent: Vec<Option<usize>>,
    depth: usize,
    pseudo: EvPseudoModel,
}

impl Unraveling {
    pub fn histories(&self) -> &[History] {
        &self.histories
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn last(&self, h: usize) -> usize {
        self.histories[h].last()
    }

    pub fn parent(&self, h: usize) -> Option<usize> {
        self.parent[h]
    }

    /// Histories of maximal length have no successors in the truncated tree.
    pub fn is_frontier(&self, h: usize) -> bool {
        self.histories[h].len() == self.depth
    }

    /// Group relations over histories, one pair per label of the source.
    pub fn pseudo(&self) -> &EvPseudoModel {
        &self.pseudo
    }

    /// The individual relations as a relational evidence model.
    pub fn relational(&self) -> Result<RelationalEvidenceModel> {
        let k = self.pseudo.agents().len();
        let leq = (0..k).map(|i| self.pseudo.leq(Label::Group(1 << i)).cloned()).collect::<Result<_>>()?;
        let sim = (0..k).map(|i| self.pseudo.sim(Label::Group(1 << i)).cloned()).collect::<Result<_>>()?;
        RelationalEvidenceModel::new(
            self.histories.len(),
            self.pseudo.agents().to_vec(),
            leq,
            sim,
            self.pseudo.valuation().clone(),
        )
    }
}

/// Unravels `s` from `s0`, keeping histories of at most `depth` steps.
pub fn unravel(s: &EvPseudoModel, s0: usize, depth: usize) -> Result<Unraveling> {
    let n = s.carrier_size();
    if s0 >= n {
        return Err(Error::OutOfRange { state: s0, size: n });
    }
    let labels = s.labels().to_vec();
    let mut histories = vec![History { root: s0, steps: vec![] }];
    let mut parent = vec![None];
    let mut children: Vec<Vec<usize>> = vec![vec![]];
    let mut next = 0;
    while next < histories.len() {
        let h = histories[next].clone();
        if h.len() < depth {
            for &l in &labels {
                for (kind, rel) in [(StepKind::P, s.leq(l)?), (StepKind::E, s.sim(l)?)] {
                    for t in rel.successors(h.last()).iter() {
                        let mut steps = h.steps.clone();
                        steps.push(Step { kind, label: l, state: t });
                        histories.push(History { root: s0, steps });
                        parent.push(Some(next));
                        children.push(vec![]);
                        let id = histories.len() - 1;
                        children[next].push(id);
                        if histories.len() > MAX_HISTORIES {
                            return Err(Error::Unsupported(format!("unraveling exceeds {MAX_HISTORIES} histories")));
                        }
                    }
                }
            }
        }
        next += 1;
    }

    let size = histories.len();
    let edge = |c: usize| *histories[c].steps.last().expect("non-root");
    let mut rels = Vec::new();
    for &j in &labels {
        let allowed = |c: usize| s.label_includes(edge(c).label, j);
        // ≤_J: descend along P-steps whose label includes J.
        let mut leq = Relation::identity(size);
        for h in (0..size).rev() {
            for &c in &children[h] {
                if edge(c).kind == StepKind::P && allowed(c) {
                    let below = leq.successors(c).clone();
                    for x in below.iter() {
                        leq.insert(h, x);
                    }
                }
            }
        }
        // ∼_J: components of the tree restricted to edges labelled above J.
        let mut comp = vec![usize::MAX; size];
        let mut cells = Vec::new();
        for h in 0..size {
            if comp[h] != usize::MAX {
                continue;
            }
            let id = cells.len();
            let mut cell = StateSet::empty(size);
            let mut stack = vec![h];
            comp[h] = id;
            while let Some(x) = stack.pop() {
                cell.insert(x);
                let up = parent[x].filter(|_| allowed(x));
                let down = children[x].iter().copied().filter(|&c| allowed(c));
                for y in up.into_iter().chain(down) {
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        stack.push(y);
                    }
                }
            }
            cells.push(cell);
        }
        rels.push((j, leq, Relation::from_cells(size, &cells)));
    }

    let valuation: Valuation = s
        .valuation()
        .iter()
        .map(|(p, v)| {
            let ext =
                StateSet::from_members(size, (0..size).filter(|&h| v.contains(histories[h].last()))).expect("in range");
            (p.clone(), ext)
        })
        .collect();
    let pseudo = EvPseudoModel::from_fn(size, s.agents().to_vec(), s.signature(), valuation, |l| {
        let (_, a, b) = rels.iter().find(|(x, _, _)| *x == l).expect("label");
        (a.clone(), b.clone())
    })?;
    Ok(Unraveling { histories, parent, depth, pseudo })
}

/// Result of checking that `last` is a p-morphism onto the source.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PMorphismReport {
    pub atom_violations: Vec<String>,
    pub forth_violations: Vec<String>,
    pub back_violations: Vec<String>,
    /// Histories at the truncation depth; the back condition is not asked of
    /// them.
    pub frontier: usize,
    pub pairs_checked: usize,
}

impl PMorphismReport {
    pub fn is_ok(&self) -> bool {
        self.atom_violations.is_empty() && self.forth_violations.is_empty() && self.back_violations.is_empty()
    }
}

pub fn last_pmorphism_check(u: &Unraveling, s: &EvPseudoModel) -> Result<PMorphismReport> {
    let mut report = PMorphismReport::default();
    let x = u.pseudo();
    let size = u.histories().len();
    for (p, ext) in x.valuation() {
        let src = s.valuation().get(p).ok_or_else(|| Error::UnknownAtom(p.clone()))?;
        for h in 0..size {
            if ext.contains(h) != src.contains(u.last(h)) {
                report.atom_violations.push(format!("{p} at {}", u.histories()[h]));
            }
        }
    }
    for &l in s.labels() {
        for (kind, here, there) in [("≤", x.leq(l)?, s.leq(l)?), ("∼", x.sim(l)?, s.sim(l)?)] {
            for (h, g) in here.pairs() {
                report.pairs_checked += 1;
                if !there.contains(u.last(h), u.last(g)) {
                    report.forth_violations.push(format!(
                        "{} {kind}{l:?} {} not preserved",
                        u.histories()[h],
                        u.histories()[g]
                    ));
                }
            }
            for h in 0..size {
                if u.is_frontier(h) {
                    continue;
                }
                for t in there.successors(u.last(h)).iter() {
                    if !here.successors(h).iter().any(|g| u.last(g) == t) {
                        report.back_violations.push(format!("{} has no {kind}{l:?} lift of {t}", u.histories()[h]));
                    }
                }
            }
        }
    }
    report.frontier = (0..size).filter(|&h| u.is_frontier(h)).count();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{is_standard, validate_ev_pseudo, Signature};
    use crate::random::{atom_names, random_ev_pseudo};
    use crate::semantics::eval_ev_pseudo;
    use crate::syntax::parse;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn depth_zero_is_a_single_history() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_ev_pseudo(&mut rng, 3, 2, &atom_names(1), Signature::Full);
        let u = unravel(&s, 1, 0).unwrap();
        assert_eq!(u.histories().len(), 1);
        assert_eq!(u.last(0), 1);
        for &l in u.pseudo().labels() {
            assert_eq!(u.pseudo().leq(l).unwrap(), &Relation::identity(1));
            assert_eq!(u.pseudo().sim(l).unwrap(), &Relation::identity(1));
        }
    }

    #[test]
    fn unravelings_are_standard_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let n = rng.gen_range(1..=3);
            let k = rng.gen_range(2..=3);
            let sig = if rng.gen_bool(0.5) { Signature::Full } else { Signature::Fragment };
            let s = random_ev_pseudo(&mut rng, n, k, &atom_names(2), sig);
            let d = rng.gen_range(0..=2);
            let u = unravel(&s, rng.gen_range(0..n), d).unwrap();
            assert!(validate_ev_pseudo(u.pseudo()).is_valid());
            if sig == Signature::Full {
                assert!(is_standard(u.pseudo()).is_valid());
            }
            let r = last_pmorphism_check(&u, &s).unwrap();
            assert!(r.is_ok(), "{r:?}");
            assert!(r.frontier > 0);
        }
    }

    /// `∼` on histories closes over paths of any length, so a single
    /// equivalence step can reach a frontier history whose own classes were
    /// cut short.
    #[test]
    fn truncation_breaks_depth_two_formulas() {
        let n = 2;
        let mut v = Valuation::new();
        v.insert("p".into(), StateSet::singleton(n, 1));
        let s = EvPseudoModel::from_fn(n, vec!["i".into(), "j".into()], Signature::Full, v, |l| match l {
            Label::Group(0b11) => (Relation::identity(n), Relation::identity(n)),
            _ => (Relation::identity(n), Relation::total(n)),
        })
        .unwrap();
        assert!(validate_ev_pseudo(&s).is_valid());
        let f = parse("Exists{j} Forall{i} p").unwrap();
        assert!(!eval_ev_pseudo(&s, &f).unwrap().extension.contains(0));
        let u = unravel(&s, 0, 2).unwrap();
        assert!(eval_ev_pseudo(u.pseudo(), &f).unwrap().extension.contains(0));
        // One step deep is still faithful.
        let g = parse("Forall{i} p | Box{j} ~p").unwrap();
        let u1 = unravel(&s, 0, 1).unwrap();
        assert_eq!(
            eval_ev_pseudo(u1.pseudo(), &g).unwrap().extension.contains(0),
            eval_ev_pseudo(&s, &g).unwrap().extension.contains(0)
        );
    }

    #[test]
    fn history_display() {
        let h = History {
            root: 0,
            steps: vec![
                Step { kind: StepKind::P, label: Label::Group(0b01), state: 1 },
                Step { kind: StepKind::E, label: Label::Everyone, state: 2 },
            ],
        };
        assert_eq!(h.to_string(), "(0, ≤1, 1, ∼A, 2)");
        assert_eq!(h.last(), 2);
    }
}
