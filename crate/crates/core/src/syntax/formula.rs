use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// A non-empty set of named agents, or the full group `A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    Agents(BTreeSet<String>),
    All,
}

impl Group {
    pub fn agents<I, S>(names: I) -> Result<Group>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        if set.is_empty() {
            return Err(Error::EmptyGroup);
        }
        if set.contains("A") {
            return Err(Error::UnknownAgent("A is reserved for the full group".into()));
        }
        Ok(Group::Agents(set))
    }

    pub fn single(name: &str) -> Group {
        Group::agents([name]).expect("non-empty")
    }

    pub fn is_all(&self) -> bool {
        matches!(self, Group::All)
    }

    /// Named members; empty for `All`.
    pub fn names(&self) -> impl Iterator<Item = &String> {
        let it = match self {
            Group::Agents(s) => Some(s.iter()),
            Group::All => None,
        };
        it.into_iter().flatten()
    }

    pub fn is_singleton(&self) -> bool {
        matches!(self, Group::Agents(s) if s.len() == 1)
    }

    /// The group `J/+I`: `J ∪ I` when the two overlap, `J` otherwise.
    pub fn absorb(&self, i: &Group) -> Group {
        match (self, i) {
            (Group::All, _) | (_, Group::All) => Group::All,
            (Group::Agents(j), Group::Agents(ii)) => {
                if j.is_disjoint(ii) {
                    self.clone()
                } else {
                    Group::Agents(j.union(ii).cloned().collect())
                }
            }
        }
    }

    /// Replaces `All` by the explicit universe.
    pub fn explicit(&self, universe: &[String]) -> Group {
        match self {
            Group::All => Group::Agents(universe.iter().cloned().collect()),
            g => g.clone(),
        }
    }

    /// Whether this group denotes the full group of `universe`.
    pub fn is_full_in(&self, universe: Option<&[String]>) -> bool {
        match self {
            Group::All => true,
            Group::Agents(s) => match universe {
                Some(u) => s.len() == u.len() && u.iter().all(|a| s.contains(a)),
                None => false,
            },
        }
    }
}

/// Formula AST. Derived connectives are constructed by the helper functions
/// below and never appear as nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Box(Group, Box<Formula>),
    Forall(Group, Box<Formula>),
    K(Group, Box<Formula>),
    B(Group, Box<Formula>),
    Share(Group, Box<Formula>),
}

/// The four modal operators that take a group argument, plus sharing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Modality {
    Box,
    Forall,
    K,
    B,
    Share,
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    /// Conjunction of a non-empty list, associated to the left.
    pub fn conj(mut fs: Vec<Formula>) -> Formula {
        assert!(!fs.is_empty());
        let first = fs.remove(0);
        fs.into_iter().fold(first, Formula::and)
    }

    pub fn modal(m: Modality, g: Group, f: Formula) -> Formula {
        let f = Box::new(f);
        match m {
            Modality::Box => Formula::Box(g, f),
            Modality::Forall => Formula::Forall(g, f),
            Modality::K => Formula::K(g, f),
            Modality::B => Formula::B(g, f),
            Modality::Share => Formula::Share(g, f),
        }
    }

    pub fn boxed(g: Group, f: Formula) -> Formula {
        Formula::Box(g, Box::new(f))
    }

    pub fn dia(g: Group, f: Formula) -> Formula {
        Formula::not(Formula::boxed(g, Formula::not(f)))
    }

    pub fn forall(g: Group, f: Formula) -> Formula {
        Formula::Forall(g, Box::new(f))
    }

    pub fn exists(g: Group, f: Formula) -> Formula {
        Formula::not(Formula::forall(g, Formula::not(f)))
    }

    pub fn k(g: Group, f: Formula) -> Formula {
        Formula::K(g, Box::new(f))
    }

    pub fn k_dual(g: Group, f: Formula) -> Formula {
        Formula::not(Formula::k(g, Formula::not(f)))
    }

    pub fn b(g: Group, f: Formula) -> Formula {
        Formula::B(g, Box::new(f))
    }

    pub fn b_dual(g: Group, f: Formula) -> Formula {
        Formula::not(Formula::b(g, Formula::not(f)))
    }

    pub fn share(g: Group, f: Formula) -> Formula {
        Formula::Share(g, Box::new(f))
    }

    /// `(modality, group, argument)` for modal nodes.
    pub fn as_modal(&self) -> Option<(Modality, &Group, &Formula)> {
        match self {
            Formula::Box(g, f) => Some((Modality::Box, g, f)),
            Formula::Forall(g, f) => Some((Modality::Forall, g, f)),
            Formula::K(g, f) => Some((Modality::K, g, f)),
            Formula::B(g, f) => Some((Modality::B, g, f)),
            Formula::Share(g, f) => Some((Modality::Share, g, f)),
            _ => None,
        }
    }

    /// Single negation: strips one outer negation, otherwise adds one.
    pub fn single_negation(&self) -> Formula {
        match self {
            Formula::Not(f) => (**f).clone(),
            f => Formula::not(f.clone()),
        }
    }

    /// Nesting depth of modalities; sharing counts as a modality.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(f) => f.modal_depth(),
            Formula::And(a, b) => a.modal_depth().max(b.modal_depth()),
            other => 1 + other.as_modal().expect("modal").2.modal_depth(),
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) => vec![],
            Formula::Not(f) => vec![f],
            Formula::And(a, b) => vec![a, b],
            other => vec![other.as_modal().expect("modal").2],
        }
    }

    /// All subformulas, including the formula itself.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if out.insert(f.clone()) {
                stack.extend(f.children());
            }
        }
        out
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn groups(&self) -> Vec<&Group> {
        let mut out = Vec::new();
        self.visit_ref(&mut |f| {
            if let Some((_, g, _)) = f.as_modal() {
                out.push(g);
            }
        });
        out
    }

    /// Agent names mentioned in groups.
    pub fn named_agents(&self) -> BTreeSet<String> {
        self.groups().into_iter().flat_map(|g| g.names().cloned()).collect()
    }

    pub fn mentions_all(&self) -> bool {
        self.groups().iter().any(|g| g.is_all())
    }

    /// Whether some node uses modality `m`.
    pub fn uses(&self, m: Modality) -> bool {
        let mut found = false;
        self.visit(&mut |f| {
            if let Some((k, _, _)) = f.as_modal() {
                found |= k == m;
            }
        });
        found
    }

    fn visit(&self, cb: &mut impl FnMut(&Formula)) {
        cb(self);
        for c in self.children() {
            c.visit(cb);
        }
    }

    fn visit_ref<'a>(&'a self, cb: &mut impl FnMut(&'a Formula)) {
        cb(self);
        for c in self.children() {
            c.visit_ref(cb);
        }
    }

    /// Rebuilds the formula bottom-up through `f`.
    pub fn map_groups(&self, f: &impl Fn(&Group) -> Group) -> Formula {
        match self {
            Formula::Atom(_) => self.clone(),
            Formula::Not(a) => Formula::not(a.map_groups(f)),
            Formula::And(a, b) => Formula::and(a.map_groups(f), b.map_groups(f)),
            other => {
                let (m, g, a) = other.as_modal().expect("modal");
                Formula::modal(m, f(g), a.map_groups(f))
            }
        }
    }
}

/// The languages of the toolkit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LanguageTag {
    /// Hard and soft evidence for arbitrary groups.
    EvFull,
    /// Hard and soft evidence for individuals and the full group.
    EvIA,
    /// Knowledge and belief for individuals and the full group.
    KBIA,
    /// Knowledge and belief for arbitrary groups.
    KBFull,
    /// `EvFull` with sharing for arbitrary groups.
    EvDyn,
    /// `KBIA` with sharing for the full group.
    KBDyn,
}

impl LanguageTag {
    /// Membership test. Without a universe, a named group only counts as the
    /// full group when written `A`.
    pub fn contains(self, f: &Formula, universe: Option<&[String]>) -> bool {
        let frag = |g: &Group| g.is_singleton() || g.is_full_in(universe);
        let mut ok = true;
        f.visit(&mut |node| {
            let Some((m, g, _)) = node.as_modal() else { return };
            ok &= match (self, m) {
                (LanguageTag::EvFull, Modality::Box | Modality::Forall) => true,
                (LanguageTag::EvIA, Modality::Box | Modality::Forall) => frag(g),
                (LanguageTag::KBFull, Modality::K | Modality::B) => true,
                (LanguageTag::KBIA, Modality::K | Modality::B) => frag(g),
                (LanguageTag::EvDyn, Modality::Box | Modality::Forall | Modality::Share) => true,
                (LanguageTag::KBDyn, Modality::K | Modality::B) => frag(g),
                (LanguageTag::KBDyn, Modality::Share) => g.is_full_in(universe),
                _ => false,
            };
        });
        ok
    }

    pub fn name(self) -> &'static str {
        match self {
            LanguageTag::EvFull => "EvFull",
            LanguageTag::EvIA => "EvIA",
            LanguageTag::KBIA => "KBIA",
            LanguageTag::KBFull => "KBFull",
            LanguageTag::EvDyn => "EvDyn",
            LanguageTag::KBDyn => "KBDyn",
        }
    }
}
