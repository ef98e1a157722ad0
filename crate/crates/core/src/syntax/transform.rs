use std::collections::BTreeSet;

use super::formula::{Formula, Group, LanguageTag, Modality};
use crate::error::{Error, Result};

/// Translates knowledge and belief into the evidence modalities:
/// `B_I φ ↦ [∀]_I ◇_I □_I φ` and `K_I φ ↦ □_I φ ∧ [∀]_I ◇_I □_I φ`.
pub fn expand_kb(f: &Formula) -> Result<Formula> {
    Ok(match f {
        Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::not(expand_kb(a)?),
        Formula::And(a, b) => Formula::and(expand_kb(a)?, expand_kb(b)?),
        Formula::Box(g, a) => Formula::boxed(g.clone(), expand_kb(a)?),
        Formula::Forall(g, a) => Formula::forall(g.clone(), expand_kb(a)?),
        Formula::B(g, a) => belief_body(g, expand_kb(a)?),
        Formula::K(g, a) => {
            let a = expand_kb(a)?;
            Formula::and(Formula::boxed(g.clone(), a.clone()), belief_body(g, a))
        }
        Formula::Share(..) => return Err(Error::Unsupported("sharing modality in translation; reduce first".into())),
    })
}

fn belief_body(g: &Group, a: Formula) -> Formula {
    Formula::forall(g.clone(), Formula::dia(g.clone(), Formula::boxed(g.clone(), a)))
}

/// The two dynamic systems whose reduction axioms are implemented.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DynSystem {
    /// Sharing for any group over the evidence modalities. Knowledge and
    /// belief are re-indexed with the same `J/+I` rule.
    EvDyn,
    /// Sharing for the full group only, over knowledge and belief.
    KBDyn,
}

/// Eliminates every sharing modality, innermost first.
pub fn reduce_dynamic(f: &Formula, system: DynSystem) -> Result<Formula> {
    if system == DynSystem::KBDyn {
        if f.uses(Modality::Box) || f.uses(Modality::Forall) {
            return Err(Error::Unsupported("evidence modalities outside the KB dynamic language".into()));
        }
        if !LanguageTag::KBDyn.contains(f, None) {
            return Err(Error::Unsupported(
                "KB dynamic language allows only [share{A}] and K/B for individuals or {A}".into(),
            ));
        }
    }
    Ok(reduce(f))
}

fn reduce(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::not(reduce(a)),
        Formula::And(a, b) => Formula::and(reduce(a), reduce(b)),
        Formula::Share(g, a) => push_share(g, &reduce(a)),
        other => {
            let (m, g, a) = other.as_modal().expect("modal");
            Formula::modal(m, g.clone(), reduce(a))
        }
    }
}

/// Rewrites `[share_I] f` for a static `f`.
fn push_share(i: &Group, f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::not(push_share(i, a)),
        Formula::And(a, b) => Formula::and(push_share(i, a), push_share(i, b)),
        Formula::Share(..) => unreachable!("inner sharing already reduced"),
        other => {
            let (m, j, a) = other.as_modal().expect("modal");
            Formula::modal(m, j.absorb(i), push_share(i, a))
        }
    }
}

/// Least set containing `phi0` and closed under the eight closure rules, with
/// groups ranging over non-empty subsets of `universe`. `All` is written out
/// as the explicit universe so that each group has one spelling.
pub fn closure_set(phi0: &Formula, universe: &[String]) -> Result<BTreeSet<Formula>> {
    if !LanguageTag::EvFull.contains(phi0, None) {
        return Err(Error::Unsupported("closure is defined for static evidence formulas".into()));
    }
    if universe.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let mut agents: Vec<String> = universe.to_vec();
    agents.sort();
    agents.dedup();
    for a in phi0.named_agents() {
        if !agents.contains(&a) {
            return Err(Error::UnknownAgent(a));
        }
    }
    let phi0 = phi0.map_groups(&|g| g.explicit(&agents));
    let supersets = |g: &Group| -> Vec<Group> {
        let Group::Agents(j) = g else { unreachable!() };
        let k = agents.len();
        (1u32..1 << k)
            .map(|m| (0..k).filter(|b| m >> b & 1 == 1).map(|b| agents[b].clone()).collect::<BTreeSet<_>>())
            .filter(|i| i.len() > j.len() && j.is_subset(i))
            .map(Group::Agents)
            .collect()
    };

    let mut out = BTreeSet::new();
    let mut work = vec![phi0];
    while let Some(f) = work.pop() {
        if !out.insert(f.clone()) {
            continue;
        }
        let mut derived: Vec<Formula> = f.children().into_iter().cloned().collect();
        derived.push(f.single_negation());
        match &f {
            Formula::Forall(i, psi) => {
                for bigger in supersets(i) {
                    derived.push(Formula::forall(bigger, (**psi).clone()));
                }
                derived.push(Formula::boxed(i.clone(), f.clone()));
                derived.push(Formula::boxed(i.clone(), (**psi).clone()));
            }
            Formula::Box(j, psi) => {
                for bigger in supersets(j) {
                    derived.push(Formula::boxed(bigger, (**psi).clone()));
                }
            }
            Formula::Not(inner) => {
                if let Formula::Forall(i, _) = &**inner {
                    derived.push(Formula::boxed(i.clone(), f.clone()));
                }
            }
            _ => {}
        }
        work.extend(derived.into_iter().filter(|d| !out.contains(d)));
    }
    Ok(out)
}
