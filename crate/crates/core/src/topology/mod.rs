//! Finite set algebra and the topological kernel.
//!
//! Topologies are finite, so every one is Alexandroff: each state has a least
//! open neighbourhood, and the opens are exactly the sets that contain the
//! least neighbourhood of each of their points. Both views are kept.

mod partition;
mod stateset;

pub use partition::{join_partition, Partition};
pub use stateset::StateSet;

use crate::error::{Error, Result};

/// Largest carrier for which opens are materialized by default.
pub const DEFAULT_CARRIER_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    n: usize,
    opens: Vec<StateSet>,
    subbasis: Vec<StateSet>,
    nbhd: Vec<StateSet>,
}

fn check_range(n: usize, a: &StateSet) -> Result<()> {
    if a.carrier_size() != n {
        return Err(Error::CarrierMismatch(a.carrier_size(), n));
    }
    Ok(())
}

/// Least neighbourhood of each state in the topology generated by `family`.
fn neighbourhoods(n: usize, family: &[StateSet]) -> Vec<StateSet> {
    (0..n)
        .map(|x| {
            let mut u = StateSet::full(n);
            for s in family.iter().filter(|s| s.contains(x)) {
                u.intersect_with(s);
            }
            u
        })
        .collect()
}

fn opens_from_neighbourhoods(n: usize, nbhd: &[StateSet]) -> Vec<StateSet> {
    let masks: Vec<u64> = nbhd.iter().map(|u| u.bits()).collect();
    let mut opens = Vec::new();
    for a in 0u64..1 << n {
        if (0..n).all(|x| a >> x & 1 == 0 || masks[x] & !a == 0) {
            opens.push(StateSet::from_bits(n, a));
        }
    }
    opens.sort();
    opens
}

fn dedup_sorted(mut v: Vec<StateSet>) -> Vec<StateSet> {
    v.sort();
    v.dedup();
    v
}

impl Topology {
    pub fn carrier_size(&self) -> usize {
        self.n
    }

    /// All open sets, sorted.
    pub fn opens(&self) -> &[StateSet] {
        &self.opens
    }

    pub fn subbasis(&self) -> &[StateSet] {
        &self.subbasis
    }

    /// The least open set containing `x`.
    pub fn neighbourhood(&self, x: usize) -> &StateSet {
        &self.nbhd[x]
    }

    pub fn is_open(&self, a: &StateSet) -> bool {
        a.carrier_size() == self.n && self.opens.binary_search(a).is_ok()
    }

    pub fn indiscrete(n: usize) -> Topology {
        generate_topology(&[], n).expect("indiscrete topology")
    }

    pub fn discrete(n: usize) -> Result<Topology> {
        let singletons: Vec<_> = (0..n).map(|x| StateSet::singleton(n, x)).collect();
        generate_topology(&singletons, n)
    }

    /// Builds a topology from an explicit family of opens, checking that it is
    /// one. The non-empty opens are recorded as the subbasis.
    pub fn from_opens(n: usize, opens: &[StateSet]) -> Result<Topology> {
        for o in opens {
            check_range(n, o)?;
        }
        let opens = dedup_sorted(opens.to_vec());
        let mut problems = Vec::new();
        if opens.binary_search(&StateSet::empty(n)).is_err() {
            problems.push("empty set missing".to_string());
        }
        if opens.binary_search(&StateSet::full(n)).is_err() {
            problems.push("carrier missing".to_string());
        }
        'outer: for a in &opens {
            for b in &opens {
                if opens.binary_search(&a.union(b)).is_err() {
                    problems.push(format!("not closed under union: {a} ∪ {b}"));
                    break 'outer;
                }
                if opens.binary_search(&a.intersection(b)).is_err() {
                    problems.push(format!("not closed under intersection: {a} ∩ {b}"));
                    break 'outer;
                }
            }
        }
        if !problems.is_empty() {
            return Err(Error::Invalid(problems));
        }
        let subbasis: Vec<_> = opens.iter().filter(|o| !o.is_empty()).cloned().collect();
        let nbhd = neighbourhoods(n, &opens);
        Ok(Topology { n, opens, subbasis, nbhd })
    }
}

/// Least topology containing `subbasis`, with the default carrier cap.
pub fn generate_topology(subbasis: &[StateSet], carrier_size: usize) -> Result<Topology> {
    generate_topology_capped(subbasis, carrier_size, DEFAULT_CARRIER_CAP)
}

pub fn generate_topology_capped(subbasis: &[StateSet], carrier_size: usize, cap: usize) -> Result<Topology> {
    let n = carrier_size;
    if n == 0 {
        return Err(Error::Unsupported("empty carrier".into()));
    }
    if n > cap.min(63) {
        return Err(Error::CarrierTooLarge { size: n, cap });
    }
    for s in subbasis {
        check_range(n, s)?;
        if s.is_empty() {
            return Err(Error::EmptySubbasisMember);
        }
    }
    let subbasis = dedup_sorted(subbasis.to_vec());
    let nbhd = neighbourhoods(n, &subbasis);
    let opens = opens_from_neighbourhoods(n, &nbhd);
    Ok(Topology { n, opens, subbasis, nbhd })
}

/// Largest open subset of `a`.
pub fn interior(t: &Topology, a: &StateSet) -> Result<StateSet> {
    check_range(t.n, a)?;
    let mut r = StateSet::empty(t.n);
    for x in a.iter() {
        if t.nbhd[x].is_subset(a) {
            r.insert(x);
        }
    }
    Ok(r)
}

/// Least closed superset of `a`.
pub fn closure(t: &Topology, a: &StateSet) -> Result<StateSet> {
    Ok(interior(t, &a.complement())?.complement())
}

/// Least topology containing all the inputs. The subbases are pooled.
pub fn join(topologies: &[Topology]) -> Result<Topology> {
    let first = topologies.first().ok_or(Error::EmptyList)?;
    let n = first.n;
    for t in topologies {
        if t.n != n {
            return Err(Error::CarrierMismatch(t.n, n));
        }
    }
    if topologies.len() == 1 {
        return Ok(first.clone());
    }
    let nbhd: Vec<StateSet> = (0..n)
        .map(|x| {
            let mut u = StateSet::full(n);
            for t in topologies {
                u.intersect_with(&t.nbhd[x]);
            }
            u
        })
        .collect();
    let opens = opens_from_neighbourhoods(n, &nbhd);
    let subbasis = dedup_sorted(topologies.iter().flat_map(|t| t.subbasis.iter().cloned()).collect());
    Ok(Topology { n, opens, subbasis, nbhd })
}

/// Whether the open set `u` is dense in the information cell of `x`.
pub fn locally_dense_at(t: &Topology, p: &Partition, u: &StateSet, x: usize) -> Result<bool> {
    check_range(t.n, u)?;
    if p.carrier_size() != t.n {
        return Err(Error::CarrierMismatch(p.carrier_size(), t.n));
    }
    if x >= t.n {
        return Err(Error::OutOfRange { state: x, size: t.n });
    }
    if !t.is_open(u) {
        return Err(Error::NotOpen(u.to_string()));
    }
    Ok(p.cell_of(x).is_subset(&closure(t, u)?))
}

/// The opens that are locally dense at each of their points, plus the empty set.
pub fn dense_open(t: &Topology, p: &Partition) -> Result<Topology> {
    if p.carrier_size() != t.n {
        return Err(Error::CarrierMismatch(p.carrier_size(), t.n));
    }
    let mut opens = vec![StateSet::empty(t.n)];
    for u in t.opens.iter().filter(|u| !u.is_empty()) {
        if p.saturate(u).is_subset(&closure(t, u)?) {
            opens.push(u.clone());
        }
    }
    Topology::from_opens(t.n, &opens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, xs: &[usize]) -> StateSet {
        StateSet::from_members(n, xs.iter().copied()).unwrap()
    }

    // Worked-example carrier: w1..w4 are 0..3.
    fn tau_a() -> Topology {
        generate_topology(&[set(4, &[1, 3]), set(4, &[2, 3])], 4).unwrap()
    }

    fn tau_b() -> Topology {
        generate_topology(&[set(4, &[0, 1]), set(4, &[0, 2])], 4).unwrap()
    }

    /// Closure under intersection, then union, by fixpoint iteration.
    fn brute_force_opens(n: usize, sub: &[StateSet]) -> Vec<StateSet> {
        let mut base: Vec<StateSet> = sub.to_vec();
        base.push(StateSet::full(n));
        loop {
            let mut grew = false;
            let snapshot = base.clone();
            for a in &snapshot {
                for b in &snapshot {
                    let c = a.intersection(b);
                    if !base.contains(&c) {
                        base.push(c);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut opens = base;
        opens.push(StateSet::empty(n));
        loop {
            let mut grew = false;
            let snapshot = opens.clone();
            for a in &snapshot {
                for b in &snapshot {
                    let c = a.union(b);
                    if !opens.contains(&c) {
                        opens.push(c);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        opens.sort();
        opens.dedup();
        opens
    }

    #[test]
    fn example_subbasis_a_gives_six_opens() {
        let t = tau_a();
        let mut expect =
            [StateSet::empty(4), set(4, &[3]), set(4, &[1, 3]), set(4, &[2, 3]), set(4, &[1, 2, 3]), StateSet::full(4)];
        expect.sort();
        assert_eq!(t.opens(), &expect[..]);
        assert_eq!(t.opens(), &brute_force_opens(4, t.subbasis())[..]);
    }

    #[test]
    fn empty_subbasis_is_indiscrete() {
        let t = generate_topology(&[], 3).unwrap();
        assert_eq!(t.opens(), &[StateSet::empty(3), StateSet::full(3)]);
    }

    #[test]
    fn pooled_subbases_are_discrete() {
        let sub = [set(4, &[1, 3]), set(4, &[2, 3]), set(4, &[0, 1]), set(4, &[0, 2])];
        let t = generate_topology(&sub, 4).unwrap();
        assert_eq!(t.opens().len(), 16);
        let j = join(&[tau_a(), tau_b()]).unwrap();
        assert_eq!(j.opens().len(), 16);
        assert_eq!(j.opens(), t.opens());
    }

    #[test]
    fn generate_rejects_bad_input() {
        assert_eq!(generate_topology(&[StateSet::empty(3)], 3), Err(Error::EmptySubbasisMember));
        assert!(matches!(generate_topology(&[StateSet::full(4)], 3), Err(Error::CarrierMismatch(4, 3))));
        assert!(matches!(generate_topology(&[], 17), Err(Error::CarrierTooLarge { .. })));
        assert!(generate_topology_capped(&[], 17, 20).is_ok());
    }

    #[test]
    fn interior_and_closure_examples() {
        let t = tau_a();
        let p = set(4, &[0, 1, 3]);
        assert_eq!(interior(&t, &p).unwrap(), set(4, &[1, 3]));
        assert_eq!(interior(&t, &StateSet::full(4)).unwrap(), StateSet::full(4));
        assert_eq!(interior(&t, &StateSet::empty(4)).unwrap(), StateSet::empty(4));
        assert_eq!(closure(&t, &set(4, &[1, 3])).unwrap(), StateSet::full(4));
        let d = Topology::discrete(4).unwrap();
        for a in StateSet::all_subsets(4) {
            assert_eq!(closure(&d, &a).unwrap(), a);
        }
    }

    #[test]
    fn join_identities() {
        let t = tau_a();
        assert_eq!(join(std::slice::from_ref(&t)).unwrap(), t);
        let j = join(&[Topology::indiscrete(4), t.clone()]).unwrap();
        assert_eq!(j.opens(), t.opens());
        assert!(matches!(join(&[]), Err(Error::EmptyList)));
        assert!(matches!(join(&[Topology::indiscrete(3), t]), Err(Error::CarrierMismatch(..))));
    }

    #[test]
    fn local_density_examples() {
        let t = tau_a();
        let x = Partition::trivial(4);
        assert!(locally_dense_at(&t, &x, &set(4, &[1, 3]), 1).unwrap());
        assert!(locally_dense_at(&t, &x, &StateSet::full(4), 0).unwrap());
        let d = Topology::discrete(4).unwrap();
        assert!(!locally_dense_at(&d, &x, &set(4, &[0, 1, 3]), 1).unwrap());
        assert!(matches!(locally_dense_at(&t, &x, &set(4, &[0]), 0), Err(Error::NotOpen(_))));
    }

    #[test]
    fn dense_open_examples() {
        let x = Partition::trivial(4);
        assert_eq!(dense_open(&tau_a(), &x).unwrap().opens(), tau_a().opens());
        let d = Topology::discrete(4).unwrap();
        assert_eq!(dense_open(&d, &x).unwrap().opens(), Topology::indiscrete(4).opens());
        let i = Topology::indiscrete(4);
        assert_eq!(dense_open(&i, &x).unwrap().opens(), i.opens());
    }

    #[test]
    fn from_opens_rejects_non_topologies() {
        let bad = [StateSet::empty(3), set(3, &[0]), set(3, &[1]), StateSet::full(3)];
        assert!(matches!(Topology::from_opens(3, &bad), Err(Error::Invalid(_))));
        let good = [StateSet::empty(3), set(3, &[0]), StateSet::full(3)];
        assert_eq!(Topology::from_opens(3, &good).unwrap().opens().len(), 3);
    }

    #[test]
    fn single_state_carrier() {
        let t = generate_topology(&[StateSet::full(1)], 1).unwrap();
        assert_eq!(t.opens(), Topology::discrete(1).unwrap().opens());
        assert_eq!(t.opens().len(), 2);
    }
}
