use std::fmt;

use crate::error::{Error, Result};
use crate::topology::StateSet;

/// A binary relation on `{0..n-1}`, stored as successor sets.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    rows: Vec<StateSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Relation {
        Relation { rows: vec![StateSet::empty(n); n] }
    }

    pub fn identity(n: usize) -> Relation {
        Relation { rows: (0..n).map(|x| StateSet::singleton(n, x)).collect() }
    }

    pub fn total(n: usize) -> Relation {
        Relation { rows: vec![StateSet::full(n); n] }
    }

    pub fn from_rows(rows: Vec<StateSet>) -> Result<Relation> {
        let n = rows.len();
        for r in &rows {
            if r.carrier_size() != n {
                return Err(Error::CarrierMismatch(r.carrier_size(), n));
            }
        }
        Ok(Relation { rows })
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(n: usize, pairs: I) -> Result<Relation> {
        let mut r = Relation::empty(n);
        for (s, t) in pairs {
            for x in [s, t] {
                if x >= n {
                    return Err(Error::OutOfRange { state: x, size: n });
                }
            }
            r.rows[s].insert(t);
        }
        Ok(r)
    }

    /// The equivalence whose classes are the given cells.
    pub fn from_cells(n: usize, cells: &[StateSet]) -> Relation {
        let mut r = Relation::empty(n);
        for c in cells {
            for x in c.iter() {
                r.rows[x].union_with(c);
            }
        }
        r
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, s: usize, t: usize) -> bool {
        self.rows[s].contains(t)
    }

    pub fn insert(&mut self, s: usize, t: usize) {
        self.rows[s].insert(t);
    }

    pub fn successors(&self, s: usize) -> &StateSet {
        &self.rows[s]
    }

    pub fn rows(&self) -> &[StateSet] {
        &self.rows
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(s, r)| r.iter().map(move |t| (s, t)))
    }

    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn predecessors(&self, t: usize) -> StateSet {
        let n = self.size();
        let mut p = StateSet::empty(n);
        for s in 0..n {
            if self.rows[s].contains(t) {
                p.insert(s);
            }
        }
        p
    }

    pub fn intersection(&self, other: &Relation) -> Relation {
        Relation { rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a.intersection(b)).collect() }
    }

    pub fn union(&self, other: &Relation) -> Relation {
        Relation { rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a.union(b)).collect() }
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.size() == other.size() && self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }

    pub fn converse(&self) -> Relation {
        let n = self.size();
        let mut r = Relation::empty(n);
        for (s, t) in self.pairs() {
            r.rows[t].insert(s);
        }
        r
    }

    /// `self ; other`: pairs `(s, u)` with `s self t other u` for some `t`.
    pub fn compose(&self, other: &Relation) -> Relation {
        let n = self.size();
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut out = StateSet::empty(n);
                for t in r.iter() {
                    out.union_with(&other.rows[t]);
                }
                out
            })
            .collect();
        Relation { rows }
    }

    /// Reflexive-transitive closure.
    pub fn closure(&self) -> Relation {
        let n = self.size();
        let mut rows = self.rows.clone();
        for (x, r) in rows.iter_mut().enumerate() {
            r.insert(x);
        }
        // Warshall: for each pivot k, everything reaching k reaches k's row.
        for k in 0..n {
            let rk = rows[k].clone();
            for r in rows.iter_mut() {
                if r.contains(k) {
                    r.union_with(&rk);
                }
            }
        }
        Relation { rows }
    }

    /// Image of a set of states.
    pub fn image(&self, a: &StateSet) -> StateSet {
        let mut out = StateSet::empty(self.size());
        for s in a.iter() {
            out.union_with(&self.rows[s]);
        }
        out
    }

    /// `{s | every successor of s lies in a}`.
    pub fn universal_preimage(&self, a: &StateSet) -> StateSet {
        let n = self.size();
        let mut out = StateSet::empty(n);
        for s in 0..n {
            if self.rows[s].is_subset(a) {
                out.insert(s);
            }
        }
        out
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size()).all(|x| self.contains(x, x))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(s, t)| self.contains(t, s))
    }

    pub fn is_transitive(&self) -> bool {
        self.compose(self).is_subset(self)
    }

    pub fn is_serial(&self) -> bool {
        self.rows.iter().all(|r| !r.is_empty())
    }

    /// `s R t` and `s R u` imply `t R u`.
    pub fn is_euclidean(&self) -> bool {
        self.converse().compose(self).is_subset(self)
    }

    pub fn is_preorder(&self) -> bool {
        self.is_reflexive() && self.is_transitive()
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_preorder() && self.is_symmetric()
    }

    /// Equivalence classes, one per state; only meaningful for equivalences.
    pub fn classes(&self) -> Vec<StateSet> {
        self.rows.clone()
    }

    /// Image under a renaming of states.
    pub fn permuted(&self, perm: &[usize]) -> Relation {
        let n = self.size();
        let mut rows = vec![StateSet::empty(n); n];
        for (s, r) in self.rows.iter().enumerate() {
            rows[perm[s]] = r.permuted(perm);
        }
        Relation { rows }
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// `Max_R`: states `s` such that `s R w` implies `w R s`.
pub fn max_worlds(r: &Relation) -> StateSet {
    let n = r.size();
    let mut out = StateSet::empty(n);
    for s in 0..n {
        if r.successors(s).iter().all(|w| r.contains(w, s)) {
            out.insert(s);
        }
    }
    out
}

/// Whether every state reaches an `R`-maximal state. Holds for every preorder
/// on a finite carrier; checked rather than assumed.
pub fn is_max_dense(r: &Relation) -> Result<bool> {
    if !r.is_preorder() {
        return Err(Error::NotPreorder);
    }
    let m = max_worlds(r);
    Ok((0..r.size()).all(|s| r.successors(s).intersects(&m)))
}
