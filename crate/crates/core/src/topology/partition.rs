use super::StateSet;
use crate::error::{Error, Result};

/// A partition of the carrier into non-empty, pairwise disjoint cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    cells: Vec<StateSet>,
    index: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, cells: Vec<StateSet>) -> Result<Partition> {
        let problems = Self::problems(n, &cells);
        if !problems.is_empty() {
            return Err(Error::Invalid(problems));
        }
        Ok(Self::build(n, cells))
    }

    /// Lists everything wrong with `cells` as a partition of `{0..n-1}`.
    pub fn problems(n: usize, cells: &[StateSet]) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = StateSet::empty(n);
        for c in cells {
            if c.carrier_size() != n {
                out.push(format!("cell {c} has carrier {} not {n}", c.carrier_size()));
                continue;
            }
            if c.is_empty() {
                out.push("empty cell".to_string());
            }
            if c.intersects(&seen) {
                out.push(format!("cell {c} overlaps another cell"));
            }
            seen.union_with(c);
        }
        if !seen.is_full() {
            out.push(format!("cells do not cover states {}", seen.complement()));
        }
        out
    }

    fn build(n: usize, mut cells: Vec<StateSet>) -> Partition {
        cells.sort_by_key(|c| c.first());
        let mut index = vec![0; n];
        for (k, c) in cells.iter().enumerate() {
            for x in c.iter() {
                index[x] = k;
            }
        }
        Partition { n, cells, index }
    }

    /// The one-cell partition `{X}`.
    pub fn trivial(n: usize) -> Partition {
        Self::build(n, vec![StateSet::full(n)])
    }

    pub fn discrete(n: usize) -> Partition {
        Self::build(n, (0..n).map(|x| StateSet::singleton(n, x)).collect())
    }

    /// Partition whose cells are the classes of `class_of`, given per state.
    pub fn from_classes(classes: &[StateSet]) -> Result<Partition> {
        let n = classes.len();
        let mut cells: Vec<StateSet> = classes.to_vec();
        cells.sort();
        cells.dedup();
        Self::new(n, cells)
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[StateSet] {
        &self.cells
    }

    pub fn cell_of(&self, x: usize) -> &StateSet {
        &self.cells[self.index[x]]
    }

    pub fn cell_index(&self, x: usize) -> usize {
        self.index[x]
    }

    /// Union of the cells meeting `a`.
    pub fn saturate(&self, a: &StateSet) -> StateSet {
        let mut r = StateSet::empty(self.n);
        for c in &self.cells {
            if c.intersects(a) {
                r.union_with(c);
            }
        }
        r
    }
}

/// Cellwise intersection of the inputs.
pub fn join_partition(partitions: &[Partition]) -> Result<Partition> {
    let first = partitions.first().ok_or(Error::EmptyList)?;
    let n = first.n;
    for p in partitions {
        if p.n != n {
            return Err(Error::CarrierMismatch(p.n, n));
        }
    }
    let classes: Vec<StateSet> = (0..n)
        .map(|x| {
            let mut c = StateSet::full(n);
            for p in partitions {
                c.intersect_with(p.cell_of(x));
            }
            c
        })
        .collect();
    Partition::from_classes(&classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, xs: &[usize]) -> StateSet {
        StateSet::from_members(n, xs.iter().copied()).unwrap()
    }

    #[test]
    fn join_examples() {
        let x = Partition::trivial(4);
        assert_eq!(join_partition(&[x.clone(), x.clone()]).unwrap(), x);
        assert_eq!(join_partition(std::slice::from_ref(&x)).unwrap(), x);
        let p = Partition::new(3, vec![set(3, &[0]), set(3, &[1, 2])]).unwrap();
        let q = Partition::new(3, vec![set(3, &[0, 1]), set(3, &[2])]).unwrap();
        assert_eq!(join_partition(&[p, q]).unwrap(), Partition::discrete(3));
    }

    #[test]
    fn invalid_partitions() {
        assert!(Partition::new(3, vec![set(3, &[0, 1]), set(3, &[1, 2])]).is_err());
        assert!(Partition::new(3, vec![set(3, &[0, 1])]).is_err());
        assert!(Partition::new(3, vec![set(3, &[0, 1, 2]), StateSet::empty(3)]).is_err());
        assert!(matches!(
            join_partition(&[Partition::trivial(2), Partition::trivial(3)]),
            Err(Error::CarrierMismatch(..))
        ));
    }

    #[test]
    fn cell_lookup() {
        let p = Partition::new(4, vec![set(4, &[1, 3]), set(4, &[0, 2])]).unwrap();
        assert_eq!(p.cell_of(3), &set(4, &[1, 3]));
        assert_eq!(p.cell_index(0), 0);
        assert_eq!(p.saturate(&set(4, &[2])), set(4, &[0, 2]));
    }
}
