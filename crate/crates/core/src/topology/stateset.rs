use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A subset of the carrier `{0..n-1}`, stored as a dense bitset.
///
/// Two words are kept inline; larger carriers (unraveled models) spill to the
/// heap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet {
    n: usize,
    words: SmallVec<[u64; 2]>,
}

fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet { n, words: SmallVec::from_elem(0, word_count(n)) }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for w in s.words.iter_mut() {
            *w = !0;
        }
        s.trim();
        s
    }

    pub fn singleton(n: usize, x: usize) -> Self {
        let mut s = Self::empty(n);
        s.insert(x);
        s
    }

    /// Builds a set from member indices, rejecting out-of-range states.
    pub fn from_members<I: IntoIterator<Item = usize>>(n: usize, members: I) -> Result<Self> {
        let mut s = Self::empty(n);
        for x in members {
            if x >= n {
                return Err(Error::OutOfRange { state: x, size: n });
            }
            s.insert(x);
        }
        Ok(s)
    }

    /// Interprets the low `n` bits of `bits` as a set (`n <= 64`).
    pub fn from_bits(n: usize, bits: u64) -> Self {
        assert!(n <= 64);
        let mut s = Self::empty(n);
        if n > 0 {
            s.words[0] = bits;
            s.trim();
        }
        s
    }

    /// The low word; meaningful when the carrier has at most 64 states.
    pub fn bits(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        let r = self.n % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.n && self.words[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn insert(&mut self, x: usize) {
        assert!(x < self.n, "state {x} out of range {}", self.n);
        self.words[x / 64] |= 1 << (x % 64);
    }

    pub fn remove(&mut self, x: usize) {
        if x < self.n {
            self.words[x / 64] &= !(1 << (x % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + t)
                }
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    fn check(&self, other: &StateSet) {
        assert_eq!(self.n, other.n, "carrier mismatch");
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        self.check(other);
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
        s
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        self.check(other);
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
        s
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        self.check(other);
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(other.words.iter()) {
            *a &= !b;
        }
        s
    }

    pub fn complement(&self) -> StateSet {
        let mut s = self.clone();
        for w in s.words.iter_mut() {
            *w = !*w;
        }
        s.trim();
        s
    }

    pub fn union_with(&mut self, other: &StateSet) {
        self.check(other);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &StateSet) {
        self.check(other);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.check(other);
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.check(other);
        self.words.iter().zip(other.words.iter()).any(|(a, b)| a & b != 0)
    }

    /// Image of the set under a state renaming `perm[x]`.
    pub fn permuted(&self, perm: &[usize]) -> StateSet {
        let mut s = StateSet::empty(self.n);
        for x in self.iter() {
            s.insert(perm[x]);
        }
        s
    }

    /// All subsets of a carrier of size `n <= 20`, in increasing bit order.
    pub fn all_subsets(n: usize) -> impl Iterator<Item = StateSet> {
        assert!(n <= 20, "refusing to enumerate 2^{n} subsets");
        (0u64..1 << n).map(move |b| StateSet::from_bits(n, b))
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, x) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}
