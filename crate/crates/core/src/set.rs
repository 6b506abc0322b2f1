use crate::game::StateId;

/// A subset of the states of a fixed game, stored as a bit vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct StateSet {
    bits: Vec<bool>,
}

impl StateSet {
    pub fn new(n: usize) -> StateSet {
        StateSet {
            bits: vec![false; n],
        }
    }

    pub fn full(n: usize) -> StateSet {
        StateSet {
            bits: vec![true; n],
        }
    }

    pub fn from_ids(n: usize, ids: impl IntoIterator<Item = StateId>) -> StateSet {
        let mut s = StateSet::new(n);
        for q in ids {
            s.insert(q);
        }
        s
    }

    pub fn from_bits(bits: Vec<bool>) -> StateSet {
        StateSet { bits }
    }

    /// Subset of `0..n` encoded by the low `n` bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> StateSet {
        StateSet {
            bits: (0..n).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Size of the universe, not of the set.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.bits[q.0]
    }

    pub fn insert(&mut self, q: StateId) -> bool {
        !std::mem::replace(&mut self.bits[q.0], true)
    }

    pub fn remove(&mut self, q: StateId) -> bool {
        std::mem::replace(&mut self.bits[q.0], false)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| StateId(i))
    }

    fn zip_with(&self, other: &StateSet, f: impl Fn(bool, bool) -> bool) -> StateSet {
        assert_eq!(self.bits.len(), other.bits.len(), "state sets over different games");
        StateSet {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> StateSet {
        StateSet {
            bits: self.bits.iter().map(|&b| !b).collect(),
        }
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }
}
