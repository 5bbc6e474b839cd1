use std::cmp::Ordering;
use std::fmt;

use super::ExteriorError;

/// One of the seven coframe 1-forms of the cone.
///
/// Indices 1..=3 are `α_i = η_i + η̃_i`, 4..=6 are `β_j = η_{j-3} − η̃_{j-3}`
/// and 7 is `dr`. The ordering 1 < 2 < … < 7 fixes the orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoframeIndex(u8);

impl CoframeIndex {
    pub const DR: CoframeIndex = CoframeIndex(7);

    pub fn new(index: u8) -> Result<Self, ExteriorError> {
        if (1..=7).contains(&index) {
            Ok(CoframeIndex(index))
        } else {
            Err(ExteriorError::InvalidIndex(index))
        }
    }

    pub fn alpha(i: u8) -> Result<Self, ExteriorError> {
        if (1..=3).contains(&i) {
            Ok(CoframeIndex(i))
        } else {
            Err(ExteriorError::InvalidIndex(i))
        }
    }

    pub fn beta(j: u8) -> Result<Self, ExteriorError> {
        if (4..=6).contains(&j) {
            Ok(CoframeIndex(j))
        } else {
            Err(ExteriorError::InvalidIndex(j))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = CoframeIndex> {
        (1..=7).map(CoframeIndex)
    }

    pub(crate) fn bit(self) -> u8 {
        1 << (self.0 - 1)
    }
}

impl fmt::Display for CoframeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            1..=3 => write!(f, "a{}", self.0),
            4..=6 => write!(f, "b{}", self.0),
            _ => f.write_str("dr"),
        }
    }
}

/// A basis monomial `e^{i_1} ∧ … ∧ e^{i_k}` with strictly increasing indices,
/// stored as a 7-bit set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Blade(u8);

impl Blade {
    pub const SCALAR: Blade = Blade(0);
    pub const TOP: Blade = Blade(0x7f);

    pub fn from_bits(bits: u8) -> Option<Blade> {
        (bits <= 0x7f).then_some(Blade(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    /// Sorts `indices` into a blade. Returns the permutation sign, or `None` when an
    /// index repeats (the monomial vanishes).
    pub fn from_indices(indices: &[u8]) -> Result<Option<(Blade, i8)>, ExteriorError> {
        let mut blade = Blade::SCALAR;
        let mut sign = 1i8;
        for &i in indices {
            let idx = CoframeIndex::new(i)?;
            let single = Blade(idx.bit());
            match blade.wedge_sign(single) {
                Some(s) => {
                    sign *= s;
                    blade = Blade(blade.0 | single.0);
                }
                None => return Ok(None),
            }
        }
        Ok(Some((blade, sign)))
    }

    pub fn degree(self) -> u8 {
        self.0.count_ones() as u8
    }

    pub fn contains(self, index: CoframeIndex) -> bool {
        self.0 & index.bit() != 0
    }

    pub fn indices(self) -> impl Iterator<Item = u8> {
        (1..=7u8).filter(move |i| self.0 & (1 << (i - 1)) != 0)
    }

    /// Complementary blade in the 7-dimensional coframe.
    pub fn complement(self) -> Blade {
        Blade(!self.0 & 0x7f)
    }

    /// Sign of `self ∧ other` relative to the sorted union, or `None` if they overlap.
    pub fn wedge_sign(self, other: Blade) -> Option<i8> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // count pairs (i in self, j in other) with i > j
        let mut inversions = 0u32;
        for j in other.indices() {
            let above = self.0 >> j;
            inversions += above.count_ones();
        }
        Some(if inversions.is_multiple_of(2) { 1 } else { -1 })
    }

    /// Position (0-based) of `index` inside the sorted blade.
    pub fn position(self, index: CoframeIndex) -> Option<u32> {
        self.contains(index)
            .then(|| (self.0 & (index.bit() - 1)).count_ones())
    }

    pub(crate) fn without(self, index: CoframeIndex) -> Blade {
        Blade(self.0 & !index.bit())
    }

    pub(crate) fn with(self, index: CoframeIndex) -> Blade {
        Blade(self.0 | index.bit())
    }

    /// Every blade of the given degree in lexicographic order.
    pub fn all_of_degree(degree: u8) -> Vec<Blade> {
        let mut v: Vec<Blade> = (0u8..=0x7f)
            .map(Blade)
            .filter(|b| b.degree() == degree)
            .collect();
        v.sort();
        v
    }
}

impl Ord for Blade {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.indices().cmp(other.indices()))
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return f.write_str("1");
        }
        f.write_str("e^")?;
        for i in self.indices() {
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_range() {
        assert!(CoframeIndex::new(0).is_err());
        assert!(CoframeIndex::new(8).is_err());
        assert_eq!(CoframeIndex::all().count(), 7);
        assert!(CoframeIndex::alpha(4).is_err());
        assert!(CoframeIndex::beta(3).is_err());
    }

    #[test]
    fn sorting_signs() {
        let (b, s) = Blade::from_indices(&[6, 2, 1]).unwrap().unwrap();
        assert_eq!(b.indices().collect::<Vec<_>>(), vec![1, 2, 6]);
        assert_eq!(s, -1);
        let (_, s) = Blade::from_indices(&[1, 7, 4]).unwrap().unwrap();
        assert_eq!(s, -1);
        let (_, s) = Blade::from_indices(&[4, 5, 6]).unwrap().unwrap();
        assert_eq!(s, 1);
        assert!(Blade::from_indices(&[1, 2, 1]).unwrap().is_none());
        assert!(Blade::from_indices(&[9]).is_err());
    }

    #[test]
    fn positions_and_complement() {
        let (b, _) = Blade::from_indices(&[4, 5, 6]).unwrap().unwrap();
        assert_eq!(b.position(CoframeIndex::new(5).unwrap()), Some(1));
        assert_eq!(b.position(CoframeIndex::new(1).unwrap()), None);
        assert_eq!(b.complement().indices().collect::<Vec<_>>(), vec![1, 2, 3, 7]);
        assert_eq!(Blade::all_of_degree(3).len(), 35);
        assert_eq!(Blade::all_of_degree(3)[0].to_string(), "e^123");
    }
}
