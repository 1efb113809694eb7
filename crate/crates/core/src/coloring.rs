//! Colors, color spaces, list assignments and coloring results.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{IdMap, NodeId};
use crate::scalar::Scalar;

pub type Color = u32;

/// `None` is ⊥ (uncolored).
pub type PartialColoring = Vec<Option<Color>>;

/// Half-open interval `[lo, hi)` of colors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColorSpace {
    pub lo: Color,
    pub hi: Color,
}

impl ColorSpace {
    pub fn new(lo: Color, hi: Color) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidParameter(format!("empty color space [{lo}, {hi})")));
        }
        Ok(ColorSpace { lo, hi })
    }

    /// `[0, size)`.
    pub fn first(size: usize) -> Self {
        ColorSpace {
            lo: 0,
            hi: size.max(1) as Color,
        }
    }

    pub fn size(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn contains(&self, c: Color) -> bool {
        self.lo <= c && c < self.hi
    }
}

/// Split of a color space into contiguous chunks of `chunk` colors (the last
/// one possibly shorter).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorSpacePartition {
    pub space: ColorSpace,
    pub chunk: usize,
    pub parts: usize,
}

impl ColorSpacePartition {
    /// Chunks of `max(1, ⌊C/η⌋)` colors, so every part has at most `C/η` colors
    /// whenever `η ≤ C`.
    pub fn new<T: Scalar>(space: ColorSpace, eta: T) -> Result<Self> {
        if eta < T::one() {
            return Err(Error::InvalidParameter(format!("eta = {eta} must be >= 1")));
        }
        let c = space.size();
        let chunk = (T::from_count(c) / eta).floor_count().max(1);
        Ok(ColorSpacePartition {
            space,
            chunk,
            parts: c.div_ceil(chunk),
        })
    }

    pub fn with_chunk(space: ColorSpace, chunk: usize) -> Self {
        let chunk = chunk.max(1);
        ColorSpacePartition {
            space,
            chunk,
            parts: space.size().div_ceil(chunk),
        }
    }

    pub fn part_of(&self, c: Color) -> usize {
        (c - self.space.lo) as usize / self.chunk
    }

    pub fn part(&self, i: usize) -> ColorSpace {
        let lo = self.space.lo + (i * self.chunk) as Color;
        let hi = (lo + self.chunk as Color).min(self.space.hi);
        ColorSpace { lo, hi }
    }

    /// `ℓ_x = |list ∩ C_x|` for every part `x`.
    pub fn counts(&self, list: &[Color]) -> Vec<usize> {
        let mut counts = vec![0; self.parts];
        for &c in list {
            counts[self.part_of(c)] += 1;
        }
        counts
    }
}

/// Per-node sorted, duplicate-free color lists inside a common space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ListData", into = "ListData")]
pub struct ListAssignment {
    space: ColorSpace,
    lists: Vec<Vec<Color>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ListData {
    pub space: ColorSpace,
    pub lists: Vec<Vec<Color>>,
}

impl From<ListAssignment> for ListData {
    fn from(l: ListAssignment) -> Self {
        ListData {
            space: l.space,
            lists: l.lists,
        }
    }
}

impl TryFrom<ListData> for ListAssignment {
    type Error = Error;
    fn try_from(d: ListData) -> Result<Self> {
        ListAssignment::new(d.space, d.lists)
    }
}

impl ListAssignment {
    pub fn new(space: ColorSpace, mut lists: Vec<Vec<Color>>) -> Result<Self> {
        for (v, list) in lists.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if let Some(&c) = list.iter().find(|&&c| !space.contains(c)) {
                return Err(Error::InvalidParameter(format!(
                    "color {c} of node {v} outside space [{}, {})",
                    space.lo, space.hi
                )));
            }
        }
        Ok(ListAssignment { space, lists })
    }

    /// Every node gets the whole space.
    pub fn full(n: usize, space: ColorSpace) -> Self {
        ListAssignment {
            space,
            lists: vec![(space.lo..space.hi).collect(); n],
        }
    }

    pub fn space(&self) -> ColorSpace {
        self.space
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn list(&self, v: NodeId) -> &[Color] {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[Vec<Color>] {
        &self.lists
    }

    pub fn into_lists(self) -> Vec<Vec<Color>> {
        self.lists
    }

    pub fn contains(&self, v: NodeId, c: Color) -> bool {
        self.lists[v].binary_search(&c).is_ok()
    }

    pub fn restrict(&self, map: &IdMap) -> ListAssignment {
        ListAssignment {
            space: self.space,
            lists: map.restrict(&self.lists),
        }
    }
}

/// Proper coloring with colors in `[0, palette_size)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProperColoring {
    pub color: Vec<u64>,
    pub palette_size: u64,
}

impl ProperColoring {
    /// Node ids as colors.
    pub fn from_ids(n: usize) -> Self {
        ProperColoring {
            color: (0..n as u64).collect(),
            palette_size: n.max(1) as u64,
        }
    }

    pub fn restrict(&self, map: &IdMap) -> ProperColoring {
        ProperColoring {
            color: map.restrict(&self.color),
            palette_size: self.palette_size,
        }
    }
}

/// Bucket assignment whose same-bucket neighbor count is at most `λ·deg(v)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectiveColoring<T> {
    pub bucket: Vec<usize>,
    pub q: usize,
    pub lambda: T,
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn partition_chunks() {
        let p = ColorSpacePartition::new(ColorSpace::first(25), 5.0).unwrap();
        assert_eq!((p.chunk, p.parts), (5, 5));
        let p = ColorSpacePartition::new(ColorSpace::first(10), 4.0).unwrap();
        assert_eq!((p.chunk, p.parts), (2, 5));
        assert_eq!(p.part(4), ColorSpace { lo: 8, hi: 10 });
        let p = ColorSpacePartition::new(ColorSpace::new(3, 10).unwrap(), Ratio::new(7i64, 2)).unwrap();
        assert_eq!((p.chunk, p.parts), (2, 4));
        assert_eq!(p.part(3), ColorSpace { lo: 9, hi: 10 });
        assert_eq!(p.part_of(9), 3);
        assert_eq!(p.counts(&[3, 4, 9]), vec![2, 0, 0, 1]);
        assert!(ColorSpacePartition::new(ColorSpace::first(4), 0.5).is_err());
    }

    #[test]
    fn partition_is_a_cover() {
        for c in 1..40usize {
            for eta in 1..=c {
                let p = ColorSpacePartition::new(ColorSpace::first(c), eta as f64).unwrap();
                let total: usize = (0..p.parts).map(|i| p.part(i).size()).sum();
                assert_eq!(total, c);
                assert!(p.parts <= 2 * eta);
                assert!((0..p.parts).all(|i| p.part(i).size() * eta <= c));
            }
        }
    }

    #[test]
    fn list_validation() {
        let space = ColorSpace::first(4);
        let l = ListAssignment::new(space, vec![vec![3, 1, 1], vec![]]).unwrap();
        assert_eq!(l.list(0), &[1, 3]);
        assert!(ListAssignment::new(space, vec![vec![4]]).is_err());
        assert!(ColorSpace::new(2, 2).is_err());
    }
}
