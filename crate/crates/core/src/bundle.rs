//! Item bundles as fixed-width bitmasks.

use std::fmt;

use crate::error::{Error, Result};

/// Largest item universe a [`Bundle`] can address.
pub const MAX_ITEMS: usize = 32;

/// A subset of the items `{0, .., m-1}`, bit `j` set iff item `j` is present.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bundle(u32);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub const fn from_bits(bits: u32) -> Self {
        Bundle(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    /// Every item of an `m`-item universe.
    pub fn full(m: usize) -> Self {
        assert!(m <= MAX_ITEMS, "universe of {m} items exceeds {MAX_ITEMS}");
        if m == MAX_ITEMS {
            Bundle(u32::MAX)
        } else {
            Bundle((1u32 << m) - 1)
        }
    }

    pub fn singleton(j: usize) -> Self {
        assert!(j < MAX_ITEMS);
        Bundle(1 << j)
    }

    /// Builds a bundle from item indices, rejecting any index `>= m`.
    pub fn from_items<I: IntoIterator<Item = usize>>(items: I, m: usize) -> Result<Self> {
        let mut bits = 0u32;
        for j in items {
            if j >= m || j >= MAX_ITEMS {
                return Err(Error::InvalidInstance(format!(
                    "item index {j} out of range for {m} items"
                )));
            }
            bits |= 1 << j;
        }
        Ok(Bundle(bits))
    }

    pub fn contains(self, j: usize) -> bool {
        j < MAX_ITEMS && self.0 & (1 << j) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Bundle) -> Bundle {
        Bundle(self.0 | other.0)
    }

    pub fn intersection(self, other: Bundle) -> Bundle {
        Bundle(self.0 & other.0)
    }

    pub fn difference(self, other: Bundle) -> Bundle {
        Bundle(self.0 & !other.0)
    }

    pub fn with(self, j: usize) -> Bundle {
        self.union(Bundle::singleton(j))
    }

    pub fn without(self, j: usize) -> Bundle {
        self.difference(Bundle::singleton(j))
    }

    pub fn is_subset_of(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Bundle) -> bool {
        self.0 & other.0 == 0
    }

    /// True iff every member is `< m`.
    pub fn within(self, m: usize) -> bool {
        m >= MAX_ITEMS || self.0 >> m == 0
    }

    pub fn check_within(self, m: usize) -> Result<()> {
        if self.within(m) {
            Ok(())
        } else {
            Err(Error::UniverseMismatch {
                bundle: self.0,
                items: m,
            })
        }
    }

    /// Item indices in increasing order.
    pub fn items(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let j = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(j)
            }
        })
    }

    /// All subsets of `self`, in increasing bitmask order (starting at the
    /// empty set, ending at `self`).
    pub fn subsets(self) -> impl Iterator<Item = Bundle> {
        let mask = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some((cur.wrapping_sub(mask)) & mask)
            };
            Some(Bundle(cur))
        })
    }

    /// Every bundle of an `m`-item universe in bitmask order.
    pub fn all(m: usize) -> impl Iterator<Item = Bundle> {
        Bundle::full(m).subsets()
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.items()).finish()
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (pos, j) in self.items().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}
