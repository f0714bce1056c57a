//! Instance spaces: a metric for nearest-neighbour search plus an exact
//! equality key for the duplicate test.

use std::fmt::Debug;
use std::hash::Hash;

pub trait Instance: Clone + Debug + Send + Sync {
    /// Exact identity. Two instances are the same point iff their keys match;
    /// distance-zero points with different representations stay distinct.
    type Key: Eq + Hash + Clone + Debug + Send + Sync;

    fn key(&self) -> Self::Key;
    fn distance(&self, other: &Self) -> f64;
}

impl Instance for f64 {
    type Key = u64;
    fn key(&self) -> u64 {
        self.to_bits()
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

impl Instance for [f64; 2] {
    type Key = [u64; 2];
    fn key(&self) -> [u64; 2] {
        [self[0].to_bits(), self[1].to_bits()]
    }
    fn distance(&self, other: &Self) -> f64 {
        (self[0] - other[0]).hypot(self[1] - other[1])
    }
}

/// Countable instance space with the discrete metric.
impl Instance for usize {
    type Key = usize;
    fn key(&self) -> usize {
        *self
    }
    fn distance(&self, other: &Self) -> f64 {
        if self == other {
            0.0
        } else {
            1.0
        }
    }
}
