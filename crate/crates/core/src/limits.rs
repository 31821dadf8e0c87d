//! Caps on the exhaustive enumerations performed by the checkers.

use serde::{Deserialize, Serialize};

use crate::partition::DEFAULT_BLOCK_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Blocks per partition when enumerating band projections for Markov and kernel checks.
    pub max_blocks: usize,
    /// Blocks per partition when enumerating band projections for independence checks.
    pub independence_blocks: usize,
    /// Atoms for scans over every band projection of the space.
    pub max_atoms_exhaustive: usize,
    /// Members of a family tested for independence.
    pub max_family: usize,
    /// Largest index subset on either side of a family pair.
    pub max_pair_size: usize,
    /// Future times combined in one product-of-projections check.
    pub max_future: usize,
    /// Projection tuples enumerated by one future-products check.
    pub max_tuples: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_blocks: DEFAULT_BLOCK_CAP,
            independence_blocks: 12,
            max_atoms_exhaustive: 16,
            max_family: 4,
            max_pair_size: 2,
            max_future: 3,
            max_tuples: 1 << 16,
        }
    }
}

impl Limits {
    /// Uses `cap` for every per-partition block cap.
    pub fn with_block_cap(mut self, cap: usize) -> Self {
        self.max_blocks = cap;
        self.independence_blocks = cap;
        self
    }
}
