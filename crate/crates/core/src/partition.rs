//! Partitions of the atom set.
//!
//! A partition stands for the closed Riesz subspace of elements that are
//! constant on each of its blocks. Finer partitions carry larger subspaces, so
//! `H.refines(G)` encodes `R(T_G) ⊆ R(T_H)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, RieszError};
use crate::riesz::{ensure_same, BandProjection, RieszElement, SampleSpace, Space};

/// Maximum number of blocks for exhaustive band-projection enumeration (2^16 projections).
pub const DEFAULT_BLOCK_CAP: usize = 16;

#[derive(Clone)]
pub struct Partition {
    space: Space,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Validates that `blocks` cover every atom exactly once and stores them canonically.
    pub fn new(space: &Space, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = space.len();
        let mut owner = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(RieszError::domain("partition has an empty block"));
            }
            for &a in block {
                if a >= n {
                    return Err(RieszError::domain(format!("atom index {a} out of range")));
                }
                if owner[a] != usize::MAX {
                    return Err(RieszError::domain(format!(
                        "atom {:?} appears in more than one block",
                        space.atoms()[a]
                    )));
                }
                owner[a] = b;
            }
        }
        if let Some(a) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(RieszError::domain(format!(
                "atom {:?} is not covered by the partition",
                space.atoms()[a]
            )));
        }
        Ok(Self::from_labels(space, &owner))
    }

    /// Groups atoms whose keys compare equal. Block order follows the least atom of each block.
    pub fn from_labels<K: PartialEq>(space: &Space, keys: &[K]) -> Self {
        assert_eq!(keys.len(), space.len(), "one key per atom");
        let mut reps: Vec<&K> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(keys.len());
        for (atom, key) in keys.iter().enumerate() {
            match reps.iter().position(|r| *r == key) {
                Some(b) => {
                    blocks[b].push(atom);
                    block_of.push(b);
                }
                None => {
                    reps.push(key);
                    blocks.push(vec![atom]);
                    block_of.push(blocks.len() - 1);
                }
            }
        }
        Partition {
            space: Arc::clone(space),
            blocks,
            block_of,
        }
    }

    pub fn trivial(space: &Space) -> Self {
        Self::from_labels(space, &vec![0u8; space.len()])
    }

    pub fn discrete(space: &Space) -> Self {
        let labels: Vec<usize> = (0..space.len()).collect();
        Self::from_labels(space, &labels)
    }

    /// Level sets of `f`, compared with exact equality.
    pub fn level_sets(f: &RieszElement) -> Self {
        Self::from_labels(f.space(), f.values())
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, atom: usize) -> usize {
        self.block_of[atom]
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.space.len()
    }

    /// True iff every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> Result<bool> {
        ensure_same(&self.space, &coarser.space)?;
        Ok(self
            .blocks
            .iter()
            .all(|block| block.iter().all(|&a| coarser.block_of[a] == coarser.block_of[block[0]])))
    }

    /// Common refinement: nonempty intersections of blocks.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        ensure_same(&self.space, &other.space)?;
        let keys: Vec<(usize, usize)> = self
            .block_of
            .iter()
            .zip(&other.block_of)
            .map(|(&a, &b)| (a, b))
            .collect();
        Ok(Self::from_labels(&self.space, &keys))
    }

    /// Coarsest refinement of `self` on which every element of `xs` is constant per block.
    pub fn generated(&self, xs: &[&RieszElement]) -> Result<Partition> {
        let mut current = self.clone();
        for x in xs {
            ensure_same(&self.space, x.space())?;
            current = current.join(&Partition::level_sets(x))?;
        }
        Ok(current)
    }

    /// Whether `f` is constant on every block, i.e. lies in the partition subspace.
    pub fn is_measurable(&self, f: &RieszElement) -> Result<bool> {
        ensure_same(&self.space, f.space())?;
        Ok(self
            .blocks
            .iter()
            .all(|block| block.iter().all(|&a| f.value(a) == f.value(block[0]))))
    }

    /// Whether the support of `p` is a union of blocks.
    pub fn contains_projection(&self, p: &BandProjection) -> Result<bool> {
        ensure_same(&self.space, p.space())?;
        Ok(self
            .blocks
            .iter()
            .all(|block| block.iter().all(|&a| p.contains(a) == p.contains(block[0]))))
    }

    /// Projection onto the union of the blocks whose bits are set in `mask`.
    pub fn union_projection(&self, mask: u64) -> BandProjection {
        let support = self.block_of.iter().map(|&b| mask >> b & 1 == 1).collect();
        BandProjection::new(&self.space, support).expect("mask matches space")
    }

    /// Projection onto block `b` alone.
    pub fn block_projection(&self, b: usize) -> BandProjection {
        let support = self.block_of.iter().map(|&x| x == b).collect();
        BandProjection::new(&self.space, support).expect("mask matches space")
    }

    /// Every band projection `Q` with `Qe` in the partition subspace: the indicators of unions
    /// of blocks, in increasing bitmask order over blocks.
    pub fn enumerate_band_projections(&self, cap: usize) -> Result<Vec<BandProjection>> {
        let k = self.num_blocks();
        if k > cap || k >= 64 {
            return Err(RieszError::CapExceeded {
                what: "blocks for band-projection enumeration",
                cap,
                actual: k,
            });
        }
        Ok((0..1u64 << k).map(|mask| self.union_projection(mask)).collect())
    }

    /// Indicators of the blocks, a basis of the partition subspace.
    pub fn block_indicators(&self) -> Vec<RieszElement> {
        (0..self.num_blocks())
            .map(|b| self.block_projection(b).indicator())
            .collect()
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let names: Vec<&str> = b.iter().map(|&a| self.space.atoms()[a].as_str()).collect();
                format!("{{{}}}", names.join(","))
            })
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// `⟨G, x₁, …, x_n⟩`: the partition generated by `g` and the level sets of `xs`.
pub fn generated_partition(g: &Partition, xs: &[&RieszElement]) -> Result<Partition> {
    g.generated(xs)
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        SampleSpace::same(&self.space, &other.space) && self.blocks == other.blocks
    }
}

impl Eq for Partition {}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space4() -> Space {
        SampleSpace::uniform(4)
    }

    fn part(s: &Space, blocks: &[&[usize]]) -> Partition {
        Partition::new(s, blocks.iter().map(|b| b.iter().map(|a| a - 1).collect()).collect()).unwrap()
    }

    #[test]
    fn construction_validates_cover() {
        let s = space4();
        assert!(Partition::new(&s, vec![vec![0, 1], vec![2]]).is_err());
        assert!(Partition::new(&s, vec![vec![0, 1], vec![1, 2, 3]]).is_err());
        assert!(Partition::new(&s, vec![vec![0, 1, 2, 3], vec![]]).is_err());
        // canonical order regardless of input order
        assert_eq!(part(&s, &[&[4, 3], &[2, 1]]), part(&s, &[&[1, 2], &[3, 4]]));
    }

    #[test]
    fn refinement_examples() {
        let s = space4();
        let g = part(&s, &[&[1, 2], &[3, 4]]);
        assert!(Partition::discrete(&s).refines(&g).unwrap());
        assert!(g.refines(&g).unwrap());
        assert!(!part(&s, &[&[1, 3], &[2, 4]]).refines(&g).unwrap());
        assert!(g.refines(&Partition::trivial(&s)).unwrap());
        assert_eq!(
            g.refines(&Partition::trivial(&SampleSpace::uniform(3))),
            Err(RieszError::SpaceMismatch)
        );
    }

    #[test]
    fn join_examples() {
        let s = space4();
        let a = part(&s, &[&[1, 2], &[3, 4]]);
        let b = part(&s, &[&[1, 3], &[2, 4]]);
        assert_eq!(a.join(&b).unwrap(), Partition::discrete(&s));
        assert_eq!(a.join(&a).unwrap(), a);
        assert_eq!(a.join(&Partition::trivial(&s)).unwrap(), a);
    }

    #[test]
    fn generated_partition_examples() {
        let s = space4();
        let t = Partition::trivial(&s);
        let x = RieszElement::from_ints(&s, &[1, 1, 0, 0]).unwrap();
        assert_eq!(generated_partition(&t, &[&x]).unwrap(), part(&s, &[&[1, 2], &[3, 4]]));
        assert_eq!(generated_partition(&t, &[]).unwrap(), t);
        let g = part(&s, &[&[1, 2], &[3, 4]]);
        let y = RieszElement::from_ints(&s, &[5, 5, 5, 7]).unwrap();
        assert_eq!(generated_partition(&g, &[&y]).unwrap(), part(&s, &[&[1, 2], &[3], &[4]]));
    }

    #[test]
    fn enumeration_examples() {
        let s = space4();
        let g = part(&s, &[&[1, 2], &[3, 4]]);
        let ps = g.enumerate_band_projections(DEFAULT_BLOCK_CAP).unwrap();
        let supports: Vec<Vec<usize>> = ps.iter().map(|p| p.support_indices()).collect();
        assert_eq!(supports, vec![vec![], vec![0, 1], vec![2, 3], vec![0, 1, 2, 3]]);
        assert_eq!(Partition::trivial(&s).enumerate_band_projections(16).unwrap().len(), 2);
        let d3 = Partition::discrete(&SampleSpace::uniform(3));
        assert_eq!(d3.enumerate_band_projections(16).unwrap().len(), 8);
        let err = Partition::discrete(&s).enumerate_band_projections(3).unwrap_err();
        assert!(err.is_resource());
        assert!(err.to_string().contains('3'));
    }

    #[test]
    fn measurability() {
        let s = space4();
        let g = part(&s, &[&[1, 2], &[3, 4]]);
        assert!(g.is_measurable(&RieszElement::from_ints(&s, &[2, 2, 5, 5]).unwrap()).unwrap());
        assert!(!g.is_measurable(&RieszElement::from_ints(&s, &[2, 1, 5, 5]).unwrap()).unwrap());
    }
}
