//! Brute-force references computed from the measure alone, without the operator kernel.

use crate::error::{Result, RieszError};
use crate::matrix::{Matrix, Solution};
use crate::partition::Partition;
use crate::rational::Rational;
use crate::riesz::SampleSpace;

/// Blocks per partition the classical oracle will enumerate unions of.
pub const ORACLE_BLOCK_CAP: usize = 16;

fn block_masses(space: &SampleSpace, p: &Partition) -> Vec<Vec<bool>> {
    p.blocks()
        .iter()
        .map(|b| {
            let mut m = vec![false; space.len()];
            for &a in b {
                m[a] = true;
            }
            m
        })
        .collect()
}

fn unions(blocks: &[Vec<bool>], n: usize) -> Vec<Vec<bool>> {
    (0u64..1 << blocks.len())
        .map(|mask| {
            (0..n)
                .map(|a| blocks.iter().enumerate().any(|(i, b)| mask >> i & 1 == 1 && b[a]))
                .collect()
        })
        .collect()
}

/// `μ(A₁∩A₂∩B)·μ(B) = μ(A₁∩B)·μ(A₂∩B)` for every block `B` of `g` and all unions `A₁`, `A₂` of
/// blocks of `e1` and `e2`.
pub fn oracle_classical_independence(space: &SampleSpace, e1: &Partition, e2: &Partition, g: &Partition) -> Result<bool> {
    for p in [e1, e2] {
        if p.num_blocks() > ORACLE_BLOCK_CAP {
            return Err(RieszError::CapExceeded {
                what: "blocks for the classical oracle",
                cap: ORACLE_BLOCK_CAP,
                actual: p.num_blocks(),
            });
        }
        if p.space().len() != space.len() {
            return Err(RieszError::SpaceMismatch);
        }
    }
    let n = space.len();
    let mu = |set: &dyn Fn(usize) -> bool| -> Rational {
        (0..n).filter(|&a| set(a)).map(|a| space.weight(a).clone()).sum()
    };
    let a1s = unions(&block_masses(space, e1), n);
    let a2s = unions(&block_masses(space, e2), n);
    for b in block_masses(space, g) {
        let mb = mu(&|a| b[a]);
        let m1: Vec<Rational> = a1s.iter().map(|a1| mu(&|a| a1[a] && b[a])).collect();
        let m2: Vec<Rational> = a2s.iter().map(|a2| mu(&|a| a2[a] && b[a])).collect();
        for (a1, x1) in a1s.iter().zip(&m1) {
            for (a2, x2) in a2s.iter().zip(&m2) {
                let joint = mu(&|a| a1[a] && a2[a] && b[a]);
                if joint * &mb != x1 * x2 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The μ-orthogonal projection onto `f`-measurable vectors, `A (AᵀWA)⁻¹ AᵀW`, with `A` the block
/// incidence matrix and `W` the diagonal of weights.
pub fn oracle_projection_condexp(space: &SampleSpace, f: &Partition) -> Matrix {
    let n = space.len();
    let k = f.num_blocks();
    let mut a = Matrix::zeros(n, k);
    for (b, block) in f.blocks().iter().enumerate() {
        for &i in block {
            a.set(i, b, Rational::from_integer(1.into()));
        }
    }
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        w.set(i, i, space.weight(i).clone());
    }
    let at_w = a.transpose().mul(&w);
    let gram = at_w.mul(&a);
    match gram.solve(&at_w) {
        Solution::Unique(x) => a.mul(&x),
        other => unreachable!("block incidence Gram matrix is diagonal with positive entries: {other:?}"),
    }
}
