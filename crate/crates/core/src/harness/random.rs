//! Seeded random spaces, partitions, units, processes and whole scenarios.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::condexp::ConditionalExpectation;
use crate::harness::scenario::{literals, BaseDoc, Check, PartitionDoc, ProcessDoc, ScenarioDoc, SpaceDoc, FORMAT_VERSION};
use crate::markov::Process;
use crate::partition::Partition;
use crate::rational::{int, rat, Rational};
use crate::riesz::{RieszElement, SampleSpace, Space};

pub type ScenarioRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> ScenarioRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn atom_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("w{i}")).collect()
}

/// Integer weights in `1..=max` normalized to sum to one.
pub fn random_weights(rng: &mut ScenarioRng, n: usize, max: i64) -> Vec<Rational> {
    let raw: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(1..=max))).collect();
    let total: Rational = raw.iter().sum();
    raw.into_iter().map(|w| w / &total).collect()
}

pub fn random_space(rng: &mut ScenarioRng, n: usize) -> Space {
    let weights = random_weights(rng, n, 4);
    SampleSpace::new(atom_names(n), weights).expect("weights are positive and normalized")
}

/// A random partition with at most `max_blocks` blocks.
pub fn random_partition(rng: &mut ScenarioRng, space: &Space, max_blocks: usize) -> Partition {
    let k = rng.gen_range(1..=max_blocks.min(space.len()).max(1));
    let labels: Vec<usize> = (0..space.len()).map(|_| rng.gen_range(0..k)).collect();
    Partition::from_labels(space, &labels)
}

/// A random refinement of `base` with at most `max_blocks` blocks (at least those of `base`).
pub fn random_refinement(rng: &mut ScenarioRng, base: &Partition, max_blocks: usize) -> Partition {
    for split in (1..=3usize).rev() {
        for _ in 0..4 {
            let keys: Vec<(usize, usize)> = (0..base.space().len())
                .map(|a| (base.block_of(a), rng.gen_range(0..split)))
                .collect();
            let p = Partition::from_labels(base.space(), &keys);
            if p.num_blocks() <= max_blocks {
                return p;
            }
        }
    }
    base.clone()
}

/// A strictly positive unit constant on the blocks of `base`, hence invariant under it.
pub fn random_invariant_unit(rng: &mut ScenarioRng, base: &Partition) -> RieszElement {
    let levels: Vec<Rational> = (0..base.num_blocks())
        .map(|_| rat(rng.gen_range(1..=5), rng.gen_range(1..=3)))
        .collect();
    let values = (0..base.space().len()).map(|a| levels[base.block_of(a)].clone()).collect();
    RieszElement::new(base.space(), values).expect("one value per atom")
}

/// Two subspaces over a base partition, each refining it.
#[derive(Debug, Clone)]
pub struct IndependenceCase {
    pub space: Space,
    pub base: Partition,
    pub e1: Partition,
    pub e2: Partition,
    /// Built as a conditional product, so independent by construction.
    pub by_construction: bool,
}

/// Conditional product: within each base block, atoms are pairs `(i, j)` weighted `q(i)·r(j)`;
/// `e1` groups values of `i`, `e2` values of `j`. With `perturb` one atom's weight is doubled,
/// which usually destroys independence. Atom order is shuffled.
pub fn conditional_product(rng: &mut ScenarioRng, max_atoms: usize, max_blocks: usize, perturb: bool) -> IndependenceCase {
    loop {
        let nb = rng.gen_range(1..=3usize);
        let dims: Vec<(usize, usize)> = (0..nb).map(|_| (rng.gen_range(1..=3), rng.gen_range(1..=3))).collect();
        let n: usize = dims.iter().map(|(a, b)| a * b).sum();
        let rows: usize = dims.iter().map(|d| d.0).sum();
        let cols: usize = dims.iter().map(|d| d.1).sum();
        if n > max_atoms || rows > max_blocks || cols > max_blocks {
            continue;
        }
        let mut atoms: Vec<(usize, usize, usize, Rational)> = Vec::with_capacity(n);
        for (b, &(da, db)) in dims.iter().enumerate() {
            let p = int(rng.gen_range(1..=3));
            let q: Vec<Rational> = (0..da).map(|_| int(rng.gen_range(1..=3))).collect();
            let r: Vec<Rational> = (0..db).map(|_| int(rng.gen_range(1..=3))).collect();
            for (i, qi) in q.iter().enumerate() {
                for (j, rj) in r.iter().enumerate() {
                    atoms.push((b, i, j, &p * qi * rj));
                }
            }
        }
        if perturb {
            let k = rng.gen_range(0..atoms.len());
            atoms[k].3 *= int(2);
        }
        atoms.shuffle(rng);
        let total: Rational = atoms.iter().map(|a| &a.3).sum();
        let weights = atoms.iter().map(|a| &a.3 / &total).collect();
        let space = SampleSpace::new(atom_names(n), weights).expect("positive normalized weights");
        // merge some values of i (resp. j) within a block; merging keeps independence
        let merge_i: Vec<Vec<usize>> = dims.iter().map(|&(da, _)| (0..da).map(|_| rng.gen_range(0..da)).collect()).collect();
        let merge_j: Vec<Vec<usize>> = dims.iter().map(|&(_, db)| (0..db).map(|_| rng.gen_range(0..db)).collect()).collect();
        let base = Partition::from_labels(&space, &atoms.iter().map(|a| a.0).collect::<Vec<_>>());
        let e1 = Partition::from_labels(&space, &atoms.iter().map(|a| (a.0, merge_i[a.0][a.1])).collect::<Vec<_>>());
        let e2 = Partition::from_labels(&space, &atoms.iter().map(|a| (a.0, merge_j[a.0][a.2])).collect::<Vec<_>>());
        return IndependenceCase {
            space,
            base,
            e1,
            e2,
            by_construction: !perturb,
        };
    }
}

/// A mix of conditional products, perturbed products and unrelated random refinements.
pub fn random_independence_case(rng: &mut ScenarioRng, max_atoms: usize, max_blocks: usize) -> IndependenceCase {
    match rng.gen_range(0..3) {
        0 => conditional_product(rng, max_atoms, max_blocks, false),
        1 => conditional_product(rng, max_atoms, max_blocks, true),
        _ => {
            let n = rng.gen_range(2..=max_atoms);
            let space = random_space(rng, n);
            let base = random_partition(rng, &space, 3.min(max_blocks));
            let e1 = random_refinement(rng, &base, max_blocks);
            let e2 = random_refinement(rng, &base, max_blocks);
            IndependenceCase {
                space,
                base,
                e1,
                e2,
                by_construction: false,
            }
        }
    }
}

/// A process with values drawn from `-range..=range` at times `1..=len`.
pub fn random_process(rng: &mut ScenarioRng, t: &ConditionalExpectation, e: &RieszElement, len: usize, range: i64) -> Process {
    let n = t.space().len();
    let xs = (0..len)
        .map(|_| {
            let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-range..=range)).collect();
            RieszElement::from_ints(t.space(), &v).expect("one value per atom")
        })
        .collect();
    Process::new(t.clone(), e.clone(), (1..=len as i64).collect(), xs).expect("valid random process")
}

fn blocks_doc(p: &Partition) -> Vec<Vec<String>> {
    let atoms = p.space().atoms();
    p.blocks()
        .iter()
        .map(|b| b.iter().map(|&a| atoms[a].clone()).collect())
        .collect()
}

/// A scenario document built from an independence case, two extra units and a random process,
/// with the agreement checks requested. The seed is recorded in the document.
pub fn random_scenario(seed: u64) -> ScenarioDoc {
    let mut rng = seeded(seed);
    let case = random_independence_case(&mut rng, 12, 6);
    let t = ConditionalExpectation::new(case.base.clone());
    let e = RieszElement::one(&case.space);
    let len = rng.gen_range(2..=3);
    let proc = random_process(&mut rng, &t, &e, len, 1);
    let mut elements = BTreeMap::new();
    for name in ["u1", "u2"] {
        elements.insert(name.to_string(), literals(random_invariant_unit(&mut rng, &case.base).values()));
    }
    let mut names = Vec::new();
    for (i, x) in proc.elements().iter().enumerate() {
        let name = format!("x{}", i + 1);
        elements.insert(name.clone(), literals(x.values()));
        names.push(name);
    }
    let mut partitions = BTreeMap::new();
    partitions.insert("e1".to_string(), PartitionDoc::Blocks(blocks_doc(&case.e1)));
    partitions.insert("e2".to_string(), PartitionDoc::Blocks(blocks_doc(&case.e2)));
    let mut processes = BTreeMap::new();
    processes.insert(
        "proc".to_string(),
        ProcessDoc {
            times: proc.times().to_vec(),
            elements: names,
        },
    );
    let mut checks = vec![
        Check::IndependenceAgreement {
            e1: "e1".into(),
            e2: "e2".into(),
            units: vec!["u1".into(), "u2".into()],
        },
        Check::CondexpOracle { partition: "e1".into() },
        Check::RadonNikodym { partition: "e1".into() },
        Check::CondexpAxioms { partition: "e2".into() },
        Check::MarkovAgreement { process: "proc".into() },
    ];
    if case.space.len() <= 10 {
        checks.push(Check::SelfIndependence);
    }
    ScenarioDoc {
        format_version: FORMAT_VERSION,
        name: Some(format!("random-{seed}")),
        seed: Some(seed),
        space: SpaceDoc {
            atoms: case.space.atoms().to_vec(),
            weights: literals(case.space.weights()),
        },
        base: Some(BaseDoc {
            blocks: Some(blocks_doc(&case.base)),
            unit: None,
        }),
        elements,
        partitions,
        processes,
        checks,
    }
}
