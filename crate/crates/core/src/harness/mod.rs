//! Scenario files, brute-force oracles, the suite runner and report rendering.

pub mod oracle;
pub mod random;
pub mod report;
pub mod scenario;
pub mod suite;

use std::collections::BTreeMap;

use crate::error::Result;
use crate::processes::{rademacher_walk, BrownianProcess};
use crate::rational::int;
use scenario::{literals, Check, ProcessDoc, ScenarioDoc, SpaceDoc, FORMAT_VERSION};

pub const TWO_COIN_SCENARIO: &str = include_str!("../../scenarios/two_coin.scenario");
pub const NON_MARKOV_SCENARIO: &str = include_str!("../../scenarios/non_markov.scenario");

/// Scenario for the `steps`-step Rademacher walk with the Markov, martingale and Brownian checks.
pub fn random_walk_scenario(steps: usize) -> Result<ScenarioDoc> {
    let walk: BrownianProcess = rademacher_walk(steps)?;
    let proc = walk.process();
    let space = proc.space();
    let mut elements = BTreeMap::new();
    let mut names = Vec::new();
    for (i, x) in proc.elements().iter().enumerate() {
        let name = format!("s{}", i + 1);
        elements.insert(name.clone(), literals(x.values()));
        names.push(name);
    }
    elements.insert(
        "bound".to_string(),
        literals(proc.unit().scale(&int(steps as i64)).values()),
    );
    let mut processes = BTreeMap::new();
    processes.insert(
        "walk".to_string(),
        ProcessDoc {
            times: proc.times().to_vec(),
            elements: names,
        },
    );
    let p = || "walk".to_string();
    Ok(ScenarioDoc {
        format_version: FORMAT_VERSION,
        name: Some(format!("random_walk_{steps}")),
        seed: None,
        space: SpaceDoc {
            atoms: space.atoms().to_vec(),
            weights: literals(space.weights()),
        },
        base: None,
        elements,
        partitions: BTreeMap::new(),
        processes,
        checks: vec![
            Check::Markov { process: p() },
            Check::MarkovAgreement { process: p() },
            Check::FutureProducts { process: p() },
            Check::ChapmanKolmogorov { process: p() },
            Check::PastFuture { process: p() },
            Check::Martingale { process: p() },
            Check::Brownian { process: p() },
            Check::BoundedSums {
                process: p(),
                bound: "bound".into(),
                horizon: None,
            },
        ],
    })
}
