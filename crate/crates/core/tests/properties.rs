use proptest::prelude::*;

use riesz_prob::condexp::{commutes, commutes_by_support, verify_axioms};
use riesz_prob::harness::oracle::{oracle_classical_independence, oracle_projection_condexp};
use riesz_prob::harness::random::{
    random_independence_case, random_invariant_unit, random_partition, random_process, random_refinement, random_scenario,
    random_space, seeded,
};
use riesz_prob::harness::report::render_structured;
use riesz_prob::harness::scenario::{canonical_doc, load_scenario, resolve};
use riesz_prob::harness::suite::{run_suite, SuiteOptions};
use riesz_prob::independence::{subspaces_independent, subspaces_independent_on_blocks};
use riesz_prob::markov::markov_battery;
use riesz_prob::rational::rat;
use riesz_prob::{condexp_onto, BandProjection, ConditionalExpectation, Limits, RieszElement, SampleSpace};

fn element(values: &[(i64, i64)]) -> RieszElement {
    let s = SampleSpace::uniform(values.len());
    RieszElement::new(&s, values.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
}

fn rational_pairs(n: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-20i64..=20, 1i64..=6), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_averages_satisfy_the_axioms(seed in any::<u64>(), n in 1usize..=9) {
        let mut rng = seeded(seed);
        let space = random_space(&mut rng, n);
        let p = random_partition(&mut rng, &space, 5);
        let t = ConditionalExpectation::new(p.clone());
        let report = verify_axioms(t.matrix(), &space);
        prop_assert!(report.holds(), "{:?}", report.failures);
        prop_assert!(report.strictly_positive);
        let e = random_invariant_unit(&mut rng, &p);
        prop_assert_eq!(t.apply(&e).unwrap(), e);
    }

    #[test]
    fn condexp_onto_matches_normal_equations(seed in any::<u64>(), n in 1usize..=9) {
        let mut rng = seeded(seed);
        let space = random_space(&mut rng, n);
        let g = random_partition(&mut rng, &space, 3);
        let f = random_refinement(&mut rng, &g, 6);
        let t = ConditionalExpectation::new(g);
        let t_f = condexp_onto(&t, &f).unwrap();
        prop_assert_eq!(t_f.matrix(), &oracle_projection_condexp(&space, &f));
        // T_F commutes with T and T T_F = T
        prop_assert_eq!(t.then_after(&t_f), t.matrix().clone());
        prop_assert_eq!(t_f.then_after(&t), t.matrix().clone());
    }

    #[test]
    fn independence_routes_agree_with_the_oracle(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let c = random_independence_case(&mut rng, 10, 5);
        let t = ConditionalExpectation::new(c.base.clone());
        let e = random_invariant_unit(&mut rng, &c.base);
        let exhaustive = subspaces_independent(&t, &c.e1, &c.e2, &e, &Limits::default()).unwrap();
        let blocks = subspaces_independent_on_blocks(&t, &c.e1, &c.e2, &e).unwrap();
        let oracle = oracle_classical_independence(&c.space, &c.e1, &c.e2, &c.base).unwrap();
        prop_assert_eq!(exhaustive.holds, oracle);
        prop_assert_eq!(blocks.holds, oracle);
        if let Some(w) = exhaustive.witness {
            prop_assert!(w.reproduces(&t));
        }
    }

    #[test]
    fn projections_commute_exactly_when_unions_of_blocks(seed in any::<u64>(), n in 1usize..=8, mask in any::<u16>()) {
        let mut rng = seeded(seed);
        let space = random_space(&mut rng, n);
        let t = ConditionalExpectation::new(random_partition(&mut rng, &space, 4));
        let p = BandProjection::new(&space, (0..n).map(|a| mask >> a & 1 == 1).collect()).unwrap();
        prop_assert_eq!(commutes(&t, &p).unwrap(), commutes_by_support(&t, &p).unwrap());
    }

    #[test]
    fn lattice_identities(f in rational_pairs(5), g in rational_pairs(5)) {
        let (f, g) = (element(&f), element(&g));
        let space = f.space().clone();
        let g = RieszElement::new(&space, g.into_values()).unwrap();
        prop_assert_eq!(f.positive_part().sub(&f.negative_part()).unwrap(), f.clone());
        prop_assert_eq!(f.sup(&g).unwrap().add(&f.inf(&g).unwrap()).unwrap(), f.add(&g).unwrap());
        prop_assert_eq!(f.sup(&g).unwrap().neg(), f.neg().inf(&g.neg()).unwrap());
        prop_assert!(f.abs().sub(&g.abs()).unwrap().abs().le(&f.sub(&g).unwrap().abs()).unwrap());
    }

    #[test]
    fn markov_characterizations_agree(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let space = random_space(&mut rng, 2 + (seed % 5) as usize);
        let base = random_partition(&mut rng, &space, 2);
        let t = ConditionalExpectation::new(base.clone());
        let e = random_invariant_unit(&mut rng, &base);
        let proc = random_process(&mut rng, &t, &e, 3, 1);
        let battery = markov_battery(&proc, &Limits::default()).unwrap();
        prop_assert!(battery.products_agree(), "{:?}", battery.verdicts());
        for w in battery.witnesses() {
            prop_assert!(w.recheck(&proc).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn scenario_text_round_trips(seed in any::<u64>()) {
        let doc = random_scenario(seed);
        let s = resolve(doc.clone()).unwrap();
        let reloaded = load_scenario(&s.to_text()).unwrap();
        prop_assert_eq!(&reloaded.doc, &canonical_doc(&doc));
        prop_assert_eq!(reloaded.to_text(), s.to_text());
    }

    #[test]
    fn reports_are_deterministic(seed in 0u64..1000) {
        let s = resolve(random_scenario(seed)).unwrap();
        let options = SuiteOptions { timings: false, ..SuiteOptions::default() };
        let a = run_suite(&s, &options);
        let b = run_suite(&s, &options);
        prop_assert_eq!(render_structured(&a), render_structured(&b));
        prop_assert!(a.all_passed(), "{:?}", a);
    }
}
