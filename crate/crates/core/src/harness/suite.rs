//! Runs the checks of a scenario and assembles a [`SuiteReport`].

use std::time::Instant;

use rayon::prelude::*;

use crate::condexp::{radon_nikodym_solution, verify_axioms, ConditionalExpectation};
use crate::error::{Result, RieszError};
use crate::harness::oracle::{oracle_classical_independence, oracle_projection_condexp};
use crate::harness::report::{CheckRecord, Side, Status, SuiteReport, Timing, WitnessRecord};
use crate::harness::scenario::{Check, Scenario};
use crate::independence::{
    family_independent, independent_on_spanning_sets, independent_via_condexp, independent_wrt_s,
    independent_wrt_s_bands, self_independent_projections, subspaces_independent, IndependenceVerdict,
    IndependenceWitness,
};
use crate::limits::Limits;
use crate::markov::{
    chapman_kolmogorov_all, future_products, is_markov, markov_battery, past_future_all, MarkovReport,
    MarkovWitness, Process,
};
use crate::matrix::Solution;
use crate::partition::Partition;
use crate::processes::{
    bounded_sum_check, brownian_is_markov, is_martingale, natural_filtration, verify_brownian, BrownianProcess,
};
use crate::riesz::{sup_formula, RieszElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    pub limits: Limits,
    pub timings: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            limits: Limits::default(),
            timings: true,
        }
    }
}

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
    witnesses: Vec<WitnessRecord>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Outcome {
            pass,
            summary: summary.into(),
            details: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.details.push(d.into());
        self
    }

    fn witness(mut self, w: Option<WitnessRecord>) -> Self {
        self.witnesses.extend(w);
        self
    }
}

fn side(expr: &str, value: impl ToString) -> Side {
    Side {
        expr: expr.to_string(),
        value: value.to_string(),
    }
}

pub fn independence_record(w: &IndependenceWitness) -> WitnessRecord {
    match w {
        IndependenceWitness::Bands { p, q, w, tptq, tpq, tqtp } => WitnessRecord {
            identity: "TPTQw = TPQw = TQTPw".into(),
            context: vec![
                format!("P = {}", p.describe()),
                format!("Q = {}", q.describe()),
                format!("w = {w}"),
            ],
            sides: vec![side("TPTQw", tptq), side("TPQw", tpq), side("TQTPw", tqtp)],
        },
        IndependenceWitness::Operator { identity, lhs, rhs } => WitnessRecord {
            identity: identity.clone(),
            context: vec![],
            sides: vec![side("lhs", lhs), side("rhs", rhs)],
        },
        IndependenceWitness::Element { identity, f, lhs, rhs } => WitnessRecord {
            identity: identity.clone(),
            context: vec![format!("f = {f}")],
            sides: vec![side("lhs", lhs), side("rhs", rhs)],
        },
    }
}

pub fn markov_record(w: &MarkovWitness) -> WitnessRecord {
    let mut context = Vec::new();
    if !w.history.is_empty() {
        context.push(format!("history = {:?}", w.history));
    }
    context.push(format!("time = {}", w.time));
    if !w.future.is_empty() {
        context.push(format!("future = {:?}", w.future));
    }
    for (i, p) in w.projections.iter().enumerate() {
        context.push(format!("projection {} = {}", i + 1, p.describe()));
    }
    if let Some(f) = &w.element {
        context.push(format!("f = {f}"));
    }
    WitnessRecord {
        identity: w.formula(),
        context,
        sides: vec![side("lhs", &w.lhs), side("rhs", &w.rhs)],
    }
}

fn verdict_word(holds: bool) -> &'static str {
    if holds {
        "holds"
    } else {
        "fails"
    }
}

fn independence_outcome(what: &str, v: &IndependenceVerdict) -> Outcome {
    Outcome::new(v.holds, format!("{what} {}", verdict_word(v.holds)))
        .witness(v.witness.as_ref().map(independence_record))
}

fn markov_outcome(what: &str, r: &MarkovReport) -> Outcome {
    Outcome::new(r.verdict, format!("{what} {}", verdict_word(r.verdict)))
        .witness(r.counterexample.as_ref().map(markov_record))
}

fn lookup<'a, T>(what: &str, map: &'a std::collections::BTreeMap<String, T>, name: &str) -> Result<&'a T> {
    map.get(name)
        .ok_or_else(|| RieszError::Domain(format!("unknown {what} {name:?}")))
}

fn increments(proc: &Process) -> Result<Vec<RieszElement>> {
    let xs = proc.elements();
    let mut out = Vec::with_capacity(xs.len());
    let mut prev = RieszElement::zero(proc.space());
    for x in xs {
        out.push(x.sub(&prev)?);
        prev = x.clone();
    }
    Ok(out)
}

fn run_check(s: &Scenario, check: &Check, limits: &Limits) -> Result<Outcome> {
    let t = &s.base;
    let e = &s.unit;
    let part = |n: &str| lookup("partition", &s.partitions, n);
    let proc = |n: &str| lookup("process", &s.processes, n);
    let elem = |n: &str| lookup("element", &s.elements, n);
    Ok(match check {
        Check::Independent { e1, e2 } => {
            let v = subspaces_independent(t, part(e1)?, part(e2)?, e, limits)?;
            independence_outcome("independence", &v)
        }
        Check::IndependenceAgreement { e1, e2, units } => {
            let (p1, p2) = (part(e1)?, part(e2)?);
            let mut routes = vec![
                ("band projections", subspaces_independent(t, p1, p2, e, limits)?.holds),
                ("T1T2 = T = T2T1", independent_via_condexp(t, p1, p2)?.holds),
                ("Ti f = T f on spanning sets", independent_on_spanning_sets(t, p1, p2)?.holds),
                (
                    "classical factorization",
                    oracle_classical_independence(&s.space, p1, p2, t.partition())?,
                ),
            ];
            let mut labels: Vec<String> = routes.iter().map(|(l, _)| l.to_string()).collect();
            for u in units {
                let unit = elem(u)?;
                let held = subspaces_independent(t, p1, p2, unit, limits)?.holds;
                routes.push(("", held));
                labels.push(format!("band projections with unit {u}"));
            }
            let first = routes[0].1;
            let agree = routes.iter().all(|(_, h)| *h == first);
            let mut out = Outcome::new(
                agree,
                if agree {
                    format!("{} routes agree: independence {}", routes.len(), verdict_word(first))
                } else {
                    "independence routes disagree".to_string()
                },
            );
            for (label, (_, held)) in labels.iter().zip(&routes) {
                out = out.detail(format!("{label}: {}", verdict_word(*held)));
            }
            out
        }
        Check::IndependentGiven { e1, e2, given } => {
            let (p1, p2) = (part(e1)?, part(e2)?);
            let sg = ConditionalExpectation::new(part(given)?.clone());
            let ops = independent_wrt_s(t, &sg, p1, p2)?;
            let bands = independent_wrt_s_bands(t, &sg, p1, p2, e, limits)?;
            let pass = ops.holds && bands.holds;
            Outcome::new(pass, format!("independence given {given} {}", verdict_word(pass)))
                .detail(format!("operator form: {}", verdict_word(ops.holds)))
                .detail(format!("band projections: {}", verdict_word(bands.holds)))
                .witness(ops.witness.as_ref().map(independence_record))
                .witness(bands.witness.as_ref().map(independence_record))
        }
        Check::FamilyIndependent { members, max_pair_size } => {
            let parts = members.iter().map(|m| part(m).cloned()).collect::<Result<Vec<Partition>>>()?;
            let size = max_pair_size.unwrap_or(limits.max_pair_size);
            let v = family_independent(t, &parts, e, size, limits)?;
            independence_outcome("family independence", &v)
        }
        Check::SelfIndependence => {
            let found = self_independent_projections(t, e, limits)?;
            let expected = t.partition().enumerate_band_projections(limits.max_blocks)?;
            let mut a: Vec<Vec<usize>> = found.iter().map(|p| p.support_indices()).collect();
            let mut b: Vec<Vec<usize>> = expected.iter().map(|p| p.support_indices()).collect();
            a.sort();
            b.sort();
            let pass = a == b;
            Outcome::new(
                pass,
                format!(
                    "{} self-independent projections, {} unions of base blocks",
                    found.len(),
                    expected.len()
                ),
            )
        }
        Check::Markov { process } => markov_outcome("Markov property", &is_markov(proc(process)?, limits)?),
        Check::MarkovAgreement { process } => {
            let p = proc(process)?;
            let battery = markov_battery(p, limits)?;
            let mut rechecked = true;
            for w in battery.witnesses() {
                rechecked &= w.recheck(p)?;
            }
            let agree = battery.products_agree();
            let pass = agree && rechecked;
            let mut out = Outcome::new(
                pass,
                if agree {
                    format!("all characterizations agree: Markov property {}", verdict_word(battery.definition.verdict))
                } else {
                    "characterizations disagree".to_string()
                },
            );
            for (name, v) in battery.verdicts() {
                out = out.detail(format!("{name}: {}", verdict_word(v)));
            }
            if !rechecked {
                out = out.detail("a witness did not re-evaluate to an inequality");
            }
            out.witness(battery.definition.counterexample.as_ref().map(markov_record))
        }
        Check::FutureProducts { process } => {
            markov_outcome("future products", &future_products(proc(process)?, limits)?)
        }
        Check::ChapmanKolmogorov { process } => {
            markov_outcome("Chapman-Kolmogorov", &chapman_kolmogorov_all(proc(process)?)?)
        }
        Check::PastFuture { process } => {
            let r = past_future_all(proc(process)?)?;
            let pass = r.past_first.verdict && r.future_first.verdict;
            Outcome::new(pass, format!("past/future products {}", verdict_word(pass)))
                .detail(format!("past then future: {}", verdict_word(r.past_first.verdict)))
                .detail(format!("future then past: {}", verdict_word(r.future_first.verdict)))
                .witness(r.past_first.counterexample.as_ref().map(markov_record))
                .witness(r.future_first.counterexample.as_ref().map(markov_record))
        }
        Check::Martingale { process } => {
            let p = proc(process)?;
            let r = is_martingale(p, &natural_filtration(p)?)?;
            Outcome::new(r.holds, format!("martingale property {}", verdict_word(r.holds))).witness(r.witness.map(|w| {
                WitnessRecord {
                    identity: format!("TT_{i} X_{j} = X_{i}", i = w.i + 1, j = w.j + 1),
                    context: vec![],
                    sides: vec![side("lhs", &w.lhs), side("rhs", &w.rhs)],
                }
            }))
        }
        Check::Brownian { process } => {
            let p = proc(process)?;
            let bp = BrownianProcess::from_increments(t, e, increments(p)?)?;
            let report = verify_brownian(&bp)?;
            let markov = brownian_is_markov(&bp, limits)?;
            let pass = report.holds() && markov;
            let mut out = Outcome::new(
                pass,
                format!(
                    "axioms {}, Markov property {}",
                    verdict_word(report.holds()),
                    verdict_word(markov)
                ),
            )
            .detail(format!("{} quadratic pairs compared", report.pairs_checked));
            for f in report.failures() {
                out = out.detail(f);
            }
            out.witness(report.independence.witness.as_ref().map(independence_record))
        }
        Check::BoundedSums { process, bound, horizon } => {
            let fs = increments(proc(process)?)?;
            let h = horizon.unwrap_or(fs.len());
            let r = bounded_sum_check(&fs, t, elem(bound)?, h)?;
            let mut out = Outcome::new(
                r.bound_holds,
                format!("T|S_n| <= {bound} {} for n <= {h}", verdict_word(r.bound_holds)),
            );
            if let Some(i) = r.first_nonzero_mean {
                out = out.detail(format!("hypothesis Tf_i = 0 violated at i = {i}"));
            }
            for (n, v) in r.running.iter().enumerate() {
                out = out.detail(format!("T|S_{}| = {v}", n + 1));
            }
            if let Some(n) = r.first_violation {
                out.witnesses.push(WitnessRecord {
                    identity: format!("T|S_{n}| <= {bound}"),
                    context: vec![],
                    sides: vec![side("lhs", &r.running[n - 1]), side("rhs", elem(bound)?)],
                });
            }
            out
        }
        Check::CondexpOracle { partition } => {
            let f = part(partition)?;
            let blocks = ConditionalExpectation::new(f.clone());
            let oracle = oracle_projection_condexp(&s.space, f);
            let pass = *blocks.matrix() == oracle;
            let mut out = Outcome::new(pass, format!("block averages {} the normal-equation projection", if pass { "equal" } else { "differ from" }));
            if !pass {
                out.witnesses.push(WitnessRecord {
                    identity: "block average = normal-equation projection".into(),
                    context: vec![],
                    sides: vec![side("block average", blocks.matrix()), side("projection", &oracle)],
                });
            }
            out
        }
        Check::RadonNikodym { partition } => {
            let f = part(partition)?;
            let tf = ConditionalExpectation::new(f.clone());
            let solution = radon_nikodym_solution(t, f, limits.max_blocks)?;
            let (pass, summary) = match &solution {
                Solution::Unique(x) if x == tf.matrix() => (true, "unique solution equals the block average".to_string()),
                Solution::Unique(_) => (false, "unique solution differs from the block average".to_string()),
                Solution::Underdetermined { rank } => (false, format!("system is underdetermined (rank {rank})")),
                Solution::Inconsistent => (false, "system is inconsistent".to_string()),
            };
            let mut out = Outcome::new(pass, summary);
            if let Solution::Unique(x) = &solution {
                if !pass {
                    out.witnesses.push(WitnessRecord {
                        identity: "solution = T_F".into(),
                        context: vec![],
                        sides: vec![side("solution", x), side("T_F", tf.matrix())],
                    });
                }
            }
            out
        }
        Check::CondexpAxioms { partition } => {
            let m = ConditionalExpectation::new(part(partition)?.clone());
            let r = verify_axioms(m.matrix(), &s.space);
            let mut out = Outcome::new(r.holds(), format!("conditional expectation axioms {}", verdict_word(r.holds())));
            for f in &r.failures {
                out = out.detail(f.clone());
            }
            out
        }
        Check::WeakOrderUnit { element } => {
            let x = elem(element)?;
            let pass = x.is_positive() && x.is_weak_order_unit()?;
            Outcome::new(pass, format!("{element} {} a weak order unit", if pass { "is" } else { "is not" }))
        }
        Check::BandSupFormula { f, g } => {
            let trace = sup_formula(elem(f)?, elem(g)?, None)?;
            Outcome::new(
                trace.matches_indicator,
                format!(
                    "sup formula {} the band projection",
                    if trace.matches_indicator { "reproduces" } else { "misses" }
                ),
            )
            .detail(format!("bound {}, stabilized at {}", trace.bound, trace.stabilized_at))
            .detail(format!("result {}", trace.result))
        }
    })
}

/// Runs every check of `scenario` concurrently; records keep the order of the checks.
pub fn run_suite(scenario: &Scenario, options: &SuiteOptions) -> SuiteReport {
    let results: Vec<(CheckRecord, u64)> = scenario
        .doc
        .checks
        .par_iter()
        .enumerate()
        .map(|(index, check)| {
            let start = Instant::now();
            let outcome = run_check(scenario, check, &options.limits);
            let micros = start.elapsed().as_micros() as u64;
            let record = match outcome {
                Ok(o) => CheckRecord {
                    index,
                    label: check.label(),
                    kind: check.kind().to_string(),
                    status: if o.pass { Status::Pass } else { Status::Fail },
                    summary: o.summary,
                    details: o.details,
                    witnesses: o.witnesses,
                },
                Err(err) => CheckRecord {
                    index,
                    label: check.label(),
                    kind: check.kind().to_string(),
                    status: if err.is_resource() {
                        Status::ResourceError
                    } else {
                        Status::InputError
                    },
                    summary: err.to_string(),
                    details: vec![],
                    witnesses: vec![],
                },
            };
            (record, micros)
        })
        .collect();
    let timings = options.timings.then(|| {
        results
            .iter()
            .map(|(r, micros)| Timing {
                index: r.index,
                micros: *micros,
            })
            .collect()
    });
    SuiteReport::new(
        scenario.name().to_string(),
        scenario.space.len(),
        scenario.doc.seed,
        results.into_iter().map(|(r, _)| r).collect(),
        timings,
    )
}
