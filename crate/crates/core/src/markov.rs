//! Markov processes over a conditional expectation and their equivalent characterizations.
//!
//! A process is a finite family `X_t` indexed by strictly increasing integer times. Every
//! checker returns a [`MarkovReport`]; a failing report carries a [`MarkovWitness`] that can
//! be re-evaluated against the process with [`MarkovWitness::recheck`].

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;

use crate::condexp::{condexp_onto, ConditionalExpectation};
use crate::error::{Result, RieszError};
use crate::limits::Limits;
use crate::matrix::Matrix;
use crate::partition::Partition;
use crate::riesz::{e_mul, ensure_same, BandProjection, RieszElement, Space};
use crate::witness::Evidence;

#[derive(Clone, Debug)]
pub struct Process {
    t: ConditionalExpectation,
    e: RieszElement,
    times: Vec<i64>,
    elements: Vec<RieszElement>,
}

impl Process {
    pub fn new(t: ConditionalExpectation, e: RieszElement, times: Vec<i64>, elements: Vec<RieszElement>) -> Result<Self> {
        if times.is_empty() {
            return Err(RieszError::domain("a process needs at least one time"));
        }
        if times.len() != elements.len() {
            return Err(RieszError::domain(format!(
                "{} times but {} elements",
                times.len(),
                elements.len()
            )));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RieszError::domain("times must be strictly increasing"));
        }
        for x in &elements {
            ensure_same(t.space(), x.space())?;
        }
        ensure_same(t.space(), e.space())?;
        t.ensure_invariant_unit(&e)?;
        Ok(Process { t, e, times, elements })
    }

    pub fn space(&self) -> &Space {
        self.t.space()
    }

    pub fn base(&self) -> &ConditionalExpectation {
        &self.t
    }

    pub fn unit(&self) -> &RieszElement {
        &self.e
    }

    pub fn times(&self) -> &[i64] {
        &self.times
    }

    pub fn elements(&self) -> &[RieszElement] {
        &self.elements
    }

    fn index_of(&self, time: i64) -> Result<usize> {
        self.times
            .binary_search(&time)
            .map_err(|_| RieszError::domain(format!("unknown time {time}")))
    }

    pub fn element_at(&self, time: i64) -> Result<&RieszElement> {
        Ok(&self.elements[self.index_of(time)?])
    }

    /// `⟨R(T), X_t : t ∈ ts⟩`.
    pub fn history_partition(&self, ts: &[i64]) -> Result<Partition> {
        let xs = ts
            .iter()
            .map(|&s| self.element_at(s))
            .collect::<Result<Vec<_>>>()?;
        self.t.partition().generated(&xs)
    }

    /// Conditional expectation onto `⟨R(T), X_t : t ∈ ts⟩`; `T` itself when `ts` is empty.
    pub fn history_condexp(&self, ts: &[i64]) -> Result<ConditionalExpectation> {
        condexp_onto(&self.t, &self.history_partition(ts)?)
    }

    fn single(&self, time: i64) -> Result<ConditionalExpectation> {
        self.history_condexp(&[time])
    }

    fn times_before(&self, time: i64) -> Vec<i64> {
        self.times.iter().copied().filter(|&s| s < time).collect()
    }

    fn times_after(&self, time: i64) -> Vec<i64> {
        self.times.iter().copied().filter(|&s| s > time).collect()
    }

    /// With a single time there is no history, so every Markov identity holds vacuously.
    fn single_time(&self) -> bool {
        self.times.len() < 2
    }
}

/// Nonempty subsets of `items` in increasing bitmask order, each kept sorted.
pub fn nonempty_subsets(items: &[i64], max_size: usize) -> Vec<Vec<i64>> {
    assert!(items.len() < 32, "too many times to enumerate subsets");
    (1u32..1 << items.len())
        .filter(|m| m.count_ones() as usize <= max_size)
        .map(|m| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, &t)| t)
                .collect()
        })
        .collect()
}

/// The identity a witness violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkovIdentity {
    /// `T_(t₁…t_n) P e = T_{t_n} P e`.
    History,
    /// `T_(t₁…t_n) T_t = T_{t_n} T_t`.
    OperatorForm,
    /// `T_(t₁…t_n,t) Q₁…Q_m e = T_t Q₁…Q_m e`.
    FutureProducts,
    /// `T_(t₁…t_n) f = T_{t_n} f` for `f` in the joint future subspace.
    FutureSubspace,
    /// `T_u X = T_u T_t X` for `X` in `R(T_n)`.
    ChapmanKolmogorov,
    /// `T_u T_n = T_u T_t T_n`.
    ChapmanKolmogorovOperator,
    /// `𝕋_u T_v = T_u T_v`.
    PastOperator,
    /// The chain `T_tQT_tPe = T_tQPe = T_tPQe = T_tPT_tQe`; `link` is the first broken link.
    Chain { link: usize },
    /// `𝕋_t 𝕊_t = T_t` (past first) or `𝕊_t 𝕋_t = T_t`.
    PastFuture { future_first: bool },
    /// `T_t(Qe ∘ T_tPe) = T_tPe ∘ T_tQe`.
    AveragingStep,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovWitness {
    pub identity: MarkovIdentity,
    pub history: Vec<i64>,
    pub time: i64,
    pub future: Vec<i64>,
    pub projections: Vec<BandProjection>,
    pub element: Option<RieszElement>,
    pub lhs: Evidence,
    pub rhs: Evidence,
}

fn fmt_times(ts: &[i64]) -> String {
    let parts: Vec<String> = ts.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

impl MarkovWitness {
    pub fn formula(&self) -> String {
        let h = fmt_times(&self.history);
        let t = self.time;
        let last = self.history.last().copied().unwrap_or(t);
        match self.identity {
            MarkovIdentity::History => format!("T_{h} P e = T_{last} P e"),
            MarkovIdentity::OperatorForm => format!("T_{h} T_{t} = T_{last} T_{t}"),
            MarkovIdentity::FutureProducts => {
                let mut all = self.history.clone();
                all.push(t);
                format!("T_{} Q1..Qm e = T_{t} Q1..Qm e, future {}", fmt_times(&all), fmt_times(&self.future))
            }
            MarkovIdentity::FutureSubspace => {
                format!("T_{h} f = T_{last} f, f in future {}", fmt_times(&self.future))
            }
            MarkovIdentity::ChapmanKolmogorov => format!("T_{last} X = T_{last} T_{t} X, X in R(T_{})", self.future[0]),
            MarkovIdentity::ChapmanKolmogorovOperator => {
                format!("T_{last} T_{n} = T_{last} T_{t} T_{n}", n = self.future[0])
            }
            MarkovIdentity::PastOperator => format!("TT_{last} T_{t} = T_{last} T_{t}"),
            MarkovIdentity::Chain { link } => {
                let terms = ["T_tQT_tPe", "T_tQPe", "T_tPQe", "T_tPT_tQe"];
                format!(
                    "{} = {} at t={t}, past {h}, future {}",
                    terms[link],
                    terms[link + 1],
                    fmt_times(&self.future)
                )
            }
            MarkovIdentity::PastFuture { future_first: false } => format!("TT_{t} SS_{t} = T_{t}"),
            MarkovIdentity::PastFuture { future_first: true } => format!("SS_{t} TT_{t} = T_{t}"),
            MarkovIdentity::AveragingStep => format!("T_t(Qe . T_tPe) = T_tPe . T_tQe at t={t}"),
        }
    }

    pub fn describe(&self) -> String {
        let mut out = self.formula();
        if !self.projections.is_empty() {
            let ps: Vec<String> = self.projections.iter().map(BandProjection::describe).collect();
            out.push_str(&format!(" with projections {}", ps.join(" ")));
        }
        if let Some(f) = &self.element {
            out.push_str(&format!(" with f={f}"));
        }
        out.push_str(&format!(": lhs={} rhs={}", self.lhs, self.rhs));
        out
    }

    /// Recomputes both sides from the process. True iff the stored sides are reproduced and
    /// still differ.
    pub fn recheck(&self, proc: &Process) -> Result<bool> {
        let (lhs, rhs) = evaluate(proc, self)?;
        Ok(lhs == self.lhs && rhs == self.rhs && lhs != rhs)
    }
}

fn product_of(space: &Space, qs: &[BandProjection]) -> Result<BandProjection> {
    qs.iter().try_fold(BandProjection::identity(space), |acc, q| acc.compose(q))
}

/// Independent recomputation of both sides of a witness.
fn evaluate(proc: &Process, w: &MarkovWitness) -> Result<(Evidence, Evidence)> {
    let e = proc.unit();
    let last = w.history.last().copied().unwrap_or(w.time);
    let el = |x: RieszElement| Evidence::Element(x);
    let op = |m: Matrix| Evidence::Operator(m);
    let proj = |i: usize| {
        w.projections
            .get(i)
            .ok_or_else(|| RieszError::domain("witness is missing a projection"))
    };
    let element = || {
        w.element
            .as_ref()
            .ok_or_else(|| RieszError::domain("witness is missing an element"))
    };
    Ok(match w.identity {
        MarkovIdentity::History => {
            let pe = proj(0)?.apply(e)?;
            (
                el(proc.history_condexp(&w.history)?.apply(&pe)?),
                el(proc.single(last)?.apply(&pe)?),
            )
        }
        MarkovIdentity::OperatorForm => {
            let tt = proc.single(w.time)?;
            (
                op(proc.history_condexp(&w.history)?.then_after(&tt)),
                op(proc.single(last)?.then_after(&tt)),
            )
        }
        MarkovIdentity::FutureProducts => {
            let mut all = w.history.clone();
            all.push(w.time);
            let qe = product_of(proc.space(), &w.projections)?.apply(e)?;
            (
                el(proc.history_condexp(&all)?.apply(&qe)?),
                el(proc.single(w.time)?.apply(&qe)?),
            )
        }
        MarkovIdentity::FutureSubspace => {
            let f = element()?;
            (
                el(proc.history_condexp(&w.history)?.apply(f)?),
                el(proc.single(last)?.apply(f)?),
            )
        }
        MarkovIdentity::ChapmanKolmogorov => {
            let f = element()?;
            let tu = proc.single(last)?;
            let inner = proc.single(w.time)?.apply(f)?;
            (el(tu.apply(f)?), el(tu.apply(&inner)?))
        }
        MarkovIdentity::ChapmanKolmogorovOperator => {
            let tu = proc.single(last)?;
            let tn = proc.single(w.future[0])?;
            let tt_tn = proc.single(w.time)?.then_after(&tn);
            (op(tu.then_after(&tn)), op(tu.compose_matrix(&tt_tn)))
        }
        MarkovIdentity::PastOperator => {
            let up_to: Vec<i64> = proc.times().iter().copied().filter(|&s| s <= last).collect();
            let tv = proc.single(w.time)?;
            (
                op(proc.history_condexp(&up_to)?.then_after(&tv)),
                op(proc.single(last)?.then_after(&tv)),
            )
        }
        MarkovIdentity::Chain { link } => {
            let tt = proc.single(w.time)?;
            let p = proj(0)?;
            let q = proj(1)?;
            let terms = [
                tt.apply(&q.apply(&tt.apply(&p.apply(e)?)?)?)?,
                tt.apply(&q.compose(p)?.apply(e)?)?,
                tt.apply(&p.compose(q)?.apply(e)?)?,
                tt.apply(&p.apply(&tt.apply(&q.apply(e)?)?)?)?,
            ];
            if link > 2 {
                return Err(RieszError::domain("chain link out of range"));
            }
            (el(terms[link].clone()), el(terms[link + 1].clone()))
        }
        MarkovIdentity::PastFuture { future_first } => {
            let past: Vec<i64> = proc.times().iter().copied().filter(|&s| s <= w.time).collect();
            let fut: Vec<i64> = proc.times().iter().copied().filter(|&s| s >= w.time).collect();
            let tp = proc.history_condexp(&past)?;
            let sf = proc.history_condexp(&fut)?;
            let lhs = if future_first { sf.then_after(&tp) } else { tp.then_after(&sf) };
            (op(lhs), op(proc.single(w.time)?.matrix().clone()))
        }
        MarkovIdentity::AveragingStep => {
            let tt = proc.single(w.time)?;
            let tpe = tt.apply(&proj(0)?.apply(e)?)?;
            let qe = proj(1)?.apply(e)?;
            let tqe = tt.apply(&qe)?;
            (el(tt.apply(&e_mul(&qe, &tpe, e)?)?), el(e_mul(&tpe, &tqe, e)?))
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovReport {
    pub verdict: bool,
    pub counterexample: Option<MarkovWitness>,
}

impl MarkovReport {
    pub fn pass() -> Self {
        MarkovReport {
            verdict: true,
            counterexample: None,
        }
    }

    pub fn fail(w: MarkovWitness) -> Self {
        MarkovReport {
            verdict: false,
            counterexample: Some(w),
        }
    }

    fn from_first(found: Option<MarkovWitness>) -> Self {
        found.map_or_else(Self::pass, Self::fail)
    }

    /// Conjunction keeping the first counterexample.
    pub fn and(self, other: MarkovReport) -> MarkovReport {
        if self.verdict {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for MarkovReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(f, "holds"),
            Some(w) => write!(f, "fails: {}", w.describe()),
        }
    }
}

struct WitnessParts {
    identity: MarkovIdentity,
    history: Vec<i64>,
    time: i64,
    future: Vec<i64>,
    projections: Vec<BandProjection>,
    element: Option<RieszElement>,
}

impl WitnessParts {
    fn new(identity: MarkovIdentity, history: &[i64], time: i64) -> Self {
        WitnessParts {
            identity,
            history: history.to_vec(),
            time,
            future: Vec::new(),
            projections: Vec::new(),
            element: None,
        }
    }

    fn future(mut self, future: &[i64]) -> Self {
        self.future = future.to_vec();
        self
    }

    fn projections(mut self, ps: Vec<BandProjection>) -> Self {
        self.projections = ps;
        self
    }

    fn element(mut self, f: RieszElement) -> Self {
        self.element = Some(f);
        self
    }

    fn sides(self, lhs: impl Into<Evidence>, rhs: impl Into<Evidence>) -> MarkovWitness {
        MarkovWitness {
            identity: self.identity,
            history: self.history,
            time: self.time,
            future: self.future,
            projections: self.projections,
            element: self.element,
            lhs: lhs.into(),
            rhs: rhs.into(),
        }
    }
}

/// First `Some` in index order, evaluated in parallel.
fn first_witness<T: Sync>(items: &[T], f: impl Fn(&T) -> Result<Option<MarkovWitness>> + Sync) -> Result<Option<MarkovWitness>> {
    let results: Vec<Result<Option<MarkovWitness>>> = items.par_iter().map(&f).collect();
    for r in results {
        if let Some(w) = r? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// `T_(t₁…t_n) P e = T_{t_n} P e` for every `t₁ < … < t_n < t` and every band projection with
/// `Pe ∈ ⟨R(T), X_t⟩`.
pub fn is_markov(proc: &Process, limits: &Limits) -> Result<MarkovReport> {
    if proc.single_time() {
        return Ok(MarkovReport::pass());
    }
    let e = proc.unit();
    let found = first_witness(&proc.times, |&t| {
        let ps = proc.history_partition(&[t])?.enumerate_band_projections(limits.max_blocks)?;
        let pes: Vec<RieszElement> = ps.iter().map(|p| p.apply_unchecked(e)).collect();
        for hist in nonempty_subsets(&proc.times_before(t), usize::MAX) {
            let th = proc.history_condexp(&hist)?;
            let tl = proc.single(*hist.last().expect("nonempty"))?;
            for (p, pe) in ps.iter().zip(&pes) {
                let lhs = th.apply_unchecked(pe);
                let rhs = tl.apply_unchecked(pe);
                if lhs != rhs {
                    return Ok(Some(
                        WitnessParts::new(MarkovIdentity::History, &hist, t)
                            .projections(vec![p.clone()])
                            .sides(lhs, rhs),
                    ));
                }
            }
        }
        Ok(None)
    })?;
    Ok(MarkovReport::from_first(found))
}

/// `T_(t₁…t_n) T_t = T_{t_n} T_t` over all admissible time tuples.
pub fn markov_operator_form(proc: &Process) -> Result<MarkovReport> {
    if proc.single_time() {
        return Ok(MarkovReport::pass());
    }
    let found = first_witness(&proc.times, |&t| {
        let tt = proc.single(t)?;
        for hist in nonempty_subsets(&proc.times_before(t), usize::MAX) {
            let lhs = proc.history_condexp(&hist)?.then_after(&tt);
            let rhs = proc.single(*hist.last().expect("nonempty"))?.then_after(&tt);
            if lhs != rhs {
                return Ok(Some(WitnessParts::new(MarkovIdentity::OperatorForm, &hist, t).sides(lhs, rhs)));
            }
        }
        Ok(None)
    })?;
    Ok(MarkovReport::from_first(found))
}

/// Future-product form: `T_(t₁…t_n,t) Q₁…Q_m e = T_t Q₁…Q_m e` for every split with at most
/// `limits.max_future` future times, then `T_(t₁…t_n) f = T_{t_n} f` over a basis of each joint
/// future subspace.
pub fn future_products(proc: &Process, limits: &Limits) -> Result<MarkovReport> {
    if proc.single_time() {
        return Ok(MarkovReport::pass());
    }
    let e = proc.unit();
    let space = proc.space();
    let products = first_witness(&proc.times, |&t| {
        let hists = nonempty_subsets(&proc.times_before(t), usize::MAX);
        let futures = nonempty_subsets(&proc.times_after(t), limits.max_future);
        if hists.is_empty() || futures.is_empty() {
            return Ok(None);
        }
        let tt = proc.single(t)?;
        for fut in &futures {
            let per_time = fut
                .iter()
                .map(|&s| proc.history_partition(&[s])?.enumerate_band_projections(limits.max_blocks))
                .collect::<Result<Vec<_>>>()?;
            let count = per_time.iter().try_fold(1usize, |acc, qs| acc.checked_mul(qs.len()));
            match count {
                Some(c) if c <= limits.max_tuples => {}
                _ => {
                    return Err(RieszError::CapExceeded {
                        what: "future projection tuples",
                        cap: limits.max_tuples,
                        actual: count.unwrap_or(usize::MAX),
                    })
                }
            }
            // distinct products with one representative tuple each
            let mut seen = BTreeSet::new();
            let mut tuples: Vec<(Vec<BandProjection>, RieszElement)> = Vec::new();
            let mut idx = vec![0usize; per_time.len()];
            loop {
                let qs: Vec<BandProjection> = idx.iter().zip(&per_time).map(|(&i, qs)| qs[i].clone()).collect();
                let prod = product_of(space, &qs)?;
                if seen.insert(prod.support().to_vec()) {
                    tuples.push((qs, prod.apply_unchecked(e)));
                }
                let mut k = 0;
                while k < idx.len() {
                    idx[k] += 1;
                    if idx[k] < per_time[k].len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
            let rhs_all: Vec<RieszElement> = tuples.iter().map(|(_, qe)| tt.apply_unchecked(qe)).collect();
            for hist in &hists {
                let mut all = hist.clone();
                all.push(t);
                let th = proc.history_condexp(&all)?;
                for ((qs, qe), rhs) in tuples.iter().zip(&rhs_all) {
                    let lhs = th.apply_unchecked(qe);
                    if lhs != *rhs {
                        return Ok(Some(
                            WitnessParts::new(MarkovIdentity::FutureProducts, hist, t)
                                .future(fut)
                                .projections(qs.clone())
                                .sides(lhs, rhs.clone()),
                        ));
                    }
                }
            }
        }
        Ok(None)
    })?;
    if products.is_some() {
        return Ok(MarkovReport::from_first(products));
    }
    let subspace = first_witness(&proc.times, |&last| {
        let futures = nonempty_subsets(&proc.times_after(last), limits.max_future);
        let earlier = proc.times_before(last);
        let tl = proc.single(last)?;
        for rest in std::iter::once(Vec::new()).chain(nonempty_subsets(&earlier, usize::MAX)) {
            let mut hist = rest;
            hist.push(last);
            let th = proc.history_condexp(&hist)?;
            for fut in &futures {
                for f in proc.history_partition(fut)?.block_indicators() {
                    let f = f.mul_pointwise(e)?;
                    let lhs = th.apply_unchecked(&f);
                    let rhs = tl.apply_unchecked(&f);
                    if lhs != rhs {
                        return Ok(Some(
                            WitnessParts::new(MarkovIdentity::FutureSubspace, &hist, last)
                                .future(fut)
                                .element(f)
                                .sides(lhs, rhs),
                        ));
                    }
                }
            }
        }
        Ok(None)
    })?;
    Ok(MarkovReport::from_first(subspace))
}

fn ensure_ordered(proc: &Process, ts: &[i64]) -> Result<()> {
    for &s in ts {
        proc.index_of(s)?;
    }
    if ts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(RieszError::domain(format!("times {} are not increasing", fmt_times(ts))));
    }
    Ok(())
}

/// `T_u X = T_u T_t X` for every `X` in a basis of `R(T_n)`, then `T_u T_n = T_u T_t T_n`.
pub fn chapman_kolmogorov(proc: &Process, u: i64, t: i64, n: i64) -> Result<MarkovReport> {
    ensure_ordered(proc, &[u, t, n])?;
    let tu = proc.single(u)?;
    let tt = proc.single(t)?;
    let tn = proc.single(n)?;
    for x in tn.partition().block_indicators() {
        let x = x.mul_pointwise(proc.unit())?;
        let lhs = tu.apply_unchecked(&x);
        let rhs = tu.apply_unchecked(&tt.apply_unchecked(&x));
        if lhs != rhs {
            return Ok(MarkovReport::fail(
                WitnessParts::new(MarkovIdentity::ChapmanKolmogorov, &[u], t)
                    .future(&[n])
                    .element(x)
                    .sides(lhs, rhs),
            ));
        }
    }
    let lhs = tu.then_after(&tn);
    let rhs = tu.compose_matrix(&tt.then_after(&tn));
    if lhs != rhs {
        return Ok(MarkovReport::fail(
            WitnessParts::new(MarkovIdentity::ChapmanKolmogorovOperator, &[u], t)
                .future(&[n])
                .sides(lhs, rhs),
        ));
    }
    Ok(MarkovReport::pass())
}

/// Every admissible triple `u < t < n`, or the process if it has fewer than three times.
pub fn chapman_kolmogorov_all(proc: &Process) -> Result<MarkovReport> {
    let ts = proc.times();
    let mut triples = Vec::new();
    for a in 0..ts.len() {
        for b in a + 1..ts.len() {
            for c in b + 1..ts.len() {
                triples.push((ts[a], ts[b], ts[c]));
            }
        }
    }
    let found = first_witness(&triples, |&(u, t, n)| Ok(chapman_kolmogorov(proc, u, t, n)?.counterexample))?;
    Ok(MarkovReport::from_first(found))
}

/// `𝕋_u T_v = T_u T_v` with `𝕋_u` conditioning on every `X_s`, `s ≤ u`.
pub fn rao_ii(proc: &Process, u: i64, v: i64) -> Result<MarkovReport> {
    ensure_ordered(proc, &[u, v])?;
    let up_to: Vec<i64> = proc.times().iter().copied().filter(|&s| s <= u).collect();
    let tv = proc.single(v)?;
    let lhs = proc.history_condexp(&up_to)?.then_after(&tv);
    let rhs = proc.single(u)?.then_after(&tv);
    Ok(if lhs == rhs {
        MarkovReport::pass()
    } else {
        MarkovReport::fail(WitnessParts::new(MarkovIdentity::PastOperator, &[u], v).sides(lhs, rhs))
    })
}

pub fn rao_ii_all(proc: &Process) -> Result<MarkovReport> {
    if proc.single_time() {
        return Ok(MarkovReport::pass());
    }
    let ts = proc.times();
    let pairs: Vec<(i64, i64)> = (0..ts.len())
        .flat_map(|a| (a + 1..ts.len()).map(move |b| (ts[a], ts[b])))
        .collect();
    let found = first_witness(&pairs, |&(u, v)| Ok(rao_ii(proc, u, v)?.counterexample))?;
    Ok(MarkovReport::from_first(found))
}

struct Split {
    tt: ConditionalExpectation,
    ps: Vec<BandProjection>,
    qs: Vec<BandProjection>,
}

fn split(proc: &Process, t: i64, past: &[i64], future: &[i64], limits: &Limits) -> Result<Split> {
    if past.is_empty() || future.is_empty() {
        return Err(RieszError::domain("past and future must be nonempty"));
    }
    ensure_ordered(proc, past)?;
    ensure_ordered(proc, future)?;
    proc.index_of(t)?;
    if past.iter().any(|&s| s >= t) || future.iter().any(|&s| s <= t) {
        return Err(RieszError::domain(format!(
            "past {} and future {} must lie on either side of {t}",
            fmt_times(past),
            fmt_times(future)
        )));
    }
    let past_part = proc.history_partition(past)?;
    let future_part = proc.history_partition(future)?;
    let (kp, kq) = (past_part.num_blocks(), future_part.num_blocks());
    let exhaustive_pairs = if kp <= limits.max_blocks && kq <= limits.max_blocks && kp + kq < 64 {
        Some(1u64 << (kp + kq))
    } else {
        None
    };
    // Every term of the chain is bilinear in the indicators of P and Q, so single blocks
    // decide the same identities when the full enumeration is too large.
    let (ps, qs) = match exhaustive_pairs {
        Some(n) if n <= limits.max_tuples as u64 => (
            past_part.enumerate_band_projections(limits.max_blocks)?,
            future_part.enumerate_band_projections(limits.max_blocks)?,
        ),
        _ => (
            (0..kp).map(|b| past_part.block_projection(b)).collect(),
            (0..kq).map(|b| future_part.block_projection(b)).collect(),
        ),
    };
    Ok(Split {
        tt: proc.single(t)?,
        ps,
        qs,
    })
}

/// `T_tQT_tPe = T_tQPe = T_tPQe = T_tPT_tQe` for all `P` from the joint past subspace and `Q`
/// from the joint future subspace. Past and future projections are enumerated in full while the
/// pair count stays within `limits.max_tuples`; beyond that single-block projections are used.
pub fn rao_iii(proc: &Process, t: i64, past: &[i64], future: &[i64], limits: &Limits) -> Result<MarkovReport> {
    let Split { tt, ps, qs } = split(proc, t, past, future, limits)?;
    let e = proc.unit();
    let tpe: Vec<RieszElement> = ps.iter().map(|p| tt.apply_unchecked(&p.apply_unchecked(e))).collect();
    let tqe: Vec<RieszElement> = qs.iter().map(|q| tt.apply_unchecked(&q.apply_unchecked(e))).collect();
    let found = first_witness(&ps.iter().zip(&tpe).collect::<Vec<_>>(), |(p, tp)| {
        for (q, tq) in qs.iter().zip(&tqe) {
            let terms = [
                tt.apply_unchecked(&q.apply_unchecked(tp)),
                tt.apply_unchecked(&q.compose(p)?.apply_unchecked(e)),
                tt.apply_unchecked(&p.compose(q)?.apply_unchecked(e)),
                tt.apply_unchecked(&p.apply_unchecked(tq)),
            ];
            if let Some(link) = (0..3).find(|&i| terms[i] != terms[i + 1]) {
                return Ok(Some(
                    WitnessParts::new(MarkovIdentity::Chain { link }, past, t)
                        .future(future)
                        .projections(vec![(*p).clone(), q.clone()])
                        .sides(terms[link].clone(), terms[link + 1].clone()),
                ));
            }
        }
        Ok(None)
    })?;
    Ok(MarkovReport::from_first(found))
}

/// Times with both a past and a future, paired with all earlier and all later times. Every
/// smaller past or future subspace is contained in these, so checking them covers every split.
fn maximal_splits(proc: &Process) -> Vec<(i64, Vec<i64>, Vec<i64>)> {
    proc.times()
        .iter()
        .map(|&t| (t, proc.times_before(t), proc.times_after(t)))
        .filter(|(_, p, f)| !p.is_empty() && !f.is_empty())
        .collect()
}

pub fn rao_iii_all(proc: &Process, limits: &Limits) -> Result<MarkovReport> {
    if proc.single_time() {
        return Ok(MarkovReport::pass());
    }
    let mut report = MarkovReport::pass();
    for (t, past, future) in maximal_splits(proc) {
        report = report.and(rao_iii(proc, t, &past, &future, limits)?);
        if !report.verdict {
            break;
        }
    }
    Ok(report)
}

/// `T_t(Qe ∘ T_tPe) = T_tPe ∘ T_tQe` with `∘` the e-relative product.
pub fn averaging_step(proc: &Process, t: i64, past: &[i64], future: &[i64], limits: &Limits) -> Result<MarkovReport> {
    let Split { tt, ps, qs } = split(proc, t, past, future, limits)?;
    let e = proc.unit();
    for p in &ps {
        let tpe = tt.apply_unchecked(&p.apply_unchecked(e));
        for q in &qs {
            let qe = q.apply_unchecked(e);
            let lhs = tt.apply_unchecked(&e_mul(&qe, &tpe, e)?);
            let rhs = e_mul(&tpe, &tt.apply_unchecked(&qe), e)?;
            if lhs != rhs {
                return Ok(MarkovReport::fail(
                    WitnessParts::new(MarkovIdentity::AveragingStep, past, t)
                        .future(future)
                        .projections(vec![p.clone(), q.clone()])
                        .sides(lhs, rhs),
                ));
            }
        }
    }
    Ok(MarkovReport::pass())
}

pub fn averaging_step_all(proc: &Process, limits: &Limits) -> Result<MarkovReport> {
    let mut report = MarkovReport::pass();
    for (t, past, future) in maximal_splits(proc) {
        report = report.and(averaging_step(proc, t, &past, &future, limits)?);
        if !report.verdict {
            break;
        }
    }
    Ok(report)
}

/// Both orders of the past/future product against the present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PastFutureReport {
    /// `𝕋_t 𝕊_t = T_t`.
    pub past_first: MarkovReport,
    /// `𝕊_t 𝕋_t = T_t`.
    pub future_first: MarkovReport,
}

impl PastFutureReport {
    pub fn orders_agree(&self) -> bool {
        self.past_first.verdict == self.future_first.verdict
    }
}

/// `𝕋_t` conditions on `X_s, s ≤ t` and `𝕊_t` on `X_s, s ≥ t`.
pub fn past_future(proc: &Process, t: i64) -> Result<PastFutureReport> {
    proc.index_of(t)?;
    let past: Vec<i64> = proc.times().iter().copied().filter(|&s| s <= t).collect();
    let fut: Vec<i64> = proc.times().iter().copied().filter(|&s| s >= t).collect();
    let tp = proc.history_condexp(&past)?;
    let sf = proc.history_condexp(&fut)?;
    let present = proc.single(t)?;
    let target = present.matrix();
    let check = |lhs: Matrix, future_first: bool| {
        if lhs == *target {
            MarkovReport::pass()
        } else {
            MarkovReport::fail(
                WitnessParts::new(MarkovIdentity::PastFuture { future_first }, &[], t).sides(lhs, target.clone()),
            )
        }
    };
    Ok(PastFutureReport {
        past_first: check(tp.then_after(&sf), false),
        future_first: check(sf.then_after(&tp), true),
    })
}

pub fn past_future_all(proc: &Process) -> Result<PastFutureReport> {
    if proc.single_time() {
        return Ok(PastFutureReport { past_first: MarkovReport::pass(), future_first: MarkovReport::pass() });
    }
    let mut out = PastFutureReport {
        past_first: MarkovReport::pass(),
        future_first: MarkovReport::pass(),
    };
    for &t in proc.times() {
        let r = past_future(proc, t)?;
        out.past_first = out.past_first.and(r.past_first);
        out.future_first = out.future_first.and(r.future_first);
    }
    Ok(out)
}

/// Every characterization evaluated on one process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovBattery {
    pub definition: MarkovReport,
    pub operator_form: MarkovReport,
    pub past_operator: MarkovReport,
    pub chain: MarkovReport,
    pub past_future: PastFutureReport,
}

impl MarkovBattery {
    pub fn verdicts(&self) -> [(&'static str, bool); 6] {
        [
            ("definition", self.definition.verdict),
            ("operator form", self.operator_form.verdict),
            ("past operator", self.past_operator.verdict),
            ("past/future chain", self.chain.verdict),
            ("past-future product", self.past_future.past_first.verdict),
            ("future-past product", self.past_future.future_first.verdict),
        ]
    }

    /// The definition, operator form, past-operator and chain characterizations agree.
    pub fn agree(&self) -> bool {
        let v = self.verdicts();
        v[..4].iter().all(|(_, b)| *b == v[0].1)
    }

    /// The two product orders also agree with the definition.
    pub fn products_agree(&self) -> bool {
        self.verdicts().iter().all(|(_, b)| *b == self.definition.verdict)
    }

    pub fn witnesses(&self) -> Vec<&MarkovWitness> {
        [
            &self.definition,
            &self.operator_form,
            &self.past_operator,
            &self.chain,
            &self.past_future.past_first,
            &self.past_future.future_first,
        ]
        .into_iter()
        .filter_map(|r| r.counterexample.as_ref())
        .collect()
    }
}

pub fn markov_battery(proc: &Process, limits: &Limits) -> Result<MarkovBattery> {
    Ok(MarkovBattery {
        definition: is_markov(proc, limits)?,
        operator_form: markov_operator_form(proc)?,
        past_operator: rao_ii_all(proc)?,
        chain: rao_iii_all(proc, limits)?,
        past_future: past_future_all(proc)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::riesz::SampleSpace;

    /// Fair ±1 walk on `2^n` atoms; bit `n-1-i` of the atom index is step `i`.
    fn walk(n: usize) -> Process {
        let s = SampleSpace::uniform(1 << n);
        let steps: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..1usize << n).map(|a| if a >> (n - 1 - i) & 1 == 0 { 1 } else { -1 }).collect())
            .collect();
        let mut acc = vec![0i64; 1 << n];
        let mut xs = Vec::new();
        for step in &steps {
            for (a, v) in acc.iter_mut().zip(step) {
                *a += v;
            }
            xs.push(RieszElement::from_ints(&s, &acc).unwrap());
        }
        Process::new(
            ConditionalExpectation::trivial(&s),
            RieszElement::one(&s),
            (1..=n as i64).collect(),
            xs,
        )
        .unwrap()
    }

    fn counterexample() -> Process {
        let s = SampleSpace::uniform(4);
        let g = RieszElement::from_ints(&s, &[1, 1, 0, 0]).unwrap();
        Process::new(
            ConditionalExpectation::trivial(&s),
            RieszElement::one(&s),
            vec![1, 2, 3],
            vec![g.clone(), RieszElement::zero(&s), g],
        )
        .unwrap()
    }

    #[test]
    fn history_condexp_examples() {
        let p = walk(2);
        assert_eq!(p.history_condexp(&[]).unwrap(), *p.base());
        assert_eq!(p.history_condexp(&[1]).unwrap().partition().describe(), "{{1,2},{3,4}}");
        assert!(p.history_condexp(&[1, 2]).unwrap().partition().is_discrete());
        assert!(p.history_condexp(&[7]).is_err());
        let c = counterexample();
        assert_eq!(c.history_condexp(&[2]).unwrap(), *c.base());
    }

    #[test]
    fn process_validation() {
        let s = SampleSpace::uniform(2);
        let t = ConditionalExpectation::trivial(&s);
        let x = RieszElement::one(&s);
        assert!(Process::new(t.clone(), x.clone(), vec![2, 1], vec![x.clone(), x.clone()]).is_err());
        assert!(Process::new(t.clone(), x.clone(), vec![1], vec![x.clone(), x.clone()]).is_err());
        let bad_unit = RieszElement::from_ints(&s, &[1, 2]).unwrap();
        assert!(Process::new(t, bad_unit, vec![1], vec![x]).is_err());
    }

    #[test]
    fn walk_is_markov_everywhere() {
        let lim = Limits::default();
        for n in 2..=3 {
            let p = walk(n);
            let battery = markov_battery(&p, &lim).unwrap();
            assert!(battery.products_agree() && battery.definition.verdict, "n={n}: {battery:?}");
            assert!(chapman_kolmogorov_all(&p).unwrap().verdict);
            assert!(averaging_step_all(&p, &lim).unwrap().verdict);
        }
        let p = walk(2);
        assert!(rao_ii(&p, 1, 2).unwrap().verdict);
    }

    #[test]
    fn counterexample_fails_with_reproducible_witnesses() {
        let p = counterexample();
        let lim = Limits::default();
        let r = is_markov(&p, &lim).unwrap();
        assert!(!r.verdict);
        let w = r.counterexample.unwrap();
        assert_eq!((w.history.clone(), w.time), (vec![1, 2], 3));
        assert!(w.recheck(&p).unwrap());

        let battery = markov_battery(&p, &lim).unwrap();
        assert!(battery.agree());
        assert!(battery.products_agree());
        for w in battery.witnesses() {
            assert!(w.recheck(&p).unwrap(), "{}", w.describe());
        }
        assert!(!rao_ii(&p, 2, 3).unwrap().verdict);
        assert!(!rao_iii(&p, 2, &[1], &[3], &lim).unwrap().verdict);
        let ck = chapman_kolmogorov(&p, 1, 2, 3).unwrap();
        assert!(!ck.verdict);
        assert!(ck.counterexample.unwrap().recheck(&p).unwrap());
        let fp = future_products(&p, &lim).unwrap();
        assert!(!fp.verdict);
        assert!(fp.counterexample.unwrap().recheck(&p).unwrap());
    }

    #[test]
    fn tampered_witness_does_not_recheck() {
        let p = counterexample();
        let mut w = is_markov(&p, &Limits::default()).unwrap().counterexample.unwrap();
        w.lhs = w.rhs.clone();
        assert!(!w.recheck(&p).unwrap());
    }

    #[test]
    fn constant_and_measurable_processes() {
        let s = SampleSpace::uniform(3);
        let e = RieszElement::one(&s);
        let t = ConditionalExpectation::trivial(&s);
        let p = Process::new(t, e.clone(), vec![1, 2, 3], vec![e.clone(); 3]).unwrap();
        let lim = Limits::default();
        assert!(markov_battery(&p, &lim).unwrap().products_agree());
        assert!(chapman_kolmogorov_all(&p).unwrap().verdict);
        // F-measurable elements with T onto F: every operator collapses to T
        let tb = ConditionalExpectation::new(Partition::new(&s, vec![vec![0, 1], vec![2]]).unwrap());
        let x = RieszElement::from_ints(&s, &[4, 4, -1]).unwrap();
        let q = Process::new(tb, e, vec![0, 5, 9], vec![x.clone(), x.scale(&int(2)), x]).unwrap();
        assert!(markov_operator_form(&q).unwrap().verdict);
        assert!(rao_ii_all(&q).unwrap().verdict);
        assert!(rao_iii_all(&q, &lim).unwrap().verdict);
    }

    #[test]
    fn future_products_examples() {
        let lim = Limits::default();
        // three steps have no split with two future times; four do
        assert!(future_products(&walk(3), &lim).unwrap().verdict);
        assert!(future_products(&walk(4), &lim).unwrap().verdict);
        let tight = Limits { max_tuples: 3, ..lim };
        assert!(future_products(&walk(3), &tight).unwrap_err().is_resource());
    }

    #[test]
    fn chain_on_blocks_matches_full_enumeration() {
        let lim = Limits::default();
        let tight = Limits { max_tuples: 1, ..lim };
        for p in [walk(3), counterexample()] {
            for (t, past, fut) in maximal_splits(&p) {
                let full = rao_iii(&p, t, &past, &fut, &lim).unwrap();
                let blocks = rao_iii(&p, t, &past, &fut, &tight).unwrap();
                assert_eq!(full.verdict, blocks.verdict);
                if let Some(w) = blocks.counterexample {
                    assert!(w.recheck(&p).unwrap());
                }
            }
        }
    }

    #[test]
    fn ordering_errors() {
        let p = walk(3);
        assert!(chapman_kolmogorov(&p, 2, 1, 3).is_err());
        assert!(chapman_kolmogorov(&p, 1, 2, 9).is_err());
        assert!(rao_ii(&p, 2, 2).is_err());
        assert!(rao_iii(&p, 2, &[3], &[1], &Limits::default()).is_err());
        assert!(rao_iii(&p, 2, &[], &[3], &Limits::default()).is_err());
        let single = Process::new(p.base().clone(), p.unit().clone(), vec![1], vec![p.elements()[0].clone()]).unwrap();
        let battery = markov_battery(&single, &Limits::default()).unwrap();
        assert!(battery.agree() && battery.verdicts().iter().all(|v| v.1));
        assert!(future_products(&single, &Limits::default()).unwrap().verdict);
    }

    #[test]
    fn subsets_in_bitmask_order() {
        assert_eq!(
            nonempty_subsets(&[1, 2, 3], 2),
            vec![vec![1], vec![2], vec![1, 2], vec![3], vec![1, 3], vec![2, 3]]
        );
    }
}
