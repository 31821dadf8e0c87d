//! Product spaces, partial-sum processes, martingales and the Rademacher walk.

use num_traits::{One, Signed, Zero};

use crate::condexp::ConditionalExpectation;
use crate::error::{Result, RieszError};
use crate::independence::{family_independent, family_independent_on_blocks, IndependenceVerdict};
use crate::limits::Limits;
use crate::markov::{is_markov, Process};
use crate::partition::Partition;
use crate::rational::{int, rat, Rational};
use crate::riesz::{e_mul, ensure_same, RieszElement, SampleSpace, Space};

/// Largest atom count a product space may have.
pub const MAX_PRODUCT_ATOMS: usize = 1 << 12;

/// Default cap on the number of Rademacher steps.
pub const WALK_CAP: usize = 5;

/// Independent factors on one space. Atom `i.j.k` has outcome `i` of the first factor, `j` of
/// the second and so on (1-based); the first factor varies slowest.
#[derive(Debug, Clone)]
pub struct ProductSpace {
    factor_outcomes: Vec<Vec<(Rational, Rational)>>,
    space: Space,
    coordinates: Vec<RieszElement>,
}

/// Builds the product measure of `factors`, each a list of `(value, weight)` outcomes.
pub fn product_space(factors: &[Vec<(Rational, Rational)>]) -> Result<ProductSpace> {
    if factors.is_empty() {
        return Err(RieszError::domain("a product needs at least one factor"));
    }
    let mut size = 1usize;
    for (i, f) in factors.iter().enumerate() {
        if f.is_empty() {
            return Err(RieszError::domain(format!("factor {} has no outcomes", i + 1)));
        }
        if let Some((_, w)) = f.iter().find(|(_, w)| !w.is_positive()) {
            return Err(RieszError::domain(format!("factor {} has non-positive weight {w}", i + 1)));
        }
        let total: Rational = f.iter().map(|(_, w)| w).sum();
        if !total.is_one() {
            return Err(RieszError::domain(format!("factor {} weights sum to {total}", i + 1)));
        }
        size = size.saturating_mul(f.len());
    }
    if size > MAX_PRODUCT_ATOMS {
        return Err(RieszError::CapExceeded {
            what: "product space atoms",
            cap: MAX_PRODUCT_ATOMS,
            actual: size,
        });
    }
    // mixed-radix digits, most significant first
    let digits: Vec<Vec<usize>> = (0..size)
        .map(|mut a| {
            let mut d = vec![0; factors.len()];
            for (k, f) in factors.iter().enumerate().rev() {
                d[k] = a % f.len();
                a /= f.len();
            }
            d
        })
        .collect();
    let atoms = digits
        .iter()
        .map(|d| d.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join("."))
        .collect();
    let weights = digits
        .iter()
        .map(|d| d.iter().zip(factors).map(|(&x, f)| f[x].1.clone()).product())
        .collect();
    let space = SampleSpace::new(atoms, weights)?;
    let coordinates = (0..factors.len())
        .map(|k| {
            let values = digits.iter().map(|d| factors[k][d[k]].0.clone()).collect();
            RieszElement::new(&space, values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProductSpace {
        factor_outcomes: factors.to_vec(),
        space,
        coordinates,
    })
}

/// `n` fair factors with outcomes `+1` and `−1`.
pub fn fair_signs(n: usize) -> Result<ProductSpace> {
    product_space(&vec![vec![(int(1), rat(1, 2)), (int(-1), rat(1, 2))]; n])
}

impl ProductSpace {
    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn factor_outcomes(&self) -> &[Vec<(Rational, Rational)>] {
        &self.factor_outcomes
    }

    pub fn coordinates(&self) -> &[RieszElement] {
        &self.coordinates
    }

    pub fn trivial_condexp(&self) -> ConditionalExpectation {
        ConditionalExpectation::trivial(&self.space)
    }

    /// Family independence of the coordinate subspaces under the trivial conditional expectation.
    pub fn verify_independence(&self, limits: &Limits) -> Result<IndependenceVerdict> {
        let t = self.trivial_condexp();
        let parts: Vec<Partition> = self.coordinates.iter().map(Partition::level_sets).collect();
        let limits = Limits {
            max_family: limits.max_family.max(parts.len()),
            ..*limits
        };
        family_independent(&t, &parts, &RieszElement::one(&self.space), parts.len(), &limits)
    }
}

/// `X_n = f₁ + … + f_n` at times `1..N`.
pub fn partial_sums(fs: &[RieszElement], t: &ConditionalExpectation, e: &RieszElement) -> Result<Process> {
    let first = fs.first().ok_or_else(|| RieszError::domain("no summands"))?;
    let mut acc = RieszElement::zero(first.space());
    let mut xs = Vec::with_capacity(fs.len());
    for f in fs {
        acc = acc.add(f)?;
        xs.push(acc.clone());
    }
    Process::new(t.clone(), e.clone(), (1..=fs.len() as i64).collect(), xs)
}

/// Whether `⟨R(T), S₁…S_n⟩ = ⟨R(T), f₁…f_n⟩` for every `n`.
pub fn sums_generate_same(proc: &Process, fs: &[RieszElement]) -> Result<bool> {
    let g = proc.base().partition();
    for n in 1..=fs.len().min(proc.elements().len()) {
        let sums: Vec<&RieszElement> = proc.elements()[..n].iter().collect();
        let summands: Vec<&RieszElement> = fs[..n].iter().collect();
        if g.generated(&sums)? != g.generated(&summands)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `𝕋_n` conditioning on every `X_s`, `s ≤ t_n`.
pub fn natural_filtration(proc: &Process) -> Result<Vec<ConditionalExpectation>> {
    let ts = proc.times();
    (0..ts.len()).map(|i| proc.history_condexp(&ts[..=i])).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MartingaleWitness {
    pub i: usize,
    pub j: usize,
    /// `𝕋_i X_j`.
    pub lhs: RieszElement,
    /// `X_i`.
    pub rhs: RieszElement,
}

impl MartingaleWitness {
    pub fn recheck(&self, proc: &Process, filtration: &[ConditionalExpectation]) -> Result<bool> {
        let (Some(ti), Some(xj), Some(xi)) = (
            filtration.get(self.i),
            proc.elements().get(self.j),
            proc.elements().get(self.i),
        ) else {
            return Err(RieszError::domain("witness indices out of range"));
        };
        let lhs = ti.apply(xj)?;
        Ok(lhs == self.lhs && *xi == self.rhs && lhs != *xi)
    }

    pub fn describe(&self) -> String {
        format!(
            "TT_{i} X_{j} = X_{i} fails: lhs={} rhs={}",
            self.lhs,
            self.rhs,
            i = self.i + 1,
            j = self.j + 1
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MartingaleReport {
    pub holds: bool,
    pub witness: Option<MartingaleWitness>,
}

/// `𝕋_i X_j = X_i` for all `i ≤ j`, with `filtration[i]` playing `𝕋_i`.
pub fn is_martingale(proc: &Process, filtration: &[ConditionalExpectation]) -> Result<MartingaleReport> {
    let xs = proc.elements();
    if filtration.len() != xs.len() {
        return Err(RieszError::domain(format!(
            "{} filtration operators for {} times",
            filtration.len(),
            xs.len()
        )));
    }
    for ti in filtration {
        ensure_same(ti.space(), proc.space())?;
    }
    for (k, w) in filtration.windows(2).enumerate() {
        if !w[1].partition().refines(w[0].partition())? {
            return Err(RieszError::domain(format!("filtration decreases at step {}", k + 2)));
        }
    }
    for (i, (ti, x)) in filtration.iter().zip(xs).enumerate() {
        if !ti.is_measurable(x)? {
            return Err(RieszError::domain(format!("X_{} is not in the range of its filtration operator", i + 1)));
        }
    }
    for (i, ti) in filtration.iter().enumerate() {
        for j in i..xs.len() {
            let lhs = ti.apply_unchecked(&xs[j]);
            if lhs != xs[i] {
                return Ok(MartingaleReport {
                    holds: false,
                    witness: Some(MartingaleWitness {
                        i,
                        j,
                        lhs,
                        rhs: xs[i].clone(),
                    }),
                });
            }
        }
    }
    Ok(MartingaleReport {
        holds: true,
        witness: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedSumReport {
    /// Whether `Tf_i = 0` for every summand; the first offending index otherwise.
    pub mean_zero: bool,
    pub first_nonzero_mean: Option<usize>,
    /// `T|S_n|` for `n = 1..=horizon`.
    pub running: Vec<RieszElement>,
    pub bound_holds: bool,
    /// First `n` (1-based) with `T|S_n| ≰ g`.
    pub first_violation: Option<usize>,
}

/// Compares `T|S_n|` with `g` for every `n ≤ horizon`.
pub fn bounded_sum_check(
    fs: &[RieszElement],
    t: &ConditionalExpectation,
    g: &RieszElement,
    horizon: usize,
) -> Result<BoundedSumReport> {
    if horizon > fs.len() {
        return Err(RieszError::domain(format!("horizon {horizon} exceeds {} summands", fs.len())));
    }
    ensure_same(t.space(), g.space())?;
    let mut first_nonzero_mean = None;
    for (i, f) in fs.iter().enumerate() {
        ensure_same(t.space(), f.space())?;
        if first_nonzero_mean.is_none() && !t.apply_unchecked(f).is_zero() {
            first_nonzero_mean = Some(i + 1);
        }
    }
    let mut acc = RieszElement::zero(t.space());
    let mut running = Vec::with_capacity(horizon);
    let mut first_violation = None;
    for (n, f) in fs.iter().take(horizon).enumerate() {
        acc = acc.add(f)?;
        let v = t.apply_unchecked(&acc.abs());
        if first_violation.is_none() && !v.le(g)? {
            first_violation = Some(n + 1);
        }
        running.push(v);
    }
    Ok(BoundedSumReport {
        mean_zero: first_nonzero_mean.is_none(),
        first_nonzero_mean,
        running,
        bound_holds: first_violation.is_none(),
        first_violation,
    })
}

/// A process `f_n` with increments `g_i = f_i − f_{i−1}`, `f₀ = 0`.
#[derive(Debug, Clone)]
pub struct BrownianProcess {
    process: Process,
    increments: Vec<RieszElement>,
}

impl BrownianProcess {
    /// Assembles the partial-sum process of `increments` without checking any axiom.
    pub fn from_increments(t: &ConditionalExpectation, e: &RieszElement, increments: Vec<RieszElement>) -> Result<Self> {
        let process = partial_sums(&increments, t, e)?;
        Ok(BrownianProcess { process, increments })
    }

    pub fn process(&self) -> &Process {
        &self.process
    }

    pub fn increments(&self) -> &[RieszElement] {
        &self.increments
    }

    /// `f_n` with `f₀ = 0`.
    pub fn position(&self, n: usize) -> RieszElement {
        if n == 0 {
            RieszElement::zero(self.process.space())
        } else {
            self.process.elements()[n - 1].clone()
        }
    }
}

/// Fair ±1 walk with `n` steps on `2^n` atoms under the trivial conditional expectation,
/// verified on construction.
pub fn rademacher_walk(n: usize) -> Result<BrownianProcess> {
    rademacher_walk_capped(n, WALK_CAP)
}

pub fn rademacher_walk_capped(n: usize, cap: usize) -> Result<BrownianProcess> {
    if n == 0 {
        return Err(RieszError::domain("a walk needs at least one step"));
    }
    if n > cap {
        return Err(RieszError::CapExceeded {
            what: "walk steps",
            cap,
            actual: n,
        });
    }
    let ps = fair_signs(n)?;
    let t = ps.trivial_condexp();
    let e = RieszElement::one(ps.space());
    let bp = BrownianProcess::from_increments(&t, &e, ps.coordinates().to_vec())?;
    let report = verify_brownian(&bp)?;
    if !report.holds() {
        return Err(RieszError::domain(format!("walk failed its own axioms: {}", report.failures().join("; "))));
    }
    Ok(bp)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticFailure {
    pub n: usize,
    pub m: usize,
    /// `T(f_n − f_m)²`.
    pub actual: RieszElement,
    /// `|n − m| e`.
    pub expected: RieszElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrownianReport {
    /// Increments form an independent sequence.
    pub independence: IndependenceVerdict,
    /// Increments `i` (1-based) with `Tg_i ≠ 0`.
    pub nonzero_means: Vec<usize>,
    /// Pairs `n > m ≥ 0` with `T(f_n − f_m)² ≠ |n − m| e`.
    pub quadratic: Vec<QuadraticFailure>,
    /// Number of `(n, m)` pairs compared.
    pub pairs_checked: usize,
}

impl BrownianReport {
    pub fn holds(&self) -> bool {
        self.independence.holds && self.nonzero_means.is_empty() && self.quadratic.is_empty()
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(w) = &self.independence.witness {
            out.push(format!("increments not independent: {}", w.describe()));
        }
        for i in &self.nonzero_means {
            out.push(format!("T g_{i} is not zero"));
        }
        for q in &self.quadratic {
            out.push(format!(
                "T(f_{} - f_{})^2 = {} but expected {}",
                q.n, q.m, q.actual, q.expected
            ));
        }
        out
    }
}

/// Re-checks the three axioms exactly: independent increments, `Tg_i = 0`, and
/// `T(f_n − f_m)² = |n − m| e` for every pair `0 ≤ m < n ≤ N`. Squares are taken in the
/// f-algebra with unit `e`.
pub fn verify_brownian(bp: &BrownianProcess) -> Result<BrownianReport> {
    let proc = &bp.process;
    let t = proc.base();
    let e = proc.unit();
    let parts = bp
        .increments
        .iter()
        .map(|g| t.partition().generated(&[g]))
        .collect::<Result<Vec<_>>>()?;
    let n = parts.len();
    let limits = Limits {
        max_family: n,
        max_pair_size: n,
        ..Limits::default()
    };
    let independence = family_independent_on_blocks(t, &parts, e, n, &limits)?;
    let nonzero_means = bp
        .increments
        .iter()
        .enumerate()
        .filter(|(_, g)| !t.apply_unchecked(g).is_zero())
        .map(|(i, _)| i + 1)
        .collect();
    let mut quadratic = Vec::new();
    let mut pairs_checked = 0;
    for hi in 1..=n {
        for lo in 0..hi {
            let d = bp.position(hi).sub(&bp.position(lo))?;
            let actual = t.apply_unchecked(&e_mul(&d, &d, e)?);
            let expected = e.scale(&int((hi - lo) as i64));
            pairs_checked += 1;
            if actual != expected {
                quadratic.push(QuadraticFailure {
                    n: hi,
                    m: lo,
                    actual,
                    expected,
                });
            }
        }
    }
    Ok(BrownianReport {
        independence,
        nonzero_means,
        quadratic,
        pairs_checked,
    })
}

pub fn brownian_is_markov(bp: &BrownianProcess, limits: &Limits) -> Result<bool> {
    Ok(is_markov(&bp.process, limits)?.verdict)
}

/// Rational mean `Σ value·weight` of one factor.
pub fn factor_mean(outcomes: &[(Rational, Rational)]) -> Rational {
    outcomes.iter().fold(Rational::zero(), |acc, (v, w)| acc + v * w)
}
