//! Conditional expectations as weighted block averages.
//!
//! For a partition `F` the operator maps `f` to the function whose value on a
//! block `B` is `Σ_{ω∈B} μ(ω) f(ω) / μ(B)`. Its matrix has entry
//! `μ(ω′)/μ(block(ω))` when `ω′` shares a block with `ω`.

use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};

use crate::error::{Result, RieszError};
use crate::matrix::{Matrix, Solution};
use crate::partition::Partition;
use crate::rational::{int, Rational};
use crate::riesz::{ensure_same, BandProjection, RieszElement, SampleSpace, Space};

#[derive(Clone)]
pub struct ConditionalExpectation {
    partition: Partition,
    block_weights: Vec<Rational>,
    matrix: Arc<OnceLock<Matrix>>,
}

impl ConditionalExpectation {
    pub fn new(partition: Partition) -> Self {
        let space = partition.space().clone();
        let block_weights = partition
            .blocks()
            .iter()
            .map(|b| b.iter().map(|&a| space.weight(a)).sum())
            .collect();
        ConditionalExpectation {
            partition,
            block_weights,
            matrix: Arc::new(OnceLock::new()),
        }
    }

    /// Expectation: averaging over the whole space.
    pub fn trivial(space: &Space) -> Self {
        Self::new(Partition::trivial(space))
    }

    pub fn identity(space: &Space) -> Self {
        Self::new(Partition::discrete(space))
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn space(&self) -> &Space {
        self.partition.space()
    }

    pub fn apply(&self, f: &RieszElement) -> Result<RieszElement> {
        ensure_same(self.space(), f.space())?;
        Ok(RieszElement::from_parts(f.space(), self.apply_values(f.values())))
    }

    pub(crate) fn apply_unchecked(&self, f: &RieszElement) -> RieszElement {
        RieszElement::from_parts(f.space(), self.apply_values(f.values()))
    }

    pub(crate) fn apply_values(&self, values: &[Rational]) -> Vec<Rational> {
        let space = self.space();
        let averages: Vec<Rational> = self
            .partition
            .blocks()
            .iter()
            .zip(&self.block_weights)
            .map(|(block, mass)| {
                let total: Rational = block
                    .iter()
                    .filter(|&&a| !values[a].is_zero())
                    .map(|&a| space.weight(a) * &values[a])
                    .sum();
                total / mass
            })
            .collect();
        (0..values.len())
            .map(|a| averages[self.partition.block_of(a)].clone())
            .collect()
    }

    /// The operator matrix, derived on first use.
    pub fn matrix(&self) -> &Matrix {
        self.matrix.get_or_init(|| {
            let space = self.space();
            let n = space.len();
            let mut m = Matrix::zeros(n, n);
            for (block, mass) in self.partition.blocks().iter().zip(&self.block_weights) {
                for &i in block {
                    for &j in block {
                        m.set(i, j, space.weight(j) / mass);
                    }
                }
            }
            m
        })
    }

    /// `self ∘ M`, computed column by column.
    pub fn compose_matrix(&self, m: &Matrix) -> Matrix {
        assert_eq!(m.rows(), self.space().len(), "dimension mismatch");
        let columns: Vec<Vec<Rational>> = (0..m.cols()).map(|j| self.apply_values(&m.column(j))).collect();
        Matrix::from_columns(&columns)
    }

    /// `self ∘ other` as a matrix.
    pub fn then_after(&self, other: &ConditionalExpectation) -> Matrix {
        self.compose_matrix(other.matrix())
    }

    pub fn is_measurable(&self, f: &RieszElement) -> Result<bool> {
        self.partition.is_measurable(f)
    }

    /// `Te = e` for a weak order unit `e`.
    pub fn fixes_unit(&self, e: &RieszElement) -> Result<bool> {
        ensure_same(self.space(), e.space())?;
        Ok(e.is_weak_order_unit().unwrap_or(false) && self.apply_unchecked(e) == *e)
    }

    pub(crate) fn ensure_invariant_unit(&self, e: &RieszElement) -> Result<()> {
        if self.fixes_unit(e)? {
            Ok(())
        } else {
            Err(RieszError::domain("unit not T-invariant"))
        }
    }
}

impl PartialEq for ConditionalExpectation {
    fn eq(&self, other: &Self) -> bool {
        self.partition == other.partition
    }
}

impl Eq for ConditionalExpectation {}

impl std::fmt::Debug for ConditionalExpectation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "T{}", self.partition.describe())
    }
}

/// Per-axiom outcome of [`verify_axioms`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub square: bool,
    pub positive: bool,
    pub idempotent: bool,
    /// The range is a Riesz subspace spanned by disjoint positive elements.
    pub riesz_range: bool,
    /// Some (equivalently every) weak order unit is mapped to a weak order unit.
    pub unit_preserving: bool,
    /// `Mf = 0` and `f >= 0` force `f = 0`. Reported, not required.
    pub strictly_positive: bool,
    pub order_continuity: &'static str,
    pub failures: Vec<String>,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Tests whether a square rational matrix is a conditional expectation on `space`.
pub fn verify_axioms(m: &Matrix, space: &SampleSpace) -> AxiomReport {
    let n = space.len();
    let mut report = AxiomReport {
        square: m.rows() == n && m.cols() == n,
        positive: false,
        idempotent: false,
        riesz_range: false,
        unit_preserving: false,
        strictly_positive: false,
        order_continuity: "automatic in finite dimension",
        failures: Vec::new(),
    };
    if !report.square {
        report.failures.push(format!("dimension: expected {n}x{n}, got {}x{}", m.rows(), m.cols()));
        return report;
    }
    report.positive = m.entries().all(|v| !v.is_negative());
    if !report.positive {
        report.failures.push("positivity: matrix has a negative entry".into());
    }
    report.idempotent = m.mul(m) == *m;
    if !report.idempotent {
        report.failures.push("idempotence: M·M differs from M".into());
    }
    report.riesz_range = range_is_riesz_subspace(m);
    if !report.riesz_range {
        report.failures.push("lattice range: range is not closed under lattice operations".into());
    }
    let ones = vec![Rational::one(); n];
    report.unit_preserving = m.apply(&ones).iter().all(Signed::is_positive);
    if !report.unit_preserving {
        report.failures.push("weak order unit: the image of 1 is not strictly positive".into());
    }
    report.strictly_positive = report.positive && (0..n).all(|j| m.column(j).iter().any(|v| !v.is_zero()));
    report
}

/// A subspace of `Q^n` is a Riesz subspace iff the coordinate functionals restricted to it fall
/// into exactly `rank` classes of positive proportionality (ignoring vanishing ones). For the
/// column space of `m` the restricted functionals are the rows of `m`.
fn range_is_riesz_subspace(m: &Matrix) -> bool {
    let mut classes: Vec<&[Rational]> = Vec::new();
    for i in 0..m.rows() {
        let row = m.row(i);
        if row.iter().all(Zero::is_zero) {
            continue;
        }
        if !classes.iter().any(|rep| positively_proportional(row, rep)) {
            classes.push(row);
        }
    }
    classes.len() == m.rank()
}

fn positively_proportional(u: &[Rational], v: &[Rational]) -> bool {
    let Some(k) = v.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    let c = &u[k] / &v[k];
    c.is_positive() && u.iter().zip(v).all(|(a, b)| *a == &c * b)
}

/// `T_F`: the conditional expectation with range `F` commuting with `T`. Requires `F` to
/// refine the partition of `T`.
pub fn condexp_onto(t: &ConditionalExpectation, f: &Partition) -> Result<ConditionalExpectation> {
    if !f.refines(t.partition())? {
        return Err(RieszError::domain("range does not contain R(T)"));
    }
    if f == t.partition() {
        return Ok(t.clone());
    }
    Ok(ConditionalExpectation::new(f.clone()))
}

/// Checks `T P f = T P T_F f` for every band projection `P` with `Pe` in the range of `T_F`.
pub fn verify_radon_nikodym(
    t: &ConditionalExpectation,
    t_f: &ConditionalExpectation,
    f: &RieszElement,
    cap: usize,
) -> Result<bool> {
    verify_radon_nikodym_candidate(t, t_f.partition(), t_f.matrix(), f, cap)
}

/// Same identity with an arbitrary candidate matrix in place of `T_F`.
pub fn verify_radon_nikodym_candidate(
    t: &ConditionalExpectation,
    range: &Partition,
    candidate: &Matrix,
    f: &RieszElement,
    cap: usize,
) -> Result<bool> {
    ensure_same(t.space(), f.space())?;
    if !range.refines(t.partition())? {
        return Err(RieszError::domain("range does not contain R(T)"));
    }
    let candidate_f = RieszElement::from_parts(f.space(), candidate.apply(f.values()));
    for p in range.enumerate_band_projections(cap)? {
        let lhs = t.apply_unchecked(&p.apply_unchecked(f));
        let rhs = t.apply_unchecked(&p.apply_unchecked(&candidate_f));
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Solves the linear system `T P X e_j = T P e_j` (all `P` with `Pe` in `F`, all atoms `j`) for
/// an operator `X` with range in `F`. A unique solution is returned as a matrix.
pub fn radon_nikodym_solution(t: &ConditionalExpectation, range: &Partition, cap: usize) -> Result<Solution> {
    if !range.refines(t.partition())? {
        return Err(RieszError::domain("range does not contain R(T)"));
    }
    let space = t.space();
    let n = space.len();
    let k = range.num_blocks();
    let basis = range.block_indicators();
    // rows of T P v are constant on T-blocks; one representative atom per block suffices
    let reps: Vec<usize> = t.partition().blocks().iter().map(|b| b[0]).collect();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for p in range.enumerate_band_projections(cap)? {
        let images: Vec<Vec<Rational>> = basis
            .iter()
            .map(|b| t.apply_values(&p.mask(b.values())))
            .collect();
        let targets: Vec<Vec<Rational>> = (0..n)
            .map(|j| {
                let mut unit = vec![Rational::zero(); n];
                unit[j] = Rational::one();
                t.apply_values(&p.mask(&unit))
            })
            .collect();
        for &r in &reps {
            rows.push(images.iter().map(|img| img[r].clone()).collect::<Vec<_>>());
            rhs.push(targets.iter().map(|tgt| tgt[r].clone()).collect::<Vec<_>>());
        }
    }
    let system = Matrix::from_rows(rows);
    let rhs = Matrix::from_rows(rhs);
    Ok(match system.solve(&rhs) {
        Solution::Unique(coeffs) => {
            // coeffs is k×n: column j holds block values of X e_j
            debug_assert_eq!(coeffs.rows(), k);
            let mut x = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    x.set(i, j, coeffs.get(range.block_of(i), j).clone());
                }
            }
            Solution::Unique(x)
        }
        other => other,
    })
}

/// How [`freudenthal`] builds its approximating stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreudenthalMode {
    /// One term per distinct positive value of `w/e`.
    Exact,
    /// Dyadic staircases with cut points `j·max(w/e)·2^(−n)`, `n = 1..=resolution`.
    Staircase { resolution: u32 },
}

/// `w ≈ Σ_j a_j Q_j e` with every `Q_j e` in the range of `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreudenthalRepresentation {
    pub coefficients: Vec<Rational>,
    pub projections: Vec<BandProjection>,
    /// Non-decreasing approximations of `w`, each bounded above by `w`.
    pub stages: Vec<RieszElement>,
    pub unit: RieszElement,
}

impl FreudenthalRepresentation {
    /// `Σ_j a_j Q_j e` for the stored terms.
    pub fn evaluate(&self) -> RieszElement {
        self.coefficients
            .iter()
            .zip(&self.projections)
            .fold(RieszElement::zero(self.unit.space()), |acc, (a, q)| {
                acc.add(&q.apply_unchecked(&self.unit).scale(a)).expect("same space")
            })
    }

    pub fn final_stage(&self) -> Option<&RieszElement> {
        self.stages.last()
    }
}

pub fn freudenthal(
    w: &RieszElement,
    t: &ConditionalExpectation,
    e: &RieszElement,
    mode: FreudenthalMode,
) -> Result<FreudenthalRepresentation> {
    ensure_same(t.space(), w.space())?;
    t.ensure_invariant_unit(e)?;
    if !w.is_positive() {
        return Err(RieszError::domain("Freudenthal representation needs w >= 0"));
    }
    if !t.is_measurable(w)? {
        return Err(RieszError::domain("w is not in the range of T"));
    }
    let space = w.space().clone();
    let ratio: Vec<Rational> = w.values().iter().zip(e.values()).map(|(a, u)| a / u).collect();
    let level = |t: &Rational, lo: &Rational, hi: Option<&Rational>| *t >= *lo && hi.is_none_or(|h| *t < *h);
    match mode {
        FreudenthalMode::Exact => {
            let mut values: Vec<Rational> = ratio.iter().filter(|v| v.is_positive()).cloned().collect();
            values.sort();
            values.dedup();
            let mut rep = FreudenthalRepresentation {
                coefficients: Vec::new(),
                projections: Vec::new(),
                stages: Vec::new(),
                unit: e.clone(),
            };
            let mut acc = RieszElement::zero(&space);
            for v in values {
                let q = BandProjection::new(&space, ratio.iter().map(|r| *r == v).collect())?;
                acc = acc.add(&q.apply_unchecked(e).scale(&v))?;
                rep.coefficients.push(v);
                rep.projections.push(q);
                rep.stages.push(acc.clone());
            }
            Ok(rep)
        }
        FreudenthalMode::Staircase { resolution } => {
            if resolution == 0 {
                return Err(RieszError::domain("staircase resolution must be positive"));
            }
            let max = ratio.iter().max().cloned().unwrap_or_else(Rational::zero);
            let mut rep = FreudenthalRepresentation {
                coefficients: Vec::new(),
                projections: Vec::new(),
                stages: Vec::new(),
                unit: e.clone(),
            };
            if max.is_zero() {
                rep.stages = vec![RieszElement::zero(&space); resolution as usize];
                return Ok(rep);
            }
            for n in 1..=resolution {
                let steps = 1i64 << n;
                let delta = &max / int(steps);
                let mut coefficients = Vec::new();
                let mut projections = Vec::new();
                let mut stage = RieszElement::zero(&space);
                for j in 1..=steps {
                    let lo = &delta * int(j);
                    let hi = (j < steps).then(|| &delta * int(j + 1));
                    let support: Vec<bool> = ratio.iter().map(|r| level(r, &lo, hi.as_ref())).collect();
                    if !support.iter().any(|&s| s) {
                        continue;
                    }
                    let q = BandProjection::new(&space, support)?;
                    stage = stage.add(&q.apply_unchecked(e).scale(&lo))?;
                    coefficients.push(lo);
                    projections.push(q);
                }
                rep.stages.push(stage);
                rep.coefficients = coefficients;
                rep.projections = projections;
            }
            Ok(rep)
        }
    }
}

/// Whether `TP = PT` as matrices.
pub fn commutes(t: &ConditionalExpectation, p: &BandProjection) -> Result<bool> {
    ensure_same(t.space(), p.space())?;
    let m = t.matrix();
    let n = m.rows();
    Ok((0..n).all(|i| {
        (0..n).all(|j| {
            let tp = if p.contains(j) { m.get(i, j).clone() } else { Rational::zero() };
            let pt = if p.contains(i) { m.get(i, j).clone() } else { Rational::zero() };
            tp == pt
        })
    }))
}

/// Support criterion for commutation: `P` is a union of blocks of `T`.
pub fn commutes_by_support(t: &ConditionalExpectation, p: &BandProjection) -> Result<bool> {
    t.partition().contains_projection(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::DEFAULT_BLOCK_CAP;
    use crate::rational::rat;

    fn space4() -> Space {
        SampleSpace::uniform(4)
    }

    fn part(s: &Space, blocks: &[&[usize]]) -> Partition {
        Partition::new(s, blocks.iter().map(|b| b.iter().map(|a| a - 1).collect()).collect()).unwrap()
    }

    fn el(s: &Space, v: &[i64]) -> RieszElement {
        RieszElement::from_ints(s, v).unwrap()
    }

    #[test]
    fn apply_examples() {
        let s = space4();
        let t = ConditionalExpectation::new(part(&s, &[&[1, 2], &[3, 4]]));
        assert_eq!(t.apply(&el(&s, &[1, 3, 2, 6])).unwrap(), el(&s, &[2, 2, 4, 4]));
        let f = el(&s, &[7, 7, -1, -1]);
        assert_eq!(t.apply(&f).unwrap(), f);
        let e = ConditionalExpectation::trivial(&s);
        assert_eq!(e.apply(&el(&s, &[1, 2, 3, 4])).unwrap(), RieszElement::constant(&s, rat(5, 2)));
    }

    #[test]
    fn apply_agrees_with_matrix() {
        let s = SampleSpace::normalized(
            (0..5).map(|i| format!("a{i}")).collect(),
            vec![int(1), int(2), int(3), int(1), int(5)],
        )
        .unwrap();
        let t = ConditionalExpectation::new(Partition::new(&s, vec![vec![0, 3], vec![1, 2, 4]]).unwrap());
        let f = el(&s, &[3, -1, 4, 1, -5]);
        assert_eq!(t.apply(&f).unwrap().values(), t.matrix().apply(f.values()).as_slice());
        assert_eq!(t.matrix().mul(t.matrix()), *t.matrix());
    }

    #[test]
    fn axioms_of_block_averages_and_identity() {
        let s = space4();
        let t = ConditionalExpectation::new(part(&s, &[&[1, 2], &[3, 4]]));
        assert!(verify_axioms(t.matrix(), &s).holds());
        let r = verify_axioms(&Matrix::identity(4), &s);
        assert!(r.holds());
        assert!(r.strictly_positive);
    }

    #[test]
    fn axioms_detect_negative_entry() {
        let s = space4();
        let mut m = ConditionalExpectation::trivial(&s).matrix().clone();
        m.set(0, 1, rat(-1, 4));
        let r = verify_axioms(&m, &s);
        assert!(!r.holds());
        assert!(r.failures[0].starts_with("positivity"));
    }

    #[test]
    fn axioms_detect_non_lattice_range() {
        let s = SampleSpace::uniform(3);
        let m = Matrix::from_rows(vec![
            vec![int(1), int(0), int(0)],
            vec![int(0), int(1), int(0)],
            vec![rat(1, 2), rat(1, 2), int(0)],
        ]);
        let r = verify_axioms(&m, &s);
        assert!(r.positive && r.idempotent && r.unit_preserving);
        assert!(!r.riesz_range);
        assert!(!r.strictly_positive);
        assert!(!r.holds());
    }

    #[test]
    fn axioms_detect_unit_failure_and_non_idempotence() {
        let s = SampleSpace::uniform(2);
        let m = Matrix::from_rows(vec![vec![int(1), int(0)], vec![int(0), int(0)]]);
        let r = verify_axioms(&m, &s);
        assert!(r.idempotent && r.positive && !r.unit_preserving);
        let m2 = Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]);
        assert!(!verify_axioms(&m2, &s).idempotent);
        assert!(!verify_axioms(&Matrix::identity(3), &s).holds());
    }

    #[test]
    fn condexp_onto_examples() {
        let s = space4();
        let t = ConditionalExpectation::new(part(&s, &[&[1, 2], &[3, 4]]));
        assert_eq!(condexp_onto(&t, t.partition()).unwrap(), t);
        assert_eq!(*condexp_onto(&t, &Partition::discrete(&s)).unwrap().matrix(), Matrix::identity(4));
        let err = condexp_onto(&t, &part(&s, &[&[1, 3], &[2, 4]])).unwrap_err();
        assert_eq!(err.to_string(), "range does not contain R(T)");

        let triv = ConditionalExpectation::trivial(&s);
        let tf = condexp_onto(&triv, &part(&s, &[&[1, 2], &[3, 4]])).unwrap();
        let h = rat(1, 2);
        let z = Rational::zero();
        let expected = Matrix::from_rows(vec![
            vec![h.clone(), h.clone(), z.clone(), z.clone()],
            vec![h.clone(), h.clone(), z.clone(), z.clone()],
            vec![z.clone(), z.clone(), h.clone(), h.clone()],
            vec![z.clone(), z, h.clone(), h],
        ]);
        assert_eq!(*tf.matrix(), expected);
        assert_eq!(triv.matrix().mul(tf.matrix()), *triv.matrix());
        assert_eq!(tf.matrix().mul(triv.matrix()), *triv.matrix());
    }

    #[test]
    fn radon_nikodym_examples() {
        let s = space4();
        let t = ConditionalExpectation::trivial(&s);
        let tf = condexp_onto(&t, &part(&s, &[&[1, 2], &[3, 4]])).unwrap();
        let f = el(&s, &[1, 3, 2, 6]);
        assert!(verify_radon_nikodym(&t, &tf, &f, DEFAULT_BLOCK_CAP).unwrap());
        // P = ind{1,2}: both sides are the constant 1
        let p = BandProjection::from_atoms(&s, [0, 1]).unwrap();
        let lhs = t.apply(&p.apply(&f).unwrap()).unwrap();
        let rhs = t.apply(&p.apply(&tf.apply(&f).unwrap()).unwrap()).unwrap();
        assert_eq!(lhs, RieszElement::one(&s));
        assert_eq!(rhs, RieszElement::one(&s));
        let measurable = el(&s, &[4, 4, 1, 1]);
        assert!(verify_radon_nikodym(&t, &tf, &measurable, DEFAULT_BLOCK_CAP).unwrap());
    }

    #[test]
    fn radon_nikodym_rejects_perturbed_candidate() {
        let s = space4();
        let t = ConditionalExpectation::trivial(&s);
        let range = part(&s, &[&[1, 2], &[3, 4]]);
        let mut candidate = ConditionalExpectation::new(range.clone()).matrix().clone();
        candidate.set(2, 3, rat(1, 3));
        let violated = Partition::discrete(&s)
            .block_indicators()
            .iter()
            .any(|f| !verify_radon_nikodym_candidate(&t, &range, &candidate, f, DEFAULT_BLOCK_CAP).unwrap());
        assert!(violated);
    }

    #[test]
    fn radon_nikodym_system_has_unique_solution() {
        let s = SampleSpace::normalized(
            (0..4).map(|i| format!("a{i}")).collect(),
            vec![int(3), int(1), int(1), int(1)],
        )
        .unwrap();
        let t = ConditionalExpectation::trivial(&s);
        let range = Partition::new(&s, vec![vec![0, 1], vec![2, 3]]).unwrap();
        match radon_nikodym_solution(&t, &range, DEFAULT_BLOCK_CAP).unwrap() {
            Solution::Unique(x) => {
                assert_eq!(x, *ConditionalExpectation::new(range).matrix());
                assert_eq!(*x.get(0, 0), rat(3, 4));
                assert_eq!(*x.get(0, 1), rat(1, 4));
            }
            other => panic!("expected a unique solution, got {other:?}"),
        }
    }

    #[test]
    fn freudenthal_exact_examples() {
        let s = space4();
        let t = ConditionalExpectation::new(part(&s, &[&[1, 2], &[3, 4]]));
        let e = RieszElement::one(&s);
        let rep = freudenthal(&el(&s, &[2, 2, 5, 5]), &t, &e, FreudenthalMode::Exact).unwrap();
        assert_eq!(rep.coefficients, vec![int(2), int(5)]);
        assert_eq!(rep.projections[0].support_indices(), vec![0, 1]);
        assert_eq!(rep.projections[1].support_indices(), vec![2, 3]);
        assert_eq!(rep.evaluate(), el(&s, &[2, 2, 5, 5]));

        let zero = freudenthal(&RieszElement::zero(&s), &t, &e, FreudenthalMode::Exact).unwrap();
        assert!(zero.coefficients.is_empty() && zero.projections.is_empty());

        let unit = freudenthal(&e, &t, &e, FreudenthalMode::Exact).unwrap();
        assert_eq!(unit.coefficients, vec![int(1)]);
        assert!(unit.projections[0].is_identity());
    }

    #[test]
    fn freudenthal_rejects_bad_inputs() {
        let s = space4();
        let t = ConditionalExpectation::new(part(&s, &[&[1, 2], &[3, 4]]));
        let e = RieszElement::one(&s);
        assert!(freudenthal(&el(&s, &[1, 2, 3, 3]), &t, &e, FreudenthalMode::Exact).is_err());
        assert!(freudenthal(&el(&s, &[-1, -1, 3, 3]), &t, &e, FreudenthalMode::Exact).is_err());
        assert!(freudenthal(&el(&s, &[1, 1, 3, 3]), &t, &el(&s, &[1, 2, 1, 1]), FreudenthalMode::Exact).is_err());
    }

    #[test]
    fn freudenthal_staircase_is_monotone_and_converges() {
        let s = space4();
        let t = ConditionalExpectation::new(part(&s, &[&[1, 2], &[3, 4]]));
        let e = el(&s, &[2, 2, 1, 1]);
        let w = RieszElement::new(&s, vec![rat(2, 3), rat(2, 3), rat(7, 5), rat(7, 5)]).unwrap();
        let rep = freudenthal(&w, &t, &e, FreudenthalMode::Staircase { resolution: 8 }).unwrap();
        assert_eq!(rep.stages.len(), 8);
        let max = int(7) / int(5);
        for (n, stage) in rep.stages.iter().enumerate() {
            assert!(stage.le(&w).unwrap());
            if n > 0 {
                assert!(rep.stages[n - 1].le(stage).unwrap());
            }
            let bound = e.scale(&(&max / int(1 << (n + 1))));
            assert!(w.sub(stage).unwrap().le(&bound).unwrap());
        }
        assert_eq!(rep.evaluate(), rep.stages[7]);
        for q in &rep.projections {
            assert!(t.partition().contains_projection(q).unwrap());
        }
    }

    #[test]
    fn commutation_examples() {
        let s = space4();
        let t = ConditionalExpectation::new(part(&s, &[&[1, 2], &[3, 4]]));
        let block = BandProjection::from_atoms(&s, [0, 1]).unwrap();
        assert!(commutes(&t, &block).unwrap());
        assert!(commutes(&t, &BandProjection::identity(&s)).unwrap());
        assert!(commutes(&t, &BandProjection::zero(&s)).unwrap());
        let triv = ConditionalExpectation::trivial(&s);
        let proper = BandProjection::from_atoms(&s, [0, 2]).unwrap();
        assert!(!commutes(&triv, &proper).unwrap());
        assert!(!commutes_by_support(&triv, &proper).unwrap());
    }

    #[test]
    fn commutation_matches_support_criterion_exhaustively() {
        let s = SampleSpace::normalized(
            (0..5).map(|i| format!("a{i}")).collect(),
            vec![int(1), int(2), int(1), int(4), int(3)],
        )
        .unwrap();
        let t = ConditionalExpectation::new(Partition::new(&s, vec![vec![0, 2], vec![1], vec![3, 4]]).unwrap());
        let all = Partition::discrete(&s).enumerate_band_projections(16).unwrap();
        let mut commuting: Vec<Vec<usize>> = all
            .into_iter()
            .filter(|p| commutes(&t, p).unwrap())
            .map(|p| p.support_indices())
            .collect();
        let mut unions: Vec<Vec<usize>> = t
            .partition()
            .enumerate_band_projections(16)
            .unwrap()
            .iter()
            .map(|p| p.support_indices())
            .collect();
        commuting.sort();
        unions.sort();
        assert_eq!(commuting, unions);
    }
}
