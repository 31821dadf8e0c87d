//! Conditional independence of band projections, subspaces and families.
//!
//! Band projections `P`, `Q` are independent with respect to `T` and a
//! `T`-invariant weak order unit `e` when `TPTQe = TPQe = TQTPe`. Subspaces
//! (partitions refining the one of `T`) are independent when every pair of
//! band projections whose action on `e` lands in them is.

use crate::condexp::{condexp_onto, ConditionalExpectation};
use crate::error::{Result, RieszError};
use crate::limits::Limits;
use crate::matrix::Matrix;
use crate::partition::Partition;
use crate::riesz::{ensure_same, BandProjection, RieszElement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndependenceWitness {
    /// `TPTQw`, `TPQw`, `TQTPw` are not all equal.
    Bands {
        p: BandProjection,
        q: BandProjection,
        w: RieszElement,
        tptq: RieszElement,
        tpq: RieszElement,
        tqtp: RieszElement,
    },
    /// An operator identity failed.
    Operator { identity: String, lhs: Matrix, rhs: Matrix },
    /// An identity failed on a particular element.
    Element {
        identity: String,
        f: RieszElement,
        lhs: RieszElement,
        rhs: RieszElement,
    },
}

impl IndependenceWitness {
    /// Recomputes a band witness under the conditioning operator `t` (for operator and element
    /// witnesses, compares the stored sides) and reports whether the inequality is still there.
    pub fn reproduces(&self, t: &ConditionalExpectation) -> bool {
        match self {
            IndependenceWitness::Bands { p, q, w, .. } => {
                let [a, b, c] = triple(t, p, q, w);
                !(a == b && b == c)
            }
            IndependenceWitness::Operator { lhs, rhs, .. } => lhs != rhs,
            IndependenceWitness::Element { lhs, rhs, .. } => lhs != rhs,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            IndependenceWitness::Bands { p, q, w, tptq, tpq, tqtp } => format!(
                "P={} Q={} w={w}: TPTQw={tptq} TPQw={tpq} TQTPw={tqtp}",
                p.describe(),
                q.describe()
            ),
            IndependenceWitness::Operator { identity, lhs, rhs } => format!("{identity}: lhs={lhs} rhs={rhs}"),
            IndependenceWitness::Element { identity, f, lhs, rhs } => {
                format!("{identity} at f={f}: lhs={lhs} rhs={rhs}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceVerdict {
    pub holds: bool,
    pub witness: Option<IndependenceWitness>,
}

impl IndependenceVerdict {
    pub fn pass() -> Self {
        IndependenceVerdict {
            holds: true,
            witness: None,
        }
    }

    pub fn fail(witness: IndependenceWitness) -> Self {
        IndependenceVerdict {
            holds: false,
            witness: Some(witness),
        }
    }
}

/// `[TPTQw, TPQw, TQTPw]`.
fn triple(t: &ConditionalExpectation, p: &BandProjection, q: &BandProjection, w: &RieszElement) -> [RieszElement; 3] {
    let tqw = t.apply_unchecked(&q.apply_unchecked(w));
    let tpw = t.apply_unchecked(&p.apply_unchecked(w));
    let pq = p.compose(q).expect("same space");
    [
        t.apply_unchecked(&p.apply_unchecked(&tqw)),
        t.apply_unchecked(&pq.apply_unchecked(w)),
        t.apply_unchecked(&q.apply_unchecked(&tpw)),
    ]
}

fn check_triple(t: &ConditionalExpectation, p: &BandProjection, q: &BandProjection, w: &RieszElement) -> Option<IndependenceWitness> {
    let [tptq, tpq, tqtp] = triple(t, p, q, w);
    if tptq == tpq && tpq == tqtp {
        None
    } else {
        Some(IndependenceWitness::Bands {
            p: p.clone(),
            q: q.clone(),
            w: w.clone(),
            tptq,
            tpq,
            tqtp,
        })
    }
}

/// `TPTQe = TPQe = TQTPe`.
pub fn bands_independent(
    t: &ConditionalExpectation,
    p: &BandProjection,
    q: &BandProjection,
    e: &RieszElement,
) -> Result<IndependenceVerdict> {
    ensure_same(t.space(), p.space())?;
    ensure_same(t.space(), q.space())?;
    t.ensure_invariant_unit(e)?;
    Ok(match check_triple(t, p, q, e) {
        None => IndependenceVerdict::pass(),
        Some(w) => IndependenceVerdict::fail(w),
    })
}

/// The same identities with `e` replaced by each block indicator of `R(T)`, which by linearity
/// covers every `w` in the range.
pub fn bands_independent_for_range(
    t: &ConditionalExpectation,
    p: &BandProjection,
    q: &BandProjection,
) -> Result<IndependenceVerdict> {
    ensure_same(t.space(), p.space())?;
    ensure_same(t.space(), q.space())?;
    for w in t.partition().block_indicators() {
        if let Some(witness) = check_triple(t, p, q, &w) {
            return Ok(IndependenceVerdict::fail(witness));
        }
    }
    Ok(IndependenceVerdict::pass())
}

/// Independence of `P`, `Q` decided through the generated subspaces `⟨Pe, R(T)⟩`, `⟨Qe, R(T)⟩`.
pub fn bands_independent_via_subspaces(
    t: &ConditionalExpectation,
    p: &BandProjection,
    q: &BandProjection,
    e: &RieszElement,
    limits: &Limits,
) -> Result<IndependenceVerdict> {
    t.ensure_invariant_unit(e)?;
    let pe = p.apply(e)?;
    let qe = q.apply(e)?;
    let e1 = t.partition().generated(&[&pe])?;
    let e2 = t.partition().generated(&[&qe])?;
    subspaces_independent(t, &e1, &e2, e, limits)
}

fn ensure_refines(sub: &Partition, t: &ConditionalExpectation) -> Result<()> {
    if sub.refines(t.partition())? {
        Ok(())
    } else {
        Err(RieszError::domain("subspace does not contain R(T)"))
    }
}

/// Exhaustive pairwise test over band projections with `Pe ∈ E1`, `Qe ∈ E2`, in lexicographic
/// order of the pair; the first failing pair is returned as witness.
pub fn subspaces_independent(
    t: &ConditionalExpectation,
    e1: &Partition,
    e2: &Partition,
    e: &RieszElement,
    limits: &Limits,
) -> Result<IndependenceVerdict> {
    relative_independence(t, e1, e2, e, limits)
}

/// `SP₁SP₂e = SP₁P₂e = SP₂SP₁e` for all `P_i` with `P_i e ∈ E_i`.
fn relative_independence(
    s: &ConditionalExpectation,
    e1: &Partition,
    e2: &Partition,
    e: &RieszElement,
    limits: &Limits,
) -> Result<IndependenceVerdict> {
    ensure_refines(e1, s)?;
    ensure_refines(e2, s)?;
    s.ensure_invariant_unit(e)?;
    let ps = e1.enumerate_band_projections(limits.independence_blocks)?;
    let qs = e2.enumerate_band_projections(limits.independence_blocks)?;
    let tpe: Vec<RieszElement> = ps.iter().map(|p| s.apply_unchecked(&p.apply_unchecked(e))).collect();
    let tqe: Vec<RieszElement> = qs.iter().map(|q| s.apply_unchecked(&q.apply_unchecked(e))).collect();
    for (p, tp) in ps.iter().zip(&tpe) {
        for (q, tq) in qs.iter().zip(&tqe) {
            let tptq = s.apply_unchecked(&p.apply_unchecked(tq));
            let pq = p.compose(q)?;
            let tpq = s.apply_unchecked(&pq.apply_unchecked(e));
            if tptq != tpq {
                let tqtp = s.apply_unchecked(&q.apply_unchecked(tp));
                return Ok(IndependenceVerdict::fail(IndependenceWitness::Bands {
                    p: p.clone(),
                    q: q.clone(),
                    w: e.clone(),
                    tptq,
                    tpq,
                    tqtp,
                }));
            }
            let tqtp = s.apply_unchecked(&q.apply_unchecked(tp));
            if tqtp != tpq {
                return Ok(IndependenceVerdict::fail(IndependenceWitness::Bands {
                    p: p.clone(),
                    q: q.clone(),
                    w: e.clone(),
                    tptq,
                    tpq,
                    tqtp,
                }));
            }
        }
    }
    Ok(IndependenceVerdict::pass())
}

fn operator_check(identity: &str, lhs: Matrix, rhs: &Matrix) -> Option<IndependenceWitness> {
    (lhs != *rhs).then(|| IndependenceWitness::Operator {
        identity: identity.to_string(),
        lhs,
        rhs: rhs.clone(),
    })
}

/// `T₁T₂ = T = T₂T₁` with `T_i` the conditional expectation onto `E_i` commuting with `T`.
pub fn independent_via_condexp(t: &ConditionalExpectation, e1: &Partition, e2: &Partition) -> Result<IndependenceVerdict> {
    ensure_refines(e1, t)?;
    ensure_refines(e2, t)?;
    let t1 = condexp_onto(t, e1)?;
    let t2 = condexp_onto(t, e2)?;
    let target = t.matrix();
    if let Some(w) = operator_check("T1T2 = T", t1.then_after(&t2), target) {
        return Ok(IndependenceVerdict::fail(w));
    }
    if let Some(w) = operator_check("T2T1 = T", t2.then_after(&t1), target) {
        return Ok(IndependenceVerdict::fail(w));
    }
    Ok(IndependenceVerdict::pass())
}

/// `T_i f = T f` for every `f` in a spanning set of `E_{3−i}`, `i = 1, 2`.
pub fn independent_on_spanning_sets(t: &ConditionalExpectation, e1: &Partition, e2: &Partition) -> Result<IndependenceVerdict> {
    ensure_refines(e1, t)?;
    ensure_refines(e2, t)?;
    let t1 = condexp_onto(t, e1)?;
    let t2 = condexp_onto(t, e2)?;
    for (ti, other, name) in [(&t1, e2, "T1 f = T f"), (&t2, e1, "T2 f = T f")] {
        for f in other.block_indicators() {
            let lhs = ti.apply_unchecked(&f);
            let rhs = t.apply_unchecked(&f);
            if lhs != rhs {
                return Ok(IndependenceVerdict::fail(IndependenceWitness::Element {
                    identity: name.to_string(),
                    f,
                    lhs,
                    rhs,
                }));
            }
        }
    }
    Ok(IndependenceVerdict::pass())
}

/// Independence with respect to a finer conditional expectation `S` (`ST = T`):
/// `T_i T_⟨R(S),E_{3−i}⟩ = T_i S T_⟨R(S),E_{3−i}⟩` for `i = 1, 2`.
pub fn independent_wrt_s(
    t: &ConditionalExpectation,
    s: &ConditionalExpectation,
    e1: &Partition,
    e2: &Partition,
) -> Result<IndependenceVerdict> {
    ensure_same(t.space(), s.space())?;
    if s.then_after(t) != *t.matrix() {
        return Err(RieszError::domain("S does not dominate T"));
    }
    ensure_refines(e1, t)?;
    ensure_refines(e2, t)?;
    let t1 = condexp_onto(t, e1)?;
    let t2 = condexp_onto(t, e2)?;
    for (ti, other, name) in [(&t1, e2, "T1 T<S,E2> = T1 S T<S,E2>"), (&t2, e1, "T2 T<S,E1> = T2 S T<S,E1>")] {
        let generated = condexp_onto(t, &s.partition().join(other)?)?;
        let lhs = ti.then_after(&generated);
        let rhs = ti.compose_matrix(&s.then_after(&generated));
        if let Some(w) = operator_check(name, lhs, &rhs) {
            return Ok(IndependenceVerdict::fail(w));
        }
    }
    Ok(IndependenceVerdict::pass())
}

/// Band-level form of independence with respect to `S`: `SP₁SP₂e = SP₁P₂e = SP₂SP₁e`.
pub fn independent_wrt_s_bands(
    t: &ConditionalExpectation,
    s: &ConditionalExpectation,
    e1: &Partition,
    e2: &Partition,
    e: &RieszElement,
    limits: &Limits,
) -> Result<IndependenceVerdict> {
    ensure_same(t.space(), s.space())?;
    if s.then_after(t) != *t.matrix() {
        return Err(RieszError::domain("S does not dominate T"));
    }
    ensure_refines(e1, t)?;
    ensure_refines(e2, t)?;
    t.ensure_invariant_unit(e)?;
    let ps = e1.enumerate_band_projections(limits.independence_blocks)?;
    let qs = e2.enumerate_band_projections(limits.independence_blocks)?;
    for p in &ps {
        for q in &qs {
            if let Some(w) = check_triple(s, p, q, e) {
                return Ok(IndependenceVerdict::fail(w));
            }
        }
    }
    Ok(IndependenceVerdict::pass())
}

/// All band projections of the space that are independent of themselves. Only unions of
/// blocks of `T` survive.
pub fn self_independent_projections(
    t: &ConditionalExpectation,
    e: &RieszElement,
    limits: &Limits,
) -> Result<Vec<BandProjection>> {
    t.ensure_invariant_unit(e)?;
    let all = Partition::discrete(t.space()).enumerate_band_projections(limits.max_atoms_exhaustive)?;
    Ok(all
        .into_iter()
        .filter(|p| check_triple(t, p, p, e).is_none())
        .collect())
}

/// Every unordered pair of disjoint nonempty index sets with at most `max_size` members each,
/// as bitmasks in increasing order.
pub fn disjoint_index_pairs(count: usize, max_size: usize) -> Vec<(u32, u32)> {
    let mut pairs = Vec::new();
    let full = 1u32 << count;
    for a in 1..full {
        if a.count_ones() as usize > max_size {
            continue;
        }
        for b in (a + 1)..full {
            if a & b == 0 && b.count_ones() as usize <= max_size {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

fn joined(t: &ConditionalExpectation, parts: &[Partition], mask: u32) -> Result<Partition> {
    let mut acc = t.partition().clone();
    for (i, p) in parts.iter().enumerate() {
        if mask >> i & 1 == 1 {
            acc = acc.join(p)?;
        }
    }
    Ok(acc)
}

/// Family independence: `E_{Λ₁}` and `E_{Λ₂}` independent for every pair of disjoint index sets
/// of size at most `max_pair_size`.
pub fn family_independent(
    t: &ConditionalExpectation,
    parts: &[Partition],
    e: &RieszElement,
    max_pair_size: usize,
    limits: &Limits,
) -> Result<IndependenceVerdict> {
    family_with(t, parts, e, max_pair_size, limits, |left, right| {
        subspaces_independent(t, left, right, e, limits)
    })
}

/// [`family_independent`] decided on block indicators only; see [`subspaces_independent_on_blocks`].
pub fn family_independent_on_blocks(
    t: &ConditionalExpectation,
    parts: &[Partition],
    e: &RieszElement,
    max_pair_size: usize,
    limits: &Limits,
) -> Result<IndependenceVerdict> {
    family_with(t, parts, e, max_pair_size, limits, |left, right| {
        subspaces_independent_on_blocks(t, left, right, e)
    })
}

fn family_with(
    t: &ConditionalExpectation,
    parts: &[Partition],
    e: &RieszElement,
    max_pair_size: usize,
    limits: &Limits,
    pair: impl Fn(&Partition, &Partition) -> Result<IndependenceVerdict>,
) -> Result<IndependenceVerdict> {
    if parts.len() > limits.max_family {
        return Err(RieszError::CapExceeded {
            what: "family members",
            cap: limits.max_family,
            actual: parts.len(),
        });
    }
    if max_pair_size > limits.max_family {
        return Err(RieszError::CapExceeded {
            what: "family pair size",
            cap: limits.max_family,
            actual: max_pair_size,
        });
    }
    for p in parts {
        ensure_refines(p, t)?;
    }
    t.ensure_invariant_unit(e)?;
    for (a, b) in disjoint_index_pairs(parts.len(), max_pair_size) {
        let verdict = pair(&joined(t, parts, a)?, &joined(t, parts, b)?)?;
        if !verdict.holds {
            return Ok(verdict);
        }
    }
    Ok(IndependenceVerdict::pass())
}

/// The pairwise test restricted to single-block projections. All three sides of the identity
/// are bilinear in the indicators of `P` and `Q`, so this agrees with the exhaustive test while
/// costing one check per pair of blocks.
pub fn subspaces_independent_on_blocks(
    t: &ConditionalExpectation,
    e1: &Partition,
    e2: &Partition,
    e: &RieszElement,
) -> Result<IndependenceVerdict> {
    ensure_refines(e1, t)?;
    ensure_refines(e2, t)?;
    t.ensure_invariant_unit(e)?;
    for a in 0..e1.num_blocks() {
        let p = e1.block_projection(a);
        for b in 0..e2.num_blocks() {
            let q = e2.block_projection(b);
            if let Some(w) = check_triple(t, &p, &q, e) {
                return Ok(IndependenceVerdict::fail(w));
            }
        }
    }
    Ok(IndependenceVerdict::pass())
}

/// Sequence independence: the family `⟨R(T), f_n⟩`.
pub fn sequence_independent(
    t: &ConditionalExpectation,
    fs: &[RieszElement],
    e: &RieszElement,
    max_pair_size: usize,
    limits: &Limits,
) -> Result<IndependenceVerdict> {
    let parts = fs
        .iter()
        .map(|f| t.partition().generated(&[f]))
        .collect::<Result<Vec<_>>>()?;
    family_independent(t, &parts, e, max_pair_size, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::riesz::{SampleSpace, Space};

    fn space4() -> Space {
        SampleSpace::uniform(4)
    }

    fn part(s: &Space, blocks: &[&[usize]]) -> Partition {
        Partition::new(s, blocks.iter().map(|b| b.iter().map(|a| a - 1).collect()).collect()).unwrap()
    }

    fn proj(s: &Space, atoms: &[usize]) -> BandProjection {
        BandProjection::from_atoms(s, atoms.iter().map(|a| a - 1)).unwrap()
    }

    #[test]
    fn two_coin_bands() {
        let s = space4();
        let t = ConditionalExpectation::trivial(&s);
        let e = RieszElement::one(&s);
        let v = bands_independent(&t, &proj(&s, &[1, 2]), &proj(&s, &[1, 3]), &e).unwrap();
        assert!(v.holds);
        let quarter = RieszElement::constant(&s, rat(1, 4));
        let [a, b, c] = triple(&t, &proj(&s, &[1, 2]), &proj(&s, &[1, 3]), &e);
        assert_eq!((a, b, c), (quarter.clone(), quarter.clone(), quarter));
    }

    #[test]
    fn identity_is_independent_of_everything() {
        let s = space4();
        let t = ConditionalExpectation::trivial(&s);
        let e = RieszElement::one(&s);
        for p in Partition::discrete(&s).enumerate_band_projections(16).unwrap() {
            assert!(bands_independent(&t, &p, &BandProjection::identity(&s), &e).unwrap().holds);
        }
    }

    #[test]
    fn repeated_projection_fails_with_witness() {
        let s = space4();
        let t = ConditionalExpectation::trivial(&s);
        let e = RieszElement::one(&s);
        let p = proj(&s, &[1, 2]);
        let v = bands_independent(&t, &p, &p, &e).unwrap();
        assert!(!v.holds);
        match v.witness.as_ref().unwrap() {
            IndependenceWitness::Bands { tptq, tpq, .. } => {
                assert_eq!(*tpq, RieszElement::constant(&s, rat(1, 2)));
                assert_eq!(*tptq, RieszElement::constant(&s, rat(1, 4)));
            }
            other => panic!("unexpected witness {other:?}"),
        }
        assert!(v.witness.unwrap().reproduces(&t));
    }

    #[test]
    fn non_invariant_unit_is_rejected() {
        let s = space4();
        let t = ConditionalExpectation::trivial(&s);
        let e = RieszElement::from_ints(&s, &[1, 2, 1, 1]).unwrap();
        let err = bands_independent(&t, &proj(&s, &[1]), &proj(&s, &[2]), &e).unwrap_err();
        assert_eq!(err.to_string(), "unit not T-invariant");
    }

    #[test]
    fn range_form_examples() {
        let s = space4();
        let t = ConditionalExpectation::trivial(&s);
        assert!(bands_independent_for_range(&t, &proj(&s, &[1, 2]), &proj(&s, &[1, 3])).unwrap().holds);
        let tb = ConditionalExpectation::new(part(&s, &[&[1, 2], &[3, 4]]));
        let v = bands_independent_for_range(&tb, &proj(&s, &[1]), &proj(&s, &[1])).unwrap();
        assert!(!v.holds);
        let e = RieszElement::one(&s);
        assert!(!bands_independent(&tb, &proj(&s, &[1]), &proj(&s, &[1]), &e).unwrap().holds);
        // P a union of T-blocks: the range form agrees with the unit form
        let p = proj(&s, &[1, 2]);
        for q in Partition::discrete(&s).enumerate_band_projections(16).unwrap() {
            assert_eq!(
                bands_independent_for_range(&tb, &p, &q).unwrap().holds,
                bands_independent(&tb, &p, &q, &e).unwrap().holds
            );
        }
    }

    #[test]
    fn two_coin_subspaces() {
        let s = space4();
        let t = ConditionalExpectation::trivial(&s);
        let e = RieszElement::one(&s);
        let coin1 = part(&s, &[&[1, 2], &[3, 4]]);
        let coin2 = part(&s, &[&[1, 3], &[2, 4]]);
        let lim = Limits::default();
        assert!(subspaces_independent(&t, &coin1, &coin2, &e, &lim).unwrap().holds);
        assert!(subspaces_independent(&t, &coin1, t.partition(), &e, &lim).unwrap().holds);
        assert!(!subspaces_independent(&t, &coin1, &coin1, &e, &lim).unwrap().holds);
        assert!(independent_via_condexp(&t, &coin1, &coin2).unwrap().holds);
        assert!(independent_on_spanning_sets(&t, &coin1, &coin2).unwrap().holds);
        let v = independent_via_condexp(&t, &coin1, &coin1).unwrap();
        assert!(!v.holds);
        assert!(!independent_on_spanning_sets(&t, &coin1, &coin1).unwrap().holds);
        assert!(independent_via_condexp(&t, t.partition(), t.partition()).unwrap().holds);
    }

    #[test]
    fn refinement_precondition() {
        let s = space4();
        let t = ConditionalExpectation::new(part(&s, &[&[1, 2], &[3, 4]]));
        let e = RieszElement::one(&s);
        let crossing = part(&s, &[&[1, 3], &[2, 4]]);
        assert!(subspaces_independent(&t, &crossing, t.partition(), &e, &Limits::default()).is_err());
        assert!(independent_via_condexp(&t, &crossing, t.partition()).is_err());
    }

    #[test]
    fn cor33_route_agrees_with_direct_band_check() {
        let s = SampleSpace::normalized(
            (0..6).map(|i| format!("a{i}")).collect(),
            vec![int(1), int(2), int(3), int(1), int(2), int(3)],
        )
        .unwrap();
        let t = ConditionalExpectation::new(Partition::new(&s, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap());
        let e = RieszElement::new(&s, vec![int(2), int(2), int(2), rat(1, 2), rat(1, 2), rat(1, 2)]).unwrap();
        let all = Partition::discrete(&s).enumerate_band_projections(16).unwrap();
        for p in all.iter().step_by(5) {
            for q in all.iter().step_by(3) {
                let direct = bands_independent(&t, p, q, &e).unwrap().holds;
                let via = bands_independent_via_subspaces(&t, p, q, &e, &Limits::default()).unwrap().holds;
                assert_eq!(direct, via, "P={p:?} Q={q:?}");
            }
        }
    }

    #[test]
    fn wrt_s_examples() {
        let s = space4();
        let t = ConditionalExpectation::trivial(&s);
        let e = RieszElement::one(&s);
        let coin1 = part(&s, &[&[1, 2], &[3, 4]]);
        let coin2 = part(&s, &[&[1, 3], &[2, 4]]);
        let lim = Limits::default();
        for (a, b) in [(&coin1, &coin2), (&coin1, &coin1)] {
            assert_eq!(
                independent_wrt_s(&t, &t, a, b).unwrap().holds,
                independent_via_condexp(&t, a, b).unwrap().holds
            );
        }
        let id = ConditionalExpectation::identity(&s);
        assert!(independent_wrt_s(&t, &id, &coin1, &coin1).unwrap().holds);
        let given = ConditionalExpectation::new(coin1.clone());
        assert!(independent_wrt_s(&t, &given, &coin1, &coin2).unwrap().holds);
        assert!(independent_wrt_s_bands(&t, &given, &coin1, &coin2, &e, &lim).unwrap().holds);
        // S coarser than T does not dominate it
        let tb = ConditionalExpectation::new(coin1.clone());
        let err = independent_wrt_s(&tb, &t, &coin1, &coin1).unwrap_err();
        assert_eq!(err.to_string(), "S does not dominate T");
    }

    #[test]
    fn self_independence_examples() {
        let s = space4();
        let e = RieszElement::one(&s);
        let lim = Limits::default();
        let t = ConditionalExpectation::trivial(&s);
        let ps = self_independent_projections(&t, &e, &lim).unwrap();
        assert_eq!(ps.len(), 2);
        assert!(ps[0].is_zero() && ps[1].is_identity());
        let tb = ConditionalExpectation::new(part(&s, &[&[1, 2], &[3, 4]]));
        assert_eq!(self_independent_projections(&tb, &e, &lim).unwrap().len(), 4);
        let id = ConditionalExpectation::identity(&s);
        assert_eq!(self_independent_projections(&id, &e, &lim).unwrap().len(), 16);
    }

    #[test]
    fn family_examples() {
        // three fair coins: atom index bits are the coins
        let s = SampleSpace::uniform(8);
        let t = ConditionalExpectation::trivial(&s);
        let e = RieszElement::one(&s);
        let coin = |k: usize| Partition::from_labels(&s, &(0..8).map(|a| a >> k & 1).collect::<Vec<_>>());
        let parts = vec![coin(0), coin(1), coin(2)];
        let lim = Limits::default();
        assert!(family_independent(&t, &parts, &e, 2, &lim).unwrap().holds);
        let repeated = vec![coin(0), coin(1), coin(0)];
        assert!(!family_independent(&t, &repeated, &e, 2, &lim).unwrap().holds);
        let trivial = vec![t.partition().clone(); 3];
        assert!(family_independent(&t, &trivial, &e, 2, &lim).unwrap().holds);
        let too_many = vec![coin(0); 5];
        assert!(family_independent(&t, &too_many, &e, 2, &lim).unwrap_err().is_resource());
    }

    #[test]
    fn sequence_form_uses_generated_partitions() {
        let s = SampleSpace::uniform(4);
        let t = ConditionalExpectation::trivial(&s);
        let e = RieszElement::one(&s);
        let f1 = RieszElement::from_ints(&s, &[1, 1, -1, -1]).unwrap();
        let f2 = RieszElement::from_ints(&s, &[1, -1, 1, -1]).unwrap();
        let lim = Limits::default();
        assert!(sequence_independent(&t, &[f1.clone(), f2], &e, 2, &lim).unwrap().holds);
        assert!(!sequence_independent(&t, &[f1.clone(), f1], &e, 2, &lim).unwrap().holds);
    }

    #[test]
    fn index_pairs() {
        assert_eq!(disjoint_index_pairs(2, 2), vec![(1, 2)]);
        // three members, sizes up to two: 3 singleton pairs + 3 singleton/pair combinations
        assert_eq!(disjoint_index_pairs(3, 2).len(), 6);
        assert_eq!(disjoint_index_pairs(3, 1).len(), 3);
    }
}
