//! Finite Riesz spaces: rational-valued functions on a weighted atom set.
//!
//! Order, lattice operations and band projections are pointwise. A band
//! projection is multiplication by the indicator of an atom subset; the band
//! generated by `f >= 0` is the set of elements supported inside `{f > 0}`.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Result, RieszError};
use crate::rational::{ceil_to_usize, format_vector, int, Rational};

/// Finite atom set with strictly positive probability weights summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSpace {
    atoms: Vec<String>,
    weights: Vec<Rational>,
}

pub type Space = Arc<SampleSpace>;

impl SampleSpace {
    /// Validates and wraps a weighted atom list. The weights must already sum to one.
    pub fn new(atoms: Vec<String>, weights: Vec<Rational>) -> Result<Space> {
        Self::validate_shape(&atoms, &weights)?;
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(RieszError::InvalidSpace(format!("weights sum to {total}, expected 1")));
        }
        Ok(Arc::new(SampleSpace { atoms, weights }))
    }

    /// Like [`SampleSpace::new`] but rescales positive weights to sum to one.
    pub fn normalized(atoms: Vec<String>, weights: Vec<Rational>) -> Result<Space> {
        Self::validate_shape(&atoms, &weights)?;
        let total: Rational = weights.iter().sum();
        let weights = weights.into_iter().map(|w| w / &total).collect();
        Ok(Arc::new(SampleSpace { atoms, weights }))
    }

    /// `n` equally likely atoms labelled `"1"`, ..., `"n"`.
    pub fn uniform(n: usize) -> Space {
        assert!(n > 0, "a sample space needs at least one atom");
        let atoms = (1..=n).map(|i| i.to_string()).collect();
        let w = Rational::new(1.into(), (n as i64).into());
        Arc::new(SampleSpace {
            atoms,
            weights: vec![w; n],
        })
    }

    fn validate_shape(atoms: &[String], weights: &[Rational]) -> Result<()> {
        if atoms.is_empty() {
            return Err(RieszError::InvalidSpace("no atoms".into()));
        }
        if atoms.len() != weights.len() {
            return Err(RieszError::InvalidSpace(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        let mut seen = HashSet::new();
        for a in atoms {
            if !seen.insert(a.as_str()) {
                return Err(RieszError::InvalidSpace(format!("duplicate atom {a:?}")));
            }
        }
        if let Some((a, w)) = atoms.iter().zip(weights).find(|(_, w)| !w.is_positive()) {
            return Err(RieszError::InvalidSpace(format!("atom {a:?} has non-positive weight {w}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> &Rational {
        &self.weights[atom]
    }

    pub fn index_of(&self, atom: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == atom)
    }

    /// Same space either by identity or by structure.
    pub fn same(a: &Space, b: &Space) -> bool {
        Arc::ptr_eq(a, b) || a == b
    }
}

pub(crate) fn ensure_same(a: &Space, b: &Space) -> Result<()> {
    if SampleSpace::same(a, b) {
        Ok(())
    } else {
        Err(RieszError::SpaceMismatch)
    }
}

/// An element of the Riesz space of functions on a [`SampleSpace`].
#[derive(Clone)]
pub struct RieszElement {
    space: Space,
    values: Vec<Rational>,
}

impl RieszElement {
    pub fn new(space: &Space, values: Vec<Rational>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(RieszError::domain(format!(
                "element has {} values but the space has {} atoms",
                values.len(),
                space.len()
            )));
        }
        Ok(RieszElement {
            space: Arc::clone(space),
            values,
        })
    }

    pub(crate) fn from_parts(space: &Space, values: Vec<Rational>) -> Self {
        debug_assert_eq!(values.len(), space.len());
        RieszElement {
            space: Arc::clone(space),
            values,
        }
    }

    pub fn from_ints(space: &Space, values: &[i64]) -> Result<Self> {
        Self::new(space, values.iter().map(|&v| int(v)).collect())
    }

    pub fn constant(space: &Space, c: Rational) -> Self {
        Self::from_parts(space, vec![c; space.len()])
    }

    pub fn zero(space: &Space) -> Self {
        Self::constant(space, Rational::zero())
    }

    pub fn one(space: &Space) -> Self {
        Self::constant(space, Rational::one())
    }

    pub fn indicator(space: &Space, support: &[bool]) -> Self {
        let values = support
            .iter()
            .map(|&s| if s { Rational::one() } else { Rational::zero() })
            .collect();
        Self::from_parts(space, values)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    pub fn value(&self, atom: usize) -> &Rational {
        &self.values[atom]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<Self> {
        ensure_same(&self.space, &other.space)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect();
        Ok(Self::from_parts(&self.space, values))
    }

    fn map(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        Self::from_parts(&self.space, self.values.iter().map(f).collect())
    }

    pub fn sup(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| if a >= b { a.clone() } else { b.clone() })
    }

    pub fn inf(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| if a <= b { a.clone() } else { b.clone() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|v| v * c)
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v)
    }

    /// `|f| = f ∨ (−f)`.
    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    pub fn positive_part(&self) -> Self {
        self.map(|v| if v.is_positive() { v.clone() } else { Rational::zero() })
    }

    pub fn negative_part(&self) -> Self {
        self.map(|v| if v.is_negative() { -v } else { Rational::zero() })
    }

    /// Pointwise product, the f-algebra multiplication with unit `1`.
    pub fn mul_pointwise(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn is_positive(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn le(&self, other: &Self) -> Result<bool> {
        ensure_same(&self.space, &other.space)?;
        Ok(self.values.iter().zip(&other.values).all(|(a, b)| a <= b))
    }

    pub fn max_value(&self) -> Rational {
        self.values.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    /// A positive element is a weak order unit iff every coordinate is strictly positive.
    pub fn is_weak_order_unit(&self) -> Result<bool> {
        if !self.is_positive() {
            return Err(RieszError::domain("weak order unit test needs a positive element"));
        }
        Ok(self.values.iter().all(Signed::is_positive))
    }

    pub(crate) fn ensure_weak_order_unit(&self) -> Result<()> {
        if self.is_positive() && self.values.iter().all(Signed::is_positive) {
            Ok(())
        } else {
            Err(RieszError::domain("element is not a weak order unit"))
        }
    }
}

/// Product `f·g` in the f-algebra whose unit is the weak order unit `e`, i.e. pointwise `f·g/e`.
pub fn e_mul(f: &RieszElement, g: &RieszElement, e: &RieszElement) -> Result<RieszElement> {
    ensure_same(f.space(), g.space())?;
    ensure_same(f.space(), e.space())?;
    e.ensure_weak_order_unit()?;
    let values = f
        .values
        .iter()
        .zip(&g.values)
        .zip(&e.values)
        .map(|((a, b), u)| a * b / u)
        .collect();
    Ok(RieszElement::from_parts(f.space(), values))
}

impl PartialEq for RieszElement {
    fn eq(&self, other: &Self) -> bool {
        SampleSpace::same(&self.space, &other.space) && self.values == other.values
    }
}

impl Eq for RieszElement {}

impl fmt::Debug for RieszElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_vector(&self.values))
    }
}

impl fmt::Display for RieszElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_vector(&self.values))
    }
}

/// Band projection acting as multiplication by the indicator of `support`.
#[derive(Clone)]
pub struct BandProjection {
    space: Space,
    support: Vec<bool>,
}

impl BandProjection {
    pub fn new(space: &Space, support: Vec<bool>) -> Result<Self> {
        if support.len() != space.len() {
            return Err(RieszError::domain(format!(
                "support mask has {} entries but the space has {} atoms",
                support.len(),
                space.len()
            )));
        }
        Ok(BandProjection {
            space: Arc::clone(space),
            support,
        })
    }

    pub fn from_atoms(space: &Space, atoms: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut support = vec![false; space.len()];
        for a in atoms {
            if a >= space.len() {
                return Err(RieszError::domain(format!("atom index {a} out of range")));
            }
            support[a] = true;
        }
        Self::new(space, support)
    }

    pub fn identity(space: &Space) -> Self {
        BandProjection {
            space: Arc::clone(space),
            support: vec![true; space.len()],
        }
    }

    pub fn zero(space: &Space) -> Self {
        BandProjection {
            space: Arc::clone(space),
            support: vec![false; space.len()],
        }
    }

    /// `P_f`: the projection onto the band generated by `f >= 0`.
    pub fn of(f: &RieszElement) -> Result<Self> {
        if !f.is_positive() {
            return Err(RieszError::domain("band projection needs a positive generator"));
        }
        let support = f.values.iter().map(Signed::is_positive).collect();
        Ok(BandProjection {
            space: Arc::clone(&f.space),
            support,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn support(&self) -> &[bool] {
        &self.support
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.support[atom]
    }

    pub fn support_indices(&self) -> Vec<usize> {
        self.support
            .iter()
            .enumerate()
            .filter_map(|(i, &s)| s.then_some(i))
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.support.iter().all(|&s| s)
    }

    pub fn is_zero(&self) -> bool {
        self.support.iter().all(|&s| !s)
    }

    pub fn apply(&self, f: &RieszElement) -> Result<RieszElement> {
        ensure_same(&self.space, &f.space)?;
        Ok(self.apply_unchecked(f))
    }

    pub(crate) fn apply_unchecked(&self, f: &RieszElement) -> RieszElement {
        RieszElement::from_parts(&f.space, self.mask(&f.values))
    }

    pub(crate) fn mask(&self, values: &[Rational]) -> Vec<Rational> {
        values
            .iter()
            .zip(&self.support)
            .map(|(v, &s)| if s { v.clone() } else { Rational::zero() })
            .collect()
    }

    pub fn complement(&self) -> Self {
        BandProjection {
            space: Arc::clone(&self.space),
            support: self.support.iter().map(|s| !s).collect(),
        }
    }

    /// `P∘Q`, the projection onto the intersection of the two bands.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        ensure_same(&self.space, &other.space)?;
        Ok(BandProjection {
            space: Arc::clone(&self.space),
            support: self.support.iter().zip(&other.support).map(|(a, b)| *a && *b).collect(),
        })
    }

    /// `P(e)` as an element.
    pub fn indicator(&self) -> RieszElement {
        RieszElement::indicator(&self.space, &self.support)
    }

    pub fn describe(&self) -> String {
        let names: Vec<&str> = self
            .support_indices()
            .into_iter()
            .map(|i| self.space.atoms()[i].as_str())
            .collect();
        format!("{{{}}}", names.join(","))
    }
}

impl PartialEq for BandProjection {
    fn eq(&self, other: &Self) -> bool {
        SampleSpace::same(&self.space, &other.space) && self.support == other.support
    }
}

impl Eq for BandProjection {}

impl fmt::Debug for BandProjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.describe())
    }
}

/// `P_f` of a positive element.
pub fn band_projection_of(f: &RieszElement) -> Result<BandProjection> {
    BandProjection::of(f)
}

/// Result of evaluating `P_f g = sup_n g ∧ n·f` at a finite horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupFormulaTrace {
    /// `ceil(max|g| / min positive f)`, the horizon at which the supremum is attained.
    pub bound: usize,
    /// Least `n` at which the running supremum already equals its final value.
    pub stabilized_at: usize,
    pub result: RieszElement,
    /// Whether the result coincides with the indicator action of `P_f`.
    pub matches_indicator: bool,
}

/// Stabilization horizon `ceil(max|g| / min{f(ω) : f(ω) > 0})`, zero when either side vanishes.
pub fn stabilization_bound(f: &RieszElement, g: &RieszElement) -> Result<usize> {
    ensure_same(f.space(), g.space())?;
    let min_pos = f.values.iter().filter(|v| v.is_positive()).min();
    let max_abs = g.values.iter().map(Signed::abs).max().unwrap_or_else(Rational::zero);
    Ok(match min_pos {
        Some(m) if !max_abs.is_zero() => ceil_to_usize(&(max_abs / m)),
        _ => 0,
    })
}

/// Running `sup_{n <= horizon} h ∧ n·f` for `h >= 0`, with the first index at which it stopped changing.
fn running_sup(f: &RieszElement, h: &RieszElement, horizon: usize) -> (RieszElement, usize) {
    let mut acc = RieszElement::zero(f.space());
    let mut last_change = 0;
    for n in 1..=horizon {
        let nf = f.scale(&int(n as i64));
        let term = h.inf(&nf).expect("same space");
        let next = acc.sup(&term).expect("same space");
        if next != acc {
            last_change = n;
            acc = next;
        }
    }
    (acc, last_change)
}

/// Evaluates the supremum formula for `P_f g` at `horizon` (default: the stabilization bound),
/// splitting `g = g⁺ − g⁻`.
pub fn sup_formula(f: &RieszElement, g: &RieszElement, horizon: Option<usize>) -> Result<SupFormulaTrace> {
    let projection = BandProjection::of(f)?;
    ensure_same(f.space(), g.space())?;
    let bound = stabilization_bound(f, g)?;
    let horizon = horizon.unwrap_or(bound);
    let (pos, n_pos) = running_sup(f, &g.positive_part(), horizon);
    let (neg, n_neg) = running_sup(f, &g.negative_part(), horizon);
    let result = pos.sub(&neg)?;
    let matches_indicator = result == projection.apply_unchecked(g);
    Ok(SupFormulaTrace {
        bound,
        stabilized_at: n_pos.max(n_neg),
        result,
        matches_indicator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn space4() -> Space {
        SampleSpace::uniform(4)
    }

    fn el(space: &Space, v: &[i64]) -> RieszElement {
        RieszElement::from_ints(space, v).unwrap()
    }

    #[test]
    fn lattice_examples() {
        let s = SampleSpace::uniform(2);
        let f = el(&s, &[1, 0]);
        let g = el(&s, &[0, 1]);
        assert_eq!(f.sup(&g).unwrap(), el(&s, &[1, 1]));
        assert_eq!(f.inf(&f).unwrap(), f);
        assert_eq!(el(&s, &[-2, 3]).abs(), el(&s, &[2, 3]));
        assert_eq!(el(&s, &[-2, 3]).abs(), el(&s, &[-2, 3]).sup(&el(&s, &[2, -3])).unwrap());
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let a = el(&SampleSpace::uniform(2), &[1, 2]);
        let b = el(&SampleSpace::uniform(3), &[1, 2, 3]);
        assert_eq!(a.sup(&b), Err(RieszError::SpaceMismatch));
        assert_eq!(a.add(&b), Err(RieszError::SpaceMismatch));
    }

    #[test]
    fn structurally_equal_spaces_interoperate() {
        let a = el(&SampleSpace::uniform(2), &[1, 2]);
        let b = el(&SampleSpace::uniform(2), &[3, 0]);
        assert_eq!(a.add(&b).unwrap().values(), &[int(4), int(2)]);
    }

    #[test]
    fn space_validation() {
        let names = |n: usize| (0..n).map(|i| format!("a{i}")).collect::<Vec<_>>();
        assert!(SampleSpace::new(names(3), vec![rat(1, 3); 3]).is_ok());
        let err = SampleSpace::new(names(2), vec![rat(1, 2), rat(2, 5)]).unwrap_err();
        assert!(err.to_string().contains("9/10"), "{err}");
        assert!(SampleSpace::new(names(2), vec![rat(1, 1), rat(0, 1)]).is_err());
        assert!(SampleSpace::new(vec!["x".into(), "x".into()], vec![rat(1, 2); 2]).is_err());
        let n = SampleSpace::normalized(names(2), vec![int(1), int(3)]).unwrap();
        assert_eq!(n.weights(), &[rat(1, 4), rat(3, 4)]);
    }

    #[test]
    fn weak_order_units() {
        let s = space4();
        assert!(el(&s, &[1, 1, 1, 1]).is_weak_order_unit().unwrap());
        assert!(!el(&s, &[1, 0, 1, 1]).is_weak_order_unit().unwrap());
        let f = RieszElement::new(&s, vec![rat(1, 3), int(7), int(2), int(5)]).unwrap();
        assert!(f.is_weak_order_unit().unwrap());
        assert!(el(&s, &[1, -1, 1, 1]).is_weak_order_unit().is_err());
    }

    /// Brute-force weak-order-unit test: `|g| ∧ n·f` reaches `|g|` for every scaled basis vector.
    fn weak_unit_by_definition(f: &RieszElement) -> bool {
        let s = f.space().clone();
        (0..s.len()).all(|i| {
            let mut v = vec![Rational::zero(); s.len()];
            v[i] = int(1000);
            let g = RieszElement::new(&s, v).unwrap();
            (0..=100_000usize).step_by(97).any(|n| g.abs().inf(&f.scale(&int(n as i64))).unwrap() == g.abs())
        })
    }

    #[test]
    fn weak_order_unit_matches_definition() {
        let s = space4();
        for v in [vec![rat(1, 3), int(7), int(2), int(5)], vec![int(1), int(0), int(1), int(1)]] {
            let f = RieszElement::new(&s, v).unwrap();
            assert_eq!(f.is_weak_order_unit().unwrap(), weak_unit_by_definition(&f));
        }
    }

    #[test]
    fn band_projection_examples() {
        let s = space4();
        let p = BandProjection::of(&el(&s, &[1, 1, 0, 0])).unwrap();
        assert_eq!(p.apply(&el(&s, &[3, 5, 7, 9])).unwrap(), el(&s, &[3, 5, 0, 0]));
        let z = BandProjection::of(&RieszElement::zero(&s)).unwrap();
        assert!(z.is_zero());
        assert!(z.apply(&el(&s, &[3, 5, 7, 9])).unwrap().is_zero());
        assert!(BandProjection::of(&el(&s, &[1, -1, 0, 0])).is_err());
    }

    #[test]
    fn sup_formula_stabilizes_at_bound() {
        let s = space4();
        let f = RieszElement::new(&s, vec![rat(1, 2), int(0), int(2), int(0)]).unwrap();
        let g = el(&s, &[4, 4, 4, 4]);
        let trace = sup_formula(&f, &g, None).unwrap();
        assert_eq!(trace.bound, 8);
        assert_eq!(trace.stabilized_at, 8);
        assert_eq!(trace.result, el(&s, &[4, 0, 4, 0]));
        assert!(trace.matches_indicator);
        // one step short of the bound the supremum is not reached yet
        let short = sup_formula(&f, &g, Some(7)).unwrap();
        assert!(!short.matches_indicator);
    }

    #[test]
    fn sup_formula_handles_signed_elements() {
        let s = space4();
        let f = el(&s, &[3, 0, 1, 1]);
        let g = el(&s, &[-5, 2, 7, -1]);
        let trace = sup_formula(&f, &g, None).unwrap();
        assert_eq!(trace.result, el(&s, &[-5, 0, 7, -1]));
        assert!(trace.matches_indicator);
    }

    #[test]
    fn projection_algebra() {
        let s = space4();
        let p = BandProjection::from_atoms(&s, [0, 2]).unwrap();
        let f = el(&s, &[1, 2, 3, 4]);
        let pf = p.apply(&f).unwrap();
        assert_eq!(p.apply(&pf).unwrap(), pf);
        assert_eq!(pf.add(&p.complement().apply(&f).unwrap()).unwrap(), f);
        assert_eq!(p.complement().support(), &[false, true, false, true]);
        assert!(BandProjection::from_atoms(&s, [7]).is_err());
    }

    #[test]
    fn e_mul_examples() {
        let s = space4();
        let e = el(&s, &[1, 1, 1, 1]);
        assert_eq!(e_mul(&el(&s, &[2, 3, 0, 1]), &el(&s, &[1, 1, 2, 5]), &e).unwrap(), el(&s, &[2, 3, 0, 5]));
        let e2 = el(&s, &[2, 2, 2, 2]);
        assert_eq!(e_mul(&el(&s, &[2, 4, 6, 8]), &e2, &e2).unwrap(), el(&s, &[2, 4, 6, 8]));
        let f = el(&s, &[5, -1, 0, 3]);
        let u = RieszElement::new(&s, vec![rat(1, 2), int(3), int(1), rat(7, 4)]).unwrap();
        assert_eq!(e_mul(&f, &u, &u).unwrap(), f);
        assert!(e_mul(&f, &f, &el(&s, &[1, 0, 1, 1])).is_err());
    }
}
