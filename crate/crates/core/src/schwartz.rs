//! Schwartz–Bruhat functions on `Q_p^m`, stored as their coarsest disjoint
//! decomposition `Σ cᵢ 1_{Bᵢ}`.
//!
//! Canonical form: the balls are pairwise disjoint, every coefficient is
//! nonzero, no complete family of `p^m` sibling balls carries a single shared
//! coefficient, and terms are sorted by ball. Two functions are equal as
//! functions iff their canonical term lists are equal.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{BallRelation, Polydisc};
use crate::padic::{PAdicPoint, Valuation};
use crate::scalar::{psi, CycScalar, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coef: CycScalar,
    pub ball: Polydisc,
}

impl Term {
    pub fn new(coef: CycScalar, ball: Polydisc) -> Self {
        Term { coef, ball }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SBFunction {
    p: u64,
    dim: usize,
    terms: Vec<Term>,
}

impl SBFunction {
    pub fn zero(p: u64, dim: usize) -> Self {
        SBFunction { p, dim, terms: Vec::new() }
    }

    pub fn indicator(ball: Polydisc) -> Self {
        SBFunction { p: ball.p(), dim: ball.dim(), terms: vec![Term::new(CycScalar::one(ball.p()), ball)] }
    }

    /// Canonical form of `Σ cᵢ 1_{Bᵢ}` for arbitrary (possibly overlapping)
    /// raw terms: refine to the finest radius, sum equal cells, drop zeros,
    /// then merge complete equal-coefficient sibling families bottom-up.
    pub fn canonicalize<I>(p: u64, dim: usize, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = Term>,
    {
        let mut raw_terms = Vec::new();
        for t in raw {
            if t.ball.p() != p || t.coef.p() != p {
                return Err(Error::MismatchedPrime { left: p, right: t.ball.p().max(t.coef.p()) });
            }
            if t.ball.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: t.ball.dim() });
            }
            if !t.coef.is_zero() {
                raw_terms.push(t);
            }
        }
        let Some(gamma) = raw_terms.iter().map(|t| t.ball.alpha()).max() else {
            return Ok(Self::zero(p, dim));
        };

        let mut cells: HashMap<Polydisc, CycScalar> = HashMap::new();
        for t in raw_terms {
            for cell in t.ball.split(gamma)? {
                match cells.get_mut(&cell) {
                    Some(c) => *c = c.try_add(&t.coef)?,
                    None => {
                        cells.insert(cell, t.coef.clone());
                    }
                }
            }
        }
        cells.retain(|_, c| !c.is_zero());

        let family = (p as usize).pow(dim as u32);
        let mut out = Vec::new();
        while !cells.is_empty() {
            let mut groups: HashMap<Polydisc, Vec<(Polydisc, CycScalar)>> = HashMap::new();
            for (ball, coef) in cells {
                groups.entry(ball.parent()).or_default().push((ball, coef));
            }
            let mut next = HashMap::new();
            for (parent, group) in groups {
                let uniform = group.len() == family && group.iter().all(|(_, c)| *c == group[0].1);
                if uniform {
                    next.insert(parent, group[0].1.clone());
                } else {
                    out.extend(group.into_iter().map(|(b, c)| Term::new(c, b)));
                }
            }
            cells = next;
        }
        out.sort_by(|a, b| a.ball.cmp(&b.ball));
        Ok(SBFunction { p, dim, terms: out })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::MismatchedPrime { left: self.p, right: other.p });
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    fn check_point(&self, x: &PAdicPoint) -> Result<()> {
        if x.p() != self.p {
            return Err(Error::MismatchedPrime { left: self.p, right: x.p() });
        }
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.dim() });
        }
        Ok(())
    }

    pub fn eval(&self, x: &PAdicPoint) -> Result<CycScalar> {
        self.check_point(x)?;
        for t in &self.terms {
            if t.ball.contains_point(x)? {
                return Ok(t.coef.clone());
            }
        }
        Ok(CycScalar::zero(self.p))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Self::canonicalize(self.p, self.dim, self.terms.iter().chain(&other.terms).cloned())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coefs(|c| -c)
    }

    pub fn scale(&self, c: &CycScalar) -> Result<Self> {
        if c.p() != self.p {
            return Err(Error::MismatchedPrime { left: self.p, right: c.p() });
        }
        if c.is_zero() {
            return Ok(Self::zero(self.p, self.dim));
        }
        // multiplication by a nonzero scalar preserves the canonical shape
        Ok(self.map_coefs(|x| x * c))
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        if num_traits::Zero::is_zero(r) {
            return Self::zero(self.p, self.dim);
        }
        self.map_coefs(|x| x.scale(r))
    }

    fn map_coefs(&self, f: impl Fn(&CycScalar) -> CycScalar) -> Self {
        SBFunction {
            p: self.p,
            dim: self.dim,
            terms: self.terms.iter().map(|t| Term::new(f(&t.coef), t.ball.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut raw = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let smaller = match a.ball.compare(&b.ball)? {
                    BallRelation::Disjoint => continue,
                    BallRelation::Equal | BallRelation::FirstInsideSecond => &a.ball,
                    BallRelation::SecondInsideFirst => &b.ball,
                };
                raw.push(Term::new(a.coef.try_mul(&b.coef)?, smaller.clone()));
            }
        }
        Self::canonicalize(self.p, self.dim, raw)
    }

    /// `(x, y) ↦ f(x)·g(y)`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::MismatchedPrime { left: self.p, right: other.p });
        }
        let mut raw = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let coef = a.coef.try_mul(&b.coef)?;
                for ball in a.ball.product_refined(&b.ball)? {
                    raw.push(Term::new(coef.clone(), ball));
                }
            }
        }
        Self::canonicalize(self.p, self.dim + other.dim, raw)
    }

    /// Writes `h = Σ cᵢ 1_{Cᵢ} ⊗ 1_{Dᵢ}` with `Cᵢ × Dᵢ` the canonical balls of `h`.
    pub fn tensor_decompose(&self, m: usize) -> Result<Vec<(CycScalar, Polydisc, Polydisc)>> {
        if m == 0 || m >= self.dim {
            return Err(Error::BadSplit { split: m, dim: self.dim });
        }
        self.terms
            .iter()
            .map(|t| {
                let (c, d) = t.ball.product_split(m)?;
                Ok((t.coef.clone(), c, d))
            })
            .collect()
    }

    /// Haar integral with `vol(Z_p^m) = 1`.
    pub fn integrate(&self) -> CycScalar {
        self.terms
            .iter()
            .fold(CycScalar::zero(self.p), |acc, t| &acc + &t.coef.scale(&t.ball.volume()))
    }

    /// `(f * g)(x) = ∫ f(y) g(x − y) dy`, from
    /// `1_{B(a,α)} * 1_{B(b,β)} = p^{−max(α,β)m} 1_{B(a+b, min(α,β))}`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut raw = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let (coarse, fine) = if a.ball.alpha() <= b.ball.alpha() { (&a.ball, &b.ball) } else { (&b.ball, &a.ball) };
                let coef = a.coef.try_mul(&b.coef)?.scale(&fine.volume());
                let center = a.ball.center().add(b.ball.center())?;
                raw.push(Term::new(coef, Polydisc::new(center, coarse.alpha())));
            }
        }
        Self::canonicalize(self.p, self.dim, raw)
    }

    /// Largest `α⁻` with `supp f ⊆ p^{α⁻} Z_p^m`.
    pub fn support_radius(&self) -> Result<i64> {
        self.terms
            .iter()
            .map(|t| t.ball.min_valuation())
            .min()
            .ok_or(Error::ZeroArgument("support radius of the zero function"))
    }

    /// Smallest `α⁺` such that `f` is constant on every radius-`α⁺` ball.
    pub fn local_constancy_radius(&self) -> Result<i64> {
        self.terms
            .iter()
            .map(|t| t.ball.alpha())
            .max()
            .ok_or(Error::ZeroArgument("local constancy radius of the zero function"))
    }

    /// The balls of the canonical form; their union is `supp f`.
    pub fn support(&self) -> Vec<Polydisc> {
        self.terms.iter().map(|t| t.ball.clone()).collect()
    }

    /// `x ↦ f(x)·Ψ(⟨x, η⟩)`.
    pub fn modulate(&self, eta: &PAdicPoint) -> Result<Self> {
        self.check_point(eta)?;
        let eta_ord = eta.ord();
        let mut raw = Vec::new();
        for t in &self.terms {
            let gamma = match eta_ord {
                Valuation::Infinity => t.ball.alpha(),
                Valuation::Finite(v) => t.ball.alpha().max(1 - v),
            };
            for cell in t.ball.split(gamma)? {
                let phase = psi(self.p, &cell.center().inner(eta)?)?;
                raw.push(Term::new(t.coef.try_mul(&phase)?, cell));
            }
        }
        Self::canonicalize(self.p, self.dim, raw)
    }

    /// `f̂(ξ) = ∫ f(x) Ψ(⟨x, ξ⟩) dx`. The transform of `1_{B(a,α)}` is
    /// `p^{−αm} Ψ(⟨a, ξ⟩) 1_{p^{1−α} Z_p^m}(ξ)`.
    pub fn fourier(&self) -> Result<Self> {
        let mut raw = Vec::new();
        for t in &self.terms {
            let support_alpha = 1 - t.ball.alpha();
            let gamma = match t.ball.center().ord() {
                Valuation::Infinity => support_alpha,
                Valuation::Finite(v) => support_alpha.max(1 - v),
            };
            let coef = t.coef.scale(&t.ball.volume());
            for cell in Polydisc::origin(self.p, self.dim, support_alpha).split(gamma)? {
                let phase = psi(self.p, &t.ball.center().inner(cell.center())?)?;
                raw.push(Term::new(coef.try_mul(&phase)?, cell));
            }
        }
        Self::canonicalize(self.p, self.dim, raw)
    }

    /// `x ↦ f(x − a)`.
    pub fn translate(&self, a: &PAdicPoint) -> Result<Self> {
        self.check_point(a)?;
        let raw = self
            .terms
            .iter()
            .map(|t| Ok(Term::new(t.coef.clone(), t.ball.translate(a)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::canonicalize(self.p, self.dim, raw)
    }

    /// `x ↦ f(−x)`.
    pub fn reflect(&self) -> Self {
        let raw = self.terms.iter().map(|t| Term::new(t.coef.clone(), t.ball.negate()));
        Self::canonicalize(self.p, self.dim, raw).expect("reflection preserves shape")
    }

    /// `x ↦ f(p^k x)`.
    pub fn dilate(&self, k: i64) -> Self {
        let raw = self.terms.iter().map(|t| Term::new(t.coef.clone(), t.ball.dilate(k)));
        Self::canonicalize(self.p, self.dim, raw).expect("dilation preserves shape")
    }

    /// `x ↦ f(x, x)` for a function on `Q_p^{2m}`.
    pub fn restrict_diagonal(&self) -> Result<Self> {
        if self.dim % 2 != 0 {
            return Err(Error::BadSplit { split: self.dim / 2, dim: self.dim });
        }
        let m = self.dim / 2;
        let mut raw = Vec::new();
        for t in &self.terms {
            let (c, d) = t.ball.product_split(m)?;
            if c == d {
                raw.push(Term::new(t.coef.clone(), c));
            }
        }
        Self::canonicalize(self.p, m, raw)
    }
}

/// Equality as functions (equivalently, of canonical forms).
pub fn sb_equal(f: &SBFunction, g: &SBFunction) -> bool {
    f == g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::p_pow;
    use proptest::prelude::*;

    fn ball(p: u64, c: &[i64], alpha: i64) -> Polydisc {
        Polydisc::new(PAdicPoint::from_ints(p, c), alpha)
    }

    fn ind(p: u64, c: &[i64], alpha: i64) -> SBFunction {
        SBFunction::indicator(ball(p, c, alpha))
    }

    fn int(p: u64, n: i64) -> CycScalar {
        CycScalar::from_int(p, n)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn pt(p: u64, c: &[i64]) -> PAdicPoint {
        PAdicPoint::from_ints(p, c)
    }

    #[test]
    fn siblings_merge() {
        let f = ind(2, &[0], 1).add(&ind(2, &[1], 1)).unwrap();
        assert_eq!(f, ind(2, &[0], 0));
        assert_eq!(f.terms().len(), 1);
        let again = SBFunction::canonicalize(2, 1, f.terms().to_vec()).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn cancellation_gives_zero() {
        let f = ind(3, &[0], 0).sub(&ind(3, &[0], 0)).unwrap();
        assert!(f.is_zero());
        assert!(f.terms().is_empty());
    }

    #[test]
    fn equality_is_functional() {
        let f = ind(5, &[0, 0], 0);
        assert!(sb_equal(&f, &f));
        let split = SBFunction::canonicalize(
            2,
            1,
            vec![Term::new(int(2, 1), ball(2, &[0], 1)), Term::new(int(2, 1), ball(2, &[1], 1))],
        )
        .unwrap();
        assert!(sb_equal(&ind(2, &[0], 0), &split));
        assert!(!sb_equal(&ind(2, &[0], 1), &ind(2, &[1], 1)));
    }

    #[test]
    fn eval_examples() {
        assert!(SBFunction::zero(3, 1).eval(&pt(3, &[5])).unwrap().is_zero());
        assert!(ind(3, &[0], 1).eval(&pt(3, &[3])).unwrap().is_one());
        assert!(ind(3, &[0], 1).eval(&pt(3, &[1])).unwrap().is_zero());
        assert!(ind(3, &[0], 1).eval(&pt(3, &[1, 1])).is_err());
    }

    #[test]
    fn algebra_examples() {
        let f = ind(3, &[2], 1).scale_rational(&q(5, 2));
        assert_eq!(f.add(&SBFunction::zero(3, 1)).unwrap(), f);
        assert_eq!(ind(3, &[0], 0).mul(&ind(3, &[0], 1)).unwrap(), ind(3, &[0], 1));
        assert!(f.scale(&CycScalar::zero(3)).unwrap().is_zero());
        assert!(f.add(&ind(2, &[0], 0)).is_err());
    }

    #[test]
    fn tensor_examples() {
        let t = ind(3, &[1], 1).tensor(&ind(3, &[2], 1)).unwrap();
        assert_eq!(t, ind(3, &[1, 2], 1));
        assert!(ind(3, &[1], 1).tensor(&SBFunction::zero(3, 2)).unwrap().is_zero());
        let mixed = ind(3, &[1], 0).tensor(&ind(3, &[2], 1)).unwrap();
        assert_eq!(mixed.terms().len(), 3);
        assert!(mixed.eval(&pt(3, &[7, 5])).unwrap().is_one());
        assert!(mixed.eval(&pt(3, &[7, 4])).unwrap().is_zero());
    }

    #[test]
    fn tensor_decompose_examples() {
        let t = ind(3, &[1], 1).tensor(&ind(3, &[2], 1)).unwrap();
        assert_eq!(t.tensor_decompose(1).unwrap(), vec![(int(3, 1), ball(3, &[1], 1), ball(3, &[2], 1))]);
        let h = ind(2, &[0, 0], 1).add(&ind(2, &[1, 1], 1).scale_rational(&q(2, 1))).unwrap();
        let parts = h.tensor_decompose(1).unwrap();
        assert_eq!(
            parts,
            vec![
                (int(2, 1), ball(2, &[0], 1), ball(2, &[0], 1)),
                (int(2, 2), ball(2, &[1], 1), ball(2, &[1], 1)),
            ]
        );
        assert!(h.tensor_decompose(2).is_err());
    }

    #[test]
    fn integrals() {
        assert!(ind(7, &[0], 0).integrate().is_one());
        assert_eq!(ind(2, &[0], 1).integrate(), CycScalar::from_rational(2, q(1, 2)));
        assert!(SBFunction::zero(2, 1).integrate().is_zero());
        assert_eq!(ind(3, &[0, 0], -1).integrate(), int(3, 9));
    }

    #[test]
    fn convolution_examples() {
        let zp = ind(3, &[0], 0);
        assert_eq!(zp.convolve(&zp).unwrap(), zp);
        assert!(zp.convolve(&SBFunction::zero(3, 1)).unwrap().is_zero());
        let c = ind(3, &[0], 1).convolve(&ind(3, &[0], 2)).unwrap();
        assert_eq!(c, ind(3, &[0], 1).scale_rational(&q(1, 9)));
    }

    #[test]
    fn radii_examples() {
        let zp = ind(5, &[0], 0);
        assert_eq!(zp.support_radius().unwrap(), 0);
        assert_eq!(zp.local_constancy_radius().unwrap(), 0);
        let b = ind(3, &[1], 2);
        assert_eq!(b.support_radius().unwrap(), 0);
        assert_eq!(b.local_constancy_radius().unwrap(), 2);
        let s = b.scale_rational(&q(-4, 7));
        assert_eq!(s.support_radius().unwrap(), 0);
        assert_eq!(s.local_constancy_radius().unwrap(), 2);
        assert!(SBFunction::zero(3, 1).support_radius().is_err());
        assert!(SBFunction::zero(3, 1).local_constancy_radius().is_err());
    }

    #[test]
    fn modulation_examples() {
        let f = ind(3, &[2], 1).add(&ind(3, &[0], -1)).unwrap();
        assert_eq!(f.modulate(&PAdicPoint::zero(3, 1)).unwrap(), f);
        let m = ind(3, &[0], 0).modulate(&pt(3, &[1])).unwrap();
        assert_eq!(m.terms().len(), 3);
        // brute force: value at x is Ψ(x) = ζ₃^x for x ∈ Z
        for x in 0..9 {
            let expected = psi(3, &q(x, 1)).unwrap();
            assert_eq!(m.eval(&pt(3, &[x])).unwrap(), expected);
        }
    }

    #[test]
    fn fourier_of_unit_ball() {
        for p in [2, 3, 5] {
            assert_eq!(ind(p, &[0], 0).fourier().unwrap(), ind(p, &[0], 1));
            assert_eq!(ind(p, &[0, 0], 0).fourier().unwrap(), ind(p, &[0, 0], 1));
        }
        assert!(SBFunction::zero(3, 1).fourier().unwrap().is_zero());
    }

    #[test]
    fn restrict_diagonal_keeps_diagonal_cells() {
        let f = ind(3, &[1, 1], 1).add(&ind(3, &[1, 2], 1)).unwrap();
        assert_eq!(f.restrict_diagonal().unwrap(), ind(3, &[1], 1));
    }

    #[test]
    fn helpers() {
        let f = ind(3, &[1], 1);
        assert_eq!(f.translate(&pt(3, &[1])).unwrap(), ind(3, &[2], 1));
        assert_eq!(f.reflect(), ind(3, &[2], 1));
        assert_eq!(ind(3, &[0], 1).dilate(1), ind(3, &[0], 0));
    }

    fn residues(p: u64, lo: i64, hi: i64) -> Vec<PAdicPoint> {
        let n = p.pow((hi - lo) as u32) as i64;
        (0..n)
            .map(|t| PAdicPoint::new(p, vec![p_pow(p, lo) * Rational::from_integer(t.into())]).unwrap())
            .collect()
    }

    fn arb_raw(p: u64) -> impl Strategy<Value = Vec<Term>> {
        prop::collection::vec((0i64..(p * p) as i64, -1i64..=2, -3i64..=3), 0..5).prop_map(move |ts| {
            ts.into_iter()
                .map(|(c, a, k)| Term::new(CycScalar::from_int(p, k), ball(p, &[c], a)))
                .collect()
        })
    }

    fn arb_fn(p: u64) -> impl Strategy<Value = SBFunction> {
        arb_raw(p).prop_map(move |raw| SBFunction::canonicalize(p, 1, raw).unwrap())
    }

    fn raw_eval(p: u64, raw: &[Term], x: &PAdicPoint) -> CycScalar {
        raw.iter()
            .filter(|t| t.ball.contains_point(x).unwrap())
            .fold(CycScalar::zero(p), |acc, t| &acc + &t.coef)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn canonical_form_is_eval_consistent(raw in arb_raw(2)) {
            let f = SBFunction::canonicalize(2, 1, raw.clone()).unwrap();
            prop_assert_eq!(SBFunction::canonicalize(2, 1, f.terms().to_vec()).unwrap(), f.clone());
            for x in residues(2, -2, 4) {
                prop_assert_eq!(f.eval(&x).unwrap(), raw_eval(2, &raw, &x));
            }
        }

        #[test]
        fn integral_is_linear_and_translation_invariant((f, g) in (arb_fn(3), arb_fn(3)), a in -9i64..9) {
            let sum = f.add(&g).unwrap();
            prop_assert_eq!(sum.integrate(), &f.integrate() + &g.integrate());
            let shifted = f.translate(&pt(3, &[a])).unwrap();
            prop_assert_eq!(shifted.integrate(), f.integrate());
            let refined = SBFunction::canonicalize(
                3, 1,
                f.terms().iter().flat_map(|t| t.ball.children().into_iter().map(move |b| Term::new(t.coef.clone(), b))),
            ).unwrap();
            prop_assert_eq!(refined.integrate(), f.integrate());
        }

        #[test]
        fn convolution_laws((f, g) in (arb_fn(2), arb_fn(2)), extra in 0i64..2) {
            prop_assert_eq!(f.convolve(&g).unwrap(), g.convolve(&f).unwrap());
            if let Ok(a) = f.local_constancy_radius() {
                let alpha = a + extra;
                let mollifier = ind(2, &[0], alpha).scale_rational(&p_pow(2, alpha));
                prop_assert_eq!(f.convolve(&mollifier).unwrap(), f.clone());
            }
        }

        #[test]
        fn modulations_compose(f in arb_fn(3), e1 in -9i64..9, e2 in -9i64..9, s in 0i64..2) {
            let eta1 = PAdicPoint::new(3, vec![Rational::new(e1.into(), 3i64.pow(s as u32).into())]).unwrap();
            let eta2 = pt(3, &[e2]);
            let twice = f.modulate(&eta1).unwrap().modulate(&eta2).unwrap();
            prop_assert_eq!(twice, f.modulate(&eta1.add(&eta2).unwrap()).unwrap());
            for x in residues(3, -1, 2) {
                let expect = &f.eval(&x).unwrap() * &psi(3, &x.inner(&eta1).unwrap()).unwrap();
                prop_assert_eq!(f.modulate(&eta1).unwrap().eval(&x).unwrap(), expect);
            }
        }

        #[test]
        fn tensor_evaluates_as_product((f, g) in (arb_fn(2), arb_fn(2))) {
            let t = f.tensor(&g).unwrap();
            for x in residues(2, -1, 2) {
                for y in residues(2, -1, 2) {
                    let xy = x.concat(&y).unwrap();
                    prop_assert_eq!(t.eval(&xy).unwrap(), &f.eval(&x).unwrap() * &g.eval(&y).unwrap());
                }
            }
        }

        #[test]
        fn tensor_decomposition_reassembles(raw in prop::collection::vec((0i64..4, 0i64..4, 0i64..=2, 1i64..4), 0..4)) {
            let h = SBFunction::canonicalize(
                2, 2,
                raw.into_iter().map(|(a, b, al, k)| Term::new(CycScalar::from_int(2, k), ball(2, &[a, b], al))),
            ).unwrap();
            let mut acc = SBFunction::zero(2, 2);
            for (c, cb, db) in h.tensor_decompose(1).unwrap() {
                let piece = SBFunction::indicator(cb).tensor(&SBFunction::indicator(db)).unwrap().scale(&c).unwrap();
                acc = acc.add(&piece).unwrap();
            }
            prop_assert_eq!(acc, h);
        }

        #[test]
        fn fourier_support_bound(f in arb_fn(3)) {
            let fh = f.fourier().unwrap();
            if let (Ok(a), Ok(s)) = (f.local_constancy_radius(), fh.support_radius()) {
                prop_assert!(s >= 1 - a);
            }
        }
    }
}
