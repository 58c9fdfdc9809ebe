//! p-adic points with coordinates in `Z[1/p]`, valuations, angular
//! components and the open subgroups `Λ ⊆ Q_p^×` used by wave front sets.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{p_power_exponent, Rational};

/// A p-adic valuation; `Infinity` sorts above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

fn int_valuation(p: u64, n: &BigInt) -> i64 {
    let pb = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Valuation of an arbitrary rational.
pub fn valuation(p: u64, x: &Rational) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    Valuation::Finite(int_valuation(p, x.numer()) - int_valuation(p, x.denom()))
}

/// `p^e` as a rational, for any sign of `e`.
pub fn p_pow(p: u64, e: i64) -> Rational {
    let mag = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(mag)
    } else {
        Rational::new(BigInt::one(), mag)
    }
}

pub fn check_p_power(p: u64, x: &Rational) -> Result<()> {
    match p_power_exponent(p, x.denom()) {
        Some(_) => Ok(()),
        None => Err(Error::NotPPowerDenominator { p, value: x.to_string() }),
    }
}

/// The canonical representative of `x + p^α Z_p` among the digit truncations
/// `Σ_{v ≤ i < α} d_i p^i`; `x` must lie in `Z[1/p]`.
pub fn reduce_rational_mod(p: u64, x: &Rational, alpha: i64) -> Rational {
    let s = p_power_exponent(p, x.denom()).expect("coordinate in Z[1/p]") as i64;
    let digits = alpha + s;
    if digits <= 0 {
        return Rational::zero();
    }
    let modulus = BigInt::from(p).pow(digits as u32);
    let r = x.numer().mod_floor(&modulus);
    Rational::new(r, x.denom().clone())
}

/// Angular component `x·p^{-ord x}` modulo `p^depth`, for any nonzero rational.
pub fn ac(p: u64, x: &Rational, depth: u32) -> Result<u64> {
    let v = valuation(p, x).finite().ok_or(Error::ZeroArgument("angular component of 0"))?;
    let unit = x * p_pow(p, -v);
    let modulus = BigInt::from(p).pow(depth);
    if modulus.is_one() {
        return Ok(0);
    }
    let num = unit.numer().mod_floor(&modulus);
    let den = unit.denom().mod_floor(&modulus);
    let inv = den.extended_gcd(&modulus).x.mod_floor(&modulus);
    Ok((num * inv).mod_floor(&modulus).to_u64().expect("residue fits u64"))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PAdicPoint {
    p: u64,
    coords: Vec<Rational>,
}

impl PAdicPoint {
    pub fn new(p: u64, coords: Vec<Rational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        for c in &coords {
            check_p_power(p, c)?;
        }
        Ok(PAdicPoint { p, coords })
    }

    pub fn from_ints(p: u64, coords: &[i64]) -> Self {
        Self::new(p, coords.iter().map(|&c| Rational::from_integer(c.into())).collect())
            .expect("integer coordinates")
    }

    pub fn zero(p: u64, dim: usize) -> Self {
        PAdicPoint { p, coords: vec![Rational::zero(); dim.max(1)] }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::MismatchedPrime { left: self.p, right: other.p });
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }

    /// `min_j ord x_j`; `Infinity` iff `x = 0`.
    pub fn ord(&self) -> Valuation {
        self.coords.iter().map(|c| valuation(self.p, c)).min().expect("nonempty point")
    }

    pub fn inner(&self, other: &Self) -> Result<Rational> {
        self.check_compatible(other)?;
        Ok(self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum())
    }

    pub fn reduce_mod(&self, alpha: i64) -> Self {
        PAdicPoint {
            p: self.p,
            coords: self.coords.iter().map(|c| reduce_rational_mod(self.p, c, alpha)).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(PAdicPoint {
            p: self.p,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        PAdicPoint { p: self.p, coords: self.coords.iter().map(|c| -c).collect() }
    }

    /// Multiplication by a scalar of `Z[1/p]`.
    pub fn scale(&self, lambda: &Rational) -> Result<Self> {
        check_p_power(self.p, lambda)?;
        Ok(PAdicPoint { p: self.p, coords: self.coords.iter().map(|c| c * lambda).collect() })
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::MismatchedPrime { left: self.p, right: other.p });
        }
        let mut coords = self.coords.clone();
        coords.extend(other.coords.iter().cloned());
        Ok(PAdicPoint { p: self.p, coords })
    }

    pub fn split_at(&self, m: usize) -> Result<(Self, Self)> {
        if m == 0 || m >= self.dim() {
            return Err(Error::BadSplit { split: m, dim: self.dim() });
        }
        let (a, b) = self.coords.split_at(m);
        Ok((
            PAdicPoint { p: self.p, coords: a.to_vec() },
            PAdicPoint { p: self.p, coords: b.to_vec() },
        ))
    }
}

impl fmt::Display for PAdicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for PAdicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PAdicPoint(p={}, {})", self.p, self)
    }
}

/// `Λ = {λ ∈ Q_p^× : ord λ ≡ 0 mod ℓ, ac_k(λ) ∈ R}` for a multiplicatively
/// closed set `R` of units mod `p^k`. Covers every open subgroup containing
/// `1 + p^k Z_p` with a valuation congruence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaGroup {
    p: u64,
    ord_modulus: u64,
    ac_depth: u32,
    unit_residues: BTreeSet<u64>,
}

impl LambdaGroup {
    pub fn new(p: u64, ord_modulus: u64, ac_depth: u32, residues: impl IntoIterator<Item = u64>) -> Result<Self> {
        check_prime(p)?;
        if ord_modulus == 0 {
            return Err(Error::InvalidLambdaGroup("ord modulus must be positive".into()));
        }
        let modulus = p
            .checked_pow(ac_depth)
            .ok_or_else(|| Error::InvalidLambdaGroup(format!("ac depth {ac_depth} too large")))?;
        let unit_residues: BTreeSet<u64> = residues.into_iter().map(|r| r % modulus).collect();
        if !unit_residues.contains(&(1 % modulus)) {
            return Err(Error::InvalidLambdaGroup("unit residues must contain 1".into()));
        }
        if ac_depth > 0 {
            if let Some(bad) = unit_residues.iter().find(|r| *r % p == 0) {
                return Err(Error::InvalidLambdaGroup(format!("residue {bad} is not a unit")));
            }
        }
        for a in &unit_residues {
            for b in &unit_residues {
                let prod = ((*a as u128 * *b as u128) % modulus as u128) as u64;
                if !unit_residues.contains(&prod) {
                    return Err(Error::InvalidLambdaGroup(format!(
                        "residues not closed under multiplication: {a}·{b} = {prod}"
                    )));
                }
            }
        }
        Ok(LambdaGroup { p, ord_modulus, ac_depth, unit_residues })
    }

    /// `Q_p^×` itself.
    pub fn full(p: u64) -> Result<Self> {
        Self::new(p, 1, 0, [0])
    }

    /// `{λ : ord λ ≡ 0 mod n, ac λ = 1}`.
    pub fn ord_congruence(p: u64, n: u64) -> Result<Self> {
        Self::new(p, n, 1, [1])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ord_modulus(&self) -> u64 {
        self.ord_modulus
    }

    pub fn ac_depth(&self) -> u32 {
        self.ac_depth
    }

    pub fn unit_residues(&self) -> &BTreeSet<u64> {
        &self.unit_residues
    }

    pub fn contains(&self, lambda: &Rational) -> Result<bool> {
        let v = valuation(self.p, lambda).finite().ok_or(Error::ZeroArgument("λ = 0"))?;
        if v.rem_euclid(self.ord_modulus as i64) != 0 {
            return Ok(false);
        }
        Ok(self.unit_residues.contains(&ac(self.p, lambda, self.ac_depth)?))
    }

    /// Unit representatives: integers `u ∈ [1, p^{max(k,1)})` prime to `p`
    /// whose class mod `p^k` lies in the residue set.
    pub fn unit_representatives(&self) -> Vec<u64> {
        let depth = self.ac_depth.max(1);
        let modulus = self.p.pow(self.ac_depth);
        (1..self.p.pow(depth))
            .filter(|u| u % self.p != 0 && self.unit_residues.contains(&(u % modulus)))
            .collect()
    }

    /// Elements `p^j·u` with `lo ≤ j < hi`, `j ≡ 0 mod ℓ`, ascending in `j`.
    pub fn representatives(&self, lo: i64, hi: i64) -> Vec<Rational> {
        let units = self.unit_representatives();
        let mut out = Vec::new();
        for j in lo..hi {
            if j.rem_euclid(self.ord_modulus as i64) != 0 {
                continue;
            }
            let pj = p_pow(self.p, j);
            out.extend(units.iter().map(|u| &pj * Rational::from_integer((*u).into())));
        }
        out
    }

    /// Largest valuation `j ≤ bound` with `j ≡ 0 mod ℓ`.
    pub fn aligned_ord_at_most(&self, bound: i64) -> i64 {
        let l = self.ord_modulus as i64;
        bound - bound.rem_euclid(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn ord_examples() {
        assert_eq!(PAdicPoint::zero(3, 2).ord(), Valuation::Infinity);
        let x = PAdicPoint::new(3, vec![q(9, 1), q(1, 3)]).unwrap();
        assert_eq!(x.ord(), Valuation::Finite(-1));
        assert_eq!(PAdicPoint::from_ints(2, &[4]).ord(), Valuation::Finite(2));
    }

    #[test]
    fn ac_examples() {
        assert_eq!(ac(3, &q(6, 1), 1).unwrap(), 2);
        for k in 0..4 {
            assert_eq!(ac(5, &q(1, 1), k).unwrap(), 1 % 5u64.pow(k));
        }
        assert_eq!(ac(2, &q(1, 2), 2).unwrap(), 1);
        assert_eq!(ac(3, &q(-1, 1), 2).unwrap(), 8);
        assert!(ac(3, &q(0, 1), 1).is_err());
    }

    #[test]
    fn inner_examples() {
        let z = PAdicPoint::zero(3, 2);
        let y = PAdicPoint::from_ints(3, &[5, 7]);
        assert_eq!(z.inner(&y).unwrap(), q(0, 1));
        assert_eq!(PAdicPoint::from_ints(3, &[1, 2]).inner(&PAdicPoint::from_ints(3, &[3, 4])).unwrap(), q(11, 1));
        let t = PAdicPoint::new(3, vec![q(1, 3)]).unwrap();
        assert_eq!(t.inner(&t).unwrap(), q(1, 9));
        assert!(matches!(z.inner(&PAdicPoint::zero(3, 1)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn reduce_mod_examples() {
        assert_eq!(PAdicPoint::from_ints(3, &[4]).reduce_mod(1), PAdicPoint::from_ints(3, &[1]));
        let t = PAdicPoint::new(3, vec![q(1, 3)]).unwrap();
        assert_eq!(t.reduce_mod(0), t);
        assert_eq!(reduce_rational_mod(3, &q(-1, 1), 2), q(8, 1));
        assert_eq!(reduce_rational_mod(3, &q(-1, 3), 1), q(8, 3));
        assert_eq!(reduce_rational_mod(3, &q(7, 9), -1), q(1, 9));
        assert_eq!(reduce_rational_mod(3, &q(7, 9), 0), q(7, 9));
        assert_eq!(reduce_rational_mod(3, &q(7, 9), -2), q(0, 1));
    }

    #[test]
    fn foreign_denominators_rejected() {
        assert!(matches!(
            PAdicPoint::new(2, vec![q(1, 6)]),
            Err(Error::NotPPowerDenominator { .. })
        ));
    }

    #[test]
    fn lambda_membership() {
        let full = LambdaGroup::full(3).unwrap();
        for x in [q(1, 1), q(2, 9), q(-5, 3), q(27, 1)] {
            assert!(full.contains(&x).unwrap());
        }
        let l2 = LambdaGroup::ord_congruence(3, 2).unwrap();
        assert!(l2.contains(&q(9, 1)).unwrap());
        assert!(!l2.contains(&q(3, 1)).unwrap());
        assert!(!l2.contains(&q(2, 1)).unwrap());
        assert!(l2.contains(&q(4, 1)).unwrap());
        assert!(l2.contains(&q(0, 1)).is_err());
    }

    #[test]
    fn lambda_validation() {
        assert!(LambdaGroup::new(3, 1, 1, [2]).is_err());
        assert!(LambdaGroup::new(5, 1, 1, [1, 2]).is_err());
        assert!(LambdaGroup::new(5, 1, 1, [1, 4]).is_ok());
        assert!(LambdaGroup::new(4, 1, 0, [0]).is_err());
        assert!(LambdaGroup::new(3, 0, 0, [0]).is_err());
    }

    #[test]
    fn representatives_are_members() {
        let g = LambdaGroup::new(5, 2, 1, [1, 4]).unwrap();
        let reps = g.representatives(-4, 2);
        assert_eq!(reps.len(), 3 * 2);
        for r in reps {
            assert!(g.contains(&r).unwrap());
        }
        assert_eq!(g.aligned_ord_at_most(-3), -4);
        assert_eq!(g.aligned_ord_at_most(4), 4);
    }

    fn arb_rat(p: u64) -> impl Strategy<Value = Rational> {
        (-500i64..500, 0u32..4).prop_map(move |(n, s)| Rational::new(n.into(), BigInt::from(p.pow(s))))
    }

    proptest! {
        #[test]
        fn valuation_laws((p, x, y) in prop_oneof![Just(2u64), Just(3u64), Just(5u64)].prop_flat_map(|p| (Just(p), arb_rat(p), arb_rat(p)))) {
            let (vx, vy) = (valuation(p, &x), valuation(p, &y));
            if let (Valuation::Finite(a), Valuation::Finite(b)) = (vx, vy) {
                prop_assert_eq!(valuation(p, &(&x * &y)), Valuation::Finite(a + b));
            }
            let vs = valuation(p, &(&x + &y));
            prop_assert!(vs >= vx.min(vy));
            if vx != vy {
                prop_assert_eq!(vs, vx.min(vy));
            }
        }

        #[test]
        fn reduce_mod_is_congruent_and_idempotent((p, x, alpha) in prop_oneof![Just(2u64), Just(3u64)].prop_flat_map(|p| (Just(p), arb_rat(p), -3i64..4))) {
            let r = reduce_rational_mod(p, &x, alpha);
            prop_assert!(valuation(p, &(&r - &x)) >= Valuation::Finite(alpha));
            prop_assert_eq!(reduce_rational_mod(p, &r, alpha), r.clone());
            prop_assert!(!r.is_negative());
        }

        #[test]
        fn lambda_is_a_subgroup(i in 0usize..12, j in 0usize..12) {
            let g = LambdaGroup::new(5, 2, 1, [1, 4]).unwrap();
            let reps = g.representatives(-4, 2);
            let (a, b) = (&reps[i % reps.len()], &reps[j % reps.len()]);
            prop_assert!(g.contains(&(a * b)).unwrap());
            prop_assert!(g.contains(&a.recip()).unwrap());
            let h = LambdaGroup::ord_congruence(3, 2).unwrap();
            let hr = h.representatives(-6, 4);
            let (c, d) = (&hr[i % hr.len()], &hr[j % hr.len()]);
            prop_assert!(h.contains(&(c * d)).unwrap());
            prop_assert!(h.contains(&c.recip()).unwrap());
        }
    }
}
