//! Exact arithmetic in the p-power cyclotomic tower `Q(ζ_{p^∞})`.
//!
//! An element is stored at its minimal level `k` as a sparse vector over the
//! power basis `1, ζ, …, ζ^{φ(p^k)-1}` of `Q(ζ_{p^k})`. Because the basis of a
//! subfield `Q(ζ_{p^{k-1}})` is exactly the set of basis vectors whose index is
//! divisible by `p`, "support ⊆ pZ" is the descent rule and equality of
//! canonical elements is structural.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Largest level accepted anywhere; keeps `p^level` inside `u64`.
fn checked_order(p: u64, level: u32) -> Result<u64> {
    p.checked_pow(level).ok_or(Error::LevelOverflow { p, level })
}

fn order(p: u64, level: u32) -> u64 {
    p.pow(level)
}

/// Euler totient of `p^k`, with `φ(p^0) = 1`.
pub fn totient(p: u64, level: u32) -> u64 {
    if level == 0 {
        1
    } else {
        (p - 1) * p.pow(level - 1)
    }
}

/// If `den` is `p^s`, returns `s`.
pub fn p_power_exponent(p: u64, den: &BigInt) -> Option<u32> {
    let pb = BigInt::from(p);
    let mut d = den.abs();
    let mut s = 0;
    while !d.is_one() {
        if d.is_zero() {
            return None;
        }
        let (q, r) = d.div_rem(&pb);
        if !r.is_zero() {
            return None;
        }
        d = q;
        s += 1;
    }
    Some(s)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycScalar {
    p: u64,
    level: u32,
    coeffs: BTreeMap<u64, Rational>,
}

impl CycScalar {
    pub fn zero(p: u64) -> Self {
        CycScalar { p, level: 0, coeffs: BTreeMap::new() }
    }

    pub fn one(p: u64) -> Self {
        Self::from_rational(p, Rational::one())
    }

    pub fn from_rational(p: u64, r: Rational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !r.is_zero() {
            coeffs.insert(0, r);
        }
        CycScalar { p, level: 0, coeffs }
    }

    pub fn from_int(p: u64, n: i64) -> Self {
        Self::from_rational(p, Rational::from_integer(n.into()))
    }

    /// `ζ_{p^level}^exponent`.
    pub fn root_of_unity(p: u64, level: u32, exponent: u64) -> Result<Self> {
        let n = checked_order(p, level)?;
        Ok(Self::from_cyclic(p, level, [(exponent % n, Rational::one())]))
    }

    /// Builds `Σ c·x^e` read in `Q[x]/(x^{p^level} − 1)` at `x = ζ_{p^level}` and
    /// reduces it to canonical form. Exponents are taken modulo `p^level`.
    pub fn from_cyclic<I>(p: u64, level: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (u64, Rational)>,
    {
        let n = order(p, level);
        let mut raw: BTreeMap<u64, Rational> = BTreeMap::new();
        for (e, c) in terms {
            if c.is_zero() {
                continue;
            }
            *raw.entry(e % n).or_insert_with(Rational::zero) += c;
        }
        Self::normalize(p, level, raw)
    }

    /// Builds an element from a dense power-basis vector at `level`; the
    /// vector must have length `φ(p^level)`.
    pub fn from_power_basis(p: u64, level: u32, coeffs: Vec<Rational>) -> Result<Self> {
        if p == 2 && level == 1 {
            return Err(Error::InvalidScalar(
                "level 1 does not exist for p = 2 (ζ₂ = −1 is rational)".into(),
            ));
        }
        let phi = totient(p, level);
        if coeffs.len() as u64 != phi {
            return Err(Error::InvalidScalar(format!(
                "level {level} needs {phi} coefficients, got {}",
                coeffs.len()
            )));
        }
        let raw = coeffs
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j as u64, c))
            .collect();
        Ok(Self::normalize(p, level, raw))
    }

    /// Reduces a map of exponents in `[0, p^level)` by `Φ_{p^level}` and descends
    /// to the minimal level.
    fn normalize(p: u64, mut level: u32, mut raw: BTreeMap<u64, Rational>) -> Self {
        if level > 0 {
            let phi = totient(p, level);
            let step = order(p, level - 1);
            // x^{φ+r} = −Σ_{i<p−1} x^{r + i·p^{k−1}}, all targets below φ
            let high: Vec<(u64, Rational)> = raw.split_off(&phi).into_iter().collect();
            for (e, c) in high {
                let r = e - phi;
                for i in 0..p - 1 {
                    *raw.entry(r + i * step).or_insert_with(Rational::zero) -= &c;
                }
            }
        }
        raw.retain(|_, c| !c.is_zero());
        while level > 0 && raw.keys().all(|j| j % p == 0) {
            raw = raw.into_iter().map(|(j, c)| (j / p, c)).collect();
            level -= 1;
        }
        if p == 2 && level == 1 {
            level = 0;
        }
        CycScalar { p, level, coeffs: raw }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeff(&self, j: u64) -> Rational {
        self.coeffs.get(&j).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero power-basis coefficients, ascending by index.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.coeffs.iter().map(|(j, c)| (*j, c))
    }

    pub fn dense_coeffs(&self) -> Vec<Rational> {
        (0..totient(self.p, self.level)).map(|j| self.coeff(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.level == 0 && self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|c| c.is_one())
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        (self.level == 0).then(|| self.coeff(0))
    }

    fn lifted(&self, level: u32) -> impl Iterator<Item = (u64, Rational)> + '_ {
        let stride = order(self.p, level - self.level.min(level));
        self.coeffs.iter().map(move |(j, c)| (j * stride, c.clone()))
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::MismatchedPrime { left: self.p, right: other.p });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let level = self.level.max(other.level);
        Ok(Self::from_cyclic(self.p, level, self.lifted(level).chain(other.lifted(level))))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.p));
        }
        if let Some(r) = self.as_rational() {
            return Ok(other.scale(&r));
        }
        if let Some(r) = other.as_rational() {
            return Ok(self.scale(&r));
        }
        let level = self.level.max(other.level);
        let n = order(self.p, level);
        let a: Vec<(u64, Rational)> = self.lifted(level).collect();
        let b: Vec<(u64, Rational)> = other.lifted(level).collect();
        let mut raw: BTreeMap<u64, Rational> = BTreeMap::new();
        for (i, x) in &a {
            for (j, y) in &b {
                *raw.entry((i + j) % n).or_insert_with(Rational::zero) += x * y;
            }
        }
        raw.retain(|_, c| !c.is_zero());
        Ok(Self::normalize(self.p, level, raw))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero(self.p);
        }
        CycScalar {
            p: self.p,
            level: self.level,
            coeffs: self.coeffs.iter().map(|(j, c)| (*j, c * r)).collect(),
        }
    }

    fn neg_ref(&self) -> Self {
        CycScalar {
            p: self.p,
            level: self.level,
            coeffs: self.coeffs.iter().map(|(j, c)| (*j, -c)).collect(),
        }
    }

    /// Complex conjugation, `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let n = order(self.p, self.level);
        Self::from_cyclic(
            self.p,
            self.level,
            self.coeffs.iter().map(|(j, c)| ((n - j) % n, c.clone())),
        )
    }

    /// `|x|²` as an exact element (it is real, but not necessarily rational).
    pub fn norm_sqr(&self) -> Self {
        self * &self.conj()
    }

    pub fn to_complex(&self) -> Complex64 {
        let n = order(self.p, self.level) as f64;
        self.coeffs
            .iter()
            .map(|(j, c)| {
                let angle = std::f64::consts::TAU * (*j as f64) / n;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), angle)
            })
            .sum()
    }

    pub fn sum<'a, I>(p: u64, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a CycScalar>,
    {
        items.into_iter().try_fold(Self::zero(p), |acc, x| acc.try_add(x))
    }
}

/// The additive character `Ψ(x) = e^{2πi·{x/p}_p}`: trivial on `pZ_p`,
/// `Ψ(1) = ζ_p`. Defined for rationals whose denominator is a power of `p`.
pub fn psi(p: u64, x: &Rational) -> Result<CycScalar> {
    let s = p_power_exponent(p, x.denom())
        .ok_or_else(|| Error::NotPPowerDenominator { p, value: x.to_string() })?;
    let level = s + 1;
    let n = checked_order(p, level)?;
    let e = x.numer().mod_floor(&BigInt::from(n));
    let e = e.to_u64().expect("residue below p^level fits u64");
    Ok(CycScalar::from_cyclic(p, level, [(e, Rational::one())]))
}

impl Add for &CycScalar {
    type Output = CycScalar;
    /// Panics on mismatched primes; use [`CycScalar::try_add`] to handle that.
    fn add(self, rhs: &CycScalar) -> CycScalar {
        self.try_add(rhs).expect("cyclotomic add")
    }
}

impl Sub for &CycScalar {
    type Output = CycScalar;
    fn sub(self, rhs: &CycScalar) -> CycScalar {
        self.try_sub(rhs).expect("cyclotomic sub")
    }
}

impl Mul for &CycScalar {
    type Output = CycScalar;
    fn mul(self, rhs: &CycScalar) -> CycScalar {
        self.try_mul(rhs).expect("cyclotomic mul")
    }
}

impl Neg for &CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        self.neg_ref()
    }
}

impl Add for CycScalar {
    type Output = CycScalar;
    fn add(self, rhs: CycScalar) -> CycScalar {
        &self + &rhs
    }
}

impl Sub for CycScalar {
    type Output = CycScalar;
    fn sub(self, rhs: CycScalar) -> CycScalar {
        &self - &rhs
    }
}

impl Mul for CycScalar {
    type Output = CycScalar;
    fn mul(self, rhs: CycScalar) -> CycScalar {
        &self * &rhs
    }
}

impl Neg for CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        self.neg_ref()
    }
}

/// Exact literal: `0`, `-1/2`, `3 + 1/2*z9^2 - z9^4`. `zN` is `e^{2πi/N}`.
impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let n = order(self.p, self.level);
        for (idx, (j, c)) in self.coeffs.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if *j == 0 {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            write!(f, "z{n}")?;
            if *j > 1 {
                write!(f, "^{j}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycScalar(p={}, {})", self.p, self)
    }
}
