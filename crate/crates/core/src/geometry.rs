//! Polydiscs `B(a, α) = a + p^α Z_p^m` and the ultrametric combinatorics on
//! them: containment, splitting into sub-balls, disjointification and
//! product structure.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::padic::{p_pow, valuation, PAdicPoint, Valuation};
use crate::scalar::Rational;

/// Upper bound on the number of sub-balls produced by a single split.
const MAX_SPLIT: u128 = 1 << 24;

/// Ordered by radius exponent first (coarser balls first), then by center.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polydisc {
    alpha: i64,
    center: PAdicPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BallRelation {
    Disjoint,
    Equal,
    FirstInsideSecond,
    SecondInsideFirst,
}

impl Polydisc {
    /// The ball `center + p^alpha Z_p^m`; the center is stored canonically.
    pub fn new(center: PAdicPoint, alpha: i64) -> Self {
        Polydisc { alpha, center: center.reduce_mod(alpha) }
    }

    /// `p^alpha Z_p^m`.
    pub fn origin(p: u64, dim: usize, alpha: i64) -> Self {
        Polydisc { alpha, center: PAdicPoint::zero(p, dim) }
    }

    pub fn p(&self) -> u64 {
        self.center.p()
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn alpha(&self) -> i64 {
        self.alpha
    }

    pub fn center(&self) -> &PAdicPoint {
        &self.center
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        self.center.check_compatible(&other.center)
    }

    pub fn contains_point(&self, x: &PAdicPoint) -> Result<bool> {
        self.center.check_compatible(x)?;
        Ok(x.sub(&self.center)?.ord() >= Valuation::Finite(self.alpha))
    }

    pub fn compare(&self, other: &Self) -> Result<BallRelation> {
        self.check_compatible(other)?;
        let coarse = self.alpha.min(other.alpha);
        if self.center.reduce_mod(coarse) != other.center.reduce_mod(coarse) {
            return Ok(BallRelation::Disjoint);
        }
        Ok(match self.alpha.cmp(&other.alpha) {
            std::cmp::Ordering::Equal => BallRelation::Equal,
            std::cmp::Ordering::Greater => BallRelation::FirstInsideSecond,
            std::cmp::Ordering::Less => BallRelation::SecondInsideFirst,
        })
    }

    /// `self ⊆ other`.
    pub fn is_inside(&self, other: &Self) -> Result<bool> {
        Ok(matches!(self.compare(other)?, BallRelation::Equal | BallRelation::FirstInsideSecond))
    }

    pub fn intersects(&self, other: &Self) -> Result<bool> {
        Ok(self.compare(other)? != BallRelation::Disjoint)
    }

    /// Haar volume `p^{-αm}`.
    pub fn volume(&self) -> Rational {
        p_pow(self.p(), -self.alpha * self.dim() as i64)
    }

    /// Number of radius-`gamma` sub-balls, `p^{m(γ−α)}`.
    pub fn split_count(&self, gamma: i64) -> Result<u64> {
        if gamma < self.alpha {
            return Err(Error::InvalidRadius { alpha: self.alpha, gamma });
        }
        let exp = (gamma - self.alpha) as u128 * self.dim() as u128;
        let count = (self.p() as u128).checked_pow(exp.min(u32::MAX as u128) as u32);
        match count {
            Some(c) if c <= MAX_SPLIT => Ok(c as u64),
            _ => Err(Error::TooLarge { count_log: format!("{}^{exp}", self.p()) }),
        }
    }

    /// The radius-`gamma` sub-balls partitioning `self`, in lexicographic order
    /// of the added digit blocks (first coordinate most significant).
    pub fn split(&self, gamma: i64) -> Result<Vec<Polydisc>> {
        let count = self.split_count(gamma)?;
        if gamma == self.alpha {
            return Ok(vec![self.clone()]);
        }
        let p = self.p();
        let m = self.dim();
        let per_coord = p.pow((gamma - self.alpha) as u32);
        let step = p_pow(p, self.alpha);
        let offsets: Vec<Rational> = (0..per_coord).map(|t| &step * Rational::from_integer(BigInt::from(t))).collect();
        let mut out = Vec::with_capacity(count as usize);
        let mut digits = vec![0usize; m];
        loop {
            let coords = self
                .center
                .coords()
                .iter()
                .zip(&digits)
                .map(|(c, &d)| c + &offsets[d])
                .collect();
            out.push(Polydisc {
                alpha: gamma,
                center: PAdicPoint::new(p, coords).expect("sub-ball center in Z[1/p]"),
            });
            let mut k = m;
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                digits[k] += 1;
                if (digits[k] as u64) < per_coord {
                    break;
                }
                digits[k] = 0;
            }
        }
    }

    pub fn children(&self) -> Vec<Polydisc> {
        self.split(self.alpha + 1).expect("one-level split")
    }

    pub fn parent(&self) -> Polydisc {
        Polydisc::new(self.center.clone(), self.alpha - 1)
    }

    /// `C × D` for equal radii.
    pub fn product(&self, other: &Self) -> Result<Polydisc> {
        if self.alpha != other.alpha {
            return Err(Error::InvalidRadius { alpha: self.alpha, gamma: other.alpha });
        }
        Ok(Polydisc { alpha: self.alpha, center: self.center.concat(&other.center)? })
    }

    /// `C × D` as a list of polydiscs, refining the coarser factor.
    pub fn product_refined(&self, other: &Self) -> Result<Vec<Polydisc>> {
        let gamma = self.alpha.max(other.alpha);
        let left = self.split(gamma)?;
        let right = other.split(gamma)?;
        let mut out = Vec::with_capacity(left.len() * right.len());
        for c in &left {
            for d in &right {
                out.push(c.product(d)?);
            }
        }
        Ok(out)
    }

    /// The unique `(C, D)` with `self = C × D`, `C` of dimension `m`.
    pub fn product_split(&self, m: usize) -> Result<(Polydisc, Polydisc)> {
        let (a, b) = self.center.split_at(m)?;
        Ok((Polydisc { alpha: self.alpha, center: a }, Polydisc { alpha: self.alpha, center: b }))
    }

    /// `min_{x∈B} ord x`, i.e. the largest `β` with `B ⊆ p^β Z_p^m`.
    pub fn min_valuation(&self) -> i64 {
        self.center
            .coords()
            .iter()
            .map(|c| match valuation(self.p(), c) {
                Valuation::Finite(v) => v.min(self.alpha),
                Valuation::Infinity => self.alpha,
            })
            .min()
            .expect("nonempty center")
    }

    pub fn translate(&self, a: &PAdicPoint) -> Result<Polydisc> {
        Ok(Polydisc::new(self.center.add(a)?, self.alpha))
    }

    pub fn negate(&self) -> Polydisc {
        Polydisc::new(self.center.neg(), self.alpha)
    }

    /// `{x : p^k x ∈ B}`.
    pub fn dilate(&self, k: i64) -> Polydisc {
        let center = self.center.scale(&p_pow(self.p(), -k)).expect("power of p");
        Polydisc::new(center, self.alpha - k)
    }

    /// Whether `x` and `y` are congruent modulo `p^α` coordinate-wise.
    pub fn congruent(p: u64, x: &Rational, y: &Rational, alpha: i64) -> bool {
        let d = x - y;
        d.is_zero() || valuation(p, &d) >= Valuation::Finite(alpha)
    }
}

/// Removes every ball contained in another one ("delete the smallest"); the
/// result is pairwise disjoint with the same union, sorted canonically.
pub fn disjointify(balls: &[Polydisc]) -> Result<Vec<Polydisc>> {
    if let Some(first) = balls.first() {
        for b in &balls[1..] {
            first.check_compatible(b)?;
        }
    }
    let mut sorted = balls.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut kept: Vec<Polydisc> = Vec::new();
    for b in sorted {
        // kept balls are at least as large as b
        let mut covered = false;
        for k in &kept {
            if b.is_inside(k)? {
                covered = true;
                break;
            }
        }
        if !covered {
            kept.push(b);
        }
    }
    kept.sort();
    Ok(kept)
}

impl fmt::Display for Polydisc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({}, {})", self.center, self.alpha)
    }
}

impl fmt::Debug for Polydisc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
