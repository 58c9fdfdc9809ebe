//! Brute-force reference computations. Everything here works on explicit
//! finite residue grids with machine-integer digit arithmetic and never calls
//! the canonical-form, Fourier or convolution code it is used to check.

use std::collections::HashMap;

use num_traits::{One, Zero};
use pdk_core::padic::p_pow;
use pdk_core::{CycScalar, PAdicPoint, Polydisc, Rational, Term};

/// Representatives `t·p^lo`, `t ∈ [0, p^{hi−lo})^m`, of `p^lo Z_p^m / p^hi Z_p^m`.
/// Index order is lexicographic with the first coordinate most significant.
#[derive(Clone, Debug)]
pub struct Grid {
    p: u64,
    dim: usize,
    lo: i64,
    hi: i64,
    side: u64,
}

impl Grid {
    pub fn new(p: u64, dim: usize, lo: i64, hi: i64) -> Self {
        assert!(hi > lo && dim > 0);
        let side = p.pow((hi - lo) as u32);
        assert!((side as u128).pow(dim as u32) <= 1 << 26, "grid too large");
        Grid { p, dim, lo, hi, side }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.side as usize).pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn digits(&self, mut idx: usize) -> Vec<u64> {
        let mut t = vec![0; self.dim];
        for j in (0..self.dim).rev() {
            t[j] = idx as u64 % self.side;
            idx /= self.side as usize;
        }
        t
    }

    pub fn index(&self, t: &[u64]) -> usize {
        t.iter().fold(0usize, |acc, d| acc * self.side as usize + (*d % self.side) as usize)
    }

    pub fn point(&self, idx: usize) -> PAdicPoint {
        let scale = p_pow(self.p, self.lo);
        let coords = self.digits(idx).into_iter().map(|t| &scale * Rational::from_integer(t.into())).collect();
        PAdicPoint::new(self.p, coords).expect("p-power denominators")
    }

    /// Haar volume of one grid cell, `p^{−hi·m}`.
    pub fn cell_volume(&self) -> Rational {
        p_pow(self.p, -self.hi * self.dim as i64)
    }

    /// Grid points lying in `ball`; needs `ball.alpha() ≤ hi`.
    pub fn members(&self, ball: &Polydisc) -> Vec<usize> {
        assert!(ball.alpha() <= self.hi, "ball finer than the grid");
        let alpha = ball.alpha();
        let mut per_coord: Vec<Vec<u64>> = Vec::with_capacity(self.dim);
        for a in ball.center().coords() {
            if alpha <= self.lo {
                // all-or-nothing: p^lo Z_p ⊆ p^α Z_p
                if !is_integral(&(a * p_pow(self.p, -alpha))) {
                    return Vec::new();
                }
                per_coord.push((0..self.side).collect());
            } else {
                let Some(c) = scaled_residue(self.p, a, -self.lo, self.side) else {
                    return Vec::new();
                };
                let step = self.p.pow((alpha - self.lo) as u32);
                per_coord.push((0..self.side / step).map(|k| c % step + k * step).collect());
            }
        }
        let mut out = vec![0usize];
        for coord in per_coord {
            out = out
                .iter()
                .flat_map(|base| coord.iter().map(move |d| base * self.side as usize + *d as usize))
                .collect();
        }
        out
    }

    /// `Σ cᵢ 1_{Bᵢ}` at every grid point, summing raw (possibly overlapping) terms.
    pub fn values(&self, terms: &[Term]) -> Vec<CycScalar> {
        assert!(terms.len() <= 64);
        let mut masks = vec![0u64; self.len()];
        for (i, t) in terms.iter().enumerate() {
            for idx in self.members(&t.ball) {
                masks[idx] |= 1 << i;
            }
        }
        let mut memo: HashMap<u64, CycScalar> = HashMap::new();
        masks
            .into_iter()
            .map(|mask| {
                memo.entry(mask)
                    .or_insert_with(|| {
                        let mut acc = CycScalar::zero(self.p);
                        for (i, t) in terms.iter().enumerate() {
                            if mask >> i & 1 == 1 {
                                acc = &acc + &t.coef;
                            }
                        }
                        acc
                    })
                    .clone()
            })
            .collect()
    }

    /// `Σ_x values(x) Ψ(⟨x, ξ⟩)·vol(cell)`: the Fourier transform of the grid
    /// function, exact when `hi + ord ξ ≥ 1`.
    pub fn character_sum(&self, values: &[CycScalar], xi: &PAdicPoint) -> CycScalar {
        let scale = p_pow(self.p, self.lo - 1);
        let steps: Vec<Rational> = xi.coords().iter().map(|c| c * &scale).collect();
        let level = steps.iter().map(|s| denominator_exponent(self.p, s)).max().unwrap_or(0);
        let modulus = self.p.pow(level);
        let steps: Vec<u64> = steps.iter().map(|s| at_level(self.p, s, level)).collect();
        let mut buckets: HashMap<u64, CycScalar> = HashMap::new();
        for (idx, v) in values.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let t = self.digits(idx);
            let e = t.iter().zip(&steps).fold(0u128, |acc, (a, b)| (acc + *a as u128 * *b as u128) % modulus as u128);
            let slot = buckets.entry(e as u64).or_insert_with(|| CycScalar::zero(self.p));
            *slot = &*slot + v;
        }
        let mut acc = CycScalar::zero(self.p);
        for (e, v) in buckets {
            let root = CycScalar::root_of_unity(self.p, level, e).expect("small level");
            acc = &acc + &(&v * &root);
        }
        acc.scale(&self.cell_volume())
    }

    /// `(1_A * 1_B)(x)/vol(cell)` for every grid point `x`: the number of
    /// `y` with `y ∈ A` and `x − y ∈ B`, coordinates taken mod `p^{hi−lo}`.
    pub fn indicator_convolution(&self, a: &[bool], b: &[bool]) -> Vec<u64> {
        let ys: Vec<Vec<u64>> = (0..self.len()).filter(|y| a[*y]).map(|y| self.digits(y)).collect();
        (0..self.len())
            .map(|x| {
                let tx = self.digits(x);
                ys.iter()
                    .filter(|ty| {
                        let diff: Vec<u64> = tx.iter().zip(ty.iter()).map(|(u, v)| (u + self.side - v) % self.side).collect();
                        b[self.index(&diff)]
                    })
                    .count() as u64
            })
            .collect()
    }

    pub fn indicator(&self, ball: &Polydisc) -> Vec<bool> {
        let mut out = vec![false; self.len()];
        for i in self.members(ball) {
            out[i] = true;
        }
        out
    }
}

fn is_integral(x: &Rational) -> bool {
    x.denom().is_one()
}

/// `x·p^shift mod modulus` when that is an integer.
fn scaled_residue(p: u64, x: &Rational, shift: i64, modulus: u64) -> Option<u64> {
    let y = x * p_pow(p, shift);
    if !is_integral(&y) {
        return None;
    }
    let m = num_bigint::BigInt::from(modulus);
    let r = num_integer::Integer::mod_floor(&y.to_integer(), &m);
    Some(r.try_into().expect("fits"))
}

/// Smallest `k ≥ 0` with `x·p^k` integral.
fn denominator_exponent(p: u64, x: &Rational) -> u32 {
    let mut d = x.denom().clone();
    let mut k = 0;
    while !d.is_one() {
        d /= p;
        k += 1;
    }
    k
}

/// `x·p^level mod p^level`.
fn at_level(p: u64, x: &Rational, level: u32) -> u64 {
    scaled_residue(p, x, level as i64, p.pow(level)).expect("denominator within level")
}

/// `Ψ(x) = e^{2πi{x/p}} = ζ_{p^k}^e` as the pair `(k, e)`, read from the
/// digits of `x/p`.
pub fn psi_digits(p: u64, x: &Rational) -> (u32, u64) {
    let y = x * p_pow(p, -1);
    let k = denominator_exponent(p, &y);
    (k, at_level(p, &y, k))
}

pub fn psi_value(p: u64, x: &Rational) -> CycScalar {
    let (k, e) = psi_digits(p, x);
    CycScalar::root_of_unity(p, k, e).expect("small level")
}

/// Whether `x ∈ B(a, α)`, i.e. `(x − a)/p^α` has integral coordinates.
pub fn ball_contains(ball: &Polydisc, x: &PAdicPoint) -> bool {
    let scale = p_pow(ball.p(), -ball.alpha());
    ball.center().coords().iter().zip(x.coords()).all(|(a, b)| is_integral(&((b - a) * &scale)))
}

pub fn raw_eval(p: u64, terms: &[Term], x: &PAdicPoint) -> CycScalar {
    terms
        .iter()
        .filter(|t| ball_contains(&t.ball, x))
        .fold(CycScalar::zero(p), |acc, t| &acc + &t.coef)
}

/// `∫_B Ψ(⟨x, η⟩) dx`, summed over the points of `B` at the resolution where
/// the character is constant on cells.
pub fn modulated_ball_integral(ball: &Polydisc, eta: &PAdicPoint) -> CycScalar {
    let p = ball.p();
    let alpha = ball.alpha();
    let eta_ord = eta
        .coords()
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| -(denominator_exponent(p, c) as i64))
        .min();
    let hi = match eta_ord {
        Some(o) => alpha.max(1 - o),
        None => alpha,
    };
    let steps: Vec<Rational> = eta.coords().iter().map(|c| c * p_pow(p, alpha - 1)).collect();
    let base = ball.center().inner(eta).expect("matching shapes") * p_pow(p, -1);
    let level = steps.iter().chain([&base]).map(|s| denominator_exponent(p, s)).max().unwrap_or(0);
    let modulus = p.pow(level) as u128;
    let steps: Vec<u128> = steps.iter().map(|s| at_level(p, s, level) as u128).collect();
    let e0 = at_level(p, &base, level) as u128;
    let per = p.pow((hi - alpha) as u32);
    let mut counts: HashMap<u64, u64> = HashMap::new();
    let total = (per as usize).pow(ball.dim() as u32);
    for idx in 0..total {
        let mut rest = idx as u64;
        let mut e = e0;
        for s in steps.iter().rev() {
            e = (e + (rest % per) as u128 * s) % modulus;
            rest /= per;
        }
        *counts.entry(e as u64).or_default() += 1;
    }
    let vol = p_pow(p, -hi * ball.dim() as i64);
    CycScalar::from_cyclic(p, level, counts.into_iter().map(|(e, c)| (e, &vol * Rational::from_integer(c.into()))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(p: u64, c: &[i64], alpha: i64) -> Polydisc {
        Polydisc::new(PAdicPoint::from_ints(p, c), alpha)
    }

    #[test]
    fn members_count_haar_cells() {
        let g = Grid::new(3, 2, -1, 2);
        assert_eq!(g.members(&ball(3, &[0, 0], 0)).len(), 81);
        assert_eq!(g.members(&ball(3, &[1, 2], 2)).len(), 1);
        assert_eq!(g.members(&ball(3, &[0, 0], -3)).len(), g.len());
        let off = Polydisc::new(PAdicPoint::new(3, vec![Rational::new(1.into(), 9.into()), Rational::from_integer(0.into())]).unwrap(), 0);
        assert!(g.members(&off).is_empty());
    }

    #[test]
    fn unit_ball_transform() {
        let g = Grid::new(2, 1, 0, 2);
        let vals = g.values(&[Term::new(CycScalar::one(2), ball(2, &[0], 0))]);
        assert!(g.character_sum(&vals, &PAdicPoint::from_ints(2, &[2])).is_one());
        assert!(g.character_sum(&vals, &PAdicPoint::from_ints(2, &[1])).is_zero());
    }

    #[test]
    fn ball_integrals_of_characters() {
        let b = ball(3, &[1], 0);
        let eta = PAdicPoint::new(3, vec![Rational::new(1.into(), 3.into())]).unwrap();
        assert!(modulated_ball_integral(&b, &eta).is_zero());
        let b = ball(3, &[1], 1);
        assert!(modulated_ball_integral(&b, &eta).is_zero());
        let one = PAdicPoint::from_ints(3, &[1]);
        assert_eq!(modulated_ball_integral(&b, &one), psi_value(3, &Rational::from_integer(1.into())).scale(&p_pow(3, -1)));
    }

    #[test]
    fn character_convention() {
        assert!(psi_value(3, &Rational::from_integer(3.into())).is_one());
        assert_eq!(psi_value(3, &Rational::from_integer(1.into())), CycScalar::root_of_unity(3, 1, 1).unwrap());
        assert_eq!(psi_value(3, &Rational::new(1.into(), 3.into())), CycScalar::root_of_unity(3, 2, 1).unwrap());
    }

    #[test]
    fn convolution_counts() {
        let g = Grid::new(2, 1, 0, 2);
        let a = g.indicator(&ball(2, &[0], 0));
        let counts = g.indicator_convolution(&a, &a);
        assert!(counts.iter().all(|c| *c == 4));
    }
}
