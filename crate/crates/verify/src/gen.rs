//! Seeded generators for raw term lists, functions and points.

use pdk_core::padic::p_pow;
use pdk_core::{CycScalar, PAdicPoint, Polydisc, Rational, SBFunction, Term};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mostly small rationals, sometimes an integer multiple of a `p²`-th root of unity.
pub fn coefficient(rng: &mut ChaCha8Rng, p: u64) -> CycScalar {
    let mut k = rng.gen_range(-4i64..=4);
    if k == 0 {
        k = 1;
    }
    if rng.gen_bool(0.75) {
        let d = rng.gen_range(1i64..=4);
        CycScalar::from_rational(p, Rational::new(k.into(), d.into()))
    } else {
        let e = rng.gen_range(0..p * p);
        CycScalar::root_of_unity(p, 2, e).expect("level 2").scale(&Rational::from_integer(k.into()))
    }
}

/// A ball with radius in `[alpha_lo, alpha_hi]` and integer center in `[0, p²)^m`.
pub fn ball(rng: &mut ChaCha8Rng, p: u64, dim: usize, alpha_lo: i64, alpha_hi: i64) -> Polydisc {
    let center: Vec<i64> = (0..dim).map(|_| rng.gen_range(0..(p * p) as i64)).collect();
    Polydisc::new(PAdicPoint::from_ints(p, &center), rng.gen_range(alpha_lo..=alpha_hi))
}

/// Up to `max_terms` raw terms with `α ∈ [−1, 2]` and centers mod `p²`.
pub fn raw_terms(rng: &mut ChaCha8Rng, p: u64, dim: usize, max_terms: usize) -> Vec<Term> {
    let n = rng.gen_range(0..=max_terms);
    (0..n).map(|_| Term::new(coefficient(rng, p), ball(rng, p, dim, -1, 2))).collect()
}

/// Like [`raw_terms`] but with at least one term.
pub fn nonempty_raw_terms(rng: &mut ChaCha8Rng, p: u64, dim: usize, max_terms: usize) -> Vec<Term> {
    let n = rng.gen_range(1..=max_terms);
    (0..n).map(|_| Term::new(coefficient(rng, p), ball(rng, p, dim, -1, 2))).collect()
}

pub fn sb_function(rng: &mut ChaCha8Rng, p: u64, dim: usize, max_terms: usize) -> SBFunction {
    SBFunction::canonicalize(p, dim, raw_terms(rng, p, dim, max_terms)).expect("generated terms are valid")
}

pub fn nonzero_sb_function(rng: &mut ChaCha8Rng, p: u64, dim: usize, max_terms: usize) -> SBFunction {
    loop {
        let f = SBFunction::canonicalize(p, dim, nonempty_raw_terms(rng, p, dim, max_terms)).expect("valid");
        if !f.is_zero() {
            return f;
        }
    }
}

/// Coordinates `n·p^{−k}` with `n ∈ [0, p³)` and `k ∈ [0, max_denominator]`.
pub fn point(rng: &mut ChaCha8Rng, p: u64, dim: usize, max_denominator: i64) -> PAdicPoint {
    let coords = (0..dim)
        .map(|_| {
            let n = rng.gen_range(0..(p * p * p) as i64);
            Rational::from_integer(n.into()) * p_pow(p, -rng.gen_range(0..=max_denominator))
        })
        .collect();
    PAdicPoint::new(p, coords).expect("p-power denominators")
}

pub fn nonzero_point(rng: &mut ChaCha8Rng, p: u64, dim: usize, max_denominator: i64) -> PAdicPoint {
    loop {
        let x = point(rng, p, dim, max_denominator);
        if !x.is_zero() {
            return x;
        }
    }
}
