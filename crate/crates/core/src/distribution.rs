//! Distributions on `Q_p^m` as finitely additive pairings on the polydisc
//! basis. Built-in atoms carry closed-form pairings; `Custom` atoms are given
//! by their values on polydiscs down to a declared depth.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{BallRelation, Polydisc};
use crate::padic::PAdicPoint;
use crate::schwartz::SBFunction;
use crate::scalar::CycScalar;

pub type BallOracle = Arc<dyn Fn(&Polydisc) -> Result<CycScalar> + Send + Sync>;

#[derive(Clone)]
pub enum CustomSource {
    /// Values on the radius-`depth_limit` balls; absent balls pair to zero.
    Table(BTreeMap<Polydisc, CycScalar>),
    Oracle(BallOracle),
}

/// A pairing known on every polydisc of radius at most `depth_limit`.
#[derive(Clone)]
pub struct CustomPairing {
    depth_limit: i64,
    source: CustomSource,
}

impl CustomPairing {
    pub fn from_table(depth_limit: i64, table: BTreeMap<Polydisc, CycScalar>) -> Result<Self> {
        for ball in table.keys() {
            if ball.alpha() != depth_limit {
                return Err(Error::InvalidTable(format!(
                    "entry {ball} has radius {} but the depth limit is {depth_limit}",
                    ball.alpha()
                )));
            }
        }
        Ok(CustomPairing { depth_limit, source: CustomSource::Table(table) })
    }

    pub fn from_oracle(depth_limit: i64, oracle: BallOracle) -> Self {
        CustomPairing { depth_limit, source: CustomSource::Oracle(oracle) }
    }

    pub fn depth_limit(&self) -> i64 {
        self.depth_limit
    }

    pub fn source(&self) -> &CustomSource {
        &self.source
    }

    pub fn pair_indicator(&self, ball: &Polydisc) -> Result<CycScalar> {
        if ball.alpha() > self.depth_limit {
            return Err(Error::DepthExceeded { alpha: ball.alpha(), limit: self.depth_limit });
        }
        match &self.source {
            CustomSource::Table(table) => {
                let mut acc = CycScalar::zero(ball.p());
                for (cell, v) in table {
                    if cell.is_inside(ball)? {
                        acc = acc.try_add(v)?;
                    }
                }
                Ok(acc)
            }
            CustomSource::Oracle(f) => f(ball),
        }
    }
}

impl fmt::Debug for CustomPairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            CustomSource::Table(t) => write!(f, "Custom(table of {}, depth {})", t.len(), self.depth_limit),
            CustomSource::Oracle(_) => write!(f, "Custom(oracle, depth {})", self.depth_limit),
        }
    }
}

#[derive(Clone, Debug)]
pub enum DistAtom {
    /// `φ ↦ ∫ f φ`.
    Density(SBFunction),
    /// `φ ↦ weight·φ(point)`.
    Dirac { point: PAdicPoint, weight: CycScalar },
    /// On `Q_p^{2m}`: `φ ↦ ∫ φ(x, x) dx`.
    Diagonal { half_dim: usize },
    Custom(CustomPairing),
}

impl DistAtom {
    pub fn is_custom(&self) -> bool {
        matches!(self, DistAtom::Custom(_))
    }

    fn pair(&self, phi: &SBFunction) -> Result<CycScalar> {
        let p = phi.p();
        match self {
            DistAtom::Density(f) => pair_density(f, phi),
            DistAtom::Dirac { point, weight } => weight.try_mul(&phi.eval(point)?),
            DistAtom::Diagonal { half_dim } => {
                let mut acc = CycScalar::zero(p);
                for t in phi.terms() {
                    let (c, d) = t.ball.product_split(*half_dim)?;
                    if c == d {
                        acc = acc.try_add(&t.coef.scale(&c.volume()))?;
                    }
                }
                Ok(acc)
            }
            DistAtom::Custom(custom) => {
                if let Some(t) = phi.terms().iter().find(|t| t.ball.alpha() > custom.depth_limit) {
                    return Err(Error::DepthExceeded { alpha: t.ball.alpha(), limit: custom.depth_limit });
                }
                let mut acc = CycScalar::zero(p);
                for t in phi.terms() {
                    acc = acc.try_add(&t.coef.try_mul(&custom.pair_indicator(&t.ball)?)?)?;
                }
                Ok(acc)
            }
        }
    }
}

/// `∫ f φ`, summing over intersecting pairs of canonical terms.
fn pair_density(f: &SBFunction, phi: &SBFunction) -> Result<CycScalar> {
    f.check_compatible(phi)?;
    let mut acc = CycScalar::zero(f.p());
    for a in f.terms() {
        for b in phi.terms() {
            let smaller = match a.ball.compare(&b.ball)? {
                BallRelation::Disjoint => continue,
                BallRelation::Equal | BallRelation::FirstInsideSecond => &a.ball,
                BallRelation::SecondInsideFirst => &b.ball,
            };
            acc = acc.try_add(&a.coef.try_mul(&b.coef)?.scale(&smaller.volume()))?;
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct Distribution {
    p: u64,
    dim: usize,
    atoms: Vec<(CycScalar, DistAtom)>,
}

impl Distribution {
    pub fn zero(p: u64, dim: usize) -> Self {
        Distribution { p, dim, atoms: Vec::new() }
    }

    pub fn from_atoms(p: u64, dim: usize, atoms: Vec<(CycScalar, DistAtom)>) -> Result<Self> {
        let mut u = Self::zero(p, dim);
        for (w, a) in atoms {
            u.push(w, a)?;
        }
        Ok(u)
    }

    pub fn push(&mut self, weight: CycScalar, atom: DistAtom) -> Result<()> {
        let (p, dim) = (self.p, self.dim);
        let check = |q: u64, d: usize| -> Result<()> {
            if q != p {
                return Err(Error::MismatchedPrime { left: p, right: q });
            }
            if d != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: d });
            }
            Ok(())
        };
        if weight.p() != p {
            return Err(Error::MismatchedPrime { left: p, right: weight.p() });
        }
        match &atom {
            DistAtom::Density(f) => check(f.p(), f.dim())?,
            DistAtom::Dirac { point, weight } => {
                check(point.p(), point.dim())?;
                check(weight.p(), dim)?;
            }
            DistAtom::Diagonal { half_dim } => {
                if *half_dim == 0 {
                    return Err(Error::BadSplit { split: 0, dim });
                }
                check(p, 2 * half_dim)?;
            }
            DistAtom::Custom(c) => {
                if let CustomSource::Table(t) = &c.source {
                    for ball in t.keys() {
                        check(ball.p(), ball.dim())?;
                    }
                }
            }
        }
        self.atoms.push((weight, atom));
        Ok(())
    }

    pub fn density(f: SBFunction) -> Self {
        Distribution { p: f.p(), dim: f.dim(), atoms: vec![(CycScalar::one(f.p()), DistAtom::Density(f))] }
    }

    pub fn dirac(point: PAdicPoint) -> Self {
        let p = point.p();
        Distribution {
            p,
            dim: point.dim(),
            atoms: vec![(CycScalar::one(p), DistAtom::Dirac { point, weight: CycScalar::one(p) })],
        }
    }

    pub fn diagonal(p: u64, half_dim: usize) -> Result<Self> {
        Self::from_atoms(p, 2 * half_dim, vec![(CycScalar::one(p), DistAtom::Diagonal { half_dim })])
    }

    pub fn custom(p: u64, dim: usize, pairing: CustomPairing) -> Result<Self> {
        Self::from_atoms(p, dim, vec![(CycScalar::one(p), DistAtom::Custom(pairing))])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[(CycScalar, DistAtom)] {
        &self.atoms
    }

    pub fn has_custom(&self) -> bool {
        self.atoms.iter().any(|(_, a)| a.is_custom())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut u = self.clone();
        for (w, a) in &other.atoms {
            u.push(w.clone(), a.clone())?;
        }
        Ok(u)
    }

    pub fn scale(&self, c: &CycScalar) -> Result<Self> {
        let atoms = self.atoms.iter().map(|(w, a)| Ok((w.try_mul(c)?, a.clone()))).collect::<Result<Vec<_>>>()?;
        Ok(Distribution { p: self.p, dim: self.dim, atoms })
    }

    fn check_fn(&self, phi: &SBFunction) -> Result<()> {
        if phi.p() != self.p {
            return Err(Error::MismatchedPrime { left: self.p, right: phi.p() });
        }
        if phi.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: phi.dim() });
        }
        Ok(())
    }

    /// `⟨u, φ⟩`.
    pub fn pair(&self, phi: &SBFunction) -> Result<CycScalar> {
        self.check_fn(phi)?;
        let mut acc = CycScalar::zero(self.p);
        for (w, atom) in &self.atoms {
            let v = atom.pair(phi)?;
            if !v.is_zero() {
                acc = acc.try_add(&w.try_mul(&v)?)?;
            }
        }
        Ok(acc)
    }

    pub fn pair_indicator(&self, ball: &Polydisc) -> Result<CycScalar> {
        self.pair(&SBFunction::indicator(ball.clone()))
    }

    /// `⟨u, φ·Ψ(⟨·, η⟩)⟩`.
    pub fn modulated_pair(&self, phi: &SBFunction, eta: &PAdicPoint) -> Result<CycScalar> {
        self.check_fn(phi)?;
        self.pair(&phi.modulate(eta)?)
    }

    /// Sub-balls `B ⊆ region` of radius `alpha` whose indicator pairings with
    /// `self` and `other` disagree; the first one found, if any.
    pub fn first_basis_mismatch(&self, other: &Self, region: &Polydisc, alpha: i64) -> Result<Option<BasisMismatch>> {
        if self.p != other.p {
            return Err(Error::MismatchedPrime { left: self.p, right: other.p });
        }
        if self.dim != other.dim || region.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim.max(region.dim()) });
        }
        for ball in region.split(alpha)? {
            let left = self.pair_indicator(&ball)?;
            let right = other.pair_indicator(&ball)?;
            if left != right {
                return Ok(Some(BasisMismatch { ball, left, right }));
            }
        }
        Ok(None)
    }

    /// Finite additivity on every sub-ball of `region` coarser than `depth`:
    /// the pairing with `1_B` equals the sum over the children of `B`.
    pub fn first_additivity_failure(&self, region: &Polydisc, depth: i64) -> Result<Option<Polydisc>> {
        for alpha in region.alpha()..depth {
            for ball in region.split(alpha)? {
                let whole = self.pair_indicator(&ball)?;
                let mut parts = CycScalar::zero(self.p);
                for child in ball.children() {
                    parts = parts.try_add(&self.pair_indicator(&child)?)?;
                }
                if whole != parts {
                    return Ok(Some(ball));
                }
            }
        }
        Ok(None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisMismatch {
    pub ball: Polydisc,
    pub left: CycScalar,
    pub right: CycScalar,
}

/// Compares `⟨u, 1_B⟩` and `⟨v, 1_B⟩` for every radius-`depth` sub-ball `B`
/// of `region`; `None` when they all agree.
pub fn dist_equal_on_basis(u: &Distribution, v: &Distribution, depth: i64, region: &Polydisc) -> Result<Option<BasisMismatch>> {
    u.first_basis_mismatch(v, region, depth)
}

/// A ball `B` with `⟨T_f, 1_B⟩ ≠ 0`, searched among polydiscs of radius
/// `max(probe_depth, α⁺(f))` inside `supp f`.
pub fn density_zero_witness(f: &SBFunction, probe_depth: i64) -> Result<Option<(Polydisc, CycScalar)>> {
    let Ok(fine) = f.local_constancy_radius() else {
        return Ok(None);
    };
    let u = Distribution::density(f.clone());
    let depth = probe_depth.max(fine);
    for ball in f.support() {
        for cell in ball.split(depth)? {
            let v = u.pair_indicator(&cell)?;
            if !v.is_zero() {
                return Ok(Some((cell, v)));
            }
        }
    }
    Ok(None)
}

/// Whether `T_f` vanishes on every probed polydisc; equivalent to `f = 0`.
pub fn density_is_zero(f: &SBFunction, probe_depth: i64) -> Result<bool> {
    Ok(density_zero_witness(f, probe_depth)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::p_pow;
    use crate::scalar::{psi, Rational};
    use crate::schwartz::Term;
    use proptest::prelude::*;

    fn ball(p: u64, c: &[i64], alpha: i64) -> Polydisc {
        Polydisc::new(PAdicPoint::from_ints(p, c), alpha)
    }

    fn ind(p: u64, c: &[i64], alpha: i64) -> SBFunction {
        SBFunction::indicator(ball(p, c, alpha))
    }

    fn pt(p: u64, c: &[i64]) -> PAdicPoint {
        PAdicPoint::from_ints(p, c)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn diagonal_oracle(p: u64, m: usize, depth: i64) -> Distribution {
        let d = Distribution::diagonal(p, m).unwrap();
        let oracle: BallOracle = Arc::new(move |b| d.pair_indicator(b));
        Distribution::custom(p, 2 * m, CustomPairing::from_oracle(depth, oracle)).unwrap()
    }

    #[test]
    fn density_pairing_is_integral() {
        let f = ind(3, &[1], 1).scale_rational(&q(2, 1));
        let u = Distribution::density(f.clone());
        assert_eq!(u.pair(&ind(3, &[0], 0)).unwrap(), CycScalar::from_rational(3, q(2, 3)));
        assert_eq!(u.pair(&ind(3, &[0], 1)).unwrap(), CycScalar::zero(3));
        assert_eq!(u.pair(&ind(3, &[4], 2)).unwrap(), CycScalar::from_rational(3, q(2, 9)));
    }

    #[test]
    fn dirac_and_diagonal_examples() {
        let d = Distribution::dirac(PAdicPoint::zero(5, 1));
        assert!(d.pair(&ind(5, &[0], 0)).unwrap().is_one());
        let diag = Distribution::diagonal(3, 1).unwrap();
        assert!(diag.pair(&ind(3, &[0, 1], 1)).unwrap().is_zero());
        assert_eq!(diag.pair(&ind(3, &[2, 2], 1)).unwrap(), CycScalar::from_rational(3, q(1, 3)));
        assert!(Distribution::diagonal(3, 1).unwrap().pair(&ind(3, &[0], 0)).is_err());
    }

    #[test]
    fn modulated_pair_examples() {
        let phi = ind(3, &[1], 1).add(&ind(3, &[0], 0)).unwrap();
        let a = PAdicPoint::new(3, vec![q(4, 3)]).unwrap();
        let d = Distribution::dirac(a.clone());
        let eta = PAdicPoint::new(3, vec![q(2, 9)]).unwrap();
        assert_eq!(d.modulated_pair(&phi, &PAdicPoint::zero(3, 1)).unwrap(), d.pair(&phi).unwrap());
        let expect = &phi.eval(&a).unwrap() * &psi(3, &a.inner(&eta).unwrap()).unwrap();
        assert_eq!(d.modulated_pair(&phi, &eta).unwrap(), expect);

        let f = ind(3, &[2], 1).add(&ind(3, &[0], -1).scale_rational(&q(1, 2))).unwrap();
        let u = Distribution::density(f.clone());
        let spectrum = f.mul(&phi).unwrap().fourier().unwrap();
        for e in [q(0, 1), q(1, 3), q(5, 9), q(7, 1)] {
            let eta = PAdicPoint::new(3, vec![e]).unwrap();
            assert_eq!(u.modulated_pair(&phi, &eta).unwrap(), spectrum.eval(&eta).unwrap());
        }
    }

    #[test]
    fn custom_tables() {
        let mut table = BTreeMap::new();
        table.insert(ball(2, &[1], 2), CycScalar::from_int(2, 3));
        table.insert(ball(2, &[2], 2), CycScalar::from_int(2, -1));
        let c = CustomPairing::from_table(2, table.clone()).unwrap();
        let u = Distribution::custom(2, 1, c).unwrap();
        assert_eq!(u.pair_indicator(&ball(2, &[0], 0)).unwrap(), CycScalar::from_int(2, 2));
        assert_eq!(u.pair_indicator(&ball(2, &[1], 1)).unwrap(), CycScalar::from_int(2, 3));
        assert_eq!(u.pair_indicator(&ball(2, &[0], 3)), Err(Error::DepthExceeded { alpha: 3, limit: 2 }));
        assert!(u.first_additivity_failure(&ball(2, &[0], -1), 2).unwrap().is_none());
        table.insert(ball(2, &[0], 1), CycScalar::one(2));
        assert!(matches!(CustomPairing::from_table(2, table), Err(Error::InvalidTable(_))));
    }

    #[test]
    fn basis_comparison_examples() {
        let u = Distribution::density(ind(2, &[0], 0));
        assert!(dist_equal_on_basis(&u, &u, 2, &ball(2, &[0], 0)).unwrap().is_none());
        let d = Distribution::dirac(PAdicPoint::zero(2, 1));
        let mismatch = dist_equal_on_basis(&u, &d, 1, &ball(2, &[0], 0)).unwrap().unwrap();
        assert_eq!(mismatch.ball, ball(2, &[0], 1));
        let odd = ball(2, &[1], 1);
        assert_eq!(u.pair_indicator(&odd).unwrap(), CycScalar::from_rational(2, q(1, 2)));
        assert!(d.pair_indicator(&odd).unwrap().is_zero());

        let diag = Distribution::diagonal(3, 1).unwrap();
        let wrapped = diagonal_oracle(3, 1, 4);
        assert!(dist_equal_on_basis(&diag, &wrapped, 2, &ball(3, &[0, 0], 0)).unwrap().is_none());
    }

    #[test]
    fn injectivity_examples() {
        assert!(density_is_zero(&SBFunction::zero(3, 1), 2).unwrap());
        let (b, v) = density_zero_witness(&ind(3, &[0], 0), 0).unwrap().unwrap();
        assert_eq!(b, ball(3, &[0], 0));
        assert!(v.is_one());
        let telescoping = ind(2, &[0], 1).sub(&ind(2, &[0], 1)).unwrap();
        assert!(density_is_zero(&telescoping, 2).unwrap());
        let balanced = ind(2, &[0], 1).sub(&ind(2, &[1], 1)).unwrap();
        assert!(!density_is_zero(&balanced, 0).unwrap());
    }

    fn arb_fn(p: u64, dim: usize) -> impl Strategy<Value = SBFunction> {
        let n = (p * p) as i64;
        prop::collection::vec((prop::collection::vec(0..n, dim), -1i64..=2, -3i64..=3), 0..4).prop_map(move |ts| {
            SBFunction::canonicalize(
                p,
                dim,
                ts.into_iter().map(|(c, a, k)| Term::new(CycScalar::from_int(p, k), ball(p, &c, a))),
            )
            .unwrap()
        })
    }

    fn mixed(p: u64, f: SBFunction, a: i64, b: i64) -> Distribution {
        let mut u = Distribution::density(f);
        u.push(
            CycScalar::from_int(p, 2),
            DistAtom::Dirac { point: pt(p, &[a, b]), weight: psi(p, &q(1, p as i64)).unwrap() },
        )
        .unwrap();
        u.push(CycScalar::from_int(p, -1), DistAtom::Diagonal { half_dim: 1 }).unwrap();
        u
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn pairing_is_linear(f in arb_fn(3, 2), phi in arb_fn(3, 2), chi in arb_fn(3, 2), a in 0i64..9, b in 0i64..9, k in -3i64..3) {
            let u = mixed(3, f, a, b);
            let c = CycScalar::from_int(3, k);
            let combo = phi.scale(&c).unwrap().add(&chi).unwrap();
            let lhs = u.pair(&combo).unwrap();
            let rhs = &(&c * &u.pair(&phi).unwrap()) + &u.pair(&chi).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn built_in_atoms_are_finitely_additive(f in arb_fn(2, 2), a in 0i64..4, b in 0i64..4) {
            let u = mixed(2, f, a, b);
            prop_assert!(u.first_additivity_failure(&ball(2, &[0, 0], -1), 3).unwrap().is_none());
        }

        #[test]
        fn raw_decomposition_does_not_matter(f in arb_fn(3, 2), phi in arb_fn(3, 2), a in 0i64..9, b in 0i64..9) {
            let u = mixed(3, f, a, b);
            let direct = u.pair(&phi).unwrap();
            let mut split_sum = CycScalar::zero(3);
            for t in phi.terms() {
                for child in t.ball.children() {
                    split_sum = &split_sum + &(&t.coef * &u.pair_indicator(&child).unwrap());
                }
            }
            prop_assert_eq!(direct, split_sum);
        }

        #[test]
        fn injectivity(f in arb_fn(2, 1), depth in -1i64..3) {
            prop_assert_eq!(density_is_zero(&f, depth).unwrap(), f.is_zero());
        }

        #[test]
        fn density_pair_matches_product_integral(f in arb_fn(2, 1), phi in arb_fn(2, 1)) {
            let u = Distribution::density(f.clone());
            prop_assert_eq!(u.pair(&phi).unwrap(), f.mul(&phi).unwrap().integrate());
            let scaled = u.scale(&CycScalar::from_rational(2, p_pow(2, -1))).unwrap();
            prop_assert_eq!(scaled.pair(&phi).unwrap(), u.pair(&phi).unwrap().scale(&p_pow(2, -1)));
        }
    }
}
