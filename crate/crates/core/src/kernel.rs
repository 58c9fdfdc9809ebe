//! Schwartz kernels: a distribution `u` on `Q_p^{n₁} × Q_p^{n₂}` and its
//! kernel map `𝒦ψ`, characterized by `⟨u, φ⊗ψ⟩ = ⟨𝒦ψ, φ⟩`, together with
//! the converse reconstruction of `u` from a kernel map.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distribution::{BallOracle, BasisMismatch, CustomPairing, DistAtom, Distribution};
use crate::error::{Error, Result};
use crate::geometry::{BallRelation, Polydisc};
use crate::schwartz::{SBFunction, Term};
use crate::scalar::CycScalar;

/// `(ψ, φ) ↦ ⟨map(ψ), φ⟩` for a kernel map `ψ ↦ map(ψ)`.
pub type PairingOracle = Arc<dyn Fn(&SBFunction, &SBFunction) -> Result<CycScalar> + Send + Sync>;

/// Depth limit reported by lazily evaluated kernels of closed-form atoms.
const UNBOUNDED_DEPTH: i64 = i64::MAX;

#[derive(Clone, Debug)]
pub struct Kernel {
    u: Distribution,
    n1: usize,
    n2: usize,
}

impl Kernel {
    pub fn new(u: Distribution, n1: usize, n2: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 || n1 + n2 != u.dim() {
            return Err(Error::BadSplit { split: n1, dim: u.dim() });
        }
        Ok(Kernel { u, n1, n2 })
    }

    pub fn u(&self) -> &Distribution {
        &self.u
    }

    pub fn split(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    fn check_psi(&self, psi: &SBFunction) -> Result<()> {
        if psi.p() != self.u.p() {
            return Err(Error::MismatchedPrime { left: self.u.p(), right: psi.p() });
        }
        if psi.dim() != self.n2 {
            return Err(Error::DimensionMismatch { expected: self.n2, got: psi.dim() });
        }
        Ok(())
    }

    fn check_phi(&self, phi: &SBFunction) -> Result<()> {
        if phi.p() != self.u.p() {
            return Err(Error::MismatchedPrime { left: self.u.p(), right: phi.p() });
        }
        if phi.dim() != self.n1 {
            return Err(Error::DimensionMismatch { expected: self.n1, got: phi.dim() });
        }
        Ok(())
    }

    /// `𝒦ψ`, with closed-form atoms where `u` has them and a lazy pairing
    /// `C ↦ ⟨u_atom, 1_C ⊗ ψ⟩` otherwise.
    pub fn apply(&self, psi: &SBFunction) -> Result<Distribution> {
        self.check_psi(psi)?;
        let p = self.u.p();
        let mut out = Distribution::zero(p, self.n1);
        for (w, atom) in self.u.atoms() {
            match atom {
                DistAtom::Density(f) => {
                    let g = partial_integral(f, psi, self.n1)?;
                    if !g.is_zero() {
                        out.push(w.clone(), DistAtom::Density(g))?;
                    }
                }
                DistAtom::Dirac { point, weight } => {
                    let (a, b) = point.split_at(self.n1)?;
                    let v = weight.try_mul(&psi.eval(&b)?)?;
                    if !v.is_zero() {
                        out.push(w.clone(), DistAtom::Dirac { point: a, weight: v })?;
                    }
                }
                DistAtom::Diagonal { half_dim } if *half_dim == self.n1 => {
                    if !psi.is_zero() {
                        out.push(w.clone(), DistAtom::Density(psi.clone()))?;
                    }
                }
                DistAtom::Custom(c) => {
                    let lazy = lazy_atom(self.u.p(), self.n1, self.n2, w.clone(), atom.clone(), psi.clone());
                    out.push(CycScalar::one(p), DistAtom::Custom(CustomPairing::from_oracle(c.depth_limit(), lazy)))?;
                }
                DistAtom::Diagonal { .. } => {
                    let lazy = lazy_atom(self.u.p(), self.n1, self.n2, w.clone(), atom.clone(), psi.clone());
                    out.push(CycScalar::one(p), DistAtom::Custom(CustomPairing::from_oracle(UNBOUNDED_DEPTH, lazy)))?;
                }
            }
        }
        Ok(out)
    }

    /// `𝒦ψ` as a single lazy pairing `C ↦ ⟨u, 1_C ⊗ ψ⟩`, with no closed forms.
    pub fn apply_lazy(&self, psi: &SBFunction) -> Result<Distribution> {
        self.check_psi(psi)?;
        let depth = self
            .u
            .atoms()
            .iter()
            .filter_map(|(_, a)| match a {
                DistAtom::Custom(c) => Some(c.depth_limit()),
                _ => None,
            })
            .min()
            .unwrap_or(UNBOUNDED_DEPTH);
        let u = self.u.clone();
        let psi = psi.clone();
        let oracle: BallOracle = Arc::new(move |c: &Polydisc| u.pair(&SBFunction::indicator(c.clone()).tensor(&psi)?));
        Distribution::custom(self.u.p(), self.n1, CustomPairing::from_oracle(depth, oracle))
    }

    /// `⟨𝒦ψ, φ⟩`.
    pub fn pairing(&self, phi: &SBFunction, psi: &SBFunction) -> Result<CycScalar> {
        self.check_phi(phi)?;
        self.apply(psi)?.pair(phi)
    }

    pub fn as_oracle(&self) -> PairingOracle {
        let k = self.clone();
        Arc::new(move |psi: &SBFunction, phi: &SBFunction| k.pairing(phi, psi))
    }

    /// `Σ cᵢ ⟨𝒦 1_{Dᵢ}, 1_{Cᵢ}⟩` over the decomposition `Σ cᵢ 1_{Cᵢ} ⊗ 1_{Dᵢ}`.
    pub fn reconstruction_sum(&self, decomposition: &[(CycScalar, Polydisc, Polydisc)]) -> Result<CycScalar> {
        reconstruction_sum(self.u.p(), &self.as_oracle(), decomposition)
    }

    /// Evaluates the reconstruction sum of `φ` on `trials` random redundant
    /// decompositions (trial 0 is the canonical one) and checks they agree.
    pub fn independence_check(&self, phi: &SBFunction, trials: usize, seed: u64) -> Result<IndependenceReport> {
        if phi.p() != self.u.p() {
            return Err(Error::MismatchedPrime { left: self.u.p(), right: phi.p() });
        }
        if phi.dim() != self.u.dim() {
            return Err(Error::DimensionMismatch { expected: self.u.dim(), got: phi.dim() });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let oracle = self.as_oracle();
        let reference = reconstruction_sum(self.u.p(), &oracle, &phi.tensor_decompose(self.n1)?)?;
        let mut mismatch = None;
        let mut total_pieces = 0;
        for trial in 1..=trials {
            let mut pieces = Vec::new();
            for t in phi.terms() {
                random_refinement(&mut rng, &t.ball, &t.coef, 2, &mut pieces);
            }
            total_pieces += pieces.len();
            let decomposition = pieces
                .into_iter()
                .map(|(c, b)| {
                    let (cb, db) = b.product_split(self.n1)?;
                    Ok((c, cb, db))
                })
                .collect::<Result<Vec<_>>>()?;
            let v = reconstruction_sum(self.u.p(), &oracle, &decomposition)?;
            if v != reference {
                mismatch = Some((trial, v));
                break;
            }
        }
        Ok(IndependenceReport { seed, trials, total_pieces, value: reference, mismatch })
    }

    /// Existence direction: the distribution reconstructed from `𝒦` agrees
    /// with `u` on every sub-ball of `region` with radius in
    /// `[region.alpha, depth]`.
    pub fn roundtrip_existence(&self, region: &Polydisc, depth: i64) -> Result<Option<BasisMismatch>> {
        let rebuilt = reconstruct(self.as_oracle(), self.n1, self.n2, depth, self.u.p())?;
        for alpha in region.alpha()..=depth {
            if let Some(m) = self.u.first_basis_mismatch(&rebuilt, region, alpha)? {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceReport {
    pub seed: u64,
    pub trials: usize,
    pub total_pieces: usize,
    /// Value on the canonical decomposition.
    pub value: CycScalar,
    /// First trial whose value differs, with that value.
    pub mismatch: Option<(usize, CycScalar)>,
}

impl IndependenceReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

fn random_refinement(rng: &mut ChaCha8Rng, ball: &Polydisc, coef: &CycScalar, budget: u32, out: &mut Vec<(CycScalar, Polydisc)>) {
    if budget > 0 && rng.gen_bool(0.5) {
        for child in ball.children() {
            random_refinement(rng, &child, coef, budget - 1, out);
        }
    } else {
        out.push((coef.clone(), ball.clone()));
    }
}

fn lazy_atom(p: u64, n1: usize, n2: usize, weight: CycScalar, atom: DistAtom, psi: SBFunction) -> BallOracle {
    let single = Distribution::from_atoms(p, n1 + n2, vec![(weight, atom)]).expect("atom already validated");
    Arc::new(move |c: &Polydisc| single.pair(&SBFunction::indicator(c.clone()).tensor(&psi)?))
}

/// `x ↦ ∫ f(x, y) ψ(y) dy` for `f` on `Q_p^{n₁+n₂}`.
pub fn partial_integral(f: &SBFunction, psi: &SBFunction, n1: usize) -> Result<SBFunction> {
    let mut raw = Vec::new();
    for t in f.terms() {
        let (c, d) = t.ball.product_split(n1)?;
        for s in psi.terms() {
            let smaller = match d.compare(&s.ball)? {
                BallRelation::Disjoint => continue,
                BallRelation::Equal | BallRelation::FirstInsideSecond => &d,
                BallRelation::SecondInsideFirst => &s.ball,
            };
            raw.push(Term::new(t.coef.try_mul(&s.coef)?.scale(&smaller.volume()), c.clone()));
        }
    }
    SBFunction::canonicalize(f.p(), n1, raw)
}

pub fn reconstruction_sum(p: u64, oracle: &PairingOracle, decomposition: &[(CycScalar, Polydisc, Polydisc)]) -> Result<CycScalar> {
    let mut acc = CycScalar::zero(p);
    for (c, cb, db) in decomposition {
        let v = oracle(&SBFunction::indicator(db.clone()), &SBFunction::indicator(cb.clone()))?;
        acc = acc.try_add(&c.try_mul(&v)?)?;
    }
    Ok(acc)
}

/// The distribution `u` on `Q_p^{n₁+n₂}` with `⟨u, 1_{C×D}⟩ = ⟨map(1_D), 1_C⟩`,
/// defined on polydiscs of radius at most `depth`.
pub fn reconstruct(oracle: PairingOracle, n1: usize, n2: usize, depth: i64, p: u64) -> Result<Distribution> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::BadSplit { split: n1, dim: n1 + n2 });
    }
    let ball_oracle: BallOracle = Arc::new(move |b: &Polydisc| {
        let (c, d) = b.product_split(n1)?;
        oracle(&SBFunction::indicator(d), &SBFunction::indicator(c))
    });
    Distribution::custom(p, n1 + n2, CustomPairing::from_oracle(depth, ball_oracle))
}

/// Converse direction: `𝒦` of the reconstructed distribution agrees with the
/// original map on all indicator pairs `(1_C, 1_D)`, `C ⊆ region₁`,
/// `D ⊆ region₂`, radii in `[region.alpha, depth]`.
pub fn roundtrip_converse(
    oracle: PairingOracle,
    n1: usize,
    n2: usize,
    depth: i64,
    regions: (&Polydisc, &Polydisc),
) -> Result<Option<(Polydisc, Polydisc, CycScalar, CycScalar)>> {
    let p = regions.0.p();
    let kernel = Kernel::new(reconstruct(oracle.clone(), n1, n2, depth, p)?, n1, n2)?;
    for a in regions.0.alpha()..=depth {
        for b in regions.1.alpha()..=depth {
            for c in regions.0.split(a)? {
                for d in regions.1.split(b)? {
                    let phi = SBFunction::indicator(c.clone());
                    let psi = SBFunction::indicator(d.clone());
                    let want = oracle(&psi, &phi)?;
                    let got = kernel.pairing(&phi, &psi)?;
                    if want != got {
                        return Ok(Some((c, d, want, got)));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::dist_equal_on_basis;
    use crate::padic::PAdicPoint;
    use crate::scalar::{psi, Rational};
    use proptest::prelude::*;

    fn ball(p: u64, c: &[i64], alpha: i64) -> Polydisc {
        Polydisc::new(PAdicPoint::from_ints(p, c), alpha)
    }

    fn ind(p: u64, c: &[i64], alpha: i64) -> SBFunction {
        SBFunction::indicator(ball(p, c, alpha))
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

    fn sample_kernels(p: u64, f: SBFunction) -> Vec<Kernel> {
        let dirac = Distribution::dirac(PAdicPoint::new(p, vec![Rational::new(1.into(), (p as i64).into()), Rational::from_integer(3.into())]).unwrap());
        vec![
            Kernel::new(Distribution::density(f), 1, 1).unwrap(),
            Kernel::new(dirac, 1, 1).unwrap(),
            Kernel::new(Distribution::diagonal(p, 1).unwrap(), 1, 1).unwrap(),
        ]
    }

    #[test]
    fn diagonal_kernel_is_the_density() {
        let k = Kernel::new(Distribution::diagonal(3, 1).unwrap(), 1, 1).unwrap();
        let psi = ind(3, &[1], 1).add(&ind(3, &[0], -1)).unwrap();
        let t = Distribution::density(psi.clone());
        let applied = k.apply(&psi).unwrap();
        assert!(dist_equal_on_basis(&applied, &t, 2, &ball(3, &[0], -1)).unwrap().is_none());
        assert!(matches!(applied.atoms()[0].1, DistAtom::Density(_)));
    }

    #[test]
    fn pairing_examples() {
        let k = Kernel::new(Distribution::density(ind(3, &[0, 0], 0)), 1, 1).unwrap();
        assert!(k.pairing(&ind(3, &[0], 0), &ind(3, &[0], 0)).unwrap().is_one());
        assert!(k.pairing(&ind(3, &[0], 0), &SBFunction::zero(3, 1)).unwrap().is_zero());
        let d = Kernel::new(Distribution::diagonal(2, 1).unwrap(), 1, 1).unwrap();
        assert!(d.pairing(&ind(2, &[0], 1), &ind(2, &[1], 1)).unwrap().is_zero());
        assert!(k.pairing(&ind(3, &[0, 0], 0), &ind(3, &[0], 0)).is_err());
    }

    #[test]
    fn dirac_kernel_is_a_weighted_dirac() {
        let a = PAdicPoint::from_ints(3, &[2]);
        let b = PAdicPoint::new(3, vec![Rational::new(1.into(), 3.into())]).unwrap();
        let k = Kernel::new(Distribution::dirac(a.concat(&b).unwrap()), 1, 1).unwrap();
        let psi_fn = ind(3, &[0], -1).modulate(&PAdicPoint::from_ints(3, &[1])).unwrap();
        let applied = k.apply(&psi_fn).unwrap();
        let expected = Distribution::dirac(a).scale(&psi_fn.eval(&b).unwrap()).unwrap();
        assert_eq!(psi_fn.eval(&b).unwrap(), psi(3, &Rational::new(1.into(), 3.into())).unwrap());
        assert!(dist_equal_on_basis(&applied, &expected, 2, &ball(3, &[0], 0)).unwrap().is_none());
    }

    #[test]
    fn reconstructing_the_zero_map() {
        let zero: PairingOracle = Arc::new(|_, _| Ok(CycScalar::zero(2)));
        let u = reconstruct(zero, 1, 1, 3, 2).unwrap();
        assert!(dist_equal_on_basis(&u, &Distribution::zero(2, 2), 2, &ball(2, &[0, 0], 0)).unwrap().is_none());
    }

    #[test]
    fn reconstructing_from_densities_gives_the_diagonal() {
        let map: PairingOracle = Arc::new(|psi: &SBFunction, phi: &SBFunction| Distribution::density(psi.clone()).pair(phi));
        let u = reconstruct(map, 1, 1, 3, 3).unwrap();
        let diag = Distribution::diagonal(3, 1).unwrap();
        for alpha in 0..=2 {
            assert!(dist_equal_on_basis(&u, &diag, alpha, &ball(3, &[0, 0], 0)).unwrap().is_none());
        }
    }

    #[test]
    fn independence_examples() {
        let k = Kernel::new(Distribution::diagonal(3, 1).unwrap(), 1, 1).unwrap();
        let r = k.independence_check(&ind(3, &[0, 0], 0), 10, 7).unwrap();
        assert!(r.passed());
        assert_eq!(r.value, CycScalar::one(3));
        let z = k.independence_check(&SBFunction::zero(3, 2), 5, 1).unwrap();
        assert!(z.passed() && z.value.is_zero());
    }

    #[test]
    fn roundtrips() {
        for k in sample_kernels(2, ind(2, &[1, 0], 1)) {
            assert!(k.roundtrip_existence(&ball(2, &[0, 0], 0), 2).unwrap().is_none());
            let res = roundtrip_converse(k.as_oracle(), 1, 1, 1, (&ball(2, &[0], 0), &ball(2, &[0], 0))).unwrap();
            assert!(res.is_none());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn defining_identity_and_lazy_agreement(f in arb_fn(3, 2), phi in arb_fn(3, 1), psi_fn in arb_fn(3, 1)) {
            for k in sample_kernels(3, f.clone()) {
                let expected = k.u().pair(&phi.tensor(&psi_fn).unwrap()).unwrap();
                prop_assert_eq!(k.pairing(&phi, &psi_fn).unwrap(), expected.clone());
                prop_assert_eq!(k.apply_lazy(&psi_fn).unwrap().pair(&phi).unwrap(), expected);
            }
        }

        #[test]
        fn bilinearity(f in arb_fn(2, 2), phi in arb_fn(2, 1), chi in arb_fn(2, 1), psi_fn in arb_fn(2, 1), k in -2i64..3) {
            let c = CycScalar::from_int(2, k);
            for kern in sample_kernels(2, f.clone()) {
                let combo = phi.scale(&c).unwrap().add(&chi).unwrap();
                let lhs = kern.pairing(&combo, &psi_fn).unwrap();
                let rhs = &(&c * &kern.pairing(&phi, &psi_fn).unwrap()) + &kern.pairing(&chi, &psi_fn).unwrap();
                prop_assert_eq!(lhs, rhs);
                let lhs = kern.pairing(&psi_fn, &combo).unwrap();
                let rhs = &(&c * &kern.pairing(&psi_fn, &phi).unwrap()) + &kern.pairing(&psi_fn, &chi).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn random_redecompositions_agree(f in arb_fn(3, 2), phi in arb_fn(3, 2), seed in any::<u64>()) {
            for k in sample_kernels(3, f.clone()) {
                prop_assert!(k.independence_check(&phi, 4, seed).unwrap().passed());
            }
        }
    }
}
