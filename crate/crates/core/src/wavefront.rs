//! Λ-microlocal smoothness and Λ-wave front sets.
//!
//! A point `(x₀, ξ₀)` is smooth for `u` when, for polydisc neighborhoods
//! `U ∋ x₀` and `Ǔ ∋ ξ₀`, every `φ` supported in `U` admits an `N` with
//! `⟨u, φ Ψ(⟨·, λξ⟩)⟩ = 0` for all `λ ∈ Λ`, `ord λ < N`, `ξ ∈ Ǔ`.
//!
//! Densities, Dirac masses and the diagonal atom are decided exactly (with
//! `U = B(x₀, r)` and `Ǔ = B(ξ₀, ord ξ₀ + max(r, 1))`); anything else goes
//! through a bounded search that never issues a certificate.

use std::collections::{BTreeMap, BTreeSet};

use crate::distribution::{DistAtom, Distribution};
use crate::error::{Error, Result};
use crate::geometry::Polydisc;
use crate::kernel::Kernel;
use crate::padic::{p_pow, LambdaGroup, PAdicPoint, Valuation};
use crate::schwartz::SBFunction;
use crate::scalar::{CycScalar, Rational};

/// Upper bound on how far above `ord_floor` a certificate replay sweeps.
const REPLAY_SPAN: i64 = 16;

#[derive(Clone, Debug)]
pub struct MicrolocalQuery {
    pub u: Distribution,
    pub x0: PAdicPoint,
    pub xi0: PAdicPoint,
    pub lambda: LambdaGroup,
    pub nbhd_radius: i64,
    pub probe_depth: i64,
    pub ord_floor: i64,
}

impl MicrolocalQuery {
    pub fn validate(&self) -> Result<()> {
        let p = self.u.p();
        for q in [self.x0.p(), self.xi0.p(), self.lambda.p()] {
            if q != p {
                return Err(Error::MismatchedPrime { left: p, right: q });
            }
        }
        for d in [self.x0.dim(), self.xi0.dim()] {
            if d != self.u.dim() {
                return Err(Error::DimensionMismatch { expected: self.u.dim(), got: d });
            }
        }
        if self.xi0.is_zero() {
            return Err(Error::MalformedQuery("ξ₀ must be nonzero".into()));
        }
        if self.probe_depth < self.nbhd_radius {
            return Err(Error::MalformedQuery(format!(
                "probe depth {} is coarser than the neighborhood radius {}",
                self.probe_depth, self.nbhd_radius
            )));
        }
        if self.ord_floor >= 0 {
            return Err(Error::MalformedQuery(format!("ord floor {} must be negative", self.ord_floor)));
        }
        Ok(())
    }

    /// `U = B(x₀, r)`.
    pub fn neighborhood(&self) -> Polydisc {
        Polydisc::new(self.x0.clone(), self.nbhd_radius)
    }

    /// `Ǔ = B(ξ₀, ord ξ₀ + max(r, 1))`; every `ξ ∈ Ǔ` has `ord ξ = ord ξ₀`.
    pub fn frequency_neighborhood(&self) -> Polydisc {
        Polydisc::new(self.xi0.clone(), self.frequency_radius())
    }

    fn frequency_radius(&self) -> i64 {
        finite_ord(&self.xi0) + self.nbhd_radius.max(1)
    }

    /// Radius at which `Ǔ` is sampled: as many digits below `Ǔ` as the
    /// probe goes below `U`.
    pub fn frequency_probe_radius(&self) -> i64 {
        self.frequency_radius() + (self.probe_depth - self.nbhd_radius).max(0)
    }

    fn with_point(&self, u: Distribution, x0: PAdicPoint, xi0: PAdicPoint) -> Self {
        MicrolocalQuery { u, x0, xi0, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmoothnessVerdict {
    SmoothCertificate {
        u_nbhd: Polydisc,
        ucheck: Polydisc,
        n: i64,
        /// Whether smoothness is proved for every `φ` supported in `U`, not
        /// only for the probed basis.
        all_phi: bool,
    },
    NotSmoothWitness {
        phi: SBFunction,
        lambda: Rational,
        xi: PAdicPoint,
        value: CycScalar,
    },
    InconclusiveBounded {
        u_nbhd: Polydisc,
        ucheck: Polydisc,
        probe_depth: i64,
        ord_floor: i64,
        probes: usize,
        skipped: usize,
    },
}

impl SmoothnessVerdict {
    pub fn is_smooth(&self) -> bool {
        matches!(self, SmoothnessVerdict::SmoothCertificate { .. })
    }

    pub fn is_not_smooth(&self) -> bool {
        matches!(self, SmoothnessVerdict::NotSmoothWitness { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SmoothnessVerdict::SmoothCertificate { .. } => "smooth",
            SmoothnessVerdict::NotSmoothWitness { .. } => "not_smooth",
            SmoothnessVerdict::InconclusiveBounded { .. } => "inconclusive",
        }
    }
}

fn finite_ord(x: &PAdicPoint) -> i64 {
    match x.ord() {
        Valuation::Finite(v) => v,
        Valuation::Infinity => panic!("ord of a zero vector"),
    }
}

/// The closed-form atoms of a distribution, with like atoms merged.
struct ClosedForm {
    density: SBFunction,
    diracs: BTreeMap<PAdicPoint, CycScalar>,
    diagonal: Option<(usize, CycScalar)>,
}

impl ClosedForm {
    fn of(u: &Distribution) -> Result<Self> {
        let p = u.p();
        let mut density = SBFunction::zero(p, u.dim());
        let mut diracs: BTreeMap<PAdicPoint, CycScalar> = BTreeMap::new();
        let mut diagonal: Option<(usize, CycScalar)> = None;
        for (w, atom) in u.atoms() {
            match atom {
                DistAtom::Density(f) => density = density.add(&f.scale(w)?)?,
                DistAtom::Dirac { point, weight } => {
                    let v = w.try_mul(weight)?;
                    let slot = diracs.entry(point.clone()).or_insert_with(|| CycScalar::zero(p));
                    *slot = slot.try_add(&v)?;
                }
                DistAtom::Diagonal { half_dim } => {
                    let prev = diagonal.map_or_else(|| CycScalar::zero(p), |(_, c)| c);
                    diagonal = Some((*half_dim, prev.try_add(w)?));
                }
                DistAtom::Custom(_) => return Err(Error::CustomAtomPresent),
            }
        }
        diracs.retain(|_, w| !w.is_zero());
        let diagonal = diagonal.filter(|(_, w)| !w.is_zero());
        Ok(ClosedForm { density, diracs, diagonal })
    }

    /// `N` for the density part against `φ` at frequencies of valuation `ord_xi`.
    fn density_bound(&self, phi: &SBFunction, ord_xi: i64) -> Result<Option<i64>> {
        let local = self.density.mul(phi)?;
        if local.is_zero() {
            return Ok(None);
        }
        Ok(Some(local.fourier()?.support_radius()? - ord_xi))
    }
}

pub fn is_smooth_at(q: &MicrolocalQuery) -> Result<SmoothnessVerdict> {
    q.validate()?;
    let closed = match ClosedForm::of(&q.u) {
        Ok(c) if c.diracs.is_empty() || c.diagonal.is_none() => c,
        Ok(_) | Err(Error::CustomAtomPresent) => return bounded_search(q),
        Err(e) => return Err(e),
    };
    let u_nbhd = q.neighborhood();
    let ucheck = q.frequency_neighborhood();
    let ord_xi = finite_ord(&q.xi0);

    for a in closed.diracs.keys() {
        if !u_nbhd.contains_point(a)? {
            continue;
        }
        // isolate `a` from every other mass point
        let mut depth = q.probe_depth;
        for other in closed.diracs.keys().filter(|o| *o != a) {
            depth = depth.max(1 + finite_ord(&other.sub(a)?));
        }
        let phi = SBFunction::indicator(Polydisc::new(a.clone(), depth));
        return witness(q, &closed, phi, q.xi0.clone(), ord_xi);
    }

    if let Some((m, _)) = closed.diagonal {
        let (xa, xb) = q.x0.split_at(m)?;
        let (fa, fb) = q.xi0.split_at(m)?;
        let meets_diagonal = xa.sub(&xb)?.ord() >= Valuation::Finite(q.nbhd_radius);
        let antidiagonal = fa.add(&fb)?.ord() >= Valuation::Finite(q.frequency_radius());
        if meets_diagonal && antidiagonal {
            let phi = SBFunction::indicator(Polydisc::new(xa.concat(&xa)?, q.probe_depth));
            return witness(q, &closed, phi, fa.concat(&fa.neg())?, ord_xi);
        }
    }

    let mut n: Option<i64> = None;
    for cell in u_nbhd.split(q.probe_depth)? {
        let phi = SBFunction::indicator(cell);
        let mut bounds = vec![closed.density_bound(&phi, ord_xi)?];
        if let Some((m, w)) = &closed.diagonal {
            let g = phi.restrict_diagonal()?.scale(w)?;
            if !g.is_zero() {
                let (fa, fb) = q.xi0.split_at(*m)?;
                bounds.push(Some(g.fourier()?.support_radius()? - finite_ord(&fa.add(&fb)?)));
            }
        }
        for b in bounds.into_iter().flatten() {
            n = Some(n.map_or(b, |cur| cur.min(b)));
        }
    }
    Ok(SmoothnessVerdict::SmoothCertificate { u_nbhd, ucheck, n: n.unwrap_or(0), all_phi: true })
}

/// A witness `(φ, λ, ξ)` for the atom isolated by `φ`, with `λ` deep enough
/// that the density part has already vanished.
fn witness(q: &MicrolocalQuery, closed: &ClosedForm, phi: SBFunction, xi: PAdicPoint, ord_xi: i64) -> Result<SmoothnessVerdict> {
    let mut bound = q.ord_floor;
    if let Some(n) = closed.density_bound(&phi, ord_xi)? {
        bound = bound.min(n - 1);
    }
    let lambda = p_pow(q.u.p(), q.lambda.aligned_ord_at_most(bound));
    let value = q.u.modulated_pair(&phi, &xi.scale(&lambda)?)?;
    debug_assert!(!value.is_zero());
    Ok(SmoothnessVerdict::NotSmoothWitness { phi, lambda, xi, value })
}

/// Sweeps `φ` over the radius-`probe_depth` basis of `U`, `ξ` over sample
/// points of `Ǔ` and `λ` over Λ-representatives with `ord_floor ≤ ord λ < 0`.
/// Probes beyond a custom atom's depth limit are counted as skipped.
pub fn bounded_search(q: &MicrolocalQuery) -> Result<SmoothnessVerdict> {
    q.validate()?;
    let u_nbhd = q.neighborhood();
    let ucheck = q.frequency_neighborhood();
    let lambdas = q.lambda.representatives(q.ord_floor, 0);
    let xis: Vec<PAdicPoint> = ucheck.split(q.frequency_probe_radius())?.into_iter().map(|b| b.center().clone()).collect();
    let (mut probes, mut skipped) = (0, 0);
    for cell in u_nbhd.split(q.probe_depth)? {
        let phi = SBFunction::indicator(cell);
        for lambda in &lambdas {
            for xi in &xis {
                probes += 1;
                match q.u.modulated_pair(&phi, &xi.scale(lambda)?) {
                    Ok(v) if !v.is_zero() => {
                        return Ok(SmoothnessVerdict::NotSmoothWitness { phi, lambda: lambda.clone(), xi: xi.clone(), value: v })
                    }
                    Ok(_) => {}
                    Err(Error::DepthExceeded { .. }) => skipped += 1,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(SmoothnessVerdict::InconclusiveBounded {
        u_nbhd,
        ucheck,
        probe_depth: q.probe_depth,
        ord_floor: q.ord_floor,
        probes,
        skipped,
    })
}

/// Recomputes `⟨u, φ Ψ(⟨·, λξ⟩)⟩` for a witness.
pub fn replay_witness(u: &Distribution, verdict: &SmoothnessVerdict) -> Result<Option<CycScalar>> {
    match verdict {
        SmoothnessVerdict::NotSmoothWitness { phi, lambda, xi, .. } => Ok(Some(u.modulated_pair(phi, &xi.scale(lambda)?)?)),
        _ => Ok(None),
    }
}

/// A probe that contradicts a certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateFailure {
    pub phi: Polydisc,
    pub lambda: Rational,
    pub xi: PAdicPoint,
    pub value: CycScalar,
}

/// Exhaustively checks a certificate: every basis `φ` of `U` at the probe
/// depth, every sampled `ξ ∈ Ǔ` and every Λ-representative with
/// `ord_floor ≤ ord λ < N` must pair to zero.
pub fn replay_certificate(q: &MicrolocalQuery, verdict: &SmoothnessVerdict) -> Result<Option<CertificateFailure>> {
    let SmoothnessVerdict::SmoothCertificate { u_nbhd, ucheck, n, .. } = verdict else {
        return Ok(None);
    };
    let hi = (*n).min(q.ord_floor + REPLAY_SPAN);
    let lambdas = q.lambda.representatives(q.ord_floor, hi);
    let xis: Vec<PAdicPoint> = ucheck.split(q.frequency_probe_radius())?.into_iter().map(|b| b.center().clone()).collect();
    for cell in u_nbhd.split(q.probe_depth)? {
        let phi = SBFunction::indicator(cell.clone());
        for lambda in &lambdas {
            for xi in &xis {
                let v = q.u.modulated_pair(&phi, &xi.scale(lambda)?)?;
                if !v.is_zero() {
                    return Ok(Some(CertificateFailure { phi: cell, lambda: lambda.clone(), xi: xi.clone(), value: v }));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WfComponent {
    /// `{a} × (Q_p^m ∖ {0})`.
    PointFiber { point: PAdicPoint },
    /// `{((x, x), (ξ, −ξ)) : ξ ≠ 0}` in `Q_p^{2m} × Q_p^{2m}`.
    DiagonalConormal { half_dim: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaveFrontSet {
    pub dim: usize,
    pub components: Vec<WfComponent>,
}

impl WaveFrontSet {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn contains(&self, x: &PAdicPoint, xi: &PAdicPoint) -> Result<bool> {
        x.check_compatible(xi)?;
        if xi.is_zero() {
            return Ok(false);
        }
        for c in &self.components {
            let hit = match c {
                WfComponent::PointFiber { point } => point == x,
                WfComponent::DiagonalConormal { half_dim } => {
                    let (a, b) = x.split_at(*half_dim)?;
                    let (s, t) = xi.split_at(*half_dim)?;
                    a == b && s.add(&t)?.is_zero()
                }
            };
            if hit {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// The exact Λ-wave front set of a combination of densities, Dirac masses
/// and the diagonal atom; it does not depend on Λ.
pub fn wf_closed_form(u: &Distribution) -> Result<WaveFrontSet> {
    let closed = ClosedForm::of(u)?;
    let mut components: Vec<WfComponent> =
        closed.diracs.into_keys().map(|point| WfComponent::PointFiber { point }).collect();
    if let Some((half_dim, _)) = closed.diagonal {
        components.push(WfComponent::DiagonalConormal { half_dim });
    }
    Ok(WaveFrontSet { dim: u.dim(), components })
}

/// Neighborhood and probing parameters shared by every grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeParams {
    pub nbhd_radius: i64,
    pub probe_depth: i64,
    pub ord_floor: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionPoint {
    pub x0: PAdicPoint,
    pub xi0: PAdicPoint,
    pub lhs: SmoothnessVerdict,
    /// The `y ∈ supp ψ` whose fiber point `((x₀, y), (ξ₀, 0))` is not smooth.
    pub rhs_witness: Option<PAdicPoint>,
    pub rhs_inconclusive: usize,
    pub violation: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionReport {
    pub points: Vec<InclusionPoint>,
}

impl InclusionReport {
    pub fn violations(&self) -> usize {
        self.points.iter().filter(|p| p.violation).count()
    }
}

/// Representatives `y` of `supp ψ` at radius `r`: the centers of the
/// canonical balls, split down to radius `r` where they are coarser.
pub fn support_representatives(psi: &SBFunction, r: i64) -> Result<Vec<PAdicPoint>> {
    let mut ys = BTreeSet::new();
    for ball in psi.support() {
        if ball.alpha() >= r {
            ys.insert(ball.center().clone());
        } else {
            ys.extend(ball.split(r)?.into_iter().map(|b| b.center().clone()));
        }
    }
    Ok(ys.into_iter().collect())
}

/// Pointwise check of `WF_Λ(𝒦ψ) ⊆ {(x, ξ) : ∃y ∈ supp ψ, ((x, y), (ξ, 0)) ∈ WF_Λ(u)}`
/// on a grid: a violation is a left-hand witness with every fiber point
/// certified smooth.
pub fn check_wf_inclusion(
    kernel: &Kernel,
    psi: &SBFunction,
    grid: &[(PAdicPoint, PAdicPoint)],
    lambda: &LambdaGroup,
    params: ProbeParams,
) -> Result<InclusionReport> {
    let (n1, n2) = kernel.split();
    let applied = kernel.apply(psi)?;
    let ys = support_representatives(psi, params.nbhd_radius)?;
    let p = kernel.u().p();
    let base = MicrolocalQuery {
        u: applied.clone(),
        x0: PAdicPoint::zero(p, n1),
        xi0: PAdicPoint::zero(p, n1),
        lambda: lambda.clone(),
        nbhd_radius: params.nbhd_radius,
        probe_depth: params.probe_depth,
        ord_floor: params.ord_floor,
    };
    let mut points = Vec::with_capacity(grid.len());
    for (x0, xi0) in grid {
        let lhs = is_smooth_at(&base.with_point(applied.clone(), x0.clone(), xi0.clone()))?;
        let mut rhs_witness = None;
        let mut rhs_inconclusive = 0;
        if lhs.is_not_smooth() {
            let xi_full = xi0.concat(&PAdicPoint::zero(p, n2))?;
            for y in &ys {
                let q = base.with_point(kernel.u().clone(), x0.concat(y)?, xi_full.clone());
                match is_smooth_at(&q)? {
                    SmoothnessVerdict::NotSmoothWitness { .. } => {
                        rhs_witness = Some(y.clone());
                        break;
                    }
                    SmoothnessVerdict::InconclusiveBounded { .. } => rhs_inconclusive += 1,
                    SmoothnessVerdict::SmoothCertificate { .. } => {}
                }
            }
        }
        let violation = lhs.is_not_smooth() && rhs_witness.is_none() && rhs_inconclusive == 0;
        points.push(InclusionPoint { x0: x0.clone(), xi0: xi0.clone(), lhs, rhs_witness, rhs_inconclusive, violation });
    }
    Ok(InclusionReport { points })
}
