//! The acceptance criteria, each an exact comparison against a brute-force
//! oracle under a wall-clock limit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use pdk_core::distribution::{density_is_zero, dist_equal_on_basis};
use pdk_core::kernel::{reconstruct, roundtrip_converse, PairingOracle};
use pdk_core::padic::p_pow;
use pdk_core::wavefront::{
    check_wf_inclusion, replay_certificate, replay_witness, wf_closed_form, ProbeParams,
};
use pdk_core::{
    is_smooth_at, CycScalar, Distribution, Kernel, LambdaGroup, MicrolocalQuery, PAdicPoint, Polydisc,
    Rational, SBFunction, SmoothnessVerdict, Term,
};
use rand::Rng;

use crate::gen;
use crate::oracle::{ball_contains, modulated_ball_integral, psi_value, raw_eval, Grid};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Overrides the basis depth used by the kernel round-trip and the
    /// diagonal comparison.
    pub depth: Option<i64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: DEFAULT_SEED, depth: None }
    }
}

#[derive(Debug)]
pub struct Fail(pub String);

impl From<pdk_core::Error> for Fail {
    fn from(e: pdk_core::Error) -> Self {
        Fail(format!("unexpected error: {e}"))
    }
}

type Outcome = Result<String, Fail>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), Fail> {
    if cond {
        Ok(())
    } else {
        Err(Fail(msg()))
    }
}

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub limit: Duration,
    run: fn(&SuiteConfig) -> Outcome,
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {:>2}: {} ({:.2}s of {}s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

pub fn criteria() -> Vec<Criterion> {
    let c = |id, name, secs, run| Criterion { id, name, limit: Duration::from_secs(secs), run };
    vec![
        c(1, "decomposition into coarsest disjoint balls", 10, decomposition as fn(&SuiteConfig) -> Outcome),
        c(2, "Haar normalization and ball volumes", 1, haar_volumes),
        c(3, "Fourier transform against character sums", 30, fourier_oracle),
        c(4, "convolution and local constancy", 30, convolution),
        c(5, "kernel identity on basis pairs", 60, kernel_existence),
        c(6, "kernel reconstruction and independence", 60, kernel_converse),
        c(7, "diagonal kernel yields densities", 10, diagonal_example),
        c(8, "injectivity of densities", 5, injectivity),
        c(9, "wave front sets of built-in atoms", 120, wave_fronts),
        c(10, "wave front inclusion for induced distributions", 120, wf_inclusion),
    ]
}

pub fn run_criterion(c: &Criterion, cfg: &SuiteConfig) -> CriterionReport {
    let start = Instant::now();
    let outcome = (c.run)(cfg);
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(Fail(d)) => (false, d),
    };
    if passed && elapsed > c.limit {
        passed = false;
        detail = format!("time limit exceeded; {detail}");
    }
    CriterionReport { id: c.id, name: c.name, passed, detail, elapsed, limit: c.limit }
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<CriterionReport> {
    criteria().iter().map(|c| run_criterion(c, cfg)).collect()
}

fn ind(ball: &Polydisc) -> SBFunction {
    SBFunction::indicator(ball.clone())
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn point1(p: u64, x: Rational) -> PAdicPoint {
    PAdicPoint::new(p, vec![x]).expect("p-power denominator")
}

/// Every ball with radius in `[lo, hi]` and integer center in `[0, p²)^m`.
fn small_balls(p: u64, dim: usize, lo: i64, hi: i64) -> Vec<Polydisc> {
    let n = (p * p) as usize;
    let mut out = BTreeSet::new();
    for alpha in lo..=hi {
        for idx in 0..n.pow(dim as u32) {
            let mut rest = idx;
            let mut c = vec![0i64; dim];
            for slot in c.iter_mut().rev() {
                *slot = (rest % n) as i64;
                rest /= n;
            }
            out.insert(Polydisc::new(PAdicPoint::from_ints(p, &c), alpha));
        }
    }
    out.into_iter().collect()
}

/// Values of a canonical function on a grid, read off its own terms; fails
/// when two terms overlap.
fn canonical_values(grid: &Grid, f: &SBFunction) -> Result<Vec<CycScalar>, Fail> {
    let mut out: Vec<Option<CycScalar>> = vec![None; grid.len()];
    for t in f.terms() {
        for idx in grid.members(&t.ball) {
            ensure(out[idx].is_none(), || format!("canonical terms overlap at {}", grid.point(idx)))?;
            out[idx] = Some(t.coef.clone());
        }
    }
    Ok(out.into_iter().map(|v| v.unwrap_or_else(|| CycScalar::zero(grid.p()))).collect())
}

fn decomposition(cfg: &SuiteConfig) -> Outcome {
    let mut rng = gen::rng(cfg.seed ^ 1);
    let (mut lists, mut evaluations) = (0, 0);
    for p in [2u64, 3] {
        for m in [1usize, 2] {
            let grid = Grid::new(p, m, -1, 3);
            let family = p.pow(m as u32) as usize;
            for _ in 0..100 {
                let raw = gen::raw_terms(&mut rng, p, m, 6);
                let f = SBFunction::canonicalize(p, m, raw.clone())?;
                let again = SBFunction::canonicalize(p, m, f.terms().to_vec())?;
                ensure(again == f, || format!("canonicalize is not idempotent on {raw:?}"))?;
                ensure(f.terms().iter().all(|t| !t.coef.is_zero()), || "zero coefficient kept".into())?;
                let mut families: BTreeMap<Polydisc, Vec<&CycScalar>> = BTreeMap::new();
                for t in f.terms() {
                    families.entry(t.ball.parent()).or_default().push(&t.coef);
                }
                for (parent, coefs) in families {
                    let merged = coefs.len() == family && coefs.iter().all(|c| *c == coefs[0]);
                    ensure(!merged, || format!("complete sibling family under {parent} left unmerged"))?;
                }
                let want = grid.values(&raw);
                let got = canonical_values(&grid, &f)?;
                for (idx, (a, b)) in want.iter().zip(&got).enumerate() {
                    ensure(a == b, || format!("value mismatch at {}: raw {a}, canonical {b}", grid.point(idx)))?;
                }
                // the canonical terms were already compared everywhere; `eval` is sampled in m = 2
                let stride = if m == 1 { 1 } else { 5 };
                for idx in (0..grid.len()).step_by(stride) {
                    let x = grid.point(idx);
                    let v = f.eval(&x)?;
                    ensure(v == want[idx], || format!("eval({x}) = {v}, raw sum {}", want[idx]))?;
                }
                lists += 1;
                evaluations += grid.len();
            }
        }
    }
    Ok(format!("{lists} raw term lists, {evaluations} residues mod p^3 compared"))
}

fn haar_volumes(_: &SuiteConfig) -> Outcome {
    let mut balls = 0;
    for p in [2u64, 3] {
        for m in [1usize, 2] {
            let unit = ind(&Polydisc::origin(p, m, 0)).integrate();
            ensure(unit.is_one(), || format!("∫ 1_(Z_{p})^{m} = {unit}"))?;
            let grid = Grid::new(p, m, -1, 3);
            for b in small_balls(p, m, -1, 2) {
                let counted = grid.cell_volume() * Rational::from_integer(grid.members(&b).len().into());
                let expected = p_pow(p, -b.alpha() * m as i64);
                let integral = ind(&b).integrate();
                ensure(counted == expected, || format!("{b}: {counted} cells vs p^(-αm) = {expected}"))?;
                ensure(b.volume() == expected, || format!("{b}: volume {}", b.volume()))?;
                ensure(integral == CycScalar::from_rational(p, expected.clone()), || format!("{b}: integral {integral}"))?;
                balls += 1;
            }
        }
    }
    Ok(format!("{balls} balls measured by partition counting"))
}

fn fourier_oracle(cfg: &SuiteConfig) -> Outcome {
    let mut rng = gen::rng(cfg.seed ^ 3);
    let mut compared = 0;
    for p in [2u64, 3] {
        let grid = Grid::new(p, 1, -1, 3);
        let scale = p_pow(p, -2);
        let freqs: Vec<PAdicPoint> =
            (0..p.pow(5)).map(|t| point1(p, &scale * Rational::from_integer(t.into()))).collect();
        for _ in 0..50 {
            let raw = gen::raw_terms(&mut rng, p, 1, 6);
            let f = SBFunction::canonicalize(p, 1, raw.clone())?;
            let fh = f.fourier()?;
            let vals = grid.values(&raw);
            for xi in &freqs {
                let want = grid.character_sum(&vals, xi);
                let got = fh.eval(xi)?;
                ensure(got == want, || format!("f̂({xi}) = {got}, character sum {want}; f = {raw:?}"))?;
                compared += 1;
            }
            let twice = fh.fourier()?;
            let expected = f.reflect().scale_rational(&p_pow(p, -1));
            ensure(twice == expected, || format!("double transform differs from p^(-1) f(-x) for {raw:?}"))?;
        }
    }
    Ok(format!("{compared} frequencies compared, 100 double transforms"))
}

fn mollifier(p: u64, dim: usize, alpha: i64) -> SBFunction {
    ind(&Polydisc::origin(p, dim, alpha)).scale_rational(&p_pow(p, alpha * dim as i64))
}

fn convolution(cfg: &SuiteConfig) -> Outcome {
    let mut pairs = 0;
    for (p, m) in [(2u64, 1usize), (3, 1), (2, 2)] {
        let grid = Grid::new(p, m, 0, 3);
        let balls = small_balls(p, m, 0, 2);
        let masks: Vec<Vec<bool>> = balls.iter().map(|b| grid.indicator(b)).collect();
        for (a, ma) in balls.iter().zip(&masks) {
            for (b, mb) in balls.iter().zip(&masks) {
                let core = ind(a).convolve(&ind(b))?;
                let got = canonical_values(&grid, &core)?;
                let counts = grid.indicator_convolution(ma, mb);
                for (idx, c) in counts.iter().enumerate() {
                    let want = CycScalar::from_rational(p, grid.cell_volume() * Rational::from_integer((*c).into()));
                    ensure(got[idx] == want, || {
                        format!("(1_{a} * 1_{b})({}) = {}, residue sum {want}", grid.point(idx), got[idx])
                    })?;
                }
                pairs += 1;
            }
        }
    }

    let mut rng = gen::rng(cfg.seed ^ 4);
    let mut family = Vec::new();
    for p in [2u64, 3] {
        for _ in 0..30 {
            family.push(gen::nonzero_sb_function(&mut rng, p, 1, 6));
        }
        for b in small_balls(p, 1, 0, 2) {
            family.push(ind(&b));
        }
    }
    for f in &family {
        let p = f.p();
        let a = f.local_constancy_radius()?;
        for alpha in [a, a + 1] {
            let smoothed = f.convolve(&mollifier(p, 1, alpha))?;
            ensure(smoothed == *f, || format!("f * mollifier at radius {alpha} ≠ f for α⁺ = {a}: {f:?}"))?;
        }
        let rough = f.convolve(&mollifier(p, 1, a - 1))?;
        ensure(rough != *f, || format!("mollifier below α⁺ = {a} left {f:?} unchanged"))?;
    }
    Ok(format!("{pairs} ball pairs against residue convolution, {} functions for local constancy", family.len()))
}

/// `⟨u, 1_C ⊗ 1_D⟩` by brute force, for the three model distributions.
enum ModelDistribution {
    Density { grid: Grid, values: Vec<CycScalar> },
    Dirac { a: PAdicPoint, b: PAdicPoint },
    Diagonal,
}

impl ModelDistribution {
    fn pair_box(&self, line: &Grid, c: &Polydisc, d: &Polydisc) -> CycScalar {
        let p = line.p();
        match self {
            ModelDistribution::Density { grid, values } => {
                let side = line.len();
                let ys = line.members(d);
                let mut acc = CycScalar::zero(p);
                for x in line.members(c) {
                    for y in &ys {
                        let v = &values[x * side + y];
                        if !v.is_zero() {
                            acc = &acc + v;
                        }
                    }
                }
                acc.scale(&grid.cell_volume())
            }
            ModelDistribution::Dirac { a, b } => {
                if ball_contains(c, a) && ball_contains(d, b) {
                    CycScalar::one(p)
                } else {
                    CycScalar::zero(p)
                }
            }
            ModelDistribution::Diagonal => {
                let ys: BTreeSet<usize> = line.members(d).into_iter().collect();
                let common = line.members(c).into_iter().filter(|x| ys.contains(x)).count();
                CycScalar::from_rational(p, line.cell_volume() * Rational::from_integer(common.into()))
            }
        }
    }
}

fn model_kernels(rng: &mut rand_chacha::ChaCha8Rng, p: u64, densities: usize, diracs: usize) -> Result<Vec<(String, Kernel, ModelDistribution)>, Fail> {
    let mut out = Vec::new();
    let grid = Grid::new(p, 2, -1, 3);
    for _ in 0..densities {
        let raw = gen::nonempty_raw_terms(rng, p, 2, 6);
        let f = SBFunction::canonicalize(p, 2, raw.clone())?;
        let values = grid.values(&raw);
        out.push(("T_f".to_string(), Kernel::new(Distribution::density(f), 1, 1)?, ModelDistribution::Density { grid: grid.clone(), values }));
    }
    for _ in 0..diracs {
        let a = gen::point(rng, p, 1, 1);
        let b = gen::point(rng, p, 1, 1);
        let u = Distribution::dirac(a.concat(&b)?);
        out.push((format!("δ_({a}, {b})"), Kernel::new(u, 1, 1)?, ModelDistribution::Dirac { a, b }));
    }
    out.push(("u_Δ".to_string(), Kernel::new(Distribution::diagonal(p, 1)?, 1, 1)?, ModelDistribution::Diagonal));
    Ok(out)
}

fn kernel_existence(cfg: &SuiteConfig) -> Outcome {
    let mut rng = gen::rng(cfg.seed ^ 5);
    let mut checked = 0;
    for p in [2u64, 3] {
        let line = Grid::new(p, 1, -1, 3);
        let balls = small_balls(p, 1, -1, 2);
        for (name, k, model) in model_kernels(&mut rng, p, 3, 3)? {
            for c in &balls {
                for d in &balls {
                    let want = model.pair_box(&line, c, d);
                    let got = k.pairing(&ind(c), &ind(d))?;
                    ensure(got == want, || format!("{name}, p={p}: ⟨𝒦1_{d}, 1_{c}⟩ = {got}, ⟨u, 1_{c}⊗1_{d}⟩ = {want}"))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} basis pairs"))
}

fn kernel_converse(cfg: &SuiteConfig) -> Outcome {
    let depth = cfg.depth.unwrap_or(2);
    let mut rng = gen::rng(cfg.seed ^ 6);
    let (mut tensors, mut trials) = (0, 0);
    for p in [2u64, 3] {
        let balls = small_balls(p, 1, -1, depth);
        for (name, k, _) in model_kernels(&mut rng, p, 1, 1)? {
            let rebuilt = reconstruct(k.as_oracle(), 1, 1, depth, p)?;
            for c in &balls {
                for d in &balls {
                    let t = ind(c).tensor(&ind(d))?;
                    let want = k.u().pair(&t)?;
                    let got = rebuilt.pair(&t)?;
                    ensure(got == want, || format!("{name}, p={p}: rebuilt pairs 1_{c}⊗1_{d} to {got}, u gives {want}"))?;
                    tensors += 1;
                }
            }
            let phi = gen::sb_function(&mut rng, p, 2, 3);
            let seed = rng.gen();
            let report = k.independence_check(&phi, 200, seed)?;
            ensure(report.passed(), || format!("{name}, p={p}: decompositions disagree: {report:?}"))?;
            trials += report.trials;
        }
        let densities: PairingOracle = Arc::new(|psi: &SBFunction, phi: &SBFunction| Distribution::density(psi.clone()).pair(phi));
        let region = Polydisc::origin(p, 1, -1);
        let bad = roundtrip_converse(densities, 1, 1, depth.min(1), (&region, &region))?;
        ensure(bad.is_none(), || format!("p={p}: 𝒦 of the reconstructed diagonal differs from ψ ↦ T_ψ: {bad:?}"))?;
    }
    Ok(format!("{tensors} basis tensors, {trials} random re-decompositions"))
}

fn diagonal_example(cfg: &SuiteConfig) -> Outcome {
    let depth = cfg.depth.unwrap_or(3);
    let mut rng = gen::rng(cfg.seed ^ 7);
    let mut balls = 0;
    for p in [2u64, 3] {
        let k = Kernel::new(Distribution::diagonal(p, 1)?, 1, 1)?;
        let region = Polydisc::origin(p, 1, -1);
        for _ in 0..20 {
            let psi = gen::sb_function(&mut rng, p, 1, 6);
            let t = Distribution::density(psi.clone());
            for applied in [k.apply(&psi)?, k.apply_lazy(&psi)?] {
                for alpha in -1..=depth {
                    let bad = dist_equal_on_basis(&applied, &t, alpha, &region)?;
                    ensure(bad.is_none(), || format!("𝒦ψ ≠ T_ψ for ψ = {psi:?}: {bad:?}"))?;
                    balls += p.pow((alpha + 1) as u32);
                }
            }
        }
    }
    Ok(format!("40 functions, {balls} basis pairings"))
}

fn injectivity(cfg: &SuiteConfig) -> Outcome {
    let mut rng = gen::rng(cfg.seed ^ 8);
    let mut zeros = 0;
    for i in 0..100 {
        let p = [2u64, 3][i % 2];
        let m = 1 + (i / 2) % 2;
        let mut raw = match i % 4 {
            0 | 1 => gen::nonempty_raw_terms(&mut rng, p, m, 3),
            _ => gen::raw_terms(&mut rng, p, m, 6),
        };
        if i % 4 < 2 {
            let mut cancel: Vec<Term> = raw
                .iter()
                .flat_map(|t| t.ball.children().into_iter().map(|c| Term::new(-&t.coef, c)))
                .collect();
            if i % 4 == 1 {
                cancel.pop();
            }
            raw.extend(cancel);
        }
        let grid = Grid::new(p, m, -1, 3);
        let oracle_zero = grid.values(&raw).iter().all(|v| v.is_zero());
        let f = SBFunction::canonicalize(p, m, raw)?;
        let probed = density_is_zero(&f, 1)?;
        ensure(probed == oracle_zero && f.is_zero() == oracle_zero, || {
            format!("case {i}: density_is_zero = {probed}, empty form = {}, brute force = {oracle_zero}", f.is_zero())
        })?;
        zeros += usize::from(oracle_zero);
    }
    Ok(format!("100 densities, {zeros} of them zero"))
}

fn query(u: Distribution, x0: PAdicPoint, xi0: PAdicPoint, lambda: LambdaGroup, r: i64, probe: i64, floor: i64) -> MicrolocalQuery {
    MicrolocalQuery { u, x0, xi0, lambda, nbhd_radius: r, probe_depth: probe, ord_floor: floor }
}

fn wave_fronts(cfg: &SuiteConfig) -> Outcome {
    let mut rng = gen::rng(cfg.seed ^ 9);
    let floor = -4;
    let (mut certificates, mut sweeps, mut witnesses, mut replays, mut grid_points) = (0, 0, 0, 0, 0);
    for p in [2u64, 3] {
        let full = LambdaGroup::full(p)?;
        let lambda2 = LambdaGroup::ord_congruence(p, 2)?;

        // densities: certificates, replayed against brute-force ball integrals
        for _ in 0..5 {
            let raw = gen::nonempty_raw_terms(&mut rng, p, 1, 6);
            let u = Distribution::density(SBFunction::canonicalize(p, 1, raw.clone())?);
            ensure(wf_closed_form(&u)?.is_empty(), || "WF(T_f) not empty".into())?;
            for x0 in [q(0, 1), q(1, 1), q(1, p as i64)] {
                for xi0 in [q(1, 1), q(1, p as i64), q(p as i64, 1), q(p as i64 - 1, (p * p) as i64)] {
                    let qy = query(u.clone(), point1(p, x0.clone()), point1(p, xi0), full.clone(), 1, 2, floor);
                    let v = is_smooth_at(&qy)?;
                    let SmoothnessVerdict::SmoothCertificate { u_nbhd, ucheck, n, .. } = &v else {
                        return Err(Fail(format!("T_f not smooth at ({}, {}): {v:?}", qy.x0, qy.xi0)));
                    };
                    let lambdas = full.representatives(floor, (*n).min(floor + 16));
                    let xis: Vec<PAdicPoint> =
                        ucheck.split(qy.frequency_probe_radius())?.into_iter().map(|b| b.center().clone()).collect();
                    for cell in u_nbhd.split(qy.probe_depth)? {
                        let fval = raw_eval(p, &raw, cell.center());
                        for lam in &lambdas {
                            for xi in &xis {
                                let eta = xi.scale(lam)?;
                                let v = &fval * &modulated_ball_integral(&cell, &eta);
                                ensure(v.is_zero(), || format!("certificate N = {n} fails at φ = 1_{cell}, λ = {lam}, ξ = {xi}: {v}"))?;
                                sweeps += 1;
                            }
                        }
                    }
                    ensure(replay_certificate(&qy, &v)?.is_none(), || "certificate replay failed".into())?;
                    certificates += 1;
                }
            }
        }

        // Dirac masses: witnesses of unit modulus at every probed λ
        for lam in [&full, &lambda2] {
            for _ in 0..3 {
                let a = gen::point(&mut rng, p, 1, 1);
                let u = Distribution::dirac(a.clone());
                let r = 1;
                let inside = [a.clone(), a.add(&point1(p, p_pow(p, r)))?];
                for x0 in inside {
                    for xi0 in [q(1, 1), q(2, p as i64), q(p as i64 + 1, 1)] {
                        let qy = query(u.clone(), x0.clone(), point1(p, xi0), lam.clone(), r, 2, floor);
                        let v = is_smooth_at(&qy)?;
                        let SmoothnessVerdict::NotSmoothWitness { phi, lambda, xi, value } = &v else {
                            return Err(Fail(format!("δ_{a} smooth at ({x0}, {}): {v:?}", qy.xi0)));
                        };
                        ensure(lam.contains(lambda)?, || format!("witness λ = {lambda} not in Λ"))?;
                        ensure(qy.frequency_neighborhood().contains_point(xi)?, || format!("witness ξ = {xi} outside Ǔ"))?;
                        for t in phi.terms() {
                            ensure(t.ball.is_inside(&qy.neighborhood())?, || format!("supp φ ⊄ U for {}", t.ball))?;
                        }
                        ensure(replay_witness(&u, &v)? == Some(value.clone()), || "witness replay changed".into())?;
                        for l in lam.representatives(floor, 0) {
                            let eta = xi.scale(&l)?;
                            let got = u.modulated_pair(phi, &eta)?;
                            let want = &raw_eval(p, phi.terms(), &a) * &psi_value(p, &a.inner(&eta)?);
                            ensure(got == want, || format!("⟨δ_{a}, φΨ⟩ at λ = {l}: {got} vs brute force {want}"))?;
                            ensure((&got * &got.conj()).is_one(), || format!("|⟨δ_{a}, φΨ⟩| ≠ 1 at λ = {l}: {got}"))?;
                            replays += 1;
                        }
                        witnesses += 1;
                    }
                }
                let far = a.add(&point1(p, p_pow(p, r - 1)))?;
                let qy = query(u.clone(), far.clone(), point1(p, q(1, 1)), lam.clone(), r, 2, floor);
                let v = is_smooth_at(&qy)?;
                ensure(v.is_smooth(), || format!("δ_{a} not smooth at {far}: {v:?}"))?;
                ensure(replay_certificate(&qy, &v)?.is_none(), || "Dirac certificate replay failed".into())?;
            }
        }

        // diagonal: verdicts against the conormal description
        let u = Distribution::diagonal(p, 1)?;
        let wf = wf_closed_form(&u)?;
        let n = (p * p) as i64;
        let mut freqs = Vec::new();
        for i in 0..n {
            let s = i + 1;
            let t = if i % 2 == 0 { -s } else { i + 2 };
            let d = if i % 3 == 0 { p as i64 } else { 1 };
            freqs.push(PAdicPoint::new(p, vec![q(s, d), q(t, d)])?);
        }
        for x in 0..p as i64 {
            for y in 0..p as i64 {
                for xi0 in &freqs {
                    let x0 = PAdicPoint::from_ints(p, &[x, y]);
                    let qy = query(u.clone(), x0.clone(), xi0.clone(), full.clone(), 3, 3, floor);
                    let v = is_smooth_at(&qy)?;
                    let expected = wf.contains(&x0, xi0)?;
                    ensure(v.is_not_smooth() == expected && !matches!(v, SmoothnessVerdict::InconclusiveBounded { .. }), || {
                        format!("u_Δ at ({x0}, {xi0}): verdict {} but closed form says {expected}", v.kind())
                    })?;
                    match &v {
                        SmoothnessVerdict::NotSmoothWitness { phi, lambda, xi, value } => {
                            let (c, _) = phi.terms()[0].ball.product_split(1)?;
                            let (xa, xb) = xi.split_at(1)?;
                            let want = modulated_ball_integral(&c, &xa.add(&xb)?.scale(lambda)?);
                            ensure(*value == want && !want.is_zero(), || format!("u_Δ witness {value} vs brute force {want}"))?;
                        }
                        _ => ensure(replay_certificate(&qy, &v)?.is_none(), || format!("u_Δ certificate at ({x0}, {xi0}) fails"))?,
                    }
                    grid_points += 1;
                }
            }
        }
    }
    Ok(format!(
        "{certificates} density certificates ({sweeps} brute-force probes), {witnesses} Dirac witnesses ({replays} replays), {grid_points} diagonal grid points"
    ))
}

fn wf_inclusion(cfg: &SuiteConfig) -> Outcome {
    let mut rng = gen::rng(cfg.seed ^ 10);
    let params = ProbeParams { nbhd_radius: 1, probe_depth: 2, ord_floor: -3 };
    let (mut reports, mut singular) = (0, 0);
    for p in [2u64, 3] {
        let pi = p as i64;
        let xis = [q(1, 1), q(pi + 1, 1), q(1, pi), q(pi, 1), q(pi + 1, pi * pi)];
        let mut grid = Vec::new();
        for t in 0..10 {
            for xi in &xis {
                grid.push((point1(p, q(t, pi)), point1(p, xi.clone())));
            }
        }
        let a = point1(p, q(rng.gen_range(0..10), pi));
        let b = gen::point(&mut rng, p, 1, 1);
        let f = gen::nonzero_sb_function(&mut rng, p, 2, 4);
        let cases = [
            ("δ_(a,b)", Distribution::dirac(a.concat(&b)?)),
            ("T_f", Distribution::density(f)),
            ("u_Δ", Distribution::diagonal(p, 1)?),
        ];
        for (name, u) in cases {
            let k = Kernel::new(u, 1, 1)?;
            let mut lhs_singular = 0;
            for i in 0..10 {
                let mut psi = gen::nonzero_sb_function(&mut rng, p, 1, 4);
                if i % 2 == 0 {
                    psi = psi.add(&ind(&Polydisc::new(b.clone(), 2)))?;
                }
                for lambda in [LambdaGroup::full(p)?, LambdaGroup::ord_congruence(p, 2)?] {
                    let report = check_wf_inclusion(&k, &psi, &grid, &lambda, params)?;
                    let bad = report.points.iter().find(|pt| pt.violation);
                    ensure(bad.is_none(), || format!("{name}, p={p}: inclusion violated at {bad:?}"))?;
                    lhs_singular += report.points.iter().filter(|pt| pt.lhs.is_not_smooth()).count();
                    reports += 1;
                }
            }
            if name.starts_with('δ') {
                ensure(lhs_singular > 0, || format!("p={p}: no singular point of 𝒦ψ probed for {name}"))?;
            }
            singular += lhs_singular;
        }
    }
    Ok(format!("{reports} grids of 50 points, {singular} singular points of 𝒦ψ, 0 violations"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ball_counts() {
        assert_eq!(small_balls(2, 1, 0, 2).len(), 1 + 2 + 4);
        assert_eq!(small_balls(3, 1, -1, 2).len(), 1 + 1 + 3 + 9);
    }

    #[test]
    fn report_line_format() {
        let r = CriterionReport {
            id: 2,
            name: "volumes",
            passed: true,
            detail: "ok".into(),
            elapsed: Duration::from_millis(20),
            limit: Duration::from_secs(1),
        };
        assert_eq!(r.to_string(), "[PASS] criterion  2: volumes (0.02s of 1s) ok");
    }
}
