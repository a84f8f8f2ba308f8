//! Separate-holomorphy verification and desk-scale holomorphic extension.
//!
//! Functions given on a cross (black-box evaluators, possibly undefined on a
//! declared singular set) are checked for separate holomorphy fiber by fiber
//! and then extended to the hull by stratified least squares on tensor-product
//! monomials: every branch of the cross contributes samples, coordinates are
//! pre-mapped to the unit disc, and the normal equations are solved with a
//! conditioning guard and iterative refinement. Rational extensions fit
//! `g = p·f` and return `g/p` together with the singular-set descriptor
//! `M̂ = {p = 0} ∩ hull`.

pub mod linalg;
pub mod registry;

use std::sync::Arc;

use num_complex::Complex64;

use crate::cross::{gen_family, merge, project, CrossSpec, FamilyKind, MultiIndex, Point, Side};
use crate::hull::HullQuery;
use crate::par::Parallelism;
use crate::poly::MultiPoly;
use crate::sampling::{self, BaseLaw};
use crate::singular::{MKind, MSpec};
use crate::{Error, Result};

/// Black-box evaluator: `None` signals "undefined here", which must happen
/// exactly on the declared exclusion set.
pub type ComplexEvaluator = Arc<dyn Fn(&[Complex64]) -> Option<Complex64> + Send + Sync>;

/// A function sampled on a cross, with its declared exclusion set.
#[derive(Clone)]
pub struct SampledFunction {
    evaluator: ComplexEvaluator,
    domain: CrossSpec,
    exclusion: MSpec,
}

impl SampledFunction {
    pub fn new(evaluator: ComplexEvaluator, domain: CrossSpec, exclusion: MSpec) -> Result<Self> {
        if exclusion.ambient().n() != domain.n() {
            return Err(Error::DimensionMismatch(
                "exclusion set lives over a different number of factors".into(),
            ));
        }
        Ok(Self { evaluator, domain, exclusion })
    }

    pub fn eval(&self, z: &[Complex64]) -> Option<Complex64> {
        (self.evaluator)(z)
    }

    pub fn domain(&self) -> &CrossSpec {
        &self.domain
    }

    pub fn exclusion(&self) -> &MSpec {
        &self.exclusion
    }
}

/// Residual summary of a least-squares fit over its cross samples.
#[derive(Clone, Copy, Debug)]
pub struct FitResidual {
    pub max_abs: f64,
    pub rms: f64,
    /// Samples excluded by the robust trim (zero for targets the model can
    /// represent everywhere).
    pub trimmed: usize,
}

/// Conditioning report of the fit.
#[derive(Clone, Copy, Debug)]
pub struct CondReport {
    /// Condition estimate of the (equilibrated) least-squares matrix.
    pub estimate: f64,
    pub samples: usize,
    pub coefficients: usize,
}

/// Threshold above which fits are rejected instead of silently regularized.
pub const CONDITION_LIMIT: f64 = 1e12;

/// A polynomial extension in normalized coordinates `w_j = (z_j - c_j)/R_j`.
#[derive(Clone, Debug)]
pub struct PolyExtension {
    poly: MultiPoly,
    centers: Vec<Complex64>,
    radii: Vec<f64>,
    pub residual: FitResidual,
    pub conditioning: CondReport,
}

impl PolyExtension {
    pub fn degrees(&self) -> &[usize] {
        self.poly.degrees()
    }

    /// Coefficient tensor in the normalized variables.
    pub fn normalized_coeffs(&self) -> &MultiPoly {
        &self.poly
    }

    /// Coefficient tensor in the ambient variables (identical to the
    /// normalized one over unit discs centered at the origin).
    pub fn ambient_coeffs(&self) -> MultiPoly {
        let scale: Vec<f64> = self.radii.iter().map(|r| 1.0 / r).collect();
        let shift: Vec<Complex64> =
            self.centers.iter().zip(&self.radii).map(|(&c, &r)| -c / r).collect();
        self.poly.compose_affine(&scale, &shift)
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let w: Vec<Complex64> = z
            .iter()
            .zip(&self.centers)
            .zip(&self.radii)
            .map(|((&z, &c), &r)| (z - c) / r)
            .collect();
        self.poly.eval(&w)
    }
}

/// Descriptor of the singular set `M̂ = {p = 0} ∩ hull` attached to a
/// rational extension.
#[derive(Clone, Debug)]
pub struct MHatDescriptor {
    poly: MultiPoly,
    provably_empty: bool,
}

impl MHatDescriptor {
    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    /// True when `|p|` is bounded away from zero on the closed factor
    /// product, so the hull trace is empty (`M = ∅ ⇒ M̂ = ∅`).
    pub fn is_provably_empty(&self) -> bool {
        self.provably_empty
    }

    /// Searches for a hull point on `{p = 0}` by Newton iteration along the
    /// steepest coordinate from hull samples. `None` when no witness is
    /// found (in particular whenever the descriptor is provably empty).
    pub fn find_hull_witness(&self, hq: &HullQuery, seed: u64, tries: usize) -> Option<Point> {
        if self.provably_empty {
            return None;
        }
        let starts = hq.sample_hull(tries, seed).ok()?;
        let n = self.poly.nvars();
        let grads: Vec<MultiPoly> = (0..n).map(|j| self.poly.derivative(j)).collect();
        for start in starts {
            let mut z = start.coords().to_vec();
            let mut ok = false;
            for _ in 0..60 {
                let v = self.poly.eval(&z);
                if v.norm() <= 1e-14 * (1.0 + self.poly.max_coeff_norm()) {
                    ok = true;
                    break;
                }
                let (best_j, g) = (0..n)
                    .map(|j| (j, grads[j].eval(&z)))
                    .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
                    .unwrap();
                if g.norm() < 1e-12 {
                    break;
                }
                z[best_j] -= v / g;
            }
            if !ok {
                continue;
            }
            if let Ok(pt) = Point::new(z) {
                let inside = hq
                    .spec()
                    .pairs()
                    .iter()
                    .zip(pt.coords())
                    .all(|(p, &c)| p.domain().contains(c));
                if inside && matches!(hq.in_hull(&pt), Ok(m) if m.is_member()) {
                    return Some(pt);
                }
            }
        }
        None
    }
}

/// A rational extension `g/p` with its singular-set descriptor.
#[derive(Clone, Debug)]
pub struct RationalExtension {
    pub numerator: PolyExtension,
    denominator: MultiPoly,
    m_hat: MHatDescriptor,
    /// `M̂ ∩ cross ⊆ exclusion` holds by construction: the declared exclusion
    /// was validated against `{p = 0}` before fitting.
    pub exclusion_consistent: bool,
}

impl RationalExtension {
    pub fn denominator(&self) -> &MultiPoly {
        &self.denominator
    }

    pub fn m_hat(&self) -> &MHatDescriptor {
        &self.m_hat
    }

    /// Unbounded on `M̂`; finite elsewhere on the hull.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.numerator.eval(z) / self.denominator.eval(z)
    }
}

/// Fit execution options.
#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    pub parallelism: Parallelism,
    /// Solve/trim rounds; 1 disables the robust trim entirely.
    pub max_trim_rounds: usize,
    /// A retained sample is trimmed when its weighted residual exceeds this
    /// multiple of the round's median weighted residual.
    pub trim_multiplier: f64,
    /// Exponent on the inverse residual scale in the generalized
    /// least-squares weights (`row scale = sigma^-gamma`). 1 equalizes
    /// per-sample costs; larger values prioritize the well-resolved bulk.
    pub gls_exponent: f64,
    /// Contraction of the sample draws toward the factor centers. Values
    /// below 1 fit on a scaled copy of the cross (still cross points), which
    /// brackets the interior evaluation window and keeps boundary-touching
    /// singularities of borderline targets out of the sample set.
    pub sample_contraction: f64,
    /// Draw fit samples from a seeded low-discrepancy sequence instead of a
    /// pseudo-random stream.
    pub quasi_sampling: bool,
    /// Cap on the total degree of fitted monomials within the tensor box.
    /// `None` applies the default policy `ceil(5/3 · max degree)`: monomials
    /// of higher total degree are only witnessed by samples close to the
    /// torus — where borderline targets leave the representable class — so
    /// leaving them free lets them soak up unfittable residual and reradiate
    /// it as evaluation noise. `Some(very large)` disables the cap.
    pub total_degree_cap: Option<usize>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            parallelism: Parallelism::default(),
            max_trim_rounds: 2,
            trim_multiplier: 10.0,
            gls_exponent: 1.0,
            sample_contraction: 0.85,
            quasi_sampling: false,
            total_degree_cap: None,
        }
    }
}

/// Draws stratified cross samples: branches of the family are visited round
/// robin; A-coordinates come from the base sets (arcsine law on intervals),
/// D-coordinates uniformly from the discs; sigma-hit draws are rejected, as
/// are points where `f` is undefined.
fn stratified_cross_samples(
    f: &SampledFunction,
    budget: usize,
    seed: u64,
    contraction: f64,
    quasi: bool,
) -> Result<(Vec<Point>, Vec<Complex64>)> {
    let spec = &f.domain;
    let rho = if contraction > 0.0 && contraction <= 1.0 { contraction } else { 1.0 };
    let mut seq = sampling::QuasiSequence::new(3 * spec.n(), seed);
    let mut rng = sampling::rng_from_seed(seed);
    let family = spec.family();
    let mut points = Vec::with_capacity(budget);
    let mut values = Vec::with_capacity(budget);
    let cap = budget.saturating_mul(1000).max(100_000);
    let mut attempts = 0usize;
    let mut branch = 0usize;
    while points.len() < budget {
        attempts += 1;
        if attempts > cap {
            return Err(Error::SamplingExhausted { attempts });
        }
        let alpha = &family[branch % family.len()];
        let coords: Vec<Complex64> = if quasi {
            let units = seq.next_point();
            (0..spec.n())
                .map(|j| {
                    let pair = spec.pair(j);
                    let c = pair.domain().center();
                    let u = [units[3 * j], units[3 * j + 1], units[3 * j + 2]];
                    let raw = if alpha.bit(j) {
                        sampling::domain_point_from_units(pair.domain(), &u)
                    } else {
                        sampling::base_point_from_units(pair, BaseLaw::Equilibrium, &u)
                    };
                    c + rho * (raw - c)
                })
                .collect()
        } else {
            (0..spec.n())
                .map(|j| {
                    let pair = spec.pair(j);
                    let c = pair.domain().center();
                    let raw = if alpha.bit(j) {
                        sampling::draw_in_domain_banded(&mut rng, pair.domain())
                    } else {
                        sampling::draw_in_base(&mut rng, pair, BaseLaw::Equilibrium)
                    };
                    c + rho * (raw - c)
                })
                .collect()
        };
        let z = Point::new(coords)?;
        if let Some(sigma) = spec.sigma(alpha) {
            let z_alpha = project(&z, alpha, Side::Zero)?;
            if sigma.contains(&z_alpha) {
                continue;
            }
        }
        match f.eval(z.coords()) {
            Some(v) => {
                if !(v.re.is_finite() && v.im.is_finite()) {
                    continue;
                }
                points.push(z);
                values.push(v);
                branch += 1;
            }
            None => {
                if !f.exclusion.contains(z.coords()) {
                    return Err(Error::UndefinedValue(format!("at {z:?}")));
                }
            }
        }
    }
    Ok((points, values))
}

struct FitOutcome {
    poly: MultiPoly,
    residual: FitResidual,
    conditioning: CondReport,
}

/// Core tensor least-squares fit on normalized samples.
///
/// Two-stage generalized least squares. A pilot fit (at slightly reduced
/// degrees for large problems) estimates how the residual scale varies with
/// the magnitude of the target — for targets holomorphic on a neighborhood
/// of the closed product the scale is flat, while targets with singularities
/// just outside show residuals growing with `|f|`. The final fit weights
/// every sample by the inverse of its estimated scale, so no band of the
/// cross dominates the objective, and reports unweighted residuals. Samples
/// whose final weighted residual still exceeds `trim_multiplier` times the
/// median are dropped and the system refactored (a safety valve; it does not
/// fire for representable targets).
fn fit_tensor(
    samples: &[Vec<Complex64>],
    values: &[Complex64],
    degrees: &[usize],
    opts: FitOptions,
) -> Result<FitOutcome> {
    let n: usize = degrees.iter().map(|d| d + 1).product();
    let m = samples.len();
    if m < n {
        return Err(Error::InsufficientSamples { needed: n, got: m });
    }
    let cap = opts.total_degree_cap.unwrap_or_else(|| {
        if n <= 1200 {
            usize::MAX
        } else {
            // keep monomials witnessed by the sample bulk; higher total
            // degrees are informed only by near-torus samples
            (7 * degrees.iter().copied().max().unwrap_or(0) + 2) / 3
        }
    });

    // pilot stage: estimate the residual scale profile sigma(|f|)
    let pilot_degrees: Vec<usize> = if n > 1200 {
        degrees.iter().map(|&d| d.saturating_sub(2).max(1)).collect()
    } else {
        degrees.to_vec()
    };
    let mags: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    let pilot_weights = {
        let mut sorted = mags.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = sorted[sorted.len() / 2];
        let floor = (0.05 * median).max(1e-12 * sorted.last().copied().unwrap_or(0.0));
        if floor == 0.0 {
            vec![1.0; m]
        } else {
            mags.iter().map(|&d| 1.0 / d.max(floor)).collect()
        }
    };
    let n_pilot: usize = pilot_degrees.iter().map(|d| d + 1).product();
    let m_pilot = (3 * n_pilot).min(m);
    let pilot = solve_weighted(
        &samples[..m_pilot],
        &values[..m_pilot],
        &pilot_degrees,
        cap,
        &pilot_weights[..m_pilot],
        opts,
    )?;
    let pilot_res = residuals(samples, values, &pilot.poly);

    // bin by |f| quantile; per-bin scale = scaled median of |residual|,
    // forced monotone so sampling noise cannot carve dips
    let weights = {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| mags[a].partial_cmp(&mags[b]).unwrap());
        let bins = 12usize.min(m);
        let mut sigma = vec![0.0f64; bins];
        for b in 0..bins {
            let lo = b * m / bins;
            let hi = ((b + 1) * m / bins).max(lo + 1);
            let mut rs: Vec<f64> = order[lo..hi].iter().map(|&i| pilot_res[i]).collect();
            rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            sigma[b] = 1.4826 * rs[rs.len() / 2];
        }
        let scale_floor = values.iter().map(|v| v.norm()).fold(1.0, f64::max) * 1e-14 + 1e-300;
        let mut run = scale_floor;
        for sb in sigma.iter_mut() {
            run = run.max(*sb).max(scale_floor);
            *sb = run;
        }
        let mut w = vec![0.0f64; m];
        for b in 0..bins {
            let lo = b * m / bins;
            let hi = ((b + 1) * m / bins).max(lo + 1);
            let ws = sigma[b].powf(-opts.gls_exponent.max(0.5));
            for &i in &order[lo..hi.min(m)] {
                w[i] = ws;
            }
        }
        w
    };

    let mut retained = vec![true; m];
    let mut trimmed = 0usize;
    let (mut ne, active) = assemble_system(samples, values, degrees, cap, &weights, opts);
    let mut fit = solve_system(&ne, &active, degrees, samples, values, &weights, &retained, opts)?;
    for _round in 1..opts.max_trim_rounds.max(1) {
        // safety trim of rows the model cannot explain at all: their Gram
        // contributions are downdated and the system refactored
        let res = residuals_retained(samples, values, &fit.poly, &retained);
        let mut live: Vec<f64> = (0..m)
            .filter(|&i| retained[i])
            .map(|i| res[i] * weights[i])
            .collect();
        live.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = live[live.len() / 2];
        let tau = opts.trim_multiplier * median + 1e-13;
        let drops: Vec<usize> = (0..m)
            .filter(|&i| retained[i] && res[i] * weights[i] > tau)
            .collect();
        if drops.is_empty() || m - trimmed - drops.len() < active.len() {
            break;
        }
        let n = active.len();
        let mut full_row = vec![Complex64::new(0.0, 0.0); fit.poly.coeffs().len()];
        let mut row = vec![Complex64::new(0.0, 0.0); n];
        for &i in &drops {
            retained[i] = false;
            let powers = linalg::power_table(&samples[i], degrees);
            linalg::fill_basis(&powers, &mut full_row);
            for (dst, &src) in row.iter_mut().zip(active.iter()) {
                *dst = full_row[src] * weights[i];
            }
            let wv = values[i] * weights[i];
            for j in 0..n {
                let cj = row[j].conj();
                for k in 0..=j {
                    ne.g[j * n + k] -= cj * row[k];
                }
                ne.rhs[j] -= cj * wv;
            }
        }
        trimmed += drops.len();
        fit = solve_system(&ne, &active, degrees, samples, values, &weights, &retained, opts)?;
    }

    let res = residuals_retained(samples, values, &fit.poly, &retained);
    let mut max_abs = 0.0f64;
    let mut sq = 0.0;
    let mut count = 0usize;
    for i in 0..m {
        if retained[i] {
            max_abs = max_abs.max(res[i]);
            sq += res[i] * res[i];
            count += 1;
        }
    }
    Ok(FitOutcome {
        poly: fit.poly,
        residual: FitResidual { max_abs, rms: (sq / count.max(1) as f64).sqrt(), trimmed },
        conditioning: CondReport {
            estimate: fit.cond,
            samples: count,
            coefficients: active.len(),
        },
    })
}

/// Active-column set of the tensor box under a total-degree cap, plus the
/// assembled weighted normal equations.
fn assemble_system(
    samples: &[Vec<Complex64>],
    values: &[Complex64],
    degrees: &[usize],
    cap: usize,
    weights: &[f64],
    opts: FitOptions,
) -> (linalg::NormalEq, Vec<usize>) {
    let n_full: usize = degrees.iter().map(|d| d + 1).product();
    let zero_poly = MultiPoly::zeros(degrees.to_vec());
    let active: Vec<usize> = zero_poly
        .iter_terms()
        .enumerate()
        .filter(|(_, (beta, _))| beta.iter().sum::<usize>() <= cap)
        .map(|(idx, _)| idx)
        .collect();
    let n = active.len();
    let m = samples.len();
    let par = opts.parallelism;
    let mut ne = linalg::NormalEq::new(n);
    let block_rows = 128usize;
    let mut full_row = vec![Complex64::new(0.0, 0.0); n_full];
    let mut block = vec![Complex64::new(0.0, 0.0); block_rows * n];
    let mut wvals = vec![Complex64::new(0.0, 0.0); block_rows];
    let mut start = 0usize;
    while start < m {
        let rows = block_rows.min(m - start);
        for i in 0..rows {
            let powers = linalg::power_table(&samples[start + i], degrees);
            linalg::fill_basis(&powers, &mut full_row);
            let w = weights[start + i];
            let row = &mut block[i * n..(i + 1) * n];
            for (dst, &src) in row.iter_mut().zip(active.iter()) {
                *dst = full_row[src] * w;
            }
            wvals[i] = values[start + i] * w;
        }
        ne.accumulate(&block[..rows * n], &wvals[..rows], par);
        start += rows;
    }
    (ne, active)
}

/// Equilibrates (a copy of) the system, factors it, guards conditioning,
/// solves, and runs two refinement passes against the retained samples.
fn solve_system(
    ne: &linalg::NormalEq,
    active: &[usize],
    degrees: &[usize],
    samples: &[Vec<Complex64>],
    values: &[Complex64],
    weights: &[f64],
    retained: &[bool],
    opts: FitOptions,
) -> Result<WeightedSolve> {
    let n = active.len();
    let n_full: usize = degrees.iter().map(|d| d + 1).product();
    let par = opts.parallelism;
    let mut sys = ne.g.clone();
    let scale: Vec<f64> = (0..n)
        .map(|j| {
            let d = sys[j * n + j].re;
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    for j in 0..n {
        for k in 0..=j {
            sys[j * n + k] *= scale[j] * scale[k];
        }
    }
    let eq = linalg::NormalEq { n, g: sys.clone(), rhs: Vec::new() };
    let mut l = sys;
    linalg::cholesky(&mut l, n, par)?;
    let cond = linalg::condition_estimate(&eq, &l);
    if !(cond < CONDITION_LIMIT) {
        return Err(Error::IllConditioned { estimate: cond });
    }
    let solve_raw = |b: &[Complex64]| -> Vec<Complex64> {
        let mut t: Vec<Complex64> = b.iter().zip(&scale).map(|(&v, &s)| v * s).collect();
        linalg::chol_solve(&l, n, &mut t);
        t.iter().zip(&scale).map(|(&v, &s)| v * s).collect()
    };
    let mut x = solve_raw(&ne.rhs);
    let mut full_row = vec![Complex64::new(0.0, 0.0); n_full];
    let mut basis = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..2 {
        let mut corr = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..samples.len() {
            if !retained[i] {
                continue;
            }
            let powers = linalg::power_table(&samples[i], degrees);
            linalg::fill_basis(&powers, &mut full_row);
            for (dst, &src) in basis.iter_mut().zip(active.iter()) {
                *dst = full_row[src];
            }
            let fitted: Complex64 = basis.iter().zip(&x).map(|(&b, &c)| b * c).sum();
            let rw = (values[i] - fitted) * (weights[i] * weights[i]);
            for (cj, &bj) in corr.iter_mut().zip(&basis) {
                *cj += bj.conj() * rw;
            }
        }
        let delta = solve_raw(&corr);
        for (xj, dj) in x.iter_mut().zip(&delta) {
            *xj += dj;
        }
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n_full];
    for (&src, &val) in active.iter().zip(&x) {
        coeffs[src] = val;
    }
    Ok(WeightedSolve { poly: MultiPoly::new(degrees.to_vec(), coeffs)?, cond })
}

struct WeightedSolve {
    poly: MultiPoly,
    cond: f64,
}

/// Assembles and solves one weighted normal-equations system with two steps
/// of iterative refinement. `weights` are row scales: the solve minimizes
/// `Σ (w_i |value_i - P(z_i)|)^2` over monomials of total degree at most
/// `cap` within the tensor box; the returned tensor carries zeros outside.
fn solve_weighted(
    samples: &[Vec<Complex64>],
    values: &[Complex64],
    degrees: &[usize],
    cap: usize,
    weights: &[f64],
    opts: FitOptions,
) -> Result<WeightedSolve> {
    let n_full: usize = degrees.iter().map(|d| d + 1).product();
    let zero_poly = MultiPoly::zeros(degrees.to_vec());
    let active: Vec<usize> = zero_poly
        .iter_terms()
        .enumerate()
        .filter(|(_, (beta, _))| beta.iter().sum::<usize>() <= cap)
        .map(|(idx, _)| idx)
        .collect();
    let n = active.len();
    let m = samples.len();
    if m < n {
        return Err(Error::InsufficientSamples { needed: n, got: m });
    }
    let par = opts.parallelism;
    let mut ne = linalg::NormalEq::new(n);
    let block_rows = 128usize;
    let mut full_row = vec![Complex64::new(0.0, 0.0); n_full];
    let mut block = vec![Complex64::new(0.0, 0.0); block_rows * n];
    let mut wvals = vec![Complex64::new(0.0, 0.0); block_rows];
    let mut start = 0usize;
    while start < m {
        let rows = block_rows.min(m - start);
        for i in 0..rows {
            let powers = linalg::power_table(&samples[start + i], degrees);
            linalg::fill_basis(&powers, &mut full_row);
            let w = weights[start + i];
            let row = &mut block[i * n..(i + 1) * n];
            for (dst, &src) in row.iter_mut().zip(active.iter()) {
                *dst = full_row[src] * w;
            }
            wvals[i] = values[start + i] * w;
        }
        ne.accumulate(&block[..rows * n], &wvals[..rows], par);
        start += rows;
    }
    let scale = ne.equilibrate();
    let mut l = ne.g.clone();
    linalg::cholesky(&mut l, n, par)?;
    let eq = linalg::NormalEq { n, g: ne.g.clone(), rhs: Vec::new() };
    let cond = linalg::condition_estimate(&eq, &l);
    if !(cond < CONDITION_LIMIT) {
        return Err(Error::IllConditioned { estimate: cond });
    }
    let solve_raw = |b: &[Complex64]| -> Vec<Complex64> {
        let mut t: Vec<Complex64> = b.iter().zip(&scale).map(|(&v, &s)| v * s).collect();
        linalg::chol_solve(&l, n, &mut t);
        t.iter().zip(&scale).map(|(&v, &s)| v * s).collect()
    };
    let mut x = solve_raw(&ne.rhs);
    let mut basis = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..2 {
        let mut corr = vec![Complex64::new(0.0, 0.0); n];
        for ((zi, &vi), &wi) in samples.iter().zip(values).zip(weights) {
            let powers = linalg::power_table(zi, degrees);
            linalg::fill_basis(&powers, &mut full_row);
            for (dst, &src) in basis.iter_mut().zip(active.iter()) {
                *dst = full_row[src];
            }
            let fitted: Complex64 = basis.iter().zip(&x).map(|(&b, &c)| b * c).sum();
            let rw = (vi - fitted) * (wi * wi);
            for (cj, &bj) in corr.iter_mut().zip(&basis) {
                *cj += bj.conj() * rw;
            }
        }
        let delta = solve_raw(&corr);
        for (xj, dj) in x.iter_mut().zip(&delta) {
            *xj += dj;
        }
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n_full];
    for (&src, &val) in active.iter().zip(&x) {
        coeffs[src] = val;
    }
    Ok(WeightedSolve { poly: MultiPoly::new(degrees.to_vec(), coeffs)?, cond })
}

fn residuals(samples: &[Vec<Complex64>], values: &[Complex64], poly: &MultiPoly) -> Vec<f64> {
    samples
        .iter()
        .zip(values)
        .map(|(z, &v)| (v - poly.eval(z)).norm())
        .collect()
}

fn residuals_retained(
    samples: &[Vec<Complex64>],
    values: &[Complex64],
    poly: &MultiPoly,
    retained: &[bool],
) -> Vec<f64> {
    samples
        .iter()
        .zip(values)
        .zip(retained)
        .map(|((z, &v), &keep)| if keep { (v - poly.eval(z)).norm() } else { 0.0 })
        .collect()
}

fn normalize_samples(spec: &CrossSpec, points: &[Point]) -> Vec<Vec<Complex64>> {
    points
        .iter()
        .map(|z| {
            z.coords()
                .iter()
                .enumerate()
                .map(|(j, &c)| {
                    let d = spec.pair(j).domain();
                    (c - d.center()) / d.radius()
                })
                .collect()
        })
        .collect()
}

/// Least-squares polynomial extension of an exclusion-free separately
/// holomorphic function from stratified cross samples. The budget must cover
/// the coefficient count three times over.
pub fn extend_poly(
    f: &SampledFunction,
    degrees: &[usize],
    budget: usize,
    seed: u64,
) -> Result<PolyExtension> {
    extend_poly_opts(f, degrees, budget, seed, FitOptions::default())
}

pub fn extend_poly_opts(
    f: &SampledFunction,
    degrees: &[usize],
    budget: usize,
    seed: u64,
    opts: FitOptions,
) -> Result<PolyExtension> {
    if !f.exclusion.is_empty_descriptor() {
        return Err(Error::InvalidInput(
            "extend_poly needs an exclusion-free function; use extend_rational".into(),
        ));
    }
    fit_extension(f, degrees, budget, seed, opts)
}

fn fit_extension(
    f: &SampledFunction,
    degrees: &[usize],
    budget: usize,
    seed: u64,
    opts: FitOptions,
) -> Result<PolyExtension> {
    let spec = &f.domain;
    if degrees.len() != spec.n() {
        return Err(Error::LengthMismatch { expected: spec.n(), got: degrees.len() });
    }
    let ncoeff: usize = degrees.iter().map(|d| d + 1).product();
    if budget < 3 * ncoeff {
        return Err(Error::InsufficientSamples { needed: 3 * ncoeff, got: budget });
    }
    let (points, values) =
        stratified_cross_samples(f, budget, seed, opts.sample_contraction, opts.quasi_sampling)?;
    let normalized = normalize_samples(spec, &points);
    let outcome = fit_tensor(&normalized, &values, degrees, opts)?;
    let centers = spec.pairs().iter().map(|p| p.domain().center()).collect();
    let radii = spec.pairs().iter().map(|p| p.domain().radius()).collect();
    Ok(PolyExtension {
        poly: outcome.poly,
        centers,
        radii,
        residual: outcome.residual,
        conditioning: outcome.conditioning,
    })
}

/// Rational extension: fits `g = p·f` (holomorphic across the exclusion for
/// the admitted function class) and returns `g/p` with
/// `M̂ = {p = 0} ∩ hull`.
///
/// The declared exclusion must equal `{p = 0} ∩ cross`: either the exclusion
/// is the zero-set descriptor of `p` itself, or it is empty and `p` is
/// provably zero-free on the closed factor product.
pub fn extend_rational(
    f: &SampledFunction,
    p: &MultiPoly,
    degrees: &[usize],
    budget: usize,
    seed: u64,
) -> Result<RationalExtension> {
    extend_rational_opts(f, p, degrees, budget, seed, FitOptions::default())
}

pub fn extend_rational_opts(
    f: &SampledFunction,
    p: &MultiPoly,
    degrees: &[usize],
    budget: usize,
    seed: u64,
    opts: FitOptions,
) -> Result<RationalExtension> {
    let spec = &f.domain;
    if p.is_zero() {
        return Err(Error::DenominatorVanishesIdentically);
    }
    if p.nvars() != spec.n() {
        return Err(Error::DimensionMismatch(format!(
            "denominator has {} variables, cross has {}",
            p.nvars(),
            spec.n()
        )));
    }
    let radii: Vec<f64> = spec.pairs().iter().map(|q| q.domain().radius()).collect();
    let provably_empty = p.zero_free_margin(&radii) > 0.0;
    let exclusion_consistent = match f.exclusion.kind() {
        MKind::PolyZero(q) => q == p,
        MKind::Empty => provably_empty,
        MKind::Points(_) => false,
    };
    if !exclusion_consistent {
        return Err(Error::InvalidInput(
            "the declared exclusion set must be the zero set of the denominator".into(),
        ));
    }

    let p_for_eval = p.clone();
    let inner = f.evaluator.clone();
    let g_eval: ComplexEvaluator =
        Arc::new(move |z: &[Complex64]| inner(z).map(|v| v * p_for_eval.eval(z)));
    let g = SampledFunction {
        evaluator: g_eval,
        domain: f.domain.clone(),
        exclusion: MSpec::empty(f.domain.clone()),
    };
    let numerator = fit_extension(&g, degrees, budget, seed, opts)?;
    Ok(RationalExtension {
        numerator,
        denominator: p.clone(),
        m_hat: MHatDescriptor { poly: p.clone(), provably_empty },
        exclusion_consistent: true,
    })
}

/// Error statistics of an extension against an oracle on given samples.
#[derive(Clone, Copy, Debug, Default)]
pub struct ErrorStats {
    pub count: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub max_rel: f64,
    pub mean_rel: f64,
}

/// Compares an extension evaluator with an oracle on sample points; samples
/// where the oracle is undefined are skipped. An empty list yields
/// zero-count statistics.
pub fn compare_on_hull<E, O>(extension: E, oracle: O, samples: &[Point]) -> ErrorStats
where
    E: Fn(&[Complex64]) -> Complex64,
    O: Fn(&[Complex64]) -> Option<Complex64>,
{
    let mut stats = ErrorStats::default();
    let mut abs_sum = 0.0;
    let mut rel_sum = 0.0;
    for z in samples {
        let Some(truth) = oracle(z.coords()) else { continue };
        let got = extension(z.coords());
        let abs = (got - truth).norm();
        stats.count += 1;
        abs_sum += abs;
        stats.max_abs = stats.max_abs.max(abs);
        if truth.norm() > 1e-300 {
            let rel = abs / truth.norm();
            rel_sum += rel;
            stats.max_rel = stats.max_rel.max(rel);
        }
    }
    if stats.count > 0 {
        stats.mean_abs = abs_sum / stats.count as f64;
        stats.mean_rel = rel_sum / stats.count as f64;
    }
    stats
}

/// Per-branch residual of the separate-holomorphy check.
#[derive(Clone, Debug)]
pub struct AlphaResidual {
    pub alpha: MultiIndex,
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
    pub fibers_checked: usize,
    pub fibers_skipped: usize,
}

/// Continuity probe for the `O^c` class (finite sampling only — heuristic).
#[derive(Clone, Debug)]
pub struct ContinuityEstimate {
    pub alpha: MultiIndex,
    pub step: f64,
    pub max_delta: f64,
}

#[derive(Clone, Debug)]
pub struct SepHoloReport {
    pub per_alpha: Vec<AlphaResidual>,
    pub pass: bool,
    /// Present in `O^c` mode; a finite-sampling estimate, flagged heuristic.
    pub continuity: Option<Vec<ContinuityEstimate>>,
    pub heuristic_continuity: bool,
}

/// Verifies separate holomorphy by a discrete Cauchy-Riemann residual along
/// the D-fibers of every branch.
///
/// For each `α` a few base points `a ∈ A_0^α \ Σ_α` are drawn, then
/// `resolution` fiber points; at each the `∂/∂z̄` residual of the fiber map
/// is estimated with a 4-point stencil of half-width `1e-5·R`. The reported
/// residual is scaled by the stencil width so holomorphic functions land
/// near rounding level while an anti-holomorphic coordinate shows `O(1)`.
/// For generalized crosses (any `Σ_α` present) the `O^c` continuity of the
/// A-side maps is probed by finite differences as well.
pub fn check_sep_holo(f: &SampledFunction, resolution: usize, seed: u64) -> Result<SepHoloReport> {
    if resolution < 8 {
        return Err(Error::InvalidInput("resolution must be at least 8".into()));
    }
    let spec = &f.domain;
    let n = spec.n();
    let mut rng = sampling::rng_from_seed(seed);
    let family = spec.family();
    let oc_mode = !spec.sigmas().is_empty();

    // stencil points too close to the exclusion are skipped: the finite
    // difference would see the pole, not non-holomorphy
    let near_exclusion = |z: &[Complex64]| -> bool {
        match f.exclusion.kind() {
            MKind::Empty => false,
            MKind::Points(list) => list
                .iter()
                .any(|p| p.iter().zip(z).map(|(&a, &b)| (a - b).norm_sqr()).sum::<f64>() < 1e-2),
            MKind::PolyZero(p) => p.eval(z).norm() < 0.05 * (1.0 + p.max_coeff_norm()),
        }
    };

    let eval_checked = |z: &[Complex64]| -> Result<Option<Complex64>> {
        match f.eval(z) {
            Some(v) => Ok(Some(v)),
            None => {
                if f.exclusion.contains(z) {
                    Ok(None)
                } else {
                    Err(Error::UndefinedValue(format!(
                        "evaluator undefined at {z:?} outside the declared exclusion"
                    )))
                }
            }
        }
    };

    let mut per_alpha = Vec::new();
    let mut continuity = Vec::new();
    for alpha in &family {
        let one_slots: Vec<usize> = (0..n).filter(|&j| alpha.bit(j)).collect();
        let zero_slots: Vec<usize> = (0..n).filter(|&j| !alpha.bit(j)).collect();
        let mut max_residual = 0.0_f64;
        let mut scale = 1.0_f64;
        let mut checked = 0usize;
        let mut skipped = 0usize;
        for _ in 0..3 {
            // a ∈ A_0^α \ Σ_α
            let a: Vec<Complex64> = loop {
                let cand: Vec<Complex64> = zero_slots
                    .iter()
                    .map(|&j| sampling::draw_in_base(&mut rng, spec.pair(j), BaseLaw::Uniform))
                    .collect();
                match spec.sigma(alpha) {
                    Some(s) if s.contains(&cand) => continue,
                    _ => break cand,
                }
            };
            for _ in 0..resolution {
                let b: Vec<Complex64> = one_slots
                    .iter()
                    .map(|&j| sampling::draw_in_domain(&mut rng, spec.pair(j).domain()))
                    .collect();
                // margin so the complex stencil offsets stay inside the discs
                let inside = one_slots.iter().zip(&b).all(|(&j, &w)| {
                    let d = spec.pair(j).domain();
                    (w - d.center()).norm() < d.radius() * (1.0 - 1e-4)
                });
                if !inside {
                    skipped += 1;
                    continue;
                }
                let center = merge(alpha, &a, &b)?;
                if near_exclusion(center.coords()) {
                    skipped += 1;
                    continue;
                }
                let mut fiber_ok = true;
                let mut stencil_vals = Vec::new();
                for (slot, &j) in one_slots.iter().enumerate() {
                    let h = 1e-5 * spec.pair(j).domain().radius();
                    let offsets = [
                        Complex64::new(h, 0.0),
                        Complex64::new(-h, 0.0),
                        Complex64::new(0.0, h),
                        Complex64::new(0.0, -h),
                    ];
                    let mut vals = [Complex64::new(0.0, 0.0); 4];
                    for (i, off) in offsets.iter().enumerate() {
                        let mut bb = b.clone();
                        bb[slot] += off;
                        let zz = merge(alpha, &a, &bb)?;
                        if near_exclusion(zz.coords()) {
                            fiber_ok = false;
                            break;
                        }
                        match eval_checked(zz.coords())? {
                            Some(v) => vals[i] = v,
                            None => {
                                fiber_ok = false;
                                break;
                            }
                        }
                    }
                    if !fiber_ok {
                        break;
                    }
                    stencil_vals.push((vals, h));
                }
                if !fiber_ok {
                    skipped += 1;
                    continue;
                }
                checked += 1;
                for (vals, h) in stencil_vals {
                    for v in vals {
                        scale = scale.max(v.norm());
                    }
                    // ∂f/∂z̄ ≈ ((f(+h) - f(-h)) + i (f(+ih) - f(-ih))) / 4h;
                    // for f = conj(w) this is exactly 1
                    let dbar = ((vals[0] - vals[1])
                        + Complex64::new(0.0, 1.0) * (vals[2] - vals[3]))
                        / (4.0 * h);
                    max_residual = max_residual.max(dbar.norm());
                }
            }
        }
        let threshold = 1e-6 * scale;
        per_alpha.push(AlphaResidual {
            alpha: alpha.clone(),
            max_residual,
            threshold,
            pass: max_residual <= threshold,
            fibers_checked: checked,
            fibers_skipped: skipped,
        });

        if oc_mode && !zero_slots.is_empty() {
            let step = 1e-3;
            let mut max_delta = 0.0_f64;
            for _ in 0..resolution.min(32) {
                let b: Vec<Complex64> = one_slots
                    .iter()
                    .map(|&j| sampling::draw_in_domain(&mut rng, spec.pair(j).domain()))
                    .collect();
                let a: Vec<Complex64> = zero_slots
                    .iter()
                    .map(|&j| sampling::draw_in_base(&mut rng, spec.pair(j), BaseLaw::Uniform))
                    .collect();
                let mut a2 = a.clone();
                for (i, &j) in zero_slots.iter().enumerate() {
                    let anchor = spec.pair(j).anchor();
                    let dir = anchor - a2[i];
                    if dir.norm() > 1e-12 {
                        a2[i] += step * dir / dir.norm();
                    }
                }
                let z1 = merge(alpha, &a, &b)?;
                let z2 = merge(alpha, &a2, &b)?;
                if near_exclusion(z1.coords()) || near_exclusion(z2.coords()) {
                    continue;
                }
                if let (Some(v1), Some(v2)) =
                    (eval_checked(z1.coords())?, eval_checked(z2.coords())?)
                {
                    max_delta = max_delta.max((v1 - v2).norm());
                }
            }
            continuity.push(ContinuityEstimate { alpha: alpha.clone(), step, max_delta });
        }
    }
    let pass = per_alpha.iter().all(|r| r.pass);
    Ok(SepHoloReport {
        per_alpha,
        pass,
        continuity: if oc_mode { Some(continuity) } else { None },
        heuristic_continuity: oc_mode,
    })
}

/// Stratified cross sample points without values, shared by the invariant
/// batteries: every returned point lies in the cross by construction,
/// sigma-hit draws are rejected.
pub fn stratified_cross_points(spec: &CrossSpec, count: usize, seed: u64) -> Result<Vec<Point>> {
    let mut rng = sampling::rng_from_seed(seed);
    let family = match spec.variant() {
        crate::cross::Variant::X | crate::cross::Variant::T => {
            gen_family(spec.n(), spec.k(), FamilyKind::I)?
        }
        crate::cross::Variant::Y => gen_family(spec.n(), spec.k(), FamilyKind::J)?,
    };
    let cap = count.saturating_mul(1000).max(100_000);
    let mut attempts = 0usize;
    let mut out = Vec::with_capacity(count);
    let mut branch = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > cap {
            return Err(Error::SamplingExhausted { attempts });
        }
        let alpha = &family[branch % family.len()];
        let coords: Vec<Complex64> = (0..spec.n())
            .map(|j| {
                let pair = spec.pair(j);
                if alpha.bit(j) {
                    sampling::draw_in_domain(&mut rng, pair.domain())
                } else {
                    sampling::draw_in_base(&mut rng, pair, BaseLaw::Uniform)
                }
            })
            .collect();
        let z = Point::new(coords)?;
        if let Some(sigma) = spec.sigma(alpha) {
            let z_alpha = project(&z, alpha, Side::Zero)?;
            if sigma.contains(&z_alpha) {
                continue;
            }
        }
        out.push(z);
        branch += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::Strategy;
    use crate::geometry::{make_pair, BaseSet, PlanarDomain};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn paper_spec(n: usize, k: usize) -> CrossSpec {
        let pairs = (0..n)
            .map(|_| {
                make_pair(BaseSet::interval(-1.0, 1.0).unwrap(), PlanarDomain::unit()).unwrap()
            })
            .collect();
        CrossSpec::plain(pairs, k).unwrap()
    }

    #[test]
    fn polynomial_coefficients_are_recovered() {
        let spec = paper_spec(3, 2);
        let reg = registry::function("poly", &spec).unwrap();
        let reference = reg.reference_poly.unwrap();
        let ext = extend_poly(&reg.f, &[2, 2, 2], 200, 42).unwrap();
        assert!(ext.residual.max_abs < 1e-10, "residual {:?}", ext.residual);
        assert_eq!(ext.residual.trimmed, 0);
        let fitted = ext.ambient_coeffs();
        for (beta, want) in reference.iter_terms() {
            assert!(
                (fitted.coeff(&beta) - want).norm() < 1e-8,
                "coefficient {beta:?} off: {} vs {want}",
                fitted.coeff(&beta)
            );
        }
    }

    #[test]
    fn zero_function_gives_zero_tensor() {
        let spec = paper_spec(3, 2);
        let reg = registry::function("zero", &spec).unwrap();
        let ext = extend_poly(&reg.f, &[2, 2, 2], 100, 7).unwrap();
        assert!(ext.normalized_coeffs().coeffs().iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn budget_below_three_coefficients_is_rejected() {
        let spec = paper_spec(3, 2);
        let reg = registry::function("poly", &spec).unwrap();
        assert!(matches!(
            extend_poly(&reg.f, &[2, 2, 2], 80, 7),
            Err(Error::InsufficientSamples { needed: 81, got: 80 })
        ));
    }

    #[test]
    fn rational_with_exclusion_needs_rational_path() {
        let spec = paper_spec(3, 2);
        let reg = registry::function("rational", &spec).unwrap();
        assert!(matches!(
            extend_poly(&reg.f, &[2, 2, 2], 100, 7),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn rational_numerator_is_constant_one() {
        let spec = paper_spec(3, 2);
        let reg = registry::function("rational", &spec).unwrap();
        let p = reg.denominator.unwrap();
        let ext = extend_rational(&reg.f, &p, &[2, 2, 2], 200, 11).unwrap();
        assert!(ext.exclusion_consistent);
        assert!(!ext.m_hat().is_provably_empty());
        let g = ext.numerator.ambient_coeffs();
        for (beta, got) in g.iter_terms() {
            let want = if beta.iter().all(|&b| b == 0) { c(1.0, 0.0) } else { c(0.0, 0.0) };
            assert!((got - want).norm() < 1e-6, "coefficient {beta:?} = {got}");
        }
    }

    #[test]
    fn rational_far_pole_has_empty_m_hat() {
        let spec = paper_spec(3, 2);
        let reg = registry::function("rational-far", &spec).unwrap();
        let p = reg.denominator.unwrap();
        let ext = extend_rational(&reg.f, &p, &[2, 2, 2], 200, 11).unwrap();
        assert!(ext.m_hat().is_provably_empty());
        let hq = HullQuery::uniform(spec, Strategy::ClosedForm).unwrap();
        assert!(ext.m_hat().find_hull_witness(&hq, 3, 64).is_none());
    }

    #[test]
    fn rational_z3_numerator_recovers_monomial() {
        let spec = paper_spec(3, 2);
        let reg = registry::function("rational-z3", &spec).unwrap();
        let p = reg.denominator.unwrap();
        let reference = reg.reference_poly.unwrap();
        let ext = extend_rational(&reg.f, &p, &[1, 1, 1], 100, 5).unwrap();
        let g = ext.numerator.ambient_coeffs();
        for (beta, want) in reference.iter_terms() {
            assert!((g.coeff(&beta) - want).norm() < 1e-6, "coefficient {beta:?}");
        }
    }

    #[test]
    fn mismatched_denominator_is_rejected() {
        let spec = paper_spec(3, 2);
        let reg = registry::function("rational", &spec).unwrap();
        let wrong = MultiPoly::affine(
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            c(-0.25, 0.0),
        );
        assert!(matches!(
            extend_rational(&reg.f, &wrong, &[1, 1, 1], 100, 5),
            Err(Error::InvalidInput(_))
        ));
        let zero = MultiPoly::zeros(vec![1, 1, 1]);
        assert!(matches!(
            extend_rational(&reg.f, &zero, &[1, 1, 1], 100, 5),
            Err(Error::DenominatorVanishesIdentically)
        ));
    }

    #[test]
    fn sep_holo_accepts_polynomials() {
        let spec = paper_spec(3, 2);
        let reg = registry::function("poly", &spec).unwrap();
        let report = check_sep_holo(&reg.f, 16, 3).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.continuity.is_none());
    }

    #[test]
    fn sep_holo_rejects_conjugate_coordinate() {
        let spec = paper_spec(3, 2);
        let reg = registry::function("conj2", &spec).unwrap();
        let report = check_sep_holo(&reg.f, 16, 3).unwrap();
        assert!(!report.pass);
        for r in &report.per_alpha {
            // every branch with a one in slot 2 sees the anti-holomorphic
            // coordinate with residual near 1
            if r.alpha.bit(1) {
                assert!(r.max_residual > 1e-1, "{r:?}");
            }
        }
    }

    #[test]
    fn sep_holo_handles_declared_poles() {
        let spec = paper_spec(3, 2);
        let reg = registry::function("rational", &spec).unwrap();
        let report = check_sep_holo(&reg.f, 16, 3).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn sep_holo_flags_undeclared_undefined_values() {
        let spec = paper_spec(3, 2);
        let eval: ComplexEvaluator = Arc::new(|z: &[Complex64]| {
            if z[0].re > 0.0 {
                None
            } else {
                Some(z[0])
            }
        });
        let f = SampledFunction::new(eval, spec.clone(), MSpec::empty(spec)).unwrap();
        assert!(matches!(check_sep_holo(&f, 8, 3), Err(Error::UndefinedValue(_))));
    }

    #[test]
    fn compare_on_hull_empty_samples() {
        let stats = compare_on_hull(|_| c(0.0, 0.0), |_| Some(c(0.0, 0.0)), &[]);
        assert_eq!(stats.count, 0);
        assert_eq!(stats.max_abs, 0.0);
    }

    #[test]
    fn rational_blows_up_near_m_hat() {
        let spec = paper_spec(3, 2);
        let reg = registry::function("rational", &spec).unwrap();
        let p = reg.denominator.unwrap();
        let ext = extend_rational(&reg.f, &p, &[2, 2, 2], 200, 11).unwrap();
        let hq = HullQuery::uniform(spec, Strategy::ClosedForm).unwrap();
        let witness = ext.m_hat().find_hull_witness(&hq, 9, 64).expect("hull witness");
        // approach along the first coordinate: |p| there equals the step
        let mut z = witness.coords().to_vec();
        z[0] += c(1e-7 * 2f64.sqrt(), 0.0);
        assert!(ext.eval(&z).norm() >= 1e6);
    }

    #[test]
    fn two_seeds_agree_on_interior_for_representable_targets() {
        let spec = paper_spec(3, 2);
        let reg = registry::function("poly", &spec).unwrap();
        let a = extend_poly(&reg.f, &[2, 2, 2], 200, 1).unwrap();
        let b = extend_poly(&reg.f, &[2, 2, 2], 200, 2).unwrap();
        let hq = HullQuery::uniform(spec, Strategy::ClosedForm).unwrap();
        for z in hq.sample_hull(64, 5).unwrap() {
            let shrunk: Vec<Complex64> = z.coords().iter().map(|&w| w * 0.8).collect();
            assert!((a.eval(&shrunk) - b.eval(&shrunk)).norm() < 1e-6);
        }
    }
}
