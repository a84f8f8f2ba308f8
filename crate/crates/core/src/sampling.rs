//! Seeded randomness and coordinate draws.
//!
//! All randomness funnels through `ChaCha8` generators created from explicit
//! seeds, so every sampled battery is reproducible across platforms and
//! thread counts.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{BaseSet, PairAD, PlanarDomain};

/// Distribution used when drawing from a base set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseLaw {
    /// Uniform in length/area.
    Uniform,
    /// Arcsine law on intervals (uniform on subdiscs); concentrates mass near
    /// interval ends, which conditions polynomial fitting better.
    Equilibrium,
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from the open disc (area measure).
pub fn draw_in_domain(rng: &mut ChaCha8Rng, d: &PlanarDomain) -> Complex64 {
    loop {
        let u: f64 = rng.gen();
        let t: f64 = rng.gen();
        let r = d.radius() * u.sqrt();
        let z = d.center() + Complex64::from_polar(r, 2.0 * std::f64::consts::PI * t);
        if d.contains(z) {
            return z;
        }
    }
}

fn draw_in_piece(rng: &mut ChaCha8Rng, piece: &BaseSet, law: BaseLaw) -> Complex64 {
    match piece {
        BaseSet::Interval { a, b } => {
            let u: f64 = rng.gen();
            let t = match law {
                BaseLaw::Uniform => a + (b - a) * u,
                BaseLaw::Equilibrium => {
                    let mid = 0.5 * (a + b);
                    let half = 0.5 * (b - a);
                    mid + half * (std::f64::consts::PI * u).cos()
                }
            };
            Complex64::new(t, 0.0)
        }
        BaseSet::Subdisc { center, radius } => {
            let u: f64 = rng.gen();
            let t: f64 = rng.gen();
            center + Complex64::from_polar(radius * u.sqrt(), 2.0 * std::f64::consts::PI * t)
        }
        BaseSet::Union(_) => unreachable!("unions are flattened before drawing"),
    }
}

/// Draw a point of `A ∩ D`; union pieces are chosen uniformly.
pub fn draw_in_base(rng: &mut ChaCha8Rng, pair: &PairAD, law: BaseLaw) -> Complex64 {
    loop {
        let z0 = match pair.base() {
            BaseSet::Union(pieces) => {
                let i = rng.gen_range(0..pieces.len());
                draw_in_piece(rng, &pieces[i], law)
            }
            single => draw_in_piece(rng, single, law),
        };
        let z = pair.push_forward(z0);
        if pair.base_contains(z) {
            return z;
        }
    }
}

/// Product draw taking each coordinate from `A_j` with probability 1/2 and
/// from `D_j` otherwise, so measure-zero bases are hit.
pub fn draw_mixed_coord(rng: &mut ChaCha8Rng, pair: &PairAD, law: BaseLaw) -> Complex64 {
    if rng.gen::<bool>() {
        draw_in_base(rng, pair, law)
    } else {
        draw_in_domain(rng, pair.domain())
    }
}

/// Domain draw biased toward the real diameter: two thirds of the draws are
/// area-uniform, one third sits in a wide band around the real axis.
/// Fitting uses this for D-coordinates because the hull — where extensions
/// are evaluated — clusters around the base sets, and a purely area-uniform
/// law underconstrains that region.
pub fn draw_in_domain_banded(rng: &mut ChaCha8Rng, d: &PlanarDomain) -> Complex64 {
    if rng.gen_range(0..3) != 0 {
        return draw_in_domain(rng, d);
    }
    loop {
        let t: f64 = rng.gen::<f64>() * 2.0 - 1.0;
        let cap = 0.6 * (1.0 - t * t).sqrt();
        let v: f64 = (rng.gen::<f64>() * 2.0 - 1.0) * cap;
        let z = d.center() + d.radius() * Complex64::new(t, v);
        if d.contains(z) {
            return z;
        }
    }
}

/// Seeded low-discrepancy sequence (Halton with a Cranley-Patterson
/// rotation). The fit sampler uses it instead of pseudo-random draws: the
/// uniform coverage removes most seed-to-seed scatter of the fitted
/// coefficients while staying deterministic per seed.
pub struct QuasiSequence {
    index: u64,
    bases: Vec<u32>,
    shifts: Vec<f64>,
}

impl QuasiSequence {
    pub fn new(dims: usize, seed: u64) -> Self {
        const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
        assert!(dims <= PRIMES.len(), "too many quasi-random dimensions");
        let mut rng = rng_from_seed(seed ^ 0x9e37_79b9_7f4a_7c15);
        let shifts = (0..dims).map(|_| rng.gen::<f64>()).collect();
        Self { index: 1, bases: PRIMES[..dims].to_vec(), shifts }
    }

    fn radical_inverse(mut n: u64, base: u32) -> f64 {
        let b = base as u64;
        let mut inv = 1.0 / base as f64;
        let mut acc = 0.0;
        let mut scale = inv;
        while n > 0 {
            acc += (n % b) as f64 * scale;
            n /= b;
            scale *= inv;
        }
        let _ = inv;
        acc
    }

    /// Next point of the sequence in `[0,1)^dims`.
    pub fn next_point(&mut self) -> Vec<f64> {
        let i = self.index;
        self.index += 1;
        self.bases
            .iter()
            .zip(&self.shifts)
            .map(|(&b, &s)| {
                let u = Self::radical_inverse(i, b) + s;
                u - u.floor()
            })
            .collect()
    }
}

/// Quasi-random draw from a base set (arcsine on intervals, area-uniform on
/// subdiscs; `u` supplies three unit coordinates).
pub fn base_point_from_units(pair: &PairAD, law: BaseLaw, u: &[f64; 3]) -> Complex64 {
    let piece_point = |piece: &BaseSet| -> Complex64 {
        match piece {
            BaseSet::Interval { a, b } => {
                let t = match law {
                    BaseLaw::Uniform => a + (b - a) * u[0],
                    BaseLaw::Equilibrium => {
                        0.5 * (a + b) + 0.5 * (b - a) * (std::f64::consts::PI * u[0]).cos()
                    }
                };
                Complex64::new(t, 0.0)
            }
            BaseSet::Subdisc { center, radius } => {
                center
                    + Complex64::from_polar(
                        radius * u[0].sqrt(),
                        2.0 * std::f64::consts::PI * u[1],
                    )
            }
            BaseSet::Union(_) => unreachable!(),
        }
    };
    let z0 = match pair.base() {
        BaseSet::Union(pieces) => {
            let idx = ((u[2] * pieces.len() as f64) as usize).min(pieces.len() - 1);
            piece_point(&pieces[idx])
        }
        single => piece_point(single),
    };
    pair.push_forward(z0)
}

/// Quasi-random domain draw with the same real-axis band mix as
/// [`draw_in_domain_banded`].
pub fn domain_point_from_units(d: &PlanarDomain, u: &[f64; 3]) -> Complex64 {
    if u[2] < 1.0 / 3.0 {
        let t = 2.0 * u[0] - 1.0;
        let cap = 0.6 * (1.0 - t * t).sqrt();
        let v = (2.0 * u[1] - 1.0) * cap;
        d.center() + d.radius() * Complex64::new(t, v)
    } else {
        d.center()
            + Complex64::from_polar(
                d.radius() * u[0].sqrt(),
                2.0 * std::f64::consts::PI * u[1],
            )
    }
}
