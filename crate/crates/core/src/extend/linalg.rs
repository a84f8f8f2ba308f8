//! Dense complex Hermitian normal-equations machinery for the tensor
//! least-squares fits.
//!
//! The Gram matrix `G = AᴴA` is assembled in row blocks (lower triangle,
//! row-major), equilibrated, factored by an in-place Cholesky with a
//! row-parallel trailing update, and solved with iterative refinement against
//! the original samples. All parallel stages write disjoint rows and read
//! fixed snapshots, so results are bit-identical across execution modes.

use num_complex::Complex64;

use crate::par::{self, Parallelism};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Fills `out` with all monomials `Π_j powers[j][β_j]`, last variable
/// fastest, matching the tensor layout of `MultiPoly`.
pub(crate) fn fill_basis(powers: &[Vec<Complex64>], out: &mut [Complex64]) {
    fn rec(powers: &[Vec<Complex64>], prefix: Complex64, out: &mut [Complex64]) {
        if powers.is_empty() {
            out[0] = prefix;
            return;
        }
        let stride = out.len() / powers[0].len();
        for (m, &p) in powers[0].iter().enumerate() {
            rec(&powers[1..], prefix * p, &mut out[m * stride..(m + 1) * stride]);
        }
    }
    rec(powers, Complex64::new(1.0, 0.0), out);
}

/// Power table `w^0..w^d` per variable.
pub(crate) fn power_table(w: &[Complex64], degrees: &[usize]) -> Vec<Vec<Complex64>> {
    w.iter()
        .zip(degrees)
        .map(|(&z, &d)| {
            let mut row = Vec::with_capacity(d + 1);
            let mut acc = Complex64::new(1.0, 0.0);
            row.push(acc);
            for _ in 0..d {
                acc *= z;
                row.push(acc);
            }
            row
        })
        .collect()
}

/// Lower-triangular Gram accumulator.
pub(crate) struct NormalEq {
    pub n: usize,
    /// row-major n×n, lower triangle (k <= j) valid
    pub g: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
}

impl NormalEq {
    pub fn new(n: usize) -> Self {
        Self { n, g: vec![ZERO; n * n], rhs: vec![ZERO; n] }
    }

    /// Adds a block of basis rows (`rows × n`, row-major) and sample values.
    ///
    /// The block is transposed into planar (split re/im) column buffers and
    /// the lower triangle is updated in tiles of G rows: the inner dot
    /// products run over four contiguous f64 streams, which the compiler
    /// vectorizes, and each sample column streams once per tile.
    pub fn accumulate(&mut self, block: &[Complex64], values: &[Complex64], par: Parallelism) {
        let n = self.n;
        let rows = values.len();
        debug_assert_eq!(block.len(), rows * n);
        let mut cols_re = vec![0.0f64; n * rows];
        let mut cols_im = vec![0.0f64; n * rows];
        for i in 0..rows {
            for k in 0..n {
                let z = block[i * n + k];
                cols_re[k * rows + i] = z.re;
                cols_im[k * rows + i] = z.im;
            }
        }
        let (cols_re, cols_im) = (&cols_re, &cols_im);
        const TILE: usize = 16;
        par::for_each_chunk_mut(par, &mut self.g, TILE * n, |tile_idx, g_tile| {
            let j0 = tile_idx * TILE;
            let tile_rows = g_tile.len() / n;
            for k in 0..=(j0 + tile_rows - 1).min(n - 1) {
                let ck_re = &cols_re[k * rows..(k + 1) * rows];
                let ck_im = &cols_im[k * rows..(k + 1) * rows];
                for tj in 0..tile_rows {
                    let j = j0 + tj;
                    if k > j {
                        continue;
                    }
                    let cj_re = &cols_re[j * rows..(j + 1) * rows];
                    let cj_im = &cols_im[j * rows..(j + 1) * rows];
                    // conj(cj)·ck over eight independent lanes so the sums
                    // vectorize despite strict float semantics
                    const LANES: usize = 8;
                    let mut re_l = [0.0f64; LANES];
                    let mut im_l = [0.0f64; LANES];
                    let mut it = cj_re
                        .chunks_exact(LANES)
                        .zip(cj_im.chunks_exact(LANES))
                        .zip(ck_re.chunks_exact(LANES).zip(ck_im.chunks_exact(LANES)));
                    for ((ar, ai), (br, bi)) in &mut it {
                        for l in 0..LANES {
                            re_l[l] += ar[l] * br[l] + ai[l] * bi[l];
                            im_l[l] += ar[l] * bi[l] - ai[l] * br[l];
                        }
                    }
                    let mut re = re_l.iter().sum::<f64>();
                    let mut im = im_l.iter().sum::<f64>();
                    let whole = rows - rows % LANES;
                    for i in whole..rows {
                        let ar = cj_re[i];
                        let ai = cj_im[i];
                        let br = ck_re[i];
                        let bi = ck_im[i];
                        re += ar * br + ai * bi;
                        im += ar * bi - ai * br;
                    }
                    g_tile[tj * n + k] += Complex64::new(re, im);
                }
            }
        });
        for i in 0..rows {
            let v = values[i];
            for j in 0..n {
                self.rhs[j] += block[i * n + j].conj() * v;
            }
        }
    }

    /// Symmetric diagonal equilibration `G -> D G D`; returns the scale
    /// vector `D` (also applied to nothing else — callers rescale rhs and
    /// solutions themselves).
    pub fn equilibrate(&mut self) -> Vec<f64> {
        let n = self.n;
        let scale: Vec<f64> = (0..n)
            .map(|j| {
                let d = self.g[j * n + j].re;
                if d > 0.0 {
                    1.0 / d.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        for j in 0..n {
            for k in 0..=j {
                self.g[j * n + k] *= scale[j] * scale[k];
            }
        }
        scale
    }

    /// Hermitian matvec using the lower triangle.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.n;
        y.fill(ZERO);
        for j in 0..n {
            let mut acc = ZERO;
            for k in 0..j {
                let l = self.g[j * n + k];
                acc += l * x[k];
                y[k] += l.conj() * x[j];
            }
            y[j] += acc + self.g[j * n + j] * x[j];
        }
    }
}

/// In-place Cholesky `G = L Lᴴ` on the lower triangle. Fails when the matrix
/// is numerically indefinite, which callers surface as ill-conditioning.
pub(crate) fn cholesky(g: &mut [Complex64], n: usize, par: Parallelism) -> Result<()> {
    let mut col = vec![ZERO; n];
    for j in 0..n {
        let d = g[j * n + j].re;
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::IllConditioned { estimate: f64::INFINITY });
        }
        let ljj = d.sqrt();
        g[j * n + j] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            g[i * n + j] /= ljj;
            col[i] = g[i * n + j];
        }
        if j + 1 >= n {
            break;
        }
        let tail = &mut g[(j + 1) * n..];
        let col_ref = &col;
        par::for_each_chunk_mut(par, tail, n, |off, row| {
            let i = j + 1 + off;
            let lij = col_ref[i];
            if lij == ZERO {
                return;
            }
            for k in j + 1..=i {
                row[k] -= lij * col_ref[k].conj();
            }
        });
    }
    Ok(())
}

/// Solves `L Lᴴ x = b` in place.
pub(crate) fn chol_solve(l: &[Complex64], n: usize, b: &mut [Complex64]) {
    for j in 0..n {
        let mut acc = b[j];
        for k in 0..j {
            acc -= l[j * n + k] * b[k];
        }
        b[j] = acc / l[j * n + j];
    }
    for j in (0..n).rev() {
        let mut acc = b[j];
        for k in j + 1..n {
            acc -= l[k * n + j].conj() * b[k];
        }
        b[j] = acc / l[j * n + j];
    }
}

/// Condition estimate of the equilibrated normal equations via power
/// iteration for the largest eigenvalue and inverse iteration (through the
/// Cholesky factor) for the smallest; returns `sqrt(λmax/λmin)`, an estimate
/// of the condition number of the least-squares matrix itself.
pub(crate) fn condition_estimate(ne: &NormalEq, l: &[Complex64]) -> f64 {
    let n = ne.n;
    let iters = 30;
    let mut x: Vec<Complex64> =
        (0..n).map(|i| Complex64::new(1.0 + (i % 7) as f64, 0.5 * (i % 3) as f64)).collect();
    let mut y = vec![ZERO; n];
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut lam_max = 0.0;
    for _ in 0..iters {
        ne.matvec(&x, &mut y);
        lam_max = norm(&y);
        if lam_max == 0.0 {
            return f64::INFINITY;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / lam_max;
        }
    }
    let mut lam_min_inv = 0.0;
    let mut z: Vec<Complex64> =
        (0..n).map(|i| Complex64::new(1.0, -((i % 5) as f64) * 0.3)).collect();
    for _ in 0..iters {
        let nz = norm(&z);
        if nz == 0.0 {
            return f64::INFINITY;
        }
        for zi in z.iter_mut() {
            *zi /= nz;
        }
        chol_solve(l, n, &mut z);
        lam_min_inv = norm(&z);
    }
    if lam_min_inv == 0.0 {
        return f64::INFINITY;
    }
    let lam_min = 1.0 / lam_min_inv;
    (lam_max / lam_min).max(0.0).sqrt()
}


#[cfg(test)]
mod perf_probe {
    use super::*;

    #[test]
    #[ignore = "manual timing probe"]
    fn time_assembly_and_cholesky() {
        let n = 2197usize;
        let rows_total = 6591usize;
        let block_rows = 128usize;
        let mut ne = NormalEq::new(n);
        let block: Vec<Complex64> = (0..block_rows * n)
            .map(|i| {
                Complex64::new(((i * 37) % 100) as f64 * 0.01 - 0.5, ((i * 61) % 83) as f64 * 0.01)
            })
            .collect();
        let values = vec![Complex64::new(0.1, 0.2); block_rows];
        let t0 = std::time::Instant::now();
        let mut done = 0;
        while done < rows_total {
            let r = block_rows.min(rows_total - done);
            ne.accumulate(&block[..r * n], &values[..r], crate::Parallelism::default());
            done += r;
        }
        eprintln!("assembly ({rows_total} x {n}): {:?}", t0.elapsed());
        for j in 0..n {
            ne.g[j * n + j] += Complex64::new(1000.0, 0.0);
        }
        let t0 = std::time::Instant::now();
        let mut l = ne.g.clone();
        cholesky(&mut l, n, crate::Parallelism::default()).unwrap();
        eprintln!("cholesky {n}: {:?}", t0.elapsed());
        let eq = NormalEq { n, g: ne.g.clone(), rhs: Vec::new() };
        let t0 = std::time::Instant::now();
        let c = condition_estimate(&eq, &l);
        eprintln!("cond {n}: {:?} (value {c:.2e})", t0.elapsed());
    }
}
