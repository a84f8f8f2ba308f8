//! Dense multivariate polynomials with complex coefficients.
//!
//! Coefficients are stored as a dense tensor over per-variable degree bounds,
//! last variable fastest. Shared by the singularity-set descriptors (zero
//! sets) and the extension engine (fitted coefficient tensors).

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    degrees: Vec<usize>,
    coeffs: Vec<Complex64>,
}

impl MultiPoly {
    /// Builds a polynomial from per-variable degree bounds and a coefficient
    /// tensor (multi-degree `β` at flat index `Σ β_j · stride_j`, last
    /// variable fastest).
    pub fn new(degrees: Vec<usize>, coeffs: Vec<Complex64>) -> Result<Self> {
        let nvars = degrees.len();
        let len: usize = degrees.iter().map(|d| d + 1).product();
        if coeffs.len() != len {
            return Err(Error::LengthMismatch { expected: len, got: coeffs.len() });
        }
        for c in &coeffs {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidInput("non-finite polynomial coefficient".into()));
            }
        }
        Ok(Self { nvars, degrees, coeffs })
    }

    pub fn zeros(degrees: Vec<usize>) -> Self {
        let len: usize = degrees.iter().map(|d| d + 1).product();
        Self { nvars: degrees.len(), degrees, coeffs: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn constant(nvars: usize, value: Complex64) -> Self {
        let mut p = Self::zeros(vec![0; nvars]);
        p.coeffs[0] = value;
        p
    }

    /// The affine-linear polynomial `c0 + Σ linear_j z_j`.
    pub fn affine(linear: &[Complex64], c0: Complex64) -> Self {
        let nvars = linear.len();
        let mut p = Self::zeros(vec![1; nvars]);
        p.coeffs[0] = c0;
        for (j, &a) in linear.iter().enumerate() {
            let mut beta = vec![0usize; nvars];
            beta[j] = 1;
            let idx = p.flat_index(&beta);
            p.coeffs[idx] = a;
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn flat_index(&self, beta: &[usize]) -> usize {
        debug_assert_eq!(beta.len(), self.nvars);
        let mut idx = 0;
        for (j, &b) in beta.iter().enumerate() {
            debug_assert!(b <= self.degrees[j]);
            idx = idx * (self.degrees[j] + 1) + b;
        }
        idx
    }

    pub fn coeff(&self, beta: &[usize]) -> Complex64 {
        self.coeffs[self.flat_index(beta)]
    }

    pub fn set_coeff(&mut self, beta: &[usize], value: Complex64) {
        let idx = self.flat_index(beta);
        self.coeffs[idx] = value;
    }

    /// Iterates `(multi-degree, coefficient)` in flat order.
    pub fn iter_terms(&self) -> impl Iterator<Item = (Vec<usize>, Complex64)> + '_ {
        let mut beta = vec![0usize; self.nvars];
        let mut first = true;
        let degrees = self.degrees.clone();
        self.coeffs.iter().map(move |&c| {
            if first {
                first = false;
            } else {
                for j in (0..beta.len()).rev() {
                    if beta[j] < degrees[j] {
                        beta[j] += 1;
                        break;
                    }
                    beta[j] = 0;
                }
            }
            (beta.clone(), c)
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Largest `|β|` with a nonzero coefficient.
    pub fn total_degree(&self) -> usize {
        self.iter_terms()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(|(beta, _)| beta.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// Nested Horner evaluation over the variables.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.nvars, "wrong number of variables");
        fn rec(coeffs: &[Complex64], degrees: &[usize], z: &[Complex64]) -> Complex64 {
            if degrees.is_empty() {
                return coeffs[0];
            }
            let stride: usize = degrees[1..].iter().map(|d| d + 1).product();
            let mut acc = Complex64::new(0.0, 0.0);
            for block in (0..=degrees[0]).rev() {
                let sub = &coeffs[block * stride..(block + 1) * stride];
                acc = acc * z[0] + rec(sub, &degrees[1..], &z[1..]);
            }
            acc
        }
        rec(&self.coeffs, &self.degrees, z)
    }

    /// Substitutes values for the variables at `positions` (ascending),
    /// returning the polynomial in the remaining variables.
    pub fn substitute(&self, positions: &[usize], values: &[Complex64]) -> Result<MultiPoly> {
        if positions.len() != values.len() {
            return Err(Error::LengthMismatch { expected: positions.len(), got: values.len() });
        }
        for w in positions.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidInput("substitution positions must be ascending".into()));
            }
        }
        if positions.iter().any(|&p| p >= self.nvars) {
            return Err(Error::DimensionMismatch(format!(
                "substitution position out of range for {} variables",
                self.nvars
            )));
        }
        let keep: Vec<usize> = (0..self.nvars).filter(|j| !positions.contains(j)).collect();
        let out_degrees: Vec<usize> = keep.iter().map(|&j| self.degrees[j]).collect();
        let mut out = MultiPoly::zeros(out_degrees);
        let mut out_beta = vec![0usize; keep.len()];
        for (beta, c) in self.iter_terms() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let mut factor = c;
            for (i, &p) in positions.iter().enumerate() {
                factor *= values[i].powu(beta[p] as u32);
            }
            for (o, &j) in keep.iter().enumerate() {
                out_beta[o] = beta[j];
            }
            let idx = out.flat_index(&out_beta);
            out.coeffs[idx] += factor;
        }
        Ok(out)
    }

    /// `|c_0| - Σ_{β≠0} |c_β| Π r_j^{β_j}`: positive means the polynomial has
    /// no zero on the closed polydisc of the given radii.
    pub fn zero_free_margin(&self, radii: &[f64]) -> f64 {
        assert_eq!(radii.len(), self.nvars);
        let mut margin = 0.0;
        for (beta, c) in self.iter_terms() {
            let amp: f64 = beta
                .iter()
                .zip(radii)
                .map(|(&b, &r)| r.powi(b as i32))
                .product();
            if beta.iter().all(|&b| b == 0) {
                margin += c.norm();
            } else {
                margin -= c.norm() * amp;
            }
        }
        margin
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Partial derivative along one axis (degree bound drops by one, floor
    /// zero).
    pub fn derivative(&self, axis: usize) -> MultiPoly {
        assert!(axis < self.nvars);
        let d = self.degrees[axis];
        let mut out_degrees = self.degrees.clone();
        out_degrees[axis] = d.saturating_sub(1);
        let mut out = MultiPoly::zeros(out_degrees);
        if d == 0 {
            return out;
        }
        for (beta, c) in self.iter_terms() {
            if beta[axis] == 0 || (c.re == 0.0 && c.im == 0.0) {
                continue;
            }
            let mut b = beta.clone();
            b[axis] -= 1;
            let idx = out.flat_index(&b);
            out.coeffs[idx] += c * beta[axis] as f64;
        }
        out
    }

    /// Substitutes `z_j -> scale_j * z_j + shift_j` axis by axis (Taylor
    /// shift via repeated synthetic division), keeping the degree bounds.
    pub fn compose_affine(&self, scale: &[f64], shift: &[Complex64]) -> MultiPoly {
        assert_eq!(scale.len(), self.nvars);
        assert_eq!(shift.len(), self.nvars);
        let mut coeffs = self.coeffs.clone();
        let strides: Vec<usize> = (0..self.nvars)
            .map(|j| self.degrees[j + 1..].iter().map(|d| d + 1).product())
            .collect();
        for axis in 0..self.nvars {
            let d = self.degrees[axis];
            if d == 0 {
                continue;
            }
            let stride = strides[axis];
            let block = stride * (d + 1);
            let nblocks = coeffs.len() / block;
            let s = scale[axis];
            let t = shift[axis];
            for b in 0..nblocks {
                for lane in 0..stride {
                    let base = b * block + lane;
                    // Taylor shift by t first (p(x) -> p(x + t)), then scale
                    // the m-th coefficient by s^m (p(x) -> p(s x))
                    for i in 0..d {
                        for m in (i..d).rev() {
                            let hi = coeffs[base + (m + 1) * stride];
                            coeffs[base + m * stride] += t * hi;
                        }
                    }
                    let mut pw = 1.0;
                    for m in 1..=d {
                        pw *= s;
                        coeffs[base + m * stride] *= pw;
                    }
                }
            }
        }
        MultiPoly { nvars: self.nvars, degrees: self.degrees.clone(), coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_matches_direct_expansion() {
        // p(z1, z2) = 1 + 2 z2 + 3 z1 z2^2
        let mut p = MultiPoly::zeros(vec![1, 2]);
        p.set_coeff(&[0, 0], c(1.0, 0.0));
        p.set_coeff(&[0, 1], c(2.0, 0.0));
        p.set_coeff(&[1, 2], c(3.0, 0.0));
        let z = [c(0.5, 0.1), c(-0.2, 0.3)];
        let direct = c(1.0, 0.0) + 2.0 * z[1] + 3.0 * z[0] * z[1] * z[1];
        assert!((p.eval(&z) - direct).norm() < 1e-15);
        assert_eq!(p.total_degree(), 3);
    }

    #[test]
    fn substitution_reduces_variables() {
        // p = z1 + z2 - 0.5; fix z1 = 0.2 -> z2 - 0.3
        let p = MultiPoly::affine(&[c(1.0, 0.0), c(1.0, 0.0)], c(-0.5, 0.0));
        let q = p.substitute(&[0], &[c(0.2, 0.0)]).unwrap();
        assert_eq!(q.nvars(), 1);
        assert!((q.eval(&[c(0.3, 0.0)])).norm() < 1e-15);
        assert!((q.eval(&[c(0.8, 0.0)]) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn substitute_all_gives_constant() {
        let p = MultiPoly::affine(&[c(1.0, 0.0), c(2.0, 0.0)], c(0.5, 0.0));
        let q = p.substitute(&[0, 1], &[c(0.1, 0.0), c(0.2, 0.0)]).unwrap();
        assert_eq!(q.nvars(), 0);
        assert!((q.eval(&[]) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_free_margin_detects_far_denominators() {
        // z1 + z2 - 3 on the closed unit bidisc: margin 1
        let p = MultiPoly::affine(&[c(1.0, 0.0), c(1.0, 0.0)], c(-3.0, 0.0));
        assert!(p.zero_free_margin(&[1.0, 1.0]) > 0.99);
        let q = MultiPoly::affine(&[c(1.0, 0.0), c(1.0, 0.0)], c(-0.5, 0.0));
        assert!(q.zero_free_margin(&[1.0, 1.0]) < 0.0);
    }

    #[test]
    fn compose_affine_matches_pointwise() {
        let mut p = MultiPoly::zeros(vec![2, 2]);
        p.set_coeff(&[0, 0], c(0.3, -0.2));
        p.set_coeff(&[2, 1], c(1.5, 0.4));
        p.set_coeff(&[1, 2], c(-0.7, 0.1));
        let scale = [0.5, 2.0];
        let shift = [c(0.1, 0.2), c(-0.3, 0.0)];
        let q = p.compose_affine(&scale, &shift);
        for &(a, b) in &[(0.3, -0.1), (-0.4, 0.25), (0.0, 0.0)] {
            let z = [c(a, b), c(b, a)];
            let moved = [scale[0] * z[0] + shift[0], scale[1] * z[1] + shift[1]];
            assert!((q.eval(&z) - p.eval(&moved)).norm() < 1e-12);
        }
    }

    #[test]
    fn iter_terms_walks_the_tensor_in_order() {
        let mut p = MultiPoly::zeros(vec![1, 1]);
        p.set_coeff(&[0, 0], c(1.0, 0.0));
        p.set_coeff(&[0, 1], c(2.0, 0.0));
        p.set_coeff(&[1, 0], c(3.0, 0.0));
        p.set_coeff(&[1, 1], c(4.0, 0.0));
        let terms: Vec<(Vec<usize>, Complex64)> = p.iter_terms().collect();
        assert_eq!(terms[0].0, vec![0, 0]);
        assert_eq!(terms[1].0, vec![0, 1]);
        assert_eq!(terms[2].0, vec![1, 0]);
        assert_eq!(terms[3].0, vec![1, 1]);
        assert_eq!(terms[3].1, c(4.0, 0.0));
    }
}
