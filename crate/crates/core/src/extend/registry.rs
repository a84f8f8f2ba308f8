//! Built-in test functions addressed by name.
//!
//! Each entry packages an evaluator, its declared exclusion set over the
//! given cross, and the denominator polynomial when the function is rational.
//! The same closed-form evaluator doubles as the comparison oracle on hull
//! samples.

use std::sync::Arc;

use num_complex::Complex64;

use crate::cross::CrossSpec;
use crate::poly::MultiPoly;
use crate::singular::MSpec;
use crate::{Error, Result};

use super::{ComplexEvaluator, SampledFunction};

/// A registry entry: the function, and the denominator when rational.
pub struct RegistryFunction {
    pub name: &'static str,
    pub f: SampledFunction,
    pub denominator: Option<MultiPoly>,
    /// Reference polynomial for coefficient-recovery checks, in ambient
    /// variables, when the function (or its `p·f` product) is a polynomial.
    pub reference_poly: Option<MultiPoly>,
}

pub const NAMES: &[&str] = &["zero", "poly", "cauchy", "rational", "rational-far", "rational-z3", "conj2"];

/// Deterministic small coefficient pattern for the `poly` entry, exactly
/// representable in binary so recovery checks compare against clean values.
fn demo_poly(n: usize) -> MultiPoly {
    let degrees = vec![2usize; n];
    let mut p = MultiPoly::zeros(degrees);
    let terms: Vec<(Vec<usize>, Complex64)> = p
        .iter_terms()
        .enumerate()
        .map(|(i, (beta, _))| {
            let total: usize = beta.iter().sum();
            let re = ((i % 7) as f64 - 3.0) / 8.0;
            let im = ((total % 3) as f64 - 1.0) / 16.0;
            (beta, Complex64::new(re, im))
        })
        .collect();
    for (beta, c) in terms {
        p.set_coeff(&beta, c);
    }
    p
}

fn affine_two_var(n: usize, c0: f64) -> MultiPoly {
    let mut linear = vec![Complex64::new(0.0, 0.0); n];
    linear[0] = Complex64::new(1.0, 0.0);
    linear[1] = Complex64::new(1.0, 0.0);
    MultiPoly::affine(&linear, Complex64::new(c0, 0.0))
}

/// Looks up a registry function over the given cross.
pub fn function(name: &str, spec: &CrossSpec) -> Result<RegistryFunction> {
    let n = spec.n();
    match name {
        "zero" => {
            let eval: ComplexEvaluator = Arc::new(|_| Some(Complex64::new(0.0, 0.0)));
            Ok(RegistryFunction {
                name: "zero",
                f: SampledFunction::new(eval, spec.clone(), MSpec::empty(spec.clone()))?,
                denominator: None,
                reference_poly: Some(MultiPoly::zeros(vec![0; n])),
            })
        }
        "poly" => {
            let p = demo_poly(n);
            let p_eval = p.clone();
            let eval: ComplexEvaluator = Arc::new(move |z| Some(p_eval.eval(z)));
            Ok(RegistryFunction {
                name: "poly",
                f: SampledFunction::new(eval, spec.clone(), MSpec::empty(spec.clone()))?,
                denominator: None,
                reference_poly: Some(p),
            })
        }
        "cauchy" => {
            // 1/(N - z_1 - … - z_N): holomorphic on the open product, the
            // denominator vanishes only at the torus point (1, …, 1)
            let nn = n as f64;
            let eval: ComplexEvaluator = Arc::new(move |z| {
                let s: Complex64 = z.iter().sum();
                Some(1.0 / (nn - s))
            });
            Ok(RegistryFunction {
                name: "cauchy",
                f: SampledFunction::new(eval, spec.clone(), MSpec::empty(spec.clone()))?,
                denominator: None,
                reference_poly: None,
            })
        }
        "rational" => {
            if n < 2 {
                return Err(Error::InvalidInput("rational needs at least two factors".into()));
            }
            let p = affine_two_var(n, -0.5);
            let p_eval = p.clone();
            let eval: ComplexEvaluator = Arc::new(move |z| {
                let d = p_eval.eval(z);
                if d.norm() == 0.0 {
                    None
                } else {
                    Some(1.0 / d)
                }
            });
            let exclusion = MSpec::poly_zero(spec.clone(), p.clone())?;
            Ok(RegistryFunction {
                name: "rational",
                f: SampledFunction::new(eval, spec.clone(), exclusion)?,
                denominator: Some(p),
                // p·f ≡ 1
                reference_poly: Some(MultiPoly::constant(n, Complex64::new(1.0, 0.0))),
            })
        }
        "rational-far" => {
            if n < 2 {
                return Err(Error::InvalidInput("rational-far needs at least two factors".into()));
            }
            // denominator zero set misses the closed product: M = ∅, M̂ = ∅
            let p = affine_two_var(n, -3.0);
            let p_eval = p.clone();
            let eval: ComplexEvaluator = Arc::new(move |z| Some(1.0 / p_eval.eval(z)));
            Ok(RegistryFunction {
                name: "rational-far",
                f: SampledFunction::new(eval, spec.clone(), MSpec::empty(spec.clone()))?,
                denominator: Some(p),
                reference_poly: Some(MultiPoly::constant(n, Complex64::new(1.0, 0.0))),
            })
        }
        "rational-z3" => {
            if n < 3 {
                return Err(Error::InvalidInput("rational-z3 needs at least three factors".into()));
            }
            let p = affine_two_var(n, -0.5);
            let p_eval = p.clone();
            let eval: ComplexEvaluator = Arc::new(move |z| {
                let d = p_eval.eval(z);
                if d.norm() == 0.0 {
                    None
                } else {
                    Some(z[2] / d)
                }
            });
            let exclusion = MSpec::poly_zero(spec.clone(), p.clone())?;
            // p·f = z_3
            let mut reference = MultiPoly::zeros({
                let mut d = vec![0usize; n];
                d[2] = 1;
                d
            });
            let mut beta = vec![0usize; n];
            beta[2] = 1;
            reference.set_coeff(&beta, Complex64::new(1.0, 0.0));
            Ok(RegistryFunction {
                name: "rational-z3",
                f: SampledFunction::new(eval, spec.clone(), exclusion)?,
                denominator: Some(p),
                reference_poly: Some(reference),
            })
        }
        "conj2" => {
            if n < 2 {
                return Err(Error::InvalidInput("conj2 needs at least two factors".into()));
            }
            let eval: ComplexEvaluator = Arc::new(|z: &[Complex64]| Some(z[1].conj()));
            Ok(RegistryFunction {
                name: "conj2",
                f: SampledFunction::new(eval, spec.clone(), MSpec::empty(spec.clone()))?,
                denominator: None,
                reference_poly: None,
            })
        }
        other => Err(Error::InvalidInput(format!(
            "unknown registry function {other:?}; available: {}",
            NAMES.join(", ")
        ))),
    }
}
