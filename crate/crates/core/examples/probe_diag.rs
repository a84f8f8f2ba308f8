use crosskit::cross::{CrossSpec, Point};
use crosskit::extend::{extend_poly_opts, registry, FitOptions};
use crosskit::extremal::Strategy;
use crosskit::geometry::{make_pair, BaseSet, PlanarDomain};
use crosskit::hull::HullQuery;
use crosskit::poly::MultiPoly;
use num_complex::Complex64;

fn taylor(d: usize) -> MultiPoly {
    let mut p = MultiPoly::zeros(vec![d; 3]);
    let fact: Vec<f64> = (0..=40).scan(1.0, |acc, k| { if k > 0 { *acc *= k as f64; } Some(*acc) }).collect();
    for b1 in 0..=d { for b2 in 0..=d { for b3 in 0..=d {
        let m = b1 + b2 + b3;
        let mult = fact[m] / (fact[b1] * fact[b2] * fact[b3]);
        p.set_coeff(&[b1, b2, b3], Complex64::new(mult / 3f64.powi(m as i32 + 1), 0.0));
    }}}
    p
}

fn main() {
    let pairs = (0..3)
        .map(|_| make_pair(BaseSet::interval(-1.0, 1.0).unwrap(), PlanarDomain::unit()).unwrap())
        .collect();
    let spec = CrossSpec::plain(pairs, 2).unwrap();
    let reg = registry::function("cauchy", &spec).unwrap();
    let hq = HullQuery::uniform(spec.clone(), Strategy::ClosedForm).unwrap();
    let samples = hq.sample_hull(1000, 7).unwrap();
    let shrunk: Vec<Point> = samples
        .iter()
        .map(|z| Point::new(z.coords().iter().map(|&c| c * 0.8).collect()).unwrap())
        .collect();
    let t12 = taylor(12);
    let opts = FitOptions { sample_contraction: 0.85, ..Default::default() };
    let ext = extend_poly_opts(&reg.f, &[12, 12, 12], 3 * 2197, 42, opts).unwrap();
    let fitted = ext.normalized_coeffs();
    // eval-impact of coefficient deltas by total degree: sum |dc| * 0.8^deg
    let mut impact = vec![0.0f64; 37];
    let mut count = vec![0usize; 37];
    for (beta, c) in fitted.iter_terms() {
        let deg: usize = beta.iter().sum();
        let dc = (c - t12.coeff(&beta)).norm();
        impact[deg] += dc * 0.8f64.powi(deg as i32);
        count[deg] += 1;
    }
    for deg in 0..=36 {
        if impact[deg] > 1e-7 {
            println!("total degree {deg:2}: eval-impact bound {:.2e} over {} coeffs", impact[deg], count[deg]);
        }
    }
    // worst eval point error decomposition
    let mut worst = (0.0, 0usize);
    for (i, z) in shrunk.iter().enumerate() {
        let s: Complex64 = z.coords().iter().sum();
        let truth = 1.0 / (3.0 - s);
        let rel = (ext.eval(z.coords()) - truth).norm() / truth.norm();
        if rel > worst.0 { worst = (rel, i); }
    }
    let z = &shrunk[worst.1];
    let truth = 1.0 / (3.0 - z.coords().iter().sum::<Complex64>());
    println!("worst eval rel={:.3e} at {z:?}", worst.0);
    println!("  taylor rel there: {:.3e}", (t12.eval(z.coords()) - truth).norm() / truth.norm());
}
