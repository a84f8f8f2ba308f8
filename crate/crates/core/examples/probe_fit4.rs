use crosskit::cross::{CrossSpec, Point};
use crosskit::extend::{compare_on_hull, extend_poly_opts, registry, FitOptions};
use crosskit::extremal::Strategy;
use crosskit::geometry::{make_pair, BaseSet, PlanarDomain};
use crosskit::hull::HullQuery;
use num_complex::Complex64;

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
    let oracle = |z: &[Complex64]| { let s: Complex64 = z.iter().sum(); Some(1.0 / (3.0 - s)) };
    let ncoeff = 13usize.pow(3);
    for mult in [5usize] {
        let opts = FitOptions { sample_contraction: 0.85, ..Default::default() };
        for seed in [42u64, 1, 7, 2024, 11, 99] {
            let t0 = std::time::Instant::now();
            let ext = extend_poly_opts(&reg.f, &[12, 12, 12], mult * ncoeff, seed, opts).unwrap();
            let stats = compare_on_hull(|z| ext.eval(z), oracle, &shrunk);
            println!(
                "mult={mult} seed={seed:5}: t={:6.1?} trimmed={:4} max_rel={:.3e} mean_rel={:.3e}",
                t0.elapsed(), ext.residual.trimmed, stats.max_rel, stats.mean_rel
            );
        }
    }
}
