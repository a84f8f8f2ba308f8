use crosskit::extremal::{h_closed_form, h_grid_solve};
use crosskit::geometry::{make_pair, BaseSet, PlanarDomain};
use num_complex::Complex64;

fn sup_err(pair: &crosskit::geometry::PairAD, n: usize) -> (f64, usize, f64) {
    let f = h_grid_solve(pair, n, n, 1e-10).unwrap();
    let mut sup = 0.0f64;
    let mut worst = (0, 0);
    for iy in 0..n {
        for ix in 0..n {
            let z = f.node(ix, iy);
            if pair.domain().contains(z) {
                let exact = h_closed_form(pair, z).unwrap();
                let e = (f.value_at(ix, iy) - exact).abs();
                if e > sup { sup = e; worst = (ix, iy); }
            }
        }
    }
    let (sweeps, res) = match f.source() {
        crosskit::extremal::FieldSource::Solved { sweeps, residual, .. } => (sweeps, residual),
        _ => (0, 0.0),
    };
    eprintln!("  worst node {:?} z = {}", worst, f.node(worst.0, worst.1));
    (sup, sweeps, res)
}

fn main() {
    let interval = make_pair(BaseSet::interval(-1.0, 1.0).unwrap(), PlanarDomain::unit()).unwrap();
    let subdisc = make_pair(BaseSet::subdisc(Complex64::new(0.0, 0.0), 0.25).unwrap(), PlanarDomain::unit()).unwrap();
    for n in [65usize, 129, 257, 513] {
        let t0 = std::time::Instant::now();
        let (e, sweeps, res) = sup_err(&interval, n);
        println!("interval n={n:4} sup={e:.3e} sweeps={sweeps} res={res:.2e} t={:?}", t0.elapsed());
        let t0 = std::time::Instant::now();
        let (e, sweeps, res) = sup_err(&subdisc, n);
        println!("subdisc  n={n:4} sup={e:.3e} sweeps={sweeps} res={res:.2e} t={:?}", t0.elapsed());
    }
}
