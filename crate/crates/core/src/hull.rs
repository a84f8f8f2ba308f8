//! Hull membership and envelope formulas.
//!
//! The hull of an `(N,k)`-cross is the open set where the factor extremal
//! values satisfy `Σ_j h_{A_j,D_j}(z_j) < k`. On top of the membership
//! predicate this module provides the increment formula
//! `max{0, Σ_j h_j(z_j) - k + 1}` (the relative extremal function of the
//! order-`k-1` hull inside the order-`k` hull), the composite 2-fold hulls
//! built from the first `N-1` factors, hull sampling, and slice export.

use std::io::Write;

use num_complex::Complex64;

use crate::cross::{CrossSpec, Point};
use crate::extremal::{h_product_max, EvalPath, HEvaluator, SolveOptions, Strategy};
use crate::par::{self, Parallelism};
use crate::sampling::{self, BaseLaw};
use crate::{Error, Result};

/// Three-valued hull membership: strict inequalities certified by closed
/// forms are exact, while field-interpolated values within `margin` of the
/// threshold are reported as indeterminate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HullMembership {
    Member,
    NonMember,
    /// `|value - threshold| <= margin` with at least one field-path factor.
    Indeterminate,
}

impl HullMembership {
    pub fn is_member(self) -> bool {
        self == HullMembership::Member
    }
}

/// Composite 2-fold cross flavors over the factor split `(z', z_s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompositeVariant {
    /// `X(c(X'), A_s; hull(X'), D_s)` for the split factor `s` (0-based):
    /// first-factor extremal value is the product/max rule over `j != s`.
    Zs(usize),
    /// `X(X'_{k-1}, A_N; hull(X'_k), D_N)`: first-factor extremal value is
    /// the increment formula over the first `N-1` factors at order `k`.
    Z,
}

/// A hull evaluator: per-factor strategies plus a strictness margin.
#[derive(Debug)]
pub struct HullQuery {
    spec: CrossSpec,
    evaluators: Vec<HEvaluator>,
    margin: f64,
}

impl HullQuery {
    pub fn new(spec: CrossSpec, strategies: &[Strategy], margin: f64) -> Result<Self> {
        if strategies.len() != spec.n() {
            return Err(Error::LengthMismatch { expected: spec.n(), got: strategies.len() });
        }
        if !(0.0..1.0).contains(&margin) {
            return Err(Error::InvalidInput(format!("margin {margin} must lie in [0, 1)")));
        }
        let evaluators = spec
            .pairs()
            .iter()
            .zip(strategies)
            .map(|(p, &s)| HEvaluator::new(p.clone(), s))
            .collect();
        Ok(Self { spec, evaluators, margin })
    }

    /// All factors on the same strategy with the default margin `1e-6`.
    pub fn uniform(spec: CrossSpec, strategy: Strategy) -> Result<Self> {
        let strategies = vec![strategy; spec.n()];
        Self::new(spec, &strategies, 1e-6)
    }

    pub fn with_grid(mut self, grid: usize, solve: SolveOptions) -> Self {
        self.evaluators = self
            .evaluators
            .into_iter()
            .map(|e| {
                let strategy = e.strategy();
                HEvaluator::new(e.pair().clone(), strategy).with_grid(grid, solve)
            })
            .collect();
        self
    }

    pub fn spec(&self) -> &CrossSpec {
        &self.spec
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn evaluator(&self, j: usize) -> &HEvaluator {
        &self.evaluators[j]
    }

    fn factor_values(&self, z: &Point) -> Result<(Vec<f64>, bool)> {
        self.spec.ambient_check(z)?;
        let mut values = Vec::with_capacity(self.spec.n());
        let mut any_field = false;
        for (j, ev) in self.evaluators.iter().enumerate() {
            let (v, path) = ev.value_with_path(z.coord(j))?;
            any_field |= path == EvalPath::Field;
            values.push(v);
        }
        Ok((values, any_field))
    }

    /// The sum `Σ_j h_j(z_j)`; membership in the hull is `value < k`.
    pub fn hull_value(&self, z: &Point) -> Result<f64> {
        Ok(self.factor_values(z)?.0.iter().sum())
    }

    /// Strict membership `Σ h < k`, with a margin band when field values are
    /// involved.
    pub fn in_hull(&self, z: &Point) -> Result<HullMembership> {
        let (values, any_field) = self.factor_values(z)?;
        let value: f64 = values.iter().sum();
        let threshold = self.spec.k() as f64;
        if any_field && (value - threshold).abs() <= self.margin {
            return Ok(HullMembership::Indeterminate);
        }
        Ok(if value < threshold { HullMembership::Member } else { HullMembership::NonMember })
    }

    /// The increment formula `max{0, Σ_j h_j(z_j) - k + 1}` at the given
    /// order: the extremal value of the order-`k-1` hull relative to the
    /// order-`k` hull. The queried point must lie in the order-`k` hull.
    pub fn lemma_inc_value(&self, z: &Point, order: usize) -> Result<f64> {
        let sum = self.hull_value(z)?;
        if !(sum < order as f64) {
            return Err(Error::NotInHull);
        }
        Ok(lemma_inc_from_sum(sum, order))
    }

    /// Composite 2-fold hull value; membership is `value < 1`.
    ///
    /// `Zs(s)`: `max_{j≠s} h_j(z_j) + h_s(z_s)` with the precondition that
    /// `z'` lies in the order-`k` hull of the other factors. `Z`: the
    /// increment formula over the first `N-1` factors plus `h_N(z_N)`.
    pub fn composite_hull2_value(&self, variant: CompositeVariant, z: &Point) -> Result<f64> {
        let (values, _) = self.factor_values(z)?;
        let n = self.spec.n();
        let k = self.spec.k() as f64;
        match variant {
            CompositeVariant::Zs(s) => {
                if s >= n {
                    return Err(Error::InvalidInput(format!(
                        "split factor {s} out of range for N = {n}"
                    )));
                }
                let others: Vec<f64> = (0..n).filter(|&j| j != s).map(|j| values[j]).collect();
                let head_sum: f64 = others.iter().sum();
                if !(head_sum < k) {
                    return Err(Error::NotInHull);
                }
                Ok(h_product_max(&others)? + values[s])
            }
            CompositeVariant::Z => {
                if self.spec.k() < 2 {
                    return Err(Error::BadOrder(
                        "variant Z needs k >= 2 so the inner cross has order k-1 >= 1".into(),
                    ));
                }
                let head_sum: f64 = values[..n - 1].iter().sum();
                if !(head_sum < k) {
                    return Err(Error::NotInHull);
                }
                Ok(lemma_inc_from_sum(head_sum, self.spec.k()) + values[n - 1])
            }
        }
    }

    /// Batch hull values in input order; deterministic under both execution
    /// modes.
    pub fn hull_values_batch(&self, points: &[Point], par: Parallelism) -> Vec<Result<f64>> {
        par::map_indexed(par, points.len(), |i| self.hull_value(&points[i]))
    }

    /// Rejection-samples hull points: each coordinate is drawn from `A_j`
    /// with probability 1/2 (so measure-zero bases are hit) and from `D_j`
    /// otherwise, keeping points with `Σ h < k`. Deterministic per seed.
    pub fn sample_hull(&self, count: usize, seed: u64) -> Result<Vec<Point>> {
        if count == 0 {
            return Err(Error::InvalidInput("sample count must be at least 1".into()));
        }
        let mut rng = sampling::rng_from_seed(seed);
        let mut out = Vec::with_capacity(count);
        let cap = count.saturating_mul(10_000).max(100_000);
        let mut attempts = 0usize;
        while out.len() < count {
            attempts += 1;
            if attempts > cap {
                return Err(Error::SamplingExhausted { attempts });
            }
            let coords: Vec<Complex64> = self
                .spec
                .pairs()
                .iter()
                .map(|p| sampling::draw_mixed_coord(&mut rng, p, BaseLaw::Uniform))
                .collect();
            let z = Point::new(coords)?;
            if self.hull_value(&z)? < self.spec.k() as f64 {
                out.push(z);
            }
        }
        Ok(out)
    }

    /// Grid of hull values over factor `j` with the other coordinates
    /// frozen; nodes outside `D_j` carry NaN.
    pub fn slice_grid(
        &self,
        free_factor: usize,
        fixed: &[Complex64],
        resolution: usize,
    ) -> Result<SliceField> {
        let n = self.spec.n();
        if free_factor >= n {
            return Err(Error::InvalidInput(format!(
                "factor index {free_factor} out of range for N = {n}"
            )));
        }
        if fixed.len() != n - 1 {
            return Err(Error::LengthMismatch { expected: n - 1, got: fixed.len() });
        }
        if resolution < 2 {
            return Err(Error::InvalidInput("slice resolution must be at least 2".into()));
        }
        // frozen coordinates must be valid in their own factors
        let mut it = fixed.iter();
        for j in 0..n {
            if j == free_factor {
                continue;
            }
            let &v = it.next().expect("length checked");
            if !self.spec.pair(j).domain().contains(v) {
                return Err(Error::OutsideAmbient { index: j });
            }
        }
        let domain = *self.spec.pair(free_factor).domain();
        let c = domain.center();
        let r = domain.radius();
        let step = 2.0 * r / (resolution - 1) as f64;
        let mut nodes = Vec::with_capacity(resolution * resolution);
        for iy in 0..resolution {
            for ix in 0..resolution {
                let zeta = Complex64::new(
                    c.re - r + ix as f64 * step,
                    c.im - r + iy as f64 * step,
                );
                let value = if domain.contains(zeta) {
                    let mut coords = Vec::with_capacity(n);
                    let mut it = fixed.iter();
                    for j in 0..n {
                        if j == free_factor {
                            coords.push(zeta);
                        } else {
                            coords.push(*it.next().expect("length checked"));
                        }
                    }
                    self.hull_value(&Point::new(coords)?)?
                } else {
                    f64::NAN
                };
                nodes.push((zeta, value));
            }
        }
        Ok(SliceField { resolution, nodes })
    }
}

/// `max{0, sum - k + 1}` clamped into `[0, 1)` territory by its inputs.
pub fn lemma_inc_from_sum(sum: f64, order: usize) -> f64 {
    (sum - order as f64 + 1.0).max(0.0)
}

/// A slice of hull values over one factor disc, for CSV export.
#[derive(Clone, Debug)]
pub struct SliceField {
    resolution: usize,
    nodes: Vec<(Complex64, f64)>,
}

impl SliceField {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn nodes(&self) -> &[(Complex64, f64)] {
        &self.nodes
    }

    /// Writes `re,im,value` rows (row-major, 17 significant digits, NaN for
    /// nodes outside the factor domain).
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "re,im,value")?;
        for (z, v) in &self.nodes {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", z.re, z.im, v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross::in_cross;
    use crate::geometry::{make_pair, BaseSet, PlanarDomain};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn paper_query(n: usize, k: usize) -> HullQuery {
        let pairs = (0..n)
            .map(|_| {
                make_pair(BaseSet::interval(-1.0, 1.0).unwrap(), PlanarDomain::unit()).unwrap()
            })
            .collect();
        HullQuery::uniform(CrossSpec::plain(pairs, k).unwrap(), Strategy::ClosedForm).unwrap()
    }

    fn paper_point() -> Point {
        let w = c(0.0, 1.0 / 3.0_f64.sqrt());
        Point::new(vec![c(0.0, 0.0), w, w]).unwrap()
    }

    #[test]
    fn hull_value_of_paper_point_is_four_thirds() {
        let q = paper_query(3, 2);
        let v = q.hull_value(&paper_point()).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(q.in_hull(&paper_point()).unwrap(), HullMembership::Member);
    }

    #[test]
    fn center_point_has_zero_hull_value() {
        let q = paper_query(3, 2);
        let z = Point::new(vec![c(0.0, 0.0); 3]).unwrap();
        assert_eq!(q.hull_value(&z).unwrap(), 0.0);
    }

    #[test]
    fn real_diagonal_points_are_members() {
        let q = paper_query(3, 2);
        for t in [-0.9, -0.3, 0.0, 0.5, 0.99] {
            let z = Point::new(vec![c(t, 0.0); 3]).unwrap();
            assert_eq!(q.hull_value(&z).unwrap(), 0.0);
            assert!(q.in_hull(&z).unwrap().is_member());
        }
    }

    #[test]
    fn lemma_inc_on_paper_point() {
        let q = paper_query(3, 2);
        let v = q.lemma_inc_value(&paper_point(), 2).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        // inside the order-1 hull the formula clamps to zero
        let z = Point::new(vec![c(0.1, 0.0), c(0.2, 0.0), c(0.0, 0.2)]).unwrap();
        let sum = q.hull_value(&z).unwrap();
        assert!(sum < 1.0);
        assert_eq!(q.lemma_inc_value(&z, 2).unwrap(), 0.0);
    }

    #[test]
    fn lemma_inc_rejects_points_outside_hull() {
        let q = paper_query(3, 2);
        let w = c(0.0, 0.95);
        let z = Point::new(vec![w, w, w]).unwrap();
        assert!(q.hull_value(&z).unwrap() >= 2.0);
        assert!(matches!(q.lemma_inc_value(&z, 2), Err(Error::NotInHull)));
    }

    #[test]
    fn composite_zs_rejects_paper_point() {
        let q = paper_query(3, 2);
        let v = q.composite_hull2_value(CompositeVariant::Zs(2), &paper_point()).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-12);
        assert!(v >= 1.0, "paper point must fall outside the composite hull");
        // while the cross itself accepts it
        assert!(in_cross(q.spec(), &paper_point()).unwrap().member);
    }

    #[test]
    fn composite_z_accepts_paper_point() {
        let q = paper_query(3, 2);
        let v = q.composite_hull2_value(CompositeVariant::Z, &paper_point()).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
        assert!(v < 1.0);
    }

    #[test]
    fn composite_values_vanish_at_center() {
        let q = paper_query(3, 2);
        let z = Point::new(vec![c(0.0, 0.0); 3]).unwrap();
        assert_eq!(q.composite_hull2_value(CompositeVariant::Zs(2), &z).unwrap(), 0.0);
        assert_eq!(q.composite_hull2_value(CompositeVariant::Z, &z).unwrap(), 0.0);
    }

    #[test]
    fn sampled_hull_points_are_members_and_reproducible() {
        let q = paper_query(3, 2);
        let a = q.sample_hull(32, 7).unwrap();
        let b = q.sample_hull(32, 7).unwrap();
        assert_eq!(a.len(), 32);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x, y);
        }
        for z in &a {
            assert!(q.in_hull(z).unwrap().is_member());
        }
    }

    #[test]
    fn full_order_hull_accepts_everything() {
        let q = paper_query(3, 3);
        let w = c(0.3, 0.8);
        let z = Point::new(vec![w, w, w]).unwrap();
        assert!(q.in_hull(&z).unwrap().is_member());
    }

    #[test]
    fn slice_at_center_coordinates_equals_factor_h() {
        let q = paper_query(3, 2);
        let slice = q.slice_grid(0, &[c(0.0, 0.0), c(0.0, 0.0)], 33).unwrap();
        for &(z, v) in slice.nodes() {
            if v.is_nan() {
                continue;
            }
            let h = crate::extremal::h_closed_form(q.spec().pair(0), z).unwrap();
            assert!((v - h).abs() < 1e-12);
        }
    }

    #[test]
    fn slice_consistency_with_paper_value() {
        let q = paper_query(3, 2);
        let w = c(0.0, 1.0 / 3.0_f64.sqrt());
        let slice = q.slice_grid(0, &[w, w], 65).unwrap();
        // the node nearest the origin carries roughly 0 + 2/3 + 2/3
        let (_, v) = slice
            .nodes()
            .iter()
            .filter(|(_, v)| !v.is_nan())
            .min_by(|(a, _), (b, _)| a.norm().partial_cmp(&b.norm()).unwrap())
            .unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-2);
    }

    #[test]
    fn slice_rejects_bad_inputs() {
        let q = paper_query(3, 2);
        assert!(q.slice_grid(0, &[c(0.0, 0.0), c(0.0, 0.0)], 0).is_err());
        assert!(matches!(
            q.slice_grid(0, &[c(2.0, 0.0), c(0.0, 0.0)], 17),
            Err(Error::OutsideAmbient { index: 1 })
        ));
    }
}
