//! Planar domains, base subsets, and validated `(A, D)` factor pairs.
//!
//! A factor is a planar disc `D` together with a distinguished base set
//! `A ⊂ D̄` drawn from a small catalog: real intervals, closed subdiscs, and
//! finite unions of those. Every catalog member is locally pluriregular, so
//! validated pairs satisfy the standing hypotheses of the cross machinery by
//! construction. Disc automorphisms transport pairs conformally; extremal
//! values are invariant under transport.

use num_complex::Complex64;

use crate::{ensure_finite, Error, Result};

/// A point of the complex plane with finite coordinates.
pub type ComplexPoint = Complex64;

/// An open planar disc `{z : |z - center| < radius}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarDomain {
    center: Complex64,
    radius: f64,
}

impl PlanarDomain {
    pub fn disc(center: Complex64, radius: f64) -> Result<Self> {
        ensure_finite(center, "disc center")?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "disc radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self { center, radius })
    }

    /// The open unit disc centered at the origin.
    pub fn unit() -> Self {
        Self { center: Complex64::new(0.0, 0.0), radius: 1.0 }
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Strict interior membership, decided exactly on `|z - c|^2 < r^2`.
    pub fn contains(&self, z: Complex64) -> bool {
        let d = z - self.center;
        d.re * d.re + d.im * d.im < self.radius * self.radius
    }

    /// Closure membership, `|z - c|^2 <= r^2`.
    pub fn contains_closure(&self, z: Complex64) -> bool {
        let d = z - self.center;
        d.re * d.re + d.im * d.im <= self.radius * self.radius
    }

    /// Maps a point into normalized unit-disc coordinates.
    pub(crate) fn normalize(&self, z: Complex64) -> Complex64 {
        (z - self.center) / self.radius
    }

    pub(crate) fn denormalize(&self, w: Complex64) -> Complex64 {
        self.center + self.radius * w
    }
}

/// Membership test for `D(z) = |z - center| < radius`.
pub fn domain_contains(domain: &PlanarDomain, z: Complex64) -> bool {
    domain.contains(z)
}

/// Base-set catalog: real intervals, closed subdiscs, and finite unions.
///
/// Intervals live on the real axis; membership uses the closed interval
/// intersected with the open domain, so `(-1,1)` in the unit disc is matched
/// exactly even though its endpoints sit on the boundary circle.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseSet {
    /// The real segment `[a, b]`, `a < b`.
    Interval { a: f64, b: f64 },
    /// The closed disc `{z : |z - center| <= radius}`.
    Subdisc { center: Complex64, radius: f64 },
    /// A finite union of intervals and subdiscs.
    Union(Vec<BaseSet>),
}

impl BaseSet {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidBase("interval endpoints must be finite".into()));
        }
        if !(a < b) {
            return Err(Error::InvalidBase(format!(
                "interval [{a}, {b}] has empty interior (a point set is pluripolar)"
            )));
        }
        Ok(BaseSet::Interval { a, b })
    }

    pub fn subdisc(center: Complex64, radius: f64) -> Result<Self> {
        ensure_finite(center, "subdisc center").map_err(|_| {
            Error::InvalidBase("subdisc center must be finite".into())
        })?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidBase(format!(
                "subdisc radius must be positive, got {radius} (a point set is pluripolar)"
            )));
        }
        Ok(BaseSet::Subdisc { center, radius })
    }

    pub fn union(pieces: Vec<BaseSet>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidBase("union of zero pieces is empty".into()));
        }
        for p in &pieces {
            if matches!(p, BaseSet::Union(_)) {
                return Err(Error::InvalidBase("nested unions are not supported".into()));
            }
        }
        Ok(BaseSet::Union(pieces))
    }

    /// Membership in the base set alone (no domain intersection).
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            BaseSet::Interval { a, b } => z.im == 0.0 && *a <= z.re && z.re <= *b,
            BaseSet::Subdisc { center, radius } => {
                let d = z - center;
                d.re * d.re + d.im * d.im <= radius * radius
            }
            BaseSet::Union(pieces) => pieces.iter().any(|p| p.contains(z)),
        }
    }

    /// A designated interior point: the midpoint of the first interval piece
    /// or the first subdisc center.
    pub fn anchor(&self) -> Complex64 {
        match self {
            BaseSet::Interval { a, b } => Complex64::new(0.5 * (a + b), 0.0),
            BaseSet::Subdisc { center, .. } => *center,
            BaseSet::Union(pieces) => pieces[0].anchor(),
        }
    }

    fn pieces(&self) -> &[BaseSet] {
        match self {
            BaseSet::Union(pieces) => pieces,
            other => std::slice::from_ref(other),
        }
    }

    pub(crate) fn has_interval_piece(&self) -> bool {
        self.pieces().iter().any(|p| matches!(p, BaseSet::Interval { .. }))
    }
}

/// A unit-disc automorphism `w ↦ e^{iθ}(w - a)/(1 - ā w)`, stored as a
/// normalized SU(1,1) matrix so that composition and inversion stay in the
/// same family.
#[derive(Clone, Copy, Debug)]
pub struct DiscAutomorphism {
    alpha: Complex64,
    beta: Complex64,
}

impl DiscAutomorphism {
    pub fn identity() -> Self {
        Self { alpha: Complex64::new(1.0, 0.0), beta: Complex64::new(0.0, 0.0) }
    }

    /// Rotation by `theta` about the origin.
    pub fn rotation(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::UnsupportedMap("non-finite rotation angle".into()));
        }
        let half = Complex64::from_polar(1.0, 0.5 * theta);
        Ok(Self { alpha: half, beta: Complex64::new(0.0, 0.0) })
    }

    /// The map `w ↦ e^{iθ}(w - a)/(1 - ā w)` with `|a| < 1`.
    pub fn new(theta: f64, a: Complex64) -> Result<Self> {
        ensure_finite(a, "automorphism parameter")
            .map_err(|_| Error::UnsupportedMap("non-finite parameter".into()))?;
        if !theta.is_finite() {
            return Err(Error::UnsupportedMap("non-finite rotation angle".into()));
        }
        if a.norm_sqr() >= 1.0 {
            return Err(Error::UnsupportedMap(format!(
                "parameter a with |a| = {} >= 1 is not a disc automorphism",
                a.norm()
            )));
        }
        let lambda = 1.0 / (1.0 - a.norm_sqr()).sqrt();
        let blaschke = Self { alpha: Complex64::new(lambda, 0.0), beta: -lambda * a };
        Ok(Self::rotation(theta)?.compose(&blaschke))
    }

    pub fn apply(&self, w: Complex64) -> Complex64 {
        (self.alpha * w + self.beta) / (self.beta.conj() * w + self.alpha.conj())
    }

    pub fn inverse(&self) -> Self {
        Self { alpha: self.alpha.conj(), beta: -self.beta }
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        let alpha = self.alpha * other.alpha + self.beta * other.beta.conj();
        let beta = self.alpha * other.beta + self.beta * other.alpha.conj();
        // renormalize |alpha|^2 - |beta|^2 back to 1 against rounding drift
        let det = (alpha.norm_sqr() - beta.norm_sqr()).sqrt();
        Self { alpha: alpha / det, beta: beta / det }
    }

    fn is_identity(&self) -> bool {
        self.beta.norm_sqr() == 0.0 && self.alpha.im == 0.0
    }

    /// Image of the closed disc `|w - c| <= rho` (closure inside the unit
    /// disc). The image center is the image of the inversion of the map's
    /// pole in the circle; the pole is the preimage of infinity.
    fn map_disc(&self, c: Complex64, rho: f64) -> (Complex64, f64) {
        if self.beta.norm_sqr() == 0.0 {
            // pure rotation
            let rot = self.alpha / self.alpha.conj();
            return (rot * c, rho);
        }
        let pole = -self.alpha.conj() / self.beta.conj();
        let d = pole - c;
        let reflected = c + d * (rho * rho / d.norm_sqr());
        let center = self.apply(reflected);
        let radius = (self.apply(c + rho) - center).norm();
        (center, radius)
    }
}

/// A validated factor pair `(A, D)`.
///
/// The base is stored in canonical catalog form; a pair produced by
/// [`mobius_transport`] of an interval base additionally carries the
/// automorphism that moves the canonical base to its current position (in
/// normalized disc coordinates). Subdisc images are materialized directly
/// since Möbius maps send discs to discs.
#[derive(Clone, Debug)]
pub struct PairAD {
    base: BaseSet,
    domain: PlanarDomain,
    transport: Option<DiscAutomorphism>,
}

/// Validates a factor pair.
///
/// Interval pieces must lie inside the closure of `D` on the real axis
/// (endpoints may touch the boundary circle); subdisc pieces must have their
/// closure strictly inside `D`. Degenerate pieces are rejected as pluripolar.
pub fn make_pair(base: BaseSet, domain: PlanarDomain) -> Result<PairAD> {
    for piece in base.pieces() {
        match piece {
            BaseSet::Interval { a, b } => {
                BaseSet::interval(*a, *b)?;
                let pa = Complex64::new(*a, 0.0);
                let pb = Complex64::new(*b, 0.0);
                if !(domain.contains_closure(pa) && domain.contains_closure(pb)) {
                    return Err(Error::InvalidBase(format!(
                        "interval [{a}, {b}] is not contained in the domain closure"
                    )));
                }
            }
            BaseSet::Subdisc { center, radius } => {
                BaseSet::subdisc(*center, *radius)?;
                let gap = domain.radius() - (center - domain.center()).norm() - radius;
                if !(gap > 0.0) {
                    return Err(Error::InvalidBase(
                        "subdisc closure must lie strictly inside the domain".into(),
                    ));
                }
            }
            BaseSet::Union(_) => unreachable!("unions are flattened at construction"),
        }
    }
    if let BaseSet::Union(pieces) = &base {
        if pieces.is_empty() {
            return Err(Error::InvalidBase("empty union".into()));
        }
    }
    Ok(PairAD { base, domain, transport: None })
}

impl PairAD {
    pub fn base(&self) -> &BaseSet {
        &self.base
    }

    pub fn domain(&self) -> &PlanarDomain {
        &self.domain
    }

    pub(crate) fn transport(&self) -> Option<&DiscAutomorphism> {
        self.transport.as_ref()
    }

    /// Membership in `A ∩ D`: the base set intersected with the open domain.
    ///
    /// Canonical pairs use exact arithmetic (in particular the exact
    /// `im(z) = 0` test for intervals). For transported pairs the pulled-back
    /// point is snapped to the real axis within `1e-12 · radius`, since a
    /// floating-point automorphism cannot return to the axis exactly.
    pub fn base_contains(&self, z: Complex64) -> bool {
        if !self.domain.contains(z) {
            return false;
        }
        let w = self.domain.normalize(z);
        match &self.transport {
            None => self.base.contains(self.domain.denormalize(w)),
            Some(t) => {
                let mut z0 = self.domain.denormalize(t.inverse().apply(w));
                if self.base.has_interval_piece() && z0.im.abs() <= 1e-12 * self.domain.radius() {
                    z0.im = 0.0;
                }
                self.base.contains(z0)
            }
        }
    }

    /// The designated interior anchor of `A`, transported if necessary.
    pub fn anchor(&self) -> Complex64 {
        let a = self.base.anchor();
        match &self.transport {
            Some(t) => self.domain.denormalize(t.apply(self.domain.normalize(a))),
            None => a,
        }
    }

    /// Applies a transport map to a point of `D` (identity for untransported
    /// pairs); used to push canonical base samples forward.
    pub(crate) fn push_forward(&self, z: Complex64) -> Complex64 {
        match &self.transport {
            Some(t) => self.domain.denormalize(t.apply(self.domain.normalize(z))),
            None => z,
        }
    }

    pub(crate) fn pull_back(&self, z: Complex64) -> Complex64 {
        match &self.transport {
            Some(t) => self.domain.denormalize(t.inverse().apply(self.domain.normalize(z))),
            None => z,
        }
    }
}

/// Transports a pair by the disc automorphism `w ↦ e^{iθ}(w - a)/(1 - ā w)`
/// acting in the normalized coordinates of `p.domain`.
///
/// Extremal values are preserved: `h(pair, ζ) = h(transport(pair), φ(ζ))`.
/// Subdisc bases are materialized as concrete discs; interval bases keep the
/// map since their images are generally circular arcs outside the catalog.
pub fn mobius_transport(p: &PairAD, theta: f64, a: Complex64) -> Result<PairAD> {
    let phi = DiscAutomorphism::new(theta, a)?;
    if phi.is_identity() {
        return Ok(p.clone());
    }
    let combined = match &p.transport {
        Some(prev) => phi.compose(prev),
        None => phi,
    };
    if !p.base.has_interval_piece() {
        // all-subdisc base: compute image discs and drop the map
        let map_piece = |piece: &BaseSet| -> Result<BaseSet> {
            match piece {
                BaseSet::Subdisc { center, radius } => {
                    let cw = p.domain.normalize(*center);
                    let rw = radius / p.domain.radius();
                    let (ic, ir) = combined.map_disc(cw, rw);
                    BaseSet::subdisc(p.domain.denormalize(ic), ir * p.domain.radius())
                }
                _ => unreachable!(),
            }
        };
        let base = match &p.base {
            BaseSet::Union(pieces) => {
                BaseSet::union(pieces.iter().map(map_piece).collect::<Result<Vec<_>>>()?)?
            }
            single => map_piece(single)?,
        };
        return make_pair(base, p.domain);
    }
    Ok(PairAD { base: p.base.clone(), domain: p.domain, transport: Some(combined) })
}

/// Applies the same automorphism to a point, for checking transport
/// invariants (`φ(ζ)` in the domain's normalized coordinates).
pub fn mobius_apply(domain: &PlanarDomain, theta: f64, a: Complex64, z: Complex64) -> Result<Complex64> {
    let phi = DiscAutomorphism::new(theta, a)?;
    Ok(domain.denormalize(phi.apply(domain.normalize(z))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn paper_interval_pair_is_valid() {
        let pair = make_pair(BaseSet::interval(-1.0, 1.0).unwrap(), PlanarDomain::unit()).unwrap();
        assert!(pair.base_contains(c(0.0, 0.0)));
        assert!(pair.base_contains(c(0.999, 0.0)));
        // endpoints are on the boundary circle, hence outside the open domain
        assert!(!pair.base_contains(c(1.0, 0.0)));
        assert!(!pair.base_contains(c(0.5, 1e-12)));
    }

    #[test]
    fn point_base_is_rejected() {
        assert!(matches!(BaseSet::interval(0.3, 0.3), Err(Error::InvalidBase(_))));
        assert!(matches!(BaseSet::subdisc(c(0.0, 0.0), 0.0), Err(Error::InvalidBase(_))));
    }

    #[test]
    fn nested_subdisc_pair_is_valid() {
        let pair =
            make_pair(BaseSet::subdisc(c(0.0, 0.0), 0.25).unwrap(), PlanarDomain::unit()).unwrap();
        assert!(pair.base_contains(c(0.25, 0.0)));
        assert!(!pair.base_contains(c(0.26, 0.0)));
    }

    #[test]
    fn base_outside_domain_is_rejected() {
        let d = PlanarDomain::unit();
        assert!(make_pair(BaseSet::interval(-1.0, 1.1).unwrap(), d).is_err());
        assert!(make_pair(BaseSet::subdisc(c(0.9, 0.0), 0.2).unwrap(), d).is_err());
        // subdisc closure touching the boundary is also rejected
        assert!(make_pair(BaseSet::subdisc(c(0.5, 0.0), 0.5).unwrap(), d).is_err());
    }

    #[test]
    fn domain_contains_is_strict() {
        let d = PlanarDomain::unit();
        assert!(domain_contains(&d, c(0.0, 0.0)));
        assert!(!domain_contains(&d, c(1.0, 0.0)));
        let t = 1.0 / 3.0_f64.sqrt();
        assert!(domain_contains(&d, c(0.0, t)));
    }

    #[test]
    fn identity_transport_returns_same_pair() {
        let pair = make_pair(BaseSet::interval(-1.0, 1.0).unwrap(), PlanarDomain::unit()).unwrap();
        let moved = mobius_transport(&pair, 0.0, c(0.0, 0.0)).unwrap();
        assert!(moved.transport.is_none());
        assert_eq!(moved.base, pair.base);
    }

    #[test]
    fn quarter_rotation_moves_interval_to_imaginary_axis() {
        let pair = make_pair(BaseSet::interval(-1.0, 1.0).unwrap(), PlanarDomain::unit()).unwrap();
        let rotated = mobius_transport(&pair, std::f64::consts::FRAC_PI_2, c(0.0, 0.0)).unwrap();
        assert!(rotated.base_contains(c(0.0, 0.5)));
        assert!(rotated.base_contains(c(0.0, -0.9)));
        assert!(!rotated.base_contains(c(0.5, 0.0)));
    }

    #[test]
    fn blaschke_transport_of_subdisc_is_a_concrete_disc() {
        let pair =
            make_pair(BaseSet::subdisc(c(0.0, 0.0), 0.25).unwrap(), PlanarDomain::unit()).unwrap();
        let a = c(0.3, 0.0);
        let moved = mobius_transport(&pair, 0.0, a).unwrap();
        assert!(moved.transport.is_none());
        let BaseSet::Subdisc { center, radius } = moved.base else {
            panic!("expected a subdisc image");
        };
        // boundary points of the original circle must land on the image circle
        for k in 0..16 {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 16.0;
            let z = 0.25 * Complex64::from_polar(1.0, t);
            let w = mobius_apply(pair.domain(), 0.0, a, z).unwrap();
            assert!(((w - center).norm() - radius).abs() < 1e-12);
        }
    }

    #[test]
    fn transport_membership_pulls_back() {
        let pair = make_pair(BaseSet::interval(-1.0, 1.0).unwrap(), PlanarDomain::unit()).unwrap();
        let a = c(0.3, 0.1);
        let moved = mobius_transport(&pair, 0.4, a).unwrap();
        for t in [-0.9, -0.4, 0.0, 0.3, 0.8] {
            let image = mobius_apply(pair.domain(), 0.4, a, c(t, 0.0)).unwrap();
            assert!(moved.base_contains(image), "image of interval point must be in base");
        }
        assert!(!moved.base_contains(c(0.5, 0.5)) || !pair.base_contains(moved.pull_back(c(0.5, 0.5))));
    }

    #[test]
    fn non_automorphism_parameters_are_rejected() {
        let pair = make_pair(BaseSet::interval(-1.0, 1.0).unwrap(), PlanarDomain::unit()).unwrap();
        assert!(matches!(
            mobius_transport(&pair, 0.0, c(1.0, 0.0)),
            Err(Error::UnsupportedMap(_))
        ));
        assert!(matches!(
            mobius_transport(&pair, f64::NAN, c(0.0, 0.0)),
            Err(Error::UnsupportedMap(_))
        ));
    }

    #[test]
    fn automorphism_round_trip() {
        let phi = DiscAutomorphism::new(0.7, c(0.2, -0.4)).unwrap();
        let inv = phi.inverse();
        for &w in &[c(0.1, 0.2), c(-0.5, 0.3), c(0.0, 0.0), c(0.7, -0.1)] {
            let back = inv.apply(phi.apply(w));
            assert!((back - w).norm() < 1e-14);
        }
    }
}
