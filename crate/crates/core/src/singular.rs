//! Singularity-set descriptors and their fibers.
//!
//! The catalog keeps to sets whose pluripolarity is classical: the empty set,
//! finite point lists, and proper zero sets of polynomials (total degree at
//! most 8). Fibering a catalog set either stays in the catalog or degenerates
//! to a full fiber, which is reported explicitly rather than silently
//! accepted.

use num_complex::Complex64;

use crate::cross::{in_cross, merge, CrossSpec, FamilyKind, MultiIndex, Side};
use crate::poly::MultiPoly;
use crate::{Error, Result};

const MAX_ZERO_SET_DEGREE: usize = 8;

/// A singularity set `Σ_α ⊂ A_0^α` attached to a branch.
#[derive(Clone, Debug, PartialEq)]
pub enum SigmaSet {
    Empty,
    /// Duplicate-free list of points of the α-zero factor product.
    Points(Vec<Vec<Complex64>>),
    /// Proper polynomial zero set in the α-zero variables.
    PolyZero(MultiPoly),
}

impl SigmaSet {
    pub fn points(list: Vec<Vec<Complex64>>) -> Result<Self> {
        for (i, p) in list.iter().enumerate() {
            for q in &list[i + 1..] {
                if p == q {
                    return Err(Error::InvalidInput(
                        "duplicate point in singularity list".into(),
                    ));
                }
            }
        }
        Ok(SigmaSet::Points(list))
    }

    pub fn poly_zero(p: MultiPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::InvalidInput(
                "zero polynomial does not describe a proper zero set".into(),
            ));
        }
        if p.total_degree() > MAX_ZERO_SET_DEGREE {
            return Err(Error::InvalidInput(format!(
                "zero-set polynomial degree {} exceeds the supported bound {MAX_ZERO_SET_DEGREE}",
                p.total_degree()
            )));
        }
        Ok(SigmaSet::PolyZero(p))
    }

    /// Checks the descriptor against the expected number of variables.
    pub(crate) fn validate(&self, arity: usize) -> Result<()> {
        match self {
            SigmaSet::Empty => Ok(()),
            SigmaSet::Points(list) => {
                for p in list {
                    if p.len() != arity {
                        return Err(Error::DimensionMismatch(format!(
                            "sigma point has {} coordinates, branch expects {arity}",
                            p.len()
                        )));
                    }
                }
                Ok(())
            }
            SigmaSet::PolyZero(p) => {
                if p.nvars() != arity {
                    return Err(Error::DimensionMismatch(format!(
                        "sigma polynomial has {} variables, branch expects {arity}",
                        p.nvars()
                    )));
                }
                Ok(())
            }
        }
    }

    /// Exact membership (point-list equality is exact complex comparison;
    /// zero sets test `p(z) == 0`).
    pub fn contains(&self, z: &[Complex64]) -> bool {
        match self {
            SigmaSet::Empty => false,
            SigmaSet::Points(list) => list.iter().any(|p| p.as_slice() == z),
            SigmaSet::PolyZero(p) => p.eval(z) == Complex64::new(0.0, 0.0),
        }
    }
}

/// Descriptor kind shared by `MSpec` and `FiberSet`.
#[derive(Clone, Debug, PartialEq)]
pub enum MKind {
    Empty,
    Points(Vec<Vec<Complex64>>),
    PolyZero(MultiPoly),
}

/// A relatively closed singularity set `M` inside a cross.
#[derive(Clone, Debug)]
pub struct MSpec {
    kind: MKind,
    ambient: CrossSpec,
}

impl MSpec {
    pub fn empty(ambient: CrossSpec) -> Self {
        Self { kind: MKind::Empty, ambient }
    }

    /// A finite list; every point must lie in the ambient cross.
    pub fn points(ambient: CrossSpec, list: Vec<Vec<Complex64>>) -> Result<Self> {
        for p in &list {
            let pt = crate::cross::Point::new(p.clone())?;
            if !in_cross(&ambient, &pt)?.member {
                return Err(Error::InvalidInput(
                    "singularity point does not lie in the cross".into(),
                ));
            }
        }
        SigmaSet::points(list.clone())?;
        Ok(Self { kind: MKind::Points(list), ambient })
    }

    /// The zero set of `p` (in all `N` ambient variables) inside the cross.
    pub fn poly_zero(ambient: CrossSpec, p: MultiPoly) -> Result<Self> {
        if p.nvars() != ambient.n() {
            return Err(Error::DimensionMismatch(format!(
                "polynomial has {} variables, cross has {}",
                p.nvars(),
                ambient.n()
            )));
        }
        SigmaSet::poly_zero(p.clone())?;
        Ok(Self { kind: MKind::PolyZero(p), ambient })
    }

    pub fn kind(&self) -> &MKind {
        &self.kind
    }

    pub fn ambient(&self) -> &CrossSpec {
        &self.ambient
    }

    pub fn is_empty_descriptor(&self) -> bool {
        matches!(self.kind, MKind::Empty)
    }

    /// Membership of a full ambient point in `M`.
    pub fn contains(&self, z: &[Complex64]) -> bool {
        match &self.kind {
            MKind::Empty => false,
            MKind::Points(list) => list.iter().any(|p| p.as_slice() == z),
            MKind::PolyZero(p) => p.eval(z) == Complex64::new(0.0, 0.0),
        }
    }
}

/// A fiber `M_{a,α} = {z in the α-one factors : merge(a, z) ∈ M}`.
#[derive(Clone, Debug, PartialEq)]
pub enum FiberSet {
    Empty,
    Points(Vec<Vec<Complex64>>),
    PolyZero(MultiPoly),
    /// The substituted polynomial vanished identically: the fiber is the
    /// whole slice, which is *not* pluripolar and must be surfaced.
    Full,
}

impl FiberSet {
    pub fn contains(&self, z: &[Complex64]) -> bool {
        match self {
            FiberSet::Empty => false,
            FiberSet::Points(list) => list.iter().any(|p| p.as_slice() == z),
            FiberSet::PolyZero(p) => p.eval(z) == Complex64::new(0.0, 0.0),
            FiberSet::Full => true,
        }
    }
}

/// Extracts the fiber of `M` over the α-zero sub-point `a`.
pub fn fiber(m: &MSpec, a: &[Complex64], alpha: &MultiIndex) -> Result<FiberSet> {
    let n = m.ambient.n();
    if alpha.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "multi-index length {} does not match the cross ({n})",
            alpha.len()
        )));
    }
    let zeros = n - alpha.weight();
    if a.len() != zeros {
        return Err(Error::DimensionMismatch(format!(
            "sub-point has {} coordinates, the α-zero block has {zeros}",
            a.len()
        )));
    }
    match &m.kind {
        MKind::Empty => Ok(FiberSet::Empty),
        MKind::Points(list) => {
            let mut tails = Vec::new();
            for p in list {
                let pt = crate::cross::Point::new(p.clone())?;
                let head = crate::cross::project(&pt, alpha, Side::Zero)?;
                if head.as_slice() == a {
                    tails.push(crate::cross::project(&pt, alpha, Side::One)?);
                }
            }
            if tails.is_empty() {
                Ok(FiberSet::Empty)
            } else {
                Ok(FiberSet::Points(tails))
            }
        }
        MKind::PolyZero(p) => {
            let positions: Vec<usize> = (0..n).filter(|&j| !alpha.bit(j)).collect();
            let sub = p.substitute(&positions, a)?;
            if sub.is_zero() {
                Ok(FiberSet::Full)
            } else if sub.total_degree() == 0 {
                Ok(FiberSet::Empty)
            } else {
                Ok(FiberSet::PolyZero(sub))
            }
        }
    }
}

/// Catalog pluripolarity: empty sets, finite lists, and proper zero sets are
/// pluripolar; a full fiber is not.
pub trait Pluripolar {
    fn is_pluripolar(&self) -> bool;
}

impl Pluripolar for SigmaSet {
    fn is_pluripolar(&self) -> bool {
        true
    }
}

impl Pluripolar for MSpec {
    fn is_pluripolar(&self) -> bool {
        true
    }
}

impl Pluripolar for FiberSet {
    fn is_pluripolar(&self) -> bool {
        !matches!(self, FiberSet::Full)
    }
}

/// A finite union of coordinate cylinders `{a : a_j = v_j for pinned j}`
/// inside the center product; the explicit form of the intersections `Δ`
/// (over `I`) and `Δ̃` (over `J`).
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaDescriptor {
    n: usize,
    cylinders: Vec<Vec<Option<Complex64>>>,
}

impl DeltaDescriptor {
    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cylinders(&self) -> &[Vec<Option<Complex64>>] {
        &self.cylinders
    }

    /// Membership for a point of the center product (pinned coordinates are
    /// compared exactly; free coordinates are unconstrained).
    pub fn contains(&self, a: &[Complex64]) -> bool {
        self.cylinders.iter().any(|cyl| {
            cyl.iter()
                .zip(a)
                .all(|(pin, &v)| pin.map_or(true, |w| w == v))
        })
    }

    /// The explicit point list when every cylinder is fully pinned.
    pub fn as_points(&self) -> Option<Vec<Vec<Complex64>>> {
        self.cylinders
            .iter()
            .map(|cyl| cyl.iter().map(|p| *p).collect::<Option<Vec<_>>>())
            .collect()
    }

    fn intersect_cylinders(
        a: &[Option<Complex64>],
        b: &[Option<Complex64>],
    ) -> Option<Vec<Option<Complex64>>> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| match (x, y) {
                (None, p) => Some(p),
                (p, None) => Some(p),
                (Some(u), Some(v)) if u == v => Some(Some(u)),
                _ => None,
            })
            .collect()
    }
}

/// Computes the center defect sets: `Δ = ∩_{α∈I} {a : a_α ∈ Σ_α}` and
/// `Δ̃ = ∩_{α∈J} {a : a_α ∈ Σ_α}`, so that `c(T) = c(X) \ Δ` and
/// `c(Y) = c(X) \ Δ̃`. Missing sigma entries are empty sets and kill the
/// whole intersection. Only finite-point sigma sets are supported.
pub fn delta_sets(spec: &CrossSpec) -> Result<(DeltaDescriptor, DeltaDescriptor)> {
    let n = spec.n();
    if spec.sigmas().values().any(|s| matches!(s, SigmaSet::PolyZero(_))) {
        return Err(Error::UnsupportedSigmaKind);
    }
    let build = |kind: FamilyKind| -> Result<DeltaDescriptor> {
        let family = crate::cross::gen_family(n, spec.k(), kind)?;
        let mut acc: Vec<Vec<Option<Complex64>>> = vec![vec![None; n]];
        for alpha in &family {
            let sigma = spec.sigma(alpha).unwrap_or(&SigmaSet::Empty);
            let constraint: Vec<Vec<Option<Complex64>>> = match sigma {
                SigmaSet::Empty => Vec::new(),
                SigmaSet::Points(list) => {
                    let zero_slots: Vec<usize> = (0..n).filter(|&j| !alpha.bit(j)).collect();
                    list.iter()
                        .filter_map(|pt| {
                            let mut cyl = vec![None; n];
                            for (i, &j) in zero_slots.iter().enumerate() {
                                // a pinned value outside A_j is unsatisfiable
                                if !spec.pair(j).base_contains(pt[i]) {
                                    return None;
                                }
                                cyl[j] = Some(pt[i]);
                            }
                            Some(cyl)
                        })
                        .collect()
                }
                SigmaSet::PolyZero(_) => return Err(Error::UnsupportedSigmaKind),
            };
            let mut next = Vec::new();
            for lhs in &acc {
                for rhs in &constraint {
                    if let Some(meet) = DeltaDescriptor::intersect_cylinders(lhs, rhs) {
                        if !next.contains(&meet) {
                            next.push(meet);
                        }
                    }
                }
            }
            acc = next;
            if acc.is_empty() {
                break;
            }
        }
        Ok(DeltaDescriptor { n, cylinders: acc })
    };
    Ok((build(FamilyKind::I)?, build(FamilyKind::J)?))
}
