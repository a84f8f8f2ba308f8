//! Multi-index combinatorics, the merge operation, and membership machinery
//! for the crosses `X_{N,k}`, `T_{N,k}`, `Y_{N,k}`.
//!
//! A cross over factors `(A_j, D_j)` is indexed by `α ∈ {0,1}^N`: the branch
//! `X_α` takes `D_j` in the slots with `α_j = 1` and `A_j` in the slots with
//! `α_j = 0`. The plain cross `X_{N,k}` unions the branches of weight exactly
//! `k` (family `I`); the generalized crosses thin branches by removing points
//! whose A-side projection lies in a singularity set `Σ_α`: `T_{N,k}` over
//! `I`, `Y_{N,k}` over all weights `1..=k` (family `J`). Always `T ⊆ Y ⊆ X`
//! as membership predicates, with equality when every `Σ_α` is empty.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::geometry::PairAD;
use crate::singular::SigmaSet;
use crate::{ensure_finite, Error, Result};

/// A 0/1 multi-index `α` of length `N`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    bits: Vec<bool>,
}

impl MultiIndex {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Parses a bit-string such as `"110"`.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "bad multi-index bit-string {s:?}: expected only 0 and 1"
                    )))
                }
            }
        }
        if bits.is_empty() {
            return Err(Error::InvalidInput("empty multi-index bit-string".into()));
        }
        Ok(Self { bits })
    }

    pub fn to_bitstring(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of ones, `|α|`.
    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn bit(&self, j: usize) -> bool {
        self.bits[j]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "α{}", self.to_bitstring())
    }
}

/// Which index family to generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// `I = {α : |α| = k}`
    I,
    /// `J = {α : 1 <= |α| <= k}`
    J,
}

/// Enumerates the family `I` or `J` in lexicographic order (leftmost bit most
/// significant), duplicate-free. `|I| = C(N,k)`, `|J| = Σ_{m=1..k} C(N,m)`.
pub fn gen_family(n: usize, k: usize, which: FamilyKind) -> Result<Vec<MultiIndex>> {
    if k < 1 || k > n {
        return Err(Error::BadOrder(format!("k = {k} must satisfy 1 <= k <= N = {n}")));
    }
    if n > 20 {
        return Err(Error::BadOrder(format!("N = {n} exceeds the enumeration limit")));
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let weight = mask.count_ones() as usize;
        let keep = match which {
            FamilyKind::I => weight == k,
            FamilyKind::J => (1..=k).contains(&weight),
        };
        if keep {
            let bits = (0..n).map(|j| mask >> (n - 1 - j) & 1 == 1).collect();
            out.push(MultiIndex::new(bits));
        }
    }
    out.sort();
    Ok(out)
}

/// A point of the ambient product `D_1 × … × D_N`.
#[derive(Clone, PartialEq)]
pub struct Point {
    coords: Vec<Complex64>,
}

impl Point {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        for (j, &z) in coords.iter().enumerate() {
            ensure_finite(z, &format!("coordinate {j}"))?;
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn coord(&self, j: usize) -> Complex64 {
        self.coords[j]
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|z| format!("{z}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Merges sub-points over the zero and one slots of `α` back into a full
/// point, preserving order within each group.
pub fn merge(alpha: &MultiIndex, c0: &[Complex64], c1: &[Complex64]) -> Result<Point> {
    let zeros = alpha.len() - alpha.weight();
    if c0.len() != zeros {
        return Err(Error::LengthMismatch { expected: zeros, got: c0.len() });
    }
    if c1.len() != alpha.weight() {
        return Err(Error::LengthMismatch { expected: alpha.weight(), got: c1.len() });
    }
    let mut i0 = 0;
    let mut i1 = 0;
    let mut coords = Vec::with_capacity(alpha.len());
    for j in 0..alpha.len() {
        if alpha.bit(j) {
            coords.push(c1[i1]);
            i1 += 1;
        } else {
            coords.push(c0[i0]);
            i0 += 1;
        }
    }
    Point::new(coords)
}

/// Side selector for projections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Zero,
    One,
}

/// Ordered extraction of the coordinates with `α_j` equal to the chosen side.
pub fn project(z: &Point, alpha: &MultiIndex, side: Side) -> Result<Vec<Complex64>> {
    if z.len() != alpha.len() {
        return Err(Error::LengthMismatch { expected: alpha.len(), got: z.len() });
    }
    let want = side == Side::One;
    Ok(z.coords()
        .iter()
        .zip(alpha.bits())
        .filter(|(_, &b)| b == want)
        .map(|(&c, _)| c)
        .collect())
}

/// Cross flavor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    X,
    T,
    Y,
}

/// An `(N,k)`-cross specification: factor pairs, order, variant, and the
/// singularity sets `Σ_α ⊂ A_0^α` keyed by multi-index.
#[derive(Clone, Debug)]
pub struct CrossSpec {
    pairs: Vec<PairAD>,
    k: usize,
    variant: Variant,
    sigmas: BTreeMap<MultiIndex, SigmaSet>,
}

impl CrossSpec {
    pub fn new(
        pairs: Vec<PairAD>,
        k: usize,
        variant: Variant,
        sigmas: BTreeMap<MultiIndex, SigmaSet>,
    ) -> Result<Self> {
        let n = pairs.len();
        if n < 2 {
            return Err(Error::InvalidInput("a cross needs at least two factors".into()));
        }
        if k < 1 || k > n {
            return Err(Error::BadOrder(format!("k = {k} must satisfy 1 <= k <= N = {n}")));
        }
        for (alpha, sigma) in &sigmas {
            if alpha.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: alpha.len() });
            }
            let w = alpha.weight();
            let admissible = match variant {
                Variant::X => false,
                Variant::T => w == k,
                Variant::Y => (1..=k).contains(&w),
            };
            if !admissible {
                return Err(Error::InvalidInput(format!(
                    "sigma key {alpha:?} is not in the {variant:?}-family for k = {k}"
                )));
            }
            sigma.validate(n - w)?;
        }
        Ok(Self { pairs, k, variant, sigmas })
    }

    /// Plain cross without singularity sets.
    pub fn plain(pairs: Vec<PairAD>, k: usize) -> Result<Self> {
        Self::new(pairs, k, Variant::X, BTreeMap::new())
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn pairs(&self) -> &[PairAD] {
        &self.pairs
    }

    pub fn pair(&self, j: usize) -> &PairAD {
        &self.pairs[j]
    }

    pub fn sigma(&self, alpha: &MultiIndex) -> Option<&SigmaSet> {
        self.sigmas.get(alpha)
    }

    pub fn sigmas(&self) -> &BTreeMap<MultiIndex, SigmaSet> {
        &self.sigmas
    }

    /// The branch family of this variant (`I` for X and T, `J` for Y).
    pub fn family(&self) -> Vec<MultiIndex> {
        let kind = match self.variant {
            Variant::X | Variant::T => FamilyKind::I,
            Variant::Y => FamilyKind::J,
        };
        gen_family(self.n(), self.k, kind).expect("validated at construction")
    }

    /// The same factors viewed as a plain `X` cross.
    pub fn as_x(&self) -> CrossSpec {
        CrossSpec {
            pairs: self.pairs.clone(),
            k: self.k,
            variant: Variant::X,
            sigmas: BTreeMap::new(),
        }
    }

    /// Same factors with a different variant and sigma table.
    pub fn with_variant(
        &self,
        variant: Variant,
        sigmas: BTreeMap<MultiIndex, SigmaSet>,
    ) -> Result<CrossSpec> {
        CrossSpec::new(self.pairs.clone(), self.k, variant, sigmas)
    }

    /// Sub-cross over a subset of factors.
    pub(crate) fn restrict(&self, keep: &[usize], k: usize) -> Result<CrossSpec> {
        let pairs = keep.iter().map(|&j| self.pairs[j].clone()).collect();
        CrossSpec::plain(pairs, k)
    }

    pub(crate) fn ambient_check(&self, z: &Point) -> Result<()> {
        if z.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: z.len() });
        }
        for j in 0..self.n() {
            if !self.pairs[j].domain().contains(z.coord(j)) {
                return Err(Error::OutsideAmbient { index: j });
            }
        }
        Ok(())
    }
}

/// Why a branch did not witness membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockReason {
    /// Some `α_j = 0` coordinate is not in `A_j`.
    ACoordinateMiss,
    /// The A-side projection lies in `Σ_α`.
    SigmaHit,
}

/// Outcome of a cross membership query: the witnessing branches and the
/// blocked ones with reasons.
#[derive(Clone, Debug)]
pub struct MembershipReport {
    pub member: bool,
    pub witnesses: Vec<MultiIndex>,
    pub blocked: Vec<(MultiIndex, BlockReason)>,
}

/// Decides membership of `z` in the cross, enumerating every branch of the
/// variant's family. Points outside the ambient product are rejected.
pub fn in_cross(spec: &CrossSpec, z: &Point) -> Result<MembershipReport> {
    spec.ambient_check(z)?;
    let mut witnesses = Vec::new();
    let mut blocked = Vec::new();
    for alpha in spec.family() {
        let coords_ok =
            (0..spec.n()).all(|j| alpha.bit(j) || spec.pairs[j].base_contains(z.coord(j)));
        if !coords_ok {
            blocked.push((alpha, BlockReason::ACoordinateMiss));
            continue;
        }
        if let Some(sigma) = spec.sigma(&alpha) {
            let z_alpha = project(z, &alpha, Side::Zero)?;
            if sigma.contains(&z_alpha) {
                blocked.push((alpha, BlockReason::SigmaHit));
                continue;
            }
        }
        witnesses.push(alpha);
    }
    Ok(MembershipReport { member: !witnesses.is_empty(), witnesses, blocked })
}

/// Membership in the center `c(W_{N,k}) = W_{N,k} ∩ (A_1 × … × A_N)`.
pub fn in_center(spec: &CrossSpec, z: &Point) -> bool {
    if z.len() != spec.n() {
        return false;
    }
    let all_in_a = (0..spec.n()).all(|j| spec.pairs[j].base_contains(z.coord(j)));
    if !all_in_a {
        return false;
    }
    matches!(in_cross(spec, z), Ok(r) if r.member)
}

/// Checks the decomposition `X_{N,k} = X(X_{N-1,k-1}, A_N; X_{N-1,k}, D_N)`
/// at a point, returning (left membership, right membership). The two sides
/// agree for every input.
pub fn decompose_check(spec: &CrossSpec, z: &Point) -> Result<(bool, bool)> {
    if spec.variant() != Variant::X {
        return Err(Error::InvalidInput("decomposition check applies to the X variant".into()));
    }
    let n = spec.n();
    let k = spec.k();
    if !(n > 2 && k >= 2 && k <= n - 1) {
        return Err(Error::BadOrder(format!(
            "decomposition needs N > 2 and 2 <= k <= N-1, got N = {n}, k = {k}"
        )));
    }
    spec.ambient_check(z)?;
    let lhs = in_cross(spec, z)?.member;

    let head: Vec<usize> = (0..n - 1).collect();
    let head_point = Point::new(z.coords()[..n - 1].to_vec())?;
    let sub_lower = spec.restrict(&head, k - 1)?;
    let sub_same = spec.restrict(&head, k)?;
    let z_last = z.coord(n - 1);
    let rhs = in_cross(&sub_lower, &head_point)?.member
        || (in_cross(&sub_same, &head_point)?.member && spec.pair(n - 1).base_contains(z_last));
    Ok((lhs, rhs))
}

/// A polyline from `z` to the center, every vertex and segment inside the
/// cross.
///
/// The walk uses the lexicographically first witness `α`: first all its
/// D-coordinates slide to the factor anchors simultaneously (staying in
/// `X_α`), landing in the center; remaining coordinates then move one at a
/// time, each step witnessed by the first branch taking that slot as a
/// D-slot, so union bases with disconnected pieces are handled too.
pub fn path_to_center(spec: &CrossSpec, z: &Point) -> Result<Vec<Point>> {
    if spec.variant() != Variant::X {
        return Err(Error::InvalidInput("paths are built for the X variant".into()));
    }
    let report = in_cross(spec, z)?;
    if !report.member {
        return Err(Error::NotMember);
    }
    if in_center(spec, z) {
        return Ok(vec![z.clone()]);
    }
    let witness = report.witnesses[0].clone();
    let n = spec.n();
    let anchors: Vec<Complex64> = spec.pairs().iter().map(|p| p.anchor()).collect();

    let mut path = vec![z.clone()];
    let mut current = z.coords().to_vec();
    for j in 0..n {
        if witness.bit(j) {
            current[j] = anchors[j];
        }
    }
    path.push(Point::new(current.clone())?);

    for j in 0..n {
        if current[j] != anchors[j] {
            // slide coordinate j through D_j, witnessed by any branch with a
            // one in slot j; the other coordinates are anchored in A
            current[j] = anchors[j];
            path.push(Point::new(current.clone())?);
        }
    }
    Ok(path)
}

/// Samples every segment of a polyline and checks cross membership at each
/// sample; used by the connectivity tests.
pub fn path_in_cross(spec: &CrossSpec, path: &[Point], samples_per_segment: usize) -> Result<bool> {
    for pair in path.windows(2) {
        for s in 0..=samples_per_segment {
            let t = s as f64 / samples_per_segment as f64;
            let coords = pair[0]
                .coords()
                .iter()
                .zip(pair[1].coords())
                .map(|(&a, &b)| a + t * (b - a))
                .collect();
            let pt = Point::new(coords)?;
            if !in_cross(spec, &pt)?.member {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_pair, BaseSet, PlanarDomain};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn paper_pairs(n: usize) -> Vec<PairAD> {
        (0..n)
            .map(|_| {
                make_pair(BaseSet::interval(-1.0, 1.0).unwrap(), PlanarDomain::unit()).unwrap()
            })
            .collect()
    }

    fn paper_spec(n: usize, k: usize) -> CrossSpec {
        CrossSpec::plain(paper_pairs(n), k).unwrap()
    }

    #[test]
    fn family_i_for_3_2() {
        let fam = gen_family(3, 2, FamilyKind::I).unwrap();
        let strings: Vec<String> = fam.iter().map(|a| a.to_bitstring()).collect();
        assert_eq!(strings, vec!["011", "101", "110"]);
    }

    #[test]
    fn family_j_counts() {
        assert_eq!(gen_family(3, 2, FamilyKind::J).unwrap().len(), 6);
        assert_eq!(gen_family(2, 2, FamilyKind::I).unwrap().len(), 1);
        assert!(matches!(gen_family(3, 0, FamilyKind::I), Err(Error::BadOrder(_))));
        assert!(matches!(gen_family(3, 4, FamilyKind::J), Err(Error::BadOrder(_))));
    }

    #[test]
    fn family_sizes_are_binomials() {
        fn binom(n: usize, k: usize) -> usize {
            (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
        }
        for n in 2..=10 {
            for k in 1..=n {
                assert_eq!(gen_family(n, k, FamilyKind::I).unwrap().len(), binom(n, k));
                let j: usize = (1..=k).map(|m| binom(n, m)).sum();
                assert_eq!(gen_family(n, k, FamilyKind::J).unwrap().len(), j);
            }
        }
    }

    #[test]
    fn merge_places_variables() {
        let a = MultiIndex::from_bitstring("011").unwrap();
        let m = merge(&a, &[c(9.0, 0.0)], &[c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert_eq!(m.coords(), &[c(9.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let a = MultiIndex::from_bitstring("101").unwrap();
        let m = merge(&a, &[c(9.0, 0.0)], &[c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert_eq!(m.coords(), &[c(1.0, 0.0), c(9.0, 0.0), c(2.0, 0.0)]);
        assert!(matches!(
            merge(&a, &[], &[c(1.0, 0.0), c(2.0, 0.0)]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn project_sides() {
        let a = MultiIndex::from_bitstring("011").unwrap();
        let z = Point::new(vec![c(9.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert_eq!(project(&z, &a, Side::Zero).unwrap(), vec![c(9.0, 0.0)]);
        assert_eq!(project(&z, &a, Side::One).unwrap(), vec![c(1.0, 0.0), c(2.0, 0.0)]);
        let zeros = MultiIndex::from_bitstring("000").unwrap();
        assert!(project(&z, &zeros, Side::One).unwrap().is_empty());
    }

    #[test]
    fn merge_project_round_trip() {
        let z = Point::new(vec![c(0.1, 0.2), c(-0.3, 0.4), c(0.5, -0.6), c(0.0, 0.0)]).unwrap();
        for alpha in gen_family(4, 2, FamilyKind::J).unwrap() {
            let c0 = project(&z, &alpha, Side::Zero).unwrap();
            let c1 = project(&z, &alpha, Side::One).unwrap();
            assert_eq!(merge(&alpha, &c0, &c1).unwrap(), z);
        }
    }

    #[test]
    fn paper_point_is_member_via_011() {
        let spec = paper_spec(3, 2);
        let w = c(0.0, 1.0 / 3.0_f64.sqrt());
        let z = Point::new(vec![c(0.0, 0.0), w, w]).unwrap();
        let r = in_cross(&spec, &z).unwrap();
        assert!(r.member);
        assert_eq!(r.witnesses.len(), 1);
        assert_eq!(r.witnesses[0].to_bitstring(), "011");
    }

    #[test]
    fn center_point_witnesses_everything() {
        let spec = paper_spec(3, 2);
        let z = Point::new(vec![c(0.0, 0.0); 3]).unwrap();
        let r = in_cross(&spec, &z).unwrap();
        assert!(r.member);
        assert_eq!(r.witnesses.len(), 3);
        assert!(in_center(&spec, &z));
    }

    #[test]
    fn all_nonreal_point_is_not_member() {
        let spec = paper_spec(3, 2);
        let w = c(0.0, 1.0 / 3.0_f64.sqrt());
        let z = Point::new(vec![w, w, w]).unwrap();
        let r = in_cross(&spec, &z).unwrap();
        assert!(!r.member);
        assert_eq!(r.blocked.len(), 3);
    }

    #[test]
    fn outside_ambient_is_rejected() {
        let spec = paper_spec(3, 2);
        let z = Point::new(vec![c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(in_cross(&spec, &z), Err(Error::OutsideAmbient { index: 1 })));
    }

    #[test]
    fn center_needs_cross_membership() {
        let spec = paper_spec(3, 2);
        let w = c(0.0, 1.0 / 3.0_f64.sqrt());
        assert!(!in_center(&spec, &Point::new(vec![c(0.0, 0.0), w, w]).unwrap()));
    }

    #[test]
    fn decompose_agrees_on_paper_point() {
        let spec = paper_spec(3, 2);
        let w = c(0.0, 1.0 / 3.0_f64.sqrt());
        let z = Point::new(vec![c(0.0, 0.0), w, w]).unwrap();
        assert_eq!(decompose_check(&spec, &z).unwrap(), (true, true));
        let center = Point::new(vec![c(0.0, 0.0); 3]).unwrap();
        assert_eq!(decompose_check(&spec, &center).unwrap(), (true, true));
        let non = Point::new(vec![w, w, w]).unwrap();
        assert_eq!(decompose_check(&spec, &non).unwrap(), (false, false));
    }

    #[test]
    fn path_from_member_reaches_center() {
        let spec = paper_spec(3, 2);
        let w = c(0.0, 1.0 / 3.0_f64.sqrt());
        let z = Point::new(vec![c(0.3, 0.0), w, w]).unwrap();
        let path = path_to_center(&spec, &z).unwrap();
        assert!(path.len() >= 2);
        assert!(path_in_cross(&spec, &path, 64).unwrap());
        assert!(in_center(&spec, path.last().unwrap()));
    }

    #[test]
    fn path_from_center_is_single_vertex() {
        let spec = paper_spec(3, 2);
        let z = Point::new(vec![c(0.2, 0.0), c(-0.4, 0.0), c(0.9, 0.0)]).unwrap();
        let path = path_to_center(&spec, &z).unwrap();
        assert_eq!(path.len(), 1);
    }

    #[test]
    fn path_uses_first_witness() {
        let spec = paper_spec(3, 2);
        // first two coordinates real: both (0,1,1) and (1,0,1) witness
        let w = c(0.0, 0.5);
        let z = Point::new(vec![c(0.3, 0.0), c(0.4, 0.0), w]).unwrap();
        let r = in_cross(&spec, &z).unwrap();
        assert!(r.witnesses.len() >= 2);
        let path = path_to_center(&spec, &z).unwrap();
        // first witness is 011: slots 2 and 3 move first, slot 1 keeps its
        // value in the second vertex
        assert_eq!(path[1].coord(0), c(0.3, 0.0));
        assert_eq!(path[1].coord(1), c(0.0, 0.0));
        assert_eq!(path[1].coord(2), c(0.0, 0.0));
    }

    #[test]
    fn nonmember_has_no_path() {
        let spec = paper_spec(3, 2);
        let w = c(0.0, 0.5);
        let z = Point::new(vec![w, w, w]).unwrap();
        assert!(matches!(path_to_center(&spec, &z), Err(Error::NotMember)));
    }
}
