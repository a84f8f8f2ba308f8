//! The relative extremal function `h_{A,D}` for catalog pairs.
//!
//! For a planar disc `D` and a compact regular base `A`, the pointwise
//! supremum of plurisubharmonic competitors `u <= 1`, `u|_A <= 0` reduces to
//! the harmonic function on `D \ A` with boundary values `1` on `∂D` and `0`
//! on `∂A`. Two evaluation paths are provided and cross-checked against each
//! other:
//!
//! * closed forms for the catalog (the full real diameter of a disc, and a
//!   concentric closed subdisc),
//! * a finite-difference relaxation solver (red-black SOR sweeps) with
//!   Dirichlet data `{0 on A-nodes, 1 on boundary nodes}`.
//!
//! Node clamping is decided by exact set membership of grid nodes; sub-node
//! geometry of `A` is not anti-aliased.

use std::f64::consts::{FRAC_2_PI, PI};
use std::io::{BufRead, BufReader, Read, Write};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::geometry::{BaseSet, PairAD};
use crate::par::{self, Parallelism};
use crate::{Error, Result};

/// Evaluation path selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Analytic catalog value; errors with `NoClosedForm` outside the catalog.
    ClosedForm,
    /// Bilinear interpolation on a solved grid field.
    Field,
    /// Closed form when available, grid field otherwise.
    #[default]
    Auto,
}

/// Which path produced a value (hull queries use this to decide whether a
/// strict inequality can be certified).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalPath {
    Closed,
    Field,
}

/// Closed-form value of `h_{A,D}` for catalog pairs.
///
/// Supported: `A` the full real diameter of `D` (up to transport by a disc
/// automorphism) with `h = (2/π)|Arg((1+ζ)/(1-ζ))|` in normalized
/// coordinates, and `A` a concentric closed subdisc of radius `r` with the
/// radial value `log(|ζ|/ρ)/log(1/ρ)`, `ρ = r/R`. The subdisc formula is
/// admitted to the catalog only because the grid-solver acceptance test
/// validates it.
pub fn h_closed_form(p: &PairAD, zeta: Complex64) -> Result<f64> {
    if !p.domain().contains(zeta) {
        return Err(Error::OutsideDomain);
    }
    let w = {
        let w = p.domain().normalize(zeta);
        match p.transport() {
            Some(t) => t.inverse().apply(w),
            None => w,
        }
    };
    match p.base() {
        BaseSet::Interval { a, b } => {
            let c = p.domain().center();
            let r = p.domain().radius();
            let full_diameter = c.im == 0.0 && *a == c.re - r && *b == c.re + r;
            if !full_diameter {
                return Err(Error::NoClosedForm);
            }
            let one = Complex64::new(1.0, 0.0);
            let value = FRAC_2_PI * ((one + w) / (one - w)).arg().abs();
            Ok(value.clamp(0.0, 1.0))
        }
        BaseSet::Subdisc { center, radius } => {
            if p.transport().is_some() || *center != p.domain().center() {
                return Err(Error::NoClosedForm);
            }
            let rho = radius / p.domain().radius();
            let t = w.norm();
            if t <= rho {
                return Ok(0.0);
            }
            Ok(((t / rho).ln() / (1.0 / rho).ln()).clamp(0.0, 1.0))
        }
        BaseSet::Union(_) => Err(Error::NoClosedForm),
    }
}

/// Relative extremal function of a product base in a product domain: the
/// maximum of the factor values.
pub fn h_product_max(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)))
}

/// Dispatches between the closed form and a solved field.
pub fn h_eval(
    p: &PairAD,
    zeta: Complex64,
    strategy: Strategy,
    field: Option<&ExtremalField>,
) -> Result<f64> {
    match strategy {
        Strategy::ClosedForm => h_closed_form(p, zeta),
        Strategy::Field => match field {
            Some(f) => f.interpolate(zeta),
            None => Err(Error::InvalidInput("field strategy requires a solved field".into())),
        },
        Strategy::Auto => match h_closed_form(p, zeta) {
            Err(Error::NoClosedForm) => match field {
                Some(f) => f.interpolate(zeta),
                None => Err(Error::NoClosedForm),
            },
            other => other,
        },
    }
}

/// Options for the relaxation solver.
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_sweeps: usize,
    pub parallelism: Parallelism,
    /// Relaxation factor; `None` picks the SOR-optimal value for the grid.
    /// `Some(1.0)` gives plain Gauss-Seidel, whose iterates decrease
    /// monotonically from the all-ones start.
    pub omega: Option<f64>,
    /// Extra bounding-box margin as a fraction of the domain radius. `None`
    /// offsets the lattice so the circle's axis crossings fall midway between
    /// nodes, which keeps slit-tip corners away from lattice nodes.
    pub box_pad: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_sweeps: 1_000_000,
            parallelism: Parallelism::default(),
            omega: None,
            box_pad: None,
        }
    }
}

/// Default grid edge used by evaluators when none is specified.
pub const DEFAULT_GRID: usize = 513;

/// How a field was produced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldSource {
    Solved { tol: f64, residual: f64, sweeps: usize },
    Imported,
}

/// A sampled numerical representative of `h_{A,D}` on a rectangular grid
/// covering the domain's bounding square. Values are in `[0,1]`, exactly `0`
/// on A-nodes and exactly `1` on nodes outside the open domain.
#[derive(Clone, Debug)]
pub struct ExtremalField {
    pair: PairAD,
    nx: usize,
    ny: usize,
    x0: f64,
    y0: f64,
    dx: f64,
    dy: f64,
    values: Vec<f64>,
    source: FieldSource,
}

impl ExtremalField {
    pub fn pair(&self) -> &PairAD {
        &self.pair
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn spacing(&self) -> (f64, f64) {
        (self.dx, self.dy)
    }

    pub fn source(&self) -> FieldSource {
        self.source
    }

    pub fn node(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(self.x0 + ix as f64 * self.dx, self.y0 + iy as f64 * self.dy)
    }

    pub fn value_at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Bilinear interpolation, clamped to `[0,1]`.
    pub fn interpolate(&self, zeta: Complex64) -> Result<f64> {
        if !self.pair.domain().contains(zeta) {
            return Err(Error::OutsideDomain);
        }
        let fx = ((zeta.re - self.x0) / self.dx).clamp(0.0, (self.nx - 1) as f64);
        let fy = ((zeta.im - self.y0) / self.dy).clamp(0.0, (self.ny - 1) as f64);
        let ix = (fx.floor() as usize).min(self.nx - 2);
        let iy = (fy.floor() as usize).min(self.ny - 2);
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let v00 = self.value_at(ix, iy);
        let v10 = self.value_at(ix + 1, iy);
        let v01 = self.value_at(ix, iy + 1);
        let v11 = self.value_at(ix + 1, iy + 1);
        let v = v00 * (1.0 - tx) * (1.0 - ty)
            + v10 * tx * (1.0 - ty)
            + v01 * (1.0 - tx) * ty
            + v11 * tx * ty;
        Ok(v.clamp(0.0, 1.0))
    }

    /// Writes the field as `x,y,h` rows (row-major, 17 significant digits).
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,y,h")?;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let z = self.node(ix, iy);
                writeln!(out, "{:.16e},{:.16e},{:.16e}", z.re, z.im, self.value_at(ix, iy))?;
            }
        }
        Ok(())
    }

    /// Reads a field written by [`write_csv`](Self::write_csv). The pair is
    /// supplied by the caller; the lattice is inferred from the rows.
    pub fn read_csv<R: Read>(pair: PairAD, input: R) -> Result<Self> {
        let reader = BufReader::new(input);
        let mut lines = reader.lines();
        match lines.next() {
            Some(Ok(h)) if h.trim() == "x,y,h" => {}
            _ => return Err(Error::InvalidInput("field CSV must start with header x,y,h".into())),
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut vs = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let mut next = |what: &str| -> Result<f64> {
                parts
                    .next()
                    .ok_or_else(|| Error::InvalidInput(format!("missing {what} column")))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("bad {what} value: {e}")))
            };
            xs.push(next("x")?);
            ys.push(next("y")?);
            vs.push(next("h")?);
        }
        if vs.is_empty() {
            return Err(Error::InvalidInput("field CSV has no rows".into()));
        }
        let nx = ys.iter().take_while(|&&y| y == ys[0]).count();
        if nx < 2 || vs.len() % nx != 0 {
            return Err(Error::InvalidInput("field CSV rows do not form a lattice".into()));
        }
        let ny = vs.len() / nx;
        if ny < 2 {
            return Err(Error::InvalidInput("field CSV needs at least two rows".into()));
        }
        let dx = xs[1] - xs[0];
        let dy = ys[nx] - ys[0];
        if !(dx > 0.0 && dy > 0.0) {
            return Err(Error::InvalidInput("field CSV lattice spacing must be positive".into()));
        }
        Ok(Self {
            pair,
            nx,
            ny,
            x0: xs[0],
            y0: ys[0],
            dx,
            dy,
            values: vs,
            source: FieldSource::Imported,
        })
    }
}

/// Node classification for the Dirichlet problem.
#[derive(Clone, Copy, PartialEq, Eq)]
enum NodeKind {
    Free,
    BaseZero,
    BoundaryOne,
}

/// Shortley-Weller stencil for a free node with at least one arm cut by the
/// true boundary (`∂D` toward value 1, `∂A` toward value 0), or with a
/// corner-defect source. `w` are the operator weights for the W/E/S/N arms,
/// `c0` the diagonal; a set bit in `fixed_mask` means the arm ends on the
/// boundary with Dirichlet value `g[arm]` instead of reading the neighbor
/// node. `rhs` carries the discrete defect of the slit-tip wedge functions
/// (zero away from corners).
#[derive(Clone, Copy, Debug)]
struct SwStencil {
    w: [f64; 4],
    g: [f64; 4],
    c0: f64,
    rhs: f64,
    fixed_mask: u8,
}

/// A slit tip sitting on the boundary circle. The leading behavior of the
/// solution there is the wedge angle `(2/π)|φ|` measured from the inward
/// slit direction; the 5-point operator has an h-independent defect on that
/// function, which is subtracted as a local source term.
#[derive(Clone, Copy, Debug)]
struct SlitCorner {
    pos: Complex64,
    /// +1 when the slit extends toward +x from the corner, -1 toward -x
    inward: f64,
}

impl SlitCorner {
    fn angle_fn(&self, z: Complex64) -> f64 {
        FRAC_2_PI * (z.im.atan2((z.re - self.pos.re) * self.inward)).abs()
    }
}

fn slit_corners(p: &PairAD) -> Vec<SlitCorner> {
    let mut corners = Vec::new();
    let c = p.domain().center();
    let r = p.domain().radius();
    if p.transport().is_some() {
        return corners;
    }
    let mut visit = |piece: &BaseSet| {
        if let BaseSet::Interval { a, b } = piece {
            for (e, inward) in [(*a, 1.0), (*b, -1.0)] {
                let d = Complex64::new(e, 0.0) - c;
                if d.norm_sqr() >= r * r * (1.0 - 1e-12) {
                    corners.push(SlitCorner { pos: Complex64::new(e, 0.0), inward });
                }
            }
        }
    };
    match p.base() {
        BaseSet::Union(pieces) => pieces.iter().for_each(|p| visit(p)),
        single => visit(single),
    }
    corners
}

/// Checkerboard-split buffers. Nodes of color `(ix+iy)&1` are stored in one
/// array per color, `W = (nx+1)/2` slots per row, slot `ix >> 1`. A red
/// half-sweep writes only red entries and reads only black ones (the 5-point
/// stencil is bipartite), so the row-parallel update is race-free and
/// bit-deterministic under any scheduling.
struct ColorGrid {
    nx: usize,
    ny: usize,
    w: usize,
    values: [Vec<f64>; 2],
    /// 0 = fixed, 1 = regular free node, 2 = boundary-fitted free node
    node: [Vec<u8>; 2],
    /// index into `stencils` for boundary-fitted nodes
    sw_idx: [Vec<u32>; 2],
    stencils: Vec<SwStencil>,
    /// regular-arm weights 1/dx^2, 1/dy^2 and diagonal
    ax: f64,
    ay: f64,
    c0_reg: f64,
}

impl ColorGrid {
    fn idx(&self, ix: usize, iy: usize) -> (usize, usize) {
        (((ix + iy) & 1), iy * self.w + (ix >> 1))
    }

    fn half_sweep(&mut self, color: usize, omega: f64, parallelism: Parallelism) {
        let (nx, w) = (self.nx, self.w);
        let (ax, ay, c0_reg) = (self.ax, self.ay, self.c0_reg);
        let (write, read) = {
            let (a, b) = self.values.split_at_mut(1);
            if color == 0 { (&mut a[0], &b[0][..]) } else { (&mut b[0], &a[0][..]) }
        };
        let node = &self.node[color];
        let sw_idx = &self.sw_idx[color];
        let stencils = &self.stencils;
        let ny = self.ny;
        par::for_each_chunk_mut(parallelism, write, w, |iy, row| {
            if iy == 0 || iy + 1 >= ny {
                return;
            }
            let first = if (iy & 1) == color { 2 } else { 1 };
            let mut ix = first;
            while ix + 1 < nx {
                let j = ix >> 1;
                let flat = iy * w + j;
                match node[flat] {
                    1 => {
                        let sum = ax
                            * (read[iy * w + ((ix - 1) >> 1)] + read[iy * w + ((ix + 1) >> 1)])
                            + ay * (read[(iy - 1) * w + j] + read[(iy + 1) * w + j]);
                        row[j] = (1.0 - omega) * row[j] + omega * sum / c0_reg;
                    }
                    2 => {
                        let st = &stencils[sw_idx[flat] as usize];
                        let nbr = [
                            read[iy * w + ((ix - 1) >> 1)],
                            read[iy * w + ((ix + 1) >> 1)],
                            read[(iy - 1) * w + j],
                            read[(iy + 1) * w + j],
                        ];
                        let mut sum = -st.rhs;
                        for arm in 0..4 {
                            let v = if st.fixed_mask & (1 << arm) != 0 { st.g[arm] } else { nbr[arm] };
                            sum += st.w[arm] * v;
                        }
                        row[j] = (1.0 - omega) * row[j] + omega * sum / st.c0;
                    }
                    _ => {}
                }
                ix += 2;
            }
        });
    }

    /// Max over free nodes of the scaled residual `4 |Σ w v - c0 u| / c0`,
    /// which reduces to `|u_E + u_W + u_N + u_S - 4 u|` on regular square
    /// arms.
    fn residual(&self, parallelism: Parallelism) -> f64 {
        let (nx, w) = (self.nx, self.w);
        let row_max = |color: usize, iy: usize| -> f64 {
            if iy == 0 || iy + 1 >= self.ny {
                return 0.0;
            }
            let own = &self.values[color];
            let other = &self.values[1 - color];
            let node = &self.node[color];
            let sw_idx = &self.sw_idx[color];
            let mut m = 0.0_f64;
            let first = if (iy & 1) == color { 2 } else { 1 };
            let mut ix = first;
            while ix + 1 < nx {
                let j = ix >> 1;
                let flat = iy * w + j;
                if node[flat] != 0 {
                    let nbr = [
                        other[iy * w + ((ix - 1) >> 1)],
                        other[iy * w + ((ix + 1) >> 1)],
                        other[(iy - 1) * w + j],
                        other[(iy + 1) * w + j],
                    ];
                    let (sum, c0) = if node[flat] == 1 {
                        (self.ax * (nbr[0] + nbr[1]) + self.ay * (nbr[2] + nbr[3]), self.c0_reg)
                    } else {
                        let st = &self.stencils[sw_idx[flat] as usize];
                        let mut s = -st.rhs;
                        for arm in 0..4 {
                            let v = if st.fixed_mask & (1 << arm) != 0 { st.g[arm] } else { nbr[arm] };
                            s += st.w[arm] * v;
                        }
                        (s, st.c0)
                    };
                    m = m.max(4.0 * (sum - c0 * own[flat]).abs() / c0);
                }
                ix += 2;
            }
            m
        };
        let m0 = par::max_indexed(parallelism, self.ny, |iy| row_max(0, iy));
        let m1 = par::max_indexed(parallelism, self.ny, |iy| row_max(1, iy));
        m0.max(m1).max(0.0)
    }
}

/// Smallest `t` in `(0, 1]` at which `z + t·step` crosses the circle
/// `|p - c| = r`, or `None` if the segment misses it.
fn circle_crossing(z: Complex64, step: Complex64, c: Complex64, r: f64) -> Option<f64> {
    let d = z - c;
    let a = step.norm_sqr();
    let b = 2.0 * (d.re * step.re + d.im * step.im);
    let e = d.norm_sqr() - r * r;
    let disc = b * b - 4.0 * a * e;
    if disc < 0.0 || a == 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t1 = (-b - sq) / (2.0 * a);
    let t2 = (-b + sq) / (2.0 * a);
    let eps = 1e-12;
    if t1 > eps && t1 <= 1.0 + eps {
        Some(t1.min(1.0))
    } else if t2 > eps && t2 <= 1.0 + eps {
        Some(t2.min(1.0))
    } else {
        None
    }
}

/// Smallest `t` in `(0, 1]` at which `z + t·step` enters the base piece.
fn piece_entry(z: Complex64, step: Complex64, piece: &BaseSet) -> Option<f64> {
    match piece {
        BaseSet::Interval { a, b } => {
            if step.im != 0.0 {
                // crossing the real axis
                let t = -z.im / step.im;
                if t > 1e-12 && t <= 1.0 + 1e-12 {
                    let x = z.re + t * step.re;
                    if *a <= x && x <= *b {
                        return Some(t.min(1.0));
                    }
                }
                None
            } else if z.im == 0.0 {
                // sliding along the axis toward an endpoint
                let toward = if step.re > 0.0 { *a } else { *b };
                let t = (toward - z.re) / step.re;
                if t > 1e-12 && t <= 1.0 + 1e-12 {
                    Some(t.min(1.0))
                } else {
                    None
                }
            } else {
                None
            }
        }
        BaseSet::Subdisc { center, radius } => circle_crossing(z, step, *center, *radius),
        BaseSet::Union(pieces) => pieces
            .iter()
            .filter_map(|p| piece_entry(z, step, p))
            .min_by(|a, b| a.partial_cmp(b).unwrap()),
    }
}

/// Solves the Dirichlet problem for `h_{A,D}` on an `nx × ny` grid over the
/// domain's bounding square.
///
/// Red-black SOR from the all-ones initial guess (plain Gauss-Seidel sweeps
/// decrease monotonically from this supersolution; SOR accelerates the same
/// iteration). Terminates when the max algebraic 5-point residual over free
/// nodes drops to `tol`. Deterministic for fixed inputs, including under the
/// rayon path.
pub fn h_grid_solve(p: &PairAD, nx: usize, ny: usize, tol: f64) -> Result<ExtremalField> {
    h_grid_solve_opts(p, nx, ny, SolveOptions { tol, ..SolveOptions::default() })
}

pub fn h_grid_solve_opts(
    p: &PairAD,
    nx: usize,
    ny: usize,
    opts: SolveOptions,
) -> Result<ExtremalField> {
    if nx < 17 || ny < 17 {
        return Err(Error::InvalidGrid(format!("grid {nx}x{ny} below the 17-node minimum")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidGrid("tolerance must be positive".into()));
    }
    if p.base().has_interval_piece() && p.transport().is_some() {
        return Err(Error::InvalidGrid(
            "transported interval bases have no grid nodes; evaluate through the closed form"
                .into(),
        ));
    }
    let c = p.domain().center();
    let r = p.domain().radius();
    let pad = |n: usize| -> f64 {
        match opts.box_pad {
            Some(f) => f,
            // half-integer node offset for |x - cx| = r: H = r (n-1)/(n-2)
            // puts the circle's axis crossings midway between lattice nodes
            None => 1.0 / (n as f64 - 2.0),
        }
    };
    let hx = r * (1.0 + pad(nx));
    let hy = r * (1.0 + pad(ny));
    let dx = 2.0 * hx / (nx - 1) as f64;
    let dy = 2.0 * hy / (ny - 1) as f64;
    // anchor the lattice at the center so that for odd grid sizes the axis
    // rows pass through it exactly (interval bases live on the y row)
    let x0 = c.re - 0.5 * (nx - 1) as f64 * dx;
    let y0 = c.im - 0.5 * (ny - 1) as f64 * dy;

    let w = (nx + 1) / 2;
    let ax = 1.0 / (dx * dx);
    let ay = 1.0 / (dy * dy);
    let mut kinds = vec![NodeKind::BoundaryOne; nx * ny];
    let mut grid = ColorGrid {
        nx,
        ny,
        w,
        values: [vec![0.0; ny * w], vec![0.0; ny * w]],
        node: [vec![0u8; ny * w], vec![0u8; ny * w]],
        sw_idx: [vec![u32::MAX; ny * w], vec![u32::MAX; ny * w]],
        stencils: Vec::new(),
        ax,
        ay,
        c0_reg: 2.0 * (ax + ay),
    };
    let mut base_nodes = 0usize;
    let mut free_nodes = 0usize;
    for iy in 0..ny {
        for ix in 0..nx {
            let z = Complex64::new(x0 + ix as f64 * dx, y0 + iy as f64 * dy);
            let kind = if !p.domain().contains(z) {
                NodeKind::BoundaryOne
            } else if p.base_contains(z) {
                base_nodes += 1;
                NodeKind::BaseZero
            } else {
                free_nodes += 1;
                NodeKind::Free
            };
            kinds[iy * nx + ix] = kind;
            let (color, idx) = grid.idx(ix, iy);
            match kind {
                NodeKind::BoundaryOne => grid.values[color][idx] = 1.0,
                NodeKind::BaseZero => grid.values[color][idx] = 0.0,
                NodeKind::Free => {
                    grid.values[color][idx] = 1.0;
                    grid.node[color][idx] = 1;
                }
            }
        }
    }
    if base_nodes == 0 {
        return Err(Error::InvalidGrid(
            "no grid node lies in the base set; refine the grid".into(),
        ));
    }

    // boundary-fitted arms: where an arm of a free node ends on a fixed
    // neighbor, place the Dirichlet value at the true crossing of ∂D (value 1)
    // or ∂A (value 0) instead of the neighbor node. Near slit tips sitting on
    // the circle the operator additionally gets the discrete defect of the
    // local wedge angle as a source, which removes the h-independent corner
    // error of the 5-point stencil.
    let arm_steps = [
        Complex64::new(-dx, 0.0),
        Complex64::new(dx, 0.0),
        Complex64::new(0.0, -dy),
        Complex64::new(0.0, dy),
    ];
    let corners = slit_corners(p);
    let corner_window = 32.0 * dx.max(dy);
    const THETA_MIN: f64 = 1e-3;
    for iy in 1..ny - 1 {
        for ix in 1..nx - 1 {
            if kinds[iy * nx + ix] != NodeKind::Free {
                continue;
            }
            let z = Complex64::new(x0 + ix as f64 * dx, y0 + iy as f64 * dy);
            let nbr_kinds = [
                kinds[iy * nx + ix - 1],
                kinds[iy * nx + ix + 1],
                kinds[(iy - 1) * nx + ix],
                kinds[(iy + 1) * nx + ix],
            ];
            let mut theta = [1.0_f64; 4];
            let mut g = [0.0_f64; 4];
            let mut fixed_mask = 0u8;
            for arm in 0..4 {
                match nbr_kinds[arm] {
                    NodeKind::Free => {}
                    NodeKind::BoundaryOne => {
                        let t = circle_crossing(z, arm_steps[arm], p.domain().center(), p.domain().radius())
                            .unwrap_or(1.0);
                        theta[arm] = t.max(THETA_MIN);
                        g[arm] = 1.0;
                        fixed_mask |= 1 << arm;
                    }
                    NodeKind::BaseZero => {
                        let t = piece_entry(z, arm_steps[arm], p.base()).unwrap_or(1.0);
                        theta[arm] = t.max(THETA_MIN);
                        g[arm] = 0.0;
                        fixed_mask |= 1 << arm;
                    }
                }
            }
            let (tw, te, ts, tn) = (theta[0], theta[1], theta[2], theta[3]);
            let weights = [
                2.0 * ax / (tw * (tw + te)),
                2.0 * ax / (te * (tw + te)),
                2.0 * ay / (ts * (ts + tn)),
                2.0 * ay / (tn * (ts + tn)),
            ];
            let c0 = 2.0 * ax / (tw * te) + 2.0 * ay / (ts * tn);
            let mut rhs = 0.0;
            for corner in &corners {
                if (z - corner.pos).norm() > corner_window {
                    continue;
                }
                let mut defect = -c0 * corner.angle_fn(z);
                for arm in 0..4 {
                    let p_arm = z + theta[arm] * arm_steps[arm];
                    defect += weights[arm] * corner.angle_fn(p_arm);
                }
                rhs += defect;
            }
            if fixed_mask == 0 && rhs == 0.0 {
                continue;
            }
            let (color, idx) = grid.idx(ix, iy);
            grid.node[color][idx] = 2;
            grid.sw_idx[color][idx] = grid.stencils.len() as u32;
            grid.stencils.push(SwStencil { w: weights, g, c0, rhs, fixed_mask });
        }
    }

    let n_edge = nx.max(ny) as f64 - 1.0;
    let omega = match opts.omega {
        Some(w) if w > 0.0 && w < 2.0 => w,
        Some(w) => return Err(Error::InvalidGrid(format!("relaxation factor {w} outside (0,2)"))),
        None => 2.0 / (1.0 + (PI / n_edge).sin()),
    };
    let check_every = 16;
    let mut sweeps = 0usize;
    let mut residual = if free_nodes == 0 { 0.0 } else { f64::INFINITY };
    while residual > opts.tol {
        if sweeps >= opts.max_sweeps {
            return Err(Error::NoConvergence { sweeps, tol: opts.tol, residual });
        }
        let batch = check_every.min(opts.max_sweeps - sweeps);
        for _ in 0..batch {
            grid.half_sweep(0, omega, opts.parallelism);
            grid.half_sweep(1, omega, opts.parallelism);
        }
        sweeps += batch;
        residual = grid.residual(opts.parallelism);
    }

    let mut values = vec![0.0; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let (color, idx) = grid.idx(ix, iy);
            let v = match kinds[iy * nx + ix] {
                NodeKind::BaseZero => 0.0,
                NodeKind::BoundaryOne => 1.0,
                NodeKind::Free => grid.values[color][idx].clamp(0.0, 1.0),
            };
            values[iy * nx + ix] = v;
        }
    }
    Ok(ExtremalField {
        pair: p.clone(),
        nx,
        ny,
        x0,
        y0,
        dx,
        dy,
        values,
        source: FieldSource::Solved { tol: opts.tol, residual, sweeps },
    })
}

/// Couples a pair with a strategy and a lazily solved field.
///
/// Finished fields are immutable and shared; evaluation is pure, so an
/// evaluator can be used concurrently.
#[derive(Debug)]
pub struct HEvaluator {
    pair: PairAD,
    strategy: Strategy,
    grid: usize,
    solve: SolveOptions,
    field: OnceLock<ExtremalField>,
}

impl HEvaluator {
    pub fn new(pair: PairAD, strategy: Strategy) -> Self {
        Self {
            pair,
            strategy,
            grid: DEFAULT_GRID,
            solve: SolveOptions::default(),
            field: OnceLock::new(),
        }
    }

    pub fn with_grid(mut self, grid: usize, solve: SolveOptions) -> Self {
        self.grid = grid;
        self.solve = solve;
        self
    }

    pub fn pair(&self) -> &PairAD {
        &self.pair
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    fn field(&self) -> Result<&ExtremalField> {
        if let Some(f) = self.field.get() {
            return Ok(f);
        }
        let solved = h_grid_solve_opts(&self.pair, self.grid, self.grid, self.solve)?;
        // a concurrent racer may have set it first; both solves are identical
        let _ = self.field.set(solved);
        Ok(self.field.get().expect("field just initialized"))
    }

    /// Value plus the path that produced it.
    pub fn value_with_path(&self, zeta: Complex64) -> Result<(f64, EvalPath)> {
        match self.strategy {
            Strategy::ClosedForm => Ok((h_closed_form(&self.pair, zeta)?, EvalPath::Closed)),
            Strategy::Field => {
                if !self.pair.domain().contains(zeta) {
                    return Err(Error::OutsideDomain);
                }
                Ok((self.field()?.interpolate(zeta)?, EvalPath::Field))
            }
            Strategy::Auto => match h_closed_form(&self.pair, zeta) {
                Err(Error::NoClosedForm) => Ok((self.field()?.interpolate(zeta)?, EvalPath::Field)),
                Ok(v) => Ok((v, EvalPath::Closed)),
                Err(e) => Err(e),
            },
        }
    }

    pub fn value(&self, zeta: Complex64) -> Result<f64> {
        self.value_with_path(zeta).map(|(v, _)| v)
    }
}
