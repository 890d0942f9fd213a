//! Lattice discretization of plane domains and scalar fields on them.
//!
//! A [`GridDomain`] is a boolean mask over a rectangle of nodes with spacing
//! `h`. Nodes are *interior* (solver unknowns), *boundary* (Dirichlet data)
//! or *exterior*. Domains loaded from a mask file classify nodes from the mask
//! alone: a mask node is interior exactly when its four lattice neighbours are
//! in the mask. Builtin shapes know their exact boundary curve; there the
//! interior is the set of nodes strictly inside the curve, the boundary nodes
//! form the one-node ring just outside it, and each interior-to-boundary edge
//! records the fraction of the edge at which the curve is crossed. The
//! Laplace stencil uses those fractions (Shortley–Weller), which keeps the
//! curved boundary second-order accurate.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Exterior,
    Interior,
    Boundary,
}

/// Lattice directions in stencil order: east, west, north, south.
pub const DIRECTIONS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Closed-form domains with exact boundary geometry, centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Disk { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    Square { side: f64 },
}

impl Shape {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Shape::Disk { radius } => radius > 0.0 && radius.is_finite(),
            Shape::Annulus { inner, outer } => inner > 0.0 && outer > inner && outer.is_finite(),
            Shape::Square { side } => side > 0.0 && side.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("degenerate shape {self}")))
        }
    }

    /// Distance to the boundary curve, positive inside.
    pub fn depth(&self, z: Complex64) -> f64 {
        match *self {
            Shape::Disk { radius } => radius - z.norm(),
            Shape::Annulus { inner, outer } => (outer - z.norm()).min(z.norm() - inner),
            Shape::Square { side } => {
                let half = side / 2.0;
                (half - z.re.abs()).min(half - z.im.abs())
            }
        }
    }

    fn extent(&self) -> f64 {
        match *self {
            Shape::Disk { radius } => radius,
            Shape::Annulus { outer, .. } => outer,
            Shape::Square { side } => side / 2.0,
        }
    }

    /// First parameter `t ∈ (0, 1]` at which the segment `from → to` leaves
    /// the shape, `from` being inside.
    pub fn exit_fraction(&self, from: Complex64, to: Complex64) -> f64 {
        let d = to - from;
        let a = d.norm_sqr();
        let b = (from * d.conj()).re;
        // Smallest root in (0, 1] of |from + t d|² = rho².
        let circle = |rho: f64| -> Option<f64> {
            let c = from.norm_sqr() - rho * rho;
            let disc = b * b - a * c;
            if disc < 0.0 {
                return None;
            }
            let s = disc.sqrt();
            [(-b - s) / a, (-b + s) / a]
                .into_iter()
                .filter(|&t| t > 0.0 && t <= 1.0)
                .reduce(f64::min)
        };
        let t = match *self {
            Shape::Disk { radius } => circle(radius),
            Shape::Annulus { inner, outer } => match (circle(inner), circle(outer)) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
            Shape::Square { side } => {
                let half = side / 2.0;
                let mut best: Option<f64> = None;
                for (p, q) in [(from.re, to.re), (from.im, to.im)] {
                    for wall in [half, -half] {
                        if (q - p).abs() > 0.0 {
                            let t = (wall - p) / (q - p);
                            if t > 0.0 && t <= 1.0 {
                                best = Some(best.map_or(t, |b: f64| b.min(t)));
                            }
                        }
                    }
                }
                best
            }
        };
        t.unwrap_or(1.0).clamp(f64::MIN_POSITIVE, 1.0)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Shape::Disk { radius } => write!(f, "disk(R={radius})"),
            Shape::Annulus { inner, outer } => write!(f, "annulus(r={inner},R={outer})"),
            Shape::Square { side } => write!(f, "square(L={side})"),
        }
    }
}

/// One arm of the Laplace stencil at an interior node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Link {
    /// Neighbouring interior node (by interior slot).
    Unknown { slot: usize, weight: f64 },
    /// The boundary is met at `fraction` of the way to boundary node `node`.
    Crossing { node: usize, fraction: f64, weight: f64 },
}

/// Mask-based discretization of a plane domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    nx: usize,
    ny: usize,
    h: f64,
    origin: Complex64,
    kinds: Vec<NodeKind>,
    shape: Option<Shape>,
    interior: Vec<usize>,
    slots: Vec<Option<usize>>,
    stencils: Vec<[Link; 4]>,
}

impl GridDomain {
    /// Domain from a row-major mask (`mask[j * nx + i]` is node `(i, j)` at
    /// `origin + h·(i, j)`), classified by the lattice rule.
    pub fn from_mask(nx: usize, ny: usize, mask: Vec<bool>, h: f64, origin: Complex64) -> Result<Self> {
        if mask.len() != nx * ny || nx == 0 || ny == 0 {
            return Err(Error::MaskFormat(format!(
                "mask has {} entries, expected {nx}×{ny}",
                mask.len()
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("spacing h = {h}")));
        }
        let in_mask = |i: i64, j: i64| {
            i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny && mask[j as usize * nx + i as usize]
        };
        let kinds = (0..nx * ny)
            .map(|id| {
                let (i, j) = ((id % nx) as i64, (id / nx) as i64);
                if !mask[id] {
                    NodeKind::Exterior
                } else if DIRECTIONS.iter().all(|&(di, dj)| in_mask(i + di, j + dj)) {
                    NodeKind::Interior
                } else {
                    NodeKind::Boundary
                }
            })
            .collect();
        Self::assemble(nx, ny, h, origin, kinds, None)
    }

    /// Lattice through the origin covering `shape`, with cut-edge fractions.
    pub fn from_shape(shape: Shape, h: f64) -> Result<Self> {
        shape.validate()?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("spacing h = {h}")));
        }
        let m = (shape.extent() / h).ceil() as usize + 2;
        let n = 2 * m + 1;
        let origin = Complex64::new(-(m as f64) * h, -(m as f64) * h);
        let pos = |id: usize| origin + Complex64::new((id % n) as f64 * h, (id / n) as f64 * h);
        let inside: Vec<bool> = (0..n * n).map(|id| shape.depth(pos(id)) > 1e-6 * h).collect();
        let kinds = (0..n * n)
            .map(|id| {
                let (i, j) = ((id % n) as i64, (id / n) as i64);
                let near = DIRECTIONS.iter().any(|&(di, dj)| {
                    let (a, b) = (i + di, j + dj);
                    a >= 0 && b >= 0 && (a as usize) < n && (b as usize) < n && inside[b as usize * n + a as usize]
                });
                if inside[id] {
                    NodeKind::Interior
                } else if near {
                    NodeKind::Boundary
                } else {
                    NodeKind::Exterior
                }
            })
            .collect();
        Self::assemble(n, n, h, origin, kinds, Some(shape))
    }

    pub fn disk(radius: f64, h: f64) -> Result<Self> {
        Self::from_shape(Shape::Disk { radius }, h)
    }

    pub fn annulus(inner: f64, outer: f64, h: f64) -> Result<Self> {
        Self::from_shape(Shape::Annulus { inner, outer }, h)
    }

    pub fn square(side: f64, h: f64) -> Result<Self> {
        Self::from_shape(Shape::Square { side }, h)
    }

    fn assemble(
        nx: usize,
        ny: usize,
        h: f64,
        origin: Complex64,
        kinds: Vec<NodeKind>,
        shape: Option<Shape>,
    ) -> Result<Self> {
        let interior: Vec<usize> = (0..nx * ny).filter(|&id| kinds[id] == NodeKind::Interior).collect();
        if interior.is_empty() {
            return Err(Error::EmptyInterior);
        }
        let mut slots = vec![None; nx * ny];
        for (s, &id) in interior.iter().enumerate() {
            slots[id] = Some(s);
        }
        let mut dom = Self {
            nx,
            ny,
            h,
            origin,
            kinds,
            shape,
            interior,
            slots,
            stencils: Vec::new(),
        };
        let components = dom.interior_components();
        if components != 1 {
            return Err(Error::DisconnectedInterior { components });
        }
        dom.stencils = dom.interior.iter().map(|&id| dom.stencil(id)).collect();
        Ok(dom)
    }

    fn stencil(&self, id: usize) -> [Link; 4] {
        let mut fractions = [1.0; 4];
        let mut targets = [0usize; 4];
        for (d, &dir) in DIRECTIONS.iter().enumerate() {
            let nb = self.neighbor(id, dir).expect("interior nodes have four mask neighbours");
            targets[d] = nb;
            if self.kinds[nb] != NodeKind::Interior {
                if let Some(shape) = self.shape {
                    fractions[d] = shape.exit_fraction(self.position(id), self.position(nb));
                }
            }
        }
        // Non-uniform three-point second differences, normalized so the
        // weights sum to one.
        let mut raw = [0.0; 4];
        for axis in 0..2 {
            let (a, b) = (fractions[2 * axis], fractions[2 * axis + 1]);
            raw[2 * axis] = 2.0 / (a * (a + b));
            raw[2 * axis + 1] = 2.0 / (b * (a + b));
        }
        let total: f64 = raw.iter().sum();
        let mut links = [Link::Unknown { slot: 0, weight: 0.0 }; 4];
        for d in 0..4 {
            let weight = raw[d] / total;
            links[d] = match self.slots[targets[d]] {
                Some(slot) => Link::Unknown { slot, weight },
                None => Link::Crossing {
                    node: targets[d],
                    fraction: fractions[d],
                    weight,
                },
            };
        }
        links
    }

    fn interior_components(&self) -> usize {
        let mut seen = vec![false; self.node_count()];
        let mut components = 0;
        for &start in &self.interior {
            if seen[start] {
                continue;
            }
            components += 1;
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(id) = queue.pop_front() {
                for dir in DIRECTIONS {
                    if let Some(nb) = self.neighbor(id, dir) {
                        if self.kinds[nb] == NodeKind::Interior && !seen[nb] {
                            seen[nb] = true;
                            queue.push_back(nb);
                        }
                    }
                }
            }
        }
        components
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Plane position of node `(0, 0)`.
    pub fn origin(&self) -> Complex64 {
        self.origin
    }

    pub fn shape(&self) -> Option<Shape> {
        self.shape
    }

    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn kind(&self, id: usize) -> NodeKind {
        self.kinds[id]
    }

    pub fn in_mask(&self, id: usize) -> bool {
        self.kinds[id] != NodeKind::Exterior
    }

    pub fn is_interior(&self, id: usize) -> bool {
        self.kinds[id] == NodeKind::Interior
    }

    /// Interior node ids in ascending order.
    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(|&id| self.kinds[id] == NodeKind::Boundary)
    }

    pub fn mask_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(|&id| self.in_mask(id))
    }

    pub(crate) fn stencils(&self) -> &[[Link; 4]] {
        &self.stencils
    }

    pub fn id(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, id: usize) -> (usize, usize) {
        (id % self.nx, id / self.nx)
    }

    pub fn position(&self, id: usize) -> Complex64 {
        let (i, j) = self.coords(id);
        self.origin + Complex64::new(i as f64 * self.h, j as f64 * self.h)
    }

    /// Lattice neighbour of `id` in direction `(di, dj)` if it is a mask node.
    pub fn neighbor(&self, id: usize, (di, dj): (i64, i64)) -> Option<usize> {
        let (i, j) = self.coords(id);
        let (a, b) = (i as i64 + di, j as i64 + dj);
        if a < 0 || b < 0 || a as usize >= self.nx || b as usize >= self.ny {
            return None;
        }
        let nb = self.id(a as usize, b as usize);
        self.in_mask(nb).then_some(nb)
    }

    /// Mask node closest to `z`, preferring interior nodes.
    pub fn nearest_interior(&self, z: Complex64) -> usize {
        *self
            .interior
            .iter()
            .min_by(|&&a, &&b| {
                let da = (self.position(a) - z).norm_sqr();
                let db = (self.position(b) - z).norm_sqr();
                da.total_cmp(&db).then(a.cmp(&b))
            })
            .expect("domains have a non-empty interior")
    }

    /// Cell containing `z` with its four corners (sw, se, nw, ne) and the
    /// local coordinates in `[0, 1]²`; all corners must be interior.
    pub fn locate(&self, z: Complex64) -> Result<([usize; 4], f64, f64)> {
        let outside = || Error::OutsideDomain { re: z.re, im: z.im };
        if let Some(shape) = self.shape {
            if shape.depth(z) <= 0.0 {
                return Err(outside());
            }
        }
        let gx = (z.re - self.origin.re) / self.h;
        let gy = (z.im - self.origin.im) / self.h;
        if !(gx.is_finite() && gy.is_finite()) || gx < 0.0 || gy < 0.0 {
            return Err(outside());
        }
        let (mut i, mut j) = (gx.floor() as usize, gy.floor() as usize);
        // Points on the last lattice line belong to the cell below/left.
        if i + 1 >= self.nx && i > 0 {
            i -= 1;
        }
        if j + 1 >= self.ny && j > 0 {
            j -= 1;
        }
        if i + 1 >= self.nx || j + 1 >= self.ny {
            return Err(outside());
        }
        let corners = [self.id(i, j), self.id(i + 1, j), self.id(i, j + 1), self.id(i + 1, j + 1)];
        if corners.iter().all(|&c| self.is_interior(c)) {
            Ok((corners, gx - i as f64, gy - j as f64))
        } else {
            Err(outside())
        }
    }

    /// Parses the ASCII mask format: a header `h=<spacing> x0=<re> y0=<im>`
    /// followed by equal-length rows of `0`/`1`, the first row being the top
    /// (largest `y`) lattice line and `(x0, y0)` the bottom-left node.
    pub fn parse_mask(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::MaskFormat("empty file".into()))?;
        let (mut h, mut x0, mut y0) = (None, None, None);
        for token in header.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::MaskFormat(format!("bad header token `{token}`")))?;
            let value: f64 = value
                .parse()
                .map_err(|_| Error::MaskFormat(format!("bad number in `{token}`")))?;
            match key {
                "h" => h = Some(value),
                "x0" => x0 = Some(value),
                "y0" => y0 = Some(value),
                _ => return Err(Error::MaskFormat(format!("unknown header key `{key}`"))),
            }
        }
        let (h, x0, y0) = match (h, x0, y0) {
            (Some(h), Some(x0), Some(y0)) => (h, x0, y0),
            _ => return Err(Error::MaskFormat("header needs h=, x0= and y0=".into())),
        };
        let rows: Vec<&str> = lines.collect();
        let nx = rows.first().map_or(0, |r| r.len());
        if rows.is_empty() || nx == 0 {
            return Err(Error::MaskFormat("no mask rows".into()));
        }
        let ny = rows.len();
        let mut mask = vec![false; nx * ny];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != nx {
                return Err(Error::MaskFormat(format!(
                    "row {} has length {}, expected {nx}",
                    r + 1,
                    row.len()
                )));
            }
            let j = ny - 1 - r;
            for (i, ch) in row.chars().enumerate() {
                mask[j * nx + i] = match ch {
                    '1' => true,
                    '0' => false,
                    other => return Err(Error::MaskFormat(format!("unexpected character `{other}`"))),
                };
            }
        }
        Self::from_mask(nx, ny, mask, h, Complex64::new(x0, y0))
    }

    pub fn load_mask(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_mask(&text)
    }

    /// Mask in the file format accepted by [`GridDomain::parse_mask`].
    pub fn to_mask_string(&self) -> String {
        let mut out = format!("h={} x0={} y0={}\n", self.h, self.origin.re, self.origin.im);
        for j in (0..self.ny).rev() {
            for i in 0..self.nx {
                out.push(if self.in_mask(self.id(i, j)) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    pub fn describe(&self) -> String {
        match self.shape {
            Some(s) => format!("grid:{s}:h={}", self.h),
            None => format!("grid:mask{}x{}:h={}", self.nx, self.ny, self.h),
        }
    }
}

/// Real values on the mask nodes of a domain. Exterior entries are unused
/// and held at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    domain: Arc<GridDomain>,
    values: Vec<f64>,
}

impl GridField {
    pub fn from_fn(domain: &Arc<GridDomain>, f: impl Fn(Complex64) -> f64) -> Result<Self> {
        let values = (0..domain.node_count())
            .map(|id| if domain.in_mask(id) { f(domain.position(id)) } else { 0.0 })
            .collect();
        Self::from_values(domain, values)
    }

    pub fn from_values(domain: &Arc<GridDomain>, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.node_count() {
            return Err(Error::InvalidParameter(format!(
                "field has {} values for {} nodes",
                values.len(),
                domain.node_count()
            )));
        }
        for (id, value) in values.iter_mut().enumerate() {
            if !domain.in_mask(id) {
                *value = 0.0;
            } else if !value.is_finite() {
                let z = domain.position(id);
                return Err(Error::InvalidParameter(format!(
                    "non-finite value at ({}, {})",
                    z.re, z.im
                )));
            }
        }
        Ok(Self {
            domain: Arc::clone(domain),
            values,
        })
    }

    pub fn constant(domain: &Arc<GridDomain>, c: f64) -> Result<Self> {
        Self::from_fn(domain, |_| c)
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, id: usize) -> f64 {
        self.values[id]
    }

    pub fn same_domain(&self, other: &GridField) -> bool {
        Arc::ptr_eq(&self.domain, &other.domain) || self.domain == other.domain
    }

    /// Pointwise image; the result must stay finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = self.values.iter().map(|&v| f(v)).collect();
        Self::from_values(&self.domain, values)
    }

    pub fn zip_map(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !self.same_domain(other) {
            return Err(Error::DomainMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::from_values(&self.domain, values)
    }

    /// Bilinear interpolation inside an all-interior lattice cell.
    pub fn interpolate(&self, z: Complex64) -> Result<f64> {
        let ([sw, se, nw, ne], fx, fy) = self.domain.locate(z)?;
        let v = &self.values;
        Ok((1.0 - fy) * ((1.0 - fx) * v[sw] + fx * v[se]) + fy * ((1.0 - fx) * v[nw] + fx * v[ne]))
    }

    /// Largest `|value|` over the mask.
    pub fn max_abs(&self) -> f64 {
        self.domain
            .mask_nodes()
            .map(|id| self.values[id].abs())
            .fold(0.0, f64::max)
    }

    /// Shift every mask value by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        for id in 0..out.values.len() {
            if self.domain.in_mask(id) {
                out.values[id] += c;
            }
        }
        out
    }
}
