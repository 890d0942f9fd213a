//! Harmonic conjugates on grid domains.
//!
//! The conjugate differential `dV = -U_y dx + U_x dy` is integrated along
//! lattice edges (trapezoid rule, central-difference gradients). A single
//! valued conjugate exists only if the circulation of `dV` around every hole
//! vanishes, so each hole of the mask is enclosed by an interior lattice loop
//! and its period is measured before any integration takes place.

use std::collections::{BTreeMap, VecDeque};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridDomain, GridField, NodeKind};

/// Neighbour order by ascending node id: south, west, east, north.
const ID_ORDER: [(i64, i64); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];

/// Floor of the period tolerance.
pub const PERIOD_TOL_FLOOR: f64 = 1e-6;

/// Closed lattice path; the last node connects back to the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeLoop {
    nodes: Vec<usize>,
}

impl LatticeLoop {
    pub fn new(nodes: Vec<usize>) -> Self {
        Self { nodes }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The same loop traversed `times` times.
    pub fn repeated(&self, times: usize) -> Self {
        Self {
            nodes: self.nodes.repeat(times),
        }
    }

    fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.nodes.len();
        (0..n).map(move |k| (self.nodes[k], self.nodes[(k + 1) % n]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateResult {
    /// Conjugate normalized to vanish at `zeta0`.
    pub v: GridField,
    /// One circulation per hole of the domain.
    pub periods: Vec<f64>,
    pub zeta0: Complex64,
}

/// `(∂U/∂x, ∂U/∂y)`: central differences where both neighbours are in the
/// mask, second-order one-sided differences otherwise.
pub fn grid_gradient(u: &GridField) -> (GridField, GridField) {
    let dom = u.domain();
    let h = dom.spacing();
    let mut gx = vec![0.0; dom.node_count()];
    let mut gy = vec![0.0; dom.node_count()];
    let partial = |id: usize, (di, dj): (i64, i64)| -> f64 {
        let fwd = dom.neighbor(id, (di, dj));
        let bwd = dom.neighbor(id, (-di, -dj));
        match (fwd, bwd) {
            (Some(f), Some(b)) => (u.value(f) - u.value(b)) / (2.0 * h),
            (Some(f), None) => one_sided(u, id, f, dom.neighbor(f, (di, dj)), h),
            (None, Some(b)) => -one_sided(u, id, b, dom.neighbor(b, (-di, -dj)), h),
            (None, None) => 0.0,
        }
    };
    for id in dom.mask_nodes() {
        gx[id] = partial(id, (1, 0));
        gy[id] = partial(id, (0, 1));
    }
    (
        GridField::from_values(dom, gx).expect("finite differences of finite data"),
        GridField::from_values(dom, gy).expect("finite differences of finite data"),
    )
}

fn one_sided(u: &GridField, at: usize, next: usize, after: Option<usize>, h: f64) -> f64 {
    match after {
        Some(a) => (-3.0 * u.value(at) + 4.0 * u.value(next) - u.value(a)) / (2.0 * h),
        None => (u.value(next) - u.value(at)) / h,
    }
}

/// Trapezoid rule for `∫ -U_y dx + U_x dy` along the edge `a → b`.
fn edge_increment(dom: &GridDomain, grad: &(GridField, GridField), a: usize, b: usize) -> f64 {
    let d = dom.position(b) - dom.position(a);
    let (gx, gy) = grad;
    0.5 * (-(gy.value(a) + gy.value(b)) * d.re + (gx.value(a) + gx.value(b)) * d.im)
}

fn adjacent(dom: &GridDomain, a: usize, b: usize) -> bool {
    let ((ai, aj), (bi, bj)) = (dom.coords(a), dom.coords(b));
    ai.abs_diff(bi) + aj.abs_diff(bj) == 1
}

/// Integral of the conjugate differential along an open lattice path of
/// mask nodes.
pub fn conjugate_increment(u: &GridField, path: &[usize]) -> Result<f64> {
    let dom = u.domain();
    let grad = grid_gradient(u);
    for w in path.windows(2) {
        if w[0] >= dom.node_count() || w[1] >= dom.node_count() || !adjacent(dom, w[0], w[1]) {
            return Err(Error::InvalidLoop("path steps between non-adjacent nodes".into()));
        }
    }
    if path.iter().any(|&id| id >= dom.node_count() || !dom.in_mask(id)) {
        return Err(Error::InvalidLoop("path leaves the mask".into()));
    }
    Ok(path
        .windows(2)
        .map(|w| edge_increment(dom, &grad, w[0], w[1]))
        .sum())
}

fn validate_loop(dom: &GridDomain, lp: &LatticeLoop) -> Result<()> {
    if lp.len() < 4 {
        return Err(Error::InvalidLoop(format!("{} nodes cannot enclose a hole", lp.len())));
    }
    if lp.nodes.iter().any(|&id| id >= dom.node_count() || !dom.is_interior(id)) {
        return Err(Error::InvalidLoop("path leaves the interior".into()));
    }
    for (k, (a, b)) in lp.edges().enumerate() {
        if !adjacent(dom, a, b) {
            return Err(Error::InvalidLoop(if k + 1 == lp.len() {
                "open path: last node is not adjacent to the first".into()
            } else {
                format!("step {k} joins non-adjacent nodes")
            }));
        }
    }
    Ok(())
}

fn circulation(dom: &GridDomain, grad: &(GridField, GridField), lp: &LatticeLoop) -> f64 {
    lp.edges().map(|(a, b)| edge_increment(dom, grad, a, b)).sum()
}

/// Circulation of the conjugate differential around a closed interior loop.
pub fn period_around_hole(u: &GridField, lp: &LatticeLoop) -> Result<f64> {
    let dom = u.domain();
    validate_loop(dom, lp)?;
    Ok(circulation(dom, &grid_gradient(u), lp))
}

/// `max(1e-6, 10 h² · loop length · max |∇U| on the loop)`.
pub fn period_tolerance(u: &GridField, lp: &LatticeLoop) -> f64 {
    let grad = grid_gradient(u);
    tolerance_with(u.domain(), &grad, lp)
}

fn tolerance_with(dom: &GridDomain, grad: &(GridField, GridField), lp: &LatticeLoop) -> f64 {
    let h = dom.spacing();
    let max_grad = lp
        .nodes
        .iter()
        .map(|&id| grad.0.value(id).hypot(grad.1.value(id)))
        .fold(0.0, f64::max);
    (10.0 * h * h * (lp.len() as f64 * h) * max_grad).max(PERIOD_TOL_FLOOR)
}

/// Exterior components of the mask not connected to the outside of the
/// bounding box (8-connectivity), each as a sorted node list.
pub fn holes(dom: &GridDomain) -> Vec<Vec<usize>> {
    let (nx, ny) = (dom.nx(), dom.ny());
    let mut label = vec![usize::MAX; dom.node_count()];
    let on_frame = |id: usize| {
        let (i, j) = dom.coords(id);
        i == 0 || j == 0 || i + 1 == nx || j + 1 == ny
    };
    let mut components = Vec::new();
    let mut outer = Vec::new();
    for start in 0..dom.node_count() {
        if dom.in_mask(start) || label[start] != usize::MAX {
            continue;
        }
        let tag = components.len() + outer.len() + 1;
        let mut nodes = vec![start];
        let mut touches_frame = on_frame(start);
        label[start] = tag;
        let mut k = 0;
        while k < nodes.len() {
            let id = nodes[k];
            k += 1;
            for nb in neighbors8(dom, id) {
                if !dom.in_mask(nb) && label[nb] == usize::MAX {
                    label[nb] = tag;
                    touches_frame |= on_frame(nb);
                    nodes.push(nb);
                }
            }
        }
        nodes.sort_unstable();
        if touches_frame {
            outer.push(nodes);
        } else {
            components.push(nodes);
        }
    }
    components
}

fn neighbors8(dom: &GridDomain, id: usize) -> impl Iterator<Item = usize> + '_ {
    let (i, j) = dom.coords(id);
    let (nx, ny) = (dom.nx() as i64, dom.ny() as i64);
    (-1i64..=1)
        .flat_map(|dj| (-1i64..=1).map(move |di| (di, dj)))
        .filter(|&d| d != (0, 0))
        .filter_map(move |(di, dj)| {
            let (a, b) = (i as i64 + di, j as i64 + dj);
            (a >= 0 && b >= 0 && a < nx && b < ny).then(|| (b * nx + a) as usize)
        })
}

/// One interior loop per hole: the outer boundary of the union of lattice
/// cells touching the hole or the non-interior nodes around it.
pub fn hole_loops(dom: &GridDomain) -> Result<Vec<LatticeLoop>> {
    let all_holes = holes(dom);
    let mut hole_of = vec![usize::MAX; dom.node_count()];
    for (k, hole) in all_holes.iter().enumerate() {
        for &id in hole {
            hole_of[id] = k;
        }
    }
    all_holes
        .iter()
        .enumerate()
        .map(|(k, hole)| loop_around(dom, k, hole, &hole_of))
        .collect()
}

fn loop_around(dom: &GridDomain, k: usize, hole: &[usize], hole_of: &[usize]) -> Result<LatticeLoop> {
    let (nx, ny) = (dom.nx(), dom.ny());
    // Hole plus every non-interior node reachable from it.
    let mut in_b = vec![false; dom.node_count()];
    let mut stack: Vec<usize> = hole.to_vec();
    for &id in hole {
        in_b[id] = true;
    }
    while let Some(id) = stack.pop() {
        let (i, j) = dom.coords(id);
        if i == 0 || j == 0 || i + 1 == nx || j + 1 == ny {
            return Err(Error::InvalidLoop(format!(
                "hole {k} is not enclosed by interior nodes"
            )));
        }
        for nb in neighbors8(dom, id) {
            if !in_b[nb] && dom.kind(nb) != NodeKind::Interior {
                if hole_of[nb] != usize::MAX && hole_of[nb] != k {
                    return Err(Error::InvalidLoop(format!(
                        "holes {k} and {} are not separated by interior nodes",
                        hole_of[nb]
                    )));
                }
                in_b[nb] = true;
                stack.push(nb);
            }
        }
    }

    // Cells (ci, cj) with corners (ci..=ci+1, cj..=cj+1), stored with a
    // one-cell frame: index (ci + 1, cj + 1) over (nx + 1) × (ny + 1).
    let (cw, ch) = (nx + 1, ny + 1);
    let cell = |ci: i64, cj: i64| ((cj + 1) as usize) * cw + (ci + 1) as usize;
    let real = |ci: i64, cj: i64| ci >= 0 && cj >= 0 && ci + 1 < nx as i64 && cj + 1 < ny as i64;
    let mut touched = vec![false; cw * ch];
    for cj in -1..ny as i64 {
        for ci in -1..nx as i64 {
            if real(ci, cj) {
                let (i, j) = (ci as usize, cj as usize);
                touched[cell(ci, cj)] = [dom.id(i, j), dom.id(i + 1, j), dom.id(i, j + 1), dom.id(i + 1, j + 1)]
                    .iter()
                    .any(|&c| in_b[c]);
            }
        }
    }
    // Flood the untouched cells from the frame; what remains is the filled
    // region around the hole.
    let mut outside = vec![false; cw * ch];
    let mut queue = VecDeque::new();
    for cj in -1..ny as i64 {
        for ci in -1..nx as i64 {
            if !real(ci, cj) {
                outside[cell(ci, cj)] = true;
                queue.push_back((ci, cj));
            }
        }
    }
    while let Some((ci, cj)) = queue.pop_front() {
        for (di, dj) in ID_ORDER {
            let (a, b) = (ci + di, cj + dj);
            if a < -1 || b < -1 || a >= nx as i64 || b >= ny as i64 {
                continue;
            }
            let c = cell(a, b);
            if !outside[c] && !touched[c] {
                outside[c] = true;
                queue.push_back((a, b));
            }
        }
    }
    let filled = |ci: i64, cj: i64| real(ci, cj) && !outside[cell(ci, cj)];

    // Counter-clockwise boundary edges of the filled region.
    let mut out_edges: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut edge_count = 0usize;
    for cj in 0..ny as i64 - 1 {
        for ci in 0..nx as i64 - 1 {
            if !filled(ci, cj) {
                continue;
            }
            let (i, j) = (ci as usize, cj as usize);
            let (sw, se, nw, ne) = (dom.id(i, j), dom.id(i + 1, j), dom.id(i, j + 1), dom.id(i + 1, j + 1));
            for (open, from, to) in [
                (!filled(ci, cj - 1), sw, se),
                (!filled(ci + 1, cj), se, ne),
                (!filled(ci, cj + 1), ne, nw),
                (!filled(ci - 1, cj), nw, sw),
            ] {
                if open {
                    out_edges.entry(from).or_default().push(to);
                    edge_count += 1;
                }
            }
        }
    }
    for targets in out_edges.values_mut() {
        targets.sort_unstable_by(|a, b| b.cmp(a));
    }

    // Eulerian circuit (Hierholzer).
    let start = *out_edges
        .keys()
        .next()
        .ok_or_else(|| Error::InvalidLoop(format!("no cycle found around hole {k}")))?;
    let mut stack = vec![start];
    let mut circuit = Vec::with_capacity(edge_count + 1);
    while let Some(&v) = stack.last() {
        match out_edges.get_mut(&v).and_then(Vec::pop) {
            Some(w) => stack.push(w),
            None => circuit.push(stack.pop().expect("non-empty stack")),
        }
    }
    if circuit.len() != edge_count + 1 {
        return Err(Error::InvalidLoop(format!(
            "boundary around hole {k} is not a single cycle"
        )));
    }
    circuit.reverse();
    circuit.pop();
    let lp = LatticeLoop::new(circuit);
    validate_loop(dom, &lp)?;
    Ok(lp)
}

/// Conjugate of `u` normalized by `V(ζ0) = 0`, provided every hole has a
/// vanishing period.
pub fn conjugate_on_grid(u: &GridField, zeta0: Complex64) -> Result<ConjugateResult> {
    let dom = u.domain();
    dom.locate(zeta0)?;
    let grad = grid_gradient(u);

    let mut periods = Vec::new();
    for lp in hole_loops(dom)? {
        let period = circulation(dom, &grad, &lp);
        let tolerance = tolerance_with(dom, &grad, &lp);
        if period.abs() > tolerance {
            return Err(Error::ExistenceFailure { period, tolerance });
        }
        periods.push(period);
    }

    let mut v = vec![0.0; dom.node_count()];
    let mut done = vec![false; dom.node_count()];
    let root = dom.nearest_interior(zeta0);
    done[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(id) = queue.pop_front() {
        for dir in ID_ORDER {
            if let Some(nb) = dom.neighbor(id, dir) {
                if dom.is_interior(nb) && !done[nb] {
                    v[nb] = v[id] + edge_increment(dom, &grad, id, nb);
                    done[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
    }
    // Boundary nodes hang off the interior tree.
    let mut queue: VecDeque<usize> = dom.interior_nodes().iter().copied().collect();
    while let Some(id) = queue.pop_front() {
        for dir in ID_ORDER {
            if let Some(nb) = dom.neighbor(id, dir) {
                if !done[nb] {
                    v[nb] = v[id] + edge_increment(dom, &grad, id, nb);
                    done[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
    }

    let v = GridField::from_values(dom, v)?;
    let shift = v.interpolate(zeta0)?;
    Ok(ConjugateResult {
        v: v.shifted(-shift),
        periods,
        zeta0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_interior_error(dom: &GridDomain, f: &GridField, exact: impl Fn(Complex64) -> f64) -> f64 {
        dom.interior_nodes()
            .iter()
            .map(|&id| (f.value(id) - exact(dom.position(id))).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn gradient_of_linear_and_quadratic() {
        let sq = Arc::new(GridDomain::square(2.0, 0.125).unwrap());
        let u = GridField::from_fn(&sq, |z| z.re).unwrap();
        let (gx, gy) = grid_gradient(&u);
        assert!(max_interior_error(&sq, &gx, |_| 1.0) < 1e-13);
        assert!(max_interior_error(&sq, &gy, |_| 0.0) < 1e-13);
        let u = GridField::from_fn(&sq, |z| (z * z).re).unwrap();
        let (gx, gy) = grid_gradient(&u);
        assert!(max_interior_error(&sq, &gx, |z| 2.0 * z.re) < 1e-12);
        assert!(max_interior_error(&sq, &gy, |z| -2.0 * z.im) < 1e-12);
        // One-sided second-order differences are exact on quadratics too.
        for id in sq.boundary_nodes() {
            let z = sq.position(id);
            assert!((gx.value(id) - 2.0 * z.re).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_of_cubic_is_second_order() {
        let err = |h: f64| {
            let d = Arc::new(GridDomain::disk(1.0, h).unwrap());
            let u = GridField::from_fn(&d, |z| (z * z * z).re).unwrap();
            let (gx, gy) = grid_gradient(&u);
            max_interior_error(&d, &gx, |z| 3.0 * (z.re * z.re - z.im * z.im))
                .max(max_interior_error(&d, &gy, |z| -6.0 * z.re * z.im))
        };
        let (coarse, fine) = (err(1.0 / 32.0), err(1.0 / 64.0));
        assert!(fine <= (1.0f64 / 64.0).powi(2) + 1e-12, "{fine}");
        assert!((coarse / fine - 4.0).abs() < 0.1, "{coarse} / {fine}");
    }

    #[test]
    fn annulus_has_one_hole_loop() {
        let d = GridDomain::annulus(0.5, 1.5, 1.0 / 16.0).unwrap();
        let loops = hole_loops(&d).unwrap();
        assert_eq!(loops.len(), 1);
        for &id in loops[0].nodes() {
            assert!(d.is_interior(id));
            let r = d.position(id).norm();
            assert!(r > 0.5 && r < 0.5 + 4.0 / 16.0, "{r}");
        }
        assert!(hole_loops(&GridDomain::disk(1.0, 1.0 / 16.0).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn periods_on_annulus() {
        let d = Arc::new(GridDomain::annulus(0.5, 1.5, 1.0 / 64.0).unwrap());
        let lp = hole_loops(&d).unwrap().remove(0);
        let re_z = GridField::from_fn(&d, |z| z.re).unwrap();
        assert!(period_around_hole(&re_z, &lp).unwrap().abs() <= 1e-3);
        let log = GridField::from_fn(&d, |z| z.norm().ln()).unwrap();
        let period = period_around_hole(&log, &lp).unwrap();
        assert!((period / (2.0 * PI) - 1.0).abs() < 0.01, "{period}");
        let k = GridField::constant(&d, 4.0).unwrap();
        assert_eq!(period_around_hole(&k, &lp).unwrap(), 0.0);
        let twice = period_around_hole(&log, &lp.repeated(2)).unwrap();
        assert!((twice - 2.0 * period).abs() < 1e-12);
    }

    #[test]
    fn loop_validation() {
        let d = Arc::new(GridDomain::annulus(0.5, 1.5, 1.0 / 16.0).unwrap());
        let u = GridField::from_fn(&d, |z| z.re).unwrap();
        let lp = hole_loops(&d).unwrap().remove(0);
        let mut open = lp.nodes().to_vec();
        open.truncate(open.len() - 3);
        assert!(matches!(period_around_hole(&u, &LatticeLoop::new(open)), Err(Error::InvalidLoop(_))));
        let mut leaving = lp.nodes().to_vec();
        leaving[0] = d.boundary_nodes().next().unwrap();
        assert!(matches!(period_around_hole(&u, &LatticeLoop::new(leaving)), Err(Error::InvalidLoop(_))));
    }

    #[test]
    fn conjugate_of_re_z_on_disk() {
        let d = Arc::new(GridDomain::disk(1.0, 1.0 / 32.0).unwrap());
        let u = GridField::from_fn(&d, |z| z.re).unwrap();
        let res = conjugate_on_grid(&u, c(0.0, 0.0)).unwrap();
        assert!(res.periods.is_empty());
        assert!(max_interior_error(&d, &res.v, |z| z.im) < 1e-12);
    }

    #[test]
    fn conjugate_of_re_z_squared() {
        let d = Arc::new(GridDomain::disk(1.0, 1.0 / 32.0).unwrap());
        let u = GridField::from_fn(&d, |z| z.re * z.re - z.im * z.im).unwrap();
        let res = conjugate_on_grid(&u, c(0.0, 0.0)).unwrap();
        assert!(max_interior_error(&d, &res.v, |z| 2.0 * z.re * z.im) < 1e-12);
    }

    #[test]
    fn normalization_at_off_node_point() {
        let d = Arc::new(GridDomain::disk(1.0, 1.0 / 32.0).unwrap());
        let u = GridField::from_fn(&d, |z| (z * z * z).re).unwrap();
        let zeta0 = c(0.2137, -0.3311);
        let res = conjugate_on_grid(&u, zeta0).unwrap();
        assert!(res.v.interpolate(zeta0).unwrap().abs() <= 1e-9);
        let offset = (zeta0 * zeta0 * zeta0).im;
        let err = max_interior_error(&d, &res.v, |z| (z * z * z).im - offset);
        assert!(err < 5e-3, "{err}");
    }

    #[test]
    fn log_modulus_has_no_conjugate_on_annulus() {
        let d = Arc::new(GridDomain::annulus(0.5, 1.5, 1.0 / 32.0).unwrap());
        let u = GridField::from_fn(&d, |z| z.norm().ln()).unwrap();
        match conjugate_on_grid(&u, c(1.0, 0.0)) {
            Err(Error::ExistenceFailure { period, .. }) => {
                assert!((period / (2.0 * PI) - 1.0).abs() < 0.01)
            }
            other => panic!("expected existence failure, got {other:?}"),
        }
    }

    #[test]
    fn conjugate_rejects_point_outside() {
        let d = Arc::new(GridDomain::disk(1.0, 1.0 / 16.0).unwrap());
        let u = GridField::from_fn(&d, |z| z.re).unwrap();
        assert!(matches!(conjugate_on_grid(&u, c(2.0, 0.0)), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn cauchy_riemann_residual_is_second_order() {
        let residual = |h: f64| {
            let d = Arc::new(GridDomain::disk(1.0, h).unwrap());
            let u = GridField::from_fn(&d, |z| (z * z * z).re).unwrap();
            let v = conjugate_on_grid(&u, c(0.0, 0.0)).unwrap().v;
            let (ux, uy) = grid_gradient(&u);
            let (vx, vy) = grid_gradient(&v);
            d.interior_nodes()
                .iter()
                .map(|&id| (vx.value(id) + uy.value(id)).abs().max((vy.value(id) - ux.value(id)).abs()))
                .fold(0.0, f64::max)
                / (h * h)
        };
        // Calibrated constant for Re z³ on the unit disk (measured 2.25).
        for h in [1.0 / 32.0, 1.0 / 64.0] {
            let scaled = residual(h);
            assert!(scaled < 3.0, "C = {scaled} at h = {h}");
        }
    }

    #[test]
    fn homotopic_paths_agree() {
        let h = 1.0 / 32.0;
        let d = Arc::new(GridDomain::disk(1.0, h).unwrap());
        let u = GridField::from_fn(&d, |z| (z * z * z).re + (z * z).re).unwrap();
        let (a, b) = (d.nearest_interior(c(-0.4, -0.3)), d.nearest_interior(c(0.3, 0.4)));
        let ((ai, aj), (bi, bj)) = (d.coords(a), d.coords(b));
        let right_then_up: Vec<usize> = (ai..=bi)
            .map(|i| d.id(i, aj))
            .chain((aj + 1..=bj).map(|j| d.id(bi, j)))
            .collect();
        let up_then_right: Vec<usize> = (aj..=bj)
            .map(|j| d.id(ai, j))
            .chain((ai + 1..=bi).map(|i| d.id(i, bj)))
            .collect();
        let p = conjugate_increment(&u, &right_then_up).unwrap();
        let q = conjugate_increment(&u, &up_then_right).unwrap();
        let length = (right_then_up.len() - 1) as f64 * h;
        assert!((p - q).abs() <= 4.0 * h * h * length, "{p} vs {q}");
    }
}
