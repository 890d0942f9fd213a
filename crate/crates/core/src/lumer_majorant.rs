//! Least harmonic majorants of `|U|^p` and the Lumer norm `H_U(ζ0)^{1/p}`.
//!
//! On the unit disk the least majorant of `|U|^p` for boundary-continuous `U`
//! is the Poisson integral of the boundary values, evaluated here by
//! quadrature. On a [`GridDomain`] it is the solution of the discrete
//! Dirichlet problem with data `|U|^p`, computed by successive
//! over-relaxation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::circle_spectral::{exact_start, poisson_quadrature, quadrature_tol, refine, TrigSeries};
use crate::error::{check_exponent, Error, Result};
use crate::grid::{GridField, Link};

/// Relative residual (max norm) the Dirichlet solver must reach.
pub const SOLVER_TOL: f64 = 1e-10;
/// Sweep cap for the Dirichlet solver.
pub const MAX_SWEEPS: usize = 1_000_000;

const RESIDUAL_CHECK_EVERY: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MajorantSource {
    DiskSpectral,
    Grid,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Disk(TrigSeries),
    Grid {
        field: GridField,
        data: GridField,
        sweeps: usize,
    },
}

/// A computed harmonic majorant `H_U` of `|U|^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorantField {
    p: f64,
    residual: f64,
    repr: Repr,
}

impl MajorantField {
    /// Majorant on the unit disk given by the boundary series of `U` (real or
    /// complex).
    pub fn disk(u: &TrigSeries, p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(Self {
            p,
            residual: 0.0,
            repr: Repr::Disk(u.clone()),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Achieved relative residual of the solve (zero for the disk path).
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn source(&self) -> MajorantSource {
        match self.repr {
            Repr::Disk(_) => MajorantSource::DiskSpectral,
            Repr::Grid { .. } => MajorantSource::Grid,
        }
    }

    pub fn sweeps(&self) -> usize {
        match self.repr {
            Repr::Disk(_) => 0,
            Repr::Grid { sweeps, .. } => sweeps,
        }
    }

    /// The solved field (grid path only).
    pub fn grid_field(&self) -> Option<&GridField> {
        match &self.repr {
            Repr::Grid { field, .. } => Some(field),
            Repr::Disk(_) => None,
        }
    }

    /// The data `|U|^p` on the mask (grid path only).
    pub fn grid_data(&self) -> Option<&GridField> {
        match &self.repr {
            Repr::Grid { data, .. } => Some(data),
            Repr::Disk(_) => None,
        }
    }

    /// `H_U(z)`.
    pub fn value_at(&self, z: Complex64) -> Result<f64> {
        match &self.repr {
            Repr::Disk(u) => disk_majorant_value(u, self.p, z),
            Repr::Grid { field, .. } => field.interpolate(z),
        }
    }

    /// Smallest and largest Dirichlet value seen by the stencil (grid path).
    pub fn data_range(&self) -> Option<(f64, f64)> {
        let Repr::Grid { data, .. } = &self.repr else {
            return None;
        };
        let dom = data.domain();
        let mut range = (f64::INFINITY, f64::NEG_INFINITY);
        for (s, links) in dom.stencils().iter().enumerate() {
            let id = dom.interior_nodes()[s];
            for link in links {
                if let Link::Crossing { node, fraction, .. } = *link {
                    let g = crossing_value(data, id, node, fraction);
                    range = (range.0.min(g), range.1.max(g));
                }
            }
        }
        Some(range)
    }

    /// Largest stencil defect over interior nodes, relative to the largest
    /// Dirichlet value (grid path).
    pub fn max_stencil_residual(&self) -> Option<f64> {
        let Repr::Grid { field, data, .. } = &self.repr else {
            return None;
        };
        let x: Vec<f64> = field.domain().interior_nodes().iter().map(|&id| field.value(id)).collect();
        let b = rhs(data);
        let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let r = residual_inf(data, &x, &b);
        Some(if scale > 0.0 { r / scale } else { r })
    }
}

/// Poisson integral of `|u|^p` at `zeta0`, by trapezoid quadrature of the
/// Poisson kernel against the boundary values.
pub fn disk_majorant_value(u: &TrigSeries, p: f64, zeta0: Complex64) -> Result<f64> {
    check_exponent(p)?;
    if !(zeta0.norm() < 1.0) {
        return Err(Error::OutsideDomain { re: zeta0.re, im: zeta0.im });
    }
    if u.is_zero() {
        return Ok(0.0);
    }
    Ok(refine(exact_start(u, p), quadrature_tol(p), |m| {
        let g: Vec<f64> = u
            .sample_at_radius(1.0, m)
            .expect("refinement keeps m admissible")
            .iter()
            .map(|z| z.norm().powf(p))
            .collect();
        poisson_quadrature(&g, zeta0)
    }))
}

fn crossing_value(data: &GridField, id: usize, node: usize, fraction: f64) -> f64 {
    (1.0 - fraction) * data.value(id) + fraction * data.value(node)
}

fn rhs(data: &GridField) -> Vec<f64> {
    let dom = data.domain();
    dom.stencils()
        .iter()
        .zip(dom.interior_nodes())
        .map(|(links, &id)| {
            links
                .iter()
                .map(|link| match *link {
                    Link::Crossing { node, fraction, weight } => {
                        weight * crossing_value(data, id, node, fraction)
                    }
                    Link::Unknown { .. } => 0.0,
                })
                .sum()
        })
        .collect()
}

fn residual_inf(data: &GridField, x: &[f64], b: &[f64]) -> f64 {
    data.domain()
        .stencils()
        .iter()
        .enumerate()
        .map(|(s, links)| {
            let mut acc = b[s] - x[s];
            for link in links {
                if let Link::Unknown { slot, weight } = *link {
                    acc += weight * x[slot];
                }
            }
            acc.abs()
        })
        .fold(0.0, f64::max)
}

/// Solves the discrete Dirichlet problem with boundary values `data`.
/// Returns the harmonic field (data copied on non-interior mask nodes), the
/// achieved relative residual and the number of sweeps.
pub fn solve_dirichlet(data: &GridField, tol: f64, max_sweeps: usize) -> Result<(GridField, f64, usize)> {
    let dom = data.domain();
    let stencils = dom.stencils();
    let b = rhs(data);
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let n = stencils.len();

    let mut x = vec![0.0; n];
    if scale > 0.0 {
        // Start from the mean Dirichlet value: constant data is then solved
        // after the first residual check.
        let (mut sum, mut count) = (0.0, 0usize);
        for (links, &id) in stencils.iter().zip(dom.interior_nodes()) {
            for link in links {
                if let Link::Crossing { node, fraction, .. } = *link {
                    sum += crossing_value(data, id, node, fraction);
                    count += 1;
                }
            }
        }
        x.fill(sum / count.max(1) as f64);
    }

    let omega = 2.0 / (1.0 + (PI / dom.nx().max(dom.ny()) as f64).sin());
    let mut sweeps = 0;
    let mut residual = if scale > 0.0 { residual_inf(data, &x, &b) / scale } else { 0.0 };
    while residual > tol {
        if sweeps >= max_sweeps {
            return Err(Error::SolverDidNotConverge {
                iterations: sweeps,
                residual,
            });
        }
        for _ in 0..RESIDUAL_CHECK_EVERY {
            for s in 0..n {
                let mut acc = b[s];
                for link in &stencils[s] {
                    if let Link::Unknown { slot, weight } = *link {
                        acc += weight * x[slot];
                    }
                }
                x[s] += omega * (acc - x[s]);
            }
        }
        sweeps += RESIDUAL_CHECK_EVERY;
        residual = residual_inf(data, &x, &b) / scale;
        if !residual.is_finite() {
            return Err(Error::SolverDidNotConverge {
                iterations: sweeps,
                residual,
            });
        }
    }

    let mut values = data.values().to_vec();
    for (s, &id) in dom.interior_nodes().iter().enumerate() {
        values[id] = x[s];
    }
    Ok((GridField::from_values(dom, values)?, residual, sweeps))
}

/// Majorant of the given non-negative data (already raised to the power).
pub fn majorant_of_data(data: GridField, p: f64) -> Result<MajorantField> {
    check_exponent(p)?;
    let (field, residual, sweeps) = solve_dirichlet(&data, SOLVER_TOL, MAX_SWEEPS)?;
    Ok(MajorantField {
        p,
        residual,
        repr: Repr::Grid { field, data, sweeps },
    })
}

/// Least harmonic majorant of `|u|^p` on the grid domain of `u`.
pub fn grid_majorant(u: &GridField, p: f64) -> Result<MajorantField> {
    check_exponent(p)?;
    majorant_of_data(u.map(|v| v.abs().powf(p))?, p)
}

/// Least harmonic majorant of `|re + i im|^p`.
pub fn grid_majorant_complex(re: &GridField, im: &GridField, p: f64) -> Result<MajorantField> {
    check_exponent(p)?;
    majorant_of_data(re.zip_map(im, |a, b| a.hypot(b).powf(p))?, p)
}

/// Lumer norm `H_U(ζ0)^{1/p}`.
pub fn lumer_norm(majorant: &MajorantField, zeta0: Complex64, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p != majorant.p {
        return Err(Error::InvalidParameter(format!(
            "majorant was built for p = {}, norm requested for p = {p}",
            majorant.p
        )));
    }
    Ok(majorant.value_at(zeta0)?.max(0.0).powf(1.0 / p))
}
