//! Closed-form conformal maps and the pullback `U ∘ Φ`.
//!
//! Maps serialize as `{"kind": ..., "parameters": ...}`:
//!
//! ```json
//! {"kind": "mobius", "parameters": {"a": [0.3, 0.0], "phi": 0.0}}
//! {"kind": "cayley"}
//! {"kind": "power-wedge", "parameters": {"alpha": 0.5}}
//! {"kind": "composition", "parameters": [{"kind": "cayley"}, ...]}
//! ```
//!
//! A composition applies its members in list order; the empty composition is
//! the identity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::circle_spectral::{nodes, poisson_quadrature, refine, TrigSeries, MAX_SAMPLES};
use crate::error::{check_exponent, Error, Result};
use crate::grid::GridDomain;
use crate::lumer_majorant::disk_majorant_value;

/// Slack on `|z| ≤ 1` and `Im z ≥ 0` when checking domains.
const DOMAIN_SLACK: f64 = 1e-12;

/// Agreement required between successive boundary refinements.
pub const ISOMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "kebab-case")]
pub enum ConformalMap {
    /// `e^{iφ} (z − a) / (1 − āz)`, an automorphism of the unit disk.
    Mobius {
        a: Complex64,
        #[serde(default)]
        phi: f64,
    },
    /// `i (1 + z) / (1 − z)`, unit disk onto the upper half-plane.
    Cayley,
    /// `z^α`, upper half-plane onto the wedge `0 < arg w < απ`.
    PowerWedge { alpha: f64 },
    Composition(Vec<ConformalMap>),
}

impl ConformalMap {
    pub fn mobius(a: Complex64, phi: f64) -> Result<Self> {
        let m = Self::Mobius { a, phi };
        m.validate()?;
        Ok(m)
    }

    pub fn rotation(phi: f64) -> Result<Self> {
        Self::mobius(Complex64::new(0.0, 0.0), phi)
    }

    pub fn power_wedge(alpha: f64) -> Result<Self> {
        let m = Self::PowerWedge { alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn identity() -> Self {
        Self::Composition(Vec::new())
    }

    /// Parses and validates a JSON descriptor.
    pub fn from_json(text: &str) -> Result<Self> {
        let map: Self =
            serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("map descriptor: {e}")))?;
        map.validate()?;
        Ok(map)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("maps serialize")
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Mobius { a, phi } => {
                if !(a.re.is_finite() && a.im.is_finite() && phi.is_finite()) {
                    return Err(Error::InvalidParameter("mobius parameters must be finite".into()));
                }
                if !(a.norm() < 1.0) {
                    return Err(Error::InvalidParameter(format!("mobius needs |a| < 1, got |a| = {}", a.norm())));
                }
                Ok(())
            }
            Self::Cayley => Ok(()),
            Self::PowerWedge { alpha } => {
                if !(*alpha > 0.0 && *alpha <= 2.0) {
                    return Err(Error::InvalidParameter(format!("power-wedge needs 0 < α ≤ 2, got {alpha}")));
                }
                Ok(())
            }
            Self::Composition(maps) => maps.iter().try_for_each(Self::validate),
        }
    }

    /// Whether the map sends the unit disk onto itself.
    pub fn is_disk_automorphism(&self) -> bool {
        match self {
            Self::Mobius { .. } => true,
            Self::Composition(maps) => maps.iter().all(Self::is_disk_automorphism),
            _ => false,
        }
    }

    /// Whether the map is an empty composition, possibly nested.
    pub fn is_identity(&self) -> bool {
        matches!(self, Self::Composition(maps) if maps.iter().all(Self::is_identity))
    }

    /// The inverse map, in closed form where the catalog has one.
    pub fn inverse_map(&self) -> Option<Self> {
        match self {
            Self::Mobius { a, phi } => Some(Self::Mobius {
                a: -a * Complex64::from_polar(1.0, *phi),
                phi: -phi,
            }),
            Self::Composition(maps) => maps
                .iter()
                .rev()
                .map(Self::inverse_map)
                .collect::<Option<Vec<_>>>()
                .map(Self::Composition),
            _ => None,
        }
    }

    pub fn forward(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Self::Mobius { a, phi } => {
                in_closed_disk(z)?;
                Ok(Complex64::from_polar(1.0, *phi) * (z - a) / (1.0 - a.conj() * z))
            }
            Self::Cayley => {
                in_closed_disk(z)?;
                if z == Complex64::new(1.0, 0.0) {
                    return Err(outside(z));
                }
                Ok(Complex64::i() * (1.0 + z) / (1.0 - z))
            }
            Self::PowerWedge { alpha } => Ok(Complex64::from_polar(z.norm().powf(*alpha), alpha * half_plane_arg(z)?)),
            Self::Composition(maps) => maps.iter().try_fold(z, |w, m| m.forward(w)),
        }
    }

    pub fn inverse(&self, w: Complex64) -> Result<Complex64> {
        match self {
            Self::Mobius { a, phi } => {
                in_closed_disk(w)?;
                let v = Complex64::from_polar(1.0, -phi) * w;
                Ok((v + a) / (1.0 + a.conj() * v))
            }
            Self::Cayley => {
                half_plane_arg(w)?;
                if w == -Complex64::i() {
                    return Err(outside(w));
                }
                Ok((w - Complex64::i()) / (w + Complex64::i()))
            }
            Self::PowerWedge { alpha } => {
                let t = if w == Complex64::new(0.0, 0.0) { 0.0 } else { w.arg() };
                let t = if t >= -DOMAIN_SLACK { t.max(0.0) } else { t + 2.0 * PI };
                if !(0.0..=alpha * PI + DOMAIN_SLACK).contains(&t) {
                    return Err(outside(w));
                }
                Ok(Complex64::from_polar(w.norm().powf(1.0 / alpha), t / alpha))
            }
            Self::Composition(maps) => maps.iter().rev().try_fold(w, |z, m| m.inverse(z)),
        }
    }

    /// `Φ'(z)`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Self::Mobius { a, phi } => {
                in_closed_disk(z)?;
                let d = 1.0 - a.conj() * z;
                Ok(Complex64::from_polar(1.0 - a.norm_sqr(), *phi) / (d * d))
            }
            Self::Cayley => {
                in_closed_disk(z)?;
                if z == Complex64::new(1.0, 0.0) {
                    return Err(outside(z));
                }
                let d = 1.0 - z;
                Ok(2.0 * Complex64::i() / (d * d))
            }
            Self::PowerWedge { alpha } => {
                let t = half_plane_arg(z)?;
                if z == Complex64::new(0.0, 0.0) && *alpha != 1.0 {
                    return Err(outside(z));
                }
                Ok(*alpha * Complex64::from_polar(z.norm().powf(alpha - 1.0), (alpha - 1.0) * t))
            }
            Self::Composition(maps) => {
                let mut w = z;
                let mut d = Complex64::new(1.0, 0.0);
                for m in maps {
                    d *= m.derivative(w)?;
                    w = m.forward(w)?;
                }
                Ok(d)
            }
        }
    }
}

fn outside(z: Complex64) -> Error {
    Error::OutsideDomain { re: z.re, im: z.im }
}

fn in_closed_disk(z: Complex64) -> Result<()> {
    if z.norm() <= 1.0 + DOMAIN_SLACK {
        Ok(())
    } else {
        Err(outside(z))
    }
}

/// Argument in `[0, π]` for points of the closed upper half-plane.
fn half_plane_arg(z: Complex64) -> Result<f64> {
    if !(z.im >= -DOMAIN_SLACK * z.norm().max(1.0)) || !z.re.is_finite() {
        return Err(outside(z));
    }
    if z.im <= 0.0 {
        return Ok(if z.re < 0.0 { PI } else { 0.0 });
    }
    Ok(z.arg())
}

/// `U ∘ Φ`.
pub fn pullback<'a>(
    u: impl Fn(Complex64) -> f64 + Send + Sync + 'a,
    map: &'a ConformalMap,
) -> impl Fn(Complex64) -> Result<f64> + Send + Sync + 'a {
    move |z| Ok(u(map.forward(z)?))
}

/// Harmonic extension of a series as a point evaluator on the closed disk.
pub fn series_evaluator(u: &TrigSeries) -> impl Fn(Complex64) -> f64 + Send + Sync + '_ {
    move |z| {
        let r = z.norm();
        (0..u.len())
            .map(|k| {
                let n = if k < u.len() / 2 { k as i64 } else { k as i64 - u.len() as i64 };
                let c = u.coeffs()[k];
                if k == u.len() / 2 {
                    (c * r.powi(n.unsigned_abs() as i32) * (n as f64 * z.arg()).cos()).re
                } else {
                    (c * Complex64::from_polar(r.powi(n.unsigned_abs() as i32), n as f64 * z.arg())).re
                }
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryReport {
    pub p: f64,
    pub zeta0: Complex64,
    /// `Φ⁻¹(ζ0)`.
    pub zeta0_tilde: Complex64,
    pub norm_before: f64,
    pub norm_after: f64,
    pub discrepancy: f64,
}

/// `‖U‖_{p,ζ0}` against `‖U ∘ Φ‖_{p,Φ⁻¹(ζ0)}`. The second norm samples the
/// boundary values of `U ∘ Φ` on `nodes` points, doubling until two
/// successive values agree to [`ISOMETRY_TOL`].
pub fn isometry_check(
    u: &TrigSeries,
    map: &ConformalMap,
    zeta0: Complex64,
    p: f64,
    nodes_start: usize,
) -> Result<IsometryReport> {
    check_exponent(p)?;
    if !map.is_disk_automorphism() {
        return Err(Error::NotAutomorphism(map.to_json()));
    }
    if !u.is_real() {
        return Err(Error::NotRealValued(u.real_defect()));
    }
    if !(8..=MAX_SAMPLES).contains(&nodes_start) {
        return Err(Error::InvalidSampleCount(nodes_start));
    }
    map.validate()?;
    let norm_before = disk_majorant_value(u, p, zeta0)?.powf(1.0 / p);
    let zeta0_tilde = map.inverse(zeta0)?;
    if map.is_identity() {
        // The identity pulls U back to itself.
        return Ok(IsometryReport { p, zeta0, zeta0_tilde, norm_before, norm_after: norm_before, discrepancy: 0.0 });
    }

    let boundary = |m: usize| -> Result<Vec<f64>> {
        nodes(m)
            .map(|t| {
                let w = map.forward(Complex64::from_polar(1.0, t))?;
                Ok(u.boundary_value(w.arg()).re.abs().powf(p))
            })
            .collect()
    };
    // Domain errors cannot appear once the first sampling succeeds: every
    // node lies on the unit circle, which automorphisms preserve.
    boundary(nodes_start)?;
    let h = refine(nodes_start, ISOMETRY_TOL, |m| {
        poisson_quadrature(&boundary(m).expect("circle maps to circle"), zeta0_tilde)
    });
    let norm_after = h.powf(1.0 / p);
    Ok(IsometryReport {
        p,
        zeta0,
        zeta0_tilde,
        norm_before,
        norm_after,
        discrepancy: (norm_before - norm_after).abs(),
    })
}

/// Largest five-point Laplacian `|Δ_h f|` over interior nodes whose four
/// neighbours are interior.
pub fn max_discrete_laplacian(dom: &Arc<GridDomain>, f: impl Fn(Complex64) -> Result<f64>) -> Result<f64> {
    let h = dom.spacing();
    let mut worst: f64 = 0.0;
    for &id in dom.interior_nodes() {
        let mut sum = -4.0 * f(dom.position(id))?;
        let mut full = true;
        for d in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            match dom.neighbor(id, d).filter(|&n| dom.is_interior(n)) {
                Some(n) => sum += f(dom.position(n))?,
                None => {
                    full = false;
                    break;
                }
            }
        }
        if full {
            worst = worst.max((sum / (h * h)).abs());
        }
    }
    Ok(worst)
}
