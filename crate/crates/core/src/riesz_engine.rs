//! Riesz-type ratios `‖U + iV‖ / ‖U‖` for Lumer norms, the sharp constants
//! they are measured against, and the pieces of the `p = 2` argument:
//! the identity `|z|² = 2 (Re z)² − Re z²` and the majorant `2 H_U − Re F²`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::circle_spectral::{conjugate_series, poisson_extend, samples_for_degree, TrigSeries};
use crate::conjugate_field::conjugate_on_grid;
use crate::error::{check_exponent, Error, Result};
use crate::grid::GridField;
use crate::lumer_majorant::{
    disk_majorant_value, grid_majorant, grid_majorant_complex, lumer_norm, MajorantField, MajorantSource,
};

/// Discretization slack allowed on the `p = 2` bound.
pub const THEOREM_SLACK: f64 = 1e-9;

/// Label carried by every sweep output.
pub const EXPLORATORY: &str = "EXPLORATORY";

/// One ratio experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszReport {
    pub p: f64,
    pub norm_u: f64,
    pub norm_f: f64,
    pub ratio: f64,
    pub bound: f64,
    /// `bound − ratio`; negative values are recorded, not rejected.
    pub margin: f64,
    pub setting: String,
    pub seed: Option<u64>,
}

impl RieszReport {
    fn new(p: f64, norm_u: f64, norm_f: f64, setting: String, seed: Option<u64>) -> Result<Self> {
        if !(norm_u > 0.0) {
            return Err(Error::DegenerateZero);
        }
        let bound = verbitsky_constant(p)?;
        let ratio = norm_f / norm_u;
        Ok(Self {
            p,
            norm_u,
            norm_f,
            ratio,
            bound,
            margin: bound - ratio,
            setting,
            seed,
        })
    }
}

/// `sec(π/2p)`, the branch used for `1 < p ≤ 2`.
pub fn sec_branch(p: f64) -> f64 {
    1.0 / (PI / (2.0 * p)).cos()
}

/// `csc(π/2p)`, the branch used for `p ≥ 2`.
pub fn csc_branch(p: f64) -> f64 {
    1.0 / (PI / (2.0 * p)).sin()
}

/// Sharp constant of the classical Riesz inequality on the disk.
pub fn verbitsky_constant(p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(if p <= 2.0 { sec_branch(p) } else { csc_branch(p) })
}

/// `p / (p − 1)`.
pub fn conjugate_exponent(p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(p / (p - 1.0))
}

/// `(|z|², 2 (Re z)² − Re z²)`.
pub fn identity_z(z: Complex64) -> (f64, f64) {
    (z.norm_sqr(), 2.0 * z.re * z.re - (z * z).re)
}

/// A real harmonic function in one of the two representations.
#[derive(Debug, Clone, Copy)]
pub enum RealField<'a> {
    Disk(&'a TrigSeries),
    Grid(&'a GridField),
}

/// An analytic function `F = U + iV`.
#[derive(Debug, Clone, Copy)]
pub enum ComplexField<'a> {
    Disk(&'a TrigSeries),
    Grid { re: &'a GridField, im: &'a GridField },
}

/// Evaluation radii for the disk path of [`proof_majorant_check`].
const CHECK_RADII: [f64; 12] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99];
const CHECK_ANGLES: usize = 32;

/// Minimum of `2 H_U − Re F² − |F|²` over evaluation points: interior nodes
/// on a grid, a polar net on the disk.
pub fn proof_majorant_check(u: RealField<'_>, f: ComplexField<'_>, h_u: &MajorantField) -> Result<f64> {
    if h_u.p() != 2.0 {
        return Err(Error::InvalidParameter(format!(
            "majorant must be of |U|², got p = {}",
            h_u.p()
        )));
    }
    match (u, f, h_u.source()) {
        (RealField::Disk(u), ComplexField::Disk(f), MajorantSource::DiskSpectral) => {
            let m = u.len().max(f.len());
            let re_f = &(f + &reflect_conj(f)) * Complex64::new(0.5, 0.0);
            let defect = (&re_f - &u.padded(m)?).max_abs_coeff();
            if defect > 1e-10 * u.max_abs_coeff().max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "Re F differs from U by {defect:.3e}"
                )));
            }
            let mut worst = f64::INFINITY;
            for &r in &CHECK_RADII {
                for k in 0..CHECK_ANGLES {
                    let theta = 2.0 * PI * k as f64 / CHECK_ANGLES as f64;
                    let fz = poisson_extend(f, r, theta)?;
                    let h = h_u.value_at(Complex64::from_polar(r, theta))?;
                    worst = worst.min(2.0 * h - (fz * fz).re - fz.norm_sqr());
                    if r == 0.0 {
                        break;
                    }
                }
            }
            Ok(worst)
        }
        (RealField::Grid(u), ComplexField::Grid { re, im }, MajorantSource::Grid) => {
            let field = h_u.grid_field().expect("grid source has a field");
            if !(u.same_domain(re) && u.same_domain(im) && u.same_domain(field)) {
                return Err(Error::DomainMismatch);
            }
            let dom = u.domain();
            let defect = dom
                .mask_nodes()
                .map(|id| (re.value(id) - u.value(id)).abs())
                .fold(0.0, f64::max);
            if defect > 1e-10 * u.max_abs().max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "Re F differs from U by {defect:.3e}"
                )));
            }
            Ok(dom
                .interior_nodes()
                .iter()
                .map(|&id| {
                    let fz = Complex64::new(re.value(id), im.value(id));
                    2.0 * field.value(id) - (fz * fz).re - fz.norm_sqr()
                })
                .fold(f64::INFINITY, f64::min))
        }
        _ => Err(Error::DomainMismatch),
    }
}

/// Series of `conj(F(e^{iθ}))`.
fn reflect_conj(f: &TrigSeries) -> TrigSeries {
    let n = f.len();
    let coeffs = (0..n).map(|k| f.coeffs()[(n - k) % n].conj()).collect();
    TrigSeries::new(coeffs).expect("same length")
}

/// Conjugate of a real series normalized so that `V(ζ0) = 0`.
pub fn normalized_disk_conjugate(u: &TrigSeries, zeta0: Complex64) -> Result<TrigSeries> {
    let v = conjugate_series(u)?;
    let at = poisson_extend(&v, zeta0.norm(), zeta0.arg())?.re;
    Ok(&v - &TrigSeries::constant(v.len(), Complex64::new(at, 0.0))?)
}

/// `U + iV`.
pub fn analytic_completion(u: &TrigSeries, v: &TrigSeries) -> TrigSeries {
    u + &(v * Complex64::new(0.0, 1.0))
}

/// Riesz ratio on the unit disk with norms taken at `zeta0`.
pub fn riesz_ratio_disk(u: &TrigSeries, zeta0: Complex64, p: f64) -> Result<RieszReport> {
    check_exponent(p)?;
    if !(zeta0.norm() < 1.0) {
        return Err(Error::OutsideDomain { re: zeta0.re, im: zeta0.im });
    }
    if u.is_zero() {
        return Err(Error::DegenerateZero);
    }
    let v = normalized_disk_conjugate(u, zeta0)?;
    let f = analytic_completion(u, &v);
    let norm_u = disk_majorant_value(u, p, zeta0)?.powf(1.0 / p);
    let norm_f = disk_majorant_value(&f, p, zeta0)?.powf(1.0 / p);
    RieszReport::new(p, norm_u, norm_f, format!("disk-spectral zeta0={zeta0}"), None)
}

/// Riesz ratio on the grid domain of `u`: conjugate, both majorants, both
/// Lumer norms at `zeta0`.
pub fn riesz_ratio_grid(u: &GridField, zeta0: Complex64, p: f64) -> Result<RieszReport> {
    check_exponent(p)?;
    if u.max_abs() == 0.0 {
        return Err(Error::DegenerateZero);
    }
    let conj = conjugate_on_grid(u, zeta0)?;
    let h_u = grid_majorant(u, p)?;
    let h_f = grid_majorant_complex(u, &conj.v, p)?;
    let norm_u = lumer_norm(&h_u, zeta0, p)?;
    let norm_f = lumer_norm(&h_f, zeta0, p)?;
    let setting = format!("{} zeta0={zeta0}", u.domain().describe());
    RieszReport::new(p, norm_u, norm_f, setting, None)
}

/// `U = Re zⁿ` on the disk at `ζ0 = 0`, where the `p = 2` ratio equals `√2`.
pub fn sharpness_family(n: u32) -> Result<RieszReport> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "sharpness family needs n ≥ 1 (U(0) must vanish)".into(),
        ));
    }
    let u = TrigSeries::re_z_power(samples_for_degree(n as usize), n)?;
    let mut report = riesz_ratio_disk(&u, Complex64::new(0.0, 0.0), 2.0)?;
    report.setting = format!("sharpness Re z^{n} zeta0=0");
    Ok(report)
}

/// Real trig polynomial `a_0 + Σ_{k ≤ degree} a_k cos kθ + b_k sin kθ` with
/// independent standard normal coefficients.
pub fn random_real_polynomial(rng: &mut impl rand::Rng, degree: usize) -> TrigSeries {
    let n = samples_for_degree(degree);
    let mut modes = Vec::with_capacity(2 * degree + 1);
    let a0: f64 = StandardNormal.sample(rng);
    modes.push((0i64, Complex64::new(a0, 0.0)));
    for k in 1..=degree as i64 {
        let a: f64 = StandardNormal.sample(rng);
        let b: f64 = StandardNormal.sample(rng);
        let c = Complex64::new(a / 2.0, -b / 2.0);
        modes.push((k, c));
        modes.push((-k, c.conj()));
    }
    TrigSeries::from_modes(n, &modes).expect("degree fits the sample count")
}

/// Generator for trial `trial` of a sweep: one ChaCha stream per trial, so
/// draws do not depend on scheduling.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTrial {
    pub trial: usize,
    pub outcome: std::result::Result<RieszReport, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub p: f64,
    pub trials: usize,
    pub degree_cap: usize,
    pub seed: u64,
    pub max_ratio: Option<f64>,
    pub argmax: Option<usize>,
    pub argmax_description: String,
    pub min_margin: Option<f64>,
    pub errors: usize,
    pub reports: Vec<SweepTrial>,
    pub label: &'static str,
}

/// Random Riesz ratios at `ζ0 = 0` on the disk.
pub fn conjecture_sweep(p: f64, trials: usize, degree_cap: usize, seed: u64) -> Result<SweepSummary> {
    check_exponent(p)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let reports: Vec<SweepTrial> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let u = random_real_polynomial(&mut trial_rng(seed, trial), degree_cap);
            let outcome = riesz_ratio_disk(&u, Complex64::new(0.0, 0.0), p).map(|mut r| {
                r.seed = Some(seed);
                r.setting = format!("disk-spectral zeta0=0 degree<={degree_cap} trial={trial}");
                r
            });
            SweepTrial { trial, outcome }
        })
        .collect();

    let mut best: Option<(usize, f64)> = None;
    let mut min_margin: Option<f64> = None;
    let mut errors = 0;
    for t in &reports {
        match &t.outcome {
            Ok(r) => {
                if best.is_none_or(|(_, m)| r.ratio > m) {
                    best = Some((t.trial, r.ratio));
                }
                min_margin = Some(min_margin.map_or(r.margin, |m: f64| m.min(r.margin)));
            }
            Err(_) => errors += 1,
        }
    }
    let argmax_description = match best {
        Some((t, _)) => format!("trial {t}: random real trig polynomial, degree {degree_cap}, seed {seed}, stream {t}"),
        None => "no successful trial".to_string(),
    };
    Ok(SweepSummary {
        p,
        trials,
        degree_cap,
        seed,
        max_ratio: best.map(|b| b.1),
        argmax: best.map(|b| b.0),
        argmax_description,
        min_margin,
        errors,
        reports,
        label: EXPLORATORY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_spectral::hardy_norm;
    use crate::grid::GridDomain;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn constants() {
        assert!((verbitsky_constant(2.0).unwrap() - 1.414213562373095).abs() <= 1e-15);
        assert!((verbitsky_constant(1.5).unwrap() - 2.0).abs() < 1e-14);
        assert!((verbitsky_constant(3.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((sec_branch(2.0) - csc_branch(2.0)).abs() <= 1e-15);
        assert!(verbitsky_constant(1.0).is_err());
        assert!(verbitsky_constant(f64::INFINITY).is_err());
    }

    #[test]
    fn identity_examples() {
        assert_eq!(identity_z(c(1.0, 1.0)), (2.0, 2.0));
        assert_eq!(identity_z(c(0.0, 1.0)), (1.0, 1.0));
        assert_eq!(identity_z(c(3.0, -4.0)), (25.0, 25.0));
    }

    #[test]
    fn disk_ratio_examples() {
        let re_z = TrigSeries::re_z_power(16, 1).unwrap();
        let r = riesz_ratio_disk(&re_z, c(0.0, 0.0), 2.0).unwrap();
        assert!((r.ratio - 2f64.sqrt()).abs() < 1e-14);
        assert!(r.margin.abs() < 1e-14);

        let one = TrigSeries::constant(16, c(1.0, 0.0)).unwrap();
        let r = riesz_ratio_disk(&one, c(0.0, 0.0), 2.0).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-15);

        let shifted = &one + &re_z;
        let r = riesz_ratio_disk(&shifted, c(0.0, 0.0), 2.0).unwrap();
        assert!((r.ratio - (4.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!(r.ratio < 2f64.sqrt());

        let zero = TrigSeries::zeros(16).unwrap();
        assert_eq!(riesz_ratio_disk(&zero, c(0.0, 0.0), 2.0).unwrap_err(), Error::DegenerateZero);
    }

    #[test]
    fn conjugate_is_normalized_at_base_point() {
        let u = TrigSeries::from_modes(
            16,
            &[(0, c(0.4, 0.0)), (2, c(0.3, -0.2)), (-2, c(0.3, 0.2)), (3, c(0.0, 1.0)), (-3, c(0.0, -1.0))],
        )
        .unwrap();
        let zeta0 = c(0.3, -0.45);
        let v = normalized_disk_conjugate(&u, zeta0).unwrap();
        assert!(poisson_extend(&v, zeta0.norm(), zeta0.arg()).unwrap().norm() < 1e-15);
        let f = analytic_completion(&u, &v);
        // F is analytic: no negative modes.
        for k in 1..8 {
            assert!(f.coeff(-k).norm() < 1e-15);
        }
        // F(ζ0) is real, equal to U(ζ0).
        let fz = poisson_extend(&f, zeta0.norm(), zeta0.arg()).unwrap();
        assert!(fz.im.abs() < 1e-15);
    }

    #[test]
    fn sharpness() {
        for n in 1..=8 {
            let r = sharpness_family(n).unwrap();
            assert!((r.ratio - 2f64.sqrt()).abs() <= 1e-12, "n = {n}: {}", r.ratio);
        }
        assert!(sharpness_family(0).is_err());
    }

    #[test]
    fn parseval_route() {
        let mut rng = trial_rng(3, 0);
        for _ in 0..20 {
            let u = random_real_polynomial(&mut rng, 6);
            let r = riesz_ratio_disk(&u, c(0.0, 0.0), 2.0).unwrap();
            let u0 = u.coeff(0).re;
            let want = 2.0 * hardy_norm(&u, 2.0).unwrap().powi(2) - u0 * u0;
            assert!((r.norm_f.powi(2) - want).abs() <= 1e-10 * want.max(1.0));
        }
    }

    #[test]
    fn proof_majorant_on_disk() {
        let re_z = TrigSeries::re_z_power(16, 1).unwrap();
        let f = analytic_completion(&re_z, &conjugate_series(&re_z).unwrap());
        let h = MajorantField::disk(&re_z, 2.0).unwrap();
        let slack = proof_majorant_check(RealField::Disk(&re_z), ComplexField::Disk(&f), &h).unwrap();
        // Slack is 1 − |z|², smallest at the outermost radius.
        assert!((slack - (1.0 - 0.99f64.powi(2))).abs() < 1e-12, "{slack}");

        let zero = TrigSeries::zeros(16).unwrap();
        let h0 = MajorantField::disk(&zero, 2.0).unwrap();
        let s0 = proof_majorant_check(RealField::Disk(&zero), ComplexField::Disk(&zero), &h0).unwrap();
        assert_eq!(s0, 0.0);

        let u2 = TrigSeries::re_z_power(16, 2).unwrap();
        let f2 = analytic_completion(&u2, &conjugate_series(&u2).unwrap());
        let h2 = MajorantField::disk(&u2, 2.0).unwrap();
        let s2 = proof_majorant_check(RealField::Disk(&u2), ComplexField::Disk(&f2), &h2).unwrap();
        assert!((s2 - (1.0 - 0.99f64.powi(4))).abs() < 1e-12, "{s2}");
    }

    #[test]
    fn proof_majorant_rejects_mismatches() {
        let re_z = TrigSeries::re_z_power(16, 1).unwrap();
        let h = MajorantField::disk(&re_z, 2.0).unwrap();
        let dom = Arc::new(GridDomain::disk(1.0, 0.25).unwrap());
        let g = GridField::from_fn(&dom, |z| z.re).unwrap();
        assert_eq!(
            proof_majorant_check(RealField::Grid(&g), ComplexField::Disk(&re_z), &h).unwrap_err(),
            Error::DomainMismatch
        );
        let h3 = MajorantField::disk(&re_z, 3.0).unwrap();
        assert!(proof_majorant_check(RealField::Disk(&re_z), ComplexField::Disk(&re_z), &h3).is_err());
        // F whose real part is not U.
        let wrong = TrigSeries::re_z_power(16, 2).unwrap();
        assert!(proof_majorant_check(RealField::Disk(&re_z), ComplexField::Disk(&wrong), &h).is_err());
    }

    #[test]
    fn proof_majorant_on_grid() {
        let dom = Arc::new(GridDomain::disk(1.0, 1.0 / 32.0).unwrap());
        let u = GridField::from_fn(&dom, |z| z.re).unwrap();
        let v = conjugate_on_grid(&u, c(0.0, 0.0)).unwrap().v;
        let h = grid_majorant(&u, 2.0).unwrap();
        let slack = proof_majorant_check(RealField::Grid(&u), ComplexField::Grid { re: &u, im: &v }, &h).unwrap();
        assert!(slack >= -1e-10, "{slack}");
    }

    #[test]
    fn grid_ratio_examples() {
        let dom = Arc::new(GridDomain::disk(1.0, 1.0 / 64.0).unwrap());
        let u = GridField::from_fn(&dom, |z| z.re).unwrap();
        let r = riesz_ratio_grid(&u, c(0.0, 0.0), 2.0).unwrap();
        assert!((r.ratio / 2f64.sqrt() - 1.0).abs() < 0.01, "{}", r.ratio);

        let sq = Arc::new(GridDomain::square(2.0, 1.0 / 16.0).unwrap());
        let five = GridField::constant(&sq, 5.0).unwrap();
        let r = riesz_ratio_grid(&five, c(0.1, -0.2), 2.0).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-9, "{}", r.ratio);

        let ann = Arc::new(GridDomain::annulus(0.5, 1.5, 1.0 / 32.0).unwrap());
        let log = GridField::from_fn(&ann, |z| z.norm().ln()).unwrap();
        assert!(matches!(
            riesz_ratio_grid(&log, c(1.0, 0.0), 2.0),
            Err(Error::ExistenceFailure { .. })
        ));

        let zero = GridField::constant(&sq, 0.0).unwrap();
        assert_eq!(riesz_ratio_grid(&zero, c(0.0, 0.0), 2.0).unwrap_err(), Error::DegenerateZero);
    }

    #[test]
    fn sweep_is_deterministic_and_bounded() {
        let a = conjecture_sweep(2.0, 50, 8, 11).unwrap();
        let b = conjecture_sweep(2.0, 50, 8, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.max_ratio.unwrap() <= 2f64.sqrt() + THEOREM_SLACK);
        assert_eq!(a.label, EXPLORATORY);
        assert!(a.reports.iter().all(|t| t.outcome.as_ref().unwrap().seed == Some(11)));
    }

    #[test]
    fn sweep_degree_zero() {
        let s = conjecture_sweep(2.0, 1, 0, 5).unwrap();
        let r = s.reports[0].outcome.as_ref().unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-15);
        assert!(conjecture_sweep(2.0, 0, 4, 5).is_err());
        assert!(conjecture_sweep(0.5, 3, 4, 5).is_err());
    }
}
