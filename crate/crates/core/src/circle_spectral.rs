//! Fourier analysis on the unit circle.
//!
//! A [`TrigSeries`] stores the coefficients `c_n`, `n ∈ [-N/2, N/2)`, of a
//! trigonometric polynomial in FFT order. Its harmonic extension to the disk
//! is `Σ c_n r^|n| e^{inθ}`. The Nyquist coefficient `c_{-N/2}` is read as the
//! symmetric mode `c cos(Nθ/2)` so that real data stays real under extension
//! and zero padding.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_exponent, Error, Result};

/// Default number of boundary nodes.
pub const DEFAULT_SAMPLES: usize = 256;
/// Largest node count the quadrature refinement will reach.
pub const MAX_SAMPLES: usize = 1 << 16;
/// Successive-refinement tolerance for non-even exponents.
pub const ROUGH_QUADRATURE_TOL: f64 = 1e-9;
/// Successive-refinement tolerance when `|U|^p` is itself a trig polynomial.
pub const SMOOTH_QUADRATURE_TOL: f64 = 1e-13;
/// Conjugate-symmetry defect above which a series counts as complex.
pub const REAL_TOL: f64 = 1e-10;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

fn check_len(n: usize) -> Result<()> {
    if n >= 8 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidSampleCount(n))
    }
}

/// Smallest admissible node count that resolves modes up to `degree` without
/// touching the Nyquist slot.
pub fn samples_for_degree(degree: usize) -> usize {
    (2 * degree + 2).next_power_of_two().max(8)
}

/// Whether `p` is an even integer, i.e. `|U|^p` is again a trig polynomial.
pub(crate) fn is_even_integer(p: f64) -> bool {
    p.fract() == 0.0 && (p as i64) % 2 == 0
}

/// Doubles the node count from `start` until two successive values agree to
/// `tol · max(1, |value|)` or [`MAX_SAMPLES`] is reached.
pub(crate) fn refine(start: usize, tol: f64, mut eval: impl FnMut(usize) -> f64) -> f64 {
    let mut m = start.max(8);
    let mut prev = eval(m);
    while m < MAX_SAMPLES {
        m *= 2;
        let next = eval(m);
        if (next - prev).abs() <= tol * next.abs().max(1.0) {
            return next;
        }
        prev = next;
    }
    prev
}

/// Finite Fourier representation of a function on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries {
    coeffs: Vec<Complex64>,
}

impl TrigSeries {
    /// Builds a series from coefficients in FFT order (index `k` holds mode
    /// `k` for `k < N/2` and mode `k - N` otherwise).
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(coeffs.len())?;
        Ok(Self { coeffs })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn constant(n: usize, c: Complex64) -> Result<Self> {
        Self::from_modes(n, &[(0, c)])
    }

    /// Series with the listed `(mode, coefficient)` pairs; repeated modes add.
    pub fn from_modes(n: usize, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut s = Self::zeros(n)?;
        let half = (n / 2) as i64;
        for &(k, c) in modes {
            if k < -half || k >= half {
                return Err(Error::InvalidParameter(format!(
                    "mode {k} does not fit in a series of length {n}"
                )));
            }
            let idx = s.index(k);
            s.coeffs[idx] += c;
        }
        Ok(s)
    }

    /// `Re(z^k)` restricted to the circle, i.e. `cos kθ`.
    pub fn re_z_power(n: usize, k: u32) -> Result<Self> {
        if k == 0 {
            return Self::constant(n, Complex64::new(1.0, 0.0));
        }
        let half = Complex64::new(0.5, 0.0);
        Self::from_modes(n, &[(k as i64, half), (-(k as i64), half)])
    }

    /// Samples `f` at the `n` uniform nodes and interpolates.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        analyze(&BoundarySamples::from_fn(n, f)?)
    }

    /// Number of coefficients `N`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn index(&self, mode: i64) -> usize {
        let n = self.len() as i64;
        mode.rem_euclid(n) as usize
    }

    fn mode_of(&self, idx: usize) -> i64 {
        let n = self.len();
        if idx < n / 2 {
            idx as i64
        } else {
            idx as i64 - n as i64
        }
    }

    /// Coefficient of `e^{i mode θ}`; zero outside `[-N/2, N/2)`.
    pub fn coeff(&self, mode: i64) -> Complex64 {
        let half = (self.len() / 2) as i64;
        if mode < -half || mode >= half {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[self.index(mode)]
        }
    }

    /// `(mode, coefficient)` pairs in FFT order.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.mode_of(i), c))
    }

    /// Largest `|n|` with a non-zero coefficient.
    pub fn degree(&self) -> usize {
        self.modes()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(k, _)| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest violation of `c_{-n} = conj(c_n)`.
    pub fn real_defect(&self) -> f64 {
        let n = self.len();
        let mut defect = self.coeffs[0].im.abs().max(self.coeffs[n / 2].im.abs());
        for k in 1..n / 2 {
            defect = defect.max((self.coeffs[n - k] - self.coeffs[k].conj()).norm());
        }
        defect
    }

    pub fn is_real(&self) -> bool {
        self.real_defect() <= REAL_TOL * self.max_abs_coeff().max(1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// Zero-padded copy with `m ≥ N` coefficients.
    pub fn padded(&self, m: usize) -> Result<Self> {
        check_len(m)?;
        if m < self.len() {
            return Err(Error::InvalidParameter(format!(
                "cannot pad a series of length {} down to {m}",
                self.len()
            )));
        }
        Ok(Self {
            coeffs: self.scaled_spectrum(1.0, m),
        })
    }

    /// Spectrum of `U_r` laid out for an `m`-point transform (`m ≥ N`).
    fn scaled_spectrum(&self, r: f64, m: usize) -> Vec<Complex64> {
        let n = self.len();
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        for (k, c) in self.modes() {
            let c = c * r.powi(k.unsigned_abs() as i32);
            if k == -((n / 2) as i64) && m > n {
                out[(m as i64 + k) as usize] += c * 0.5;
                out[(-k) as usize] += c * 0.5;
            } else {
                out[k.rem_euclid(m as i64) as usize] += c;
            }
        }
        out
    }

    /// Values of `U_r` at `m` uniform nodes, `m ≥ N` a power of two.
    pub fn sample_at_radius(&self, r: f64, m: usize) -> Result<Vec<Complex64>> {
        check_len(m)?;
        if m < self.len() {
            return Err(Error::InvalidSampleCount(m));
        }
        let mut buf = self.scaled_spectrum(r, m);
        plan(m, true).process(&mut buf);
        Ok(buf)
    }

    /// Value on the circle at angle `theta`.
    pub fn boundary_value(&self, theta: f64) -> Complex64 {
        self.extension(1.0, theta)
    }

    fn extension(&self, r: f64, theta: f64) -> Complex64 {
        let nyq = -((self.len() / 2) as i64);
        self.modes()
            .map(|(k, c)| {
                let weight = c * r.powi(k.unsigned_abs() as i32);
                if k == nyq {
                    weight * (k as f64 * theta).cos()
                } else {
                    weight * Complex64::from_polar(1.0, k as f64 * theta)
                }
            })
            .sum()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let m = self.len().max(other.len());
        let a = self.scaled_spectrum(1.0, m);
        let b = other.scaled_spectrum(1.0, m);
        Self {
            coeffs: a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect(),
        }
    }
}

impl Add for &TrigSeries {
    type Output = TrigSeries;
    fn add(self, rhs: &TrigSeries) -> TrigSeries {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &TrigSeries {
    type Output = TrigSeries;
    fn sub(self, rhs: &TrigSeries) -> TrigSeries {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<Complex64> for &TrigSeries {
    type Output = TrigSeries;
    fn mul(self, rhs: Complex64) -> TrigSeries {
        TrigSeries {
            coeffs: self.coeffs.iter().map(|&c| c * rhs).collect(),
        }
    }
}

impl Neg for &TrigSeries {
    type Output = TrigSeries;
    fn neg(self) -> TrigSeries {
        self * Complex64::new(-1.0, 0.0)
    }
}

/// Samples at `θ_k = 2πk/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySamples {
    values: Vec<Complex64>,
}

impl BoundarySamples {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        check_len(values.len())?;
        Ok(Self { values })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        check_len(n)?;
        Ok(Self {
            values: nodes(n).map(f).collect(),
        })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Uniform nodes `2πk/n`.
pub fn nodes(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| 2.0 * PI * k as f64 / n as f64)
}

/// Discrete Fourier transform of boundary samples: the interpolating series.
pub fn analyze(samples: &BoundarySamples) -> Result<TrigSeries> {
    let n = samples.len();
    check_len(n)?;
    let mut buf = samples.values.clone();
    plan(n, false).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    TrigSeries::new(buf)
}

/// Values of the series at its own `N` nodes.
pub fn synthesize(series: &TrigSeries) -> BoundarySamples {
    let mut buf = series.coeffs.clone();
    plan(buf.len(), true).process(&mut buf);
    BoundarySamples { values: buf }
}

/// Harmonic extension `Σ c_n r^|n| e^{inθ}` at the point `r e^{iθ}`.
pub fn poisson_extend(series: &TrigSeries, r: f64, theta: f64) -> Result<Complex64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::RadiusOutOfRange { r, range: "[0, 1)" });
    }
    if r == 0.0 {
        return Ok(series.coeff(0));
    }
    Ok(series.extension(r, theta))
}

/// Harmonic conjugate normalized to vanish at the origin: multiplier
/// `-i sgn(n)`, with the mean and Nyquist modes removed.
pub fn conjugate_series(series: &TrigSeries) -> Result<TrigSeries> {
    if !series.is_real() {
        return Err(Error::NotRealValued(series.real_defect()));
    }
    let minus_i = Complex64::new(0.0, -1.0);
    let n = series.len();
    let coeffs = series
        .modes()
        .map(|(k, c)| {
            if k == 0 || k == -((n / 2) as i64) {
                Complex64::new(0.0, 0.0)
            } else {
                minus_i * (k.signum() as f64) * c
            }
        })
        .collect();
    TrigSeries::new(coeffs)
}

/// Poisson kernel `(1 - |ζ|²) / |e^{iθ} - ζ|²`.
pub fn poisson_kernel(zeta: Complex64, theta: f64) -> f64 {
    (1.0 - zeta.norm_sqr()) / (Complex64::from_polar(1.0, theta) - zeta).norm_sqr()
}

/// Trapezoid rule for `∫ P(ζ, θ) g(θ) dθ/2π` with `g` given at uniform nodes.
pub fn poisson_quadrature(values: &[f64], zeta: Complex64) -> f64 {
    let m = values.len();
    if zeta == Complex64::new(0.0, 0.0) {
        return values.iter().sum::<f64>() / m as f64;
    }
    nodes(m)
        .zip(values)
        .map(|(t, g)| poisson_kernel(zeta, t) * g)
        .sum::<f64>()
        / m as f64
}

fn mean_power(series: &TrigSeries, r: f64, p: f64, m: usize) -> f64 {
    let samples = series
        .sample_at_radius(r, m)
        .expect("refinement keeps m admissible");
    let sum: f64 = samples.iter().map(|z| z.norm().powf(p)).sum();
    sum / m as f64
}

/// First node count at which the quadrature of `|U|^p` is exact when `p` is
/// an even integer (bandwidth `p · degree`).
pub(crate) fn exact_start(series: &TrigSeries, p: f64) -> usize {
    let n = series.len();
    if is_even_integer(p) && p <= 64.0 {
        let bandwidth = (p as usize) * series.degree();
        n.max((bandwidth + 1).next_power_of_two())
    } else {
        n
    }
}

pub(crate) fn quadrature_tol(p: f64) -> f64 {
    if is_even_integer(p) {
        SMOOTH_QUADRATURE_TOL
    } else {
        ROUGH_QUADRATURE_TOL
    }
}

/// `M_p(U, r)`: the normalized `L^p` mean of `U_r` over the circle.
pub fn integral_mean(series: &TrigSeries, r: f64, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::RadiusOutOfRange { r, range: "[0, 1]" });
    }
    if series.is_zero() {
        return Ok(0.0);
    }
    if r == 0.0 {
        return Ok(series.coeff(0).norm());
    }
    let mean = if p == 2.0 {
        let m = (2 * series.degree() + 1).next_power_of_two().max(series.len());
        mean_power(series, r, p, m)
    } else {
        refine(exact_start(series, p), quadrature_tol(p), |m| {
            mean_power(series, r, p, m)
        })
    };
    Ok(mean.powf(1.0 / p))
}

/// Hardy norm of a trigonometric polynomial: the integral mean at `r = 1`.
pub fn hardy_norm(series: &TrigSeries, p: f64) -> Result<f64> {
    integral_mean(series, 1.0, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn analyze_constant() {
        let s = analyze(&BoundarySamples::from_fn(8, |_| c(1.0, 0.0)).unwrap()).unwrap();
        close(s.coeff(0).re, 1.0, 1e-15);
        for k in -4..4 {
            if k != 0 {
                assert!(s.coeff(k).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn analyze_cosine() {
        let s = TrigSeries::from_fn(8, |t| c(t.cos(), 0.0)).unwrap();
        assert!((s.coeff(1) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((s.coeff(-1) - c(0.5, 0.0)).norm() < 1e-15);
        assert!(s.coeff(0).norm() < 1e-15);
    }

    #[test]
    fn analyze_exponential_mode() {
        let s = TrigSeries::from_fn(16, |t| Complex64::from_polar(1.0, 3.0 * t)).unwrap();
        for (k, v) in s.modes() {
            let want = if k == 3 { 1.0 } else { 0.0 };
            assert!((v - c(want, 0.0)).norm() < 1e-14, "mode {k}: {v}");
        }
    }

    #[test]
    fn rejects_bad_lengths() {
        assert_eq!(
            BoundarySamples::new(vec![c(0.0, 0.0); 12]).unwrap_err(),
            Error::InvalidSampleCount(12)
        );
        assert_eq!(
            TrigSeries::zeros(4).unwrap_err(),
            Error::InvalidSampleCount(4)
        );
    }

    #[test]
    fn poisson_examples() {
        let cos1 = TrigSeries::re_z_power(16, 1).unwrap();
        close(poisson_extend(&cos1, 0.5, 0.0).unwrap().re, 0.5, 1e-15);
        let one = TrigSeries::constant(16, c(1.0, 0.0)).unwrap();
        close(poisson_extend(&one, 0.7, 1.3).unwrap().re, 1.0, 1e-15);
        let cos2 = TrigSeries::re_z_power(16, 2).unwrap();
        close(poisson_extend(&cos2, 0.5, PI / 4.0).unwrap().re, 0.0, 1e-15);
        assert!(matches!(
            poisson_extend(&one, 1.0, 0.0),
            Err(Error::RadiusOutOfRange { .. })
        ));
        assert!(poisson_extend(&one, -0.1, 0.0).is_err());
    }

    #[test]
    fn nyquist_mode_extends_as_cosine() {
        let s = TrigSeries::from_modes(8, &[(-4, c(1.0, 0.0))]).unwrap();
        let v = poisson_extend(&s, 0.5, 0.3).unwrap();
        close(v.re, 0.5f64.powi(4) * (4.0f64 * 0.3).cos(), 1e-15);
        close(v.im, 0.0, 1e-15);
        let padded = s.padded(32).unwrap();
        assert!(padded.is_real());
        close(padded.boundary_value(0.3).re, (4.0f64 * 0.3).cos(), 1e-14);
    }

    #[test]
    fn conjugate_examples() {
        let cos1 = TrigSeries::re_z_power(16, 1).unwrap();
        let sin1 = TrigSeries::from_fn(16, |t| c(t.sin(), 0.0)).unwrap();
        let v = conjugate_series(&cos1).unwrap();
        assert!((&v - &sin1).max_abs_coeff() < 1e-15);

        let k = TrigSeries::constant(16, c(3.0, 0.0)).unwrap();
        assert!(conjugate_series(&k).unwrap().is_zero());

        let u = &TrigSeries::re_z_power(16, 2).unwrap() + &k;
        let sin2 = TrigSeries::from_fn(16, |t| c((2.0 * t).sin(), 0.0)).unwrap();
        assert!((&conjugate_series(&u).unwrap() - &sin2).max_abs_coeff() < 1e-15);
    }

    #[test]
    fn conjugate_rejects_complex_series() {
        let z = TrigSeries::from_modes(16, &[(1, c(1.0, 0.0))]).unwrap();
        assert!(matches!(conjugate_series(&z), Err(Error::NotRealValued(_))));
    }

    #[test]
    fn integral_mean_examples() {
        let re_z = TrigSeries::re_z_power(16, 1).unwrap();
        close(integral_mean(&re_z, 0.8, 2.0).unwrap(), 0.8 / 2f64.sqrt(), 1e-15);
        let k = TrigSeries::constant(16, c(-2.5, 0.0)).unwrap();
        for p in [1.5, 2.0, 3.7] {
            for r in [0.0, 0.4, 1.0] {
                close(integral_mean(&k, r, p).unwrap(), 2.5, 1e-14);
            }
        }
        let z3 = TrigSeries::from_modes(16, &[(3, c(1.0, 0.0))]).unwrap();
        close(integral_mean(&z3, 0.5, 2.0).unwrap(), 0.125, 1e-15);
        assert!(matches!(
            integral_mean(&k, 0.5, 1.0),
            Err(Error::InvalidExponent(_))
        ));
        assert!(integral_mean(&k, 1.2, 2.0).is_err());
    }

    #[test]
    fn hardy_norm_examples() {
        let re_z = TrigSeries::re_z_power(16, 1).unwrap();
        close(hardy_norm(&re_z, 2.0).unwrap(), 0.5f64.sqrt(), 1e-15);
        let one = TrigSeries::constant(16, c(1.0, 0.0)).unwrap();
        close(hardy_norm(&one, 3.0).unwrap(), 1.0, 1e-15);
        let one_plus_z = TrigSeries::from_modes(16, &[(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
        close(hardy_norm(&one_plus_z, 2.0).unwrap(), 2f64.sqrt(), 1e-15);
        assert!(hardy_norm(&one, 0.5).is_err());
    }

    #[test]
    fn non_even_exponent_matches_closed_form() {
        // ∫|cos θ|^p dθ/2π = Γ((p+1)/2) / (√π Γ(p/2+1)); for p = 3 this is 4/(3π).
        let re_z = TrigSeries::re_z_power(16, 1).unwrap();
        let m3 = hardy_norm(&re_z, 3.0).unwrap();
        close(m3, (4.0 / (3.0 * PI)).powf(1.0 / 3.0), 1e-10);
    }

    #[test]
    fn mean_value_at_origin() {
        let s = TrigSeries::from_modes(16, &[(0, c(0.3, 0.0)), (2, c(1.0, 2.0)), (-2, c(1.0, -2.0))])
            .unwrap();
        assert_eq!(poisson_extend(&s, 0.0, 1.0).unwrap(), s.coeff(0));
    }

    #[test]
    fn sampling_agrees_with_direct_sum() {
        let s = TrigSeries::from_modes(16, &[(1, c(0.2, -0.4)), (-3, c(1.0, 0.5)), (-8, c(0.3, 0.0))])
            .unwrap();
        let r = 0.7;
        let samples = s.sample_at_radius(r, 64).unwrap();
        for (t, v) in nodes(64).zip(&samples) {
            assert!((s.extension(r, t) - v).norm() < 1e-14);
        }
    }
}
