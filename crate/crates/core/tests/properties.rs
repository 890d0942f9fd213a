use lumer_core::circle_spectral::{
    analyze, conjugate_series, hardy_norm, integral_mean, synthesize, BoundarySamples, TrigSeries,
};
use lumer_core::conformal_atlas::ConformalMap;
use lumer_core::lumer_majorant::MajorantField;
use lumer_core::riesz_engine::{
    analytic_completion, conjugate_exponent, identity_z, proof_majorant_check, riesz_ratio_disk, verbitsky_constant,
    ComplexField, RealField, THEOREM_SLACK,
};
use num_complex::Complex64;
use proptest::prelude::*;

const N: usize = 32;

/// Real trig polynomial of degree ≤ 8 from `(a_0, [(a_k, b_k)])`.
fn real_series(a0: f64, ab: &[(f64, f64)]) -> TrigSeries {
    let mut modes = vec![(0i64, Complex64::new(a0, 0.0))];
    for (k, &(a, b)) in ab.iter().enumerate() {
        let c = Complex64::new(a / 2.0, -b / 2.0);
        modes.push((k as i64 + 1, c));
        modes.push((-(k as i64 + 1), c.conj()));
    }
    TrigSeries::from_modes(N, &modes).unwrap()
}

fn coeffs() -> impl Strategy<Value = (f64, Vec<(f64, f64)>)> {
    (-2.0..2.0f64, prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..=8))
}

fn disk_point(max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..max, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn synthesize_analyze_round_trip(values in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 16)) {
        let samples = BoundarySamples::new(values.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap();
        let back = synthesize(&analyze(&samples).unwrap());
        for (x, y) in samples.values().iter().zip(back.values()) {
            prop_assert!((x - y).norm() <= 1e-13);
        }
    }

    #[test]
    fn conjugation_is_an_involution_up_to_sign((a0, ab) in coeffs()) {
        let u = real_series(a0, &ab);
        let vv = conjugate_series(&conjugate_series(&u).unwrap()).unwrap();
        let centered = &u - &TrigSeries::constant(N, Complex64::new(a0, 0.0)).unwrap();
        prop_assert!((&vv + &centered).max_abs_coeff() <= 1e-14);
    }

    #[test]
    fn integral_means_increase((a0, ab) in coeffs(), r1 in 0.0..1.0f64, r2 in 0.0..1.0f64, p in 1.1..5.0f64) {
        let u = real_series(a0, &ab);
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        let m_lo = integral_mean(&u, lo, p).unwrap();
        let m_hi = integral_mean(&u, hi, p).unwrap();
        prop_assert!(m_lo <= m_hi * (1.0 + 1e-8) + 1e-12, "{m_lo} > {m_hi}");
    }

    #[test]
    fn parseval((a0, ab) in coeffs()) {
        let u = real_series(a0, &ab);
        let energy: f64 = u.coeffs().iter().map(|c| c.norm_sqr()).sum();
        let h = hardy_norm(&u, 2.0).unwrap();
        prop_assert!((h * h - energy).abs() <= 1e-13 * energy.max(1.0));
    }

    #[test]
    fn identity_holds(re in -1e3..1e3f64, im in -1e3..1e3f64) {
        let (lhs, rhs) = identity_z(Complex64::new(re, im));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1e-300));
    }

    #[test]
    fn constants_are_symmetric(p in 1.01..50.0f64) {
        let q = conjugate_exponent(p).unwrap();
        let (cp, cq) = (verbitsky_constant(p).unwrap(), verbitsky_constant(q).unwrap());
        prop_assert!((cp - cq).abs() <= 1e-12 * cp);
    }

    #[test]
    fn parseval_route_for_the_completion((a0, ab) in coeffs()) {
        let u = real_series(a0, &ab);
        let r = riesz_ratio_disk(&u, Complex64::new(0.0, 0.0), 2.0).unwrap();
        let want = 2.0 * r.norm_u.powi(2) - a0 * a0;
        prop_assert!((r.norm_f.powi(2) - want).abs() <= 1e-12 * want.max(1.0));
    }

    #[test]
    fn disk_ratio_respects_sqrt2((a0, ab) in coeffs(), zeta0 in disk_point(0.9)) {
        let u = real_series(a0, &ab);
        let r = riesz_ratio_disk(&u, zeta0, 2.0).unwrap();
        prop_assert!(r.ratio <= 2f64.sqrt() + THEOREM_SLACK, "{}", r.ratio);
    }

    #[test]
    fn proof_majorant_is_nonnegative((a0, ab) in coeffs()) {
        let u = real_series(a0, &ab);
        let f = analytic_completion(&u, &conjugate_series(&u).unwrap());
        let h = MajorantField::disk(&u, 2.0).unwrap();
        let slack = proof_majorant_check(RealField::Disk(&u), ComplexField::Disk(&f), &h).unwrap();
        prop_assert!(slack >= -1e-10, "{slack}");
    }

    #[test]
    fn mobius_round_trip(a in disk_point(0.95), phi in -3.0..3.0f64, z in disk_point(1.0)) {
        let m = ConformalMap::mobius(a, phi).unwrap();
        let w = m.forward(z).unwrap();
        prop_assert!(w.norm() <= 1.0 + 1e-12);
        prop_assert!((m.inverse(w).unwrap() - z).norm() <= 1e-12);
        let inv = m.inverse_map().unwrap();
        prop_assert!((inv.forward(w).unwrap() - z).norm() <= 1e-12);
    }
}
