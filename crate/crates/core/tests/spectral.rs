mod common;

use common::{baseline, close, draws};
use habitlock::equilibrium::lq_spectrum;
use habitlock::params::validate_concavity;
use habitlock::spectral::{addiction_or_satiation, eigenvalues, system_matrix, DynamicRegime, HabitEffect};
use nalgebra::Matrix2;
use proptest::prelude::*;

#[test]
fn reference_roots_and_concavity() {
    let m = baseline();
    let sd = lq_spectrum(&m).unwrap();
    assert!((sd.psi1 + 0.0867878).abs() < 1e-6, "{}", sd.psi1);
    assert!((sd.psi2 - 0.0967878).abs() < 1e-6, "{}", sd.psi2);
    assert_eq!(sd.regime, DynamicRegime::SaddleReal);
    assert_eq!(addiction_or_satiation(&sd), HabitEffect::Addictive);

    let c = validate_concavity(&m.utility);
    assert!((c.minor_c1h - 0.64).abs() < 1e-12);
    assert!((c.hessian_det + 0.576).abs() < 1e-12);
    assert!(c.passed());
}

#[test]
fn complex_pair_is_flagged() {
    // strong positive c1-h complementarity pushes the discriminant negative
    let sd = eigenvalues(-1.0, 5.0, -30.0, 1.0, 0.5).unwrap();
    if sd.discriminant < 0.0 {
        assert_eq!(sd.regime, DynamicRegime::ComplexUnstable);
        assert!(sd.imag > 0.0);
        assert!(close(sd.psi1, 0.25, 1e-14));
    } else {
        assert!(sd.psi1 * sd.psi2 >= 0.0 || sd.is_saddle());
    }
}

#[test]
fn positive_curvature_breaks_the_saddle() {
    let sd = eigenvalues(-1.0, 0.8, -0.1, 0.1, 0.01).unwrap();
    assert!(!sd.is_saddle());
}

#[test]
fn non_negative_own_curvature_is_rejected() {
    assert!(eigenvalues(0.0, 0.0, -1.0, 0.1, 0.01).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn roots_match_a_generic_eigen_solver(u11 in -3.0f64..-0.05, u1h in -2.0f64..2.0, uhh in -3.0f64..-0.05,
                                           phi in 0.01f64..2.0, rho in 0.001f64..0.2) {
        let sd = eigenvalues(u11, u1h, uhh, phi, rho).unwrap();
        let a = system_matrix(u11, u1h, uhh, phi, rho);
        let mat = Matrix2::new(a[0][0], a[0][1], a[1][0], a[1][1]);
        let ev = mat.complex_eigenvalues();
        let (mut re, im) = ([ev[0].re, ev[1].re], ev[0].im.abs());
        re.sort_by(f64::total_cmp);

        // trace and determinant identities
        prop_assert!(close(sd.psi1 + sd.psi2, mat.trace(), 1e-10));
        if sd.imag == 0.0 {
            prop_assert!(close(sd.psi1 * sd.psi2, mat.determinant(), 1e-9));
            prop_assert!(close(sd.psi1, re[0], 1e-7) && close(sd.psi2, re[1], 1e-7));
        } else {
            prop_assert!(close(sd.imag, im, 1e-7));
            prop_assert_eq!(sd.regime, DynamicRegime::ComplexUnstable);
        }
        prop_assert!(sd.psi1 <= sd.psi2);
        prop_assert_eq!(sd.is_saddle(), sd.imag == 0.0 && sd.psi1 < 0.0 && sd.psi2 > 0.0);

        // stable eigenvector (co-state per habit unit, 1)
        if sd.is_saddle() {
            let v = [sd.eigvec_ratio, 1.0];
            let av = [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]];
            let scale = 1.0 + v[0].abs();
            prop_assert!((av[0] - sd.psi1 * v[0]).abs() < 1e-9 * scale);
            prop_assert!((av[1] - sd.psi1 * v[1]).abs() < 1e-9 * scale);
            prop_assert_eq!(addiction_or_satiation(&sd) == HabitEffect::Addictive, phi + sd.psi1 > 0.0);
        }
    }

    #[test]
    fn drawn_economies_have_consistent_spectra(d in draws()) {
        let m = d.model();
        if let Ok(sd) = lq_spectrum(&m) {
            let u = &m.utility;
            let h = &m.household;
            let direct = eigenvalues(u.a_c1c1, u.a_c1h, u.a_hh, h.phi, h.rho).unwrap();
            prop_assert_eq!(sd.psi1, direct.psi1);
        }
    }
}
