mod common;

use common::{baseline, close, draws};
use habitlock::equilibrium::{lq_spectrum, lq_steady_state_unchecked, steady_state_lq};
use habitlock::params::{compute_thresholds, price_floor, wages_and_profits, SectorRegime};
use habitlock::ModelError;
use proptest::prelude::*;

#[test]
fn reference_thresholds() {
    let m = baseline();
    let psi1 = lq_spectrum(&m).unwrap().psi1;
    let th = compute_thresholds(&m, psi1).unwrap();
    assert!((th.a_c1h_bar - 1.0).abs() < 1e-12);
    assert!((th.a_c1_lower - 0.325835).abs() < 1e-6);
    assert!((th.a_c2h_bar + 0.0396366).abs() < 1e-7);
    assert!((th.b0_lower + 60.874686).abs() < 1e-5);
    assert!((th.b0_upper - 26.2037076).abs() < 1e-6);
    assert!((th.a_c2_lower - 0.99940).abs() < 1e-5);
    assert!((th.h0_lower + 18.6959).abs() < 1e-4);
    assert!((th.p_min - 2.6100377).abs() < 1e-7);

    let out = m.outputs(SectorRegime::TwoSector);
    assert!((out.y1 - 0.6156).abs() < 5e-5 && (out.y2 - 0.6156).abs() < 5e-5);
    let (_, profit) = wages_and_profits(th.p_min, 0.5, &m.technology);
    assert!(profit.abs() < 1e-14);
}

#[test]
fn zero_fixed_cost_gives_zero_floor() {
    let mut m = baseline();
    m.technology.tau = 0.0;
    assert_eq!(price_floor(&m.technology, 0.6), 0.0);
}

#[test]
fn saddle_violation_is_reported() {
    let mut m = baseline();
    m.utility.a_c1h = 1.2;
    let err = compute_thresholds(&m, -0.05).unwrap_err();
    assert!(matches!(err, ModelError::NotSaddle { .. }));
}

#[test]
fn restriction_names_are_reported() {
    let m = baseline();
    let out = m.outputs(SectorRegime::TwoSector);
    let psi1 = lq_spectrum(&m).unwrap().psi1;
    let th = compute_thresholds(&m, psi1).unwrap();
    let err = steady_state_lq(&m, out, psi1, th.b0_upper + 1.0, m.initial.h0).unwrap_err();
    assert!(matches!(err, ModelError::Restriction { threshold: "b0_upper", .. }));
    let err = steady_state_lq(&m, out, psi1, th.b0_lower - 1.0, m.initial.h0).unwrap_err();
    assert!(matches!(err, ModelError::Restriction { threshold: "b0_lower", .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Each threshold is where the corresponding steady-state quantity crosses zero.
    #[test]
    fn thresholds_are_zero_crossings(d in draws()) {
        let m = d.model();
        prop_assume!(m.validate().is_ok());
        let Ok(sd) = lq_spectrum(&m) else { return Ok(()) };
        prop_assume!(sd.is_saddle());
        let Ok(th) = compute_thresholds(&m, sd.psi1) else { return Ok(()) };
        let out = m.outputs(SectorRegime::TwoSector);
        let (b0, h0) = (m.initial.b0, m.initial.h0);

        let at_lower = lq_steady_state_unchecked(&m, out, sd.psi1, th.b0_lower, h0);
        prop_assert!(at_lower.h_star.abs() < 1e-9 * (1.0 + th.b0_lower.abs()));
        let at_upper = lq_steady_state_unchecked(&m, out, sd.psi1, th.b0_upper, h0);
        prop_assert!(at_upper.lambda.abs() < 1e-9 * (1.0 + th.b0_upper.abs()));
        // the habit threshold is stated for an economy without initial assets
        let at_h0 = lq_steady_state_unchecked(&m, out, sd.psi1, 0.0, th.h0_lower);
        prop_assert!(at_h0.lambda.abs() < 1e-8 * (1.0 + th.h0_lower.abs()));

        let mut shifted = m;
        shifted.utility.a_c1 = th.a_c1_lower;
        let s = lq_steady_state_unchecked(&shifted, out, sd.psi1, b0, h0);
        prop_assert!(s.m0.abs() < 1e-12);

        let mut floor = m;
        floor.utility.a_c2 = th.a_c2_lower;
        let s = lq_steady_state_unchecked(&floor, out, sd.psi1, b0, h0);
        if s.lambda.abs() > 1e-3 {
            prop_assert!(close(s.p_star.unwrap(), th.p_min, 1e-8), "{:?} {}", s.p_star, th.p_min);
        }
    }
}
