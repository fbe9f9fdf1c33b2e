mod common;

use common::{baseline, close, draws};
use habitlock::labor_shift::{
    compare_steady_states, decompose, steady_price_partials, price_after_shift, run_shift, Convergence, Guarantee,
};
use habitlock::lockdown::{EpisodePaths, LockdownEpisode, SimSettings};
use habitlock::Model;
use proptest::prelude::*;

/// Richardson-extrapolated central difference.
fn richardson(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn strong_satiation() -> Model {
    let mut m = baseline();
    m.utility.a_c2 = 1.4;
    m.utility.a_c2c2 = -2.4;
    m.utility.a_c1c2 = 0.4;
    m.utility.a_c2h = -0.5;
    m
}

#[test]
fn decomposition_matches_finite_differences() {
    let m = baseline();
    let ep = LockdownEpisode::new(9.0);
    let p = EpisodePaths::build(&m, &ep).unwrap();
    for t in [9.0, 12.0, 30.0] {
        let d = decompose(&m, &ep, 0.5, 0.5, t, 0.0).unwrap();
        let num = richardson(|xi| price_after_shift(&m, xi, p.t_reopen, p.b_reopen, p.h_reopen, t), 0.5, 1e-5);
        assert!(close(d.lce, num, 1e-6), "t = {t}: {} vs {num}", d.lce);
    }
}

#[test]
fn no_shift_leaves_only_the_habit_term() {
    let m = baseline();
    let d = decompose(&m, &LockdownEpisode::new(9.0), 0.5, 0.5, 9.0, 0.01).unwrap();
    assert_eq!(d.d_xi, 0.0);
    assert!(close(d.dp, d.sse * 0.01, 1e-15));
}

#[test]
fn sign_of_the_composition_effect() {
    let ep = LockdownEpisode::new(9.0);
    let sat = strong_satiation();
    let d = decompose(&sat, &ep, 0.5, 0.65, 9.0, 0.0).unwrap();
    assert!(d.lce < 0.0 && d.sse < 0.0, "{d:?}");

    let mut sub = baseline();
    sub.utility.a_c2h = 0.0;
    let d = decompose(&sub, &ep, 0.5, 0.65, 9.0, 0.0).unwrap();
    assert!(d.lce > 0.0 && d.sse > 0.0, "{d:?}");
}

#[test]
fn reference_shift_raises_the_steady_price() {
    let m = baseline();
    let cmp = compare_steady_states(&m, 0.5, 0.65).unwrap();
    assert_eq!(cmp.guarantee, Some(Guarantee::PStarRises));
    assert!(cmp.p_star_al > cmp.p_star_bl);
    assert!(!cmp.strong_satiation);

    let run = run_shift(&m, &LockdownEpisode::new(9.0), 0.65, &SimSettings::default()).unwrap();
    assert_eq!(run.direction, Convergence::FromAbove);
    let last = run.after.p.last().unwrap().unwrap();
    assert!((last - run.p_star_al).abs() < 1e-3 * (run.p_reopen - run.p_star_al).abs());
}

/// Satiation-dominated economy starting above its lockdown habit level.
fn high_habit_satiation() -> Model {
    let mut m = baseline();
    let u = &mut m.utility;
    u.a_c1 = 2.2;
    u.a_c2 = 0.77;
    u.a_c2c2 = -0.44;
    u.a_c1c2 = 0.27;
    u.a_c1h = 0.015;
    u.a_c2h = -0.5;
    u.a_hh = -1.15;
    m.household.phi = 0.45;
    m.household.rho = 0.02;
    m.household.r = 0.02;
    m.technology.tau = 0.09;
    m.with_initial(-2.5, 1.8)
}

#[test]
fn short_lockdowns_leave_the_shifted_price_below() {
    let m = high_habit_satiation();
    let xi_new = m.technology.reallocated_share();
    let cmp = compare_steady_states(&m, 0.5, xi_new).unwrap();
    assert!(m.initial.h0 > cmp.h_star_l && cmp.i_cross > 0.0 && cmp.strong_satiation);
    assert!(cmp.p_star_bl > 0.0);
    let t_u = cmp.t_underline_shift.expect("threshold");
    let gap = |t: f64| {
        let ep = LockdownEpisode::new(t);
        let p = EpisodePaths::build(&m, &ep).unwrap();
        let run = run_shift(&m, &ep, xi_new, &SimSettings { dt: 1.0, horizon: Some(t + 1.0) }).unwrap();
        run.p_reopen - p.p_no_lockdown(t)
    };
    for k in 1..10 {
        let t = t_u * k as f64 / 10.0;
        assert!(gap(t) < 0.0, "t = {t}");
    }
    assert!(gap(t_u).abs() < 1e-9);
    assert!(gap(1.5 * t_u) > 0.0);
}

#[test]
fn price_partials_match_finite_differences() {
    let m = baseline();
    let parts = steady_price_partials(&m, 0.5, 0.5 + 1e-9, 1).unwrap();
    let psi1 = habitlock::equilibrium::lq_spectrum(&m).unwrap().psi1;
    let p_star = |y1: f64, y2: f64| {
        let out = habitlock::params::Outputs { y1, y2 };
        habitlock::equilibrium::lq_steady_state_unchecked(&m, out, psi1, m.initial.b0, m.initial.h0)
            .p_star
            .unwrap()
    };
    let out = m.outputs(habitlock::params::SectorRegime::TwoSector);
    let d1 = richardson(|y| p_star(y, out.y2), out.y1, 1e-5);
    let d2 = richardson(|y| p_star(out.y1, y), out.y2, 1e-5);
    assert!(close(parts.min_dp_dy1, d1, 1e-6), "{} vs {d1}", parts.min_dp_dy1);
    assert!(close(parts.max_dp_dy2, d2, 1e-6), "{} vs {d2}", parts.max_dp_dy2);
}

#[test]
fn null_shift_degenerates() {
    let m = baseline();
    let cmp = compare_steady_states(&m, 0.5, 0.5).unwrap();
    assert_eq!(cmp.p_star_al, cmp.p_star_bl);
    assert!(cmp.t_underline_shift.is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sufficient_condition_implies_higher_steady_price(d in draws(), xi_new in 0.52f64..0.8) {
        let Some(m) = d.admissible() else { return Ok(()) };
        let Ok(cmp) = compare_steady_states(&m, 0.5, xi_new) else { return Ok(()) };
        prop_assume!(cmp.lambda_al > 0.0 && cmp.lambda_nl > 0.0);
        if cmp.guarantee.is_some() {
            prop_assert!(cmp.p_star_al > cmp.p_star_bl, "{cmp:?}");
            let parts = steady_price_partials(&m, 0.5, xi_new, 50).unwrap();
            prop_assert!(parts.max_dp_dy2 < 0.0 && parts.min_dp_dy1 > 0.0, "{parts:?}");
        }
    }

    #[test]
    fn decomposition_closure_on_drawn_economies(d in draws(), t_extra in 0.0f64..20.0) {
        let Some(m) = d.admissible() else { return Ok(()) };
        let ep = LockdownEpisode::new(5.0);
        let Ok(p) = EpisodePaths::build(&m, &ep) else { return Ok(()) };
        let t = 5.0 + t_extra;
        let Ok(dec) = decompose(&m, &ep, 0.5, 0.5, t, 0.0) else { return Ok(()) };
        let num = richardson(|xi| price_after_shift(&m, xi, p.t_reopen, p.b_reopen, p.h_reopen, t), 0.5, 1e-5);
        prop_assume!(num.is_finite() && p.after.steady.lambda > 1e-2);
        prop_assert!((dec.lce - num).abs() < 1e-5 * (1.0 + num.abs()), "{} vs {num}", dec.lce);
    }

    /// With the share moved to its lockdown value, the shifted and unshifted
    /// prices at reopening coincide at the threshold duration.
    #[test]
    fn short_run_threshold_equates_reopening_prices(d in draws(), scale in 1.0f64..2.5) {
        let mut d = d;
        d.h0 *= scale;
        let Some(m) = d.admissible() else { return Ok(()) };
        let xi_new = m.technology.reallocated_share();
        let Ok(cmp) = compare_steady_states(&m, 0.5, xi_new) else { return Ok(()) };
        let Some(t_u) = cmp.t_underline_shift else { return Ok(()) };
        prop_assume!(t_u > 0.01 && t_u < 200.0);
        let ep = LockdownEpisode::new(t_u);
        let Ok(p) = EpisodePaths::build(&m, &ep) else { return Ok(()) };
        let Ok(run) = run_shift(&m, &ep, xi_new, &SimSettings { dt: 1.0, horizon: Some(t_u + 1.0) }) else { return Ok(()) };
        let p_nl = p.p_no_lockdown(t_u);
        prop_assert!(close(run.p_reopen, p_nl, 1e-8), "{} vs {p_nl}", run.p_reopen);
    }
}
