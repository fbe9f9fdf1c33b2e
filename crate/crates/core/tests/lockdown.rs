mod common;

use common::{baseline, close, draws, pent_up};
use habitlock::lockdown::{
    classify, pent_up as pent_up_metrics, policy_search, run_unanticipated, Case, EpisodePaths, LockdownEpisode,
    SimSettings,
};
use habitlock::params::compute_thresholds;
use habitlock::runner::DemandState;
use habitlock::{Model, ModelError};
use proptest::prelude::*;

fn paths(m: &Model, t_tilde: f64) -> EpisodePaths {
    EpisodePaths::build(m, &LockdownEpisode::new(t_tilde)).unwrap()
}

#[test]
fn reference_outcomes_by_duration() {
    let m = baseline();
    let settings = SimSettings::default();
    let short = run_unanticipated(&m, &LockdownEpisode::new(7.0), &settings).unwrap();
    assert_eq!(short.classification.case, Case::SatiationShort);
    assert!(short.reopens && short.policy.is_none());

    let long = run_unanticipated(&m, &LockdownEpisode::new(9.0), &settings).unwrap();
    assert_eq!(long.classification.case, Case::SatiationLong);
    assert!((long.p_at_reopen - 2.610035).abs() < 1e-6);
    assert!(long.p_at_reopen < long.p_min);
    assert!(!long.reopens);
    assert!(long.segment("shutdown").is_some());
    let t_u = long.t_underline.unwrap();
    assert!(t_u > 7.0 && t_u < 9.0);
    let plan = long.policy.as_ref().expect("subsidy plan");
    assert!(plan.duration > 0.0 && plan.duration < 0.05);
}

#[test]
fn invalid_episodes_are_rejected() {
    let m = baseline();
    let s = SimSettings::default();
    assert!(run_unanticipated(&m, &LockdownEpisode::new(0.0), &s).is_err());
    assert!(EpisodePaths::build(&m, &LockdownEpisode::new(-1.0)).is_err());

    let mut costly = m;
    costly.technology.tau = 0.5;
    let err = run_unanticipated(&costly, &LockdownEpisode::new(9.0), &s).unwrap_err();
    assert!(matches!(err, ModelError::CounterfactualNotViable { .. }));
}

#[test]
fn reopening_price_falls_with_duration() {
    let m = baseline();
    let mut prev = f64::INFINITY;
    for k in 1..=40 {
        let t = 0.5 * k as f64;
        let p = paths(&m, t).p_after(t);
        assert!(p < prev, "t = {t}");
        prev = p;
    }
}

#[test]
fn no_lockdown_is_recovered_at_zero_duration() {
    let m = baseline();
    let p = paths(&m, 0.0);
    for t in [0.0, 1.0, 10.0] {
        let (a, b) = (p.after.at(t), p.no_lockdown.at(t));
        assert!(close(a.h, b.h, 1e-12) && close(a.b, b.b, 1e-12));
        assert!(close(a.p.unwrap(), b.p.unwrap(), 1e-12));
    }
}

#[test]
fn pent_up_reference_economy() {
    let m = pent_up();
    let ep = LockdownEpisode::new(9.0);
    let pu = pent_up_metrics(&m, &ep).unwrap();
    let p = paths(&m, 9.0);
    assert!((pu.overshoot_pct - 1.6).abs() < 1e-6);
    assert!(pu.sse > 0.0 && pu.dc2 > 0.0);
    assert!(pu.tb_gap < 0.0, "trade balance at reopening should be below its steady state");
    assert_eq!(pu.decay_rate, p.after.steady.psi1);

    // overshoot from the closed forms of the two regimes
    let h0 = m.initial.h0;
    let h_l = p.lockdown.steady.h_star;
    let psi1 = p.after.steady.psi1;
    let expected = pu.sse * (h_l - h0) * (1.0 - (psi1 * 9.0).exp()) / p.p_star();
    assert!(close(pu.overshoot_pct, 100.0 * expected, 1e-10));

    // price gap closes at the stable rate
    for dt in [1.0, 5.0, 20.0] {
        let gap = p.p_after(9.0 + dt) - p.p_star();
        let gap0 = p.p_after(9.0) - p.p_star();
        assert!(close(gap, gap0 * (psi1 * dt).exp(), 1e-10));
    }

    // shift of the inverse demand curve at p*
    let before = DemandState::steady(&p);
    let after = DemandState::at(&p, p.t_reopen);
    let shift = after.demand(&m, p.p_star()) - before.demand(&m, p.p_star());
    assert!(close(shift, pu.dc2, 1e-9), "{shift} vs {}", pu.dc2);
}

#[test]
fn pent_up_needs_a_steady_start() {
    let m = baseline();
    assert!(pent_up_metrics(&m, &LockdownEpisode::new(9.0)).is_err());
}

#[test]
fn pent_up_vanishes_without_a_lockdown() {
    let m = pent_up();
    let pu = pent_up_metrics(&m, &LockdownEpisode::new(0.0)).unwrap();
    assert!(pu.overshoot_pct.abs() < 1e-9 && pu.dc2.abs() < 1e-12 && pu.dc1_pct.abs() < 1e-9);
}

#[test]
fn satiation_gives_an_undershoot() {
    let mut m = pent_up();
    m.utility.a_c2h = -0.2;
    let pu = pent_up_metrics(&m, &LockdownEpisode::new(9.0)).unwrap();
    assert!(pu.sse < 0.0);
    assert!(pu.overshoot_pct < 0.0);
}

#[test]
fn subsidy_plan_restores_the_floor() {
    let m = baseline();
    let settings = SimSettings { dt: 1e-4, horizon: Some(50.0) };
    let res = run_unanticipated(&m, &LockdownEpisode::new(9.0), &settings).unwrap();
    let plan = policy_search(&m, &res, settings.dt).unwrap();
    let p = &res.paths;
    assert!(close(p.p_after(plan.t_reopen), p.p_min, 1e-12));
    assert!(close(plan.t_reopen, 9.0 + plan.duration, 1e-14));
    let sched = &plan.tau_schedule;
    assert!(sched.windows(2).all(|w| w[1].1 <= w[0].1 && w[1].0 > w[0].0));
    assert!(sched.iter().all(|(_, c)| *c >= 0.0));
    assert!(sched.last().unwrap().1.abs() < 1e-12);
    // trapezoid of the schedule against the closed-form total
    let trap: f64 = sched.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum();
    assert!(close(trap, plan.total_reduction, 1e-6));
    // relief makes profit exactly zero inside the window
    let tech = &m.technology;
    let y2 = p.after.steady.y2;
    let (t, cut) = sched[sched.len() / 2];
    assert!((p.p_after(t) * (1.0 - tech.alpha) * y2 - (tech.tau - cut)).abs() < 1e-12);

    let mut hopeless = res.clone();
    hopeless.paths.p_min = p.p_star() + 0.1;
    assert!(matches!(policy_search(&m, &hopeless, 1e-3), Err(ModelError::NeverViable { .. })));

    let short = run_unanticipated(&m, &LockdownEpisode::new(7.0), &settings).unwrap();
    let none = policy_search(&m, &short, 1e-3).unwrap();
    assert_eq!(none.duration, 0.0);
}

/// Case implied by direct comparison of the three prices.
fn oracle_case(p_al: f64, p_star: f64, p_nl: f64) -> Option<Case> {
    if p_al < p_star && p_star < p_nl {
        Some(Case::SatiationLong)
    } else if p_star < p_al && p_al < p_nl {
        Some(Case::SatiationShort)
    } else if p_al > p_star && p_star > p_nl {
        Some(Case::SubstLong)
    } else if p_star > p_al && p_al > p_nl {
        Some(Case::SubstShort)
    } else {
        None
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn stitching_is_continuous(d in draws(), t_tilde in 0.1f64..30.0) {
        let Some(m) = d.admissible() else { return Ok(()) };
        let Ok(p) = EpisodePaths::build(&m, &LockdownEpisode::new(t_tilde)) else { return Ok(()) };
        let (end, start) = (p.lockdown.at(t_tilde), p.after.at(t_tilde));
        prop_assert!(close(end.h, start.h, 1e-12));
        prop_assert!(close(end.b, start.b, 1e-12));
        prop_assert_eq!(p.h_reopen, end.h);
        // the lockdown and the reopening leave the long-run habit level and shadow price unchanged
        prop_assert!(close(p.after.steady.h_star, p.no_lockdown.steady.h_star, 1e-9));
        prop_assert!(close(p.after.steady.lambda, p.no_lockdown.steady.lambda, 1e-9));
        // deviation after reopening follows the habit gap
        let gap = p.h_reopen - p.after.steady.h_star;
        let p_gap = p.p_after(t_tilde) - p.after.steady.p_star.unwrap();
        prop_assert!((p_gap - p.after.price_slope * gap).abs() < 1e-9 * (1.0 + p_gap.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn classification_matches_price_ordering(d in draws(), t_tilde in 0.1f64..40.0) {
        let Some(m) = d.admissible() else { return Ok(()) };
        let ep = LockdownEpisode::new(t_tilde);
        let Ok(p) = EpisodePaths::build(&m, &ep) else { return Ok(()) };
        let c = classify(&m, &ep).unwrap();
        let p_al = p.p_after(t_tilde);
        let p_nl = p.p_no_lockdown(t_tilde);
        let p_star = p.p_star();
        let h_star = p.no_lockdown.steady.h_star;
        let scale = 1e-9 * (1.0 + p_star.abs());
        prop_assume!((p_al - p_star).abs() > scale && (p_nl - p_star).abs() > scale && (p_al - p_nl).abs() > scale);

        if m.initial.h0 >= h_star {
            match c.case {
                Case::SatiationHighHabit => prop_assert!(p_al < p_nl && p_nl <= p_star),
                Case::SubstHighHabit => prop_assert!(p_al > p_nl && p_nl >= p_star),
                other => prop_assert!(false, "unexpected {:?}", other),
            }
        } else {
            prop_assert_eq!(Some(c.case), oracle_case(p_al, p_star, p_nl));
            let psi1 = p.no_lockdown.steady.psi1;
            let bar = compute_thresholds(&m, psi1).unwrap().a_c2h_bar;
            prop_assert_eq!(m.utility.a_c2h < bar, p.after.price_slope < 0.0);
        }
    }
}
