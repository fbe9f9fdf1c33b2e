//! Unanticipated lockdown episodes: stitching, outcome taxonomy, pent-up
//! demand and the reopening subsidy.

use serde::Serialize;

use crate::equilibrium::{
    habit_price_numerator, lq_spectrum, sample, steady_state_lq, Grid, SaddlePath,
    Trajectory,
};
use crate::error::{ModelError, Result};
use crate::params::{compute_thresholds, price_floor, Model, SectorRegime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EpisodeMode {
    UnanticipatedEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LockdownEpisode {
    pub t_start: f64,
    /// Duration of the closure.
    pub t_tilde: f64,
    pub mode: EpisodeMode,
}

impl LockdownEpisode {
    pub fn new(t_tilde: f64) -> Self {
        Self {
            t_start: 0.0,
            t_tilde,
            mode: EpisodeMode::UnanticipatedEnd,
        }
    }

    pub fn reopening_time(&self) -> f64 {
        self.t_start + self.t_tilde
    }
}

/// Sampling settings shared by scenario runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimSettings {
    pub dt: f64,
    /// Length of open-ended segments; `None` means ten e-folds of the stable root.
    pub horizon: Option<f64>,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            dt: 0.01,
            horizon: None,
        }
    }
}

/// Closed forms of the no-lockdown, lockdown and after-lockdown paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpisodePaths {
    pub no_lockdown: SaddlePath,
    pub lockdown: SaddlePath,
    pub after: SaddlePath,
    pub t_reopen: f64,
    pub h_reopen: f64,
    pub b_reopen: f64,
    pub p_min: f64,
}

impl EpisodePaths {
    pub fn build(m: &Model, ep: &LockdownEpisode) -> Result<Self> {
        if !(ep.t_tilde >= 0.0 && ep.t_tilde.is_finite()) {
            return Err(ModelError::InvalidParameter {
                name: "t_tilde",
                reason: "lockdown duration must be a non-negative number".into(),
            });
        }
        let psi1 = lq_spectrum(m)?.psi1;
        let (b0, h0) = (m.initial.b0, m.initial.h0);
        let two = m.outputs(SectorRegime::TwoSector);
        let lock = m.outputs(SectorRegime::Lockdown);
        let nl_ss = steady_state_lq(m, two, psi1, b0, h0)?;
        let lock_ss = steady_state_lq(m, lock, psi1, b0, h0)?;
        let lockdown = SaddlePath::new(m, lock_ss, ep.t_start, b0, h0);
        let t_reopen = ep.reopening_time();
        let edge = lockdown.at(t_reopen);
        let after_ss = steady_state_lq(m, two, psi1, edge.b, edge.h)?;
        Ok(Self {
            no_lockdown: SaddlePath::new(m, nl_ss, ep.t_start, b0, h0),
            lockdown,
            after: SaddlePath::new(m, after_ss, t_reopen, edge.b, edge.h),
            t_reopen,
            h_reopen: edge.h,
            b_reopen: edge.b,
            p_min: price_floor(&m.technology, two.y2),
        })
    }

    pub fn p_after(&self, t: f64) -> f64 {
        self.after.at(t).p.unwrap_or(f64::NAN)
    }

    pub fn p_no_lockdown(&self, t: f64) -> f64 {
        self.no_lockdown.at(t).p.unwrap_or(f64::NAN)
    }

    pub fn p_star(&self) -> f64 {
        self.no_lockdown.steady.p_star.unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryKind {
    /// a_c2h equals its bound: habit deviations leave the price unchanged.
    NeutralPrice,
    /// Duration equals the shutdown threshold: the price reopens at p*.
    ThresholdDuration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Case {
    /// p_AL < p* < p_NL
    SatiationLong,
    /// p* < p_AL < p_NL
    SatiationShort,
    /// p_AL > p* > p_NL
    SubstLong,
    /// p* > p_AL > p_NL
    SubstShort,
    /// Initial habits at or above h*: p_AL < p_NL <= p*
    SatiationHighHabit,
    /// Initial habits at or above h*: p_AL > p_NL >= p*
    SubstHighHabit,
    Boundary(BoundaryKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub case: Case,
    pub t_underline: Option<f64>,
    pub a_c2h_bar: f64,
}

/// Duration beyond which the reopening price falls on the far side of p*.
pub fn shutdown_threshold(h_star_l: f64, h0: f64, h_star: f64, psi1: f64) -> Result<f64> {
    if !(h_star_l > h0) || !(h_star_l > h_star) {
        return Err(ModelError::UndefinedThreshold(format!(
            "needs h*_L ({h_star_l}) above both h0 ({h0}) and h* ({h_star})"
        )));
    }
    Ok(((h_star_l - h0).ln() - (h_star_l - h_star).ln()) / psi1.abs())
}

pub fn classify(m: &Model, ep: &LockdownEpisode) -> Result<Classification> {
    let paths = EpisodePaths::build(m, ep)?;
    classify_paths(m, ep, &paths)
}

fn classify_paths(m: &Model, ep: &LockdownEpisode, paths: &EpisodePaths) -> Result<Classification> {
    let psi1 = paths.no_lockdown.steady.psi1;
    let th = compute_thresholds(m, psi1)?;
    let h0 = m.initial.h0;
    let h_star = paths.no_lockdown.steady.h_star;
    let h_star_l = paths.lockdown.steady.h_star;
    let t_underline = shutdown_threshold(h_star_l, h0, h_star, psi1).ok();
    let a_c2h = m.utility.a_c2h;
    let satiation = a_c2h < th.a_c2h_bar;

    let case = if a_c2h == th.a_c2h_bar {
        Case::Boundary(BoundaryKind::NeutralPrice)
    } else if h0 >= h_star {
        if satiation {
            Case::SatiationHighHabit
        } else {
            Case::SubstHighHabit
        }
    } else {
        // h0 < h* < h*_L, so the threshold exists
        let tu = t_underline.expect("threshold defined below the steady state");
        if ep.t_tilde == tu {
            Case::Boundary(BoundaryKind::ThresholdDuration)
        } else {
            match (satiation, ep.t_tilde > tu) {
                (true, true) => Case::SatiationLong,
                (true, false) => Case::SatiationShort,
                (false, true) => Case::SubstLong,
                (false, false) => Case::SubstShort,
            }
        }
    };
    Ok(Classification {
        case,
        t_underline,
        a_c2h_bar: th.a_c2h_bar,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PentUpMetrics {
    /// Price change per unit of habit deviation after reopening.
    pub sse: f64,
    /// Shift of good-2 demand at the price p*, in units of good 2.
    pub dc2: f64,
    pub dc2_pct: f64,
    pub dc1_pct: f64,
    pub overshoot_pct: f64,
    /// TB(t̃) − TB*.
    pub tb_gap: f64,
    /// Rate at which the price gap closes after reopening.
    pub decay_rate: f64,
}

impl PentUpMetrics {
    pub fn from_paths(m: &Model, paths: &EpisodePaths) -> Self {
        let after = &paths.after;
        let ss = &after.steady;
        let reopen = after.at(paths.t_reopen);
        let p_star = ss.p_star.unwrap_or(f64::NAN);
        let u = &m.utility;
        let dh = reopen.h - ss.h_star;
        // horizontal shift of the inverse demand curve at p*, with c1 on the saddle path
        let phi = m.household.phi;
        let dc2 = habit_price_numerator(u, phi, ss.psi1) / (phi * -u.a_c2c2) * dh;
        Self {
            sse: after.price_slope,
            dc2,
            dc2_pct: 100.0 * dc2 / ss.y2,
            dc1_pct: 100.0 * (reopen.c1 - ss.c1_star) / ss.c1_star,
            overshoot_pct: 100.0 * (reopen.p.unwrap_or(f64::NAN) - p_star) / p_star,
            tb_gap: ss.c1_star - reopen.c1,
            decay_rate: ss.psi1,
        }
    }
}

/// Pent-up demand measures for an economy that starts at its steady state.
pub fn pent_up(m: &Model, ep: &LockdownEpisode) -> Result<PentUpMetrics> {
    let y1 = m.outputs(SectorRegime::TwoSector).y1;
    let (b0, h0) = (m.initial.b0, m.initial.h0);
    let target = m.household.r * b0 + y1;
    if (h0 - target).abs() > 1e-9 * h0.abs().max(1.0) {
        return Err(ModelError::InvalidParameter {
            name: "h0",
            reason: format!("economy must start at its steady state (h0 = {h0}, r*b0 + y1 = {target})"),
        });
    }
    let paths = EpisodePaths::build(m, ep)?;
    Ok(PentUpMetrics::from_paths(m, &paths))
}

/// Model started at the steady state with habit level `h0`.
pub fn steady_start(m: &Model, h0: f64) -> Model {
    let y1 = m.outputs(SectorRegime::TwoSector).y1;
    m.with_initial((h0 - y1) / m.household.r, h0)
}

/// Initial habit level (steady start) at which the reopening overshoot equals
/// `target_pct`, found by bisection on `bracket`.
pub fn calibrate_overshoot(m: &Model, t_tilde: f64, target_pct: f64, bracket: (f64, f64)) -> Result<f64> {
    let ep = LockdownEpisode::new(t_tilde);
    let gap = |h0: f64| -> Result<f64> {
        Ok(pent_up(&steady_start(m, h0), &ep)?.overshoot_pct - target_pct)
    };
    let (mut lo, mut hi) = bracket;
    let mut glo = gap(lo)?;
    let ghi = gap(hi)?;
    if glo.signum() == ghi.signum() {
        return Err(ModelError::NoBracket { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = gap(mid)?;
        if g == 0.0 {
            return Ok(mid);
        }
        if g.signum() == glo.signum() {
            lo = mid;
            glo = g;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyPlan {
    pub t_reopen: f64,
    pub duration: f64,
    /// (t, required reduction of the fixed cost) on the sampling grid.
    pub tau_schedule: Vec<(f64, f64)>,
    /// Integral of the reduction over the subsidy window.
    pub total_reduction: f64,
}

impl PolicyPlan {
    pub fn reduction_at(&self, m: &Model, paths: &EpisodePaths, t: f64) -> f64 {
        if t < paths.t_reopen || t > self.t_reopen {
            return 0.0;
        }
        let y2 = paths.after.steady.y2;
        (m.technology.tau - paths.p_after(t) * (1.0 - m.technology.alpha) * y2).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment {
    pub name: String,
    pub regime: SectorRegime,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub episode: LockdownEpisode,
    pub segments: Vec<Segment>,
    pub classification: Classification,
    pub t_underline: Option<f64>,
    pub reopens: bool,
    pub p_at_reopen: f64,
    pub p_min: f64,
    pub pent_up: PentUpMetrics,
    pub policy: Option<PolicyPlan>,
    pub paths: EpisodePaths,
}

impl ScenarioResult {
    pub fn segment(&self, name: &str) -> Option<&Segment> {
        self.segments.iter().find(|s| s.name == name)
    }
}

/// Lockdown from (b0, h0), unexpected reopening after `t_tilde`, re-optimized
/// two-sector path afterwards.
pub fn run_unanticipated(m: &Model, ep: &LockdownEpisode, settings: &SimSettings) -> Result<ScenarioResult> {
    if !(ep.t_tilde > 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "t_tilde",
            reason: "lockdown duration must be positive".into(),
        });
    }
    let paths = EpisodePaths::build(m, ep)?;
    let nl = &paths.no_lockdown;
    let p_low = nl.at(ep.t_start).p.unwrap_or(f64::NAN).min(paths.p_star());
    if !(p_low >= paths.p_min) {
        return Err(ModelError::CounterfactualNotViable {
            p_low,
            p_min: paths.p_min,
        });
    }
    let classification = classify_paths(m, ep, &paths)?;
    let horizon = settings
        .horizon
        .unwrap_or_else(|| crate::equilibrium::default_horizon(nl.steady.psi1));
    let p_at_reopen = paths.p_after(paths.t_reopen);
    let reopens = p_at_reopen >= paths.p_min;

    let mut segments = vec![
        Segment {
            name: "lockdown".into(),
            regime: SectorRegime::Lockdown,
            trajectory: sample(m, &paths.lockdown, &Grid::new(ep.t_start, ep.t_tilde, settings.dt)),
        },
        Segment {
            name: "after".into(),
            regime: SectorRegime::TwoSector,
            trajectory: sample(m, &paths.after, &Grid::new(paths.t_reopen, horizon, settings.dt)),
        },
    ];
    if !reopens {
        segments.push(Segment {
            name: "shutdown".into(),
            regime: SectorRegime::Lockdown,
            trajectory: sample(m, &paths.lockdown, &Grid::new(paths.t_reopen, horizon, settings.dt)),
        });
    }
    let mut result = ScenarioResult {
        episode: *ep,
        segments,
        t_underline: classification.t_underline,
        classification,
        reopens,
        p_at_reopen,
        p_min: paths.p_min,
        pent_up: PentUpMetrics::from_paths(m, &paths),
        policy: None,
        paths,
    };
    if !reopens {
        result.policy = policy_search(m, &result, settings.dt).ok();
    }
    Ok(result)
}

/// Smallest fixed-cost reduction keeping sector 2 profitable until its price
/// recovers to the floor on its own.
pub fn policy_search(m: &Model, scenario: &ScenarioResult, dt: f64) -> Result<PolicyPlan> {
    let paths = &scenario.paths;
    let t0 = paths.t_reopen;
    let p_star = paths.p_star();
    let p_min = paths.p_min;
    let p0 = paths.p_after(t0);
    if p0 >= p_min {
        return Ok(PolicyPlan {
            t_reopen: t0,
            duration: 0.0,
            tau_schedule: vec![],
            total_reduction: 0.0,
        });
    }
    if !(p_star > p_min) {
        return Err(ModelError::NeverViable { p_star, p_min });
    }
    let psi1 = paths.after.steady.psi1;
    let gap0 = p0 - p_star;
    let duration = ((p_min - p_star) / gap0).ln() / psi1;
    let t_reopen = t0 + duration;

    let tech = &m.technology;
    let y2 = paths.after.steady.y2;
    let rev = (1.0 - tech.alpha) * y2;
    let total_reduction =
        (tech.tau - rev * p_star) * duration - rev * gap0 * ((psi1 * duration).exp() - 1.0) / psi1;

    let mut plan = PolicyPlan {
        t_reopen,
        duration,
        tau_schedule: vec![],
        total_reduction,
    };
    let n = (duration / dt).ceil().max(1.0) as usize;
    plan.tau_schedule = (0..=n)
        .map(|k| {
            let t = t0 + duration * k as f64 / n as f64;
            (t, plan.reduction_at(m, paths, t))
        })
        .collect();
    Ok(plan)
}
