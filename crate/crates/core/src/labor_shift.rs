//! Permanent change of the sector-1 labor share applied at reopening.

use serde::Serialize;

use crate::equilibrium::{
    habit_gain, habit_price_numerator, lq_spectrum, lq_steady_state_unchecked, price_multiplier, sample,
    steady_state_lq, wealth_index, Grid, SaddlePath, Trajectory,
};
use crate::error::{ModelError, Result};
use crate::lockdown::{EpisodePaths, LockdownEpisode, SimSettings};
use crate::params::{Model, SectorRegime};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftDecomposition {
    pub t: f64,
    /// Price response per unit share change, habits at reopening held fixed.
    pub lce: f64,
    /// Price response at `t` per unit habit change at reopening.
    pub sse: f64,
    /// Part of `lce` coming from the level of c1 tracking h*.
    pub consumption_level_term: f64,
    pub d_xi: f64,
    pub dh: f64,
    pub dp: f64,
    pub dy1_dxi: f64,
    pub dy2_dxi: f64,
}

pub fn output_derivatives(m: &Model, xi: f64) -> (f64, f64) {
    let t = &m.technology;
    let a = t.alpha;
    (
        a * t.lbar * (xi * t.lbar).powf(a - 1.0),
        -a * t.lbar * ((1.0 - xi) * t.lbar).powf(a - 1.0),
    )
}

/// Price at time `t` after reopening with composition `xi`, starting from the
/// reopening state (b, h) at `t_reopen`.
pub fn price_after_shift(m: &Model, xi: f64, t_reopen: f64, b: f64, h: f64, t: f64) -> f64 {
    let psi1 = lq_spectrum(m).map(|s| s.psi1).unwrap_or(f64::NAN);
    let ss = lq_steady_state_unchecked(m, m.outputs(SectorRegime::PostShift { xi_new: xi }), psi1, b, h);
    SaddlePath::new(m, ss, t_reopen, b, h).at(t).p.unwrap_or(f64::NAN)
}

/// First-order decomposition of the price change at time `t >= t̃` caused by
/// moving the share from `xi_old` to `xi_new` and the reopening habit stock by `dh`.
pub fn decompose(
    m: &Model,
    ep: &LockdownEpisode,
    xi_old: f64,
    xi_new: f64,
    t: f64,
    dh: f64,
) -> Result<ShiftDecomposition> {
    let paths = EpisodePaths::build(m, ep)?;
    let u = &m.utility;
    let hh = &m.household;
    let (phi, rho, r) = (hh.phi, hh.rho, hh.r);
    let psi1 = paths.after.steady.psi1;
    let ss = steady_state_lq(
        m,
        m.outputs(SectorRegime::PostShift { xi_new: xi_old }),
        psi1,
        paths.b_reopen,
        paths.h_reopen,
    )?;
    let path = SaddlePath::new(m, ss, paths.t_reopen, paths.b_reopen, paths.h_reopen);
    let p = path.at(t).p.unwrap_or(f64::NAN);
    let lambda = ss.lambda;
    let sse0 = price_multiplier(u, phi, psi1, lambda);
    let (dy1, dy2) = output_derivatives(m, xi_old);
    let g = habit_gain(phi, r, psi1);
    let decay = (psi1 * (t - paths.t_reopen)).exp();

    let reduced = (u.a_c2c2 * dy2
        - p * (u.a_c1c2 + phi / (phi + rho) * u.a_c2h) * dy2
        - p * ss.m1 * dy1)
        / lambda;
    let transition = sse0 * (1.0 - decay) * g * dy1;
    let level = u.a_c1c2 * (-psi1 / phi) * g * dy1 / lambda;
    let lce = reduced + transition + level;
    let sse = sse0 * decay;
    let d_xi = xi_new - xi_old;
    Ok(ShiftDecomposition {
        t,
        lce,
        sse,
        consumption_level_term: level,
        d_xi,
        dh,
        dp: lce * d_xi + sse * dh,
        dy1_dxi: dy1,
        dy2_dxi: dy2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Guarantee {
    PStarRises,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftComparison {
    pub p_star_bl: f64,
    pub p_star_al: f64,
    pub lambda_nl: f64,
    pub lambda_al: f64,
    pub h_star_nl: f64,
    pub h_star_al: f64,
    pub h_star_l: f64,
    /// (h0 − h*_L)·λ_NL − (h0 − h*_NL)·λ_AL
    pub i_cross: f64,
    pub t_underline_shift: Option<f64>,
    pub guarantee: Option<Guarantee>,
    /// a_c2h below −((φ+ρ)/φ)·a_c1c2 − margin.
    pub strong_satiation: bool,
    pub satiation_margin: f64,
}

/// Sufficient conditions for the steady-state price to rise after the shift.
pub fn guarantee_holds(m: &Model, y2: f64) -> bool {
    let u = &m.utility;
    let phi = m.household.phi;
    let rho = m.household.rho;
    let demand_ok = u.a_c2 > -u.a_c2c2 * y2;
    let first = u.a_c1c2 > 0.0 && u.a_c2h > -u.a_c1c2;
    let second = u.a_c1c2 < 0.0 && u.a_c2h > -(phi + rho) / phi * u.a_c1c2;
    demand_ok && (first || second)
}

pub fn compare_steady_states(m: &Model, xi_old: f64, xi_new: f64) -> Result<ShiftComparison> {
    compare_with_margin(m, xi_old, xi_new, 0.0)
}

pub fn compare_with_margin(m: &Model, xi_old: f64, xi_new: f64, margin: f64) -> Result<ShiftComparison> {
    let psi1 = lq_spectrum(m)?.psi1;
    let (b0, h0) = (m.initial.b0, m.initial.h0);
    let before = m.outputs(SectorRegime::PostShift { xi_new: xi_old });
    let after = m.outputs(SectorRegime::PostShift { xi_new });
    let bl = steady_state_lq(m, before, psi1, b0, h0)?;
    let al = steady_state_lq(m, after, psi1, b0, h0)?;
    let lock = steady_state_lq(m, m.outputs(SectorRegime::Lockdown), psi1, b0, h0)?;
    let i_cross = (h0 - lock.h_star) * bl.lambda - (h0 - bl.h_star) * al.lambda;
    let u = &m.utility;
    let phi = m.household.phi;
    let rho = m.household.rho;
    let mut cmp = ShiftComparison {
        p_star_bl: bl.p_star.unwrap_or(f64::NAN),
        p_star_al: al.p_star.unwrap_or(f64::NAN),
        lambda_nl: bl.lambda,
        lambda_al: al.lambda,
        h_star_nl: bl.h_star,
        h_star_al: al.h_star,
        h_star_l: lock.h_star,
        i_cross,
        t_underline_shift: None,
        guarantee: guarantee_holds(m, before.y2).then_some(Guarantee::PStarRises),
        strong_satiation: u.a_c2h < -(phi + rho) / phi * u.a_c1c2 - margin,
        satiation_margin: margin,
    };
    cmp.t_underline_shift = short_run_threshold(m, &cmp).ok();
    Ok(cmp)
}

/// Reopening duration below which the shifted economy's price starts under the
/// no-lockdown price.
pub fn short_run_threshold(m: &Model, cmp: &ShiftComparison) -> Result<f64> {
    let psi1 = lq_spectrum(m)?.psi1;
    let phi = m.household.phi;
    let s = habit_price_numerator(&m.utility, phi, psi1);
    let num = (cmp.p_star_al - cmp.p_star_bl) * phi * cmp.lambda_nl * cmp.lambda_al;
    let den = -s * cmp.i_cross;
    if !(num > 0.0) || !(den > 0.0) {
        return Err(ModelError::UndefinedThreshold(format!(
            "log arguments must be positive (got {num} and {den})"
        )));
    }
    Ok((num.ln() - den.ln()) / psi1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyPricePartials {
    /// Largest ∂p*/∂y2 along y2 ∈ [y2_new, y2_old] at y1 = y1_new.
    pub max_dp_dy2: f64,
    /// Smallest ∂p*/∂y1 along y1 ∈ [y1_old, y1_new] at y2 = y2_old.
    pub min_dp_dy1: f64,
}

/// Partial derivatives of the steady-state price along the two legs of the
/// path from the old to the new output pair.
pub fn steady_price_partials(m: &Model, xi_old: f64, xi_new: f64, n: usize) -> Result<SteadyPricePartials> {
    let psi1 = lq_spectrum(m)?.psi1;
    let u = &m.utility;
    let hh = &m.household;
    let (phi, rho, r) = (hh.phi, hh.rho, hh.r);
    let (b0, h0) = (m.initial.b0, m.initial.h0);
    let old = m.outputs(SectorRegime::PostShift { xi_new: xi_old });
    let new = m.outputs(SectorRegime::PostShift { xi_new });
    let g = habit_gain(phi, r, psi1);
    let base = lq_steady_state_unchecked(m, old, psi1, b0, h0);
    let m1 = base.m1;
    let m0_at = |z2: f64| {
        u.a_c1 + phi * u.a_h / (phi + rho) + (u.a_c1c2 + phi * u.a_c2h / (phi + rho)) * z2
    };
    let dm0 = u.a_c1c2 + phi * u.a_c2h / (phi + rho);
    let parts = |z1: f64, z2: f64| {
        let f = wealth_index(phi, r, psi1, b0, h0, z1);
        let lam = m0_at(z2) + m1 * f;
        let num = u.a_c2 + u.a_c2c2 * z2 + (u.a_c1c2 + u.a_c2h) * g * f;
        let d1 = ((u.a_c1c2 + u.a_c2h) * g * lam - num * m1) / (lam * lam);
        let d2 = (u.a_c2c2 * lam - num * dm0) / (lam * lam);
        (d1, d2)
    };
    let n = n.max(1);
    let mut max_d2 = f64::NEG_INFINITY;
    let mut min_d1 = f64::INFINITY;
    for k in 0..=n {
        let s = k as f64 / n as f64;
        let z2 = new.y2 + s * (old.y2 - new.y2);
        max_d2 = max_d2.max(parts(new.y1, z2).1);
        let z1 = old.y1 + s * (new.y1 - old.y1);
        min_d1 = min_d1.min(parts(z1, old.y2).0);
    }
    Ok(SteadyPricePartials {
        max_dp_dy2: max_d2,
        min_dp_dy1: min_d1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Convergence {
    FromAbove,
    FromBelow,
    AtSteadyState,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftRun {
    pub xi_new: f64,
    pub p_reopen: f64,
    pub p_star_al: f64,
    pub direction: Convergence,
    pub after: Trajectory,
}

/// Unanticipated lockdown followed by reopening with share `xi_new`.
pub fn run_shift(m: &Model, ep: &LockdownEpisode, xi_new: f64, settings: &SimSettings) -> Result<ShiftRun> {
    let paths = EpisodePaths::build(m, ep)?;
    let psi1 = paths.after.steady.psi1;
    let out = m.outputs(SectorRegime::PostShift { xi_new });
    let ss = steady_state_lq(m, out, psi1, paths.b_reopen, paths.h_reopen)?;
    let sp = SaddlePath::new(m, ss, paths.t_reopen, paths.b_reopen, paths.h_reopen);
    let horizon = settings
        .horizon
        .unwrap_or_else(|| crate::equilibrium::default_horizon(psi1));
    let p_reopen = sp.at(paths.t_reopen).p.unwrap_or(f64::NAN);
    let p_star_al = ss.p_star.unwrap_or(f64::NAN);
    let direction = if p_reopen > p_star_al {
        Convergence::FromAbove
    } else if p_reopen < p_star_al {
        Convergence::FromBelow
    } else {
        Convergence::AtSteadyState
    };
    Ok(ShiftRun {
        xi_new,
        p_reopen,
        p_star_al,
        direction,
        after: sample(m, &sp, &Grid::new(paths.t_reopen, horizon, settings.dt)),
    })
}
