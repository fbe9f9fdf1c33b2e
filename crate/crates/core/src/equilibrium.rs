//! Steady states, saddle paths and sampled trajectories.

use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::params::{price_floor, LqUtility, Model, Outputs, SectorRegime};
use crate::spectral::{curvature_index, eigenvalues, SpectralData};

/// Steady state of one production regime, with the shadow-price decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState {
    pub y1: f64,
    pub y2: f64,
    pub psi1: f64,
    pub h_star: f64,
    pub c1_star: f64,
    pub b_star: f64,
    /// Absent when sector 2 is closed.
    pub p_star: Option<f64>,
    pub lambda: f64,
    pub mu_star: f64,
    pub m0: f64,
    pub m1: f64,
}

impl SteadyState {
    pub fn sector2_active(&self) -> bool {
        self.y2 > 0.0
    }
}

/// Coefficient mapping habit deviations into price deviations.
pub fn price_multiplier(u: &LqUtility, phi: f64, psi1: f64, lambda: f64) -> f64 {
    habit_price_numerator(u, phi, psi1) / (phi * lambda)
}

/// (phi + psi1)·a_c1c2 + phi·a_c2h
pub fn habit_price_numerator(u: &LqUtility, phi: f64, psi1: f64) -> f64 {
    (phi + psi1) * u.a_c1c2 + phi * u.a_c2h
}

/// Stable root of the LQ model (independent of the regime).
pub fn lq_spectrum(m: &Model) -> Result<SpectralData> {
    let u = &m.utility;
    eigenvalues(u.a_c1c1, u.a_c1h, u.a_hh, m.household.phi, m.household.rho)
}

/// Habit-steady-state gain G = phi(psi1 − r)/((phi + r)psi1).
pub fn habit_gain(phi: f64, r: f64, psi1: f64) -> f64 {
    phi * (psi1 - r) / ((phi + r) * psi1)
}

/// Permanent-income aggregate F(b, h, y1).
pub fn wealth_index(phi: f64, r: f64, psi1: f64, b: f64, h: f64, y1: f64) -> f64 {
    r * b + y1 + r * (phi + psi1) / (phi * (psi1 - r)) * h
}

/// Assets per unit of habit deviation along the stable path.
pub fn asset_ratio(phi: f64, r: f64, psi1: f64) -> f64 {
    (phi + psi1) / (phi * (r - psi1))
}

/// Closed-form LQ steady state without restriction checks.
pub fn lq_steady_state_unchecked(m: &Model, out: Outputs, psi1: f64, b0: f64, h0: f64) -> SteadyState {
    let u = &m.utility;
    let hh = &m.household;
    let (phi, rho, r) = (hh.phi, hh.rho, hh.r);
    let Outputs { y1, y2 } = out;
    let g = habit_gain(phi, r, psi1);
    let f = wealth_index(phi, r, psi1, b0, h0, y1);
    let h_star = g * f;
    let m0 = ((phi + rho) * u.a_c1
        + phi * u.a_h
        + ((phi + rho) * u.a_c1c2 + phi * u.a_c2h) * y2)
        / (phi + rho);
    let k = curvature_index(u.a_c1c1, u.a_c1h, u.a_hh, phi, rho);
    let m1 = g * k / (phi + rho);
    let lambda = m0 + m1 * f;
    let p_star = (y2 > 0.0)
        .then(|| (u.a_c2 + u.a_c2c2 * y2 + (u.a_c1c2 + u.a_c2h) * h_star) / lambda);
    let mu_star = (lambda - u.a_c1 - (u.a_c1c1 + u.a_c1h) * h_star - u.a_c1c2 * y2) / phi;
    SteadyState {
        y1,
        y2,
        psi1,
        h_star,
        c1_star: h_star,
        b_star: (h_star - y1) / r,
        p_star,
        lambda,
        mu_star,
        m0,
        m1,
    }
}

/// Closed-form LQ steady state for outputs `out` from the state (b0, h0).
///
/// With sector 2 active the saddle bound, the `a_c1` floor and both asset
/// bounds (equivalently h* > 0 and lambda > 0) are enforced. With sector 2
/// closed only the saddle bound and h* > 0 apply.
pub fn steady_state_lq(m: &Model, out: Outputs, psi1: f64, b0: f64, h0: f64) -> Result<SteadyState> {
    let u = &m.utility;
    let bar = crate::params::a_c1h_bar(u, &m.household);
    if !(u.a_c1h < bar) || !(psi1 < 0.0) {
        return Err(ModelError::NotSaddle {
            a_c1h: u.a_c1h,
            bound: bar,
        });
    }
    let ss = lq_steady_state_unchecked(m, out, psi1, b0, h0);
    if out.sector2_active() && !(ss.m0 > 0.0) {
        return Err(ModelError::Restriction {
            threshold: "a_c1_lower",
            detail: format!("a_c1 = {} gives m0 = {} <= 0", u.a_c1, ss.m0),
        });
    }
    if !(ss.h_star > 0.0) {
        return Err(ModelError::Restriction {
            threshold: "b0_lower",
            detail: format!("b0 = {b0} with h0 = {h0} gives h* = {}", ss.h_star),
        });
    }
    if out.sector2_active() && !(ss.lambda > 0.0) {
        return Err(ModelError::Restriction {
            threshold: "b0_upper",
            detail: format!("b0 = {b0} with h0 = {h0} gives lambda = {}", ss.lambda),
        });
    }
    Ok(ss)
}

/// Marginal utilities supplied by the caller for the root-found steady state.
pub trait MarginalUtility {
    fn u_c1(&self, c1: f64, c2: f64, h: f64) -> f64;
    fn u_c2(&self, c1: f64, c2: f64, h: f64) -> f64;
    fn u_h(&self, c1: f64, c2: f64, h: f64) -> f64;
    fn u_c1c1(&self, c1: f64, c2: f64, h: f64) -> f64;
    fn u_c1h(&self, c1: f64, c2: f64, h: f64) -> f64;
    fn u_hh(&self, c1: f64, c2: f64, h: f64) -> f64;
}

impl MarginalUtility for LqUtility {
    fn u_c1(&self, c1: f64, c2: f64, h: f64) -> f64 {
        self.gradient(c1, c2, h)[0]
    }
    fn u_c2(&self, c1: f64, c2: f64, h: f64) -> f64 {
        self.gradient(c1, c2, h)[1]
    }
    fn u_h(&self, c1: f64, c2: f64, h: f64) -> f64 {
        self.gradient(c1, c2, h)[2]
    }
    fn u_c1c1(&self, _: f64, _: f64, _: f64) -> f64 {
        self.a_c1c1
    }
    fn u_c1h(&self, _: f64, _: f64, _: f64) -> f64 {
        self.a_c1h
    }
    fn u_hh(&self, _: f64, _: f64, _: f64) -> f64 {
        self.a_hh
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneralSteadyState {
    pub steady: SteadyState,
    /// More than one sign change was seen on the bracket.
    pub non_unique: bool,
    pub iterations: usize,
}

const SCAN_CELLS: usize = 64;

/// Root-found steady state for arbitrary marginal utilities.
///
/// The habit level h* is bracketed on `bracket` and solved by bisection on the
/// asset pin-down residual b0 − b*(h) − q(h)·(h0 − h), where q depends on the
/// local stable root.
pub fn steady_state_general<U: MarginalUtility>(
    u: &U,
    m: &Model,
    out: Outputs,
    bracket: (f64, f64),
) -> Result<GeneralSteadyState> {
    let hh = &m.household;
    let (phi, rho, r) = (hh.phi, hh.rho, hh.r);
    let (b0, h0) = (m.initial.b0, m.initial.h0);
    let y2 = out.y2;

    let local_root = |h: f64| -> Result<f64> {
        let sd = eigenvalues(u.u_c1c1(h, y2, h), u.u_c1h(h, y2, h), u.u_hh(h, y2, h), phi, rho)?;
        if !sd.is_saddle() {
            return Err(ModelError::NotSaddle {
                a_c1h: u.u_c1h(h, y2, h),
                bound: -((phi + rho) * u.u_c1c1(h, y2, h) + phi * u.u_hh(h, y2, h))
                    / (rho + 2.0 * phi),
            });
        }
        Ok(sd.psi1)
    };
    let residual = |h: f64| -> Result<f64> {
        let psi1 = local_root(h)?;
        Ok(b0 - (h - out.y1) / r - asset_ratio(phi, r, psi1) * (h0 - h))
    };

    let (mut lo, mut hi) = bracket;
    let mut flo = residual(lo)?;
    let fhi = residual(hi)?;
    if flo == 0.0 {
        hi = lo;
    } else if fhi == 0.0 {
        lo = hi;
    } else if flo.signum() == fhi.signum() {
        return Err(ModelError::NoBracket { lo, hi });
    }

    let mut changes = 0;
    let mut prev = flo;
    for i in 1..=SCAN_CELLS {
        let x = bracket.0 + (bracket.1 - bracket.0) * i as f64 / SCAN_CELLS as f64;
        let fx = residual(x)?;
        if fx.signum() != prev.signum() && fx != 0.0 {
            changes += 1;
        }
        prev = fx;
    }

    let mut iterations = 0;
    while hi - lo > 0.0 && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = residual(mid)?;
        iterations += 1;
        if fm.abs() <= 1e-12 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let h = 0.5 * (lo + hi);
    let psi1 = local_root(h)?;
    let mu = u.u_h(h, y2, h) / (phi + rho);
    let lambda = u.u_c1(h, y2, h) + phi * mu;
    let k = curvature_index(u.u_c1c1(h, y2, h), u.u_c1h(h, y2, h), u.u_hh(h, y2, h), phi, rho);
    let g = habit_gain(phi, r, psi1);
    let m1 = g * k / (phi + rho);
    let f = wealth_index(phi, r, psi1, b0, h0, out.y1);
    let p_star = (y2 > 0.0).then(|| u.u_c2(h, y2, h) / lambda);
    Ok(GeneralSteadyState {
        steady: SteadyState {
            y1: out.y1,
            y2,
            psi1,
            h_star: h,
            c1_star: h,
            b_star: (h - out.y1) / r,
            p_star,
            lambda,
            mu_star: mu,
            m0: lambda - m1 * f,
            m1,
        },
        non_unique: changes > 1,
        iterations,
    })
}

/// Closed-form stable path of one regime starting at (b0, h0) at time `t0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddlePath {
    pub steady: SteadyState,
    pub t0: f64,
    pub h0: f64,
    pub b0: f64,
    pub phi: f64,
    pub r: f64,
    /// Price change per unit habit deviation (zero when sector 2 is closed).
    pub price_slope: f64,
    pub utility: LqUtility,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathPoint {
    pub t: f64,
    pub h: f64,
    pub c1: f64,
    pub c2: f64,
    pub b: f64,
    pub p: Option<f64>,
}

impl SaddlePath {
    pub fn new(m: &Model, steady: SteadyState, t0: f64, b0: f64, h0: f64) -> Self {
        let phi = m.household.phi;
        let price_slope = if steady.sector2_active() {
            price_multiplier(&m.utility, phi, steady.psi1, steady.lambda)
        } else {
            0.0
        };
        Self {
            steady,
            t0,
            h0,
            b0,
            phi,
            r: m.household.r,
            price_slope,
            utility: m.utility,
        }
    }

    pub fn habit_gap(&self, t: f64) -> f64 {
        (self.h0 - self.steady.h_star) * (self.steady.psi1 * (t - self.t0)).exp()
    }

    pub fn at(&self, t: f64) -> PathPoint {
        let s = &self.steady;
        let gap = self.habit_gap(t);
        let kappa = (self.phi + s.psi1) / self.phi;
        PathPoint {
            t,
            h: s.h_star + gap,
            c1: s.h_star + kappa * gap,
            c2: s.y2,
            b: s.b_star + asset_ratio(self.phi, self.r, s.psi1) * gap,
            p: s.p_star.map(|p| p + self.price_slope * gap),
        }
    }

    /// Co-state of the habit stock along the path.
    pub fn mu(&self, t: f64) -> f64 {
        let s = &self.steady;
        let u = &self.utility;
        let ratio = -(self.phi * u.a_c1h + (self.phi + s.psi1) * u.a_c1c1) / (self.phi * self.phi);
        s.mu_star + ratio * self.habit_gap(t)
    }
}

/// Uniform sampling window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub t0: f64,
    pub horizon: f64,
    pub dt: f64,
}

impl Grid {
    pub fn new(t0: f64, horizon: f64, dt: f64) -> Self {
        Self { t0, horizon, dt }
    }

    pub fn times(&self) -> Vec<f64> {
        let n = (self.horizon / self.dt).round().max(1.0) as usize;
        let step = self.horizon / n as f64;
        (0..=n).map(|k| self.t0 + step * k as f64).collect()
    }
}

/// Default window: ten e-folds of the stable root.
pub fn default_horizon(psi1: f64) -> f64 {
    10.0 / psi1.abs()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub h: Vec<f64>,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    pub b: Vec<f64>,
    pub p: Vec<Option<f64>>,
    pub trade_balance: Vec<f64>,
    pub profit2: Vec<Option<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn from_points(points: impl IntoIterator<Item = PathPoint>, y1: f64, m: &Model) -> Self {
        let tech = &m.technology;
        let mut tr = Trajectory {
            t: vec![],
            h: vec![],
            c1: vec![],
            c2: vec![],
            b: vec![],
            p: vec![],
            trade_balance: vec![],
            profit2: vec![],
        };
        for pt in points {
            tr.t.push(pt.t);
            tr.h.push(pt.h);
            tr.c1.push(pt.c1);
            tr.c2.push(pt.c2);
            tr.b.push(pt.b);
            tr.p.push(pt.p);
            tr.trade_balance.push(y1 - pt.c1);
            tr.profit2
                .push(pt.p.map(|p| p * (1.0 - tech.alpha) * pt.c2 - tech.tau));
        }
        tr
    }

    /// CSV with twelve significant digits; undefined cells are left empty.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,h,c1,c2,b,p,trade_balance,profit2\n");
        for i in 0..self.len() {
            let cells = [
                fmt12(self.t[i]),
                fmt12(self.h[i]),
                fmt12(self.c1[i]),
                fmt12(self.c2[i]),
                fmt12(self.b[i]),
                self.p[i].map(fmt12).unwrap_or_default(),
                fmt12(self.trade_balance[i]),
                self.profit2[i].map(fmt12).unwrap_or_default(),
            ];
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Fixed decimal rendering with twelve significant digits.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = 11 - mag;
    if (0..=30).contains(&decimals) {
        format!("{:.*}", decimals as usize, x)
    } else if decimals < 0 {
        format!("{:.0}", x)
    } else {
        format!("{:.11e}", x)
    }
}

/// Samples the closed-form path of `ss` from (b0, h0) over `grid`.
pub fn path(m: &Model, ss: &SteadyState, b0: f64, h0: f64, grid: &Grid) -> Trajectory {
    let sp = SaddlePath::new(m, *ss, grid.t0, b0, h0);
    sample(m, &sp, grid)
}

pub fn sample(m: &Model, sp: &SaddlePath, grid: &Grid) -> Trajectory {
    Trajectory::from_points(grid.times().into_iter().map(|t| sp.at(t)), sp.steady.y1, m)
}

/// Habit-free economy: consumption equals permanent income in every regime.
pub fn no_habits_path(m: &Model, regime: SectorRegime, b0: f64, grid: &Grid) -> Result<Trajectory> {
    let u = &m.utility;
    if u.a_h != 0.0 || u.a_hh != 0.0 || u.a_c1h != 0.0 || u.a_c2h != 0.0 {
        return Err(ModelError::InvalidParameter {
            name: "utility",
            reason: "habit coefficients must be zero for the habit-free baseline".into(),
        });
    }
    let out = m.outputs(regime);
    let r = m.household.r;
    let c1 = r * b0 + out.y1;
    let lambda = u.a_c1 + u.a_c1c1 * c1 + u.a_c1c2 * out.y2;
    let p = out
        .sector2_active()
        .then(|| (u.a_c2 + u.a_c2c2 * out.y2 + u.a_c1c2 * c1) / lambda);
    let h0 = m.initial.h0;
    let phi = m.household.phi;
    let pts = grid.times().into_iter().map(|t| PathPoint {
        t,
        // inert habit stock, still following its law of motion
        h: c1 + (h0 - c1) * (-phi * (t - grid.t0)).exp(),
        c1,
        c2: out.y2,
        b: b0,
        p,
    });
    Ok(Trajectory::from_points(pts, out.y1, m))
}

/// One consumer type's state for the aggregation identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgentState {
    pub c1: f64,
    pub c2: f64,
    pub h: f64,
    pub lambda: f64,
}

/// Relative price implied by a two-type population with shares (xi, 1 − xi).
///
/// Quantities and shadow prices are aggregated with the population weights.
pub fn aggregate_price_identity(u: &LqUtility, t1: AgentState, t2: AgentState, xi: f64) -> Result<f64> {
    if !(t1.lambda > 0.0 && t2.lambda > 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "lambda",
            reason: "both shadow prices must be positive".into(),
        });
    }
    if !(xi > 0.0 && xi < 1.0) {
        return Err(ModelError::InvalidParameter {
            name: "xi",
            reason: "share must lie in (0, 1)".into(),
        });
    }
    let w = |a: f64, b: f64| xi * a + (1.0 - xi) * b;
    let c1 = w(t1.c1, t2.c1);
    let c2 = w(t1.c2, t2.c2);
    let h = w(t1.h, t2.h);
    let lambda = w(t1.lambda, t2.lambda);
    Ok((u.a_c2 + u.a_c2c2 * c2 + u.a_c1c2 * c1 + u.a_c2h * h) / lambda)
}

/// Sector-2 price floor of the two-sector regime.
pub fn two_sector_floor(m: &Model) -> f64 {
    price_floor(&m.technology, m.outputs(SectorRegime::TwoSector).y2)
}
