//! Lockdowns of known length (two-stage problem) and of exponentially
//! distributed length.

use nalgebra::{Matrix2, Matrix6, Vector2, Vector6};
use serde::Serialize;

use crate::equilibrium::{
    lq_spectrum, lq_steady_state_unchecked, sample, steady_state_lq, Grid, PathPoint, SaddlePath,
    Trajectory,
};
use crate::error::{ModelError, Result};
use crate::lockdown::SimSettings;
use crate::params::{Model, SectorRegime};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::spectral::{eigenvalues, system_matrix};

/// v(b, h) = a0 + ab·b + ah·h + a2b·b² + a2h·h² + abh·b·h
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticValueFunction {
    pub a0: f64,
    pub ab: f64,
    pub ah: f64,
    pub a2b: f64,
    pub a2h: f64,
    pub abh: f64,
    /// Largest absolute residual over fitting and validation points.
    pub fit_residual: f64,
    /// Condition number of the interpolation matrix.
    pub condition: f64,
}

impl QuadraticValueFunction {
    pub fn value(&self, b: f64, h: f64) -> f64 {
        self.a0 + self.ab * b + self.ah * h + self.a2b * b * b + self.a2h * h * h + self.abh * b * h
    }

    /// (v_b, v_h)
    pub fn gradient(&self, b: f64, h: f64) -> (f64, f64) {
        (
            self.ab + 2.0 * self.a2b * b + self.abh * h,
            self.ah + 2.0 * self.a2h * h + self.abh * b,
        )
    }
}

/// Discounted utility of the optimal two-sector path started at (b, h).
///
/// Along the stable path utility is a constant plus terms in e^{ψ1 s} and
/// e^{2ψ1 s}, so the integral is exact.
pub fn after_value(m: &Model, psi1: f64, b: f64, h: f64) -> f64 {
    let out = m.outputs(SectorRegime::TwoSector);
    let ss = lq_steady_state_unchecked(m, out, psi1, b, h);
    let u = &m.utility;
    let rho = m.household.rho;
    let phi = m.household.phi;
    let kappa = (phi + psi1) / phi;
    let x = h - ss.h_star;
    let dir = [kappa, 0.0, 1.0];
    let grad = u.gradient(ss.h_star, out.y2, ss.h_star);
    let hess = u.hessian();
    let slope: f64 = (0..3).map(|i| grad[i] * dir[i]).sum();
    let mut curv = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            curv += dir[i] * hess[i][j] * dir[j];
        }
    }
    let u0 = u.value(ss.h_star, out.y2, ss.h_star);
    u0 / rho + x * slope / (rho - psi1) + 0.5 * x * x * curv / (rho - 2.0 * psi1)
}

const FIT_OFFSETS: [(f64, f64); 6] = [(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0)];
const CHECK_OFFSETS: [(f64, f64); 6] = [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (2.0, 0.0), (0.0, 2.0), (0.5, 0.5)];

/// Exact quadratic interpolation of the after-lockdown value around (b0, h0).
pub fn after_value_function(m: &Model) -> Result<QuadraticValueFunction> {
    let sd = lq_spectrum(m)?;
    if !sd.is_saddle() {
        return Err(ModelError::NotSaddle {
            a_c1h: m.utility.a_c1h,
            bound: crate::params::a_c1h_bar(&m.utility, &m.household),
        });
    }
    let (bc, hc) = (m.initial.b0, m.initial.h0);
    let db = (0.1 * bc.abs()).max(1.0);
    let dh = (0.1 * hc.abs()).max(0.1);
    let row = |b: f64, h: f64| [1.0, b, h, b * b, h * h, b * h];

    let mut mat = Matrix6::<f64>::zeros();
    let mut rhs = Vector6::<f64>::zeros();
    for (i, (ob, oh)) in FIT_OFFSETS.iter().enumerate() {
        let (b, h) = (bc + ob * db, hc + oh * dh);
        for (j, v) in row(b, h).iter().enumerate() {
            mat[(i, j)] = *v;
        }
        rhs[i] = after_value(m, sd.psi1, b, h);
    }
    let sv = mat.singular_values();
    let condition = sv.max() / sv.min();
    if !(condition.is_finite() && condition < 1e14) {
        return Err(ModelError::Singular { cond: condition });
    }
    let coef = mat.lu().solve(&rhs).ok_or(ModelError::Singular { cond: condition })?;
    let mut vf = QuadraticValueFunction {
        a0: coef[0],
        ab: coef[1],
        ah: coef[2],
        a2b: coef[3],
        a2h: coef[4],
        abh: coef[5],
        fit_residual: 0.0,
        condition,
    };
    vf.fit_residual = FIT_OFFSETS
        .iter()
        .chain(CHECK_OFFSETS.iter())
        .map(|(ob, oh)| {
            let (b, h) = (bc + ob * db, hc + oh * dh);
            (vf.value(b, h) - after_value(m, sd.psi1, b, h)).abs()
        })
        .fold(0.0, f64::max);
    Ok(vf)
}

/// Constants of the closed-form lockdown stage. `a, b, c, d` are the entries of
/// the (co-state, habit) system; `big_*` are the coefficients of the asset path
/// b(t) = e^{rt}b0 + A(e^{rt} − 1) + B(e^{ψ1 t} − e^{rt}) + C(e^{ψ2 t} − e^{rt})
/// and the unstable habit mode D·e^{ψ2 t}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoStageConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub h_star_ts_l: f64,
    pub mu_star_ts_l: f64,
    pub lambda_ts_l: f64,
    pub big_a: f64,
    pub big_b: f64,
    pub big_c: f64,
    pub big_d: f64,
    pub psi1: f64,
    pub psi2: f64,
}

/// Closed-form solution of the lockdown stage for a given shadow price of
/// wealth and terminal habit co-state. The unstable mode is anchored at `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LockdownStage {
    pub horizon: f64,
    pub lambda: f64,
    pub mu_terminal: f64,
    pub b0: f64,
    pub h0: f64,
    pub y1: f64,
    pub r: f64,
    pub psi1: f64,
    pub psi2: f64,
    pub h_star: f64,
    pub mu_star: f64,
    pub c_bar: f64,
    k1: f64,
    k2: f64,
    v1: f64,
    v2: f64,
    k_mu: f64,
    k_h: f64,
    k_const: f64,
    matrix: [[f64; 2]; 2],
}

impl LockdownStage {
    pub fn new(m: &Model, lambda: f64, mu_terminal: f64, horizon: f64) -> Result<Self> {
        let u = &m.utility;
        let hh = &m.household;
        let (phi, rho, r) = (hh.phi, hh.rho, hh.r);
        let sd = eigenvalues(u.a_c1c1, u.a_c1h, u.a_hh, phi, rho)?;
        let [[a, b], [c, d]] = system_matrix(u.a_c1c1, u.a_c1h, u.a_hh, phi, rho);
        // c1 = k_const + k_mu·mu + k_h·h with c2 = 0
        let k_mu = -phi / u.a_c1c1;
        let k_h = -u.a_c1h / u.a_c1c1;
        let k_const = (lambda - u.a_c1) / u.a_c1c1;
        let e = -u.a_h - u.a_c1h * k_const;
        let f = phi * k_const;
        let det = a * d - b * c;
        let mu_star = (-e * d + b * f) / det;
        let h_star = (-a * f + c * e) / det;
        let v1 = (sd.psi1 - d) / c;
        let v2 = (sd.psi2 - d) / c;
        let (b0, h0) = (m.initial.b0, m.initial.h0);
        let e1 = (sd.psi1 * horizon).exp();
        let e2 = (-sd.psi2 * horizon).exp();
        let det2 = v2 - v1 * e1 * e2;
        let k1 = ((h0 - h_star) * v2 - e2 * (mu_terminal - mu_star)) / det2;
        let k2 = ((mu_terminal - mu_star) - v1 * e1 * (h0 - h_star)) / det2;
        Ok(Self {
            horizon,
            lambda,
            mu_terminal,
            b0,
            h0,
            y1: m.outputs(SectorRegime::Lockdown).y1,
            r,
            psi1: sd.psi1,
            psi2: sd.psi2,
            h_star,
            mu_star,
            c_bar: k_const + k_mu * mu_star + k_h * h_star,
            k1,
            k2,
            v1,
            v2,
            k_mu,
            k_h,
            k_const,
            matrix: [[a, b], [c, d]],
        })
    }

    fn modes(&self, t: f64) -> (f64, f64) {
        ((self.psi1 * t).exp(), (self.psi2 * (t - self.horizon)).exp())
    }

    fn gammas(&self) -> (f64, f64) {
        (
            self.k1 * (self.k_mu * self.v1 + self.k_h),
            self.k2 * (self.k_mu * self.v2 + self.k_h),
        )
    }

    pub fn h(&self, t: f64) -> f64 {
        let (e1, e2) = self.modes(t);
        self.h_star + self.k1 * e1 + self.k2 * e2
    }

    pub fn mu(&self, t: f64) -> f64 {
        let (e1, e2) = self.modes(t);
        self.mu_star + self.k1 * self.v1 * e1 + self.k2 * self.v2 * e2
    }

    pub fn c1(&self, t: f64) -> f64 {
        self.k_const + self.k_mu * self.mu(t) + self.k_h * self.h(t)
    }

    pub fn b(&self, t: f64) -> f64 {
        let (e1, e2) = self.modes(t);
        let (g1, g2) = self.gammas();
        let ert = (self.r * t).exp();
        let tail = (self.r * t - self.psi2 * self.horizon).exp();
        ert * self.b0 + (self.y1 - self.c_bar) / self.r * (ert - 1.0)
            - g1 * (e1 - ert) / (self.psi1 - self.r)
            - g2 * (e2 - tail) / (self.psi2 - self.r)
    }

    /// Time derivatives (mu', h', b') of the closed form.
    pub fn derivatives(&self, t: f64) -> (f64, f64, f64) {
        let (e1, e2) = self.modes(t);
        let (g1, g2) = self.gammas();
        let r = self.r;
        let ert = (r * t).exp();
        let tail = (r * t - self.psi2 * self.horizon).exp();
        let dmu = self.psi1 * self.k1 * self.v1 * e1 + self.psi2 * self.k2 * self.v2 * e2;
        let dh = self.psi1 * self.k1 * e1 + self.psi2 * self.k2 * e2;
        let db = r * ert * self.b0 + (self.y1 - self.c_bar) * ert
            - g1 * (self.psi1 * e1 - r * ert) / (self.psi1 - r)
            - g2 * (self.psi2 * e2 - r * tail) / (self.psi2 - r);
        (dmu, dh, db)
    }

    pub fn point(&self, t: f64) -> PathPoint {
        PathPoint {
            t,
            h: self.h(t),
            c1: self.c1(t),
            c2: 0.0,
            b: self.b(t),
            p: None,
        }
    }

    pub fn constants(&self) -> TwoStageConstants {
        let [[a, b], [c, d]] = self.matrix;
        let (g1, g2) = self.gammas();
        let anchor = (-self.psi2 * self.horizon).exp();
        TwoStageConstants {
            a,
            b,
            c,
            d,
            h_star_ts_l: self.h_star,
            mu_star_ts_l: self.mu_star,
            lambda_ts_l: self.lambda,
            big_a: (self.y1 - self.c_bar) / self.r,
            big_b: -g1 / (self.psi1 - self.r),
            big_c: -g2 * anchor / (self.psi2 - self.r),
            big_d: self.k2 * anchor,
            psi1: self.psi1,
            psi2: self.psi2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoStageSolution {
    pub horizon: f64,
    pub stage: LockdownStage,
    pub constants: TwoStageConstants,
    pub b_t: f64,
    pub h_t: f64,
    pub mu_t: f64,
    pub p_reopen: f64,
    /// Condition number of the terminal fixed-point system.
    pub condition: f64,
    pub after_path: SaddlePath,
    pub during: Trajectory,
    pub after: Trajectory,
}

/// Two-stage solver with the after-lockdown value function built once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoStageSolver {
    pub model: Model,
    pub value: QuadraticValueFunction,
    pub psi1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TerminalState {
    pub lambda: f64,
    pub mu_t: f64,
    pub b_t: f64,
    pub h_t: f64,
    pub condition: f64,
}

impl TwoStageSolver {
    pub fn new(m: &Model) -> Result<Self> {
        let value = after_value_function(m)?;
        Ok(Self {
            model: *m,
            value,
            psi1: lq_spectrum(m)?.psi1,
        })
    }

    /// Solves the value-matching conditions λ = v_b(b_T, h_T), μ_T = v_h(b_T, h_T).
    pub fn terminal(&self, horizon: f64) -> Result<TerminalState> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(ModelError::InvalidParameter {
                name: "T",
                reason: "lockdown length must be positive".into(),
            });
        }
        let end = |lam: f64, mu: f64| -> Result<(f64, f64)> {
            let s = LockdownStage::new(&self.model, lam, mu, horizon)?;
            Ok((s.b(horizon), s.h(horizon)))
        };
        // terminal states are affine in (λ, μ_T)
        let (b00, h00) = end(0.0, 0.0)?;
        let (b10, h10) = end(1.0, 0.0)?;
        let (b01, h01) = end(0.0, 1.0)?;
        let (bl, hl) = (b10 - b00, h10 - h00);
        let (bm, hm) = (b01 - b00, h01 - h00);
        let v = &self.value;
        let mat = Matrix2::new(
            1.0 - 2.0 * v.a2b * bl - v.abh * hl,
            -2.0 * v.a2b * bm - v.abh * hm,
            -2.0 * v.a2h * hl - v.abh * bl,
            1.0 - 2.0 * v.a2h * hm - v.abh * bm,
        );
        let rhs = Vector2::new(
            v.ab + 2.0 * v.a2b * b00 + v.abh * h00,
            v.ah + 2.0 * v.a2h * h00 + v.abh * b00,
        );
        let sv = mat.singular_values();
        let condition = sv.max() / sv.min();
        if !(condition.is_finite() && condition < 1e14) {
            return Err(ModelError::Singular { cond: condition });
        }
        let x = mat.lu().solve(&rhs).ok_or(ModelError::Singular { cond: condition })?;
        let (lambda, mu_t) = (x[0], x[1]);
        let s = LockdownStage::new(&self.model, lambda, mu_t, horizon)?;
        Ok(TerminalState {
            lambda,
            mu_t,
            b_t: s.b(horizon),
            h_t: s.h(horizon),
            condition,
        })
    }

    /// Price of good 2 at reopening after a lockdown of known length.
    pub fn reopening_price(&self, horizon: f64) -> Result<f64> {
        let ts = self.terminal(horizon)?;
        let m = &self.model;
        let ss = steady_state_lq(m, m.outputs(SectorRegime::TwoSector), self.psi1, ts.b_t, ts.h_t)?;
        Ok(SaddlePath::new(m, ss, horizon, ts.b_t, ts.h_t)
            .at(horizon)
            .p
            .unwrap_or(f64::NAN))
    }

    pub fn solve(&self, horizon: f64, settings: &SimSettings) -> Result<TwoStageSolution> {
        let ts = self.terminal(horizon)?;
        let m = &self.model;
        let stage = LockdownStage::new(m, ts.lambda, ts.mu_t, horizon)?;
        let ss = steady_state_lq(m, m.outputs(SectorRegime::TwoSector), self.psi1, ts.b_t, ts.h_t)?;
        let after_path = SaddlePath::new(m, ss, horizon, ts.b_t, ts.h_t);
        let window = settings
            .horizon
            .unwrap_or_else(|| crate::equilibrium::default_horizon(self.psi1));
        let grid = Grid::new(0.0, horizon, settings.dt);
        let y1l = m.outputs(SectorRegime::Lockdown).y1;
        let during = Trajectory::from_points(grid.times().into_iter().map(|t| stage.point(t)), y1l, m);
        let after = sample(m, &after_path, &Grid::new(horizon, window, settings.dt));
        Ok(TwoStageSolution {
            horizon,
            constants: stage.constants(),
            stage,
            b_t: ts.b_t,
            h_t: ts.h_t,
            mu_t: ts.mu_t,
            p_reopen: after_path.at(horizon).p.unwrap_or(f64::NAN),
            condition: ts.condition,
            after_path,
            during,
            after,
        })
    }
}

pub fn solve_two_stage(m: &Model, horizon: f64, settings: &SimSettings) -> Result<TwoStageSolution> {
    TwoStageSolver::new(m)?.solve(horizon, settings)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectedPriceReport {
    pub delta: f64,
    pub expected_price: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    /// Upper end of the integration range, where e^{−δs} reaches 1e−10.
    pub truncation: f64,
    pub min_price: f64,
    pub max_price: f64,
    /// (probability level, reopening price) from the exponential law.
    pub quantiles: Vec<(f64, f64)>,
    /// Two-sector price at time zero without a lockdown.
    pub two_sector_benchmark: f64,
}

const TAIL_MASS: f64 = 1e-10;
const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];
const QUANTILE_SAMPLES: usize = 1000;
const POLE_SCAN: usize = 400;

/// Expected reopening price when the lockdown length is exponential with rate `delta`.
///
/// Fails when the shadow price of wealth at reopening reaches zero inside the
/// integration range: the reopening price has a pole there and the expectation
/// does not exist.
pub fn expected_price_random(solver: &TwoStageSolver, delta: f64, spec: &QuadratureSpec) -> Result<ExpectedPriceReport> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(ModelError::InvalidParameter {
            name: "delta",
            reason: "rate must be positive".into(),
        });
    }
    let truncation = (1.0 / TAIL_MASS).ln() / delta;
    let lambda_at = |s: f64| solver.terminal(s).map(|t| t.lambda);

    let mut prev = (truncation / POLE_SCAN as f64 * 1e-3, lambda_at(truncation / POLE_SCAN as f64 * 1e-3)?);
    for k in 1..=POLE_SCAN {
        let s = truncation * k as f64 / POLE_SCAN as f64;
        let lam = lambda_at(s)?;
        if !(lam > 0.0) {
            let (mut lo, mut hi) = (prev.0, s);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if lambda_at(mid)? > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Err(ModelError::UndefinedExpectation(format!(
                "reopening shadow price vanishes at s = {:.6}; probability of a longer lockdown is {:.3e}",
                0.5 * (lo + hi),
                (-delta * 0.5 * (lo + hi)).exp()
            )));
        }
        prev = (s, lam);
    }

    let mut lo_p = f64::INFINITY;
    let mut hi_p = f64::NEG_INFINITY;
    let mut failure = None;
    let res = integrate(
        |s| match solver.reopening_price(s) {
            Ok(p) => {
                lo_p = lo_p.min(p);
                hi_p = hi_p.max(p);
                delta * (-delta * s).exp() * p
            }
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        truncation,
        spec,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let res = res?;

    let mut draws = (0..QUANTILE_SAMPLES)
        .map(|k| {
            let q = (k as f64 + 0.5) / QUANTILE_SAMPLES as f64;
            solver.reopening_price(-(1.0 - q).ln() / delta)
        })
        .collect::<Result<Vec<_>>>()?;
    draws.sort_by(f64::total_cmp);
    let quantiles = QUANTILE_LEVELS
        .iter()
        .map(|&q| {
            let idx = ((q * QUANTILE_SAMPLES as f64) as usize).min(QUANTILE_SAMPLES - 1);
            (q, draws[idx])
        })
        .collect();

    let m = &solver.model;
    let nl = steady_state_lq(m, m.outputs(SectorRegime::TwoSector), solver.psi1, m.initial.b0, m.initial.h0)?;
    let benchmark = SaddlePath::new(m, nl, 0.0, m.initial.b0, m.initial.h0)
        .at(0.0)
        .p
        .unwrap_or(f64::NAN);

    Ok(ExpectedPriceReport {
        delta,
        expected_price: res.value,
        error_estimate: res.error_estimate,
        evaluations: res.evaluations,
        truncation,
        min_price: lo_p,
        max_price: hi_p,
        quantiles,
        two_sector_benchmark: benchmark,
    })
}
