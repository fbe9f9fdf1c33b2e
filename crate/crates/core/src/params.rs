//! Model parameters, validation, sector outputs and threshold constants.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Coefficients of the linear-quadratic utility over (c1, c2, h).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LqUtility {
    pub a_c1: f64,
    pub a_c2: f64,
    pub a_h: f64,
    pub a_c1c1: f64,
    pub a_c2c2: f64,
    pub a_hh: f64,
    pub a_c1c2: f64,
    pub a_c1h: f64,
    pub a_c2h: f64,
}

impl LqUtility {
    pub fn value(&self, c1: f64, c2: f64, h: f64) -> f64 {
        self.a_c1 * c1
            + self.a_c2 * c2
            + self.a_h * h
            + 0.5 * self.a_c1c1 * c1 * c1
            + 0.5 * self.a_c2c2 * c2 * c2
            + 0.5 * self.a_hh * h * h
            + self.a_c1c2 * c1 * c2
            + self.a_c1h * c1 * h
            + self.a_c2h * c2 * h
    }

    /// Gradient ordered (u_c1, u_c2, u_h).
    pub fn gradient(&self, c1: f64, c2: f64, h: f64) -> [f64; 3] {
        [
            self.a_c1 + self.a_c1c1 * c1 + self.a_c1c2 * c2 + self.a_c1h * h,
            self.a_c2 + self.a_c2c2 * c2 + self.a_c1c2 * c1 + self.a_c2h * h,
            self.a_h + self.a_hh * h + self.a_c1h * c1 + self.a_c2h * c2,
        ]
    }

    /// Hessian ordered (c1, c2, h).
    pub fn hessian(&self) -> [[f64; 3]; 3] {
        [
            [self.a_c1c1, self.a_c1c2, self.a_c1h],
            [self.a_c1c2, self.a_c2c2, self.a_c2h],
            [self.a_c1h, self.a_c2h, self.a_hh],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcavityReport {
    pub own_terms_negative: bool,
    /// a_c1c1·a_hh − a_c1h²
    pub minor_c1h: f64,
    pub minor_ok: bool,
    pub hessian_det: f64,
    pub det_ok: bool,
}

impl ConcavityReport {
    pub fn passed(&self) -> bool {
        self.own_terms_negative && self.minor_ok && self.det_ok
    }
}

pub fn validate_concavity(u: &LqUtility) -> ConcavityReport {
    let m = u.hessian();
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let minor = u.a_c1c1 * u.a_hh - u.a_c1h * u.a_c1h;
    ConcavityReport {
        own_terms_negative: u.a_c1c1 < 0.0 && u.a_c2c2 < 0.0 && u.a_hh < 0.0,
        minor_c1h: minor,
        minor_ok: minor > 0.0,
        hessian_det: det,
        det_ok: det < 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Technology {
    pub alpha: f64,
    pub tau: f64,
    pub xi: f64,
    pub lbar: f64,
    pub a_realloc: f64,
}

impl Technology {
    pub fn validate(&self) -> Result<()> {
        open_unit("alpha", self.alpha)?;
        open_unit("xi", self.xi)?;
        open_unit("a_realloc", self.a_realloc)?;
        if !(self.lbar > 0.0 && self.lbar.is_finite()) {
            return Err(invalid("lbar", "must be positive"));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(invalid("tau", "must be non-negative"));
        }
        Ok(())
    }

    /// Sector-1 labor share when the lockdown reallocation becomes permanent.
    pub fn reallocated_share(&self) -> f64 {
        self.xi + self.a_realloc * (1.0 - self.xi)
    }
}

/// Production regime determining which sectors operate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SectorRegime {
    TwoSector,
    Lockdown,
    PostShift { xi_new: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Outputs {
    pub y1: f64,
    pub y2: f64,
}

impl Outputs {
    pub fn sector2_active(&self) -> bool {
        self.y2 > 0.0
    }
}

pub fn sector_outputs(t: &Technology, regime: SectorRegime) -> Outputs {
    let a = t.alpha;
    match regime {
        SectorRegime::TwoSector => Outputs {
            y1: (t.xi * t.lbar).powf(a),
            y2: ((1.0 - t.xi) * t.lbar).powf(a),
        },
        SectorRegime::Lockdown => Outputs {
            y1: (t.reallocated_share() * t.lbar).powf(a),
            y2: 0.0,
        },
        SectorRegime::PostShift { xi_new } => Outputs {
            y1: (xi_new * t.lbar).powf(a),
            y2: ((1.0 - xi_new) * t.lbar).powf(a),
        },
    }
}

/// Wage and profit of a sector employing `ell` units of labor at price `p`.
pub fn wages_and_profits(p: f64, ell: f64, t: &Technology) -> (f64, f64) {
    let w = p * t.alpha * ell.powf(t.alpha - 1.0);
    let pi = p * (1.0 - t.alpha) * ell.powf(t.alpha) - t.tau;
    (w, pi)
}

/// Lowest relative price at which sector 2 covers its fixed cost.
pub fn price_floor(t: &Technology, y2: f64) -> f64 {
    if t.tau == 0.0 {
        0.0
    } else {
        t.tau / ((1.0 - t.alpha) * y2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Household {
    pub rho: f64,
    pub r: f64,
    pub phi: f64,
}

impl Household {
    pub fn validate(&self) -> Result<()> {
        if !(self.phi > 0.0 && self.phi.is_finite()) {
            return Err(invalid("phi", "must be positive"));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(invalid("rho", "must be positive"));
        }
        if self.rho != self.r {
            return Err(invalid(
                "r",
                format!("must equal rho ({} != {})", self.r, self.rho),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub b0: f64,
    pub h0: f64,
}

/// Complete parameterization of the economy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model {
    pub utility: LqUtility,
    pub technology: Technology,
    pub household: Household,
    pub initial: InitialState,
}

impl Model {
    /// Structural checks: concavity, intervals, r = rho, h0 > 0.
    pub fn validate(&self) -> Result<()> {
        let report = validate_concavity(&self.utility);
        if !report.passed() {
            return Err(ModelError::NotConcave(format!(
                "own terms negative: {}, a_c1c1*a_hh - a_c1h^2 = {}, det = {}",
                report.own_terms_negative, report.minor_c1h, report.hessian_det
            )));
        }
        self.technology.validate()?;
        self.household.validate()?;
        if !(self.initial.h0 > 0.0 && self.initial.h0.is_finite()) {
            return Err(invalid("h0", "must be positive"));
        }
        if !self.initial.b0.is_finite() {
            return Err(invalid("b0", "must be finite"));
        }
        Ok(())
    }

    pub fn outputs(&self, regime: SectorRegime) -> Outputs {
        sector_outputs(&self.technology, regime)
    }

    pub fn with_initial(mut self, b0: f64, h0: f64) -> Self {
        self.initial = InitialState { b0, h0 };
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub a_c1h_bar: f64,
    pub a_c1_lower: f64,
    pub a_c2h_bar: f64,
    pub b0_lower: f64,
    pub b0_upper: f64,
    pub a_c2_lower: f64,
    pub h0_lower: f64,
    pub p_min: f64,
}

/// Saddle bound on the c1-h cross term.
pub fn a_c1h_bar(u: &LqUtility, hh: &Household) -> f64 {
    let (phi, rho) = (hh.phi, hh.rho);
    -((phi + rho) * u.a_c1c1 + phi * u.a_hh) / (rho + 2.0 * phi)
}

/// Threshold constants for the two-sector regime of `m`, with the stable root supplied.
pub fn compute_thresholds(m: &Model, psi1: f64) -> Result<Thresholds> {
    let u = &m.utility;
    let hh = &m.household;
    let (phi, rho, r) = (hh.phi, hh.rho, hh.r);
    let bar = a_c1h_bar(u, hh);
    if !(u.a_c1h < bar) {
        return Err(ModelError::NotSaddle {
            a_c1h: u.a_c1h,
            bound: bar,
        });
    }
    if !(psi1 < 0.0) {
        return Err(invalid("psi1", "stable root must be negative"));
    }
    let Outputs { y1, y2 } = m.outputs(SectorRegime::TwoSector);
    let InitialState { b0, h0 } = m.initial;

    let cross = (phi + rho) * u.a_c1c2 + phi * u.a_c2h;
    let a_c1_lower = -(phi * u.a_h + cross * y2) / (phi + rho);
    let m0 = u.a_c1 - a_c1_lower;
    let k = (phi + rho) * u.a_c1c1 + (rho + 2.0 * phi) * u.a_c1h + phi * u.a_hh;
    let g = phi * (psi1 - r) / ((phi + r) * psi1);
    let m1 = g * k / (phi + rho);
    let hab = r * (phi + psi1) / (phi * (psi1 - r));
    let f = r * b0 + y1 + hab * h0;

    let b0_lower = -y1 / r + (phi + psi1) / (phi * (r - psi1)) * h0;
    let b0_upper = b0_lower - m0 / (r * m1);
    let h0_lower = phi * (r - psi1) / (r * (phi + psi1)) * (y1 + m0 / m1);
    let t = &m.technology;
    let scale = (1.0 - t.alpha) * y2;
    let a_c2_lower = -u.a_c2c2 * y2
        + t.tau * m0 / scale
        + (t.tau * m1 / scale - g * (u.a_c1c2 + u.a_c2h)) * f;

    Ok(Thresholds {
        a_c1h_bar: bar,
        a_c1_lower,
        a_c2h_bar: -(phi + psi1) / phi * u.a_c1c2,
        b0_lower,
        b0_upper,
        a_c2_lower,
        h0_lower,
        p_min: price_floor(t, y2),
    })
}

fn open_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("{v} is outside (0, 1)")))
    }
}

fn invalid(name: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
