#![allow(dead_code)]

use habitlock::config::ConfigFile;
use habitlock::equilibrium::{lq_spectrum, steady_state_lq, SaddlePath};
use habitlock::lockdown::{EpisodePaths, LockdownEpisode};
use habitlock::params::SectorRegime;
use habitlock::Model;
use proptest::prelude::*;

pub const BASELINE: &str = include_str!("../../../../configs/baseline.toml");
pub const PENT_UP: &str = include_str!("../../../../configs/pent_up.toml");

pub fn baseline() -> Model {
    ConfigFile::parse(BASELINE).expect("baseline config").model()
}

pub fn pent_up() -> Model {
    ConfigFile::parse(PENT_UP).expect("pent-up config").model()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Discounted utility of the two-sector path from (b, h), by Simpson's rule
/// after mapping [0, ∞) to (0, 1] with s = −ln(x)/ρ.
pub fn value_by_quadrature(m: &Model, b: f64, h: f64) -> f64 {
    let psi1 = lq_spectrum(m).unwrap().psi1;
    let ss = steady_state_lq(m, m.outputs(SectorRegime::TwoSector), psi1, b, h).unwrap();
    let sp = SaddlePath::new(m, ss, 0.0, b, h);
    let rho = m.household.rho;
    let u = &m.utility;
    let limit = u.value(ss.h_star, ss.y2, ss.h_star);
    let f = |x: f64| {
        if x <= 0.0 {
            return limit;
        }
        let p = sp.at(-x.ln() / rho);
        u.value(p.c1, p.c2, p.h)
    };
    simpson(f, 0.0, 1.0, 4000) / rho
}

pub fn value_gradient(m: &Model, b: f64, h: f64) -> (f64, f64) {
    let e = 1e-4;
    (
        (value_by_quadrature(m, b + e, h) - value_by_quadrature(m, b - e, h)) / (2.0 * e),
        (value_by_quadrature(m, b, h + e) - value_by_quadrature(m, b, h - e)) / (2.0 * e),
    )
}

/// Perturbation of the reference economy drawn by proptest.
#[derive(Debug, Clone, Copy)]
pub struct Draw {
    pub a_c1: f64,
    pub a_c2: f64,
    pub a_c2c2: f64,
    pub a_c1c2: f64,
    pub a_c1h: f64,
    pub a_c2h: f64,
    pub a_hh: f64,
    pub phi: f64,
    pub rate: f64,
    pub b0: f64,
    pub h0: f64,
    pub tau: f64,
}

impl Draw {
    pub fn model(&self) -> Model {
        let mut m = baseline();
        let u = &mut m.utility;
        u.a_c1 = self.a_c1;
        u.a_c2 = self.a_c2;
        u.a_c2c2 = self.a_c2c2;
        u.a_c1c2 = self.a_c1c2;
        u.a_c1h = self.a_c1h;
        u.a_c2h = self.a_c2h;
        u.a_hh = self.a_hh;
        m.household.phi = self.phi;
        m.household.rho = self.rate;
        m.household.r = self.rate;
        m.initial.b0 = self.b0;
        m.initial.h0 = self.h0;
        m.technology.tau = self.tau;
        m
    }

    /// Model whose three regimes all have admissible steady states.
    pub fn admissible(&self) -> Option<Model> {
        let m = self.model();
        m.validate().ok()?;
        EpisodePaths::build(&m, &LockdownEpisode::new(1.0)).ok()?;
        Some(m)
    }
}

pub fn draws() -> impl Strategy<Value = Draw> {
    (
        (0.5f64..2.0, -2.0f64..-0.3, -0.5f64..0.6, 0.0f64..0.8),
        (-0.6f64..0.3, -2.0f64..-0.3, 0.05f64..0.6, 0.005f64..0.05),
        (-5.0f64..2.0, 0.2f64..1.0, 0.0f64..0.4, 1.0f64..2.5),
    )
        .prop_map(|((a_c2, a_c2c2, a_c1c2, a_c1h), (a_c2h, a_hh, phi, rate), (b0, h0, tau, a_c1))| Draw {
            a_c1,
            a_c2,
            a_c2c2,
            a_c1c2,
            a_c1h,
            a_c2h,
            a_hh,
            phi,
            rate,
            b0,
            h0,
            tau,
        })
}
