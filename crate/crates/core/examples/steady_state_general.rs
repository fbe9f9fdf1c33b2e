//! Root-found steady state for a non-quadratic utility, checked against the
//! closed form on the quadratic reference economy.

use habitlock::config::ConfigFile;
use habitlock::equilibrium::{lq_spectrum, steady_state_general, steady_state_lq, MarginalUtility};
use habitlock::params::SectorRegime;
use habitlock::LqUtility;

/// Quadratic utility plus a logarithmic term in good 1.
struct LogGoodOne {
    base: LqUtility,
    k: f64,
}

impl MarginalUtility for LogGoodOne {
    fn u_c1(&self, c1: f64, c2: f64, h: f64) -> f64 {
        self.base.u_c1(c1, c2, h) + self.k / c1
    }
    fn u_c2(&self, c1: f64, c2: f64, h: f64) -> f64 {
        self.base.u_c2(c1, c2, h)
    }
    fn u_h(&self, c1: f64, c2: f64, h: f64) -> f64 {
        self.base.u_h(c1, c2, h)
    }
    fn u_c1c1(&self, c1: f64, c2: f64, h: f64) -> f64 {
        self.base.u_c1c1(c1, c2, h) - self.k / (c1 * c1)
    }
    fn u_c1h(&self, c1: f64, c2: f64, h: f64) -> f64 {
        self.base.u_c1h(c1, c2, h)
    }
    fn u_hh(&self, c1: f64, c2: f64, h: f64) -> f64 {
        self.base.u_hh(c1, c2, h)
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = ConfigFile::parse(include_str!("../../../configs/baseline.toml"))?.model();
    let out = m.outputs(SectorRegime::TwoSector);
    let psi1 = lq_spectrum(&m)?.psi1;

    let closed = steady_state_lq(&m, out, psi1, m.initial.b0, m.initial.h0)?;
    let found = steady_state_general(&m.utility, &m, out, (0.1, 2.0))?;
    println!("closed form h* = {:.10}, root-found h* = {:.10}", closed.h_star, found.steady.h_star);
    println!("closed form p* = {:.10}, root-found p* = {:.10}", closed.p_star.unwrap_or(f64::NAN), found.steady.p_star.unwrap_or(f64::NAN));

    let log1 = LogGoodOne { base: m.utility, k: 0.05 };
    let q = steady_state_general(&log1, &m, out, (0.1, 2.0))?;
    println!(
        "with log term: h* = {:.6}, lambda = {:.6}, p* = {:.6}, {} bisection steps, unique = {}",
        q.steady.h_star,
        q.steady.lambda,
        q.steady.p_star.unwrap_or(f64::NAN),
        q.iterations,
        !q.non_unique
    );
    match steady_state_general(&m.utility, &m, out, (1.5, 2.0)) {
        Ok(_) => println!("unexpected root on [1.5, 2]"),
        Err(e) => println!("bracket [1.5, 2]: {e}"),
    }
    Ok(())
}
