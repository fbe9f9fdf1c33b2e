//! Thresholds, roots and steady state of the reference economy.

use habitlock::config::ConfigFile;
use habitlock::equilibrium::{lq_spectrum, steady_state_lq};
use habitlock::params::{compute_thresholds, validate_concavity, SectorRegime};
use habitlock::spectral::addiction_or_satiation;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ConfigFile::parse(include_str!("../../../configs/baseline.toml"))?;
    let m = cfg.model();

    let conc = validate_concavity(&m.utility);
    println!("concavity: minor {:.4}, det {:.4}, pass {}", conc.minor_c1h, conc.hessian_det, conc.passed());

    let sd = lq_spectrum(&m)?;
    println!(
        "roots: psi1 = {:.6}, psi2 = {:.6} ({:?}, {:?})",
        sd.psi1,
        sd.psi2,
        sd.regime,
        addiction_or_satiation(&sd)
    );

    let th = compute_thresholds(&m, sd.psi1)?;
    println!("{th:#?}");

    let (b0, h0) = (m.initial.b0, m.initial.h0);
    let nl = steady_state_lq(&m, m.outputs(SectorRegime::TwoSector), sd.psi1, b0, h0)?;
    let lock = steady_state_lq(&m, m.outputs(SectorRegime::Lockdown), sd.psi1, b0, h0)?;
    println!(
        "two-sector: h* = {:.6}, lambda = {:.6}, p* = {:.6}",
        nl.h_star,
        nl.lambda,
        nl.p_star.unwrap_or(f64::NAN)
    );
    println!("lockdown:   h*_L = {:.6}", lock.h_star);
    Ok(())
}
