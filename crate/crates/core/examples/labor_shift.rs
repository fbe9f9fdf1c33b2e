//! Permanent move of labor into sector 1 at reopening: steady-state
//! comparison, price decomposition and the adjustment path.

use habitlock::config::ConfigFile;
use habitlock::labor_shift::{compare_with_margin, decompose, run_shift};
use habitlock::lockdown::{LockdownEpisode, SimSettings};
use habitlock::Model;

fn report(label: &str, m: &Model, xi_new: f64, t_tilde: f64) -> Result<(), Box<dyn std::error::Error>> {
    let ep = LockdownEpisode::new(t_tilde);
    let xi_old = m.technology.xi;
    let d = decompose(m, &ep, xi_old, xi_new, t_tilde, 0.0)?;
    println!(
        "{label:<22} a_c2h = {:+.3}: composition effect {:+.4}, habit effect {:+.4}",
        m.utility.a_c2h, d.lce, d.sse
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ConfigFile::parse(include_str!("../../../configs/baseline.toml"))?;
    let m = cfg.model();
    let xi_new = cfg.shift_target().unwrap_or(0.65);
    let t_tilde = 9.0;

    let cmp = compare_with_margin(&m, m.technology.xi, xi_new, 0.0)?;
    println!("share {} -> {xi_new}", m.technology.xi);
    println!("p* before {:.6}, after {:.6}", cmp.p_star_bl, cmp.p_star_al);
    println!("lambda before {:.6}, after {:.6}", cmp.lambda_nl, cmp.lambda_al);
    println!("sufficient condition for a higher p*: {:?}", cmp.guarantee);
    match cmp.t_underline_shift {
        Some(t) => println!("price starts below the no-lockdown path for durations under {t:.3}"),
        None => println!("no short-run threshold duration"),
    }

    let run = run_shift(&m, &LockdownEpisode::new(t_tilde), xi_new, &SimSettings::default())?;
    println!(
        "reopening price {:.6}, converges {:?} to {:.6}",
        run.p_reopen, run.direction, run.p_star_al
    );

    println!();
    report("reference", &m, xi_new, t_tilde)?;
    let mut sat = m;
    sat.utility.a_c2 = 1.4;
    sat.utility.a_c2c2 = -2.4;
    sat.utility.a_c1c2 = 0.4;
    sat.utility.a_c2h = -0.5;
    report("strong satiation", &sat, xi_new, t_tilde)?;
    let mut sub = m;
    sub.utility.a_c2h = 0.0;
    report("weak satiation", &sub, xi_new, t_tilde)?;
    Ok(())
}
