//! Calibrates the initial habit level of the pent-up demand economy and
//! reports the reopening overshoot, demand shift and trade-balance gap.

use habitlock::config::ConfigFile;
use habitlock::lockdown::{calibrate_overshoot, pent_up, steady_start, LockdownEpisode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/pent_up.toml");
    let cfg = ConfigFile::load(path.as_ref())?;
    let m = cfg.model();
    let t_tilde = cfg.lockdown.durations.first().copied().unwrap_or(9.0);

    let h0 = calibrate_overshoot(&m, t_tilde, 1.6, (0.3, 1.5))?;
    let m = steady_start(&m, h0);
    println!("calibrated h0 = {h0:.12}, b0 = {:.12}", m.initial.b0);

    let pu = pent_up(&m, &LockdownEpisode::new(t_tilde))?;
    println!("SSE           {:+.6}", pu.sse);
    println!("overshoot     {:+.3}%", pu.overshoot_pct);
    println!("demand shift  {:+.3}% of y2 ({:+.6} units)", pu.dc2_pct, pu.dc2);
    println!("c1 deviation  {:+.3}%", pu.dc1_pct);
    println!("TB gap        {:+.6}", pu.tb_gap);
    println!("price gap decays at rate {:.6}", -pu.decay_rate);
    Ok(())
}
