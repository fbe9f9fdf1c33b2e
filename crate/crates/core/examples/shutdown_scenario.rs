//! Unanticipated lockdowns of increasing length: outcome class, reopening
//! price against the floor, and whether sector 2 survives.

use habitlock::config::ConfigFile;
use habitlock::lockdown::{run_unanticipated, LockdownEpisode, SimSettings};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ConfigFile::parse(include_str!("../../../configs/baseline.toml"))?;
    let m = cfg.model();
    let settings = SimSettings::default();

    for &t_tilde in &cfg.lockdown.durations {
        let res = run_unanticipated(&m, &LockdownEpisode::new(t_tilde), &settings)?;
        println!(
            "duration {t_tilde:>4}: {:?}, p = {:.6} vs floor {:.6} -> {}",
            res.classification.case,
            res.p_at_reopen,
            res.p_min,
            if res.reopens { "reopens" } else { "shuts down" }
        );
        if let Some(t) = res.t_underline {
            println!("               shutdown beyond a duration of {t:.4}");
        }
        let after = res.segment("after").expect("after segment");
        let last = after.trajectory.t.len() - 1;
        println!(
            "               h: {:.4} at reopening -> {:.4} at t = {:.0}",
            after.trajectory.h[0], after.trajectory.h[last], after.trajectory.t[last]
        );
    }
    Ok(())
}
