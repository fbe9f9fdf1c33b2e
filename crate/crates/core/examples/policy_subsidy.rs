//! Temporary fixed-cost relief that keeps sector 2 open after a lockdown too
//! long for it to reopen unaided.

use habitlock::config::ConfigFile;
use habitlock::lockdown::{policy_search, run_unanticipated, LockdownEpisode, SimSettings};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = ConfigFile::parse(include_str!("../../../configs/baseline.toml"))?.model();
    let settings = SimSettings { dt: 1e-4, horizon: Some(50.0) };
    let res = run_unanticipated(&m, &LockdownEpisode::new(9.0), &settings)?;
    println!("reopening price {:.7}, floor {:.7}", res.p_at_reopen, res.p_min);

    let plan = policy_search(&m, &res, settings.dt)?;
    println!("relief lasts {:.6} periods, until t = {:.6}", plan.duration, plan.t_reopen);
    println!("cumulative relief {:.3e}", plan.total_reduction);
    let step = (plan.tau_schedule.len() / 5).max(1);
    for (t, cut) in plan.tau_schedule.iter().step_by(step) {
        println!("  t = {t:.5}: cut fixed cost by {cut:.3e}");
    }

    let mut costly = m;
    costly.technology.tau = 0.5;
    match run_unanticipated(&costly, &LockdownEpisode::new(9.0), &settings) {
        Ok(r) => println!("tau = 0.5: {:?}", r.policy),
        Err(e) => println!("tau = 0.5: {e}"),
    }
    Ok(())
}
