//! Known-length lockdown solved as a two-stage problem, compared with the
//! unanticipated reopening price.

use habitlock::anticipated::TwoStageSolver;
use habitlock::config::ConfigFile;
use habitlock::lockdown::{run_unanticipated, LockdownEpisode, SimSettings};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = ConfigFile::parse(include_str!("../../../configs/baseline.toml"))?.model();
    let settings = SimSettings::default();
    let solver = TwoStageSolver::new(&m)?;
    println!(
        "value function fit residual {:.2e} (condition {:.2e})",
        solver.value.fit_residual, solver.value.condition
    );

    for horizon in [1e-6, 3.0, 9.0, 30.0] {
        let sol = solver.solve(horizon, &settings)?;
        let unanticipated = run_unanticipated(&m, &LockdownEpisode::new(horizon), &settings)?;
        println!(
            "T = {horizon:>8}: anticipated p = {:.6}, unanticipated p = {:.6}, floor = {:.6}",
            sol.p_reopen, unanticipated.p_at_reopen, unanticipated.p_min
        );
    }
    let sol = solver.solve(9.0, &settings)?;
    println!("{:#?}", sol.constants);
    println!("b_T = {:.6}, h_T = {:.6}, condition {:.2e}", sol.b_t, sol.h_t, sol.condition);
    Ok(())
}
