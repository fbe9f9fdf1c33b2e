//! The same lockdown without habits: consumption of good 1 stays flat and the
//! price jumps straight back when the sector reopens.

use habitlock::config::ConfigFile;
use habitlock::equilibrium::{no_habits_path, Grid};
use habitlock::params::SectorRegime;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut m = ConfigFile::parse(include_str!("../../../configs/baseline.toml"))?.model();
    m.utility.a_h = 0.0;
    m.utility.a_hh = 0.0;
    m.utility.a_c1h = 0.0;
    m.utility.a_c2h = 0.0;
    let b0 = m.initial.b0;
    let t_tilde = 9.0;

    let before = no_habits_path(&m, SectorRegime::TwoSector, b0, &Grid::new(0.0, t_tilde, 1.0))?;
    let during = no_habits_path(&m, SectorRegime::Lockdown, b0, &Grid::new(0.0, t_tilde, 1.0))?;
    let after = no_habits_path(&m, SectorRegime::TwoSector, b0, &Grid::new(t_tilde, 2.0 * t_tilde, 1.0))?;
    println!("c1 without lockdown {:.6}, during {:.6}, after {:.6}", before.c1[0], during.c1[0], after.c1[0]);
    println!(
        "price before {:.6}, after {:.6}",
        before.p[0].unwrap_or(f64::NAN),
        after.p[0].unwrap_or(f64::NAN)
    );
    Ok(())
}
