//! Expected reopening price when the lockdown ends at an exponential random
//! time, for several exit rates.

use habitlock::anticipated::{expected_price_random, TwoStageSolver};
use habitlock::config::ConfigFile;
use habitlock::quadrature::QuadratureSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ConfigFile::parse(include_str!("../../../configs/baseline.toml"))?;
    let m = cfg.model();
    let solver = TwoStageSolver::new(&m)?;
    let deltas = cfg.anticipated.map(|a| a.deltas).unwrap_or_default();

    for delta in deltas {
        match expected_price_random(&solver, delta, &QuadratureSpec::default()) {
            Ok(rep) => println!(
                "delta {delta:>6}: E[p] = {:.6} (+/- {:.1e}), range [{:.4}, {:.4}], median {:.4}, benchmark {:.4}",
                rep.expected_price,
                rep.error_estimate,
                rep.min_price,
                rep.max_price,
                rep.quantiles[2].1,
                rep.two_sector_benchmark
            ),
            Err(e) => println!("delta {delta:>6}: {e}"),
        }
    }
    Ok(())
}
