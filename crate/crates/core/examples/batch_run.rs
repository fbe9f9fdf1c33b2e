//! Runs every scenario of a config file and writes CSVs and a JSON summary,
//! as the command-line tool does.

use std::path::PathBuf;

use habitlock::config::ConfigFile;
use habitlock::lockdown::SimSettings;
use habitlock::runner::{run, RunManifest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/baseline.toml"));
    let config = ConfigFile::load(&path)?;
    let outdir = std::env::temp_dir().join("habitlock_batch");
    let manifest = RunManifest::from_config(path, config, outdir.clone(), SimSettings::default())?;

    let report = run(&manifest)?;
    for sc in report.summary["scenarios"].as_array().into_iter().flatten() {
        println!("{}", sc["name"].as_str().unwrap_or("?"));
    }
    println!("{} files under {}", report.files.len(), outdir.display());
    Ok(())
}
