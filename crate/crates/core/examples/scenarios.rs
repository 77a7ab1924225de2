//! Runs the nine epistemic situations with the built-in presets.

use holoq::judgments::{run_all, ScenarioConfig};

fn main() -> holoq::Result<()> {
    let cfg = ScenarioConfig::default();
    let reports = run_all(&cfg)?;
    for r in &reports {
        print!("{r}");
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    println!("{passed}/{} situations pass", reports.len());
    Ok(())
}
