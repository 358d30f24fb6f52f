//! Flat key = value configuration, with overrides.

use lfsim::config::EwfsConfig;
use lfsim::experiment::run_experiment;

const TEXT: &str = "
# analytic scaling of the noiseless table
friend = ghz:7
mode = analytic_scaled
p1 = 0.001
p2 = 0.01
angles = historical
inequality = semi_brukner
";

fn main() -> lfsim::Result<()> {
    let mut cfg = EwfsConfig::from_text(TEXT)?;
    let r = run_experiment(&cfg)?;
    println!("historical angles: LHS {:.5}", r.lhs.mean);

    cfg.apply_override("angles=optimal")?;
    let r = run_experiment(&cfg)?;
    println!("optimal angles:    LHS {:.5}", r.lhs.mean);
    println!("---\n{}", cfg.to_text());
    Ok(())
}
