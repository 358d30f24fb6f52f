//! Haar-random friends: the zero-vs-rest decoder misreads small registers.

use lfsim::config::EwfsConfig;
use lfsim::ewfs::{haar_unitary, FriendKind};
use lfsim::experiment::run_experiment;
use lfsim::lf::Inequality;

fn main() -> lfsim::Result<()> {
    let u = haar_unitary(3, 11)?;
    println!("Haar(3) unitarity error {:.1e}", u.unitarity_error());

    for n in 1..=4 {
        let mut cfg = EwfsConfig::new(
            FriendKind::RandomUnitary { n, seed: 11 },
            Inequality::SemiBrukner,
        );
        cfg.resample_friend = true;
        cfg.trials = 40;
        let r = run_experiment(&cfg)?;
        println!(
            "n = {n}: LHS {:.4} ± {:.4}, branch factor >= {}",
            r.lhs.mean, r.lhs.std, r.branch.branch_factor.value
        );
    }
    Ok(())
}
