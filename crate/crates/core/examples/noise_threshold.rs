//! Largest violating GHZ size at a few depolarizing rates.

use lfsim::config::EwfsConfig;
use lfsim::ewfs::FriendKind;
use lfsim::experiment::{run_sweep, FriendFamily, SweepGrid};
use lfsim::lf::Inequality;

fn main() {
    let base = EwfsConfig::new(FriendKind::Ghz { n: 1 }, Inequality::SemiBrukner);
    let levels = vec![0.01, 0.02, 0.03];
    let grid = SweepGrid {
        families: vec![FriendFamily::Ghz],
        sizes: (1..=17).step_by(2).collect(),
        noise_levels: levels.clone(),
        decoders: vec![None],
        p1_ratio: 0.1,
    };
    let out = run_sweep(&base, &grid);
    for p in levels {
        let best = out
            .records
            .iter()
            .filter(|r| r.config.noise.p2() == p && r.violated)
            .map(|r| r.config.friend_charlie.size())
            .max();
        match best {
            Some(n) => println!(
                "p2 = {p}: violations up to n = {n} (branch factor {})",
                n - 1
            ),
            None => println!("p2 = {p}: no violation"),
        }
    }
}
