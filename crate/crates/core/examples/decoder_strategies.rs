//! Majority vote against reading one random register qubit, with 1%
//! readout error and gate noise applied qubit by qubit.

use lfsim::config::{EwfsConfig, PositionPolicy};
use lfsim::ewfs::FriendKind;
use lfsim::experiment::{run_sweep, FriendFamily, SweepGrid};
use lfsim::infer::DecoderChoice;
use lfsim::lf::Inequality;
use lfsim::qsim::{DepolarizingScope, NoiseModel};

fn main() -> lfsim::Result<()> {
    let mut base = EwfsConfig::new(FriendKind::Ghz { n: 3 }, Inequality::SemiBrukner);
    base.noise = NoiseModel::new(0.0, 0.0, 0.01, DepolarizingScope::Local)?;
    base.random_position = PositionPolicy::PerTrial;
    let grid = SweepGrid {
        families: vec![FriendFamily::Ghz],
        sizes: vec![3, 5],
        noise_levels: vec![0.01, 0.02],
        decoders: vec![Some(DecoderChoice::Majority), Some(DecoderChoice::Random)],
        p1_ratio: 0.1,
    };
    println!(
        "{:>3} {:>5} {:>9} {:>9} {:>8}",
        "n", "p2", "decoder", "mean", "std"
    );
    for r in run_sweep(&base, &grid).records {
        println!(
            "{:>3} {:>5} {:>9} {:>9.4} {:>8.4}",
            r.config.friend_charlie.size(),
            r.config.noise.p2(),
            r.decoder,
            r.lhs.mean,
            r.lhs.std
        );
    }
    Ok(())
}
