//! Noiseless Semi-Brukner violation with a GHZ friend, sampled.
//!
//!     cargo run --example ghz_violation -- 9

use lfsim::config::EwfsConfig;
use lfsim::ewfs::FriendKind;
use lfsim::experiment::run_experiment;
use lfsim::lf::Inequality;

fn main() -> lfsim::Result<()> {
    let n = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(5);
    let cfg = EwfsConfig::new(FriendKind::Ghz { n }, Inequality::SemiBrukner);
    let r = run_experiment(&cfg)?;

    println!(
        "friend ghz:{n}, {} qubits, decoder {}",
        cfg.total_qubits(),
        r.decoder
    );
    for p in &r.pairs {
        println!("  <A{}B{}> = {:+.4} ± {:.4}", p.x, p.y, p.ab.mean, p.ab.std);
    }
    println!(
        "LHS = {:.4} ± {:.4} (max 0.8284), violated: {}",
        r.lhs.mean, r.lhs.std, r.violated
    );
    if let Some(v) = &r.validation {
        println!("q = {:.4}, certified: {}", v.q, v.certified);
    }
    Ok(())
}
