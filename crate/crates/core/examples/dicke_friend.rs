use lfsim::config::{EwfsConfig, Mode};
use lfsim::ewfs::{dicke_state, FriendKind};
use lfsim::experiment::run_experiment;
use lfsim::lf::Inequality;

fn main() -> lfsim::Result<()> {
    let d = dicke_state(4, 2)?;
    let support: Vec<String> = (0..16)
        .filter(|&i| d.amplitude(i).norm() > 1e-12)
        .map(|i| format!("{i:04b}"))
        .collect();
    println!("D(4,2) support: {}", support.join(" "));

    for (n, k) in [(2, 1), (4, 2), (6, 3)] {
        let mut cfg = EwfsConfig::new(FriendKind::Dicke { n, k }, Inequality::SemiBrukner);
        cfg.mode = Mode::Exact;
        cfg.trials = 1;
        let r = run_experiment(&cfg)?;
        println!(
            "dicke:{n}:{k}  LHS {:.6}  branch factor ~{} ({})",
            r.lhs.mean, r.branch.branch_factor.value, r.branch.branch_factor.flag
        );
    }
    Ok(())
}
