//! Branch factor reports, plus a brute-force check of the GHZ values.

use lfsim::branch::{branch_factor, ghz_complexities_by_search, two_random_circuit_bounds};
use lfsim::ewfs::FriendKind;

fn main() -> lfsim::Result<()> {
    let friends = [
        FriendKind::Ghz { n: 17 },
        FriendKind::RandomUnitary { n: 3, seed: 0 },
        FriendKind::RandomUnitary { n: 6, seed: 0 },
        FriendKind::Dicke { n: 8, k: 4 },
    ];
    for f in friends {
        let r = branch_factor(&f)?;
        println!(
            "{:<22} C_I {:>8} C_D {:>4} B {:>8} [{}]",
            f.to_string(),
            r.c_interference.value,
            r.c_distinguishability.value,
            r.branch_factor.value,
            r.branch_factor.flag
        );
    }
    let r = two_random_circuit_bounds(10, 4, 6)?;
    println!(
        "two random circuits (n=10, d=4,6): B ~ {}",
        r.branch_factor.value
    );

    for n in 1..=3 {
        let (ci, cd) = ghz_complexities_by_search(n)?;
        println!("search ghz:{n}: C_I = {ci}, C_D = {cd}");
    }
    Ok(())
}
