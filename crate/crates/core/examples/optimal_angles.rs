//! Maximize every inequality's closed-form left-hand side.

use lfsim::lf::{optimal_angles, Inequality};

fn main() {
    for ineq in Inequality::ALL {
        let (angles, lhs) = optimal_angles(ineq);
        println!("{:<14} max {:.6}", ineq.to_string(), lhs);
        println!(
            "    theta {:?}",
            angles.theta.map(|a| (a * 100.0).round() / 100.0)
        );
        println!(
            "    beta  {:?}",
            angles.beta.map(|a| (a * 100.0).round() / 100.0)
        );
    }
}
