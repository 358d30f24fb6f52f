//! Worst-case certification arithmetic.

use lfsim::qsim::{DepolarizingScope, NoiseModel};
use lfsim::validate::{
    certify, max_two_qubit_error, min_valid_probability, worst_case_valid_x, GateCounts,
    X_TILDE_MAX,
};

fn main() -> lfsim::Result<()> {
    let q_min = min_valid_probability(X_TILDE_MAX)?;
    println!("minimum valid fraction at 2√2: {q_min:.6}");
    println!(
        "worst case at q = 0.99, x = 2.8: {:.4}",
        worst_case_valid_x(2.8, 0.99)?
    );

    let counts = GateCounts::new(100, 10);
    let p2 = max_two_qubit_error(&counts, 0.1, 2.0 / X_TILDE_MAX)?;
    println!("100 single + 10 CNOT: p2 <= {p2:.4}");

    let noise = NoiseModel::depolarizing(0.001, 0.01, DepolarizingScope::Global)?;
    let r = certify(2.70, 0.01, 3.0, &GateCounts::new(6, 9), &noise)?;
    println!(
        "q = {:.4}, x_valid >= {:.4}, certified: {}",
        r.q, r.x_valid_lower, r.certified
    );
    Ok(())
}
