//! Pauli trajectories against the exact channel on a small GHZ circuit.

use lfsim::qsim::{
    run_channel, run_noisy_trajectory, Circuit, DepolarizingScope, Gate, NoiseModel, RngStream,
};

fn main() -> lfsim::Result<()> {
    let mut c = Circuit::new(3);
    c.push(Gate::h(0))?;
    c.push(Gate::cnot(0, 1)?)?;
    c.push(Gate::cnot(0, 2)?)?;
    let noise = NoiseModel::depolarizing(0.01, 0.05, DepolarizingScope::Local)?;

    let exact = run_channel(&c, &noise)?.diagonal();
    let mut rng = RngStream::new(3, 1).rng();
    let runs = 20_000;
    let mut est = [0.0; 8];
    for _ in 0..runs {
        let s = run_noisy_trajectory(&c, &noise, &mut rng)?;
        for (e, p) in est.iter_mut().zip(s.probabilities()) {
            *e += p / runs as f64;
        }
    }
    for i in 0..8 {
        println!("{i:03b} exact {:.4} trajectories {:.4}", exact[i], est[i]);
    }
    Ok(())
}
