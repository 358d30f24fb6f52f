//! Circuit building and shot sampling on the bare statevector engine.

use lfsim::qsim::{sample_shot, Circuit, Gate, RngStream};

fn main() -> lfsim::Result<()> {
    let mut c = Circuit::new(3);
    c.push(Gate::h(0))?;
    c.push(Gate::cnot(0, 1)?)?;
    c.push(Gate::cnot(1, 2)?)?;
    let state = c.run()?;
    println!("P = {:?}", state.probabilities());

    let mut rng = RngStream::new(7, 0).rng();
    let mut counts = [0usize; 8];
    for _ in 0..10_000 {
        let b = sample_shot(&state, &[0, 1, 2], 0.01, &mut rng)?;
        counts[b.bits() as usize] += 1;
    }
    for (i, n) in counts.iter().enumerate() {
        println!("{i:03b} {n}");
    }
    Ok(())
}
