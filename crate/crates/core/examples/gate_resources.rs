use lfsim::experiment::FriendFamily;
use lfsim::validate::friend_resources;

fn main() -> lfsim::Result<()> {
    println!("family          n  qubits  prep(1q,2q)  circuit(1q,2q)");
    for family in [
        FriendFamily::Ghz,
        FriendFamily::RandomUnitary,
        FriendFamily::Dicke,
    ] {
        for n in 2..=6 {
            let friend = family.friend(n, 0);
            let r = friend_resources(&friend)?;
            println!(
                "{:<14} {n:>2} {:>7}  ({:>3},{:>4})   ({:>3},{:>4}){}",
                friend.family(),
                r.qubits,
                r.preparation.singles,
                r.preparation.doubles,
                r.circuit.singles,
                r.circuit.doubles,
                if r.circuit.bounded { "  bound" } else { "" }
            );
        }
    }
    Ok(())
}
