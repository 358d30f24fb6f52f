//! Compare circuit-level correlators against -cos(beta_j - theta_i).

use lfsim::ewfs::{EwfsBuilder, FriendKind, MeasurementAngles, Setting};
use lfsim::infer::{Decoder, DecoderKind};
use lfsim::lf::{analytic_expectations, Inequality};
use lfsim::qsim::exact_pair_expectation;

fn main() -> lfsim::Result<()> {
    let angles = MeasurementAngles::historical();
    let table = analytic_expectations(&angles);
    let builder = EwfsBuilder::new(FriendKind::Ghz { n: 3 }, FriendKind::Ghz { n: 3 }, angles)?;

    let mut worst: f64 = 0.0;
    for x in Setting::ALL {
        for y in Setting::ALL {
            let c = builder.circuit(x, y)?;
            let state = c.circuit.run()?;
            let decode = |s: Setting, len: usize| -> lfsim::Result<Decoder> {
                if s == Setting::Peek {
                    Decoder::new(DecoderKind::MajorityVote, len)
                } else {
                    Ok(Decoder::sign())
                }
            };
            let da = decode(x, c.alice_measured.len())?;
            let db = decode(y, c.bob_measured.len())?;
            let e = exact_pair_expectation(&state, &da, &c.alice_measured, &db, &c.bob_measured)?;
            let want = table.ab[x.index() - 1][y.index() - 1];
            worst = worst.max((e - want).abs());
            println!(
                "A{}B{}: circuit {e:+.9}  closed form {want:+.9}",
                x.index(),
                y.index()
            );
        }
    }
    println!("largest deviation {worst:.2e}");
    for ineq in Inequality::ALL {
        println!("{ineq}: {:.6}", ineq.spec().evaluate(&table)?);
    }
    Ok(())
}
