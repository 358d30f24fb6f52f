use proptest::prelude::*;

use lfsim::config::EwfsConfig;
use lfsim::ewfs::{basis_change_gate, MeasurementAngles};
use lfsim::infer::{Decoder, DecoderKind};
use lfsim::lf::{analytic_expectations, Inequality};
use lfsim::qsim::{BitString, Circuit, Gate, RngStream};
use lfsim::validate::worst_case_valid_x;

fn angles() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(0.0..360.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lhs_depends_only_on_angle_differences(t in angles(), b in angles(), shift in -720.0..720.0f64) {
        let a = MeasurementAngles::new(t, b).unwrap();
        let s = a.shifted(shift).unwrap();
        let (ta, ts) = (analytic_expectations(&a), analytic_expectations(&s));
        for ineq in Inequality::ALL {
            let spec = ineq.spec();
            prop_assert!((spec.evaluate(&ta).unwrap() - spec.evaluate(&ts).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn chsh_forms_never_exceed_tsirelson(t in angles(), b in angles()) {
        let table = analytic_expectations(&MeasurementAngles::new(t, b).unwrap());
        for ineq in Inequality::ALL.into_iter().filter(|i| i.is_chsh_form()) {
            prop_assert!(ineq.spec().evaluate(&table).unwrap() <= 2.0f64.sqrt() * 2.0 - 2.0 + 1e-9);
        }
    }

    #[test]
    fn worst_case_is_monotone(x in -4.0..4.0f64, dx in 0.0..1.0f64, q in 0.05..0.95f64, dq in 0.0..0.05f64) {
        let base = worst_case_valid_x(x, q).unwrap();
        prop_assert!(worst_case_valid_x(x + dx, q).unwrap() >= base);
        prop_assert!(worst_case_valid_x(x, q + dq).unwrap() >= base - 1e-12);
    }

    #[test]
    fn gates_preserve_norm(ops in prop::collection::vec((0usize..4, 0usize..4, 0.0..360.0f64), 1..30)) {
        let mut c = Circuit::new(4);
        for (kind, q, deg) in ops {
            let g = match kind {
                0 => Gate::h(q),
                1 => basis_change_gate(deg, q),
                2 => Gate::s(q),
                _ => Gate::cnot(q, (q + 1) % 4).unwrap(),
            };
            c.push(g).unwrap();
        }
        let s = c.run().unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        let back = {
            let mut inv = c.clone();
            inv.append(&c.inverse()).unwrap();
            inv.run().unwrap()
        };
        prop_assert!((back.amplitude(0).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn decoders_agree_on_ghz_branches(n in 1usize..12, branch in any::<bool>(), seed in any::<u64>()) {
        let n = if n % 2 == 0 { n + 1 } else { n };
        let bits = BitString::new(if branch { (1u64 << n) - 1 } else { 0 }, n);
        let mut rng = RngStream::new(seed, 0).rng();
        let want = if branch { -1 } else { 1 };
        for kind in [DecoderKind::MajorityVote, DecoderKind::RandomSingle, DecoderKind::SignSingle(n - 1)] {
            let d = Decoder::new(kind, n).unwrap();
            prop_assert_eq!(d.decode(bits, &mut rng).unwrap(), want);
        }
    }

    #[test]
    fn config_text_round_trips(n in 1usize..9, shots in 1usize..100_000, seed in any::<u64>(), p in 0.0..0.5f64) {
        let mut cfg = EwfsConfig::default();
        cfg.set("friend", &format!("ghz:{}", 2 * n - 1)).unwrap();
        cfg.set("shots", &shots.to_string()).unwrap();
        cfg.set("seed", &seed.to_string()).unwrap();
        cfg.set("p2", &p.to_string()).unwrap();
        cfg.set("angles", "historical").unwrap();
        let back = EwfsConfig::from_text(&cfg.to_text()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
