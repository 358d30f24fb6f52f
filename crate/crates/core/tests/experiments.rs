use lfsim::config::{AngleChoice, EwfsConfig, Mode};
use lfsim::ewfs::FriendKind;
use lfsim::experiment::{run_experiment, run_sweep, FriendFamily, SweepGrid};
use lfsim::lf::Inequality;
use lfsim::qsim::{DepolarizingScope, NoiseModel};
use lfsim::report::{emit, from_json, to_csv, to_json, Format};

fn ghz(n: usize) -> EwfsConfig {
    EwfsConfig::new(FriendKind::Ghz { n }, Inequality::SemiBrukner)
}

#[test]
fn sampled_and_exact_agree_within_five_sigma() {
    for ineq in [Inequality::SemiBrukner, Inequality::Brukner] {
        let mut cfg = EwfsConfig::new(FriendKind::Ghz { n: 3 }, ineq);
        cfg.angles = AngleChoice::Historical;
        cfg.trials = 1;
        cfg.mode = Mode::Exact;
        let exact = run_experiment(&cfg).unwrap();
        cfg.mode = Mode::Sampled;
        cfg.shots = 100_000;
        let sampled = run_experiment(&cfg).unwrap();
        for (e, s) in exact.pairs.iter().zip(&sampled.pairs) {
            let sigma = ((1.0 - e.ab.mean.powi(2)) / cfg.shots as f64)
                .sqrt()
                .max(1e-6);
            assert!(
                (e.ab.mean - s.ab.mean).abs() <= 5.0 * sigma,
                "{:?} vs {:?}",
                e.ab,
                s.ab
            );
        }
    }
}

#[test]
fn std_is_over_exactly_the_requested_trials() {
    let mut cfg = ghz(3);
    cfg.shots = 500;
    cfg.trials = 7;
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.lhs.values.len(), 7);
    let m = r.lhs.values.iter().sum::<f64>() / 7.0;
    let s = (r.lhs.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 6.0).sqrt();
    assert!((r.lhs.std - s).abs() < 1e-15);
}

#[test]
fn per_size_budgets_override_shots() {
    let mut cfg = ghz(5);
    cfg.set("size_budget", "5:200:4").unwrap();
    let r = run_experiment(&cfg).unwrap();
    assert_eq!((r.shots, r.trials), (200, 4));
}

#[test]
fn noiseless_ghz_record_is_violated_and_certified() {
    let r = run_experiment(&ghz(3)).unwrap();
    assert!(r.violated);
    assert!(r.validation.as_ref().unwrap().certified);
    assert_eq!(r.q_estimate, 1.0);
    let csv = to_csv(&[r]).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",true,true,1"));
}

#[test]
fn non_chsh_forms_report_na() {
    let mut cfg = EwfsConfig::new(FriendKind::Ghz { n: 1 }, Inequality::GenuineLf);
    cfg.mode = Mode::Exact;
    cfg.trials = 1;
    let r = run_experiment(&cfg).unwrap();
    assert!(r.validation.is_none());
    assert!(to_csv(&[r])
        .unwrap()
        .lines()
        .nth(1)
        .unwrap()
        .contains(",na,"));
}

#[test]
fn small_random_unitary_friend_falls_short() {
    let mut cfg = EwfsConfig::new(
        FriendKind::RandomUnitary { n: 2, seed: 3 },
        Inequality::SemiBrukner,
    );
    cfg.resample_friend = true;
    cfg.trials = 30;
    let r = run_experiment(&cfg).unwrap();
    assert!(r.lhs.mean > 0.0 && r.lhs.mean < 0.8284, "{}", r.lhs.mean);
}

#[test]
fn random_unitary_size_cap() {
    let cfg = EwfsConfig::new(
        FriendKind::RandomUnitary { n: 13, seed: 0 },
        Inequality::SemiBrukner,
    );
    let e = run_experiment(&cfg).unwrap_err();
    assert_eq!(e.category(), "infeasible");
}

#[test]
fn json_round_trip_and_repeatable_files() {
    let mut base = ghz(1);
    base.shots = 300;
    base.trials = 3;
    base.noise = NoiseModel::depolarizing(0.001, 0.01, DepolarizingScope::Local).unwrap();
    let grid = SweepGrid {
        families: vec![FriendFamily::Ghz, FriendFamily::Dicke],
        sizes: vec![3],
        noise_levels: vec![0.0, 0.02],
        decoders: vec![None],
        p1_ratio: 0.1,
    };
    let out = run_sweep(&base, &grid);
    assert_eq!(out.records.len(), 4);
    assert_eq!(
        from_json(&to_json(&out.records).unwrap()).unwrap(),
        out.records
    );

    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a/out.csv"), dir.path().join("b.csv"));
    emit(&out.records, Format::Csv, &a).unwrap();
    emit(&run_sweep(&base, &grid).records, Format::Csv, &b).unwrap();
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn empty_grid_gives_no_records() {
    let grid = SweepGrid {
        families: vec![FriendFamily::Ghz],
        sizes: vec![],
        noise_levels: vec![0.0],
        decoders: vec![None],
        p1_ratio: 0.1,
    };
    let out = run_sweep(&ghz(1), &grid);
    assert!(out.records.is_empty() && out.failures.is_empty());
    assert_eq!(to_csv(&out.records).unwrap().lines().count(), 1);
}
