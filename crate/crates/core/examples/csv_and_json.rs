//! Write a small sweep as CSV and JSON, then read the JSON back.

use lfsim::config::EwfsConfig;
use lfsim::ewfs::FriendKind;
use lfsim::experiment::{run_sweep, FriendFamily, SweepGrid};
use lfsim::lf::Inequality;
use lfsim::report::{emit, from_json, to_csv, Format};

fn main() -> lfsim::Result<()> {
    let mut base = EwfsConfig::new(FriendKind::Ghz { n: 1 }, Inequality::SemiBrukner);
    base.shots = 2000;
    base.trials = 4;
    let grid = SweepGrid {
        families: vec![FriendFamily::Ghz, FriendFamily::Dicke],
        sizes: vec![2, 4],
        noise_levels: vec![0.0, 0.01],
        decoders: vec![None],
        p1_ratio: 0.1,
    };
    let out = run_sweep(&base, &grid);
    print!("{}", to_csv(&out.records)?);

    let dir = std::env::temp_dir().join("lfsim-example");
    emit(&out.records, Format::Csv, &dir.join("sweep.csv"))?;
    emit(&out.records, Format::Json, &dir.join("sweep.json"))?;
    let back = from_json(&std::fs::read_to_string(dir.join("sweep.json"))?)?;
    assert_eq!(back, out.records);
    println!("wrote {} records to {}", back.len(), dir.display());
    Ok(())
}
