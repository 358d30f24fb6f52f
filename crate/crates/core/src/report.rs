//! CSV and JSON output of result records.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::experiment::ResultRecord;

pub const CSV_COLUMNS: [&str; 19] = [
    "mode",
    "friend_kind",
    "friend_size",
    "branch_factor",
    "bf_flag",
    "p1",
    "p2",
    "p_readout",
    "depol_scope",
    "decoder",
    "shots",
    "trials",
    "seed",
    "inequality",
    "lhs_mean",
    "lhs_std",
    "violated",
    "certified",
    "q_estimate",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

/// `%g`-style formatting with 9 significant digits.
pub fn format_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim(&format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    }
}

fn csv_fields(r: &ResultRecord) -> Vec<String> {
    let cfg = &r.config;
    vec![
        cfg.mode.to_string(),
        cfg.friend_charlie.family().to_string(),
        cfg.friend_charlie.size().to_string(),
        format_g9(r.branch.branch_factor.value),
        r.branch.branch_factor.flag.to_string(),
        format_g9(cfg.noise.p1()),
        format_g9(cfg.noise.p2()),
        format_g9(cfg.noise.p_readout()),
        cfg.noise.scope().to_string(),
        r.decoder.clone(),
        r.shots.to_string(),
        r.trials.to_string(),
        cfg.master_seed.to_string(),
        cfg.inequality.to_string(),
        format_g9(r.lhs.mean),
        format_g9(r.lhs.std),
        r.violated.to_string(),
        r.validation
            .as_ref()
            .map_or("na".to_string(), |v| v.certified.to_string()),
        format_g9(r.q_estimate),
    ]
}

pub fn to_csv(records: &[ResultRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in records {
        w.write_record(csv_fields(r)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
}

pub fn to_json(records: &[ResultRecord]) -> Result<String> {
    Ok(serde_json::to_string_pretty(records)? + "\n")
}

pub fn from_json(text: &str) -> Result<Vec<ResultRecord>> {
    Ok(serde_json::from_str(text)?)
}

/// Writes `records` to `path`, creating parent directories.
pub fn emit(records: &[ResultRecord], format: Format, path: &Path) -> Result<()> {
    let text = match format {
        Format::Csv => to_csv(records)?,
        Format::Json => to_json(records)?,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g9_formatting() {
        assert_eq!(format_g9(0.0), "0");
        assert_eq!(format_g9(0.8284271247461903), "0.828427125");
        assert_eq!(format_g9(-2.0), "-2");
        assert_eq!(format_g9(16.0), "16");
        assert_eq!(format_g9(0.01), "0.01");
        assert_eq!(format_g9(1.5e-7), "1.5e-07");
        assert_eq!(format_g9(123456789012.0), "1.23456789e+11");
        assert_eq!(format_g9(0.99999999999), "1");
    }
}
