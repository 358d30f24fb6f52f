use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lfsim::branch::{branch_factor, ghz_complexities_by_search, two_random_circuit_bounds};
use lfsim::config::EwfsConfig;
use lfsim::ewfs::{FriendKind, Setting};
use lfsim::experiment::{run_experiment, run_sweep, FriendFamily, SweepGrid};
use lfsim::infer::DecoderChoice;
use lfsim::lf::{analytic_expectations, optimize_angles_with, Inequality, OptimizerOptions};
use lfsim::report::{self, format_g9, Format};
use lfsim::validate::{
    depolarizing_fidelity, friend_resources, max_two_qubit_error, min_valid_probability,
    worst_case_valid_x, GateCounts, X_TILDE_MAX,
};
use lfsim::{Error, Result};

const OUT_DIR_VAR: &str = "LFSIM_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "lfsim",
    version,
    about = "Local Friendliness violations in simulated Wigner's friend circuits"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Key-value config file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set friend=ghz:5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<EwfsConfig> {
        let mut cfg = match &self.config {
            Some(path) => EwfsConfig::from_text(&std::fs::read_to_string(path)?)?,
            None => EwfsConfig::default(),
        };
        for o in &self.overrides {
            cfg.apply_override(o)?;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Output file; defaults to $LFSIM_OUT_DIR/<command>.<ext>, else stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn write(&self, name: &str, records: &[lfsim::experiment::ResultRecord]) -> Result<()> {
        let ext = match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let path = self.out.clone().or_else(|| {
            std::env::var_os(OUT_DIR_VAR).map(|d| Path::new(&d).join(format!("{name}.{ext}")))
        });
        match path {
            Some(p) => {
                report::emit(records, self.format, &p)?;
                eprintln!("wrote {} record(s) to {}", records.len(), p.display());
            }
            None => {
                let text = match self.format {
                    Format::Csv => report::to_csv(records)?,
                    Format::Json => report::to_json(records)?,
                };
                std::io::stdout().write_all(text.as_bytes())?;
            }
        }
        Ok(())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the cartesian product of families, sizes, noise levels and decoders.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, value_delimiter = ',', default_value = "ghz")]
        families: Vec<FriendFamily>,
        /// Sizes as a list and/or ranges: `1,2,5-9` or `1-17:2`.
        #[arg(long, default_value = "1-9:2")]
        sizes: String,
        /// Two-qubit depolarizing rates.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        noise: Vec<f64>,
        /// `default` uses each family's own decoder.
        #[arg(long, value_delimiter = ',', default_value = "default")]
        decoders: Vec<String>,
        /// Single-qubit rate as a fraction of the two-qubit rate.
        #[arg(long, default_value_t = 0.1)]
        p1_ratio: f64,
    },
    /// Maximize each inequality's analytic left-hand side over the six angles.
    Angles {
        /// An inequality name, or `all`.
        #[arg(long, default_value = "all")]
        inequality: String,
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Closed-form correlators and inequality values for an angle set.
    Oracle {
        /// optimal | historical | chsh | "t1,t2,t3;b1,b2,b3"
        #[arg(long, default_value = "historical")]
        angles: String,
        /// Inequality whose optimum `--angles optimal` refers to.
        #[arg(long, default_value = "semi_brukner")]
        inequality: Inequality,
    },
    /// Branch factor of friend states.
    BranchFactor {
        /// Friend specs such as `ghz:5`, `random_unitary:3`, `dicke:6:3`.
        #[arg(long = "friend")]
        friends: Vec<FriendKind>,
        /// Two random circuits `n:d0:d1`.
        #[arg(long)]
        two_random: Vec<String>,
        /// Confirm GHZ complexities by exhaustive search up to this size.
        #[arg(long)]
        search: Option<usize>,
    },
    /// Gate counts and qubit numbers per friend size.
    Resources {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "ghz,random_unitary,dicke"
        )]
        families: Vec<FriendFamily>,
        #[arg(long, default_value = "1-8")]
        sizes: String,
        /// Also report the depolarizing product at this two-qubit rate.
        #[arg(long)]
        p2: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        p1_ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Certification bound calculators.
    Validate {
        #[command(subcommand)]
        calc: ValidateCalc,
    },
}

#[derive(Subcommand)]
enum ValidateCalc {
    /// Worst-case value of the valid runs given x̃ and q.
    WorstCase {
        #[arg(long, allow_hyphen_values = true)]
        x_tilde: f64,
        #[arg(long)]
        q: f64,
    },
    /// Smallest q that can still certify x̃_max.
    MinQ {
        #[arg(long, default_value_t = X_TILDE_MAX)]
        x_max: f64,
    },
    /// Depolarizing product for a gate count.
    Fidelity {
        #[arg(long)]
        singles: u64,
        #[arg(long)]
        doubles: u64,
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p2: f64,
    },
    /// Largest two-qubit error rate keeping the product above a target.
    Threshold {
        #[arg(long)]
        singles: u64,
        #[arg(long)]
        doubles: u64,
        #[arg(long, default_value_t = 0.1)]
        p1_ratio: f64,
        /// Defaults to 2/2√2.
        #[arg(long)]
        target: Option<f64>,
    },
}

fn parse_sizes(spec: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("cannot parse sizes '{spec}'"));
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (range, step) = match part.split_once(':') {
            Some((r, s)) => (r, s.parse::<usize>().map_err(|_| bad())?),
            None => (part, 1),
        };
        if step == 0 {
            return Err(bad());
        }
        match range.split_once('-') {
            Some((a, b)) => {
                let a: usize = a.parse().map_err(|_| bad())?;
                let b: usize = b.parse().map_err(|_| bad())?;
                out.extend((a..=b).step_by(step));
            }
            None => out.push(range.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

fn parse_decoder(s: &str) -> Result<Option<DecoderChoice>> {
    if s.trim().eq_ignore_ascii_case("default") {
        Ok(None)
    } else {
        s.parse().map(Some)
    }
}

fn table(header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

fn angles_cmd(inequality: &str, starts: Option<usize>, seed: Option<u64>) -> Result<()> {
    let which: Vec<Inequality> = if inequality.eq_ignore_ascii_case("all") {
        Inequality::ALL.to_vec()
    } else {
        vec![inequality.parse()?]
    };
    let mut opts = OptimizerOptions::default();
    if let Some(s) = starts {
        opts.starts = s.max(1);
    }
    if let Some(s) = seed {
        opts.seed = s;
    }
    let mut rows = Vec::new();
    for ineq in which {
        let (angles, lhs) = optimize_angles_with(&ineq.spec(), &opts);
        let mut row = vec![ineq.to_string(), format_g9(lhs)];
        row.extend(
            angles
                .theta
                .iter()
                .chain(&angles.beta)
                .map(|a| format_g9(*a)),
        );
        rows.push(row);
    }
    table(
        &[
            "inequality",
            "max_lhs",
            "theta1",
            "theta2",
            "theta3",
            "beta1",
            "beta2",
            "beta3",
        ],
        rows,
    )
}

fn oracle_cmd(angles: &str, inequality: Inequality) -> Result<()> {
    let mut cfg = EwfsConfig {
        inequality,
        ..EwfsConfig::default()
    };
    cfg.set("angles", angles)?;
    let angles = cfg.resolved_angles();
    let t = analytic_expectations(&angles);
    println!(
        "# theta = {:?}, beta = {:?} (degrees)",
        angles.theta.map(format_g9),
        angles.beta.map(format_g9)
    );
    let mut rows = Vec::new();
    for x in Setting::ALL {
        for y in Setting::ALL {
            rows.push(vec![
                "correlator".into(),
                format!("A{}B{}", x.index(), y.index()),
                format_g9(t.ab[x.index() - 1][y.index() - 1]),
            ]);
        }
    }
    for ineq in Inequality::ALL {
        rows.push(vec![
            "lhs".into(),
            ineq.to_string(),
            format_g9(ineq.spec().evaluate(&t)?),
        ]);
    }
    table(&["kind", "name", "value"], rows)
}

fn branch_cmd(friends: &[FriendKind], two_random: &[String], search: Option<usize>) -> Result<()> {
    let mut rows = Vec::new();
    let mut push = |label: String, r: lfsim::branch::BranchFactorReport| {
        rows.push(vec![
            label,
            format_g9(r.c_interference.value),
            r.c_interference.flag.to_string(),
            format_g9(r.c_distinguishability.value),
            r.c_distinguishability.flag.to_string(),
            format_g9(r.branch_factor.value),
            r.branch_factor.flag.to_string(),
            r.note.unwrap_or_default(),
        ]);
    };
    for f in friends {
        push(f.to_string(), branch_factor(f)?);
    }
    for spec in two_random {
        let nums: Vec<usize> = spec
            .split(':')
            .map(|p| p.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Config(format!("expected n:d0:d1, got '{spec}'")))?;
        let [n, d0, d1] = nums[..] else {
            return Err(Error::Config(format!("expected n:d0:d1, got '{spec}'")));
        };
        push(
            format!("two_random:{spec}"),
            two_random_circuit_bounds(n, d0, d1)?,
        );
    }
    if let Some(max) = search {
        for n in 1..=max {
            let (ci, cd) = ghz_complexities_by_search(n)?;
            rows.push(vec![
                format!("ghz:{n} (search)"),
                ci.to_string(),
                "exact".into(),
                cd.to_string(),
                "exact".into(),
                (ci as i64 - cd as i64).to_string(),
                "exact".into(),
                "within the searched gate set".into(),
            ]);
        }
    }
    table(
        &[
            "friend",
            "c_i",
            "c_i_flag",
            "c_d",
            "c_d_flag",
            "branch_factor",
            "bf_flag",
            "note",
        ],
        rows,
    )
}

fn resources_cmd(
    families: &[FriendFamily],
    sizes: &str,
    p2: Option<f64>,
    p1_ratio: f64,
    seed: u64,
) -> Result<()> {
    let sizes = parse_sizes(sizes)?;
    let mut rows = Vec::new();
    for &family in families {
        for &n in &sizes {
            let friend = family.friend(n, seed);
            // sizes outside a family's range are skipped, not fatal
            let Ok(r) = friend_resources(&friend) else {
                continue;
            };
            let bf = branch_factor(&friend)?;
            let q = match p2 {
                Some(p) => format_g9(depolarizing_fidelity(&r.preparation, p1_ratio * p, p)?),
                None => "na".into(),
            };
            rows.push(vec![
                friend.family().to_string(),
                n.to_string(),
                r.qubits.to_string(),
                format_g9(bf.branch_factor.value),
                bf.branch_factor.flag.to_string(),
                r.preparation.singles.to_string(),
                r.preparation.doubles.to_string(),
                r.circuit.singles.to_string(),
                r.circuit.doubles.to_string(),
                r.circuit.bounded.to_string(),
                q,
            ]);
        }
    }
    table(
        &[
            "friend_kind",
            "friend_size",
            "qubits",
            "branch_factor",
            "bf_flag",
            "prep_singles",
            "prep_doubles",
            "circuit_singles",
            "circuit_doubles",
            "bounded",
            "q",
        ],
        rows,
    )
}

fn validate_cmd(calc: &ValidateCalc) -> Result<()> {
    let (name, value) = match *calc {
        ValidateCalc::WorstCase { x_tilde, q } => {
            ("x_valid_lower", worst_case_valid_x(x_tilde, q)?)
        }
        ValidateCalc::MinQ { x_max } => ("q_min", min_valid_probability(x_max)?),
        ValidateCalc::Fidelity {
            singles,
            doubles,
            p1,
            p2,
        } => (
            "q",
            depolarizing_fidelity(&GateCounts::new(singles, doubles), p1, p2)?,
        ),
        ValidateCalc::Threshold {
            singles,
            doubles,
            p1_ratio,
            target,
        } => {
            let target = target.unwrap_or(2.0 / X_TILDE_MAX);
            (
                "p2_max",
                max_two_qubit_error(&GateCounts::new(singles, doubles), p1_ratio, target)?,
            )
        }
    };
    println!("{name},{}", format_g9(value));
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Run { config, output } => {
            let cfg = config.load()?;
            let record = run_experiment(&cfg)?;
            output.write("run", &[record])
        }
        Command::Sweep {
            config,
            output,
            families,
            sizes,
            noise,
            decoders,
            p1_ratio,
        } => {
            let base = config.load()?;
            let grid = SweepGrid {
                families,
                sizes: parse_sizes(&sizes)?,
                noise_levels: noise,
                decoders: decoders
                    .iter()
                    .map(|d| parse_decoder(d))
                    .collect::<Result<_>>()?,
                p1_ratio,
            };
            let outcome = run_sweep(&base, &grid);
            for f in &outcome.failures {
                eprintln!(
                    "cell {} ({:?} n={} p={}) failed [{}]: {}",
                    f.index, f.family, f.size, f.noise_level, f.category, f.message
                );
            }
            output.write("sweep", &outcome.records)
        }
        Command::Angles {
            inequality,
            starts,
            seed,
        } => angles_cmd(&inequality, starts, seed),
        Command::Oracle { angles, inequality } => oracle_cmd(&angles, inequality),
        Command::BranchFactor {
            friends,
            two_random,
            search,
        } => branch_cmd(&friends, &two_random, search),
        Command::Resources {
            families,
            sizes,
            p2,
            p1_ratio,
            seed,
        } => resources_cmd(&families, &sizes, p2, p1_ratio, seed),
        Command::Validate { calc } => validate_cmd(&calc),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_lists() {
        assert_eq!(parse_sizes("1-9:2").unwrap(), vec![1, 3, 5, 7, 9]);
        assert_eq!(parse_sizes("2, 4,6-7").unwrap(), vec![2, 4, 6, 7]);
        assert!(parse_sizes("").unwrap().is_empty());
        assert!(parse_sizes("3-x").is_err());
        assert!(parse_sizes("1-4:0").is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
