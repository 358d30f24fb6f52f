//! Running an EWFS configuration end to end, and sweeping grids of them.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branch::{branch_factor, BranchFactorReport};
use crate::config::{EwfsConfig, Mode, PositionPolicy, QScope, Sampler};
use crate::error::{Error, Result};
use crate::ewfs::{EwfsBuilder, EwfsCircuit, FriendKind, MeasurementAngles, Setting};
use crate::infer::{Decoder, DecoderChoice, DecoderKind};
use crate::lf::{ExpectationTable, InequalitySpec, TrialStatistics};
use crate::qsim::{
    apply_readout, mix64, run_channel, run_noisy_trajectory, BitString, DepolarizingScope,
    NoiseModel, OutcomeDistribution, RngStream, DENSITY_MAX_QUBITS,
};
use crate::validate::{
    certify, count_gates, count_gates_in, depolarizing_fidelity, GateCounts, ValidationReport,
};

const TAG_SHOTS: u64 = 0x5348_4f54;
const TAG_DECODER: u64 = 0x4445_4344;
const TAG_POSITION: u64 = 0x504f_5349;
const TAG_FRIEND_C: u64 = 0x4652_4e43;
const TAG_FRIEND_D: u64 = 0x4652_4e44;

fn stream_id(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x1f2e_3d4c_5b6a_7988, |acc, &p| mix64(acc ^ mix64(p)))
}

/// Mean and sample standard deviation of one quantity across trials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    fn of(values: &[f64]) -> Self {
        let s = TrialStatistics::from_values(values).expect("at least one trial");
        Self {
            mean: s.mean,
            std: s.std,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    /// 1-based settings.
    pub x: usize,
    pub y: usize,
    pub a: Stat,
    pub b: Stat,
    pub ab: Stat,
    /// Global-depolarizing survival product of this pair's circuit.
    pub survival: f64,
    pub counts: GateCounts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub config: EwfsConfig,
    pub angles: MeasurementAngles,
    pub decoder: String,
    pub shots: usize,
    pub trials: usize,
    pub pairs: Vec<PairRecord>,
    pub table: ExpectationTable,
    pub lhs: TrialStatistics,
    pub violated: bool,
    pub branch: BranchFactorReport,
    pub q_estimate: f64,
    pub validation: Option<ValidationReport>,
    pub wall_time_s: Option<f64>,
}

/// One setting pair's circuit with whatever can be precomputed for it.
struct PreparedPair {
    circuit: EwfsCircuit,
    measured: Vec<usize>,
    len_a: usize,
    survival: f64,
    /// Exact outcome distribution over `measured`, when one is used.
    distribution: Option<OutcomeDistribution>,
    /// Exact expectations `(a, b, ab)` for the non-sampling modes.
    exact: Option<(f64, f64, f64)>,
}

/// Expected decoder value per measured bitstring; a random-single decoder
/// averages over positions.
fn valuation(decoder: &Decoder) -> Result<Vec<f64>> {
    if let DecoderKind::RandomSingle = decoder.kind() {
        let n = decoder.register_size();
        return Ok((0..1u64 << n)
            .map(|z| (n as f64 - 2.0 * z.count_ones() as f64) / n as f64)
            .collect());
    }
    Ok(decoder.diagonal()?.into_iter().map(f64::from).collect())
}

fn expectations(probs: &[f64], len_a: usize, va: &[f64], vb: &[f64]) -> (f64, f64, f64) {
    let mask = (1usize << len_a) - 1;
    let (mut a, mut b, mut ab) = (0.0, 0.0, 0.0);
    for (o, &p) in probs.iter().enumerate() {
        if p != 0.0 {
            let x = va[o & mask];
            let y = vb[o >> len_a];
            a += p * x;
            b += p * y;
            ab += p * x * y;
        }
    }
    (a, b, ab)
}

fn noiseless_probs(ec: &EwfsCircuit, measured: &[usize]) -> Result<Vec<f64>> {
    ec.circuit.run()?.marginal(measured)
}

/// Exact outcome distribution of the depolarized circuit, if one is cheap:
/// noiseless, global scope (ideal mixed with uniform), or a small register.
fn exact_probs(
    ec: &EwfsCircuit,
    measured: &[usize],
    noise: &NoiseModel,
) -> Result<Option<Vec<f64>>> {
    if !noise.has_depolarizing() {
        return noiseless_probs(ec, measured).map(Some);
    }
    match noise.scope() {
        DepolarizingScope::Global => {
            let f = noise.circuit_fidelity(&ec.circuit);
            let mut probs = noiseless_probs(ec, measured)?;
            let uniform = 1.0 / probs.len() as f64;
            for p in probs.iter_mut() {
                *p = f * *p + (1.0 - f) * uniform;
            }
            Ok(Some(probs))
        }
        DepolarizingScope::Local if ec.circuit.num_qubits() <= DENSITY_MAX_QUBITS => {
            Ok(Some(run_channel(&ec.circuit, noise)?.marginal(measured)))
        }
        DepolarizingScope::Local => Ok(None),
    }
}

struct Decoders {
    alice_peek: Decoder,
    bob_peek: Option<Decoder>,
}

impl Decoders {
    fn for_pair(&self, x: Setting, y: Setting) -> (Decoder, Decoder) {
        let a = if x == Setting::Peek {
            self.alice_peek
        } else {
            Decoder::sign()
        };
        let b = match (y, self.bob_peek) {
            (Setting::Peek, Some(d)) => d,
            _ => Decoder::sign(),
        };
        (a, b)
    }
}

fn prepare_pairs(
    cfg: &EwfsConfig,
    builder: &EwfsBuilder,
    pairs: &[(Setting, Setting)],
    decoders: &Decoders,
) -> Result<Vec<PreparedPair>> {
    pairs
        .iter()
        .map(|&(x, y)| {
            let circuit = builder.circuit(x, y)?;
            let measured: Vec<usize> = circuit
                .alice_measured
                .iter()
                .chain(&circuit.bob_measured)
                .copied()
                .collect();
            let len_a = circuit.alice_measured.len();
            let survival = cfg.noise.circuit_fidelity(&circuit.circuit);
            let (dec_a, dec_b) = decoders.for_pair(x, y);
            let (va, vb) = (valuation(&dec_a)?, valuation(&dec_b)?);
            let mut distribution = None;
            let mut exact = None;
            match cfg.mode {
                Mode::Exact => {
                    let probs = exact_probs(&circuit, &measured, &cfg.noise)?.ok_or_else(|| {
                        Error::Infeasible(format!(
                            "exact local-scope noise needs at most {DENSITY_MAX_QUBITS} qubits"
                        ))
                    })?;
                    exact = Some(expectations(&probs, len_a, &va, &vb));
                }
                Mode::AnalyticScaled => {
                    let probs = noiseless_probs(&circuit, &measured)?;
                    let (a, b, ab) = expectations(&probs, len_a, &va, &vb);
                    let ua = va.iter().sum::<f64>() / va.len() as f64;
                    let ub = vb.iter().sum::<f64>() / vb.len() as f64;
                    let f = cfg.noise.circuit_fidelity(&circuit.circuit);
                    exact = Some((
                        f * a + (1.0 - f) * ua,
                        f * b + (1.0 - f) * ub,
                        f * ab + (1.0 - f) * ua * ub,
                    ));
                }
                Mode::Sampled => {
                    if cfg.sampler == Sampler::Auto {
                        if let Some(p) = exact_probs(&circuit, &measured, &cfg.noise)? {
                            distribution = Some(OutcomeDistribution::from_probabilities(&p)?);
                        }
                    }
                }
            }
            Ok(PreparedPair {
                circuit,
                measured,
                len_a,
                survival,
                distribution,
                exact,
            })
        })
        .collect()
}

fn split(bits: BitString, len_a: usize) -> (BitString, BitString) {
    let len_b = bits.len() - len_a;
    let mask = (1u64 << len_a) - 1;
    (
        BitString::new(bits.bits() & mask, len_a),
        BitString::new(bits.bits() >> len_a, len_b),
    )
}

#[allow(clippy::too_many_arguments)]
fn sample_pair(
    cfg: &EwfsConfig,
    pair: &PreparedPair,
    dec_a: &Decoder,
    dec_b: &Decoder,
    shots: usize,
    shot_stream: RngStream,
) -> Result<(f64, f64, f64)> {
    let mut shot_rng = shot_stream.rng();
    let mut dec_rng = shot_stream.child(TAG_DECODER).rng();
    let p_readout = cfg.noise.p_readout();
    let (mut sa, mut sb, mut sab) = (0i64, 0i64, 0i64);
    let mut tally = |bits: BitString, dec_rng: &mut rand_chacha::ChaCha8Rng| -> Result<()> {
        let (ba, bb) = split(bits, pair.len_a);
        let a = dec_a.decode(ba, dec_rng)? as i64;
        let b = dec_b.decode(bb, dec_rng)? as i64;
        sa += a;
        sb += b;
        sab += a * b;
        Ok(())
    };
    match &pair.distribution {
        Some(dist) => {
            for _ in 0..shots {
                let bits = apply_readout(dist.sample(&mut shot_rng), p_readout, &mut shot_rng);
                tally(bits, &mut dec_rng)?;
            }
        }
        None => {
            let mut remaining = shots;
            while remaining > 0 {
                let batch = remaining.min(cfg.shots_per_trajectory);
                let state = run_noisy_trajectory(&pair.circuit.circuit, &cfg.noise, &mut shot_rng)?;
                let dist =
                    OutcomeDistribution::from_probabilities(&state.marginal(&pair.measured)?)?;
                for _ in 0..batch {
                    let bits = apply_readout(dist.sample(&mut shot_rng), p_readout, &mut shot_rng);
                    tally(bits, &mut dec_rng)?;
                }
                remaining -= batch;
            }
        }
    }
    let n = shots as f64;
    Ok((sa as f64 / n, sb as f64 / n, sab as f64 / n))
}

/// Fixes a random-single decoder's position for a whole trial.
fn pin_position<R: Rng + ?Sized>(decoder: Decoder, rng: &mut R) -> Result<Decoder> {
    if decoder.kind() == DecoderKind::RandomSingle {
        let p = rng.random_range(0..decoder.register_size());
        Decoder::new(DecoderKind::SignSingle(p), decoder.register_size())
    } else {
        Ok(decoder)
    }
}

fn friends_for_trial(cfg: &EwfsConfig, trial: usize) -> (FriendKind, FriendKind) {
    let (c, d) = (cfg.friend_charlie, cfg.debbie());
    if cfg.resample_friend {
        let seed = cfg.master_seed;
        (
            c.reseeded(stream_id(&[seed, trial as u64, TAG_FRIEND_C])),
            d.reseeded(stream_id(&[seed, trial as u64, TAG_FRIEND_D])),
        )
    } else {
        (c, d)
    }
}

/// Per-pair `(a, b, ab)` estimates for one trial.
fn run_trial(
    cfg: &EwfsConfig,
    trial: usize,
    pairs: &[(Setting, Setting)],
    prepared: &[PreparedPair],
    decoders: &Decoders,
    shots: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    let seed = cfg.master_seed;
    let mut pos_rng = RngStream::new(seed, stream_id(&[trial as u64, TAG_POSITION])).rng();
    let trial_decoders = match cfg.random_position {
        PositionPolicy::PerTrial => Decoders {
            alice_peek: pin_position(decoders.alice_peek, &mut pos_rng)?,
            bob_peek: decoders
                .bob_peek
                .map(|d| pin_position(d, &mut pos_rng))
                .transpose()?,
        },
        PositionPolicy::PerShot => Decoders {
            alice_peek: decoders.alice_peek,
            bob_peek: decoders.bob_peek,
        },
    };
    pairs
        .iter()
        .zip(prepared)
        .enumerate()
        .map(|(k, (&(x, y), pair))| {
            if let Some(e) = pair.exact {
                return Ok(e);
            }
            let (da, db) = trial_decoders.for_pair(x, y);
            let stream = RngStream::new(seed, stream_id(&[trial as u64, k as u64, TAG_SHOTS]));
            sample_pair(cfg, pair, &da, &db, shots, stream)
        })
        .collect()
}

fn table_for_trial(
    pairs: &[(Setting, Setting)],
    estimates: &[(f64, f64, f64)],
) -> ExpectationTable {
    let mut table = ExpectationTable::empty();
    let mut a_acc = [(0.0, 0usize); 3];
    let mut b_acc = [(0.0, 0usize); 3];
    for (&(x, y), &(a, b, ab)) in pairs.iter().zip(estimates) {
        table.set_ab(x, y, ab);
        a_acc[x.index() - 1].0 += a;
        a_acc[x.index() - 1].1 += 1;
        b_acc[y.index() - 1].0 += b;
        b_acc[y.index() - 1].1 += 1;
    }
    for s in Setting::ALL {
        let (sum, n) = a_acc[s.index() - 1];
        if n > 0 {
            table.set_a(s, sum / n as f64);
        }
        let (sum, n) = b_acc[s.index() - 1];
        if n > 0 {
            table.set_b(s, sum / n as f64);
        }
    }
    table
}

fn build_decoders(cfg: &EwfsConfig, spec: &InequalitySpec) -> Result<Decoders> {
    let choice: DecoderChoice = cfg.decoder_choice();
    Ok(Decoders {
        alice_peek: choice.resolve(cfg.friend_charlie.size())?,
        bob_peek: if spec.needs_bob_peek() {
            Some(choice.resolve(cfg.debbie().size())?)
        } else {
            None
        },
    })
}

pub fn run_experiment(cfg: &EwfsConfig) -> Result<ResultRecord> {
    let started = Instant::now();
    cfg.validate()?;
    let spec = cfg.inequality.spec();
    let angles = cfg.resolved_angles();
    let pairs = spec.required_pairs();
    let decoders = build_decoders(cfg, &spec)?;
    let (shots, trials) = cfg.budget();

    let prepare = |trial: usize| -> Result<Vec<PreparedPair>> {
        let (c, d) = friends_for_trial(cfg, trial);
        let builder = EwfsBuilder::new(c, d, angles)?;
        prepare_pairs(cfg, &builder, &pairs, &decoders)
    };
    let shared = if cfg.resample_friend {
        None
    } else {
        Some(prepare(0)?)
    };

    let estimates: Vec<Vec<(f64, f64, f64)>> = (0..trials)
        .into_par_iter()
        .map(|t| match &shared {
            Some(prepared) => run_trial(cfg, t, &pairs, prepared, &decoders, shots),
            None => run_trial(cfg, t, &pairs, &prepare(t)?, &decoders, shots),
        })
        .collect::<Result<_>>()?;

    let tables: Vec<ExpectationTable> = estimates
        .iter()
        .map(|e| table_for_trial(&pairs, e))
        .collect();
    let lhs = spec.evaluate_trials(&tables)?;
    let table = ExpectationTable::mean_of(&tables)?;

    // counts and survival come from the trial-0 circuits; resampling only
    // changes unitaries, never gate counts
    let reference = match shared {
        Some(p) => p,
        None => prepare(0)?,
    };
    let pair_records: Vec<PairRecord> = pairs
        .iter()
        .enumerate()
        .map(|(k, &(x, y))| {
            let col = |f: fn(&(f64, f64, f64)) -> f64| -> Vec<f64> {
                estimates.iter().map(|e| f(&e[k])).collect()
            };
            PairRecord {
                x: x.index(),
                y: y.index(),
                a: Stat::of(&col(|e| e.0)),
                b: Stat::of(&col(|e| e.1)),
                ab: Stat::of(&col(|e| e.2)),
                survival: reference[k].survival,
                counts: count_gates(&reference[k].circuit.circuit),
            }
        })
        .collect();

    let counts = match cfg.q_scope {
        QScope::Preparation => count_gates(&reference[0].circuit.friend_preparation()),
        QScope::WholeCircuit => reference
            .iter()
            .min_by(|a, b| a.survival.total_cmp(&b.survival))
            .map(|p| count_gates_in(p.circuit.circuit.gates()))
            .unwrap_or_default(),
    };
    let q_estimate = depolarizing_fidelity(
        &counts,
        cfg.noise.p1().min(1.0 - 1e-15),
        cfg.noise.p2().min(1.0 - 1e-15),
    )?;
    let validation = if cfg.inequality.is_chsh_form() {
        Some(certify(
            lhs.mean + 2.0,
            lhs.std,
            cfg.sigmas,
            &counts,
            &cfg.noise,
        )?)
    } else {
        None
    };

    Ok(ResultRecord {
        config: cfg.clone(),
        angles,
        decoder: cfg.decoder_choice().to_string(),
        shots,
        trials,
        pairs: pair_records,
        table,
        violated: lhs.mean - cfg.sigmas * lhs.std > 0.0,
        lhs,
        branch: branch_factor(&cfg.friend_charlie)?,
        q_estimate,
        validation,
        wall_time_s: cfg.timing.then(|| started.elapsed().as_secs_f64()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FriendFamily {
    Ghz,
    RandomUnitary,
    Dicke,
}

impl FriendFamily {
    /// The friend of this family on `n` qubits; Dicke uses weight `n/2`.
    pub fn friend(self, n: usize, seed: u64) -> FriendKind {
        match self {
            FriendFamily::Ghz => FriendKind::Ghz { n },
            FriendFamily::RandomUnitary => FriendKind::RandomUnitary { n, seed },
            FriendFamily::Dicke => FriendKind::Dicke { n, k: n / 2 },
        }
    }
}

impl std::str::FromStr for FriendFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ghz" => Ok(FriendFamily::Ghz),
            "random_unitary" | "ru" | "haar" => Ok(FriendFamily::RandomUnitary),
            "dicke" => Ok(FriendFamily::Dicke),
            other => Err(Error::Config(format!("unknown friend family '{other}'"))),
        }
    }
}

/// Cartesian grid of sweep cells; an empty axis yields no cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub families: Vec<FriendFamily>,
    pub sizes: Vec<usize>,
    /// Two-qubit depolarizing rate `p`; single-qubit gates get `p1_ratio·p`.
    pub noise_levels: Vec<f64>,
    /// `None` is the friend's default decoder.
    pub decoders: Vec<Option<DecoderChoice>>,
    pub p1_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub index: usize,
    pub family: FriendFamily,
    pub size: usize,
    pub noise_level: f64,
    pub decoder: Option<DecoderChoice>,
    pub config: EwfsConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub index: usize,
    pub family: FriendFamily,
    pub size: usize,
    pub noise_level: f64,
    pub category: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub records: Vec<ResultRecord>,
    pub failures: Vec<CellFailure>,
}

fn cell_noise(base: &EwfsConfig, grid: &SweepGrid, p: f64) -> Result<NoiseModel> {
    NoiseModel::new(
        grid.p1_ratio * p,
        p,
        base.noise.p_readout(),
        base.noise.scope(),
    )
}

/// Expands the grid. Cells differing only in decoder share a seed, so
/// strategies are compared on identical shot streams.
pub fn sweep_cells(base: &EwfsConfig, grid: &SweepGrid) -> Vec<SweepCell> {
    let mut cells = Vec::new();
    for (fi, &family) in grid.families.iter().enumerate() {
        for &size in &grid.sizes {
            for (ni, &p) in grid.noise_levels.iter().enumerate() {
                let seed = stream_id(&[base.master_seed, fi as u64, size as u64, ni as u64]);
                for &decoder in &grid.decoders {
                    let mut config = base.clone();
                    let ru_seed = match base.friend_charlie {
                        FriendKind::RandomUnitary { seed, .. } => seed,
                        _ => seed,
                    };
                    config.friend_charlie = family.friend(size, ru_seed);
                    config.master_seed = seed;
                    config.decoder_peek = decoder;
                    // invalid noise is reported when the cell runs
                    if let Ok(n) = cell_noise(base, grid, p) {
                        config.noise = n;
                    }
                    let index = cells.len();
                    cells.push(SweepCell {
                        index,
                        family,
                        size,
                        noise_level: p,
                        decoder,
                        config,
                    });
                }
            }
        }
    }
    cells
}

pub fn run_sweep(base: &EwfsConfig, grid: &SweepGrid) -> SweepOutcome {
    let cells = sweep_cells(base, grid);
    let results: Vec<Result<ResultRecord>> = cells
        .par_iter()
        .map(|cell| {
            cell_noise(base, grid, cell.noise_level)?;
            run_experiment(&cell.config)
        })
        .collect();
    let mut out = SweepOutcome::default();
    for (cell, r) in cells.iter().zip(results) {
        match r {
            Ok(rec) => out.records.push(rec),
            Err(e) => out.failures.push(CellFailure {
                index: cell.index,
                family: cell.family,
                size: cell.size,
                noise_level: cell.noise_level,
                category: e.category().to_string(),
                message: e.to_string(),
            }),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::AngleChoice;
    use crate::lf::Inequality;

    const CHSH_MAX: f64 = 0.828_427_124_746_190_1;

    fn base(n: usize) -> EwfsConfig {
        let mut c = EwfsConfig::new(FriendKind::Ghz { n }, Inequality::SemiBrukner);
        c.angles = AngleChoice::Chsh;
        c
    }

    #[test]
    fn exact_mode_hits_chsh_maximum() {
        let mut c = base(3);
        c.mode = Mode::Exact;
        c.trials = 2;
        let r = run_experiment(&c).unwrap();
        assert!((r.lhs.mean - CHSH_MAX).abs() < 1e-9);
        assert_eq!(r.lhs.std, 0.0);
        assert!(r.violated);
        assert!(r.validation.unwrap().certified);
    }

    #[test]
    fn analytic_scaled_matches_gate_product() {
        let mut c = base(5);
        c.mode = Mode::AnalyticScaled;
        c.trials = 1;
        c.noise = NoiseModel::depolarizing(0.02, 0.02, DepolarizingScope::Global).unwrap();
        let r = run_experiment(&c).unwrap();
        let spec = c.inequality.spec();
        let mut want = spec.offset;
        for p in &r.pairs {
            let coeff = spec.ab[p.x - 1][p.y - 1];
            let ideal = -((c.resolved_angles().beta[p.y - 1] - c.resolved_angles().theta[p.x - 1])
                .to_radians()
                .cos());
            want += coeff * p.survival * ideal;
        }
        assert!((r.lhs.mean - want).abs() < 1e-9);
        // global-scope exact mode agrees with the scaling law
        c.mode = Mode::Exact;
        let e = run_experiment(&c).unwrap();
        assert!((e.lhs.mean - want).abs() < 1e-9);
    }

    #[test]
    fn sampled_noiseless_close_to_maximum() {
        let mut c = base(3);
        c.shots = 4000;
        c.trials = 5;
        let r = run_experiment(&c).unwrap();
        assert!((r.lhs.mean - CHSH_MAX).abs() < 5.0 * r.lhs.std.max(0.01));
    }

    #[test]
    fn deterministic_and_parallel_independent() {
        let mut c = base(3);
        c.shots = 500;
        c.trials = 4;
        c.noise = NoiseModel::new(0.01, 0.01, 0.01, DepolarizingScope::Local).unwrap();
        let a = run_experiment(&c).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let b = pool.install(|| run_experiment(&c).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn trajectory_sampler_runs() {
        let mut c = base(1);
        c.shots = 200;
        c.trials = 2;
        c.sampler = Sampler::Trajectory;
        c.shots_per_trajectory = 10;
        c.noise = NoiseModel::depolarizing(0.05, 0.05, DepolarizingScope::Local).unwrap();
        let r = run_experiment(&c).unwrap();
        assert_eq!(r.lhs.trials, 2);
    }

    #[test]
    fn genuine_lf_needs_both_peeks() {
        let mut c = EwfsConfig::new(FriendKind::Ghz { n: 3 }, Inequality::GenuineLf);
        c.mode = Mode::Exact;
        c.trials = 1;
        let r = run_experiment(&c).unwrap();
        assert_eq!(r.pairs.len(), 7);
        assert!((r.lhs.mean - 1.27884).abs() < 1e-3);
        assert!(r.validation.is_none());
    }

    #[test]
    fn infeasible_sizes() {
        let c = base(23);
        assert_eq!(run_experiment(&c).unwrap_err().category(), "infeasible");
    }

    #[test]
    fn sweep_records_failures_and_continues() {
        let mut b = base(1);
        b.mode = Mode::Exact;
        b.trials = 1;
        let grid = SweepGrid {
            families: vec![FriendFamily::Ghz, FriendFamily::Dicke],
            sizes: vec![1, 3],
            noise_levels: vec![0.0],
            decoders: vec![None],
            p1_ratio: 1.0,
        };
        let out = run_sweep(&b, &grid);
        // Dicke(1, 0) is invalid; Dicke(3, 1) runs
        assert_eq!(out.records.len(), 3);
        assert_eq!(out.failures.len(), 1);
        let empty = SweepGrid {
            sizes: vec![],
            ..grid
        };
        assert!(run_sweep(&b, &empty).records.is_empty());
    }
}
