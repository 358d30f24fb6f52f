//! Local Friendliness inequalities, the closed-form singlet oracle and a
//! multi-start Nelder–Mead search for maximally violating angles.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ewfs::{MeasurementAngles, Setting};
use crate::qsim::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    GenuineLf,
    BellI3322,
    Brukner,
    SemiBrukner,
    BellNonLf,
}

impl Inequality {
    pub const ALL: [Inequality; 5] = [
        Inequality::GenuineLf,
        Inequality::BellI3322,
        Inequality::Brukner,
        Inequality::SemiBrukner,
        Inequality::BellNonLf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Inequality::GenuineLf => "genuine_lf",
            Inequality::BellI3322 => "bell_i3322",
            Inequality::Brukner => "brukner",
            Inequality::SemiBrukner => "semi_brukner",
            Inequality::BellNonLf => "bell_non_lf",
        }
    }

    /// Four correlators, no marginals: a CHSH expression shifted by −2.
    pub fn is_chsh_form(self) -> bool {
        matches!(
            self,
            Inequality::Brukner | Inequality::SemiBrukner | Inequality::BellNonLf
        )
    }

    pub fn spec(self) -> InequalitySpec {
        InequalitySpec::new(self)
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "genuinelf" | "genuine" => Ok(Inequality::GenuineLf),
            "belli3322" | "i3322" => Ok(Inequality::BellI3322),
            "brukner" => Ok(Inequality::Brukner),
            "semibrukner" => Ok(Inequality::SemiBrukner),
            "bellnonlf" | "nonlf" => Ok(Inequality::BellNonLf),
            _ => Err(Error::Config(format!("unknown inequality '{s}'"))),
        }
    }
}

/// `LHS = Σ a_x⟨A_x⟩ + Σ b_y⟨B_y⟩ + Σ c_xy⟨A_xB_y⟩ + offset`, with `LHS ≤ 0`
/// under Local Friendliness. Index 0 is setting 1 (PEEK).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalitySpec {
    pub name: Inequality,
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub ab: [[f64; 3]; 3],
    pub offset: f64,
}

impl InequalitySpec {
    pub fn new(name: Inequality) -> Self {
        let (a, b, ab, offset) = match name {
            Inequality::GenuineLf => (
                [-1.0, -1.0, 0.0],
                [-1.0, -1.0, 0.0],
                [[-1.0, -2.0, 0.0], [-2.0, 2.0, -1.0], [0.0, -1.0, -1.0]],
                -6.0,
            ),
            Inequality::BellI3322 => (
                [-1.0, 1.0, 0.0],
                [1.0, -1.0, 0.0],
                [[1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 0.0]],
                -4.0,
            ),
            Inequality::Brukner => (
                [0.0; 3],
                [0.0; 3],
                [[1.0, 0.0, -1.0], [-1.0, 0.0, -1.0], [0.0; 3]],
                -2.0,
            ),
            Inequality::SemiBrukner => (
                [0.0; 3],
                [0.0; 3],
                [[0.0, -1.0, 1.0], [0.0; 3], [0.0, -1.0, -1.0]],
                -2.0,
            ),
            Inequality::BellNonLf => (
                [0.0; 3],
                [0.0; 3],
                [[0.0; 3], [0.0, 1.0, -1.0], [0.0, -1.0, -1.0]],
                -2.0,
            ),
        };
        Self {
            name,
            a,
            b,
            ab,
            offset,
        }
    }

    /// Setting pairs that must be measured: every pair with a nonzero
    /// correlator coefficient, plus a pair for any marginal not yet covered.
    pub fn required_pairs(&self) -> Vec<(Setting, Setting)> {
        let mut pairs = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                if self.ab[x][y] != 0.0 {
                    pairs.push((x, y));
                }
            }
        }
        for x in 0..3 {
            if self.a[x] != 0.0 && !pairs.iter().any(|p| p.0 == x) {
                pairs.push((x, 1));
            }
        }
        for y in 0..3 {
            if self.b[y] != 0.0 && !pairs.iter().any(|p| p.1 == y) {
                pairs.push((1, y));
            }
        }
        pairs.sort_unstable();
        pairs
            .into_iter()
            .map(|(x, y)| (Setting::ALL[x], Setting::ALL[y]))
            .collect()
    }

    /// Whether Bob ever peeks (and so needs a Debbie register to read).
    pub fn needs_bob_peek(&self) -> bool {
        self.required_pairs().iter().any(|p| p.1 == Setting::Peek)
    }

    pub fn evaluate(&self, table: &ExpectationTable) -> Result<f64> {
        let mut lhs = self.offset;
        for i in 0..3 {
            if self.a[i] != 0.0 {
                lhs += self.a[i] * table.a_value(i)?;
            }
            if self.b[i] != 0.0 {
                lhs += self.b[i] * table.b_value(i)?;
            }
            for j in 0..3 {
                if self.ab[i][j] != 0.0 {
                    lhs += self.ab[i][j] * table.ab_value(i, j)?;
                }
            }
        }
        Ok(lhs)
    }

    /// Evaluates every trial's table and summarizes the LHS values.
    pub fn evaluate_trials(&self, tables: &[ExpectationTable]) -> Result<TrialStatistics> {
        let values = tables
            .iter()
            .map(|t| self.evaluate(t))
            .collect::<Result<Vec<_>>>()?;
        TrialStatistics::from_values(&values)
    }
}

/// Marginals and correlators with a mask of what was measured.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpectationTable {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub ab: [[f64; 3]; 3],
    pub a_available: [bool; 3],
    pub b_available: [bool; 3],
    pub ab_available: [[bool; 3]; 3],
}

impl ExpectationTable {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full(a: [f64; 3], b: [f64; 3], ab: [[f64; 3]; 3]) -> Self {
        Self {
            a,
            b,
            ab,
            a_available: [true; 3],
            b_available: [true; 3],
            ab_available: [[true; 3]; 3],
        }
    }

    pub fn set_a(&mut self, x: Setting, value: f64) {
        self.a[x.index() - 1] = value;
        self.a_available[x.index() - 1] = true;
    }

    pub fn set_b(&mut self, y: Setting, value: f64) {
        self.b[y.index() - 1] = value;
        self.b_available[y.index() - 1] = true;
    }

    pub fn set_ab(&mut self, x: Setting, y: Setting, value: f64) {
        self.ab[x.index() - 1][y.index() - 1] = value;
        self.ab_available[x.index() - 1][y.index() - 1] = true;
    }

    fn missing(what: String) -> Error {
        Error::MissingExpectation(what)
    }

    fn a_value(&self, i: usize) -> Result<f64> {
        if self.a_available[i] {
            Ok(self.a[i])
        } else {
            Err(Self::missing(format!("<A{}>", i + 1)))
        }
    }

    fn b_value(&self, i: usize) -> Result<f64> {
        if self.b_available[i] {
            Ok(self.b[i])
        } else {
            Err(Self::missing(format!("<B{}>", i + 1)))
        }
    }

    fn ab_value(&self, i: usize, j: usize) -> Result<f64> {
        if self.ab_available[i][j] {
            Ok(self.ab[i][j])
        } else {
            Err(Self::missing(format!("<A{}B{}>", i + 1, j + 1)))
        }
    }

    /// Entrywise mean over trials; an entry is available only if it is in
    /// every table.
    pub fn mean_of(tables: &[ExpectationTable]) -> Result<ExpectationTable> {
        let n = tables.len();
        if n == 0 {
            return Err(Error::InvalidState("no trial tables to average".into()));
        }
        let mut out = ExpectationTable {
            a_available: [true; 3],
            b_available: [true; 3],
            ab_available: [[true; 3]; 3],
            ..Default::default()
        };
        for t in tables {
            for i in 0..3 {
                out.a[i] += t.a[i] / n as f64;
                out.b[i] += t.b[i] / n as f64;
                out.a_available[i] &= t.a_available[i];
                out.b_available[i] &= t.b_available[i];
                for j in 0..3 {
                    out.ab[i][j] += t.ab[i][j] / n as f64;
                    out.ab_available[i][j] &= t.ab_available[i][j];
                }
            }
        }
        for i in 0..3 {
            if !out.a_available[i] {
                out.a[i] = 0.0;
            }
            if !out.b_available[i] {
                out.b[i] = 0.0;
            }
            for j in 0..3 {
                if !out.ab_available[i][j] {
                    out.ab[i][j] = 0.0;
                }
            }
        }
        Ok(out)
    }
}

/// Mean, sample standard deviation and count of per-trial values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStatistics {
    pub mean: f64,
    pub std: f64,
    pub trials: usize,
    pub values: Vec<f64>,
}

impl TrialStatistics {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::InvalidState("no trial values".into()));
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            mean,
            std,
            trials: n,
            values: values.to_vec(),
        })
    }

    pub fn std_error(&self) -> f64 {
        self.std / (self.trials as f64).sqrt()
    }

    /// `|mean − target| ≤ k·std`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std
    }
}

/// `⟨A_x⟩ = ⟨B_y⟩ = 0`, `⟨A_iB_j⟩ = −cos(β_j − θ_i)`.
pub fn analytic_expectations(angles: &MeasurementAngles) -> ExpectationTable {
    analytic_from_radians(
        angles.theta.map(f64::to_radians),
        angles.beta.map(f64::to_radians),
    )
}

fn analytic_from_radians(theta: [f64; 3], beta: [f64; 3]) -> ExpectationTable {
    let mut ab = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ab[i][j] = -(beta[j] - theta[i]).cos();
        }
    }
    ExpectationTable::full([0.0; 3], [0.0; 3], ab)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerOptions {
    pub starts: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            starts: 64,
            tolerance: 1e-7,
            max_iterations: 20_000,
            seed: 0x5eed,
        }
    }
}

/// Result of one local search.
#[derive(Clone, Debug, PartialEq)]
struct LocalOptimum {
    point: Vec<f64>,
    value: f64,
}

/// Minimizes `f` from `start` with the standard Nelder–Mead moves.
fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    start: &[f64],
    step: f64,
    tolerance: f64,
    max_iterations: usize,
) -> LocalOptimum {
    let d = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..d {
        let mut p = start.to_vec();
        p[i] += step;
        let v = f(&p);
        simplex.push((p, v));
    }

    let point_at = |centroid: &[f64], worst: &[f64], t: f64| -> Vec<f64> {
        centroid
            .iter()
            .zip(worst)
            .map(|(c, w)| c + t * (w - c))
            .collect()
    };

    for _ in 0..max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[d].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread.abs() < tolerance && size < 1e-6 {
            break;
        }

        let mut centroid = vec![0.0; d];
        for (p, _) in &simplex[..d] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / d as f64;
            }
        }
        let worst = simplex[d].0.clone();
        let reflected = point_at(&centroid, &worst, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = point_at(&centroid, &worst, -2.0);
            let fe = f(&expanded);
            simplex[d] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < simplex[d].1 {
                let c = point_at(&centroid, &worst, -0.5);
                let v = f(&c);
                (c, v)
            } else {
                let c = point_at(&centroid, &worst, 0.5);
                let v = f(&c);
                (c, v)
            };
            if fc < fr.min(simplex[d].1) {
                simplex[d] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for (p, v) in simplex.iter_mut().skip(1) {
                    for (x, b) in p.iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    *v = f(p);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, value) = simplex.swap_remove(0);
    LocalOptimum { point, value }
}

/// Maximizes the analytic LHS over all six angles.
pub fn optimize_angles(spec: &InequalitySpec) -> (MeasurementAngles, f64) {
    optimize_angles_with(spec, &OptimizerOptions::default())
}

pub fn optimize_angles_with(
    spec: &InequalitySpec,
    options: &OptimizerOptions,
) -> (MeasurementAngles, f64) {
    let objective = |x: &[f64]| -> f64 {
        let table = analytic_from_radians([x[0], x[1], x[2]], [x[3], x[4], x[5]]);
        -spec.evaluate(&table).expect("analytic table is complete")
    };
    let starts: Vec<Vec<f64>> = (0..options.starts.max(1))
        .map(|i| {
            let mut rng = RngStream::new(options.seed, i as u64).rng();
            (0..6)
                .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                .collect()
        })
        .collect();
    let results: Vec<LocalOptimum> = starts
        .par_iter()
        .map(|s| {
            let first = nelder_mead(
                &objective,
                s,
                0.6,
                options.tolerance,
                options.max_iterations,
            );
            // one restart from the converged point to escape a collapsed simplex
            nelder_mead(
                &objective,
                &first.point,
                0.1,
                options.tolerance,
                options.max_iterations,
            )
        })
        .collect();

    let mut best = 0;
    for (i, r) in results.iter().enumerate().skip(1) {
        if r.value < results[best].value - 1e-9 {
            best = i;
        }
    }
    let x = &results[best].point;
    let angles = MeasurementAngles::from_radians([x[0], x[1], x[2]], [x[3], x[4], x[5]])
        .expect("optimizer output is finite");
    (angles, -results[best].value)
}

/// The optimizer's result for `inequality` with default options, computed once.
pub fn optimal_angles(inequality: Inequality) -> (MeasurementAngles, f64) {
    static CACHE: [OnceLock<(MeasurementAngles, f64)>; 5] = [const { OnceLock::new() }; 5];
    let slot = Inequality::ALL
        .iter()
        .position(|&i| i == inequality)
        .expect("listed");
    *CACHE[slot].get_or_init(|| optimize_angles(&inequality.spec()))
}
