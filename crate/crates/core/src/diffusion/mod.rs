//! Linear threshold contagion with household closure.
//!
//! Each individual carries a threshold `tau ~ N(lambda, sd)` truncated to be
//! strictly positive, drawn once per replication. Period 0 informs the seeds
//! and their households. In every later period each uninformed individual
//! with at least `tau` neighbours informed at the start of the period becomes
//! informed, together with the rest of their household. Informed is absorbing.

pub(crate) mod engine;

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::VillageNetwork;
use crate::rng::{substream, Domain};
use engine::Propagator;

#[derive(Debug, Error, PartialEq)]
pub enum DiffusionError {
    #[error("invalid diffusion config: {0}")]
    Config(String),
    #[error("unknown seed `{0}`")]
    UnknownSeed(String),
    #[error("seed node {0} out of range")]
    SeedOutOfRange(usize),
    #[error("threshold vector has {got} entries, network has {expected} individuals")]
    ThresholdLength { expected: usize, got: usize },
}

pub type Result<T, E = DiffusionError> = std::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffusionConfig {
    /// Threshold mean `lambda`.
    pub lambda_mean: f64,
    pub threshold_sd: f64,
    pub periods: usize,
    pub replications: usize,
    pub master_seed: u64,
    /// Period whose information rate ranks seed pairs; `None` means the last.
    pub objective_period: Option<usize>,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        DiffusionConfig {
            lambda_mean: 2.0,
            threshold_sd: 0.5,
            periods: 4,
            replications: 2000,
            master_seed: 0,
            objective_period: None,
        }
    }
}

impl DiffusionConfig {
    pub fn with_lambda(&self, lambda_mean: f64) -> Self {
        DiffusionConfig { lambda_mean, ..self.clone() }
    }

    /// Fixed thresholds `tau = lambda` for every individual.
    pub fn deterministic(&self) -> Self {
        DiffusionConfig {
            threshold_sd: 0.0,
            ..self.clone()
        }
    }

    pub fn objective_period(&self) -> usize {
        self.objective_period.unwrap_or(self.periods)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(DiffusionError::Config(m));
        if !(self.lambda_mean.is_finite() && self.lambda_mean > 0.0) {
            return bad(format!("threshold mean must be positive, got {}", self.lambda_mean));
        }
        if !(self.threshold_sd.is_finite() && self.threshold_sd >= 0.0) {
            return bad(format!("threshold sd must be non-negative, got {}", self.threshold_sd));
        }
        if self.periods == 0 {
            return bad("periods must be at least 1".into());
        }
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if let Some(p) = self.objective_period {
            if p > self.periods {
                return bad(format!("objective period {p} exceeds horizon {}", self.periods));
            }
        }
        Ok(())
    }
}

/// One threshold per individual, in node order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdDraw {
    pub tau: Vec<f64>,
}

impl ThresholdDraw {
    /// Smallest integer neighbour count satisfying `count >= tau`.
    pub fn required_counts(&self) -> Vec<u16> {
        self.tau.iter().map(|&t| t.ceil().clamp(1.0, u16::MAX as f64) as u16).collect()
    }
}

fn sample_tau(n: usize, config: &DiffusionConfig, substream_id: u64) -> Vec<f64> {
    if config.threshold_sd == 0.0 {
        return vec![config.lambda_mean; n];
    }
    let normal = Normal::new(config.lambda_mean, config.threshold_sd).expect("validated sd");
    let mut rng = substream(config.master_seed, Domain::Thresholds, substream_id);
    (0..n)
        .map(|_| loop {
            let t = normal.sample(&mut rng);
            if t > 0.0 {
                break t;
            }
        })
        .collect()
}

/// Thresholds for replication `substream_id`; rejection-sampled so every
/// draw is strictly positive.
pub fn draw_thresholds(net: &VillageNetwork, config: &DiffusionConfig, substream_id: u64) -> Result<ThresholdDraw> {
    config.validate()?;
    Ok(ThresholdDraw {
        tau: sample_tau(net.len(), config, substream_id),
    })
}

/// Integer requirements for every replication, shared by all seed sets
/// evaluated under one config (common random numbers).
pub(crate) struct ThresholdTable {
    n: usize,
    required: Vec<u16>,
}

impl ThresholdTable {
    pub(crate) fn draw(net: &VillageNetwork, config: &DiffusionConfig) -> Result<Self> {
        config.validate()?;
        let n = net.len();
        let rows: Vec<Vec<u16>> = (0..config.replications as u64)
            .into_par_iter()
            .map(|r| ThresholdDraw { tau: sample_tau(n, config, r) }.required_counts())
            .collect();
        Ok(ThresholdTable {
            n,
            required: rows.concat(),
        })
    }

    pub(crate) fn replications(&self) -> usize {
        self.required.len().checked_div(self.n).unwrap_or(0)
    }

    #[inline]
    pub(crate) fn row(&self, r: usize) -> &[u16] {
        &self.required[r * self.n..(r + 1) * self.n]
    }
}

/// Informed sets and rates for periods `0..=T` of one replication.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiffusionOutcome {
    /// Sorted node indices informed by the end of each period.
    pub informed_by_period: Vec<Vec<usize>>,
    pub information_rate_by_period: Vec<f64>,
}

impl DiffusionOutcome {
    pub fn periods(&self) -> usize {
        self.informed_by_period.len() - 1
    }

    pub fn final_informed(&self) -> &[usize] {
        self.informed_by_period.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn informed_ids<'a>(&self, net: &'a VillageNetwork, period: usize) -> Vec<&'a str> {
        self.informed_by_period[period].iter().map(|&v| net.person_id(v)).collect()
    }
}

pub(crate) fn resolve_seeds<S: AsRef<str>>(net: &VillageNetwork, seeds: &[S]) -> Result<Vec<usize>> {
    seeds
        .iter()
        .map(|s| net.node(s.as_ref()).ok_or_else(|| DiffusionError::UnknownSeed(s.as_ref().to_string())))
        .collect()
}

/// Distinct households of the seed nodes, in ascending order.
pub(crate) fn seed_households(net: &VillageNetwork, seeds: &[usize]) -> Result<Vec<usize>> {
    let mut hs = seeds
        .iter()
        .map(|&s| {
            if s < net.len() {
                Ok(net.household_of(s))
            } else {
                Err(DiffusionError::SeedOutOfRange(s))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    hs.sort_unstable();
    hs.dedup();
    Ok(hs)
}

/// Runs one replication from seed person ids.
pub fn run_once<S: AsRef<str>>(
    net: &VillageNetwork,
    seeds: &[S],
    thresholds: &ThresholdDraw,
    periods: usize,
) -> Result<DiffusionOutcome> {
    run_once_nodes(net, &resolve_seeds(net, seeds)?, thresholds, periods)
}

/// Runs one replication from seed node indices.
pub fn run_once_nodes(
    net: &VillageNetwork,
    seeds: &[usize],
    thresholds: &ThresholdDraw,
    periods: usize,
) -> Result<DiffusionOutcome> {
    if thresholds.tau.len() != net.len() {
        return Err(DiffusionError::ThresholdLength {
            expected: net.len(),
            got: thresholds.tau.len(),
        });
    }
    let households = seed_households(net, seeds)?;
    let required = thresholds.required_counts();
    let mut informed_at = vec![usize::MAX; net.len()];
    let mut totals = vec![0u32; periods + 1];
    Propagator::new(net.len()).run(net, &households, &required, &mut totals, |t, v| informed_at[v] = t);

    let informed_by_period = (0..=periods)
        .map(|t| (0..net.len()).filter(|&v| informed_at[v] <= t).collect())
        .collect();
    let n = net.len().max(1) as f64;
    Ok(DiffusionOutcome {
        informed_by_period,
        information_rate_by_period: totals.iter().map(|&c| c as f64 / n).collect(),
    })
}

/// Monte Carlo mean and standard error of the information rate per period.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateSummary {
    pub mean_by_period: Vec<f64>,
    pub std_error_by_period: Vec<f64>,
    pub replications: usize,
}

impl RateSummary {
    pub fn at(&self, period: usize) -> (f64, f64) {
        (self.mean_by_period[period], self.std_error_by_period[period])
    }
}

/// Exact integer sums of informed counts, so that the reduction order of
/// replications cannot change any reported bit.
#[derive(Clone, Debug, Default)]
pub(crate) struct RateAccumulator {
    sum: Vec<u64>,
    sum_sq: Vec<u64>,
    replications: usize,
}

impl RateAccumulator {
    pub(crate) fn new(periods: usize) -> Self {
        RateAccumulator {
            sum: vec![0; periods + 1],
            sum_sq: vec![0; periods + 1],
            replications: 0,
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, totals: &[u32]) {
        for (t, &c) in totals.iter().enumerate() {
            self.sum[t] += c as u64;
            self.sum_sq[t] += c as u64 * c as u64;
        }
        self.replications += 1;
    }

    pub(crate) fn summary(&self, n: usize) -> RateSummary {
        let reps = self.replications as f64;
        let n = n.max(1) as f64;
        let mut mean = Vec::with_capacity(self.sum.len());
        let mut se = Vec::with_capacity(self.sum.len());
        for (&s, &q) in self.sum.iter().zip(&self.sum_sq) {
            let m = s as f64 / reps;
            mean.push(m / n);
            if self.replications > 1 {
                let var = ((q as f64 - s as f64 * m) / (reps - 1.0)).max(0.0);
                se.push((var / reps).sqrt() / n);
            } else {
                se.push(0.0);
            }
        }
        RateSummary {
            mean_by_period: mean,
            std_error_by_period: se,
            replications: self.replications,
        }
    }
}

/// Scores one seed household set against every replication of `table`.
pub(crate) fn score_households(
    net: &VillageNetwork,
    table: &ThresholdTable,
    households: &[usize],
    periods: usize,
    propagator: &mut Propagator,
) -> RateAccumulator {
    let mut acc = RateAccumulator::new(periods);
    let mut totals = vec![0u32; periods + 1];
    for r in 0..table.replications() {
        propagator.run(net, households, table.row(r), &mut totals, |_, _| {});
        acc.add(&totals);
    }
    acc
}

/// Mean information rate over `config.replications` threshold draws;
/// replication `r` uses threshold substream `r`.
pub fn mean_information_rate<S: AsRef<str>>(
    net: &VillageNetwork,
    seeds: &[S],
    config: &DiffusionConfig,
) -> Result<RateSummary> {
    mean_information_rate_nodes(net, &resolve_seeds(net, seeds)?, config)
}

pub fn mean_information_rate_nodes(net: &VillageNetwork, seeds: &[usize], config: &DiffusionConfig) -> Result<RateSummary> {
    config.validate()?;
    let households = seed_households(net, seeds)?;
    let table = ThresholdTable::draw(net, config)?;
    let mut propagator = Propagator::new(net.len());
    Ok(score_households(net, &table, &households, config.periods, &mut propagator).summary(net.len()))
}
