use std::borrow::Cow;
use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{Model, PairScore, Result, SeedPair, SeedingError};
use crate::diffusion::engine::Propagator;
use crate::diffusion::{score_households, DiffusionConfig, RateSummary, ThresholdTable};
use crate::network::{Individual, VillageNetwork, DEFAULT_GEO_RADIUS_MILES};

/// Which individuals may be paired.
pub struct Eligibility<'a> {
    /// Reject pairs from one household (closure makes them a single seed).
    pub distinct_households: bool,
    pub allow: Option<&'a dyn Fn(&Individual) -> bool>,
}

impl Default for Eligibility<'_> {
    fn default() -> Self {
        Eligibility {
            distinct_households: true,
            allow: None,
        }
    }
}

impl Eligibility<'_> {
    pub fn any_pair() -> Self {
        Eligibility {
            distinct_households: false,
            allow: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairSearch {
    pub best: SeedPair,
    /// Every eligible pair, best first; ties in lexicographic id order.
    pub ranked: Vec<PairScore>,
}

impl PairSearch {
    pub fn best_score(&self) -> &PairScore {
        &self.ranked[0]
    }
}

/// Scores seed pairs on one network against a fixed set of threshold draws.
///
/// Household closure means a pair's outcome depends only on the seeds'
/// households, so results are cached per household pair. Every pair scored by
/// one scorer sees the same replications (common random numbers), and the
/// scores equal what [`crate::diffusion::mean_information_rate`] reports for
/// the pair under the same config, bit for bit.
pub struct PairScorer<'a> {
    net: &'a VillageNetwork,
    config: DiffusionConfig,
    table: ThresholdTable,
    cache: HashMap<(usize, usize), RateSummary>,
}

impl<'a> PairScorer<'a> {
    pub fn new(net: &'a VillageNetwork, config: &DiffusionConfig) -> Result<Self> {
        let table = ThresholdTable::draw(net, config)?;
        Ok(PairScorer {
            net,
            config: config.clone(),
            table,
            cache: HashMap::new(),
        })
    }

    pub fn network(&self) -> &'a VillageNetwork {
        self.net
    }

    pub fn config(&self) -> &DiffusionConfig {
        &self.config
    }

    fn key(&self, a: usize, b: usize) -> (usize, usize) {
        let (ha, hb) = (self.net.household_of(a), self.net.household_of(b));
        (ha.min(hb), ha.max(hb))
    }

    /// Computes missing household-pair summaries in parallel.
    fn fill(&mut self, keys: &[(usize, usize)]) {
        let missing: Vec<(usize, usize)> = keys.iter().copied().filter(|k| !self.cache.contains_key(k)).collect();
        let (net, table, periods) = (self.net, &self.table, self.config.periods);
        let scored: Vec<RateSummary> = missing
            .par_iter()
            .map_init(
                || Propagator::new(net.len()),
                |prop, &(ha, hb)| {
                    let hs: &[usize] = if ha == hb { &[ha] } else { &[ha, hb] };
                    score_households(net, table, hs, periods, prop).summary(net.len())
                },
            )
            .collect();
        self.cache.extend(missing.into_iter().zip(scored));
    }

    fn to_score(&self, a: usize, b: usize) -> PairScore {
        let summary = &self.cache[&self.key(a, b)];
        let (mean_rate, std_error) = summary.at(self.config.objective_period());
        PairScore {
            pair: SeedPair::from_nodes(self.net, a, b),
            mean_rate,
            std_error,
            per_period_rates: summary.mean_by_period.clone(),
        }
    }

    pub fn score_nodes(&mut self, a: usize, b: usize) -> Result<PairScore> {
        let n = self.net.len();
        if a >= n || b >= n || a == b {
            return Err(SeedingError::InvalidPair(format!("nodes ({a}, {b})")));
        }
        let key = self.key(a, b);
        self.fill(&[key]);
        Ok(self.to_score(a, b))
    }

    pub fn score(&mut self, pair: &SeedPair) -> Result<PairScore> {
        let [a, b] = pair.nodes(self.net)?;
        self.score_nodes(a, b)
    }

    /// Exhaustive search over eligible pairs.
    pub fn search(&mut self, eligibility: &Eligibility<'_>) -> Result<PairSearch> {
        let net = self.net;
        let eligible: Vec<usize> = (0..net.len())
            .filter(|&v| eligibility.allow.is_none_or(|allow| allow(net.individual(v))))
            .collect();
        let mut pairs = Vec::new();
        for (i, &a) in eligible.iter().enumerate() {
            for &b in &eligible[i + 1..] {
                if !eligibility.distinct_households || net.household_of(a) != net.household_of(b) {
                    pairs.push((a, b));
                }
            }
        }
        if pairs.is_empty() {
            return Err(SeedingError::NotEnoughEligible(eligible.len()));
        }
        let mut keys: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| self.key(a, b)).collect();
        keys.sort_unstable();
        keys.dedup();
        self.fill(&keys);

        let mut ranked: Vec<PairScore> = pairs.iter().map(|&(a, b)| self.to_score(a, b)).collect();
        // stable: equal scores keep the lexicographic enumeration order
        ranked.sort_by(|x, y| y.mean_rate.total_cmp(&x.mean_rate));
        Ok(PairSearch {
            best: ranked[0].pair.clone(),
            ranked,
        })
    }
}

/// Best pair under `config` among eligible individuals, with the full table.
pub fn optimal_pair(net: &VillageNetwork, config: &DiffusionConfig, eligibility: &Eligibility<'_>) -> Result<PairSearch> {
    PairScorer::new(net, config)?.search(eligibility)
}

/// The network a model is optimised on.
pub fn model_network(net: &VillageNetwork, model: Model) -> Result<Cow<'_, VillageNetwork>> {
    Ok(match model {
        Model::Simple | Model::Complex => Cow::Borrowed(net),
        Model::Geo => Cow::Owned(net.geo_network(DEFAULT_GEO_RADIUS_MILES)?),
    })
}

/// Optimal pair for a treatment model: the model fixes the threshold mean and
/// the network; everything else comes from `config`.
pub fn select_seeds(net: &VillageNetwork, model: Model, config: &DiffusionConfig) -> Result<PairSearch> {
    let graph = model_network(net, model)?;
    optimal_pair(&graph, &config.with_lambda(model.lambda()), &Eligibility::default())
}
