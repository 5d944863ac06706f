//! Survey-style village outcomes.
//!
//! A simulated village is observed the way a household survey would see it:
//! the seed households plus a uniform random sample of the remaining
//! households, all members of a sampled household observed. Informed status
//! at the last simulated period stands in for adoption, and seed households
//! never count towards either outcome.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffusion::engine::Propagator;
use crate::diffusion::{seed_households, DiffusionConfig, DiffusionError, DiffusionOutcome, ThresholdTable};
use crate::network::VillageNetwork;
use crate::rng::{derive_seed, substream, Domain};
use crate::seeding::{select_seeds, Model, SeedPair, SeedingError};

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error(transparent)]
    Seeding(#[from] SeedingError),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error("village `{village}` has {households} households, fewer than the sample size {sample_size}")]
    VillageTooSmall {
        village: String,
        households: usize,
        sample_size: usize,
    },
    #[error("no seed pair supplied for village `{0}`")]
    MissingPair(String),
    #[error("village `{0}` has fewer than two households to pair")]
    NoPairs(String),
    #[error("sample size must be at least 1")]
    SampleSize,
}

pub type Result<T, E = EvaluationError> = std::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleDesign {
    /// Households surveyed per village, seed households included.
    pub sample_size: usize,
    /// Survey every household when the village has no more than
    /// `sample_size`; otherwise such villages are rejected.
    pub include_all_if_smaller: bool,
}

impl Default for SampleDesign {
    fn default() -> Self {
        SampleDesign {
            sample_size: 30,
            include_all_if_smaller: true,
        }
    }
}

impl SampleDesign {
    pub fn validate(&self) -> Result<()> {
        if self.sample_size == 0 {
            return Err(EvaluationError::SampleSize);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VillageOutcome {
    pub village_id: String,
    pub treatment_label: String,
    /// Some sampled non-seed household is informed.
    pub any_adoption: bool,
    /// Informed share of individuals in sampled non-seed households.
    pub adoption_rate: f64,
    pub sampled_households: Vec<String>,
}

struct Observation {
    any: bool,
    rate: f64,
}

/// Draws the household sample and scores it. `informed` reports the final
/// informed status of a node.
fn observe<R: Rng>(
    net: &VillageNetwork,
    seed_hh: &[usize],
    design: &SampleDesign,
    rng: &mut R,
    informed: impl Fn(usize) -> bool,
    sampled_out: Option<&mut Vec<usize>>,
) -> Result<Observation> {
    let n_h = net.household_count();
    let others: Vec<usize> = (0..n_h).filter(|h| seed_hh.binary_search(h).is_err()).collect();
    let sample: Vec<usize> = if n_h <= design.sample_size {
        if !design.include_all_if_smaller && n_h < design.sample_size {
            return Err(EvaluationError::VillageTooSmall {
                village: net.village_id().to_string(),
                households: n_h,
                sample_size: design.sample_size,
            });
        }
        others
    } else {
        let k = design.sample_size.saturating_sub(seed_hh.len()).min(others.len());
        let mut picked: Vec<usize> = index::sample(rng, others.len(), k).into_iter().map(|i| others[i]).collect();
        picked.sort_unstable();
        picked
    };

    let (mut people, mut hits) = (0usize, 0usize);
    let mut any = false;
    for &h in &sample {
        let mut household_hit = false;
        for m in net.household_members(h) {
            people += 1;
            if informed(m) {
                hits += 1;
                household_hit = true;
            }
        }
        any |= household_hit;
    }
    if let Some(out) = sampled_out {
        out.extend(seed_hh.iter().copied());
        out.extend(sample);
        out.sort_unstable();
    }
    Ok(Observation {
        any,
        rate: if people == 0 { 0.0 } else { hits as f64 / people as f64 },
    })
}

/// Samples one simulated outcome. Deterministic given
/// `(outcome, master_seed, rng_substream)`.
pub fn sample_outcome(
    outcome: &DiffusionOutcome,
    net: &VillageNetwork,
    seeds: &SeedPair,
    design: &SampleDesign,
    master_seed: u64,
    rng_substream: u64,
) -> Result<VillageOutcome> {
    design.validate()?;
    let nodes = seeds.nodes(net)?;
    let seed_hh = seed_households(net, &nodes)?;
    let mut flags = vec![false; net.len()];
    for &v in outcome.final_informed() {
        flags[v] = true;
    }
    let mut rng = substream(master_seed, Domain::Sampling, rng_substream);
    let mut sampled = Vec::new();
    let obs = observe(net, &seed_hh, design, &mut rng, |v| flags[v], Some(&mut sampled))?;
    Ok(VillageOutcome {
        village_id: net.village_id().to_string(),
        treatment_label: String::new(),
        any_adoption: obs.any,
        adoption_rate: obs.rate,
        sampled_households: sampled.iter().map(|&h| net.household_id(h).to_string()).collect(),
    })
}

/// How a village's seed pair is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum Treatment {
    /// The model's optimal pair.
    Model(Model),
    /// A supplied pair per village id, e.g. an extension agent's choice.
    UserPairs(BTreeMap<String, SeedPair>),
    /// Uniformly random pairs from distinct households.
    RandomPairs { pairs_per_village: usize },
}

impl Treatment {
    pub fn label(&self) -> String {
        match self {
            Treatment::Model(m) => m.name().to_string(),
            Treatment::UserPairs(_) => "user".to_string(),
            Treatment::RandomPairs { .. } => "random".to_string(),
        }
    }
}

/// A treatment with its seed pairs fixed, one list per village.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolvedTreatment {
    pub label: String,
    pub pairs: Vec<Vec<SeedPair>>,
}

fn random_pairs(net: &VillageNetwork, count: usize, master_seed: u64, village_index: usize) -> Result<Vec<SeedPair>> {
    if net.household_count() < 2 {
        return Err(EvaluationError::NoPairs(net.village_id().to_string()));
    }
    let mut rng = substream(master_seed, Domain::RandomPairs, village_index as u64);
    let n = net.len();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if net.household_of(a) != net.household_of(b) {
            out.push(SeedPair::new(net.person_id(a), net.person_id(b))?);
        }
    }
    Ok(out)
}

/// Fixes the seed pairs of a treatment in every village. Model treatments
/// run the optimiser with `config` (threshold mean set by the model).
pub fn resolve_treatment(villages: &[VillageNetwork], treatment: &Treatment, config: &DiffusionConfig) -> Result<ResolvedTreatment> {
    let pairs = villages
        .par_iter()
        .enumerate()
        .map(|(vi, net)| -> Result<Vec<SeedPair>> {
            match treatment {
                Treatment::Model(model) => Ok(vec![select_seeds(net, *model, config)?.best]),
                Treatment::UserPairs(map) => map
                    .get(net.village_id())
                    .cloned()
                    .map(|p| vec![p])
                    .ok_or_else(|| EvaluationError::MissingPair(net.village_id().to_string())),
                Treatment::RandomPairs { pairs_per_village } => {
                    random_pairs(net, *pairs_per_village, config.master_seed, vi)
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResolvedTreatment {
        label: treatment.label(),
        pairs,
    })
}

/// Sampled outcomes of one village averaged over pairs and replications.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VillageSummary {
    pub village_id: String,
    /// Probability that the survey finds a non-seed adopter.
    pub any_adoption: f64,
    pub adoption_rate: f64,
    pub any_adoption_var: f64,
    pub adoption_rate_var: f64,
    pub observations: usize,
}

/// Simulates each pair under threshold mean `lambda` and samples every
/// replication. Threshold draws come from a seed derived from
/// `config.master_seed`, disjoint from the draws used to select pairs, and
/// are shared by all pairs and treatments; replication `r` samples from
/// substream `r`.
pub fn evaluate_pairs(
    net: &VillageNetwork,
    pairs: &[SeedPair],
    lambda: f64,
    config: &DiffusionConfig,
    design: &SampleDesign,
) -> Result<VillageSummary> {
    design.validate()?;
    let eval = DiffusionConfig {
        lambda_mean: lambda,
        master_seed: derive_seed(config.master_seed, Domain::Evaluation),
        ..config.clone()
    };
    let table = ThresholdTable::draw(net, &eval)?;
    let mut prop = Propagator::new(net.len());
    let mut totals = vec![0u32; eval.periods + 1];
    let (mut any_sum, mut any_sq, mut rate_sum, mut rate_sq, mut count) = (0.0, 0.0, 0.0, 0.0, 0usize);
    for pair in pairs {
        let nodes = pair.nodes(net)?;
        let seed_hh = seed_households(net, &nodes)?;
        for r in 0..table.replications() {
            prop.run(net, &seed_hh, table.row(r), &mut totals, |_, _| {});
            let mut rng = substream(eval.master_seed, Domain::Sampling, r as u64);
            let obs = observe(net, &seed_hh, design, &mut rng, |v| prop.is_informed(v), None)?;
            let a = if obs.any { 1.0 } else { 0.0 };
            any_sum += a;
            any_sq += a * a;
            rate_sum += obs.rate;
            rate_sq += obs.rate * obs.rate;
            count += 1;
        }
    }
    let c = count.max(1) as f64;
    let var = |s: f64, q: f64| if count > 1 { ((q - s * s / c) / (c - 1.0)).max(0.0) } else { 0.0 };
    Ok(VillageSummary {
        village_id: net.village_id().to_string(),
        any_adoption: any_sum / c,
        adoption_rate: rate_sum / c,
        any_adoption_var: var(any_sum, any_sq),
        adoption_rate_var: var(rate_sum, rate_sq),
        observations: count,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreatmentCell {
    pub treatment: String,
    pub lambda: f64,
    pub villages: usize,
    /// Mean over villages of the probability of any sampled adoption.
    pub any_adoption_share: f64,
    pub any_adoption_ci: [f64; 2],
    pub adoption_rate: f64,
    pub adoption_rate_ci: [f64; 2],
    pub per_village: Vec<VillageSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleReport {
    pub cells: Vec<TreatmentCell>,
}

impl EnsembleReport {
    pub fn cell(&self, treatment: &str, lambda: f64) -> Option<&TreatmentCell> {
        self.cells.iter().find(|c| c.treatment == treatment && c.lambda == lambda)
    }
}

/// 95% Monte Carlo interval for a mean of village means.
fn mc_interval(values: &[VillageSummary], mean: f64, var: impl Fn(&VillageSummary) -> f64) -> [f64; 2] {
    let v = values.len().max(1) as f64;
    let total: f64 = values.iter().map(|s| var(s) / s.observations.max(1) as f64).sum();
    let half = 1.96 * total.sqrt() / v;
    [mean - half, mean + half]
}

/// Outcome table for already-resolved treatments under each threshold mean.
pub fn report_resolved(
    villages: &[VillageNetwork],
    treatments: &[ResolvedTreatment],
    lambdas: &[f64],
    config: &DiffusionConfig,
    design: &SampleDesign,
) -> Result<EnsembleReport> {
    let mut cells = Vec::new();
    for t in treatments {
        for &lambda in lambdas {
            let per_village = villages
                .par_iter()
                .zip(t.pairs.par_iter())
                .map(|(net, pairs)| evaluate_pairs(net, pairs, lambda, config, design))
                .collect::<Result<Vec<_>>>()?;
            let v = per_village.len().max(1) as f64;
            let any = per_village.iter().map(|s| s.any_adoption).sum::<f64>() / v;
            let rate = per_village.iter().map(|s| s.adoption_rate).sum::<f64>() / v;
            cells.push(TreatmentCell {
                treatment: t.label.clone(),
                lambda,
                villages: per_village.len(),
                any_adoption_share: any,
                any_adoption_ci: mc_interval(&per_village, any, |s| s.any_adoption_var),
                adoption_rate: rate,
                adoption_rate_ci: mc_interval(&per_village, rate, |s| s.adoption_rate_var),
                per_village,
            });
        }
    }
    Ok(EnsembleReport { cells })
}

/// Resolves every treatment and reports outcomes under simple (1) and
/// complex (2) contagion.
pub fn ensemble_report(
    villages: &[VillageNetwork],
    treatments: &[Treatment],
    config: &DiffusionConfig,
    design: &SampleDesign,
) -> Result<EnsembleReport> {
    design.validate()?;
    let resolved = treatments
        .iter()
        .map(|t| resolve_treatment(villages, t, config))
        .collect::<Result<Vec<_>>>()?;
    report_resolved(villages, &resolved, &[1.0, 2.0], config, design)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Individual;

    /// `n` single-person households in a path.
    fn path(n: usize) -> VillageNetwork {
        let people = (0..n).map(|i| Individual::new(format!("p{i:02}"), format!("h{i:02}"))).collect();
        let edges: Vec<(String, String)> = (1..n).map(|i| (format!("p{:02}", i - 1), format!("p{i:02}"))).collect();
        VillageNetwork::new("v", people, edges).unwrap()
    }

    fn outcome_with(net: &VillageNetwork, informed: &[usize]) -> DiffusionOutcome {
        let mut set = informed.to_vec();
        set.sort_unstable();
        DiffusionOutcome {
            informed_by_period: vec![set.clone()],
            information_rate_by_period: vec![set.len() as f64 / net.len() as f64],
        }
    }

    #[test]
    fn saturated_village() {
        let net = path(40);
        let all: Vec<usize> = (0..40).collect();
        let seeds = SeedPair::new("p00", "p01").unwrap();
        let o = sample_outcome(&outcome_with(&net, &all), &net, &seeds, &SampleDesign::default(), 1, 0).unwrap();
        assert!(o.any_adoption);
        assert_eq!(o.adoption_rate, 1.0);
        assert_eq!(o.sampled_households.len(), 30);
        assert!(o.sampled_households.contains(&"h00".to_string()));
    }

    #[test]
    fn seed_households_do_not_count() {
        let net = path(40);
        let seeds = SeedPair::new("p00", "p05").unwrap();
        let o = sample_outcome(&outcome_with(&net, &[0, 5]), &net, &seeds, &SampleDesign::default(), 1, 0).unwrap();
        assert!(!o.any_adoption);
        assert_eq!(o.adoption_rate, 0.0);
    }

    #[test]
    fn small_villages_fully_surveyed_or_rejected() {
        let net = path(10);
        let seeds = SeedPair::new("p00", "p01").unwrap();
        let out = outcome_with(&net, &[0, 1, 2]);
        let o = sample_outcome(&out, &net, &seeds, &SampleDesign::default(), 0, 0).unwrap();
        assert_eq!(o.sampled_households.len(), 10);
        assert!((o.adoption_rate - 1.0 / 8.0).abs() < 1e-15);
        let strict = SampleDesign { sample_size: 30, include_all_if_smaller: false };
        assert!(matches!(
            sample_outcome(&out, &net, &seeds, &strict, 0, 0),
            Err(EvaluationError::VillageTooSmall { .. })
        ));
    }

    #[test]
    fn hypergeometric_detection_probability() {
        // 58 households: 2 seeds + 56 others, 3 of them informed; 28 sampled.
        let net = path(58);
        let seeds = SeedPair::new("p00", "p01").unwrap();
        let out = outcome_with(&net, &[0, 1, 10, 30, 50]);
        let design = SampleDesign::default();
        let trials = 10_000;
        let hits = (0..trials)
            .filter(|&s| sample_outcome(&out, &net, &seeds, &design, 3, s).unwrap().any_adoption)
            .count();
        let expected = 1.0 - (28.0 * 27.0 * 26.0) / (56.0 * 55.0 * 54.0);
        let got = hits as f64 / trials as f64;
        assert!((got - expected).abs() < 0.01, "{got} vs {expected}");
    }

    #[test]
    fn more_informed_never_hurts_fixed_sample() {
        let net = path(60);
        let seeds = SeedPair::new("p00", "p01").unwrap();
        let design = SampleDesign::default();
        let small = outcome_with(&net, &[0, 1, 7]);
        let big = outcome_with(&net, &[0, 1, 7, 8, 9, 20, 44]);
        for s in 0..200 {
            let a = sample_outcome(&small, &net, &seeds, &design, 0, s).unwrap();
            let b = sample_outcome(&big, &net, &seeds, &design, 0, s).unwrap();
            assert_eq!(a.sampled_households, b.sampled_households);
            assert!(b.any_adoption >= a.any_adoption);
            assert!(b.adoption_rate >= a.adoption_rate);
        }
    }

    #[test]
    fn single_village_report_equals_village_probability() {
        let net = path(12);
        let cfg = DiffusionConfig { replications: 200, ..Default::default() };
        let design = SampleDesign { sample_size: 5, include_all_if_smaller: true };
        let pair = SeedPair::new("p03", "p04").unwrap();
        let resolved = ResolvedTreatment { label: "user".into(), pairs: vec![vec![pair.clone()]] };
        let report = report_resolved(std::slice::from_ref(&net), &[resolved], &[2.0], &cfg, &design).unwrap();
        let direct = evaluate_pairs(&net, &[pair], 2.0, &cfg, &design).unwrap();
        let cell = report.cell("user", 2.0).unwrap();
        assert_eq!(cell.any_adoption_share, direct.any_adoption);
        assert!(cell.any_adoption_ci[0] <= cell.any_adoption_share && cell.any_adoption_share <= cell.any_adoption_ci[1]);
    }

    #[test]
    fn user_pairs_must_cover_villages() {
        let net = path(5);
        let t = Treatment::UserPairs(BTreeMap::new());
        assert!(matches!(
            resolve_treatment(std::slice::from_ref(&net), &t, &DiffusionConfig::default()),
            Err(EvaluationError::MissingPair(_))
        ));
    }

    #[test]
    fn random_pairs_cross_households() {
        let people = vec![Individual::new("a", "1"), Individual::new("b", "1"), Individual::new("c", "2")];
        let net = VillageNetwork::new("v", people, Vec::<(&str, &str)>::new()).unwrap();
        let r = resolve_treatment(std::slice::from_ref(&net), &Treatment::RandomPairs { pairs_per_village: 10 }, &DiffusionConfig::default()).unwrap();
        assert_eq!(r.pairs[0].len(), 10);
        assert!(r.pairs[0].iter().all(|p| p.second == "c"));
    }
}
