//! Low-cost targeting from a short random interview list.
//!
//! An extension agent interviews `n_initial` random farmers, screened to those
//! with at least two connections, learns each respondent's connections, and
//! then applies one of the rules in [`StrategyId`]. Trainees are screened to
//! degree ≥ 2 as well. "Highest degree" ties go to the smallest person id.

use rand::seq::{index, IndexedRandom};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{optimal::PairScorer, Eligibility, Result, SeedPair, SeedingError, StrategyId, StrategyTrace};
use crate::diffusion::DiffusionConfig;
use crate::network::VillageNetwork;
use crate::rng::{mix_index, substream, Domain};

const MIN_DEGREE: usize = 2;

fn infeasible(strategy: StrategyId, reason: impl Into<String>) -> SeedingError {
    SeedingError::Infeasible {
        strategy,
        reason: reason.into(),
    }
}

/// Highest degree first, then smallest node.
fn by_degree(net: &VillageNetwork, nodes: &mut [usize]) {
    nodes.sort_by(|&a, &b| net.degree(b).cmp(&net.degree(a)).then(a.cmp(&b)));
}

fn top_degree(net: &VillageNetwork, nodes: &[usize]) -> usize {
    let mut sorted = nodes.to_vec();
    by_degree(net, &mut sorted);
    sorted[0]
}

fn screened_neighbors(net: &VillageNetwork, v: usize) -> Vec<usize> {
    net.neighbors(v).filter(|&u| net.degree(u) >= MIN_DEGREE).collect()
}

fn pick_two<R: Rng>(rng: &mut R, from: &[usize]) -> (usize, usize) {
    let idx = index::sample(rng, from.len(), 2);
    (from[idx.index(0)], from[idx.index(1)])
}

/// Runs one strategy draw. The result is a pure function of the arguments.
pub fn run_strategy(
    net: &VillageNetwork,
    strategy: StrategyId,
    n_initial: usize,
    master_seed: u64,
    rng_substream: u64,
) -> Result<StrategyTrace> {
    if n_initial < 2 {
        return Err(SeedingError::InitialInterviews(n_initial));
    }
    let mut rng = substream(master_seed, Domain::Strategy, rng_substream);
    let pool: Vec<usize> = (0..net.len()).filter(|&v| net.degree(v) >= MIN_DEGREE).collect();
    if pool.len() < 2 {
        return Err(infeasible(strategy, format!("only {} individuals with at least two connections", pool.len())));
    }
    let list: Vec<usize> = index::sample(&mut rng, pool.len(), n_initial.min(pool.len()))
        .into_iter()
        .map(|i| pool[i])
        .collect();
    let mut interviewed = list.clone();

    let (a, b) = match strategy {
        StrategyId::A => pick_two(&mut rng, &list),
        StrategyId::B => {
            let mut ranked = list.clone();
            by_degree(net, &mut ranked);
            (ranked[0], ranked[1])
        }
        StrategyId::C => {
            let hub = top_degree(net, &list);
            let friends = screened_neighbors(net, hub);
            if friends.len() < 2 {
                return Err(infeasible(strategy, "highest-degree respondent has fewer than two screened friends"));
            }
            pick_two(&mut rng, &friends)
        }
        StrategyId::D => {
            let hub = top_degree(net, &list);
            interviewed.extend(net.neighbors(hub));
            let mut friends = screened_neighbors(net, hub);
            if friends.len() < 2 {
                return Err(infeasible(strategy, "highest-degree respondent has fewer than two screened friends"));
            }
            by_degree(net, &mut friends);
            (friends[0], friends[1])
        }
        StrategyId::E => {
            let (m1, m2) = pick_two(&mut rng, &list);
            let mut trainees: Vec<usize> = Vec::with_capacity(2);
            for member in [m1, m2] {
                let contacts: Vec<usize> = net.neighbors(member).collect();
                let contact = *contacts.choose(&mut rng).expect("screened respondents have connections");
                interviewed.push(contact);
                let candidates: Vec<usize> = screened_neighbors(net, contact)
                    .into_iter()
                    .filter(|&w| w != member && !trainees.contains(&w))
                    .collect();
                match candidates.choose(&mut rng) {
                    Some(&t) => trainees.push(t),
                    None => return Err(infeasible(strategy, "no screened friend-of-friend reachable")),
                }
            }
            (trainees[0], trainees[1])
        }
        StrategyId::F => {
            let hub = top_degree(net, &list);
            let friends = screened_neighbors(net, hub);
            match friends.choose(&mut rng) {
                Some(&f) => (hub, f),
                None => return Err(infeasible(strategy, "highest-degree respondent has no screened friend")),
            }
        }
    };

    Ok(StrategyTrace {
        strategy,
        initial_interviews: list.len(),
        total_interviews: interviewed.len(),
        chosen_pair: SeedPair::from_nodes(net, a, b),
        interviewed_ids: interviewed.iter().map(|&v| net.person_id(v).to_string()).collect(),
    })
}

/// Row label of a strategy evaluation table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StrategyRow {
    /// Training the complex-optimal pair itself; ratio 1 by construction.
    Optimal,
    Strategy(StrategyId),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrategyCell {
    pub row: StrategyRow,
    pub n_initial: usize,
    /// Mean information rate of chosen pairs over mean rate of the optimal
    /// pairs, on the same (village, trial) observations.
    pub ratio: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub observations: usize,
    pub infeasible: usize,
    pub mean_initial_interviews: f64,
    pub mean_total_interviews: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrategyEvaluation {
    pub villages: usize,
    /// Villages where no optimal pair exists; excluded entirely.
    pub villages_skipped: usize,
    pub mean_optimal_rate: f64,
    pub cells: Vec<StrategyCell>,
}

impl StrategyEvaluation {
    pub fn cell(&self, strategy: StrategyId, n_initial: usize) -> Option<&StrategyCell> {
        self.cells
            .iter()
            .find(|c| c.row == StrategyRow::Strategy(strategy) && c.n_initial == n_initial)
    }
}

#[derive(Default)]
struct CellTally {
    rates: Vec<f64>,
    optimal: Vec<f64>,
    infeasible: usize,
    initial: usize,
    total: usize,
}

/// Percent-of-optimal table under complex contagion (threshold mean 2).
///
/// Trial `t` of cell `(s, k)` in village `v` draws its interview list from
/// substream `(v, k, t)` for every strategy, so strategies are compared on the
/// same respondents, and pair rates come from one [`PairScorer`] per village.
pub fn evaluate_strategies(
    villages: &[VillageNetwork],
    config: &DiffusionConfig,
    strategies: &[StrategyId],
    n_initial_grid: &[usize],
    trials_per_cell: usize,
) -> Result<StrategyEvaluation> {
    let config = config.with_lambda(2.0);
    config.validate()?;
    let mut scorers = villages
        .iter()
        .map(|net| PairScorer::new(net, &config))
        .collect::<Result<Vec<_>>>()?;
    evaluate_strategies_with(&mut scorers, strategies, n_initial_grid, trials_per_cell)
}

/// [`evaluate_strategies`] on prepared scorers, one per village in ensemble
/// order. Pair rates come from each scorer's own config, so already-scored
/// pairs are reused.
pub fn evaluate_strategies_with(
    scorers: &mut [PairScorer<'_>],
    strategies: &[StrategyId],
    n_initial_grid: &[usize],
    trials_per_cell: usize,
) -> Result<StrategyEvaluation> {
    if let Some(&k) = n_initial_grid.iter().find(|&&k| k < 2) {
        return Err(SeedingError::InitialInterviews(k));
    }
    let cells: Vec<(StrategyId, usize)> = strategies
        .iter()
        .flat_map(|&s| n_initial_grid.iter().map(move |&k| (s, k)))
        .collect();

    let per_village: Vec<Option<(f64, Vec<CellTally>)>> = scorers
        .par_iter_mut()
        .enumerate()
        .map(|(vi, scorer)| -> Result<Option<(f64, Vec<CellTally>)>> {
            let net = scorer.network();
            let master_seed = scorer.config().master_seed;
            let opt = match scorer.search(&Eligibility::default()) {
                Ok(search) => search.best_score().mean_rate,
                Err(SeedingError::NotEnoughEligible(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let mut tallies = Vec::with_capacity(cells.len());
            for &(strategy, k) in &cells {
                let mut tally = CellTally::default();
                for t in 0..trials_per_cell {
                    let stream = mix_index(&[vi as u64, k as u64, t as u64]);
                    match run_strategy(net, strategy, k, master_seed, stream) {
                        Ok(trace) => {
                            tally.rates.push(scorer.score(&trace.chosen_pair)?.mean_rate);
                            tally.optimal.push(opt);
                            tally.initial += trace.initial_interviews;
                            tally.total += trace.total_interviews;
                        }
                        Err(SeedingError::Infeasible { .. }) => tally.infeasible += 1,
                        Err(e) => return Err(e),
                    }
                }
                tallies.push(tally);
            }
            Ok(Some((opt, tallies)))
        })
        .collect::<Result<_>>()?;

    let used: Vec<&(f64, Vec<CellTally>)> = per_village.iter().flatten().collect();
    let mean_optimal_rate = used.iter().map(|(o, _)| o).sum::<f64>() / used.len().max(1) as f64;

    let mut out = vec![StrategyCell {
        row: StrategyRow::Optimal,
        n_initial: 0,
        ratio: 1.0,
        ci_low: 1.0,
        ci_high: 1.0,
        observations: used.len(),
        infeasible: 0,
        mean_initial_interviews: 0.0,
        mean_total_interviews: 0.0,
    }];
    for (ci, &(strategy, k)) in cells.iter().enumerate() {
        let mut merged = CellTally::default();
        for (_, tallies) in &used {
            let t = &tallies[ci];
            merged.rates.extend_from_slice(&t.rates);
            merged.optimal.extend_from_slice(&t.optimal);
            merged.infeasible += t.infeasible;
            merged.initial += t.initial;
            merged.total += t.total;
        }
        out.push(summarize(StrategyRow::Strategy(strategy), k, &merged));
    }
    Ok(StrategyEvaluation {
        villages: scorers.len(),
        villages_skipped: scorers.len() - used.len(),
        mean_optimal_rate,
        cells: out,
    })
}

fn summarize(row: StrategyRow, n_initial: usize, t: &CellTally) -> StrategyCell {
    let n = t.rates.len();
    let nf = n.max(1) as f64;
    let opt_mean = t.optimal.iter().sum::<f64>() / nf;
    let (ratio, half) = if n == 0 || opt_mean == 0.0 {
        (f64::NAN, f64::NAN)
    } else {
        let y: Vec<f64> = t.rates.iter().map(|r| r / opt_mean).collect();
        let mean = y.iter().sum::<f64>() / nf;
        let var = if n > 1 { y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0) } else { 0.0 };
        (mean, 1.96 * (var / nf).sqrt())
    };
    StrategyCell {
        row,
        n_initial,
        ratio,
        ci_low: ratio - half,
        ci_high: ratio + half,
        observations: n,
        infeasible: t.infeasible,
        mean_initial_interviews: t.initial as f64 / nf,
        mean_total_interviews: t.total as f64 / nf,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Individual;

    fn solo(n: usize, edges: &[(usize, usize)]) -> VillageNetwork {
        let people = (0..n).map(|i| Individual::new(format!("p{i:02}"), format!("h{i:02}"))).collect();
        let edges: Vec<(String, String)> = edges.iter().map(|&(a, b)| (format!("p{a:02}"), format!("p{b:02}"))).collect();
        VillageNetwork::new("v", people, edges).unwrap()
    }

    /// Hub 0 with neighbours 1..=5; 1 and 2 carry extra spokes so they are the
    /// hub's highest-degree friends.
    fn hub_and_spoke() -> VillageNetwork {
        let mut e = vec![(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (3, 4), (4, 5)];
        for leaf in 6..9 {
            e.push((1, leaf));
            e.push((2, leaf));
        }
        solo(9, &e)
    }

    #[test]
    fn b_matches_a_with_two_interviews() {
        let net = hub_and_spoke();
        for s in 0..50 {
            let a = run_strategy(&net, StrategyId::A, 2, 1, s).unwrap();
            let b = run_strategy(&net, StrategyId::B, 2, 1, s).unwrap();
            assert_eq!(a.chosen_pair, b.chosen_pair);
        }
    }

    #[test]
    fn d_trains_hubs_best_friends() {
        let net = hub_and_spoke();
        let mut seen = 0;
        for s in 0..200 {
            let trace = run_strategy(&net, StrategyId::D, 9, 3, s).unwrap();
            // with the whole screened pool listed, the hub is always found
            assert!(trace.interviewed_ids.contains(&"p00".to_string()));
            assert_eq!(trace.chosen_pair, SeedPair::new("p01", "p02").unwrap());
            assert_eq!(trace.total_interviews, trace.initial_interviews + net.degree(0));
            seen += 1;
        }
        assert_eq!(seen, 200);
    }

    #[test]
    fn interview_accounting() {
        let net = hub_and_spoke();
        for s in 0..30 {
            for strat in StrategyId::ALL {
                let Ok(t) = run_strategy(&net, strat, 3, 0, s) else { continue };
                assert!(t.total_interviews >= t.initial_interviews);
                let extra = t.total_interviews - t.initial_interviews;
                match strat {
                    StrategyId::D => assert!(extra >= 2),
                    StrategyId::E => assert_eq!(extra, 2),
                    _ => assert_eq!(extra, 0),
                }
                let [x, y] = t.chosen_pair.nodes(&net).unwrap();
                assert!(net.degree(x) >= 2 && net.degree(y) >= 2);
            }
        }
    }

    #[test]
    fn degree_one_only_is_infeasible() {
        let net = solo(4, &[(0, 1), (2, 3)]);
        for strat in StrategyId::ALL {
            assert!(matches!(run_strategy(&net, strat, 2, 0, 0), Err(SeedingError::Infeasible { .. })));
        }
    }

    #[test]
    fn deterministic_per_substream() {
        let net = hub_and_spoke();
        for strat in StrategyId::ALL {
            let a = run_strategy(&net, strat, 4, 9, 77);
            let b = run_strategy(&net, strat, 4, 9, 77);
            assert_eq!(format!("{a:?}"), format!("{b:?}"));
        }
    }

    #[test]
    fn rejects_short_lists() {
        let net = hub_and_spoke();
        assert!(matches!(run_strategy(&net, StrategyId::A, 1, 0, 0), Err(SeedingError::InitialInterviews(1))));
    }

    #[test]
    fn evaluation_ratios_bounded() {
        let net = hub_and_spoke();
        let cfg = DiffusionConfig { replications: 200, ..Default::default() };
        let eval = evaluate_strategies(std::slice::from_ref(&net), &cfg, &StrategyId::ALL, &[2, 4], 10).unwrap();
        assert_eq!(eval.cells[0].row, StrategyRow::Optimal);
        assert_eq!(eval.cells[0].ratio, 1.0);
        for c in &eval.cells {
            if c.observations > 0 {
                assert!(c.ratio <= 1.0 + 1e-12, "{c:?}");
            }
        }
    }
}
