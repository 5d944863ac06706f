//! Synthetic clustered villages for desk-scale experiments.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::{Individual, NetworkError, Result, VillageNetwork, EARTH_RADIUS_MILES};
use crate::rng::{mix_index, substream, Domain};

const CENTER_LAT: f64 = -13.5;
const CENTER_LON: f64 = 34.5;
const MAX_HOUSEHOLD_SIZE: u64 = 12;
/// Candidate households for a local tie.
const LOCAL_HOUSEHOLDS: usize = 6;
/// Expected number of other households within the default geo radius.
const GEO_NEIGHBOR_TARGET: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub n_households: usize,
    pub mean_household_size: f64,
    /// Share of link attempts made by triadic closure rather than uniformly
    /// at random; higher values give more clustered graphs.
    pub clustering: f64,
    /// Link attempts per individual on top of the household spanning tree.
    pub links_per_person: usize,
    /// Share of non-closure ties drawn from the nearest households rather
    /// than uniformly from the whole village.
    pub locality: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n_households: 58,
            mean_household_size: 2.1,
            clustering: 0.9,
            links_per_person: 2,
            locality: 0.8,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(NetworkError::InvalidParameter(m));
        if self.n_households < 2 {
            return bad(format!("n_households must be at least 2, got {}", self.n_households));
        }
        if !(self.mean_household_size.is_finite() && self.mean_household_size >= 1.0) {
            return bad(format!("mean_household_size must be >= 1, got {}", self.mean_household_size));
        }
        if !(0.0..=1.0).contains(&self.clustering) {
            return bad(format!("clustering must lie in [0, 1], got {}", self.clustering));
        }
        if !(0.0..=1.0).contains(&self.locality) {
            return bad(format!("locality must lie in [0, 1], got {}", self.locality));
        }
        Ok(())
    }
}

/// Generates one village. Households sit at random plot locations; a
/// nearest-neighbour spanning tree over household heads (built west to east)
/// guarantees connectivity, then every individual makes `links_per_person`
/// attempts, each either a triadic closure (friend of a friend) or a fresh
/// tie to a nearby household (probability `locality`) or anyone.
pub fn synth_village(village_id: &str, params: &SynthParams, rng_seed: u64) -> Result<VillageNetwork> {
    params.validate()?;
    let mut rng = substream(rng_seed, Domain::Generator, 0);
    let n_h = params.n_households;

    let extra = params.mean_household_size - 1.0;
    let sizes: Vec<usize> = if extra > 0.0 {
        let poisson = Poisson::new(extra).map_err(|e| NetworkError::InvalidParameter(e.to_string()))?;
        (0..n_h)
            .map(|_| 1 + (poisson.sample(&mut rng) as u64).min(MAX_HOUSEHOLD_SIZE - 1) as usize)
            .collect()
    } else {
        vec![1; n_h]
    };

    // Square village whose density puts about GEO_NEIGHBOR_TARGET households
    // inside a 0.05 mile radius.
    let side = (n_h as f64 * std::f64::consts::PI * 0.05f64.powi(2) / GEO_NEIGHBOR_TARGET).sqrt();
    let deg_lat = |miles: f64| (miles / EARTH_RADIUS_MILES).to_degrees();
    let deg_lon = |miles: f64| deg_lat(miles) / CENTER_LAT.to_radians().cos();
    let plots: Vec<(f64, f64)> = (0..n_h)
        .map(|_| (rng.random_range(-0.5..0.5) * side, rng.random_range(-0.5..0.5) * side))
        .collect();

    let mut individuals = Vec::new();
    let mut household_of = Vec::new();
    let mut heads = Vec::with_capacity(n_h);
    for (h, (&size, &(x, y))) in sizes.iter().zip(&plots).enumerate() {
        heads.push(individuals.len());
        for k in 0..size {
            let jx = rng.random_range(-0.005..0.005);
            let jy = rng.random_range(-0.005..0.005);
            individuals.push(
                Individual::new(format!("{village_id}-h{h:03}-{k}"), format!("{village_id}-h{h:03}"))
                    .at(CENTER_LAT + deg_lat(y + jy), CENTER_LON + deg_lon(x + jx)),
            );
            household_of.push(h);
        }
    }
    let n = individuals.len();

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let link = |adj: &mut Vec<Vec<usize>>, a: usize, b: usize| -> bool {
        if a == b || adj[a].contains(&b) {
            return false;
        }
        adj[a].push(b);
        adj[b].push(a);
        true
    };
    let members: Vec<Vec<usize>> = (0..n_h).map(|h| (0..n).filter(|&v| household_of[v] == h).collect()).collect();
    for hh in &members {
        for (i, &a) in hh.iter().enumerate() {
            for &b in &hh[i + 1..] {
                link(&mut adj, a, b);
            }
        }
    }
    // Households are joined by at most one tie, so a seed household
    // counts once towards a neighbour's threshold.
    let mut tied: BTreeSet<(usize, usize)> = BTreeSet::new();
    let key = |a: usize, b: usize| (household_of[a].min(household_of[b]), household_of[a].max(household_of[b]));
    let dist2 = |a: usize, b: usize| (plots[a].0 - plots[b].0).powi(2) + (plots[a].1 - plots[b].1).powi(2);
    let mut order: Vec<usize> = (0..n_h).collect();
    order.sort_by(|&a, &b| plots[a].0.total_cmp(&plots[b].0));
    for i in 1..n_h {
        let h = order[i];
        let nearest = order[..i]
            .iter()
            .copied()
            .min_by(|&a, &b| dist2(h, a).total_cmp(&dist2(h, b)))
            .expect("non-empty prefix");
        link(&mut adj, heads[h], heads[nearest]);
        tied.insert((h.min(nearest), h.max(nearest)));
    }
    let near: Vec<Vec<usize>> = (0..n_h)
        .map(|h| {
            let mut others: Vec<usize> = (0..n_h).filter(|&g| g != h).collect();
            others.sort_by(|&a, &b| dist2(h, a).total_cmp(&dist2(h, b)));
            others.truncate(LOCAL_HOUSEHOLDS);
            others
        })
        .collect();
    for _ in 0..params.links_per_person {
        for v in 0..n {
            let mut target = None;
            if rng.random_bool(params.clustering) {
                if let Some(&u) = adj[v].choose(&mut rng) {
                    let candidates: Vec<usize> = adj[u]
                        .iter()
                        .copied()
                        .filter(|&w| household_of[w] != household_of[v] && !tied.contains(&key(v, w)))
                        .collect();
                    target = candidates.choose(&mut rng).copied();
                }
            }
            let target = match target {
                Some(t) => t,
                None if rng.random_bool(params.locality) => {
                    let h = *near[household_of[v]].choose(&mut rng).expect("at least two households");
                    *members[h].choose(&mut rng).expect("households are non-empty")
                }
                None => rng.random_range(0..n),
            };
            if household_of[target] != household_of[v] && tied.insert(key(v, target)) {
                link(&mut adj, v, target);
            }
        }
    }

    let edges: Vec<(usize, usize)> = adj
        .iter()
        .enumerate()
        .flat_map(|(a, list)| list.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
        .collect();
    VillageNetwork::from_positions(village_id.to_string(), individuals, edges)
}

/// `count` villages `v000`, `v001`, … each seeded from `(rng_seed, index)`.
pub fn synth_ensemble(count: usize, params: &SynthParams, rng_seed: u64) -> Result<Vec<VillageNetwork>> {
    (0..count)
        .map(|i| synth_village(&format!("v{i:03}"), params, mix_index(&[rng_seed, i as u64])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_instance_has_bridge() {
        let p = SynthParams {
            n_households: 2,
            mean_household_size: 1.0,
            clustering: 0.0,
            links_per_person: 0,
            locality: 0.0,
        };
        let net = synth_village("t", &p, 1).unwrap();
        assert_eq!(net.len(), 2);
        assert!(net.has_edge(0, 1));
    }

    #[test]
    fn deterministic_per_seed() {
        let p = SynthParams::default();
        let a = synth_village("t", &p, 42).unwrap();
        let b = synth_village("t", &p, 42).unwrap();
        assert_eq!(a.individuals(), b.individuals());
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
        let c = synth_village("t", &p, 43).unwrap();
        assert_ne!(a.edges().collect::<Vec<_>>(), c.edges().collect::<Vec<_>>());
    }

    #[test]
    fn rejects_degenerate_parameters() {
        for p in [
            SynthParams { n_households: 1, ..SynthParams::default() },
            SynthParams { mean_household_size: 0.5, ..SynthParams::default() },
            SynthParams { clustering: 1.5, ..SynthParams::default() },
            SynthParams { locality: -0.1, ..SynthParams::default() },
        ] {
            assert!(matches!(synth_village("t", &p, 0), Err(NetworkError::InvalidParameter(_))));
        }
    }

    #[test]
    fn households_share_at_most_one_tie() {
        for seed in 0..10 {
            let net = synth_village("t", &SynthParams::default(), seed).unwrap();
            let mut seen = BTreeSet::new();
            for (a, b) in net.edges() {
                let (ha, hb) = (net.household_of(a), net.household_of(b));
                if ha != hb {
                    assert!(seen.insert((ha.min(hb), ha.max(hb))), "households {ha} and {hb} tied twice");
                }
            }
        }
    }

    #[test]
    fn default_village_is_connected_with_coordinates() {
        let net = synth_village("t", &SynthParams::default(), 7).unwrap();
        assert_eq!(net.household_count(), 58);
        assert_eq!(net.components().len(), 1);
        assert!(net.has_coordinates());
    }

    #[test]
    fn clustering_knob_raises_clustering() {
        let mean = |knob: f64| {
            let p = SynthParams { clustering: knob, ..SynthParams::default() };
            (0..20).map(|s| synth_village("t", &p, s).unwrap().mean_clustering()).sum::<f64>() / 20.0
        };
        let (low, high) = (mean(0.1), mean(0.9));
        assert!(high > low, "clustering {high} at 0.9 vs {low} at 0.1");
    }
}
