//! Independent reference implementations shared by integration and
//! acceptance tests. Everything here is deliberately naive.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seedpair_core::{Individual, VillageNetwork};

/// Random village: `n` people in households of 1 to `max_household`
/// members, each non-household pair linked with probability `p`.
pub fn random_village(seed: u64, n: usize, p: f64, max_household: usize) -> VillageNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut people = Vec::with_capacity(n);
    let mut hh = 0;
    while people.len() < n {
        let size = rng.random_range(1..=max_household).min(n - people.len());
        for _ in 0..size {
            people.push(Individual::new(format!("p{:03}", people.len()), format!("h{hh:03}")));
        }
        hh += 1;
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((format!("p{a:03}"), format!("p{b:03}")));
            }
        }
    }
    VillageNetwork::new(format!("r{seed}"), people, edges).unwrap()
}

/// Random labelled tree on `n` single-person households.
pub fn random_tree(seed: u64, n: usize) -> VillageNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let people = (0..n).map(|i| Individual::new(format!("t{i:02}"), format!("t{i:02}"))).collect();
    let edges: Vec<(String, String)> = (1..n)
        .map(|i| (format!("t{:02}", rng.random_range(0..i)), format!("t{i:02}")))
        .collect();
    VillageNetwork::new("tree", people, edges).unwrap()
}

fn adjacency(net: &VillageNetwork) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); net.len()];
    for (a, b) in net.edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

fn household_closure(net: &VillageNetwork, set: &mut [bool]) {
    let hit: BTreeSet<usize> = (0..net.len()).filter(|&v| set[v]).map(|v| net.household_of(v)).collect();
    for v in 0..net.len() {
        if hit.contains(&net.household_of(v)) {
            set[v] = true;
        }
    }
}

/// Simple contagion with fixed unit thresholds: a person is informed by
/// period `t` iff their household is within `t` hops of a seed household in
/// the household-collapsed graph.
pub fn bfs_ball(net: &VillageNetwork, seeds: &[usize], periods: usize) -> Vec<Vec<usize>> {
    let h = net.household_count();
    let mut hadj = vec![BTreeSet::new(); h];
    for (a, b) in net.edges() {
        let (ha, hb) = (net.household_of(a), net.household_of(b));
        if ha != hb {
            hadj[ha].insert(hb);
            hadj[hb].insert(ha);
        }
    }
    let mut dist = vec![usize::MAX; h];
    let mut queue = VecDeque::new();
    for &s in seeds {
        let hs = net.household_of(s);
        if dist[hs] != 0 {
            dist[hs] = 0;
            queue.push_back(hs);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &y in &hadj[x] {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    (0..=periods)
        .map(|t| (0..net.len()).filter(|&v| dist[net.household_of(v)] <= t).collect())
        .collect()
}

/// Synchronous bootstrap percolation with household closure, recomputing
/// every count from scratch each period.
pub fn bootstrap_percolation(net: &VillageNetwork, seeds: &[usize], required: &[u16], periods: usize) -> Vec<Vec<usize>> {
    let adj = adjacency(net);
    let mut informed = vec![false; net.len()];
    for &s in seeds {
        informed[s] = true;
    }
    household_closure(net, &mut informed);
    let mut out = vec![(0..net.len()).filter(|&v| informed[v]).collect::<Vec<_>>()];
    for _ in 0..periods {
        let mut next = informed.clone();
        for v in 0..net.len() {
            let count = adj[v].iter().filter(|&&u| informed[u]).count();
            if count >= required[v] as usize {
                next[v] = true;
            }
        }
        household_closure(net, &mut next);
        informed = next;
        out.push((0..net.len()).filter(|&v| informed[v]).collect());
    }
    out
}

/// Final-period informed share under fixed integer thresholds.
pub fn deterministic_rate(net: &VillageNetwork, seeds: &[usize], required: &[u16], periods: usize) -> f64 {
    let sets = bootstrap_percolation(net, seeds, required, periods);
    sets[periods].len() as f64 / net.len() as f64
}

/// Every pair of nodes from distinct households, in (a, b) lexicographic
/// node order.
pub fn eligible_pairs(net: &VillageNetwork) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..net.len() {
        for b in a + 1..net.len() {
            if net.household_of(a) != net.household_of(b) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Best final rate over all eligible pairs with uniform integer threshold.
pub fn exhaustive_best(net: &VillageNetwork, lambda: u16, periods: usize) -> f64 {
    let req = vec![lambda; net.len()];
    eligible_pairs(net)
        .into_iter()
        .map(|(a, b)| deterministic_rate(net, &[a, b], &req, periods))
        .fold(0.0, f64::max)
}

/// Exact expected final rate when each person independently needs
/// `lambda` or `lambda + 1` informed contacts with probability one half,
/// the limit of thresholds `N(lambda, sd)` as `sd -> 0`. Enumerates all
/// `2^n` assignments.
pub fn half_split_expectation(net: &VillageNetwork, seeds: &[usize], lambda: u16, periods: usize) -> f64 {
    let n = net.len();
    assert!(n <= 16, "enumeration limited to small graphs");
    let mut total = 0.0;
    let mut req = vec![lambda; n];
    for mask in 0u32..(1 << n) {
        for (v, r) in req.iter_mut().enumerate() {
            *r = lambda + ((mask >> v) & 1) as u16;
        }
        total += deterministic_rate(net, seeds, &req, periods);
    }
    total / (1u64 << n) as f64
}

/// Betweenness on a tree: the number of unordered pairs whose unique path
/// passes through `v` as an interior vertex.
pub fn tree_betweenness(net: &VillageNetwork) -> Vec<f64> {
    let n = net.len();
    let mut out = vec![0.0; n];
    for s in 0..n {
        let dist = net.distances_from(s);
        for t in s + 1..n {
            let d_st = dist[t].unwrap();
            let dist_t = net.distances_from(t);
            for v in 0..n {
                if v != s && v != t && dist[v].unwrap() + dist_t[v].unwrap() == d_st {
                    out[v] += 1.0;
                }
            }
        }
    }
    out
}

/// Sequential Bayes: fold in each signal one at a time from a flat prior.
/// Both state probabilities are carried so no `1 - p` cancellation occurs.
pub fn sequential_posterior(alpha: f64, high: u32, low: u32) -> f64 {
    let (mut hi, mut lo) = (0.5, 0.5);
    let mut update = |l_hi: f64, l_lo: f64| {
        let (a, b) = (hi * l_hi, lo * l_lo);
        hi = a / (a + b);
        lo = b / (a + b);
    };
    for _ in 0..high {
        update(alpha, 1.0 - alpha);
    }
    for _ in 0..low {
        update(1.0 - alpha, alpha);
    }
    hi
}

/// Graph distance between two nodes, `None` if disconnected.
pub fn distance(net: &VillageNetwork, a: usize, b: usize) -> Option<usize> {
    net.distances_from(a)[b]
}
