mod common;

use proptest::prelude::*;
use seedpair_core::learning::{min_informed_connections, posterior, seeks_information, value_of_information};
use seedpair_core::network::{centrality, geo_adjacency};
use seedpair_core::{Individual, LearningParams, SignalTally};

use common::*;

proptest! {
    #[test]
    fn posterior_symmetric(alpha in 0.01f64..0.99, d in 0u32..30, frac in 0.0f64..=1.0) {
        let h = (frac * d as f64).round() as u32;
        let a = posterior(alpha, SignalTally::new(d, h).unwrap()).unwrap();
        let b = posterior(alpha, SignalTally::new(d, d - h).unwrap()).unwrap();
        prop_assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn posterior_is_sequential_bayes(alpha in 0.51f64..0.99, d in 0u32..=10, frac in 0.0f64..=1.0) {
        let h = (frac * d as f64).round() as u32;
        let p = posterior(alpha, SignalTally::new(d, h).unwrap()).unwrap();
        prop_assert!((p - sequential_posterior(alpha, h, d - h)).abs() < 1e-12);
    }

    #[test]
    fn posterior_increasing_in_high_signals(alpha in 0.51f64..0.99, d in 1u32..20) {
        let ps: Vec<f64> = (0..=d).map(|h| posterior(alpha, SignalTally::new(d, h).unwrap()).unwrap()).collect();
        // strict until the posterior rounds to 1
        prop_assert!(ps.windows(2).all(|w| w[0] < w[1] || (w[0] == 1.0 && w[1] == 1.0)));
    }

    #[test]
    fn threshold_monotone_in_alpha_and_ratio(i in 0usize..8, j in 0usize..8) {
        let grid = [0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95];
        let at = |a: f64, r: f64| min_informed_connections(&LearningParams::with_ratio(a, r, 0.0).unwrap()).unwrap();
        prop_assert!(at(grid[i + 1], grid[j]) <= at(grid[i], grid[j]));
        prop_assert!(at(grid[i], grid[j + 1]) >= at(grid[i], grid[j]));
    }

    #[test]
    fn free_information_never_hurts(alpha in 0.51f64..0.99, r in 0.05f64..0.95, contacts in 0u32..=8) {
        let p = LearningParams::with_ratio(alpha, r, 0.0).unwrap();
        let v = value_of_information(&p, contacts).value_by_count;
        prop_assert!(v.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn geo_network_invariant_under_relabeling(
        pts in prop::collection::vec((-0.0015f64..0.0015, -0.0015f64..0.0015), 2..25),
        shift in 1usize..24,
    ) {
        let n = pts.len();
        let make = |name: &dyn Fn(usize) -> String| -> Vec<Individual> {
            pts.iter().enumerate().map(|(i, &(la, lo))| Individual::new(name(i), format!("h{i}")).at(34.0 + la, -13.0 + lo)).collect()
        };
        let first = geo_adjacency("v", make(&|i| format!("a{i:02}")), 0.05).unwrap();
        let perm = |i: usize| (i + shift) % n;
        let second = geo_adjacency("v", make(&|i| format!("b{:02}", perm(i))), 0.05).unwrap();
        let mut e1: Vec<(usize, usize)> = first.edges().map(|(a, b)| {
            let (x, y) = (first.person_id(a)[1..].parse::<usize>().unwrap(), first.person_id(b)[1..].parse::<usize>().unwrap());
            (x.min(y), x.max(y))
        }).collect();
        let inverse = |k: usize| (k + n - shift % n) % n;
        let mut e2: Vec<(usize, usize)> = second.edges().map(|(a, b)| {
            let (x, y) = (inverse(second.person_id(a)[1..].parse().unwrap()), inverse(second.person_id(b)[1..].parse().unwrap()));
            (x.min(y), x.max(y))
        }).collect();
        e1.sort_unstable();
        e2.sort_unstable();
        prop_assert_eq!(e1, e2);
    }

    #[test]
    fn tree_betweenness_matches_path_enumeration(seed in any::<u64>(), n in 2usize..=12) {
        let net = random_tree(seed, n);
        let report = centrality(&net);
        let want = tree_betweenness(&net);
        for v in 0..n {
            prop_assert!((report.betweenness[v] - want[v]).abs() < 1e-9);
            if net.degree(v) == 1 {
                prop_assert_eq!(report.betweenness[v], 0.0);
            }
        }
        // total equals the interior vertex count summed over pairs
        let interior: usize = (0..n).flat_map(|s| {
            let d = net.distances_from(s);
            (s + 1..n).map(move |t| d[t].unwrap() - 1)
        }).sum();
        prop_assert!((report.betweenness.iter().sum::<f64>() - interior as f64).abs() < 1e-9);
    }

    #[test]
    fn eigenvector_is_an_eigenvector(seed in any::<u64>(), n in 3usize..30) {
        let net = random_village(seed, n, 0.2, 2);
        let report = centrality(&net);
        prop_assert!(report.eigen_converged);
        let v = &report.eigenvector;
        for comp in net.components() {
            if comp.len() < 2 {
                continue;
            }
            let av: Vec<f64> = comp.iter().map(|&x| net.neighbors(x).map(|y| v[y]).sum()).collect();
            let norm_v: f64 = comp.iter().map(|&x| v[x] * v[x]).sum();
            let mu = comp.iter().zip(&av).map(|(&x, a)| v[x] * a).sum::<f64>() / norm_v;
            for (k, &x) in comp.iter().enumerate() {
                prop_assert!((av[k] - mu * v[x]).abs() <= 1e-8, "residual at {}", x);
            }
        }
    }
}

#[test]
fn small_cost_consistent_with_seeking_rule() {
    for alpha in [0.6, 0.7, 0.8] {
        for r in [0.55, 0.65, 0.75] {
            for d in 1u32..=5 {
                let top = seedpair_core::learning::unanimous_posterior(alpha, d as u64);
                if (top - r).abs() < 1e-9 {
                    continue;
                }
                for scale in [1e-6, 1e-4] {
                    let base = LearningParams::with_ratio(alpha, r, 0.0).unwrap();
                    let eta = scale * (base.pi_hi - base.cost);
                    let p = LearningParams::with_ratio(alpha, r, eta).unwrap();
                    let seeks = value_of_information(&p, d).optimal_signal_count > 0;
                    assert_eq!(seeks, seeks_information(&p, d), "alpha {alpha} r {r} D {d} eta {eta}");
                }
            }
        }
    }
}
