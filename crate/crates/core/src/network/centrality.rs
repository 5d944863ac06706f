use std::collections::VecDeque;

use serde::Serialize;

use super::VillageNetwork;

const EIGEN_TOLERANCE: f64 = 1e-10;
const EIGEN_MAX_ITERATIONS: usize = 10_000;

/// Per-node centrality scores, indexed like the network's nodes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CentralityReport {
    pub degree: Vec<usize>,
    /// Raw sum over unordered pairs `{s, t}` of the fraction of shortest
    /// s–t paths that pass through the node.
    pub betweenness: Vec<f64>,
    /// Leading eigenvector of each connected component, unit Euclidean norm
    /// on that component. Singleton components score 0.
    pub eigenvector: Vec<f64>,
    /// False when some component hit the iteration cap before converging.
    pub eigen_converged: bool,
}

pub fn centrality(net: &VillageNetwork) -> CentralityReport {
    let degree = (0..net.len()).map(|v| net.degree(v)).collect();
    let (eigenvector, eigen_converged) = eigenvector_centrality(net);
    CentralityReport {
        degree,
        betweenness: betweenness(net),
        eigenvector,
        eigen_converged,
    }
}

/// Brandes accumulation on the unweighted graph.
fn betweenness(net: &VillageNetwork) -> Vec<f64> {
    let n = net.len();
    let mut bc = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut stack = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        for v in 0..n {
            sigma[v] = 0.0;
            dist[v] = -1;
            delta[v] = 0.0;
            preds[v].clear();
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for w in net.neighbors(v) {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    // every unordered pair was visited from both ends
    bc.iter_mut().for_each(|b| *b /= 2.0);
    bc
}

/// Power iteration on `A + I` per component; the shift keeps bipartite
/// components (stars, paths) from oscillating without changing eigenvectors.
fn eigenvector_centrality(net: &VillageNetwork) -> (Vec<f64>, bool) {
    let mut scores = vec![0.0; net.len()];
    let mut converged = true;
    for comp in net.components() {
        if comp.len() < 2 {
            continue;
        }
        let start = 1.0 / (comp.len() as f64).sqrt();
        for &v in &comp {
            scores[v] = start;
        }
        let mut next = vec![0.0; net.len()];
        let mut done = false;
        for _ in 0..EIGEN_MAX_ITERATIONS {
            for &v in &comp {
                next[v] = scores[v] + net.neighbors(v).map(|u| scores[u]).sum::<f64>();
            }
            let norm = comp.iter().map(|&v| next[v] * next[v]).sum::<f64>().sqrt();
            let mut diff = 0.0;
            for &v in &comp {
                next[v] /= norm;
                diff += (next[v] - scores[v]).powi(2);
                scores[v] = next[v];
            }
            if diff.sqrt() < EIGEN_TOLERANCE {
                done = true;
                break;
            }
        }
        converged &= done;
    }
    (scores, converged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Individual;

    fn graph(n: usize, edges: &[(usize, usize)]) -> VillageNetwork {
        let people = (0..n).map(|i| Individual::new(format!("p{i:02}"), format!("h{i:02}"))).collect();
        let edges: Vec<(String, String)> = edges.iter().map(|&(a, b)| (format!("p{a:02}"), format!("p{b:02}"))).collect();
        VillageNetwork::new("v", people, edges).unwrap()
    }

    #[test]
    fn triangle_has_no_brokers() {
        let r = centrality(&graph(3, &[(0, 1), (1, 2), (0, 2)]));
        assert_eq!(r.degree, vec![2, 2, 2]);
        assert_eq!(r.betweenness, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn path_middle_brokers_one_pair() {
        let r = centrality(&graph(3, &[(0, 1), (1, 2)]));
        assert_eq!(r.betweenness, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn star_eigenvector_matches_closed_form() {
        let r = centrality(&graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]));
        assert!(r.eigen_converged);
        assert!((r.eigenvector[0] - 0.5f64.sqrt()).abs() < 1e-8);
        for leaf in 1..5 {
            assert!((r.eigenvector[leaf] - 0.5 / 2f64.sqrt()).abs() < 1e-8);
        }
    }

    #[test]
    fn isolated_nodes_score_zero() {
        let r = centrality(&graph(3, &[(0, 1)]));
        assert_eq!(r.degree[2], 0);
        assert_eq!(r.betweenness[2], 0.0);
        assert_eq!(r.eigenvector[2], 0.0);
        assert!((r.eigenvector[0] - 0.5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn square_splits_betweenness() {
        // 4-cycle: each opposite pair has two shortest paths
        let r = centrality(&graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]));
        for b in r.betweenness {
            assert!((b - 0.5).abs() < 1e-12);
        }
    }
}
