//! Village network model: individuals grouped in households, an undirected
//! friendship graph, and the derived views the simulators run on.

mod centrality;
mod geo;
mod io;
mod synth;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use centrality::{centrality, CentralityReport};
pub use geo::{geo_adjacency, haversine_miles, DEFAULT_GEO_RADIUS_MILES, EARTH_RADIUS_MILES};
pub use io::{load_village, load_villages, write_edges, write_individuals};
pub use synth::{synth_ensemble, synth_village, SynthParams};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("row {row}: {message}")]
    Parse { row: u64, message: String },
    #[error("edge references unknown person `{id}`{}", .row.map(|r| format!(" (row {r})")).unwrap_or_default())]
    DanglingEdge { id: String, row: Option<u64> },
    #[error("row {row}: edge references unknown village `{village}`")]
    UnknownVillage { village: String, row: u64 },
    #[error("duplicate person id `{0}`")]
    DuplicatePerson(String),
    #[error("person `{0}` has an empty household id")]
    EmptyHousehold(String),
    #[error("empty identifier")]
    EmptyId,
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("person `{0}` has no coordinates")]
    MissingCoordinates(String),
    #[error("person `{id}` has out-of-range coordinates ({lat}, {lon})")]
    InvalidCoordinates { id: String, lat: f64, lon: f64 },
    #[error("network has no individuals")]
    Empty,
    #[error("expected exactly one village, found {0}")]
    NotSingleVillage(usize),
    #[error("village `{0}` not present in input")]
    VillageNotFound(String),
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = NetworkError> = std::result::Result<T, E>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coordinates {
    pub lat: f64,
    pub lon: f64,
}

impl Coordinates {
    pub fn is_valid(&self) -> bool {
        (-90.0..=90.0).contains(&self.lat) && (-180.0..=180.0).contains(&self.lon)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub person_id: String,
    pub household_id: String,
    pub coordinates: Option<Coordinates>,
}

impl Individual {
    pub fn new(person_id: impl Into<String>, household_id: impl Into<String>) -> Self {
        Individual {
            person_id: person_id.into(),
            household_id: household_id.into(),
            coordinates: None,
        }
    }

    pub fn at(mut self, lat: f64, lon: f64) -> Self {
        self.coordinates = Some(Coordinates { lat, lon });
        self
    }
}

/// An undirected village graph with household closure applied.
///
/// Individuals are stored sorted by `person_id`, so node index order is the
/// lexicographic id order. Every tie-break in the crate that says "smallest
/// person id" is implemented as "smallest node index". Households are likewise
/// numbered in sorted `household_id` order.
#[derive(Clone, Debug)]
pub struct VillageNetwork {
    village_id: String,
    individuals: Vec<Individual>,
    index: HashMap<String, usize>,
    household_ids: Vec<String>,
    household_of: Vec<u32>,
    household_members: Vec<Vec<u32>>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl VillageNetwork {
    /// Builds a network from individuals and id-pair edges. Duplicate and
    /// reversed edges collapse to one; household members are linked pairwise.
    pub fn new<I, A, B>(village_id: impl Into<String>, individuals: Vec<Individual>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let skeleton = Skeleton::new(individuals)?;
        let mut pairs = Vec::new();
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ia = skeleton.lookup(a)?;
            let ib = skeleton.lookup(b)?;
            if ia == ib {
                return Err(NetworkError::SelfLoop(a.to_string()));
            }
            pairs.push((ia, ib));
        }
        Ok(skeleton.finish(village_id.into(), pairs))
    }

    /// Same as [`VillageNetwork::new`] but with edges given as positions into
    /// `individuals` *before* sorting.
    pub(crate) fn from_positions(
        village_id: String,
        individuals: Vec<Individual>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let skeleton = Skeleton::new(individuals)?;
        let pairs = edges
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (skeleton.rank[a], skeleton.rank[b]))
            .collect();
        Ok(skeleton.finish(village_id, pairs))
    }

    pub fn village_id(&self) -> &str {
        &self.village_id
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn individuals(&self) -> &[Individual] {
        &self.individuals
    }

    pub fn individual(&self, node: usize) -> &Individual {
        &self.individuals[node]
    }

    pub fn person_id(&self, node: usize) -> &str {
        &self.individuals[node].person_id
    }

    pub fn node(&self, person_id: &str) -> Option<usize> {
        self.index.get(person_id).copied()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn neighbors(&self, node: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.neighbor_slice(node).iter().map(|&v| v as usize)
    }

    #[inline]
    pub(crate) fn neighbor_slice(&self, node: usize) -> &[u32] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbor_slice(a).binary_search(&(b as u32)).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Undirected edges as `(a, b)` with `a < b`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |a| self.neighbors(a).filter(move |&b| b > a).map(move |b| (a, b)))
    }

    pub fn household_count(&self) -> usize {
        self.household_ids.len()
    }

    pub fn household_id(&self, household: usize) -> &str {
        &self.household_ids[household]
    }

    pub fn household_of(&self, node: usize) -> usize {
        self.household_of[node] as usize
    }

    pub fn household_members(&self, household: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.household_members[household].iter().map(|&v| v as usize)
    }

    #[inline]
    pub(crate) fn household_slice(&self, household: usize) -> &[u32] {
        &self.household_members[household]
    }

    /// Household id → member person ids.
    pub fn household_index(&self) -> BTreeMap<&str, Vec<&str>> {
        self.household_ids
            .iter()
            .zip(&self.household_members)
            .map(|(h, members)| (h.as_str(), members.iter().map(|&m| self.person_id(m as usize)).collect()))
            .collect()
    }

    pub fn has_coordinates(&self) -> bool {
        self.individuals.iter().all(|i| i.coordinates.is_some())
    }

    /// Breadth-first hop distances from `source`; `None` when unreachable.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for u in self.neighbors(v) {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Connected components as sorted node lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for u in self.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Mean local clustering coefficient; nodes of degree < 2 contribute 0.
    pub fn mean_clustering(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let total: f64 = (0..self.len())
            .map(|v| {
                let nb = self.neighbor_slice(v);
                let k = nb.len();
                if k < 2 {
                    return 0.0;
                }
                let mut links = 0usize;
                for (i, &a) in nb.iter().enumerate() {
                    for &b in &nb[i + 1..] {
                        if self.has_edge(a as usize, b as usize) {
                            links += 1;
                        }
                    }
                }
                2.0 * links as f64 / (k * (k - 1)) as f64
            })
            .sum();
        total / self.len() as f64
    }
}

/// Validated, sorted individuals awaiting their edge set.
struct Skeleton {
    individuals: Vec<Individual>,
    index: HashMap<String, usize>,
    /// Original position → sorted position.
    rank: Vec<usize>,
}

impl Skeleton {
    fn new(individuals: Vec<Individual>) -> Result<Self> {
        for ind in &individuals {
            if ind.person_id.is_empty() {
                return Err(NetworkError::EmptyId);
            }
            if ind.household_id.is_empty() {
                return Err(NetworkError::EmptyHousehold(ind.person_id.clone()));
            }
            if let Some(c) = ind.coordinates {
                if !c.is_valid() {
                    return Err(NetworkError::InvalidCoordinates {
                        id: ind.person_id.clone(),
                        lat: c.lat,
                        lon: c.lon,
                    });
                }
            }
        }
        let mut order: Vec<usize> = (0..individuals.len()).collect();
        order.sort_by(|&a, &b| individuals[a].person_id.cmp(&individuals[b].person_id));
        let mut rank = vec![0; individuals.len()];
        for (sorted, &orig) in order.iter().enumerate() {
            rank[orig] = sorted;
        }
        let mut slots: Vec<Option<Individual>> = individuals.into_iter().map(Some).collect();
        let individuals: Vec<Individual> = order.iter().map(|&o| slots[o].take().expect("each slot taken once")).collect();
        let mut index = HashMap::with_capacity(individuals.len());
        for (i, ind) in individuals.iter().enumerate() {
            if index.insert(ind.person_id.clone(), i).is_some() {
                return Err(NetworkError::DuplicatePerson(ind.person_id.clone()));
            }
        }
        Ok(Skeleton { individuals, index, rank })
    }

    fn lookup(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| NetworkError::DanglingEdge { id: id.to_string(), row: None })
    }

    fn finish(self, village_id: String, mut pairs: Vec<(usize, usize)>) -> VillageNetwork {
        let Skeleton { individuals, index, .. } = self;
        let mut household_ids: Vec<String> = individuals.iter().map(|i| i.household_id.clone()).collect();
        household_ids.sort();
        household_ids.dedup();
        let household_of: Vec<u32> = individuals
            .iter()
            .map(|i| household_ids.binary_search(&i.household_id).expect("household registered") as u32)
            .collect();
        let mut household_members = vec![Vec::new(); household_ids.len()];
        for (node, &h) in household_of.iter().enumerate() {
            household_members[h as usize].push(node as u32);
        }
        for members in &household_members {
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    pairs.push((a as usize, b as usize));
                }
            }
        }

        let n = individuals.len();
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (a, b) in pairs {
            adjacency[a].push(b as u32);
            adjacency[b].push(a as u32);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        VillageNetwork {
            village_id,
            individuals,
            index,
            household_ids,
            household_of,
            household_members,
            offsets,
            targets,
        }
    }
}
