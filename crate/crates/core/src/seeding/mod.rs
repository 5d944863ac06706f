//! Choosing which two individuals to train.

mod optimal;
mod strategies;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffusion::DiffusionError;
use crate::network::{NetworkError, VillageNetwork};

pub use optimal::{model_network, optimal_pair, select_seeds, Eligibility, PairScorer, PairSearch};
pub use strategies::{evaluate_strategies, evaluate_strategies_with, run_strategy, StrategyCell, StrategyEvaluation, StrategyRow};

#[derive(Debug, Error)]
pub enum SeedingError {
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("need at least 2 eligible individuals forming a pair, found {0}")]
    NotEnoughEligible(usize),
    #[error("strategy {strategy} infeasible: {reason}")]
    Infeasible { strategy: StrategyId, reason: String },
    #[error("invalid seed pair: {0}")]
    InvalidPair(String),
    #[error("initial interview count must be at least 2, got {0}")]
    InitialInterviews(usize),
}

pub type Result<T, E = SeedingError> = std::result::Result<T, E>;

/// Two distinct individuals, stored in ascending id order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SeedPair {
    pub first: String,
    pub second: String,
}

impl SeedPair {
    pub fn new(a: impl Into<String>, b: impl Into<String>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        if a == b {
            return Err(SeedingError::InvalidPair(format!("`{a}` listed twice")));
        }
        let (first, second) = if a < b { (a, b) } else { (b, a) };
        Ok(SeedPair { first, second })
    }

    pub(crate) fn from_nodes(net: &VillageNetwork, a: usize, b: usize) -> Self {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        SeedPair {
            first: net.person_id(a).to_string(),
            second: net.person_id(b).to_string(),
        }
    }

    pub fn nodes(&self, net: &VillageNetwork) -> Result<[usize; 2]> {
        let look = |id: &str| {
            net.node(id)
                .ok_or_else(|| SeedingError::Diffusion(DiffusionError::UnknownSeed(id.to_string())))
        };
        Ok([look(&self.first)?, look(&self.second)?])
    }

    pub fn ids(&self) -> [&str; 2] {
        [&self.first, &self.second]
    }
}

impl fmt::Display for SeedPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.first, self.second)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairScore {
    pub pair: SeedPair,
    /// Mean information rate at the objective period.
    pub mean_rate: f64,
    pub std_error: f64,
    pub per_period_rates: Vec<f64>,
}

/// Which contagion model and network a seed pair is optimised for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Threshold mean 1 on the social network.
    Simple,
    /// Threshold mean 2 on the social network.
    Complex,
    /// Threshold mean 2 on the proximity network.
    Geo,
}

impl Model {
    pub fn lambda(self) -> f64 {
        match self {
            Model::Simple => 1.0,
            Model::Complex | Model::Geo => 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Simple => "simple",
            Model::Complex => "complex",
            Model::Geo => "geo",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "simple" => Ok(Model::Simple),
            "complex" => Ok(Model::Complex),
            "geo" => Ok(Model::Geo),
            other => Err(format!("unknown model `{other}` (expected simple, complex or geo)")),
        }
    }
}

/// Interview-based targeting strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StrategyId {
    /// Two random people from the interview list.
    A,
    /// The two highest-degree people on the list.
    B,
    /// Two random friends of the list's highest-degree person.
    C,
    /// The two highest-degree friends of the list's highest-degree person.
    D,
    /// Friends of friends, reached through two random list members.
    E,
    /// The list's highest-degree person and one random friend.
    F,
}

impl StrategyId {
    pub const ALL: [StrategyId; 6] = [StrategyId::A, StrategyId::B, StrategyId::C, StrategyId::D, StrategyId::E, StrategyId::F];
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for StrategyId {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(StrategyId::A),
            "B" => Ok(StrategyId::B),
            "C" => Ok(StrategyId::C),
            "D" => Ok(StrategyId::D),
            "E" => Ok(StrategyId::E),
            "F" => Ok(StrategyId::F),
            other => Err(format!("unknown strategy `{other}` (expected A-F)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrategyTrace {
    pub strategy: StrategyId,
    pub initial_interviews: usize,
    pub total_interviews: usize,
    pub chosen_pair: SeedPair,
    /// Everyone interviewed, initial list first, in interview order.
    pub interviewed_ids: Vec<String>,
}
