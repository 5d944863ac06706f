//! Seed-pair targeting for information diffusion in village networks under
//! the linear threshold model.
//!
//! * [`network`]: village graphs, CSV ingestion, proximity networks,
//!   centrality and a synthetic village generator.
//! * [`learning`]: the signal-learning model behind integer thresholds.
//! * [`diffusion`]: truncated-normal thresholds and the period-by-period
//!   contagion engine with Monte Carlo aggregation.
//! * [`seeding`]: exhaustive optimal-pair search and interview-based
//!   targeting strategies.
//! * [`evaluation`]: sampled village outcomes and treatment comparisons.

pub mod diffusion;
pub mod evaluation;
pub mod learning;
pub mod network;
pub mod rng;
pub mod seeding;

pub use evaluation::{EnsembleReport, EvaluationError, SampleDesign, Treatment, VillageOutcome};
pub use diffusion::{DiffusionConfig, DiffusionError, DiffusionOutcome, RateSummary, ThresholdDraw};
pub use learning::{LearningParams, SignalTally};
pub use network::{CentralityReport, Individual, NetworkError, VillageNetwork};
pub use seeding::{Model, PairScore, SeedPair, SeedingError, StrategyId, StrategyTrace};
