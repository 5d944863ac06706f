use seedpair_core::diffusion::DiffusionError;
use seedpair_core::evaluation::EvaluationError;
use seedpair_core::learning::LearningError;
use seedpair_core::{NetworkError, SeedingError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Infeasible(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Data(_) => "data",
            CliError::Infeasible(_) => "infeasible",
        }
    }

    /// One JSON object on one line.
    pub fn to_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            error: &'a str,
            exit_code: i32,
            message: String,
        }
        serde_json::to_string(&Line {
            error: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string().replace('\n', " "),
        })
        .expect("plain struct")
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        match e {
            NetworkError::InvalidParameter(_) => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<DiffusionError> for CliError {
    fn from(e: DiffusionError) -> Self {
        match e {
            DiffusionError::Config(_) => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<SeedingError> for CliError {
    fn from(e: SeedingError) -> Self {
        match e {
            SeedingError::Diffusion(d) => d.into(),
            SeedingError::Network(n) => n.into(),
            SeedingError::NotEnoughEligible(_) | SeedingError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            SeedingError::InvalidPair(_) | SeedingError::InitialInterviews(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<EvaluationError> for CliError {
    fn from(e: EvaluationError) -> Self {
        match e {
            EvaluationError::Seeding(s) => s.into(),
            EvaluationError::Diffusion(d) => d.into(),
            EvaluationError::SampleSize => CliError::Config(e.to_string()),
            EvaluationError::NoPairs(_) => CliError::Infeasible(e.to_string()),
            EvaluationError::VillageTooSmall { .. } | EvaluationError::MissingPair(_) => CliError::Data(e.to_string()),
        }
    }
}

impl From<LearningError> for CliError {
    fn from(e: LearningError) -> Self {
        CliError::Config(e.to_string())
    }
}
