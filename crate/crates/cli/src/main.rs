//! `seedpair`: seed-pair selection, diffusion simulation and reporting for
//! village networks.

mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use seedpair_core::seeding::Model;
use seedpair_core::StrategyId;

use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "seedpair", version, about = "Choose and evaluate seed pairs for diffusion in village networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct DataArgs {
    /// Individuals CSV: person_id,household_id,village_id[,lat,lon]
    #[arg(long)]
    individuals: Option<PathBuf>,
    /// Edges CSV: village_id,person_a,person_b
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Village to use when the input holds several
    #[arg(long)]
    village: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
struct SimArgs {
    /// Threshold mean; defaults to 1 for simple, 2 for complex and geo
    #[arg(long)]
    lambda: Option<f64>,
    /// Threshold standard deviation
    #[arg(long)]
    sd: Option<f64>,
    /// Periods after seeding
    #[arg(long)]
    periods: Option<usize>,
    /// Period whose information rate ranks pairs (default: last)
    #[arg(long)]
    objective_period: Option<usize>,
    /// Monte Carlo replications
    #[arg(long)]
    replications: Option<usize>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed thresholds equal to the mean (sd = 0)
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args, Debug, Clone, Default)]
struct OutArgs {
    /// Key = value config file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// JSON report path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional CSV table
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads (0 = all cores); never changes results
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal seed pair and ranked pair table for one village
    SelectSeeds {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_parser = parse_model)]
        model: Option<Model>,
        /// Rows of the ranked pair table to report
        #[arg(long)]
        top_k: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Per-period information curves from given seeds
    Simulate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_parser = parse_model)]
        model: Option<Model>,
        /// Seed person ids, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Percent-of-optimal table for interview-based strategies
    Strategies {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Strategies A-F, comma separated (default: all)
        #[arg(long, value_delimiter = ',', value_parser = parse_strategy)]
        strategy: Vec<StrategyId>,
        /// Initial interview counts, comma separated
        #[arg(long, value_delimiter = ',')]
        initial: Vec<usize>,
        /// Trials per village and cell
        #[arg(long)]
        trials: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Signal-learning thresholds and value of information
    Learning {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        pi_hi: Option<f64>,
        #[arg(long)]
        pi_lo: Option<f64>,
        #[arg(long)]
        cost: Option<f64>,
        /// Cost per signal
        #[arg(long)]
        eta: Option<f64>,
        /// Informed contacts available
        #[arg(long)]
        contacts: Option<u32>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Proximity network from household coordinates
    GeoAdjacency {
        #[command(flatten)]
        data: DataArgs,
        /// Link radius in miles
        #[arg(long)]
        radius: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Degree, betweenness and eigenvector centrality
    Centrality {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sampled outcomes of seeding treatments across villages
    Report {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// simple, complex, geo, random, user (comma separated)
        #[arg(long, value_delimiter = ',')]
        treatments: Vec<String>,
        /// Random pairs per village for the random treatment
        #[arg(long)]
        random_pairs: Option<usize>,
        /// CSV village_id,first,second for the user treatment
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// Households surveyed per village
        #[arg(long)]
        sample_size: Option<usize>,
        /// Reject villages smaller than the sample instead of surveying all
        #[arg(long)]
        strict_sample: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Synthetic village ensemble
    Gen {
        #[arg(long)]
        villages: Option<usize>,
        /// Households per village
        #[arg(long)]
        households: Option<usize>,
        /// Mean household size
        #[arg(long)]
        household_size: Option<f64>,
        /// Share of tie attempts made by triadic closure
        #[arg(long)]
        clustering: Option<f64>,
        /// Tie attempts per person
        #[arg(long)]
        links: Option<usize>,
        /// Share of fresh ties made to nearby households
        #[arg(long)]
        locality: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for individuals.csv and edges.csv
        #[arg(long, required = true)]
        out_dir: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse::<Model>().map_err(|e| e.to_string())
}

fn parse_strategy(s: &str) -> Result<StrategyId, String> {
    s.parse::<StrategyId>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            eprintln!("{}", CliError::Usage(first).to_line());
            return ExitCode::from(2);
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
