use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use seedpair_core::diffusion::mean_information_rate;
use seedpair_core::evaluation::{ensemble_report, Treatment};
use seedpair_core::learning::{min_informed_connections, seeks_information, unanimous_posterior, value_of_information, InformationValue};
use seedpair_core::network::{centrality, load_village, load_villages, synth_ensemble, write_edges, write_individuals, SynthParams};
use seedpair_core::seeding::{evaluate_strategies, model_network, optimal_pair, Eligibility, Model, StrategyEvaluation, StrategyRow};
use seedpair_core::{DiffusionConfig, LearningParams, PairScore, RateSummary, SampleDesign, SeedPair, StrategyId, VillageNetwork};
use serde::Serialize;
use serde_json::json;

use crate::config::{KeyValues, RunConfig};
use crate::error::CliError;
use crate::report::{emit, num, write_csv};
use crate::{Command, DataArgs, OutArgs, SimArgs};

const EMPTY_EDGES: &str = "village_id,person_a,person_b\n";

pub fn dispatch(command: Command) -> Result<(), CliError> {
    let out = match &command {
        Command::SelectSeeds { out, .. }
        | Command::Simulate { out, .. }
        | Command::Strategies { out, .. }
        | Command::Learning { out, .. }
        | Command::GeoAdjacency { out, .. }
        | Command::Centrality { out, .. }
        | Command::Report { out, .. }
        | Command::Gen { out, .. } => out.clone(),
    };
    let kv = KeyValues::load(out.config.as_deref())?;
    let workers = kv.pick(out.workers, "workers")?.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| run(command, &kv, &out))
}

fn run(command: Command, kv: &KeyValues, out: &OutArgs) -> Result<(), CliError> {
    match command {
        Command::SelectSeeds { data, sim, model, top_k, .. } => select_seeds(kv, out, &data, &sim, model, top_k),
        Command::Simulate { data, sim, model, seeds, .. } => simulate(kv, out, &data, &sim, model, seeds),
        Command::Strategies { data, sim, strategy, initial, trials, .. } => {
            strategies(kv, out, &data, &sim, strategy, initial, trials)
        }
        Command::Learning { alpha, pi_hi, pi_lo, cost, eta, contacts, .. } => {
            learning(kv, out, [alpha, pi_hi, pi_lo, cost, eta], contacts)
        }
        Command::GeoAdjacency { data, radius, .. } => geo(kv, out, &data, radius),
        Command::Centrality { data, .. } => centrality_cmd(kv, out, &data),
        Command::Report { data, sim, treatments, random_pairs, pairs, sample_size, strict_sample, .. } => {
            report(kv, out, &data, &sim, treatments, random_pairs, pairs, sample_size, strict_sample)
        }
        Command::Gen { villages, households, household_size, clustering, links, locality, seed, out_dir, .. } => {
            let d = SynthParams::default();
            let params = SynthParams {
                n_households: kv.pick(households, "households")?.unwrap_or(d.n_households),
                mean_household_size: kv.pick(household_size, "household-size")?.unwrap_or(d.mean_household_size),
                clustering: kv.pick(clustering, "clustering")?.unwrap_or(d.clustering),
                links_per_person: kv.pick(links, "links")?.unwrap_or(d.links_per_person),
                locality: kv.pick(locality, "locality")?.unwrap_or(d.locality),
            };
            let count = kv.pick(villages, "villages")?.unwrap_or(1);
            let seed = kv.pick(seed, "seed")?.unwrap_or(0);
            gen(kv, out, params, count, seed, &out_dir)
        }
    }
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))
}

struct Inputs {
    individuals: PathBuf,
    edges: Option<PathBuf>,
    village: Option<String>,
}

fn inputs(kv: &KeyValues, data: &DataArgs, need_edges: bool) -> Result<Inputs, CliError> {
    let individuals = kv
        .pick(data.individuals.clone(), "individuals")?
        .ok_or_else(|| CliError::Usage("--individuals is required".into()))?;
    let edges = kv.pick(data.edges.clone(), "edges")?;
    if need_edges && edges.is_none() {
        return Err(CliError::Usage("--edges is required".into()));
    }
    let village = kv.pick(data.village.clone(), "village")?;
    Ok(Inputs { individuals, edges, village })
}

impl Inputs {
    fn one(&self) -> Result<VillageNetwork, CliError> {
        let people = open(&self.individuals)?;
        let net = match &self.edges {
            Some(e) => load_village(people, open(e)?, self.village.as_deref()),
            None => load_village(people, EMPTY_EDGES.as_bytes(), self.village.as_deref()),
        }?;
        Ok(net)
    }

    fn all(&self) -> Result<Vec<VillageNetwork>, CliError> {
        if self.village.is_some() {
            return Ok(vec![self.one()?]);
        }
        let edges = self.edges.as_ref().expect("checked by inputs()");
        Ok(load_villages(open(&self.individuals)?, open(edges)?)?)
    }

    fn record(&self, config: &mut RunConfig) {
        config.individuals = Some(self.individuals.clone());
        config.edges = self.edges.clone();
        config.village = self.village.clone();
    }
}

fn diffusion(kv: &KeyValues, sim: &SimArgs, default_lambda: f64) -> Result<DiffusionConfig, CliError> {
    let base = DiffusionConfig::default();
    let mut cfg = DiffusionConfig {
        lambda_mean: kv.pick(sim.lambda, "lambda")?.unwrap_or(default_lambda),
        threshold_sd: kv.pick(sim.sd, "sd")?.unwrap_or(base.threshold_sd),
        periods: kv.pick(sim.periods, "periods")?.unwrap_or(base.periods),
        replications: kv.pick(sim.replications, "replications")?.unwrap_or(base.replications),
        master_seed: kv.pick(sim.seed, "seed")?.unwrap_or(base.master_seed),
        objective_period: kv.pick(sim.objective_period, "objective-period")?,
    };
    if kv.pick(sim.deterministic.then_some(true), "deterministic")?.unwrap_or(false) {
        cfg = cfg.deterministic();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn base_config(out: &OutArgs) -> RunConfig {
    RunConfig {
        out: out.out.clone(),
        csv: out.csv.clone(),
        ..Default::default()
    }
}

#[derive(Serialize)]
struct SelectResult<'a> {
    village_id: &'a str,
    model: Model,
    individuals: usize,
    households: usize,
    eligible_pairs: usize,
    best: &'a PairScore,
    ranked: &'a [PairScore],
}

fn select_seeds(
    kv: &KeyValues,
    out: &OutArgs,
    data: &DataArgs,
    sim: &SimArgs,
    model: Option<Model>,
    top_k: Option<usize>,
) -> Result<(), CliError> {
    let inputs = inputs(kv, data, true)?;
    let model = kv.pick(model, "model")?.unwrap_or(Model::Complex);
    let cfg = diffusion(kv, sim, model.lambda())?;
    let top_k = kv.pick(top_k, "top-k")?.unwrap_or(20);
    kv.finish()?;

    let net = inputs.one()?;
    let graph = model_network(&net, model)?;
    let search = optimal_pair(&graph, &cfg, &Eligibility::default())?;
    let ranked = &search.ranked[..top_k.min(search.ranked.len())];

    let mut config = base_config(out);
    inputs.record(&mut config);
    config.model = Some(model);
    config.diffusion = Some(cfg);
    config.top_k = Some(top_k);
    let result = SelectResult {
        village_id: net.village_id(),
        model,
        individuals: net.len(),
        households: net.household_count(),
        eligible_pairs: search.ranked.len(),
        best: search.best_score(),
        ranked,
    };
    if let Some(path) = &out.csv {
        write_csv(
            path,
            &["rank", "first", "second", "mean_rate", "std_error"],
            ranked.iter().enumerate().map(|(i, s)| {
                vec![(i + 1).to_string(), s.pair.first.clone(), s.pair.second.clone(), num(s.mean_rate), num(s.std_error)]
            }),
        )?;
    }
    emit("select-seeds", &config, &result, out.out.as_deref())
}

#[derive(Serialize)]
struct SimulateResult<'a> {
    village_id: &'a str,
    model: Model,
    seeds: &'a [String],
    summary: &'a RateSummary,
}

fn simulate(
    kv: &KeyValues,
    out: &OutArgs,
    data: &DataArgs,
    sim: &SimArgs,
    model: Option<Model>,
    seeds: Vec<String>,
) -> Result<(), CliError> {
    let inputs = inputs(kv, data, true)?;
    let model = kv.pick(model, "model")?.unwrap_or(Model::Complex);
    let cfg = diffusion(kv, sim, model.lambda())?;
    kv.finish()?;

    let net = inputs.one()?;
    let graph = model_network(&net, model)?;
    let summary = mean_information_rate(&graph, &seeds, &cfg)?;

    let mut config = base_config(out);
    inputs.record(&mut config);
    config.model = Some(model);
    config.diffusion = Some(cfg);
    config.extra.insert("seeds".into(), json!(seeds));
    if let Some(path) = &out.csv {
        write_csv(
            path,
            &["period", "mean_rate", "std_error"],
            (0..summary.mean_by_period.len()).map(|t| {
                let (m, s) = summary.at(t);
                vec![t.to_string(), num(m), num(s)]
            }),
        )?;
    }
    let result = SimulateResult {
        village_id: net.village_id(),
        model,
        seeds: &seeds,
        summary: &summary,
    };
    emit("simulate", &config, &result, out.out.as_deref())
}

fn strategies(
    kv: &KeyValues,
    out: &OutArgs,
    data: &DataArgs,
    sim: &SimArgs,
    strategy: Vec<StrategyId>,
    initial: Vec<usize>,
    trials: Option<usize>,
) -> Result<(), CliError> {
    let inputs = inputs(kv, data, true)?;
    let cfg = diffusion(kv, sim, 2.0)?;
    let strategy = if strategy.is_empty() {
        list(kv, "strategy")?.unwrap_or_else(|| StrategyId::ALL.to_vec())
    } else {
        strategy
    };
    let initial = if initial.is_empty() {
        list(kv, "initial")?.unwrap_or_else(|| vec![2, 4, 6, 8, 10])
    } else {
        initial
    };
    let trials = kv.pick(trials, "trials")?.unwrap_or(50);
    kv.finish()?;
    if trials == 0 {
        return Err(CliError::Config("trials must be at least 1".into()));
    }

    let villages = inputs.all()?;
    let eval: StrategyEvaluation = evaluate_strategies(&villages, &cfg, &strategy, &initial, trials)?;
    if eval.cells.iter().filter(|c| c.row != StrategyRow::Optimal).all(|c| c.observations == 0) {
        return Err(CliError::Infeasible(
            "no strategy draw was feasible: too few individuals with at least two connections".into(),
        ));
    }

    let mut config = base_config(out);
    inputs.record(&mut config);
    config.model = Some(Model::Complex);
    config.diffusion = Some(cfg.with_lambda(2.0));
    config.extra.insert("strategies".into(), json!(strategy));
    config.extra.insert("initial".into(), json!(initial));
    config.extra.insert("trials".into(), json!(trials));
    if let Some(path) = &out.csv {
        write_csv(
            path,
            &["row", "n_initial", "ratio", "ci_low", "ci_high", "observations", "infeasible", "mean_total_interviews"],
            eval.cells.iter().map(|c| {
                let row = match c.row {
                    StrategyRow::Optimal => "optimal".to_string(),
                    StrategyRow::Strategy(s) => s.to_string(),
                };
                vec![
                    row,
                    c.n_initial.to_string(),
                    num(c.ratio),
                    num(c.ci_low),
                    num(c.ci_high),
                    c.observations.to_string(),
                    c.infeasible.to_string(),
                    num(c.mean_total_interviews),
                ]
            }),
        )?;
    }
    emit("strategies", &config, &eval, out.out.as_deref())
}

/// Comma-separated list from the config file.
fn list<T: std::str::FromStr>(kv: &KeyValues, key: &str) -> Result<Option<Vec<T>>, CliError>
where
    T::Err: std::fmt::Display,
{
    let Some(raw) = kv.pick::<String>(None, key)? else {
        return Ok(None);
    };
    raw.split(',')
        .map(|s| s.trim().parse().map_err(|e| CliError::Config(format!("config key `{key}`: {e}"))))
        .collect::<Result<Vec<T>, _>>()
        .map(Some)
}

#[derive(Serialize)]
struct LearningResult {
    params: LearningParams,
    ratio: f64,
    min_informed_connections: Option<u64>,
    contacts: u32,
    seeks_information: bool,
    unanimous_posterior: f64,
    value_of_information: InformationValue,
}

fn learning(kv: &KeyValues, out: &OutArgs, values: [Option<f64>; 5], contacts: Option<u32>) -> Result<(), CliError> {
    let [alpha, pi_hi, pi_lo, cost, eta] = values;
    let alpha = kv
        .pick(alpha, "alpha")?
        .ok_or_else(|| CliError::Usage("--alpha is required".into()))?;
    let pi_hi = kv.pick(pi_hi, "pi-hi")?.unwrap_or(1.0);
    let pi_lo = kv.pick(pi_lo, "pi-lo")?.unwrap_or(0.0);
    let cost = kv
        .pick(cost, "cost")?
        .ok_or_else(|| CliError::Usage("--cost is required".into()))?;
    let eta = kv.pick(eta, "eta")?.unwrap_or(0.0);
    let contacts = kv.pick(contacts, "contacts")?.unwrap_or(1);
    kv.finish()?;

    let params = LearningParams::new(alpha, pi_hi, pi_lo, cost, eta)?;
    let result = LearningResult {
        params,
        ratio: params.ratio(),
        min_informed_connections: min_informed_connections(&params),
        contacts,
        seeks_information: seeks_information(&params, contacts),
        unanimous_posterior: unanimous_posterior(alpha, contacts as u64),
        value_of_information: value_of_information(&params, contacts),
    };
    let mut config = base_config(out);
    config.extra.insert("learning".into(), json!(params));
    config.extra.insert("contacts".into(), json!(contacts));
    emit("learning", &config, &result, out.out.as_deref())
}

#[derive(Serialize)]
struct NetworkSummary<'a> {
    village_id: &'a str,
    individuals: usize,
    households: usize,
    edges: usize,
    components: usize,
    largest_component: usize,
    mean_degree: f64,
    mean_clustering: f64,
}

fn summarize(net: &VillageNetwork) -> NetworkSummary<'_> {
    let comps = net.components();
    NetworkSummary {
        village_id: net.village_id(),
        individuals: net.len(),
        households: net.household_count(),
        edges: net.edge_count(),
        components: comps.len(),
        largest_component: comps.iter().map(Vec::len).max().unwrap_or(0),
        mean_degree: if net.is_empty() { 0.0 } else { 2.0 * net.edge_count() as f64 / net.len() as f64 },
        mean_clustering: net.mean_clustering(),
    }
}

fn geo(kv: &KeyValues, out: &OutArgs, data: &DataArgs, radius: Option<f64>) -> Result<(), CliError> {
    let inputs = inputs(kv, data, false)?;
    let radius = kv.pick(radius, "radius")?.unwrap_or(seedpair_core::network::DEFAULT_GEO_RADIUS_MILES);
    kv.finish()?;
    let net = inputs.one()?;
    let graph = net.geo_network(radius)?;
    if let Some(path) = &out.csv {
        let file = File::create(path).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
        write_edges(file, std::slice::from_ref(&graph))?;
    }
    let mut config = base_config(out);
    inputs.record(&mut config);
    config.extra.insert("radius_miles".into(), json!(radius));
    emit("geo-adjacency", &config, &summarize(&graph), out.out.as_deref())
}

#[derive(Serialize)]
struct CentralityRow<'a> {
    person_id: &'a str,
    household_id: &'a str,
    degree: usize,
    betweenness: f64,
    eigenvector: f64,
}

#[derive(Serialize)]
struct CentralityResult<'a> {
    network: NetworkSummary<'a>,
    eigenvector_converged: bool,
    individuals: Vec<CentralityRow<'a>>,
}

fn centrality_cmd(kv: &KeyValues, out: &OutArgs, data: &DataArgs) -> Result<(), CliError> {
    let inputs = inputs(kv, data, true)?;
    kv.finish()?;
    let net = inputs.one()?;
    let c = centrality(&net);
    let rows: Vec<CentralityRow> = (0..net.len())
        .map(|v| CentralityRow {
            person_id: net.person_id(v),
            household_id: &net.individual(v).household_id,
            degree: c.degree[v],
            betweenness: c.betweenness[v],
            eigenvector: c.eigenvector[v],
        })
        .collect();
    if let Some(path) = &out.csv {
        write_csv(
            path,
            &["person_id", "household_id", "degree", "betweenness", "eigenvector"],
            rows.iter().map(|r| {
                vec![r.person_id.to_string(), r.household_id.to_string(), r.degree.to_string(), num(r.betweenness), num(r.eigenvector)]
            }),
        )?;
    }
    let mut config = base_config(out);
    inputs.record(&mut config);
    let result = CentralityResult {
        network: summarize(&net),
        eigenvector_converged: c.eigen_converged,
        individuals: rows,
    };
    emit("centrality", &config, &result, out.out.as_deref())
}

#[derive(serde::Deserialize)]
struct PairRecord {
    village_id: String,
    first: String,
    second: String,
}

fn read_pairs(path: &Path) -> Result<BTreeMap<String, SeedPair>, CliError> {
    let mut map = BTreeMap::new();
    let mut reader = csv::Reader::from_reader(open(path)?);
    for (i, rec) in reader.deserialize::<PairRecord>().enumerate() {
        let rec = rec.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let pair = SeedPair::new(rec.first, rec.second).map_err(|e| CliError::Data(format!("{} row {}: {e}", path.display(), i + 2)))?;
        if map.insert(rec.village_id.clone(), pair).is_some() {
            return Err(CliError::Data(format!("{}: duplicate village `{}`", path.display(), rec.village_id)));
        }
    }
    Ok(map)
}

#[allow(clippy::too_many_arguments)]
fn report(
    kv: &KeyValues,
    out: &OutArgs,
    data: &DataArgs,
    sim: &SimArgs,
    treatments: Vec<String>,
    random_pairs: Option<usize>,
    pairs: Option<PathBuf>,
    sample_size: Option<usize>,
    strict_sample: bool,
) -> Result<(), CliError> {
    let inputs = inputs(kv, data, true)?;
    let cfg = diffusion(kv, sim, 2.0)?;
    let names = if treatments.is_empty() {
        list(kv, "treatments")?.unwrap_or_else(|| vec!["simple".to_string(), "complex".to_string(), "random".to_string()])
    } else {
        treatments
    };
    let random_pairs = kv.pick(random_pairs, "random-pairs")?.unwrap_or(20);
    let pairs = kv.pick(pairs, "pairs")?;
    let design = SampleDesign {
        sample_size: kv.pick(sample_size, "sample-size")?.unwrap_or(30),
        include_all_if_smaller: !kv.pick(strict_sample.then_some(true), "strict-sample")?.unwrap_or(false),
    };
    kv.finish()?;
    design.validate()?;

    let mut list = Vec::new();
    for name in &names {
        list.push(match name.as_str() {
            "random" => {
                if random_pairs == 0 {
                    return Err(CliError::Config("random-pairs must be at least 1".into()));
                }
                Treatment::RandomPairs { pairs_per_village: random_pairs }
            }
            "user" => {
                let path = pairs.as_ref().ok_or_else(|| CliError::Usage("the user treatment needs --pairs".into()))?;
                Treatment::UserPairs(read_pairs(path)?)
            }
            other => Treatment::Model(other.parse().map_err(CliError::Usage)?),
        });
    }
    let villages = inputs.all()?;
    let report = ensemble_report(&villages, &list, &cfg, &design)?;

    let mut config = base_config(out);
    inputs.record(&mut config);
    config.diffusion = Some(cfg);
    config.sample = Some(design);
    config.extra.insert("treatments".into(), json!(names));
    config.extra.insert("random_pairs".into(), json!(random_pairs));
    if let Some(p) = &pairs {
        config.extra.insert("pairs".into(), json!(p));
    }
    if let Some(path) = &out.csv {
        write_csv(
            path,
            &["treatment", "lambda", "villages", "any_adoption", "any_low", "any_high", "adoption_rate", "rate_low", "rate_high"],
            report.cells.iter().map(|c| {
                vec![
                    c.treatment.clone(),
                    num(c.lambda),
                    c.villages.to_string(),
                    num(c.any_adoption_share),
                    num(c.any_adoption_ci[0]),
                    num(c.any_adoption_ci[1]),
                    num(c.adoption_rate),
                    num(c.adoption_rate_ci[0]),
                    num(c.adoption_rate_ci[1]),
                ]
            }),
        )?;
    }
    emit("report", &config, &report, out.out.as_deref())
}

fn gen(kv: &KeyValues, out: &OutArgs, params: SynthParams, count: usize, seed: u64, dir: &Path) -> Result<(), CliError> {
    kv.finish()?;
    if count == 0 {
        return Err(CliError::Config("villages must be at least 1".into()));
    }
    let villages = synth_ensemble(count, &params, seed)?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))?;
    let create = |name: &str| {
        let p = dir.join(name);
        File::create(&p).map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display())))
    };
    write_individuals(create("individuals.csv")?, &villages)?;
    write_edges(create("edges.csv")?, &villages)?;

    let mut config = base_config(out);
    config.extra.insert("generator".into(), json!(params));
    config.extra.insert("villages".into(), json!(count));
    config.extra.insert("seed".into(), json!(seed));
    config.extra.insert("out_dir".into(), json!(dir));
    let summaries: Vec<NetworkSummary> = villages.iter().map(summarize).collect();
    emit("gen", &config, &json!({ "villages": summaries }), out.out.as_deref())
}
