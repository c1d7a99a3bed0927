//! Scenario files, experiment generators, metrics and result exports.
//!
//! A scenario is one JSON document with the sections `agents`, `graph`,
//! `credibility`, `policy` and `run`. Random graphs are stored as generator
//! specs and expanded deterministically on load.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cascade::{self, Trajectory};
use crate::control::{receding_horizon_run, ControlledTrajectory, PolicyParams};
use crate::epistemics::{
    build_credibility_matrix, is_epistemically_fair, Agent, CredibilityMode, PairSettings,
};
use crate::error::{Error, Result};
use crate::network::{build_graph, generate_er_graph, AgentId, AgentSet, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    #[default]
    OpenLoop,
    ClosedLoop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErdosRenyiSpec {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub max_attempts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    Edges(Vec<(usize, usize)>),
    ErdosRenyi(ErdosRenyiSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairOverride {
    pub speaker: usize,
    pub hearer: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairMode {
    pub speaker: usize,
    pub hearer: usize,
    pub mode: CredibilityMode,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CredibilitySpec {
    #[serde(default)]
    pub mode: CredibilityMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pair_modes: Vec<PairMode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<PairOverride>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub mode: RunMode,
    /// Step bound for open-loop runs; defaults to the agent count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_t: Option<usize>,
}

/// On-disk form of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub label: String,
    #[serde(default)]
    pub rng_seed: u64,
    pub agents: Vec<Agent>,
    pub graph: GraphSpec,
    #[serde(default)]
    pub credibility: CredibilitySpec,
    #[serde(default)]
    pub policy: PolicyParams,
    #[serde(default)]
    pub run: RunSpec,
}

/// A validated scenario with its graph and credibility matrix built.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub network: Network,
    pub seeds: AgentSet,
}

impl Scenario {
    pub fn agents(&self) -> &[Agent] {
        &self.file.agents
    }

    pub fn n(&self) -> usize {
        self.file.agents.len()
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.file.agents.iter().map(|a| a.rho0).collect()
    }

    pub fn label(&self) -> &str {
        &self.file.label
    }

    pub fn is_fair(&self) -> bool {
        is_epistemically_fair(self.network.credibility(), self.agents())
    }

    /// Validates `file` and expands its graph and credibility sections.
    pub fn from_file(file: ScenarioFile) -> Result<Self> {
        let agents = &file.agents;
        let n = agents.len();
        if n == 0 {
            return Err(Error::Validation("scenario has no agents".into()));
        }
        for (i, a) in agents.iter().enumerate() {
            if a.id.index() != i {
                return Err(Error::Validation(format!(
                    "agent at position {i} has id {}; ids must be 0..n in order",
                    a.id
                )));
            }
            if !(0.0..=1.0).contains(&a.reliability) {
                return Err(Error::Validation(format!(
                    "agent {i}: reliability {} outside [0, 1]",
                    a.reliability
                )));
            }
            if !(0.0..=1.0).contains(&a.rho0) {
                return Err(Error::Validation(format!(
                    "agent {i}: rho0 {} outside [0, 1]",
                    a.rho0
                )));
            }
            if !(-1.0..=1.0).contains(&a.responsiveness) || (!a.is_seed && a.responsiveness == 0.0)
            {
                return Err(Error::Validation(format!(
                    "agent {i}: responsiveness {} must lie in [-1, 1] and be non-zero for non-seeds",
                    a.responsiveness
                )));
            }
        }
        if !agents.iter().any(|a| a.is_seed) {
            return Err(Error::Validation("scenario has no seed agent".into()));
        }
        file.policy
            .validate()
            .map_err(|e| Error::Validation(format!("policy: {e}")))?;

        let graph = match &file.graph {
            GraphSpec::Edges(edges) => build_graph(n, edges)?,
            GraphSpec::ErdosRenyi(spec) => {
                if spec.n != n {
                    return Err(Error::Validation(format!(
                        "graph generator has n = {} but there are {n} agents",
                        spec.n
                    )));
                }
                generate_er_graph(spec.n, spec.p, spec.seed, spec.max_attempts)?
            }
        };

        let mut pairs = PairSettings::default();
        for pm in &file.credibility.pair_modes {
            pairs
                .modes
                .insert((AgentId(pm.speaker), AgentId(pm.hearer)), pm.mode);
        }
        for o in &file.credibility.overrides {
            pairs
                .overrides
                .insert((AgentId(o.speaker), AgentId(o.hearer)), o.value);
        }
        let matrix = build_credibility_matrix(agents, file.credibility.mode, &pairs)?;
        let network = Network::new(graph, matrix)?;
        let seeds = AgentSet::from_flags(agents.iter().map(|a| a.is_seed).collect());
        Ok(Scenario {
            file,
            network,
            seeds,
        })
    }
}

pub fn parse_scenario(text: &str, origin: &Path) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    Scenario::from_file(file)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_scenario(&text, path)
}

pub fn scenario_to_string(file: &ScenarioFile) -> Result<String> {
    let mut s = serde_json::to_string_pretty(file)?;
    s.push('\n');
    Ok(s)
}

pub fn write_scenario(file: &ScenarioFile, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, scenario_to_string(file)?)?;
    Ok(())
}

/// Knobs for the 20-agent comparative experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparativeOptions {
    pub n: usize,
    pub p: f64,
    pub n_seeds: usize,
    pub rho0: f64,
    pub responsiveness: f64,
    /// Credibility of the discredited side in scenarios 2 and 3.
    pub low: f64,
    /// Credibility of the other side in scenarios 2 and 3.
    pub high: f64,
    pub policy: PolicyParams,
}

impl Default for ComparativeOptions {
    fn default() -> Self {
        ComparativeOptions {
            n: 20,
            p: 0.5,
            n_seeds: 2,
            rho0: 0.8,
            responsiveness: -1.0,
            low: 0.5,
            high: 1.0,
            policy: PolicyParams::default(),
        }
    }
}

/// Salt separating the seed-selection stream from the graph stream.
const SEED_PICK_SALT: u64 = 0x5eed_5e1e_c7ed_0001;

pub fn generate_comparative(scenario_id: u8, rng_seed: u64) -> Result<Scenario> {
    generate_comparative_with(scenario_id, rng_seed, &ComparativeOptions::default())
}

/// Scenario 1: every credibility equals 1 (fair). Scenario 2: seeds speak
/// with credibility `low` and everyone else with `high`. Scenario 3: the
/// reverse. Graph and seeds depend only on `rng_seed`, so the three share them.
pub fn generate_comparative_with(
    scenario_id: u8,
    rng_seed: u64,
    opts: &ComparativeOptions,
) -> Result<Scenario> {
    if !(1..=3).contains(&scenario_id) {
        return Err(Error::Validation(format!(
            "comparative scenario id must be 1, 2 or 3, got {scenario_id}"
        )));
    }
    if opts.n_seeds == 0 || opts.n_seeds > opts.n {
        return Err(Error::Validation(format!(
            "seed count {} must lie in 1..={}",
            opts.n_seeds, opts.n
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed ^ SEED_PICK_SALT);
    let mut is_seed = vec![false; opts.n];
    for i in sample(&mut rng, opts.n, opts.n_seeds) {
        is_seed[i] = true;
    }
    let agents: Vec<Agent> = (0..opts.n)
        .map(|i| {
            Agent::new(i, 1.0, opts.rho0)
                .seed(is_seed[i])
                .responsiveness(opts.responsiveness)
        })
        .collect();

    let speaker_value = |speaker: usize| -> Option<f64> {
        match scenario_id {
            2 => Some(if is_seed[speaker] {
                opts.low
            } else {
                opts.high
            }),
            3 => Some(if is_seed[speaker] {
                opts.high
            } else {
                opts.low
            }),
            _ => None,
        }
    };
    let mut overrides = Vec::new();
    for speaker in 0..opts.n {
        if let Some(value) = speaker_value(speaker) {
            for hearer in (0..opts.n).filter(|&h| h != speaker) {
                overrides.push(PairOverride {
                    speaker,
                    hearer,
                    value,
                });
            }
        }
    }

    let file = ScenarioFile {
        label: format!("comparative-{scenario_id}"),
        rng_seed,
        agents,
        graph: GraphSpec::ErdosRenyi(ErdosRenyiSpec {
            n: opts.n,
            p: opts.p,
            seed: rng_seed,
            max_attempts: 10_000,
        }),
        credibility: CredibilitySpec {
            mode: CredibilityMode::Excess,
            pair_modes: Vec::new(),
            overrides,
        },
        policy: opts.policy,
        run: RunSpec {
            mode: RunMode::ClosedLoop,
            max_t: None,
        },
    };
    Scenario::from_file(file)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Education {
    Low,
    Medium,
    High,
}

impl Education {
    /// Base reliability for each education level.
    pub fn reliability(self) -> f64 {
        match self {
            Education::Low => 0.3,
            Education::Medium => 0.6,
            Education::High => 0.8,
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "low" => Some(Education::Low),
            "medium" => Some(Education::Medium),
            "high" => Some(Education::High),
            _ => None,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Education::Low => "low",
            Education::Medium => "medium",
            Education::High => "high",
        }
    }
}

/// One respondent of the survey-derived agent file.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyRecord {
    pub id: usize,
    pub education: Education,
    pub groups: Vec<String>,
    pub ev_owner: bool,
    pub resistivity: f64,
}

pub const SURVEY_HEADER: [&str; 5] = ["id", "education", "groups", "ev_owner", "resistivity"];

/// Reads an agent file: CSV with header `id,education,groups,ev_owner,resistivity`,
/// groups separated by `;`.
pub fn read_survey(path: impl AsRef<Path>) -> Result<Vec<SurveyRecord>> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    if headers.iter().map(str::trim).ne(SURVEY_HEADER) {
        return Err(Error::BadRecord {
            row: 1,
            message: format!("expected header {}", SURVEY_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        let bad = |message: String| Error::BadRecord { row, message };
        let id: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| bad(format!("invalid id {:?}", &rec[0])))?;
        if id != out.len() {
            return Err(bad(format!(
                "id {id} out of sequence, expected {}",
                out.len()
            )));
        }
        let education = Education::parse(&rec[1])
            .ok_or_else(|| bad(format!("unknown education {:?}", &rec[1])))?;
        let groups = rec[2]
            .split(';')
            .map(str::trim)
            .filter(|g| !g.is_empty())
            .map(String::from)
            .collect();
        let ev_owner = match rec[3].trim() {
            "1" | "true" => true,
            "0" | "false" => false,
            other => return Err(bad(format!("invalid ev_owner {other:?}"))),
        };
        let resistivity: f64 = rec[4]
            .trim()
            .parse()
            .map_err(|_| bad(format!("invalid resistivity {:?}", &rec[4])))?;
        if !(0.0..=1.0).contains(&resistivity) {
            return Err(bad(format!("resistivity {resistivity} outside [0, 1]")));
        }
        out.push(SurveyRecord {
            id,
            education,
            groups,
            ev_owner,
            resistivity,
        });
    }
    Ok(out)
}

pub fn write_survey(records: &[SurveyRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(SURVEY_HEADER)?;
    for r in records {
        w.write_record([
            r.id.to_string(),
            r.education.as_str().to_string(),
            r.groups.join(";"),
            u8::from(r.ev_owner).to_string(),
            format!("{:.2}", r.resistivity),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Synthetic stand-in for the survey population: education levels, minority
/// memberships among `gender`, `income` and `age`, EV ownership and a
/// resistivity quantized to steps of 0.05 in `[0.30, 0.95]`.
pub fn synthesize_survey(n: usize, seed: u64) -> Vec<SurveyRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records: Vec<SurveyRecord> = (0..n)
        .map(|id| {
            let education = match rng.gen_range(0..20) {
                0..=5 => Education::Low,
                6..=14 => Education::Medium,
                _ => Education::High,
            };
            let mut groups = Vec::new();
            for (label, share) in [("gender", 0.5), ("income", 0.3), ("age", 0.25)] {
                if rng.gen_bool(share) {
                    groups.push(label.to_string());
                }
            }
            let ev_owner = rng.gen_bool(0.06);
            let resistivity = f64::from(rng.gen_range(6u8..=19)) * 0.05;
            SurveyRecord {
                id,
                education,
                groups,
                ev_owner,
                resistivity: (resistivity * 100.0).round() / 100.0,
            }
        })
        .collect();
    if n > 0 && !records.iter().any(|r| r.ev_owner) {
        records[0].ev_owner = true;
    }
    records
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataDrivenOptions {
    pub p: f64,
    /// Half-width of the uniform perturbation added to the base reliability.
    pub jitter: f64,
    pub responsiveness: f64,
    pub mode: CredibilityMode,
    pub policy: PolicyParams,
}

impl Default for DataDrivenOptions {
    fn default() -> Self {
        DataDrivenOptions {
            p: 0.1,
            jitter: 0.0,
            responsiveness: -1.0,
            mode: CredibilityMode::Excess,
            policy: PolicyParams::default(),
        }
    }
}

const JITTER_SALT: u64 = 0x0e1e_c7ed_0002;

pub fn generate_data_driven(agent_file: impl AsRef<Path>, rng_seed: u64) -> Result<Scenario> {
    let records = read_survey(agent_file)?;
    scenario_from_survey(&records, rng_seed, &DataDrivenOptions::default())
}

/// Seeds are the EV owners; reliability follows education; credibility
/// follows group memberships.
pub fn scenario_from_survey(
    records: &[SurveyRecord],
    rng_seed: u64,
    opts: &DataDrivenOptions,
) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed ^ JITTER_SALT);
    let agents: Vec<Agent> = records
        .iter()
        .map(|r| {
            let mut reliability = r.education.reliability();
            if opts.jitter > 0.0 {
                reliability =
                    (reliability + rng.gen_range(-opts.jitter..=opts.jitter)).clamp(0.0, 1.0);
            }
            Agent::new(r.id, reliability, r.resistivity)
                .with_groups(r.groups.iter().cloned())
                .seed(r.ev_owner)
                .responsiveness(opts.responsiveness)
        })
        .collect();
    let file = ScenarioFile {
        label: "data-driven".into(),
        rng_seed,
        graph: GraphSpec::ErdosRenyi(ErdosRenyiSpec {
            n: agents.len(),
            p: opts.p,
            seed: rng_seed,
            max_attempts: 10_000,
        }),
        agents,
        credibility: CredibilitySpec {
            mode: opts.mode,
            ..CredibilitySpec::default()
        },
        policy: opts.policy,
        run: RunSpec {
            mode: RunMode::ClosedLoop,
            max_t: None,
        },
    };
    Scenario::from_file(file)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Sum of every applied input over the run.
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C_bar")]
    pub c_bar: f64,
    pub t_star_star: Option<usize>,
    pub scenario_label: String,
    pub rng_seed: u64,
    pub cost_window: String,
}

pub const COST_WINDOW: &str = "all applied inputs, t = 0 until the terminal step";

pub fn compute_metrics(traj: &ControlledTrajectory, n: usize) -> Metrics {
    let c: f64 = traj
        .steps
        .iter()
        .filter(|s| s.applied)
        .map(|s| s.inputs.iter().sum::<f64>())
        .sum();
    Metrics {
        c,
        c_bar: c / n as f64,
        t_star_star: traj.t_star_star,
        scenario_label: String::new(),
        rng_seed: 0,
        cost_window: COST_WINDOW.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenLoopSummary {
    pub s_star_star: Vec<usize>,
    pub t_fixed: usize,
    pub fixed_point: bool,
    pub switching_sets: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct OpenLoopRun {
    pub trajectory: Trajectory,
    /// Influence ratio of every agent at every recorded step.
    pub ratios: Vec<Vec<f64>>,
    pub summary: OpenLoopSummary,
}

#[derive(Debug, Clone)]
pub struct ClosedLoopRun {
    pub trajectory: ControlledTrajectory,
    pub metrics: Metrics,
}

#[derive(Debug, Clone)]
pub enum RunOutput {
    OpenLoop(OpenLoopRun),
    ClosedLoop(ClosedLoopRun),
}

fn ids(set: &AgentSet) -> Vec<usize> {
    set.iter().map(AgentId::index).collect()
}

pub fn run_open_loop(s: &Scenario) -> Result<OpenLoopRun> {
    let max_t = s.file.run.max_t.unwrap_or(s.n());
    let trajectory = cascade::simulate(&s.network, &s.thresholds(), &s.seeds, max_t)?;
    let ratios = trajectory
        .states
        .iter()
        .map(|st| {
            (0..s.n())
                .map(|x| cascade::influence_ratio(&s.network, &st.adopted, AgentId(x)).value)
                .collect()
        })
        .collect();
    let summary = OpenLoopSummary {
        s_star_star: ids(trajectory.s_star_star()),
        t_fixed: trajectory.t_end(),
        fixed_point: trajectory.fixed_point,
        switching_sets: trajectory.switching_sets.iter().map(ids).collect(),
    };
    Ok(OpenLoopRun {
        trajectory,
        ratios,
        summary,
    })
}

pub fn run_closed_loop(s: &Scenario) -> Result<ClosedLoopRun> {
    let trajectory = receding_horizon_run(&s.network, s.agents(), &s.file.policy)?;
    let mut metrics = compute_metrics(&trajectory, s.n());
    metrics.scenario_label = s.file.label.clone();
    metrics.rng_seed = s.file.rng_seed;
    Ok(ClosedLoopRun {
        trajectory,
        metrics,
    })
}

pub fn run_scenario(s: &Scenario) -> Result<RunOutput> {
    match s.file.run.mode {
        RunMode::OpenLoop => run_open_loop(s).map(RunOutput::OpenLoop),
        RunMode::ClosedLoop => run_closed_loop(s).map(RunOutput::ClosedLoop),
    }
}

/// Steady-state analysis of a scenario's open-loop dynamics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub largest_cohesive: Vec<usize>,
    pub predicted_s_star_star: Vec<usize>,
    pub simulated_s_star_star: Vec<usize>,
    pub consistent: bool,
    pub epistemically_fair: bool,
}

pub fn analyze_scenario(s: &Scenario) -> Result<Analysis> {
    let thresholds = s.thresholds();
    let cohesive = cascade::largest_cohesive_subset(&s.network, &thresholds, &s.seeds.complement());
    let predicted = cohesive.complement();
    let simulated = cascade::simulate(&s.network, &thresholds, &s.seeds, s.n())?;
    Ok(Analysis {
        largest_cohesive: ids(&cohesive),
        predicted_s_star_star: ids(&predicted),
        simulated_s_star_star: ids(simulated.s_star_star()),
        consistent: &predicted == simulated.s_star_star(),
        epistemically_fair: s.is_fair(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Csv,
    Json,
}

/// 17 significant digits: enough to read every `f64` back bit-exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(path.to_path_buf())
}

fn json_text<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct OpenStepJson<'a> {
    t: usize,
    adopted: Vec<usize>,
    ratio: &'a [f64],
}

#[derive(Serialize)]
struct ClosedStepJson<'a> {
    t: usize,
    adopted: Vec<usize>,
    rho_u: &'a [f64],
    u: &'a [f64],
    kappa: &'a [f64],
    target: &'a [Option<f64>],
    applied: bool,
}

/// Writes the run's trajectory, metrics or summary, and plot tables into
/// `out_dir`. Returns the written paths in creation order.
pub fn export_results(
    output: &RunOutput,
    out_dir: impl AsRef<Path>,
    formats: &[ExportFormat],
) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    match output {
        RunOutput::OpenLoop(run) => {
            if formats.contains(&ExportFormat::Csv) {
                let mut s = String::from("t,agent,adopted,ratio\n");
                for (st, ratios) in run.trajectory.states.iter().zip(&run.ratios) {
                    for (x, r) in ratios.iter().enumerate() {
                        let a = u8::from(st.adopted.contains(AgentId(x)));
                        s.push_str(&format!("{},{x},{a},{}\n", st.t, fmt_f64(*r)));
                    }
                }
                written.push(write_text(&dir.join("trajectory.csv"), &s)?);
            }
            if formats.contains(&ExportFormat::Json) {
                let steps: Vec<_> = run
                    .trajectory
                    .states
                    .iter()
                    .zip(&run.ratios)
                    .map(|(st, r)| OpenStepJson {
                        t: st.t,
                        adopted: ids(&st.adopted),
                        ratio: r,
                    })
                    .collect();
                written.push(write_text(
                    &dir.join("trajectory.json"),
                    &json_text(&steps)?,
                )?);
            }
            written.push(write_text(
                &dir.join("summary.json"),
                &json_text(&run.summary)?,
            )?);
        }
        RunOutput::ClosedLoop(run) => {
            let tr = &run.trajectory;
            if formats.contains(&ExportFormat::Csv) {
                let mut s = String::from("t,agent,adopted,rho_u,u,kappa,target\n");
                for st in &tr.steps {
                    for x in 0..st.rho_u.len() {
                        let a = u8::from(st.adopted.contains(AgentId(x)));
                        let target = st.targets[x].map(fmt_f64).unwrap_or_default();
                        s.push_str(&format!(
                            "{},{x},{a},{},{},{},{target}\n",
                            st.t,
                            fmt_f64(st.rho_u[x]),
                            fmt_f64(st.inputs[x]),
                            fmt_f64(st.gains[x]),
                        ));
                    }
                }
                written.push(write_text(&dir.join("trajectory.csv"), &s)?);
                written.extend(write_fig_tables(tr, dir)?);
            }
            if formats.contains(&ExportFormat::Json) {
                let steps: Vec<_> = tr
                    .steps
                    .iter()
                    .map(|st| ClosedStepJson {
                        t: st.t,
                        adopted: ids(&st.adopted),
                        rho_u: &st.rho_u,
                        u: &st.inputs,
                        kappa: &st.gains,
                        target: &st.targets,
                        applied: st.applied,
                    })
                    .collect();
                written.push(write_text(
                    &dir.join("trajectory.json"),
                    &json_text(&steps)?,
                )?);
            }
            written.push(write_text(
                &dir.join("metrics.json"),
                &json_text(&run.metrics)?,
            )?);
        }
    }
    Ok(written)
}

/// Plot-ready tables over the non-seed agents: inputs against `1 − ρ̄` at
/// `t = 0`, thresholds against `ρ̄` at `t = 1`, and inputs against the
/// relative epistemic weight `ρ̄` with the initial resistivity alongside.
fn write_fig_tables(tr: &ControlledTrajectory, dir: &Path) -> Result<Vec<PathBuf>> {
    let first = &tr.steps[0];
    let mut inputs = String::from("agent,one_minus_target,u,rho_u\n");
    let mut weight = String::from("agent,relative_epistemic_weight,rho_u,u\n");
    for (x, target) in first.targets.iter().enumerate() {
        if let Some(t) = target {
            inputs.push_str(&format!(
                "{x},{},{},{}\n",
                fmt_f64(1.0 - t),
                fmt_f64(first.inputs[x]),
                fmt_f64(first.rho_u[x])
            ));
            weight.push_str(&format!(
                "{x},{},{},{}\n",
                fmt_f64(*t),
                fmt_f64(first.rho_u[x]),
                fmt_f64(first.inputs[x])
            ));
        }
    }
    let mut thresholds = String::from("agent,target,rho_u\n");
    if let Some(second) = tr.steps.get(1) {
        for (x, target) in second.targets.iter().enumerate() {
            if let Some(t) = target {
                thresholds.push_str(&format!(
                    "{x},{},{}\n",
                    fmt_f64(*t),
                    fmt_f64(second.rho_u[x])
                ));
            }
        }
    }
    Ok(vec![
        write_text(&dir.join("fig_inputs_t0.csv"), &inputs)?,
        write_text(&dir.join("fig_thresholds_t1.csv"), &thresholds)?,
        write_text(&dir.join("fig_inputs_vs_weight.csv"), &weight)?,
    ])
}
