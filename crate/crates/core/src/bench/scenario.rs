//! Scenario specifications and the cell runner.
//!
//! A scenario is the grid `levels x algorithms x seeds`. Each cell samples a
//! `task_count`-task instance with `level` candidates per task, runs one
//! optimizer on it and keeps the run record plus the raw aggregate QoS of the
//! best composition.
//!
//! Spec files are JSON:
//!
//! ```json
//! {
//!   "schema": "qosbench/1",
//!   "name": "scenario1",
//!   "levels": [10, 20, 30, 40, 50],
//!   "task_count": 11,
//!   "algorithms": ["pso", "ga", "gapso", "ca", "sfga"],
//!   "seeds": [0, 1, 2],
//!   "settings": { "population_size": 50, "generations": 1000, "evaluation_budget": 5050 },
//!   "overrides": { "sfga": { "memeplex_count": 10 } },
//!   "source": { "synthetic": { "response_time": [19, 90], "energy": [33, 147], "cost": [28, 106] } },
//!   "shape": "sequence",
//!   "weights": { "response_time": 0.3333333333333333, "energy": 0.3333333333333333, "cost": 0.3333333333333333 }
//! }
//! ```
//!
//! Only `schema`, `name`, `levels`, `algorithms` and `seeds` are required.
//! A `csv` source takes `path`, `columns` (`response_time`, `energy`, `cost`
//! and optional `id`, each a 0-based index or a header name) and
//! `has_header`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::io::{
    generate_synthetic_pool, load_service_pool_csv, sample_instance, ColumnMap, InvalidSpec, PoolError,
    SampleError, ServicePool, SyntheticSpec, WorkflowShape,
};
use crate::qos::{aggregate_qos, QosError, QosTriple, Weights};
use crate::record::{Algorithm, RunRecord};
use crate::search::SearchError;
use crate::sfga::MemeplexAssignment;
use crate::solver::{solve, SolverConfig};

pub const SCENARIO_SCHEMA: &str = "qosbench/1";

/// Default task count: one task per row of the reference quality matrix.
pub const DEFAULT_TASK_COUNT: usize = 11;

/// Settings shared by every algorithm of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSettings {
    pub population_size: usize,
    /// Generation cap. With a budget set this is only an upper bound.
    pub generations: usize,
    pub memeplex_count: usize,
    pub mutation_fraction: f64,
    /// Evaluations granted to each run.
    pub evaluation_budget: Option<u64>,
}

impl Default for ScenarioSettings {
    fn default() -> Self {
        let c = SolverConfig::default();
        Self {
            population_size: c.population_size,
            generations: c.generations,
            memeplex_count: c.memeplex_count,
            mutation_fraction: c.mutation_fraction,
            evaluation_budget: None,
        }
    }
}

/// Per-algorithm replacements for the shared settings and knobs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmOverrides {
    pub population_size: Option<usize>,
    pub generations: Option<usize>,
    pub evaluation_budget: Option<u64>,
    pub memeplex_count: Option<usize>,
    pub mutation_fraction: Option<f64>,
    pub stall_limit: Option<usize>,
    pub random_assignment: Option<bool>,
    pub crossover_rate: Option<f64>,
    pub mutation_rate: Option<f64>,
    pub tournament_size: Option<usize>,
    pub inertia: Option<f64>,
    pub cognitive: Option<f64>,
    pub social: Option<f64>,
    pub acceptance_fraction: Option<f64>,
    pub situational_bias: Option<f64>,
    pub exploration_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvColumns {
    pub response_time: String,
    pub energy: String,
    pub cost: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
}

impl CsvColumns {
    pub fn to_map(&self) -> ColumnMap {
        let col = |s: &String| s.parse().expect("column refs always parse");
        ColumnMap {
            response_time: col(&self.response_time),
            energy: col(&self.energy),
            cost: col(&self.cost),
            id: self.id.as_ref().map(col),
        }
    }
}

/// Where cell instances draw their services from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSource {
    /// A fresh uniform pool of `task_count * level` services per cell.
    Synthetic { response_time: (f64, f64), energy: (f64, f64), cost: (f64, f64) },
    /// One pool loaded from a CSV file and shared by all cells.
    Csv { path: PathBuf, columns: CsvColumns, has_header: bool },
}

impl Default for InstanceSource {
    fn default() -> Self {
        let s = SyntheticSpec::default();
        InstanceSource::Synthetic { response_time: s.response_time, energy: s.energy, cost: s.cost }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsDoc {
    response_time: f64,
    energy: f64,
    cost: f64,
}

mod weights_serde {
    use super::*;

    pub fn serialize<S: serde::Serializer>(w: &Weights, s: S) -> Result<S::Ok, S::Error> {
        WeightsDoc { response_time: w.response_time, energy: w.energy, cost: w.cost }.serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Weights, D::Error> {
        let w = WeightsDoc::deserialize(d)?;
        Ok(Weights::new(w.response_time, w.energy, w.cost))
    }
}

fn default_task_count() -> usize {
    DEFAULT_TASK_COUNT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    /// Candidates per task.
    pub levels: Vec<usize>,
    #[serde(default = "default_task_count")]
    pub task_count: usize,
    pub algorithms: Vec<Algorithm>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub settings: ScenarioSettings,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<Algorithm, AlgorithmOverrides>,
    #[serde(default)]
    pub source: InstanceSource,
    #[serde(default)]
    pub shape: WorkflowShape,
    #[serde(default, with = "weights_serde")]
    pub weights: Weights,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    InvalidSpec(String),
    #[error("scenario parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unsupported schema `{found}`, expected `{expected}`")]
    SchemaVersionMismatch { found: String, expected: &'static str },
    #[error("loading service pool: {0}")]
    Pool(#[from] PoolError),
    #[error("cell (level {level}, {algorithm}, seed {seed}): {failure}")]
    Cell { level: usize, algorithm: Algorithm, seed: u64, failure: CellFailure },
}

impl From<serde_json::Error> for ScenarioError {
    fn from(e: serde_json::Error) -> Self {
        ScenarioError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CellFailure {
    #[error(transparent)]
    Synthetic(#[from] InvalidSpec),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Qos(#[from] QosError),
}

/// One finished cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRecord {
    pub level: usize,
    pub record: RunRecord,
    /// Raw (T, E, C) of the best composition.
    pub aggregate: QosTriple,
}

impl ScenarioSpec {
    fn builtin(name: &str, levels: Vec<usize>) -> Self {
        ScenarioSpec {
            name: name.to_owned(),
            levels,
            task_count: DEFAULT_TASK_COUNT,
            algorithms: Algorithm::COMPARED.to_vec(),
            seeds: (0..30).collect(),
            settings: ScenarioSettings {
                generations: 1000,
                // Initial population plus 100 full generations of 50.
                evaluation_budget: Some(5050),
                ..ScenarioSettings::default()
            },
            overrides: BTreeMap::new(),
            source: InstanceSource::default(),
            shape: WorkflowShape::Sequence,
            weights: Weights::default(),
        }
    }

    /// Small candidate pools: 10 to 50 services per task.
    pub fn scenario1() -> Self {
        Self::builtin("scenario1", vec![10, 20, 30, 40, 50])
    }

    /// Large candidate pools: 100 to 400 services per task.
    pub fn scenario2() -> Self {
        Self::builtin("scenario2", vec![100, 200, 300, 400])
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "scenario1" => Some(Self::scenario1()),
            "scenario2" => Some(Self::scenario2()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::InvalidSpec(m));
        if self.levels.is_empty() || self.levels.contains(&0) {
            return bad("levels must be a non-empty list of positive integers".into());
        }
        if self.task_count == 0 {
            return bad("task_count must be positive".into());
        }
        if self.algorithms.is_empty() {
            return bad("at least one algorithm is required".into());
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if let Some(a) = self.overrides.keys().find(|a| !self.algorithms.contains(a)) {
            return bad(format!("override for `{a}`, which the scenario does not run"));
        }
        if let InstanceSource::Synthetic { response_time, energy, cost } = &self.source {
            let spec = SyntheticSpec { response_time: *response_time, energy: *energy, cost: *cost, size: 1, seed: 0 };
            spec.validate().map_err(|e| ScenarioError::InvalidSpec(e.0))?;
        }
        Ok(())
    }

    /// Solver settings for `algorithm`, before the seed is applied.
    pub fn solver_config(&self, algorithm: Algorithm) -> SolverConfig {
        let s = &self.settings;
        let mut c = SolverConfig {
            population_size: s.population_size,
            generations: s.generations,
            memeplex_count: s.memeplex_count,
            mutation_fraction: s.mutation_fraction,
            max_evaluations: s.evaluation_budget,
            ..SolverConfig::default()
        };
        let Some(o) = self.overrides.get(&algorithm) else {
            return c;
        };
        fn set<T: Copy>(dst: &mut T, v: Option<T>) {
            if let Some(v) = v {
                *dst = v;
            }
        }
        set(&mut c.population_size, o.population_size);
        set(&mut c.generations, o.generations);
        if o.evaluation_budget.is_some() {
            c.max_evaluations = o.evaluation_budget;
        }
        set(&mut c.memeplex_count, o.memeplex_count);
        set(&mut c.mutation_fraction, o.mutation_fraction);
        if o.stall_limit.is_some() {
            c.stall_limit = o.stall_limit;
        }
        if let Some(r) = o.random_assignment {
            c.assignment = if r { MemeplexAssignment::Random } else { MemeplexAssignment::RoundRobin };
        }
        set(&mut c.ga.crossover_rate, o.crossover_rate);
        set(&mut c.ga.mutation_rate, o.mutation_rate);
        set(&mut c.ga.tournament_size, o.tournament_size);
        set(&mut c.pso.inertia, o.inertia);
        set(&mut c.pso.cognitive, o.cognitive);
        set(&mut c.pso.social, o.social);
        set(&mut c.ca.acceptance_fraction, o.acceptance_fraction);
        set(&mut c.ca.situational_bias, o.situational_bias);
        set(&mut c.ca.exploration_rate, o.exploration_rate);
        c
    }

    /// Resolves a relative CSV pool path against `dir`.
    pub fn resolve_paths(&mut self, dir: &Path) {
        if let InstanceSource::Csv { path, .. } = &mut self.source {
            if path.is_relative() {
                *path = dir.join(&*path);
            }
        }
    }

    /// Number of cells, i.e. records produced by [`run_scenario`].
    pub fn cell_count(&self) -> usize {
        self.levels.len() * self.algorithms.len() * self.seeds.len()
    }

    pub fn instance_id(&self, level: usize, seed: u64) -> String {
        format!("{}-n{level}-s{seed}", self.name)
    }
}

#[derive(Serialize)]
struct SpecOut<'a> {
    schema: &'static str,
    #[serde(flatten)]
    spec: &'a ScenarioSpec,
}

pub fn write_scenario(spec: &ScenarioSpec) -> String {
    let mut s = serde_json::to_string_pretty(&SpecOut { schema: SCENARIO_SCHEMA, spec })
        .expect("scenario specs always serialize");
    s.push('\n');
    s
}

/// Parses and validates a `qosbench/1` document.
pub fn read_scenario(text: &str) -> Result<ScenarioSpec, ScenarioError> {
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    let schema = value
        .as_object_mut()
        .and_then(|o| o.remove("schema"))
        .ok_or_else(|| ScenarioError::InvalidSpec("missing `schema` field".into()))?;
    let found = schema.as_str().unwrap_or_default();
    if found != SCENARIO_SCHEMA {
        return Err(ScenarioError::SchemaVersionMismatch { found: schema.to_string(), expected: SCENARIO_SCHEMA });
    }
    let spec: ScenarioSpec = serde_json::from_value(value)?;
    spec.validate()?;
    Ok(spec)
}

/// SplitMix64 finalizer; decorrelates derived seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the instance-building stream `stream` of cell `(level, seed)`.
fn instance_seed(level: usize, seed: u64, stream: u64) -> u64 {
    mix(mix(mix(seed) ^ level as u64) ^ stream)
}

fn run_cell(
    spec: &ScenarioSpec,
    shared_pool: Option<&ServicePool>,
    level: usize,
    algorithm: Algorithm,
    seed: u64,
) -> Result<ScenarioRecord, CellFailure> {
    let owned;
    let pool = match (shared_pool, &spec.source) {
        (Some(p), _) => p,
        (None, InstanceSource::Synthetic { response_time, energy, cost }) => {
            owned = generate_synthetic_pool(&SyntheticSpec {
                response_time: *response_time,
                energy: *energy,
                cost: *cost,
                size: spec.task_count * level,
                seed: instance_seed(level, seed, 0),
            })?;
            &owned
        }
        (None, InstanceSource::Csv { .. }) => unreachable!("CSV pools are loaded up front"),
    };
    let problem =
        sample_instance(pool, spec.task_count, level, spec.shape, spec.weights, instance_seed(level, seed, 1))?;
    let mut record = solve(&problem, algorithm, &spec.solver_config(algorithm).with_seed(seed))?;
    record.instance = spec.instance_id(level, seed);
    let aggregate = aggregate_qos(&problem.workflow, &problem, &record.best())?;
    Ok(ScenarioRecord { level, record, aggregate })
}

/// Runs every cell of `spec`. Records come back ordered by level, then
/// algorithm (in spec order), then seed (in spec order), whatever `exec` is.
///
/// A cell's instance depends only on its level and seed, so all algorithms
/// of a column see the same instance.
pub fn run_scenario(spec: &ScenarioSpec, exec: Execution) -> Result<Vec<ScenarioRecord>, ScenarioError> {
    spec.validate()?;
    let pool = match &spec.source {
        InstanceSource::Csv { path, columns, has_header } => {
            Some(load_service_pool_csv(path, &columns.to_map(), *has_header)?)
        }
        InstanceSource::Synthetic { .. } => None,
    };
    let cells: Vec<(usize, Algorithm, u64)> = spec
        .levels
        .iter()
        .flat_map(|&l| spec.algorithms.iter().flat_map(move |&a| spec.seeds.iter().map(move |&s| (l, a, s))))
        .collect();
    exec.map(&cells, |&(level, algorithm, seed)| {
        run_cell(spec, pool.as_ref(), level, algorithm, seed)
            .map_err(|failure| ScenarioError::Cell { level, algorithm, seed, failure })
    })
    .into_iter()
    .collect()
}
