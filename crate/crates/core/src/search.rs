//! Bookkeeping shared by every optimizer: counted evaluations, best-so-far
//! tracking and the final [`RunRecord`].

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::baseline::TooLarge;
use crate::qos::{CompositionProblem, Genome, Objective, ValidationReport};
use crate::record::{Algorithm, RunRecord};

/// Generator family used by every run. One stream per run, seeded from the
/// run's 64-bit seed.
pub type RunRng = ChaCha8Rng;

pub fn run_rng(seed: u64) -> RunRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Problem(#[from] ValidationReport),
    #[error(transparent)]
    TooLarge(#[from] TooLarge),
}

/// A genome with its cached fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedFrog {
    pub genome: Genome,
    pub fitness: f64,
}

/// Counts fitness evaluations and remembers the best genome ever evaluated.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    objective: Objective<'a>,
    pool_sizes: Vec<usize>,
    evaluations: u64,
    best: Option<EvaluatedFrog>,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a CompositionProblem) -> Self {
        Self {
            objective: Objective::new(problem),
            pool_sizes: problem.pool_sizes(),
            evaluations: 0,
            best: None,
        }
    }

    pub fn evaluate(&mut self, genome: Genome) -> EvaluatedFrog {
        debug_assert!(genome.is_valid_for(self.objective.problem));
        let fitness = self.objective.evaluate(genome.genes());
        self.evaluations += 1;
        let frog = EvaluatedFrog { genome, fitness };
        if self.best.as_ref().is_none_or(|b| frog.fitness < b.fitness) {
            self.best = Some(frog.clone());
        }
        frog
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// Whether a budget of `max` evaluations has been spent. Runs check this
    /// between generations, so a run may overshoot by one generation.
    pub fn exhausted(&self, max: Option<u64>) -> bool {
        max.is_some_and(|m| self.evaluations >= m)
    }

    /// Best genome evaluated so far. Panics before the first evaluation.
    pub fn best(&self) -> &EvaluatedFrog {
        self.best.as_ref().expect("no genome evaluated yet")
    }

    pub fn pool_sizes(&self) -> &[usize] {
        &self.pool_sizes
    }

    pub fn objective(&self) -> &Objective<'a> {
        &self.objective
    }
}

/// Records the trace and assembles the final record.
pub(crate) struct RunLog {
    algorithm: Algorithm,
    seed: u64,
    started: Instant,
    pub trace: Vec<f64>,
    pub params: BTreeMap<String, String>,
}

impl RunLog {
    pub fn start(algorithm: Algorithm, seed: u64) -> Self {
        Self {
            algorithm,
            seed,
            started: Instant::now(),
            trace: Vec::new(),
            params: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_owned(), value.to_string());
    }

    /// Appends the current best fitness; returns whether it improved.
    pub fn push(&mut self, eval: &Evaluator<'_>) -> bool {
        let best = eval.best().fitness;
        let improved = self.trace.last().is_none_or(|&prev| best < prev);
        self.trace.push(best);
        improved
    }

    pub fn finish(self, eval: &Evaluator<'_>) -> RunRecord {
        let best = eval.best();
        RunRecord {
            algorithm: self.algorithm,
            instance: String::new(),
            seed: self.seed,
            best_genome: best.genome.0.clone(),
            best_fitness: best.fitness,
            trace: self.trace,
            evaluations: eval.evaluations(),
            wall_time_s: self.started.elapsed().as_secs_f64(),
            params: self.params,
        }
    }
}

/// Index of the lowest fitness, first one on ties.
pub(crate) fn argmin(frogs: &[EvaluatedFrog]) -> usize {
    let mut best = 0;
    for (i, f) in frogs.iter().enumerate().skip(1) {
        if f.fitness < frogs[best].fitness {
            best = i;
        }
    }
    best
}
