//! One entry point for every optimizer.

use crate::baseline::{
    brute_force_optimum, run_ca, run_ga, run_gapso, run_pso, BaselineConfig, CaKnobs, GaKnobs,
    PsoKnobs, DEFAULT_COMBO_CAP,
};
use crate::exec::Execution;
use crate::qos::CompositionProblem;
use crate::record::{Algorithm, RunRecord};
use crate::search::SearchError;
use crate::sfga::{run_sfga, MemeplexAssignment, SfgaConfig};

/// Union of the hybrid and baseline settings. Population size and generation
/// count are shared so that comparisons run on equal budgets.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub population_size: usize,
    pub generations: usize,
    pub seed: u64,
    pub memeplex_count: usize,
    pub mutation_fraction: f64,
    pub stall_limit: Option<usize>,
    /// Shared evaluation budget; runs stop at the first generation boundary
    /// past it.
    pub max_evaluations: Option<u64>,
    pub assignment: MemeplexAssignment,
    pub ga: GaKnobs,
    pub pso: PsoKnobs,
    pub ca: CaKnobs,
    pub combo_cap: u128,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = SfgaConfig::default();
        let b = BaselineConfig::default();
        Self {
            population_size: s.population_size,
            generations: s.generations,
            seed: 0,
            memeplex_count: s.memeplex_count,
            mutation_fraction: s.mutation_fraction,
            stall_limit: None,
            max_evaluations: None,
            assignment: s.assignment,
            ga: b.ga,
            pso: b.pso,
            ca: b.ca,
            combo_cap: DEFAULT_COMBO_CAP,
        }
    }
}

impl SolverConfig {
    pub fn sfga(&self) -> SfgaConfig {
        SfgaConfig {
            population_size: self.population_size,
            memeplex_count: self.memeplex_count,
            generations: self.generations,
            mutation_fraction: self.mutation_fraction,
            seed: self.seed,
            stall_limit: self.stall_limit,
            max_evaluations: self.max_evaluations,
            assignment: self.assignment,
        }
    }

    pub fn baseline(&self) -> BaselineConfig {
        BaselineConfig {
            population_size: self.population_size,
            generations: self.generations,
            seed: self.seed,
            max_evaluations: self.max_evaluations,
            ga: self.ga,
            pso: self.pso,
            ca: self.ca,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

/// Runs `algorithm` on `problem`. The brute-force "run" reports the exact
/// optimum with a one-entry trace.
pub fn solve(
    problem: &CompositionProblem,
    algorithm: Algorithm,
    config: &SolverConfig,
) -> Result<RunRecord, SearchError> {
    match algorithm {
        Algorithm::Sfga => run_sfga(problem, &config.sfga()),
        Algorithm::Ga => run_ga(problem, &config.baseline()),
        Algorithm::Pso => run_pso(problem, &config.baseline()),
        Algorithm::Ca => run_ca(problem, &config.baseline()),
        Algorithm::Gapso => run_gapso(problem, &config.baseline()),
        Algorithm::Brute => {
            problem.validate()?;
            let started = std::time::Instant::now();
            let r = brute_force_optimum(problem, config.combo_cap, Execution::Sequential)?;
            Ok(RunRecord {
                algorithm,
                instance: String::new(),
                seed: config.seed,
                best_genome: r.genome.0,
                best_fitness: r.fitness,
                trace: vec![r.fitness],
                evaluations: u64::try_from(r.combinations).unwrap_or(u64::MAX),
                wall_time_s: started.elapsed().as_secs_f64(),
                params: [("combo_cap".to_owned(), config.combo_cap.to_string())].into(),
            })
        }
    }
}
