//! Comparison optimizers in textbook form, plus an exhaustive oracle.
//!
//! All of them share the [`RunRecord`](crate::record::RunRecord) contract with
//! the hybrid optimizer: valid genomes only, a non-increasing best-so-far
//! trace, and bit-identical results for equal seeds.

mod brute;
mod ca;
mod ga;
mod gapso;
mod pso;

pub use brute::{brute_force_optimum, BruteForceResult, TooLarge, DEFAULT_COMBO_CAP};
pub use ca::{normative_intervals, run_ca};
pub use ga::run_ga;
pub use gapso::run_gapso;
pub use pso::{decode_position, run_pso, Particle};

use crate::search::{RunLog, SearchError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaKnobs {
    pub crossover_rate: f64,
    /// Probability that a child receives one one-point mutation.
    pub mutation_rate: f64,
    pub tournament_size: usize,
}

impl Default for GaKnobs {
    fn default() -> Self {
        Self { crossover_rate: 0.9, mutation_rate: 0.1, tournament_size: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsoKnobs {
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
}

impl Default for PsoKnobs {
    fn default() -> Self {
        Self { inertia: 0.7, cognitive: 1.4, social: 1.4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaKnobs {
    /// Share of the population that shapes normative knowledge.
    pub acceptance_fraction: f64,
    /// Probability that an influenced gene copies the situational best.
    pub situational_bias: f64,
    /// Probability that an influenced gene is drawn from the whole pool.
    pub exploration_rate: f64,
}

impl Default for CaKnobs {
    fn default() -> Self {
        Self { acceptance_fraction: 0.2, situational_bias: 0.3, exploration_rate: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub population_size: usize,
    pub generations: usize,
    pub seed: u64,
    /// Stop before a generation once this many evaluations have been made.
    pub max_evaluations: Option<u64>,
    pub ga: GaKnobs,
    pub pso: PsoKnobs,
    pub ca: CaKnobs,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            generations: 100,
            seed: 0,
            max_evaluations: None,
            ga: GaKnobs::default(),
            pso: PsoKnobs::default(),
            ca: CaKnobs::default(),
        }
    }
}

fn rate_ok(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::ConfigInvalid(m.to_owned()));
        if self.population_size < 2 || self.generations == 0 {
            return bad("population must be at least 2 and generations positive");
        }
        if !rate_ok(self.ga.crossover_rate) || !rate_ok(self.ga.mutation_rate) {
            return bad("GA rates must lie in [0, 1]");
        }
        if self.ga.tournament_size == 0 {
            return bad("tournament size must be positive");
        }
        let p = self.pso;
        if [p.inertia, p.cognitive, p.social].iter().any(|v| !v.is_finite() || *v < 0.0) {
            return bad("PSO coefficients must be finite and non-negative");
        }
        let c = self.ca;
        if !(c.acceptance_fraction > 0.0 && c.acceptance_fraction <= 1.0)
            || !rate_ok(c.situational_bias)
            || !rate_ok(c.exploration_rate)
        {
            return bad("CA fractions must lie in (0, 1] / [0, 1]");
        }
        Ok(())
    }

    fn log_common(&self, log: &mut RunLog) {
        log.param("population_size", self.population_size);
        log.param("generations", self.generations);
        if let Some(m) = self.max_evaluations {
            log.param("max_evaluations", m);
        }
    }

    fn log_ga(&self, log: &mut RunLog) {
        log.param("crossover_rate", self.ga.crossover_rate);
        log.param("mutation_rate", self.ga.mutation_rate);
        log.param("tournament_size", self.ga.tournament_size);
    }

    fn log_pso(&self, log: &mut RunLog) {
        log.param("inertia", self.pso.inertia);
        log.param("cognitive", self.pso.cognitive);
        log.param("social", self.pso.social);
    }
}
