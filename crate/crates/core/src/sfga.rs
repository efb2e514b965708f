//! Hybrid shuffled-frog-leaping / genetic optimizer.
//!
//! Each generation ranks the population, deals it into memeplexes, and evolves
//! every memeplex with GA operators instead of continuous frog leaps:
//!
//! 1. crossover of the memeplex best with its worst frog; if no child beats
//!    the worst, crossover of the global best with the worst; if that fails
//!    too, the worst is replaced by a fresh random frog;
//! 2. a fixed number of one-point mutations on random non-best members;
//! 3. memeplexes are shuffled back into one population.
//!
//! Random draws happen in a fixed order: initial genes task-major, then per
//! generation the optional memeplex assignment, every memeplex's crossover
//! draws in memeplex order, then every memeplex's mutation draws in memeplex
//! order.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::operators::{random_cut_points, random_genome, random_replacement, two_point_crossover};
use crate::qos::{CompositionProblem, Genome};
use crate::record::{Algorithm, RunRecord};
use crate::search::{run_rng, EvaluatedFrog, Evaluator, RunLog, SearchError};

/// How sorted frogs are dealt into memeplexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MemeplexAssignment {
    /// Sorted position `p` goes to memeplex `p mod m`.
    #[default]
    RoundRobin,
    /// Sorted frogs are shuffled before being dealt round-robin.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SfgaConfig {
    pub population_size: usize,
    pub memeplex_count: usize,
    pub generations: usize,
    /// Share of each memeplex mutated per generation.
    pub mutation_fraction: f64,
    pub seed: u64,
    /// Stop after this many consecutive generations without improvement.
    pub stall_limit: Option<usize>,
    /// Stop before a generation once this many evaluations have been made.
    pub max_evaluations: Option<u64>,
    pub assignment: MemeplexAssignment,
}

impl Default for SfgaConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            memeplex_count: 5,
            generations: 100,
            mutation_fraction: 0.3,
            seed: 0,
            stall_limit: None,
            max_evaluations: None,
            assignment: MemeplexAssignment::RoundRobin,
        }
    }
}

impl SfgaConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: String| Err(SearchError::ConfigInvalid(m));
        if self.population_size == 0 || self.memeplex_count == 0 || self.generations == 0 {
            return bad("population, memeplex count and generations must be positive".into());
        }
        if !self.population_size.is_multiple_of(self.memeplex_count) {
            return bad(format!(
                "population {} is not divisible by {} memeplexes",
                self.population_size, self.memeplex_count
            ));
        }
        if self.memeplex_size() < 2 {
            return bad("each memeplex needs at least two frogs".into());
        }
        if !(0.0..=1.0).contains(&self.mutation_fraction) {
            return bad(format!("mutation fraction {} outside [0, 1]", self.mutation_fraction));
        }
        if self.stall_limit == Some(0) {
            return bad("stall limit must be positive".into());
        }
        Ok(())
    }

    pub fn memeplex_size(&self) -> usize {
        self.population_size / self.memeplex_count
    }
}

/// Number of mutation events for a memeplex of `size` frogs.
pub fn mutation_count(size: usize, fraction: f64) -> usize {
    // The epsilon keeps products such as 10 * 0.3 from flooring to 2.
    (size as f64 * fraction + 1e-9).floor() as usize
}

/// A cell of the partitioned population. Indices point into the population.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Memeplex {
    /// Members ordered best-first at partition time.
    pub members: Vec<usize>,
    pub best: usize,
    pub worst: usize,
}

impl Memeplex {
    fn from_members(members: Vec<usize>) -> Self {
        let best = members[0];
        let worst = *members.last().unwrap();
        Self { members, best, worst }
    }

    /// Re-identifies best (first lowest) and worst (last highest) members.
    pub fn refresh(&mut self, population: &[EvaluatedFrog]) {
        let mut best = self.members[0];
        let mut worst = self.members[0];
        for &i in &self.members[1..] {
            if population[i].fitness < population[best].fitness {
                best = i;
            }
            if population[i].fitness >= population[worst].fitness {
                worst = i;
            }
        }
        self.best = best;
        self.worst = worst;
    }
}

/// Draws `population_size` uniform genomes (task-major) and evaluates them.
pub fn init_population<R: Rng + ?Sized>(
    eval: &mut Evaluator<'_>,
    config: &SfgaConfig,
    rng: &mut R,
) -> Result<Vec<EvaluatedFrog>, SearchError> {
    config.validate()?;
    let pools = eval.pool_sizes().to_vec();
    let n = config.population_size;
    let mut genes = vec![vec![0usize; pools.len()]; n];
    for (t, &pool) in pools.iter().enumerate() {
        for g in genes.iter_mut() {
            g[t] = rng.gen_range(0..pool);
        }
    }
    Ok(genes.into_iter().map(|g| eval.evaluate(Genome::new(g))).collect())
}

/// Population indices sorted best-first; ties keep population order.
pub fn rank_order(population: &[EvaluatedFrog]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| population[a].fitness.total_cmp(&population[b].fitness));
    order
}

/// Deals an already ranked index list into `m` memeplexes round-robin.
pub fn deal_round_robin(order: &[usize], m: usize) -> Vec<Memeplex> {
    (0..m)
        .map(|j| Memeplex::from_members(order.iter().skip(j).step_by(m).copied().collect()))
        .collect()
}

/// Ranks the population (ascending fitness) and deals it round-robin.
pub fn sort_and_partition(population: &[EvaluatedFrog], memeplex_count: usize) -> Vec<Memeplex> {
    deal_round_robin(&rank_order(population), memeplex_count)
}

/// Which stage of the crossover fallback chain changed the worst frog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossoverStage {
    LocalBest,
    GlobalBest,
    RandomRestart,
}

fn cross_with_worst<R: Rng + ?Sized>(
    partner: &Genome,
    worst: &EvaluatedFrog,
    eval: &mut Evaluator<'_>,
    rng: &mut R,
) -> Option<EvaluatedFrog> {
    let (r1, r2) = random_cut_points(rng, partner.len());
    let (c1, c2) = two_point_crossover(partner, &worst.genome, r1, r2)
        .expect("cut points drawn in range");
    let c1 = eval.evaluate(c1);
    let c2 = eval.evaluate(c2);
    let better = if c2.fitness < c1.fitness { c2 } else { c1 };
    (better.fitness < worst.fitness).then_some(better)
}

/// Improves the memeplex's worst frog via the three-stage fallback chain.
pub fn memeplex_crossover_step<R: Rng + ?Sized>(
    memeplex: &mut Memeplex,
    population: &mut [EvaluatedFrog],
    eval: &mut Evaluator<'_>,
    rng: &mut R,
) -> CrossoverStage {
    let worst = memeplex.worst;
    let local = population[memeplex.best].genome.clone();
    let (stage, frog) = if let Some(c) = cross_with_worst(&local, &population[worst], eval, rng) {
        (CrossoverStage::LocalBest, c)
    } else {
        let global = eval.best().genome.clone();
        match cross_with_worst(&global, &population[worst], eval, rng) {
            Some(c) => (CrossoverStage::GlobalBest, c),
            None => {
                let g = random_genome(rng, eval.pool_sizes());
                (CrossoverStage::RandomRestart, eval.evaluate(g))
            }
        }
    };
    population[worst] = frog;
    memeplex.refresh(population);
    stage
}

/// Applies `floor(|memeplex| * fraction)` one-point mutations to random
/// members other than the memeplex best. Mutants replace the originals
/// unconditionally. Returns the number of mutation events.
pub fn memeplex_mutation_step<R: Rng + ?Sized>(
    memeplex: &Memeplex,
    population: &mut [EvaluatedFrog],
    mutation_fraction: f64,
    eval: &mut Evaluator<'_>,
    rng: &mut R,
) -> usize {
    let events = mutation_count(memeplex.members.len(), mutation_fraction);
    let others: Vec<usize> =
        memeplex.members.iter().copied().filter(|&i| i != memeplex.best).collect();
    if others.is_empty() {
        return 0;
    }
    for _ in 0..events {
        let target = others[rng.gen_range(0..others.len())];
        let mut genome = population[target].genome.clone();
        let pos = rng.gen_range(0..genome.len());
        genome.0[pos] = random_replacement(rng, eval.pool_sizes()[pos], genome.0[pos]);
        population[target] = eval.evaluate(genome);
    }
    events
}

/// Runs the optimizer to completion.
pub fn run_sfga(problem: &CompositionProblem, config: &SfgaConfig) -> Result<RunRecord, SearchError> {
    problem.validate()?;
    config.validate()?;
    let mut log = RunLog::start(Algorithm::Sfga, config.seed);
    log.param("population_size", config.population_size);
    log.param("memeplex_count", config.memeplex_count);
    log.param("generations", config.generations);
    log.param("mutation_fraction", config.mutation_fraction);
    log.param(
        "stall_limit",
        config.stall_limit.map_or_else(|| "none".to_owned(), |s| s.to_string()),
    );
    log.param("assignment", format!("{:?}", config.assignment));
    if let Some(m) = config.max_evaluations {
        log.param("max_evaluations", m);
    }

    let mut rng = run_rng(config.seed);
    let mut eval = Evaluator::new(problem);
    let mut population = init_population(&mut eval, config, &mut rng)?;
    log.push(&eval);

    let mut stalled = 0;
    for _ in 0..config.generations {
        if eval.exhausted(config.max_evaluations) {
            break;
        }
        let mut order = rank_order(&population);
        if config.assignment == MemeplexAssignment::Random {
            order.shuffle(&mut rng);
        }
        let mut plexes = deal_round_robin(&order, config.memeplex_count);
        if config.assignment == MemeplexAssignment::Random {
            plexes.iter_mut().for_each(|p| p.refresh(&population));
        }
        for plex in plexes.iter_mut() {
            memeplex_crossover_step(plex, &mut population, &mut eval, &mut rng);
        }
        for plex in &plexes {
            memeplex_mutation_step(plex, &mut population, config.mutation_fraction, &mut eval, &mut rng);
        }
        // Shuffling is implicit: all memeplexes index one shared population.

        if log.push(&eval) {
            stalled = 0;
        } else {
            stalled += 1;
            if config.stall_limit.is_some_and(|l| stalled >= l) {
                break;
            }
        }
    }
    Ok(log.finish(&eval))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qos::{example_problem, QosTriple, TaskClass, Weights, WorkflowNode};
    use crate::search::run_rng;

    fn frogs(fit: &[f64]) -> Vec<EvaluatedFrog> {
        fit.iter()
            .map(|&f| EvaluatedFrog { genome: Genome::zeros(1), fitness: f })
            .collect()
    }

    fn single_candidate_problem(m: usize) -> CompositionProblem {
        CompositionProblem {
            tasks: (0..m)
                .map(|i| TaskClass::from_triples(i, &[QosTriple::new(1.0 + i as f64, 2.0, 3.0)]))
                .collect(),
            workflow: WorkflowNode::sequence_of(m),
            weights: Weights::default(),
        }
    }

    #[test]
    fn round_robin_partition_example() {
        let plexes = sort_and_partition(&frogs(&[0.9, 0.1, 0.5, 0.3]), 2);
        assert_eq!(rank_order(&frogs(&[0.9, 0.1, 0.5, 0.3])), vec![1, 3, 2, 0]);
        assert_eq!(plexes[0].members, vec![1, 2]);
        assert_eq!(plexes[1].members, vec![3, 0]);
        assert_eq!((plexes[0].best, plexes[0].worst), (1, 2));
        assert_eq!((plexes[1].best, plexes[1].worst), (3, 0));
    }

    #[test]
    fn single_memeplex_holds_sorted_population() {
        let plexes = sort_and_partition(&frogs(&[0.4, 0.2, 0.3]), 1);
        assert_eq!(plexes.len(), 1);
        assert_eq!(plexes[0].members, vec![1, 2, 0]);
    }

    #[test]
    fn ties_are_stable() {
        let plexes = sort_and_partition(&frogs(&[0.5; 6]), 3);
        assert_eq!(plexes[0].members, vec![0, 3]);
        assert_eq!(plexes[1].members, vec![1, 4]);
        assert_eq!(plexes[2].members, vec![2, 5]);
        assert!(plexes.iter().all(|p| p.best != p.worst));
    }

    #[test]
    fn config_rules() {
        let cfg = SfgaConfig { population_size: 10, memeplex_count: 3, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(SearchError::ConfigInvalid(_))));
        let cfg = SfgaConfig { population_size: 5, memeplex_count: 5, ..Default::default() };
        assert!(cfg.validate().is_err());
        assert!(SfgaConfig::default().validate().is_ok());
    }

    #[test]
    fn init_with_forced_genes() {
        let p = single_candidate_problem(3);
        let mut eval = Evaluator::new(&p);
        let cfg = SfgaConfig { population_size: 4, memeplex_count: 2, ..Default::default() };
        let pop = init_population(&mut eval, &cfg, &mut run_rng(1)).unwrap();
        assert_eq!(pop.len(), 4);
        assert!(pop.iter().all(|f| f.genome == Genome::zeros(3)));
        assert_eq!(eval.evaluations(), 4);
    }

    #[test]
    fn init_is_seeded() {
        let p = example_problem();
        let cfg = SfgaConfig::default();
        let a = init_population(&mut Evaluator::new(&p), &cfg, &mut run_rng(9)).unwrap();
        let b = init_population(&mut Evaluator::new(&p), &cfg, &mut run_rng(9)).unwrap();
        assert_eq!(a, b);
        let bad = SfgaConfig { population_size: 10, memeplex_count: 3, ..cfg };
        assert!(init_population(&mut Evaluator::new(&p), &bad, &mut run_rng(9)).is_err());
    }

    #[test]
    fn mutation_event_counts() {
        assert_eq!(mutation_count(10, 0.3), 3);
        assert_eq!(mutation_count(10, 0.0), 0);
        assert_eq!(mutation_count(100, 0.29), 29);
        assert_eq!(mutation_count(7, 1.0), 7);
    }

    #[test]
    fn zero_fraction_leaves_population_alone() {
        let p = example_problem();
        let mut eval = Evaluator::new(&p);
        let mut rng = run_rng(3);
        let cfg = SfgaConfig::default();
        let mut pop = init_population(&mut eval, &cfg, &mut rng).unwrap();
        let before = pop.clone();
        let plexes = sort_and_partition(&pop, 5);
        assert_eq!(memeplex_mutation_step(&plexes[0], &mut pop, 0.0, &mut eval, &mut rng), 0);
        assert_eq!(pop, before);
    }

    #[test]
    fn single_candidate_mutation_keeps_gene() {
        let p = single_candidate_problem(2);
        let mut eval = Evaluator::new(&p);
        let mut rng = run_rng(3);
        let cfg = SfgaConfig { population_size: 10, memeplex_count: 1, ..Default::default() };
        let mut pop = init_population(&mut eval, &cfg, &mut rng).unwrap();
        let plexes = sort_and_partition(&pop, 1);
        assert_eq!(memeplex_mutation_step(&plexes[0], &mut pop, 0.3, &mut eval, &mut rng), 3);
        assert!(pop.iter().all(|f| f.genome == Genome::zeros(2)));
    }

    #[test]
    fn degenerate_crossover_falls_through_to_restart() {
        let p = single_candidate_problem(3);
        let mut eval = Evaluator::new(&p);
        let mut rng = run_rng(5);
        let cfg = SfgaConfig { population_size: 4, memeplex_count: 2, ..Default::default() };
        let mut pop = init_population(&mut eval, &cfg, &mut rng).unwrap();
        let mut plexes = sort_and_partition(&pop, 2);
        let stage = memeplex_crossover_step(&mut plexes[0], &mut pop, &mut eval, &mut rng);
        assert_eq!(stage, CrossoverStage::RandomRestart);
        assert!(pop.iter().all(|f| f.genome == Genome::zeros(3)));
    }

    #[test]
    fn crossover_replaces_worst_with_better_child() {
        // Two tasks, candidate 0 is strictly better in both.
        let good = QosTriple::new(1.0, 1.0, 1.0);
        let bad = QosTriple::new(9.0, 9.0, 9.0);
        let p = CompositionProblem {
            tasks: vec![TaskClass::from_triples(0, &[good, bad]), TaskClass::from_triples(1, &[good, bad])],
            workflow: WorkflowNode::sequence_of(2),
            weights: Weights::default(),
        };
        let mut eval = Evaluator::new(&p);
        let mut pop: Vec<EvaluatedFrog> = [[0, 0], [1, 1]]
            .iter()
            .map(|g| eval.evaluate(Genome::new(g.to_vec())))
            .collect();
        let mut plex = sort_and_partition(&pop, 1).remove(0);
        assert_eq!((plex.best, plex.worst), (0, 1));
        let worst_before = pop[1].fitness;
        let stage = memeplex_crossover_step(&mut plex, &mut pop, &mut eval, &mut run_rng(0));
        // Any cut of ([0,0], [1,1]) yields a child strictly better than [1,1].
        assert_eq!(stage, CrossoverStage::LocalBest);
        assert!(pop[1].fitness < worst_before);
    }

    #[test]
    fn forced_optimum_run() {
        let p = single_candidate_problem(4);
        let cfg = SfgaConfig { population_size: 10, memeplex_count: 2, generations: 20, ..Default::default() };
        let r = run_sfga(&p, &cfg).unwrap();
        assert_eq!(r.best_genome, vec![0; 4]);
        assert!(r.trace.iter().all(|&f| f == r.trace[0]));
        assert_eq!(r.trace.len(), 21);
    }

    #[test]
    fn stall_limit_stops_early() {
        let p = single_candidate_problem(2);
        let cfg = SfgaConfig {
            population_size: 10,
            memeplex_count: 2,
            generations: 100,
            stall_limit: Some(5),
            ..Default::default()
        };
        let r = run_sfga(&p, &cfg).unwrap();
        assert_eq!(r.trace.len(), 6);
    }

    #[test]
    fn random_assignment_still_partitions() {
        let p = example_problem();
        let cfg = SfgaConfig { assignment: MemeplexAssignment::Random, seed: 4, ..Default::default() };
        let r = run_sfga(&p, &cfg).unwrap();
        assert!(r.trace_is_monotone());
        assert!(r.best().is_valid_for(&p));
    }
}
