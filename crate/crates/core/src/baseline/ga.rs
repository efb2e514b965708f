use rand::Rng;

use super::{BaselineConfig, GaKnobs};
use crate::operators::{random_cut_points, random_genome, random_mutation, two_point_crossover};
use crate::qos::{CompositionProblem, Genome};
use crate::record::{Algorithm, RunRecord};
use crate::search::{argmin, run_rng, EvaluatedFrog, Evaluator, RunLog, SearchError};

fn tournament<'p, R: Rng + ?Sized>(
    pop: &'p [EvaluatedFrog],
    size: usize,
    rng: &mut R,
) -> &'p EvaluatedFrog {
    let mut best = &pop[rng.gen_range(0..pop.len())];
    for _ in 1..size {
        let c = &pop[rng.gen_range(0..pop.len())];
        if c.fitness < best.fitness {
            best = c;
        }
    }
    best
}

/// `count` unevaluated children bred by tournament selection, two-point
/// crossover and one-point mutation.
pub(crate) fn breed<R: Rng + ?Sized>(
    pop: &[EvaluatedFrog],
    count: usize,
    knobs: &GaKnobs,
    pool_sizes: &[usize],
    rng: &mut R,
) -> Vec<Genome> {
    let mut children = Vec::with_capacity(count + 1);
    while children.len() < count {
        let p1 = &tournament(pop, knobs.tournament_size, rng).genome;
        let p2 = &tournament(pop, knobs.tournament_size, rng).genome;
        let (mut c1, mut c2) = if rng.gen_bool(knobs.crossover_rate) {
            let (r1, r2) = random_cut_points(rng, p1.len());
            two_point_crossover(p1, p2, r1, r2).expect("cut points drawn in range")
        } else {
            (p1.clone(), p2.clone())
        };
        for c in [&mut c1, &mut c2] {
            if rng.gen_bool(knobs.mutation_rate) {
                random_mutation(rng, c, pool_sizes);
            }
        }
        children.push(c1);
        children.push(c2);
    }
    children.truncate(count);
    children
}

/// Generational GA with tournament selection and one elite.
pub fn run_ga(problem: &CompositionProblem, config: &BaselineConfig) -> Result<RunRecord, SearchError> {
    problem.validate()?;
    config.validate()?;
    let mut log = RunLog::start(Algorithm::Ga, config.seed);
    config.log_common(&mut log);
    config.log_ga(&mut log);

    let mut rng = run_rng(config.seed);
    let mut eval = Evaluator::new(problem);
    let pools = eval.pool_sizes().to_vec();
    let mut pop: Vec<EvaluatedFrog> = (0..config.population_size)
        .map(|_| random_genome(&mut rng, &pools))
        .collect::<Vec<_>>()
        .into_iter()
        .map(|g| eval.evaluate(g))
        .collect();
    log.push(&eval);

    for _ in 0..config.generations {
        if eval.exhausted(config.max_evaluations) {
            break;
        }
        let elite = pop[argmin(&pop)].clone();
        let children = breed(&pop, config.population_size - 1, &config.ga, &pools, &mut rng);
        let mut next = Vec::with_capacity(config.population_size);
        next.push(elite);
        next.extend(children.into_iter().map(|g| eval.evaluate(g)));
        pop = next;
        log.push(&eval);
    }
    Ok(log.finish(&eval))
}
