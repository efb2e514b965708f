use super::ga::breed;
use super::pso::{decode_position, Swarm};
use super::BaselineConfig;
use crate::qos::CompositionProblem;
use crate::record::{Algorithm, RunRecord};
use crate::search::{argmin, run_rng, EvaluatedFrog, Evaluator, RunLog, SearchError};

/// Alternates one GA generation and one PSO generation on a shared swarm,
/// starting with GA.
///
/// A GA phase breeds from the particles' personal bests. Every particle
/// except the one holding the best personal best receives a child: its
/// position snaps to the child's indices, its velocity is reset to zero, and
/// its personal best is updated if the child improves on it.
pub fn run_gapso(problem: &CompositionProblem, config: &BaselineConfig) -> Result<RunRecord, SearchError> {
    problem.validate()?;
    config.validate()?;
    let mut log = RunLog::start(Algorithm::Gapso, config.seed);
    config.log_common(&mut log);
    config.log_ga(&mut log);
    config.log_pso(&mut log);

    let mut rng = run_rng(config.seed);
    let mut eval = Evaluator::new(problem);
    let pools = eval.pool_sizes().to_vec();
    let mut swarm = Swarm::init(config.population_size, &mut eval, &mut rng);
    log.push(&eval);

    for generation in 0..config.generations {
        if eval.exhausted(config.max_evaluations) {
            break;
        }
        if generation % 2 == 0 {
            let frogs: Vec<EvaluatedFrog> = swarm
                .particles
                .iter()
                .map(|p| EvaluatedFrog {
                    genome: decode_position(&p.personal_best, &pools),
                    fitness: p.personal_best_fitness,
                })
                .collect();
            let elite = argmin(&frogs);
            let children = breed(&frogs, frogs.len() - 1, &config.ga, &pools, &mut rng);
            let targets = (0..frogs.len()).filter(|&i| i != elite);
            for (i, child) in targets.zip(children) {
                let p = &mut swarm.particles[i];
                p.position = child.0.iter().map(|&g| g as f64).collect();
                p.velocity.iter_mut().for_each(|v| *v = 0.0);
                p.current = eval.evaluate(child);
                swarm.absorb(i);
            }
        } else {
            swarm.step(&config.pso, &mut eval, &mut rng);
        }
        log.push(&eval);
    }
    Ok(log.finish(&eval))
}
