//! Cultural algorithm.
//!
//! The belief space keeps situational knowledge (best genome found) and
//! normative knowledge (per-gene index interval spanned by the accepted top
//! share of the population). Each parent spawns one child whose influenced
//! gene is drawn from that knowledge; survivors are the best of parents and
//! children together.

use rand::Rng;

use super::BaselineConfig;
use crate::operators::random_genome;
use crate::qos::CompositionProblem;
use crate::record::{Algorithm, RunRecord};
use crate::search::{run_rng, EvaluatedFrog, Evaluator, RunLog, SearchError};
use crate::sfga::rank_order;

/// Per-gene `[lo, hi]` index interval spanned by `accepted`.
pub fn normative_intervals(accepted: &[EvaluatedFrog], len: usize) -> Vec<(usize, usize)> {
    (0..len)
        .map(|d| {
            let genes = accepted.iter().map(|f| f.genome.0[d]);
            (genes.clone().min().unwrap_or(0), genes.max().unwrap_or(0))
        })
        .collect()
}

fn accepted_count(pop: usize, fraction: f64) -> usize {
    ((pop as f64 * fraction).ceil() as usize).clamp(1, pop)
}

pub fn run_ca(problem: &CompositionProblem, config: &BaselineConfig) -> Result<RunRecord, SearchError> {
    problem.validate()?;
    config.validate()?;
    let knobs = config.ca;
    let mut log = RunLog::start(Algorithm::Ca, config.seed);
    config.log_common(&mut log);
    log.param("acceptance_fraction", knobs.acceptance_fraction);
    log.param("situational_bias", knobs.situational_bias);
    log.param("exploration_rate", knobs.exploration_rate);

    let mut rng = run_rng(config.seed);
    let mut eval = Evaluator::new(problem);
    let pools = eval.pool_sizes().to_vec();
    let n = config.population_size;
    let mut pop: Vec<EvaluatedFrog> = (0..n)
        .map(|_| random_genome(&mut rng, &pools))
        .collect::<Vec<_>>()
        .into_iter()
        .map(|g| eval.evaluate(g))
        .collect();
    log.push(&eval);

    let keep = accepted_count(n, knobs.acceptance_fraction);
    for _ in 0..config.generations {
        if eval.exhausted(config.max_evaluations) {
            break;
        }
        let order = rank_order(&pop);
        let accepted: Vec<EvaluatedFrog> = order[..keep].iter().map(|&i| pop[i].clone()).collect();
        let normative = normative_intervals(&accepted, pools.len());
        let situational = eval.best().genome.clone();

        let mut children = Vec::with_capacity(n);
        for parent in &pop {
            let mut g = parent.genome.clone();
            let d = rng.gen_range(0..g.len());
            let (lo, hi) = normative[d];
            g.0[d] = if rng.gen_bool(knobs.exploration_rate) {
                rng.gen_range(0..pools[d])
            } else if rng.gen_bool(knobs.situational_bias) {
                situational.0[d]
            } else {
                rng.gen_range(lo..=hi)
            };
            children.push(g);
        }
        pop.extend(children.into_iter().map(|g| eval.evaluate(g)));
        let order = rank_order(&pop);
        pop = order[..n].iter().map(|&i| pop[i].clone()).collect();
        log.push(&eval);
    }
    Ok(log.finish(&eval))
}
