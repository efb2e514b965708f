use rand::Rng;

use super::{BaselineConfig, PsoKnobs};
use crate::qos::{CompositionProblem, Genome};
use crate::record::{Algorithm, RunRecord};
use crate::search::{run_rng, EvaluatedFrog, Evaluator, RunLog, SearchError};

/// Rounds each coordinate and clamps it to `[0, pool - 1]`.
pub fn decode_position(position: &[f64], pool_sizes: &[usize]) -> Genome {
    Genome::new(
        position
            .iter()
            .zip(pool_sizes)
            .map(|(x, &n)| {
                let top = (n - 1) as f64;
                x.round().clamp(0.0, top) as usize
            })
            .collect(),
    )
}

#[derive(Debug, Clone)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub personal_best: Vec<f64>,
    pub personal_best_fitness: f64,
    pub current: EvaluatedFrog,
}

/// Swarm state shared by PSO and the PSO phases of GAPSO.
pub(crate) struct Swarm {
    pub particles: Vec<Particle>,
    pub global_best: Vec<f64>,
    pub global_best_fitness: f64,
}

impl Swarm {
    /// Positions uniform over `[-0.5, n - 0.5]` so every candidate owns an
    /// equal share under rounding; velocities start at 0.
    pub fn init<R: Rng + ?Sized>(size: usize, eval: &mut Evaluator<'_>, rng: &mut R) -> Self {
        let pools = eval.pool_sizes().to_vec();
        let mut particles = Vec::with_capacity(size);
        for _ in 0..size {
            let position: Vec<f64> =
                pools.iter().map(|&n| rng.gen::<f64>() * n as f64 - 0.5).collect();
            let current = eval.evaluate(decode_position(&position, &pools));
            particles.push(Particle {
                velocity: vec![0.0; pools.len()],
                personal_best: position.clone(),
                personal_best_fitness: current.fitness,
                position,
                current,
            });
        }
        let mut swarm = Swarm { particles, global_best: Vec::new(), global_best_fitness: f64::INFINITY };
        for i in 0..swarm.particles.len() {
            swarm.absorb(i);
        }
        swarm
    }

    /// Folds particle `i`'s current state into its personal and the global best.
    pub fn absorb(&mut self, i: usize) {
        let p = &mut self.particles[i];
        if p.current.fitness < p.personal_best_fitness {
            p.personal_best = p.position.clone();
            p.personal_best_fitness = p.current.fitness;
        }
        if p.current.fitness < self.global_best_fitness {
            self.global_best = p.position.clone();
            self.global_best_fitness = p.current.fitness;
        }
    }

    /// Moves every particle once, in order. The global best is updated as soon
    /// as a particle improves on it.
    pub fn step<R: Rng + ?Sized>(&mut self, knobs: &PsoKnobs, eval: &mut Evaluator<'_>, rng: &mut R) {
        let pools = eval.pool_sizes().to_vec();
        for i in 0..self.particles.len() {
            let p = &mut self.particles[i];
            for (d, &size) in pools.iter().enumerate() {
                let top = (size - 1) as f64;
                let r1: f64 = rng.gen();
                let r2: f64 = rng.gen();
                let x = p.position[d];
                let v = knobs.inertia * p.velocity[d]
                    + knobs.cognitive * r1 * (p.personal_best[d] - x)
                    + knobs.social * r2 * (self.global_best[d] - x);
                let v = v.clamp(-top, top);
                p.velocity[d] = v;
                p.position[d] = (x + v).clamp(-0.5, top + 0.5);
            }
            p.current = eval.evaluate(decode_position(&p.position, &pools));
            self.absorb(i);
        }
    }
}

/// Discrete PSO: continuous index positions decoded by round-and-clamp,
/// global-best topology.
pub fn run_pso(problem: &CompositionProblem, config: &BaselineConfig) -> Result<RunRecord, SearchError> {
    problem.validate()?;
    config.validate()?;
    let mut log = RunLog::start(Algorithm::Pso, config.seed);
    config.log_common(&mut log);
    config.log_pso(&mut log);

    let mut rng = run_rng(config.seed);
    let mut eval = Evaluator::new(problem);
    let mut swarm = Swarm::init(config.population_size, &mut eval, &mut rng);
    log.push(&eval);
    for _ in 0..config.generations {
        if eval.exhausted(config.max_evaluations) {
            break;
        }
        swarm.step(&config.pso, &mut eval, &mut rng);
        log.push(&eval);
    }
    Ok(log.finish(&eval))
}
