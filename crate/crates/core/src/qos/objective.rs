use super::aggregate::{aggregate_unchecked, aggregate_with};
use super::model::{CompositionProblem, Genome, ObjectiveBounds, QosTriple};
use super::QosError;

/// Aggregate of per-task component-wise minima (lower) and maxima (upper).
///
/// The bounds are a relaxation: they need not be attainable by a single
/// genome, but every achievable aggregate lies inside them.
pub fn objective_bounds(problem: &CompositionProblem) -> ObjectiveBounds {
    let mins: Vec<QosTriple> = problem.tasks.iter().map(|t| t.min_qos()).collect();
    let maxs: Vec<QosTriple> = problem.tasks.iter().map(|t| t.max_qos()).collect();
    ObjectiveBounds {
        lower: aggregate_with(&problem.workflow, &|t| mins[t]),
        upper: aggregate_with(&problem.workflow, &|t| maxs[t]),
    }
}

fn normalize_component(v: f64, lo: f64, hi: f64) -> f64 {
    let span = hi - lo;
    if span <= 0.0 {
        return 0.0;
    }
    ((v - lo) / span).clamp(0.0, 1.0)
}

/// Min-max normalizes each component into `[0, 1]`.
///
/// A component with `upper == lower` is vacuous and maps to 0.
pub fn normalize_objectives(raw: QosTriple, bounds: &ObjectiveBounds) -> QosTriple {
    QosTriple::new(
        normalize_component(raw.response_time, bounds.lower.response_time, bounds.upper.response_time),
        normalize_component(raw.energy, bounds.lower.energy, bounds.upper.energy),
        normalize_component(raw.cost, bounds.lower.cost, bounds.upper.cost),
    )
}

fn weighted(problem: &CompositionProblem, raw: QosTriple, bounds: &ObjectiveBounds) -> f64 {
    let n = normalize_objectives(raw, bounds);
    let w = problem.weights;
    // Weights sum to 1 only within rounding, so the sum can overshoot by an ulp.
    (w.response_time * n.response_time + w.energy * n.energy + w.cost * n.cost).clamp(0.0, 1.0)
}

/// Weighted normalized fitness of `genome`. Lower is better; range `[0, 1]`.
pub fn fitness(
    problem: &CompositionProblem,
    genome: &Genome,
    bounds: &ObjectiveBounds,
) -> Result<f64, QosError> {
    if !genome.is_valid_for(problem) {
        return Err(QosError::InvalidGenome(genome.clone()));
    }
    Ok(weighted(problem, aggregate_unchecked(&problem.workflow, problem, genome.genes()), bounds))
}

/// A problem paired with its precomputed bounds: the fitness function every
/// optimizer evaluates.
#[derive(Debug, Clone, Copy)]
pub struct Objective<'a> {
    pub problem: &'a CompositionProblem,
    pub bounds: ObjectiveBounds,
}

impl<'a> Objective<'a> {
    pub fn new(problem: &'a CompositionProblem) -> Self {
        Self { problem, bounds: objective_bounds(problem) }
    }

    /// Fitness of a gene vector already known to be valid.
    pub fn evaluate(&self, genes: &[usize]) -> f64 {
        debug_assert_eq!(genes.len(), self.problem.tasks.len());
        weighted(self.problem, self.raw(genes), &self.bounds)
    }

    /// Raw aggregate QoS of a gene vector already known to be valid.
    pub fn raw(&self, genes: &[usize]) -> QosTriple {
        aggregate_unchecked(&self.problem.workflow, self.problem, genes)
    }

    pub fn pool_sizes(&self) -> Vec<usize> {
        self.problem.pool_sizes()
    }
}
