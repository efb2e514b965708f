//! Service composition model: tasks, candidate pools, workflow aggregation and
//! the scalar fitness every optimizer minimizes.

mod aggregate;
mod model;
mod objective;
mod validate;

use thiserror::Error;

pub use aggregate::{aggregate_qos, aggregate_unchecked, aggregate_with};
pub use model::{
    CandidateService, CompositionProblem, Genome, ObjectiveBounds, QosTriple, TaskClass, Weights,
    WorkflowNode,
};
pub use objective::{fitness, normalize_objectives, objective_bounds, Objective};
pub use validate::{NodePath, ProblemError, ValidationReport, SUM_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QosError {
    #[error("genome {0} is not valid for this problem")]
    InvalidGenome(Genome),
}

/// Tasks `t0`..`t10` from the worked example quality matrix, as
/// `(response time, energy, cost)` rows.
pub fn example_quality_matrix() -> Vec<Vec<QosTriple>> {
    let rows: [&[[f64; 3]]; 11] = [
        &[[30.0, 48.0, 90.0], [26.0, 70.0, 40.0], [19.0, 96.0, 63.0]],
        &[[65.0, 100.0, 49.0], [38.0, 79.0, 70.0], [55.0, 89.0, 60.0], [67.0, 99.0, 41.0]],
        &[[46.0, 114.0, 96.0], [68.0, 125.0, 76.0], [90.0, 111.0, 47.0]],
        &[[69.0, 116.0, 57.0], [87.0, 99.0, 86.0], [46.0, 147.0, 39.0]],
        &[[74.0, 117.0, 91.0], [61.0, 86.0, 45.0]],
        &[[29.0, 109.0, 88.0], [40.0, 90.0, 37.0], [63.0, 120.0, 101.0]],
        &[[74.0, 71.0, 44.0], [39.0, 113.0, 93.0], [45.0, 110.0, 73.0]],
        &[[61.0, 100.0, 28.0], [49.0, 98.0, 74.0]],
        &[[66.0, 130.0, 55.0], [52.0, 82.0, 36.0], [73.0, 121.0, 105.0]],
        &[[80.0, 33.0, 58.0], [37.0, 105.0, 51.0]],
        &[[29.0, 79.0, 87.0], [74.0, 75.0, 42.0], [54.0, 77.0, 106.0]],
    ];
    rows.iter()
        .map(|r| r.iter().map(|a| QosTriple::from_array(*a)).collect())
        .collect()
}

/// The example matrix as a flat sequential problem with equal weights.
pub fn example_problem() -> CompositionProblem {
    let tasks: Vec<TaskClass> = example_quality_matrix()
        .iter()
        .enumerate()
        .map(|(i, rows)| TaskClass::from_triples(i, rows))
        .collect();
    let m = tasks.len();
    CompositionProblem { tasks, workflow: WorkflowNode::sequence_of(m), weights: Weights::default() }
}
