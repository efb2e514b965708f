use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::pool::ServicePool;
use crate::qos::{CandidateService, CompositionProblem, ProblemError, TaskClass, Weights, WorkflowNode};
use crate::search::run_rng;

/// Workflow tree built over the sampled tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkflowShape {
    /// All tasks in one sequence.
    #[default]
    Sequence,
    /// All tasks as parallel fork branches.
    Fork,
    /// One probabilistic branch, equal probabilities.
    Branch,
    /// A sequence of all tasks repeated twice.
    Loop,
    /// Groups of three tasks cycling through sequence, fork, branch and a
    /// twice-repeated loop, joined in sequence.
    Mixed,
}

impl WorkflowShape {
    pub fn build(self, m: usize) -> Result<WorkflowNode, SampleError> {
        if m == 0 {
            return Err(SampleError::InvalidShape("workflow needs at least one task".into()));
        }
        let leaves: Vec<WorkflowNode> = (0..m).map(WorkflowNode::Atomic).collect();
        Ok(match self {
            WorkflowShape::Sequence => WorkflowNode::Sequence(leaves),
            WorkflowShape::Fork => WorkflowNode::Fork(leaves),
            WorkflowShape::Branch => uniform_branch(leaves),
            WorkflowShape::Loop => WorkflowNode::looped(WorkflowNode::Sequence(leaves), 2),
            WorkflowShape::Mixed => WorkflowNode::Sequence(
                leaves
                    .chunks(3)
                    .enumerate()
                    .map(|(g, chunk)| {
                        let chunk = chunk.to_vec();
                        match g % 4 {
                            0 => WorkflowNode::Sequence(chunk),
                            1 => WorkflowNode::Fork(chunk),
                            2 => uniform_branch(chunk),
                            _ => WorkflowNode::looped(WorkflowNode::Sequence(chunk), 2),
                        }
                    })
                    .collect(),
            ),
        })
    }
}

fn uniform_branch(children: Vec<WorkflowNode>) -> WorkflowNode {
    let p = 1.0 / children.len() as f64;
    WorkflowNode::Branch { probabilities: vec![p; children.len()], children }
}

impl fmt::Display for WorkflowShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WorkflowShape::Sequence => "sequence",
            WorkflowShape::Fork => "fork",
            WorkflowShape::Branch => "branch",
            WorkflowShape::Loop => "loop",
            WorkflowShape::Mixed => "mixed",
        })
    }
}

impl FromStr for WorkflowShape {
    type Err = SampleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequence" => Ok(WorkflowShape::Sequence),
            "fork" => Ok(WorkflowShape::Fork),
            "branch" => Ok(WorkflowShape::Branch),
            "loop" => Ok(WorkflowShape::Loop),
            "mixed" => Ok(WorkflowShape::Mixed),
            other => Err(SampleError::InvalidShape(format!("unknown shape `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("invalid workflow shape: {0}")]
    InvalidShape(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("service pool is empty")]
    EmptyPool,
    #[error("candidates per task must be positive")]
    NoCandidates,
}

/// Draws `task_count` tasks of `candidates_per_task` services from `pool`.
///
/// Services are drawn without replacement when the pool holds at least
/// `task_count * candidates_per_task` entries, with replacement otherwise.
pub fn sample_instance(
    pool: &ServicePool,
    task_count: usize,
    candidates_per_task: usize,
    shape: WorkflowShape,
    weights: Weights,
    seed: u64,
) -> Result<CompositionProblem, SampleError> {
    if pool.is_empty() {
        return Err(SampleError::EmptyPool);
    }
    if candidates_per_task == 0 {
        return Err(SampleError::NoCandidates);
    }
    let workflow = shape.build(task_count)?;
    let need = task_count * candidates_per_task;
    let mut rng = run_rng(seed);
    let picks: Vec<usize> = if pool.len() >= need {
        index::sample(&mut rng, pool.len(), need).into_vec()
    } else {
        (0..need).map(|_| rng.gen_range(0..pool.len())).collect()
    };

    let tasks = picks
        .chunks(candidates_per_task)
        .enumerate()
        .map(|(t, chunk)| TaskClass {
            index: t,
            candidates: chunk
                .iter()
                .enumerate()
                .map(|(j, &p)| CandidateService {
                    task_index: t,
                    candidate_index: j,
                    qos: pool.entries[p].qos,
                    service_id: pool.entries[p].service_id.clone(),
                })
                .collect(),
        })
        .collect();
    let problem = CompositionProblem { tasks, workflow, weights };
    if let Err(report) = problem.validate() {
        let weight_errs: Vec<String> = report
            .0
            .iter()
            .filter(|e| matches!(e, ProblemError::WeightSumMismatch(_) | ProblemError::BadWeight { .. }))
            .map(ToString::to_string)
            .collect();
        return Err(if weight_errs.is_empty() {
            SampleError::InvalidShape(report.to_string())
        } else {
            SampleError::InvalidWeights(weight_errs.join("; "))
        });
    }
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::pool::PoolEntry;
    use crate::qos::QosTriple;

    fn pool(n: usize) -> ServicePool {
        ServicePool {
            entries: (0..n)
                .map(|i| PoolEntry {
                    service_id: format!("s{i}"),
                    qos: QosTriple::new(i as f64, 1.0, 2.0),
                })
                .collect(),
            source: "test".into(),
        }
    }

    #[test]
    fn exact_pool_used_once() {
        let p = sample_instance(&pool(6), 2, 3, WorkflowShape::Sequence, Weights::default(), 1).unwrap();
        assert_eq!(p.pool_sizes(), vec![3, 3]);
        let mut ids: Vec<&str> =
            p.tasks.iter().flat_map(|t| t.candidates.iter().map(|c| c.service_id.as_str())).collect();
        ids.sort_unstable();
        assert_eq!(ids, vec!["s0", "s1", "s2", "s3", "s4", "s5"]);
    }

    #[test]
    fn small_pool_falls_back_to_replacement() {
        let p = sample_instance(&pool(4), 2, 3, WorkflowShape::Mixed, Weights::default(), 1).unwrap();
        assert_eq!(p.pool_sizes(), vec![3, 3]);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn seeded() {
        let a = sample_instance(&pool(40), 5, 4, WorkflowShape::Mixed, Weights::default(), 9);
        let b = sample_instance(&pool(40), 5, 4, WorkflowShape::Mixed, Weights::default(), 9);
        assert_eq!(a, b);
    }

    #[test]
    fn errors() {
        let bad_w = Weights::new(0.5, 0.5, 0.5);
        assert!(matches!(
            sample_instance(&pool(6), 2, 3, WorkflowShape::Sequence, bad_w, 1),
            Err(SampleError::InvalidWeights(_))
        ));
        assert!(matches!(
            sample_instance(&pool(6), 0, 3, WorkflowShape::Sequence, Weights::default(), 1),
            Err(SampleError::InvalidShape(_))
        ));
        assert!("spiral".parse::<WorkflowShape>().is_err());
        let empty = ServicePool { entries: vec![], source: String::new() };
        assert_eq!(
            sample_instance(&empty, 1, 1, WorkflowShape::Sequence, Weights::default(), 1),
            Err(SampleError::EmptyPool)
        );
    }

    #[test]
    fn every_shape_is_valid() {
        for shape in ["sequence", "fork", "branch", "loop", "mixed"] {
            let shape: WorkflowShape = shape.parse().unwrap();
            for m in 1..9 {
                let p = sample_instance(&pool(50), m, 2, shape, Weights::default(), m as u64).unwrap();
                assert_eq!(p.workflow.task_indices().len(), m, "{shape}");
            }
        }
    }
}
