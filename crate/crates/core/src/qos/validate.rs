use std::fmt;

use thiserror::Error;

use super::model::{CompositionProblem, WorkflowNode};

/// Tolerance on probability and weight sums.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Location of a workflow node as child offsets from the root, e.g. `/1/0`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    fn child(&self, i: usize) -> Self {
        let mut p = self.0.clone();
        p.push(i);
        NodePath(p)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for i in &self.0 {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

/// A single broken invariant of a [`CompositionProblem`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("problem has no tasks")]
    NoTasks,
    #[error("task {0} has no candidates")]
    EmptyCandidates(usize),
    #[error("tasks[{position}] carries index {found}")]
    TaskIndexMismatch { position: usize, found: usize },
    #[error("task {task} candidate at position {position} is labelled ({found_task}, {found_candidate})")]
    CandidateIndexMismatch {
        task: usize,
        position: usize,
        found_task: usize,
        found_candidate: usize,
    },
    #[error("task {task} candidate {candidate} has an invalid QoS value")]
    InvalidQos { task: usize, candidate: usize },
    #[error("branch at {node} has probabilities summing to {sum}")]
    BadProbabilitySum { node: NodePath, sum: f64 },
    #[error("branch at {node} has a probability outside [0, 1] or a child/probability count mismatch")]
    BadProbability { node: NodePath },
    #[error("loop at {node} has k = 0")]
    BadLoopCount { node: NodePath },
    #[error("{kind} at {node} has no children")]
    EmptyNode { node: NodePath, kind: &'static str },
    #[error("atomic node at {node} references unknown task {task}")]
    DanglingTaskIndex { node: NodePath, task: usize },
    #[error("task {0} appears more than once in the workflow")]
    DuplicateTask(usize),
    #[error("task {0} does not appear in the workflow")]
    MissingTask(usize),
    #[error("weights sum to {0}, expected 1")]
    WeightSumMismatch(f64),
    #[error("weight {name} = {value} is negative or not finite")]
    BadWeight { name: &'static str, value: f64 },
}

/// Every violation found in a problem, in discovery order.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid problem: {}", display_list(.0))]
pub struct ValidationReport(pub Vec<ProblemError>);

fn display_list(errs: &[ProblemError]) -> String {
    errs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl CompositionProblem {
    /// Checks all structural invariants, collecting every violation.
    pub fn validate(&self) -> Result<(), ValidationReport> {
        let mut errs = Vec::new();
        if self.tasks.is_empty() {
            errs.push(ProblemError::NoTasks);
        }
        for (pos, task) in self.tasks.iter().enumerate() {
            if task.index != pos {
                errs.push(ProblemError::TaskIndexMismatch { position: pos, found: task.index });
            }
            if task.candidates.is_empty() {
                errs.push(ProblemError::EmptyCandidates(pos));
            }
            for (j, c) in task.candidates.iter().enumerate() {
                if c.task_index != pos || c.candidate_index != j {
                    errs.push(ProblemError::CandidateIndexMismatch {
                        task: pos,
                        position: j,
                        found_task: c.task_index,
                        found_candidate: c.candidate_index,
                    });
                }
                if !c.qos.is_valid() {
                    errs.push(ProblemError::InvalidQos { task: pos, candidate: j });
                }
            }
        }

        let mut seen = vec![0usize; self.tasks.len()];
        check_node(&self.workflow, &NodePath::default(), self.tasks.len(), &mut seen, &mut errs);
        for (t, count) in seen.iter().enumerate() {
            match count {
                0 => errs.push(ProblemError::MissingTask(t)),
                1 => {}
                _ => errs.push(ProblemError::DuplicateTask(t)),
            }
        }

        let w = self.weights;
        for (name, value) in [("w1", w.response_time), ("w2", w.energy), ("w3", w.cost)] {
            if !value.is_finite() || value < 0.0 {
                errs.push(ProblemError::BadWeight { name, value });
            }
        }
        let sum = w.sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            errs.push(ProblemError::WeightSumMismatch(sum));
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(ValidationReport(errs))
        }
    }
}

fn check_node(
    node: &WorkflowNode,
    path: &NodePath,
    task_count: usize,
    seen: &mut [usize],
    errs: &mut Vec<ProblemError>,
) {
    let children = |cs: &[WorkflowNode], seen: &mut [usize], errs: &mut Vec<ProblemError>| {
        if cs.is_empty() {
            errs.push(ProblemError::EmptyNode { node: path.clone(), kind: node.kind() });
        }
        for (i, c) in cs.iter().enumerate() {
            check_node(c, &path.child(i), task_count, seen, errs);
        }
    };
    match node {
        WorkflowNode::Atomic(t) => {
            if *t < task_count {
                seen[*t] += 1;
            } else {
                errs.push(ProblemError::DanglingTaskIndex { node: path.clone(), task: *t });
            }
        }
        WorkflowNode::Sequence(cs) | WorkflowNode::Fork(cs) => children(cs, seen, errs),
        WorkflowNode::Loop { body, k } => {
            if *k == 0 {
                errs.push(ProblemError::BadLoopCount { node: path.clone() });
            }
            check_node(body, &path.child(0), task_count, seen, errs);
        }
        WorkflowNode::Branch { children: cs, probabilities } => {
            if probabilities.len() != cs.len()
                || probabilities.iter().any(|p| !(0.0..=1.0).contains(p))
            {
                errs.push(ProblemError::BadProbability { node: path.clone() });
            }
            let sum: f64 = probabilities.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                errs.push(ProblemError::BadProbabilitySum { node: path.clone(), sum });
            }
            children(cs, seen, errs);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qos::model::{QosTriple, TaskClass, Weights};

    fn two_tasks() -> Vec<TaskClass> {
        vec![
            TaskClass::from_triples(0, &[QosTriple::new(1.0, 1.0, 1.0)]),
            TaskClass::from_triples(1, &[QosTriple::new(2.0, 2.0, 2.0)]),
        ]
    }

    #[test]
    fn weight_sum_mismatch_reports_sum() {
        let p = CompositionProblem {
            tasks: two_tasks(),
            workflow: WorkflowNode::sequence_of(2),
            weights: Weights::new(0.5, 0.5, 0.1),
        };
        let report = p.validate().unwrap_err();
        assert_eq!(report.0.len(), 1);
        match &report.0[0] {
            ProblemError::WeightSumMismatch(s) => assert!((s - 1.1).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn branch_with_valid_probabilities_is_accepted() {
        let p = CompositionProblem {
            tasks: two_tasks(),
            workflow: WorkflowNode::Branch {
                children: vec![WorkflowNode::Atomic(0), WorkflowNode::Atomic(1)],
                probabilities: vec![0.6, 0.4],
            },
            weights: Weights::default(),
        };
        assert_eq!(p.validate(), Ok(()));
    }

    #[test]
    fn empty_candidate_pool() {
        let mut tasks = two_tasks();
        tasks.push(TaskClass { index: 2, candidates: vec![] });
        let p = CompositionProblem {
            tasks,
            workflow: WorkflowNode::sequence_of(3),
            weights: Weights::default(),
        };
        assert_eq!(p.validate().unwrap_err().0, vec![ProblemError::EmptyCandidates(2)]);
    }

    #[test]
    fn structural_errors_name_the_node() {
        let p = CompositionProblem {
            tasks: two_tasks(),
            workflow: WorkflowNode::Sequence(vec![
                WorkflowNode::Atomic(0),
                WorkflowNode::Atomic(0),
                WorkflowNode::Branch {
                    children: vec![WorkflowNode::Atomic(7)],
                    probabilities: vec![0.5],
                },
                WorkflowNode::looped(WorkflowNode::Fork(vec![]), 0),
            ]),
            weights: Weights::default(),
        };
        let errs = p.validate().unwrap_err().0;
        assert!(errs.contains(&ProblemError::DuplicateTask(0)));
        assert!(errs.contains(&ProblemError::MissingTask(1)));
        assert!(errs.contains(&ProblemError::DanglingTaskIndex {
            node: NodePath(vec![2, 0]),
            task: 7
        }));
        assert!(errs.contains(&ProblemError::BadProbabilitySum {
            node: NodePath(vec![2]),
            sum: 0.5
        }));
        assert!(errs.contains(&ProblemError::BadLoopCount { node: NodePath(vec![3]) }));
        assert!(errs.contains(&ProblemError::EmptyNode { node: NodePath(vec![3, 0]), kind: "fork" }));
        assert_eq!(NodePath(vec![2, 0]).to_string(), "/2/0");
    }

    #[test]
    fn negative_qos_rejected() {
        let mut tasks = two_tasks();
        tasks[1].candidates[0].qos.cost = -1.0;
        let p = CompositionProblem {
            tasks,
            workflow: WorkflowNode::sequence_of(2),
            weights: Weights::default(),
        };
        assert_eq!(
            p.validate().unwrap_err().0,
            vec![ProblemError::InvalidQos { task: 1, candidate: 0 }]
        );
    }
}
