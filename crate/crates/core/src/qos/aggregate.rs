//! QoS aggregation over a workflow tree.
//!
//! | node     | response time | energy      | cost          |
//! |----------|---------------|-------------|---------------|
//! | sequence | sum           | sum         | product       |
//! | loop(k)  | k * body      | k * body    | body ^ k      |
//! | branch   | sum p_i * x_i | sum p_i*x_i | sum p_i * x_i |
//! | fork     | max           | max         | min           |
//!
//! Every operator is monotone non-decreasing in each operand component when
//! the operands are non-negative, which is what makes
//! [`objective_bounds`](super::objective_bounds) sound.

use super::model::{CompositionProblem, Genome, QosTriple, WorkflowNode};
use super::QosError;

/// Aggregates `node`, asking `leaf` for the triple of each atomic task.
pub fn aggregate_with<F>(node: &WorkflowNode, leaf: &F) -> QosTriple
where
    F: Fn(usize) -> QosTriple,
{
    match node {
        WorkflowNode::Atomic(t) => leaf(*t),
        WorkflowNode::Sequence(children) => children.iter().map(|c| aggregate_with(c, leaf)).fold(
            QosTriple::new(0.0, 0.0, 1.0),
            |acc, q| {
                QosTriple::new(
                    acc.response_time + q.response_time,
                    acc.energy + q.energy,
                    acc.cost * q.cost,
                )
            },
        ),
        WorkflowNode::Loop { body, k } => {
            let q = aggregate_with(body, leaf);
            let kf = f64::from(*k);
            let cost = match i32::try_from(*k) {
                Ok(ki) => q.cost.powi(ki),
                Err(_) => q.cost.powf(kf),
            };
            QosTriple::new(kf * q.response_time, kf * q.energy, cost)
        }
        WorkflowNode::Branch { children, probabilities } => children
            .iter()
            .zip(probabilities)
            .map(|(c, p)| (aggregate_with(c, leaf), *p))
            .fold(QosTriple::new(0.0, 0.0, 0.0), |acc, (q, p)| {
                QosTriple::new(
                    acc.response_time + p * q.response_time,
                    acc.energy + p * q.energy,
                    acc.cost + p * q.cost,
                )
            }),
        WorkflowNode::Fork(children) => {
            let mut iter = children.iter().map(|c| aggregate_with(c, leaf));
            let first = iter.next().unwrap_or_default();
            iter.fold(first, |acc, q| {
                QosTriple::new(
                    acc.response_time.max(q.response_time),
                    acc.energy.max(q.energy),
                    acc.cost.min(q.cost),
                )
            })
        }
    }
}

/// Raw aggregate QoS of `genome` over `workflow`, without bounds checks.
///
/// The caller guarantees `genome.is_valid_for(problem)`.
pub fn aggregate_unchecked(
    workflow: &WorkflowNode,
    problem: &CompositionProblem,
    genome: &[usize],
) -> QosTriple {
    aggregate_with(workflow, &|t| problem.qos_of(t, genome[t]))
}

/// Raw (un-normalized) aggregate QoS of the selection `genome`.
pub fn aggregate_qos(
    workflow: &WorkflowNode,
    problem: &CompositionProblem,
    genome: &Genome,
) -> Result<QosTriple, QosError> {
    if !genome.is_valid_for(problem) {
        return Err(QosError::InvalidGenome(genome.clone()));
    }
    Ok(aggregate_unchecked(workflow, problem, genome.genes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qos::model::{TaskClass, Weights};

    fn leaf_table(triples: Vec<QosTriple>) -> impl Fn(usize) -> QosTriple {
        move |t| triples[t]
    }

    #[test]
    fn fork_over_empty_is_zero() {
        // Never reachable for a validated problem; pinned so it cannot panic.
        let q = aggregate_with(&WorkflowNode::Fork(vec![]), &leaf_table(vec![]));
        assert_eq!(q, QosTriple::default());
    }

    #[test]
    fn nested_tree() {
        // loop2(seq(a, fork(b, c)))
        let leaf = leaf_table(vec![
            QosTriple::new(1.0, 2.0, 3.0),
            QosTriple::new(4.0, 1.0, 2.0),
            QosTriple::new(2.0, 5.0, 5.0),
        ]);
        let tree = WorkflowNode::looped(
            WorkflowNode::Sequence(vec![
                WorkflowNode::Atomic(0),
                WorkflowNode::Fork(vec![WorkflowNode::Atomic(1), WorkflowNode::Atomic(2)]),
            ]),
            2,
        );
        // seq: T = 1 + 4, E = 2 + 5, C = 3 * 2; loop: (10, 14, 36)
        assert_eq!(aggregate_with(&tree, &leaf), QosTriple::new(10.0, 14.0, 36.0));
    }

    #[test]
    fn out_of_range_gene_is_rejected() {
        let p = CompositionProblem {
            tasks: vec![TaskClass::from_triples(0, &[QosTriple::new(1.0, 1.0, 1.0)])],
            workflow: WorkflowNode::Atomic(0),
            weights: Weights::default(),
        };
        let g = Genome::new(vec![1]);
        assert!(matches!(
            aggregate_qos(&p.workflow, &p, &g),
            Err(QosError::InvalidGenome(_))
        ));
        assert!(aggregate_qos(&p.workflow, &p, &Genome::new(vec![0, 0])).is_err());
    }
}
