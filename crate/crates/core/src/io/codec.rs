//! Versioned JSON instance documents.
//!
//! ```json
//! {
//!   "schema": "qoscompose/1",
//!   "weights": { "response_time": 0.3333333333333333, "energy": ..., "cost": ... },
//!   "tasks": [
//!     { "candidates": [ { "id": "w0_0", "response_time": 30.0, "energy": 48.0, "cost": 90.0 } ] }
//!   ],
//!   "workflow": { "sequence": [ { "atomic": 0 }, { "loop": { "k": 2, "body": { "atomic": 1 } } } ] }
//! }
//! ```
//!
//! Workflow nodes are one of `atomic` (task index), `sequence` (array),
//! `fork` (array), `loop` (`k`, `body`) or `branch` (`probabilities`,
//! `children`). Task and candidate indices are implied by array position.
//! Reals are written in shortest round-trip form and read back exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qos::{CandidateService, CompositionProblem, QosTriple, TaskClass, Weights, WorkflowNode};

pub const INSTANCE_SCHEMA: &str = "qoscompose/1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodecError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unsupported schema `{found}`, expected `{expected}`")]
    SchemaVersionMismatch { found: String, expected: &'static str },
}

impl From<serde_json::Error> for CodecError {
    fn from(e: serde_json::Error) -> Self {
        CodecError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsDoc {
    response_time: f64,
    energy: f64,
    cost: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CandidateDoc {
    id: String,
    response_time: f64,
    energy: f64,
    cost: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskDoc {
    candidates: Vec<CandidateDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum NodeDoc {
    Atomic(usize),
    Sequence(Vec<NodeDoc>),
    Fork(Vec<NodeDoc>),
    Loop { k: u32, body: Box<NodeDoc> },
    Branch { probabilities: Vec<f64>, children: Vec<NodeDoc> },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    schema: String,
    weights: WeightsDoc,
    tasks: Vec<TaskDoc>,
    workflow: NodeDoc,
}

#[derive(Deserialize)]
struct SchemaProbe {
    schema: String,
}

impl From<&WorkflowNode> for NodeDoc {
    fn from(n: &WorkflowNode) -> Self {
        let many = |cs: &[WorkflowNode]| cs.iter().map(NodeDoc::from).collect();
        match n {
            WorkflowNode::Atomic(t) => NodeDoc::Atomic(*t),
            WorkflowNode::Sequence(cs) => NodeDoc::Sequence(many(cs)),
            WorkflowNode::Fork(cs) => NodeDoc::Fork(many(cs)),
            WorkflowNode::Loop { body, k } => NodeDoc::Loop { k: *k, body: Box::new((&**body).into()) },
            WorkflowNode::Branch { children, probabilities } => NodeDoc::Branch {
                probabilities: probabilities.clone(),
                children: many(children),
            },
        }
    }
}

impl From<NodeDoc> for WorkflowNode {
    fn from(n: NodeDoc) -> Self {
        let many = |cs: Vec<NodeDoc>| cs.into_iter().map(WorkflowNode::from).collect();
        match n {
            NodeDoc::Atomic(t) => WorkflowNode::Atomic(t),
            NodeDoc::Sequence(cs) => WorkflowNode::Sequence(many(cs)),
            NodeDoc::Fork(cs) => WorkflowNode::Fork(many(cs)),
            NodeDoc::Loop { k, body } => WorkflowNode::looped((*body).into(), k),
            NodeDoc::Branch { probabilities, children } => {
                WorkflowNode::Branch { probabilities, children: many(children) }
            }
        }
    }
}

/// Serializes `problem` as a pretty-printed `qoscompose/1` document.
pub fn write_instance(problem: &CompositionProblem) -> String {
    let doc = InstanceDoc {
        schema: INSTANCE_SCHEMA.to_owned(),
        weights: WeightsDoc {
            response_time: problem.weights.response_time,
            energy: problem.weights.energy,
            cost: problem.weights.cost,
        },
        tasks: problem
            .tasks
            .iter()
            .map(|t| TaskDoc {
                candidates: t
                    .candidates
                    .iter()
                    .map(|c| CandidateDoc {
                        id: c.service_id.clone(),
                        response_time: c.qos.response_time,
                        energy: c.qos.energy,
                        cost: c.qos.cost,
                    })
                    .collect(),
            })
            .collect(),
        workflow: (&problem.workflow).into(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("instance documents always serialize");
    s.push('\n');
    s
}

/// Parses a `qoscompose/1` document. Structural validity of the resulting
/// problem is checked separately with [`CompositionProblem::validate`].
pub fn read_instance(text: &str) -> Result<CompositionProblem, CodecError> {
    let probe: SchemaProbe = serde_json::from_str(text)?;
    if probe.schema != INSTANCE_SCHEMA {
        return Err(CodecError::SchemaVersionMismatch { found: probe.schema, expected: INSTANCE_SCHEMA });
    }
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let tasks = doc
        .tasks
        .into_iter()
        .enumerate()
        .map(|(t, task)| TaskClass {
            index: t,
            candidates: task
                .candidates
                .into_iter()
                .enumerate()
                .map(|(j, c)| CandidateService {
                    task_index: t,
                    candidate_index: j,
                    qos: QosTriple::new(c.response_time, c.energy, c.cost),
                    service_id: c.id,
                })
                .collect(),
        })
        .collect();
    Ok(CompositionProblem {
        tasks,
        workflow: doc.workflow.into(),
        weights: Weights::new(doc.weights.response_time, doc.weights.energy, doc.weights.cost),
    })
}
