use std::fmt;

/// Response time, energy and cost of a single service or of an aggregate.
///
/// All three attributes are "negative" quality factors: lower is better.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QosTriple {
    /// Milliseconds.
    pub response_time: f64,
    pub energy: f64,
    pub cost: f64,
}

impl QosTriple {
    pub const fn new(response_time: f64, energy: f64, cost: f64) -> Self {
        Self { response_time, energy, cost }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.response_time, self.energy, self.cost]
    }

    pub fn from_array([response_time, energy, cost]: [f64; 3]) -> Self {
        Self { response_time, energy, cost }
    }

    /// Every component finite and non-negative.
    pub fn is_valid(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite() && *v >= 0.0)
    }

    pub fn component_min(self, other: Self) -> Self {
        Self::new(
            self.response_time.min(other.response_time),
            self.energy.min(other.energy),
            self.cost.min(other.cost),
        )
    }

    pub fn component_max(self, other: Self) -> Self {
        Self::new(
            self.response_time.max(other.response_time),
            self.energy.max(other.energy),
            self.cost.max(other.cost),
        )
    }

    /// `self <= other` in every component.
    pub fn dominated_by(&self, other: &Self) -> bool {
        self.response_time <= other.response_time
            && self.energy <= other.energy
            && self.cost <= other.cost
    }
}

impl fmt::Display for QosTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(T={}, E={}, C={})", self.response_time, self.energy, self.cost)
    }
}

/// A concrete service able to fulfil one abstract task.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateService {
    pub task_index: usize,
    pub candidate_index: usize,
    pub qos: QosTriple,
    pub service_id: String,
}

/// An abstract task together with its pool of interchangeable candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskClass {
    pub index: usize,
    pub candidates: Vec<CandidateService>,
}

impl TaskClass {
    /// Builds a task from bare triples, labelling services `w{task}_{candidate}`.
    pub fn from_triples(index: usize, triples: &[QosTriple]) -> Self {
        let candidates = triples
            .iter()
            .enumerate()
            .map(|(j, qos)| CandidateService {
                task_index: index,
                candidate_index: j,
                qos: *qos,
                service_id: format!("w{index}_{j}"),
            })
            .collect();
        Self { index, candidates }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Component-wise minimum over the candidate pool.
    pub fn min_qos(&self) -> QosTriple {
        self.fold_qos(f64::INFINITY, QosTriple::component_min)
    }

    /// Component-wise maximum over the candidate pool.
    pub fn max_qos(&self) -> QosTriple {
        self.fold_qos(f64::NEG_INFINITY, QosTriple::component_max)
    }

    fn fold_qos(&self, init: f64, f: fn(QosTriple, QosTriple) -> QosTriple) -> QosTriple {
        self.candidates
            .iter()
            .map(|c| c.qos)
            .fold(QosTriple::new(init, init, init), f)
    }
}

/// Structure of the composite workflow. Leaves reference tasks by index.
#[derive(Debug, Clone, PartialEq)]
pub enum WorkflowNode {
    Atomic(usize),
    Sequence(Vec<WorkflowNode>),
    /// The body executes `k` times.
    Loop { body: Box<WorkflowNode>, k: u32 },
    /// Exactly one child runs, chosen with the matching probability.
    Branch { children: Vec<WorkflowNode>, probabilities: Vec<f64> },
    /// All children run in parallel.
    Fork(Vec<WorkflowNode>),
}

impl WorkflowNode {
    /// A flat sequence over tasks `0..m`.
    pub fn sequence_of(m: usize) -> Self {
        WorkflowNode::Sequence((0..m).map(WorkflowNode::Atomic).collect())
    }

    pub fn looped(body: WorkflowNode, k: u32) -> Self {
        WorkflowNode::Loop { body: Box::new(body), k }
    }

    /// Task indices of every leaf, in depth-first order.
    pub fn task_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_tasks(&mut out);
        out
    }

    fn collect_tasks(&self, out: &mut Vec<usize>) {
        match self {
            WorkflowNode::Atomic(t) => out.push(*t),
            WorkflowNode::Loop { body, .. } => body.collect_tasks(out),
            WorkflowNode::Sequence(cs) | WorkflowNode::Fork(cs) => {
                cs.iter().for_each(|c| c.collect_tasks(out))
            }
            WorkflowNode::Branch { children, .. } => {
                children.iter().for_each(|c| c.collect_tasks(out))
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            WorkflowNode::Atomic(_) => "atomic",
            WorkflowNode::Sequence(_) => "sequence",
            WorkflowNode::Loop { .. } => "loop",
            WorkflowNode::Branch { .. } => "branch",
            WorkflowNode::Fork(_) => "fork",
        }
    }
}

/// Objective weights for response time, energy and cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub response_time: f64,
    pub energy: f64,
    pub cost: f64,
}

impl Weights {
    pub const fn new(response_time: f64, energy: f64, cost: f64) -> Self {
        Self { response_time, energy, cost }
    }

    pub fn sum(&self) -> f64 {
        self.response_time + self.energy + self.cost
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.response_time, self.energy, self.cost]
    }
}

impl Default for Weights {
    fn default() -> Self {
        Self::new(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)
    }
}

/// Tasks with candidate pools, the workflow that connects them, and the
/// objective weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionProblem {
    pub tasks: Vec<TaskClass>,
    pub workflow: WorkflowNode,
    pub weights: Weights,
}

impl CompositionProblem {
    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    /// Candidate pool sizes, one per task.
    pub fn pool_sizes(&self) -> Vec<usize> {
        self.tasks.iter().map(TaskClass::len).collect()
    }

    /// Number of distinct genomes, saturating at `u128::MAX`.
    pub fn combination_count(&self) -> u128 {
        self.tasks
            .iter()
            .fold(1u128, |acc, t| acc.saturating_mul(t.len() as u128))
    }

    pub fn qos_of(&self, task: usize, candidate: usize) -> QosTriple {
        self.tasks[task].candidates[candidate].qos
    }
}

/// One candidate index per task. The unit of search for every optimizer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Genome(pub Vec<usize>);

impl Genome {
    pub fn new(genes: Vec<usize>) -> Self {
        Genome(genes)
    }

    pub fn zeros(len: usize) -> Self {
        Genome(vec![0; len])
    }

    pub fn genes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Whether every gene addresses an existing candidate of its task.
    pub fn is_valid_for(&self, problem: &CompositionProblem) -> bool {
        self.0.len() == problem.tasks.len()
            && self
                .0
                .iter()
                .zip(&problem.tasks)
                .all(|(g, t)| *g < t.candidates.len())
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str("]")
    }
}

/// Fixed normalization reference for the three aggregate objectives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveBounds {
    pub lower: QosTriple,
    pub upper: QosTriple,
}
