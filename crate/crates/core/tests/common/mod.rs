//! Shared fixtures and reference implementations for integration tests.
//!
//! The reference functions here are written independently of the library
//! code they check: plain recursion and nested enumeration.

#![allow(dead_code)]

use qoscompose::qos::{example_quality_matrix, CompositionProblem, QosTriple, TaskClass, Weights, WorkflowNode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_triple(rng: &mut ChaCha8Rng) -> QosTriple {
    QosTriple::new(rng.gen_range(1.0..100.0), rng.gen_range(1.0..100.0), rng.gen_range(1.0..100.0))
}

/// Random tree over the tasks `lo..hi`, each task used exactly once.
pub fn random_tree(rng: &mut ChaCha8Rng, lo: usize, hi: usize, depth: u32) -> WorkflowNode {
    let n = hi - lo;
    if n == 1 {
        return if depth < 3 && rng.gen_bool(0.2) {
            WorkflowNode::looped(WorkflowNode::Atomic(lo), rng.gen_range(1..=3))
        } else {
            WorkflowNode::Atomic(lo)
        };
    }
    let parts = rng.gen_range(2..=n.min(3));
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, n - 1, parts - 1).into_iter().map(|c| lo + c + 1).collect();
    cuts.sort_unstable();
    let mut bounds = vec![lo];
    bounds.extend(cuts);
    bounds.push(hi);
    let children: Vec<WorkflowNode> =
        bounds.windows(2).map(|w| random_tree(rng, w[0], w[1], depth + 1)).collect();
    match rng.gen_range(0..4) {
        0 => WorkflowNode::Fork(children),
        1 => {
            let raw: Vec<f64> = children.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = raw.iter().sum();
            WorkflowNode::Branch { probabilities: raw.iter().map(|p| p / total).collect(), children }
        }
        2 if depth < 2 => WorkflowNode::looped(WorkflowNode::Sequence(children), rng.gen_range(1..=3)),
        _ => WorkflowNode::Sequence(children),
    }
}

pub fn random_weights(rng: &mut ChaCha8Rng) -> Weights {
    let raw: [f64; 3] = [rng.gen_range(0.05..1.0), rng.gen_range(0.05..1.0), rng.gen_range(0.05..1.0)];
    let total: f64 = raw.iter().sum();
    Weights::new(raw[0] / total, raw[1] / total, raw[2] / total)
}

/// Random valid problem with 1..=`max_tasks` tasks of 1..=`max_cands`
/// candidates and a random workflow tree.
pub fn random_problem(seed: u64, max_tasks: usize, max_cands: usize) -> CompositionProblem {
    let mut rng = rng(seed);
    let m = rng.gen_range(1..=max_tasks);
    let tasks = (0..m)
        .map(|i| {
            let n = rng.gen_range(1..=max_cands);
            let triples: Vec<QosTriple> = (0..n).map(|_| random_triple(&mut rng)).collect();
            TaskClass::from_triples(i, &triples)
        })
        .collect();
    let workflow = random_tree(&mut rng, 0, m, 0);
    let weights = random_weights(&mut rng);
    CompositionProblem { tasks, workflow, weights }
}

/// Random problem with at most `max_combos` combinations.
pub fn random_small_problem(seed: u64, max_combos: u128) -> CompositionProblem {
    (0..)
        .map(|k| random_problem(seed.wrapping_mul(1_000_003).wrapping_add(k), 5, 4))
        .find(|p| p.combination_count() <= max_combos)
        .expect("small problems are common")
}

/// Example-matrix tasks t0, t2, t3 and t5 (three candidates each) in sequence:
/// 81 combinations.
pub fn table_81() -> CompositionProblem {
    let m = example_quality_matrix();
    let tasks = [0, 2, 3, 5].iter().enumerate().map(|(i, &t)| TaskClass::from_triples(i, &m[t])).collect();
    CompositionProblem { tasks, workflow: WorkflowNode::sequence_of(4), weights: Weights::default() }
}

/// Example-matrix rows `rows` as a problem with the given workflow.
pub fn table_problem(rows: &[usize], workflow: WorkflowNode, weights: Weights) -> CompositionProblem {
    let m = example_quality_matrix();
    let tasks = rows.iter().enumerate().map(|(i, &t)| TaskClass::from_triples(i, &m[t])).collect();
    CompositionProblem { tasks, workflow, weights }
}

/// Reference aggregation by direct recursion.
pub fn ref_aggregate(node: &WorkflowNode, pick: &dyn Fn(usize) -> [f64; 3]) -> [f64; 3] {
    match node {
        WorkflowNode::Atomic(t) => pick(*t),
        WorkflowNode::Sequence(cs) => {
            let mut acc = [0.0, 0.0, 1.0];
            for c in cs {
                let v = ref_aggregate(c, pick);
                acc = [acc[0] + v[0], acc[1] + v[1], acc[2] * v[2]];
            }
            acc
        }
        WorkflowNode::Loop { body, k } => {
            let v = ref_aggregate(body, pick);
            let mut c = 1.0;
            for _ in 0..*k {
                c *= v[2];
            }
            [v[0] * *k as f64, v[1] * *k as f64, c]
        }
        WorkflowNode::Branch { children, probabilities } => {
            let mut acc = [0.0; 3];
            for (c, p) in children.iter().zip(probabilities) {
                let v = ref_aggregate(c, pick);
                for i in 0..3 {
                    acc[i] += p * v[i];
                }
            }
            acc
        }
        WorkflowNode::Fork(cs) => {
            let vs: Vec<[f64; 3]> = cs.iter().map(|c| ref_aggregate(c, pick)).collect();
            [
                vs.iter().map(|v| v[0]).fold(f64::MIN, f64::max),
                vs.iter().map(|v| v[1]).fold(f64::MIN, f64::max),
                vs.iter().map(|v| v[2]).fold(f64::MAX, f64::min),
            ]
        }
    }
}

pub fn ref_raw(p: &CompositionProblem, genes: &[usize]) -> [f64; 3] {
    ref_aggregate(&p.workflow, &|t| p.tasks[t].candidates[genes[t]].qos.to_array())
}

/// Reference bounds: aggregate of per-task component-wise minima / maxima.
pub fn ref_bounds(p: &CompositionProblem) -> ([f64; 3], [f64; 3]) {
    let ext = |t: usize, f: fn(f64, f64) -> f64, init: f64| {
        let c = &p.tasks[t].candidates;
        [0, 1, 2].map(|i| c.iter().map(|s| s.qos.to_array()[i]).fold(init, f))
    };
    let lo = ref_aggregate(&p.workflow, &|t| ext(t, f64::min, f64::MAX));
    let hi = ref_aggregate(&p.workflow, &|t| ext(t, f64::max, f64::MIN));
    (lo, hi)
}

pub fn ref_fitness(p: &CompositionProblem, genes: &[usize]) -> f64 {
    let raw = ref_raw(p, genes);
    let (lo, hi) = ref_bounds(p);
    let w = p.weights.to_array();
    (0..3)
        .map(|i| {
            let n = if hi[i] > lo[i] { ((raw[i] - lo[i]) / (hi[i] - lo[i])).clamp(0.0, 1.0) } else { 0.0 };
            w[i] * n
        })
        .sum()
}

/// Every genome of `pools` in lexicographic order.
pub fn all_genomes(pools: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in pools {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |j| {
                    let mut g = prefix.clone();
                    g.push(j);
                    g
                })
            })
            .collect();
    }
    out
}

/// Minimum fitness by exhaustive enumeration with the reference fitness.
pub fn ref_optimum(p: &CompositionProblem) -> f64 {
    all_genomes(&p.pool_sizes()).iter().map(|g| ref_fitness(p, g)).fold(f64::INFINITY, f64::min)
}
