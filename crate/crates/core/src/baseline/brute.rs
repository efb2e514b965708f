use thiserror::Error;

use crate::exec::Execution;
use crate::qos::{CompositionProblem, Genome, Objective};

pub const DEFAULT_COMBO_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{total} combinations exceed the cap of {cap}")]
pub struct TooLarge {
    pub total: u128,
    pub cap: u128,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub genome: Genome,
    pub fitness: f64,
    pub combinations: u128,
}

/// Genome at lexicographic rank `index` (last gene varies fastest).
fn genome_at(mut index: u128, pools: &[usize], out: &mut [usize]) {
    for (slot, &n) in out.iter_mut().zip(pools).rev() {
        *slot = (index % n as u128) as usize;
        index /= n as u128;
    }
}

/// Advances `genes` to the next genome in lexicographic order.
fn advance(genes: &mut [usize], pools: &[usize]) {
    for (g, &n) in genes.iter_mut().zip(pools).rev() {
        *g += 1;
        if *g < n {
            return;
        }
        *g = 0;
    }
}

/// Best (fitness, rank) over ranks `[start, end)`. Strict `<` keeps the
/// lowest rank among exact ties.
fn scan(objective: &Objective<'_>, pools: &[usize], start: u128, end: u128) -> (f64, u128) {
    let mut genes = vec![0; pools.len()];
    genome_at(start, pools, &mut genes);
    let mut best = (f64::INFINITY, start);
    for rank in start..end {
        let f = objective.evaluate(&genes);
        if f < best.0 {
            best = (f, rank);
        }
        advance(&mut genes, pools);
    }
    best
}

/// Enumerates every genome in lexicographic order and returns the first one
/// attaining the minimal fitness.
///
/// With [`Execution::Parallel`] the rank space is split into chunks; the
/// result is identical to the sequential scan.
pub fn brute_force_optimum(
    problem: &CompositionProblem,
    combo_cap: u128,
    exec: Execution,
) -> Result<BruteForceResult, TooLarge> {
    let total = problem.combination_count();
    if total > combo_cap {
        return Err(TooLarge { total, cap: combo_cap });
    }
    let objective = Objective::new(problem);
    let pools = problem.pool_sizes();
    let chunk: u128 = 4096;
    let chunks: Vec<(u128, u128)> = (0..total.div_ceil(chunk))
        .map(|c| (c * chunk, ((c + 1) * chunk).min(total)))
        .collect();
    let (fitness, rank) = exec
        .map(&chunks, |&(s, e)| scan(&objective, &pools, s, e))
        .into_iter()
        .fold((f64::INFINITY, 0), |best, cur| if cur.0 < best.0 { cur } else { best });
    let mut genes = vec![0; pools.len()];
    genome_at(rank, &pools, &mut genes);
    Ok(BruteForceResult { genome: Genome::new(genes), fitness, combinations: total })
}
