//! Genetic operators on candidate-index genomes, shared by every optimizer.

use rand::Rng;
use thiserror::Error;

use crate::qos::Genome;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperatorError {
    #[error("cut points ({r1}, {r2}) invalid for genome length {len}")]
    BadCutPoints { r1: usize, r2: usize, len: usize },
    #[error("parents have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("replacement {replacement} at position {position} is out of range")]
    InvalidReplacement { position: usize, replacement: usize },
}

/// Swaps the genes in the inclusive interval `[r1, r2]` between two parents.
///
/// Genes are per-task indices and tasks align positionally, so children of
/// valid parents are always valid.
pub fn two_point_crossover(
    parent1: &Genome,
    parent2: &Genome,
    r1: usize,
    r2: usize,
) -> Result<(Genome, Genome), OperatorError> {
    let len = parent1.len();
    if parent2.len() != len {
        return Err(OperatorError::LengthMismatch(len, parent2.len()));
    }
    if r1 > r2 || r2 >= len {
        return Err(OperatorError::BadCutPoints { r1, r2, len });
    }
    let mut c1 = parent1.clone();
    let mut c2 = parent2.clone();
    c1.0[r1..=r2].swap_with_slice(&mut c2.0[r1..=r2]);
    Ok((c1, c2))
}

/// Copy of `genome` with `genes[position] = replacement`.
///
/// `pool_sizes` gives the candidate count of each task.
pub fn one_point_mutation(
    genome: &Genome,
    position: usize,
    replacement: usize,
    pool_sizes: &[usize],
) -> Result<Genome, OperatorError> {
    match pool_sizes.get(position) {
        Some(&n) if position < genome.len() && replacement < n => {
            let mut g = genome.clone();
            g.0[position] = replacement;
            Ok(g)
        }
        _ => Err(OperatorError::InvalidReplacement { position, replacement }),
    }
}

/// Two uniform cut points in `[0, len)`, returned ordered (`r1 <= r2`).
pub fn random_cut_points<R: Rng + ?Sized>(rng: &mut R, len: usize) -> (usize, usize) {
    let a = rng.gen_range(0..len);
    let b = rng.gen_range(0..len);
    (a.min(b), a.max(b))
}

/// Uniform replacement for a gene, excluding `current` when the pool has
/// more than one candidate.
pub fn random_replacement<R: Rng + ?Sized>(rng: &mut R, pool: usize, current: usize) -> usize {
    if pool <= 1 {
        return current;
    }
    let r = rng.gen_range(0..pool - 1);
    if r >= current {
        r + 1
    } else {
        r
    }
}

/// One uniform random mutation: random position, random different candidate.
pub fn random_mutation<R: Rng + ?Sized>(rng: &mut R, genome: &mut Genome, pool_sizes: &[usize]) {
    let pos = rng.gen_range(0..genome.len());
    genome.0[pos] = random_replacement(rng, pool_sizes[pos], genome.0[pos]);
}

/// Uniformly random genome, genes drawn in task order.
pub fn random_genome<R: Rng + ?Sized>(rng: &mut R, pool_sizes: &[usize]) -> Genome {
    Genome::new(pool_sizes.iter().map(|&n| rng.gen_range(0..n)).collect())
}
