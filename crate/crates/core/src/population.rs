//! Shared solver machinery: evaluated individuals, parallel population
//! evaluation, variation operators and NSGA-style survivor selection.
//!
//! Solvers draw all randomness for a batch up front on the control thread
//! and only then evaluate the batch (possibly in parallel), so runs are
//! reproducible regardless of thread count.

use std::cmp::Ordering;

use rand::Rng;
use thiserror::Error;

use crate::decoder::{self, DecodeConfig, DecodeError, Genotype};
use crate::model::{evaluate, ObjectiveVector, ProblemInstance, Solution};
use crate::nsga2::{crowding_distance, non_dominated_sort};
use crate::parallel;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("population of {population} cannot fill a reference set of {refset}")]
    PopulationTooSmall { population: usize, refset: usize },
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// A genotype together with its decoded solution and objectives.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genotype: Genotype,
    pub solution: Solution,
    pub objectives: ObjectiveVector,
}

/// Decodes and evaluates a batch of genotypes, order-preserving and
/// parallel when the `parallel` feature is on. Genotypes must already be
/// conformant with the facility-count target.
pub fn evaluate_genotypes(
    instance: &ProblemInstance,
    genotypes: Vec<Genotype>,
    config: &DecodeConfig,
) -> Result<Vec<Individual>, SolveError> {
    let evaluated = parallel::map_slice(&genotypes, |genotype| {
        decoder::decode_strict(instance, genotype, config).map(|solution| {
            let objectives = evaluate(instance, &solution);
            (solution, objectives)
        })
    });
    genotypes
        .into_iter()
        .zip(evaluated)
        .map(|(genotype, result)| {
            let (solution, objectives) = result?;
            Ok(Individual { genotype, solution, objectives })
        })
        .collect()
}

/// Sequential twin of [`evaluate_genotypes`] for benchmarking the parallel
/// speedup.
pub fn evaluate_genotypes_seq(
    instance: &ProblemInstance,
    genotypes: Vec<Genotype>,
    config: &DecodeConfig,
) -> Result<Vec<Individual>, SolveError> {
    let evaluated = parallel::map_slice_seq(&genotypes, |genotype| {
        decoder::decode_strict(instance, genotype, config).map(|solution| {
            let objectives = evaluate(instance, &solution);
            (solution, objectives)
        })
    });
    genotypes
        .into_iter()
        .zip(evaluated)
        .map(|(genotype, result)| {
            let (solution, objectives) = result?;
            Ok(Individual { genotype, solution, objectives })
        })
        .collect()
}

/// Non-domination rank and crowding distance for every point.
pub fn rank_and_crowding(points: &[ObjectiveVector]) -> (Vec<usize>, Vec<f64>) {
    let fronts = non_dominated_sort(points);
    let mut rank = vec![0usize; points.len()];
    let mut crowding = vec![0.0f64; points.len()];
    for (front_rank, front) in fronts.iter().enumerate() {
        let members: Vec<ObjectiveVector> = front.iter().map(|&i| points[i]).collect();
        let distances = crowding_distance(&members);
        for (&i, d) in front.iter().zip(distances) {
            rank[i] = front_rank;
            crowding[i] = d;
        }
    }
    (rank, crowding)
}

/// `(rank asc, crowding desc)` — the NSGA-II crowded comparison.
pub fn crowded_order(rank_a: usize, crowd_a: f64, rank_b: usize, crowd_b: f64) -> Ordering {
    rank_a.cmp(&rank_b).then(crowd_b.total_cmp(&crowd_a))
}

/// NSGA-II survivor selection: admit whole fronts while they fit, then
/// truncate the last front by descending crowding distance (ties keep the
/// lower index).
pub fn select_survivors(pool: Vec<Individual>, target: usize) -> Vec<Individual> {
    if pool.len() <= target {
        return pool;
    }
    let points: Vec<ObjectiveVector> = pool.iter().map(|ind| ind.objectives).collect();
    let fronts = non_dominated_sort(&points);
    let mut keep: Vec<usize> = Vec::with_capacity(target);
    for front in fronts {
        if keep.len() + front.len() <= target {
            keep.extend(front);
            if keep.len() == target {
                break;
            }
        } else {
            let members: Vec<ObjectiveVector> = front.iter().map(|&i| points[i]).collect();
            let distances = crowding_distance(&members);
            let mut by_crowding: Vec<usize> = (0..front.len()).collect();
            by_crowding.sort_by(|&a, &b| distances[b].total_cmp(&distances[a]).then(a.cmp(&b)));
            keep.extend(by_crowding.into_iter().take(target - keep.len()).map(|k| front[k]));
            break;
        }
    }
    keep.sort_unstable();
    let mut keep_flags = vec![false; pool.len()];
    for i in keep {
        keep_flags[i] = true;
    }
    pool.into_iter()
        .zip(keep_flags)
        .filter_map(|(ind, keep)| keep.then_some(ind))
        .collect()
}

/// One-point crossover on site bits plus order crossover on priorities.
pub fn crossover<R: Rng>(a: &Genotype, b: &Genotype, rng: &mut R) -> (Genotype, Genotype) {
    let n_sites = a.site_bits.len();
    let (mut bits_a, mut bits_b) = (a.site_bits.clone(), b.site_bits.clone());
    if n_sites >= 2 {
        let cut = rng.random_range(1..n_sites);
        for j in cut..n_sites {
            std::mem::swap(&mut bits_a[j], &mut bits_b[j]);
        }
    }
    let (prio_a, prio_b) = order_crossover(&a.priority, &b.priority, rng);
    (
        Genotype { site_bits: bits_a, priority: prio_a },
        Genotype { site_bits: bits_b, priority: prio_b },
    )
}

/// OX: each child keeps a random segment of one parent and fills the rest
/// in the other parent's order.
fn order_crossover<R: Rng>(a: &[usize], b: &[usize], rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let n = a.len();
    if n < 2 {
        return (a.to_vec(), b.to_vec());
    }
    let mut lo = rng.random_range(0..n);
    let mut hi = rng.random_range(0..n);
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let fill = |keeper: &[usize], donor: &[usize]| {
        let mut child = vec![usize::MAX; n];
        let mut in_segment = vec![false; n];
        for k in lo..=hi {
            child[k] = keeper[k];
            in_segment[keeper[k]] = true;
        }
        let mut slot = (hi + 1) % n;
        for step in 0..n {
            let candidate = donor[(hi + 1 + step) % n];
            if !in_segment[candidate] {
                child[slot] = candidate;
                slot = (slot + 1) % n;
            }
        }
        child
    };
    (fill(a, b), fill(b, a))
}

/// Per-bit flips at rate `pm / n_sites` plus one random priority swap with
/// probability `pm`.
pub fn mutate<R: Rng>(genotype: &mut Genotype, pm: f64, rng: &mut R) {
    let n_sites = genotype.site_bits.len();
    if n_sites > 0 {
        let per_bit = (pm / n_sites as f64).clamp(0.0, 1.0);
        for bit in &mut genotype.site_bits {
            if rng.random_bool(per_bit) {
                *bit = !*bit;
            }
        }
    }
    let n = genotype.priority.len();
    if n >= 2 && rng.random_bool(pm.clamp(0.0, 1.0)) {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        genotype.priority.swap(i, j);
    }
}

/// Binary tournament on (rank, crowding); equal contestants keep the first
/// drawn index.
pub fn binary_tournament<R: Rng>(
    rank: &[usize],
    crowding: &[f64],
    rng: &mut R,
) -> usize {
    let a = rng.random_range(0..rank.len());
    let b = rng.random_range(0..rank.len());
    match crowded_order(rank[a], crowding[a], rank[b], crowding[b]) {
        Ordering::Greater => b,
        _ => a,
    }
}
