//! Multi-objective scatter search.
//!
//! The pool starts from one genetic-algorithm generation. Each outer
//! iteration diversifies the pool (worst half regenerated at random), then
//! an inner loop alternates: crossover improvement of the pool, Pareto
//! archive update, reference-set construction (a quality tier by rank and
//! crowding plus a diversity tier by greedy farthest-point Hamming
//! distance on site bits), subset generation over the tiers, and a
//! combination step that crosses and mutates each subset pair into a trial
//! solution. The inner loop stops when an archive update yields nothing
//! new or after a fixed cap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::archive::{ArchiveEntry, ParetoArchive};
use crate::decoder::{repair, DecodeConfig, Genotype};
use crate::model::{ObjectiveVector, ProblemInstance};
use crate::nsga2::{generation_step, random_population};
use crate::population::{
    crossover, evaluate_genotypes, mutate, rank_and_crowding, select_survivors, Individual,
    SolveError,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MossConfig {
    /// Reference-set size `B`, at least 2. The pool holds `6 * B`
    /// individuals and the quality tier `round(refset1_fraction * B)`.
    pub refset_size: usize,
    pub refset1_fraction: f64,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Outer-loop iterations.
    pub max_iterations: usize,
    /// Inner-loop cap per outer iteration.
    pub inner_cap: usize,
    pub facility_count: Option<usize>,
    /// Optional cap on decode+evaluate calls; checked between batches.
    pub max_evaluations: Option<u64>,
    pub seed: u64,
}

impl Default for MossConfig {
    fn default() -> Self {
        MossConfig {
            refset_size: 10,
            refset1_fraction: 0.7,
            crossover_rate: 0.7,
            mutation_rate: 0.5,
            max_iterations: 10,
            inner_cap: 10,
            facility_count: None,
            max_evaluations: None,
            seed: 0,
        }
    }
}

impl MossConfig {
    pub fn population_size(&self) -> usize {
        6 * self.refset_size
    }

    pub fn refset1_size(&self) -> usize {
        ((self.refset1_fraction * self.refset_size as f64).round() as usize)
            .clamp(1, self.refset_size)
    }

    pub fn refset2_size(&self) -> usize {
        self.refset_size - self.refset1_size()
    }

    fn child_count(&self) -> usize {
        ((self.crossover_rate * self.population_size() as f64 / 2.0).round() as usize) * 2
    }

    pub fn validate(&self, instance: &ProblemInstance) -> Result<(), SolveError> {
        if self.refset_size < 2 {
            return Err(SolveError::InvalidConfig(format!(
                "reference set size must be >= 2, got {}",
                self.refset_size
            )));
        }
        if !(0.0..=1.0).contains(&self.refset1_fraction) {
            return Err(SolveError::InvalidConfig(format!(
                "refset1 fraction must lie in [0, 1], got {}",
                self.refset1_fraction
            )));
        }
        for (name, rate) in [("crossover", self.crossover_rate), ("mutation", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&rate) || rate.is_nan() {
                return Err(SolveError::InvalidConfig(format!(
                    "{name} rate must lie in [0, 1], got {rate}"
                )));
            }
        }
        if self.max_iterations < 1 || self.inner_cap < 1 {
            return Err(SolveError::InvalidConfig(
                "iteration budgets must be >= 1".into(),
            ));
        }
        if let Some(p) = self.facility_count {
            if p > instance.n_sites() {
                return Err(SolveError::InvalidConfig(format!(
                    "facility count {p} exceeds the {} candidate sites",
                    instance.n_sites()
                )));
            }
        }
        Ok(())
    }
}

/// Splits a population into the quality tier (best `round(split * b)` by
/// rank then crowding) and the diversity tier (filling the remainder by
/// greedy farthest-point on site-bit Hamming distance). Returns disjoint
/// index lists into `population`.
pub fn build_reference_set(
    population: &[Individual],
    b: usize,
    split: f64,
) -> Result<(Vec<usize>, Vec<usize>), SolveError> {
    if population.len() < b {
        return Err(SolveError::PopulationTooSmall { population: population.len(), refset: b });
    }
    let n1 = ((split * b as f64).round() as usize).clamp(1, b);
    let points: Vec<ObjectiveVector> = population.iter().map(|ind| ind.objectives).collect();
    let (rank, crowding) = rank_and_crowding(&points);
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| {
        crate::population::crowded_order(rank[a], crowding[a], rank[b], crowding[b])
            .then(a.cmp(&b))
    });
    let refset1: Vec<usize> = order[..n1].to_vec();

    let mut chosen = refset1.clone();
    let mut refset2 = Vec::with_capacity(b - n1);
    let mut candidates: Vec<usize> = order[n1..].to_vec();
    candidates.sort_unstable();
    while refset2.len() < b - n1 {
        let (pick_pos, _) = candidates
            .iter()
            .enumerate()
            .map(|(pos, &i)| {
                let min_dist = chosen
                    .iter()
                    .map(|&c| population[i].genotype.site_hamming(&population[c].genotype))
                    .min()
                    .unwrap_or(usize::MAX);
                (pos, min_dist)
            })
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("diversity tier cannot outgrow the population");
        let picked = candidates.remove(pick_pos);
        chosen.push(picked);
        refset2.push(picked);
    }
    Ok((refset1, refset2))
}

/// All unordered pairs touching the quality tier, as indices into the
/// concatenation `refset1 ++ refset2`, each emitted once.
pub fn subset_generation(
    refset1: &[Individual],
    refset2: &[Individual],
) -> Vec<(usize, usize)> {
    let n1 = refset1.len();
    let total = n1 + refset2.len();
    let mut pairs = Vec::new();
    for i in 0..n1 {
        for j in (i + 1)..total {
            pairs.push((i, j));
        }
    }
    pairs
}

fn entry_of(individual: &Individual) -> ArchiveEntry {
    ArchiveEntry {
        genotype: individual.genotype.clone(),
        solution: individual.solution.clone(),
        objectives: individual.objectives,
    }
}

/// One genetic-algorithm generation over a random pool, per the
/// initialization step.
pub(crate) fn seed_pool(
    instance: &ProblemInstance,
    config: &MossConfig,
    decode_config: &DecodeConfig,
    rng: &mut ChaCha8Rng,
    evaluations: &mut u64,
) -> Result<Vec<Individual>, SolveError> {
    let npop = config.population_size();
    let pool = random_population(instance, npop, decode_config, rng)?;
    *evaluations += npop as u64;
    let pool = generation_step(
        instance,
        pool,
        config.child_count(),
        config.mutation_rate,
        decode_config,
        rng,
    )?;
    *evaluations += config.child_count() as u64;
    Ok(pool)
}

/// Runs the scatter search and returns the Pareto archive. Deterministic
/// for a fixed seed at any thread count.
pub fn run_moss(instance: &ProblemInstance, config: &MossConfig) -> Result<ParetoArchive, SolveError> {
    config.validate(instance)?;
    let decode_config = DecodeConfig::with_facility_count(config.facility_count);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let npop = config.population_size();
    let budget = config.max_evaluations.unwrap_or(u64::MAX);
    let mut evaluations: u64 = 0;

    let mut pool = seed_pool(instance, config, &decode_config, &mut rng, &mut evaluations)?;
    let mut archive = ParetoArchive::new();

    'outer: for _ in 0..config.max_iterations {
        if evaluations >= budget {
            break;
        }
        // diversification: keep the better half, redraw the rest
        let points: Vec<ObjectiveVector> = pool.iter().map(|ind| ind.objectives).collect();
        let (rank, crowding) = rank_and_crowding(&points);
        let mut order: Vec<usize> = (0..pool.len()).collect();
        order.sort_by(|&a, &b| {
            crate::population::crowded_order(rank[a], crowding[a], rank[b], crowding[b])
                .then(a.cmp(&b))
        });
        let keep = npop - npop / 2;
        let mut kept: Vec<Individual> = order[..keep].iter().map(|&i| pool[i].clone()).collect();
        let fresh = random_population(instance, npop / 2, &decode_config, &mut rng)?;
        evaluations += (npop / 2) as u64;
        kept.extend(fresh);
        pool = kept;

        for _ in 0..config.inner_cap {
            if evaluations >= budget {
                break 'outer;
            }
            // improvement: one-point crossover over the pool
            let nc = config.child_count();
            let mut children: Vec<Genotype> = Vec::with_capacity(nc);
            while children.len() < nc {
                let a = rng.random_range(0..pool.len());
                let b = rng.random_range(0..pool.len());
                let (mut c1, mut c2) = crossover(&pool[a].genotype, &pool[b].genotype, &mut rng);
                for child in [&mut c1, &mut c2] {
                    if let Some(p) = decode_config.facility_count {
                        repair(&mut child.site_bits, p, &mut rng)?;
                    }
                }
                children.push(c1);
                if children.len() < nc {
                    children.push(c2);
                }
            }
            let improved = evaluate_genotypes(instance, children, &decode_config)?;
            evaluations += improved.len() as u64;
            pool.extend(improved);
            pool = select_survivors(pool, npop);

            // Pareto archive update
            let new_entries = archive.insert_all(pool.iter().map(entry_of));

            // reference set construction and subset generation
            let (refset1_idx, refset2_idx) =
                build_reference_set(&pool, config.refset_size, config.refset1_fraction)?;
            let combined: Vec<usize> =
                refset1_idx.iter().chain(refset2_idx.iter()).copied().collect();
            let refset1: Vec<Individual> =
                refset1_idx.iter().map(|&i| pool[i].clone()).collect();
            let refset2: Vec<Individual> =
                refset2_idx.iter().map(|&i| pool[i].clone()).collect();
            let pairs = subset_generation(&refset1, &refset2);

            // combination: cross each pair, then mutate the trial
            let mut trials: Vec<Genotype> = Vec::with_capacity(pairs.len());
            for (x, y) in pairs {
                let (mut trial, _) =
                    crossover(&pool[combined[x]].genotype, &pool[combined[y]].genotype, &mut rng);
                mutate(&mut trial, config.mutation_rate, &mut rng);
                if let Some(p) = decode_config.facility_count {
                    repair(&mut trial.site_bits, p, &mut rng)?;
                }
                trials.push(trial);
            }
            let combined_trials = evaluate_genotypes(instance, trials, &decode_config)?;
            evaluations += combined_trials.len() as u64;
            pool.extend(combined_trials);
            pool = select_survivors(pool, npop);

            if new_entries == 0 {
                break;
            }
        }
    }
    archive.insert_all(pool.iter().map(entry_of));
    Ok(archive)
}
