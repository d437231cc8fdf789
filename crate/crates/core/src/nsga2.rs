//! Elitist non-dominated sorting genetic algorithm (NSGA-II).
//!
//! Each generation: binary-tournament parents by (rank, crowding), a fixed
//! child budget `nc = round(pc * npop / 2) * 2` produced by one-point
//! site-bit crossover plus order crossover on priorities, per-child
//! mutation, cardinality repair, then survivor selection over the combined
//! parent+child pool — whole fronts first, the last admitted front
//! truncated by descending crowding distance. Termination is a fixed
//! iteration budget. The returned archive is the first front of the final
//! population.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::archive::{ArchiveEntry, ParetoArchive};
use crate::decoder::{repair, DecodeConfig, Genotype};
use crate::model::{ObjectiveVector, ProblemInstance};
use crate::population::{
    binary_tournament, crossover, evaluate_genotypes, mutate, rank_and_crowding, select_survivors,
    Individual, SolveError,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NsgaConfig {
    /// Even population size, at least 4.
    pub population_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub max_iterations: usize,
    /// Exact number of open facilities to enforce (p-median style).
    pub facility_count: Option<usize>,
    pub seed: u64,
}

impl Default for NsgaConfig {
    fn default() -> Self {
        // tuned operating point: population 60, pc 0.7, pm 0.5
        NsgaConfig {
            population_size: 60,
            crossover_rate: 0.7,
            mutation_rate: 0.5,
            max_iterations: 60,
            facility_count: None,
            seed: 0,
        }
    }
}

impl NsgaConfig {
    /// Children per generation: `round(pc * npop / 2) * 2`.
    pub fn child_count(&self) -> usize {
        ((self.crossover_rate * self.population_size as f64 / 2.0).round() as usize) * 2
    }

    pub fn validate(&self, instance: &ProblemInstance) -> Result<(), SolveError> {
        if self.population_size < 4 || self.population_size % 2 != 0 {
            return Err(SolveError::InvalidConfig(format!(
                "population size must be an even integer >= 4, got {}",
                self.population_size
            )));
        }
        for (name, rate) in [("crossover", self.crossover_rate), ("mutation", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&rate) || rate.is_nan() {
                return Err(SolveError::InvalidConfig(format!(
                    "{name} rate must lie in [0, 1], got {rate}"
                )));
            }
        }
        if self.max_iterations < 1 {
            return Err(SolveError::InvalidConfig("max iterations must be >= 1".into()));
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

/// Fast non-dominated sort (minimization). Fronts partition the indices;
/// indices inside each front stay in ascending order.
pub fn non_dominated_sort(points: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if points[i].dominates(&points[j]) {
                dominated_by[i].push(j);
                domination_count[j] += 1;
            } else if points[j].dominates(&points[i]) {
                dominated_by[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance within one mutually non-dominated front: per
/// objective, boundary points get infinity and interior points accumulate
/// `(next - prev) / (max - min)`; zero-range objectives contribute nothing.
pub fn crowding_distance(front: &[ObjectiveVector]) -> Vec<f64> {
    let n = front.len();
    let mut distance = vec![0.0f64; n];
    if n == 0 {
        return distance;
    }
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    for objective in [|p: &ObjectiveVector| p.obj1, |p: &ObjectiveVector| p.obj2] {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| objective(&front[a]).total_cmp(&objective(&front[b])).then(a.cmp(&b)));
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = objective(&front[order[n - 1]]) - objective(&front[order[0]]);
        if range > 0.0 {
            for k in 1..n - 1 {
                let gap = objective(&front[order[k + 1]]) - objective(&front[order[k - 1]]);
                distance[order[k]] += gap / range;
            }
        }
    }
    distance
}

/// One NSGA-II generation: breed `n_children`, evaluate, keep the best
/// `population.len()` of the combined pool.
pub(crate) fn generation_step(
    instance: &ProblemInstance,
    population: Vec<Individual>,
    n_children: usize,
    mutation_rate: f64,
    decode_config: &DecodeConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Individual>, SolveError> {
    let target = population.len();
    let points: Vec<ObjectiveVector> = population.iter().map(|ind| ind.objectives).collect();
    let (rank, crowding) = rank_and_crowding(&points);

    let mut children: Vec<Genotype> = Vec::with_capacity(n_children);
    while children.len() < n_children {
        let a = binary_tournament(&rank, &crowding, rng);
        let b = binary_tournament(&rank, &crowding, rng);
        let (mut c1, mut c2) = crossover(&population[a].genotype, &population[b].genotype, rng);
        for child in [&mut c1, &mut c2] {
            mutate(child, mutation_rate, rng);
            if let Some(p) = decode_config.facility_count {
                repair(&mut child.site_bits, p, rng)?;
            }
        }
        children.push(c1);
        if children.len() < n_children {
            children.push(c2);
        }
    }

    let mut pool = population;
    pool.extend(evaluate_genotypes(instance, children, decode_config)?);
    Ok(select_survivors(pool, target))
}

pub(crate) fn random_population(
    instance: &ProblemInstance,
    size: usize,
    decode_config: &DecodeConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Individual>, SolveError> {
    let genotypes = (0..size)
        .map(|_| {
            Genotype::random(
                instance.n_sites(),
                instance.n_customers(),
                decode_config.facility_count,
                rng,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    evaluate_genotypes(instance, genotypes, decode_config)
}

pub(crate) fn first_front_archive(population: &[Individual]) -> ParetoArchive {
    let points: Vec<ObjectiveVector> = population.iter().map(|ind| ind.objectives).collect();
    let fronts = non_dominated_sort(&points);
    let mut archive = ParetoArchive::new();
    if let Some(first) = fronts.first() {
        archive.insert_all(first.iter().map(|&i| ArchiveEntry {
            genotype: population[i].genotype.clone(),
            solution: population[i].solution.clone(),
            objectives: population[i].objectives,
        }));
    }
    archive
}

/// Runs NSGA-II and returns the final Pareto archive. Deterministic for a
/// fixed seed at any thread count.
pub fn run_nsga2(
    instance: &ProblemInstance,
    config: &NsgaConfig,
) -> Result<ParetoArchive, SolveError> {
    config.validate(instance)?;
    let decode_config = DecodeConfig::with_facility_count(config.facility_count);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut population =
        random_population(instance, config.population_size, &decode_config, &mut rng)?;
    for _ in 0..config.max_iterations {
        population = generation_step(
            instance,
            population,
            config.child_count(),
            config.mutation_rate,
            &decode_config,
            &mut rng,
        )?;
    }
    Ok(first_front_archive(&population))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::coverage_fraction;
    use crate::model::check_feasibility;
    use crate::testutil::test_instance;

    fn v(a: f64, b: f64) -> ObjectiveVector {
        ObjectiveVector::new(a, b)
    }

    #[test]
    fn sort_simple_fronts() {
        let fronts = non_dominated_sort(&[v(1.0, 2.0), v(2.0, 1.0), v(3.0, 3.0)]);
        assert_eq!(fronts, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn sort_singleton() {
        assert_eq!(non_dominated_sort(&[v(1.0, 1.0)]), vec![vec![0]]);
    }

    #[test]
    fn sort_mixed_front() {
        let fronts = non_dominated_sort(&[v(1.0, 4.0), v(2.0, 3.0), v(3.0, 2.0), v(2.0, 5.0)]);
        assert_eq!(fronts, vec![vec![0, 1, 2], vec![3]]);
    }

    #[test]
    fn sort_partitions_and_orders_fronts() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let points: Vec<ObjectiveVector> =
            (0..60).map(|_| v(rng.random_range(0.0..10.0), rng.random_range(0.0..10.0))).collect();
        let fronts = non_dominated_sort(&points);
        let mut seen = vec![false; points.len()];
        for (k, front) in fronts.iter().enumerate() {
            for &i in front {
                assert!(!seen[i]);
                seen[i] = true;
                // nobody inside a front dominates a front member
                for &j in front {
                    assert!(!points[j].dominates(&points[i]));
                }
                // every member of front k+1.. is dominated by someone here or earlier
                if k > 0 {
                    assert!(
                        fronts[k - 1].iter().any(|&p| points[p].dominates(&points[i])),
                        "front {k} member {i} not dominated by front {}",
                        k - 1
                    );
                }
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn crowding_two_points_are_boundary() {
        let d = crowding_distance(&[v(1.0, 2.0), v(2.0, 1.0)]);
        assert!(d.iter().all(|x| x.is_infinite()));
    }

    #[test]
    fn crowding_interior_value() {
        let d = crowding_distance(&[v(1.0, 3.0), v(2.0, 2.0), v(3.0, 1.0)]);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        assert_eq!(d[1], 2.0);
    }

    #[test]
    fn crowding_identical_points() {
        let d = crowding_distance(&[v(1.0, 1.0), v(1.0, 1.0), v(1.0, 1.0), v(1.0, 1.0)]);
        // extremes per objective get infinity, interior contributions are 0
        assert!(d.iter().filter(|x| x.is_infinite()).count() >= 2);
        assert!(d.iter().filter(|x| x.is_finite()).all(|&x| x == 0.0));
    }

    #[test]
    fn forced_singleton_design() {
        let inst = test_instance(2, 1, 0.2, 1);
        let config = NsgaConfig {
            population_size: 8,
            max_iterations: 5,
            facility_count: Some(1),
            seed: 3,
            ..NsgaConfig::default()
        };
        let archive = run_nsga2(&inst, &config).unwrap();
        assert_eq!(archive.len(), 1);
    }

    #[test]
    fn deterministic_across_runs() {
        let inst = test_instance(6, 4, 0.3, 2);
        let config = NsgaConfig {
            population_size: 12,
            max_iterations: 8,
            facility_count: Some(2),
            seed: 21,
            ..NsgaConfig::default()
        };
        let a = run_nsga2(&inst, &config).unwrap();
        let b = run_nsga2(&inst, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn archive_members_feasible_and_non_dominated() {
        let inst = test_instance(6, 4, 0.25, 2);
        let config = NsgaConfig {
            population_size: 12,
            max_iterations: 10,
            facility_count: Some(2),
            seed: 5,
            ..NsgaConfig::default()
        };
        let archive = run_nsga2(&inst, &config).unwrap();
        assert!(archive.is_mutually_non_dominated());
        for entry in archive.entries() {
            assert!(check_feasibility(&inst, &entry.solution, Some(2)).is_feasible());
        }
    }

    #[test]
    fn rejects_oversized_facility_count() {
        let inst = test_instance(3, 2, 0.1, 1);
        let config = NsgaConfig { facility_count: Some(5), ..NsgaConfig::default() };
        assert!(matches!(run_nsga2(&inst, &config), Err(SolveError::InvalidConfig(_))));
    }

    #[test]
    fn elitism_never_regresses_first_front() {
        use rand::SeedableRng;
        let inst = test_instance(5, 4, 0.3, 2);
        let decode_config = DecodeConfig::with_facility_count(Some(2));
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut population = random_population(&inst, 12, &decode_config, &mut rng).unwrap();
        let mut previous = first_front_archive(&population);
        for _ in 0..8 {
            population =
                generation_step(&inst, population, 8, 0.5, &decode_config, &mut rng).unwrap();
            let current = first_front_archive(&population);
            // every old front vector is matched or dominated by a new one
            for old in previous.objectives() {
                assert!(
                    current
                        .objectives()
                        .iter()
                        .any(|new| new == &old || new.dominates(&old)),
                    "front regressed: {old:?} lost"
                );
            }
            previous = current;
        }
    }

    #[test]
    fn tiny_instance_front_is_reasonable() {
        // on an ample-capacity instance the final front should cover the
        // obvious best-transport design
        let inst = test_instance(4, 3, 0.2, 1);
        let config = NsgaConfig {
            population_size: 16,
            max_iterations: 30,
            facility_count: Some(1),
            seed: 2,
            ..NsgaConfig::default()
        };
        let archive = run_nsga2(&inst, &config).unwrap();
        // exhaustive check over the three possible single-site designs
        let mut best = Vec::new();
        for j in 0..3 {
            let mut bits = vec![false; 3];
            bits[j] = true;
            let genotype = Genotype { site_bits: bits, priority: (0..4).collect() };
            let solution =
                crate::decoder::decode_strict(&inst, &genotype, &DecodeConfig::default()).unwrap();
            best.push(crate::model::evaluate(&inst, &solution));
        }
        let keep = crate::metrics::filter_non_dominated(&best);
        let reference: Vec<ObjectiveVector> = keep.into_iter().map(|i| best[i]).collect();
        assert!(coverage_fraction(&archive.objectives(), &reference, 1e-9) == 1.0);
    }
}
