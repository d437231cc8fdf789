//! Exhaustive exact Pareto fronts for tiny instances.
//!
//! [`exact_front_full`] enumerates every open-site subset and, per subset,
//! every per-customer assignment chain, combining chains through the
//! shared capacity constraint with a depth-first search. Chains are
//! maximal-service: a customer carries a lost marker only when no open
//! site outside its chain could still absorb its demand, which is the
//! same service discipline the greedy decoder follows. Branches whose
//! objective lower bound is strictly dominated by an already-found point
//! are pruned; pruning is seeded with decoded greedy solutions so bounds
//! bite early.
//!
//! [`exact_front_decoder_reachable`] instead enumerates every genotype
//! (subset x priority permutation) through the decoder itself, yielding
//! the tightest front the metaheuristics can possibly reach.
//!
//! Both searches fan out over site subsets in parallel and merge in a
//! fixed order, so results do not depend on thread count.

use itertools::Itertools;
use thiserror::Error;

use crate::decoder::{decode_strict, DecodeConfig, Genotype};
use crate::model::{
    evaluate, level_service_weight, lost_weight, ObjectiveVector, ProblemInstance, Solution,
};
use crate::parallel;

/// Guard rails for the exhaustive searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleLimits {
    pub max_sites: usize,
    pub max_customers: usize,
    pub max_levels: usize,
    /// Cap on assignment-combination nodes visited by the full search.
    pub max_nodes: u64,
    /// Cap on genotype decodes for the decoder-reachable search.
    pub max_genotypes: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_sites: 6,
            max_customers: 6,
            max_levels: 2,
            max_nodes: 1_000_000_000,
            max_genotypes: 5_000_000,
        }
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance exceeds oracle guard rails: {what} is {actual}, limit {limit}")]
    TooLarge { what: &'static str, actual: u64, limit: u64 },
    #[error("enumeration stopped: node budget of {limit} exhausted")]
    Budget { limit: u64 },
    #[error("facility count {target} exceeds the {sites} candidate sites")]
    BadFacilityCount { target: usize, sites: usize },
}

fn check_limits(
    instance: &ProblemInstance,
    facility_count: Option<usize>,
    limits: &OracleLimits,
) -> Result<(), OracleError> {
    let checks: [(&'static str, u64, u64); 3] = [
        ("site count", instance.n_sites() as u64, limits.max_sites as u64),
        ("customer count", instance.n_customers() as u64, limits.max_customers as u64),
        ("assignment levels", instance.r_levels() as u64, limits.max_levels as u64),
    ];
    for (what, actual, limit) in checks {
        if actual > limit {
            return Err(OracleError::TooLarge { what, actual, limit });
        }
    }
    if let Some(p) = facility_count {
        if p > instance.n_sites() {
            return Err(OracleError::BadFacilityCount { target: p, sites: instance.n_sites() });
        }
    }
    Ok(())
}

fn site_subsets(n_sites: usize, facility_count: Option<usize>) -> Vec<Vec<usize>> {
    match facility_count {
        Some(p) => (0..n_sites).combinations(p).collect(),
        None => (0..=n_sites)
            .flat_map(|k| (0..n_sites).combinations(k))
            .collect(),
    }
}

/// One way to serve a single customer under a fixed open-site subset.
#[derive(Debug, Clone)]
struct Plan {
    sites: Vec<usize>,
    lost: Option<usize>,
    /// This plan's expected customer cost.
    cost: f64,
    /// Expected demand added to `sites[r]`.
    expected: Vec<f64>,
}

fn enumerate_plans(instance: &ProblemInstance, customer: usize, open: &[usize]) -> Vec<Plan> {
    let r_levels = instance.r_levels();
    let mut plans = Vec::new();
    let mut prefix: Vec<usize> = Vec::new();
    extend_plans(instance, customer, open, r_levels, &mut prefix, &mut plans);
    plans
}

fn extend_plans(
    instance: &ProblemInstance,
    customer: usize,
    open: &[usize],
    r_levels: usize,
    prefix: &mut Vec<usize>,
    plans: &mut Vec<Plan>,
) {
    if prefix.len() == r_levels {
        plans.push(build_plan(instance, customer, prefix, None));
        return;
    }
    // stop here: customer lost from this level on
    plans.push(build_plan(instance, customer, prefix, Some(prefix.len())));
    for &j in open {
        if !prefix.contains(&j) {
            prefix.push(j);
            extend_plans(instance, customer, open, r_levels, prefix, plans);
            prefix.pop();
        }
    }
}

fn build_plan(
    instance: &ProblemInstance,
    customer: usize,
    sites: &[usize],
    lost: Option<usize>,
) -> Plan {
    let record = &instance.customers()[customer];
    let q = instance.q();
    let mut cost = 0.0;
    let mut expected = Vec::with_capacity(sites.len());
    for (r, &j) in sites.iter().enumerate() {
        let weight = level_service_weight(q, r);
        cost += record.demand * instance.distance(customer, j) * weight;
        expected.push(record.demand * weight);
    }
    if let Some(s) = lost {
        cost += record.demand * record.penalty * lost_weight(q, s);
    }
    Plan { sites: sites.to_vec(), lost, cost, expected }
}

/// Non-dominated set of objective vectors with one witness each; the first
/// witness of every vector is the one kept.
#[derive(Debug, Default, Clone)]
struct WitnessFront {
    items: Vec<(ObjectiveVector, Solution)>,
}

impl WitnessFront {
    fn insert_with(
        &mut self,
        vector: ObjectiveVector,
        witness: impl FnOnce() -> Solution,
    ) -> bool {
        if self
            .items
            .iter()
            .any(|(v, _)| v.dominates(&vector) || *v == vector)
        {
            return false;
        }
        self.items.retain(|(v, _)| !vector.dominates(v));
        self.items.push((vector, witness()));
        true
    }

    fn strictly_dominates(&self, bound: ObjectiveVector) -> bool {
        self.items
            .iter()
            .any(|(v, _)| v.obj1 < bound.obj1 && v.obj2 < bound.obj2)
    }
}

struct SubsetSearch<'a> {
    instance: &'a ProblemInstance,
    open: Vec<usize>,
    open_bits: Vec<bool>,
    plans: Vec<Vec<Plan>>,
    setup_total: f64,
    loads: Vec<f64>,
    served: Vec<f64>,
    chosen: Vec<usize>,
    front: WitnessFront,
    nodes: u64,
    max_nodes: u64,
}

impl<'a> SubsetSearch<'a> {
    fn new(instance: &'a ProblemInstance, open: Vec<usize>, max_nodes: u64) -> Self {
        let open_bits = {
            let mut bits = vec![false; instance.n_sites()];
            for &j in &open {
                bits[j] = true;
            }
            bits
        };
        let plans = (0..instance.n_customers())
            .map(|i| enumerate_plans(instance, i, &open))
            .collect();
        let setup_total: f64 = open.iter().map(|&j| instance.sites()[j].setup_cost).sum();
        SubsetSearch {
            instance,
            open_bits,
            plans,
            setup_total,
            loads: vec![0.0; instance.n_sites()],
            served: vec![0.0; instance.n_sites()],
            chosen: Vec::new(),
            front: WitnessFront::default(),
            nodes: 0,
            max_nodes,
            open,
        }
    }

    fn seed_with_decodes(&mut self) {
        let config = DecodeConfig::default();
        let n = self.instance.n_customers();
        let forward: Vec<usize> = (0..n).collect();
        let backward: Vec<usize> = (0..n).rev().collect();
        for priority in [forward, backward] {
            let genotype = Genotype { site_bits: self.open_bits.clone(), priority };
            if let Ok(solution) = decode_strict(self.instance, &genotype, &config) {
                let vector = evaluate(self.instance, &solution);
                self.front.insert_with(vector, || solution);
            }
        }
    }

    fn obj1_bound(&self) -> f64 {
        let mut total = self.setup_total;
        for &j in &self.open {
            let d_j = self.served[j];
            if d_j > 0.0 {
                let site = &self.instance.sites()[j];
                total += (2.0 * site.order_cost * site.holding_cost * d_j).sqrt();
                total += site.unit_order_cost * d_j;
            }
        }
        total
    }

    fn count_node(&mut self) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(OracleError::Budget { limit: self.max_nodes });
        }
        Ok(())
    }

    fn run(mut self) -> Result<(WitnessFront, u64), OracleError> {
        self.seed_with_decodes();
        self.dfs(0, 0.0)?;
        Ok((self.front, self.nodes))
    }

    fn dfs(&mut self, depth: usize, cost_max: f64) -> Result<(), OracleError> {
        if depth == self.instance.n_customers() {
            if self.is_maximal_service() {
                let vector = ObjectiveVector::new(self.obj1_bound(), cost_max);
                let witness = self.materialize();
                self.front.insert_with(vector, || witness);
            }
            return Ok(());
        }
        let demand = self.instance.customers()[depth].demand;
        for plan_index in 0..self.plans[depth].len() {
            let plan = &self.plans[depth][plan_index];
            // capacity feasibility of this chain
            let fits = plan.sites.iter().all(|&j| {
                self.loads[j] + demand <= self.instance.sites()[j].capacity
            });
            if !fits {
                continue;
            }
            let plan_cost = plan.cost;
            let plan_sites = plan.sites.clone();
            let plan_expected = plan.expected.clone();
            self.count_node()?;
            for (r, &j) in plan_sites.iter().enumerate() {
                self.loads[j] += demand;
                self.served[j] += plan_expected[r];
            }
            self.chosen.push(plan_index);

            let bound = ObjectiveVector::new(self.obj1_bound(), cost_max.max(plan_cost));
            if !self.front.strictly_dominates(bound) {
                self.dfs(depth + 1, cost_max.max(plan_cost))?;
            }

            self.chosen.pop();
            for (r, &j) in plan_sites.iter().enumerate() {
                self.loads[j] -= demand;
                self.served[j] -= plan_expected[r];
            }
        }
        Ok(())
    }

    /// True when no lost customer could still be extended with an open
    /// site outside its chain under the final loads.
    fn is_maximal_service(&self) -> bool {
        self.chosen.iter().enumerate().all(|(i, &plan_index)| {
            let plan = &self.plans[i][plan_index];
            if plan.lost.is_none() {
                return true;
            }
            let demand = self.instance.customers()[i].demand;
            !self.open.iter().any(|&j| {
                !plan.sites.contains(&j)
                    && self.loads[j] + demand <= self.instance.sites()[j].capacity
            })
        })
    }

    fn materialize(&self) -> Solution {
        let assignments = self
            .chosen
            .iter()
            .enumerate()
            .map(|(i, &k)| self.plans[i][k].sites.clone())
            .collect();
        let lost_level = self
            .chosen
            .iter()
            .enumerate()
            .map(|(i, &k)| self.plans[i][k].lost)
            .collect();
        Solution { open: self.open_bits.clone(), assignments, lost_level }
    }
}

/// Exact Pareto front over every open-site subset of the requested size
/// (all subsets when `facility_count` is `None`) and every maximal-service
/// assignment, sorted by rising first objective, one witness per vector.
pub fn exact_front_full(
    instance: &ProblemInstance,
    facility_count: Option<usize>,
    limits: &OracleLimits,
) -> Result<Vec<(Solution, ObjectiveVector)>, OracleError> {
    check_limits(instance, facility_count, limits)?;
    let subsets = site_subsets(instance.n_sites(), facility_count);
    let per_subset = parallel::map_slice(&subsets, |open| {
        SubsetSearch::new(instance, open.clone(), limits.max_nodes).run()
    });
    let mut merged = WitnessFront::default();
    let mut total_nodes: u64 = 0;
    for result in per_subset {
        let (front, nodes) = result?;
        total_nodes += nodes;
        if total_nodes > limits.max_nodes {
            return Err(OracleError::Budget { limit: limits.max_nodes });
        }
        for (vector, witness) in front.items {
            merged.insert_with(vector, || witness);
        }
    }
    let mut items = merged.items;
    items.sort_by(|(a, _), (b, _)| a.obj1.total_cmp(&b.obj1).then(a.obj2.total_cmp(&b.obj2)));
    Ok(items.into_iter().map(|(vector, witness)| (witness, vector)).collect())
}

/// Exact Pareto front restricted to decoder-expressible solutions: every
/// site subset of the requested size crossed with every customer priority
/// permutation, decoded greedily. Sorted by rising first objective.
pub fn exact_front_decoder_reachable(
    instance: &ProblemInstance,
    facility_count: Option<usize>,
    limits: &OracleLimits,
) -> Result<Vec<ObjectiveVector>, OracleError> {
    check_limits(instance, facility_count, limits)?;
    let subsets = site_subsets(instance.n_sites(), facility_count);
    let permutations: u64 = (1..=instance.n_customers() as u64).product();
    let genotypes = permutations.saturating_mul(subsets.len() as u64);
    if genotypes > limits.max_genotypes {
        return Err(OracleError::TooLarge {
            what: "genotype count",
            actual: genotypes,
            limit: limits.max_genotypes,
        });
    }
    let config = DecodeConfig::default();
    let per_subset = parallel::map_slice(&subsets, |open| {
        let mut bits = vec![false; instance.n_sites()];
        for &j in open {
            bits[j] = true;
        }
        let mut front: Vec<ObjectiveVector> = Vec::new();
        for priority in (0..instance.n_customers()).permutations(instance.n_customers()) {
            let genotype = Genotype { site_bits: bits.clone(), priority };
            let solution = decode_strict(instance, &genotype, &config)
                .expect("constructed genotypes are always well-formed");
            let vector = evaluate(instance, &solution);
            insert_vector(&mut front, vector);
        }
        front
    });
    let mut merged: Vec<ObjectiveVector> = Vec::new();
    for front in per_subset {
        for vector in front {
            insert_vector(&mut merged, vector);
        }
    }
    merged.sort_by(|a, b| a.obj1.total_cmp(&b.obj1).then(a.obj2.total_cmp(&b.obj2)));
    Ok(merged)
}

fn insert_vector(front: &mut Vec<ObjectiveVector>, vector: ObjectiveVector) {
    if front.iter().any(|v| v.dominates(&vector) || *v == vector) {
        return;
    }
    front.retain(|v| !vector.dominates(v));
    front.push(vector);
}
