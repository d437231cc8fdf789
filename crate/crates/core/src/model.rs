//! Problem data, objective evaluation and feasibility checking.
//!
//! A [`ProblemInstance`] holds customers, candidate facility sites, a shared
//! failure probability `q` and the number of assignment levels `R`. A
//! [`Solution`] opens a subset of sites and assigns each customer to a chain
//! of backup facilities: the level-0 facility serves under normal conditions,
//! the level-r facility serves when all lower levels have failed (probability
//! `q^r (1-q)`). A customer whose chain stops short of `R` levels is marked
//! lost at the first unassigned level `s` and pays a penalty with
//! probability `q^s`.
//!
//! Both objectives are evaluated exactly in `f64`:
//!
//! * objective 1: per-site setup + EOQ inventory + ordering cost on the
//!   expected served demand,
//! * objective 2: the maximum expected per-customer transport-plus-penalty
//!   cost.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How transport costs are derived from coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    SquaredEuclidean,
    Euclidean,
}

impl DistanceKind {
    pub fn apply(&self, dx: f64, dy: f64) -> f64 {
        let sq = dx * dx + dy * dy;
        match self {
            DistanceKind::SquaredEuclidean => sq,
            DistanceKind::Euclidean => sq.sqrt(),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DistanceKind::SquaredEuclidean => "squared_euclidean",
            DistanceKind::Euclidean => "euclidean",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "squared_euclidean" => Some(DistanceKind::SquaredEuclidean),
            "euclidean" => Some(DistanceKind::Euclidean),
            _ => None,
        }
    }
}

/// A demand point: yearly demand `demand` and per-unit penalty `penalty`
/// incurred when the customer ends up without service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomerRecord {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub penalty: f64,
}

/// A candidate facility site with its cost and capacity parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteRecord {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub setup_cost: f64,
    pub holding_cost: f64,
    pub order_cost: f64,
    pub unit_order_cost: f64,
    pub capacity: f64,
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("customer {id}: {what} must be non-negative and finite, got {value}")]
    BadCustomerValue { id: usize, what: &'static str, value: f64 },
    #[error("site {id}: {what} must be positive and finite, got {value}")]
    BadSiteValue { id: usize, what: &'static str, value: f64 },
    #[error("failure probability q must lie in [0, 1], got {0}")]
    BadFailureProbability(f64),
    #[error("assignment levels R must satisfy 1 <= R <= {sites}, got {levels}")]
    BadLevels { levels: usize, sites: usize },
    #[error("duplicate {section} id {id}")]
    DuplicateId { section: &'static str, id: usize },
    #[error("distance matrix must have {expected} entries ({customers} x {sites}), got {actual}")]
    BadMatrixShape { expected: usize, actual: usize, customers: usize, sites: usize },
    #[error("distance matrix entry ({i}, {j}) must be non-negative and finite, got {value}")]
    BadMatrixEntry { i: usize, j: usize, value: f64 },
    #[error("at least one candidate site is required")]
    NoSites,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown site index {index} (instance has {sites} sites)")]
    UnknownSite { index: usize, sites: usize },
    #[error("unknown customer index {index} (instance has {customers} customers)")]
    UnknownCustomer { index: usize, customers: usize },
}

/// Immutable problem data. Customers and sites are addressed by position;
/// the `id` fields only matter for file round-trips and tie-breaking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    customers: Vec<CustomerRecord>,
    sites: Vec<SiteRecord>,
    q: f64,
    r_levels: usize,
    distance: DistanceKind,
    // row-major |I| x |J|
    distance_matrix: Vec<f64>,
}

impl ProblemInstance {
    /// Builds an instance, deriving the transport cost matrix from
    /// coordinates with the given [`DistanceKind`].
    pub fn new(
        customers: Vec<CustomerRecord>,
        sites: Vec<SiteRecord>,
        q: f64,
        r_levels: usize,
        distance: DistanceKind,
    ) -> Result<Self, InstanceError> {
        let matrix = customers
            .iter()
            .flat_map(|c| {
                sites
                    .iter()
                    .map(move |s| distance.apply(c.x - s.x, c.y - s.y))
            })
            .collect();
        Self::with_distance_matrix(customers, sites, q, r_levels, distance, matrix)
    }

    /// Builds an instance around a precomputed transport cost matrix
    /// (row-major, one row per customer).
    pub fn with_distance_matrix(
        customers: Vec<CustomerRecord>,
        sites: Vec<SiteRecord>,
        q: f64,
        r_levels: usize,
        distance: DistanceKind,
        distance_matrix: Vec<f64>,
    ) -> Result<Self, InstanceError> {
        if sites.is_empty() {
            return Err(InstanceError::NoSites);
        }
        if !(0.0..=1.0).contains(&q) || q.is_nan() {
            return Err(InstanceError::BadFailureProbability(q));
        }
        if r_levels < 1 || r_levels > sites.len() {
            return Err(InstanceError::BadLevels { levels: r_levels, sites: sites.len() });
        }
        let mut seen = std::collections::HashSet::new();
        for c in &customers {
            if !seen.insert(c.id) {
                return Err(InstanceError::DuplicateId { section: "customer", id: c.id });
            }
            for (what, value) in [("demand", c.demand), ("penalty", c.penalty)] {
                if !(value >= 0.0) || !value.is_finite() {
                    return Err(InstanceError::BadCustomerValue { id: c.id, what, value });
                }
            }
        }
        seen.clear();
        for s in &sites {
            if !seen.insert(s.id) {
                return Err(InstanceError::DuplicateId { section: "site", id: s.id });
            }
            for (what, value) in [
                ("setup_cost", s.setup_cost),
                ("holding_cost", s.holding_cost),
                ("order_cost", s.order_cost),
                ("unit_order_cost", s.unit_order_cost),
                ("capacity", s.capacity),
            ] {
                if !(value > 0.0) || !value.is_finite() {
                    return Err(InstanceError::BadSiteValue { id: s.id, what, value });
                }
            }
        }
        let expected = customers.len() * sites.len();
        if distance_matrix.len() != expected {
            return Err(InstanceError::BadMatrixShape {
                expected,
                actual: distance_matrix.len(),
                customers: customers.len(),
                sites: sites.len(),
            });
        }
        for (k, &d) in distance_matrix.iter().enumerate() {
            if !(d >= 0.0) || !d.is_finite() {
                return Err(InstanceError::BadMatrixEntry {
                    i: k / sites.len(),
                    j: k % sites.len(),
                    value: d,
                });
            }
        }
        Ok(Self { customers, sites, q, r_levels, distance, distance_matrix })
    }

    pub fn n_customers(&self) -> usize {
        self.customers.len()
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn customers(&self) -> &[CustomerRecord] {
        &self.customers
    }

    pub fn sites(&self) -> &[SiteRecord] {
        &self.sites
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r_levels(&self) -> usize {
        self.r_levels
    }

    pub fn distance_kind(&self) -> DistanceKind {
        self.distance
    }

    /// Transport cost from customer `i` to site `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distance_matrix[i * self.sites.len() + j]
    }

    /// Returns a copy with a different failure probability.
    pub fn with_q(&self, q: f64) -> Result<Self, InstanceError> {
        let mut out = self.clone();
        if !(0.0..=1.0).contains(&q) || q.is_nan() {
            return Err(InstanceError::BadFailureProbability(q));
        }
        out.q = q;
        Ok(out)
    }

    /// Returns a copy with a different level count.
    pub fn with_r_levels(&self, r_levels: usize) -> Result<Self, InstanceError> {
        let mut out = self.clone();
        if r_levels < 1 || r_levels > self.sites.len() {
            return Err(InstanceError::BadLevels { levels: r_levels, sites: self.sites.len() });
        }
        out.r_levels = r_levels;
        Ok(out)
    }
}

/// An open/assign decision. `assignments[i]` lists the sites serving
/// customer `i` at levels `0..len`, always a contiguous prefix of levels.
/// `lost_level[i] = Some(s)` marks the customer as unserved from level `s`
/// on; `None` means the customer is assigned through level `R-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub open: Vec<bool>,
    pub assignments: Vec<Vec<usize>>,
    pub lost_level: Vec<Option<usize>>,
}

impl Solution {
    /// An empty design: nothing open, every customer lost at level 0.
    pub fn empty(instance: &ProblemInstance) -> Self {
        Solution {
            open: vec![false; instance.n_sites()],
            assignments: vec![Vec::new(); instance.n_customers()],
            lost_level: vec![Some(0); instance.n_customers()],
        }
    }

    pub fn open_count(&self) -> usize {
        self.open.iter().filter(|&&b| b).count()
    }

    /// Checks that every index is addressable for `instance`. This is the
    /// precondition of the evaluation functions; constraint violations are
    /// the business of [`check_feasibility`].
    pub fn validate_shape(&self, instance: &ProblemInstance) -> Result<(), ModelError> {
        if self.open.len() != instance.n_sites()
            || self.assignments.len() != instance.n_customers()
            || self.lost_level.len() != instance.n_customers()
        {
            return Err(ModelError::UnknownCustomer {
                index: self.assignments.len(),
                customers: instance.n_customers(),
            });
        }
        for row in &self.assignments {
            for &j in row {
                if j >= instance.n_sites() {
                    return Err(ModelError::UnknownSite { index: j, sites: instance.n_sites() });
                }
            }
        }
        Ok(())
    }
}

/// Objective pair, both minimized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub obj1: f64,
    pub obj2: f64,
}

impl ObjectiveVector {
    pub fn new(obj1: f64, obj2: f64) -> Self {
        ObjectiveVector { obj1, obj2 }
    }

    /// Pareto dominance for minimization: no worse in both, strictly
    /// better in at least one.
    pub fn dominates(&self, other: &ObjectiveVector) -> bool {
        self.obj1 <= other.obj1
            && self.obj2 <= other.obj2
            && (self.obj1 < other.obj1 || self.obj2 < other.obj2)
    }
}

/// Probability that a customer's level-`r` facility is the one serving it:
/// all lower levels failed, level `r` survives.
pub fn level_service_weight(q: f64, r: usize) -> f64 {
    q.powi(r as i32) * (1.0 - q)
}

/// Probability that a customer lost at level `s` actually goes unserved.
pub fn lost_weight(q: f64, s: usize) -> f64 {
    q.powi(s as i32)
}

/// Expected yearly demand served by site `j`:
/// `sum_i sum_r demand_i * q^r * (1-q)` over assignments of `j`.
pub fn expected_demand(
    instance: &ProblemInstance,
    solution: &Solution,
    site: usize,
) -> Result<f64, ModelError> {
    if site >= instance.n_sites() {
        return Err(ModelError::UnknownSite { index: site, sites: instance.n_sites() });
    }
    let q = instance.q();
    let mut total = 0.0;
    for (i, levels) in solution.assignments.iter().enumerate() {
        for (r, &j) in levels.iter().enumerate() {
            if j == site {
                total += instance.customers()[i].demand * level_service_weight(q, r);
            }
        }
    }
    Ok(total)
}

/// Objective 1: setup, EOQ inventory and ordering cost over all sites,
/// each on the site's expected served demand.
pub fn evaluate_obj1(instance: &ProblemInstance, solution: &Solution) -> f64 {
    let q = instance.q();
    let mut served = vec![0.0f64; instance.n_sites()];
    for (i, levels) in solution.assignments.iter().enumerate() {
        for (r, &j) in levels.iter().enumerate() {
            served[j] += instance.customers()[i].demand * level_service_weight(q, r);
        }
    }
    let mut total = 0.0;
    for (j, site) in instance.sites().iter().enumerate() {
        if solution.open[j] {
            total += site.setup_cost;
        }
        let d_j = served[j];
        if d_j > 0.0 {
            total += (2.0 * site.order_cost * site.holding_cost * d_j).sqrt();
            total += site.unit_order_cost * d_j;
        }
    }
    total
}

/// Expected transport-plus-penalty cost of one customer.
pub fn customer_expected_cost(
    instance: &ProblemInstance,
    solution: &Solution,
    customer: usize,
) -> f64 {
    let q = instance.q();
    let record = &instance.customers()[customer];
    let mut cost = 0.0;
    for (r, &j) in solution.assignments[customer].iter().enumerate() {
        cost += record.demand * instance.distance(customer, j) * level_service_weight(q, r);
    }
    if let Some(s) = solution.lost_level[customer] {
        cost += record.demand * record.penalty * lost_weight(q, s);
    }
    cost
}

/// Objective 2: the worst expected customer cost (zero with no customers).
pub fn evaluate_obj2(instance: &ProblemInstance, solution: &Solution) -> f64 {
    (0..instance.n_customers())
        .map(|i| customer_expected_cost(instance, solution, i))
        .fold(0.0, f64::max)
}

/// Evaluates both objectives.
pub fn evaluate(instance: &ProblemInstance, solution: &Solution) -> ObjectiveVector {
    ObjectiveVector::new(evaluate_obj1(instance, solution), evaluate_obj2(instance, solution))
}

/// A single constraint breach found by [`check_feasibility`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Index shapes do not match the instance; constraint checks were skipped.
    Shape { detail: String },
    /// Customer neither assigned nor covered by its lost marker at a level,
    /// or covered twice.
    LevelCoverage { customer: usize, level: usize },
    /// Same site used at more than one level of one customer.
    DuplicateSite { customer: usize, site: usize },
    /// Assigned nominal demand exceeds `capacity * open`.
    CapacityExceeded { site: usize, load: f64, capacity: f64 },
    /// Assignment points at a site that is not open.
    AssignedToClosed { customer: usize, level: usize, site: usize },
    /// Open-facility count differs from the requested target.
    FacilityCount { expected: usize, actual: usize },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks level coverage, duplicate-site, capacity, open-facility and
/// (optionally) facility-count constraints. Infeasibility is reported,
/// never thrown.
pub fn check_feasibility(
    instance: &ProblemInstance,
    solution: &Solution,
    facility_count: Option<usize>,
) -> FeasibilityReport {
    let mut report = FeasibilityReport::default();
    if let Err(e) = solution.validate_shape(instance) {
        report.violations.push(Violation::Shape { detail: e.to_string() });
        return report;
    }
    let r_levels = instance.r_levels();

    for (i, levels) in solution.assignments.iter().enumerate() {
        if levels.len() > r_levels {
            report.violations.push(Violation::Shape {
                detail: format!("customer {i} assigned at {} levels, R = {r_levels}", levels.len()),
            });
            continue;
        }
        // level coverage: exactly one of {assigned at r, lost at s <= r}
        let assigned = levels.len();
        for r in 0..r_levels {
            let by_y = r < assigned;
            let by_z = solution.lost_level[i].is_some_and(|s| s <= r);
            if by_y == by_z {
                report.violations.push(Violation::LevelCoverage { customer: i, level: r });
            }
        }
        // one level per site
        for (k, &j) in levels.iter().enumerate() {
            if levels[..k].contains(&j) {
                report.violations.push(Violation::DuplicateSite { customer: i, site: j });
            }
        }
        // assignments require open facilities
        for (r, &j) in levels.iter().enumerate() {
            if !solution.open[j] {
                report
                    .violations
                    .push(Violation::AssignedToClosed { customer: i, level: r, site: j });
            }
        }
    }

    // capacity on nominal demand, one share per assignment level
    for j in 0..instance.n_sites() {
        let load: f64 = solution
            .assignments
            .iter()
            .enumerate()
            .map(|(i, levels)| {
                instance.customers()[i].demand * levels.iter().filter(|&&s| s == j).count() as f64
            })
            .sum();
        let capacity =
            if solution.open[j] { instance.sites()[j].capacity } else { 0.0 };
        if load > capacity {
            report.violations.push(Violation::CapacityExceeded { site: j, load, capacity });
        }
    }

    if let Some(p) = facility_count {
        let actual = solution.open_count();
        if actual != p {
            report.violations.push(Violation::FacilityCount { expected: p, actual });
        }
    }
    report
}
