//! Shared fixture builders for unit tests.

use crate::model::{CustomerRecord, DistanceKind, ProblemInstance, SiteRecord};

fn site(id: usize, x: f64, y: f64, setup: f64, holding: f64, order: f64, unit: f64, cap: f64) -> SiteRecord {
    SiteRecord {
        id,
        x,
        y,
        setup_cost: setup,
        holding_cost: holding,
        order_cost: order,
        unit_order_cost: unit,
        capacity: cap,
    }
}

/// One customer at the origin, one site at distance 5.
#[allow(clippy::too_many_arguments)]
pub(crate) fn single_site_instance(
    demand: f64,
    penalty: f64,
    setup: f64,
    holding: f64,
    order: f64,
    unit_order: f64,
    capacity: f64,
    q: f64,
    r_levels: usize,
) -> ProblemInstance {
    let customers = vec![CustomerRecord { id: 0, x: 0.0, y: 0.0, demand, penalty }];
    let sites = vec![site(0, 5.0, 0.0, setup, holding, order, unit_order, capacity)];
    ProblemInstance::new(customers, sites, q, r_levels, DistanceKind::Euclidean).unwrap()
}

/// One customer at the origin, sites at distances 1 and 2, ample capacity.
pub(crate) fn two_site_instance(demand: f64, penalty: f64, q: f64, r_levels: usize) -> ProblemInstance {
    let customers = vec![CustomerRecord { id: 0, x: 0.0, y: 0.0, demand, penalty }];
    let sites = vec![
        site(0, 1.0, 0.0, 100.0, 2.0, 1000.0, 5.0, 1e9),
        site(1, 2.0, 0.0, 100.0, 2.0, 1000.0, 5.0, 1e9),
    ];
    ProblemInstance::new(customers, sites, q, r_levels, DistanceKind::Euclidean).unwrap()
}

/// Customers on the x-axis, sites one unit above, ample capacity.
pub(crate) fn test_instance(n_customers: usize, n_sites: usize, q: f64, r_levels: usize) -> ProblemInstance {
    grid_instance(n_customers, n_sites, q, r_levels, 1e9)
}

/// Like [`test_instance`] but with a per-site capacity.
pub(crate) fn grid_instance(
    n_customers: usize,
    n_sites: usize,
    q: f64,
    r_levels: usize,
    capacity: f64,
) -> ProblemInstance {
    let customers = (0..n_customers)
        .map(|i| CustomerRecord { id: i, x: i as f64, y: 0.0, demand: 10.0, penalty: 1000.0 })
        .collect();
    let sites = (0..n_sites)
        .map(|j| site(j, j as f64 + 0.25, 1.0, 100.0, 2.0, 1000.0, 5.0, capacity))
        .collect();
    ProblemInstance::new(customers, sites, q, r_levels, DistanceKind::Euclidean).unwrap()
}
