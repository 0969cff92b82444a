mod common;

use std::collections::BTreeMap;

use common::{min_over_bfs, rel_gap, rng};
use rand::Rng;
use tsagg::dispatch::{
    add_default_nse, add_nse_generator, build_hourly_lp, solve_aggregated, solve_full, Generator,
    Representative, RepresentativeSet, SystemData,
};
use tsagg::lp::{solve, StandardFormLp, TOL_FEAS};

fn wind_thermal_nse(demand: Vec<f64>, cf: Vec<f64>) -> SystemData {
    let base = SystemData::new(
        vec![
            Generator::variable("wind", 0.0, 50.0, "wind"),
            Generator::thermal("thermal", 10.0, 100.0),
        ],
        demand,
        BTreeMap::from([("wind".to_string(), cf)]),
    )
    .unwrap();
    add_nse_generator(&base, 1000.0, 1e6).unwrap()
}

fn rows_of(lp: &StandardFormLp) -> Vec<Vec<f64>> {
    (0..lp.num_rows())
        .map(|i| (0..lp.num_vars()).map(|j| lp.entry(i, j)).collect())
        .collect()
}

fn oracle_cost(lp: &StandardFormLp) -> f64 {
    min_over_bfs(lp.costs(), &rows_of(lp), lp.rhs()).unwrap().0
}

/// Cheapest-first fill; independent of the LP path.
fn merit_order_cost(system: &SystemData, h: usize) -> f64 {
    let mut order: Vec<&Generator> = system.generators().iter().collect();
    order.sort_by(|a, b| a.variable_cost.partial_cmp(&b.variable_cost).unwrap());
    let mut remaining = system.demand()[h];
    let mut cost = 0.0;
    for g in order {
        let cap = g.capacity * g.cf_series.as_ref().map_or(1.0, |id| system.capacity_factors()[id][h]);
        let take = remaining.min(cap);
        cost += take * g.variable_cost;
        remaining -= take;
    }
    assert!(remaining <= 1e-9);
    cost
}

#[test]
fn two_unit_hour_matches_enumeration() {
    let sys = SystemData::new(
        vec![
            Generator::variable("wind", 0.0, 50.0, "wind"),
            Generator::thermal("thermal", 10.0, 100.0),
        ],
        vec![120.0],
        BTreeMap::from([("wind".to_string(), vec![0.8])]),
    )
    .unwrap();
    let lp = build_hourly_lp(&sys, 0).unwrap();
    assert_eq!(oracle_cost(&lp), 800.0);
    let full = solve_full(&sys).unwrap();
    assert!((full.total_cost - 800.0).abs() < 1e-9);
    let p = &full.periods[0].production;
    assert!((p[0] - 40.0).abs() < 1e-9 && (p[1] - 80.0).abs() < 1e-9);
}

#[test]
fn nse_hour_matches_enumeration() {
    let sys = wind_thermal_nse(vec![160.0], vec![0.8]);
    let lp = build_hourly_lp(&sys, 0).unwrap();
    assert_eq!(oracle_cost(&lp), 21000.0);
    let sol = solve(&lp).unwrap();
    assert!((sol.objective - 21000.0).abs() < 1e-9);
    let full = solve_full(&sys).unwrap();
    let p = &full.periods[0].production;
    assert!((p[0] - 40.0).abs() < 1e-9);
    assert!((p[1] - 100.0).abs() < 1e-9);
    assert!((p[2] - 20.0).abs() < 1e-9);
}

#[test]
fn three_hour_total_is_sum_of_hours() {
    // hour 0 is windless, so thermal covers all 50 MW
    let sys = wind_thermal_nse(vec![50.0, 120.0, 160.0], vec![0.0, 0.8, 0.8]);
    let expected: f64 = (0..3).map(|h| oracle_cost(&build_hourly_lp(&sys, h).unwrap())).sum();
    assert_eq!(expected, 500.0 + 800.0 + 21000.0);
    let full = solve_full(&sys).unwrap();
    assert!(rel_gap(full.total_cost, expected) <= 1e-12);
}

#[test]
fn single_hour_is_one_solve() {
    let sys = wind_thermal_nse(vec![75.0], vec![0.3]);
    let full = solve_full(&sys).unwrap();
    let direct = solve(&build_hourly_lp(&sys, 0).unwrap()).unwrap();
    assert_eq!(full.total_cost, direct.objective);
    assert_eq!(full.periods[0].solution.basis, direct.basis);
}

#[test]
fn constant_series_scales_with_horizon() {
    let sys = wind_thermal_nse(vec![90.0; 24], vec![0.4; 24]);
    let one = solve_full(&wind_thermal_nse(vec![90.0], vec![0.4])).unwrap().total_cost;
    let full = solve_full(&sys).unwrap();
    assert!(rel_gap(full.total_cost, 24.0 * one) <= 1e-12);

    let reps = RepresentativeSet {
        reps: vec![Representative {
            demand: 90.0,
            cf: BTreeMap::from([("wind".to_string(), 0.4)]),
            weight: 24.0,
        }],
    };
    let agg = solve_aggregated(&sys, &reps).unwrap();
    assert!(rel_gap(agg.total_cost, full.total_cost) <= 1e-12);
}

fn random_system(seed: u64, hours: usize) -> SystemData {
    let mut r = rng(seed);
    let demand: Vec<f64> = (0..hours).map(|_| r.random_range(0.0..250.0)).collect();
    let cf: Vec<f64> = (0..hours).map(|_| r.random_range(0.0..1.0)).collect();
    let solar: Vec<f64> = (0..hours).map(|_| r.random_range(0.0..1.0)).collect();
    let mut gas = Generator::thermal("gas", 35.0, 60.0);
    gas.p_min = 5.0;
    let base = SystemData::new(
        vec![
            Generator::variable("wind", 0.0, 80.0, "wind"),
            Generator::variable("solar", 1.0, 40.0, "solar"),
            Generator::thermal("coal", 20.0, 70.0),
            gas,
        ],
        demand.iter().map(|d| d + 5.0).collect(),
        BTreeMap::from([("wind".to_string(), cf), ("solar".to_string(), solar)]),
    )
    .unwrap();
    add_default_nse(&base, 500.0).unwrap()
}

#[test]
fn only_the_rhs_varies_between_hours() {
    let sys = random_system(3, 50);
    let first = build_hourly_lp(&sys, 0).unwrap();
    for h in 1..sys.horizon() {
        let lp = build_hourly_lp(&sys, h).unwrap();
        let same_c = lp.costs().iter().zip(first.costs()).all(|(a, b)| a.to_bits() == b.to_bits());
        let same_a = lp.matrix().iter().zip(first.matrix()).all(|(a, b)| a.to_bits() == b.to_bits());
        assert!(same_c && same_a, "hour {h}");
    }
}

#[test]
fn identity_aggregation_reproduces_full_cost() {
    for seed in 0..5 {
        let sys = random_system(seed, 40);
        let full = solve_full(&sys).unwrap();
        let agg = solve_aggregated(&sys, &RepresentativeSet::identity(&sys)).unwrap();
        assert!(rel_gap(full.total_cost, agg.total_cost) <= 1e-10);
    }
}

#[test]
fn hourly_costs_follow_merit_order() {
    let sys = random_system(9, 200);
    let full = solve_full(&sys).unwrap();
    // strictly ordered costs: a unit above p_min implies cheaper units are at their limit
    let gens = sys.generators();
    for (h, period) in full.periods.iter().enumerate() {
        for (k, g) in gens.iter().enumerate() {
            if period.production[k] > g.p_min + TOL_FEAS {
                for (j, cheaper) in gens.iter().enumerate() {
                    if cheaper.variable_cost < g.variable_cost {
                        let cap = cheaper.capacity
                            * cheaper.cf_series.as_ref().map_or(1.0, |id| sys.capacity_factors()[id][h]);
                        assert!(
                            period.production[j] >= cap - 1e-7,
                            "hour {h}: {} runs while {} has headroom",
                            g.name,
                            cheaper.name
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn greedy_oracle_agrees_without_minimum_output() {
    let sys = wind_thermal_nse(
        (0..100).map(|h| (h as f64) * 2.1).collect(),
        (0..100).map(|h| ((h * 37) % 100) as f64 / 100.0).collect(),
    );
    let full = solve_full(&sys).unwrap();
    for (h, period) in full.periods.iter().enumerate() {
        assert!(rel_gap(period.cost, merit_order_cost(&sys, h)) <= 1e-10, "hour {h}");
    }
}

#[test]
fn raising_demand_never_lowers_cost() {
    let sys = random_system(21, 30);
    let base = solve_full(&sys).unwrap().total_cost;
    let mut r = rng(22);
    for _ in 0..20 {
        let mut demand = sys.demand().to_vec();
        let h = r.random_range(0..demand.len());
        demand[h] += r.random_range(0.0..50.0);
        let bumped = SystemData::new(
            sys.generators().to_vec(),
            demand,
            sys.capacity_factors().clone(),
        )
        .unwrap();
        assert!(solve_full(&bumped).unwrap().total_cost >= base - 1e-9);
    }
}
