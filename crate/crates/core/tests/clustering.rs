mod common;

use std::collections::BTreeMap;

use common::{rel_gap, rng};
use proptest::prelude::*;
use rand::Rng;
use tsagg::clustering::{
    basis_cluster, input_mse, kmeans, normalize_features, to_representatives, FeatureMatrix,
    KMEANS_MAX_ITER, KMEANS_TOL,
};
use tsagg::data_io::{generate_synthetic, SyntheticSpec};
use tsagg::dispatch::{build_hourly_lp, solve_aggregated, solve_full, Generator, SystemData, add_default_nse};
use tsagg::lp::{solve, solve_with_basis, LpStatus};

fn small_instance(seed: u64, hours: usize) -> SystemData {
    let mut spec = SyntheticSpec::default().with_seed(seed);
    spec.hours = hours;
    spec.targets.min_nse_fraction = 0.0;
    spec.targets.min_wind_marginal_fraction = 0.0;
    generate_synthetic(&spec).unwrap().system
}

fn blobs() -> FeatureMatrix {
    let mut r = rng(5);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for centre in [(0.1, 0.2), (0.9, 0.7)] {
        for _ in 0..10 {
            xs.push(centre.0 + r.random_range(-0.02..0.02));
            ys.push(centre.1 + r.random_range(-0.02..0.02));
        }
    }
    // fixed column extents so the normalized blobs stay far apart
    xs.extend([0.0, 1.0]);
    ys.extend([0.0, 1.0]);
    let mut f = FeatureMatrix::from_columns(vec!["x".into(), "y".into()], &[xs, ys]);
    f.rows.truncate(20);
    f
}

#[test]
fn separated_blobs_are_recovered() {
    let f = blobs();
    let m = kmeans(&f, 2, 42, KMEANS_MAX_ITER, KMEANS_TOL).unwrap();
    assert_eq!(m.weights, vec![10, 10]);
    assert!(m.assignment[..10].iter().all(|&a| a == 0));
    assert!(m.assignment[10..].iter().all(|&a| a == 1));
}

#[test]
fn kmeans_is_deterministic() {
    let sys = small_instance(3, 500);
    let f = normalize_features(&sys);
    let a = kmeans(&f, 4, 9, KMEANS_MAX_ITER, KMEANS_TOL).unwrap();
    let b = kmeans(&f, 4, 9, KMEANS_MAX_ITER, KMEANS_TOL).unwrap();
    assert_eq!(a, b);
}

#[test]
fn kmeans_terminates_at_a_lloyd_fixpoint() {
    for seed in 0..4 {
        let sys = small_instance(seed, 400);
        let f = normalize_features(&sys);
        let m = kmeans(&f, 5, seed, KMEANS_MAX_ITER, KMEANS_TOL).unwrap();
        m.validate().unwrap();
        for (row, &a) in f.rows.iter().zip(&m.assignment) {
            let d = |c: &Vec<f64>| -> f64 { row.iter().zip(c).map(|(x, y)| (x - y).powi(2)).sum() };
            let own = d(&m.centroids[a]);
            assert!(m.centroids.iter().all(|c| own <= d(c) + 1e-12));
        }
        // centroid is the member mean
        for j in 0..m.k {
            let members: Vec<&Vec<f64>> = f.rows.iter().zip(&m.assignment).filter(|(_, &a)| a == j).map(|(r, _)| r).collect();
            for c in 0..f.num_cols() {
                let mean = members.iter().map(|r| r[c]).sum::<f64>() / members.len() as f64;
                assert!((mean - m.centroids[j][c]).abs() <= 1e-9);
            }
        }
        // first-occurrence ordering
        let mut seen = 0;
        for &a in &m.assignment {
            assert!(a <= seen);
            if a == seen {
                seen += 1;
            }
        }
    }
}

#[test]
fn constant_series_has_one_basis() {
    let base = SystemData::new(
        vec![Generator::variable("wind", 0.0, 100.0, "wind"), Generator::thermal("thermal", 10.0, 100.0)],
        vec![80.0; 30],
        BTreeMap::from([("wind".to_string(), vec![0.4; 30])]),
    )
    .unwrap();
    let sys = add_default_nse(&base, 1000.0).unwrap();
    let m = basis_cluster(&sys).unwrap();
    assert_eq!(m.k, 1);
    assert_eq!(m.weights, vec![30]);
    let reps = to_representatives(&m, &normalize_features(&sys)).unwrap();
    assert_eq!(reps.reps[0].demand, 80.0);
    assert_eq!(reps.reps[0].cf["wind"], 0.4);
    assert_eq!(reps.reps[0].weight, 30.0);
}

#[test]
fn three_regimes_give_three_bases() {
    let sys = small_instance(1, 2000);
    let m = basis_cluster(&sys).unwrap();
    assert_eq!(m.k, 3);
    let mut labels = m.labels.clone();
    labels.sort();
    assert_eq!(labels, ["NSE", "thermal marginal", "wind marginal"]);
}

#[test]
fn basis_clusters_are_pure() {
    let sys = small_instance(2, 1500);
    let m = basis_cluster(&sys).unwrap();
    let map = m.basis_map.as_ref().unwrap();
    for (h, &a) in m.assignment.iter().enumerate() {
        let sol = solve(&build_hourly_lp(&sys, h).unwrap()).unwrap();
        assert_eq!(sol.basis.as_ref(), Some(&map[a]), "hour {h}");
    }
}

#[test]
fn centroid_rhs_keeps_each_cluster_basis() {
    let sys = small_instance(4, 1500);
    let full = solve_full(&sys).unwrap();
    let f = normalize_features(&sys);
    let m = basis_cluster(&sys).unwrap();
    let reps = to_representatives(&m, &f).unwrap();
    let lps = tsagg::dispatch::build_aggregated(&sys, &reps).unwrap();
    for (j, (lp, _)) in lps.iter().enumerate() {
        let sol = solve_with_basis(lp, &m.basis_map.as_ref().unwrap()[j]).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        let members: Vec<f64> = full
            .periods
            .iter()
            .zip(&m.assignment)
            .filter(|(_, &a)| a == j)
            .map(|(p, _)| p.solution.objective)
            .collect();
        let mean = members.iter().sum::<f64>() / members.len() as f64;
        assert!(rel_gap(sol.objective, mean) <= 1e-9);
    }
    let agg = solve_aggregated(&sys, &reps).unwrap();
    assert!(rel_gap(agg.total_cost, full.total_cost) <= 1e-8);
}

#[test]
fn identity_clustering_reproduces_hours() {
    let sys = small_instance(6, 60);
    let f = normalize_features(&sys);
    let m = kmeans(&f, 60, 1, KMEANS_MAX_ITER, KMEANS_TOL).unwrap();
    assert_eq!(input_mse(&f, &m).unwrap(), 0.0);
    let reps = to_representatives(&m, &f).unwrap();
    for (h, &a) in m.assignment.iter().enumerate() {
        assert!((reps.reps[a].demand - sys.demand()[h]).abs() <= 1e-9);
        assert!((reps.reps[a].cf["wind"] - sys.capacity_factors()["wind"][h]).abs() <= 1e-12);
    }
}

#[test]
fn single_cluster_mse_of_symmetric_pair() {
    let f = FeatureMatrix::from_columns(vec!["x".into()], &[vec![0.0, 1.0]]);
    let m = kmeans(&f, 1, 0, KMEANS_MAX_ITER, KMEANS_TOL).unwrap();
    assert_eq!(input_mse(&f, &m).unwrap(), 0.25);
}

proptest! {
    #[test]
    fn normalization_inverts(cols in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 5), 1..4)) {
        let names = (0..cols.len()).map(|i| format!("c{i}")).collect();
        let f = FeatureMatrix::from_columns(names, &cols);
        for (h, row) in f.rows.iter().enumerate() {
            prop_assert!(row.iter().all(|v| (0.0..=1.0).contains(v)));
            let back = f.denormalize(row);
            for (c, v) in back.iter().enumerate() {
                let scale = 1.0_f64.max(cols[c][h].abs());
                prop_assert!((v - cols[c][h]).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn partitions_cover_every_hour(seed in 0u64..50, k in 1usize..8) {
        let sys = small_instance(seed, 120);
        let f = normalize_features(&sys);
        let m = kmeans(&f, k, seed, KMEANS_MAX_ITER, KMEANS_TOL).unwrap();
        prop_assert_eq!(m.weights.iter().sum::<usize>(), 120);
        prop_assert!(m.weights.iter().all(|&w| w > 0));
        let b = basis_cluster(&sys).unwrap();
        prop_assert_eq!(b.weights.iter().sum::<usize>(), 120);
        prop_assert!(b.validate().is_ok());
    }
}
