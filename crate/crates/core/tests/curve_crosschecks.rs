//! The inverted transform and the Monte Carlo estimator must describe
//! the same distribution.

use kofn_core::inversion::invert_cdf;
use kofn_core::simulate::{estimate_cdf, RepairModel};
use kofn_core::transform::mtdl;
use kofn_core::{RepairDiscipline, SystemParams};

const BOTH: [RepairDiscipline; 2] = [RepairDiscipline::Serial, RepairDiscipline::Parallel];

fn sup_distance(p: &SystemParams, disc: RepairDiscipline, grid: &[f64], seed: u64) -> f64 {
    let curve = invert_cdf(p, disc, grid).unwrap();
    let empirical =
        estimate_cdf(p, disc, RepairModel::Deterministic, grid, 100_000, seed).unwrap();
    curve
        .points
        .iter()
        .zip(&empirical.points)
        .map(|(a, b)| (a.1 - b.1).abs())
        .fold(0.0, f64::max)
}

#[test]
fn inverted_cdf_matches_the_empirical_cdf() {
    let p = SystemParams::new(2, 1, 1.0, std::f64::consts::LN_2).unwrap();
    let grid: Vec<f64> = (0..50).map(|i| 6.0 * i as f64 / 49.0).collect();
    for disc in BOTH {
        let sup = sup_distance(&p, disc, &grid, 2_026);
        assert!(sup <= 0.01, "{}: sup = {sup:.4}", disc.name());
    }
}

#[test]
fn wider_array_cdfs_agree_too() {
    let p = SystemParams::new(4, 2, 1.0, 0.2).unwrap();
    for disc in BOTH {
        let horizon = 3.0 * mtdl(&p, disc).unwrap();
        let grid: Vec<f64> = (0..50).map(|i| horizon * i as f64 / 49.0).collect();
        let sup = sup_distance(&p, disc, &grid, 8_191);
        assert!(sup <= 0.01, "{}: sup = {sup:.4}", disc.name());
    }
}
