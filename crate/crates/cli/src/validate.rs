//! Built-in cross-checks behind `kofn validate`.
//!
//! Every check compares two independent routes to the same quantity, or an
//! exact closed form, and reports the worst relative error it saw against a
//! fixed bound. `inject_fault` flips the sign of one kernel entry before the
//! method-agreement check so callers can confirm the suite actually detects
//! a broken kernel.

use kofn_core::baselines::{
    mtdl_angus, mtdl_chen, mtdl_det_approx, mtdl_exp_approx, ExponentialRepairParams,
};
use kofn_core::inversion::invert_cdf;
use kofn_core::transform::{
    absorption_lst, absorption_lst_from_matrix, mtdl_embedded_chain, mtdl_lst_derivative,
    EvalMethod,
};
use kofn_core::{build_kernel_matrix, RepairDiscipline, SystemParams};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

const DISCIPLINES: [RepairDiscipline; 2] =
    [RepairDiscipline::Serial, RepairDiscipline::Parallel];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn crel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn check(name: &'static str, worst: f64, bound: f64) -> Check {
    Check {
        name,
        passed: worst <= bound,
        detail: format!("worst relative error {worst:.3e} (bound {bound:.1e})"),
    }
}

/// `n` from 2 to 20, every valid `k`, four repair-to-failure time ratios.
fn survey_grid() -> Vec<SystemParams> {
    let mut grid = Vec::new();
    for n in [2u32, 3, 5, 10, 20] {
        for k in 1..n {
            for lambda_trep in [0.01, 0.1, 1.0, 5.0] {
                grid.push(SystemParams::new(n, k, 1.0, lambda_trep).unwrap());
            }
        }
    }
    grid
}

/// Smaller grid kept away from the extreme visit-count regime where the
/// elimination-free evaluation routes lose precision.
fn agreement_grid() -> Vec<SystemParams> {
    let mut grid = Vec::new();
    for n in [3u32, 5, 10] {
        for k in [1, n / 2, n - 1] {
            for lambda_trep in [0.1, 1.0] {
                let p = SystemParams::new(n, k, 1.0, lambda_trep).unwrap();
                if !grid.contains(&p) {
                    grid.push(p);
                }
            }
        }
    }
    grid
}

fn normalization(extra: Option<SystemParams>) -> Check {
    let mut worst = 0.0f64;
    for p in survey_grid().into_iter().chain(extra) {
        for discipline in DISCIPLINES {
            let value =
                absorption_lst(&p, discipline, Complex64::ZERO, EvalMethod::LinearSolve).unwrap();
            worst = worst.max((value - Complex64::ONE).norm());
        }
    }
    check("normalization at s = 0", worst, 1e-10)
}

fn closed_form_point() -> Check {
    let p = SystemParams::new(2, 1, 1.0, std::f64::consts::LN_2).unwrap();
    let mut worst_mean = 0.0f64;
    for discipline in DISCIPLINES {
        worst_mean = worst_mean.max(rel(mtdl_embedded_chain(&p, discipline).unwrap(), 2.0));
        worst_mean = worst_mean.max(rel(mtdl_lst_derivative(&p, discipline).unwrap(), 2.0));
    }
    let at_one = absorption_lst(
        &p,
        RepairDiscipline::Serial,
        Complex64::ONE,
        EvalMethod::LinearSolve,
    )
    .unwrap();
    let transform_gap = crel(at_one, Complex64::new(0.3, 0.0));
    Check {
        name: "mirrored-pair closed form",
        passed: worst_mean <= 1e-9 && transform_gap <= 1e-10,
        detail: format!(
            "mean error {worst_mean:.3e} (bound 1.0e-9), transform error {transform_gap:.3e} (bound 1.0e-10)"
        ),
    }
}

fn method_agreement(extra: Option<SystemParams>, inject_fault: bool) -> Check {
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed_cafe);
    let mut worst = 0.0f64;
    for p in agreement_grid().into_iter().chain(extra) {
        for _ in 0..20 {
            let scale = 10.0 * p.n as f64 * p.failure_rate;
            let s = Complex64::new(
                scale * rng.gen::<f64>(),
                scale * (2.0 * rng.gen::<f64>() - 1.0),
            );
            for discipline in DISCIPLINES {
                let reference = absorption_lst(&p, discipline, s, EvalMethod::LinearSolve).unwrap();
                let det = absorption_lst(&p, discipline, s, EvalMethod::DeterminantRatio).unwrap();
                worst = worst.max(crel(det, reference));
                if discipline == RepairDiscipline::Parallel {
                    let closed =
                        absorption_lst(&p, discipline, s, EvalMethod::SimplifiedParallel).unwrap();
                    worst = worst.max(crel(closed, reference));
                }
            }
        }
    }
    let p = SystemParams::new(5, 2, 1.0, 0.5).unwrap();
    let s = Complex64::new(0.8, 1.3);
    let mut matrix = build_kernel_matrix(&p, RepairDiscipline::Parallel, s).unwrap();
    if inject_fault {
        let entry = matrix.get(1, 2);
        matrix.set(1, 2, -entry);
    }
    let from_matrix = absorption_lst_from_matrix(&matrix).unwrap();
    let direct =
        absorption_lst(&p, RepairDiscipline::Parallel, s, EvalMethod::LinearSolve).unwrap();
    worst = worst.max(crel(from_matrix, direct));
    check("evaluation-method agreement", worst, 1e-10)
}

fn mean_time_routes(extra: Option<SystemParams>) -> Check {
    let mut worst = 0.0f64;
    for p in agreement_grid().into_iter().chain(extra) {
        for discipline in DISCIPLINES {
            let chain = mtdl_embedded_chain(&p, discipline).unwrap();
            let derivative = mtdl_lst_derivative(&p, discipline).unwrap();
            worst = worst.max(rel(derivative, chain));
        }
    }
    check("mean-time route agreement", worst, 1e-6)
}

fn discipline_ordering(extra: Option<SystemParams>) -> Check {
    let mut worst = 0.0f64;
    for p in survey_grid().into_iter().chain(extra) {
        let serial = mtdl_embedded_chain(&p, RepairDiscipline::Serial).unwrap();
        let parallel = mtdl_embedded_chain(&p, RepairDiscipline::Parallel).unwrap();
        worst = worst.max((serial - parallel) / serial);
    }
    Check {
        name: "parallel repair dominates serial",
        passed: worst <= 1e-12,
        detail: format!("worst serial excess {worst:.3e} (bound 1.0e-12)"),
    }
}

fn monotonicity() -> Check {
    let mut ok = true;
    for discipline in DISCIPLINES {
        let by_trep: Vec<f64> = [0.1, 0.5, 1.0, 2.0]
            .iter()
            .map(|&t| {
                mtdl_embedded_chain(&SystemParams::new(5, 3, 1.0, t).unwrap(), discipline).unwrap()
            })
            .collect();
        ok &= by_trep.windows(2).all(|w| w[1] < w[0]);
        let by_lambda: Vec<f64> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&l| {
                mtdl_embedded_chain(&SystemParams::new(5, 3, l, 0.5).unwrap(), discipline).unwrap()
            })
            .collect();
        ok &= by_lambda.windows(2).all(|w| w[1] < w[0]);
    }
    Check {
        name: "mean time falls as repairs slow or failures quicken",
        passed: ok,
        detail: if ok {
            "strictly decreasing along both ladders".into()
        } else {
            "a ladder failed to decrease".into()
        },
    }
}

fn baseline_ratio() -> Check {
    let p = ExponentialRepairParams::new(10, 6, 1.0, 1e4).unwrap();
    let ratio = mtdl_angus(&p).unwrap() / mtdl_chen(&p).unwrap();
    let worst = rel(ratio, 24.0);
    check("parallel-to-serial exponential ratio near 4!", worst, 2e-2)
}

fn matched_rate_identity() -> Check {
    let mut worst = 0.0f64;
    for (n, k) in [(2u32, 1u32), (5, 3), (10, 6)] {
        for trep in [1e-3, 0.5] {
            let det = SystemParams::new(n, k, 1.0, trep).unwrap();
            let exp = ExponentialRepairParams::new(n, k, 1.0, 1.0 / trep).unwrap();
            worst = worst.max(rel(
                mtdl_det_approx(&det).unwrap(),
                mtdl_exp_approx(&exp, RepairDiscipline::Serial).unwrap(),
            ));
        }
    }
    check("matched-rate approximation identity", worst, 1e-12)
}

fn inversion_hypoexponential() -> Check {
    let p = SystemParams::new(2, 1, 1.0, 1e9).unwrap();
    let grid: Vec<f64> = (1..=10).map(|i| 0.6 * i as f64).collect();
    let curve = invert_cdf(&p, RepairDiscipline::Serial, &grid).unwrap();
    let mut worst = 0.0f64;
    for &(t, cdf) in &curve.points {
        let reference = 1.0 - 2.0 * (-t).exp() + (-2.0 * t).exp();
        worst = worst.max((cdf - reference).abs());
    }
    Check {
        name: "inverted curve matches the no-repair law",
        passed: worst <= 1e-6,
        detail: format!("worst absolute gap {worst:.3e} (bound 1.0e-6)"),
    }
}

pub fn run_suite(extra: Option<SystemParams>, inject_fault: bool) -> Vec<Check> {
    vec![
        normalization(extra),
        closed_form_point(),
        method_agreement(extra, inject_fault),
        mean_time_routes(extra),
        discipline_ordering(extra),
        monotonicity(),
        baseline_ratio(),
        matched_rate_identity(),
        inversion_hypoexponential(),
    ]
}
