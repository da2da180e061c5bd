//! Monte Carlo oracle: direct discrete-event simulation of the
//! failure/repair race.
//!
//! The simulator shares nothing with the transform machinery beyond the
//! parameter type, so agreement between the two is a genuine
//! cross-check. Each trial walks the failed-disk count: from state 0 an
//! `Exp(n lambda)` wait leads to state 1; in state `i` a failure delay
//! `Exp((n-i) lambda)` races the repair delay, and the loser's timer is
//! discarded (a new failure re-initializes the repair). A completed
//! repair drops to `i - 1` (serial) or 0 (parallel); reaching
//! `n - k + 1` failed disks is data loss. Repairs are either the fixed
//! `repair_time` from the parameters or exponential at a given rate,
//! the latter matching the closed-form baselines.
//!
//! Reproducibility: trial `i` draws from `substream(seed, i)`, a pure
//! function of the seed and trial index, and aggregation is an ordered
//! reduction over trial index, so results are bit-identical regardless
//! of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::check_time_grid;
use crate::params::{RepairDiscipline, SystemParams};

/// Distribution of a single repair duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RepairModel {
    /// The fixed `repair_time` from [`SystemParams`]; the model the
    /// transform analysis solves.
    Deterministic,
    /// Exponential with the given rate; `repair_time` is ignored. The
    /// companion model of the closed-form baselines.
    Exponential { rate: f64 },
}

/// Outcome of a batch of independent trials.
#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub params: SystemParams,
    pub discipline: RepairDiscipline,
    pub model: RepairModel,
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    /// Sample standard deviation divided by sqrt(trials).
    pub std_error: f64,
    /// Absorption times in trial order, when retained.
    pub samples: Option<Vec<f64>>,
}

/// Empirical distribution of absorption times on a grid.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    pub trials: u64,
    pub seed: u64,
    /// `(t, fraction of trials with T <= t)` in grid order.
    pub points: Vec<(f64, f64)>,
}

/// Generator for one trial: pure in `(seed, index)`, mutually
/// independent across indices.
pub fn substream(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Inverse-CDF exponential sample on the open unit interval; exact 0
/// draws are rejected so delays stay finite.
fn exp_sample<R: Rng>(rng: &mut R, rate: f64) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return -u.ln() / rate;
        }
    }
}

fn check_model(model: RepairModel) -> Result<()> {
    if let RepairModel::Exponential { rate } = model {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "exponential repair rate must be positive and finite, got {rate}"
            )));
        }
    }
    Ok(())
}

fn run_trial<R: Rng>(
    params: &SystemParams,
    discipline: RepairDiscipline,
    model: RepairModel,
    rng: &mut R,
) -> f64 {
    let absorbing = params.absorbing_state();
    let mut clock = 0.0;
    let mut state = 0usize;
    loop {
        if state == 0 {
            clock += exp_sample(rng, params.state_failure_rate(0));
            state = 1;
            continue;
        }
        let failure = exp_sample(rng, params.state_failure_rate(state));
        let repair = match model {
            RepairModel::Deterministic => params.repair_time,
            RepairModel::Exponential { rate } => exp_sample(rng, rate),
        };
        if failure < repair {
            clock += failure;
            state += 1;
            if state == absorbing {
                return clock;
            }
        } else {
            // Ties resolve as completed repairs.
            clock += repair;
            state = discipline.repair_target(state);
        }
    }
}

/// One trial: the time from a fresh array to data loss.
pub fn simulate_one<R: Rng>(
    params: &SystemParams,
    discipline: RepairDiscipline,
    model: RepairModel,
    rng: &mut R,
) -> Result<f64> {
    params.validate()?;
    check_model(model)?;
    Ok(run_trial(params, discipline, model, rng))
}

fn run_trials(
    params: &SystemParams,
    discipline: RepairDiscipline,
    model: RepairModel,
    trials: u64,
    min_trials: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    params.validate()?;
    check_model(model)?;
    if trials < min_trials {
        return Err(Error::InvalidParams(format!(
            "need at least {min_trials} trials, got {trials}"
        )));
    }
    Ok((0..trials)
        .into_par_iter()
        .map(|i| run_trial(params, discipline, model, &mut substream(seed, i)))
        .collect())
}

fn summarize(
    params: &SystemParams,
    discipline: RepairDiscipline,
    model: RepairModel,
    seed: u64,
    times: Vec<f64>,
    keep_samples: bool,
) -> SimulationResult {
    let trials = times.len() as u64;
    let mean = times.iter().sum::<f64>() / trials as f64;
    let variance =
        times.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (trials - 1) as f64;
    SimulationResult {
        params: *params,
        discipline,
        model,
        trials,
        seed,
        mean,
        std_error: (variance / trials as f64).sqrt(),
        samples: keep_samples.then_some(times),
    }
}

/// Mean time to data loss over `trials` independent replications.
pub fn estimate_mtdl(
    params: &SystemParams,
    discipline: RepairDiscipline,
    model: RepairModel,
    trials: u64,
    seed: u64,
) -> Result<SimulationResult> {
    let times = run_trials(params, discipline, model, trials, 2, seed)?;
    Ok(summarize(params, discipline, model, seed, times, false))
}

/// As [`estimate_mtdl`], additionally retaining the raw absorption
/// times.
pub fn estimate_mtdl_with_samples(
    params: &SystemParams,
    discipline: RepairDiscipline,
    model: RepairModel,
    trials: u64,
    seed: u64,
) -> Result<SimulationResult> {
    let times = run_trials(params, discipline, model, trials, 2, seed)?;
    Ok(summarize(params, discipline, model, seed, times, true))
}

/// Empirical CDF of the time to data loss on a strictly increasing,
/// nonnegative grid.
pub fn estimate_cdf(
    params: &SystemParams,
    discipline: RepairDiscipline,
    model: RepairModel,
    t_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<EmpiricalCdf> {
    check_time_grid(t_grid)?;
    let mut times = run_trials(params, discipline, model, trials, 1, seed)?;
    times.sort_unstable_by(f64::total_cmp);
    let points = t_grid
        .iter()
        .map(|&t| {
            let below = times.partition_point(|&x| x <= t);
            (t, below as f64 / trials as f64)
        })
        .collect();
    Ok(EmpiricalCdf { trials, seed, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{mtdl_chen, ExponentialRepairParams};
    use crate::transform::mtdl_embedded_chain;
    use std::f64::consts::LN_2;

    const TRIALS: u64 = 100_000;

    fn pair() -> SystemParams {
        SystemParams::new(2, 1, 1.0, LN_2).unwrap()
    }

    fn assert_within_4se(result: &SimulationResult, expect: f64) {
        assert!(
            (result.mean - expect).abs() <= 4.0 * result.std_error,
            "mean {} vs {} (se {})",
            result.mean,
            expect,
            result.std_error
        );
    }

    #[test]
    fn replay_is_deterministic() {
        let p = pair();
        let a = estimate_mtdl(&p, RepairDiscipline::Serial, RepairModel::Deterministic, 500, 7)
            .unwrap();
        let b = estimate_mtdl(&p, RepairDiscipline::Serial, RepairModel::Deterministic, 500, 7)
            .unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());

        let c = estimate_mtdl(&p, RepairDiscipline::Serial, RepairModel::Deterministic, 500, 8)
            .unwrap();
        assert_ne!(a.mean.to_bits(), c.mean.to_bits());
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let p = pair();
        let run = || {
            estimate_mtdl(&p, RepairDiscipline::Serial, RepairModel::Deterministic, 2000, 3)
                .unwrap()
        };
        let narrow = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        let wide = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(narrow.mean.to_bits(), wide.mean.to_bits());
        assert_eq!(narrow.std_error.to_bits(), wide.std_error.to_bits());
    }

    #[test]
    fn substreams_differ() {
        let mut a = substream(42, 0);
        let mut b = substream(42, 1);
        let draws_a: Vec<u64> = (0..4).map(|_| a.gen()).collect();
        let draws_b: Vec<u64> = (0..4).map(|_| b.gen()).collect();
        assert_ne!(draws_a, draws_b);
    }

    #[test]
    fn mirrored_pair_mean_matches_the_transform_value() {
        let r = estimate_mtdl(
            &pair(),
            RepairDiscipline::Serial,
            RepairModel::Deterministic,
            TRIALS,
            11,
        )
        .unwrap();
        assert_within_4se(&r, 2.0);
    }

    #[test]
    fn no_repair_mean_is_hypoexponential() {
        let p = SystemParams::new(2, 1, 1.0, 1e300).unwrap();
        let r = estimate_mtdl(&p, RepairDiscipline::Serial, RepairModel::Deterministic, TRIALS, 5)
            .unwrap();
        assert_within_4se(&r, 1.5);
    }

    #[test]
    fn wider_array_matches_the_embedded_chain() {
        let p = SystemParams::new(4, 2, 1.0, 0.2).unwrap();
        for disc in [RepairDiscipline::Serial, RepairDiscipline::Parallel] {
            let expect = mtdl_embedded_chain(&p, disc).unwrap();
            let r = estimate_mtdl(&p, disc, RepairModel::Deterministic, TRIALS, 13).unwrap();
            assert_within_4se(&r, expect);
        }
    }

    #[test]
    fn serial_exponential_repair_matches_the_birth_death_sum() {
        let p = SystemParams::new(4, 2, 1.0, 1.0).unwrap();
        let exp = ExponentialRepairParams::new(4, 2, 1.0, 5.0).unwrap();
        let expect = mtdl_chen(&exp).unwrap();
        let r = estimate_mtdl(
            &p,
            RepairDiscipline::Serial,
            RepairModel::Exponential { rate: 5.0 },
            TRIALS,
            17,
        )
        .unwrap();
        assert_within_4se(&r, expect);
        assert!((expect - 3.375).abs() < 1e-14);
    }

    #[test]
    fn parallel_exponential_repair_matches_the_race_chain() {
        // Independent oracle: the event loop in state i races
        // Exp((n-i)lambda) against Exp(mu) and a completed repair
        // returns to state 0, a Markov chain solvable by hand. For
        // n = 4, k = 2, lambda = 1, mu = 5 the mean is exactly 4.
        let p = SystemParams::new(4, 2, 1.0, 1.0).unwrap();
        let r = estimate_mtdl(
            &p,
            RepairDiscipline::Parallel,
            RepairModel::Exponential { rate: 5.0 },
            TRIALS,
            19,
        )
        .unwrap();
        assert_within_4se(&r, 4.0);
    }

    #[test]
    fn single_spare_disciplines_coincide_exactly() {
        let p = SystemParams::new(5, 4, 0.7, 0.3).unwrap();
        let serial =
            estimate_mtdl(&p, RepairDiscipline::Serial, RepairModel::Deterministic, 5000, 23)
                .unwrap();
        let parallel =
            estimate_mtdl(&p, RepairDiscipline::Parallel, RepairModel::Deterministic, 5000, 23)
                .unwrap();
        assert_eq!(serial.mean.to_bits(), parallel.mean.to_bits());
    }

    #[test]
    fn rescaling_time_rescales_the_estimate_exactly() {
        // c = 4 is a power of two: every sampled delay and partial sum
        // scales by exactly 1/4 in floating point, so the two runs walk
        // identical paths.
        let slow = SystemParams::new(2, 1, 0.25, 4.0 * LN_2).unwrap();
        let fast = SystemParams::new(2, 1, 1.0, LN_2).unwrap();
        let a = estimate_mtdl(&slow, RepairDiscipline::Serial, RepairModel::Deterministic, 4000, 29)
            .unwrap();
        let b = estimate_mtdl(&fast, RepairDiscipline::Serial, RepairModel::Deterministic, 4000, 29)
            .unwrap();
        assert_eq!(a.mean.to_bits(), (4.0 * b.mean).to_bits());
    }

    #[test]
    fn empirical_cdf_is_a_distribution_function() {
        let grid = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 1e9];
        let cdf = estimate_cdf(
            &pair(),
            RepairDiscipline::Serial,
            RepairModel::Deterministic,
            &grid,
            10_000,
            31,
        )
        .unwrap();
        assert_eq!(cdf.points[0], (0.0, 0.0));
        assert_eq!(cdf.points.last().unwrap().1, 1.0);
        let mut last = 0.0;
        for &(_, f) in &cdf.points {
            assert!((0.0..=1.0).contains(&f) && f >= last);
            last = f;
        }
    }

    #[test]
    fn retained_samples_reproduce_the_mean() {
        let p = pair();
        let r = estimate_mtdl_with_samples(
            &p,
            RepairDiscipline::Serial,
            RepairModel::Deterministic,
            1000,
            37,
        )
        .unwrap();
        let samples = r.samples.as_ref().unwrap();
        assert_eq!(samples.len(), 1000);
        let mean = samples.iter().sum::<f64>() / 1000.0;
        assert_eq!(mean.to_bits(), r.mean.to_bits());
        assert!(samples.iter().all(|&t| t > 0.0));
    }

    #[test]
    fn rejects_degenerate_setups() {
        let p = pair();
        let disc = RepairDiscipline::Serial;
        assert!(estimate_mtdl(&p, disc, RepairModel::Exponential { rate: 0.0 }, 100, 1).is_err());
        assert!(estimate_mtdl(&p, disc, RepairModel::Exponential { rate: -1.0 }, 100, 1).is_err());
        assert!(estimate_mtdl(&p, disc, RepairModel::Deterministic, 1, 1).is_err());
        assert!(estimate_cdf(&p, disc, RepairModel::Deterministic, &[1.0, 0.5], 100, 1).is_err());
        let one = estimate_cdf(&p, disc, RepairModel::Deterministic, &[1.0], 1, 1);
        assert!(one.is_ok());
    }
}
