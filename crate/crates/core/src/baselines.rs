//! Closed-form reference values for k-out-of-n arrays.
//!
//! Two families. [`mtdl_chen`] and [`mtdl_angus`] are exact sums for the
//! companion model in which repair durations are exponential at rate
//! `mu` instead of deterministic, under serial and parallel repair
//! respectively; they anchor the simulator and the transform code at a
//! point where pencil-and-paper answers exist. [`mtdl_exp_approx`] and
//! [`mtdl_det_approx`] are the leading-order approximations in the
//! fast-repair regime, useful as sanity scales and sweep columns.
//!
//! All four are plain finite sums over factorial ratios. The ratios are
//! accumulated as running products of consecutive integers rather than
//! as quotients of bare factorials, but the largest supported array is
//! still capped where `n!` itself leaves f64 range, keeping every
//! formula printable in its textbook form.

use crate::error::{Error, Result};
use crate::params::{RepairDiscipline, SystemParams};

/// Largest `n` for which `n!` is finite in f64.
const MAX_FACTORIAL_N: u32 = 170;

/// A k-out-of-n array whose repairs take exponential time at rate
/// `repair_rate` instead of a deterministic `repair_time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialRepairParams {
    pub n: u32,
    pub k: u32,
    pub failure_rate: f64,
    /// Rate of each repair; 0 means repairs never complete.
    pub repair_rate: f64,
}

impl ExponentialRepairParams {
    pub fn new(n: u32, k: u32, failure_rate: f64, repair_rate: f64) -> Result<Self> {
        let p = ExponentialRepairParams { n, k, failure_rate, repair_rate };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!("n must be at least 2, got {}", self.n)));
        }
        if self.k == 0 || self.k >= self.n {
            return Err(Error::InvalidParams(format!(
                "k must satisfy 0 < k < n, got k = {}, n = {}",
                self.k, self.n
            )));
        }
        if !self.failure_rate.is_finite() || self.failure_rate <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "failure rate must be positive and finite, got {}",
                self.failure_rate
            )));
        }
        if !self.repair_rate.is_finite() || self.repair_rate < 0.0 {
            return Err(Error::InvalidParams(format!(
                "repair rate must be nonnegative and finite, got {}",
                self.repair_rate
            )));
        }
        Ok(())
    }
}

fn check_factorial_range(n: u32) -> Result<()> {
    if n > MAX_FACTORIAL_N {
        return Err(Error::Range(format!(
            "factorial-based formula supports n up to {MAX_FACTORIAL_N}, got {n}"
        )));
    }
    Ok(())
}

fn check_finite(value: f64, what: &str) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::Range(format!("{what} overflows f64")));
    }
    Ok(value)
}

/// Shared shape of the two exponential-repair sums. `extra_i_factorial`
/// inserts the additional `i!` weight that distinguishes the parallel
/// sum from the serial one.
fn exponential_repair_sum(p: &ExponentialRepairParams, extra_i_factorial: bool) -> Result<f64> {
    p.validate()?;
    check_factorial_range(p.n)?;
    let spare = p.n - p.k;
    let (lambda, mu) = (p.failure_rate, p.repair_rate);
    let mut total = 0.0;
    for l in 0..=spare {
        let top = p.n - l;
        let mut i_factorial = 1.0;
        for i in 0..=spare - l {
            if extra_i_factorial && i > 0 {
                i_factorial *= i as f64;
            }
            // (n-l-i-1)! / (n-l)! as the reciprocal of a running product
            let mut tail = 1.0;
            for j in (top - i)..=top {
                tail *= j as f64;
            }
            total += i_factorial * mu.powi(i as i32) / (lambda.powi(i as i32 + 1) * tail);
        }
    }
    check_finite(total, "exponential-repair mean time to data loss")
}

/// Mean time to data loss with exponential repairs under the serial
/// discipline (one repair in service at a time), as an exact
/// birth-death sum.
pub fn mtdl_chen(p: &ExponentialRepairParams) -> Result<f64> {
    exponential_repair_sum(p, false)
}

/// Companion sum for the parallel discipline (every failed disk under
/// repair at once), carrying an extra `i!` relative to [`mtdl_chen`].
pub fn mtdl_angus(p: &ExponentialRepairParams) -> Result<f64> {
    exponential_repair_sum(p, true)
}

/// Leading-order mean time to data loss for fast exponential repair,
/// `(k-1)!/n! * mu^(n-k) / lambda^(n-k+1)`, times `(n-k)!` for the
/// parallel discipline.
pub fn mtdl_exp_approx(
    p: &ExponentialRepairParams,
    discipline: RepairDiscipline,
) -> Result<f64> {
    p.validate()?;
    check_factorial_range(p.n)?;
    let spare = p.n - p.k;
    // (k-1)!/n! as the reciprocal of k*(k+1)*...*n
    let mut tail = 1.0;
    for j in p.k..=p.n {
        tail *= j as f64;
    }
    let mut value =
        p.repair_rate.powi(spare as i32) / (p.failure_rate.powi(spare as i32 + 1) * tail);
    if discipline == RepairDiscipline::Parallel {
        for i in 2..=spare {
            value *= i as f64;
        }
    }
    check_finite(value, "fast-repair approximation")
}

/// Leading-order mean time to data loss for short deterministic
/// repairs, `(k-1)!/(n! lambda) * (lambda repair_time)^-(n-k)`. The
/// discipline does not enter at this order.
pub fn mtdl_det_approx(params: &SystemParams) -> Result<f64> {
    params.validate()?;
    check_factorial_range(params.n)?;
    let spare = (params.n - params.k) as i32;
    let mut tail = 1.0;
    for j in params.k..=params.n {
        tail *= j as f64;
    }
    let window = params.failure_rate * params.repair_time;
    check_finite(
        window.powi(-spare) / (tail * params.failure_rate),
        "short-repair approximation",
    )
}
