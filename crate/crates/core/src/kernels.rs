//! One-step transition kernels of the failure/repair process.
//!
//! The array is modeled as a semi-Markov chain on the number of failed
//! disks. State `i` (for `1 <= i <= n-k`) races the next disk failure,
//! exponential with rate `(n-i)*lambda`, against a deterministic repair
//! that completes `repair_time` after it began. Losing the race moves the
//! chain up; a completed repair moves it to the discipline's repair
//! target. State `n-k+1` absorbs (data loss).
//!
//! Every kernel is available in two forms: the Laplace-Stieltjes
//! transform at a complex frequency `s` with `Re(s) >= 0`, and the plain
//! time-domain distribution function. The two agree in the `s -> 0` /
//! `t -> inf` limit, which the tests pin down.
//!
//! Internally each state's failure and repair probabilities are paired so
//! that their values at `s = 0` sum to exactly 1.0 in floating point.
//! Downstream solvers divide by quantities assembled from these rows, and
//! states close to absorption can be visited astronomically often before
//! the chain dies; an uncompensated row-sum residue of a few ulps would
//! be amplified by the expected visit count and dominate the answer. The
//! pairing keeps the embedded chain exactly stochastic, so that
//! amplification multiplies a true zero.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::one_minus_exp_neg;
use crate::params::{RepairDiscipline, SystemParams};

/// Probability that the next failure beats the repair clock, and its
/// complement, evaluated so the pair sums to exactly 1.0.
///
/// `x` is `(n-i)*lambda*repair_time`, the expected number of failures
/// during one repair window. The branch keeps the smaller of the two
/// values the directly computed one; the larger is recovered by a
/// subtraction from 1.0 that is exact because the smaller value is at
/// least 1/2 ulp-representable against 1.0 (Sterbenz).
pub(crate) fn race_probabilities(x: f64) -> (f64, f64) {
    debug_assert!(x >= 0.0);
    if x <= LN_2 {
        let repair = (-x).exp();
        (1.0 - repair, repair)
    } else {
        let fail = -(-x).exp_m1();
        (fail, 1.0 - fail)
    }
}

/// All transform-domain quantities for one transient state `i >= 1`.
///
/// Alongside the two kernels themselves this carries their stable
/// complements and the row deficit `1 - fail - repair`, each computed
/// from a cancellation-free rearrangement rather than by subtraction.
/// `deficit` is proportional to `s` and vanishes identically at `s = 0`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LstRow {
    pub fail: Complex64,
    pub repair: Complex64,
    pub one_minus_fail: Complex64,
    pub one_minus_repair: Complex64,
    pub deficit: Complex64,
}

/// Evaluates the kernel row of a state with failure rate `a`.
pub(crate) fn eval_state_row(a: f64, repair_time: f64, s: Complex64) -> LstRow {
    let (fail_p, repair_p) = race_probabilities(a * repair_time);
    let decay = (-s * repair_time).exp();
    let repair = repair_p * decay;
    // 1 - repair_p * e^{-s*t} = (1 - repair_p) + repair_p * (1 - e^{-s*t})
    let one_minus_repair = fail_p + repair_p * one_minus_exp_neg(s * repair_time);
    let rate = Complex64::from(a);
    let denom = rate + s;
    let fail = rate / denom * one_minus_repair;
    let one_minus_fail = (s + rate * repair) / denom;
    let deficit = s * one_minus_repair / denom;
    LstRow { fail, repair, one_minus_fail, one_minus_repair, deficit }
}

/// Kernel of the fully operational state: `(fail, 1 - fail)` where
/// `fail = n*lambda / (n*lambda + s)`. There is nothing to repair yet, so
/// the row has a single entry.
pub(crate) fn eval_initial_row(total_rate: f64, s: Complex64) -> (Complex64, Complex64) {
    let rate = Complex64::from(total_rate);
    (rate / (rate + s), s / (rate + s))
}

/// Kernel rows for states `1..=n-k` in state order. The last row's `fail`
/// entry is the transition into the absorbing state.
pub(crate) fn lst_rows(params: &SystemParams, s: Complex64) -> Vec<LstRow> {
    (1..=params.max_failed())
        .map(|i| eval_state_row(params.state_failure_rate(i), params.repair_time, s))
        .collect()
}

pub(crate) fn check_frequency(s: Complex64) -> Result<()> {
    if !s.re.is_finite() || !s.im.is_finite() || s.re < 0.0 {
        return Err(Error::FrequencyDomain { re: s.re });
    }
    Ok(())
}

/// Laplace-Stieltjes transform of the one-step kernel from state `from`
/// to state `to`, evaluated at `s` with `Re(s) >= 0`.
///
/// `from` must be transient (`0..=n-k`); `to` may be any state including
/// the absorbing one. Pairs outside the transition pattern return zero.
pub fn kernel_lst(
    params: &SystemParams,
    discipline: RepairDiscipline,
    from: usize,
    to: usize,
    s: Complex64,
) -> Result<Complex64> {
    params.validate()?;
    check_frequency(s)?;
    params.check_state(to)?;
    let m = params.max_failed();
    if from > m {
        return Err(Error::InvalidState { index: from, max: m });
    }
    if from == 0 {
        let (fail, _) = eval_initial_row(params.state_failure_rate(0), s);
        return Ok(if to == 1 { fail } else { Complex64::ZERO });
    }
    let row = eval_state_row(params.state_failure_rate(from), params.repair_time, s);
    if to == from + 1 {
        Ok(row.fail)
    } else if to == discipline.repair_target(from) {
        Ok(row.repair)
    } else {
        Ok(Complex64::ZERO)
    }
}

/// Time-domain counterpart of [`kernel_lst`]: the sub-distribution
/// function `Q_{from,to}(t)`, the probability that the chain leaves
/// `from` for `to` within `t` of arriving.
///
/// Failure entries saturate at `t = repair_time` because a later failure
/// loses the race; repair entries are a point mass at `repair_time`.
pub fn kernel_time_domain(
    params: &SystemParams,
    discipline: RepairDiscipline,
    from: usize,
    to: usize,
    t: f64,
) -> Result<f64> {
    params.validate()?;
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    params.check_state(to)?;
    let m = params.max_failed();
    if from > m {
        return Err(Error::InvalidState { index: from, max: m });
    }
    if from == 0 {
        let rate = params.state_failure_rate(0);
        return Ok(if to == 1 { -(-rate * t).exp_m1() } else { 0.0 });
    }
    let rate = params.state_failure_rate(from);
    let (fail_p, repair_p) = race_probabilities(rate * params.repair_time);
    if to == from + 1 {
        if t >= params.repair_time {
            Ok(fail_p)
        } else {
            Ok(-(-rate * t).exp_m1())
        }
    } else if to == discipline.repair_target(from) {
        Ok(if t >= params.repair_time { repair_p } else { 0.0 })
    } else {
        Ok(0.0)
    }
}

/// Sparse matrix of every one-step kernel transform at one frequency.
///
/// States are `0..=n-k+1`, the last being absorbing with no outgoing
/// entries. Entries are keyed `(from, to)` in a `BTreeMap`, so iteration
/// order is deterministic.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub discipline: RepairDiscipline,
    pub s: Complex64,
    /// Total number of states including the absorbing one.
    pub n_states: usize,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl KernelMatrix {
    /// Entry `(from, to)`, zero for pairs outside the pattern.
    pub fn get(&self, from: usize, to: usize) -> Complex64 {
        self.entries.get(&(from, to)).copied().unwrap_or(Complex64::ZERO)
    }

    /// Number of structurally nonzero entries.
    pub fn nonzero_count(&self) -> usize {
        self.entries.len()
    }

    /// Replaces one entry, creating it if absent. Meant for sensitivity
    /// and fault-injection studies on top of a built matrix; the normal
    /// construction path never needs it.
    pub fn set(&mut self, from: usize, to: usize, value: Complex64) {
        self.entries.insert((from, to), value);
    }

    /// Iterates `((from, to), value)` in key order.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Complex64)> {
        self.entries.iter()
    }

    /// Sum of row `from`; exactly 1.0 at `s = 0` for transient rows.
    pub fn row_sum(&self, from: usize) -> Complex64 {
        self.entries
            .range((from, 0)..(from + 1, 0))
            .map(|(_, v)| v)
            .sum()
    }
}

/// Builds the full kernel matrix at frequency `s`.
pub fn build_kernel_matrix(
    params: &SystemParams,
    discipline: RepairDiscipline,
    s: Complex64,
) -> Result<KernelMatrix> {
    params.validate()?;
    check_frequency(s)?;
    let m = params.max_failed();
    let mut entries = BTreeMap::new();
    let (fail0, _) = eval_initial_row(params.state_failure_rate(0), s);
    entries.insert((0, 1), fail0);
    for (row, i) in lst_rows(params, s).iter().zip(1..) {
        entries.insert((i, i + 1), row.fail);
        entries.insert((i, discipline.repair_target(i)), row.repair);
    }
    Ok(KernelMatrix { discipline, s, n_states: m + 2, entries })
}
