//! Absorption-time transform of the failure/repair chain and the mean
//! time to data loss derived from it.
//!
//! The quantity of interest is `P(s) = E[e^{-s T}]`, the
//! Laplace-Stieltjes transform of the time `T` from a fresh array to the
//! first visit of the absorbing state. Three evaluation routes are
//! provided. [`EvalMethod::LinearSolve`] eliminates the first-passage
//! system state by state from the absorbing end, carrying complements of
//! the elimination coefficients instead of the coefficients themselves;
//! each pivot then stays bounded away from zero by the escape
//! probability of its state, so no step amplifies rounding error even
//! when expected visit counts are astronomical.
//! [`EvalMethod::DeterminantRatio`] forms the dense transient system and
//! takes a determinant ratio; it is retained for cross-validation and
//! degrades near `s = 0` when repairs almost always win the race, where
//! the determinant legitimately underflows.
//! [`EvalMethod::SimplifiedParallel`] is the textbook closed form for
//! the parallel discipline, with the same small-`s` caveat.
//!
//! The mean time to data loss is computed two independent ways: from the
//! embedded jump chain with mean holding times ([`mtdl_embedded_chain`],
//! the authoritative route) and from a complex-step derivative of `P`
//! ([`mtdl_lst_derivative`]). The [`mtdl`] facade returns the chain
//! value; debug builds evaluate both and fail loudly on disagreement.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{
    build_kernel_matrix, check_frequency, eval_initial_row, lst_rows, race_probabilities,
    KernelMatrix, LstRow,
};
use crate::numeric::{dense_lu_det, rel_diff, PIVOT_RTOL};
use crate::params::{RepairDiscipline, SystemParams};

/// Evaluation route for the absorption-time transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    /// Stable state-by-state elimination of the first-passage system.
    LinearSolve,
    /// Cofactor expansion `prod(failure kernels) / det(I - Q)`;
    /// validation only.
    DeterminantRatio,
    /// Closed form for the parallel discipline; validation only.
    SimplifiedParallel,
}

/// Maximum relative disagreement tolerated between the two independent
/// mean-time-to-data-loss routes before [`mtdl`] reports an internal
/// inconsistency in debug builds.
pub const MTDL_CROSS_CHECK_RTOL: f64 = 1e-6;

fn guard_denominator(value: Complex64, scale: f64, what: &str) -> Result<()> {
    if !value.is_finite() || value.norm() <= PIVOT_RTOL * f64::EPSILON * scale {
        return Err(Error::Conditioning(format!(
            "{what} lost all significant digits"
        )));
    }
    Ok(())
}

/// Serial-discipline first passage: states talk to nearest neighbors
/// only, so one upward sweep eliminates each `h_i` in favor of
/// `h_{i-1}`. The sweep carries `A_i` (the constant part of
/// `h_i = A_i + B_i h_{i-1}`) and `C_i = 1 - B_i`, the escape-weighted
/// complement; `C` obeys the same recurrence as `A` driven by the row
/// deficit, which vanishes at `s = 0`, keeping `P(0) = 1` exact.
fn serial_h0(row0: (Complex64, Complex64), rows: &[LstRow]) -> Result<Complex64> {
    let last = rows[rows.len() - 1];
    let mut a_acc = last.fail;
    let mut c_acc = last.one_minus_repair;
    for row in rows[..rows.len() - 1].iter().rev() {
        let gain = row.fail * c_acc;
        let pivot = row.one_minus_fail + gain;
        guard_denominator(pivot, row.one_minus_fail.norm().max(gain.norm()), "pivot")?;
        a_acc = row.fail * a_acc / pivot;
        c_acc = (row.fail * c_acc + row.deficit) / pivot;
    }
    let (fail0, one_minus_fail0) = row0;
    let gain = fail0 * c_acc;
    let denom = one_minus_fail0 + gain;
    guard_denominator(denom, one_minus_fail0.norm().max(gain.norm()), "denominator")?;
    Ok(fail0 * a_acc / denom)
}

/// Parallel-discipline first passage: every repair returns to state 0,
/// so `P` telescopes into `prod(fail) / D` with
/// `D = (1 - fail_0) + sum_j prefix_j * deficit_j + prod(fail)`. Both
/// numerator and the last term of `D` reuse one running prefix, so at
/// `s = 0`, where the other terms vanish identically, the ratio is
/// exactly 1.
fn parallel_h0(row0: (Complex64, Complex64), rows: &[LstRow]) -> Result<Complex64> {
    let (fail0, one_minus_fail0) = row0;
    let mut denom = one_minus_fail0;
    let mut scale = one_minus_fail0.norm();
    let mut prefix = fail0;
    for row in rows {
        let term = prefix * row.deficit;
        denom += term;
        scale = scale.max(term.norm());
        prefix *= row.fail;
    }
    denom += prefix;
    scale = scale.max(prefix.norm());
    guard_denominator(denom, scale, "denominator")?;
    Ok(prefix / denom)
}

fn simplified_parallel(row0: (Complex64, Complex64), rows: &[LstRow]) -> Result<Complex64> {
    let (fail0, _) = row0;
    let mut sum = Complex64::ZERO;
    let mut prefix = fail0;
    for row in rows {
        sum += prefix * row.repair;
        prefix *= row.fail;
    }
    let denom = 1.0 - sum;
    guard_denominator(denom, sum.norm().max(1.0), "denominator")?;
    Ok(prefix / denom)
}

/// Determinant-ratio evaluation over an explicit kernel matrix. Exposed
/// separately so validation tests can perturb individual entries and
/// observe the effect on the transform.
pub fn absorption_lst_from_matrix(matrix: &KernelMatrix) -> Result<Complex64> {
    let transient = matrix.n_states - 1;
    let mut dense = vec![Complex64::ZERO; transient * transient];
    for i in 0..transient {
        dense[i * transient + i] = Complex64::from(1.0);
    }
    for (&(from, to), &value) in matrix.entries() {
        if to < transient {
            dense[from * transient + to] -= value;
        }
    }
    let det = dense_lu_det(&mut dense, transient)?;
    let mut numer = Complex64::from(1.0);
    for i in 0..transient {
        numer *= matrix.get(i, i + 1);
    }
    Ok(numer / det)
}

/// Laplace-Stieltjes transform of the time to data loss, evaluated at
/// `s` with `Re(s) >= 0`.
pub fn absorption_lst(
    params: &SystemParams,
    discipline: RepairDiscipline,
    s: Complex64,
    method: EvalMethod,
) -> Result<Complex64> {
    params.validate()?;
    check_frequency(s)?;
    let row0 = eval_initial_row(params.state_failure_rate(0), s);
    match method {
        EvalMethod::LinearSolve => {
            let rows = lst_rows(params, s);
            match discipline {
                RepairDiscipline::Serial => serial_h0(row0, &rows),
                RepairDiscipline::Parallel => parallel_h0(row0, &rows),
            }
        }
        EvalMethod::DeterminantRatio => {
            let matrix = build_kernel_matrix(params, discipline, s)?;
            absorption_lst_from_matrix(&matrix)
        }
        EvalMethod::SimplifiedParallel => {
            if discipline != RepairDiscipline::Parallel {
                return Err(Error::UnsupportedMethod(
                    "the simplified closed form applies only to the parallel discipline".into(),
                ));
            }
            simplified_parallel(row0, &lst_rows(params, s))
        }
    }
}

/// One system's absorption-time transform, bound to a discipline and an
/// evaluation method.
#[derive(Debug, Clone)]
pub struct AbsorptionTransform {
    params: SystemParams,
    discipline: RepairDiscipline,
    method: EvalMethod,
}

impl AbsorptionTransform {
    pub fn new(
        params: SystemParams,
        discipline: RepairDiscipline,
        method: EvalMethod,
    ) -> Result<Self> {
        params.validate()?;
        if method == EvalMethod::SimplifiedParallel && discipline != RepairDiscipline::Parallel {
            return Err(Error::UnsupportedMethod(
                "the simplified closed form applies only to the parallel discipline".into(),
            ));
        }
        Ok(Self { params, discipline, method })
    }

    pub fn evaluate(&self, s: Complex64) -> Result<Complex64> {
        absorption_lst(&self.params, self.discipline, s, self.method)
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn discipline(&self) -> RepairDiscipline {
        self.discipline
    }

    pub fn method(&self) -> EvalMethod {
        self.method
    }
}

/// One transient state of the chain embedded at jump instants.
#[derive(Debug, Clone, Copy)]
pub struct ChainRow {
    /// Probability the next jump goes up (a failure beats the repair).
    pub p_fail: f64,
    /// Probability the repair completes first; `p_fail + p_repair` is
    /// exactly 1.0.
    pub p_repair: f64,
    /// Mean holding time until either happens.
    pub hold: f64,
}

/// Jump chain of the failure/repair process together with mean holding
/// times, sufficient for the mean time to absorption.
#[derive(Debug, Clone)]
pub struct EmbeddedChain {
    pub discipline: RepairDiscipline,
    /// Mean holding time of the fully operational state.
    pub initial_hold: f64,
    /// Rows for states `1..=n-k` in state order.
    pub rows: Vec<ChainRow>,
}

impl EmbeddedChain {
    pub fn new(params: &SystemParams, discipline: RepairDiscipline) -> Result<Self> {
        params.validate()?;
        let rows = (1..=params.max_failed())
            .map(|i| {
                let rate = params.state_failure_rate(i);
                let (p_fail, p_repair) = race_probabilities(rate * params.repair_time);
                let hold = -(-rate * params.repair_time).exp_m1() / rate;
                ChainRow { p_fail, p_repair, hold }
            })
            .collect();
        Ok(Self {
            discipline,
            initial_hold: 1.0 / params.state_failure_rate(0),
            rows,
        })
    }

    /// Expected time from the fully operational state to data loss.
    ///
    /// Solved by the same upward elimination as the transform, on real
    /// nonnegative data: no subtraction occurs anywhere, so the result
    /// keeps full relative accuracy regardless of how many repair cycles
    /// precede absorption.
    pub fn mean_time_to_absorption(&self) -> Result<f64> {
        let rows = &self.rows;
        let last = rows[rows.len() - 1];
        let value = match self.discipline {
            RepairDiscipline::Serial => {
                let mut a_acc = last.hold;
                let mut c_acc = last.p_fail;
                for row in rows[..rows.len() - 1].iter().rev() {
                    let pivot = row.p_repair + row.p_fail * c_acc;
                    a_acc = (row.hold + row.p_fail * a_acc) / pivot;
                    c_acc = row.p_fail * c_acc / pivot;
                }
                if c_acc <= 0.0 {
                    return Err(Error::Conditioning(
                        "data loss is unreachable at working precision".into(),
                    ));
                }
                (self.initial_hold + a_acc) / c_acc
            }
            RepairDiscipline::Parallel => {
                let mut alpha = last.hold;
                let mut reach = last.p_fail;
                for row in rows[..rows.len() - 1].iter().rev() {
                    alpha = row.hold + row.p_fail * alpha;
                    reach *= row.p_fail;
                }
                if reach <= 0.0 {
                    return Err(Error::Conditioning(
                        "data loss is unreachable at working precision".into(),
                    ));
                }
                (self.initial_hold + alpha) / reach
            }
        };
        if !value.is_finite() {
            return Err(Error::Range(
                "mean time to data loss overflows f64".into(),
            ));
        }
        Ok(value)
    }
}

/// Mean time to data loss from the embedded jump chain.
pub fn mtdl_embedded_chain(params: &SystemParams, discipline: RepairDiscipline) -> Result<f64> {
    EmbeddedChain::new(params, discipline)?.mean_time_to_absorption()
}

/// Mean time to data loss as `-P'(0)`, via a complex-step derivative of
/// the absorption transform.
///
/// The step is purely imaginary with `h = 1e-30 * n * lambda`, far below
/// any scale of the problem, so no difference of nearby function values
/// occurs; the derivative is read off the imaginary part. The kernels'
/// exact pairing keeps the real parts of the solve identical to the
/// `s = 0` system, leaving the imaginary channel clean.
pub fn mtdl_lst_derivative(params: &SystemParams, discipline: RepairDiscipline) -> Result<f64> {
    params.validate()?;
    let h = 1e-30 * params.state_failure_rate(0);
    let p = absorption_lst(
        params,
        discipline,
        Complex64::new(0.0, h),
        EvalMethod::LinearSolve,
    )?;
    let value = -p.im / h;
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::Conditioning(
            "complex-step derivative lost significance".into(),
        ));
    }
    Ok(value)
}

/// Mean time to data loss.
///
/// Returns the embedded-chain value. Debug builds additionally evaluate
/// the complex-step derivative route and report an internal
/// inconsistency if the two disagree beyond [`MTDL_CROSS_CHECK_RTOL`].
pub fn mtdl(params: &SystemParams, discipline: RepairDiscipline) -> Result<f64> {
    let chain = mtdl_embedded_chain(params, discipline)?;
    #[cfg(debug_assertions)]
    {
        let derivative = mtdl_lst_derivative(params, discipline)?;
        let diff = rel_diff(chain, derivative);
        if diff > MTDL_CROSS_CHECK_RTOL {
            return Err(Error::InternalConsistency(format!(
                "mean time to data loss routes disagree: chain {chain:e}, derivative {derivative:e}, relative difference {diff:e}"
            )));
        }
    }
    Ok(chain)
}
