//! System description: array shape, failure rate, repair discipline.
//!
//! The failure process is tracked by the number of failed disks
//! `i = 0 ..= n - k + 1`; state `n - k + 1` is absorbing (data loss).

use crate::error::{Error, Result};

/// Which disks a completed repair restores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepairDiscipline {
    /// One repair at a time; completion moves `i` to `i - 1`.
    Serial,
    /// All failed disks are rebuilt together; completion moves `i` to `0`.
    Parallel,
}

impl RepairDiscipline {
    /// State reached when the repair running in state `i >= 1` completes.
    pub fn repair_target(self, i: usize) -> usize {
        match self {
            RepairDiscipline::Serial => i - 1,
            RepairDiscipline::Parallel => 0,
        }
    }

    /// Lowercase name used in CLI output.
    pub fn name(self) -> &'static str {
        match self {
            RepairDiscipline::Serial => "serial",
            RepairDiscipline::Parallel => "parallel",
        }
    }
}

/// A `k`-out-of-`n` array with i.i.d. exponential disk failures and a fixed
/// repair duration. Data survives while at least `k` disks are up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Total number of disks (`n >= 2`).
    pub n: u32,
    /// Minimum number of working disks (`0 < k < n`).
    pub k: u32,
    /// Per-disk exponential failure rate, in inverse time units.
    pub failure_rate: f64,
    /// Deterministic duration of one repair, in time units. Must be positive;
    /// very large values model an array that is never repaired.
    pub repair_time: f64,
}

impl SystemParams {
    /// Validate and build a parameter set.
    pub fn new(n: u32, k: u32, failure_rate: f64, repair_time: f64) -> Result<Self> {
        let p = SystemParams { n, k, failure_rate, repair_time };
        p.validate()?;
        Ok(p)
    }

    /// Check the domain invariants. Cheap; called at every public entry point
    /// so that hand-built structs are also covered.
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
        if !(self.failure_rate.is_finite() && self.failure_rate > 0.0) {
            return Err(Error::InvalidParams(format!(
                "failure rate must be positive and finite, got {}",
                self.failure_rate
            )));
        }
        if !self.repair_time.is_finite() || self.repair_time <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "repair time must be positive and finite, got {}",
                self.repair_time
            )));
        }
        Ok(())
    }

    /// Number of tolerable failures `n - k`; the last transient state.
    pub fn max_failed(&self) -> usize {
        (self.n - self.k) as usize
    }

    /// Index of the absorbing data-loss state, `n - k + 1`.
    pub fn absorbing_state(&self) -> usize {
        self.max_failed() + 1
    }

    /// Failure rate seen in state `i`: `(n - i) * lambda` over the surviving disks.
    pub fn state_failure_rate(&self, i: usize) -> f64 {
        (self.n as f64 - i as f64) * self.failure_rate
    }

    /// Reject state indices outside the chain.
    pub fn check_state(&self, index: usize) -> Result<()> {
        let max = self.absorbing_state();
        if index > max {
            return Err(Error::InvalidState { index, max });
        }
        Ok(())
    }
}
