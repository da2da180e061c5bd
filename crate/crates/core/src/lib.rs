//! Reliability analysis of k-out-of-n storage arrays with deterministic
//! repair.
//!
//! An array of `n` disks survives while at least `k` remain operational.
//! Disks fail independently at exponential rate `lambda`; a failed disk
//! is rebuilt a fixed `repair_time` after its failure is noticed, either
//! one at a time ([`RepairDiscipline::Serial`]) or all in flight at once
//! ([`RepairDiscipline::Parallel`]). The crate computes the
//! Laplace-Stieltjes transform of the time to data loss, the mean time to
//! data loss, and reliability curves `R(t) = P(no data loss by t)`, and
//! cross-checks everything against a Monte Carlo simulator of the same
//! process.
//!
//! Modules:
//! - [`params`]: system description and repair disciplines.
//! - [`kernels`]: one-step semi-Markov kernels in transform and time
//!   domain.
//! - [`transform`]: absorption-time transform, evaluation methods, and
//!   mean time to data loss.
//! - [`baselines`]: closed-form references with exponential repair and
//!   asymptotic approximations.
//! - [`inversion`]: numerical transform inversion for reliability
//!   curves.
//! - [`simulate`]: Monte Carlo oracle for the same failure/repair
//!   process.

pub mod baselines;
pub mod error;
pub mod inversion;
pub mod kernels;
mod numeric;
pub mod params;
pub mod simulate;
pub mod transform;

pub use error::{Error, ErrorClass, Result};
pub use kernels::{build_kernel_matrix, kernel_lst, kernel_time_domain, KernelMatrix};
pub use params::{RepairDiscipline, SystemParams};
