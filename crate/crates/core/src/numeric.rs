//! Small numeric helpers: stable complex exponentials and a dense complex
//! LU determinant used by the determinant-ratio validation route.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pivot-acceptance factor: a pivot smaller than `PIVOT_RTOL * eps * norm`
/// is treated as an exactly singular system.
pub(crate) const PIVOT_RTOL: f64 = 1e3;

/// `exp(z) - 1` without cancellation for small `|z|`.
///
/// Splits as `exp(a)cos(b) - 1 = expm1(a)cos(b) - 2 sin^2(b/2)` so both the
/// real and imaginary parts keep full relative accuracy when `z -> 0`.
pub(crate) fn complex_expm1(z: Complex64) -> Complex64 {
    let (a, b) = (z.re, z.im);
    let half = (0.5 * b).sin();
    let re = a.exp_m1() * b.cos() - 2.0 * half * half;
    let im = a.exp() * b.sin();
    Complex64::new(re, im)
}

/// `1 - exp(-z)` for `Re(z) >= 0`, accurate for small and large `|z|`.
pub(crate) fn one_minus_exp_neg(z: Complex64) -> Complex64 {
    -complex_expm1(-z)
}

/// Validates a time grid: nonempty, finite, nonnegative, strictly
/// increasing.
pub(crate) fn check_time_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParams("time grid must be nonempty".into()));
    }
    for &t in t_grid {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
    }
    if t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams(
            "time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Determinant of a dense complex matrix by LU elimination with partial
/// pivoting. `a` is row-major `dim x dim` and is consumed as scratch.
///
/// Returns a conditioning error when an eliminated pivot falls below
/// `PIVOT_RTOL * eps` relative to the matrix infinity norm: the determinant
/// of such a system carries no usable information in f64.
pub(crate) fn dense_lu_det(a: &mut [Complex64], dim: usize) -> Result<Complex64> {
    debug_assert_eq!(a.len(), dim * dim);
    let norm = (0..dim)
        .map(|r| (0..dim).map(|c| a[r * dim + c].norm()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let floor = PIVOT_RTOL * f64::EPSILON * norm;

    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..dim {
        let pivot_row = (col..dim)
            .max_by(|&r1, &r2| {
                a[r1 * dim + col]
                    .norm()
                    .total_cmp(&a[r2 * dim + col].norm())
            })
            .expect("non-empty pivot search");
        let pivot = a[pivot_row * dim + col];
        if pivot.norm() <= floor {
            return Err(Error::Conditioning(format!(
                "LU pivot {:.3e} below {:.3e} at column {col}",
                pivot.norm(),
                floor
            )));
        }
        if pivot_row != col {
            for c in 0..dim {
                a.swap(col * dim + c, pivot_row * dim + c);
            }
            det = -det;
        }
        det *= pivot;
        for row in col + 1..dim {
            let factor = a[row * dim + col] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in col..dim {
                let sub = factor * a[col * dim + c];
                a[row * dim + c] -= sub;
            }
        }
    }
    Ok(det)
}
