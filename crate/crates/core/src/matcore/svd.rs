//! Singular values by one-sided (Hestenes) Jacobi orthogonalisation.
//!
//! Columns are rotated pairwise until they are mutually orthogonal; the
//! singular values are then the column norms. The method keeps high relative
//! accuracy, including for the smallest singular values.

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, C64, ZERO};

pub const MAX_JACOBI_SWEEPS: usize = 60;

/// Singular values in nonincreasing order.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    let n = a.dim();
    // Column-major copy so rotations touch contiguous memory.
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| a[(i, j)]).collect()).collect();

    let tol = n as f64 * f64::EPSILON;
    let mut converged = n == 1;
    let mut worst = 0.0;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        worst = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let mut gamma = ZERO;
                for (x, y) in cols[p].iter().zip(&cols[q]) {
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                // separate roots keep tiny columns from underflowing
                let norms = alpha.sqrt() * beta.sqrt();
                if g == 0.0 || g <= tol * norms {
                    continue;
                }
                let off = g / norms;
                if off > worst {
                    worst = off;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let yp = *y * phase.conj();
                    let nx = *x * c - yp * s;
                    let ny = *x * s + yp * c;
                    *x = nx;
                    *y = ny * phase;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "one-sided Jacobi SVD",
            iterations: MAX_JACOBI_SWEEPS,
            residual: worst,
        });
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Largest singular value (Euclidean operator norm).
pub fn spectral_norm(a: &CMatrix) -> Result<f64> {
    Ok(singular_values(a)?[0])
}

/// Ratio of extreme singular values; infinite for singular matrices.
pub fn condition_number(a: &CMatrix) -> Result<f64> {
    let sv = singular_values(a)?;
    let min = *sv.last().expect("nonempty");
    Ok(if min == 0.0 { f64::INFINITY } else { sv[0] / min })
}
