//! Numerical kernel: characteristic polynomials, eigenvalues, singular values
//! and spectral radii of small dense complex matrices.
//!
//! Every function here is pure and may be called concurrently.

mod eigen;
mod svd;

pub use eigen::{eigenvalues, Spectrum, CONVERGENCE_TOL, MAX_QR_ITERATIONS_PER_EIGENVALUE};
pub use svd::{condition_number, singular_values, spectral_norm, MAX_JACOBI_SWEEPS};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::{CMatrix, C64, ONE};

/// Scale-relative threshold for "numerically zero" decisions: a quantity is
/// treated as zero when it is below `ZERO_TOL · (1 + scale)`.
pub const ZERO_TOL: f64 = 1e-10;

pub use crate::matrix::mat_mul;

/// Coefficients `σ₁..σ_d` of `p(z) = z^d − σ₁z^{d−1} + σ₂z^{d−2} − … + (−1)^d σ_d`.
///
/// `σ_i` is the i-th elementary symmetric function of the eigenvalues.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharPoly {
    pub coeffs: Vec<C64>,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Evaluates `p(z)` by Horner's rule.
    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = ONE;
        for (i, s) in self.coeffs.iter().enumerate() {
            let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
            acc = acc * z + s * sign;
        }
        acc
    }

    /// Evaluates `p(A)` by Horner's rule.
    pub fn eval_matrix(&self, a: &CMatrix) -> CMatrix {
        let d = a.dim();
        let mut acc = CMatrix::identity(d);
        for (i, s) in self.coeffs.iter().enumerate() {
            let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
            acc = &acc * a;
            for k in 0..d {
                acc[(k, k)] += s * sign;
            }
        }
        acc
    }
}

/// Characteristic polynomial by the Faddeev–LeVerrier recursion.
///
/// Uses only products and traces, so it is independent of the eigenvalue
/// solver and the two can be checked against each other.
pub fn char_poly(a: &CMatrix) -> CharPoly {
    let d = a.dim();
    // p(z) = Σ c_j z^j with c_d = 1; m holds the running adjugate-type matrix.
    let mut m = CMatrix::identity(d);
    let mut coeffs = Vec::with_capacity(d);
    for k in 1..=d {
        let am = a * &m;
        let c = -am.trace() / k as f64;
        // σ_k = (−1)^k c_{d−k}
        let sigma = if k % 2 == 0 { c } else { -c };
        coeffs.push(sigma);
        m = am;
        for i in 0..d {
            m[(i, i)] += c;
        }
    }
    CharPoly { coeffs }
}

pub fn spectral_radius(a: &CMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?.radius)
}

/// `max |p(A)_{ij}| / (1 + ‖A‖₂)^d`; zero up to rounding by Cayley–Hamilton.
pub fn cayley_hamilton_residual(a: &CMatrix) -> Result<f64> {
    let p = char_poly(a);
    let val = p.eval_matrix(a);
    let norm = spectral_norm(a)?;
    Ok(val.max_abs() / (1.0 + norm).powi(a.dim() as i32))
}

/// `|tr A|`, kept here because the trace bound `|tr A| ≤ d·ρ(A)` is a kernel
/// property exercised by the tests.
pub fn trace_modulus(a: &CMatrix) -> f64 {
    a.trace().norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_poly_diagonal() {
        let p = char_poly(&CMatrix::from_real_diag(&[1.0, 2.0]));
        assert!((p.coeffs[0] - C64::new(3.0, 0.0)).norm() < 1e-15);
        assert!((p.coeffs[1] - C64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn char_poly_nilpotent() {
        let p = char_poly(&CMatrix::from_real([[0.0, 1.0], [0.0, 0.0]]));
        assert!(p.coeffs.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn char_poly_eval_vanishes_on_eigenvalues() {
        let a = CMatrix::from_real([[6.0, -11.0, 6.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let p = char_poly(&a);
        for z in [1.0, 2.0, 3.0] {
            assert!(p.eval(C64::new(z, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_radius_cases() {
        assert_eq!(spectral_radius(&CMatrix::identity(3)).unwrap(), 1.0);
        assert_eq!(spectral_radius(&CMatrix::from_real([[0.0, 1.0], [0.0, 0.0]])).unwrap(), 0.0);
        let r = spectral_radius(&CMatrix::from_real([[0.0, 2.0], [3.0, 0.0]])).unwrap();
        assert!((r - 6f64.sqrt()).abs() < 1e-15);
        assert_eq!(spectral_radius(&CMatrix::zeros(4)).unwrap(), 0.0);
    }

    #[test]
    fn cayley_hamilton_small_cases() {
        assert!(cayley_hamilton_residual(&CMatrix::from_real_diag(&[1.0, 2.0])).unwrap() < 1e-12);
        assert_eq!(cayley_hamilton_residual(&CMatrix::zeros(3)).unwrap(), 0.0);
    }
}
