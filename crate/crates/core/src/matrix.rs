//! Dense complex square matrices and finite matrix sets.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A dense `d × d` complex matrix stored row-major.
///
/// Entries are always finite. Equality is never bitwise; use
/// [`CMatrix::approx_eq`] or [`CMatrix::max_abs_diff`].
#[derive(Clone, Serialize, Deserialize)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    /// Convenience constructor for real matrices.
    ///
    /// # Panics
    /// Panics if the rows are ragged, empty or contain non-finite values.
    pub fn from_real<const N: usize>(rows: [[f64; N]; N]) -> Self {
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::new(N, data).expect("valid real matrix literal")
    }

    pub(crate) fn from_raw(dim: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self::from_raw(dim, vec![ZERO; dim * dim])
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn conj_transpose(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, t: C64) -> Self {
        Self::from_raw(self.dim, self.data.iter().map(|&z| z * t).collect())
    }

    pub fn scale_real(&self, t: f64) -> Self {
        Self::from_raw(self.dim, self.data.iter().map(|&z| z * t).collect())
    }

    /// Max entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| (0..d).all(|j| i == j || self[(i, j)] == ZERO))
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        (0..self.dim)
            .map(|i| {
                let mut acc = ZERO;
                for (a, x) in self.row(i).iter().zip(v) {
                    acc += a * x;
                }
                acc
            })
            .collect()
    }

    /// `self^n` by repeated multiplication (`n = 0` gives the identity).
    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Self::identity(self.dim);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.dim;
        let mut a = self.data.clone();
        let mut inv = Self::identity(d).data;
        let scale = self.max_abs();
        if scale == 0.0 {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        for col in 0..d {
            let (piv, piv_abs) = (col..d)
                .map(|r| (r, a[r * d + col].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if piv_abs <= f64::EPSILON * scale * 1e-3 {
                return Err(Error::Singular {
                    condition: f64::INFINITY,
                });
            }
            if piv != col {
                for j in 0..d {
                    a.swap(col * d + j, piv * d + j);
                    inv.swap(col * d + j, piv * d + j);
                }
            }
            let p = a[col * d + col].inv();
            for j in 0..d {
                a[col * d + j] *= p;
                inv[col * d + j] *= p;
            }
            for r in 0..d {
                if r == col {
                    continue;
                }
                let f = a[r * d + col];
                if f == ZERO {
                    continue;
                }
                for j in 0..d {
                    let (ac, ic) = (a[col * d + j], inv[col * d + j]);
                    a[r * d + j] -= f * ac;
                    inv[r * d + j] -= f * ic;
                }
            }
        }
        Ok(Self::from_raw(d, inv))
    }

    /// `S · self · S⁻¹` given both `S` and its inverse.
    pub fn conjugate_by(&self, s: &Self, s_inv: &Self) -> Self {
        &(s * self) * s_inv
    }
}

/// Product `a · b`, rejecting mismatched dimensions.
///
/// Accumulation runs over the inner index in increasing order for every
/// output entry, so results are reproducible bit for bit on one platform.
pub fn mat_mul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(mul_unchecked(a, b))
}

fn mul_unchecked(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let d = a.dim;
    let mut out = vec![ZERO; d * d];
    for i in 0..d {
        let arow = &a.data[i * d..(i + 1) * d];
        for j in 0..d {
            let mut acc = ZERO;
            for (k, aik) in arow.iter().enumerate() {
                acc += aik * b.data[k * d + j];
            }
            out[i * d + j] = acc;
        }
    }
    CMatrix::from_raw(d, out)
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    /// # Panics
    /// Panics on dimension mismatch; use [`mat_mul`] for a fallible product.
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        mul_unchecked(self, rhs)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        CMatrix::from_raw(
            self.dim,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        )
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        CMatrix::from_raw(
            self.dim,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        )
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.dim)).finish()
    }
}

/// An ordered, non-empty list of matrices of one common dimension.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixSet {
    dim: usize,
    members: Vec<CMatrix>,
}

impl MatrixSet {
    pub fn new(members: Vec<CMatrix>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptySet)?;
        let dim = first.dim();
        if let Some(bad) = members.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { dim, members })
    }

    /// The pair `{E₁₂, E₂₁}` of 2×2 matrix units, whose products alternate
    /// between nilpotent (odd length) and rank-one idempotent (even length).
    pub fn gripenberg() -> Self {
        Self::new(vec![
            CMatrix::from_real([[0.0, 1.0], [0.0, 0.0]]),
            CMatrix::from_real([[0.0, 0.0], [1.0, 0.0]]),
        ])
        .expect("static pair")
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[CMatrix] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &CMatrix {
        &self.members[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CMatrix> {
        self.members.iter()
    }

    pub fn all_zero(&self) -> bool {
        self.members.iter().all(CMatrix::is_zero)
    }

    pub fn scale_real(&self, t: f64) -> Self {
        Self {
            dim: self.dim,
            members: self.members.iter().map(|m| m.scale_real(t)).collect(),
        }
    }

    pub fn scale(&self, t: C64) -> Self {
        Self {
            dim: self.dim,
            members: self.members.iter().map(|m| m.scale(t)).collect(),
        }
    }

    /// Applies `A ↦ S A S⁻¹` to every member.
    pub fn conjugate(&self, s: &CMatrix) -> Result<Self> {
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: s.dim(),
            });
        }
        let s_inv = s.inverse()?;
        Ok(Self {
            dim: self.dim,
            members: self.members.iter().map(|m| m.conjugate_by(s, &s_inv)).collect(),
        })
    }
}

impl<'a> IntoIterator for &'a MatrixSet {
    type Item = &'a CMatrix;
    type IntoIter = std::slice::Iter<'a, CMatrix>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Independent oracle: naive triple loop over explicit indices.
    fn oracle_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
        let d = a.dim();
        let mut out = CMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let mut s = c(0.0, 0.0);
                for k in 0..d {
                    s += a[(i, k)] * b[(k, j)];
                }
                out[(i, j)] = s;
            }
        }
        out
    }

    #[test]
    fn identity_is_neutral() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 2.0), c(-3.0, 0.5)], vec![c(0.0, 1.0), c(4.0, 0.0)]])
            .unwrap();
        let p = mat_mul(&CMatrix::identity(2), &a).unwrap();
        assert!(p.approx_eq(&a, 0.0));
    }

    #[test]
    fn matrix_units_multiply() {
        let e12 = CMatrix::from_real([[0.0, 1.0], [0.0, 0.0]]);
        let e21 = CMatrix::from_real([[0.0, 0.0], [1.0, 0.0]]);
        let p = mat_mul(&e12, &e21).unwrap();
        assert!(p.approx_eq(&CMatrix::from_real([[1.0, 0.0], [0.0, 0.0]]), 0.0));
        assert!(p.approx_eq(&oracle_mul(&e12, &e21), 0.0));
        assert!(mat_mul(&e12, &e12).unwrap().is_zero());
    }

    #[test]
    fn product_matches_triple_loop_oracle() {
        let a = CMatrix::from_rows(&[
            vec![c(1.0, -1.0), c(2.0, 0.5), c(0.0, 3.0)],
            vec![c(-0.5, 0.0), c(1.5, 1.5), c(2.0, -2.0)],
            vec![c(0.25, 0.75), c(0.0, 0.0), c(-1.0, 1.0)],
        ])
        .unwrap();
        let b = a.conj_transpose();
        assert!(mat_mul(&a, &b).unwrap().approx_eq(&oracle_mul(&a, &b), 1e-14));
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let err = mat_mul(&CMatrix::identity(2), &CMatrix::identity(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn rejects_non_finite_and_ragged() {
        assert!(matches!(
            CMatrix::new(2, vec![ONE, ONE, C64::new(f64::NAN, 0.0), ONE]),
            Err(Error::NonFinite { row: 1, col: 0 })
        ));
        assert!(CMatrix::from_rows(&[vec![ONE, ONE], vec![ONE]]).is_err());
        assert!(matches!(CMatrix::new(0, vec![]), Err(Error::ZeroDimension)));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = CMatrix::from_rows(&[vec![c(2.0, 1.0), c(1.0, 0.0)], vec![c(0.0, -1.0), c(3.0, 0.0)]])
            .unwrap();
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).approx_eq(&CMatrix::identity(2), 1e-14));
        let singular = CMatrix::from_real([[1.0, 2.0], [2.0, 4.0]]);
        assert!(matches!(singular.inverse(), Err(Error::Singular { .. })));
    }

    #[test]
    fn empty_set_is_rejected() {
        assert!(matches!(MatrixSet::new(vec![]), Err(Error::EmptySet)));
        assert!(MatrixSet::new(vec![CMatrix::identity(2), CMatrix::identity(3)]).is_err());
    }
}
