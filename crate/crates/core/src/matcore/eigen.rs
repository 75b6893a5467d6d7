//! Eigenvalues of dense complex matrices.
//!
//! Dimensions 1 and 2 use closed forms. Larger matrices are balanced,
//! reduced to upper Hessenberg form with Householder reflections, and then
//! driven to triangular form by single-shift complex QR sweeps with
//! Wilkinson shifts and small-subdiagonal deflation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, C64, ZERO};

/// Iteration cap per eigenvalue for the QR sweeps.
pub const MAX_QR_ITERATIONS_PER_EIGENVALUE: usize = 100;

/// Target size of a deflated subdiagonal, relative to its diagonal neighbours.
/// Deflation uses machine epsilon, which is tighter than this; the constant is
/// the accuracy promised to callers.
pub const CONVERGENCE_TOL: f64 = 1e-12;

/// All eigenvalues with multiplicity together with the spectral radius.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    pub radius: f64,
}

impl Spectrum {
    fn from_eigenvalues(eigenvalues: Vec<C64>) -> Self {
        let radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Self { eigenvalues, radius }
    }

    /// Eigenvalues ordered by real part, then imaginary part.
    pub fn sorted(&self) -> Vec<C64> {
        let mut v = self.eigenvalues.clone();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }
}

pub fn eigenvalues(a: &CMatrix) -> Result<Spectrum> {
    let vals = match a.dim() {
        1 => vec![a[(0, 0)]],
        2 => {
            let (l1, l2) = eig_2x2(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
            vec![l1, l2]
        }
        _ => hessenberg_qr(a)?,
    };
    Ok(Spectrum::from_eigenvalues(vals))
}

/// Roots of `z² − (a + d) z + (ad − bc)`, with the smaller root recovered from
/// the determinant to avoid cancellation.
fn eig_2x2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let mean = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let disc = (half_diff * half_diff + b * c).sqrt();
    let det = a * d - b * c;
    let plus = mean + disc;
    let minus = mean - disc;
    let big = if plus.norm() >= minus.norm() { plus } else { minus };
    if big == ZERO {
        return (ZERO, ZERO);
    }
    (big, det / big)
}

fn hessenberg_qr(a: &CMatrix) -> Result<Vec<C64>> {
    let n = a.dim();
    let mut h: Vec<C64> = a.as_slice().to_vec();
    balance(&mut h, n);
    reduce_to_hessenberg(&mut h, n);

    let at = |i: usize, j: usize| i * n + j;
    let mut eig = vec![ZERO; n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total_iter = 0usize;

    loop {
        if hi == 0 {
            eig[0] = h[at(0, 0)];
            break;
        }
        // Look for a negligible subdiagonal inside the active block.
        let mut lo = 0;
        for k in (1..=hi).rev() {
            let sub = h[at(k, k - 1)].norm();
            let mut diag = h[at(k - 1, k - 1)].norm() + h[at(k, k)].norm();
            if diag == 0.0 {
                diag = block_norm(&h, n, 0, hi);
            }
            if sub <= f64::EPSILON * diag || sub < f64::MIN_POSITIVE {
                h[at(k, k - 1)] = ZERO;
                lo = k;
                break;
            }
        }
        if lo == hi {
            eig[hi] = h[at(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        if lo + 1 == hi {
            let (l1, l2) = eig_2x2(
                h[at(lo, lo)],
                h[at(lo, hi)],
                h[at(hi, lo)],
                h[at(hi, hi)],
            );
            eig[lo] = l1;
            eig[hi] = l2;
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total_iter += 1;
        if iter > MAX_QR_ITERATIONS_PER_EIGENVALUE {
            return Err(Error::NonConvergence {
                what: "Hessenberg QR eigenvalue iteration",
                iterations: total_iter,
                residual: h[at(hi, hi - 1)].norm(),
            });
        }

        let shift = if iter.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[at(hi, hi)] + C64::new(0.75 * h[at(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[at(hi - 1, hi - 1)],
                h[at(hi - 1, hi)],
                h[at(hi, hi - 1)],
                h[at(hi, hi)],
            )
        };
        qr_sweep(&mut h, n, lo, hi, shift);
    }
    Ok(eig)
}

fn block_norm(h: &[C64], n: usize, lo: usize, hi: usize) -> f64 {
    let mut s: f64 = 0.0;
    for i in lo..=hi {
        for j in lo..=hi {
            s = s.max(h[i * n + j].norm());
        }
    }
    s
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let (l1, l2) = eig_2x2(a, b, c, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR step `H − μI = QR`, `H ← RQ + μI` on rows and
/// columns `lo..=hi`. Only the active block matters for eigenvalues.
fn qr_sweep(h: &mut [C64], n: usize, lo: usize, hi: usize, shift: C64) {
    let at = |i: usize, j: usize| i * n + j;
    for i in lo..=hi {
        h[at(i, i)] -= shift;
    }
    let mut rots: Vec<(C64, C64)> = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let x = h[at(k, k)];
        let y = h[at(k + 1, k)];
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (C64::new(1.0, 0.0), ZERO)
        } else {
            (x / r, y / r)
        };
        for j in k..=hi {
            let a = h[at(k, j)];
            let b = h[at(k + 1, j)];
            h[at(k, j)] = c.conj() * a + s.conj() * b;
            h[at(k + 1, j)] = -s * a + c * b;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        let last = (k + 1).min(hi);
        for i in lo..=last {
            let a = h[at(i, k)];
            let b = h[at(i, k + 1)];
            h[at(i, k)] = a * c + b * s;
            h[at(i, k + 1)] = -a * s.conj() + b * c.conj();
        }
    }
    for i in lo..=hi {
        h[at(i, i)] += shift;
    }
}

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable. Exact in binary floating point.
fn balance(h: &mut [C64], n: usize) {
    const RADIX: f64 = 2.0;
    let abs1 = |z: C64| z.re.abs() + z.im.abs();
    let mut done = false;
    let mut sweeps = 0;
    while !done && sweeps < 100 {
        done = true;
        sweeps += 1;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += abs1(h[j * n + i]);
                    row += abs1(h[i * n + j]);
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            while col * f < row / f / RADIX {
                f *= RADIX;
            }
            while col * f > row / f * RADIX {
                f /= RADIX;
            }
            if col * f + row / f < 0.95 * total {
                done = false;
                for j in 0..n {
                    h[i * n + j] /= f;
                    h[j * n + i] *= f;
                }
            }
        }
    }
}

fn reduce_to_hessenberg(h: &mut [C64], n: usize) {
    let at = |i: usize, j: usize| i * n + j;
    for k in 0..n.saturating_sub(2) {
        let tail: f64 = (k + 2..n).map(|i| h[at(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = h[at(k + 1, k)];
        let norm = (x0.norm_sqr() + tail).sqrt();
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[at(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // H ← (I − 2vvᴴ) H
        for j in 0..n {
            let mut dot = ZERO;
            for (idx, vi) in v.iter().enumerate() {
                dot += vi.conj() * h[at(k + 1 + idx, j)];
            }
            for (idx, vi) in v.iter().enumerate() {
                h[at(k + 1 + idx, j)] -= *vi * dot * 2.0;
            }
        }
        // H ← H (I − 2vvᴴ)
        for i in 0..n {
            let mut dot = ZERO;
            for (idx, vi) in v.iter().enumerate() {
                dot += h[at(i, k + 1 + idx)] * vi;
            }
            for (idx, vi) in v.iter().enumerate() {
                h[at(i, k + 1 + idx)] -= dot * vi.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[at(i, k)] = ZERO;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close_set(got: &[C64], want: &[C64], tol: f64) {
        assert_eq!(got.len(), want.len());
        let mut used = vec![false; want.len()];
        for g in got {
            let (idx, dist) = want
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, w)| (i, (g - w).norm()))
                .fold((usize::MAX, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
            assert!(dist <= tol, "eigenvalue {g} unmatched (distance {dist:e}) in {want:?}");
            used[idx] = true;
        }
    }

    #[test]
    fn diagonal_three() {
        let s = eigenvalues(&CMatrix::from_real_diag(&[1.0, 2.0, 3.0])).unwrap();
        assert_close_set(&s.eigenvalues, &[1.0.into(), 2.0.into(), 3.0.into()], 1e-14);
        assert_eq!(s.radius, 3.0);
    }

    #[test]
    fn rotation_has_imaginary_pair() {
        let s = eigenvalues(&CMatrix::from_real([[0.0, -1.0], [1.0, 0.0]])).unwrap();
        assert_close_set(&s.eigenvalues, &[C64::new(0.0, 1.0), C64::new(0.0, -1.0)], 1e-15);
    }

    #[test]
    fn companion_of_cubic() {
        // z³ − 6z² + 11z − 6 = (z−1)(z−2)(z−3)
        let a = CMatrix::from_real([[6.0, -11.0, 6.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let s = eigenvalues(&a).unwrap();
        assert_close_set(&s.eigenvalues, &[1.0.into(), 2.0.into(), 3.0.into()], 1e-9);
    }

    #[test]
    fn nilpotent_jordan_block_is_exact() {
        let a = CMatrix::from_real([
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 0.0, 0.0],
        ]);
        assert_eq!(eigenvalues(&a).unwrap().radius, 0.0);
    }

    #[test]
    fn permutation_cycle_roots_of_unity() {
        let a = CMatrix::from_real([
            [0.0, 0.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0, 0.0],
        ]);
        let want: Vec<C64> = (0..5)
            .map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 5.0))
            .collect();
        assert_close_set(&eigenvalues(&a).unwrap().eigenvalues, &want, 1e-12);
    }

    #[test]
    fn badly_scaled_matrix_benefits_from_balancing() {
        let a = CMatrix::from_real([[1.0, 1e6, 0.0], [1e-6, 2.0, 1e6], [0.0, 1e-6, 3.0]]);
        let s = eigenvalues(&a).unwrap();
        let sum: C64 = s.eigenvalues.iter().sum();
        assert!((sum - a.trace()).norm() < 1e-9);
    }
}
