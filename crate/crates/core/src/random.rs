//! Seeded random ensembles.
//!
//! Every trial draws from its own ChaCha stream derived from `(seed, trial)`,
//! so results do not depend on how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matcore::{condition_number, spectral_norm};
use crate::matrix::{CMatrix, MatrixSet, C64};

/// Independent generator for one trial of a seeded run.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Complex standard normal: `E|z|² = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. complex standard normal entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let data = (0..dim * dim).map(|_| complex_normal(rng)).collect();
    CMatrix::new(dim, data).expect("gaussian entries are finite")
}

/// Set of `size` Gaussian matrices, optionally rescaled so that the largest
/// Euclidean operator norm among the members is 1.
pub fn gaussian_set<R: Rng + ?Sized>(rng: &mut R, dim: usize, size: usize, normalize: bool) -> MatrixSet {
    let mats: Vec<CMatrix> = (0..size).map(|_| gaussian_matrix(rng, dim)).collect();
    let set = MatrixSet::new(mats).expect("nonempty set of equal dimensions");
    if normalize {
        normalize_euclidean(&set)
    } else {
        set
    }
}

/// Rescales a set so that `max ‖A‖₂ = 1` (left untouched if all members are zero).
pub fn normalize_euclidean(set: &MatrixSet) -> MatrixSet {
    let norm = set
        .iter()
        .map(|m| spectral_norm(m).unwrap_or(0.0))
        .fold(0.0, f64::max);
    if norm > 0.0 {
        set.scale_real(1.0 / norm)
    } else {
        set.clone()
    }
}

/// Strictly upper-triangular Gaussian matrix (nilpotent).
pub fn strictly_upper<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim);
    for i in 0..dim {
        for j in i + 1..dim {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// Diagonal matrix with log-uniform positive entries in `[e^{−spread}, e^{spread}]`.
pub fn positive_diagonal<R: Rng + ?Sized>(rng: &mut R, dim: usize, spread: f64) -> CMatrix {
    let diag: Vec<f64> = (0..dim)
        .map(|_| (rng.random_range(-spread..=spread)).exp())
        .collect();
    CMatrix::from_real_diag(&diag)
}

/// Gaussian matrix resampled until its condition number is at most `max_cond`.
pub fn well_conditioned<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_cond: f64) -> CMatrix {
    loop {
        let m = gaussian_matrix(rng, dim);
        if let Ok(c) = condition_number(&m) {
            if c <= max_cond {
                return m;
            }
        }
    }
}

/// Gaussian vector normalised to unit Euclidean length.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| complex_normal(rng)).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-300 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::spectral_radius;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = gaussian_matrix(&mut trial_rng(7, 3), 3);
        let b = gaussian_matrix(&mut trial_rng(7, 3), 3);
        let c = gaussian_matrix(&mut trial_rng(7, 4), 3);
        assert!(a.approx_eq(&b, 0.0));
        assert!(!a.approx_eq(&c, 1e-3));
    }

    #[test]
    fn normalized_set_has_unit_norm() {
        let set = gaussian_set(&mut trial_rng(1, 0), 3, 2, true);
        let n = set.iter().map(|m| spectral_norm(m).unwrap()).fold(0.0, f64::max);
        assert!((n - 1.0).abs() < 1e-13);
    }

    #[test]
    fn strictly_upper_is_nilpotent() {
        let m = strictly_upper(&mut trial_rng(2, 0), 4);
        assert!(m.pow(4).is_zero());
        assert_eq!(spectral_radius(&m).unwrap(), 0.0);
    }
}
