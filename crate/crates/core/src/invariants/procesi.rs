use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::spectral_norm;
use crate::matrix::{CMatrix, MatrixSet, C64};
use crate::semigroup::{spectral_radii_by_depth, Word, DEFAULT_NODE_BUDGET};

/// Largest number of trace words `procesi_map` will build.
pub const MAX_TRACE_WORDS: usize = 1 << 21;

/// Below this value `τ` is treated as zero, i.e. every trace word vanishes.
pub const TAU_ZERO_CUTOFF: f64 = 1e-100;

/// Traces of all words of length `1..=max_len` in the letters of a tuple,
/// ordered by length and then lexicographically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceVector {
    pub dim: usize,
    pub letters: usize,
    pub max_len: usize,
    pub entries: Vec<(Word, C64)>,
}

impl TraceVector {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Looks up `tr(A_{w₁} ⋯ A_{w_n})`.
    pub fn get(&self, word: &[usize]) -> Option<C64> {
        if word.is_empty() || word.len() > self.max_len || word.iter().any(|&l| l >= self.letters) {
            return None;
        }
        let offset: usize = (1..word.len()).map(|j| self.letters.pow(j as u32)).sum();
        let rank = word.iter().fold(0, |acc, &l| acc * self.letters + l);
        Some(self.entries[offset + rank].1)
    }

    pub fn values(&self) -> impl Iterator<Item = C64> + '_ {
        self.entries.iter().map(|(_, v)| *v)
    }

    /// Largest gap between an entry and the entries of its cyclic rotations.
    pub fn cyclicity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (w, v) in &self.entries {
            let mut rotated = w.letters().to_vec();
            for _ in 1..rotated.len() {
                rotated.rotate_left(1);
                let other = self.get(&rotated).expect("rotation of a stored word");
                worst = worst.max((v - other).norm());
            }
        }
        worst
    }
}

/// `N = ℓ + ℓ² + ⋯ + ℓᵏ`, saturating.
pub fn trace_word_count(letters: usize, max_len: usize) -> usize {
    crate::semigroup::tree_size(letters, max_len)
}

/// `2^d − 1`, the word length needed to generate all conjugation invariants.
pub fn procesi_length(dim: usize) -> usize {
    (1usize << dim.min(usize::BITS as usize - 1)) - 1
}

/// Trace vector with words up to length `2^d − 1`.
pub fn procesi_map(tuple: &[CMatrix]) -> Result<TraceVector> {
    let dim = tuple.first().ok_or(Error::EmptySet)?.dim();
    procesi_map_with_length(tuple, procesi_length(dim))
}

pub fn procesi_map_with_length(tuple: &[CMatrix], max_len: usize) -> Result<TraceVector> {
    let set = MatrixSet::new(tuple.to_vec())?;
    if max_len == 0 {
        return Err(Error::usage("trace words have at least one letter"));
    }
    let letters = set.len();
    let n = trace_word_count(letters, max_len);
    if n > MAX_TRACE_WORDS {
        return Err(Error::usage(format!(
            "{n} trace words exceed the cap of {MAX_TRACE_WORDS}"
        )));
    }
    let mut entries = Vec::with_capacity(n);
    let mut level: Vec<(Vec<usize>, CMatrix)> =
        set.iter().enumerate().map(|(i, a)| (vec![i], a.clone())).collect();
    for len in 1..=max_len {
        for (w, p) in &level {
            entries.push((Word::from_letters(w), p.trace()));
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::with_capacity(level.len() * letters);
        for (w, p) in &level {
            for (i, a) in set.iter().enumerate() {
                let mut w2 = w.clone();
                w2.push(i);
                next.push((w2, p * a));
            }
        }
        level = next;
    }
    Ok(TraceVector {
        dim: set.dim(),
        letters,
        max_len,
        entries,
    })
}

/// `max_α |π_α|^{1/|α|}`, with values under [`TAU_ZERO_CUTOFF`] reported as zero.
pub fn tau(tv: &TraceVector) -> f64 {
    let t = tv
        .entries
        .iter()
        .map(|(w, v)| v.norm().powf(1.0 / w.len() as f64))
        .fold(0.0, f64::max);
    if t < TAU_ZERO_CUTOFF {
        0.0
    } else {
        t
    }
}

/// Largest relative gap between two trace vectors over the same words.
///
/// Each entry of word length `n` is compared at the scale
/// `max(|a|, |b|, νⁿ)`, with `ν` a bound on the norms of the letters.
pub fn max_relative_deviation(a: &TraceVector, b: &TraceVector, nu: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let mut worst: f64 = 0.0;
    for ((w, x), (_, y)) in a.entries.iter().zip(&b.entries) {
        let scale = x.norm().max(y.norm()).max(nu.powi(w.len() as i32));
        if scale > 0.0 {
            worst = worst.max((x - y).norm() / scale);
        }
    }
    Ok(worst)
}

/// Largest spectral norm among the letters.
pub fn tuple_norm(tuple: &[CMatrix]) -> Result<f64> {
    tuple.iter().try_fold(0.0f64, |m, a| Ok(m.max(spectral_norm(a)?)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TauRhoCheck {
    pub tau: f64,
    /// `max_{1≤j≤k} ρ(Σʲ)^{1/j}` with `k = 2^d − 1`.
    pub rho_max: f64,
    /// `d · rho_max`
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
    /// `τ` fell under the zero cutoff.
    pub zero_branch: bool,
}

/// Checks `τ(π(x)) ≤ d · max_{1≤j≤k} ρ(Σʲ)^{1/j}` for the set of letters.
pub fn tau_rho_bound(tuple: &[CMatrix], tol: f64) -> Result<TauRhoCheck> {
    let tv = procesi_map(tuple)?;
    let set = MatrixSet::new(tuple.to_vec())?;
    let radii = spectral_radii_by_depth(&set, tv.max_len, DEFAULT_NODE_BUDGET)?;
    let rho_max = crate::semigroup::running_root_max(&radii).last().copied().unwrap_or(0.0);
    let t = tau(&tv);
    let bound = tv.dim as f64 * rho_max;
    Ok(TauRhoCheck {
        tau: t,
        rho_max,
        bound,
        slack: bound - t,
        holds: t <= bound + tol * (1.0 + bound),
        zero_branch: t == 0.0,
    })
}

/// For a pair of 2×2 matrices, recomputes every length-3 trace word from
/// `tr A, tr A², tr B, tr B², tr AB` using `X² = (tr X) X − (det X) I`.
pub fn d2_length_three(tv: &TraceVector) -> Result<Vec<(Word, C64)>> {
    if tv.dim != 2 || tv.letters != 2 || tv.max_len < 2 {
        return Err(Error::usage("needs the trace vector of a 2×2 pair"));
    }
    let t = |w: &[usize]| tv.get(w).expect("length ≤ 2 word");
    let tr = [t(&[0]), t(&[1])];
    let tr_sq = [t(&[0, 0]), t(&[1, 1])];
    let tr_ab = t(&[0, 1]);
    let det = [0, 1].map(|i| (tr[i] * tr[i] - tr_sq[i]) * 0.5);
    let mut out = Vec::with_capacity(8);
    for code in 0..8usize {
        let w = [code >> 2 & 1, code >> 1 & 1, code & 1];
        let ones = w.iter().sum::<usize>();
        let v = match ones {
            0 => tr[0] * tr_sq[0] - det[0] * tr[0],
            3 => tr[1] * tr_sq[1] - det[1] * tr[1],
            // two copies of X and one of Y: tr(X²Y) = tr X tr(XY) − det X tr Y
            1 => tr[0] * tr_ab - det[0] * tr[1],
            _ => tr[1] * tr_ab - det[1] * tr[0],
        };
        out.push((Word::from_letters(&w), v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_matrix, trial_rng};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn diagonal_powers() {
        let tv = procesi_map(&[CMatrix::from_real_diag(&[1.0, 2.0])]).unwrap();
        let v: Vec<C64> = tv.values().collect();
        assert_eq!(v, vec![c(3.0), c(5.0), c(9.0)]);
    }

    #[test]
    fn gripenberg_traces() {
        let g = MatrixSet::gripenberg();
        let tv = procesi_map(g.members()).unwrap();
        assert_eq!(tv.len(), 2 + 4 + 8);
        assert_eq!(tv.get(&[0]), Some(c(0.0)));
        assert_eq!(tv.get(&[0, 1]), Some(c(1.0)));
        assert_eq!(tv.get(&[1, 0]), Some(c(1.0)));
        assert_eq!(tv.get(&[0, 0]), Some(c(0.0)));
        for (w, v) in &tv.entries {
            if w.len() == 3 {
                assert_eq!(*v, c(0.0));
            }
        }
        assert_eq!(tau(&tv), 1.0);
        let chk = tau_rho_bound(g.members(), 1e-12).unwrap();
        assert!(chk.holds && chk.bound == 2.0);
    }

    #[test]
    fn nilpotent_family_vanishes() {
        let n = CMatrix::from_real([[0.0, 1.0, 2.0], [0.0, 0.0, 3.0], [0.0, 0.0, 0.0]]);
        let m = CMatrix::from_real([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        let tv = procesi_map(&[n, m]).unwrap();
        assert!(tv.values().all(|v| v == c(0.0)));
        assert_eq!(tau(&tv), 0.0);
    }

    #[test]
    fn tau_of_scaled_identity() {
        let tv = procesi_map(&[CMatrix::identity(2).scale_real(2.0)]).unwrap();
        assert!((tau(&tv) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn lookup_matches_order() {
        let mut rng = trial_rng(3, 0);
        let tuple: Vec<_> = (0..3).map(|_| gaussian_matrix(&mut rng, 2)).collect();
        let tv = procesi_map_with_length(&tuple, 3).unwrap();
        for (w, v) in &tv.entries {
            assert_eq!(tv.get(w.letters()), Some(*v));
            assert!((w.product(&MatrixSet::new(tuple.clone()).unwrap()).trace() - v).norm() < 1e-12);
        }
        for pair in tv.entries.windows(2) {
            let (a, b) = (&pair[0].0, &pair[1].0);
            assert!((a.len(), a) < (b.len(), b));
        }
        assert!(tv.cyclicity_defect() < 1e-12);
    }

    #[test]
    fn length_three_reconstruction() {
        let mut rng = trial_rng(5, 0);
        let tuple = vec![gaussian_matrix(&mut rng, 2), gaussian_matrix(&mut rng, 2)];
        let tv = procesi_map(&tuple).unwrap();
        for (w, v) in d2_length_three(&tv).unwrap() {
            assert!((tv.get(w.letters()).unwrap() - v).norm() < 1e-10);
        }
    }

    #[test]
    fn word_cap() {
        let tuple = vec![CMatrix::identity(4); 3];
        assert!(matches!(procesi_map(&tuple), Err(Error::Usage(_))));
    }
}
