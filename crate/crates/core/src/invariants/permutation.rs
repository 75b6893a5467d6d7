use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection of `{0, …, s−1}` stored as its image array.
///
/// Displayed in one-based cycle notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
        }
        Ok(Self { images })
    }

    pub fn identity(s: usize) -> Self {
        Self { images: (0..s).collect() }
    }

    /// Builds from one-based images, as in `[2, 3, 1]`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidPermutation("one-based images start at 1".into()));
        }
        Self::new(images.iter().map(|i| i - 1).collect())
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(Self {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Self { images: inv }
    }

    pub fn cycles(&self) -> CycleDecomposition {
        cycle_decompose(self)
    }

    /// `(−1)^{s − #cycles}`.
    pub fn sign(&self) -> i32 {
        let c = self.cycles().cycles.len();
        if (self.len() - c).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.cycles().fmt(f)
    }
}

/// Disjoint cycles covering `{0, …, s−1}`, fixed points included.
///
/// Canonical form: each cycle starts at its smallest element and cycles are
/// sorted by that element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleDecomposition {
    pub cycles: Vec<Vec<usize>>,
}

impl fmt::Display for CycleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cycles.is_empty() {
            return f.write_str("()");
        }
        for c in &self.cycles {
            f.write_str("(")?;
            for (k, i) in c.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", i + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

pub fn cycle_decompose(sigma: &Permutation) -> CycleDecomposition {
    let mut seen = vec![false; sigma.len()];
    let mut cycles = Vec::new();
    // scanning starts in increasing order, so each cycle opens at its minimum
    for start in 0..sigma.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut i = sigma.image(start);
        while i != start {
            seen[i] = true;
            cycle.push(i);
            i = sigma.image(i);
        }
        cycles.push(cycle);
    }
    CycleDecomposition { cycles }
}

/// All permutations of `{0, …, s−1}` in lexicographic order of image arrays.
pub fn permutations(s: usize) -> Permutations {
    Permutations {
        next: Some((0..s).collect()),
    }
}

pub struct Permutations {
    next: Option<Vec<usize>>,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut a = current.clone();
        // successor: rightmost ascent, swap with the smallest larger tail entry,
        // reverse the tail
        if let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]).map(|i| i - 1) {
            let j = (i + 1..a.len()).rev().find(|&j| a[j] > a[i]).expect("ascent exists");
            a.swap(i, j);
            a[i + 1..].reverse();
            self.next = Some(a);
        }
        Some(Permutation { images: current })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inversion_sign(p: &Permutation) -> i32 {
        let a = p.images();
        let mut inv = 0;
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                if a[i] > a[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn decompositions() {
        assert_eq!(Permutation::identity(3).to_string(), "(1)(2)(3)");
        assert_eq!(Permutation::new(vec![1, 0]).unwrap().to_string(), "(1 2)");
        let s = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        assert_eq!(s.to_string(), "(1 2 3)");
        assert_eq!(s.sign(), 1);
        assert_eq!(inversion_sign(&s), 1);
        let t = Permutation::from_one_based(&[3, 2, 1]).unwrap();
        assert_eq!(t.cycles().cycles, vec![vec![0, 2], vec![1]]);
        assert_eq!(t.sign(), -1);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
    }

    #[test]
    fn enumeration() {
        assert_eq!(permutations(0).count(), 1);
        for s in 1..=6 {
            let all: Vec<_> = permutations(s).collect();
            assert_eq!(all.len(), (1..=s).product::<usize>());
            for w in all.windows(2) {
                assert!(w[0].images() < w[1].images());
            }
            for p in &all {
                assert_eq!(p.sign(), inversion_sign(p));
            }
        }
    }

    #[test]
    fn composition_and_inverse() {
        let all: Vec<_> = permutations(4).collect();
        for a in &all {
            assert_eq!(a.compose(&a.inverse()).unwrap(), Permutation::identity(4));
            for b in &all {
                assert_eq!(a.compose(b).unwrap().sign(), a.sign() * b.sign());
            }
        }
    }
}
