//! Products of matrices drawn from a finite set, and two-sided bounds on the
//! joint spectral radius obtained from them.
//!
//! For every depth `n`:
//! - `‖Σⁿ‖^{1/n}` is an upper bound on the joint spectral radius in any
//!   operator norm, since the radius is the infimum of that sequence;
//! - `ρ(Σⁿ)^{1/n}` is a lower bound, since every periodic product grows at
//!   least at its spectral radius.

mod bounds;
mod enumerate;

pub use bounds::{
    berger_wang_gap, jsr_bounds, BoundsConfig, BoundsReport, DepthRecord, DepthStatus, GapRecord, Witness,
    DEFAULT_MAX_DEPTH, DEFAULT_NODE_BUDGET,
};
pub use enumerate::{enumerate_products, ProductStream};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::spectral_radius;
use crate::matrix::{CMatrix, MatrixSet};
use crate::norms::NormSpec;

/// Slack used when comparing spectral-radius roots across depths.
pub const MONOTONICITY_TOL: f64 = 1e-9;

/// A finite sequence of indices into a [`MatrixSet`]; the word `(i₁, …, i_n)`
/// names the product `A_{i₁} ⋯ A_{i_n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>, alphabet: usize) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::usage("words have at least one letter"));
        }
        if let Some(&bad) = letters.iter().find(|&&l| l >= alphabet) {
            return Err(Error::usage(format!(
                "letter {bad} out of range for a set of {alphabet} matrices"
            )));
        }
        Ok(Self(letters))
    }

    pub(crate) fn from_letters(letters: &[usize]) -> Self {
        Self(letters.to_vec())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Evaluates the product named by the word.
    pub fn product(&self, set: &MatrixSet) -> CMatrix {
        let mut acc = set.get(self.0[0]).clone();
        for &l in &self.0[1..] {
            acc = &acc * set.get(l);
        }
        acc
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Total number of nodes in the product tree down to `depth`.
pub(crate) fn tree_size(alphabet: usize, depth: usize) -> usize {
    let mut total: usize = 0;
    let mut level: usize = 1;
    for _ in 0..depth {
        level = level.saturating_mul(alphabet);
        total = total.saturating_add(level);
    }
    total
}

pub(crate) fn check_budget(set: &MatrixSet, depth: usize, budget: usize) -> Result<()> {
    if depth == 0 {
        return Err(Error::usage("depth must be at least 1"));
    }
    if tree_size(set.len(), depth) > budget {
        return Err(Error::BudgetExceeded { budget, visited: 0 });
    }
    Ok(())
}

/// Depth-first walk of the product tree. `visit` sees each node's word and
/// product and decides whether to descend.
pub(crate) fn walk<F>(set: &MatrixSet, max_depth: usize, first: Option<usize>, visit: &mut F) -> Result<()>
where
    F: FnMut(&[usize], &CMatrix) -> Result<bool>,
{
    let mut word = Vec::with_capacity(max_depth);
    let roots: Vec<usize> = match first {
        Some(i) => vec![i],
        None => (0..set.len()).collect(),
    };
    for i in roots {
        word.push(i);
        let m = set.get(i).clone();
        descend(set, max_depth, &mut word, &m, visit)?;
        word.pop();
    }
    Ok(())
}

fn descend<F>(set: &MatrixSet, max_depth: usize, word: &mut Vec<usize>, prod: &CMatrix, visit: &mut F) -> Result<()>
where
    F: FnMut(&[usize], &CMatrix) -> Result<bool>,
{
    if !visit(word, prod)? || word.len() == max_depth {
        return Ok(());
    }
    for (i, a) in set.iter().enumerate() {
        word.push(i);
        let child = prod * a;
        descend(set, max_depth, word, &child, visit)?;
        word.pop();
    }
    Ok(())
}

/// `ρ(Σʲ) = max_{P∈Σʲ} ρ(P)` for `j = 1..=depth` (index `j − 1`).
pub fn spectral_radii_by_depth(set: &MatrixSet, depth: usize, budget: usize) -> Result<Vec<f64>> {
    check_budget(set, depth, budget)?;
    let mut out = vec![0.0f64; depth];
    walk(set, depth, None, &mut |w, m| {
        let r = spectral_radius(m)?;
        let slot = &mut out[w.len() - 1];
        *slot = slot.max(r);
        Ok(true)
    })?;
    Ok(out)
}

/// `‖Σⁿ‖` in the given norm.
pub fn set_power_norm(set: &MatrixSet, spec: &NormSpec, n: usize, budget: usize) -> Result<f64> {
    check_budget(set, n, budget)?;
    let norm = spec.prepare()?;
    let mut best: f64 = 0.0;
    walk(set, n, None, &mut |w, m| {
        if w.len() == n {
            best = best.max(norm.operator(m)?);
        }
        Ok(true)
    })?;
    Ok(best)
}

/// `‖Σⁿ‖^{1/n}`, an upper bound on the joint spectral radius for induced norms.
pub fn upper_bound_at(set: &MatrixSet, spec: &NormSpec, n: usize) -> Result<f64> {
    Ok(set_power_norm(set, spec, n, DEFAULT_NODE_BUDGET)?.powf(1.0 / n as f64))
}

/// `max_{1≤j≤n} ρ(Σʲ)^{1/j}`, a lower bound on the joint spectral radius.
pub fn lower_bound_at(set: &MatrixSet, n: usize) -> Result<f64> {
    let radii = spectral_radii_by_depth(set, n, DEFAULT_NODE_BUDGET)?;
    Ok(running_root_max(&radii).last().copied().unwrap_or(0.0))
}

/// `r_j^{1/j}` for `j = 1, 2, …` (input indexed from depth 1).
pub fn roots_by_depth(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| v.powf(1.0 / (i + 1) as f64))
        .collect()
}

/// Running maximum of `r_j^{1/j}`.
pub fn running_root_max(values: &[f64]) -> Vec<f64> {
    let mut best: f64 = 0.0;
    roots_by_depth(values)
        .into_iter()
        .map(|r| {
            best = best.max(r);
            best
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonotonicityCheck {
    pub n: usize,
    pub m: usize,
    /// `ρ(Σ^{nm})^{1/nm}`
    pub longer: f64,
    /// `ρ(Σⁿ)^{1/n}`
    pub shorter: f64,
    pub holds: bool,
}

/// Checks `ρ(Σ^{nm})^{1/nm} ≥ ρ(Σⁿ)^{1/n}`, which holds because every
/// product in `(Σⁿ)^m` is one of `Σ^{nm}`.
pub fn rho_power_monotonicity(set: &MatrixSet, n: usize, m: usize) -> Result<MonotonicityCheck> {
    if n == 0 || m == 0 {
        return Err(Error::usage("n and m must be positive"));
    }
    let radii = spectral_radii_by_depth(set, n * m, DEFAULT_NODE_BUDGET)?;
    let longer = radii[n * m - 1].powf(1.0 / (n * m) as f64);
    let shorter = radii[n - 1].powf(1.0 / n as f64);
    Ok(MonotonicityCheck {
        n,
        m,
        longer,
        shorter,
        holds: longer >= shorter - MONOTONICITY_TOL,
    })
}
