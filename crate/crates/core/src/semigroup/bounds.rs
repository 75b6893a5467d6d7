//! Branch-and-bound search of the product tree.
//!
//! The tree is explored depth first. Each visited product `P` of length `j`
//! contributes `ρ(P)^{1/j}` to the incumbent lower bound `L` and `‖P‖` to the
//! depth-`j` norm maximum `β_j`. With pruning enabled, a node whose norm
//! satisfies `‖P‖ ≤ (L(1 − margin))^j` is not expanded.
//!
//! Upper bounds stay certified under pruning. Write `α = L(1 − margin)` for
//! the final incumbent. Any long product factors greedily from the left into
//! blocks that are either a pruned node (norm at most `α^j`) or a visited node
//! of depth `n` (norm at most `β_n`), so the joint spectral radius is at most
//! `max(α, β_n^{1/n})`. Depths with no pruning above them report the plain
//! `β_n^{1/n} = ‖Σⁿ‖^{1/n}` and are marked exact.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use super::{walk, Word};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::matcore::spectral_radius;
use crate::matrix::MatrixSet;
use crate::norms::{NormSpec, PreparedNorm};

pub const DEFAULT_MAX_DEPTH: usize = 8;
pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundsConfig {
    pub max_depth: usize,
    pub node_budget: usize,
    pub pruning: bool,
    /// Fraction in `[0, 1)` by which the incumbent is shrunk before pruning.
    pub prune_margin: f64,
    /// Explore top-level branches concurrently (needs the `parallel` feature).
    pub parallel: bool,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            max_depth: DEFAULT_MAX_DEPTH,
            node_budget: DEFAULT_NODE_BUDGET,
            pruning: true,
            prune_margin: 0.0,
            parallel: false,
        }
    }
}

impl BoundsConfig {
    pub fn exhaustive(max_depth: usize) -> Self {
        Self {
            max_depth,
            pruning: false,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthStatus {
    /// Every product of this length was evaluated.
    Exact,
    /// Some ancestor was pruned; the upper bound uses the pruning threshold.
    Pruned,
    /// The node budget ran out before this depth was covered.
    Incomplete,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DepthRecord {
    pub depth: usize,
    pub status: DepthStatus,
    /// Certified upper bound from this depth; `None` when incomplete.
    pub upper: Option<f64>,
    /// `β_n^{1/n}` over visited products of this length.
    pub norm_root: f64,
    /// `max_{j≤n} ρ(Σʲ)^{1/j}` over visited products.
    pub lower: f64,
    /// `ρ(Σⁿ)^{1/n}` over visited products of this length.
    pub rho_root: f64,
    pub nodes_visited: usize,
    pub nodes_pruned: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub depth: usize,
    pub word: Word,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundsReport {
    pub norm: String,
    pub records: Vec<DepthRecord>,
    pub best_upper: f64,
    pub best_lower: f64,
    pub gap: f64,
    pub upper_witness: Option<Witness>,
    pub lower_witness: Option<Witness>,
    /// `false` when the node budget ran out.
    pub complete: bool,
    pub pruning: bool,
    pub prune_margin: f64,
    /// A positive margin was in effect.
    pub margin_applied: bool,
    pub nodes_visited: usize,
    pub nodes_pruned: usize,
}

impl BoundsReport {
    pub fn record(&self, depth: usize) -> Option<&DepthRecord> {
        self.records.iter().find(|r| r.depth == depth)
    }
}

#[derive(Clone, Default)]
struct BranchStats {
    max_norm: Vec<f64>,
    norm_word: Vec<Option<Vec<usize>>>,
    max_rho: Vec<f64>,
    visited: Vec<usize>,
    pruned: Vec<usize>,
    min_pruned_depth: Option<usize>,
    best_lower: f64,
    lower_word: Option<Vec<usize>>,
}

impl BranchStats {
    fn new(depth: usize) -> Self {
        Self {
            max_norm: vec![0.0; depth + 1],
            norm_word: vec![None; depth + 1],
            max_rho: vec![0.0; depth + 1],
            visited: vec![0; depth + 1],
            pruned: vec![0; depth + 1],
            ..Self::default()
        }
    }

    /// Folds `other` into `self`; on ties the earlier branch keeps its witness.
    fn merge(&mut self, other: BranchStats) {
        for j in 0..self.max_norm.len() {
            if (other.max_norm[j] > self.max_norm[j] || self.norm_word[j].is_none()) && other.norm_word[j].is_some() {
                self.max_norm[j] = other.max_norm[j];
                self.norm_word[j] = other.norm_word[j].clone();
            }
            self.max_rho[j] = self.max_rho[j].max(other.max_rho[j]);
            self.visited[j] += other.visited[j];
            self.pruned[j] += other.pruned[j];
        }
        self.min_pruned_depth = match (self.min_pruned_depth, other.min_pruned_depth) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if other.best_lower > self.best_lower || (self.lower_word.is_none() && other.lower_word.is_some()) {
            self.best_lower = other.best_lower;
            self.lower_word = other.lower_word;
        }
    }
}

/// Two-sided bounds on the joint spectral radius of `set`.
///
/// The norm must be induced (operator) for the upper bounds to be certified;
/// `EntrySup` is rejected. Budget exhaustion is not an error: the report is
/// flagged incomplete and only fully covered depths contribute upper bounds.
pub fn jsr_bounds(set: &MatrixSet, spec: &NormSpec, config: &BoundsConfig) -> Result<BoundsReport> {
    if config.max_depth == 0 {
        return Err(Error::usage("max_depth must be at least 1"));
    }
    if !(0.0..1.0).contains(&config.prune_margin) {
        return Err(Error::usage("prune_margin must lie in [0, 1)"));
    }
    if !spec.is_induced() {
        return Err(Error::usage(
            "joint spectral radius bounds need an induced operator norm",
        ));
    }
    if config.node_budget < set.len() {
        return Err(Error::usage("node budget is smaller than the set"));
    }
    let norm = spec.prepare()?;
    let depth = config.max_depth;

    if set.all_zero() {
        return Ok(zero_report(spec, config, set.len()));
    }

    let incumbent = AtomicU64::new(0f64.to_bits());
    let counter = AtomicUsize::new(0);
    let exhausted = AtomicBool::new(false);

    let branches = map_indexed(set.len(), config.parallel, |root| {
        explore_branch(set, &norm, config, root, &incumbent, &counter, &exhausted)
    });
    let mut stats = BranchStats::new(depth);
    for b in branches {
        stats.merge(b?);
    }
    let complete = !exhausted.load(Ordering::SeqCst);

    // Depth one is always recomputed in full so that an exhausted run still
    // carries a certified upper bound.
    for (i, a) in set.iter().enumerate() {
        let nu = norm.operator(a)?;
        if nu > stats.max_norm[1] || stats.norm_word[1].is_none() {
            stats.max_norm[1] = nu;
            stats.norm_word[1] = Some(vec![i]);
        }
        let rho = spectral_radius(a)?;
        stats.max_rho[1] = stats.max_rho[1].max(rho);
        if rho > stats.best_lower || stats.lower_word.is_none() {
            stats.best_lower = rho;
            stats.lower_word = Some(vec![i]);
        }
    }

    let alpha = stats.best_lower * (1.0 - config.prune_margin);
    let mut records = Vec::with_capacity(depth);
    let mut running_lower: f64 = 0.0;
    for n in 1..=depth {
        let inv = 1.0 / n as f64;
        let norm_root = stats.max_norm[n].powf(inv);
        let rho_root = stats.max_rho[n].powf(inv);
        running_lower = running_lower.max(rho_root);
        let status = if !complete && n > 1 {
            DepthStatus::Incomplete
        } else if stats.min_pruned_depth.is_some_and(|p| p < n) {
            DepthStatus::Pruned
        } else {
            DepthStatus::Exact
        };
        let upper = match status {
            DepthStatus::Exact => Some(norm_root),
            DepthStatus::Pruned => Some(norm_root.max(alpha)),
            DepthStatus::Incomplete => None,
        };
        records.push(DepthRecord {
            depth: n,
            status,
            upper,
            norm_root,
            lower: running_lower,
            rho_root,
            nodes_visited: stats.visited[n].max(if n == 1 { set.len() } else { 0 }),
            nodes_pruned: stats.pruned[n],
        });
    }

    let (best_depth, best_upper) = records
        .iter()
        .filter_map(|r| r.upper.map(|u| (r.depth, u)))
        .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
    let upper_witness = stats.norm_word[best_depth].as_ref().map(|w| Witness {
        depth: best_depth,
        word: Word::from_letters(w),
        value: best_upper,
    });
    let best_lower = stats.best_lower;
    let lower_witness = stats.lower_word.as_ref().map(|w| Witness {
        depth: w.len(),
        word: Word::from_letters(w),
        value: best_lower,
    });

    Ok(BoundsReport {
        norm: spec.label(),
        best_upper,
        best_lower,
        gap: best_upper - best_lower,
        upper_witness,
        lower_witness,
        complete,
        pruning: config.pruning,
        prune_margin: config.prune_margin,
        margin_applied: config.pruning && config.prune_margin > 0.0,
        nodes_visited: records.iter().map(|r| r.nodes_visited).sum(),
        nodes_pruned: records.iter().map(|r| r.nodes_pruned).sum(),
        records,
    })
}

fn explore_branch(
    set: &MatrixSet,
    norm: &PreparedNorm,
    config: &BoundsConfig,
    root: usize,
    incumbent: &AtomicU64,
    counter: &AtomicUsize,
    exhausted: &AtomicBool,
) -> Result<BranchStats> {
    let depth = config.max_depth;
    let mut stats = BranchStats::new(depth);
    walk(set, depth, Some(root), &mut |word, m| {
        if exhausted.load(Ordering::Relaxed) {
            return Ok(false);
        }
        if counter.fetch_add(1, Ordering::Relaxed) >= config.node_budget {
            exhausted.store(true, Ordering::SeqCst);
            return Ok(false);
        }
        let j = word.len();
        let nu = norm.operator(m)?;
        let rho = spectral_radius(m)?;
        stats.visited[j] += 1;
        if nu > stats.max_norm[j] || stats.norm_word[j].is_none() {
            stats.max_norm[j] = nu;
            stats.norm_word[j] = Some(word.to_vec());
        }
        stats.max_rho[j] = stats.max_rho[j].max(rho);
        let root_rho = rho.powf(1.0 / j as f64);
        if root_rho > stats.best_lower || stats.lower_word.is_none() {
            stats.best_lower = root_rho;
            stats.lower_word = Some(word.to_vec());
        }
        // Nonnegative doubles order like their bit patterns.
        incumbent.fetch_max(root_rho.to_bits(), Ordering::SeqCst);

        if config.pruning && j < depth {
            let l = f64::from_bits(incumbent.load(Ordering::SeqCst)) * (1.0 - config.prune_margin);
            if l > 0.0 && nu <= l.powi(j as i32) {
                stats.pruned[j] += 1;
                stats.min_pruned_depth = Some(stats.min_pruned_depth.map_or(j, |p| p.min(j)));
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    Ok(stats)
}

fn zero_report(spec: &NormSpec, config: &BoundsConfig, size: usize) -> BoundsReport {
    BoundsReport {
        norm: spec.label(),
        records: vec![DepthRecord {
            depth: 1,
            status: DepthStatus::Exact,
            upper: Some(0.0),
            norm_root: 0.0,
            lower: 0.0,
            rho_root: 0.0,
            nodes_visited: size,
            nodes_pruned: 0,
        }],
        best_upper: 0.0,
        best_lower: 0.0,
        gap: 0.0,
        upper_witness: None,
        lower_witness: None,
        complete: true,
        pruning: config.pruning,
        prune_margin: config.prune_margin,
        margin_applied: false,
        nodes_visited: size,
        nodes_pruned: 0,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapRecord {
    pub depth: usize,
    /// `‖Σⁿ‖^{1/n}`
    pub upper: f64,
    /// `max_{j≤n} ρ(Σʲ)^{1/j}`
    pub lower: f64,
    pub gap: f64,
    /// `min_{m≤n} ‖Σᵐ‖^{1/m} − lower`
    pub running_gap: f64,
}

/// Gap between the norm-based and spectral-radius-based bounds at each of
/// the requested depths, computed from one exhaustive search.
pub fn berger_wang_gap(set: &MatrixSet, spec: &NormSpec, depths: &[usize]) -> Result<Vec<GapRecord>> {
    let max_depth = depths.iter().copied().max().ok_or_else(|| Error::usage("no depths given"))?;
    if depths.contains(&0) {
        return Err(Error::usage("depths must be positive"));
    }
    let report = jsr_bounds(set, spec, &BoundsConfig::exhaustive(max_depth))?;
    if !report.complete {
        return Err(Error::BudgetExceeded {
            budget: DEFAULT_NODE_BUDGET,
            visited: report.nodes_visited,
        });
    }
    let mut running_upper = Vec::with_capacity(max_depth);
    let mut best = f64::INFINITY;
    let mut norm_roots = Vec::with_capacity(max_depth);
    let mut lowers = Vec::with_capacity(max_depth);
    for n in 1..=max_depth {
        // the all-zero shortcut only carries depth one
        let (norm_root, lower) = report
            .record(n)
            .map_or((0.0, 0.0), |r| (r.norm_root, r.lower));
        best = best.min(norm_root);
        running_upper.push(best);
        norm_roots.push(norm_root);
        lowers.push(lower);
    }
    Ok(depths
        .iter()
        .map(|&n| GapRecord {
            depth: n,
            upper: norm_roots[n - 1],
            lower: lowers[n - 1],
            gap: norm_roots[n - 1] - lowers[n - 1],
            running_gap: running_upper[n - 1] - lowers[n - 1],
        })
        .collect())
}
