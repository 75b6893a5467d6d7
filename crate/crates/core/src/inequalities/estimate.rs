use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, MatrixSet};
use crate::norms::search::admissible;
use crate::norms::{ellipsoidal_descent, NormSpec, PreparedNorm};
use crate::random::{complex_normal, gaussian_matrix, trial_rng};
use crate::semigroup::{jsr_bounds, walk, BoundsConfig, BoundsReport};

use super::{DEGENERATE_CUTOFF, DEGENERATE_TOL};

/// Relative bound gap under which ratios against the upper bound are also
/// reported (they are then certified under-estimates of the true ratio).
pub const GAP_CERTIFY_THRESHOLD: f64 = 0.01;

/// Largest `|Σ|^d` for which `Σᵈ` is materialized.
const MAX_POWER_PRODUCTS: usize = 100_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormRatio {
    pub norm: String,
    /// `‖Σᵈ‖ / (R_lb ‖Σ‖^{d−1})`
    pub ratio: Option<f64>,
    /// `‖Σᵈ‖ / (R_ub ‖Σ‖^{d−1})`, only when the bounds are within 1%.
    pub certified: Option<f64>,
    /// `‖Σᵈ‖^{1/d} ≥ R_lb − tol·‖Σ‖`
    pub power_root_ok: bool,
    pub degenerate: bool,
    pub skipped: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct C1Estimate {
    pub lower: f64,
    pub upper: f64,
    pub relative_gap: f64,
    pub per_norm: Vec<NormRatio>,
}

/// Evaluates `‖Σᵈ‖ / (R ‖Σ‖^{d−1})` in each norm, with `R` replaced by the
/// certified bounds from a search of the given depth.
pub fn estimate_c1(set: &MatrixSet, norms: &[NormSpec], depth: usize, tol: f64) -> Result<C1Estimate> {
    let bounds = bounds_for(set, depth)?;
    let (lower, upper) = (bounds.best_lower, bounds.best_upper);
    let relative_gap = if upper > 0.0 { (upper - lower) / upper } else { 0.0 };
    let d = set.dim() as i32;
    let products = power_products(set)?;
    let mut per_norm = Vec::with_capacity(norms.len());
    for spec in norms {
        if !spec.is_induced() {
            return Err(Error::usage("operator norms only"));
        }
        let norm = spec.prepare()?;
        let n1 = norm.set(set)?;
        let nd = products.iter().try_fold(0.0f64, |m, p| Ok::<_, Error>(m.max(norm.operator(p)?)))?;
        let mut entry = NormRatio {
            norm: spec.label(),
            ratio: None,
            certified: None,
            power_root_ok: nd.powf(1.0 / d as f64) >= lower - tol * n1,
            degenerate: false,
            skipped: false,
        };
        if n1 == 0.0 || nd <= DEGENERATE_TOL * n1.powi(d) && lower <= DEGENERATE_CUTOFF * n1 {
            entry.degenerate = true;
        } else if lower <= DEGENERATE_CUTOFF * n1 {
            entry.skipped = relative_gap > GAP_CERTIFY_THRESHOLD;
            entry.degenerate = !entry.skipped;
        } else {
            let denom = n1.powi(d - 1);
            entry.ratio = Some(nd / (lower * denom));
            if relative_gap <= GAP_CERTIFY_THRESHOLD {
                entry.certified = Some(nd / (upper * denom));
            }
        }
        per_norm.push(entry);
    }
    Ok(C1Estimate {
        lower,
        upper,
        relative_gap,
        per_norm,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SEstimate {
    /// Best `‖Σᵈ‖ / ‖Σ‖^{d−1}` found; a lower estimate of the supremum over norms.
    pub value: f64,
    pub norm_witness: NormSpec,
    pub budget: usize,
    /// Certified lower bound on the joint spectral radius used for comparison.
    pub jsr_lower: f64,
    /// `value ≥ jsr_lower − tol·‖Σ‖₂`
    pub consistent: bool,
}

/// Maximizes `‖Σᵈ‖_W / ‖Σ‖_W^{d−1}` over ellipsoidal norms `‖x‖_W = ‖Wx‖₂`.
///
/// An eighth of the budget goes to an ellipsoidal descent on `‖Σ‖_W`, three
/// eighths to random `W` of varied shape, and the rest to a (1+1) evolution
/// strategy started from the best few candidates. The Euclidean norm is always
/// a candidate, and `Σ = {0}` gives 0.
pub fn estimate_s(set: &MatrixSet, budget: usize, seed: u64, depth: usize, tol: f64) -> Result<SEstimate> {
    let d = set.dim();
    let bounds = bounds_for(set, depth)?;
    let scale = crate::norms::set_norm(&NormSpec::Euclidean, set)?;
    if set.all_zero() {
        return Ok(SEstimate {
            value: 0.0,
            norm_witness: NormSpec::Euclidean,
            budget,
            jsr_lower: 0.0,
            consistent: true,
        });
    }
    let products = power_products(set)?;
    let value_at = |w: &CMatrix| -> Result<f64> {
        let norm = PreparedNorm::Similarity {
            s: w.clone(),
            s_inv: w.inverse()?,
            base: Box::new(PreparedNorm::Euclidean),
        };
        let n1 = norm.set(set)?;
        if n1 == 0.0 {
            return Ok(0.0);
        }
        let nd = products.iter().try_fold(0.0f64, |m, p| Ok::<_, Error>(m.max(norm.operator(p)?)))?;
        Ok(nd / n1.powi(d as i32 - 1))
    };

    // Scored candidates; the best few seed the local search.
    let mut pool: Vec<(f64, CMatrix)> = vec![(value_at(&CMatrix::identity(d))?, CMatrix::identity(d))];
    let descent_budget = budget / 8;
    if descent_budget > 0 {
        let desc = ellipsoidal_descent(set, descent_budget, seed)?;
        if admissible(&desc.w) {
            pool.push((value_at(&desc.w)?, desc.w));
        }
    }
    let mut rng = trial_rng(seed, 1);
    let explore_budget = budget * 3 / 8;
    for _ in 0..explore_budget {
        let w = random_shape(&mut rng, d);
        if admissible(&w) {
            pool.push((value_at(&w)?, w));
        }
    }
    pool.sort_by(|a, b| b.0.total_cmp(&a.0));
    pool.truncate(LOCAL_STARTS);

    let local_budget = budget - descent_budget - explore_budget;
    let per_start = local_budget / pool.len();
    let (mut best, mut w) = pool[0].clone();
    for (value, start) in pool {
        let (v, cand) = evolve(&value_at, start, value, per_start, &mut rng)?;
        if v > best {
            best = v;
            w = cand;
        }
    }
    let norm_witness = if w.approx_eq(&CMatrix::identity(d), 0.0) {
        NormSpec::Euclidean
    } else {
        NormSpec::Ellipsoidal { w }
    };
    Ok(SEstimate {
        value: best,
        norm_witness,
        budget,
        jsr_lower: bounds.best_lower,
        consistent: best >= bounds.best_lower - tol * scale,
    })
}

const LOCAL_STARTS: usize = 4;

/// Gaussian `W` whose off-diagonal part is scaled by a log-uniform factor,
/// so both near-diagonal and strongly sheared ellipsoids are drawn.
fn random_shape<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let shear = rng.random_range(-4.0f64..4.0).exp();
    let mut w = gaussian_matrix(rng, d);
    for i in 0..d {
        for j in 0..d {
            if i != j {
                w[(i, j)] *= shear;
            }
        }
    }
    w
}

/// (1+1) evolution strategy: perturbs every entry by Gaussian noise scaled to
/// `step · max|w_ij|`, keeps improvements, and adapts the step with the
/// one-fifth success rule.
fn evolve<R, F>(value_at: &F, mut w: CMatrix, mut best: f64, budget: usize, rng: &mut R) -> Result<(f64, CMatrix)>
where
    R: Rng + ?Sized,
    F: Fn(&CMatrix) -> Result<f64>,
{
    let d = w.dim();
    let mut step: f64 = 0.3;
    for _ in 0..budget {
        let scale = step * w.max_abs();
        let mut cand = w.clone();
        for i in 0..d {
            for j in 0..d {
                cand[(i, j)] += complex_normal(rng) * scale;
            }
        }
        let v = if admissible(&cand) { value_at(&cand)? } else { f64::NEG_INFINITY };
        if v > best {
            best = v;
            w = cand;
            step *= 1.5;
        } else {
            step *= 0.9;
        }
        step = step.clamp(1e-8, 2.0);
    }
    Ok((best, w))
}

fn bounds_for(set: &MatrixSet, depth: usize) -> Result<BoundsReport> {
    let report = jsr_bounds(set, &NormSpec::Euclidean, &BoundsConfig { max_depth: depth, ..BoundsConfig::default() })?;
    if !report.complete {
        return Err(Error::BudgetExceeded {
            budget: crate::semigroup::DEFAULT_NODE_BUDGET,
            visited: report.nodes_visited,
        });
    }
    Ok(report)
}

/// All products of length `d`.
fn power_products(set: &MatrixSet) -> Result<Vec<CMatrix>> {
    let d = set.dim();
    let count = set.len().saturating_pow(d as u32);
    if count > MAX_POWER_PRODUCTS {
        return Err(Error::usage(format!("|Σ|^d = {count} products is over the cap")));
    }
    let mut out = Vec::with_capacity(count);
    walk(set, d, None, &mut |w, m| {
        if w.len() == d {
            out.push(m.clone());
        }
        Ok(true)
    })?;
    Ok(out)
}
