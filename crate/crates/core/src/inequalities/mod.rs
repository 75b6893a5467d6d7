//! Checkers for the norm and trace inequalities relating the joint spectral
//! radius to spectral radii of products, and seeded ensemble drivers.
//!
//! Only inequalities with explicit constants are asserted:
//! - `‖Aᵈ‖ ≤ (2ᵈ − 1) ρ(A) ‖A‖^{d−1}` for any operator norm;
//! - `‖SΣᵈS⁻¹‖₀ ≤ d^{d−1} ‖Σ‖₀ ‖SΣS⁻¹‖₀^{d−1}` for positive diagonal `S`
//!   and the entry-sup norm `‖·‖₀`.
//!
//! The remaining ratios have constants that exist but are not known; they are
//! reported as empirical maxima.

mod ensembles;
mod estimate;

pub use ensembles::{
    c1_ensemble, other_inequality_ensemble, power_inequality_ensemble, procesi_ensemble, theorem_b_ensemble,
    trace_identity_ensemble, weaker_lemma_ensemble, weaker_lemma_general_ensemble, EnsembleConfig,
};
pub use estimate::{estimate_c1, estimate_s, C1Estimate, SEstimate, GAP_CERTIFY_THRESHOLD};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::symmetrized_product;
use crate::matcore::spectral_radius;
use crate::matrix::{CMatrix, MatrixSet};
use crate::norms::NormSpec;
use crate::semigroup::{
    jsr_bounds, running_root_max, set_power_norm, spectral_radii_by_depth, BoundsConfig, DEFAULT_NODE_BUDGET,
    MONOTONICITY_TOL,
};

/// Slack on asserted explicit constants.
pub const EXPLICIT_TOL: f64 = 1e-8;
/// Relative cutoff below which a denominator counts as zero.
pub const DEGENERATE_CUTOFF: f64 = 1e-12;
/// Tolerance on `‖P‖ ≤ tol · ‖Σ‖ᵈ` in the degenerate branch.
pub const DEGENERATE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Bound {
    Explicit(f64),
    Empirical,
}

/// Which way a single evaluation went.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Denominator positive; a ratio was computed.
    Ratio,
    /// Denominator numerically zero; the numerator was checked instead.
    Degenerate,
    /// Both sides vanish identically.
    Vacuous,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RatioCheck {
    pub branch: Branch,
    pub ratio: Option<f64>,
    pub bound: Bound,
    pub holds: bool,
}

impl RatioCheck {
    fn ratio(ratio: f64, bound: Bound, tol: f64) -> Self {
        let holds = match bound {
            Bound::Explicit(b) => ratio <= b + tol,
            Bound::Empirical => ratio.is_finite(),
        };
        Self {
            branch: Branch::Ratio,
            ratio: Some(ratio),
            bound,
            holds,
        }
    }

    fn degenerate(holds: bool, bound: Bound) -> Self {
        Self {
            branch: Branch::Degenerate,
            ratio: None,
            bound,
            holds,
        }
    }

    fn vacuous(bound: Bound) -> Self {
        Self {
            branch: Branch::Vacuous,
            ratio: None,
            bound,
            holds: true,
        }
    }
}

/// `‖Aᵈ‖ / (ρ(A) ‖A‖^{d−1})` against `2ᵈ − 1`.
///
/// When `ρ(A) ≤ 10⁻¹² ‖A‖` the matrix is treated as nilpotent and
/// `‖Aᵈ‖ ≤ tol · (2ᵈ − 1) ‖A‖ᵈ` is checked instead.
pub fn check_power_inequality(a: &CMatrix, spec: &NormSpec, tol: f64) -> Result<RatioCheck> {
    if !spec.is_induced() {
        return Err(Error::usage("the power inequality needs an induced norm"));
    }
    let d = a.dim();
    let c = power_constant(d);
    let bound = Bound::Explicit(c);
    if a.is_zero() {
        return Ok(RatioCheck::vacuous(bound));
    }
    let norm = spec.prepare()?;
    let nu = norm.operator(a)?;
    let ad = norm.operator(&a.pow(d))?;
    let rho = spectral_radius(a)?;
    if rho <= DEGENERATE_CUTOFF * nu {
        return Ok(RatioCheck::degenerate(ad <= tol * c * nu.powi(d as i32), bound));
    }
    Ok(RatioCheck::ratio(ad / (rho * nu.powi(d as i32 - 1)), bound, tol))
}

/// `2ᵈ − 1`
pub fn power_constant(d: usize) -> f64 {
    2f64.powi(d as i32) - 1.0
}

/// `d^{d−1}`
pub fn weaker_lemma_constant(d: usize) -> f64 {
    (d as f64).powi(d as i32 - 1)
}

/// `‖SΣᵈS⁻¹‖₀ / (‖Σ‖₀ ‖SΣS⁻¹‖₀^{d−1})` in the entry-sup norm, against `d^{d−1}`.
/// `S` must be diagonal with positive real entries.
pub fn check_weaker_lemma(set: &MatrixSet, s: &CMatrix, tol: f64) -> Result<RatioCheck> {
    let positive_diag = s.is_diagonal() && (0..s.dim()).all(|i| s[(i, i)].im == 0.0 && s[(i, i)].re > 0.0);
    if !positive_diag {
        return Err(Error::usage("S must be diagonal with positive entries"));
    }
    let d = set.dim();
    weaker_ratio(set, s, &NormSpec::EntrySup, Bound::Explicit(weaker_lemma_constant(d)), tol)
}

/// The same ratio for arbitrary invertible `S` in the Euclidean norm, with
/// no constant asserted.
pub fn check_weaker_lemma_general(set: &MatrixSet, s: &CMatrix) -> Result<RatioCheck> {
    weaker_ratio(set, s, &NormSpec::Euclidean, Bound::Empirical, 0.0)
}

fn weaker_ratio(set: &MatrixSet, s: &CMatrix, spec: &NormSpec, bound: Bound, tol: f64) -> Result<RatioCheck> {
    let d = set.dim();
    if s.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
    }
    if set.all_zero() {
        return Ok(RatioCheck::vacuous(bound));
    }
    let conj = set.conjugate(s)?;
    let num = set_power_norm(&conj, spec, d, DEFAULT_NODE_BUDGET)?;
    let norm = spec.prepare()?;
    let plain = norm.set(set)?;
    let conj_norm = norm.set(&conj)?;
    Ok(RatioCheck::ratio(num / (plain * conj_norm.powi(d as i32 - 1)), bound, tol))
}

/// `‖P(A₁, …, A_d)‖ / (‖Σ‖^{d−1} max_{j≤d} ρ(Σʲ)^{1/j})` for `Σ = {A₁, …, A_d}`.
///
/// If the spectral radii all vanish (relative to `‖Σ‖`), checks
/// `‖P‖ ≤ 10⁻⁹ ‖Σ‖ᵈ` instead.
pub fn check_other_inequality(tuple: &[CMatrix], spec: &NormSpec) -> Result<RatioCheck> {
    let d = tuple.first().ok_or(Error::EmptySet)?.dim();
    if tuple.len() != d {
        return Err(Error::usage(format!(
            "expected {d} matrices of size {d}, got {}",
            tuple.len()
        )));
    }
    if !spec.is_induced() {
        return Err(Error::usage("the symmetrized product bound needs an induced norm"));
    }
    let set = MatrixSet::new(tuple.to_vec())?;
    let norm = spec.prepare()?;
    let p = norm.operator(&symmetrized_product(tuple, d)?)?;
    let sigma = norm.set(&set)?;
    if sigma == 0.0 {
        return Ok(RatioCheck::vacuous(Bound::Empirical));
    }
    let radii = spectral_radii_by_depth(&set, d, DEFAULT_NODE_BUDGET)?;
    let q = running_root_max(&radii).last().copied().unwrap_or(0.0);
    if q < DEGENERATE_CUTOFF * sigma {
        return Ok(RatioCheck::degenerate(
            p <= DEGENERATE_TOL * sigma.powi(d as i32),
            Bound::Empirical,
        ));
    }
    Ok(RatioCheck::ratio(p / (sigma.powi(d as i32 - 1) * q), Bound::Empirical, 0.0))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoremBCheck {
    pub k: usize,
    /// `max_{1≤j≤k} ρ(Σʲ)^{1/j}`
    pub q: f64,
    /// The same maximum over `k/2 < j ≤ k`.
    pub q_restricted: f64,
    pub restricted_matches: bool,
    pub upper: f64,
    pub lower: f64,
    /// `upper / q`; `None` when `q` vanishes.
    pub ratio: Option<f64>,
    /// `q ≈ 0` while the upper bound is not: never expected.
    pub flagged: bool,
    pub branch: Branch,
}

/// Compares the certified upper bound at `depth` with
/// `q = max_{1≤j≤k} ρ(Σʲ)^{1/j}`, `k = 2ᵈ − 1` unless overridden.
pub fn check_theorem_b(set: &MatrixSet, depth: usize, k_override: Option<usize>, tol: f64) -> Result<TheoremBCheck> {
    let d = set.dim();
    let k = k_override.unwrap_or_else(|| crate::invariants::procesi_length(d));
    if k == 0 {
        return Err(Error::usage("k must be positive"));
    }
    let radii = spectral_radii_by_depth(set, k, DEFAULT_NODE_BUDGET)?;
    let roots = crate::semigroup::roots_by_depth(&radii);
    let q = roots.iter().copied().fold(0.0, f64::max);
    let q_restricted = roots[k / 2..].iter().copied().fold(0.0, f64::max);
    let bounds = jsr_bounds(set, &NormSpec::Euclidean, &BoundsConfig::exhaustive(depth))?;
    let scale = crate::norms::set_norm(&NormSpec::Euclidean, set)?;
    let (ratio, flagged, branch) = if scale == 0.0 || bounds.best_upper <= tol * scale {
        (None, false, Branch::Vacuous)
    } else if q <= DEGENERATE_CUTOFF * scale {
        (None, true, Branch::Degenerate)
    } else {
        (Some(bounds.best_upper / q), false, Branch::Ratio)
    };
    Ok(TheoremBCheck {
        k,
        q,
        q_restricted,
        restricted_matches: (q - q_restricted).abs() <= 1e-9 * q.max(1.0),
        upper: bounds.best_upper,
        lower: bounds.best_lower,
        ratio,
        flagged,
        branch,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct D2TheoremBCheck {
    /// `ρ(Σ²)^{1/2}`
    pub q2: f64,
    pub upper: f64,
    pub ratio: Option<f64>,
    pub flagged: bool,
    /// `ρ(Σ^{2n})^{1/2n}` for `n = 1..=depth/2`.
    pub even_roots: Vec<f64>,
    /// Nondecreasing within tolerance.
    pub monotone: bool,
    /// No entry exceeds the certified upper bound.
    pub bounded: bool,
}

/// Two-by-two sets: the upper bound against `ρ(Σ²)^{1/2}`, and the sequence
/// `ρ(Σ^{2n})^{1/2n}` up to the search depth.
pub fn check_d2_theorem_b(set: &MatrixSet, depth: usize, tol: f64) -> Result<D2TheoremBCheck> {
    if set.dim() != 2 {
        return Err(Error::usage("expects 2×2 matrices"));
    }
    let depth = depth.max(2);
    let radii = spectral_radii_by_depth(set, depth, DEFAULT_NODE_BUDGET)?;
    let even_roots: Vec<f64> = (1..=depth / 2)
        .map(|n| radii[2 * n - 1].powf(1.0 / (2 * n) as f64))
        .collect();
    let q2 = even_roots[0];
    let bounds = jsr_bounds(set, &NormSpec::Euclidean, &BoundsConfig::exhaustive(depth))?;
    let scale = crate::norms::set_norm(&NormSpec::Euclidean, set)?;
    let (ratio, flagged) = if scale == 0.0 || bounds.best_upper <= tol * scale {
        (None, false)
    } else if q2 <= DEGENERATE_CUTOFF * scale {
        (None, true)
    } else {
        (Some(bounds.best_upper / q2), false)
    };
    let monotone = even_roots.windows(2).all(|w| w[1] >= w[0] - MONOTONICITY_TOL);
    let bounded = even_roots.iter().all(|&r| r <= bounds.best_upper + tol);
    Ok(D2TheoremBCheck {
        q2,
        upper: bounds.best_upper,
        ratio,
        flagged,
        even_roots,
        monotone,
        bounded,
    })
}

/// Aggregate of many evaluations of one inequality.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IneqReport {
    pub name: String,
    pub trials: usize,
    /// Number of ratios computed (a trial may yield several).
    pub evaluated: usize,
    pub max_ratio: f64,
    pub max_ratio_witness: Option<String>,
    pub median_ratio: Option<f64>,
    pub bound: Bound,
    pub tol: f64,
    pub violations: usize,
    pub degenerate: usize,
    pub skipped: usize,
    /// Additional named statistics, sorted by name.
    pub extra: BTreeMap<String, f64>,
}

impl IneqReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// One evaluation inside a trial.
#[derive(Clone, Debug)]
pub(crate) struct Sample {
    pub label: String,
    pub ratio: Option<f64>,
    pub violation: bool,
    pub degenerate: bool,
    pub skipped: bool,
}

impl Sample {
    pub(crate) fn from_check(label: impl Into<String>, check: &RatioCheck) -> Self {
        Self {
            label: label.into(),
            ratio: check.ratio,
            violation: !check.holds,
            degenerate: check.branch != Branch::Ratio,
            skipped: false,
        }
    }

    pub(crate) fn value(label: impl Into<String>, ratio: f64, violation: bool) -> Self {
        Self {
            label: label.into(),
            ratio: Some(ratio),
            violation,
            degenerate: false,
            skipped: false,
        }
    }

    pub(crate) fn failure(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            ratio: None,
            violation: true,
            degenerate: false,
            skipped: false,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub(crate) struct TrialResult {
    pub samples: Vec<Sample>,
    /// Merged by maximum.
    pub maxima: Vec<(&'static str, f64)>,
    /// Merged by sum.
    pub counts: Vec<(&'static str, f64)>,
    /// Collected for medians.
    pub series: Vec<(&'static str, f64)>,
}

/// Folds per-trial results in trial order so the report does not depend on
/// scheduling.
pub(crate) fn assemble(
    name: &str,
    seed: u64,
    bound: Bound,
    tol: f64,
    results: Vec<Result<TrialResult>>,
) -> Result<IneqReport> {
    let trials = results.len();
    let mut report = IneqReport {
        name: name.to_string(),
        trials,
        evaluated: 0,
        max_ratio: 0.0,
        max_ratio_witness: None,
        median_ratio: None,
        bound,
        tol,
        violations: 0,
        degenerate: 0,
        skipped: 0,
        extra: BTreeMap::new(),
    };
    let mut ratios = Vec::new();
    let mut series: BTreeMap<&'static str, Vec<f64>> = BTreeMap::new();
    for (t, res) in results.into_iter().enumerate() {
        let res = res?;
        for s in res.samples {
            report.violations += usize::from(s.violation);
            report.degenerate += usize::from(s.degenerate);
            report.skipped += usize::from(s.skipped);
            let Some(r) = s.ratio else { continue };
            if !r.is_finite() {
                // never emitted; counted against the run instead
                report.violations += usize::from(!s.violation);
                continue;
            }
            report.evaluated += 1;
            ratios.push(r);
            if report.max_ratio_witness.is_none() || r > report.max_ratio {
                report.max_ratio = r;
                report.max_ratio_witness = Some(format!("seed {seed} trial {t} {}", s.label));
            }
        }
        for (k, v) in res.maxima {
            let e = report.extra.entry(k.to_string()).or_insert(v);
            *e = e.max(v);
        }
        for (k, v) in res.counts {
            *report.extra.entry(k.to_string()).or_insert(0.0) += v;
        }
        for (k, v) in res.series {
            series.entry(k).or_default().push(v);
        }
    }
    report.median_ratio = median(&mut ratios);
    for (k, mut v) in series {
        if let Some(m) = median(&mut v) {
            report.extra.insert(format!("median_{k}"), m);
        }
    }
    Ok(report)
}

pub(crate) fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}
